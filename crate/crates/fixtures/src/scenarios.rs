//! Ready-made apps, declarations and the hand-labeled field corpus.

use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};

use crate::apk::AppSpec;
use crate::dex::MethodSpec;
use crate::xml::{Element, PoolEncoding, Value};

pub fn m(class: &str, name: &str, ret: &str, params: &[&str]) -> MethodSpec {
    MethodSpec::new(class, name, ret, params)
}

pub fn location_latitude() -> MethodSpec {
    m("Landroid/location/Location;", "getLatitude", "D", &[])
}
pub fn location_longitude() -> MethodSpec {
    m("Landroid/location/Location;", "getLongitude", "D", &[])
}
pub fn ip_prefix_address() -> MethodSpec {
    m("Landroid/net/IpPrefix;", "getAddress", "Ljava/net/InetAddress;", &[])
}
pub fn sign_in_password() -> MethodSpec {
    m("Lcom/google/android/gms/auth/api/identity/SignInPassword;", "getPassword", "Ljava/lang/String;", &[])
}
pub fn find_view_by_id() -> MethodSpec {
    m("Landroid/app/Activity;", "findViewById", "Landroid/view/View;", &["I"])
}
pub fn wifi_mac() -> MethodSpec {
    m("Landroid/net/wifi/WifiInfo;", "getMacAddress", "Ljava/lang/String;", &[])
}
pub fn sim_serial() -> MethodSpec {
    m("Landroid/telephony/TelephonyManager;", "getSimSerialNumber", "Ljava/lang/String;", &[])
}
pub fn contact_photo() -> MethodSpec {
    m(
        "Landroid/provider/ContactsContract$Contacts;",
        "openContactPhotoInputStream",
        "Ljava/io/InputStream;",
        &["Landroid/content/ContentResolver;", "Landroid/net/Uri;"],
    )
}
pub fn webview_url() -> MethodSpec {
    m("Landroid/webkit/WebView;", "getUrl", "Ljava/lang/String;", &[])
}
pub fn camera_open() -> MethodSpec {
    m("Landroid/hardware/Camera;", "open", "Landroid/hardware/Camera;", &[])
}
pub fn audio_record_start() -> MethodSpec {
    m("Landroid/media/AudioRecord;", "startRecording", "V", &[])
}
pub fn sms_body() -> MethodSpec {
    m("Landroid/telephony/SmsMessage;", "getMessageBody", "Ljava/lang/String;", &[])
}

/// Framework and library methods that no dataset lists, including
/// near-misses of listed ones (same name, different class or prototype).
pub fn noise_methods() -> Vec<MethodSpec> {
    vec![
        m("Ljava/lang/StringBuilder;", "append", "Ljava/lang/StringBuilder;", &["Ljava/lang/String;"]),
        m("Ljava/lang/StringBuilder;", "toString", "Ljava/lang/String;", &[]),
        m("Ljava/lang/Object;", "<init>", "V", &[]),
        m("Landroid/util/Log;", "d", "I", &["Ljava/lang/String;", "Ljava/lang/String;"]),
        m("Landroid/location/Location;", "getAltitude", "D", &[]),
        m("Landroid/location/Location;", "getLatitude", "D", &["I"]),
        m("Landroid/net/Uri;", "parse", "Landroid/net/Uri;", &["Ljava/lang/String;"]),
        m("Landroid/app/Activity;", "setContentView", "V", &["I"]),
        m("Lcom/example/app/Util;", "getAddress", "Ljava/lang/String;", &[]),
        m("[Ljava/lang/String;", "clone", "Ljava/lang/Object;", &[]),
        m("Ljava/util/List;", "toArray", "[Ljava/lang/Object;", &["[Ljava/lang/Object;"]),
    ]
}

fn edit(id: &str) -> Element {
    Element::new("EditText").android("id", Value::reference("id", id))
}

fn typed(id: &str, flags: u32, symbol: &str) -> Element {
    edit(id).android("inputType", Value::symbolic(flags, symbol))
}

fn label(text: &str) -> Element {
    Element::new("TextView").android("text", Value::str(text))
}

fn column(children: impl IntoIterator<Item = Element>) -> Element {
    Element::new("LinearLayout").android("orientation", Value::str("vertical")).children(children)
}

const FILLER_PERMISSIONS: &[&str] = &[
    "android.permission.INTERNET",
    "android.permission.ACCESS_NETWORK_STATE",
    "android.permission.ACCESS_WIFI_STATE",
    "android.permission.CHANGE_WIFI_STATE",
    "android.permission.CHANGE_NETWORK_STATE",
    "android.permission.WAKE_LOCK",
    "android.permission.VIBRATE",
    "android.permission.RECEIVE_BOOT_COMPLETED",
    "android.permission.FOREGROUND_SERVICE",
    "android.permission.FOREGROUND_SERVICE_DATA_SYNC",
    "android.permission.FOREGROUND_SERVICE_MICROPHONE",
    "android.permission.FOREGROUND_SERVICE_CAMERA",
    "android.permission.FOREGROUND_SERVICE_PHONE_CALL",
    "android.permission.FOREGROUND_SERVICE_MEDIA_PLAYBACK",
    "android.permission.FOREGROUND_SERVICE_SPECIAL_USE",
    "android.permission.POST_NOTIFICATIONS",
    "android.permission.USE_FULL_SCREEN_INTENT",
    "android.permission.MODIFY_AUDIO_SETTINGS",
    "android.permission.BLUETOOTH",
    "android.permission.BLUETOOTH_CONNECT",
    "android.permission.BLUETOOTH_ADMIN",
    "android.permission.CALL_PHONE",
    "android.permission.MANAGE_OWN_CALLS",
    "android.permission.READ_CALL_LOG",
    "android.permission.WRITE_CALL_LOG",
    "android.permission.USE_BIOMETRIC",
    "android.permission.USE_FINGERPRINT",
    "android.permission.REQUEST_INSTALL_PACKAGES",
    "android.permission.REQUEST_IGNORE_BATTERY_OPTIMIZATIONS",
    "android.permission.SCHEDULE_EXACT_ALARM",
    "android.permission.USE_EXACT_ALARM",
    "android.permission.SYSTEM_ALERT_WINDOW",
    "android.permission.DISABLE_KEYGUARD",
    "android.permission.NFC",
    "android.permission.READ_SYNC_SETTINGS",
    "android.permission.WRITE_SYNC_SETTINGS",
    "android.permission.AUTHENTICATE_ACCOUNTS",
    "android.permission.MANAGE_ACCOUNTS",
    "android.permission.READ_PROFILE",
    "android.permission.WRITE_PROFILE",
    "android.permission.BROADCAST_STICKY",
    "android.permission.ACCESS_NOTIFICATION_POLICY",
    "android.permission.READ_APP_BADGE",
    "android.permission.WRITE_SETTINGS",
    "android.permission.ANSWER_PHONE_CALLS",
    "android.permission.USE_CREDENTIALS",
    "android.permission.WRITE_EXTERNAL_STORAGE",
    "com.google.android.c2dm.permission.RECEIVE",
    "com.google.android.providers.gsf.permission.READ_GSERVICES",
    "com.sec.android.provider.badge.permission.READ",
    "com.sec.android.provider.badge.permission.WRITE",
    "com.htc.launcher.permission.READ_SETTINGS",
    "com.htc.launcher.permission.UPDATE_SHORTCUT",
    "com.sonyericsson.home.permission.BROADCAST_BADGE",
    "com.sonymobile.home.permission.PROVIDER_INSERT_BADGE",
    "com.anddoes.launcher.permission.UPDATE_COUNT",
    "com.majeur.launcher.permission.UPDATE_BADGE",
    "com.huawei.android.launcher.permission.CHANGE_BADGE",
    "com.huawei.android.launcher.permission.READ_SETTINGS",
    "com.huawei.android.launcher.permission.WRITE_SETTINGS",
    "com.oppo.launcher.permission.READ_SETTINGS",
    "com.oppo.launcher.permission.WRITE_SETTINGS",
    "me.everything.badger.permission.BADGE_COUNT_READ",
    "me.everything.badger.permission.BADGE_COUNT_WRITE",
    "org.example.messenger.ACCESS_SECRETS",
];

/// Messenger evidencing device IDs, personal info, audio, contacts,
/// location, photos, messages and calendar, with 70 declared permissions.
pub fn signal_like() -> AppSpec {
    let evidenced = [
        "android.permission.RECORD_AUDIO",
        "android.permission.READ_CONTACTS",
        "android.permission.ACCESS_FINE_LOCATION",
        "android.permission.READ_SMS",
        "android.permission.READ_CALENDAR",
        "android.permission.CAMERA",
        "android.permission.READ_PHONE_STATE",
    ];
    let mut permissions: Vec<&str> = evidenced.to_vec();
    permissions.extend(FILLER_PERMISSIONS.iter().take(70 - evidenced.len()));
    AppSpec::new("org.example.messenger")
        .permissions(permissions)
        .layout(
            "registration.xml",
            column([
                label("Country"),
                edit("country_code"),
                typed("number", 0x3, "phone"),
            ]),
        )
        .layout("conversation.xml", column([edit("message_compose").android("hint", Value::str("Message"))]))
        .methods([location_latitude(), wifi_mac(), ip_prefix_address(), sim_serial(), find_view_by_id()])
        .methods(noise_methods())
}

/// Social app whose layouts only collect financial data and an email.
pub fn instagram_like() -> AppSpec {
    AppSpec::new("com.example.photos")
        .permissions([
            "android.permission.INTERNET",
            "android.permission.RECORD_AUDIO",
            "android.permission.READ_CONTACTS",
            "android.permission.ACCESS_COARSE_LOCATION",
            "android.permission.CAMERA",
            "android.permission.READ_EXTERNAL_STORAGE",
        ])
        .string("hint_card_number", "Card number")
        .layout(
            "payment.xml",
            column([
                edit("card_number").android("hint", Value::str("Name on card")),
                edit("cvv").android("inputType", Value::symbolic(0x2, "number")),
                edit("edit_card").android("hint", Value::reference("string", "hint_card_number")),
            ]),
        )
        .layout("login.xml", column([typed("login_email", 0x21, "textEmailAddress")]))
        .methods([wifi_mac(), find_view_by_id(), webview_url()])
        .methods(noise_methods())
}

/// App whose evidence and declaration agree: location and contacts.
pub fn matched() -> AppSpec {
    AppSpec::new("com.example.weather")
        .permissions(["android.permission.INTERNET", "android.permission.ACCESS_FINE_LOCATION", "android.permission.READ_CONTACTS"])
        .layout("search.xml", column([label("City"), edit("edit_city")]))
        .methods([location_longitude(), find_view_by_id()])
        .methods(noise_methods())
}

fn data_type(name: &str, purposes: &[&str]) -> String {
    let p: Vec<String> = purposes.iter().map(|p| format!("\"{p}\"")).collect();
    format!("{{\"type\": \"{name}\", \"purposes\": [{}]}}", p.join(", "))
}

pub const ALL_SAFETY_CATEGORIES: [&str; 14] = [
    "device_or_other_ids",
    "personal_info",
    "audio",
    "contacts",
    "location",
    "photos_and_videos",
    "financial_info",
    "messages",
    "health_and_fitness",
    "calendar",
    "app_activity",
    "web_browsing",
    "files_and_docs",
    "app_info_and_performance",
];

pub const ALL_PURPOSES: [&str; 7] = [
    "app_functionality",
    "analytics",
    "developer_communications",
    "advertising",
    "fraud_prevention_security_compliance",
    "personalization",
    "account_management",
];

/// Declaration JSON builder for fixtures.
#[derive(Debug, Clone, Default)]
pub struct DeclarationSpec {
    pub collected: Vec<(String, Vec<(String, usize)>)>,
    pub shared: Vec<(String, Vec<(String, usize)>)>,
    pub encrypted_in_transit: bool,
    pub deletion_requestable: bool,
    pub claims_no_collection: bool,
    pub claims_no_sharing: bool,
}

impl DeclarationSpec {
    pub fn new() -> Self {
        DeclarationSpec { encrypted_in_transit: true, deletion_requestable: true, ..Default::default() }
    }

    /// Adds a collected data type with the first `purposes` purposes.
    pub fn collect(mut self, category: &str, data_type: &str, purposes: usize) -> Self {
        match self.collected.iter_mut().find(|(c, _)| c == category) {
            Some((_, types)) => types.push((data_type.to_string(), purposes)),
            None => self.collected.push((category.to_string(), vec![(data_type.to_string(), purposes)])),
        }
        self
    }

    pub fn share(mut self, category: &str, data_type: &str, purposes: usize) -> Self {
        self.shared.push((category.to_string(), vec![(data_type.to_string(), purposes)]));
        self
    }

    pub fn collect_all(mut self, purposes: usize) -> Self {
        for c in ALL_SAFETY_CATEGORIES {
            self = self.collect(c, &format!("{c} data"), purposes);
        }
        self
    }

    pub fn to_json(&self) -> String {
        let section = |entries: &Vec<(String, Vec<(String, usize)>)>| {
            let items: Vec<String> = entries
                .iter()
                .map(|(c, types)| {
                    let t: Vec<String> = types.iter().map(|(n, p)| data_type(n, &ALL_PURPOSES[..*p])).collect();
                    format!("\"{c}\": [{}]", t.join(", "))
                })
                .collect();
            format!("{{{}}}", items.join(", "))
        };
        format!(
            "{{\n  \"schema_version\": 1,\n  \"collected\": {},\n  \"shared\": {},\n  \"security\": {{\"encrypted_in_transit\": {}, \"deletion_requestable\": {}}},\n  \"claims_no_collection\": {},\n  \"claims_no_sharing\": {}\n}}\n",
            section(&self.collected),
            section(&self.shared),
            self.encrypted_in_transit,
            self.deletion_requestable,
            self.claims_no_collection,
            self.claims_no_sharing
        )
    }
}

pub fn signal_declaration() -> DeclarationSpec {
    DeclarationSpec::new().collect("personal_info", "Phone number", 2)
}

pub fn instagram_declaration() -> DeclarationSpec {
    DeclarationSpec::new().collect_all(6)
}

pub fn matched_declaration() -> DeclarationSpec {
    DeclarationSpec::new()
        .collect("location", "Approximate location", 1)
        .collect("contacts", "Contacts", 2)
}

/// A declaration with its hand-derived verdicts and consistency flags.
pub struct DeclarationCase {
    pub name: &'static str,
    pub declaration: DeclarationSpec,
    pub verdicts: Vec<&'static str>,
    pub flags: Vec<&'static str>,
}

fn case(name: &'static str, declaration: DeclarationSpec, verdicts: &[&'static str], flags: &[&'static str]) -> DeclarationCase {
    DeclarationCase { name, declaration, verdicts: verdicts.to_vec(), flags: flags.to_vec() }
}

/// Twenty declarations exercising the reporting rules.
pub fn declaration_suite() -> Vec<DeclarationCase> {
    let d = DeclarationSpec::new;
    let no_collection = || DeclarationSpec { claims_no_collection: true, ..d() };
    let first_n = |n: usize, purposes: usize| {
        ALL_SAFETY_CATEGORIES[..n].iter().fold(d(), |acc, c| acc.collect(c, &format!("{c} data"), purposes))
    };
    vec![
        case("all categories, two purposes", d().collect_all(2), &["OverReporting"], &[]),
        case("all categories, seven purposes", d().collect_all(7), &["OverReporting"], &[]),
        case("every type with six purposes", first_n(4, 6), &["OverReporting"], &[]),
        case(
            "three of five types with six purposes",
            first_n(3, 6).collect("messages", "Emails", 2).collect("calendar", "Calendar events", 1),
            &["OverReporting"],
            &[],
        ),
        case(
            "half the types with six purposes",
            first_n(2, 6).collect("messages", "Emails", 2).collect("calendar", "Calendar events", 1),
            &[],
            &[],
        ),
        case("only a phone number", d().collect("personal_info", "Phone number", 2), &["UnderReporting"], &[]),
        case("claims no collection", no_collection(), &["UnderReporting"], &[]),
        case(
            "claims no collection but shares location",
            no_collection().share("location", "Approximate location", 1),
            &["UnderReporting"],
            &["SharedWithoutCollected(location)"],
        ),
        case(
            "claims nothing but encrypts",
            DeclarationSpec { claims_no_sharing: true, ..no_collection() },
            &["UnderReporting"],
            &["SecurityClaimsWithoutData"],
        ),
        case("five categories, few purposes", first_n(5, 3), &[], &[]),
        case("two types", first_n(2, 1), &[], &[]),
        case(
            "single type with seven purposes",
            d().collect("location", "Precise location", 7),
            &["InconsistentReporting"],
            &["OverAndUnderReporting"],
        ),
        case(
            "shares a collected category",
            first_n(3, 2).share("personal_info", "personal_info data", 2),
            &[],
            &[],
        ),
        case(
            "shares an uncollected category",
            first_n(3, 2).share("calendar", "Calendar events", 1),
            &[],
            &["SharedWithoutCollected(calendar)"],
        ),
        case("thirteen categories", first_n(13, 2), &[], &[]),
        case(
            "no deletion requests",
            DeclarationSpec { deletion_requestable: false, ..first_n(3, 2) },
            &[],
            &["NoDeletionWithData"],
        ),
        case(
            "all categories without deletion",
            DeclarationSpec { deletion_requestable: false, ..d().collect_all(1) },
            &["OverReporting"],
            &["NoDeletionWithData"],
        ),
        case(
            "one category, two types",
            d().collect("personal_info", "Name", 1).collect("personal_info", "Email address", 2),
            &[],
            &[],
        ),
        case(
            "one type collected and shared",
            d().collect("personal_info", "Email address", 1).share("personal_info", "Email address", 1),
            &["UnderReporting"],
            &[],
        ),
        case(
            "four of six types with six purposes",
            first_n(4, 6).collect("messages", "Emails", 1).collect("calendar", "Calendar events", 2),
            &["OverReporting"],
            &[],
        ),
    ]
}

/// Expected label: `(rank, category machine name, identifier)`.
pub type Expected = Option<(u8, &'static str, &'static str)>;

/// One app of the labeled corpus. Fields are keyed by layout file and the
/// field's id resource name (or hint when it has no id).
pub struct CorpusApp {
    pub domain: &'static str,
    pub app: AppSpec,
    pub expected: Vec<(&'static str, &'static str, Expected)>,
}

const FIN: &str = "financial_information";
const PI: &str = "personal_information";
const LOC: &str = "location_data";

fn general_app() -> CorpusApp {
    let app = AppSpec::new("com.example.general")
        .string("hint_card_number", "Card number")
        .layout(
            "checkout.xml",
            column([
                edit("card_number").android("hint", Value::str("Name on card")),
                edit("cvv"),
                edit("expiry_date"),
                edit("iban"),
                edit("account_number"),
                edit("edtTaxId"),
                edit("bank_account"),
                typed("pin", 0x12, "numberPassword"),
                edit("tan_code"),
                typed("card_cvc", 0x12, "numberPassword"),
                edit("edit_c").android("hint", Value::reference("string", "hint_card_number")),
            ]),
        )
        .layout(
            "signup.xml",
            column([
                edit("txt_name"),
                edit("first_name"),
                edit("familyName"),
                edit("surname"),
                edit("email"),
                typed("user_email", 0x21, "textEmailAddress"),
                edit("mobile_number"),
                typed("contact_no", 0x3, "phone"),
                typed("password", 0x81, "textPassword"),
                typed("confirm_secret", 0x81, "textPassword"),
                edit("username"),
                edit("et_user_name"),
                edit("birthday"),
                edit("dob"),
                edit("gender"),
                edit("age"),
                edit("passport_no"),
                edit("ssn"),
                typed("email_password", 0x81, "textPassword"),
                typed("otp_code", 0x2, "number"),
            ]),
        )
        .layout(
            "address.xml",
            column([
                edit("street_address"),
                edit("city"),
                edit("zip_code"),
                edit("postal_code"),
                edit("country"),
                Element::new("EditText").android("hint", Value::str("Postcode")),
                Element::new("TextView")
                    .android("labelFor", Value::reference("id", "edit_a"))
                    .android("text", Value::str("Birthday")),
                edit("edit_a"),
                label("Country"),
                edit("edit_b"),
            ]),
        )
        .layout(
            "misc.xml",
            column([
                edit("search_box"),
                edit("url_input"),
                edit("contact_name"),
                edit("event_title"),
                edit("chat_input"),
                edit("comment"),
                edit("subject_line"),
                edit("qwertyuiop"),
                edit("notes"),
                edit("quantity"),
                edit("height"),
                edit("weight"),
                edit("image_height"),
                edit("photo_height"),
            ]),
        )
        .methods([find_view_by_id()]);
    CorpusApp {
        domain: "unknown",
        app,
        expected: vec![
            ("checkout.xml", "card_number", Some((1, FIN, "Card number"))),
            ("checkout.xml", "cvv", Some((1, FIN, "Card details"))),
            ("checkout.xml", "expiry_date", Some((1, FIN, "Card details"))),
            ("checkout.xml", "iban", Some((1, FIN, "Account"))),
            ("checkout.xml", "account_number", Some((1, FIN, "Account"))),
            ("checkout.xml", "edtTaxId", Some((1, FIN, "Unique ID"))),
            ("checkout.xml", "bank_account", Some((1, FIN, "Account"))),
            ("checkout.xml", "pin", Some((3, "payment_authentication", "Password"))),
            ("checkout.xml", "tan_code", Some((3, "payment_authentication", "Password"))),
            ("checkout.xml", "card_cvc", Some((3, "payment_authentication", "Password"))),
            ("checkout.xml", "edit_c", Some((1, FIN, "Card number"))),
            ("signup.xml", "txt_name", Some((2, PI, "Name"))),
            ("signup.xml", "first_name", Some((2, PI, "Name"))),
            ("signup.xml", "familyName", Some((2, PI, "Name"))),
            ("signup.xml", "surname", Some((2, PI, "Name"))),
            ("signup.xml", "email", Some((1, PI, "Email address"))),
            ("signup.xml", "user_email", Some((1, PI, "Email address"))),
            ("signup.xml", "mobile_number", Some((1, PI, "Phone number"))),
            ("signup.xml", "contact_no", Some((1, PI, "Phone number"))),
            ("signup.xml", "password", Some((3, "authentication", "Password"))),
            ("signup.xml", "confirm_secret", Some((3, "authentication", "Password"))),
            ("signup.xml", "username", Some((3, "authentication", "Username"))),
            ("signup.xml", "et_user_name", Some((3, "authentication", "Username"))),
            ("signup.xml", "birthday", Some((2, PI, "Date of birth"))),
            ("signup.xml", "dob", Some((2, PI, "Date of birth"))),
            ("signup.xml", "gender", Some((2, PI, "Gender"))),
            ("signup.xml", "age", Some((2, PI, "Age"))),
            ("signup.xml", "passport_no", Some((1, PI, "Unique ID"))),
            ("signup.xml", "ssn", Some((1, PI, "Unique ID"))),
            ("signup.xml", "email_password", Some((3, "email_authentication", "Password"))),
            ("signup.xml", "otp_code", Some((3, "authentication", "Password"))),
            ("address.xml", "street_address", Some((2, PI, "Address"))),
            ("address.xml", "city", Some((2, LOC, "Approximate location"))),
            ("address.xml", "zip_code", Some((2, LOC, "Approximate location"))),
            ("address.xml", "postal_code", Some((2, LOC, "Approximate location"))),
            ("address.xml", "country", Some((2, LOC, "Approximate location"))),
            ("address.xml", "Postcode", Some((2, LOC, "Approximate location"))),
            ("address.xml", "edit_a", Some((2, PI, "Date of birth"))),
            ("address.xml", "edit_b", Some((2, LOC, "Approximate location"))),
            ("misc.xml", "search_box", Some((2, "app_activity", "In-app search history"))),
            ("misc.xml", "url_input", Some((2, "browsing_data", "Web browsing history"))),
            ("misc.xml", "contact_name", Some((2, "contacts_data", "Contacts"))),
            ("misc.xml", "event_title", Some((2, "calendar_data", "Calendar events"))),
            ("misc.xml", "chat_input", Some((4, "message", "Message"))),
            ("misc.xml", "comment", Some((4, "message", "Message"))),
            ("misc.xml", "subject_line", Some((4, "email", "Email"))),
            ("misc.xml", "qwertyuiop", None),
            ("misc.xml", "notes", None),
            ("misc.xml", "quantity", None),
            ("misc.xml", "height", Some((2, "health_and_fitness_data", "Fitness info"))),
            ("misc.xml", "weight", Some((2, "health_and_fitness_data", "Fitness info"))),
            ("misc.xml", "image_height", Some((4, "ui", "Dimension"))),
            ("misc.xml", "photo_height", Some((4, "ui", "Dimension"))),
        ],
    }
}

fn domain_app(domain: &'static str, package: &str, ids: &[&'static str], expected: &[Expected]) -> CorpusApp {
    let app = AppSpec::new(package)
        .layout("compose.xml", column(ids.iter().map(|id| edit(id))))
        .methods([find_view_by_id()]);
    CorpusApp {
        domain,
        app,
        expected: ids.iter().zip(expected).map(|(id, e)| ("compose.xml", *id, *e)).collect(),
    }
}

/// Hand-labeled input fields, including the ambiguous `body` and `height`.
pub fn labeled_corpus() -> Vec<CorpusApp> {
    let msg = Some((4, "message", "Message"));
    let health = Some((2, "health_and_fitness_data", "Fitness info"));
    vec![
        general_app(),
        domain_app("messaging", "com.example.chat", &["message_body", "body", "chat"], &[msg, msg, msg]),
        domain_app("ecommerce", "com.example.store", &["body"], &[Some((4, "email", "Email"))]),
        domain_app("health", "com.example.fitness", &["body", "height", "weight_kg"], &[health, health, health]),
    ]
}

/// App whose APK is at least `min_bytes`: many classes, methods and layouts
/// plus an incompressible asset.
pub fn large_app(min_bytes: usize) -> AppSpec {
    let mut methods = Vec::new();
    for c in 0..1500 {
        let class = format!("Lcom/example/big/pkg{}/Class{c};", c % 40);
        for k in 0..30 {
            methods.push(m(&class, &format!("method{k}"), if k % 2 == 0 { "V" } else { "Ljava/lang/String;" }, &["I"]));
        }
    }
    let mut spec = signal_like();
    spec.package = "com.example.big".into();
    spec = spec.next_dex(methods.split_off(methods.len() / 2)).next_dex(methods);
    for i in 0..120 {
        spec = spec.layout(
            &format!("screen_{i}.xml"),
            column([label("Street"), edit(&format!("street_{i}")), edit(&format!("notes_{i}")), typed(&format!("pw_{i}"), 0x81, "textPassword")]),
        );
    }
    let current = spec.to_apk().len();
    if current < min_bytes {
        let mut blob = vec![0u8; min_bytes - current + 4096];
        StdRng::seed_from_u64(7).fill_bytes(&mut blob);
        spec.extra.push(("assets/blob.bin".into(), blob));
    }
    spec
}

/// `n` distinct small apps mixing the three scenario shapes.
pub fn batch_apps(n: usize) -> Vec<(String, AppSpec, DeclarationSpec)> {
    (0..n)
        .map(|i| {
            let (mut app, decl) = match i % 3 {
                0 => (signal_like(), signal_declaration()),
                1 => (instagram_like(), instagram_declaration()),
                _ => (matched(), matched_declaration()),
            };
            app.package = format!("{}{i}", app.package);
            if i % 2 == 1 {
                app.encoding = PoolEncoding::Utf8;
            }
            (format!("app{i:02}"), app, decl)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_declares_seventy_distinct_permissions() {
        let app = signal_like();
        let mut p = app.permissions.clone();
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 70);
    }

    #[test]
    fn corpus_size() {
        let n: usize = labeled_corpus().iter().map(|a| a.expected.len()).sum();
        assert!(n >= 50, "{n}");
    }

    #[test]
    fn suite_has_twenty_cases() {
        assert_eq!(declaration_suite().len(), 20);
    }
}
