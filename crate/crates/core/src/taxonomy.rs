//! Privacy-relevance tiers, data categories, identifiers and the Google Play
//! data-safety vocabulary.
//!
//! Every enum member has a stable lower_snake machine name which is what
//! dataset files, declaration snapshots and JSON reports use.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datasets::CategoryMapping;

/// Risk rank of a privacy-relevance tier. 1 is the most severe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct RiskRank(u8);

impl RiskRank {
    pub const ALL: [RiskRank; 4] = [RiskRank(1), RiskRank(2), RiskRank(3), RiskRank(4)];

    pub fn new(value: u8) -> Option<Self> {
        (1..=4).contains(&value).then_some(RiskRank(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn relevance(self) -> PrivacyRelevance {
        match self.0 {
            1 => PrivacyRelevance::DirectlyIdentifiable,
            2 => PrivacyRelevance::PartiallyIdentifiable,
            3 => PrivacyRelevance::AccessData,
            _ => PrivacyRelevance::ContextDependent,
        }
    }
}

impl TryFrom<u8> for RiskRank {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        RiskRank::new(value).ok_or_else(|| format!("risk rank must be 1..=4, got {value}"))
    }
}

impl From<RiskRank> for u8 {
    fn from(rank: RiskRank) -> u8 {
        rank.0
    }
}

impl fmt::Display for RiskRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivacyRelevance {
    DirectlyIdentifiable,
    PartiallyIdentifiable,
    AccessData,
    ContextDependent,
}

impl PrivacyRelevance {
    pub const ALL: [PrivacyRelevance; 4] = [
        PrivacyRelevance::DirectlyIdentifiable,
        PrivacyRelevance::PartiallyIdentifiable,
        PrivacyRelevance::AccessData,
        PrivacyRelevance::ContextDependent,
    ];

    pub fn rank(self) -> RiskRank {
        match self {
            PrivacyRelevance::DirectlyIdentifiable => RiskRank(1),
            PrivacyRelevance::PartiallyIdentifiable => RiskRank(2),
            PrivacyRelevance::AccessData => RiskRank(3),
            PrivacyRelevance::ContextDependent => RiskRank(4),
        }
    }

    /// Leading phrase used in the textual label form.
    pub fn phrase(self) -> &'static str {
        match self {
            PrivacyRelevance::DirectlyIdentifiable => "Directly identifiable",
            PrivacyRelevance::PartiallyIdentifiable => "Partially identifiable",
            PrivacyRelevance::AccessData => "Access",
            PrivacyRelevance::ContextDependent => "Context-dependent",
        }
    }
}

macro_rules! machine_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($variant:ident => ($machine:literal, $display:literal)),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $machine)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn machine_name(self) -> &'static str {
                match self { $($name::$variant => $machine),+ }
            }

            pub fn display_name(self) -> &'static str {
                match self { $($name::$variant => $display),+ }
            }
        }

        impl FromStr for $name {
            type Err = UnknownName;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let s = s.trim();
                match s {
                    $($machine => Ok($name::$variant),)+
                    _ => Err(UnknownName { kind: stringify!($name), name: s.to_string() }),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.machine_name())
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} name `{name}`")]
pub struct UnknownName {
    pub kind: &'static str,
    pub name: String,
}

machine_enum! {
    /// Data category of a privacy label. Some categories are admitted at
    /// more than one rank (e.g. personal information at ranks 1 and 2).
    pub enum DataCategory {
        PersonalInformation => ("personal_information", "personal information"),
        DeviceOrOtherIds => ("device_or_other_ids", "device or other IDs"),
        FinancialInformation => ("financial_information", "financial information"),
        LocationData => ("location_data", "location data"),
        DeviceData => ("device_data", "device data"),
        AudioData => ("audio_data", "audio data"),
        BrowsingData => ("browsing_data", "browsing data"),
        AppActivity => ("app_activity", "app activity"),
        PhotosAndVideos => ("photos_and_videos", "photos and videos"),
        SessionData => ("session_data", "session data"),
        CalendarData => ("calendar_data", "calendar data"),
        HealthAndFitnessData => ("health_and_fitness_data", "health and fitness data"),
        ContactsData => ("contacts_data", "contacts data"),
        MessagesData => ("messages_data", "messages data"),
        Authentication => ("authentication", "authentication"),
        EmailAuthentication => ("email_authentication", "email authentication"),
        NetworkAuthentication => ("network_authentication", "network authentication"),
        PaymentAuthentication => ("payment_authentication", "payment authentication"),
        Message => ("message", "message"),
        Ui => ("ui", "UI"),
        Audio => ("audio", "audio"),
        Email => ("email", "email"),
    }
}

machine_enum! {
    /// The 14 data categories of the Google Play data-safety section.
    /// Declaration order puts the ten categories a static audit can examine first.
    pub enum SafetyCategory {
        DeviceOrOtherIds => ("device_or_other_ids", "Device or other IDs"),
        PersonalInfo => ("personal_info", "Personal info"),
        Audio => ("audio", "Audio"),
        Contacts => ("contacts", "Contacts"),
        Location => ("location", "Location"),
        PhotosAndVideos => ("photos_and_videos", "Photos and videos"),
        FinancialInfo => ("financial_info", "Financial info"),
        Messages => ("messages", "Messages"),
        HealthAndFitness => ("health_and_fitness", "Health and fitness"),
        Calendar => ("calendar", "Calendar"),
        AppActivity => ("app_activity", "App activity"),
        WebBrowsing => ("web_browsing", "Web browsing"),
        FilesAndDocs => ("files_and_docs", "Files and docs"),
        AppInfoAndPerformance => ("app_info_and_performance", "App info and performance"),
    }
}

impl SafetyCategory {
    /// Categories that evidence from layouts, code and permissions can speak to.
    pub const EXAMINABLE: [SafetyCategory; 10] = [
        SafetyCategory::DeviceOrOtherIds,
        SafetyCategory::PersonalInfo,
        SafetyCategory::Audio,
        SafetyCategory::Contacts,
        SafetyCategory::Location,
        SafetyCategory::PhotosAndVideos,
        SafetyCategory::FinancialInfo,
        SafetyCategory::Messages,
        SafetyCategory::HealthAndFitness,
        SafetyCategory::Calendar,
    ];

    pub fn is_examinable(self) -> bool {
        Self::EXAMINABLE.contains(&self)
    }
}

machine_enum! {
    /// Purposes a data type can be collected or shared for.
    pub enum Purpose {
        AppFunctionality => ("app_functionality", "App functionality"),
        Analytics => ("analytics", "Analytics"),
        DeveloperCommunications => ("developer_communications", "Developer communications"),
        Advertising => ("advertising", "Advertising or marketing"),
        FraudPreventionSecurityCompliance => (
            "fraud_prevention_security_compliance",
            "Fraud prevention, security, and compliance"
        ),
        Personalization => ("personalization", "Personalization"),
        AccountManagement => ("account_management", "Account management"),
    }
}

machine_enum! {
    /// App domain used to select keyword context overrides. `Unknown` applies none.
    pub enum AppDomain {
        Unknown => ("unknown", "Unknown"),
        Messaging => ("messaging", "Messaging and social media"),
        Finance => ("finance", "Banking and finance"),
        News => ("news", "News and entertainment"),
        Games => ("games", "Sports and games"),
        Education => ("education", "Technology and education"),
        Ecommerce => ("ecommerce", "E-commerce and shopping"),
        Health => ("health", "Health and fitness"),
    }
}

impl Default for AppDomain {
    fn default() -> Self {
        AppDomain::Unknown
    }
}

/// Categories admitted at each rank. The rank-2 rows for health, contacts and
/// messages are the extension rows; see [`is_extension_pair`].
const ADMISSION: [(u8, &[DataCategory]); 4] = {
    use DataCategory::*;
    [
        (1, &[PersonalInformation, DeviceOrOtherIds, FinancialInformation]),
        (
            2,
            &[
                PersonalInformation,
                LocationData,
                DeviceData,
                AudioData,
                BrowsingData,
                AppActivity,
                PhotosAndVideos,
                SessionData,
                CalendarData,
                HealthAndFitnessData,
                ContactsData,
                MessagesData,
            ],
        ),
        (3, &[Authentication, EmailAuthentication, NetworkAuthentication, PaymentAuthentication]),
        (4, &[Message, Ui, Audio, PhotosAndVideos, Email]),
    ]
};

/// Categories admitted at `rank`, in table order.
pub fn categories_for(rank: RiskRank) -> &'static [DataCategory] {
    ADMISSION[usize::from(rank.0 - 1)].1
}

pub fn is_admitted(rank: RiskRank, category: DataCategory) -> bool {
    categories_for(rank).contains(&category)
}

/// True for the rank-2 rows added beyond the base classification table.
pub fn is_extension_pair(rank: RiskRank, category: DataCategory) -> bool {
    rank.0 == 2
        && matches!(
            category,
            DataCategory::HealthAndFitnessData | DataCategory::ContactsData | DataCategory::MessagesData
        )
}

/// Every admitted (rank, category) pair, rank-major.
pub fn admitted_pairs() -> impl Iterator<Item = (RiskRank, DataCategory)> {
    RiskRank::ALL
        .into_iter()
        .flat_map(|r| categories_for(r).iter().map(move |c| (r, *c)))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("unknown privacy relevance in `{0}`")]
    UnknownRelevance(String),
    #[error("unknown data category `{0}`")]
    UnknownCategory(String),
    #[error("category {category} is not admitted at risk rank {rank}")]
    InvalidRankCategoryPair { rank: u8, category: DataCategory },
    #[error("label text has no `->` separator")]
    MissingSeparator,
    #[error("identifier is empty")]
    EmptyIdentifier,
}

/// Risk rank plus data category; only admitted pairs can be constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrivacyLabel {
    rank: RiskRank,
    category: DataCategory,
}

impl PrivacyLabel {
    pub fn new(rank: RiskRank, category: DataCategory) -> Result<Self, LabelError> {
        if is_admitted(rank, category) {
            Ok(PrivacyLabel { rank, category })
        } else {
            Err(LabelError::InvalidRankCategoryPair { rank: rank.0, category })
        }
    }

    pub fn rank(self) -> RiskRank {
        self.rank
    }

    pub fn relevance(self) -> PrivacyRelevance {
        self.rank.relevance()
    }

    pub fn category(self) -> DataCategory {
        self.category
    }
}

impl<'de> Deserialize<'de> for PrivacyLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rank: RiskRank,
            category: DataCategory,
        }
        let raw = Raw::deserialize(d)?;
        PrivacyLabel::new(raw.rank, raw.category).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PrivacyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.relevance().phrase(), category_phrase(self.category))
    }
}

/// Normalized identifier token ("Name", "IP Address", "Approximate location").
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct IdentifierTag(String);

impl IdentifierTag {
    pub fn new(text: &str) -> Result<Self, LabelError> {
        let normalized = text.split_whitespace().collect::<Vec<_>>().join(" ");
        if normalized.is_empty() {
            Err(LabelError::EmptyIdentifier)
        } else {
            Ok(IdentifierTag(normalized))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl<'de> Deserialize<'de> for IdentifierTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        IdentifierTag::new(&s).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for IdentifierTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn category_phrase(category: DataCategory) -> &'static str {
    category.display_name()
}

fn collapse(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn strip_data_suffix(phrase: &str) -> &str {
    phrase.strip_suffix(" data").unwrap_or(phrase)
}

/// Resolves a category phrase in the context of a rank. The trailing word
/// "data" is optional, so "audio data" and "audio" pick the rank-appropriate
/// category.
fn category_from_phrase(rank: RiskRank, phrase: &str) -> Result<DataCategory, LabelError> {
    let wanted = strip_data_suffix(phrase);
    let matches = |c: &DataCategory| {
        let name = c.display_name().to_lowercase();
        strip_data_suffix(&name) == wanted || c.machine_name() == phrase
    };
    if let Some(c) = categories_for(rank).iter().find(|c| matches(c)) {
        return Ok(*c);
    }
    match DataCategory::ALL.iter().find(|c| matches(c)) {
        Some(c) => Err(LabelError::InvalidRankCategoryPair { rank: rank.0, category: *c }),
        None => Err(LabelError::UnknownCategory(phrase.to_string())),
    }
}

/// Parses `"<relevance phrase> <category phrase> -> <identifier>"`.
///
/// Relevance and category phrases are matched case-insensitively; the
/// identifier keeps its case but has whitespace normalized.
pub fn parse_label(text: &str) -> Result<(PrivacyLabel, IdentifierTag), LabelError> {
    let (left, right) = text
        .split_once("->")
        .or_else(|| text.split_once('→'))
        .ok_or(LabelError::MissingSeparator)?;
    let identifier = IdentifierTag::new(right)?;
    let left = collapse(left);

    let (relevance, rest) = PrivacyRelevance::ALL
        .iter()
        .find_map(|r| {
            let phrase = r.phrase().to_lowercase();
            left.strip_prefix(&phrase)
                .filter(|rest| rest.is_empty() || rest.starts_with(' '))
                .map(|rest| (*r, rest.trim()))
        })
        .ok_or_else(|| LabelError::UnknownRelevance(left.clone()))?;

    let category = category_from_phrase(relevance.rank(), rest)?;
    Ok((PrivacyLabel { rank: relevance.rank(), category }, identifier))
}

/// Inverse of [`parse_label`].
pub fn format_label(label: PrivacyLabel, identifier: &IdentifierTag) -> String {
    format!("{label} -> {identifier}")
}

/// Data-safety category for a label, or `None` when the form has no home for it.
pub fn safety_category_for(
    label: PrivacyLabel,
    identifier: &IdentifierTag,
    mapping: &CategoryMapping,
) -> Option<SafetyCategory> {
    mapping.lookup(label, identifier)
}
