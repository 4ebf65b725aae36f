//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use privaudit_core::apianalysis::match_refs;
use privaudit_core::axml::{
    parse_binary_xml, parse_plain_xml, parse_resource_table, AttrValue, ResourceRef, ResourceTable, XmlElement, ANDROID_NS,
};
use privaudit_core::container::open_apk_bytes;
use privaudit_core::datasets::{AppContext, CategoryMapping, ContextTrigger, DatasetBundle};
use privaudit_core::dexscan::{method_refs, parse_dex, MethodRef};
use privaudit_core::manifestanalysis::PermissionEvidence;
use privaudit_core::pipeline::analyze_package;
use privaudit_core::safetycompare::{
    compare, consistency_checks, declaration_verdict, CollectionEvidence, EvidenceItem, SafetyDeclaration, Status, Verdict,
};
use privaudit_core::taxonomy::{parse_label, AppDomain, SafetyCategory};
use privaudit_core::uianalysis::analyze_layouts;
use privaudit_fixtures::apk::AppSpec;
use privaudit_fixtures::arsc::compile_with_table;
use privaudit_fixtures::dex::{build_dex, MethodSpec};
use privaudit_fixtures::mutate::Mutator;
use privaudit_fixtures::scenarios::{self, ALL_SAFETY_CATEGORIES};
use privaudit_fixtures::strategies;
use privaudit_fixtures::xml::{to_plain, Element, PoolEncoding, Value};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Seed dataset rows

fn seed_fidelity() -> Check {
    let start = Instant::now();
    let bundle = DatasetBundle::seed();
    let ctx = AppContext::default();
    let keywords: [(&str, &str); 8] = [
        ("IBAN", "Directly identifiable financial information -> Account"),
        ("Account number", "Directly identifiable financial information -> Account"),
        ("First name", "Partially identifiable personal information -> Name"),
        ("Family name", "Partially identifiable personal information -> Name"),
        ("PIN", "Access payment authentication data -> Password"),
        ("TAN", "Access payment authentication data -> Password"),
        ("Tax ID", "Directly identifiable financial information -> Unique ID"),
        ("Chat", "Context-dependent message -> Message"),
    ];
    for (text, expected) in keywords {
        let want = parse_label(expected).map_err(|e| format!("{expected}: {e}"))?;
        let tokens = bundle.tokenizer().tokens(text);
        let got = bundle.match_keyword(&tokens, &ctx).into_iter().next().map(|m| (m.label, m.identifier));
        ensure(got.as_ref() == Some(&want), || format!("{text}: got {got:?}, want {expected}"))?;
    }
    let apis = [
        ("Landroid/net/IpPrefix;", "getAddress", "()Ljava/net/InetAddress;", "Directly identifiable device or other IDs -> IP Address"),
        ("Landroid/location/Location;", "getLatitude", "()D", "Partially identifiable location data -> Approximate location"),
        (
            "Lcom/google/android/gms/auth/api/identity/SignInPassword;",
            "getPassword",
            "()Ljava/lang/String;",
            "Access email authentication data -> Password",
        ),
        ("Landroid/app/Activity;", "findViewById", "(I)Landroid/view/View;", "Context-dependent UI data -> Text field"),
    ];
    for (class, name, proto, expected) in apis {
        let want = parse_label(expected).map_err(|e| format!("{expected}: {e}"))?;
        let got = bundle.lookup_api(&MethodRef::new(class, name, proto)).map(|e| (e.label, e.identifier.clone()));
        ensure(got.as_ref() == Some(&want), || format!("{class}->{name}: got {got:?}, want {expected}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("12 rows exact, {elapsed:.1?}"))
}

// 2. Signal-pattern row

fn evidence_of(app: &AppSpec) -> CollectionEvidence {
    let pkg = open_apk_bytes("app.apk".as_ref(), &app.to_apk()).expect("fixture opens");
    analyze_package(&pkg, &DatasetBundle::seed(), &AppContext::default()).expect("fixture analyzes").evidence
}

fn signal_row() -> Check {
    use SafetyCategory::*;
    let ev = evidence_of(&scenarios::signal_like());
    let evidenced: BTreeSet<SafetyCategory> = SafetyCategory::ALL.iter().copied().filter(|c| ev.has(*c)).collect();
    let want = BTreeSet::from([DeviceOrOtherIds, PersonalInfo, Audio, Contacts, Location, PhotosAndVideos, Messages, Calendar]);
    ensure(evidenced == want, || format!("evidenced {evidenced:?}"))?;
    let decl = SafetyDeclaration::from_json(&scenarios::signal_declaration().to_json()).map_err(|e| e.to_string())?;
    let report = compare(&decl, &ev);
    let both = report.count(Status::CollectedAndReported);
    let stars = report.count(Status::CollectedNotReported);
    ensure(both == 1 && report.status(PersonalInfo) == Status::CollectedAndReported, || format!("{both} ⊛"))?;
    ensure(stars == 7, || format!("{stars} ★"))?;
    ensure(report.verdicts == BTreeSet::from([Verdict::UnderReporting]), || format!("verdicts {:?}", report.verdicts))?;
    Ok("1 ⊛, 7 ★, UnderReporting".into())
}

// 3. Declaration verdict suite

fn verdict_suite() -> Check {
    let suite = scenarios::declaration_suite();
    let mut agree = 0;
    for case in &suite {
        let d = SafetyDeclaration::from_json(&case.declaration.to_json()).map_err(|e| format!("{}: {e}", case.name))?;
        let verdicts: Vec<String> = declaration_verdict(&d).iter().map(Verdict::to_string).collect();
        let flags: Vec<String> = consistency_checks(&d).iter().map(|f| f.to_string()).collect();
        ensure(verdicts == case.verdicts && flags == case.flags, || {
            format!("{}: got {verdicts:?} {flags:?}, want {:?} {:?}", case.name, case.verdicts, case.flags)
        })?;
        agree += 1;
    }
    ensure(suite.len() == 20, || format!("suite has {} cases", suite.len()))?;
    Ok(format!("{agree}/{} declarations agree", suite.len()))
}

// 4. Parser oracles and fuzzing

#[derive(Debug, PartialEq, Eq)]
struct Node {
    name: String,
    attrs: Vec<(bool, String, String)>,
    text: Option<String>,
    children: Vec<Node>,
}

fn from_fixture(e: &Element) -> Node {
    let mut attrs: Vec<_> = e
        .attrs
        .iter()
        .map(|a| {
            let v = match &a.value {
                Value::Str(s) => s.clone(),
                Value::Int(i) => i.to_string(),
                Value::Bool(b) => b.to_string(),
                Value::Ref { kind, name } => format!("@{kind}/{name}"),
                Value::Flags { value, .. } => format!("0x{value:08x}"),
            };
            (a.android, a.name.clone(), v)
        })
        .collect();
    attrs.sort();
    Node {
        name: e.name.clone(),
        attrs,
        text: e.text.clone().filter(|t| !t.is_empty()),
        children: e.children.iter().map(from_fixture).collect(),
    }
}

fn from_parsed(e: &XmlElement, table: Option<&ResourceTable>) -> Node {
    let mut attrs: Vec<_> = e
        .attributes
        .iter()
        .map(|a| {
            let v = match &a.value {
                AttrValue::Str(s) => s.clone(),
                AttrValue::Int(i) => i.to_string(),
                AttrValue::Bool(b) => b.to_string(),
                AttrValue::HexFlags(f) => format!("0x{f:08x}"),
                AttrValue::ResRef(ResourceRef::Named { kind, name, .. }) => format!("@{kind}/{name}"),
                AttrValue::ResRef(ResourceRef::Id(id)) => match table.and_then(|t| t.get(*id)) {
                    Some(e) => format!("@{}/{}", e.kind, e.name),
                    None => format!("@{id:#010x}"),
                },
            };
            (a.namespace_uri.as_deref() == Some(ANDROID_NS), a.name.clone(), v)
        })
        .collect();
    attrs.sort();
    Node {
        name: e.name.clone(),
        attrs,
        text: e.text.clone().filter(|t| !t.is_empty()),
        children: e.children.iter().map(|c| from_parsed(c, table)).collect(),
    }
}

fn oracle_apps() -> Vec<AppSpec> {
    let mut apps = vec![scenarios::signal_like(), scenarios::instagram_like(), scenarios::matched()];
    apps.extend(scenarios::labeled_corpus().into_iter().map(|c| c.app));
    apps
}

/// Element trees and method sets read back from compiled APKs must equal the
/// fixture model they were encoded from.
fn apk_matches_model(app: &AppSpec) -> Result<(usize, usize), String> {
    let pkg = open_apk_bytes("a.apk".as_ref(), &app.to_apk()).map_err(|e| e.to_string())?;
    let table = pkg.load_resource_table().map_err(|e| e.to_string())?;
    let manifest = parse_binary_xml(&pkg.manifest).map_err(|e| e.to_string())?;
    ensure(from_parsed(&manifest.root, table.as_ref()) == from_fixture(&app.manifest()), || {
        format!("{}: manifest differs", app.package)
    })?;
    ensure(pkg.layouts.len() == app.layouts.len(), || format!("{}: layout count", app.package))?;
    for (file, root) in &app.layouts {
        let path = AppSpec::layout_path(file);
        let f = pkg.layouts.iter().find(|l| l.path == path).ok_or_else(|| format!("{path} missing"))?;
        let doc = parse_binary_xml(&f.bytes).map_err(|e| format!("{path}: {e}"))?;
        ensure(from_parsed(&doc.root, table.as_ref()) == from_fixture(root), || format!("{}: {path} differs", app.package))?;
    }
    ensure(pkg.dex_files.len() == app.dex.len(), || format!("{}: dex count", app.package))?;
    let mut methods = 0;
    for (f, specs) in pkg.dex_files.iter().zip(&app.dex) {
        let dex = parse_dex(&f.bytes).map_err(|e| format!("{}: {e}", f.path))?;
        let got: BTreeSet<_> = method_refs(&dex).into_iter().map(|r| (r.class, r.name, r.proto)).collect();
        let want: BTreeSet<_> = specs.iter().map(|s| (s.class.clone(), s.name.clone(), s.proto())).collect();
        ensure(got == want, || format!("{}: {} method set differs", app.package, f.path))?;
        methods += got.len();
    }
    Ok((1 + app.layouts.len(), methods))
}

/// Runs `runs` mutants through `parse`; returns the slowest single input.
fn fuzz(seed: u64, seeds: &[Vec<u8>], runs: usize, parse: impl Fn(&[u8])) -> Result<Duration, String> {
    let mut m = Mutator::new(seed);
    let mut slowest = Duration::ZERO;
    for i in 0..runs {
        let input = m.mutate(&seeds[i % seeds.len()]);
        let start = Instant::now();
        let ok = catch_unwind(AssertUnwindSafe(|| parse(&input))).is_ok();
        slowest = slowest.max(start.elapsed());
        ensure(ok, || format!("panic on mutant {i}"))?;
    }
    ensure(slowest < Duration::from_secs(1), || format!("slowest input took {slowest:?}"))?;
    Ok(slowest)
}

fn parser_oracles() -> Check {
    let start = Instant::now();
    let apps = oracle_apps();
    ensure(apps.len() >= 5, || "fewer than 5 apps".into())?;
    let (mut docs, mut methods) = (0, 0);
    for app in &apps {
        let (d, m) = apk_matches_model(app)?;
        docs += d;
        methods += m;
    }
    let mut xml_seeds = Vec::new();
    let mut dex_seeds = Vec::new();
    for app in &apps {
        let pkg = open_apk_bytes("a.apk".as_ref(), &app.to_apk()).map_err(|e| e.to_string())?;
        xml_seeds.push(pkg.manifest.clone());
        xml_seeds.extend(pkg.layouts.iter().map(|l| l.bytes.clone()));
        dex_seeds.extend(pkg.dex_files.iter().map(|d| d.bytes.clone()));
    }
    let runs = 100_000;
    let xml_slowest = fuzz(11, &xml_seeds, runs, |b| {
        let _ = parse_binary_xml(b);
    })
    .map_err(|e| format!("binary XML: {e}"))?;
    let dex_slowest = fuzz(12, &dex_seeds, runs, |b| {
        if let Ok(d) = parse_dex(b) {
            let _ = method_refs(&d);
        }
    })
    .map_err(|e| format!("DEX: {e}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} apps, {docs} XML trees and {methods} methods exact; {runs} mutants per parser, no panics \
         (slowest {:?}); {elapsed:.1?}",
        apps.len(),
        xml_slowest.max(dex_slowest)
    ))
}

// 5. Labeling quality on the hand-labeled corpus

fn labeling_quality() -> Check {
    let bundle = DatasetBundle::seed();
    let (mut tp, mut predicted, mut relevant) = (0usize, 0usize, 0usize);
    let mut height_image = None;
    for app in scenarios::labeled_corpus() {
        let domain: AppDomain = app.domain.parse().map_err(|e| format!("{e}"))?;
        let pkg = open_apk_bytes("a.apk".as_ref(), &app.app.to_apk()).map_err(|e| e.to_string())?;
        let ui = analyze_layouts(&pkg, &bundle, &AppContext::for_domain(domain));
        let key = |layout: &str, id: &Option<String>, hint: &Option<String>| {
            let file = layout.rsplit('/').next().unwrap_or(layout).to_string();
            (file, id.clone().or_else(|| hint.clone()).unwrap_or_default())
        };
        let got: BTreeSet<_> = ui
            .fields
            .iter()
            .map(|f| {
                let k = key(&f.record.layout_path, &f.record.field_id, &f.record.hint);
                if k.1 == "image_height" {
                    height_image = Some((f.label.rank().value(), f.label.category().to_string()));
                }
                (k, (f.label.rank().value(), f.label.category().to_string(), f.identifier.to_string()))
            })
            .collect();
        let want: BTreeSet<_> = app
            .expected
            .iter()
            .filter_map(|(file, k, e)| {
                e.map(|(r, c, i)| ((file.to_string(), k.to_string()), (r, c.to_string(), i.to_string())))
            })
            .collect();
        tp += got.intersection(&want).count();
        predicted += got.len();
        relevant += want.len();
    }
    let precision = tp as f64 / predicted.max(1) as f64;
    let recall = tp as f64 / relevant.max(1) as f64;
    ensure(relevant >= 50, || format!("only {relevant} labeled fields"))?;
    ensure(tp == predicted && tp == relevant, || format!("precision {precision:.3}, recall {recall:.3}"))?;
    ensure(height_image == Some((4, "ui".to_string())), || format!("image_height labeled {height_image:?}"))?;
    Ok(format!("{relevant} fields, precision {precision:.3}, recall {recall:.3}; image_height -> rank 4 ui"))
}

// 6. Performance

fn performance() -> Check {
    let big = scenarios::large_app(5 << 20).to_apk();
    ensure(big.len() >= 5 << 20, || format!("fixture is only {} bytes", big.len()))?;
    let start = Instant::now();
    let pkg = open_apk_bytes("big.apk".as_ref(), &big).map_err(|e| e.to_string())?;
    let analysis = analyze_package(&pkg, &DatasetBundle::seed(), &AppContext::default()).map_err(|e| e.to_string())?;
    let single = start.elapsed();
    ensure(!analysis.ui_sources.is_empty(), || "no UI sources found".into())?;
    ensure(single < Duration::from_secs(2), || format!("5 MB analyze took {single:?}"))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (name, app, decl) in scenarios::batch_apps(20) {
        app.write_apk(&dir.path().join(format!("{name}.apk"))).map_err(|e| e.to_string())?;
        fs::write(dir.path().join(format!("{name}.declaration")), decl.to_json()).map_err(|e| e.to_string())?;
    }
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_privaudit"))
        .args(["batch", "--format", "json"])
        .arg(dir.path())
        .env_remove("PRIVAUDIT_DATASETS")
        .output()
        .map_err(|e| e.to_string())?;
    let batch = start.elapsed();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = report["apps"].as_array().map_or(0, Vec::len);
    ensure(rows == 20 && out.status.code() == Some(3), || format!("batch gave {rows} rows, exit {:?}", out.status.code()))?;
    ensure(batch < Duration::from_secs(30), || format!("batch of 20 took {batch:?}"))?;
    Ok(format!("{} MB analyze {single:.2?}; batch of 20 {batch:.2?}", big.len() >> 20))
}

// 7. Property suites

const CASES: u32 = 1000;

fn run_property<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn cross_parser(root: Element, utf8: bool) -> Result<(), TestCaseError> {
    let enc = if utf8 { PoolEncoding::Utf8 } else { PoolEncoding::Utf16 };
    let (xml, arsc) = compile_with_table(&root, enc);
    let table = parse_resource_table(&arsc).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let binary = parse_binary_xml(&xml).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let plain = parse_plain_xml(&to_plain(&root)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let want = from_fixture(&root);
    prop_assert_eq!(&from_parsed(&binary.root, Some(&table)), &want);
    prop_assert_eq!(&from_parsed(&plain.root, None), &want);
    Ok(())
}

/// Linear scan over every keyword entry.
fn keyword_oracle(bundle: &DatasetBundle, tokens: &[String], ctx: &AppContext) -> Vec<(String, u8, String, String)> {
    let mut hits = Vec::new();
    for e in bundle.keywords() {
        let words: Vec<&str> = e.keyword.split(' ').collect();
        let present = tokens.windows(words.len()).any(|w| w.iter().zip(&words).all(|(t, k)| t == k));
        if !present {
            continue;
        }
        let mut label = (e.label, e.identifier.to_string());
        for o in &e.overrides {
            let fires = match &o.trigger {
                ContextTrigger::Domain(d) => *d != AppDomain::Unknown && *d == ctx.domain,
                ContextTrigger::Token(t) => tokens.contains(t) || ctx.cooccurring.contains(t),
            };
            if fires {
                label = (o.label, o.identifier.to_string());
                break;
            }
        }
        hits.push((std::cmp::Reverse(e.priority), label.0.rank(), std::cmp::Reverse(e.keyword.len()), e.keyword.clone(), label));
    }
    hits.sort_by(|a, b| (&a.0, &a.1, &a.2, &a.3).cmp(&(&b.0, &b.1, &b.2, &b.3)));
    hits.into_iter().map(|(_, _, _, kw, (l, id))| (kw, l.rank().value(), l.category().to_string(), id)).collect()
}

fn api_pool() -> Vec<MethodSpec> {
    let mut pool = vec![
        scenarios::ip_prefix_address(),
        scenarios::location_latitude(),
        scenarios::location_longitude(),
        scenarios::sign_in_password(),
        scenarios::find_view_by_id(),
        scenarios::wifi_mac(),
        scenarios::sim_serial(),
        scenarios::contact_photo(),
        scenarios::webview_url(),
        scenarios::camera_open(),
        scenarios::audio_record_start(),
        scenarios::sms_body(),
    ];
    pool.extend(scenarios::noise_methods());
    pool
}

fn api_signatures(chosen: &[MethodSpec], bundle: &DatasetBundle) -> BTreeSet<String> {
    let dex = parse_dex(&build_dex(chosen, "035")).expect("fixture dex parses");
    let refs = method_refs(&dex);
    match_refs(refs.iter().map(|r| (1, r)), bundle).into_iter().map(|r| r.signature).collect()
}

fn perm(c: SafetyCategory) -> EvidenceItem {
    EvidenceItem::Permission(PermissionEvidence { permission: format!("p.{}", c.machine_name()), implied_category: Some(c) })
}

fn evidence(cats: &[usize], mapping: &CategoryMapping) -> CollectionEvidence {
    let mut ev = CollectionEvidence::default();
    for &c in cats {
        ev.add(perm(SafetyCategory::ALL[c]), mapping);
    }
    ev
}

fn declared(spec: &scenarios::DeclarationSpec) -> SafetyDeclaration {
    SafetyDeclaration::from_json(&spec.to_json()).expect("generated declaration is valid")
}

fn collected(s: Status) -> bool {
    matches!(s, Status::CollectedAndReported | Status::CollectedNotReported)
}

fn property_suites() -> Check {
    let bundle = DatasetBundle::seed();
    let mapping = bundle.mapping().clone();

    run_property("binary vs plain XML", (strategies::element(), any::<bool>()), |(root, utf8)| cross_parser(root, utf8))?;

    let mut vocab: Vec<String> = bundle.keywords().iter().flat_map(|e| e.keyword.split(' ').map(String::from)).collect();
    vocab.extend(["the", "your", "image", "photo", "zzz"].map(String::from));
    vocab.sort();
    vocab.dedup();
    let words = prop::collection::vec(prop::sample::select(vocab.clone()), 0..6);
    let extra = prop::collection::vec(prop::sample::select(vocab), 0..2);
    run_property(
        "keyword matching vs linear scan",
        (words, extra, prop::sample::select(AppDomain::ALL)),
        |(tokens, extra, domain)| {
            let ctx = AppContext::for_domain(domain).with_tokens(extra);
            let got: Vec<_> = bundle
                .match_keyword(&tokens, &ctx)
                .into_iter()
                .map(|m| (m.keyword, m.label.rank().value(), m.label.category().to_string(), m.identifier.to_string()))
                .collect();
            prop_assert_eq!(got, keyword_oracle(&bundle, &tokens, &ctx));
            Ok(())
        },
    )?;

    let pool = api_pool();
    run_property("API matching vs linear scan", prop::collection::vec(prop::sample::select(pool), 0..20), |chosen| {
        let want: BTreeSet<String> = bundle
            .apis()
            .iter()
            .filter(|e| chosen.iter().any(|s| s.class == e.method.class && s.name == e.method.name && s.proto() == e.method.proto))
            .map(|e| e.signature.clone())
            .collect();
        prop_assert_eq!(api_signatures(&chosen, &bundle), want);
        Ok(())
    })?;

    let cats = || prop::collection::vec(0..14usize, 0..12);
    run_property("compare monotonicity", (strategies::declaration(), cats(), cats()), |(spec, a, b)| {
        let d = declared(&spec);
        let both: Vec<usize> = a.iter().chain(&b).copied().collect();
        let before = compare(&d, &evidence(&a, &mapping));
        let after = compare(&d, &evidence(&both, &mapping));
        for (x, y) in before.statuses.iter().zip(&after.statuses) {
            prop_assert!(!collected(x.status) || collected(y.status));
        }
        prop_assert_eq!(&before.verdicts, &after.verdicts);
        Ok(())
    })?;

    run_property("status table exhaustiveness", (strategies::declaration(), cats()), |(spec, cats)| {
        let report = compare(&declared(&spec), &evidence(&cats, &mapping));
        prop_assert_eq!(report.statuses.len(), 14);
        for (i, s) in report.statuses.iter().enumerate() {
            prop_assert_eq!(s.category, SafetyCategory::ALL[i]);
            let has = cats.contains(&i);
            let decl = spec.collected.iter().any(|(c, _)| *c == ALL_SAFETY_CATEGORIES[i]);
            let symbol = match (has, decl) {
                (true, true) => "⊛",
                (true, false) => "★",
                (false, true) => "○",
                (false, false) => "",
            };
            prop_assert_eq!(s.status.symbol(), symbol);
        }
        Ok(())
    })?;

    Ok(format!("5 suites x {CASES} cases"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("seed dataset fidelity", seed_fidelity),
        ("Signal-pattern comparison row", signal_row),
        ("declaration verdict suite", verdict_suite),
        ("parser oracles and fuzzing", parser_oracles),
        ("labeling quality on hand-labeled corpus", labeling_quality),
        ("performance", performance),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(check).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
