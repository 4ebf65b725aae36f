use std::collections::BTreeSet;

use privaudit_core::axml::parse_plain_xml;
use privaudit_core::container::{open_apk_bytes, open_package, AppPackage};
use privaudit_core::datasets::{AppContext, DatasetBundle};
use privaudit_core::taxonomy::AppDomain;
use privaudit_core::uianalysis::{analyze_layouts, extract_input_fields, label_field, DecidedBy, InputFieldRecord};
use privaudit_fixtures::scenarios::{labeled_corpus, CorpusApp};
use privaudit_fixtures::xml::{to_plain, Element, Value};
use proptest::prelude::*;

type Key = (String, String);
type Label = (u8, String, String);

fn key_of(r: &InputFieldRecord) -> Key {
    let file = r.layout_path.rsplit('/').next().unwrap().to_string();
    (file, r.field_id.clone().or_else(|| r.hint.clone()).unwrap_or_default())
}

fn predictions(pkg: &AppPackage, domain: AppDomain) -> (BTreeSet<(Key, Label)>, BTreeSet<Key>) {
    let ui = analyze_layouts(pkg, &DatasetBundle::seed(), &AppContext::for_domain(domain));
    assert!(ui.warnings.is_empty(), "{:?}", ui.warnings);
    let labeled = ui
        .fields
        .iter()
        .map(|f| (key_of(&f.record), (f.label.rank().value(), f.label.category().to_string(), f.identifier.to_string())))
        .collect();
    let unlabeled = ui.unlabeled.iter().map(key_of).collect();
    (labeled, unlabeled)
}

fn expected(app: &CorpusApp) -> (BTreeSet<(Key, Label)>, BTreeSet<Key>) {
    let mut labeled = BTreeSet::new();
    let mut unlabeled = BTreeSet::new();
    for (file, key, e) in &app.expected {
        let k = (file.to_string(), key.to_string());
        match e {
            Some((r, c, i)) => {
                labeled.insert((k, (*r, c.to_string(), i.to_string())));
            }
            None => {
                unlabeled.insert(k);
            }
        }
    }
    (labeled, unlabeled)
}

fn check_corpus(open: impl Fn(&CorpusApp) -> AppPackage) {
    let (mut tp, mut predicted, mut relevant) = (0usize, 0usize, 0usize);
    for app in labeled_corpus() {
        let domain: AppDomain = app.domain.parse().unwrap();
        let (got, got_unlabeled) = predictions(&open(&app), domain);
        let (want, want_unlabeled) = expected(&app);
        tp += got.intersection(&want).count();
        predicted += got.len();
        relevant += want.len();
        assert_eq!(got, want, "{}", app.app.package);
        assert_eq!(got_unlabeled, want_unlabeled, "{}", app.app.package);
    }
    assert!(relevant >= 50);
    assert_eq!((tp, tp), (predicted, relevant));
}

#[test]
fn corpus_from_compiled_apks() {
    check_corpus(|app| open_apk_bytes(format!("{}.apk", app.app.package).as_ref(), &app.app.to_apk()).unwrap());
}

#[test]
fn corpus_from_decoded_directories() {
    let dirs: Vec<_> = labeled_corpus()
        .iter()
        .map(|app| {
            let d = tempfile::tempdir().unwrap();
            app.app.write_decoded(d.path()).unwrap();
            (app.app.package.clone(), d)
        })
        .collect();
    check_corpus(|app| {
        let (_, d) = dirs.iter().find(|(p, _)| *p == app.app.package).unwrap();
        open_package(d.path()).unwrap()
    });
}

#[test]
fn decided_by_stages() {
    let layout = Element::new("LinearLayout").children([
        Element::new("EditText")
            .android("id", Value::reference("id", "card_number"))
            .android("inputType", Value::symbolic(0x81, "textPassword")),
        Element::new("EditText").android("id", Value::reference("id", "card_number2")),
        Element::new("EditText").android("id", Value::reference("id", "edit1")).android("hint", Value::str("IBAN")),
        Element::new("TextView").android("text", Value::str("Surname")),
        Element::new("EditText").android("id", Value::reference("id", "edit2")),
    ]);
    let doc = parse_plain_xml(&to_plain(&layout)).unwrap();
    let bundle = DatasetBundle::seed();
    let stages: Vec<_> = extract_input_fields(&doc, None, "res/layout/a.xml")
        .iter()
        .map(|r| label_field(r, &bundle, &AppContext::default()).unwrap().decided_by)
        .collect();
    assert_eq!(stages, [DecidedBy::InputType, DecidedBy::FieldId, DecidedBy::Hint, DecidedBy::LabelText]);
}

const WORDS: [&str; 12] =
    ["card", "number", "email", "name", "pin", "city", "body", "height", "image", "notes", "chat", "qwerty"];

fn text() -> impl Strategy<Value = Option<String>> {
    prop::option::of(prop::collection::vec(prop::sample::select(&WORDS[..]), 1..3).prop_map(|w| w.join("_")))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn password_types_always_win(
        variation in prop::sample::select(vec![0x81u32, 0x12, 0x91, 0xe1]),
        extra_flags in 0u32..0x10,
        id in text(), hint in text(), label in text(),
        domain in prop::sample::select(AppDomain::ALL),
    ) {
        let mut r = InputFieldRecord::new("res/layout/a.xml", "EditText");
        r.input_type = Some(variation | (extra_flags << 16));
        r.field_id = id;
        r.hint = hint;
        r.label_text = label;
        let f = label_field(&r, &DatasetBundle::seed(), &AppContext::for_domain(domain)).unwrap();
        prop_assert_eq!(f.label.rank().value(), 3);
        prop_assert_eq!(f.identifier.as_str(), "Password");
        prop_assert_eq!(f.decided_by, DecidedBy::InputType);
    }

    #[test]
    fn earlier_stage_decides(id in text(), hint in text(), label in text()) {
        let bundle = DatasetBundle::seed();
        let mut r = InputFieldRecord::new("res/layout/a.xml", "EditText");
        r.field_id = id.clone();
        r.hint = hint.clone();
        r.label_text = label.clone();
        let hits = |t: &Option<String>| {
            t.as_ref().is_some_and(|t| !bundle.match_keyword(&bundle.tokenizer().tokens(t), &AppContext::default()).is_empty())
        };
        let expected = if hits(&id) {
            Some(DecidedBy::FieldId)
        } else if hits(&hint) {
            Some(DecidedBy::Hint)
        } else if hits(&label) {
            Some(DecidedBy::LabelText)
        } else {
            None
        };
        prop_assert_eq!(label_field(&r, &bundle, &AppContext::default()).map(|f| f.decided_by), expected);
    }
}
