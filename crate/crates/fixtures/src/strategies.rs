//! Proptest strategies shared by the property suites.

use proptest::prelude::*;

use crate::scenarios::{DeclarationSpec, ALL_SAFETY_CATEGORIES};
use crate::xml::{Element, Value};

const TAGS: [&str; 6] = ["LinearLayout", "EditText", "TextView", "android.widget.Button", "include", "merge"];
const ANDROID_ATTRS: [&str; 8] = ["text", "hint", "id", "inputType", "labelFor", "layout_width", "name", "contentDescription"];

fn word() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 _.,&<>'\"éß日-]{0,12}".prop_filter("no surrounding spaces", |s| s.trim() == s)
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        word().prop_map(Value::Str),
        any::<i32>().prop_map(Value::Int),
        any::<bool>().prop_map(Value::Bool),
        ("(id|string)", "[a-z][a-z0-9_]{0,8}").prop_map(|(k, n)| Value::reference(&k, &n)),
        any::<u32>().prop_map(Value::flags),
    ]
}

fn attrs() -> impl Strategy<Value = Vec<(bool, String, Value)>> {
    prop::collection::vec(
        prop_oneof![
            (prop::sample::select(&ANDROID_ATTRS[..]), value()).prop_map(|(n, v)| (true, n.to_string(), v)),
            ("[a-z]{1,6}", value()).prop_map(|(n, v)| (false, n, v)),
        ],
        0..5,
    )
}

fn build(tag: &str, attrs: Vec<(bool, String, Value)>, text: Option<String>, children: Vec<Element>) -> Element {
    let mut e = Element::new(tag);
    for (android, name, v) in attrs {
        if e.attrs.iter().any(|a| a.android == android && a.name == name) {
            continue;
        }
        // The decoded form spells these as plain strings, which the text
        // parser would read back as flags or references.
        if let Value::Str(s) = &v {
            if s.starts_with("0x") || s.starts_with('@') {
                continue;
            }
        }
        let v = match (android, name.as_str(), v) {
            (true, "inputType", Value::Str(_)) => Value::flags(1),
            (_, _, v) => v,
        };
        e = if android { e.android(&name, v) } else { e.plain(&name, v) };
    }
    e.text = text;
    e.children = children;
    e
}

/// Random layout-like trees that both the compiled and decoded forms can express.
pub fn element() -> impl Strategy<Value = Element> {
    let leaf = (prop::sample::select(&TAGS[..]), attrs(), prop::option::of(word()))
        .prop_map(|(tag, attrs, text)| build(tag, attrs, text, Vec::new()));
    leaf.prop_recursive(4, 32, 4, |inner| {
        (prop::sample::select(&TAGS[..]), attrs(), prop::collection::vec(inner, 0..4))
            .prop_map(|(tag, attrs, children)| build(tag, attrs, None, children))
    })
}

/// Random well-formed declarations.
pub fn declaration() -> impl Strategy<Value = DeclarationSpec> {
    (
        prop::collection::vec((0..14usize, 1..3usize, 1..=7usize), 0..16),
        prop::collection::vec((0..14usize, 1..=7usize), 0..3),
        any::<(bool, bool, bool)>(),
    )
        .prop_map(|(collected, shared, (enc, del, no_share))| {
            let mut d = DeclarationSpec::new();
            for (c, t, p) in collected {
                d = d.collect(ALL_SAFETY_CATEGORIES[c], &format!("type {t}"), p);
            }
            for (c, p) in shared {
                d = d.share(ALL_SAFETY_CATEGORIES[c], "shared type", p);
            }
            d.encrypted_in_transit = enc;
            d.deletion_requestable = del;
            d.claims_no_collection = d.collected.is_empty();
            d.claims_no_sharing = no_share && d.shared.is_empty();
            d
        })
}
