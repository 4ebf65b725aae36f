//! Input-field extraction from layouts and keyword-based labeling.

use serde::Serialize;

use crate::axml::{self, input_type, AttrValue, ResourceTable, XmlDocument, XmlElement};
use crate::container::AppPackage;
use crate::datasets::{AppContext, ContextTrigger, DatasetBundle, KeywordMatch};
use crate::taxonomy::{DataCategory, IdentifierTag, PrivacyLabel, RiskRank};

/// How `label_text` was associated with the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    LabelFor,
    PrecedingSibling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputFieldRecord {
    pub layout_path: String,
    pub widget: String,
    pub field_id: Option<String>,
    pub input_type: Option<u32>,
    pub hint: Option<String>,
    pub label_text: Option<String>,
    pub label_source: Option<LabelSource>,
}

impl InputFieldRecord {
    pub fn new(layout_path: &str, widget: &str) -> Self {
        InputFieldRecord {
            layout_path: layout_path.to_string(),
            widget: widget.to_string(),
            field_id: None,
            input_type: None,
            hint: None,
            label_text: None,
            label_source: None,
        }
    }

    fn has_metadata(&self) -> bool {
        self.field_id.is_some() || self.hint.is_some() || self.label_text.is_some() || self.input_type.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecidedBy {
    InputType,
    FieldId,
    Hint,
    LabelText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabeledField {
    pub record: InputFieldRecord,
    pub label: PrivacyLabel,
    pub identifier: IdentifierTag,
    pub decided_by: DecidedBy,
    pub matched_token: Option<String>,
    pub keyword: Option<String>,
    pub overridden_by: Option<ContextTrigger>,
}

fn is_input_widget(e: &XmlElement) -> bool {
    e.simple_name().ends_with("EditText") || e.android_attr("inputType").is_some()
}

fn is_text_view(e: &XmlElement) -> bool {
    e.simple_name().ends_with("TextView") && !is_input_widget(e)
}

fn flags_of(value: &AttrValue) -> Option<u32> {
    match value {
        AttrValue::HexFlags(v) => Some(*v),
        AttrValue::Int(v) => u32::try_from(*v).ok(),
        AttrValue::Str(s) => input_type::from_symbolic(s),
        AttrValue::Bool(_) | AttrValue::ResRef(_) => None,
    }
}

/// Every input field of a layout, in document order.
pub fn extract_input_fields(doc: &XmlDocument, table: Option<&ResourceTable>, layout_path: &str) -> Vec<InputFieldRecord> {
    let all = doc.root.descendants();
    let label_for: Vec<(String, &XmlElement)> = all
        .iter()
        .filter_map(|e| Some((axml::reference_key(e.android_attr("labelFor")?, table)?, *e)))
        .collect();

    let mut out = Vec::new();
    visit(&doc.root, &mut |parent: &XmlElement| {
        for (i, e) in parent.children.iter().enumerate() {
            if !is_input_widget(e) {
                continue;
            }
            out.push(record_for(e, &parent.children[..i], &label_for, table, layout_path));
        }
    });
    if is_input_widget(&doc.root) {
        out.insert(0, record_for(&doc.root, &[], &label_for, table, layout_path));
    }
    out.retain(InputFieldRecord::has_metadata);
    out
}

/// Calls `f` on each element that has children, parents before children.
fn visit<'a>(e: &'a XmlElement, f: &mut impl FnMut(&'a XmlElement)) {
    if e.children.is_empty() {
        return;
    }
    f(e);
    for c in &e.children {
        visit(c, f);
    }
}

fn record_for(
    e: &XmlElement,
    preceding: &[XmlElement],
    label_for: &[(String, &XmlElement)],
    table: Option<&ResourceTable>,
    layout_path: &str,
) -> InputFieldRecord {
    let mut r = InputFieldRecord::new(layout_path, &e.name);
    let id_attr = e.android_attr("id");
    r.field_id = id_attr.and_then(|v| axml::resource_name(v, table));
    r.input_type = e.android_attr("inputType").and_then(flags_of);
    r.hint = e.android_attr("hint").and_then(|v| axml::resolve_string(v, table)).filter(|s| !s.trim().is_empty());

    let text_of = |t: &XmlElement| {
        t.android_attr("text").and_then(|v| axml::resolve_string(v, table)).filter(|s| !s.trim().is_empty())
    };
    let key = id_attr.and_then(|v| axml::reference_key(v, table));
    let linked = key.and_then(|k| label_for.iter().find(|(target, _)| *target == k)).and_then(|(_, t)| text_of(t));
    if let Some(text) = linked {
        r.label_text = Some(text);
        r.label_source = Some(LabelSource::LabelFor);
    } else if let Some(text) = preceding.last().filter(|p| is_text_view(p)).and_then(text_of) {
        r.label_text = Some(text);
        r.label_source = Some(LabelSource::PrecedingSibling);
    }
    r
}

fn fixed_label(rank: u8, category: DataCategory, identifier: &str) -> (PrivacyLabel, IdentifierTag) {
    let rank = RiskRank::new(rank).expect("constant rank");
    (
        PrivacyLabel::new(rank, category).expect("constant label"),
        IdentifierTag::new(identifier).expect("constant identifier"),
    )
}

/// Labels one field: input type first, then id, hint and label text.
pub fn label_field(record: &InputFieldRecord, bundle: &DatasetBundle, context: &AppContext) -> Option<LabeledField> {
    let tokenizer = bundle.tokenizer();
    let stages: Vec<(DecidedBy, Vec<String>)> = [
        (DecidedBy::FieldId, &record.field_id),
        (DecidedBy::Hint, &record.hint),
        (DecidedBy::LabelText, &record.label_text),
    ]
    .into_iter()
    .filter_map(|(stage, text)| text.as_deref().map(|t| (stage, tokenizer.tokens(t))))
    .collect();
    let context = context.with_tokens(stages.iter().flat_map(|(_, t)| t.iter().cloned()));
    let labeled = |label, identifier, decided_by, m: Option<&KeywordMatch>| LabeledField {
        record: record.clone(),
        label,
        identifier,
        decided_by,
        matched_token: m.map(|m| m.matched_token.clone()),
        keyword: m.map(|m| m.keyword.clone()),
        overridden_by: m.and_then(|m| m.overridden_by.clone()),
    };

    if let Some(flags) = record.input_type {
        if input_type::is_password(flags) {
            let refined = stages.iter().find_map(|(_, tokens)| {
                bundle.match_keyword(tokens, &context).into_iter().find_map(|m| {
                    let category = match m.label.category() {
                        DataCategory::FinancialInformation => DataCategory::PaymentAuthentication,
                        c if m.label.rank().value() == 3 => c,
                        _ => return None,
                    };
                    Some((category, m))
                })
            });
            let (category, m) = match refined {
                Some((c, m)) => (c, Some(m)),
                None => (DataCategory::Authentication, None),
            };
            let (label, identifier) = fixed_label(3, category, "Password");
            return Some(labeled(label, identifier, DecidedBy::InputType, m.as_ref()));
        }
        if input_type::is_email(flags) {
            let (label, identifier) = fixed_label(1, DataCategory::PersonalInformation, "Email address");
            return Some(labeled(label, identifier, DecidedBy::InputType, None));
        }
        if input_type::is_phone(flags) {
            let (label, identifier) = fixed_label(1, DataCategory::PersonalInformation, "Phone number");
            return Some(labeled(label, identifier, DecidedBy::InputType, None));
        }
    }

    for (stage, tokens) in &stages {
        if let Some(m) = bundle.match_keyword(tokens, &context).into_iter().next() {
            return Some(labeled(m.label, m.identifier.clone(), *stage, Some(&m)));
        }
    }
    None
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UiAnalysis {
    pub fields: Vec<LabeledField>,
    pub unlabeled: Vec<InputFieldRecord>,
    pub warnings: Vec<String>,
}

/// Labels the input fields of every layout in the package. Layouts that fail
/// to parse become warnings.
pub fn analyze_layouts(pkg: &AppPackage, bundle: &DatasetBundle, context: &AppContext) -> UiAnalysis {
    let mut out = UiAnalysis::default();
    let table = match pkg.load_resource_table() {
        Ok(t) => t,
        Err(e) => {
            out.warnings.push(format!("resource table: {e}"));
            None
        }
    };
    for layout in &pkg.layouts {
        let doc = match axml::parse_xml_auto(&layout.bytes) {
            Ok(d) => d,
            Err(e) => {
                out.warnings.push(format!("{}: {e}", layout.path));
                continue;
            }
        };
        for record in extract_input_fields(&doc, table.as_ref(), &layout.path) {
            match label_field(&record, bundle, context) {
                Some(f) => out.fields.push(f),
                None => out.unlabeled.push(record),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axml::parse_plain_xml;
    use crate::taxonomy::AppDomain;

    const NS: &str = r#"xmlns:android="http://schemas.android.com/apk/res/android""#;

    fn fields(body: &str) -> Vec<InputFieldRecord> {
        let doc = parse_plain_xml(&format!(r#"<LinearLayout {NS}>{body}</LinearLayout>"#)).unwrap();
        extract_input_fields(&doc, None, "res/layout/a.xml")
    }

    fn record(id: Option<&str>, flags: Option<u32>, hint: Option<&str>, label: Option<&str>) -> InputFieldRecord {
        InputFieldRecord {
            field_id: id.map(str::to_string),
            input_type: flags,
            hint: hint.map(str::to_string),
            label_text: label.map(str::to_string),
            ..InputFieldRecord::new("res/layout/a.xml", "EditText")
        }
    }

    #[test]
    fn card_screen_fields() {
        let got = fields(r#"<EditText android:id="@+id/card_number" android:hint="Name on card"/>"#);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].field_id.as_deref(), Some("card_number"));
        assert_eq!(got[0].hint.as_deref(), Some("Name on card"));
    }

    #[test]
    fn no_inputs() {
        assert!(fields(r#"<TextView android:text="Hello"/><Button android:text="Go"/>"#).is_empty());
    }

    #[test]
    fn label_for_and_preceding_sibling() {
        let got = fields(
            r#"<TextView android:labelFor="@id/exp" android:text="Expiration date"/>
               <TextView android:text="ignored"/>
               <EditText android:id="@+id/exp"/>
               <TextView android:text="Street"/>
               <androidx.appcompat.widget.AppCompatEditText android:id="@+id/a1"/>"#,
        );
        assert_eq!(got[0].label_text.as_deref(), Some("Expiration date"));
        assert_eq!(got[0].label_source, Some(LabelSource::LabelFor));
        assert_eq!(got[1].label_text.as_deref(), Some("Street"));
        assert_eq!(got[1].label_source, Some(LabelSource::PrecedingSibling));
    }

    #[test]
    fn bare_edit_text_dropped_and_input_type_widgets_kept() {
        let got = fields(r#"<EditText/><Spinner android:inputType="phone"/>"#);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].widget, "Spinner");
        assert_eq!(got[0].input_type, Some(0x3));
    }

    #[test]
    fn password_type_wins() {
        let b = DatasetBundle::seed();
        let f = label_field(&record(Some("user_secret"), Some(0x81), None, None), &b, &AppContext::default()).unwrap();
        assert_eq!((f.label.rank().value(), f.label.category()), (3, DataCategory::Authentication));
        assert_eq!(f.identifier.as_str(), "Password");
        assert_eq!(f.decided_by, DecidedBy::InputType);

        let f = label_field(&record(Some("pin_code"), Some(0x12), None, None), &b, &AppContext::default()).unwrap();
        assert_eq!(f.label.category(), DataCategory::PaymentAuthentication);
        let f = label_field(&record(Some("email"), Some(0x81), None, None), &b, &AppContext::default()).unwrap();
        assert_eq!(f.label.category(), DataCategory::Authentication);
    }

    #[test]
    fn id_then_hint_then_label() {
        let b = DatasetBundle::seed();
        let ctx = AppContext::default();
        let f = label_field(&record(Some("txt_name"), None, None, None), &b, &ctx).unwrap();
        assert_eq!((f.label.rank().value(), f.label.category()), (2, DataCategory::PersonalInformation));
        assert_eq!((f.identifier.as_str(), f.decided_by), ("Name", DecidedBy::FieldId));

        let f = label_field(&record(Some("edit1"), None, Some("IBAN"), Some("Chat")), &b, &ctx).unwrap();
        assert_eq!(f.decided_by, DecidedBy::Hint);
        assert_eq!(f.identifier.as_str(), "Account");

        let f = label_field(&record(Some("edit1"), None, None, Some("Chat")), &b, &ctx).unwrap();
        assert_eq!(f.decided_by, DecidedBy::LabelText);
        assert!(label_field(&record(Some("qwertyuiop"), None, None, None), &b, &ctx).is_none());
    }

    #[test]
    fn height_of_an_image_is_ui() {
        let b = DatasetBundle::seed();
        let f = label_field(&record(Some("image_height"), None, None, None), &b, &AppContext::default()).unwrap();
        assert_eq!((f.label.rank().value(), f.label.category()), (4, DataCategory::Ui));
        let f = label_field(&record(Some("height"), None, None, None), &b, &AppContext::default()).unwrap();
        assert_eq!(f.label.category(), DataCategory::HealthAndFitnessData);
        let f = label_field(&record(Some("body"), None, None, None), &b, &AppContext::for_domain(AppDomain::Messaging)).unwrap();
        assert_eq!((f.label.rank().value(), f.label.category()), (4, DataCategory::Message));
    }

    #[test]
    fn email_and_phone_types() {
        let b = DatasetBundle::seed();
        let f = label_field(&record(None, Some(0x21), None, None), &b, &AppContext::default()).unwrap();
        assert_eq!(f.identifier.as_str(), "Email address");
        let f = label_field(&record(None, Some(0x3), None, None), &b, &AppContext::default()).unwrap();
        assert_eq!((f.label.rank().value(), f.identifier.as_str()), (1, "Phone number"));
    }
}
