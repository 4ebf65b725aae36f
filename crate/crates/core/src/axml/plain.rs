use roxmltree::{Document, Node, ParsingOptions};

use super::input_type;
use super::{AttrValue, AxmlError, ResourceRef, XmlAttribute, XmlDocument, XmlElement, ANDROID_NS};

/// Parses decoded (apktool-style) XML text. DTDs are rejected.
pub fn parse_plain_xml(text: &str) -> Result<XmlDocument, AxmlError> {
    let options = ParsingOptions { allow_dtd: false, ..ParsingOptions::default() };
    let doc = Document::parse_with_options(text, options).map_err(|e| AxmlError::MalformedXml {
        line: e.pos().row,
        reason: e.to_string(),
    })?;
    let root = convert(doc.root_element(), 0)?;
    Ok(XmlDocument { root })
}

fn convert(node: Node<'_, '_>, depth: usize) -> Result<XmlElement, AxmlError> {
    if depth > 1024 {
        return Err(AxmlError::UnbalancedElements("element nesting too deep".into()));
    }
    let attributes = node
        .attributes()
        .map(|a| XmlAttribute {
            namespace_uri: a.namespace().map(str::to_string),
            name: a.name().to_string(),
            value: attr_value(a.namespace(), a.name(), a.value()),
        })
        .collect();
    let mut element = XmlElement { name: node.tag_name().name().to_string(), attributes, ..Default::default() };
    element.check_unique_attributes()?;

    let mut text = String::new();
    for child in node.children() {
        if child.is_element() {
            element.children.push(convert(child, depth + 1)?);
        } else if let Some(t) = child.text().filter(|_| child.is_text()) {
            text.push_str(t);
        }
    }
    let text = text.trim();
    if !text.is_empty() {
        element.text = Some(text.to_string());
    }
    Ok(element)
}

fn attr_value(namespace: Option<&str>, name: &str, raw: &str) -> AttrValue {
    if let Some(r) = parse_reference(raw) {
        return AttrValue::ResRef(r);
    }
    if let Some(hex) = raw.strip_prefix("0x").or_else(|| raw.strip_prefix("0X")) {
        if let Ok(v) = u32::from_str_radix(hex, 16) {
            return AttrValue::HexFlags(v);
        }
    }
    if namespace == Some(ANDROID_NS) && name == "inputType" {
        if let Some(v) = input_type::from_symbolic(raw) {
            return AttrValue::HexFlags(v);
        }
    }
    AttrValue::Str(raw.to_string())
}

/// `@type/name`, `@+id/name`, `@pkg:type/name`.
fn parse_reference(raw: &str) -> Option<ResourceRef> {
    let body = raw.strip_prefix('@')?;
    let body = body.strip_prefix('+').or_else(|| body.strip_prefix('*')).unwrap_or(body);
    let (qualified, name) = body.split_once('/')?;
    let (package, kind) = match qualified.split_once(':') {
        Some((p, k)) => (Some(p.to_string()), k),
        None => (None, qualified),
    };
    let valid = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '-'));
    if !valid(kind) || !valid(name) || package.as_deref().is_some_and(|p| !valid(p)) {
        return None;
    }
    Some(ResourceRef::Named { package, kind: kind.to_string(), name: name.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ANDROID: &str = r#"xmlns:android="http://schemas.android.com/apk/res/android""#;

    #[test]
    fn edit_text_with_id_and_hint() {
        let doc = parse_plain_xml(&format!(
            r#"<EditText {ANDROID} android:id="@+id/txt_name" android:hint="Your name"/>"#
        ))
        .unwrap();
        assert_eq!(doc.root.name, "EditText");
        assert_eq!(
            doc.root.android_attr("id"),
            Some(&AttrValue::ResRef(ResourceRef::Named { package: None, kind: "id".into(), name: "txt_name".into() }))
        );
        assert_eq!(doc.root.android_attr("hint"), Some(&AttrValue::Str("Your name".into())));
    }

    #[test]
    fn input_type_forms() {
        let doc = parse_plain_xml(&format!(
            r#"<L {ANDROID}><EditText android:inputType="textPassword"/><EditText android:inputType="0x00000012"/><EditText android:inputType="weird"/></L>"#
        ))
        .unwrap();
        let values: Vec<_> = doc.root.children.iter().map(|c| c.android_attr("inputType").unwrap().clone()).collect();
        assert_eq!(values, [AttrValue::HexFlags(0x81), AttrValue::HexFlags(0x12), AttrValue::Str("weird".into())]);
    }

    #[test]
    fn references() {
        assert_eq!(
            parse_reference("@android:string/ok"),
            Some(ResourceRef::Named { package: Some("android".into()), kind: "string".into(), name: "ok".into() })
        );
        assert_eq!(parse_reference("@null"), None);
        assert_eq!(parse_reference("email@example.com"), None);
        assert_eq!(parse_reference("@string/"), None);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_plain_xml("<a><b></a>"), Err(AxmlError::MalformedXml { .. })));
        assert!(matches!(parse_plain_xml("<a>\n<b>"), Err(AxmlError::MalformedXml { .. })));
        let dtd = r#"<?xml version="1.0"?><!DOCTYPE a [<!ENTITY x SYSTEM "file:///etc/passwd">]><a>&x;</a>"#;
        assert!(matches!(parse_plain_xml(dtd), Err(AxmlError::MalformedXml { .. })));
    }

    #[test]
    fn text_content_is_trimmed() {
        let doc = parse_plain_xml("<resources><string name=\"a\">\n  Demo  \n</string></resources>").unwrap();
        assert_eq!(doc.root.children[0].text.as_deref(), Some("Demo"));
        assert_eq!(doc.root.text, None);
    }
}
