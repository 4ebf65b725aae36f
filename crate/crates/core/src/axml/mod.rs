//! Uniform XML document model for compiled (binary) and decoded (plain text)
//! Android XML, plus the binary resource table.

mod arsc;
mod binary;
pub mod input_type;
mod plain;
mod string_pool;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use arsc::{parse_resource_table, ResourceEntry, ResourceTable};
pub use binary::parse_binary_xml;
pub use plain::parse_plain_xml;
pub use string_pool::{StringEncoding, StringPool};

pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";

pub(crate) const RES_STRING_POOL_TYPE: u16 = 0x0001;
pub(crate) const RES_TABLE_TYPE: u16 = 0x0002;
pub(crate) const RES_XML_TYPE: u16 = 0x0003;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxmlError {
    #[error("unexpected chunk type (bad magic)")]
    BadMagic,
    #[error("truncated or oversized chunk at offset {offset:#x}")]
    TruncatedChunk { offset: usize },
    #[error("string index {index} out of range")]
    StringIndexOutOfRange { index: u32 },
    #[error("unbalanced elements: {0}")]
    UnbalancedElements(String),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("document has no root element")]
    EmptyDocument,
    #[error("malformed XML at line {line}: {reason}")]
    MalformedXml { line: u32, reason: String },
}

/// Reference to another resource, by numeric id (compiled XML) or by name
/// (`@string/hint_name` in decoded XML).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceRef {
    Id(u32),
    Named { package: Option<String>, kind: String, name: String },
}

impl fmt::Display for ResourceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceRef::Id(id) => write!(f, "@{id:#010x}"),
            ResourceRef::Named { package: Some(p), kind, name } => write!(f, "@{p}:{kind}/{name}"),
            ResourceRef::Named { package: None, kind, name } => write!(f, "@{kind}/{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "value")]
pub enum AttrValue {
    Str(String),
    Int(i64),
    Bool(bool),
    ResRef(ResourceRef),
    HexFlags(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XmlAttribute {
    pub namespace_uri: Option<String>,
    pub name: String,
    pub value: AttrValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct XmlElement {
    pub name: String,
    pub attributes: Vec<XmlAttribute>,
    pub children: Vec<XmlElement>,
    pub text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XmlDocument {
    pub root: XmlElement,
}

impl XmlElement {
    pub fn attr(&self, namespace_uri: Option<&str>, name: &str) -> Option<&AttrValue> {
        self.attributes
            .iter()
            .find(|a| a.name == name && a.namespace_uri.as_deref() == namespace_uri)
            .map(|a| &a.value)
    }

    pub fn android_attr(&self, name: &str) -> Option<&AttrValue> {
        self.attr(Some(ANDROID_NS), name)
    }

    /// Last dot-separated segment of the element name (`EditText` for
    /// `androidx.appcompat.widget.AppCompatEditText` → `AppCompatEditText`).
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    /// Pre-order traversal including `self`.
    pub fn descendants(&self) -> Vec<&XmlElement> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            out.push(e);
            stack.extend(e.children.iter().rev());
        }
        out
    }

    pub(crate) fn check_unique_attributes(&self) -> Result<(), AxmlError> {
        for (i, a) in self.attributes.iter().enumerate() {
            if self.attributes[..i]
                .iter()
                .any(|b| b.name == a.name && b.namespace_uri == a.namespace_uri)
            {
                return Err(AxmlError::DuplicateAttribute(a.name.clone()));
            }
        }
        Ok(())
    }
}

/// Parses either form; compiled XML is recognized by its chunk header.
pub fn parse_xml_auto(bytes: &[u8]) -> Result<XmlDocument, AxmlError> {
    if is_binary_xml(bytes) {
        parse_binary_xml(bytes)
    } else {
        let text = std::str::from_utf8(bytes).map_err(|e| AxmlError::MalformedXml {
            line: 1,
            reason: format!("not UTF-8: {e}"),
        })?;
        parse_plain_xml(text)
    }
}

pub fn is_binary_xml(bytes: &[u8]) -> bool {
    bytes.len() >= 2 && u16::from_le_bytes([bytes[0], bytes[1]]) == RES_XML_TYPE
}

/// Text for a string-ish attribute value.
///
/// `Str` is returned as is; a reference resolves to the default-configuration
/// string in `table`, or failing that to the referenced resource's name.
pub fn resolve_string(value: &AttrValue, table: Option<&ResourceTable>) -> Option<String> {
    match value {
        AttrValue::Str(s) => Some(s.clone()),
        AttrValue::ResRef(r) => {
            let entry = table.and_then(|t| t.lookup_ref(r));
            if let Some(v) = entry.and_then(|e| e.value.clone()) {
                return Some(v);
            }
            match (entry, r) {
                (Some(e), _) => Some(e.name.clone()),
                (None, ResourceRef::Named { name, .. }) => Some(name.clone()),
                (None, ResourceRef::Id(_)) => None,
            }
        }
        AttrValue::Int(_) | AttrValue::Bool(_) | AttrValue::HexFlags(_) => None,
    }
}

/// Name of the referenced resource (for `android:id` and `android:labelFor`).
pub fn resource_name(value: &AttrValue, table: Option<&ResourceTable>) -> Option<String> {
    match value {
        AttrValue::ResRef(ResourceRef::Named { name, .. }) => Some(name.clone()),
        AttrValue::ResRef(r @ ResourceRef::Id(_)) => table.and_then(|t| t.lookup_ref(r)).map(|e| e.name.clone()),
        _ => None,
    }
}

/// Stable identity of a reference target: the resource name when known,
/// otherwise the numeric id.
pub fn reference_key(value: &AttrValue, table: Option<&ResourceTable>) -> Option<String> {
    resource_name(value, table).or_else(|| match value {
        AttrValue::ResRef(ResourceRef::Id(id)) => Some(format!("{id:#010x}")),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_plain_and_unresolvable_values() {
        assert_eq!(resolve_string(&AttrValue::Str("Card number".into()), None).as_deref(), Some("Card number"));
        assert_eq!(resolve_string(&AttrValue::HexFlags(0x81), None), None);
        assert_eq!(resolve_string(&AttrValue::ResRef(ResourceRef::Id(0x7f10_0001)), None), None);
        let named = AttrValue::ResRef(ResourceRef::Named { package: None, kind: "string".into(), name: "hint_card_number".into() });
        assert_eq!(resolve_string(&named, None).as_deref(), Some("hint_card_number"));
    }

    #[test]
    fn simple_name_and_traversal() {
        let leaf = XmlElement { name: "androidx.appcompat.widget.AppCompatEditText".into(), ..Default::default() };
        let root = XmlElement {
            name: "LinearLayout".into(),
            children: vec![leaf.clone(), XmlElement { name: "Button".into(), ..Default::default() }],
            ..Default::default()
        };
        assert_eq!(leaf.simple_name(), "AppCompatEditText");
        let names: Vec<&str> = root.descendants().iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["LinearLayout", "androidx.appcompat.widget.AppCompatEditText", "Button"]);
    }
}
