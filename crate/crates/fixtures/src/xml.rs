//! XML fixture model with two encoders: decoded text (apktool style) and
//! compiled binary XML (aapt style).

use std::collections::HashMap;

pub const ANDROID_NS: &str = "http://schemas.android.com/apk/res/android";

/// Framework attribute resource ids written to the resource map.
pub const ANDROID_ATTR_IDS: &[(&str, u32)] = &[
    ("label", 0x0101_0001),
    ("icon", 0x0101_0002),
    ("name", 0x0101_0003),
    ("id", 0x0101_00d0),
    ("layout_width", 0x0101_00f4),
    ("layout_height", 0x0101_00f5),
    ("text", 0x0101_014f),
    ("hint", 0x0101_0150),
    ("minSdkVersion", 0x0101_020c),
    ("versionCode", 0x0101_021b),
    ("versionName", 0x0101_021c),
    ("inputType", 0x0101_0220),
    ("targetSdkVersion", 0x0101_0270),
    ("labelFor", 0x0101_03c6),
];

pub fn android_attr_id(name: &str) -> Option<u32> {
    ANDROID_ATTR_IDS.iter().find(|(n, _)| *n == name).map(|(_, id)| *id)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Str(String),
    Int(i32),
    Bool(bool),
    /// Reference to an app resource; the binary encoder asks a resolver for its id.
    Ref { kind: String, name: String },
    /// Integer flags; `symbol` is what the decoded form shows, if any.
    Flags { value: u32, symbol: Option<String> },
}

impl Value {
    pub fn str(s: &str) -> Self {
        Value::Str(s.to_string())
    }

    pub fn reference(kind: &str, name: &str) -> Self {
        Value::Ref { kind: kind.to_string(), name: name.to_string() }
    }

    pub fn flags(value: u32) -> Self {
        Value::Flags { value, symbol: None }
    }

    pub fn symbolic(value: u32, symbol: &str) -> Self {
        Value::Flags { value, symbol: Some(symbol.to_string()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attr {
    /// In the android namespace, or unqualified.
    pub android: bool,
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Element {
    pub name: String,
    pub attrs: Vec<Attr>,
    pub children: Vec<Element>,
    pub text: Option<String>,
}

impl Element {
    pub fn new(name: &str) -> Self {
        Element { name: name.to_string(), ..Default::default() }
    }

    pub fn android(mut self, name: &str, value: Value) -> Self {
        self.attrs.push(Attr { android: true, name: name.to_string(), value });
        self
    }

    pub fn plain(mut self, name: &str, value: Value) -> Self {
        self.attrs.push(Attr { android: false, name: name.to_string(), value });
        self
    }

    pub fn child(mut self, child: Element) -> Self {
        self.children.push(child);
        self
    }

    pub fn children(mut self, children: impl IntoIterator<Item = Element>) -> Self {
        self.children.extend(children);
        self
    }

    pub fn text(mut self, text: &str) -> Self {
        self.text = Some(text.to_string());
        self
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Element)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// All `(kind, name)` app-resource references, in document order.
    pub fn references(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            for a in &e.attrs {
                if let Value::Ref { kind, name } = &a.value {
                    out.push((kind.clone(), name.clone()));
                }
            }
        });
        out
    }

    fn uses_android(&self) -> bool {
        let mut any = false;
        self.walk(&mut |e| any |= e.attrs.iter().any(|a| a.android));
        any
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn plain_value(v: &Value) -> String {
    match v {
        Value::Str(s) => s.clone(),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Ref { kind, name } => format!("@{kind}/{name}"),
        Value::Flags { symbol: Some(s), .. } => s.clone(),
        Value::Flags { value, symbol: None } => format!("0x{value:08x}"),
    }
}

/// Decoded text form.
pub fn to_plain(root: &Element) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    write_plain(root, 0, root.uses_android(), &mut out);
    out
}

fn write_plain(e: &Element, depth: usize, declare_ns: bool, out: &mut String) {
    let indent = "    ".repeat(depth);
    out.push_str(&indent);
    out.push('<');
    out.push_str(&e.name);
    if declare_ns {
        out.push_str(&format!(" xmlns:android=\"{ANDROID_NS}\""));
    }
    for a in &e.attrs {
        let prefix = if a.android { "android:" } else { "" };
        out.push_str(&format!(" {prefix}{}=\"{}\"", a.name, escape(&plain_value(&a.value))));
    }
    if e.children.is_empty() && e.text.is_none() {
        out.push_str(" />\n");
        return;
    }
    out.push('>');
    if let Some(t) = &e.text {
        out.push_str(&escape(t));
    }
    if !e.children.is_empty() {
        out.push('\n');
        for c in &e.children {
            write_plain(c, depth + 1, false, out);
        }
        out.push_str(&indent);
    }
    out.push_str(&format!("</{}>\n", e.name));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolEncoding {
    Utf8,
    Utf16,
}

/// Serializes a `ResStringPool` chunk.
pub fn string_pool(strings: &[String], encoding: PoolEncoding) -> Vec<u8> {
    let mut offsets = Vec::with_capacity(strings.len());
    let mut data = Vec::new();
    for s in strings {
        offsets.push(data.len() as u32);
        let units = s.encode_utf16().count();
        match encoding {
            PoolEncoding::Utf8 => {
                push_len8(&mut data, units);
                push_len8(&mut data, s.len());
                data.extend_from_slice(s.as_bytes());
                data.push(0);
            }
            PoolEncoding::Utf16 => {
                if units > 0x7fff {
                    data.extend_from_slice(&((((units >> 16) as u16) | 0x8000).to_le_bytes()));
                    data.extend_from_slice(&(units as u16).to_le_bytes());
                } else {
                    data.extend_from_slice(&(units as u16).to_le_bytes());
                }
                for u in s.encode_utf16() {
                    data.extend_from_slice(&u.to_le_bytes());
                }
                data.extend_from_slice(&[0, 0]);
            }
        }
    }
    while data.len() % 4 != 0 {
        data.push(0);
    }
    let header = 28u32;
    let strings_start = header + 4 * strings.len() as u32;
    let size = strings_start + data.len() as u32;
    let mut out = Vec::with_capacity(size as usize);
    out.extend_from_slice(&0x0001u16.to_le_bytes());
    out.extend_from_slice(&(header as u16).to_le_bytes());
    out.extend_from_slice(&size.to_le_bytes());
    out.extend_from_slice(&(strings.len() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    let flags: u32 = if encoding == PoolEncoding::Utf8 { 0x100 } else { 0 };
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&strings_start.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for o in offsets {
        out.extend_from_slice(&o.to_le_bytes());
    }
    out.extend_from_slice(&data);
    out
}

fn push_len8(out: &mut Vec<u8>, len: usize) {
    assert!(len <= 0x7fff, "string too long for UTF-8 pool");
    if len > 0x7f {
        out.push(((len >> 8) as u8) | 0x80);
        out.push(len as u8);
    } else {
        out.push(len as u8);
    }
}

struct Strings {
    list: Vec<String>,
    index: HashMap<String, u32>,
}

impl Strings {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(i) = self.index.get(s) {
            return *i;
        }
        let i = self.list.len() as u32;
        self.list.push(s.to_string());
        self.index.insert(s.to_string(), i);
        i
    }
}

const NONE: u32 = 0xffff_ffff;

fn chunk(kind: u16, header_size: u16, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + body.len());
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&header_size.to_le_bytes());
    out.extend_from_slice(&((8 + body.len()) as u32).to_le_bytes());
    out.extend_from_slice(body);
    out
}

fn u32s(values: &[u32]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Compiled binary form. `resolve` maps an app-resource reference to its id.
pub fn to_binary(root: &Element, encoding: PoolEncoding, resolve: &dyn Fn(&str, &str) -> u32) -> Vec<u8> {
    let mut strings = Strings { list: Vec::new(), index: HashMap::new() };
    // Attribute names with framework ids come first so the resource map
    // lines up with the first pool entries.
    let mut mapped: Vec<(String, u32)> = Vec::new();
    root.walk(&mut |e| {
        for a in e.attrs.iter().filter(|a| a.android) {
            if let Some(id) = android_attr_id(&a.name) {
                if !mapped.iter().any(|(n, _)| *n == a.name) {
                    mapped.push((a.name.clone(), id));
                }
            }
        }
    });
    mapped.sort_by_key(|(_, id)| *id);
    for (n, _) in &mapped {
        strings.intern(n);
    }
    let uses_android = root.uses_android();
    let (prefix, uri) = if uses_android { (strings.intern("android"), strings.intern(ANDROID_NS)) } else { (NONE, NONE) };

    let mut body = Vec::new();
    if uses_android {
        body.extend(chunk(0x0100, 16, &u32s(&[1, NONE, prefix, uri])));
    }
    encode_element(root, &mut strings, uri, resolve, &mut body);
    if uses_android {
        body.extend(chunk(0x0101, 16, &u32s(&[1, NONE, prefix, uri])));
    }

    let mut doc = string_pool(&strings.list, encoding);
    if !mapped.is_empty() {
        let ids: Vec<u32> = mapped.iter().map(|(_, id)| *id).collect();
        doc.extend(chunk(0x0180, 8, &u32s(&ids)));
    }
    doc.extend(body);
    chunk(0x0003, 8, &doc)
}

fn encode_element(e: &Element, strings: &mut Strings, uri: u32, resolve: &dyn Fn(&str, &str) -> u32, out: &mut Vec<u8>) {
    let name = strings.intern(&e.name);
    let mut attrs = Vec::new();
    let mut id_index = 0u16;
    for (i, a) in e.attrs.iter().enumerate() {
        let ns = if a.android { uri } else { NONE };
        let attr_name = strings.intern(&a.name);
        let (raw, kind, data) = match &a.value {
            Value::Str(s) => {
                let idx = strings.intern(s);
                (idx, 0x03u8, idx)
            }
            Value::Int(v) => (NONE, 0x10, *v as u32),
            Value::Bool(b) => (NONE, 0x12, if *b { NONE } else { 0 }),
            Value::Ref { kind, name } => (NONE, 0x01, resolve(kind, name)),
            Value::Flags { value, .. } => (NONE, 0x11, *value),
        };
        if a.android && a.name == "id" {
            id_index = i as u16 + 1;
        }
        attrs.extend(u32s(&[ns, attr_name, raw]));
        attrs.extend_from_slice(&8u16.to_le_bytes());
        attrs.push(0);
        attrs.push(kind);
        attrs.extend_from_slice(&data.to_le_bytes());
    }
    let mut start = u32s(&[1, NONE, NONE, name]);
    start.extend_from_slice(&20u16.to_le_bytes());
    start.extend_from_slice(&20u16.to_le_bytes());
    start.extend_from_slice(&(e.attrs.len() as u16).to_le_bytes());
    start.extend_from_slice(&id_index.to_le_bytes());
    start.extend_from_slice(&0u16.to_le_bytes());
    start.extend_from_slice(&0u16.to_le_bytes());
    start.extend(attrs);
    out.extend(chunk(0x0102, 16, &start));

    if let Some(t) = &e.text {
        let idx = strings.intern(t);
        let mut cdata = u32s(&[1, NONE, idx]);
        cdata.extend_from_slice(&8u16.to_le_bytes());
        cdata.push(0);
        cdata.push(0x03);
        cdata.extend_from_slice(&idx.to_le_bytes());
        out.extend(chunk(0x0104, 16, &cdata));
    }
    for c in &e.children {
        encode_element(c, strings, uri, resolve, out);
    }
    out.extend(chunk(0x0103, 16, &u32s(&[1, NONE, NONE, name])));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_form() {
        let e = Element::new("LinearLayout").child(
            Element::new("EditText")
                .android("id", Value::reference("id", "txt_name"))
                .android("inputType", Value::symbolic(0x81, "textPassword"))
                .android("hint", Value::str("a < b")),
        );
        let text = to_plain(&e);
        assert!(text.contains(r#"xmlns:android="http://schemas.android.com/apk/res/android""#));
        assert!(text.contains(r#"android:id="@id/txt_name" android:inputType="textPassword" android:hint="a &lt; b""#));
    }

    #[test]
    fn binary_header_and_size() {
        let e = Element::new("manifest").child(Element::new("uses-permission").android("name", Value::str("x")));
        let bytes = to_binary(&e, PoolEncoding::Utf16, &|_, _| 0);
        assert_eq!(&bytes[..4], &[0x03, 0x00, 0x08, 0x00]);
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize, bytes.len());
    }

    #[test]
    fn pool_lengths() {
        let long = "x".repeat(300);
        let p = string_pool(&[long], PoolEncoding::Utf8);
        assert_eq!(&p[32..34], &[0x81, 0x2c]);
    }
}
