//! Resource-table (`resources.arsc`) builder and the matching decoded
//! `res/values` files.

use std::collections::BTreeMap;

use crate::xml::{string_pool, PoolEncoding};

pub const PACKAGE_ID: u32 = 0x7f;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resource {
    pub kind: String,
    pub name: String,
    /// String value for `string` resources, file path for drawables.
    pub value: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct TableBuilder {
    pub package: String,
    pub resources: Vec<Resource>,
    /// `(kind, name, language, value)` entries in a non-default configuration.
    pub localized: Vec<(String, String, [u8; 2], String)>,
}

impl TableBuilder {
    pub fn new(package: &str) -> Self {
        TableBuilder { package: package.to_string(), ..Default::default() }
    }

    /// Adds a resource unless one with the same kind and name exists.
    pub fn add(&mut self, kind: &str, name: &str, value: Option<&str>) -> &mut Self {
        if !self.resources.iter().any(|r| r.kind == kind && r.name == name) {
            self.resources.push(Resource { kind: kind.into(), name: name.into(), value: value.map(Into::into) });
        }
        self
    }

    pub fn string(&mut self, name: &str, value: &str) -> &mut Self {
        self.add("string", name, Some(value))
    }

    pub fn localize(&mut self, name: &str, language: &str, value: &str) -> &mut Self {
        let l = language.as_bytes();
        self.localized.push(("string".into(), name.into(), [l[0], l[1]], value.into()));
        self
    }

    /// Types in first-appearance order, each with its resources in order.
    fn types(&self) -> Vec<(String, Vec<&Resource>)> {
        let mut out: Vec<(String, Vec<&Resource>)> = Vec::new();
        for r in &self.resources {
            match out.iter_mut().find(|(k, _)| *k == r.kind) {
                Some((_, list)) => list.push(r),
                None => out.push((r.kind.clone(), vec![r])),
            }
        }
        out
    }

    /// Resource id for every `(kind, name)`.
    pub fn ids(&self) -> BTreeMap<(String, String), u32> {
        let mut ids = BTreeMap::new();
        for (t, (kind, list)) in self.types().iter().enumerate() {
            for (e, r) in list.iter().enumerate() {
                ids.insert((kind.clone(), r.name.clone()), PACKAGE_ID << 24 | (t as u32 + 1) << 16 | e as u32);
            }
        }
        ids
    }

    pub fn id(&self, kind: &str, name: &str) -> u32 {
        self.ids()[&(kind.to_string(), name.to_string())]
    }

    pub fn build(&self, encoding: PoolEncoding) -> Vec<u8> {
        let types = self.types();
        let mut values: Vec<String> = Vec::new();
        let mut value_index = |s: &str| match values.iter().position(|v| v == s) {
            Some(i) => i as u32,
            None => {
                values.push(s.to_string());
                values.len() as u32 - 1
            }
        };
        let mut keys: Vec<String> = Vec::new();
        let mut key_index = |s: &str| match keys.iter().position(|v| v == s) {
            Some(i) => i as u32,
            None => {
                keys.push(s.to_string());
                keys.len() as u32 - 1
            }
        };

        let mut type_chunks = Vec::new();
        for (t, (kind, list)) in types.iter().enumerate() {
            let type_id = t as u8 + 1;
            let mut spec = vec![type_id, 0, 0, 0];
            spec.extend_from_slice(&(list.len() as u32).to_le_bytes());
            spec.extend(std::iter::repeat_n(0u8, 4 * list.len()));
            type_chunks.extend(chunk(0x0202, 16, &spec));

            let entries: Vec<(u32, u8, u32)> = list
                .iter()
                .map(|r| {
                    let key = key_index(&r.name);
                    match (&r.value, kind.as_str()) {
                        (Some(v), _) => (key, 0x03, value_index(v)),
                        (None, "id") => (key, 0x12, 0),
                        (None, _) => (key, 0x10, 0),
                    }
                })
                .collect();
            type_chunks.extend(type_chunk(type_id, [0, 0], list.len(), &entries.iter().map(|e| Some(*e)).collect::<Vec<_>>()));

            let localized: Vec<_> = self.localized.iter().filter(|l| l.0 == *kind).collect();
            let mut languages: Vec<[u8; 2]> = localized.iter().map(|l| l.2).collect();
            languages.sort();
            languages.dedup();
            for lang in languages {
                let slots: Vec<Option<(u32, u8, u32)>> = list
                    .iter()
                    .map(|r| {
                        localized
                            .iter()
                            .find(|l| l.1 == r.name && l.2 == lang)
                            .map(|l| (key_index(&r.name), 0x03, value_index(&l.3)))
                    })
                    .collect();
                type_chunks.extend(type_chunk(type_id, lang, list.len(), &slots));
            }
        }

        let type_names: Vec<String> = types.iter().map(|(k, _)| k.clone()).collect();
        let type_pool = string_pool(&type_names, encoding);
        let key_pool = string_pool(&keys, encoding);
        let header_size = 288u32;
        let mut pkg = Vec::new();
        pkg.extend_from_slice(&PACKAGE_ID.to_le_bytes());
        let mut name = [0u16; 128];
        for (i, u) in self.package.encode_utf16().take(127).enumerate() {
            name[i] = u;
        }
        pkg.extend(name.iter().flat_map(|u| u.to_le_bytes()));
        pkg.extend_from_slice(&header_size.to_le_bytes());
        pkg.extend_from_slice(&(types.len() as u32).to_le_bytes());
        pkg.extend_from_slice(&(header_size + type_pool.len() as u32).to_le_bytes());
        pkg.extend_from_slice(&(keys.len() as u32).to_le_bytes());
        pkg.extend_from_slice(&0u32.to_le_bytes());
        pkg.extend(type_pool);
        pkg.extend(key_pool);
        pkg.extend(type_chunks);

        let mut body = 1u32.to_le_bytes().to_vec();
        body.extend(string_pool(&values, encoding));
        body.extend(chunk(0x0200, header_size as u16, &pkg));
        chunk(0x0002, 12, &body)
    }

    /// Decoded `res/values/*.xml` files for this table (default configuration).
    pub fn values_files(&self) -> Vec<(String, String)> {
        let mut strings = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<resources>\n");
        let mut ids = strings.clone();
        let mut any_ids = false;
        for r in &self.resources {
            match (r.kind.as_str(), &r.value) {
                ("string", Some(v)) => strings.push_str(&format!("    <string name=\"{}\">{}</string>\n", r.name, escape_value(v))),
                ("id", _) => {
                    any_ids = true;
                    ids.push_str(&format!("    <item type=\"id\" name=\"{}\" />\n", r.name));
                }
                _ => {}
            }
        }
        strings.push_str("</resources>\n");
        ids.push_str("</resources>\n");
        let mut out = vec![("res/values/strings.xml".to_string(), strings)];
        if any_ids {
            out.push(("res/values/ids.xml".to_string(), ids));
        }
        out
    }
}

fn escape_value(v: &str) -> String {
    let mut out = String::new();
    for c in v.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '\'' => out.push_str("\\'"),
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out
}

fn chunk(kind: u16, header_size: u16, body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + body.len());
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&header_size.to_le_bytes());
    out.extend_from_slice(&((8 + body.len()) as u32).to_le_bytes());
    out.extend_from_slice(body);
    out
}

/// A `ResTable_type` chunk with a 64-byte configuration; `None` slots are absent entries.
fn type_chunk(type_id: u8, language: [u8; 2], count: usize, slots: &[Option<(u32, u8, u32)>]) -> Vec<u8> {
    const CONFIG: usize = 64;
    let header_size = 20 + CONFIG;
    let entries_start = header_size + 4 * count;
    let mut header = vec![type_id, 0, 0, 0];
    header.extend_from_slice(&(count as u32).to_le_bytes());
    header.extend_from_slice(&(entries_start as u32).to_le_bytes());
    let mut config = vec![0u8; CONFIG];
    config[..4].copy_from_slice(&(CONFIG as u32).to_le_bytes());
    config[8] = language[0];
    config[9] = language[1];
    header.extend(config);

    let mut offsets = Vec::new();
    let mut data = Vec::new();
    for slot in slots {
        match slot {
            Some((key, data_type, value)) => {
                offsets.extend_from_slice(&(data.len() as u32).to_le_bytes());
                data.extend_from_slice(&8u16.to_le_bytes());
                data.extend_from_slice(&0u16.to_le_bytes());
                data.extend_from_slice(&key.to_le_bytes());
                data.extend_from_slice(&8u16.to_le_bytes());
                data.push(0);
                data.push(*data_type);
                data.extend_from_slice(&value.to_le_bytes());
            }
            None => offsets.extend_from_slice(&0xffff_ffffu32.to_le_bytes()),
        }
    }
    let mut body = header;
    body.extend(offsets);
    body.extend(data);
    chunk(0x0201, header_size as u16, &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_follow_type_and_entry_order() {
        let mut t = TableBuilder::new("com.example");
        t.string("app_name", "Demo").add("id", "txt_name", None).string("hint", "Name");
        assert_eq!(t.id("string", "app_name"), 0x7f01_0000);
        assert_eq!(t.id("string", "hint"), 0x7f01_0001);
        assert_eq!(t.id("id", "txt_name"), 0x7f02_0000);
        let bytes = t.build(PoolEncoding::Utf16);
        assert_eq!(&bytes[..2], &[0x02, 0x00]);
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize, bytes.len());
    }
}

/// Compiles `root` against a table holding exactly the resources it
/// references. Returns the compiled XML and the table bytes.
pub fn compile_with_table(root: &crate::xml::Element, encoding: PoolEncoding) -> (Vec<u8>, Vec<u8>) {
    let mut t = TableBuilder::new("com.example");
    for (kind, name) in root.references() {
        t.add(&kind, &name, None);
    }
    let ids = t.ids();
    let resolve = |k: &str, n: &str| ids[&(k.to_string(), n.to_string())];
    (crate::xml::to_binary(root, encoding, &resolve), t.build(encoding))
}
