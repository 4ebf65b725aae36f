//! Minimal DEX writer: string, type, proto and method tables with sorted
//! ids and a correct Adler-32 checksum. No class definitions or code.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MethodSpec {
    /// `Lpkg/Class;` descriptor.
    pub class: String,
    pub name: String,
    pub ret: String,
    pub params: Vec<String>,
}

impl MethodSpec {
    pub fn new(class: &str, name: &str, ret: &str, params: &[&str]) -> Self {
        MethodSpec {
            class: class.to_string(),
            name: name.to_string(),
            ret: ret.to_string(),
            params: params.iter().map(|p| p.to_string()).collect(),
        }
    }

    /// `(params)ret` descriptor.
    pub fn proto(&self) -> String {
        format!("({}){}", self.params.concat(), self.ret)
    }

    /// `Lpkg/Class;->name(params)ret`.
    pub fn smali(&self) -> String {
        format!("{}->{}{}", self.class, self.name, self.proto())
    }
}

fn shorty(t: &str) -> char {
    match t.as_bytes()[0] {
        b'L' | b'[' => 'L',
        b => b as char,
    }
}

/// Modified UTF-8 as used by DEX string data.
pub fn mutf8(s: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(s.len());
    for u in s.encode_utf16() {
        match u {
            0x0001..=0x007f => out.push(u as u8),
            0x0000 | 0x0080..=0x07ff => {
                out.push(0xc0 | (u >> 6) as u8);
                out.push(0x80 | (u & 0x3f) as u8);
            }
            _ => {
                out.push(0xe0 | (u >> 12) as u8);
                out.push(0x80 | ((u >> 6) & 0x3f) as u8);
                out.push(0x80 | (u & 0x3f) as u8);
            }
        }
    }
    out
}

fn uleb128(mut v: u32, out: &mut Vec<u8>) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn utf16_key(s: &str) -> Vec<u16> {
    s.encode_utf16().collect()
}

/// Builds a DEX file referencing `methods` (duplicates collapse).
pub fn build_dex(methods: &[MethodSpec], version: &str) -> Vec<u8> {
    build_dex_with_strings(methods, &[], version)
}

/// Like [`build_dex`], with extra string constants in the string table.
pub fn build_dex_with_strings(methods: &[MethodSpec], extra_strings: &[String], version: &str) -> Vec<u8> {
    let methods: BTreeSet<&MethodSpec> = methods.iter().collect();

    let mut string_set: BTreeSet<String> = extra_strings.iter().cloned().collect();
    let mut type_set: BTreeSet<String> = BTreeSet::new();
    for m in &methods {
        string_set.insert(m.name.clone());
        type_set.insert(m.class.clone());
        type_set.insert(m.ret.clone());
        type_set.extend(m.params.iter().cloned());
        string_set.insert(std::iter::once(&m.ret).chain(&m.params).map(|t| shorty(t)).collect());
    }
    string_set.extend(type_set.iter().cloned());
    let mut strings: Vec<String> = string_set.into_iter().collect();
    strings.sort_by_key(|s| utf16_key(s));
    let string_idx: BTreeMap<&str, u32> = strings.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();

    let mut types: Vec<&String> = type_set.iter().collect();
    types.sort_by_key(|t| string_idx[t.as_str()]);
    let type_idx: BTreeMap<&str, u32> = types.iter().enumerate().map(|(i, t)| (t.as_str(), i as u32)).collect();

    let mut protos: Vec<(u32, Vec<u32>, String)> = methods
        .iter()
        .map(|m| {
            let shorty: String = std::iter::once(&m.ret).chain(&m.params).map(|t| shorty(t)).collect();
            (type_idx[m.ret.as_str()], m.params.iter().map(|p| type_idx[p.as_str()]).collect(), shorty)
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    protos.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let proto_idx: BTreeMap<(u32, Vec<u32>), u32> =
        protos.iter().enumerate().map(|(i, p)| ((p.0, p.1.clone()), i as u32)).collect();

    let mut method_ids: Vec<(u32, u32, u32)> = methods
        .iter()
        .map(|m| {
            let params: Vec<u32> = m.params.iter().map(|p| type_idx[p.as_str()]).collect();
            (type_idx[m.class.as_str()], string_idx[m.name.as_str()], proto_idx[&(type_idx[m.ret.as_str()], params)])
        })
        .collect();
    method_ids.sort();

    let header = 0x70usize;
    let string_ids_off = header;
    let type_ids_off = string_ids_off + 4 * strings.len();
    let proto_ids_off = type_ids_off + 4 * types.len();
    let method_ids_off = proto_ids_off + 12 * protos.len();
    let data_off = method_ids_off + 8 * method_ids.len();

    let mut data = Vec::new();
    let mut param_offsets = Vec::with_capacity(protos.len());
    for (_, params, _) in &protos {
        if params.is_empty() {
            param_offsets.push(0u32);
            continue;
        }
        while !(data_off + data.len()).is_multiple_of(4) {
            data.push(0);
        }
        param_offsets.push((data_off + data.len()) as u32);
        data.extend_from_slice(&(params.len() as u32).to_le_bytes());
        for p in params {
            data.extend_from_slice(&(*p as u16).to_le_bytes());
        }
    }
    let mut string_offsets = Vec::with_capacity(strings.len());
    for s in &strings {
        string_offsets.push((data_off + data.len()) as u32);
        uleb128(s.encode_utf16().count() as u32, &mut data);
        data.extend(mutf8(s));
        data.push(0);
    }
    while data.len() % 4 != 0 {
        data.push(0);
    }

    let mut out = Vec::with_capacity(data_off + data.len());
    out.extend_from_slice(b"dex\n");
    out.extend_from_slice(version.as_bytes());
    out.push(0);
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&[0; 20]);
    let file_size = (data_off + data.len()) as u32;
    let tables: [(u32, usize); 6] = [
        (strings.len() as u32, string_ids_off),
        (types.len() as u32, type_ids_off),
        (protos.len() as u32, proto_ids_off),
        (0, 0),
        (method_ids.len() as u32, method_ids_off),
        (0, 0),
    ];
    for v in [file_size, header as u32, 0x1234_5678] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    // link_size/off, map_off
    out.extend_from_slice(&[0; 12]);
    for (count, off) in &tables {
        out.extend_from_slice(&count.to_le_bytes());
        out.extend_from_slice(&(if *count == 0 { 0 } else { *off as u32 }).to_le_bytes());
    }
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    out.extend_from_slice(&(data_off as u32).to_le_bytes());
    assert_eq!(out.len(), header);

    for o in &string_offsets {
        out.extend_from_slice(&o.to_le_bytes());
    }
    for t in &types {
        out.extend_from_slice(&string_idx[t.as_str()].to_le_bytes());
    }
    for (i, (ret, _, shorty)) in protos.iter().enumerate() {
        out.extend_from_slice(&string_idx[shorty.as_str()].to_le_bytes());
        out.extend_from_slice(&ret.to_le_bytes());
        out.extend_from_slice(&param_offsets[i].to_le_bytes());
    }
    for (class, name, proto) in &method_ids {
        out.extend_from_slice(&(*class as u16).to_le_bytes());
        out.extend_from_slice(&(*proto as u16).to_le_bytes());
        out.extend_from_slice(&name.to_le_bytes());
    }
    out.extend(data);
    let checksum = adler2::adler32_slice(&out[12..]);
    out[8..12].copy_from_slice(&checksum.to_le_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_fields() {
        let m = MethodSpec::new("Landroid/location/Location;", "getLatitude", "D", &[]);
        let dex = build_dex(&[m.clone(), m], "035");
        assert_eq!(&dex[..8], b"dex\n035\0");
        assert_eq!(u32::from_le_bytes(dex[0x20..0x24].try_into().unwrap()) as usize, dex.len());
        assert_eq!(u32::from_le_bytes(dex[0x58..0x5c].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(dex[8..12].try_into().unwrap()), adler2::adler32_slice(&dex[12..]));
    }

    #[test]
    fn modified_utf8() {
        assert_eq!(mutf8("a\0"), [b'a', 0xc0, 0x80]);
        assert_eq!(mutf8("é"), [0xc3, 0xa9]);
        assert_eq!(mutf8("😀"), [0xed, 0xa0, 0xbd, 0xed, 0xb8, 0x80]);
    }
}
