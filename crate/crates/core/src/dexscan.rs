//! DEX parsing down to the method_ids table, and conversion between
//! Soot-style method signatures and DEX method references.
//!
//! The method_ids table lists every method a DEX file references, whether
//! declared locally or called on a framework/library class. Matching on it
//! reports sources that are *referenced*, not necessarily *reachable*.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const HEADER_SIZE: usize = 0x70;
const ENDIAN_CONSTANT: u32 = 0x1234_5678;
const NO_INDEX: u32 = 0xffff_ffff;
const SUPPORTED_VERSIONS: [&str; 6] = ["035", "037", "038", "039", "040", "041"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DexError {
    #[error("not a DEX file (bad magic)")]
    BadMagic,
    #[error("unsupported DEX version {0}")]
    UnsupportedVersion(String),
    #[error("unsupported endian tag {0:#010x}")]
    BadEndianTag(u32),
    #[error("{table} index {index} out of bounds")]
    IndexOutOfBounds { table: &'static str, index: u32 },
    #[error("truncated DEX file at offset {offset:#x}")]
    TruncatedFile { offset: usize },
    #[error("invalid type descriptor `{0}`")]
    InvalidDescriptor(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed method signature `{signature}`: {reason}")]
pub struct MalformedSignature {
    pub signature: String,
    pub reason: &'static str,
}

/// A referenced method in DEX descriptor form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodRef {
    /// Declaring class descriptor, e.g. `Landroid/location/Location;`.
    pub class: String,
    pub name: String,
    /// `(params)return`, e.g. `()D`.
    pub proto: String,
}

impl MethodRef {
    pub fn new(class: &str, name: &str, proto: &str) -> Self {
        MethodRef { class: class.to_string(), name: name.to_string(), proto: proto.to_string() }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}{}", self.class, self.name, self.proto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChecksumStatus {
    Valid,
    Mismatch,
    /// Declared file size exceeds the buffer, so the checksum could not be computed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtoId {
    pub return_type: String,
    pub params: Vec<String>,
}

impl ProtoId {
    pub fn descriptor(&self) -> String {
        format!("({}){}", self.params.concat(), self.return_type)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodId {
    pub class_idx: u16,
    pub proto_idx: u16,
    pub name_idx: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DexFile {
    pub version: String,
    pub checksum: ChecksumStatus,
    pub strings: Vec<String>,
    /// Type descriptors, indexed by type_id.
    pub types: Vec<String>,
    pub protos: Vec<ProtoId>,
    pub methods: Vec<MethodId>,
    /// Set when some string was not valid MUTF-8 and was replaced by U+FFFD.
    pub lossy_strings: bool,
}

struct Reader<'a> {
    data: &'a [u8],
}

impl<'a> Reader<'a> {
    fn u16(&self, at: usize) -> Result<u16, DexError> {
        self.data
            .get(at..at + 2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]))
            .ok_or(DexError::TruncatedFile { offset: at })
    }

    fn u32(&self, at: usize) -> Result<u32, DexError> {
        self.data
            .get(at..at + 4)
            .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or(DexError::TruncatedFile { offset: at })
    }

    /// Checks that `count` items of `size` bytes starting at `off` fit in the file.
    fn table(&self, off: u32, count: u32, size: usize) -> Result<usize, DexError> {
        let off = off as usize;
        let bytes = (count as usize)
            .checked_mul(size)
            .and_then(|n| n.checked_add(off))
            .ok_or(DexError::TruncatedFile { offset: off })?;
        if count > 0 && bytes > self.data.len() {
            return Err(DexError::TruncatedFile { offset: off });
        }
        Ok(off)
    }

    fn uleb128(&self, mut at: usize) -> Result<(u32, usize), DexError> {
        let mut result: u32 = 0;
        for shift in (0..35).step_by(7) {
            let byte = *self.data.get(at).ok_or(DexError::TruncatedFile { offset: at })?;
            at += 1;
            result |= u32::from(byte & 0x7f).wrapping_shl(shift);
            if byte & 0x80 == 0 {
                return Ok((result, at));
            }
        }
        Err(DexError::TruncatedFile { offset: at })
    }
}

/// Decodes Modified UTF-8. Returns `None` on malformed input or unpaired surrogates.
pub fn decode_mutf8(bytes: &[u8]) -> Option<String> {
    let mut units: Vec<u16> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let cont = |k: usize| bytes.get(i + k).copied().filter(|c| c & 0xc0 == 0x80);
        if b & 0x80 == 0 {
            if b == 0 {
                return None;
            }
            units.push(u16::from(b));
            i += 1;
        } else if b & 0xe0 == 0xc0 {
            let c1 = cont(1)?;
            units.push((u16::from(b & 0x1f) << 6) | u16::from(c1 & 0x3f));
            i += 2;
        } else if b & 0xf0 == 0xe0 {
            let (c1, c2) = (cont(1)?, cont(2)?);
            units.push((u16::from(b & 0x0f) << 12) | (u16::from(c1 & 0x3f) << 6) | u16::from(c2 & 0x3f));
            i += 3;
        } else {
            return None;
        }
    }
    String::from_utf16(&units).ok()
}

/// Lenient descriptor check: primitive, array of non-void, or `L...;` class.
pub fn is_type_descriptor(d: &str) -> bool {
    let elem = d.trim_start_matches('[');
    let dims = d.len() - elem.len();
    match elem.as_bytes() {
        [b'V'] => dims == 0,
        [b'Z' | b'B' | b'S' | b'C' | b'I' | b'J' | b'F' | b'D'] => true,
        [b'L', .., b';'] => {
            let body = &elem[1..elem.len() - 1];
            !body.is_empty() && body.split('/').all(|s| !s.is_empty() && !s.contains(';') && !s.contains('['))
        }
        _ => false,
    }
}

pub fn parse_dex(bytes: &[u8]) -> Result<DexFile, DexError> {
    if !bytes.starts_with(b"dex\n") {
        return Err(DexError::BadMagic);
    }
    if bytes.len() < HEADER_SIZE {
        return Err(DexError::TruncatedFile { offset: bytes.len() });
    }
    if bytes[7] != 0 || !bytes[4..7].iter().all(u8::is_ascii_digit) {
        return Err(DexError::BadMagic);
    }
    let version = String::from_utf8_lossy(&bytes[4..7]).into_owned();
    if !SUPPORTED_VERSIONS.contains(&version.as_str()) {
        return Err(DexError::UnsupportedVersion(version));
    }
    let r = Reader { data: bytes };
    let endian = r.u32(0x28)?;
    if endian != ENDIAN_CONSTANT {
        return Err(DexError::BadEndianTag(endian));
    }

    let declared_size = r.u32(0x20)? as usize;
    let checksum = if declared_size > bytes.len() || declared_size < HEADER_SIZE {
        ChecksumStatus::Skipped
    } else if adler2::adler32_slice(&bytes[12..declared_size]) == r.u32(0x08)? {
        ChecksumStatus::Valid
    } else {
        ChecksumStatus::Mismatch
    };

    let (string_count, string_off) = (r.u32(0x38)?, r.u32(0x3c)?);
    let (type_count, type_off) = (r.u32(0x40)?, r.u32(0x44)?);
    let (proto_count, proto_off) = (r.u32(0x48)?, r.u32(0x4c)?);
    let (method_count, method_off) = (r.u32(0x58)?, r.u32(0x5c)?);

    let mut lossy_strings = false;
    let base = r.table(string_off, string_count, 4)?;
    let mut strings = Vec::with_capacity(string_count as usize);
    for i in 0..string_count as usize {
        let data_off = r.u32(base + i * 4)? as usize;
        let (_utf16_len, start) = r.uleb128(data_off)?;
        let len = bytes
            .get(start..)
            .and_then(|rest| rest.iter().position(|b| *b == 0))
            .ok_or(DexError::TruncatedFile { offset: start })?;
        match decode_mutf8(&bytes[start..start + len]) {
            Some(s) => strings.push(s),
            None => {
                lossy_strings = true;
                strings.push("\u{FFFD}".to_string());
            }
        }
    }

    let string_at = |table: &'static str, idx: u32| -> Result<&String, DexError> {
        strings.get(idx as usize).ok_or(DexError::IndexOutOfBounds { table, index: idx })
    };

    let base = r.table(type_off, type_count, 4)?;
    let mut types = Vec::with_capacity(type_count as usize);
    for i in 0..type_count as usize {
        let descriptor = string_at("string_ids", r.u32(base + i * 4)?)?;
        if !is_type_descriptor(descriptor) {
            return Err(DexError::InvalidDescriptor(descriptor.clone()));
        }
        types.push(descriptor.clone());
    }
    let type_at = |idx: u32| -> Result<&String, DexError> {
        types.get(idx as usize).ok_or(DexError::IndexOutOfBounds { table: "type_ids", index: idx })
    };

    let base = r.table(proto_off, proto_count, 12)?;
    let mut protos = Vec::with_capacity(proto_count as usize);
    for i in 0..proto_count as usize {
        let at = base + i * 12;
        string_at("string_ids", r.u32(at)?)?;
        let return_type = type_at(r.u32(at + 4)?)?.clone();
        let params_off = r.u32(at + 8)?;
        let mut params = Vec::new();
        if params_off != 0 {
            let size = r.u32(params_off as usize)?;
            let list = r.table(params_off.saturating_add(4), size, 2)?;
            for p in 0..size as usize {
                let ty = type_at(u32::from(r.u16(list + p * 2)?))?;
                if ty == "V" {
                    return Err(DexError::InvalidDescriptor(ty.clone()));
                }
                params.push(ty.clone());
            }
        }
        protos.push(ProtoId { return_type, params });
    }

    let base = r.table(method_off, method_count, 8)?;
    let mut methods = Vec::with_capacity(method_count as usize);
    for i in 0..method_count as usize {
        let at = base + i * 8;
        let m = MethodId { class_idx: r.u16(at)?, proto_idx: r.u16(at + 2)?, name_idx: r.u32(at + 4)? };
        type_at(u32::from(m.class_idx))?;
        if m.proto_idx as usize >= protos.len() {
            return Err(DexError::IndexOutOfBounds { table: "proto_ids", index: u32::from(m.proto_idx) });
        }
        if m.name_idx == NO_INDEX || string_at("string_ids", m.name_idx)?.is_empty() {
            return Err(DexError::IndexOutOfBounds { table: "string_ids", index: m.name_idx });
        }
        methods.push(m);
    }

    Ok(DexFile { version, checksum, strings, types, protos, methods, lossy_strings })
}

impl DexFile {
    pub fn method_ref(&self, m: &MethodId) -> MethodRef {
        MethodRef {
            class: self.types[m.class_idx as usize].clone(),
            name: self.strings[m.name_idx as usize].clone(),
            proto: self.protos[m.proto_idx as usize].descriptor(),
        }
    }
}

/// One reference per method_ids entry, deduplicated, in table order.
pub fn method_refs(dex: &DexFile) -> Vec<MethodRef> {
    let mut seen = HashSet::new();
    dex.methods
        .iter()
        .map(|m| dex.method_ref(m))
        .filter(|r| seen.insert(r.clone()))
        .collect()
}

/// Union of the references of several DEX files, first occurrence order.
pub fn merged_method_refs<'a>(dexes: impl IntoIterator<Item = &'a DexFile>) -> Vec<MethodRef> {
    let mut seen = HashSet::new();
    dexes
        .into_iter()
        .flat_map(method_refs)
        .filter(|r| seen.insert(r.clone()))
        .collect()
}

fn is_java_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .split('.')
            .all(|seg| !seg.is_empty() && seg.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '$'))
}

fn strip_generics(text: &str) -> Option<String> {
    let mut depth = 0i32;
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '<' => depth += 1,
            '>' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    (depth == 0).then_some(out)
}

fn java_type_to_descriptor(ty: &str, allow_void: bool) -> Option<String> {
    let mut base = ty.trim();
    let mut dims = 0;
    loop {
        if let Some(b) = base.strip_suffix("[]") {
            base = b.trim_end();
            dims += 1;
        } else if let Some(b) = base.strip_suffix("...") {
            base = b.trim_end();
            dims += 1;
        } else {
            break;
        }
    }
    let elem = match base {
        "void" if dims == 0 && allow_void => "V".to_string(),
        "void" => return None,
        "boolean" => "Z".to_string(),
        "byte" => "B".to_string(),
        "short" => "S".to_string(),
        "char" => "C".to_string(),
        "int" => "I".to_string(),
        "long" => "J".to_string(),
        "float" => "F".to_string(),
        "double" => "D".to_string(),
        name if is_java_name(name) => format!("L{};", name.replace('.', "/")),
        _ => return None,
    };
    Some(format!("{}{}", "[".repeat(dims), elem))
}

fn descriptor_to_java_type(d: &str) -> Option<String> {
    let elem = d.trim_start_matches('[');
    let dims = d.len() - elem.len();
    let base = match elem {
        "V" => "void".to_string(),
        "Z" => "boolean".to_string(),
        "B" => "byte".to_string(),
        "S" => "short".to_string(),
        "C" => "char".to_string(),
        "I" => "int".to_string(),
        "J" => "long".to_string(),
        "F" => "float".to_string(),
        "D" => "double".to_string(),
        _ => elem.strip_prefix('L')?.strip_suffix(';')?.replace('/', "."),
    };
    Some(format!("{base}{}", "[]".repeat(dims)))
}

/// Converts `"android.location.Location: double getLatitude()"` (optionally
/// wrapped in `<...>`) into its DEX reference form.
pub fn signature_to_ref(signature: &str) -> Result<MethodRef, MalformedSignature> {
    let err = |reason| MalformedSignature { signature: signature.to_string(), reason };
    let mut s = signature.trim();
    if let Some(inner) = s.strip_prefix('<').and_then(|x| x.strip_suffix('>')) {
        s = inner.trim();
    }
    let (class, rest) = s.split_once(':').ok_or_else(|| err("missing `:` after class name"))?;
    let open = rest.find('(').ok_or_else(|| err("missing `(`"))?;
    let close = rest.rfind(')').ok_or_else(|| err("missing `)`"))?;
    if close < open || !rest[close + 1..].trim().is_empty() {
        return Err(err("text after parameter list"));
    }
    let head = strip_generics(rest[..open].trim()).ok_or_else(|| err("unbalanced generics"))?;
    let (ret, name) = head.trim().rsplit_once(char::is_whitespace).ok_or_else(|| err("missing return type"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '$' | '<' | '>')) {
        return Err(err("invalid method name"));
    }
    let params = strip_generics(&rest[open + 1..close]).ok_or_else(|| err("unbalanced generics"))?;
    let class = strip_generics(class.trim()).ok_or_else(|| err("unbalanced generics"))?;

    let class_desc = java_type_to_descriptor(&class, false)
        .filter(|d| d.starts_with('L') || d.starts_with('['))
        .ok_or_else(|| err("invalid class name"))?;
    let ret_desc = java_type_to_descriptor(ret, true).ok_or_else(|| err("invalid return type"))?;
    let mut param_desc = String::new();
    if !params.trim().is_empty() {
        for p in params.split(',') {
            param_desc.push_str(&java_type_to_descriptor(p, false).ok_or_else(|| err("invalid parameter type"))?);
        }
    }
    Ok(MethodRef { class: class_desc, name: name.to_string(), proto: format!("({param_desc}){ret_desc}") })
}

/// Splits a proto descriptor's parameter section into individual descriptors.
fn split_params(params: &str) -> Option<Vec<&str>> {
    let bytes = params.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        while bytes.get(i) == Some(&b'[') {
            i += 1;
        }
        match bytes.get(i)? {
            b'L' => i += params[i..].find(';')? + 1,
            b'Z' | b'B' | b'S' | b'C' | b'I' | b'J' | b'F' | b'D' => i += 1,
            _ => return None,
        }
        out.push(&params[start..i]);
    }
    Some(out)
}

/// Inverse of [`signature_to_ref`]; `None` when `r` is not well-formed.
pub fn ref_to_signature(r: &MethodRef) -> Option<String> {
    let class = descriptor_to_java_type(&r.class)?;
    let inner = r.proto.strip_prefix('(')?;
    let (params, ret) = inner.split_once(')')?;
    let ret = descriptor_to_java_type(ret)?;
    let params = split_params(params)?
        .into_iter()
        .map(descriptor_to_java_type)
        .collect::<Option<Vec<_>>>()?;
    Some(format!("{class}: {ret} {}({})", r.name, params.join(",")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_published_signature() {
        let r = signature_to_ref("android.location.Location: double getLatitude()").unwrap();
        assert_eq!(r, MethodRef::new("Landroid/location/Location;", "getLatitude", "()D"));
    }

    #[test]
    fn converts_arrays_and_primitives() {
        let r = signature_to_ref("a.B: void f(int,java.lang.String[])").unwrap();
        assert_eq!(r, MethodRef::new("La/B;", "f", "(I[Ljava/lang/String;)V"));
        let r = signature_to_ref("<a.B: long[][] g(boolean, char, java.util.List<java.lang.String>)>").unwrap();
        assert_eq!(r, MethodRef::new("La/B;", "g", "(ZCLjava/util/List;)[[J"));
        let r = signature_to_ref("android.provider.Settings$Secure: java.lang.String getString(android.content.ContentResolver,java.lang.String)").unwrap();
        assert_eq!(r.class, "Landroid/provider/Settings$Secure;");
    }

    #[test]
    fn rejects_malformed_signatures() {
        for bad in [
            "no parens here",
            "a.B void f()",
            "a.B: f()",
            "a.B: void f(void)",
            "a.B: void f(int",
            ": void f()",
            "a.B: void f() trailing",
            "int: void f()",
        ] {
            assert!(signature_to_ref(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn signature_round_trip() {
        let r = MethodRef::new("[Ljava/lang/Object;", "clone", "()Ljava/lang/Object;");
        let sig = ref_to_signature(&r).unwrap();
        assert_eq!(sig, "java.lang.Object[]: java.lang.Object clone()");
        assert_eq!(signature_to_ref(&sig).unwrap(), r);
    }

    #[test]
    fn mutf8_decoding() {
        assert_eq!(decode_mutf8(b"abc").as_deref(), Some("abc"));
        // Two-byte encoded NUL.
        assert_eq!(decode_mutf8(&[0x61, 0xc0, 0x80]).as_deref(), Some("a\0"));
        // U+1F600 as a CESU-style surrogate pair.
        let smile = [0xed, 0xa0, 0xbd, 0xed, 0xb8, 0x80];
        assert_eq!(decode_mutf8(&smile).as_deref(), Some("\u{1F600}"));
        // Lone high surrogate.
        assert_eq!(decode_mutf8(&smile[..3]), None);
        assert_eq!(decode_mutf8(&[0xff]), None);
        assert_eq!(decode_mutf8(&[0xc3]), None);
    }

    #[test]
    fn descriptor_grammar() {
        for ok in ["I", "V", "[I", "[[Ljava/lang/String;", "La/B$C;"] {
            assert!(is_type_descriptor(ok), "{ok}");
        }
        for bad in ["", "[V", "L;", "La//B;", "Q", "Ljava/lang/String", "II"] {
            assert!(!is_type_descriptor(bad), "{bad}");
        }
    }

    #[test]
    fn header_errors() {
        let mut buf = vec![0u8; 0x70];
        buf[..8].copy_from_slice(b"dex\n099\0");
        assert_eq!(parse_dex(&buf), Err(DexError::UnsupportedVersion("099".into())));
        buf[..8].copy_from_slice(b"dex\n035\0");
        assert_eq!(parse_dex(&buf[..0x40]), Err(DexError::TruncatedFile { offset: 0x40 }));
        assert_eq!(parse_dex(&[0xde, 0xad, 0xbe, 0xef, 0, 0]), Err(DexError::BadMagic));
        assert!(matches!(parse_dex(&buf), Err(DexError::BadEndianTag(0))));
    }

    #[test]
    fn empty_tables_parse() {
        let mut buf = vec![0u8; 0x70];
        buf[..8].copy_from_slice(b"dex\n035\0");
        buf[0x20..0x24].copy_from_slice(&0x70u32.to_le_bytes());
        buf[0x24..0x28].copy_from_slice(&0x70u32.to_le_bytes());
        buf[0x28..0x2c].copy_from_slice(&ENDIAN_CONSTANT.to_le_bytes());
        let sum = adler2::adler32_slice(&buf[12..]);
        buf[8..12].copy_from_slice(&sum.to_le_bytes());
        let dex = parse_dex(&buf).unwrap();
        assert_eq!(dex.checksum, ChecksumStatus::Valid);
        assert!(method_refs(&dex).is_empty());
    }
}
