use std::collections::{BTreeMap, HashMap};

use super::string_pool::{le_u16, le_u32};
use super::{AttrValue, AxmlError, ResourceRef, StringPool, XmlDocument, RES_STRING_POOL_TYPE, RES_TABLE_TYPE};

const RES_TABLE_PACKAGE_TYPE: u16 = 0x0200;
const RES_TABLE_TYPE_TYPE: u16 = 0x0201;

const FLAG_SPARSE: u8 = 0x01;
const FLAG_OFFSET16: u8 = 0x02;
const ENTRY_FLAG_COMPLEX: u16 = 0x0001;
const ENTRY_FLAG_COMPACT: u16 = 0x0008;
const TYPE_STRING: u8 = 0x03;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceEntry {
    pub id: u32,
    /// Resource type name, e.g. `string` or `drawable`.
    pub kind: String,
    pub name: String,
    /// Default-configuration value, for string resources only.
    pub value: Option<String>,
}

/// String resources (and names of everything else) from `resources.arsc`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceTable {
    entries: BTreeMap<u32, ResourceEntry>,
    by_name: HashMap<(String, String), u32>,
}

impl ResourceTable {
    pub fn get(&self, id: u32) -> Option<&ResourceEntry> {
        self.entries.get(&id)
    }

    pub fn by_name(&self, kind: &str, name: &str) -> Option<&ResourceEntry> {
        self.by_name.get(&(kind.to_string(), name.to_string())).and_then(|id| self.entries.get(id))
    }

    pub fn lookup_ref(&self, r: &ResourceRef) -> Option<&ResourceEntry> {
        match r {
            ResourceRef::Id(id) => self.get(*id),
            ResourceRef::Named { kind, name, .. } => self.by_name(kind, name),
        }
    }

    /// `(name, string value)` for a string resource.
    pub fn lookup_string(&self, id: u32) -> Option<(&str, &str)> {
        let e = self.get(id)?;
        Some((e.name.as_str(), e.value.as_deref()?))
    }

    pub fn entries(&self) -> impl Iterator<Item = &ResourceEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds a table from decoded `res/values/*.xml` documents. Ids are
    /// synthesized in package 0x7f since the text form carries none.
    pub fn from_values_documents(docs: &[XmlDocument]) -> Self {
        let mut table = ResourceTable::default();
        let mut kinds: Vec<String> = Vec::new();
        let mut counts: Vec<u32> = Vec::new();
        for doc in docs {
            for e in &doc.root.children {
                let Some(AttrValue::Str(name)) = e.attr(None, "name") else { continue };
                let kind = match (e.name.as_str(), e.attr(None, "type")) {
                    ("item", Some(AttrValue::Str(t))) => t.clone(),
                    (other, _) => other.to_string(),
                };
                if table.by_name(&kind, name).is_some() {
                    continue;
                }
                let type_index = match kinds.iter().position(|k| *k == kind) {
                    Some(i) => i,
                    None => {
                        kinds.push(kind.clone());
                        counts.push(0);
                        kinds.len() - 1
                    }
                };
                let id = 0x7f00_0000 | ((type_index as u32 + 1) & 0xff) << 16 | (counts[type_index] & 0xffff);
                counts[type_index] += 1;
                let value = (kind == "string").then(|| unescape(e.text.as_deref().unwrap_or("")));
                table.insert(ResourceEntry { id, kind, name: name.clone(), value }, true);
            }
        }
        table
    }

    fn insert(&mut self, entry: ResourceEntry, default_config: bool) {
        match self.entries.get_mut(&entry.id) {
            Some(existing) => {
                if default_config && existing.value.is_none() {
                    existing.value = entry.value;
                }
            }
            None => {
                let value = if default_config { entry.value.clone() } else { None };
                self.by_name.insert((entry.kind.clone(), entry.name.clone()), entry.id);
                self.entries.insert(entry.id, ResourceEntry { value, ..entry });
            }
        }
    }
}

struct Chunk {
    kind: u16,
    header_size: usize,
    start: usize,
    end: usize,
}

fn read_chunk(buf: &[u8], at: usize, limit: usize) -> Result<Chunk, AxmlError> {
    let trunc = AxmlError::TruncatedChunk { offset: at };
    let kind = le_u16(buf, at).ok_or(trunc.clone())?;
    let header_size = le_u16(buf, at + 2).ok_or(trunc.clone())? as usize;
    let size = le_u32(buf, at + 4).ok_or(trunc.clone())? as usize;
    let end = at.checked_add(size).ok_or(trunc.clone())?;
    if size < 8 || header_size < 8 || header_size > size || end > limit {
        return Err(trunc);
    }
    Ok(Chunk { kind, header_size, start: at, end })
}

fn field_u32(buf: &[u8], at: usize, end: usize) -> Result<u32, AxmlError> {
    if at + 4 > end {
        return Err(AxmlError::TruncatedChunk { offset: at });
    }
    le_u32(buf, at).ok_or(AxmlError::TruncatedChunk { offset: at })
}

fn field_u16(buf: &[u8], at: usize, end: usize) -> Result<u16, AxmlError> {
    if at + 2 > end {
        return Err(AxmlError::TruncatedChunk { offset: at });
    }
    le_u16(buf, at).ok_or(AxmlError::TruncatedChunk { offset: at })
}

/// Parses a compiled resource table.
pub fn parse_resource_table(bytes: &[u8]) -> Result<ResourceTable, AxmlError> {
    if le_u16(bytes, 0) != Some(RES_TABLE_TYPE) {
        return Err(AxmlError::BadMagic);
    }
    let outer = read_chunk(bytes, 0, bytes.len())?;
    let mut table = ResourceTable::default();
    let mut values: Option<StringPool> = None;
    let mut at = outer.header_size;
    while at < outer.end {
        let chunk = read_chunk(bytes, at, outer.end)?;
        match chunk.kind {
            RES_STRING_POOL_TYPE if values.is_none() => {
                values = Some(StringPool::parse(&bytes[chunk.start..chunk.end], chunk.start)?);
            }
            RES_TABLE_PACKAGE_TYPE => parse_package(bytes, &chunk, values.as_ref(), &mut table)?,
            _ => {}
        }
        at = chunk.end;
    }
    Ok(table)
}

fn parse_package(
    buf: &[u8],
    pkg: &Chunk,
    values: Option<&StringPool>,
    table: &mut ResourceTable,
) -> Result<(), AxmlError> {
    let package_id = field_u32(buf, pkg.start + 8, pkg.end)?;
    let type_strings = field_u32(buf, pkg.start + 268, pkg.end)? as usize;
    let key_strings = field_u32(buf, pkg.start + 276, pkg.end)? as usize;

    let mut types: Option<StringPool> = None;
    let mut keys: Option<StringPool> = None;
    let mut at = pkg.start + pkg.header_size;
    while at < pkg.end {
        let chunk = read_chunk(buf, at, pkg.end)?;
        let relative = chunk.start - pkg.start;
        match chunk.kind {
            RES_STRING_POOL_TYPE => {
                let pool = StringPool::parse(&buf[chunk.start..chunk.end], chunk.start)?;
                if relative == type_strings || (types.is_none() && relative != key_strings) {
                    types = Some(pool);
                } else {
                    keys = Some(pool);
                }
            }
            RES_TABLE_TYPE_TYPE => {
                let (Some(types), Some(keys)) = (&types, &keys) else {
                    return Err(AxmlError::TruncatedChunk { offset: chunk.start });
                };
                parse_type(buf, &chunk, package_id, types, keys, values, table)?;
            }
            _ => {}
        }
        at = chunk.end;
    }
    Ok(())
}

fn parse_type(
    buf: &[u8],
    chunk: &Chunk,
    package_id: u32,
    types: &StringPool,
    keys: &StringPool,
    values: Option<&StringPool>,
    table: &mut ResourceTable,
) -> Result<(), AxmlError> {
    let end = chunk.end;
    if chunk.start + 24 > end {
        return Err(AxmlError::TruncatedChunk { offset: chunk.start });
    }
    let type_id = buf[chunk.start + 8];
    let flags = buf[chunk.start + 9];
    let entry_count = field_u32(buf, chunk.start + 12, end)? as usize;
    let entries_start = chunk.start + field_u32(buf, chunk.start + 16, end)? as usize;
    let config_size = field_u32(buf, chunk.start + 20, end)? as usize;
    let config = buf
        .get(chunk.start + 24..(chunk.start + 20).saturating_add(config_size))
        .filter(|_| chunk.start + 20 + config_size <= chunk.start + chunk.header_size)
        .ok_or(AxmlError::TruncatedChunk { offset: chunk.start + 20 })?;
    let default_config = config.iter().all(|b| *b == 0);
    let kind = types.get(u32::from(type_id).wrapping_sub(1))?.to_string();

    let offsets = chunk.start + chunk.header_size;
    for i in 0..entry_count {
        let (index, offset) = if flags & FLAG_SPARSE != 0 {
            let at = offsets + i * 4;
            (field_u16(buf, at, end)? as usize, field_u16(buf, at + 2, end)? as usize * 4)
        } else if flags & FLAG_OFFSET16 != 0 {
            match field_u16(buf, offsets + i * 2, end)? {
                0xffff => continue,
                o => (i, o as usize * 4),
            }
        } else {
            match field_u32(buf, offsets + i * 4, end)? {
                0xffff_ffff => continue,
                o => (i, o as usize),
            }
        };
        let at = entries_start.checked_add(offset).ok_or(AxmlError::TruncatedChunk { offset: entries_start })?;
        let entry_flags = field_u16(buf, at + 2, end)?;
        let (key, value) = if entry_flags & ENTRY_FLAG_COMPACT != 0 {
            let key = field_u16(buf, at, end)? as u32;
            let data_type = (entry_flags >> 8) as u8;
            let data = field_u32(buf, at + 4, end)?;
            (key, string_value(values, data_type, data)?)
        } else {
            let size = field_u16(buf, at, end)? as usize;
            let key = field_u32(buf, at + 4, end)?;
            if entry_flags & ENTRY_FLAG_COMPLEX != 0 {
                (key, None)
            } else {
                let v = at + size;
                if v + 8 > end {
                    return Err(AxmlError::TruncatedChunk { offset: v });
                }
                let data_type = buf[v + 3];
                let data = field_u32(buf, v + 4, end)?;
                (key, string_value(values, data_type, data)?)
            }
        };
        let id = (package_id & 0xff) << 24 | u32::from(type_id) << 16 | (index as u32 & 0xffff);
        let value = value.filter(|_| kind == "string");
        table.insert(
            ResourceEntry { id, kind: kind.clone(), name: keys.get(key)?.to_string(), value },
            default_config,
        );
    }
    Ok(())
}

/// Undoes the backslash escapes aapt accepts in string resources.
fn unescape(text: &str) -> String {
    let text = text.trim();
    let text = text.strip_prefix('"').and_then(|t| t.strip_suffix('"')).unwrap_or(text);
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

fn string_value(values: Option<&StringPool>, data_type: u8, data: u32) -> Result<Option<String>, AxmlError> {
    if data_type != TYPE_STRING {
        return Ok(None);
    }
    match values {
        Some(pool) => pool.get(data).map(|s| Some(s.to_string())),
        None => Err(AxmlError::StringIndexOutOfRange { index: data }),
    }
}
