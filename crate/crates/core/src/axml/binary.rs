use super::string_pool::{le_u16, le_u32};
use super::{
    AttrValue, AxmlError, ResourceRef, StringPool, XmlAttribute, XmlDocument, XmlElement, RES_STRING_POOL_TYPE,
    RES_XML_TYPE,
};

const RES_XML_START_NAMESPACE_TYPE: u16 = 0x0100;
const RES_XML_END_NAMESPACE_TYPE: u16 = 0x0101;
const RES_XML_START_ELEMENT_TYPE: u16 = 0x0102;
const RES_XML_END_ELEMENT_TYPE: u16 = 0x0103;
const RES_XML_CDATA_TYPE: u16 = 0x0104;
const RES_XML_RESOURCE_MAP_TYPE: u16 = 0x0180;

const TYPE_NULL: u8 = 0x00;
const TYPE_REFERENCE: u8 = 0x01;
const TYPE_ATTRIBUTE: u8 = 0x02;
const TYPE_STRING: u8 = 0x03;
const TYPE_FLOAT: u8 = 0x04;
const TYPE_INT_DEC: u8 = 0x10;
const TYPE_INT_HEX: u8 = 0x11;
const TYPE_INT_BOOLEAN: u8 = 0x12;

const NO_INDEX: u32 = 0xffff_ffff;
const MAX_DEPTH: usize = 1024;

/// Framework attribute ids, used when an obfuscator blanks attribute names
/// in the string pool and only the resource map identifies them.
const KNOWN_ATTRS: &[(u32, &str)] = &[
    (0x0101_0001, "label"),
    (0x0101_0002, "icon"),
    (0x0101_0003, "name"),
    (0x0101_00d0, "id"),
    (0x0101_014f, "text"),
    (0x0101_0150, "hint"),
    (0x0101_0220, "inputType"),
    (0x0101_021b, "versionCode"),
    (0x0101_021c, "versionName"),
    (0x0101_020c, "minSdkVersion"),
    (0x0101_0270, "targetSdkVersion"),
    (0x0101_0271, "maxSdkVersion"),
    (0x0101_0273, "contentDescription"),
    (0x0101_03c6, "labelFor"),
];

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

/// Parses a compiled XML document (manifest or layout).
pub fn parse_binary_xml(bytes: &[u8]) -> Result<XmlDocument, AxmlError> {
    if le_u16(bytes, 0) != Some(RES_XML_TYPE) {
        return Err(AxmlError::BadMagic);
    }
    let outer = read_chunk(bytes, 0, bytes.len())?;
    let mut parser = Parser { buf: bytes, pool: None, resource_ids: Vec::new(), stack: Vec::new(), root: None };

    let mut at = outer.header_size;
    while at < outer.end {
        let chunk = read_chunk(bytes, at, outer.end)?;
        parser.chunk(&chunk)?;
        // read_chunk guarantees size >= 8, so the offset strictly increases.
        at = chunk.end;
    }
    if let Some(open) = parser.stack.last() {
        return Err(AxmlError::UnbalancedElements(format!("<{}> never closed", open.name)));
    }
    parser.root.map(|root| XmlDocument { root }).ok_or(AxmlError::EmptyDocument)
}

struct Parser<'a> {
    buf: &'a [u8],
    pool: Option<StringPool>,
    resource_ids: Vec<u32>,
    stack: Vec<XmlElement>,
    root: Option<XmlElement>,
}

impl Parser<'_> {
    fn string(&self, index: u32) -> Result<&str, AxmlError> {
        match &self.pool {
            Some(p) => p.get(index),
            None => Err(AxmlError::StringIndexOutOfRange { index }),
        }
    }

    fn optional_string(&self, index: u32) -> Result<Option<String>, AxmlError> {
        if index == NO_INDEX {
            Ok(None)
        } else {
            self.string(index).map(|s| Some(s.to_string()))
        }
    }

    fn u32_at(&self, at: usize, chunk: &Chunk) -> Result<u32, AxmlError> {
        if at + 4 > chunk.end {
            return Err(AxmlError::TruncatedChunk { offset: at });
        }
        le_u32(self.buf, at).ok_or(AxmlError::TruncatedChunk { offset: at })
    }

    fn u16_at(&self, at: usize, chunk: &Chunk) -> Result<u16, AxmlError> {
        if at + 2 > chunk.end {
            return Err(AxmlError::TruncatedChunk { offset: at });
        }
        le_u16(self.buf, at).ok_or(AxmlError::TruncatedChunk { offset: at })
    }

    fn chunk(&mut self, chunk: &Chunk) -> Result<(), AxmlError> {
        match chunk.kind {
            RES_STRING_POOL_TYPE if self.pool.is_none() => {
                self.pool = Some(StringPool::parse(&self.buf[chunk.start..chunk.end], chunk.start)?);
            }
            RES_XML_RESOURCE_MAP_TYPE => {
                self.resource_ids = self.buf[chunk.start + chunk.header_size..chunk.end]
                    .chunks_exact(4)
                    .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                    .collect();
            }
            RES_XML_START_ELEMENT_TYPE => self.start_element(chunk)?,
            RES_XML_END_ELEMENT_TYPE => self.end_element(chunk)?,
            RES_XML_CDATA_TYPE => {
                let index = self.u32_at(chunk.start + chunk.header_size, chunk)?;
                let text = self.string(index)?.to_string();
                let Some(current) = self.stack.last_mut() else {
                    return Err(AxmlError::UnbalancedElements("text outside the root element".into()));
                };
                current.text.get_or_insert_with(String::new).push_str(&text);
            }
            RES_XML_START_NAMESPACE_TYPE | RES_XML_END_NAMESPACE_TYPE => {}
            _ => {}
        }
        Ok(())
    }

    fn attribute_name(&self, index: u32) -> Result<String, AxmlError> {
        let name = self.string(index)?;
        if !name.is_empty() {
            return Ok(name.to_string());
        }
        let known = self
            .resource_ids
            .get(index as usize)
            .and_then(|id| KNOWN_ATTRS.iter().find(|(k, _)| k == id))
            .map(|(_, n)| n.to_string());
        Ok(known.unwrap_or_default())
    }

    fn start_element(&mut self, chunk: &Chunk) -> Result<(), AxmlError> {
        let ext = chunk.start + chunk.header_size;
        let name_index = self.u32_at(ext + 4, chunk)?;
        let attr_start = self.u16_at(ext + 8, chunk)? as usize;
        let attr_size = self.u16_at(ext + 10, chunk)? as usize;
        let attr_count = self.u16_at(ext + 12, chunk)? as usize;
        if attr_count > 0 && attr_size < 20 {
            return Err(AxmlError::TruncatedChunk { offset: ext + 10 });
        }

        let mut element = XmlElement { name: self.string(name_index)?.to_string(), ..Default::default() };
        for i in 0..attr_count {
            let at = ext + attr_start + i * attr_size;
            if at + 20 > chunk.end {
                return Err(AxmlError::TruncatedChunk { offset: at });
            }
            let ns = self.u32_at(at, chunk)?;
            let name = self.u32_at(at + 4, chunk)?;
            let raw = self.u32_at(at + 8, chunk)?;
            let data_type = self.buf[at + 15];
            let data = self.u32_at(at + 16, chunk)?;
            element.attributes.push(XmlAttribute {
                namespace_uri: self.optional_string(ns)?,
                name: self.attribute_name(name)?,
                value: self.typed_value(raw, data_type, data)?,
            });
        }
        element.check_unique_attributes()?;

        if self.stack.is_empty() && self.root.is_some() {
            return Err(AxmlError::UnbalancedElements(format!("second root element <{}>", element.name)));
        }
        if self.stack.len() >= MAX_DEPTH {
            return Err(AxmlError::UnbalancedElements("element nesting too deep".into()));
        }
        self.stack.push(element);
        Ok(())
    }

    fn typed_value(&self, raw: u32, data_type: u8, data: u32) -> Result<AttrValue, AxmlError> {
        Ok(match data_type {
            TYPE_STRING => AttrValue::Str(self.string(data)?.to_string()),
            TYPE_REFERENCE | TYPE_ATTRIBUTE => AttrValue::ResRef(ResourceRef::Id(data)),
            TYPE_INT_DEC => AttrValue::Int(data as i32 as i64),
            TYPE_INT_HEX => AttrValue::HexFlags(data),
            TYPE_INT_BOOLEAN => AttrValue::Bool(data != 0),
            TYPE_FLOAT => AttrValue::Str(f32::from_bits(data).to_string()),
            TYPE_NULL if raw == NO_INDEX => AttrValue::Str(String::new()),
            _ if raw != NO_INDEX => AttrValue::Str(self.string(raw)?.to_string()),
            _ => AttrValue::HexFlags(data),
        })
    }

    fn end_element(&mut self, chunk: &Chunk) -> Result<(), AxmlError> {
        let name_index = self.u32_at(chunk.start + chunk.header_size + 4, chunk)?;
        let name = self.string(name_index)?.to_string();
        let Some(element) = self.stack.pop() else {
            return Err(AxmlError::UnbalancedElements(format!("</{name}> without matching start")));
        };
        if element.name != name {
            return Err(AxmlError::UnbalancedElements(format!("</{name}> closes <{}>", element.name)));
        }
        match self.stack.last_mut() {
            Some(parent) => parent.children.push(element),
            None => self.root = Some(element),
        }
        Ok(())
    }
}
