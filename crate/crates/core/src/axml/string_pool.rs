use super::{AxmlError, RES_STRING_POOL_TYPE};

const UTF8_FLAG: u32 = 0x0000_0100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StringEncoding {
    Utf8,
    Utf16,
}

/// Decoded `ResStringPool` chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringPool {
    pub strings: Vec<String>,
    pub encoding: StringEncoding,
    /// Set when at least one string needed lossy replacement.
    pub lossy: bool,
}

pub(crate) fn le_u16(b: &[u8], at: usize) -> Option<u16> {
    b.get(at..at + 2).map(|s| u16::from_le_bytes([s[0], s[1]]))
}

pub(crate) fn le_u32(b: &[u8], at: usize) -> Option<u32> {
    b.get(at..at + 4).map(|s| u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
}

impl StringPool {
    pub fn get(&self, index: u32) -> Result<&str, AxmlError> {
        self.strings
            .get(index as usize)
            .map(String::as_str)
            .ok_or(AxmlError::StringIndexOutOfRange { index })
    }

    /// Parses a whole string-pool chunk. `base` is the chunk's offset in the
    /// enclosing buffer and only used for error positions.
    pub(crate) fn parse(chunk: &[u8], base: usize) -> Result<Self, AxmlError> {
        let trunc = |at: usize| AxmlError::TruncatedChunk { offset: base + at };
        if le_u16(chunk, 0) != Some(RES_STRING_POOL_TYPE) {
            return Err(AxmlError::BadMagic);
        }
        let header_size = le_u16(chunk, 2).ok_or(trunc(2))? as usize;
        if header_size < 28 || header_size > chunk.len() {
            return Err(trunc(0));
        }
        let count = le_u32(chunk, 8).ok_or(trunc(8))? as usize;
        let flags = le_u32(chunk, 16).ok_or(trunc(16))?;
        let strings_start = le_u32(chunk, 20).ok_or(trunc(20))? as usize;
        let offsets_end = count
            .checked_mul(4)
            .and_then(|n| n.checked_add(header_size))
            .filter(|end| *end <= chunk.len())
            .ok_or(trunc(header_size))?;
        let encoding = if flags & UTF8_FLAG != 0 { StringEncoding::Utf8 } else { StringEncoding::Utf16 };

        let mut strings = Vec::with_capacity(count);
        let mut lossy = false;
        for at in (header_size..offsets_end).step_by(4) {
            let off = le_u32(chunk, at).ok_or(trunc(at))? as usize;
            let start = strings_start.checked_add(off).filter(|s| *s < chunk.len()).ok_or(trunc(at))?;
            let (s, was_lossy) = match encoding {
                StringEncoding::Utf8 => decode_utf8_entry(chunk, start),
                StringEncoding::Utf16 => decode_utf16_entry(chunk, start),
            }
            .ok_or(trunc(start))?;
            lossy |= was_lossy;
            strings.push(s);
        }
        Ok(StringPool { strings, encoding, lossy })
    }
}

fn utf8_len(b: &[u8], at: usize) -> Option<(usize, usize)> {
    let first = *b.get(at)? as usize;
    if first & 0x80 != 0 {
        let second = *b.get(at + 1)? as usize;
        Some((((first & 0x7f) << 8) | second, at + 2))
    } else {
        Some((first, at + 1))
    }
}

fn decode_utf8_entry(b: &[u8], at: usize) -> Option<(String, bool)> {
    let (_chars, at) = utf8_len(b, at)?;
    let (bytes, at) = utf8_len(b, at)?;
    let raw = b.get(at..at.checked_add(bytes)?)?;
    Some(match std::str::from_utf8(raw) {
        Ok(s) => (s.to_string(), false),
        Err(_) => (String::from_utf8_lossy(raw).into_owned(), true),
    })
}

fn decode_utf16_entry(b: &[u8], at: usize) -> Option<(String, bool)> {
    let first = le_u16(b, at)? as usize;
    let (units, at) = if first & 0x8000 != 0 {
        let second = le_u16(b, at + 2)? as usize;
        (((first & 0x7fff) << 16) | second, at + 4)
    } else {
        (first, at + 2)
    };
    let raw = b.get(at..at.checked_add(units.checked_mul(2)?)?)?;
    let units: Vec<u16> = raw.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
    Some(match String::from_utf16(&units) {
        Ok(s) => (s, false),
        Err(_) => (String::from_utf16_lossy(&units), true),
    })
}
