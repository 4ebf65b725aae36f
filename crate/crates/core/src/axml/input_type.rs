//! `android:inputType` flag values.

pub const TYPE_MASK_CLASS: u32 = 0x0000_000f;
pub const TYPE_MASK_VARIATION: u32 = 0x0000_0ff0;

pub const TYPE_CLASS_TEXT: u32 = 0x1;
pub const TYPE_CLASS_NUMBER: u32 = 0x2;
pub const TYPE_CLASS_PHONE: u32 = 0x3;

pub const TEXT_PASSWORD: u32 = 0x81;
pub const TEXT_VISIBLE_PASSWORD: u32 = 0x91;
pub const TEXT_WEB_PASSWORD: u32 = 0xe1;
pub const NUMBER_PASSWORD: u32 = 0x12;
pub const TEXT_EMAIL_ADDRESS: u32 = 0x21;
pub const TEXT_WEB_EMAIL_ADDRESS: u32 = 0xd1;

/// Public symbolic names accepted in decoded layouts.
const SYMBOLS: &[(&str, u32)] = &[
    ("none", 0x0000_0000),
    ("text", 0x0000_0001),
    ("textCapCharacters", 0x0000_1001),
    ("textCapWords", 0x0000_2001),
    ("textCapSentences", 0x0000_4001),
    ("textAutoCorrect", 0x0000_8001),
    ("textAutoComplete", 0x0001_0001),
    ("textMultiLine", 0x0002_0001),
    ("textImeMultiLine", 0x0004_0001),
    ("textNoSuggestions", 0x0008_0001),
    ("textEnableTextConversionSuggestions", 0x0010_0001),
    ("textUri", 0x0000_0011),
    ("textEmailAddress", 0x0000_0021),
    ("textEmailSubject", 0x0000_0031),
    ("textShortMessage", 0x0000_0041),
    ("textLongMessage", 0x0000_0051),
    ("textPersonName", 0x0000_0061),
    ("textPostalAddress", 0x0000_0071),
    ("textPassword", 0x0000_0081),
    ("textVisiblePassword", 0x0000_0091),
    ("textWebEditText", 0x0000_00a1),
    ("textFilter", 0x0000_00b1),
    ("textPhonetic", 0x0000_00c1),
    ("textWebEmailAddress", 0x0000_00d1),
    ("textWebPassword", 0x0000_00e1),
    ("number", 0x0000_0002),
    ("numberSigned", 0x0000_1002),
    ("numberDecimal", 0x0000_2002),
    ("numberPassword", 0x0000_0012),
    ("phone", 0x0000_0003),
    ("datetime", 0x0000_0004),
    ("date", 0x0000_0014),
    ("time", 0x0000_0024),
];

/// Resolves `"textPassword|textNoSuggestions"` style values by OR-ing flags.
pub fn from_symbolic(value: &str) -> Option<u32> {
    value.split('|').try_fold(0u32, |acc, part| {
        let part = part.trim();
        SYMBOLS.iter().find(|(name, _)| *name == part).map(|(_, v)| acc | v)
    })
}

pub fn symbol_for(flags: u32) -> Option<&'static str> {
    SYMBOLS.iter().find(|(_, v)| *v == flags).map(|(n, _)| *n)
}

pub fn is_password(flags: u32) -> bool {
    let class = flags & TYPE_MASK_CLASS;
    let variation = flags & (TYPE_MASK_CLASS | TYPE_MASK_VARIATION);
    match class {
        TYPE_CLASS_TEXT => matches!(variation, TEXT_PASSWORD | TEXT_VISIBLE_PASSWORD | TEXT_WEB_PASSWORD),
        TYPE_CLASS_NUMBER => variation == NUMBER_PASSWORD,
        _ => false,
    }
}

pub fn is_email(flags: u32) -> bool {
    let variation = flags & (TYPE_MASK_CLASS | TYPE_MASK_VARIATION);
    matches!(variation, TEXT_EMAIL_ADDRESS | TEXT_WEB_EMAIL_ADDRESS)
}

pub fn is_phone(flags: u32) -> bool {
    flags & TYPE_MASK_CLASS == TYPE_CLASS_PHONE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_values() {
        assert_eq!(from_symbolic("textPassword"), Some(0x81));
        assert_eq!(from_symbolic("numberPassword"), Some(0x12));
        assert_eq!(from_symbolic("textCapWords|textPersonName"), Some(0x2061));
        assert_eq!(from_symbolic("textPassword | textNoSuggestions"), Some(0x80081));
        assert_eq!(from_symbolic("bogus"), None);
    }

    #[test]
    fn classes() {
        for f in [0x81, 0x91, 0xe1, 0x12, 0x80081] {
            assert!(is_password(f), "{f:#x}");
        }
        for f in [0x1, 0x21, 0x2, 0x3, 0x61, 0x82] {
            assert!(!is_password(f), "{f:#x}");
        }
        assert!(is_email(0x21) && is_email(0xd1) && !is_email(0x81));
        assert!(is_phone(0x3) && !is_phone(0x2));
    }
}
