use std::collections::BTreeSet;

/// Widget prefixes dropped from field tokens before keyword matching.
pub const DEFAULT_STOP_LIST: [&str; 5] = ["txt", "edt", "et", "input", "field"];

/// Splits an identifier or free text into lowercase words.
///
/// Boundaries are non-alphanumeric characters, lower-to-upper case changes
/// (`cardNumber`), the end of an acronym (`IBANNumber` → `iban`, `number`)
/// and letter/digit changes.
pub fn split_words(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            flush(&mut current, &mut words);
            continue;
        }
        if let Some(&prev) = i.checked_sub(1).and_then(|p| chars.get(p)) {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase()
                    && c.is_uppercase()
                    && next.is_some_and(|n| n.is_lowercase()))
                || (prev.is_alphabetic() && c.is_numeric())
                || (prev.is_numeric() && c.is_alphabetic());
            if boundary && prev.is_alphanumeric() {
                flush(&mut current, &mut words);
            }
        }
        current.extend(c.to_lowercase());
    }
    flush(&mut current, &mut words);
    words
}

fn flush(current: &mut String, words: &mut Vec<String>) {
    if !current.is_empty() {
        words.push(std::mem::take(current));
    }
}

/// Canonical keyword form: lowercase words joined by single spaces.
pub fn normalize_keyword(text: &str) -> String {
    split_words(text).join(" ")
}

/// Field tokenizer with a configurable widget-prefix stop-list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tokenizer {
    stop_list: BTreeSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::with_stop_list(DEFAULT_STOP_LIST)
    }
}

impl Tokenizer {
    pub fn with_stop_list<I, S>(stop: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tokenizer {
            stop_list: stop.into_iter().map(|s| s.as_ref().trim().to_lowercase()).collect(),
        }
    }

    pub fn stop_list(&self) -> impl Iterator<Item = &str> {
        self.stop_list.iter().map(String::as_str)
    }

    pub fn tokens(&self, text: &str) -> Vec<String> {
        split_words(text)
            .into_iter()
            .filter(|w| !self.stop_list.contains(w))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_common_identifier_styles() {
        assert_eq!(split_words("txt_name"), ["txt", "name"]);
        assert_eq!(split_words("cardNumber"), ["card", "number"]);
        assert_eq!(split_words("IBANNumber"), ["iban", "number"]);
        assert_eq!(split_words("first-name"), ["first", "name"]);
        assert_eq!(split_words("Name on card"), ["name", "on", "card"]);
        assert_eq!(split_words("address2Line"), ["address", "2", "line"]);
        assert_eq!(split_words("  "), Vec::<String>::new());
    }

    #[test]
    fn drops_widget_prefixes() {
        let t = Tokenizer::default();
        assert_eq!(t.tokens("txt_name"), ["name"]);
        assert_eq!(t.tokens("edtCardNumber"), ["card", "number"]);
        assert_eq!(t.tokens("input_field_pin"), ["pin"]);
        let custom = Tokenizer::with_stop_list(["et"]);
        assert_eq!(custom.tokens("txt_name"), ["txt", "name"]);
    }

    #[test]
    fn normalizes_keywords() {
        assert_eq!(normalize_keyword("Account number"), "account number");
        assert_eq!(normalize_keyword(" IBAN "), "iban");
    }
}
