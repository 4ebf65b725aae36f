use std::collections::BTreeMap;

use crate::taxonomy::{
    admitted_pairs, DataCategory, IdentifierTag, PrivacyLabel, RiskRank, SafetyCategory,
};

use super::{psv, DatasetError};

pub(crate) const FILE: &str = "mapping.psv";
pub(crate) const COLUMNS: [&str; 4] = ["rank", "category", "identifier_glob", "safety_category_or_none"];

/// One mapping row: a label pattern plus identifier glob routed to a
/// data-safety category, or to nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRow {
    pub label: PrivacyLabel,
    pub identifier_glob: String,
    pub target: Option<SafetyCategory>,
}

impl MappingRow {
    fn is_catch_all(&self) -> bool {
        self.identifier_glob == "*"
    }

    fn literal_len(&self) -> usize {
        self.identifier_glob.chars().filter(|c| *c != '*' && *c != '?').count()
    }
}

/// Label → data-safety category routing table.
///
/// Every admitted (rank, category) pair has exactly one `*` row; further rows
/// with narrower identifier globs take precedence, most literal characters
/// first, ties broken lexicographically, so row order in the file is irrelevant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryMapping {
    rows: BTreeMap<(RiskRank, DataCategory), Vec<MappingRow>>,
}

impl CategoryMapping {
    pub fn from_rows(rows: Vec<MappingRow>) -> Result<Self, DatasetError> {
        let mut errors = Vec::new();
        let mapping = Self::build(rows.into_iter().map(|r| (0, r)).collect(), &mut errors);
        match errors.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(mapping),
        }
    }

    fn build(rows: Vec<(usize, MappingRow)>, errors: &mut Vec<DatasetError>) -> Self {
        let mut grouped: BTreeMap<(RiskRank, DataCategory), Vec<(usize, MappingRow)>> = BTreeMap::new();
        for (line, row) in rows {
            let key = (row.label.rank(), row.label.category());
            let group = grouped.entry(key).or_default();
            if let Some((first, _)) = group
                .iter()
                .find(|(_, r)| r.identifier_glob.eq_ignore_ascii_case(&row.identifier_glob))
            {
                errors.push(DatasetError::DuplicateMappingRow {
                    rank: key.0.value(),
                    category: key.1,
                    glob: row.identifier_glob.clone(),
                    first_line: *first,
                    line,
                });
                continue;
            }
            group.push((line, row));
        }

        let missing: Vec<(u8, DataCategory)> = admitted_pairs()
            .filter(|key| !grouped.get(key).is_some_and(|g| g.iter().any(|(_, r)| r.is_catch_all())))
            .map(|(r, c)| (r.value(), c))
            .collect();
        if !missing.is_empty() {
            errors.push(DatasetError::IncompleteMapping { missing });
        }

        let rows = grouped
            .into_iter()
            .map(|(key, group)| {
                let mut rows: Vec<MappingRow> = group.into_iter().map(|(_, r)| r).collect();
                rows.sort_by(|a, b| {
                    a.is_catch_all()
                        .cmp(&b.is_catch_all())
                        .then(b.literal_len().cmp(&a.literal_len()))
                        .then(a.identifier_glob.cmp(&b.identifier_glob))
                });
                (key, rows)
            })
            .collect();
        CategoryMapping { rows }
    }

    pub(crate) fn parse(text: &str, errors: &mut Vec<DatasetError>) -> Self {
        let mut parsed = Vec::new();
        for row in psv::rows(FILE, text, &COLUMNS, errors) {
            match parse_row(&row.fields) {
                Ok(r) => parsed.push((row.line, r)),
                Err(reason) => errors.push(DatasetError::MalformedRow {
                    file: FILE.to_string(),
                    line: row.line,
                    reason,
                }),
            }
        }
        Self::build(parsed, errors)
    }

    pub(crate) fn serialize(&self) -> String {
        psv::write(
            &COLUMNS,
            self.rows().map(|r| {
                vec![
                    r.label.rank().to_string(),
                    r.label.category().machine_name().to_string(),
                    r.identifier_glob.clone(),
                    r.target.map_or("none", SafetyCategory::machine_name).to_string(),
                ]
            }),
        )
    }

    pub fn rows(&self) -> impl Iterator<Item = &MappingRow> {
        self.rows.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lookup(&self, label: PrivacyLabel, identifier: &IdentifierTag) -> Option<SafetyCategory> {
        self.rows
            .get(&(label.rank(), label.category()))?
            .iter()
            .find(|r| glob_match(&r.identifier_glob, identifier.as_str()))
            .and_then(|r| r.target)
    }
}

fn parse_row(fields: &[&str]) -> Result<MappingRow, String> {
    let label = super::parse_label_columns(fields[0], fields[1])?;
    let glob = fields[2].split_whitespace().collect::<Vec<_>>().join(" ");
    if glob.is_empty() {
        return Err("identifier glob is empty".to_string());
    }
    let target = match fields[3] {
        "none" | "" => None,
        other => Some(other.parse::<SafetyCategory>().map_err(|e| e.to_string())?),
    };
    Ok(MappingRow { label, identifier_glob: glob, target })
}

/// Case-insensitive glob with `*` (any run) and `?` (one character).
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.to_lowercase().chars().collect();
    let t: Vec<char> = text.to_lowercase().chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut backtrack: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            backtrack = Some((pi, ti));
            pi += 1;
        } else if let Some((star, matched)) = backtrack {
            pi = star + 1;
            ti = matched + 1;
            backtrack = Some((star, matched + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|c| *c == '*')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glob_semantics() {
        assert!(glob_match("*", ""));
        assert!(glob_match("*", "anything"));
        assert!(glob_match("SIM*", "sim card"));
        assert!(glob_match("?ame", "Name"));
        assert!(glob_match("*address", "Email address"));
        assert!(!glob_match("*address", "Email addresses"));
        assert!(glob_match("a*b*c", "aXXbYYc"));
        assert!(!glob_match("a*b*c", "aXXbYY"));
    }

    fn label(rank: u8, category: DataCategory) -> PrivacyLabel {
        PrivacyLabel::new(RiskRank::new(rank).unwrap(), category).unwrap()
    }

    fn complete_rows() -> Vec<MappingRow> {
        admitted_pairs()
            .map(|(r, c)| MappingRow {
                label: PrivacyLabel::new(r, c).unwrap(),
                identifier_glob: "*".into(),
                target: Some(SafetyCategory::PersonalInfo),
            })
            .collect()
    }

    #[test]
    fn specific_rows_win_regardless_of_order() {
        let mut rows = complete_rows();
        rows.push(MappingRow {
            label: label(2, DataCategory::DeviceData),
            identifier_glob: "Bluetooth*".into(),
            target: Some(SafetyCategory::DeviceOrOtherIds),
        });
        rows.push(MappingRow {
            label: label(2, DataCategory::DeviceData),
            identifier_glob: "B*".into(),
            target: None,
        });
        let forward = CategoryMapping::from_rows(rows.clone()).unwrap();
        rows.reverse();
        let backward = CategoryMapping::from_rows(rows).unwrap();
        assert_eq!(forward, backward);
        let bt = IdentifierTag::new("Bluetooth name").unwrap();
        assert_eq!(forward.lookup(label(2, DataCategory::DeviceData), &bt), Some(SafetyCategory::DeviceOrOtherIds));
        let b = IdentifierTag::new("Battery").unwrap();
        assert_eq!(forward.lookup(label(2, DataCategory::DeviceData), &b), None);
    }

    #[test]
    fn missing_catch_all_is_incomplete() {
        let mut rows = complete_rows();
        rows.retain(|r| r.label != label(4, DataCategory::Email));
        match CategoryMapping::from_rows(rows) {
            Err(DatasetError::IncompleteMapping { missing }) => {
                assert_eq!(missing, vec![(4, DataCategory::Email)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_glob_rejected() {
        let mut rows = complete_rows();
        rows.push(rows[0].clone());
        assert!(matches!(CategoryMapping::from_rows(rows), Err(DatasetError::DuplicateMappingRow { .. })));
    }
}
