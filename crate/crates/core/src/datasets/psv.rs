//! Pipe-separated dataset files: `#` comments, blank lines ignored, one
//! mandatory header line naming the columns.

use super::DatasetError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Row<'a> {
    pub line: usize,
    pub fields: Vec<&'a str>,
}

/// Splits `text` into data rows after checking the header matches `columns`.
/// Structural problems are pushed to `errors`; rows with the wrong arity are skipped.
pub(crate) fn rows<'a>(
    file: &str,
    text: &'a str,
    columns: &[&str],
    errors: &mut Vec<DatasetError>,
) -> Vec<Row<'a>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        if !header_seen {
            header_seen = true;
            let header: Vec<String> = fields.iter().map(|f| f.to_ascii_lowercase()).collect();
            if header != columns {
                errors.push(DatasetError::MalformedRow {
                    file: file.to_string(),
                    line,
                    reason: format!("expected header `{}`", columns.join("|")),
                });
                return out;
            }
            continue;
        }
        if fields.len() != columns.len() {
            errors.push(DatasetError::MalformedRow {
                file: file.to_string(),
                line,
                reason: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
            continue;
        }
        out.push(Row { line, fields });
    }
    if !header_seen {
        errors.push(DatasetError::MalformedRow {
            file: file.to_string(),
            line: 0,
            reason: format!("missing header `{}`", columns.join("|")),
        });
    }
    out
}

pub(crate) fn write(columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = columns.join("|");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("|"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_and_requires_header() {
        let mut errors = Vec::new();
        let text = "# c\n\na|b\n1|2\n# x\n3|4\n";
        let rows = rows("f", text, &["a", "b"], &mut errors);
        assert!(errors.is_empty());
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].line, 6);
        assert_eq!(rows[1].fields, vec!["3", "4"]);
    }

    #[test]
    fn reports_bad_arity_and_header() {
        let mut errors = Vec::new();
        rows("f", "a|b\n1|2|3\n", &["a", "b"], &mut errors);
        assert!(matches!(&errors[0], DatasetError::MalformedRow { line: 2, .. }));

        let mut errors = Vec::new();
        rows("f", "x|y\n", &["a", "b"], &mut errors);
        assert!(matches!(&errors[0], DatasetError::MalformedRow { line: 1, .. }));

        let mut errors = Vec::new();
        rows("f", "# only comments\n", &["a"], &mut errors);
        assert_eq!(errors.len(), 1);
    }
}
