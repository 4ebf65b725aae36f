//! Matching referenced methods against the identifier API dataset.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::container::AppPackage;
use crate::datasets::DatasetBundle;
use crate::dexscan::{self, MethodRef};
use crate::taxonomy::{IdentifierTag, PrivacyLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiSourceRecord {
    #[serde(rename = "method", serialize_with = "display")]
    pub method: MethodRef,
    pub signature: String,
    pub label: PrivacyLabel,
    pub identifier: IdentifierTag,
    /// 1 for `classes.dex`, N for `classesN.dex`; the first file referencing it.
    pub dex_index: usize,
}

fn display<S: serde::Serializer>(m: &MethodRef, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("none of the {count} DEX files could be parsed")]
pub struct NoAnalyzableCode {
    pub count: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ApiAnalysis {
    pub records: Vec<ApiSourceRecord>,
    pub warnings: Vec<String>,
}

/// Records for every dataset method referenced by `refs`, one per method,
/// ordered by dataset signature. `refs` pairs a reference with its DEX index.
pub fn match_refs<'a>(refs: impl IntoIterator<Item = (usize, &'a MethodRef)>, bundle: &DatasetBundle) -> Vec<ApiSourceRecord> {
    let mut found: BTreeMap<String, ApiSourceRecord> = BTreeMap::new();
    for (dex_index, r) in refs {
        let Some(entry) = bundle.lookup_api(r) else { continue };
        found.entry(entry.signature.clone()).or_insert_with(|| ApiSourceRecord {
            method: r.clone(),
            signature: entry.signature.clone(),
            label: entry.label,
            identifier: entry.identifier.clone(),
            dex_index,
        });
    }
    found.into_values().collect()
}

/// Parses each DEX payload and matches its method references. Files that do
/// not parse become warnings; the call fails only if every file fails.
pub fn match_api_sources(pkg: &AppPackage, bundle: &DatasetBundle) -> Result<ApiAnalysis, NoAnalyzableCode> {
    let mut warnings = Vec::new();
    let mut parsed = Vec::new();
    for (i, f) in pkg.dex_files.iter().enumerate() {
        match dexscan::parse_dex(&f.bytes) {
            Ok(dex) => {
                if dex.checksum == dexscan::ChecksumStatus::Mismatch {
                    warnings.push(format!("{}: checksum mismatch", f.path));
                }
                parsed.push((i + 1, dexscan::method_refs(&dex)));
            }
            Err(e) => warnings.push(format!("{}: {e}", f.path)),
        }
    }
    if parsed.is_empty() && !pkg.dex_files.is_empty() {
        return Err(NoAnalyzableCode { count: pkg.dex_files.len(), warnings });
    }
    if pkg.dex_files.is_empty() {
        warnings.push("no DEX payloads; code analysis skipped".into());
    }
    let records = match_refs(parsed.iter().flat_map(|(i, refs)| refs.iter().map(move |r| (*i, r))), bundle);
    Ok(ApiAnalysis { records, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_and_dedupes() {
        let b = DatasetBundle::seed();
        let lat = MethodRef::new("Landroid/location/Location;", "getLatitude", "()D");
        let ip = MethodRef::new("Landroid/net/IpPrefix;", "getAddress", "()Ljava/net/InetAddress;");
        let sb = MethodRef::new("Ljava/lang/StringBuilder;", "append", "(Ljava/lang/String;)Ljava/lang/StringBuilder;");
        let got = match_refs([(1, &lat), (1, &sb), (2, &ip), (2, &lat)], &b);
        assert_eq!(got.len(), 2);
        let lat_rec = got.iter().find(|r| r.method == lat).unwrap();
        assert_eq!(lat_rec.dex_index, 1);
        assert_eq!(lat_rec.identifier.as_str(), "Approximate location");
        assert!(match_refs([(1, &sb)], &b).is_empty());
    }
}
