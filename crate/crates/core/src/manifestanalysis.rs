//! Declared permissions and the data-safety categories they imply.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::axml::{self, XmlDocument};
use crate::datasets::PermissionRule;
use crate::taxonomy::SafetyCategory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("root element is <{0}>, not <manifest>")]
pub struct NotAManifest(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermissionEvidence {
    pub permission: String,
    pub implied_category: Option<SafetyCategory>,
}

const PERMISSION_ELEMENTS: [&str; 2] = ["uses-permission", "uses-permission-sdk-23"];

/// `android:name` of every permission request, document order, deduplicated.
pub fn extract_permissions(doc: &XmlDocument) -> Result<Vec<String>, NotAManifest> {
    if doc.root.name != "manifest" {
        return Err(NotAManifest(doc.root.name.clone()));
    }
    let mut seen = HashSet::new();
    Ok(doc
        .root
        .descendants()
        .into_iter()
        .filter(|e| PERMISSION_ELEMENTS.contains(&e.name.as_str()))
        .filter_map(|e| axml::resolve_string(e.android_attr("name")?, None))
        .filter(|p| seen.insert(p.clone()))
        .collect())
}

/// Pairs each permission with its implied category by exact name.
pub fn map_permissions(perms: &[String], rules: &[PermissionRule]) -> Vec<PermissionEvidence> {
    let mut seen = HashSet::new();
    perms
        .iter()
        .filter(|p| seen.insert(p.as_str()))
        .map(|p| PermissionEvidence {
            permission: p.clone(),
            implied_category: rules.iter().find(|r| r.permission == *p).map(|r| r.implied_category),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axml::parse_plain_xml;
    use crate::datasets::DatasetBundle;

    fn manifest(perms: &[&str]) -> XmlDocument {
        let body: String = perms.iter().map(|p| format!(r#"<uses-permission android:name="{p}"/>"#)).collect();
        parse_plain_xml(&format!(
            r#"<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="x">{body}<application/></manifest>"#
        ))
        .unwrap()
    }

    #[test]
    fn extraction() {
        let doc = manifest(&["android.permission.RECORD_AUDIO", "android.permission.READ_CONTACTS", "android.permission.READ_CONTACTS"]);
        assert_eq!(extract_permissions(&doc).unwrap(), ["android.permission.RECORD_AUDIO", "android.permission.READ_CONTACTS"]);
        let not = parse_plain_xml("<LinearLayout/>").unwrap();
        assert_eq!(extract_permissions(&not), Err(NotAManifest("LinearLayout".into())));
    }

    #[test]
    fn mapping() {
        let b = DatasetBundle::seed();
        let perms: Vec<String> = ["RECORD_AUDIO", "READ_CONTACTS", "ACCESS_FINE_LOCATION", "READ_SMS", "READ_CALENDAR", "INTERNET"]
            .iter()
            .map(|p| format!("android.permission.{p}"))
            .collect();
        let got: Vec<_> = map_permissions(&perms, b.permissions()).into_iter().map(|e| e.implied_category).collect();
        use SafetyCategory::*;
        assert_eq!(got, [Some(Audio), Some(Contacts), Some(Location), Some(Messages), Some(Calendar), None]);
        assert!(map_permissions(&[], b.permissions()).is_empty());
        assert_eq!(map_permissions(&["ACCESS_FINE_LOCATION".into()], b.permissions())[0].implied_category, None);
    }
}
