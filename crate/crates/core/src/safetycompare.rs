//! Data-safety declarations, evidence aggregation and the comparison report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apianalysis::ApiSourceRecord;
use crate::datasets::CategoryMapping;
use crate::manifestanalysis::PermissionEvidence;
use crate::taxonomy::{format_label, Purpose, SafetyCategory};
use crate::uianalysis::LabeledField;

pub const SCHEMA_VERSION: u32 = 1;

/// Share of declared data types that must carry six or more purposes for
/// the declaration to count as over-reporting (strictly more than half).
const OVER_REPORTING_PURPOSES: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredDataType {
    #[serde(rename = "type")]
    pub data_type: String,
    pub purposes: BTreeSet<Purpose>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecurityPractices {
    pub encrypted_in_transit: bool,
    pub deletion_requestable: bool,
}

/// Snapshot of an app's data-safety section.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyDeclaration {
    pub schema_version: u32,
    #[serde(default)]
    pub collected: BTreeMap<SafetyCategory, Vec<DeclaredDataType>>,
    #[serde(default)]
    pub shared: BTreeMap<SafetyCategory, Vec<DeclaredDataType>>,
    #[serde(default)]
    pub security: SecurityPractices,
    #[serde(default)]
    pub claims_no_collection: bool,
    #[serde(default)]
    pub claims_no_sharing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed declaration: {0}")]
pub struct MalformedDeclaration(pub String);

impl SafetyDeclaration {
    pub fn from_json(text: &str) -> Result<Self, MalformedDeclaration> {
        let decl: SafetyDeclaration = serde_json::from_str(text).map_err(|e| MalformedDeclaration(e.to_string()))?;
        decl.validate()?;
        Ok(decl)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("declaration serializes")
    }

    pub fn validate(&self) -> Result<(), MalformedDeclaration> {
        let bad = |m: String| Err(MalformedDeclaration(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.claims_no_collection && !self.collected.is_empty() {
            return bad("claims_no_collection is set but `collected` is not empty".into());
        }
        if self.claims_no_sharing && !self.shared.is_empty() {
            return bad("claims_no_sharing is set but `shared` is not empty".into());
        }
        for (section, map) in [("collected", &self.collected), ("shared", &self.shared)] {
            for (category, types) in map {
                if types.is_empty() {
                    return bad(format!("{section}.{category}: no data types listed"));
                }
                for t in types {
                    if t.data_type.trim().is_empty() {
                        return bad(format!("{section}.{category}: empty data type name"));
                    }
                    if t.purposes.is_empty() {
                        return bad(format!("{section}.{category}.{}: no purposes", t.data_type));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn declares_collection(&self, category: SafetyCategory) -> bool {
        self.collected.get(&category).is_some_and(|t| !t.is_empty())
    }

    pub fn collected_types(&self) -> impl Iterator<Item = &DeclaredDataType> {
        self.collected.values().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    Ui,
    Api,
    Permission,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "item")]
pub enum EvidenceItem {
    Ui(LabeledField),
    Api(ApiSourceRecord),
    Permission(PermissionEvidence),
}

impl EvidenceItem {
    pub fn kind(&self) -> EvidenceKind {
        match self {
            EvidenceItem::Ui(_) => EvidenceKind::Ui,
            EvidenceItem::Api(_) => EvidenceKind::Api,
            EvidenceItem::Permission(_) => EvidenceKind::Permission,
        }
    }

    /// Risk rank of the underlying label; permissions carry none.
    pub fn rank(&self) -> Option<u8> {
        match self {
            EvidenceItem::Ui(f) => Some(f.label.rank().value()),
            EvidenceItem::Api(a) => Some(a.label.rank().value()),
            EvidenceItem::Permission(_) => None,
        }
    }

    fn category(&self, mapping: &CategoryMapping) -> Option<SafetyCategory> {
        match self {
            EvidenceItem::Ui(f) => mapping.lookup(f.label, &f.identifier),
            EvidenceItem::Api(a) => mapping.lookup(a.label, &a.identifier),
            EvidenceItem::Permission(p) => p.implied_category,
        }
    }
}

impl fmt::Display for EvidenceItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvidenceItem::Ui(l) => {
                let name = l.record.field_id.as_deref().or(l.record.hint.as_deref()).unwrap_or(&l.record.widget);
                write!(f, "UI field `{name}` in {}: {}", l.record.layout_path, format_label(l.label, &l.identifier))
            }
            EvidenceItem::Api(a) => write!(f, "API {}: {}", a.signature, format_label(a.label, &a.identifier)),
            EvidenceItem::Permission(p) => write!(f, "permission {}", p.permission),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CollectionEvidence {
    pub per_category: BTreeMap<SafetyCategory, Vec<EvidenceItem>>,
    pub unmappable: Vec<EvidenceItem>,
}

impl CollectionEvidence {
    pub fn routed_count(&self) -> usize {
        self.per_category.values().map(Vec::len).sum()
    }

    pub fn has(&self, category: SafetyCategory) -> bool {
        self.per_category.get(&category).is_some_and(|v| !v.is_empty())
    }

    pub fn add(&mut self, item: EvidenceItem, mapping: &CategoryMapping) {
        match item.category(mapping) {
            Some(c) => self.per_category.entry(c).or_default().push(item),
            None => self.unmappable.push(item),
        }
    }
}

/// Routes each piece of evidence to its data-safety category.
pub fn aggregate_evidence(
    fields: &[LabeledField],
    apis: &[ApiSourceRecord],
    perms: &[PermissionEvidence],
    mapping: &CategoryMapping,
) -> CollectionEvidence {
    let mut ev = CollectionEvidence::default();
    let items = fields
        .iter()
        .cloned()
        .map(EvidenceItem::Ui)
        .chain(apis.iter().cloned().map(EvidenceItem::Api))
        .chain(perms.iter().cloned().map(EvidenceItem::Permission));
    for item in items {
        ev.add(item, mapping);
    }
    ev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CollectedAndReported,
    CollectedNotReported,
    ReportedNotCollected,
    Absent,
}

impl Status {
    pub fn from_facts(evidence: bool, declared: bool) -> Self {
        match (evidence, declared) {
            (true, true) => Status::CollectedAndReported,
            (true, false) => Status::CollectedNotReported,
            (false, true) => Status::ReportedNotCollected,
            (false, false) => Status::Absent,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Status::CollectedAndReported => "⊛",
            Status::CollectedNotReported => "★",
            Status::ReportedNotCollected => "○",
            Status::Absent => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryStatus {
    pub category: SafetyCategory,
    pub status: Status,
    pub examinable: bool,
    pub evidence_kinds: BTreeSet<EvidenceKind>,
    pub evidence_count: usize,
    /// Lowest (most severe) risk rank among labeled evidence.
    pub min_rank: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    OverReporting,
    UnderReporting,
    InconsistentReporting,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::OverReporting => "OverReporting",
            Verdict::UnderReporting => "UnderReporting",
            Verdict::InconsistentReporting => "InconsistentReporting",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case", tag = "flag", content = "category")]
pub enum ConsistencyFlag {
    SharedWithoutCollected(SafetyCategory),
    SecurityClaimsWithoutData,
    NoDeletionWithData,
    OverAndUnderReporting,
}

impl fmt::Display for ConsistencyFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsistencyFlag::SharedWithoutCollected(c) => write!(f, "SharedWithoutCollected({c})"),
            ConsistencyFlag::SecurityClaimsWithoutData => f.write_str("SecurityClaimsWithoutData"),
            ConsistencyFlag::NoDeletionWithData => f.write_str("NoDeletionWithData"),
            ConsistencyFlag::OverAndUnderReporting => f.write_str("OverAndUnderReporting"),
        }
    }
}

fn over_and_under(decl: &SafetyDeclaration) -> (bool, bool) {
    let types: Vec<&DeclaredDataType> = decl.collected_types().collect();
    let all_categories = SafetyCategory::ALL.iter().all(|c| decl.declares_collection(*c));
    let heavy = types.iter().filter(|t| t.purposes.len() >= OVER_REPORTING_PURPOSES).count();
    let over = all_categories || (!types.is_empty() && heavy * 2 > types.len());
    let under = decl.claims_no_collection || types.len() <= 1;
    (over, under)
}

/// Reporting verdicts that follow from the declaration alone.
pub fn declaration_verdict(decl: &SafetyDeclaration) -> BTreeSet<Verdict> {
    match over_and_under(decl) {
        (true, true) => BTreeSet::from([Verdict::InconsistentReporting]),
        (true, false) => BTreeSet::from([Verdict::OverReporting]),
        (false, true) => BTreeSet::from([Verdict::UnderReporting]),
        (false, false) => BTreeSet::new(),
    }
}

pub fn consistency_checks(decl: &SafetyDeclaration) -> Vec<ConsistencyFlag> {
    let mut flags: Vec<ConsistencyFlag> = decl
        .shared
        .iter()
        .filter(|(c, types)| !types.is_empty() && !decl.declares_collection(**c))
        .map(|(c, _)| ConsistencyFlag::SharedWithoutCollected(*c))
        .collect();
    if decl.claims_no_collection && decl.claims_no_sharing && decl.security.encrypted_in_transit {
        flags.push(ConsistencyFlag::SecurityClaimsWithoutData);
    }
    if decl.collected_types().next().is_some() && !decl.security.deletion_requestable {
        flags.push(ConsistencyFlag::NoDeletionWithData);
    }
    if over_and_under(decl) == (true, true) {
        flags.push(ConsistencyFlag::OverAndUnderReporting);
    }
    flags
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub statuses: Vec<CategoryStatus>,
    pub verdicts: BTreeSet<Verdict>,
    pub inconsistencies: Vec<String>,
    pub unmappable_note: Vec<String>,
}

impl ComparisonReport {
    pub fn status(&self, category: SafetyCategory) -> Status {
        self.statuses.iter().find(|s| s.category == category).map(|s| s.status).expect("all categories present")
    }

    pub fn count(&self, status: Status) -> usize {
        self.statuses.iter().filter(|s| s.status == status).count()
    }

    /// True when CI should fail the audit: collected-but-unreported data or
    /// a reporting verdict.
    pub fn has_discrepancies(&self) -> bool {
        self.count(Status::CollectedNotReported) > 0 || !self.verdicts.is_empty()
    }
}

pub fn compare(decl: &SafetyDeclaration, ev: &CollectionEvidence) -> ComparisonReport {
    let statuses = SafetyCategory::ALL
        .iter()
        .map(|&category| {
            let items = ev.per_category.get(&category).map(Vec::as_slice).unwrap_or(&[]);
            CategoryStatus {
                category,
                status: Status::from_facts(!items.is_empty(), decl.declares_collection(category)),
                examinable: category.is_examinable(),
                evidence_kinds: items.iter().map(EvidenceItem::kind).collect(),
                evidence_count: items.len(),
                min_rank: items.iter().filter_map(EvidenceItem::rank).min(),
            }
        })
        .collect();
    ComparisonReport {
        statuses,
        verdicts: declaration_verdict(decl),
        inconsistencies: consistency_checks(decl).iter().map(ToString::to_string).collect(),
        unmappable_note: ev.unmappable.iter().map(|i| format!("{i}: no data-safety category")).collect(),
    }
}
