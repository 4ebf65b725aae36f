//! Report shapes for JSON output and their plain-text renderings.

use std::fmt::Write as _;

use privaudit_core::datasets::ContextTrigger;
use privaudit_core::pipeline::AppAnalysis;
use privaudit_core::safetycompare::{ComparisonReport, EvidenceKind, Status};
use privaudit_core::taxonomy::{format_label, SafetyCategory};
use privaudit_core::uianalysis::InputFieldRecord;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
    pub datasets_version: String,
}

#[derive(Debug, Serialize)]
pub struct Label {
    pub rank: u8,
    pub category: String,
    pub identifier: String,
    pub text: String,
}

#[derive(Debug, Serialize)]
pub struct UiSource {
    pub layout: String,
    pub widget: String,
    pub field_id: Option<String>,
    pub input_type: Option<String>,
    pub hint: Option<String>,
    pub label_text: Option<String>,
    pub label: Label,
    pub decided_by: String,
    pub keyword: Option<String>,
    pub context_override: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct UnlabeledField {
    pub layout: String,
    pub widget: String,
    pub field_id: Option<String>,
    pub hint: Option<String>,
    pub label_text: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ApiSource {
    pub signature: String,
    pub method: String,
    pub dex: String,
    pub label: Label,
}

#[derive(Debug, Serialize)]
pub struct Permission {
    pub permission: String,
    pub implied_category: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Category {
    pub category: String,
    pub name: String,
    pub examinable: bool,
    pub evidence_kinds: Vec<String>,
    pub min_rank: Option<u8>,
    pub evidence: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub tool: Tool,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub ui_sources: Vec<UiSource>,
    pub unlabeled_fields: Vec<UnlabeledField>,
    pub api_sources: Vec<ApiSource>,
    pub permissions: Vec<Permission>,
    pub categories: Vec<Category>,
    pub unmappable: Vec<String>,
    pub warnings: Vec<String>,
}

fn kind_name(k: EvidenceKind) -> String {
    match k {
        EvidenceKind::Ui => "ui",
        EvidenceKind::Api => "api",
        EvidenceKind::Permission => "permission",
    }
    .to_string()
}

fn dex_name(index: usize) -> String {
    if index <= 1 {
        "classes.dex".to_string()
    } else {
        format!("classes{index}.dex")
    }
}

fn snake<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

fn unlabeled(r: &InputFieldRecord) -> UnlabeledField {
    UnlabeledField {
        layout: r.layout_path.clone(),
        widget: r.widget.clone(),
        field_id: r.field_id.clone(),
        hint: r.hint.clone(),
        label_text: r.label_text.clone(),
    }
}

impl AnalyzeReport {
    pub fn new(tool: Tool, source: String, generated_at: Option<u64>, a: &AppAnalysis) -> Self {
        let mut ui_sources: Vec<UiSource> = a
            .ui_sources
            .iter()
            .map(|f| UiSource {
                layout: f.record.layout_path.clone(),
                widget: f.record.widget.clone(),
                field_id: f.record.field_id.clone(),
                input_type: f.record.input_type.map(|t| format!("{t:#010x}")),
                hint: f.record.hint.clone(),
                label_text: f.record.label_text.clone(),
                label: Label {
                    rank: f.label.rank().value(),
                    category: f.label.category().to_string(),
                    identifier: f.identifier.to_string(),
                    text: format_label(f.label, &f.identifier),
                },
                decided_by: snake(&f.decided_by),
                keyword: f.keyword.clone(),
                context_override: f.overridden_by.as_ref().map(|t| match t {
                    ContextTrigger::Domain(d) => format!("domain:{d}"),
                    ContextTrigger::Token(w) => format!("token:{w}"),
                }),
            })
            .collect();
        ui_sources.sort_by(|x, y| (&x.layout, &x.field_id, &x.hint).cmp(&(&y.layout, &y.field_id, &y.hint)));
        let mut unlabeled_fields: Vec<UnlabeledField> = a.unlabeled_fields.iter().map(unlabeled).collect();
        unlabeled_fields.sort_by(|x, y| (&x.layout, &x.field_id, &x.hint).cmp(&(&y.layout, &y.field_id, &y.hint)));
        let api_sources = a
            .api_sources
            .iter()
            .map(|r| ApiSource {
                signature: r.signature.clone(),
                method: r.method.to_string(),
                dex: dex_name(r.dex_index),
                label: Label {
                    rank: r.label.rank().value(),
                    category: r.label.category().to_string(),
                    identifier: r.identifier.to_string(),
                    text: format_label(r.label, &r.identifier),
                },
            })
            .collect();
        let mut permissions: Vec<Permission> = a
            .permissions
            .iter()
            .map(|p| Permission {
                permission: p.permission.clone(),
                implied_category: p.implied_category.map(|c| c.to_string()),
            })
            .collect();
        permissions.sort_by(|x, y| x.permission.cmp(&y.permission));
        let categories = a
            .evidence
            .per_category
            .iter()
            .filter(|(_, items)| !items.is_empty())
            .map(|(c, items)| {
                let mut kinds: Vec<EvidenceKind> = items.iter().map(|i| i.kind()).collect();
                kinds.sort();
                kinds.dedup();
                let mut evidence: Vec<String> = items.iter().map(|i| i.to_string()).collect();
                evidence.sort();
                Category {
                    category: c.to_string(),
                    name: c.display_name().to_string(),
                    examinable: c.is_examinable(),
                    evidence_kinds: kinds.into_iter().map(kind_name).collect(),
                    min_rank: items.iter().filter_map(|i| i.rank()).min(),
                    evidence,
                }
            })
            .collect();
        let mut unmappable: Vec<String> = a.evidence.unmappable.iter().map(|i| i.to_string()).collect();
        unmappable.sort();
        AnalyzeReport {
            tool,
            source,
            generated_at,
            ui_sources,
            unlabeled_fields,
            api_sources,
            permissions,
            categories,
            unmappable,
            warnings: a.warnings.clone(),
        }
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "App: {}", self.source);
        let _ = writeln!(out, "Datasets: {}", self.tool.datasets_version);
        let _ = writeln!(out, "\nUI sources ({})", self.ui_sources.len());
        let rows: Vec<Vec<String>> = self
            .ui_sources
            .iter()
            .map(|u| {
                vec![
                    u.layout.clone(),
                    u.field_id.clone().or(u.hint.clone()).unwrap_or_else(|| u.widget.clone()),
                    u.label.text.clone(),
                    u.decided_by.clone(),
                ]
            })
            .collect();
        out.push_str(&table(&["LAYOUT", "FIELD", "LABEL", "DECIDED BY"], &rows));
        if !self.unlabeled_fields.is_empty() {
            let _ = writeln!(out, "\nUnlabeled fields ({})", self.unlabeled_fields.len());
            for u in &self.unlabeled_fields {
                let name = u.field_id.clone().or(u.hint.clone()).unwrap_or_else(|| u.widget.clone());
                let _ = writeln!(out, "  {}  {name}", u.layout);
            }
        }
        let _ = writeln!(out, "\nAPI sources ({})", self.api_sources.len());
        let rows: Vec<Vec<String>> =
            self.api_sources.iter().map(|a| vec![a.signature.clone(), a.label.text.clone(), a.dex.clone()]).collect();
        out.push_str(&table(&["SIGNATURE", "LABEL", "DEX"], &rows));
        let _ = writeln!(out, "\nPermissions ({})", self.permissions.len());
        let rows: Vec<Vec<String>> = self
            .permissions
            .iter()
            .map(|p| vec![p.permission.clone(), p.implied_category.clone().unwrap_or_else(|| "-".into())])
            .collect();
        out.push_str(&table(&["PERMISSION", "IMPLIES"], &rows));
        let _ = writeln!(out, "\nData safety categories with evidence ({})", self.categories.len());
        let rows: Vec<Vec<String>> = self
            .categories
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    c.evidence_kinds.join(", "),
                    c.evidence.len().to_string(),
                    c.min_rank.map_or_else(|| "-".into(), |r| r.to_string()),
                ]
            })
            .collect();
        out.push_str(&table(&["CATEGORY", "EVIDENCE", "ITEMS", "MIN RANK"], &rows));
        notes(&mut out, "Unmappable evidence", &collapse_permissions(&self.unmappable));
        notes(&mut out, "Warnings", &self.warnings);
        out
    }
}

fn notes(out: &mut String, title: &str, items: &[String]) {
    if items.is_empty() {
        return;
    }
    let _ = writeln!(out, "\n{title} ({})", items.len());
    for i in items {
        let _ = writeln!(out, "  {i}");
    }
}

/// Left-aligned columns padded to the widest cell.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::from(" ");
        for (i, c) in cells.iter().enumerate() {
            s.push(' ');
            s.push_str(c);
            if i + 1 < cells.len() {
                s.push_str(&" ".repeat(widths[i] - c.chars().count() + 1));
            }
        }
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct StatusRow {
    pub category: String,
    pub name: String,
    pub status: String,
    pub symbol: &'static str,
    pub examinable: bool,
    pub evidence_kinds: Vec<String>,
    pub evidence_count: usize,
    pub min_rank: Option<u8>,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub tool: Tool,
    pub source: String,
    pub declaration: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub categories: Vec<StatusRow>,
    pub verdicts: Vec<String>,
    pub inconsistencies: Vec<String>,
    pub unmappable: Vec<String>,
    pub warnings: Vec<String>,
    pub discrepancies: bool,
}

pub const LEGEND: &str = "★ collected, ○ reported, ⊛ collected and reported";

impl CompareReport {
    pub fn new(
        tool: Tool,
        source: String,
        declaration: String,
        generated_at: Option<u64>,
        report: &ComparisonReport,
        warnings: &[String],
    ) -> Self {
        CompareReport {
            tool,
            source,
            declaration,
            generated_at,
            categories: report
                .statuses
                .iter()
                .map(|s| StatusRow {
                    category: s.category.to_string(),
                    name: s.category.display_name().to_string(),
                    status: snake(&s.status),
                    symbol: s.status.symbol(),
                    examinable: s.examinable,
                    evidence_kinds: s.evidence_kinds.iter().copied().map(kind_name).collect(),
                    evidence_count: s.evidence_count,
                    min_rank: s.min_rank,
                })
                .collect(),
            verdicts: report.verdicts.iter().map(|v| v.to_string()).collect(),
            inconsistencies: report.inconsistencies.clone(),
            unmappable: report.unmappable_note.clone(),
            warnings: warnings.to_vec(),
            discrepancies: report.has_discrepancies(),
        }
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "App: {}", self.source);
        let _ = writeln!(out, "Declaration: {}", self.declaration);
        let _ = writeln!(out, "Legend: {LEGEND}\n");
        let rows: Vec<Vec<String>> = self
            .categories
            .iter()
            .filter(|c| c.examinable)
            .map(|c| {
                let evidence = if c.evidence_count == 0 {
                    String::new()
                } else {
                    let rank = c.min_rank.map(|r| format!(", min rank {r}")).unwrap_or_default();
                    let items = if c.evidence_count == 1 { "item" } else { "items" };
                    format!("{} ({} {items}{rank})", c.evidence_kinds.join(", "), c.evidence_count)
                };
                vec![c.name.clone(), c.symbol.to_string(), evidence]
            })
            .collect();
        out.push_str(&table(&["CATEGORY", "STATUS", "EVIDENCE"], &rows));
        let others: Vec<String> = self
            .categories
            .iter()
            .filter(|c| !c.examinable)
            .map(|c| if c.symbol.is_empty() { c.name.clone() } else { format!("{} {}", c.name, c.symbol) })
            .collect();
        let _ = writeln!(out, "\nNot statically examinable: {}", others.join(", "));
        let verdict = if self.verdicts.is_empty() { "none".to_string() } else { self.verdicts.join(", ") };
        let _ = writeln!(out, "Verdict: {verdict}");
        notes(&mut out, "Inconsistencies", &self.inconsistencies);
        notes(&mut out, "Unmappable evidence", &collapse_permissions(&self.unmappable));
        notes(&mut out, "Warnings", &self.warnings);
        out
    }
}

/// Folds the long tail of uncategorized permissions into one line.
fn collapse_permissions(items: &[String]) -> Vec<String> {
    let (perms, mut rest): (Vec<&String>, Vec<&String>) = items.iter().partition(|i| i.starts_with("permission "));
    let summary = format!("{} permissions with no data-safety category", perms.len());
    if perms.len() > 3 {
        rest.push(&summary);
        rest.into_iter().cloned().collect()
    } else {
        items.to_vec()
    }
}

#[derive(Debug, Serialize)]
pub struct BatchRow {
    pub app: String,
    pub declaration: Option<String>,
    pub evidenced_categories: Vec<String>,
    pub collected_not_reported: Option<usize>,
    pub reported_not_collected: Option<usize>,
    pub collected_and_reported: Option<usize>,
    pub verdicts: Vec<String>,
    pub warnings: usize,
    pub error: Option<String>,
}

impl BatchRow {
    pub fn new(app: String) -> Self {
        BatchRow {
            app,
            declaration: None,
            evidenced_categories: Vec::new(),
            collected_not_reported: None,
            reported_not_collected: None,
            collected_and_reported: None,
            verdicts: Vec::new(),
            warnings: 0,
            error: None,
        }
    }

    pub fn failed(app: String, error: String) -> Self {
        BatchRow { error: Some(error), ..BatchRow::new(app) }
    }

    pub fn fill_comparison(&mut self, report: &ComparisonReport) {
        self.collected_not_reported = Some(report.count(Status::CollectedNotReported));
        self.reported_not_collected = Some(report.count(Status::ReportedNotCollected));
        self.collected_and_reported = Some(report.count(Status::CollectedAndReported));
        self.verdicts = report.verdicts.iter().map(|v| v.to_string()).collect();
    }

    pub fn has_discrepancies(&self) -> bool {
        self.collected_not_reported.is_some_and(|n| n > 0) || !self.verdicts.is_empty()
    }
}

#[derive(Debug, Serialize)]
pub struct BatchReport {
    pub tool: Tool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub apps: Vec<BatchRow>,
}

impl BatchReport {
    pub fn render_table(&self) -> String {
        let mut out = format!("Legend: {LEGEND}\n\n");
        let count = |n: Option<usize>| n.map_or_else(|| "-".to_string(), |n| n.to_string());
        let rows: Vec<Vec<String>> = self
            .apps
            .iter()
            .map(|r| match &r.error {
                Some(e) => vec![r.app.clone(), "error".into(), String::new(), String::new(), String::new(), e.clone()],
                None => vec![
                    r.app.clone(),
                    r.evidenced_categories.len().to_string(),
                    count(r.collected_not_reported),
                    count(r.reported_not_collected),
                    count(r.collected_and_reported),
                    if r.declaration.is_none() {
                        "no declaration".into()
                    } else if r.verdicts.is_empty() {
                        "-".into()
                    } else {
                        r.verdicts.join(", ")
                    },
                ],
            })
            .collect();
        out.push_str(&table(&["APP", "CATEGORIES", "★", "○", "⊛", "VERDICTS"], &rows));
        out
    }
}

/// Categories with any evidence, in taxonomy order.
pub fn evidenced(a: &AppAnalysis) -> Vec<String> {
    SafetyCategory::ALL.iter().filter(|c| a.evidence.has(**c)).map(|c| c.to_string()).collect()
}
