//! One-call analysis of a package: layouts, code and manifest.

use serde::Serialize;
use thiserror::Error;

use crate::apianalysis::{self, ApiSourceRecord, NoAnalyzableCode};
use crate::axml::{self, AxmlError};
use crate::container::AppPackage;
use crate::datasets::{AppContext, DatasetBundle};
use crate::manifestanalysis::{self, NotAManifest, PermissionEvidence};
use crate::safetycompare::{aggregate_evidence, CollectionEvidence};
use crate::uianalysis::{self, InputFieldRecord, LabeledField};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("AndroidManifest.xml: {0}")]
    Manifest(#[from] AxmlError),
    #[error("AndroidManifest.xml: {0}")]
    NotAManifest(#[from] NotAManifest),
    #[error(transparent)]
    NoAnalyzableCode(#[from] NoAnalyzableCode),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppAnalysis {
    pub ui_sources: Vec<LabeledField>,
    pub unlabeled_fields: Vec<InputFieldRecord>,
    pub api_sources: Vec<ApiSourceRecord>,
    pub permissions: Vec<PermissionEvidence>,
    pub evidence: CollectionEvidence,
    pub warnings: Vec<String>,
}

pub fn analyze_package(pkg: &AppPackage, bundle: &DatasetBundle, context: &AppContext) -> Result<AppAnalysis, AnalysisError> {
    let manifest = axml::parse_xml_auto(&pkg.manifest)?;
    let permissions = manifestanalysis::map_permissions(&manifestanalysis::extract_permissions(&manifest)?, bundle.permissions());
    let ui = uianalysis::analyze_layouts(pkg, bundle, context);
    let api = apianalysis::match_api_sources(pkg, bundle)?;
    let evidence = aggregate_evidence(&ui.fields, &api.records, &permissions, bundle.mapping());
    let mut warnings = ui.warnings;
    warnings.extend(api.warnings);
    Ok(AppAnalysis {
        ui_sources: ui.fields,
        unlabeled_fields: ui.unlabeled,
        api_sources: api.records,
        permissions,
        evidence,
        warnings,
    })
}
