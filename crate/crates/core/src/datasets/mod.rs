//! Identifier keywords, identifier API signatures, permission rules and the
//! label → data-safety mapping, loaded from a directory of `.psv` files.
//!
//! | file              | columns                                                      |
//! |-------------------|--------------------------------------------------------------|
//! | `keywords.psv`    | keyword, rank, category, identifier, priority, context_overrides |
//! | `apis.psv`        | signature, rank, category, identifier                        |
//! | `permissions.psv` | permission, safety_category                                  |
//! | `mapping.psv`     | rank, category, identifier_glob, safety_category_or_none     |
//! | `VERSION`         | a single version string                                      |
//!
//! An optional `stoplist.txt` (one token per line) replaces the default
//! widget-prefix stop-list used when tokenizing field metadata.
//!
//! Context overrides are `;`-separated `trigger=rank:category:identifier`
//! items, where the trigger is `domain:<app domain>` or `token:<word>`.

mod mapping;
mod psv;
mod tokenize;

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::dexscan::{signature_to_ref, MethodRef};
use crate::taxonomy::{
    AppDomain, DataCategory, IdentifierTag, PrivacyLabel, RiskRank, SafetyCategory,
};

pub use mapping::{glob_match, CategoryMapping, MappingRow};
pub use tokenize::{normalize_keyword, split_words, Tokenizer, DEFAULT_STOP_LIST};

const KEYWORDS_FILE: &str = "keywords.psv";
const APIS_FILE: &str = "apis.psv";
const PERMISSIONS_FILE: &str = "permissions.psv";
const VERSION_FILE: &str = "VERSION";
const STOPLIST_FILE: &str = "stoplist.txt";

const KEYWORD_COLUMNS: [&str; 6] = ["keyword", "rank", "category", "identifier", "priority", "context_overrides"];
const API_COLUMNS: [&str; 4] = ["signature", "rank", "category", "identifier"];
const PERMISSION_COLUMNS: [&str; 2] = ["permission", "safety_category"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing dataset file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {reason}")]
    MalformedRow { file: String, line: usize, reason: String },
    #[error("keywords.psv:{line}: duplicate keyword `{keyword}` (first defined on line {first_line})")]
    DuplicateKeyword { keyword: String, first_line: usize, line: usize },
    #[error("apis.psv:{line}: duplicate signature `{signature}` (first defined on line {first_line})")]
    DuplicateSignature { signature: String, first_line: usize, line: usize },
    #[error("permissions.psv:{line}: duplicate permission `{permission}` (first defined on line {first_line})")]
    DuplicatePermission { permission: String, first_line: usize, line: usize },
    #[error("mapping.psv:{line}: duplicate row for rank {rank} {category} glob `{glob}` (first defined on line {first_line})")]
    DuplicateMappingRow {
        rank: u8,
        category: DataCategory,
        glob: String,
        first_line: usize,
        line: usize,
    },
    #[error("mapping.psv: no catch-all `*` row for {}", fmt_pairs(.missing))]
    IncompleteMapping { missing: Vec<(u8, DataCategory)> },
}

fn fmt_pairs(pairs: &[(u8, DataCategory)]) -> String {
    pairs
        .iter()
        .map(|(r, c)| format!("({r}, {c})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// What a context override reacts to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextTrigger {
    Domain(AppDomain),
    Token(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextOverride {
    pub trigger: ContextTrigger,
    pub label: PrivacyLabel,
    pub identifier: IdentifierTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeywordEntry {
    /// Lowercase words joined by single spaces; one or two words.
    pub keyword: String,
    pub label: PrivacyLabel,
    pub identifier: IdentifierTag,
    pub priority: u32,
    pub overrides: Vec<ContextOverride>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiEntry {
    /// Signature as written in the dataset, `Class: ret name(params)`.
    pub signature: String,
    #[serde(skip)]
    pub method: MethodRef,
    pub label: PrivacyLabel,
    pub identifier: IdentifierTag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermissionRule {
    pub permission: String,
    pub implied_category: SafetyCategory,
}

/// App-level and field-level context for keyword matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AppContext {
    pub domain: AppDomain,
    /// Other words seen on the same field; feeds `token:` overrides.
    pub cooccurring: BTreeSet<String>,
}

impl AppContext {
    pub fn for_domain(domain: AppDomain) -> Self {
        AppContext { domain, cooccurring: BTreeSet::new() }
    }

    pub fn with_tokens<I: IntoIterator<Item = String>>(&self, tokens: I) -> Self {
        let mut ctx = self.clone();
        ctx.cooccurring.extend(tokens);
        ctx
    }
}

/// A keyword hit with any context override already applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeywordMatch {
    pub keyword: String,
    pub label: PrivacyLabel,
    pub identifier: IdentifierTag,
    pub priority: u32,
    pub matched_token: String,
    pub overridden_by: Option<ContextTrigger>,
}

impl KeywordMatch {
    /// Tie-break order: priority desc, rank asc, keyword length desc, keyword.
    pub fn precedence(&self, other: &Self) -> Ordering {
        (Reverse(self.priority), self.label.rank(), Reverse(self.keyword.chars().count()), &self.keyword).cmp(&(
            Reverse(other.priority),
            other.label.rank(),
            Reverse(other.keyword.chars().count()),
            &other.keyword,
        ))
    }
}

impl KeywordEntry {
    /// Applies the first override whose trigger fires, in declaration order.
    pub fn resolve(&self, tokens: &[String], context: &AppContext) -> (PrivacyLabel, IdentifierTag, Option<ContextTrigger>) {
        for o in &self.overrides {
            let fires = match &o.trigger {
                ContextTrigger::Domain(d) => *d != AppDomain::Unknown && *d == context.domain,
                ContextTrigger::Token(t) => tokens.contains(t) || context.cooccurring.contains(t),
            };
            if fires {
                return (o.label, o.identifier.clone(), Some(o.trigger.clone()));
            }
        }
        (self.label, self.identifier.clone(), None)
    }
}

/// Immutable, validated set of datasets.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    version: String,
    keywords: Vec<KeywordEntry>,
    apis: Vec<ApiEntry>,
    permissions: Vec<PermissionRule>,
    mapping: CategoryMapping,
    tokenizer: Tokenizer,
    keyword_index: HashMap<String, usize>,
    api_index: HashMap<MethodRef, usize>,
    permission_index: HashMap<String, usize>,
}

impl PartialEq for DatasetBundle {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version
            && self.keywords == other.keywords
            && self.apis == other.apis
            && self.permissions == other.permissions
            && self.mapping == other.mapping
            && self.tokenizer == other.tokenizer
    }
}

/// Raw file contents of a bundle directory.
#[derive(Debug, Clone, Default)]
pub struct BundleSources {
    pub keywords: String,
    pub apis: String,
    pub permissions: String,
    pub mapping: String,
    pub version: String,
    pub stoplist: Option<String>,
}

/// Row counts and every problem found while validating a bundle.
#[derive(Debug, Default)]
pub struct ValidationReport {
    pub keywords: usize,
    pub apis: usize,
    pub permissions: usize,
    pub mapping: usize,
    pub errors: Vec<DatasetError>,
}

impl BundleSources {
    pub fn read_dir(root: &Path) -> Result<Self, DatasetError> {
        let read = |name: &str| -> Result<String, DatasetError> {
            let path = root.join(name);
            if !path.is_file() {
                return Err(DatasetError::MissingFile(path));
            }
            fs::read_to_string(&path).map_err(|source| DatasetError::Io { path, source })
        };
        let stoplist_path = root.join(STOPLIST_FILE);
        let stoplist = if stoplist_path.is_file() {
            Some(fs::read_to_string(&stoplist_path).map_err(|source| DatasetError::Io { path: stoplist_path, source })?)
        } else {
            None
        };
        Ok(BundleSources {
            keywords: read(KEYWORDS_FILE)?,
            apis: read(APIS_FILE)?,
            permissions: read(PERMISSIONS_FILE)?,
            mapping: read(mapping::FILE)?,
            version: read(VERSION_FILE)?,
            stoplist,
        })
    }

    /// Parses every file, collecting all problems rather than stopping at the first.
    pub fn validate(&self) -> (Option<DatasetBundle>, ValidationReport) {
        let mut errors = Vec::new();
        let keywords = parse_keywords(&self.keywords, &mut errors);
        let apis = parse_apis(&self.apis, &mut errors);
        let permissions = parse_permissions(&self.permissions, &mut errors);
        let mapping = CategoryMapping::parse(&self.mapping, &mut errors);
        let version = self.version.trim().to_string();
        if version.is_empty() || version.contains('\n') {
            errors.push(DatasetError::MalformedRow {
                file: VERSION_FILE.to_string(),
                line: 1,
                reason: "version must be a single non-empty line".to_string(),
            });
        }
        let tokenizer = match &self.stoplist {
            Some(text) => Tokenizer::with_stop_list(
                text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')),
            ),
            None => Tokenizer::default(),
        };
        let report = ValidationReport {
            keywords: keywords.len(),
            apis: apis.len(),
            permissions: permissions.len(),
            mapping: mapping.len(),
            errors,
        };
        if !report.errors.is_empty() {
            return (None, report);
        }
        let bundle = DatasetBundle::assemble(version, keywords, apis, permissions, mapping, tokenizer);
        (Some(bundle), report)
    }
}

/// Loads and validates the bundle in `root`; returns the first problem found.
pub fn load_bundle(root: &Path) -> Result<DatasetBundle, DatasetError> {
    DatasetBundle::from_sources(&BundleSources::read_dir(root)?)
}

/// Validates the bundle in `root`, reporting every problem.
pub fn validate_dir(root: &Path) -> ValidationReport {
    match BundleSources::read_dir(root) {
        Ok(sources) => sources.validate().1,
        Err(e) => ValidationReport { errors: vec![e], ..Default::default() },
    }
}

impl DatasetBundle {
    pub fn from_sources(sources: &BundleSources) -> Result<Self, DatasetError> {
        let (bundle, report) = sources.validate();
        match bundle {
            Some(b) => Ok(b),
            None => Err(report.errors.into_iter().next().expect("failed validation has errors")),
        }
    }

    /// The bundled seed datasets.
    pub fn seed() -> Self {
        Self::from_sources(&seed_sources()).expect("seed datasets are valid")
    }

    fn assemble(
        version: String,
        mut keywords: Vec<KeywordEntry>,
        mut apis: Vec<ApiEntry>,
        mut permissions: Vec<PermissionRule>,
        mapping: CategoryMapping,
        tokenizer: Tokenizer,
    ) -> Self {
        keywords.sort_by(|a, b| a.keyword.cmp(&b.keyword));
        apis.sort_by(|a, b| a.signature.cmp(&b.signature));
        permissions.sort_by(|a, b| a.permission.cmp(&b.permission));
        let keyword_index = keywords.iter().enumerate().map(|(i, e)| (e.keyword.clone(), i)).collect();
        let api_index = apis.iter().enumerate().map(|(i, e)| (e.method.clone(), i)).collect();
        let permission_index = permissions.iter().enumerate().map(|(i, e)| (e.permission.clone(), i)).collect();
        DatasetBundle {
            version,
            keywords,
            apis,
            permissions,
            mapping,
            tokenizer,
            keyword_index,
            api_index,
            permission_index,
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn keywords(&self) -> &[KeywordEntry] {
        &self.keywords
    }

    pub fn apis(&self) -> &[ApiEntry] {
        &self.apis
    }

    pub fn permissions(&self) -> &[PermissionRule] {
        &self.permissions
    }

    pub fn mapping(&self) -> &CategoryMapping {
        &self.mapping
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn keyword(&self, keyword: &str) -> Option<&KeywordEntry> {
        self.keyword_index.get(&normalize_keyword(keyword)).map(|&i| &self.keywords[i])
    }

    pub fn permission_rule(&self, permission: &str) -> Option<&PermissionRule> {
        self.permission_index.get(permission).map(|&i| &self.permissions[i])
    }

    /// All entries whose keyword equals a token or a contiguous token bigram,
    /// with context overrides applied, best match first.
    pub fn match_keyword(&self, tokens: &[String], context: &AppContext) -> Vec<KeywordMatch> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let unigrams = tokens.iter().cloned();
        let bigrams = tokens.windows(2).map(|w| format!("{} {}", w[0], w[1]));
        for candidate in unigrams.chain(bigrams) {
            let Some(&idx) = self.keyword_index.get(&candidate) else { continue };
            if !seen.insert(idx) {
                continue;
            }
            let entry = &self.keywords[idx];
            let (label, identifier, overridden_by) = entry.resolve(tokens, context);
            out.push(KeywordMatch {
                keyword: entry.keyword.clone(),
                label,
                identifier,
                priority: entry.priority,
                matched_token: candidate,
                overridden_by,
            });
        }
        out.sort_by(KeywordMatch::precedence);
        out
    }

    /// Exact lookup of a referenced method.
    pub fn lookup_api(&self, method: &MethodRef) -> Option<&ApiEntry> {
        self.api_index.get(method).map(|&i| &self.apis[i])
    }

    /// Serializes the bundle back into its directory form.
    pub fn to_sources(&self) -> BundleSources {
        let keywords = psv::write(
            &KEYWORD_COLUMNS,
            self.keywords.iter().map(|e| {
                vec![
                    e.keyword.clone(),
                    e.label.rank().to_string(),
                    e.label.category().machine_name().to_string(),
                    e.identifier.to_string(),
                    e.priority.to_string(),
                    format_overrides(&e.overrides),
                ]
            }),
        );
        let apis = psv::write(
            &API_COLUMNS,
            self.apis.iter().map(|e| {
                vec![
                    e.signature.clone(),
                    e.label.rank().to_string(),
                    e.label.category().machine_name().to_string(),
                    e.identifier.to_string(),
                ]
            }),
        );
        let permissions = psv::write(
            &PERMISSION_COLUMNS,
            self.permissions
                .iter()
                .map(|p| vec![p.permission.clone(), p.implied_category.machine_name().to_string()]),
        );
        let stoplist = (self.tokenizer != Tokenizer::default())
            .then(|| self.tokenizer.stop_list().map(|s| format!("{s}\n")).collect());
        BundleSources {
            keywords,
            apis,
            permissions,
            mapping: self.mapping.serialize(),
            version: format!("{}\n", self.version),
            stoplist,
        }
    }

    pub fn write_dir(&self, root: &Path) -> std::io::Result<()> {
        let s = self.to_sources();
        fs::create_dir_all(root)?;
        fs::write(root.join(KEYWORDS_FILE), s.keywords)?;
        fs::write(root.join(APIS_FILE), s.apis)?;
        fs::write(root.join(PERMISSIONS_FILE), s.permissions)?;
        fs::write(root.join(mapping::FILE), s.mapping)?;
        fs::write(root.join(VERSION_FILE), s.version)?;
        if let Some(stop) = s.stoplist {
            fs::write(root.join(STOPLIST_FILE), stop)?;
        }
        Ok(())
    }
}

pub fn seed_sources() -> BundleSources {
    BundleSources {
        keywords: include_str!("../../datasets/seed/keywords.psv").to_string(),
        apis: include_str!("../../datasets/seed/apis.psv").to_string(),
        permissions: include_str!("../../datasets/seed/permissions.psv").to_string(),
        mapping: include_str!("../../datasets/seed/mapping.psv").to_string(),
        version: include_str!("../../datasets/seed/VERSION").to_string(),
        stoplist: None,
    }
}

pub(crate) fn parse_label_columns(rank: &str, category: &str) -> Result<PrivacyLabel, String> {
    let rank: u8 = rank.parse().map_err(|_| format!("rank `{rank}` is not an integer"))?;
    let rank = RiskRank::new(rank).ok_or_else(|| format!("rank {rank} outside 1..=4"))?;
    let category: DataCategory = category.parse().map_err(|e: crate::taxonomy::UnknownName| e.to_string())?;
    PrivacyLabel::new(rank, category).map_err(|e| e.to_string())
}

fn parse_overrides(text: &str) -> Result<Vec<ContextOverride>, String> {
    let mut out: Vec<ContextOverride> = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (trigger, target) = item
            .split_once('=')
            .ok_or_else(|| format!("override `{item}` lacks `=`"))?;
        let trigger = match trigger.trim().split_once(':') {
            Some(("domain", d)) => ContextTrigger::Domain(d.parse().map_err(|e: crate::taxonomy::UnknownName| e.to_string())?),
            Some(("token", t)) => {
                let t = normalize_keyword(t);
                if t.is_empty() || t.contains(' ') {
                    return Err(format!("override token `{item}` must be a single word"));
                }
                ContextTrigger::Token(t)
            }
            _ => return Err(format!("override trigger in `{item}` must be domain:<tag> or token:<word>")),
        };
        let mut parts = target.splitn(3, ':');
        let (Some(rank), Some(category), Some(identifier)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("override target in `{item}` must be rank:category:identifier"));
        };
        let label = parse_label_columns(rank.trim(), category.trim())?;
        let identifier = IdentifierTag::new(identifier).map_err(|e| e.to_string())?;
        if out.iter().any(|o| o.trigger == trigger) {
            return Err(format!("duplicate override trigger in `{item}`"));
        }
        out.push(ContextOverride { trigger, label, identifier });
    }
    Ok(out)
}

fn format_overrides(overrides: &[ContextOverride]) -> String {
    overrides
        .iter()
        .map(|o| {
            let trigger = match &o.trigger {
                ContextTrigger::Domain(d) => format!("domain:{d}"),
                ContextTrigger::Token(t) => format!("token:{t}"),
            };
            format!("{trigger}={}:{}:{}", o.label.rank(), o.label.category(), o.identifier)
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_keywords(text: &str, errors: &mut Vec<DatasetError>) -> Vec<KeywordEntry> {
    let mut out = Vec::new();
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    for row in psv::rows(KEYWORDS_FILE, text, &KEYWORD_COLUMNS, errors) {
        let f = &row.fields;
        let parsed = (|| -> Result<KeywordEntry, String> {
            let keyword = normalize_keyword(f[0]);
            if keyword.is_empty() {
                return Err("keyword is empty after normalization".to_string());
            }
            if keyword.split(' ').count() > 2 {
                return Err(format!("keyword `{keyword}` has more than two words"));
            }
            let label = parse_label_columns(f[1], f[2])?;
            let identifier = IdentifierTag::new(f[3]).map_err(|e| e.to_string())?;
            let priority = f[4].parse::<u32>().map_err(|_| format!("priority `{}` is not a non-negative integer", f[4]))?;
            let overrides = parse_overrides(f[5])?;
            Ok(KeywordEntry { keyword, label, identifier, priority, overrides })
        })();
        match parsed {
            Ok(entry) => {
                if let Some(&first_line) = first_seen.get(&entry.keyword) {
                    errors.push(DatasetError::DuplicateKeyword { keyword: entry.keyword, first_line, line: row.line });
                } else {
                    first_seen.insert(entry.keyword.clone(), row.line);
                    out.push(entry);
                }
            }
            Err(reason) => errors.push(DatasetError::MalformedRow { file: KEYWORDS_FILE.to_string(), line: row.line, reason }),
        }
    }
    out
}

fn parse_apis(text: &str, errors: &mut Vec<DatasetError>) -> Vec<ApiEntry> {
    let mut out = Vec::new();
    let mut first_seen: HashMap<MethodRef, usize> = HashMap::new();
    for row in psv::rows(APIS_FILE, text, &API_COLUMNS, errors) {
        let f = &row.fields;
        let parsed = (|| -> Result<ApiEntry, String> {
            let method = signature_to_ref(f[0]).map_err(|e| e.to_string())?;
            let label = parse_label_columns(f[1], f[2])?;
            let identifier = IdentifierTag::new(f[3]).map_err(|e| e.to_string())?;
            Ok(ApiEntry { signature: f[0].split_whitespace().collect::<Vec<_>>().join(" "), method, label, identifier })
        })();
        match parsed {
            Ok(entry) => {
                if let Some(&first_line) = first_seen.get(&entry.method) {
                    errors.push(DatasetError::DuplicateSignature { signature: entry.signature, first_line, line: row.line });
                } else {
                    first_seen.insert(entry.method.clone(), row.line);
                    out.push(entry);
                }
            }
            Err(reason) => errors.push(DatasetError::MalformedRow { file: APIS_FILE.to_string(), line: row.line, reason }),
        }
    }
    out
}

/// Dotted Java-style name with at least two segments, e.g. `android.permission.CAMERA`.
pub fn is_permission_name(name: &str) -> bool {
    let segments: Vec<&str> = name.split('.').collect();
    segments.len() >= 2
        && segments.iter().all(|s| {
            let mut chars = s.chars();
            chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

fn parse_permissions(text: &str, errors: &mut Vec<DatasetError>) -> Vec<PermissionRule> {
    let mut out = Vec::new();
    let mut first_seen: HashMap<String, usize> = HashMap::new();
    for row in psv::rows(PERMISSIONS_FILE, text, &PERMISSION_COLUMNS, errors) {
        let f = &row.fields;
        let parsed = (|| -> Result<PermissionRule, String> {
            if !is_permission_name(f[0]) {
                return Err(format!("`{}` is not a dotted permission name", f[0]));
            }
            let implied_category = f[1].parse::<SafetyCategory>().map_err(|e| e.to_string())?;
            Ok(PermissionRule { permission: f[0].to_string(), implied_category })
        })();
        match parsed {
            Ok(rule) => {
                if let Some(&first_line) = first_seen.get(&rule.permission) {
                    errors.push(DatasetError::DuplicatePermission { permission: rule.permission, first_line, line: row.line });
                } else {
                    first_seen.insert(rule.permission.clone(), row.line);
                    out.push(rule);
                }
            }
            Err(reason) => errors.push(DatasetError::MalformedRow { file: PERMISSIONS_FILE.to_string(), line: row.line, reason }),
        }
    }
    out
}
