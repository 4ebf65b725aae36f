//! `privaudit`: static privacy audit of Android packages.

mod batch;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use privaudit_core::container::open_package;
use privaudit_core::datasets::{load_bundle, seed_sources, validate_dir, AppContext, DatasetBundle, ValidationReport};
use privaudit_core::pipeline::{analyze_package, AppAnalysis};
use privaudit_core::safetycompare::{compare, SafetyDeclaration};
use privaudit_core::taxonomy::AppDomain;
use serde::Serialize;

use report::{AnalyzeReport, CompareReport, Tool};

const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DISCREPANCY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "privaudit", version, about = "Audit Android apps for privacy-relevant data collection")]
struct Cli {
    /// Dataset directory; the bundled seed datasets are used when absent.
    #[arg(long, global = true, env = "PRIVAUDIT_DATASETS", value_name = "DIR")]
    datasets: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// App domain for keyword context overrides (messaging, finance, news, games,
    /// education, ecommerce, health, unknown).
    #[arg(long, global = true, default_value = "unknown", value_parser = parse_domain)]
    domain: AppDomain,

    /// Exit 1 when the analysis produced warnings.
    #[arg(long, global = true)]
    fail_on_warnings: bool,

    /// Add a generation time to JSON reports.
    #[arg(long, global = true)]
    timestamps: bool,

    /// Parallel workers for batch mode.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract labeled data sources from an APK or decoded directory.
    Analyze { path: PathBuf },
    /// Compare an app against its data safety declaration.
    Compare {
        path: PathBuf,
        #[arg(long, value_name = "FILE")]
        declaration: PathBuf,
    },
    /// Dataset maintenance.
    Datasets {
        #[command(subcommand)]
        command: DatasetsCommand,
    },
    /// Analyze every .apk in a directory, with optional sibling declarations.
    Batch { dir: PathBuf },
}

#[derive(Debug, Subcommand)]
enum DatasetsCommand {
    /// Check a dataset directory and print row counts.
    Validate { dir: Option<PathBuf> },
}

fn parse_domain(s: &str) -> Result<AppDomain, String> {
    s.parse::<AppDomain>().map_err(|e| e.to_string())
}

/// A failed command: message for stderr plus exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn error(message: impl ToString) -> Self {
        Failure { code: EXIT_ERROR, message: message.to_string() }
    }
}

pub(crate) struct Config {
    pub bundle: DatasetBundle,
    pub context: AppContext,
    pub format: Format,
    pub fail_on_warnings: bool,
    pub generated_at: Option<u64>,
    pub workers: Option<usize>,
}

impl Config {
    pub fn tool(&self) -> Tool {
        Tool {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            datasets_version: self.bundle.version().to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("privaudit: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Command::Datasets { command: DatasetsCommand::Validate { dir } } = &cli.command {
        return validate(dir.as_deref().or(cli.datasets.as_deref()));
    }
    let bundle = match &cli.datasets {
        Some(dir) if !dir.is_dir() => return Err(Failure::usage(format!("dataset directory {} not found", dir.display()))),
        Some(dir) => load_bundle(dir).map_err(|e| Failure::error(format!("{}: {e}", dir.display())))?,
        None => DatasetBundle::seed(),
    };
    let generated_at =
        cli.timestamps.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()));
    let config = Config {
        bundle,
        context: AppContext::for_domain(cli.domain),
        format: cli.format,
        fail_on_warnings: cli.fail_on_warnings,
        generated_at,
        workers: cli.workers,
    };
    match cli.command {
        Command::Analyze { path } => analyze(&path, &config),
        Command::Compare { path, declaration } => compare_cmd(&path, &declaration, &config),
        Command::Batch { dir } => batch::run(&dir, &config),
        Command::Datasets { .. } => unreachable!("handled above"),
    }
}

fn require(path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::usage(format!("{}: no such file or directory", path.display())))
    }
}

pub(crate) fn analyze_path(path: &Path, config: &Config) -> Result<AppAnalysis, String> {
    let pkg = open_package(path).map_err(|e| e.to_string())?;
    analyze_package(&pkg, &config.bundle, &config.context).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(Failure::error)
}

pub(crate) fn emit_report<T: Serialize>(config: &Config, report: &T, table: impl FnOnce() -> String) -> Result<(), Failure> {
    match config.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(report).map_err(Failure::error)?;
            text.push('\n');
            emit(&text)
        }
        Format::Table => emit(&table()),
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn warnings_exit(config: &Config, warnings: &[String]) -> u8 {
    if config.fail_on_warnings && !warnings.is_empty() {
        EXIT_ERROR
    } else {
        0
    }
}

fn analyze(path: &Path, config: &Config) -> Result<u8, Failure> {
    require(path)?;
    let analysis = analyze_path(path, config).map_err(Failure::error)?;
    warn_all(&analysis.warnings);
    let report = AnalyzeReport::new(config.tool(), path.display().to_string(), config.generated_at, &analysis);
    emit_report(config, &report, || report.render_table())?;
    Ok(warnings_exit(config, &analysis.warnings))
}

pub(crate) fn read_declaration(path: &Path) -> Result<SafetyDeclaration, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SafetyDeclaration::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn compare_cmd(path: &Path, declaration: &Path, config: &Config) -> Result<u8, Failure> {
    require(path)?;
    require(declaration)?;
    let decl = read_declaration(declaration).map_err(Failure::error)?;
    let analysis = analyze_path(path, config).map_err(Failure::error)?;
    warn_all(&analysis.warnings);
    let result = compare(&decl, &analysis.evidence);
    let report = CompareReport::new(
        config.tool(),
        path.display().to_string(),
        declaration.display().to_string(),
        config.generated_at,
        &result,
        &analysis.warnings,
    );
    emit_report(config, &report, || report.render_table())?;
    match warnings_exit(config, &analysis.warnings) {
        0 if result.has_discrepancies() => Ok(EXIT_DISCREPANCY),
        code => Ok(code),
    }
}

fn validate(dir: Option<&Path>) -> Result<u8, Failure> {
    let (name, report) = match dir {
        Some(d) if !d.is_dir() => return Err(Failure::usage(format!("dataset directory {} not found", d.display()))),
        Some(d) => (d.display().to_string(), validate_dir(d)),
        None => ("bundled seed".to_string(), seed_sources().validate().1),
    };
    emit(&render_validation(&name, &report))?;
    if report.errors.is_empty() {
        Ok(0)
    } else {
        Ok(EXIT_ERROR)
    }
}

fn render_validation(name: &str, r: &ValidationReport) -> String {
    let mut out = format!("Datasets: {name}\n");
    for (file, n) in [("keywords.psv", r.keywords), ("apis.psv", r.apis), ("permissions.psv", r.permissions), ("mapping.psv", r.mapping)] {
        out.push_str(&format!("  {file:<16} {n:>5} rows\n"));
    }
    if r.errors.is_empty() {
        out.push_str("OK\n");
    } else {
        out.push_str(&format!("{} error(s)\n", r.errors.len()));
        for e in &r.errors {
            out.push_str(&format!("  {e}\n"));
        }
    }
    out
}
