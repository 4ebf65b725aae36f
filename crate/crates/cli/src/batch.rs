use std::fs;
use std::path::{Path, PathBuf};

use privaudit_core::safetycompare::compare;
use rayon::prelude::*;

use crate::report::{evidenced, BatchReport, BatchRow};
use crate::{analyze_path, emit_report, read_declaration, Config, Failure, EXIT_DISCREPANCY, EXIT_ERROR};

/// `<stem>.declaration` or `<stem>.declaration.json` next to the APK.
fn sibling_declaration(apk: &Path) -> Option<PathBuf> {
    let stem = apk.file_stem()?.to_str()?;
    let dir = apk.parent()?;
    [format!("{stem}.declaration"), format!("{stem}.declaration.json")]
        .into_iter()
        .map(|n| dir.join(n))
        .find(|p| p.is_file())
}

fn apks(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("apk")))
        .collect();
    out.sort();
    Ok(out)
}

fn audit(apk: &Path, config: &Config) -> BatchRow {
    let name = apk.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let declaration = sibling_declaration(apk);
    let decl = match declaration.as_deref().map(read_declaration).transpose() {
        Ok(d) => d,
        Err(e) => return BatchRow::failed(name, e),
    };
    let analysis = match analyze_path(apk, config) {
        Ok(a) => a,
        Err(e) => return BatchRow::failed(name, e),
    };
    let mut row = BatchRow::new(name);
    row.declaration = declaration.and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()));
    row.evidenced_categories = evidenced(&analysis);
    row.warnings = analysis.warnings.len();
    if let Some(d) = decl {
        row.fill_comparison(&compare(&d, &analysis.evidence));
    }
    row
}

pub fn run(dir: &Path, config: &Config) -> Result<u8, Failure> {
    if !dir.is_dir() {
        return Err(Failure::usage(format!("{}: not a directory", dir.display())));
    }
    let apks = apks(dir)?;
    if apks.is_empty() {
        return Err(Failure::usage(format!("{}: no .apk files", dir.display())));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(Failure::error)?;
    let rows: Vec<BatchRow> = pool.install(|| apks.par_iter().map(|p| audit(p, config)).collect());
    for r in &rows {
        if let Some(e) = &r.error {
            eprintln!("error: {}: {e}", r.app);
        }
    }
    let report = BatchReport { tool: config.tool(), generated_at: config.generated_at, apps: rows };
    emit_report(config, &report, || report.render_table())?;
    let apps = &report.apps;
    if apps.iter().any(|r| r.error.is_some()) || (config.fail_on_warnings && apps.iter().any(|r| r.warnings > 0)) {
        Ok(EXIT_ERROR)
    } else if apps.iter().any(BatchRow::has_discrepancies) {
        Ok(EXIT_DISCREPANCY)
    } else {
        Ok(0)
    }
}
