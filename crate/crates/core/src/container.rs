//! APK (ZIP) and decoded-directory input.

use std::fs::{self, File};
use std::io::{self, Read};
use std::path::{Component, Path, PathBuf};

use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;
use zip::result::ZipError;
use zip::ZipArchive;

use crate::axml::{self, AxmlError, ResourceTable};

pub const MANIFEST: &str = "AndroidManifest.xml";
pub const RESOURCE_TABLE: &str = "resources.arsc";

/// Upper bound on a single decompressed entry.
const MAX_ENTRY_BYTES: u64 = 512 << 20;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("{}: not an APK ({reason})", path.display())]
    NotAnApk { path: PathBuf, reason: String },
    #[error("{}: no AndroidManifest.xml", .0.display())]
    MissingManifest(PathBuf),
    #[error("corrupt or unsafe entry `{0}`")]
    CorruptZipEntry(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    BinaryApk,
    DecodedDir,
}

/// Role of a package entry, decided from its path alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Manifest,
    Layout,
    /// Default-configuration `res/values/*.xml` (decoded directories).
    Values,
    ResourceTable,
    /// `classes.dex` is 1, `classesN.dex` is N.
    Dex(u32),
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageFile {
    /// `/`-separated path relative to the package root.
    pub path: String,
    pub bytes: Vec<u8>,
}

/// Immutable snapshot of the entries the analyses need. XML payloads are
/// compiled XML for APKs and plain text for decoded directories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppPackage {
    pub source: PathBuf,
    pub source_kind: SourceKind,
    pub manifest: Vec<u8>,
    pub layouts: Vec<PackageFile>,
    pub values: Vec<PackageFile>,
    pub resource_table: Option<Vec<u8>>,
    /// DEX payloads in `classes.dex`, `classes2.dex`, … order.
    pub dex_files: Vec<PackageFile>,
}

pub fn classify(path: &str) -> EntryKind {
    if path == MANIFEST {
        return EntryKind::Manifest;
    }
    if path == RESOURCE_TABLE {
        return EntryKind::ResourceTable;
    }
    if let Some(n) = dex_number(path) {
        return EntryKind::Dex(n);
    }
    let segments: Vec<&str> = path.split('/').collect();
    if segments.len() >= 3 && segments[0] == "res" && path.ends_with(".xml") {
        let dirs = &segments[1..segments.len() - 1];
        if dirs.iter().any(|d| d.starts_with("layout")) {
            return EntryKind::Layout;
        }
        if dirs == ["values"] {
            return EntryKind::Values;
        }
    }
    EntryKind::Other
}

fn dex_number(path: &str) -> Option<u32> {
    let digits = path.strip_prefix("classes")?.strip_suffix(".dex")?;
    if digits.is_empty() {
        return Some(1);
    }
    if digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn is_unsafe_name(name: &str) -> bool {
    name.starts_with('/')
        || name.starts_with('\\')
        || name.contains('\0')
        || name.split(['/', '\\']).any(|s| s == "..")
        || (name.len() >= 2 && name.as_bytes()[1] == b':')
}

/// Opens an APK file or an apktool-style decoded directory.
pub fn open_package(path: &Path) -> Result<AppPackage, ContainerError> {
    let meta = fs::metadata(path).map_err(|source| ContainerError::Io { path: path.to_path_buf(), source })?;
    if meta.is_dir() {
        open_dir(path)
    } else {
        let file = File::open(path).map_err(|source| ContainerError::Io { path: path.to_path_buf(), source })?;
        open_zip(path, file)
    }
}

/// Reads an APK from memory; `source` is used only for messages.
pub fn open_apk_bytes(source: &Path, bytes: &[u8]) -> Result<AppPackage, ContainerError> {
    open_zip(source, io::Cursor::new(bytes))
}

struct Collected {
    manifest: Option<Vec<u8>>,
    layouts: Vec<PackageFile>,
    values: Vec<PackageFile>,
    resource_table: Option<Vec<u8>>,
    dex: Vec<(u32, PackageFile)>,
}

impl Collected {
    fn new() -> Self {
        Collected { manifest: None, layouts: Vec::new(), values: Vec::new(), resource_table: None, dex: Vec::new() }
    }

    fn add(&mut self, kind: EntryKind, path: String, bytes: Vec<u8>) {
        match kind {
            EntryKind::Manifest => self.manifest = Some(bytes),
            EntryKind::ResourceTable => self.resource_table = Some(bytes),
            EntryKind::Layout => self.layouts.push(PackageFile { path, bytes }),
            EntryKind::Values => self.values.push(PackageFile { path, bytes }),
            EntryKind::Dex(n) => self.dex.push((n, PackageFile { path, bytes })),
            EntryKind::Other => {}
        }
    }

    fn finish(mut self, source: &Path, source_kind: SourceKind) -> Result<AppPackage, ContainerError> {
        let manifest = self.manifest.ok_or_else(|| ContainerError::MissingManifest(source.to_path_buf()))?;
        if source_kind == SourceKind::BinaryApk && self.dex.is_empty() {
            return Err(ContainerError::NotAnApk { path: source.to_path_buf(), reason: "no classes.dex".into() });
        }
        self.layouts.sort_by(|a, b| a.path.cmp(&b.path));
        self.values.sort_by(|a, b| a.path.cmp(&b.path));
        self.dex.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.path.cmp(&b.1.path)));
        Ok(AppPackage {
            source: source.to_path_buf(),
            source_kind,
            manifest,
            layouts: self.layouts,
            values: self.values,
            resource_table: self.resource_table,
            dex_files: self.dex.into_iter().map(|(_, f)| f).collect(),
        })
    }
}

fn open_zip<R: Read + io::Seek>(source: &Path, reader: R) -> Result<AppPackage, ContainerError> {
    let mut archive = ZipArchive::new(reader).map_err(|e| match e {
        ZipError::Io(source_err) if source_err.kind() != io::ErrorKind::UnexpectedEof => {
            ContainerError::Io { path: source.to_path_buf(), source: source_err }
        }
        other => ContainerError::NotAnApk { path: source.to_path_buf(), reason: other.to_string() },
    })?;

    let mut collected = Collected::new();
    for i in 0..archive.len() {
        let mut entry = archive.by_index(i).map_err(|_| ContainerError::CorruptZipEntry(format!("#{i}")))?;
        let name = entry.name().to_string();
        if is_unsafe_name(&name) {
            return Err(ContainerError::CorruptZipEntry(name));
        }
        if entry.is_dir() {
            continue;
        }
        let kind = classify(&name);
        if kind == EntryKind::Other {
            continue;
        }
        let mut bytes = Vec::with_capacity(entry.size().min(MAX_ENTRY_BYTES) as usize);
        (&mut entry)
            .take(MAX_ENTRY_BYTES + 1)
            .read_to_end(&mut bytes)
            .map_err(|_| ContainerError::CorruptZipEntry(name.clone()))?;
        if bytes.len() as u64 > MAX_ENTRY_BYTES {
            return Err(ContainerError::CorruptZipEntry(name));
        }
        collected.add(kind, name, bytes);
    }
    collected.finish(source, SourceKind::BinaryApk)
}

fn open_dir(root: &Path) -> Result<AppPackage, ContainerError> {
    if !root.join(MANIFEST).is_file() {
        return Err(ContainerError::MissingManifest(root.to_path_buf()));
    }
    let mut collected = Collected::new();
    for entry in WalkDir::new(root).follow_links(false).sort_by_file_name() {
        let entry = entry.map_err(|e| ContainerError::Io {
            path: e.path().map_or_else(|| root.to_path_buf(), Path::to_path_buf),
            source: e.into_io_error().unwrap_or_else(|| io::Error::other("walk error")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let Ok(relative) = entry.path().strip_prefix(root) else { continue };
        let mut parts = Vec::new();
        for c in relative.components() {
            match c {
                Component::Normal(s) => parts.push(s.to_string_lossy().into_owned()),
                _ => return Err(ContainerError::CorruptZipEntry(relative.display().to_string())),
            }
        }
        let path = parts.join("/");
        let kind = classify(&path);
        if kind == EntryKind::Other {
            continue;
        }
        let bytes = fs::read(entry.path()).map_err(|source| ContainerError::Io { path: entry.path().to_path_buf(), source })?;
        collected.add(kind, path, bytes);
    }
    collected.finish(root, SourceKind::DecodedDir)
}

impl AppPackage {
    /// String resources: `resources.arsc` when present, otherwise the
    /// decoded `res/values/*.xml` files.
    pub fn load_resource_table(&self) -> Result<Option<ResourceTable>, AxmlError> {
        if let Some(bytes) = &self.resource_table {
            return axml::parse_resource_table(bytes).map(Some);
        }
        if self.values.is_empty() {
            return Ok(None);
        }
        let mut docs = Vec::new();
        for f in &self.values {
            docs.push(axml::parse_xml_auto(&f.bytes)?);
        }
        Ok(Some(ResourceTable::from_values_documents(&docs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify("AndroidManifest.xml"), EntryKind::Manifest);
        assert_eq!(classify("res/layout/activity_main.xml"), EntryKind::Layout);
        assert_eq!(classify("res/layout-land-v21/a.xml"), EntryKind::Layout);
        assert_eq!(classify("res/values/strings.xml"), EntryKind::Values);
        assert_eq!(classify("res/values-de/strings.xml"), EntryKind::Other);
        assert_eq!(classify("res/drawable/x.xml"), EntryKind::Other);
        assert_eq!(classify("res/layout/a.png"), EntryKind::Other);
        assert_eq!(classify("classes.dex"), EntryKind::Dex(1));
        assert_eq!(classify("classes12.dex"), EntryKind::Dex(12));
        assert_eq!(classify("classes02.dex"), EntryKind::Other);
        assert_eq!(classify("lib/classes.dex"), EntryKind::Other);
        assert_eq!(classify("resources.arsc"), EntryKind::ResourceTable);
    }

    #[test]
    fn unsafe_names() {
        for n in ["../evil", "res/../../x", "/etc/passwd", "C:\\x", "a\\..\\b"] {
            assert!(is_unsafe_name(n), "{n}");
        }
        assert!(!is_unsafe_name("res/layout/..a.xml"));
    }
}
