//! Whole-app fixtures: one description rendered either as a compiled APK or
//! as an apktool-style decoded directory.

use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;

use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipWriter};

use crate::arsc::TableBuilder;
use crate::dex::{build_dex, MethodSpec};
use crate::xml::{to_binary, to_plain, Element, PoolEncoding, Value};

#[derive(Debug, Clone)]
pub struct AppSpec {
    pub package: String,
    pub permissions: Vec<String>,
    /// `(file name, root element)`; stored under `res/layout/`.
    pub layouts: Vec<(String, Element)>,
    pub strings: Vec<(String, String)>,
    /// One method list per `classes*.dex`.
    pub dex: Vec<Vec<MethodSpec>>,
    /// Extra stored entries, e.g. assets.
    pub extra: Vec<(String, Vec<u8>)>,
    pub encoding: PoolEncoding,
}

impl AppSpec {
    pub fn new(package: &str) -> Self {
        AppSpec {
            package: package.to_string(),
            permissions: Vec::new(),
            layouts: Vec::new(),
            strings: Vec::new(),
            dex: vec![Vec::new()],
            extra: Vec::new(),
            encoding: PoolEncoding::Utf16,
        }
    }

    pub fn permission(mut self, name: &str) -> Self {
        self.permissions.push(name.to_string());
        self
    }

    pub fn permissions<'a>(mut self, names: impl IntoIterator<Item = &'a str>) -> Self {
        self.permissions.extend(names.into_iter().map(str::to_string));
        self
    }

    pub fn layout(mut self, file: &str, root: Element) -> Self {
        self.layouts.push((file.to_string(), root));
        self
    }

    pub fn string(mut self, name: &str, value: &str) -> Self {
        self.strings.push((name.to_string(), value.to_string()));
        self
    }

    pub fn methods(mut self, methods: impl IntoIterator<Item = MethodSpec>) -> Self {
        self.dex[0].extend(methods);
        self
    }

    /// Starts a new `classesN.dex`.
    pub fn next_dex(mut self, methods: impl IntoIterator<Item = MethodSpec>) -> Self {
        self.dex.push(methods.into_iter().collect());
        self
    }

    pub fn manifest(&self) -> Element {
        Element::new("manifest")
            .plain("package", Value::str(&self.package))
            .android("versionCode", Value::Int(1))
            .android("versionName", Value::str("1.0"))
            .children(
                self.permissions.iter().map(|p| Element::new("uses-permission").android("name", Value::str(p))),
            )
            .child(
                Element::new("application")
                    .android("label", Value::reference("string", "app_name"))
                    .child(Element::new("activity").android("name", Value::str(".MainActivity"))),
            )
    }

    pub fn table(&self) -> TableBuilder {
        let mut t = TableBuilder::new(&self.package);
        t.string("app_name", &self.package);
        for (n, v) in &self.strings {
            t.string(n, v);
        }
        let mut refs = self.manifest().references();
        for (_, l) in &self.layouts {
            refs.extend(l.references());
        }
        for (kind, name) in refs {
            t.add(&kind, &name, None);
        }
        t
    }

    fn dex_name(i: usize) -> String {
        if i == 0 {
            "classes.dex".to_string()
        } else {
            format!("classes{}.dex", i + 1)
        }
    }

    pub fn layout_path(file: &str) -> String {
        format!("res/layout/{file}")
    }

    /// Compiled APK bytes.
    pub fn to_apk(&self) -> Vec<u8> {
        let table = self.table();
        let ids = table.ids();
        let resolve = |kind: &str, name: &str| ids.get(&(kind.to_string(), name.to_string())).copied().unwrap_or(0);
        let mut entries: Vec<(String, Vec<u8>)> = vec![
            ("AndroidManifest.xml".into(), to_binary(&self.manifest(), self.encoding, &resolve)),
            ("resources.arsc".into(), table.build(self.encoding)),
        ];
        for (i, methods) in self.dex.iter().enumerate() {
            entries.push((Self::dex_name(i), build_dex(methods, "035")));
        }
        for (file, root) in &self.layouts {
            entries.push((Self::layout_path(file), to_binary(root, self.encoding, &resolve)));
        }
        entries.extend(self.extra.iter().cloned());
        zip_entries(&entries)
    }

    /// Writes the decoded form (plain XML, values files, DEX copies) under `dir`.
    pub fn write_decoded(&self, dir: &Path) -> std::io::Result<()> {
        let write = |rel: &str, bytes: &[u8]| -> std::io::Result<()> {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, bytes)
        };
        write("AndroidManifest.xml", to_plain(&self.manifest()).as_bytes())?;
        for (file, root) in &self.layouts {
            write(&Self::layout_path(file), to_plain(root).as_bytes())?;
        }
        for (rel, text) in self.table().values_files() {
            write(&rel, text.as_bytes())?;
        }
        for (i, methods) in self.dex.iter().enumerate() {
            write(&Self::dex_name(i), &build_dex(methods, "035"))?;
        }
        Ok(())
    }

    pub fn write_apk(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_apk())
    }

    /// Every method referenced by any DEX.
    pub fn all_methods(&self) -> Vec<&MethodSpec> {
        self.dex.iter().flatten().collect()
    }
}

/// Builds a ZIP with DEX/arsc stored and everything else deflated.
pub fn zip_entries(entries: &[(String, Vec<u8>)]) -> Vec<u8> {
    let mut zip = ZipWriter::new(Cursor::new(Vec::new()));
    for (name, bytes) in entries {
        let method = if name.ends_with(".arsc") || name.starts_with("assets/") {
            CompressionMethod::Stored
        } else {
            CompressionMethod::Deflated
        };
        zip.start_file(name.as_str(), SimpleFileOptions::default().compression_method(method))
            .expect("start zip entry");
        zip.write_all(bytes).expect("write zip entry");
    }
    zip.finish().expect("finish zip").into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apk_contains_expected_entries() {
        let spec = AppSpec::new("com.example.demo")
            .permission("android.permission.CAMERA")
            .layout("main.xml", Element::new("LinearLayout"))
            .next_dex([MethodSpec::new("La;", "b", "V", &[])]);
        let bytes = spec.to_apk();
        let mut archive = zip::ZipArchive::new(Cursor::new(bytes)).unwrap();
        let mut names: Vec<String> = (0..archive.len()).map(|i| archive.by_index(i).unwrap().name().to_string()).collect();
        names.sort();
        assert_eq!(
            names,
            ["AndroidManifest.xml", "classes.dex", "classes2.dex", "res/layout/main.xml", "resources.arsc"]
        );
    }
}
