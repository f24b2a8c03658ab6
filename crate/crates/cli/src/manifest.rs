//! Output collection and the hashed file manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_NAME: &str = "MANIFEST";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Files of one run, held in memory and written by a single writer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    files: BTreeMap<String, Vec<u8>>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.insert(name.to_string(), bytes);
    }

    pub fn add_text(&mut self, name: &str, text: String) {
        self.add(name, text.into_bytes());
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.add_text(name, text);
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.get(name).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    /// `sha256  name` per file, sorted by name.
    pub fn manifest(&self) -> String {
        self.files.iter().map(|(name, bytes)| format!("{}  {name}\n", sha256_hex(bytes))).collect()
    }

    /// Writes every file and the manifest into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<String, CliError> {
        fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            fs::write(dir.join(name), bytes)?;
        }
        let manifest = self.manifest();
        fs::write(dir.join(MANIFEST_NAME), &manifest)?;
        Ok(manifest)
    }
}

/// Checks every manifest entry in `dir` against the file contents.
pub fn verify_manifest(dir: &Path) -> Result<bool, CliError> {
    let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
    for line in text.lines() {
        let Some((hash, name)) = line.split_once("  ") else {
            return Ok(false);
        };
        if sha256_hex(&fs::read(dir.join(name))?) != hash {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn manifest_is_sorted_and_verifiable() {
        let mut a = Artifacts::new();
        a.add_text("b.csv", "2\n".into());
        a.add_text("a.csv", "1\n".into());
        let m = a.manifest();
        assert!(m.find("a.csv").unwrap() < m.find("b.csv").unwrap());
        let dir = tempfile::tempdir().unwrap();
        a.write_to(dir.path()).unwrap();
        assert!(verify_manifest(dir.path()).unwrap());
        fs::write(dir.path().join("a.csv"), "tampered").unwrap();
        assert!(!verify_manifest(dir.path()).unwrap());
    }
}
