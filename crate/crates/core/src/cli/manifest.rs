//! Line-oriented run manifests with SHA-256 digests of every emitted file.

use std::fmt::Write;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

pub const ARTIFACT_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    /// Echo of the resolved configuration, in canonical key order.
    pub config: Vec<(String, String)>,
    /// File name (relative to the manifest directory) and hex digest.
    pub files: Vec<(String, String)>,
    pub wall_clock: Duration,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::from("# run manifest\n");
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "command = {}", self.command);
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k} = {v}");
        }
        for (name, digest) in &self.files {
            let _ = writeln!(s, "file.{name} = sha256:{digest}");
        }
        let _ = writeln!(s, "wall_clock_s = {:.6}", self.wall_clock.as_secs_f64());
        s
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut m = RunManifest {
            version: String::new(),
            command: String::new(),
            config: Vec::new(),
            files: Vec::new(),
            wall_clock: Duration::ZERO,
        };
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once(" = ")?;
            if let Some(key) = k.strip_prefix("config.") {
                m.config.push((key.into(), v.into()));
            } else if let Some(name) = k.strip_prefix("file.") {
                m.files.push((name.into(), v.strip_prefix("sha256:")?.into()));
            } else {
                match k {
                    "version" => m.version = v.into(),
                    "command" => m.command = v.into(),
                    "wall_clock_s" => m.wall_clock = Duration::try_from_secs_f64(v.parse().ok()?).ok()?,
                    _ => return None,
                }
            }
        }
        Some(m)
    }
}

/// Result of re-hashing the files listed in a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub checked: usize,
    /// Files whose digest differs or which could not be read.
    pub mismatched: Vec<PathBuf>,
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Re-hashes every file listed in the manifest at `path`, resolving names
/// relative to its directory.
pub fn verify_manifest(path: &Path) -> io::Result<Verification> {
    let text = std::fs::read_to_string(path)?;
    let manifest = RunManifest::parse(&text).ok_or_else(|| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            format!("malformed manifest {}", path.display()),
        )
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut mismatched = Vec::new();
    for (name, digest) in &manifest.files {
        let file = dir.join(name);
        match std::fs::read(&file) {
            Ok(bytes) if sha256_hex(&bytes) == *digest => {}
            _ => mismatched.push(file),
        }
    }
    Ok(Verification {
        checked: manifest.files.len(),
        mismatched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn render_parse_round_trip() {
        let m = RunManifest {
            version: ARTIFACT_VERSION.into(),
            command: "csfr".into(),
            config: vec![("tau".into(), "2500000000".into())],
            files: vec![("csfr.csv".into(), sha256_hex(b"x"))],
            wall_clock: Duration::from_micros(1_250_000),
        };
        assert_eq!(RunManifest::parse(&m.render()).unwrap(), m);
    }

    #[test]
    fn detects_single_byte_flip() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("data.csv");
        std::fs::write(&data, b"a,b\n1,2\n").unwrap();
        let m = RunManifest {
            version: ARTIFACT_VERSION.into(),
            command: "test".into(),
            config: vec![],
            files: vec![("data.csv".into(), sha256_hex(b"a,b\n1,2\n"))],
            wall_clock: Duration::ZERO,
        };
        let path = dir.path().join("manifest.txt");
        std::fs::write(&path, m.render()).unwrap();
        assert!(verify_manifest(&path).unwrap().is_ok());
        std::fs::write(&data, b"a,b\n1,3\n").unwrap();
        let v = verify_manifest(&path).unwrap();
        assert_eq!(v.mismatched, vec![data]);
    }
}
