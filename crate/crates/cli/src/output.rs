//! Deterministic output: fixed-width float formatting (17 significant
//! digits), CSV writers and the JSON run manifest with a stable config hash.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17 significant digits, enough to round-trip any f64 byte-identically.
pub fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

pub struct CsvWriter {
    file: std::io::BufWriter<fs::File>,
    pub path: PathBuf,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> std::io::Result<Self> {
        let file = fs::File::create(path)?;
        let mut w = CsvWriter { file: std::io::BufWriter::new(file), path: path.to_path_buf() };
        writeln!(w.file, "{header}")?;
        Ok(w)
    }

    pub fn row(&mut self, fields: &[String]) -> std::io::Result<()> {
        writeln!(self.file, "{}", fields.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<PathBuf> {
        self.file.flush()?;
        Ok(self.path)
    }
}

/// FNV-1a over the canonical (typed, field-ordered) JSON of the config:
/// stable across runs and platforms.
pub fn stable_hash(canonical_json: &str) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical_json.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Write `manifest.json` echoing the command, canonical config, seeds and
/// produced files.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    config_json: serde_json::Value,
    seed: Option<u64>,
    outputs: &[&Path],
    extra: serde_json::Value,
) -> std::io::Result<PathBuf> {
    let canonical = serde_json::to_string(&config_json).expect("config serializes");
    let manifest = serde_json::json!({
        "command": command,
        "config": config_json,
        "config_hash": stable_hash(&canonical),
        "seed": seed,
        "outputs": outputs.iter().map(|p| p.file_name().unwrap().to_string_lossy()).collect::<Vec<_>>(),
        "results": extra,
    });
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    Ok(path)
}
