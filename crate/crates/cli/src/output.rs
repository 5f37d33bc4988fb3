//! Deterministic artifact formatting: CSV with a comment metadata header,
//! JSON with an embedded metadata object. Numbers render with '.' decimal
//! separators and shortest round-trip formatting; lines end in LF. The same
//! (config, seed) must always produce the same bytes.

use crate::commands::CliError;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct Metadata {
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub version: &'static str,
    /// Free-form conventions worth recording (default initial conditions,
    /// convergence rules, ...).
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(command: &'static str, config_sha256: String, seed: Option<u64>) -> Self {
        Metadata {
            command,
            config_sha256,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            notes: Vec::new(),
        }
    }

    /// Comment header prepended to CSV artifacts.
    pub fn comment_lines(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# command: {}\n", self.command));
        s.push_str(&format!("# config_sha256: {}\n", self.config_sha256));
        match self.seed {
            Some(n) => s.push_str(&format!("# seed: {n}\n")),
            None => s.push_str("# seed: none\n"),
        }
        s.push_str(&format!("# version: {}\n", self.version));
        for note in &self.notes {
            s.push_str(&format!("# note: {note}\n"));
        }
        s
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command,
            "config_sha256": self.config_sha256,
            "seed": self.seed,
            "version": self.version,
            "notes": self.notes,
        })
    }
}

/// Shortest round-trip decimal rendering; infinities become "inf"/"-inf" to
/// match the interval convention.
pub fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// CSV table with a metadata comment header; LF endings throughout.
pub fn csv(meta: &Metadata, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = meta.comment_lines();
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Wrap a JSON payload with the metadata object.
pub fn json_document(meta: &Metadata, payload: serde_json::Value) -> serde_json::Value {
    serde_json::json!({ "metadata": meta.json(), "payload": payload })
}

#[derive(Debug, Clone)]
pub enum Artifact {
    Csv { name: String, body: String },
    Json { name: String, value: serde_json::Value },
}

impl Artifact {
    pub fn name(&self) -> &str {
        match self {
            Artifact::Csv { name, .. } | Artifact::Json { name, .. } => name,
        }
    }
}

/// Write artifacts into the output directory (created if missing), or dump
/// them to stdout when no directory was given.
pub fn emit(artifacts: &[Artifact], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
            for a in artifacts {
                let path = dir.join(a.name());
                let bytes = render(a)?;
                std::fs::write(&path, bytes)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for a in artifacts {
                let bytes = render(a)?;
                lock.write_all(&bytes)
                    .and_then(|_| lock.write_all(b"\n"))
                    .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))?;
            }
            Ok(())
        }
    }
}

fn render(a: &Artifact) -> Result<Vec<u8>, CliError> {
    Ok(match a {
        Artifact::Csv { body, .. } => body.clone().into_bytes(),
        Artifact::Json { value, .. } => {
            let mut text = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Numerical(format!("serialization failed: {e}")))?;
            text.push('\n');
            text.into_bytes()
        }
    })
}
