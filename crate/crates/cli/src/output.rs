//! JSON and CSV artifacts with provenance.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub struct Sink {
    pub dir: Option<PathBuf>,
    pub provenance: Value,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, command: &str, config_text: &str, config: &Value, threads: Option<usize>, rel_tol: f64) -> Self {
        let hash = Sha256::digest(config_text.as_bytes());
        let provenance = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config_sha256": format!("{hash:x}"),
            "config": config,
            "threads": threads,
            "parallel": cfg!(feature = "parallel"),
            "rel_tol": rel_tol,
        });
        Sink { dir, provenance }
    }

    fn write(&self, name: &str, body: &str) -> Result<(), CliError> {
        match &self.dir {
            None => {
                println!("{body}");
                Ok(())
            }
            Some(dir) => {
                let path = dir.join(name);
                fs::create_dir_all(dir)
                    .and_then(|_| fs::write(&path, body))
                    .map_err(|e| CliError::Write {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })
            }
        }
    }

    /// Writes `{"provenance": ..., "result": ...}` as `<stem>.json`.
    pub fn json(&self, stem: &str, result: Value) -> Result<(), CliError> {
        let doc = json!({ "provenance": self.provenance, "result": result });
        self.write(&format!("{stem}.json"), &serde_json::to_string_pretty(&doc).expect("serializable"))
    }

    /// Writes a CSV table as `<stem>.csv`, headed by `#` provenance lines.
    pub fn csv(&self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut out = String::new();
        out.push_str(&format!("# config_sha256 {}\n", self.provenance["config_sha256"].as_str().unwrap_or("")));
        out.push_str(&format!("# command {}\n", self.provenance["command"].as_str().unwrap_or("")));
        out.push_str(&header.join(","));
        out.push('\n');
        for r in rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        self.write(&format!("{stem}.csv"), out.trim_end())
    }
}
