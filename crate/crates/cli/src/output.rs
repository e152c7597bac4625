use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::Failure;

const SIGNIFICANT_DIGITS: usize = 12;

/// Round every float to 12 significant digits so artifacts are byte-stable.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(x) = n.as_f64() {
                let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
        format!("{r}")
    } else {
        format!("{x}")
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    // Output location and thread count do not change results.
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Value::Object(o) = &mut v {
        o.remove("out");
        o.remove("threads");
    }
    let digest = Sha256::digest(serde_json::to_vec(&v).expect("config serializes"));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Writer {
    dir: PathBuf,
    hash: String,
    seed: u64,
    pub written: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path, hash: String, seed: u64) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), hash, seed, written: Vec::new() })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(&path, bytes).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// JSON artifact wrapped with the config hash and seed.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<(), Failure> {
        let mut v = json!({
            "config_hash": self.hash,
            "seed": self.seed,
            "result": serde_json::to_value(result).map_err(|e| Failure::Internal(e.to_string()))?,
        });
        round_floats(&mut v);
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| Failure::Internal(e.to_string()))?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    /// CSV with a leading `# config_hash=…` comment (gnuplot skips it).
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| Failure::Internal(e.to_string()))?;
        for r in rows {
            w.write_record(r).map_err(|e| Failure::Internal(e.to_string()))?;
        }
        let body = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
        let mut out = format!("# config_hash={} seed={}\n", self.hash, self.seed).into_bytes();
        out.extend(body);
        self.put(name, &out)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        self.put(name, body.as_bytes())
    }
}
