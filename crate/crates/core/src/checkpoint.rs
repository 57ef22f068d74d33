//! JSON-lines checkpoint file for partial-sum surveys.
//!
//! Each completed block is one line
//! `{"version":1,"block_lo":…,"block_hi":…,"partial_sum":"<decimal>"}`;
//! finished survey records follow as `{"version":1,"record":{…}}`. The file
//! is rewritten in full through a temporary sibling and an atomic rename.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::survey::SurveyRecord;

pub const CHECKPOINT_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockLine {
    version: u64,
    block_lo: u64,
    block_hi: u64,
    partial_sum: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    version: u64,
    record: SurveyRecord,
}

/// In-memory image of a checkpoint file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checkpoint {
    /// `(lo, hi) → Σ_{lo ≤ n < hi} Δ(n)`.
    pub blocks: BTreeMap<(u64, u64), u128>,
    pub records: Vec<SurveyRecord>,
}

impl Checkpoint {
    /// Reads `path`; a missing file is an empty checkpoint.
    pub fn load(path: &Path) -> Result<Self> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Self::default()),
            Err(e) => return Err(e.into()),
        };
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let corrupt = |line: usize, reason: String| Error::CorruptCheckpoint { path: path.to_path_buf(), line, reason };
        let mut out = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let value: Value = serde_json::from_str(raw).map_err(|e| corrupt(lineno, format!("not JSON: {e}")))?;
            match value.get("version").and_then(Value::as_u64) {
                Some(CHECKPOINT_VERSION) => {}
                Some(v) => return Err(corrupt(lineno, format!("unsupported checkpoint version {v}"))),
                None => return Err(corrupt(lineno, "missing version field".into())),
            }
            if value.get("record").is_some() {
                let r: RecordLine = serde_json::from_value(value).map_err(|e| corrupt(lineno, e.to_string()))?;
                out.records.push(r.record);
            } else {
                let b: BlockLine = serde_json::from_value(value).map_err(|e| corrupt(lineno, e.to_string()))?;
                if b.block_hi <= b.block_lo || b.block_lo == 0 {
                    return Err(corrupt(lineno, format!("empty block [{}, {})", b.block_lo, b.block_hi)));
                }
                let sum: u128 = b
                    .partial_sum
                    .parse()
                    .map_err(|_| corrupt(lineno, format!("partial_sum {:?} is not a decimal integer", b.partial_sum)))?;
                if out.blocks.insert((b.block_lo, b.block_hi), sum).is_some() {
                    return Err(corrupt(lineno, format!("block [{}, {}) listed twice", b.block_lo, b.block_hi)));
                }
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (&(lo, hi), &sum) in &self.blocks {
            let line = BlockLine { version: CHECKPOINT_VERSION, block_lo: lo, block_hi: hi, partial_sum: sum.to_string() };
            s.push_str(&serde_json::to_string(&line).expect("serializable"));
            s.push('\n');
        }
        for r in &self.records {
            let line = RecordLine { version: CHECKPOINT_VERSION, record: r.clone() };
            s.push_str(&serde_json::to_string(&line).expect("serializable"));
            s.push('\n');
        }
        s
    }

    /// Atomically replaces `path` with the current contents.
    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = tmp_path(path);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}
