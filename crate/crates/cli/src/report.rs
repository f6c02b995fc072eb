use std::cell::RefCell;
use std::path::{Path, PathBuf};

use nilcert::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::{Command, Options};

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// One input file, with its hash and content so the report can be replayed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
    pub content: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Decided,
    Unknown,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub arguments: Command,
    pub options: Options,
    pub inputs: Vec<InputRecord>,
    pub status: Status,
    pub result: Value,
    pub verification: Vec<String>,
    pub wall_time_ms: f64,
}

/// Reads input files from disk, or from the records of a report when replaying.
pub struct Inputs {
    replay: Option<Vec<InputRecord>>,
    records: RefCell<Vec<InputRecord>>,
}

impl Inputs {
    pub fn from_disk() -> Self {
        Inputs { replay: None, records: RefCell::new(Vec::new()) }
    }

    pub fn replay(records: Vec<InputRecord>) -> Result<Self> {
        for r in &records {
            if sha256_hex(&r.content) != r.sha256 {
                return Err(Error::RelationViolated(format!("hash of recorded input {} does not match", r.path)));
            }
        }
        Ok(Inputs { replay: Some(records), records: RefCell::new(Vec::new()) })
    }

    pub fn read(&self, path: &Path) -> Result<String> {
        let key = path.to_string_lossy().into_owned();
        if let Some(r) = self.records.borrow().iter().find(|r| r.path == key) {
            return Ok(r.content.clone());
        }
        let content = match &self.replay {
            Some(recs) => recs
                .iter()
                .find(|r| r.path == key)
                .map(|r| r.content.clone())
                .ok_or_else(|| Error::Input(format!("report has no recorded input {key}")))?,
            None => std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{key}: {e}")))?,
        };
        self.records.borrow_mut().push(InputRecord { path: key, sha256: sha256_hex(&content), content: content.clone() });
        Ok(content)
    }

    /// Resolves `name` relative to the directory of `base`.
    pub fn read_relative(&self, base: &Path, name: &str) -> Result<String> {
        let path: PathBuf = base.parent().map(|d| d.join(name)).unwrap_or_else(|| PathBuf::from(name));
        self.read(&path)
    }

    pub fn into_records(self) -> Vec<InputRecord> {
        self.records.into_inner()
    }
}
