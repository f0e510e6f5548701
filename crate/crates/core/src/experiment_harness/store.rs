//! Append-only JSON-lines record store, one directory per manifest hash.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed { message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub manifest_hash: String,
    /// Stable parameter key, unique within a manifest.
    pub key: String,
    pub parameters: serde_json::Value,
    pub outputs: serde_json::Value,
    /// Resolution-refinement evidence attached to the outputs.
    pub refinement: serde_json::Value,
    pub runtime_seconds: f64,
    pub status: Status,
}

impl ExperimentRecord {
    /// The record without its wall-clock field, for reproducibility checks.
    pub fn payload(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("record serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("runtime_seconds");
        }
        v
    }
}

pub struct RecordStore {
    dir: PathBuf,
    path: PathBuf,
    lock: Mutex<()>,
}

impl RecordStore {
    pub const FILE: &'static str = "records.jsonl";

    pub fn open(root: &Path, manifest_hash: &str) -> Result<Self> {
        let dir = root.join(manifest_hash);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(Self::FILE);
        Ok(Self {
            dir,
            path,
            lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn load(&self) -> Result<BTreeMap<String, ExperimentRecord>> {
        let mut out = BTreeMap::new();
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(Error::io(&self.path, e)),
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let r: ExperimentRecord =
                serde_json::from_str(line).map_err(|e| Error::Serde(format!("{}: {e}", self.path.display())))?;
            out.insert(r.key.clone(), r);
        }
        Ok(out)
    }

    /// Rewrites the file with the new line appended, via a temporary file and rename.
    pub fn append(&self, record: &ExperimentRecord) -> Result<()> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut text = match fs::read(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(&self.path, e)),
        };
        let line = serde_json::to_string(record).map_err(|e| Error::Serde(e.to_string()))?;
        text.extend_from_slice(line.as_bytes());
        text.push(b'\n');
        let tmp = self.dir.join(format!("{}.tmp", Self::FILE));
        {
            let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            f.write_all(&text).map_err(|e| Error::io(&tmp, e))?;
            f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        }
        fs::rename(&tmp, &self.path).map_err(|e| Error::io(&self.path, e))
    }
}
