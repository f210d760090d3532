use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use mfield_core::degen::{RowStore, ScanRow};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// One JSON file per key under a directory. Writes go to a temporary file
/// that is renamed into place, so readers never see partial entries.
pub struct DirCache {
    dir: PathBuf,
}

impl DirCache {
    pub fn open(dir: &Path) -> std::io::Result<DirCache> {
        fs::create_dir_all(dir)?;
        Ok(DirCache { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        let name: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{name}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let v: Value = serde_json::from_str(&text).ok()?;
        // a hash collision would show up as a different stored key
        (v.get("key")?.as_str()? == key).then(|| v.get("value").cloned()).flatten()
    }

    pub fn put(&self, key: &str, value: &Value) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        let entry = serde_json::json!({"key": key, "value": value});
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}

impl RowStore for DirCache {
    fn load(&self, key: &str) -> Option<ScanRow> {
        serde_json::from_value(self.get(key)?).ok()
    }

    fn store(&self, key: &str, row: &ScanRow) {
        if let Ok(v) = serde_json::to_value(row) {
            if let Err(e) = self.put(key, &v) {
                eprintln!("warning: cache write failed: {e}");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = DirCache::open(dir.path()).unwrap();
        assert!(c.get("k").is_none());
        c.put("k", &serde_json::json!([1, "2/3"])).unwrap();
        assert_eq!(c.get("k").unwrap(), serde_json::json!([1, "2/3"]));
        c.put("k", &serde_json::json!(5)).unwrap();
        assert_eq!(c.get("k").unwrap(), serde_json::json!(5));
        assert!(c.get("other").is_none());
    }
}
