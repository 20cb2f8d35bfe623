//! Connection labels per published image, kept as `labels/<id>.json` next to
//! the store (or only in memory for an in-memory store).

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use breeder_core::probe::LabelStore;
use parking_lot::RwLock;

#[derive(Debug, Default)]
pub struct LabelRepo {
    dir: Option<PathBuf>,
    cache: RwLock<HashMap<String, LabelStore>>,
}

impl LabelRepo {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn at(dir: impl AsRef<Path>) -> Self {
        Self {
            dir: Some(dir.as_ref().join("labels")),
            cache: RwLock::default(),
        }
    }

    fn file(&self, genome_id: &str) -> Option<PathBuf> {
        // ids are uuids or file stems; refuse anything that could leave the dir
        let safe = !genome_id.is_empty()
            && genome_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        self.dir
            .as_ref()
            .filter(|_| safe)
            .map(|d| d.join(format!("{genome_id}.json")))
    }

    /// Labels for an image; an empty store when none were saved.
    pub fn get(&self, genome_id: &str) -> std::io::Result<LabelStore> {
        if let Some(s) = self.cache.read().get(genome_id) {
            return Ok(s.clone());
        }
        let loaded = match self.file(genome_id) {
            Some(path) if path.exists() => {
                let text = fs::read_to_string(&path)?;
                LabelStore::from_json(&text)
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?
            }
            _ => LabelStore::new(genome_id),
        };
        self.cache
            .write()
            .insert(genome_id.to_string(), loaded.clone());
        Ok(loaded)
    }

    pub fn put(&self, store: LabelStore) -> std::io::Result<()> {
        if let Some(path) = self.file(&store.genome_id) {
            fs::create_dir_all(path.parent().expect("has parent"))?;
            let tmp = path.with_extension("json.tmp");
            fs::write(&tmp, store.to_canonical_json())?;
            fs::rename(&tmp, &path)?;
        }
        self.cache.write().insert(store.genome_id.clone(), store);
        Ok(())
    }
}
