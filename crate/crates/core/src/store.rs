//! Append-only archive of published genomes.
//!
//! On disk a store is a directory holding
//!
//! * `records.ndjson`: one record per line, `<sha256 of json> <canonical json>`;
//! * `index.json`: record ids in log order with the log's line count, rewritten
//!   on every publish and rebuilt from the log when stale;
//! * `registry.json`: the innovation registry with its own checksum.
//!
//! Opening verifies every checksum and refuses a corrupt store.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::genome::{Genome, Innovation};
use crate::neat::{InnovationRegistry, MutationConfig};

const LOG: &str = "records.ndjson";
const INDEX: &str = "index.json";
const REGISTRY: &str = "registry.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishRecord {
    pub genome_id: String,
    pub parent_id: Option<String>,
    pub title: String,
    pub author: String,
    /// RFC 3339 timestamp.
    pub created_at: String,
    pub config: MutationConfig,
    pub genome: Genome,
}

impl PublishRecord {
    pub fn to_canonical_json(&self) -> String {
        let mut r = self.clone();
        r.genome.nodes.sort_by_key(|n| n.innovation);
        r.genome.connections.sort_by_key(|c| c.innovation);
        serde_json::to_string(&r).expect("record serializes")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("store i/o: {0}")]
    Io(String),
    #[error("store corrupt at {file} line {line}: {reason}")]
    Corrupt {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("image {0} already published")]
    DuplicateId(String),
    #[error("parent {0} is not a published image")]
    UnknownParent(String),
    #[error("unknown image {0}")]
    UnknownImage(String),
    #[error("title is empty")]
    EmptyTitle,
    #[error("record genome id {record} does not match genome {genome}")]
    IdMismatch { record: String, genome: String },
    #[error("genome is invalid")]
    InvalidGenome,
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::Io(e.to_string())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Index {
    lines: usize,
    ids: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RegistryFile {
    sha256: String,
    registry: String,
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Whether a connection exists in one generation of a lineage, and its state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presence {
    Absent,
    Enabled,
    Disabled,
}

/// Ancestry of an image from its root, with the history of each of its
/// connections across those generations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineageChain {
    pub records: Vec<PublishRecord>,
    pub tracked_connections: BTreeMap<Innovation, Vec<Presence>>,
}

#[derive(Debug)]
pub struct Store {
    dir: Option<PathBuf>,
    records: Vec<PublishRecord>,
    by_id: HashMap<String, usize>,
    children: HashMap<String, Vec<usize>>,
    registry: InnovationRegistry,
}

impl Store {
    /// A store that lives only in memory.
    pub fn in_memory() -> Self {
        Self {
            dir: None,
            records: Vec::new(),
            by_id: HashMap::new(),
            children: HashMap::new(),
            registry: InnovationRegistry::new(),
        }
    }

    /// Opens (creating if needed) the store in `dir`, verifying every checksum.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut store = Self {
            dir: Some(dir.clone()),
            ..Self::in_memory()
        };
        let log = dir.join(LOG);
        if log.exists() {
            let reader = BufReader::new(File::open(&log)?);
            for (k, line) in reader.lines().enumerate() {
                let record = parse_line(&line?).map_err(|reason| StoreError::Corrupt {
                    file: LOG.into(),
                    line: k + 1,
                    reason,
                })?;
                store.admit(record).map_err(|e| StoreError::Corrupt {
                    file: LOG.into(),
                    line: k + 1,
                    reason: e.to_string(),
                })?;
            }
        }
        let registry = dir.join(REGISTRY);
        if registry.exists() {
            let text = fs::read_to_string(&registry)?;
            let corrupt = |reason: String| StoreError::Corrupt {
                file: REGISTRY.into(),
                line: 1,
                reason,
            };
            let file: RegistryFile =
                serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
            if digest(&file.registry) != file.sha256 {
                return Err(corrupt("checksum mismatch".into()));
            }
            store.registry =
                serde_json::from_str(&file.registry).map_err(|e| corrupt(e.to_string()))?;
        }
        // the log is authoritative for markings that reached it
        for r in &store.records {
            store.registry.observe(&r.genome);
        }
        store.write_index()?;
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PublishRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&PublishRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn children(&self, id: &str) -> Vec<&PublishRecord> {
        self.children
            .get(id)
            .map(|v| v.iter().map(|&i| &self.records[i]).collect())
            .unwrap_or_default()
    }

    pub fn registry(&self) -> &InnovationRegistry {
        &self.registry
    }

    pub fn registry_mut(&mut self) -> &mut InnovationRegistry {
        &mut self.registry
    }

    /// Appends a record. Its parent must already be in the store.
    pub fn publish(&mut self, record: PublishRecord) -> Result<&PublishRecord, StoreError> {
        if record.title.trim().is_empty() {
            return Err(StoreError::EmptyTitle);
        }
        if !record.genome.is_valid() {
            return Err(StoreError::InvalidGenome);
        }
        self.check(&record)?;
        if let Some(dir) = &self.dir {
            let json = record.to_canonical_json();
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(dir.join(LOG))?;
            writeln!(f, "{} {}", digest(&json), json)?;
            f.sync_data()?;
        }
        self.registry.observe(&record.genome);
        self.admit(record)?;
        self.flush()?;
        Ok(self.records.last().expect("just admitted"))
    }

    fn check(&self, record: &PublishRecord) -> Result<(), StoreError> {
        if record.genome_id != record.genome.id {
            return Err(StoreError::IdMismatch {
                record: record.genome_id.clone(),
                genome: record.genome.id.clone(),
            });
        }
        if self.by_id.contains_key(&record.genome_id) {
            return Err(StoreError::DuplicateId(record.genome_id.clone()));
        }
        if let Some(p) = &record.parent_id {
            if !self.by_id.contains_key(p) {
                return Err(StoreError::UnknownParent(p.clone()));
            }
        }
        Ok(())
    }

    fn admit(&mut self, record: PublishRecord) -> Result<(), StoreError> {
        self.check(&record)?;
        let k = self.records.len();
        self.by_id.insert(record.genome_id.clone(), k);
        if let Some(p) = &record.parent_id {
            self.children.entry(p.clone()).or_default().push(k);
        }
        self.records.push(record);
        Ok(())
    }

    /// Rewrites the index and registry files.
    pub fn flush(&self) -> Result<(), StoreError> {
        self.write_index()?;
        if let Some(dir) = &self.dir {
            let registry = serde_json::to_string(&self.registry).expect("registry serializes");
            let file = RegistryFile {
                sha256: digest(&registry),
                registry,
            };
            write_atomic(
                &dir.join(REGISTRY),
                &serde_json::to_string(&file).expect("serializes"),
            )?;
        }
        Ok(())
    }

    fn write_index(&self) -> Result<(), StoreError> {
        if let Some(dir) = &self.dir {
            let index = Index {
                lines: self.records.len(),
                ids: self.records.iter().map(|r| r.genome_id.clone()).collect(),
            };
            write_atomic(
                &dir.join(INDEX),
                &serde_json::to_string(&index).expect("serializes"),
            )?;
        }
        Ok(())
    }

    /// Every record in log order, canonical JSON, one per line.
    pub fn export_canonical(&self) -> String {
        self.records
            .iter()
            .map(|r| r.to_canonical_json() + "\n")
            .collect()
    }

    pub fn lineage(&self, id: &str) -> Result<LineageChain, StoreError> {
        let mut chain = Vec::new();
        let mut cur = Some(id.to_string());
        while let Some(c) = cur {
            let r = self
                .get(&c)
                .ok_or_else(|| StoreError::UnknownImage(c.clone()))?;
            chain.push(r.clone());
            cur = r.parent_id.clone();
        }
        chain.reverse();
        let target = chain.last().expect("chain holds the target");
        let tracked = target
            .genome
            .connections
            .iter()
            .map(|c| {
                let history = chain
                    .iter()
                    .map(|r| match r.genome.connection(c.innovation) {
                        None => Presence::Absent,
                        Some(g) if g.enabled => Presence::Enabled,
                        Some(_) => Presence::Disabled,
                    })
                    .collect();
                (c.innovation, history)
            })
            .collect();
        Ok(LineageChain {
            records: chain,
            tracked_connections: tracked,
        })
    }
}

fn parse_line(line: &str) -> Result<PublishRecord, String> {
    let (sum, json) = line
        .split_once(' ')
        .ok_or_else(|| "missing checksum".to_string())?;
    if digest(json) != sum {
        return Err("checksum mismatch".into());
    }
    let record: PublishRecord = serde_json::from_str(json).map_err(|e| e.to_string())?;
    if record.to_canonical_json() != json {
        return Err("record is not in canonical form".into());
    }
    Ok(record)
}

fn write_atomic(path: &Path, text: &str) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
