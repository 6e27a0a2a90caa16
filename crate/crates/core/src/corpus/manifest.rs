use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: String,
    pub speaker: String,
    pub corpus: String,
}

/// Labelled utterance inventory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    pub label_set: Vec<String>,
}

const COLUMNS: [&str; 4] = ["path", "label", "speaker", "corpus"];

impl Manifest {
    /// Checks that every label belongs to `label_set` and paths are unique.
    pub fn new(entries: Vec<ManifestEntry>, label_set: Vec<String>) -> Result<Self> {
        let known: HashSet<&str> = label_set.iter().map(String::as_str).collect();
        if known.len() != label_set.len() {
            return Err(Error::Data("label set has duplicates".into()));
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if !known.contains(e.label.as_str()) {
                return Err(Error::Data(format!("{}: label {:?} not in label set", e.path, e.label)));
            }
            if !seen.insert(e.path.as_str()) {
                return Err(Error::Data(format!("duplicate path {}", e.path)));
            }
        }
        Ok(Manifest { entries, label_set })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_classes(&self) -> usize {
        self.label_set.len()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.label_set.iter().position(|l| l == label)
    }

    /// Class index of every entry.
    pub fn label_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|e| self.label_index(&e.label).expect("validated label"))
            .collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for i in self.label_indices() {
            counts[i] += 1;
        }
        counts
    }

    pub fn position(&self, path: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.path == path)
    }
}

/// Reads a `path,label,speaker,corpus` CSV. With `declared`, labels outside it are
/// rejected and it becomes the label order; otherwise the sorted distinct labels are used.
pub fn load_manifest_csv(path: &Path, declared: Option<&[String]>) -> Result<Manifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest_csv(&text, declared).map_err(|e| match e {
        Error::Data(m) => Error::format(path, m),
        other => other,
    })
}

pub fn parse_manifest_csv(text: &str, declared: Option<&[String]>) -> Result<Manifest> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("missing column {:?}", name)))
    };
    let idx = [col(COLUMNS[0])?, col(COLUMNS[1])?, col(COLUMNS[2])?, col(COLUMNS[3])?];
    let mut entries = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(idx[i]).unwrap_or("").to_string();
        let entry = ManifestEntry {
            path: field(0),
            label: field(1),
            speaker: field(2),
            corpus: field(3),
        };
        if entry.path.is_empty() || entry.label.is_empty() {
            return Err(Error::Data(format!("row {}: empty path or label", entries.len() + 2)));
        }
        entries.push(entry);
    }
    let label_set = match declared {
        Some(set) => set.to_vec(),
        None => entries
            .iter()
            .map(|e| e.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    Manifest::new(entries, label_set)
}

pub fn manifest_to_csv(manifest: &Manifest) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for e in &manifest.entries {
        w.write_record([&e.path, &e.label, &e.speaker, &e.corpus])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_manifest_csv(path: &Path, manifest: &Manifest) -> Result<()> {
    std::fs::write(path, manifest_to_csv(manifest)?).map_err(|e| Error::io(path, e))
}
