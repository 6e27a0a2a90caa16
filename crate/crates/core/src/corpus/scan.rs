//! Directory scanners for the four public emotion corpora.
//!
//! Label conventions:
//! - EMODB: 7-character stems like `03a01Fa`; the sixth character is the
//!   emotion (W angry, L boredom, E disgust, A fear, F happy, T sad, N neutral).
//!   The first two characters are the speaker.
//! - RAVDESS: `03-01-05-01-02-01-12`; the third field is the emotion
//!   (01 neutral … 08 surprise), the seventh the actor.
//! - SAVEE: `a01.wav`, `sa03.wav`, `su10.wav` inside a speaker directory, or
//!   `DC_a01.wav` with the speaker prefixed.
//! - CASIA: the parent directory names the emotion; the one above it the speaker.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use walkdir::WalkDir;

use crate::corpus::manifest::{Manifest, ManifestEntry};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusKind {
    Casia,
    Emodb,
    Ravdess,
    Savee,
}

impl CorpusKind {
    pub fn name(self) -> &'static str {
        match self {
            CorpusKind::Casia => "casia",
            CorpusKind::Emodb => "emodb",
            CorpusKind::Ravdess => "ravdess",
            CorpusKind::Savee => "savee",
        }
    }

    /// Emotion inventory of the corpus, alphabetical.
    pub fn class_set(self) -> &'static [&'static str] {
        match self {
            CorpusKind::Casia => &["angry", "fear", "happy", "neutral", "sad", "surprise"],
            CorpusKind::Emodb => &["angry", "boredom", "disgust", "fear", "happy", "neutral", "sad"],
            CorpusKind::Ravdess => &["angry", "calm", "disgust", "fear", "happy", "neutral", "sad", "surprise"],
            CorpusKind::Savee => &["angry", "disgust", "fear", "happy", "neutral", "sad", "surprise"],
        }
    }

    /// `(label, speaker)` for a file relative to the corpus root, or `None` if the name does not follow the convention.
    pub fn parse(self, rel: &Path) -> Option<(&'static str, String)> {
        let stem = rel.file_stem()?.to_str()?;
        let parent = |n: usize| {
            rel.ancestors()
                .nth(n)
                .and_then(|p| p.file_name())
                .and_then(|s| s.to_str())
                .map(str::to_string)
        };
        match self {
            CorpusKind::Emodb => {
                let chars: Vec<char> = stem.chars().collect();
                if chars.len() < 6 {
                    return None;
                }
                let label = match chars[5] {
                    'W' => "angry",
                    'L' => "boredom",
                    'E' => "disgust",
                    'A' => "fear",
                    'F' => "happy",
                    'T' => "sad",
                    'N' => "neutral",
                    _ => return None,
                };
                Some((label, chars[..2].iter().collect()))
            }
            CorpusKind::Ravdess => {
                let fields: Vec<&str> = stem.split('-').collect();
                if fields.len() != 7 {
                    return None;
                }
                let label = match fields[2] {
                    "01" => "neutral",
                    "02" => "calm",
                    "03" => "happy",
                    "04" => "sad",
                    "05" => "angry",
                    "06" => "fear",
                    "07" => "disgust",
                    "08" => "surprise",
                    _ => return None,
                };
                Some((label, fields[6].to_string()))
            }
            CorpusKind::Savee => {
                let (speaker, code) = match stem.split_once('_') {
                    Some((s, c)) => (Some(s.to_string()), c),
                    None => (parent(1), stem),
                };
                let prefix: String = code.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
                let label = match prefix.as_str() {
                    "a" => "angry",
                    "d" => "disgust",
                    "f" => "fear",
                    "h" => "happy",
                    "n" => "neutral",
                    "sa" => "sad",
                    "su" => "surprise",
                    _ => return None,
                };
                Some((label, speaker.unwrap_or_else(|| "unknown".into())))
            }
            CorpusKind::Casia => {
                let dir = parent(1)?.to_ascii_lowercase();
                let label = self.class_set().iter().find(|&&c| c == dir)?;
                Some((label, parent(2).unwrap_or_else(|| "unknown".into())))
            }
        }
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorpusKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "casia" => Ok(CorpusKind::Casia),
            "emodb" => Ok(CorpusKind::Emodb),
            "ravdess" => Ok(CorpusKind::Ravdess),
            "savee" => Ok(CorpusKind::Savee),
            _ => Err(Error::InvalidArgument(format!("unknown corpus kind {:?}", s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub manifest: Manifest,
    /// WAV files whose names did not map to a class.
    pub rejects: Vec<String>,
}

/// Walks `root` for WAV files and labels them by the corpus naming convention.
/// Entry paths are relative to `root`, `/`-separated, and sorted.
pub fn scan_corpus(root: &Path, kind: CorpusKind) -> Result<ScanReport> {
    let mut entries = Vec::new();
    let mut rejects = Vec::new();
    for item in WalkDir::new(root).follow_links(true) {
        let item = item.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        let path = item.path();
        let is_wav = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if !item.file_type().is_file() || !is_wav {
            continue;
        }
        let rel = path.strip_prefix(root).unwrap_or(path);
        let rel_str = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        match kind.parse(rel) {
            Some((label, speaker)) => entries.push(ManifestEntry {
                path: rel_str,
                label: label.to_string(),
                speaker,
                corpus: kind.name().to_string(),
            }),
            None => rejects.push(rel_str),
        }
    }
    if entries.is_empty() {
        return Err(Error::Data(format!(
            "no {} files found under {}",
            kind,
            root.display()
        )));
    }
    entries.sort();
    rejects.sort();
    let label_set = kind.class_set().iter().map(|s| s.to_string()).collect();
    Ok(ScanReport {
        manifest: Manifest::new(entries, label_set)?,
        rejects,
    })
}
