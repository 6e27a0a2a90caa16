//! Labelled utterance inventories, corpus scanners, synthetic data and splits.

mod manifest;
mod scan;
mod split;
mod synth;

pub use manifest::{load_manifest_csv, manifest_to_csv, parse_manifest_csv, write_manifest_csv, Manifest, ManifestEntry};
pub use scan::{scan_corpus, CorpusKind, ScanReport};
pub use split::{make_splits, make_splits_for_labels, Fold, SplitPlan, SplitScheme};
pub use synth::{synth_class_names, synth_clip, synth_generate};
