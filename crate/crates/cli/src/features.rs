use std::path::Path;

use gmtc_core::corpus::{load_manifest_csv, scan_corpus, CorpusKind, Manifest};
use gmtc_core::dsp::{cache_write, extract_file, pad_all, padded_length, MfccConfig, MfccExtractor, TARGET_RATE};
use gmtc_core::{Error, Result};
use rayon::prelude::*;

use crate::args::FeaturesArgs;
use crate::io::{create_dir, sidecar_manifest};
use crate::run::RunRecorder;

fn load_inventory(corpus: &str, root: &Path) -> Result<Manifest> {
    let as_path = Path::new(corpus);
    if corpus.ends_with(".csv") || as_path.is_file() {
        return load_manifest_csv(as_path, None);
    }
    let kind: CorpusKind = corpus.parse()?;
    let report = scan_corpus(root, kind)?;
    if !report.rejects.is_empty() {
        log::warn!("{} files did not match the {} naming scheme", report.rejects.len(), kind);
    }
    Ok(report.manifest)
}

pub fn run(args: FeaturesArgs) -> Result<()> {
    if !args.root.is_dir() {
        return Err(Error::Data(format!("corpus root {} is not a directory", args.root.display())));
    }
    let manifest = load_inventory(&args.corpus, &args.root)?;
    let extractor = MfccExtractor::new(MfccConfig::default(), TARGET_RATE);
    let mut rec = RunRecorder::start("features", format!("corpus={}\ntmax={:?}\n", args.corpus, args.tmax), None);

    let results: Vec<_> = manifest
        .entries
        .par_iter()
        .map(|e| extract_file(&extractor, &args.root.join(&e.path), &e.path))
        .collect();
    let mut kept_entries = Vec::new();
    let mut features = Vec::new();
    let mut failures = 0usize;
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(f) => {
                kept_entries.push(entry.clone());
                features.push(f);
            }
            Err(e) => {
                failures += 1;
                log::warn!("skipping {}: {}", entry.path, e);
            }
        }
    }
    if failures * 100 > manifest.len() {
        return Err(Error::Data(format!(
            "{} of {} files failed, more than 1%",
            failures,
            manifest.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::Data("no features extracted".into()));
    }

    let t_max = match args.tmax {
        Some(t) => t as usize,
        None => padded_length(features.iter().map(|f| f.true_len)),
    };
    let (padded, truncated) = pad_all(&features, t_max)?;
    if truncated > 0 {
        log::warn!("{} clips truncated to {} frames", truncated, t_max);
    }

    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    cache_write(&args.out, &padded)?;
    let kept = Manifest::new(kept_entries, manifest.label_set.clone())?;
    let sidecar = sidecar_manifest(&args.out);
    gmtc_core::corpus::write_manifest_csv(&sidecar, &kept)?;
    rec.artifact(&args.out);
    rec.artifact(&sidecar);
    log::info!("{} clips, {} frames each, written to {}", padded.len(), t_max, args.out.display());
    let mut run_path = args.out.as_os_str().to_owned();
    run_path.push(".run.json");
    rec.finish(Path::new(&run_path))
}
