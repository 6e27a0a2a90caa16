use gmtc_core::analysis::{
    ae_project, ae_train, entropy_csv, entropy_table, export_feature_maps, pooled_high_level, projection_csv,
    utterance_entropy, AeConfig,
};
use gmtc_core::model::checkpoint_load;
use gmtc_core::{Error, Result};
use rayon::prelude::*;

use crate::args::{AnalysisKind, AnalyzeArgs};
use crate::io::{create_dir, write};
use crate::run::RunRecorder;
use crate::train::Experiment;

fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let ckpt = checkpoint_load(&args.ckpt)?;
    let exp = Experiment::load(&args.features)?;
    if exp.seq_len() != ckpt.config.seq_len || exp.features[0].frames.cols() != ckpt.config.channels {
        return Err(Error::Data(format!(
            "checkpoint expects {} x {} inputs, cache holds {} x {}",
            ckpt.config.seq_len,
            ckpt.config.channels,
            exp.seq_len(),
            exp.features[0].frames.cols()
        )));
    }
    if !ckpt.meta.labels.is_empty() && ckpt.meta.labels != exp.manifest.label_set {
        return Err(Error::Data("checkpoint and cache label sets differ".into()));
    }
    create_dir(&args.out)?;
    let mut rec = RunRecorder::start("analyze", ckpt.config.canonical_text(), Some(args.seed));

    match args.kind {
        AnalysisKind::Entropy => {
            let values: Vec<f64> = exp
                .features
                .par_iter()
                .map(|f| utterance_entropy(&ckpt, f))
                .collect::<Result<_>>()?;
            let samples: Vec<(String, String, f64)> = exp
                .manifest
                .entries
                .iter()
                .zip(values)
                .map(|(e, v)| (e.corpus.clone(), e.label.clone(), v))
                .collect();
            let path = args.out.join("entropy.csv");
            write(&path, entropy_csv(&entropy_table(&samples)))?;
            rec.artifact(path);
        }
        AnalysisKind::Maps => {
            let n = args.limit.unwrap_or(exp.features.len()).min(exp.features.len());
            for f in &exp.features[..n] {
                let dir = args.out.join(file_stem(&f.clip_id));
                create_dir(&dir)?;
                for (i, map) in export_feature_maps(&ckpt, &f.frames, f.true_len)?.iter().enumerate() {
                    let base = format!("{:02}_{}", i, map.source);
                    let pgm = dir.join(format!("{}.pgm", base));
                    let csv = dir.join(format!("{}.csv", base));
                    map.write_pgm(&pgm)?;
                    map.write_csv(&csv)?;
                    rec.artifact(pgm);
                    rec.artifact(csv);
                }
            }
        }
        AnalysisKind::Project => {
            let pooled: Vec<Vec<f64>> = exp
                .features
                .par_iter()
                .map(|f| pooled_high_level(&ckpt, f))
                .collect::<Result<_>>()?;
            let model = ae_train(&pooled, args.seed, &AeConfig::default())?;
            log::info!("autoencoder MSE {:.5} -> {:.5}", model.initial_mse, model.final_mse);
            let points = ae_project(&model, &pooled)?;
            let ids: Vec<String> = exp.manifest.entries.iter().map(|e| e.path.clone()).collect();
            let labels: Vec<String> = exp.manifest.entries.iter().map(|e| e.label.clone()).collect();
            let path = args.out.join("projection.csv");
            write(&path, projection_csv(&ids, &labels, &points))?;
            rec.artifact(path);
        }
    }
    rec.finish(&args.out.join("run.json"))
}
