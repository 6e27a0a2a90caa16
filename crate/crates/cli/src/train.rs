use std::path::Path;

use gmtc_core::corpus::{make_splits, Manifest, SplitPlan, SplitScheme};
use gmtc_core::dsp::FeatureMatrix;
use gmtc_core::model::{checkpoint_save, ModelConfig};
use gmtc_core::trainer::{
    evaluate, render_run_config, run_cv, train, write_history_csv, CvSummary, Dataset, FoldResult, TrainConfig,
};
use gmtc_core::Result;
use serde::Serialize;

use crate::args::TrainArgs;
use crate::io::{create_dir, load_features, load_run_config, write, write_json};
use crate::run::RunRecorder;

#[derive(Serialize)]
struct Summary<'a> {
    scheme: String,
    seed: u64,
    #[serde(flatten)]
    cv: &'a CvSummary,
    best_epochs: Vec<usize>,
}

#[derive(Serialize)]
struct SplitFile<'a> {
    scheme: String,
    seed: u64,
    folds: Vec<SplitFold<'a>>,
}

#[derive(Serialize)]
struct SplitFold<'a> {
    train: Vec<&'a str>,
    test: Vec<&'a str>,
}

pub struct Experiment {
    pub features: Vec<FeatureMatrix>,
    pub labels: Vec<usize>,
    pub manifest: Manifest,
}

impl Experiment {
    pub fn load(cache: &Path) -> Result<Self> {
        let (features, manifest) = load_features(cache)?;
        Ok(Experiment {
            labels: manifest.label_indices(),
            features,
            manifest,
        })
    }

    pub fn dataset(&self) -> Result<Dataset<'_>> {
        Dataset::new(&self.features, &self.labels, &self.manifest)
    }

    pub fn seq_len(&self) -> usize {
        self.features.first().map_or(0, |f| f.frames.rows())
    }
}

/// Trains every fold of `plan`; holdout plans skip the cross-validation wrapper.
pub fn fit_plan(model: &ModelConfig, train_cfg: &TrainConfig, data: &Dataset<'_>, plan: &SplitPlan) -> Result<(Vec<FoldResult>, CvSummary)> {
    if plan.folds.len() >= 2 {
        return run_cv(model, train_cfg, data, plan);
    }
    let fold = &plan.folds[0];
    let outcome = train(model, train_cfg, data, fold)?;
    let report = evaluate(&outcome.checkpoint, data, &fold.test)?;
    let summary = CvSummary::from_reports(&[&report])?;
    Ok((vec![FoldResult { outcome, report }], summary))
}

pub fn run(args: TrainArgs) -> Result<()> {
    let exp = Experiment::load(&args.features)?;
    let data = exp.dataset()?;
    let (model, mut train_cfg) = load_run_config(args.config.as_deref(), exp.manifest.n_classes(), exp.seq_len())?;
    train_cfg.seed = args.seed;
    let scheme: SplitScheme = args.split.into();
    let plan = make_splits(&exp.manifest, scheme, args.seed)?;

    create_dir(&args.out)?;
    let config_text = render_run_config(&model, &train_cfg);
    let mut rec = RunRecorder::start("train", config_text.clone(), Some(args.seed));
    let config_path = args.out.join("config.txt");
    write(&config_path, &config_text)?;
    rec.artifact(&config_path);

    let paths = |idx: &[usize]| idx.iter().map(|&i| exp.manifest.entries[i].path.as_str()).collect();
    let split_file = SplitFile {
        scheme: scheme.to_string(),
        seed: args.seed,
        folds: plan.folds.iter().map(|f| SplitFold { train: paths(&f.train), test: paths(&f.test) }).collect(),
    };
    let split_path = args.out.join("split.json");
    write_json(&split_path, &split_file)?;
    rec.artifact(&split_path);

    let (results, summary) = fit_plan(&model, &train_cfg, &data, &plan)?;
    for (k, result) in results.iter().enumerate() {
        let dir = args.out.join(format!("fold{}", k));
        create_dir(&dir)?;
        let ckpt = dir.join("model.gmck");
        checkpoint_save(&ckpt, &result.outcome.checkpoint)?;
        let history = dir.join("history.csv");
        write_history_csv(&history, &result.outcome.history)?;
        let report = dir.join("report.json");
        result.report.write_json(&report)?;
        let confusion = dir.join("confusion.csv");
        result.report.write_confusion_csv(&confusion)?;
        for p in [ckpt, history, report, confusion] {
            rec.artifact(p);
        }
        log::info!(
            "fold {}: WAR {:.4} UAR {:.4} (best epoch {})",
            k,
            result.report.war,
            result.report.uar,
            result.outcome.checkpoint.meta.epoch
        );
    }
    let summary_path = args.out.join("summary.json");
    write_json(
        &summary_path,
        &Summary {
            scheme: scheme.to_string(),
            seed: args.seed,
            cv: &summary,
            best_epochs: results.iter().map(|r| r.outcome.checkpoint.meta.epoch).collect(),
        },
    )?;
    rec.artifact(&summary_path);
    println!(
        "WAR max {:.4} mean {:.4} ± {:.4} | UAR max {:.4} mean {:.4} ± {:.4}",
        summary.war.max, summary.war.mean, summary.war.std, summary.uar.max, summary.uar.mean, summary.uar.std
    );
    rec.finish(&args.out.join("run.json"))
}
