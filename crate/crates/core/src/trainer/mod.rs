//! Deterministic mini-batch training, evaluation and cross-validation.

mod config;

pub use config::{parse_run_config, render_run_config, TrainConfig, TRAIN_KEYS};

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Fold, Manifest, SplitPlan};
use crate::dsp::FeatureMatrix;
use crate::error::{Error, Result};
use crate::metrics::{compute_report, EvalReport};
use crate::model::{accumulate_example, forward, Checkpoint, ModelConfig, ParamStore, TrainingMeta};
use crate::ndcore::AdamState;

/// Examples per gradient work unit. Fixed so that the reduction order, and
/// therefore every bit of the result, is independent of the thread count.
const CHUNK: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_war: f64,
    pub val_war: f64,
    /// Wall-clock seconds since training started.
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    /// Parameters from the best validation epoch.
    pub checkpoint: Checkpoint,
    pub history: Vec<EpochRecord>,
}

/// Labelled, padded examples aligned with a manifest.
#[derive(Clone, Copy, Debug)]
pub struct Dataset<'a> {
    pub features: &'a [FeatureMatrix],
    pub labels: &'a [usize],
    pub label_set: &'a [String],
}

impl<'a> Dataset<'a> {
    /// Checks that `features[i]` was extracted from `manifest.entries[i]`.
    pub fn new(features: &'a [FeatureMatrix], labels: &'a [usize], manifest: &'a Manifest) -> Result<Self> {
        if features.len() != manifest.len() || labels.len() != manifest.len() {
            return Err(Error::Data(format!(
                "{} feature records and {} labels for {} manifest entries",
                features.len(),
                labels.len(),
                manifest.len()
            )));
        }
        for (i, (f, e)) in features.iter().zip(&manifest.entries).enumerate() {
            if f.clip_id != e.path {
                return Err(Error::Data(format!(
                    "feature record {} is {:?} but manifest entry is {:?}",
                    i, f.clip_id, e.path
                )));
            }
        }
        Ok(Dataset {
            features,
            labels,
            label_set: &manifest.label_set,
        })
    }

    fn check_model(&self, cfg: &ModelConfig, indices: &[usize]) -> Result<()> {
        if cfg.n_classes != self.label_set.len() {
            return Err(Error::Config(format!(
                "model has {} classes, data has {}",
                cfg.n_classes,
                self.label_set.len()
            )));
        }
        for &i in indices {
            let f = self.features.get(i).ok_or_else(|| Error::InvalidArgument(format!("index {} out of range", i)))?;
            if f.frames.shape() != [cfg.seq_len, cfg.channels] {
                return Err(Error::Shape(format!(
                    "clip {:?} has shape {:?}, model expects [{}, {}]",
                    f.clip_id,
                    f.frames.shape(),
                    cfg.seq_len,
                    cfg.channels
                )));
            }
            if self.labels[i] >= cfg.n_classes {
                return Err(Error::Data(format!("label {} out of range", self.labels[i])));
            }
        }
        Ok(())
    }
}

/// Summed loss, correct count and summed gradients over `batch`.
pub fn batch_gradient(
    cfg: &ModelConfig,
    params: &ParamStore<f32>,
    data: &Dataset<'_>,
    batch: &[usize],
) -> Result<(f64, usize, ParamStore<f32>)> {
    let partials: Vec<(f64, usize, ParamStore<f32>)> = batch
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut grads = params.zeros_like();
            let mut loss = 0.0f64;
            let mut correct = 0usize;
            for &i in chunk {
                let f = &data.features[i];
                let label = data.labels[i];
                let ex = accumulate_example(cfg, params, &f.frames, f.true_len, label, &mut grads)?;
                loss += ex.loss as f64;
                correct += usize::from(argmax(ex.probs.data()) == label);
            }
            Ok((loss, correct, grads))
        })
        .collect::<Result<_>>()?;
    let mut iter = partials.into_iter();
    let (mut loss, mut correct, mut grads) = iter.next().ok_or_else(|| Error::InvalidArgument("empty batch".into()))?;
    for (l, c, g) in iter {
        loss += l;
        correct += c;
        grads.add_assign(&g);
    }
    Ok((loss, correct, grads))
}

pub(crate) fn argmax(v: &[f32]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Predicted class for each index, in order.
pub fn predict(cfg: &ModelConfig, params: &ParamStore<f32>, data: &Dataset<'_>, indices: &[usize]) -> Result<Vec<usize>> {
    indices
        .par_iter()
        .map(|&i| {
            let f = &data.features[i];
            let logits = forward(cfg, params, &f.frames, f.true_len)?;
            Ok(argmax(logits.data()))
        })
        .collect()
}

fn war_of(pred: &[usize], data: &Dataset<'_>, indices: &[usize]) -> f64 {
    let correct = pred.iter().zip(indices).filter(|(p, &i)| **p == data.labels[i]).count();
    correct as f64 / indices.len() as f64
}

pub fn train(model_cfg: &ModelConfig, train_cfg: &TrainConfig, data: &Dataset<'_>, fold: &Fold) -> Result<TrainOutcome> {
    model_cfg.validate()?;
    train_cfg.validate()?;
    if fold.train.is_empty() || fold.test.is_empty() {
        return Err(Error::Data("fold needs non-empty train and test sets".into()));
    }
    data.check_model(model_cfg, &fold.train)?;
    data.check_model(model_cfg, &fold.test)?;

    let started = Instant::now();
    let mut params = ParamStore::<f32>::init(model_cfg, train_cfg.seed);
    let mut adam = AdamState::new(train_cfg.adam, params.tensors());
    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.seed);
    rng.set_stream(1);
    let mut order = fold.train.clone();

    let mut history = Vec::new();
    let mut best: Option<(f64, f64, usize, ParamStore<f32>)> = None;

    for epoch in 1..=train_cfg.max_epochs {
        if train_cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for (b, batch) in order.chunks(train_cfg.batch_size).enumerate() {
            let (loss, c, mut grads) = batch_gradient(model_cfg, &params, data, batch)?;
            if !loss.is_finite() || !grads.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite loss or gradient at epoch {}, batch {} (loss {})",
                    epoch, b, loss
                )));
            }
            grads.scale(1.0 / batch.len() as f32);
            adam.step(&mut params.tensors_mut(), &grads.tensors())?;
            loss_sum += loss;
            correct += c;
        }
        let n = order.len() as f64;
        let train_war = correct as f64 / n;
        let val_war = war_of(&predict(model_cfg, &params, data, &fold.test)?, data, &fold.test);
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / n,
            train_war,
            val_war,
            seconds: started.elapsed().as_secs_f64(),
        };
        log::debug!(
            "epoch {} loss {:.4} train {:.3} val {:.3}",
            epoch,
            record.train_loss,
            train_war,
            val_war
        );
        history.push(record);

        let improved = match &best {
            None => true,
            Some((bv, bt, _, _)) => (val_war, train_war) >= (*bv, *bt),
        };
        if improved {
            best = Some((val_war, train_war, epoch, params.clone()));
        }
        let best_epoch = best.as_ref().map_or(epoch, |b| b.2);
        if epoch - best_epoch >= train_cfg.patience {
            log::info!("early stop at epoch {} (best {})", epoch, best_epoch);
            break;
        }
    }

    let (best_val, _, best_epoch, best_params) = best.expect("at least one epoch ran");
    Ok(TrainOutcome {
        checkpoint: Checkpoint {
            config: model_cfg.clone(),
            params: best_params,
            meta: TrainingMeta {
                epoch: best_epoch,
                best_val_war: best_val,
                seed: train_cfg.seed,
                labels: data.label_set.to_vec(),
            },
        },
        history,
    })
}

/// Scores `checkpoint` on `indices`, with classes in the dataset's label order.
pub fn evaluate(checkpoint: &Checkpoint, data: &Dataset<'_>, indices: &[usize]) -> Result<EvalReport> {
    if indices.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate on an empty test set".into()));
    }
    if !checkpoint.meta.labels.is_empty() && checkpoint.meta.labels != data.label_set {
        return Err(Error::Data(format!(
            "checkpoint labels {:?} differ from data labels {:?}",
            checkpoint.meta.labels, data.label_set
        )));
    }
    data.check_model(&checkpoint.config, indices)?;
    let pred = predict(&checkpoint.config, &checkpoint.params, data, indices)?;
    let truth: Vec<usize> = indices.iter().map(|&i| data.labels[i]).collect();
    compute_report(&truth, &pred, data.label_set)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Result<Spread> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("no values to summarise".into()));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Ok(Spread {
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct FoldResult {
    pub outcome: TrainOutcome,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub folds: usize,
    pub war: Spread,
    pub uar: Spread,
    pub fold_war: Vec<f64>,
    pub fold_uar: Vec<f64>,
}

impl CvSummary {
    pub fn from_reports(reports: &[&EvalReport]) -> Result<Self> {
        let fold_war: Vec<f64> = reports.iter().map(|r| r.war).collect();
        let fold_uar: Vec<f64> = reports.iter().map(|r| r.uar).collect();
        Ok(CvSummary {
            folds: reports.len(),
            war: Spread::of(&fold_war)?,
            uar: Spread::of(&fold_uar)?,
            fold_war,
            fold_uar,
        })
    }
}

/// Trains and evaluates every fold of `plan` in order.
pub fn run_cv(
    model_cfg: &ModelConfig,
    train_cfg: &TrainConfig,
    data: &Dataset<'_>,
    plan: &SplitPlan,
) -> Result<(Vec<FoldResult>, CvSummary)> {
    if plan.folds.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 2 folds, plan has {}",
            plan.folds.len()
        )));
    }
    let mut results = Vec::with_capacity(plan.folds.len());
    for (k, fold) in plan.folds.iter().enumerate() {
        let wrap = |e: Error| Error::Data(format!("fold {}: {}", k, e));
        let outcome = train(model_cfg, train_cfg, data, fold).map_err(|e| match e {
            Error::Numeric(m) => Error::Numeric(format!("fold {}: {}", k, m)),
            other => wrap(other),
        })?;
        let report = evaluate(&outcome.checkpoint, data, &fold.test).map_err(wrap)?;
        results.push(FoldResult { outcome, report });
    }
    let reports: Vec<&EvalReport> = results.iter().map(|r| &r.report).collect();
    let summary = CvSummary::from_reports(&reports)?;
    Ok((results, summary))
}

pub fn history_csv(history: &[EpochRecord]) -> String {
    let mut out = String::from("epoch,train_loss,train_war,val_war,seconds\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            r.epoch, r.train_loss, r.train_war, r.val_war, r.seconds
        ));
    }
    out
}

pub fn write_history_csv(path: &Path, history: &[EpochRecord]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(history_csv(history).as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_of_two_folds() {
        let s = Spread::of(&[0.8, 0.9]).unwrap();
        assert!((s.mean - 0.85).abs() < 1e-12);
        assert!((s.std - 0.05).abs() < 1e-12);
        assert_eq!(s.max, 0.9);
        assert!(Spread::of(&[]).is_err());
    }

    #[test]
    fn argmax_takes_first_maximum() {
        assert_eq!(argmax(&[0.1, 0.5, 0.5, 0.2]), 1);
    }
}
