use gmtc_core::corpus::{make_splits, Fold, Manifest, ManifestEntry, SplitScheme};
use gmtc_core::dsp::FeatureMatrix;
use gmtc_core::model::{ModelConfig, ParamStore};
use gmtc_core::trainer::*;
use gmtc_core::{Error, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const T: usize = 32;
const K: usize = 3;

struct Toy {
    features: Vec<FeatureMatrix>,
    labels: Vec<usize>,
    manifest: Manifest,
}

fn toy(per_class: usize, seed: u64) -> Toy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let label_set: Vec<String> = (0..K).map(|c| format!("class{}", c)).collect();
    let (mut features, mut labels, mut entries) = (Vec::new(), Vec::new(), Vec::new());
    for c in 0..K {
        for i in 0..per_class {
            let id = format!("{}/{}.wav", c, i);
            let data = (0..T * 39)
                .map(|j| if j % 39 == c { 1.0 } else { 0.0 } + rng.gen_range(-0.5f32..0.5))
                .collect();
            features.push(FeatureMatrix::new(Tensor::from_vec(&[T, 39], data).unwrap(), T - 4, id.clone()).unwrap());
            labels.push(c);
            entries.push(ManifestEntry { path: id, label: label_set[c].clone(), speaker: "s".into(), corpus: "toy".into() });
        }
    }
    Toy { features, labels, manifest: Manifest::new(entries, label_set).unwrap() }
}

fn model() -> ModelConfig {
    ModelConfig { n_gcb: 2, n_gscb: 1, n_classes: K, seq_len: T, ..ModelConfig::default() }
}

fn quick(epochs: usize) -> TrainConfig {
    TrainConfig { batch_size: 8, max_epochs: epochs, patience: epochs, seed: 3, ..TrainConfig::default() }
}

fn holdout(t: &Toy) -> Fold {
    make_splits(&t.manifest, SplitScheme::Holdout, 1).unwrap().folds.remove(0)
}

#[test]
fn zero_head_starts_at_log_k() {
    let t = toy(5, 0);
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    let mut params = ParamStore::<f32>::init(&model(), 4);
    params.head.weight.fill(0.0);
    params.head.bias.fill(0.0);
    let batch: Vec<usize> = (0..t.labels.len()).collect();
    let (loss, _, _) = batch_gradient(&model(), &params, &data, &batch).unwrap();
    assert!((loss / batch.len() as f64 - (K as f64).ln()).abs() < 1e-5);
}

#[test]
fn zero_learning_rate_freezes_parameters() {
    let t = toy(5, 1);
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    let mut cfg = quick(3);
    cfg.adam.lr = 0.0;
    let out = train(&model(), &cfg, &data, &holdout(&t)).unwrap();
    assert_eq!(out.checkpoint.params, ParamStore::<f32>::init(&model(), cfg.seed));
}

#[test]
fn same_seed_same_everything() {
    let t = toy(6, 2);
    let before = t.features.clone();
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    let fold = holdout(&t);
    let a = train(&model(), &quick(6), &data, &fold).unwrap();
    let b = train(&model(), &quick(6), &data, &fold).unwrap();
    assert_eq!(a.checkpoint, b.checkpoint);
    let strip = |h: &[EpochRecord]| h.iter().map(|r| (r.epoch, r.train_loss, r.train_war, r.val_war)).collect::<Vec<_>>();
    assert_eq!(strip(&a.history), strip(&b.history));
    assert_eq!(t.features, before);

    let c = train(&model(), &TrainConfig { seed: 4, ..quick(6) }, &data, &fold).unwrap();
    assert_ne!(a.checkpoint.params, c.checkpoint.params);
}

#[test]
fn best_epoch_is_restored() {
    let t = toy(6, 3);
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    let fold = holdout(&t);
    let out = train(&model(), &TrainConfig { patience: 4, ..quick(40) }, &data, &fold).unwrap();
    let best = out.history.iter().map(|r| r.val_war).fold(0.0, f64::max);
    assert_eq!(out.checkpoint.meta.best_val_war, best);
    let rec = &out.history[out.checkpoint.meta.epoch - 1];
    assert_eq!(rec.val_war, best);
    assert_eq!(evaluate(&out.checkpoint, &data, &fold.test).unwrap().war, best);
    assert!(out.history.len() - out.checkpoint.meta.epoch <= 4);
}

#[test]
fn learns_the_toy_task() {
    let t = toy(8, 4);
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    let fold = holdout(&t);
    let out = train(&model(), &TrainConfig { adam: gmtc_core::AdamConfig { lr: 3e-3, ..Default::default() }, ..quick(40) }, &data, &fold).unwrap();
    let report = evaluate(&out.checkpoint, &data, &fold.train).unwrap();
    assert_eq!(report.war, 1.0);
    assert_eq!(report.label_set, t.manifest.label_set);
}

#[test]
fn cross_validation_summary() {
    let t = toy(5, 5);
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    let plan = make_splits(&t.manifest, SplitScheme::Cv5, 2).unwrap();
    let (folds, summary) = run_cv(&model(), &quick(2), &data, &plan).unwrap();
    assert_eq!(folds.len(), 5);
    assert!(summary.war.min <= summary.war.mean && summary.war.mean <= summary.war.max);
    let single = make_splits(&t.manifest, SplitScheme::Holdout, 2).unwrap();
    assert!(run_cv(&model(), &quick(2), &data, &single).is_err());
}

#[test]
fn bad_inputs_are_reported() {
    let mut t = toy(5, 6);
    let fold = holdout(&t);
    {
        let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
        let out = train(&model(), &quick(1), &data, &fold).unwrap();
        assert!(evaluate(&out.checkpoint, &data, &[]).is_err());
        let wrong = ModelConfig { seq_len: T + 1, ..model() };
        assert!(matches!(train(&wrong, &quick(1), &data, &fold), Err(Error::Shape(_))));
    }
    assert!(Dataset::new(&t.features[1..], &t.labels, &t.manifest).is_err());
    t.features[fold.train[0]].frames.data_mut()[0] = f32::NAN;
    let data = Dataset::new(&t.features, &t.labels, &t.manifest).unwrap();
    assert!(matches!(train(&model(), &quick(1), &data, &fold), Err(Error::Numeric(_))));
}

#[test]
fn history_csv_header() {
    let csv = history_csv(&[EpochRecord { epoch: 1, train_loss: 0.5, train_war: 0.25, val_war: 0.5, seconds: 1.25 }]);
    assert_eq!(csv, "epoch,train_loss,train_war,val_war,seconds\n1,0.5,0.25,0.5,1.250\n");
}
