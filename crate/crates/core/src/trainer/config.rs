use crate::error::{Error, Result};
use crate::kv::KvText;
use crate::model::{ModelConfig, MODEL_KEYS};
use crate::ndcore::AdamConfig;

pub const TRAIN_KEYS: &[&str] = &[
    "batch_size",
    "lr",
    "beta1",
    "beta2",
    "eps",
    "max_epochs",
    "patience",
    "seed",
    "shuffle",
];

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub max_epochs: usize,
    /// Epochs without a new best validation WAR before stopping.
    pub patience: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 64,
            adam: AdamConfig::default(),
            max_epochs: 300,
            patience: 50,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be at least 1".into()));
        }
        if self.patience > self.max_epochs {
            return Err(Error::Config(format!(
                "patience {} exceeds max_epochs {}",
                self.patience, self.max_epochs
            )));
        }
        let a = &self.adam;
        if !(a.lr >= 0.0 && a.lr.is_finite()) {
            return Err(Error::Config("lr must be finite and non-negative".into()));
        }
        if !(0.0..1.0).contains(&a.beta1) || !(0.0..1.0).contains(&a.beta2) {
            return Err(Error::Config("beta1 and beta2 must lie in [0, 1)".into()));
        }
        if !(a.eps > 0.0) {
            return Err(Error::Config("eps must be positive".into()));
        }
        Ok(())
    }

    pub fn to_kv(&self) -> KvText {
        let mut kv = KvText::new();
        kv.set("batch_size", self.batch_size);
        kv.set("lr", self.adam.lr);
        kv.set("beta1", self.adam.beta1);
        kv.set("beta2", self.adam.beta2);
        kv.set("eps", self.adam.eps);
        kv.set("max_epochs", self.max_epochs);
        kv.set("patience", self.patience);
        kv.set("seed", self.seed);
        kv.set("shuffle", self.shuffle);
        kv
    }

    pub fn from_kv(kv: &KvText) -> Result<Self> {
        let d = TrainConfig::default();
        let cfg = TrainConfig {
            batch_size: kv.get_or("batch_size", d.batch_size)?,
            adam: AdamConfig {
                lr: kv.get_or("lr", d.adam.lr)?,
                beta1: kv.get_or("beta1", d.adam.beta1)?,
                beta2: kv.get_or("beta2", d.adam.beta2)?,
                eps: kv.get_or("eps", d.adam.eps)?,
            },
            max_epochs: kv.get_or("max_epochs", d.max_epochs)?,
            patience: kv.get_or("patience", d.patience)?,
            seed: kv.get_or("seed", d.seed)?,
            shuffle: kv.get_or("shuffle", d.shuffle)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses a combined model + training config file, rejecting unknown keys.
pub fn parse_run_config(text: &str) -> Result<(ModelConfig, TrainConfig)> {
    let kv = KvText::parse(text)?;
    let known: Vec<&str> = MODEL_KEYS.iter().chain(TRAIN_KEYS).copied().collect();
    kv.reject_unknown(&known)?;
    Ok((ModelConfig::from_kv(&kv)?, TrainConfig::from_kv(&kv)?))
}

/// Canonical text of a model + training config pair.
pub fn render_run_config(model: &ModelConfig, train: &TrainConfig) -> String {
    let mut kv = model.to_kv();
    kv.merge(&train.to_kv());
    kv.render()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let text = render_run_config(&ModelConfig::default(), &TrainConfig::default());
        let (m, t) = parse_run_config(&text).unwrap();
        assert_eq!(m, ModelConfig::default());
        assert_eq!(t, TrainConfig::default());
    }

    #[test]
    fn partial_file_uses_defaults() {
        let (m, t) = parse_run_config("n_gcb = 4\nmax_epochs=10\npatience=5\n").unwrap();
        assert_eq!(m.n_gcb, 4);
        assert_eq!(t.max_epochs, 10);
        assert_eq!(t.batch_size, 64);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse_run_config("batch_size=0").is_err());
        assert!(parse_run_config("patience=400").is_err());
        assert!(parse_run_config("learning_rate=0.1").is_err());
    }
}
