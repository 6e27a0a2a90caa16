use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kv::KvText;

/// How dilation rates are assigned to the gating levels of each block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DrdScheme {
    /// Level `l` of block `i` uses `2^(i-1) · 2^(l-1)`.
    Ours,
    /// Every level of block `i` uses `2^(i-1)`.
    Raw,
}

/// What feeds the classifier: the sum of every block output or only the last one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SkipMode {
    MultiScale,
    MaxScale,
}

impl fmt::Display for DrdScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DrdScheme::Ours => "ours",
            DrdScheme::Raw => "raw",
        })
    }
}

impl FromStr for DrdScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ours" => Ok(DrdScheme::Ours),
            "raw" => Ok(DrdScheme::Raw),
            _ => Err(Error::Config(format!("unknown drd scheme {:?}", s))),
        }
    }
}

impl fmt::Display for SkipMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipMode::MultiScale => "multi_scale",
            SkipMode::MaxScale => "max_scale",
        })
    }
}

impl FromStr for SkipMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multi_scale" | "multi" => Ok(SkipMode::MultiScale),
            "max_scale" | "max" => Ok(SkipMode::MaxScale),
            _ => Err(Error::Config(format!("unknown skip mode {:?}", s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub channels: usize,
    pub kernel_size: usize,
    pub n_gcb: usize,
    pub gating_levels: usize,
    pub n_gscb: usize,
    pub drd_scheme: DrdScheme,
    pub skip_mode: SkipMode,
    pub leaky_alpha: f64,
    pub n_classes: usize,
    pub seq_len: usize,
    /// Pool only over the unpadded frames.
    pub masked_gap: bool,
}

impl Default for ModelConfig {
    /// The 7-block, 256-frame receptive field model.
    fn default() -> Self {
        ModelConfig {
            channels: 39,
            kernel_size: 2,
            n_gcb: 7,
            gating_levels: 2,
            n_gscb: 3,
            drd_scheme: DrdScheme::Ours,
            skip_mode: SkipMode::MultiScale,
            leaky_alpha: 0.05,
            n_classes: 6,
            seq_len: 256,
            masked_gap: false,
        }
    }
}

pub const MODEL_KEYS: &[&str] = &[
    "channels",
    "kernel_size",
    "n_gcb",
    "gating_levels",
    "n_gscb",
    "drd_scheme",
    "skip_mode",
    "leaky_alpha",
    "n_classes",
    "seq_len",
    "masked_gap",
];

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.channels == 0 {
            return bad("channels must be positive");
        }
        if self.kernel_size == 0 {
            return bad("kernel_size must be positive");
        }
        if self.n_gcb == 0 {
            return bad("n_gcb must be at least 1");
        }
        if self.n_gcb > 30 {
            return bad("n_gcb must be at most 30");
        }
        if self.gating_levels == 0 {
            return bad("gating_levels must be at least 1");
        }
        if self.n_gscb == 0 {
            return bad("n_gscb must be at least 1");
        }
        if self.n_classes < 2 {
            return bad("n_classes must be at least 2");
        }
        if self.seq_len == 0 {
            return bad("seq_len must be positive");
        }
        if !(self.leaky_alpha.is_finite() && self.leaky_alpha >= 0.0) {
            return bad("leaky_alpha must be finite and non-negative");
        }
        Ok(())
    }

    /// Dilation of gating level `level` in block `block` (both 1-based).
    ///
    /// Under `ours`, levels past the second keep doubling but never exceed
    /// `2^n_gcb`, the second-level rate of the last block in the two-level layout.
    pub fn dilation(&self, block: usize, level: usize) -> usize {
        match self.drd_scheme {
            DrdScheme::Raw => 1 << (block - 1),
            DrdScheme::Ours => 1 << ((block - 1) + (level - 1)).min(self.n_gcb),
        }
    }

    /// Largest dilation used anywhere in the network.
    pub fn max_dilation(&self) -> usize {
        (1..=self.n_gcb)
            .flat_map(|i| (1..=self.gating_levels).map(move |l| (i, l)))
            .map(|(i, l)| self.dilation(i, l))
            .max()
            .unwrap_or(1)
    }

    pub fn to_kv(&self) -> KvText {
        let mut kv = KvText::new();
        kv.set("channels", self.channels);
        kv.set("kernel_size", self.kernel_size);
        kv.set("n_gcb", self.n_gcb);
        kv.set("gating_levels", self.gating_levels);
        kv.set("n_gscb", self.n_gscb);
        kv.set("drd_scheme", self.drd_scheme);
        kv.set("skip_mode", self.skip_mode);
        kv.set("leaky_alpha", self.leaky_alpha);
        kv.set("n_classes", self.n_classes);
        kv.set("seq_len", self.seq_len);
        kv.set("masked_gap", self.masked_gap);
        kv
    }

    /// Reads model keys, falling back to defaults for anything absent. Other keys are ignored.
    pub fn from_kv(kv: &KvText) -> Result<Self> {
        let d = ModelConfig::default();
        let cfg = ModelConfig {
            channels: kv.get_or("channels", d.channels)?,
            kernel_size: kv.get_or("kernel_size", d.kernel_size)?,
            n_gcb: kv.get_or("n_gcb", d.n_gcb)?,
            gating_levels: kv.get_or("gating_levels", d.gating_levels)?,
            n_gscb: kv.get_or("n_gscb", d.n_gscb)?,
            drd_scheme: kv.get_or("drd_scheme", d.drd_scheme)?,
            skip_mode: kv.get_or("skip_mode", d.skip_mode)?,
            leaky_alpha: kv.get_or("leaky_alpha", d.leaky_alpha)?,
            n_classes: kv.get_or("n_classes", d.n_classes)?,
            seq_len: kv.get_or("seq_len", d.seq_len)?,
            masked_gap: kv.get_or("masked_gap", d.masked_gap)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn canonical_text(&self) -> String {
        self.to_kv().render()
    }
}
