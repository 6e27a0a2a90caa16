use crate::model::config::ModelConfig;

/// Closed-form trainable scalar count: entry 1×1 conv, two convolutions per
/// sub-block, and the dense head.
pub fn param_count(cfg: &ModelConfig) -> usize {
    let c = cfg.channels;
    let entry = c * c + c;
    let conv = c * c * cfg.kernel_size + c;
    let gscbs = cfg.n_gcb * cfg.gating_levels * cfg.n_gscb * 2 * conv;
    let head = c * cfg.n_classes + cfg.n_classes;
    entry + gscbs + head
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReceptiveField {
    /// `kernel_size × largest dilation`, the conventional model name ("-256").
    pub nominal: usize,
    /// Frames seen by the last output along the deepest path.
    pub actual: usize,
}

pub fn receptive_field(cfg: &ModelConfig) -> ReceptiveField {
    let dilation_sum: usize = (1..=cfg.n_gcb)
        .flat_map(|i| (1..=cfg.gating_levels).map(move |l| (i, l)))
        .map(|(i, l)| cfg.dilation(i, l))
        .sum();
    ReceptiveField {
        nominal: cfg.kernel_size * cfg.max_dilation(),
        actual: 1 + (cfg.kernel_size - 1) * dilation_sum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::config::DrdScheme;

    fn cfg(drd: DrdScheme, n_gcb: usize) -> ModelConfig {
        ModelConfig {
            drd_scheme: drd,
            n_gcb,
            n_classes: 6,
            ..ModelConfig::default()
        }
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(param_count(&cfg(DrdScheme::Ours, 7)), 260_604);
        assert_eq!(param_count(&cfg(DrdScheme::Ours, 6)), 223_632);
        assert_eq!(param_count(&cfg(DrdScheme::Raw, 7)), 260_604);
        assert_eq!(param_count(&cfg(DrdScheme::Raw, 8)), 297_576);
    }

    #[test]
    fn receptive_fields() {
        let rf = receptive_field(&cfg(DrdScheme::Ours, 7));
        assert_eq!((rf.nominal, rf.actual), (256, 382));
        let rf = receptive_field(&cfg(DrdScheme::Ours, 6));
        assert_eq!((rf.nominal, rf.actual), (128, 190));
        let rf = receptive_field(&cfg(DrdScheme::Raw, 8));
        assert_eq!((rf.nominal, rf.actual), (256, 511));
        let rf = receptive_field(&cfg(DrdScheme::Raw, 7));
        assert_eq!(rf.nominal, 128);
    }
}
