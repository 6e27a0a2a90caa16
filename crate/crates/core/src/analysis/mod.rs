//! Feature-map export, 2-D image entropy, and the autoencoder projector.

mod autoencoder;
mod entropy;
mod maps;

pub use autoencoder::{ae_project, ae_train, AeConfig, AeModel, AE_INPUT, AE_MIN_SAMPLES};
pub use entropy::entropy_2d;
pub use maps::{export_feature_maps, normalize_u8, FeatureMap, MapSource};

use std::collections::BTreeMap;

use crate::dsp::FeatureMatrix;
use crate::error::Result;
use crate::model::{forward_trace, Checkpoint};

/// Entropy of the normalized GTCM output over the clip's unpadded frames.
pub fn utterance_entropy(checkpoint: &Checkpoint, features: &FeatureMatrix) -> Result<f64> {
    let maps = export_feature_maps(checkpoint, &features.frames, features.true_len)?;
    let high = maps.last().expect("gtcm output is always present");
    let cropped = high.truncated(features.true_len.max(2).min(high.frames()))?;
    entropy_2d(&cropped.normalized, cropped.channels(), cropped.frames())
}

/// Pooled GTCM output, the autoencoder's input.
pub fn pooled_high_level(checkpoint: &Checkpoint, features: &FeatureMatrix) -> Result<Vec<f64>> {
    let trace = forward_trace(&checkpoint.config, &checkpoint.params, &features.frames, features.true_len)?;
    Ok(trace.pooled.data().iter().map(|&v| v as f64).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyRow {
    pub corpus: String,
    pub emotion: String,
    pub entropy_bits: f64,
    pub utterances: usize,
}

/// Mean per-utterance entropy for each `(corpus, emotion)` pair, sorted.
pub fn entropy_table(samples: &[(String, String, f64)]) -> Vec<EntropyRow> {
    let mut groups: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for (corpus, emotion, e) in samples {
        let g = groups.entry((corpus.clone(), emotion.clone())).or_insert((0.0, 0));
        g.0 += e;
        g.1 += 1;
    }
    groups
        .into_iter()
        .map(|((corpus, emotion), (sum, n))| EntropyRow {
            corpus,
            emotion,
            entropy_bits: sum / n as f64,
            utterances: n,
        })
        .collect()
}

fn render_csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is UTF-8")
}

pub fn entropy_csv(rows: &[EntropyRow]) -> String {
    render_csv(
        &["corpus", "emotion", "entropy_bits", "utterances"],
        rows.iter().map(|r| {
            [r.corpus.clone(), r.emotion.clone(), r.entropy_bits.to_string(), r.utterances.to_string()]
        }),
    )
}

pub fn projection_csv(ids: &[String], labels: &[String], points: &[[f64; 2]]) -> String {
    render_csv(
        &["id", "label", "x", "y"],
        ids.iter()
            .zip(labels)
            .zip(points)
            .map(|((id, label), p)| [id.clone(), label.clone(), p[0].to_string(), p[1].to_string()]),
    )
}
