//! Nearest-class-mean reference classifier on time-averaged MFCC vectors.

use gmtc_core::dsp::FeatureMatrix;

/// Column means over the unpadded frames.
pub fn mean_pool(f: &FeatureMatrix) -> Vec<f64> {
    let mut acc = vec![0.0; f.frames.cols()];
    for t in 0..f.true_len {
        for (a, &v) in acc.iter_mut().zip(f.frames.row(t)) {
            *a += v as f64;
        }
    }
    acc.iter().map(|a| a / f.true_len as f64).collect()
}

/// Fraction of `test` indices whose nearest training-class centroid is their own class.
pub fn centroid_accuracy(features: &[FeatureMatrix], labels: &[usize], train: &[usize], test: &[usize]) -> f64 {
    let pooled: Vec<Vec<f64>> = features.iter().map(mean_pool).collect();
    let k = labels.iter().max().unwrap() + 1;
    let dim = pooled[0].len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for &i in train {
        counts[labels[i]] += 1;
        for (s, v) in sums[labels[i]].iter_mut().zip(&pooled[i]) {
            *s += v;
        }
    }
    let centroids: Vec<Option<Vec<f64>>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &n)| (n > 0).then(|| s.iter().map(|v| v / n as f64).collect()))
        .collect();
    let hits = test
        .iter()
        .filter(|&&i| {
            let dist = |c: &Vec<f64>| c.iter().zip(&pooled[i]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            let best = centroids
                .iter()
                .enumerate()
                .filter_map(|(c, m)| m.as_ref().map(|m| (c, dist(m))))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0;
            best == labels[i]
        })
        .count();
    hits as f64 / test.len() as f64
}
