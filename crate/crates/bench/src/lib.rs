//! Criterion benchmarks for the hot paths of `gmtc-core`; see `benches/`.
