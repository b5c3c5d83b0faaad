//! Criterion benchmarks for nmm-core live in `benches/`.
