//! Criterion benchmarks for osc-core live under `benches/`.
