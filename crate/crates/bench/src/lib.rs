//! Criterion benchmarks for the ftopt solvers live in `benches/`.
