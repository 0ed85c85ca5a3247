//! Benchmarks for the core engine live in `benches/`.
