//! Criterion benchmarks for `portal-core`; see `benches/kernels.rs`.
//!
//! Run with `cargo bench -p portal-bench`.
