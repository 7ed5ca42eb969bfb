//! Criterion benchmarks for the spectral, solver and analysis kernels; see `benches/`.
