//! Benchmarks for the counting engine, exact discrepancy, spectra and
//! reductions; run with `cargo bench -p quasirand-bench`.
