//! Benchmark-only crate; the suites live under `benches/`. Nothing is
//! exported from here.
