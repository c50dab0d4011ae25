//! Criterion benchmarks for `hda-core`; the benchmark targets live in `benches/`.
