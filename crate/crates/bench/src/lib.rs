//! Criterion benchmarks for `parikh-core`; run with `cargo bench -p parikh-bench`.
