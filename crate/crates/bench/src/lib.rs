//! Benchmarks live in `benches/`. Run them with `cargo bench -p mfield-bench`.
