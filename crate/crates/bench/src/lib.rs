//! Bench-only crate; see benches/kernels.rs.
