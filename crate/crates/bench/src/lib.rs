//! Benchmark-only crate; see the `benches/` targets.
//!
//! The headline comparison is exact (double-series) joint entropy against
//! the separable approximation: the approximation is what makes greedy
//! network inference affordable at scale.

pub use countnet_core as core;
