//! Information-theoretic network inference for multivariate Poisson count
//! data.
//!
//! The crate provides:
//!
//! - [`entropy`]: exact truncated-series and fast approximate entropy,
//!   mutual information, and conditional mutual information for Poisson
//!   variables, plus the Gaussian closed-form baseline;
//! - [`rates`]: correlation-based rate estimation (couplings, base rates,
//!   conditional coupling rates via partial correlation);
//! - [`stats`]: KS goodness-of-fit screens with parametric bootstrap,
//!   negative binomial pmf, box-cox, seeded permutation machinery;
//! - [`sim`]: ground-truth graphs and shared-latent count simulation
//!   `X = BY + E`;
//! - [`infer`]: greedy forward/backward parent selection per target with
//!   shuffle-test significance, Poisson or Gaussian estimator, optional
//!   one-step lag (transfer-entropy convention);
//! - [`graph`]: components, out-degree, Brandes betweenness, eigenvector
//!   centrality, TPR/FPR scoring.

pub mod counts;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod infer;
pub mod linalg;
pub mod rates;
pub mod sim;
pub mod stats;

pub use counts::CountMatrix;
pub use entropy::TruncationPolicy;
pub use error::{Error, Result};
pub use graph::CentralityReport;
pub use infer::{EstimatorKind, InferenceConfig, InferenceResult};
pub use linalg::SquareMatrix;
pub use rates::RateMatrix;
pub use sim::{Adjacency, MixingMatrix, SimConfig};
pub use stats::{FitParams, GofResult, SeededRng};
