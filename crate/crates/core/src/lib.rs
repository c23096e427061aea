//! Precision-aware simulation of coded distributed matrix multiplication.
//!
//! Three schemes compute `C = UV` across `N` servers:
//!
//! * MatDot splits `U` into `p` column blocks and `V` into `p` row blocks,
//!   sends each server the evaluations of two matrix polynomials at a point
//!   `a_i`, and interpolates the product polynomial from any `2p - 1` answers.
//! * Approximate MatDot uses the same encoding with tiny evaluation points and
//!   recovers an approximation of `C` from any `p` answers with a
//!   minimum-norm solve.
//! * Repetition sends the full matrices to every server; one answer suffices.
//!
//! Every upload and every answer is truncated to a fixed number of base-`B`
//! digits. Arithmetic on those digits is exact, so the simulated error is the
//! error of the scheme and its truncation alone.
//!
//! ```
//! use std::collections::BTreeSet;
//! use cdmm::{run_cluster, Precision, RationalMatrix, SchemeSpec};
//!
//! let u = RationalMatrix::from_integers(1, 2, &[1, 2]).unwrap();
//! let v = RationalMatrix::from_integers(2, 1, &[3, 4]).unwrap();
//! let points: Vec<cdmm::ExactRational> = (1..=3).map(|i| cdmm::ExactRational::from_integer(i.into())).collect();
//! let spec = SchemeSpec::matdot(2, points, Precision::Exact, Precision::Exact, 10).unwrap();
//! let run = run_cluster(&u, &v, &spec, &BTreeSet::new()).unwrap();
//! assert_eq!(run.decode().unwrap().c_hat, u.matmul(&v).unwrap());
//! ```

pub mod analysis;
pub mod cli;
pub mod cluster;
pub mod coding;
pub mod config;
pub mod decoding;
pub mod error;
pub mod experiments;
pub mod fixedpoint;
pub mod linalg;
pub mod matrix;

pub use analysis::{
    clamped_precision_bound, cost_table, predicted_precision, required_upload_precision,
    theorem1_alpha_bound, CostReport, PrecisionBudget,
};
pub use cluster::{run_cluster, ClusterRun, TrafficLedger};
pub use coding::{
    encode_matdot, encode_repetition, partition, select_amd_points, BlockPartition, EncodedTask,
    NormBound, SchemeKind, SchemeSpec, Share,
};
pub use decoding::{
    decode_exact_matdot, decode_min_norm, decode_repetition, vandermonde_condition, DecodeResult,
    ServerAnswer,
};
pub use error::{Error, Result};
pub use experiments::{sweep_alpha, sweep_gamma, ExperimentConfig, SweepResult};
pub use fixedpoint::{fp_add, fp_mul, truncate, ExactRational, Precision, TruncatedValue};
pub use matrix::{Matrix, RationalMatrix};
