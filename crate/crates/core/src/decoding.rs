//! Decoders for the three schemes and a Vandermonde conditioning diagnostic.
//!
//! Every output entry is an independent scalar system that shares one
//! coefficient matrix, so each decoder reduces to a weight vector `w` over the
//! chosen answers with `C_hat = sum_i w_i Y_i`. For interpolation `w` is row
//! `p-1` of the inverse Vandermonde; for minimum-norm decoding it is row `p-1`
//! of the pseudo-inverse `M^T (M M^T)^-1`.

use num_traits::Zero;

use crate::coding::{SchemeKind, SchemeSpec, Share};
use crate::error::{Error, Result};
use crate::fixedpoint::{log_base_abs, truncate, ExactRational};
use crate::linalg::{ensure_distinct, extreme_eigenvalues, solve, vandermonde};
use crate::matrix::{Matrix, RationalMatrix};

/// One server's download.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerAnswer {
    pub server_id: usize,
    pub y: Share,
    /// Evaluation point of the server; `None` for repetition.
    pub alpha: Option<ExactRational>,
    pub available: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub c_hat: RationalMatrix,
    pub kind: SchemeKind,
    pub servers_used: Vec<usize>,
}

impl DecodeResult {
    /// Entries truncated to `digits` fractional digits, one row per line.
    pub fn render(&self, digits: u32, base: u32) -> Result<String> {
        Ok(self
            .c_hat
            .try_map(|x| truncate(x, digits, base))?
            .to_string())
    }
}

/// Which available answers a decoder consumes when more than it needs exist.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum AnswerSelection {
    #[default]
    LowestIds,
    Ids(Vec<usize>),
}

fn select<'a>(
    answers: &'a [ServerAnswer],
    required: usize,
    selection: &AnswerSelection,
) -> Result<Vec<&'a ServerAnswer>> {
    let mut available: Vec<&ServerAnswer> = answers.iter().filter(|a| a.available).collect();
    if available.len() < required {
        return Err(Error::ThresholdViolation {
            required,
            available: available.len(),
        });
    }
    let chosen: Vec<&ServerAnswer> = match selection {
        AnswerSelection::LowestIds => {
            available.sort_by_key(|a| a.server_id);
            available.into_iter().take(required).collect()
        }
        AnswerSelection::Ids(ids) => {
            if ids.len() != required {
                return Err(Error::InvalidParameter(format!(
                    "selection names {} servers, decoder needs {required}",
                    ids.len()
                )));
            }
            ids.iter()
                .map(|id| {
                    available
                        .iter()
                        .find(|a| a.server_id == *id)
                        .copied()
                        .ok_or_else(|| {
                            Error::InvalidParameter(format!("server {id} has no available answer"))
                        })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(chosen)
}

fn points_of(chosen: &[&ServerAnswer]) -> Result<Vec<ExactRational>> {
    let points = chosen
        .iter()
        .map(|a| {
            a.alpha.clone().ok_or_else(|| {
                Error::InvalidParameter(format!("server {} has no evaluation point", a.server_id))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_distinct(&points)?;
    Ok(points)
}

/// Weights extracting the coefficient of `a^(p-1)` by square interpolation
/// through `2p-1` points.
pub fn interpolation_weights(points: &[ExactRational], p: usize) -> Result<Vec<ExactRational>> {
    let r = 2 * p - 1;
    if points.len() != r {
        return Err(Error::Dimension(format!("interpolation needs {r} points")));
    }
    ensure_distinct(points)?;
    // x = V^-1 y, so x_(p-1) = w^T y with V^T w = e_(p-1).
    let vt = vandermonde(points, r).transpose();
    solve(&vt, &unit(r, p - 1))
}

/// Weights of the minimum-Euclidean-norm solution of the `p x (2p-1)` system.
pub fn min_norm_weights(points: &[ExactRational], p: usize) -> Result<Vec<ExactRational>> {
    if points.len() != p {
        return Err(Error::Dimension(format!(
            "minimum-norm decoding needs {p} points"
        )));
    }
    ensure_distinct(points)?;
    let m = vandermonde(points, 2 * p - 1);
    let gram = m.matmul(&m.transpose())?;
    // x_(p-1) = e^T M^T (M M^T)^-1 y, so w solves (M M^T) w = M e.
    let column: Vec<ExactRational> = (0..p).map(|i| m[(i, p - 1)].clone()).collect();
    solve(&gram, &column)
}

fn unit(n: usize, k: usize) -> Vec<ExactRational> {
    (0..n)
        .map(|i| {
            if i == k {
                ExactRational::from_integer(1.into())
            } else {
                ExactRational::zero()
            }
        })
        .collect()
}

/// `sum_i w_i Y_i` over the chosen answers.
pub fn combine(weights: &[ExactRational], answers: &[&ServerAnswer]) -> Result<RationalMatrix> {
    let (rows, cols) = answers
        .first()
        .map(|a| a.y.shape())
        .ok_or_else(|| Error::InvalidParameter("no answers to combine".into()))?;
    if answers.iter().any(|a| a.y.shape() != (rows, cols)) {
        return Err(Error::Dimension("answers have different shapes".into()));
    }
    let mut acc = RationalMatrix::zeros(rows, cols);
    for (w, a) in weights.iter().zip(answers) {
        if w.is_zero() {
            continue;
        }
        acc = acc.add(&a.y.values().scale(w))?;
    }
    Ok(acc)
}

/// Exact MatDot decoding from `2p-1` answers.
pub fn decode_exact_matdot(answers: &[ServerAnswer], p: usize) -> Result<DecodeResult> {
    decode_exact_matdot_with(answers, p, &AnswerSelection::default())
}

pub fn decode_exact_matdot_with(
    answers: &[ServerAnswer],
    p: usize,
    selection: &AnswerSelection,
) -> Result<DecodeResult> {
    check_p(p)?;
    let chosen = select(answers, 2 * p - 1, selection)?;
    let points = points_of(&chosen)?;
    let weights = interpolation_weights(&points, p)?;
    finish(SchemeKind::MatDot, &weights, &chosen)
}

/// Approximate MatDot decoding from `p` answers by the minimum-norm solution.
/// No norm threshold is applied, so this never reports decoding failure.
pub fn decode_min_norm(answers: &[ServerAnswer], p: usize) -> Result<DecodeResult> {
    decode_min_norm_with(answers, p, &AnswerSelection::default())
}

pub fn decode_min_norm_with(
    answers: &[ServerAnswer],
    p: usize,
    selection: &AnswerSelection,
) -> Result<DecodeResult> {
    check_p(p)?;
    let chosen = select(answers, p, selection)?;
    let points = points_of(&chosen)?;
    let weights = min_norm_weights(&points, p)?;
    finish(SchemeKind::Amd, &weights, &chosen)
}

/// The first available answer (by server id) is the product itself.
pub fn decode_repetition(answers: &[ServerAnswer]) -> Result<DecodeResult> {
    let chosen = select(answers, 1, &AnswerSelection::LowestIds)?;
    finish(
        SchemeKind::Repetition,
        &[ExactRational::from_integer(1.into())],
        &chosen,
    )
}

/// Weights computed once for a fixed set of servers, for repeated decoding
/// under one scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreparedDecoder {
    kind: SchemeKind,
    servers: Vec<usize>,
    weights: Vec<ExactRational>,
}

impl PreparedDecoder {
    /// Decoder reading exactly the answers of `servers`, in that order.
    pub fn new(spec: &SchemeSpec, servers: &[usize]) -> Result<Self> {
        let required = spec.recovery_threshold();
        if servers.len() != required {
            return Err(Error::InvalidParameter(format!(
                "{} decoding needs {required} servers, got {}",
                spec.kind(),
                servers.len()
            )));
        }
        let weights = match spec.kind() {
            SchemeKind::Repetition => vec![ExactRational::from_integer(1.into())],
            kind => {
                let points = servers
                    .iter()
                    .map(|&id| {
                        spec.point(id)
                            .cloned()
                            .ok_or_else(|| Error::InvalidParameter(format!("no server {id}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                match kind {
                    SchemeKind::MatDot => interpolation_weights(&points, spec.p())?,
                    _ => min_norm_weights(&points, spec.p())?,
                }
            }
        };
        Ok(Self {
            kind: spec.kind(),
            servers: servers.to_vec(),
            weights,
        })
    }

    /// Decoder over the lowest-numbered servers, matching the default selection.
    pub fn lowest_ids(spec: &SchemeSpec) -> Result<Self> {
        let ids: Vec<usize> = (1..=spec.recovery_threshold()).collect();
        Self::new(spec, &ids)
    }

    pub fn weights(&self) -> &[ExactRational] {
        &self.weights
    }

    pub fn decode(&self, answers: &[ServerAnswer]) -> Result<DecodeResult> {
        let chosen = select(
            answers,
            self.servers.len(),
            &AnswerSelection::Ids(self.servers.clone()),
        )?;
        finish(self.kind, &self.weights, &chosen)
    }
}

fn finish(
    kind: SchemeKind,
    weights: &[ExactRational],
    chosen: &[&ServerAnswer],
) -> Result<DecodeResult> {
    let c_hat = combine(weights, chosen)?;
    let servers_used: Vec<usize> = chosen.iter().map(|a| a.server_id).collect();
    log::debug!("{kind} decode used servers {servers_used:?}");
    Ok(DecodeResult {
        c_hat,
        kind,
        servers_used,
    })
}

fn check_p(p: usize) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidParameter("p must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Bits of relative precision for the eigenvalue brackets.
const CONDITION_BITS: u32 = 64;

/// `log_B` of the 2-norm condition number of the `p x p` Vandermonde matrix on
/// `alphas`.
///
/// The extreme eigenvalues of `M^T M` are bracketed with exact positive
/// definiteness tests, so the result is accurate to ~`2^-64` relative error in
/// the condition number regardless of how ill-conditioned `M` is.
pub fn vandermonde_condition(alphas: &[ExactRational], p: usize, base: u32) -> Result<f64> {
    check_p(p)?;
    if alphas.len() != p {
        return Err(Error::Dimension(format!(
            "{} points for a {p}x{p} Vandermonde matrix",
            alphas.len()
        )));
    }
    ensure_distinct(alphas)?;
    if p == 1 {
        return Ok(0.0);
    }
    let m = vandermonde(alphas, p);
    let gram = m.transpose().matmul(&m)?;
    let ((min_lo, min_hi), (max_lo, max_hi)) = extreme_eigenvalues(&gram, CONDITION_BITS)?;
    let two = ExactRational::from_integer(2.into());
    let lmin = (min_lo + min_hi) / &two;
    let lmax = (max_lo + max_hi) / &two;
    Ok(0.5 * (log_base_abs(&lmax, base) - log_base_abs(&lmin, base)))
}

/// Full product polynomial coefficients from `2p-1` exact answers of a scalar
/// system, lowest power first.
pub fn interpolate_coefficients(
    points: &[ExactRational],
    values: &[ExactRational],
) -> Result<Vec<ExactRational>> {
    ensure_distinct(points)?;
    solve(&vandermonde(points, points.len()), values)
}

impl Matrix<ExactRational> {
    /// `max_ij |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<ExactRational> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| num_traits::Signed::abs(&(a - b)))
            .max()
            .unwrap_or_else(ExactRational::zero))
    }
}
