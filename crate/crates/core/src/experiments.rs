//! Monte Carlo harness for the upload-precision and evaluation-point sweeps.
//!
//! Each trial draws `U` and `V` with i.i.d. entries uniform on `[0, 1)` at a
//! fixed number of source digits, runs encode, compute and decode, and compares
//! against the exact rational product. Trial `t` always uses ChaCha stream `t`
//! under the configured seed, so sweeps reuse the same matrices at every axis
//! value and parallel runs reproduce serial ones bit for bit.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cluster::run_cluster;
use crate::coding::{equispaced_points, SchemeKind, SchemeSpec};
use crate::decoding::PreparedDecoder;
use crate::error::{Error, Result};
use crate::fixedpoint::{base_pow, base_pow_rational, rational_to_f64, ExactRational, Precision};
use crate::matrix::{Matrix, RationalMatrix};

/// Source digits used for untruncated trials.
pub const EXACT_SOURCE_DIGITS: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    pub p: usize,
    pub n_servers: usize,
    pub base: u32,
    pub trials: u64,
    pub seed: u64,
    /// `(rows of U, inner dimension, cols of V)`.
    pub dims: (usize, usize, usize),
    /// Extra digits sampled beyond the largest upload budget.
    pub guard_digits: u32,
    /// Overrides the sampled entry precision when set.
    pub source_digits: Option<u32>,
}

impl Default for ExperimentConfig {
    /// Scalar-output approximate MatDot setting: `p = N = 3`, `1x3` by `3x1`.
    fn default() -> Self {
        Self {
            scheme: SchemeKind::Amd,
            p: 3,
            n_servers: 3,
            base: 10,
            trials: 10_000,
            seed: 7,
            dims: (1, 3, 1),
            guard_digits: 8,
            source_digits: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config {
                key: "trials".into(),
                message: "must be at least 1".into(),
            });
        }
        if self.p == 0 {
            return Err(Error::Config {
                key: "p".into(),
                message: "must be at least 1".into(),
            });
        }
        if self.base < 2 {
            return Err(Error::Config {
                key: "base".into(),
                message: "must be at least 2".into(),
            });
        }
        let (rows, inner, cols) = self.dims;
        if rows == 0 || cols == 0 || inner == 0 || inner % self.p != 0 {
            return Err(Error::Config {
                key: "dims".into(),
                message: format!(
                    "{rows}x{inner} by {inner}x{cols} does not split into p = {} blocks",
                    self.p
                ),
            });
        }
        if self.scheme != SchemeKind::Repetition
            && self.n_servers < self.scheme.recovery_threshold(self.p)
        {
            return Err(Error::Config {
                key: "N".into(),
                message: format!(
                    "{} needs at least {} servers",
                    self.scheme,
                    self.scheme.recovery_threshold(self.p)
                ),
            });
        }
        Ok(())
    }

    fn digits_for(&self, upload: Precision) -> u32 {
        self.source_digits.unwrap_or(match upload {
            Precision::Digits(g) => g + self.guard_digits,
            Precision::Exact => EXACT_SOURCE_DIGITS,
        })
    }
}

/// Deterministic RNG for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Entries `m B^-digits` with `m` uniform on `[0, B^digits)`, drawn digit by
/// digit so every entry is exactly representable.
pub fn sample_unit_matrix(
    rows: usize,
    cols: usize,
    digits: u32,
    base: u32,
    rng: &mut impl Rng,
) -> RationalMatrix {
    let denom = base_pow(base, digits);
    let b = BigInt::from(base);
    Matrix::from_fn(rows, cols, |_, _| {
        let mut m = BigInt::zero();
        for _ in 0..digits {
            m = m * &b + BigInt::from(rng.random_range(0..base));
        }
        ExactRational::new(m, denom.clone())
    })
}

/// Knobs that vary along a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialParams {
    pub scheme: SchemeKind,
    pub upload: Precision,
    pub download: Precision,
    /// Largest evaluation point; ignored for repetition.
    pub alpha_max: Option<ExactRational>,
}

fn build_spec(cfg: &ExperimentConfig, params: &TrialParams) -> Result<SchemeSpec> {
    match params.scheme {
        SchemeKind::Repetition => {
            SchemeSpec::repetition(cfg.n_servers, params.upload, params.download, cfg.base)
        }
        kind => {
            let alpha_max = params.alpha_max.as_ref().ok_or_else(|| Error::Config {
                key: "alpha_max".into(),
                message: format!("required for {kind}"),
            })?;
            SchemeSpec::new(
                kind,
                cfg.p,
                equispaced_points(alpha_max, cfg.n_servers),
                cfg.n_servers,
                params.upload,
                params.download,
                cfg.base,
            )
        }
    }
}

fn trial_with_spec(
    cfg: &ExperimentConfig,
    spec: &SchemeSpec,
    decoder: &PreparedDecoder,
    digits: u32,
    rng: &mut impl Rng,
) -> Result<Vec<ExactRational>> {
    let (rows, inner, cols) = cfg.dims;
    let u = sample_unit_matrix(rows, inner, digits, cfg.base, rng);
    let v = sample_unit_matrix(inner, cols, digits, cfg.base, rng);
    let truth = u.matmul(&v)?;
    let run = run_cluster(&u, &v, spec, &BTreeSet::new())?;
    let decoded = decoder.decode(&run.answers)?;
    Ok(decoded
        .c_hat
        .entries()
        .iter()
        .zip(truth.entries())
        .map(|(a, b)| (a - b).abs())
        .collect())
}

/// One encode / compute / decode round with fresh matrices from `rng`;
/// returns `|C_hat_ij - (UV)_ij|` for every output entry.
pub fn run_trial(
    cfg: &ExperimentConfig,
    params: &TrialParams,
    rng: &mut impl Rng,
) -> Result<Vec<ExactRational>> {
    let spec = build_spec(cfg, params)?;
    let decoder = PreparedDecoder::lowest_ids(&spec)?;
    trial_with_spec(cfg, &spec, &decoder, cfg.digits_for(params.upload), rng)
}

/// Mean absolute error over `cfg.trials` trials, exact.
pub fn mean_abs_error(
    cfg: &ExperimentConfig,
    params: &TrialParams,
    digits: u32,
) -> Result<(ExactRational, u64)> {
    let spec = build_spec(cfg, params)?;
    let decoder = PreparedDecoder::lowest_ids(&spec)?;
    let (sum, count) = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let errs = trial_with_spec(cfg, &spec, &decoder, digits, &mut rng)?;
            let n = errs.len() as u64;
            Ok((errs.into_iter().sum::<ExactRational>(), n))
        })
        .try_reduce(
            || (ExactRational::zero(), 0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1)),
        )?;
    Ok((
        sum / ExactRational::from_integer(BigInt::from(count)),
        count,
    ))
}

/// Largest absolute error over `cfg.trials` trials.
pub fn max_abs_error(cfg: &ExperimentConfig, params: &TrialParams) -> Result<ExactRational> {
    let spec = build_spec(cfg, params)?;
    let decoder = PreparedDecoder::lowest_ids(&spec)?;
    let digits = cfg.digits_for(params.upload);
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let errs = trial_with_spec(cfg, &spec, &decoder, digits, &mut rng)?;
            Ok(errs.into_iter().max().unwrap_or_else(ExactRational::zero))
        })
        .try_reduce(ExactRational::zero, |a, b| Ok(a.max(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Gamma,
    Log10AlphaMax,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::Gamma => "gamma",
            SweepAxis::Log10AlphaMax => "log10_alpha_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPoint {
    pub x: i64,
    pub mae: ExactRational,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
    /// Repetition at the matched precision, on the same matrices.
    pub baseline: Option<SweepPoint>,
}

impl SweepResult {
    pub fn mae(&self, x: i64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.x == x)
            .map(|p| rational_to_f64(&p.mae))
    }

    pub fn maes(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| rational_to_f64(&p.mae))
            .collect()
    }

    pub fn baseline_mae(&self) -> Option<f64> {
        self.baseline.as_ref().map(|b| rational_to_f64(&b.mae))
    }

    /// Axis value with the smallest MAE.
    pub fn argmin(&self) -> Option<i64> {
        self.points
            .iter()
            .min_by(|a, b| a.mae.cmp(&b.mae))
            .map(|p| p.x)
    }

    /// Header plus one row per axis value; the repetition baseline, when
    /// present, is repeated in a third column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let baseline = self.baseline_mae();
        match baseline {
            Some(_) => {
                let _ = writeln!(out, "{},mae,repetition_mae", self.axis.column());
            }
            None => {
                let _ = writeln!(out, "{},mae", self.axis.column());
            }
        }
        for p in &self.points {
            let mae = rational_to_f64(&p.mae);
            match baseline {
                Some(b) => {
                    let _ = writeln!(out, "{},{mae:.6e},{b:.6e}", p.x);
                }
                None => {
                    let _ = writeln!(out, "{},{mae:.6e}", p.x);
                }
            }
        }
        out
    }
}

fn check_sorted(values: &[i64], key: &str) -> Result<()> {
    if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config {
            key: key.into(),
            message: "sweep values must be nonempty and strictly increasing".into(),
        });
    }
    Ok(())
}

/// MAE versus `gamma`, with uploads and downloads both truncated to `gamma`
/// digits and evaluation points `(i / N) alpha_max`.
pub fn sweep_gamma(
    cfg: &ExperimentConfig,
    gammas: &[u32],
    alpha_max: &ExactRational,
) -> Result<SweepResult> {
    cfg.validate()?;
    let xs: Vec<i64> = gammas.iter().map(|&g| i64::from(g)).collect();
    check_sorted(&xs, "gamma")?;
    let digits = cfg
        .source_digits
        .unwrap_or(gammas.iter().max().copied().unwrap_or(0) + cfg.guard_digits);
    let points = gammas
        .iter()
        .map(|&g| {
            let params = TrialParams {
                scheme: cfg.scheme,
                upload: Precision::Digits(g),
                download: Precision::Digits(g),
                alpha_max: Some(alpha_max.clone()),
            };
            let (mae, samples) = mean_abs_error(cfg, &params, digits)?;
            log::info!("gamma = {g}: mae = {:.3e}", rational_to_f64(&mae));
            Ok(SweepPoint {
                x: i64::from(g),
                mae,
                samples,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        axis: SweepAxis::Gamma,
        points,
        baseline: None,
    })
}

/// MAE versus `alpha_max = B^e` for each exponent `e`, at fixed `gamma`.
///
/// The repetition baseline uses `baseline_nu` digits on uploads and downloads;
/// pass `None` to skip it.
pub fn sweep_alpha(
    cfg: &ExperimentConfig,
    gamma: u32,
    log_alphas: &[i32],
    baseline_nu: Option<u32>,
) -> Result<SweepResult> {
    cfg.validate()?;
    let xs: Vec<i64> = log_alphas.iter().map(|&e| i64::from(e)).collect();
    check_sorted(&xs, "log_alpha")?;
    let digits = cfg.source_digits.unwrap_or(gamma + cfg.guard_digits);
    let points = log_alphas
        .iter()
        .map(|&e| {
            let params = TrialParams {
                scheme: cfg.scheme,
                upload: Precision::Digits(gamma),
                download: Precision::Digits(gamma),
                alpha_max: Some(base_pow_rational(cfg.base, e)),
            };
            let (mae, samples) = mean_abs_error(cfg, &params, digits)?;
            log::info!("log alpha_max = {e}: mae = {:.3e}", rational_to_f64(&mae));
            Ok(SweepPoint {
                x: i64::from(e),
                mae,
                samples,
            })
        })
        .collect::<Result<_>>()?;
    let baseline = baseline_nu
        .map(|nu| {
            let params = TrialParams {
                scheme: SchemeKind::Repetition,
                upload: Precision::Digits(nu),
                download: Precision::Digits(nu),
                alpha_max: None,
            };
            let (mae, samples) = mean_abs_error(cfg, &params, digits)?;
            Ok::<_, Error>(SweepPoint {
                x: i64::from(nu),
                mae,
                samples,
            })
        })
        .transpose()?;
    Ok(SweepResult {
        axis: SweepAxis::Log10AlphaMax,
        points,
        baseline,
    })
}
