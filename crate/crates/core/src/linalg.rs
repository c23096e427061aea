//! Exact rational linear algebra: Gaussian elimination, Vandermonde maps and
//! extreme-eigenvalue bracketing for symmetric positive definite matrices.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fixedpoint::ExactRational;
use crate::matrix::RationalMatrix;

/// Rows `[1, a, a^2, ..., a^(cols-1)]`, one row per point.
pub fn vandermonde(points: &[ExactRational], cols: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(points.len(), cols);
    for (r, a) in points.iter().enumerate() {
        let mut pow = ExactRational::one();
        for c in 0..cols {
            m[(r, c)] = pow.clone();
            pow *= a;
        }
    }
    m
}

pub fn ensure_distinct(points: &[ExactRational]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].contains(a) {
            return Err(Error::RepeatedPoint);
        }
    }
    Ok(())
}

/// Solve the square system `A x = b` exactly.
pub fn solve(a: &RationalMatrix, b: &[ExactRational]) -> Result<Vec<ExactRational>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::Dimension(format!(
            "solve expects a square system, got {}x{} with rhs {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let mut rows: Vec<Vec<ExactRational>> = (0..n)
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.push(b[r].clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !rows[r][col].is_zero())
            .ok_or(Error::Singular)?;
        rows.swap(col, pivot);
        let (head, tail) = rows.split_at_mut(col + 1);
        let pivot_row = &head[col];
        for row in tail {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for k in col..=n {
                let delta = &factor * &pivot_row[k];
                row[k] -= delta;
            }
        }
    }

    let mut x = vec![ExactRational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = rows[r][n].clone();
        for k in r + 1..n {
            acc -= &rows[r][k] * &x[k];
        }
        x[r] = acc / &rows[r][r];
    }
    Ok(x)
}

/// Sylvester's criterion by elimination: every pivot of the symmetric matrix
/// must be strictly positive.
pub fn is_positive_definite(s: &RationalMatrix) -> bool {
    let n = s.rows();
    let mut m: Vec<Vec<ExactRational>> = (0..n).map(|r| s.row(r).to_vec()).collect();
    for col in 0..n {
        if !m[col][col].is_positive() {
            return false;
        }
        let (head, tail) = m.split_at_mut(col + 1);
        let pivot_row = &head[col];
        for row in tail {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for k in col..n {
                let delta = &factor * &pivot_row[k];
                row[k] -= delta;
            }
        }
    }
    true
}

fn shifted(s: &RationalMatrix, lambda: &ExactRational, sign: i32) -> RationalMatrix {
    // sign = +1: s - lambda I;  sign = -1: lambda I - s
    let mut m = if sign > 0 { s.clone() } else { s.map(|x| -x) };
    for i in 0..s.rows() {
        if sign > 0 {
            m[(i, i)] -= lambda;
        } else {
            m[(i, i)] += lambda;
        }
    }
    m
}

/// Bracket `[lo, hi]` around the largest and smallest eigenvalues of a
/// symmetric positive definite matrix, each to relative width `2^-bits`.
///
/// Returns `((min_lo, min_hi), (max_lo, max_hi))`.
#[allow(clippy::type_complexity)]
pub fn extreme_eigenvalues(
    s: &RationalMatrix,
    bits: u32,
) -> Result<(
    (ExactRational, ExactRational),
    (ExactRational, ExactRational),
)> {
    let n = s.rows();
    if n == 0 || s.cols() != n {
        return Err(Error::Dimension(
            "eigenvalues need a nonempty square matrix".into(),
        ));
    }
    if !is_positive_definite(s) {
        return Err(Error::Singular);
    }
    let two = ExactRational::from_integer(2.into());
    let trace: ExactRational = (0..n).map(|i| s[(i, i)].clone()).sum();

    // Largest: lambda I - s is PD exactly when lambda > lambda_max, and
    // trace / n <= lambda_max < 2 trace.
    let tol = scale_bits(bits);
    let mut max_hi = &trace * &two;
    let mut max_lo = trace.clone() / ExactRational::from_integer((n as i64).into());
    while &max_hi - &max_lo > &max_lo * &tol {
        let mid = (&max_lo + &max_hi) / &two;
        if is_positive_definite(&shifted(s, &mid, -1)) {
            max_hi = mid;
        } else {
            max_lo = mid;
        }
    }

    // Smallest: s - lambda I is PD exactly when lambda < lambda_min.
    let mut min_hi = max_hi.clone();
    let mut min_lo = &min_hi / &two;
    while !is_positive_definite(&shifted(s, &min_lo, 1)) {
        min_hi = min_lo.clone();
        min_lo = &min_lo / &two;
    }
    while &min_hi - &min_lo > &min_lo * &tol {
        let mid = (&min_lo + &min_hi) / &two;
        if is_positive_definite(&shifted(s, &mid, 1)) {
            min_lo = mid;
        } else {
            min_hi = mid;
        }
    }
    Ok(((min_lo, min_hi), (max_lo, max_hi)))
}

fn scale_bits(bits: u32) -> ExactRational {
    ExactRational::new(
        1.into(),
        num_traits::pow(num_bigint::BigInt::from(2), bits as usize),
    )
}
