//! Column-by-row partitioning and the three encoders.
//!
//! MatDot and approximate MatDot share one encoder: server `i` receives
//!
//! ```text
//! F_i = U_1 + a U_2 + ... + a^(p-1) U_p
//! G_i = V_p + a V_(p-1) + ... + a^(p-1) V_1
//! ```
//!
//! so that `F_i G_i` is a degree `2p-2` polynomial in `a` whose coefficient of
//! `a^(p-1)` is `UV`. Approximate MatDot only differs in how small the
//! evaluation points are and how many answers the decoder waits for.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fixedpoint::{
    base_pow, check_base, log_base_abs, truncate, ExactRational, Precision, TruncatedValue,
};
use crate::linalg::ensure_distinct;
use crate::matrix::{Matrix, RationalMatrix};

/// `U = [U_1 .. U_p]` split by columns and `V = [V_1 .. V_p]^T` split by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    u_blocks: Vec<RationalMatrix>,
    v_blocks: Vec<RationalMatrix>,
}

impl BlockPartition {
    pub fn p(&self) -> usize {
        self.u_blocks.len()
    }

    pub fn u_blocks(&self) -> &[RationalMatrix] {
        &self.u_blocks
    }

    pub fn v_blocks(&self) -> &[RationalMatrix] {
        &self.v_blocks
    }

    /// Reassemble `(U, V)`.
    pub fn recombine(&self) -> Result<(RationalMatrix, RationalMatrix)> {
        Ok((
            Matrix::hconcat(&self.u_blocks)?,
            Matrix::vconcat(&self.v_blocks)?,
        ))
    }

    /// `sum_i U_i V_i`, which equals `UV`.
    pub fn block_product_sum(&self) -> Result<RationalMatrix> {
        let mut acc = self.u_blocks[0].matmul(&self.v_blocks[0])?;
        for (u, v) in self.u_blocks.iter().zip(&self.v_blocks).skip(1) {
            acc = acc.add(&u.matmul(v)?)?;
        }
        Ok(acc)
    }
}

pub fn partition(u: &RationalMatrix, v: &RationalMatrix, p: usize) -> Result<BlockPartition> {
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    let w = u.cols();
    if v.rows() != w {
        return Err(Error::Dimension(format!(
            "U has {w} columns but V has {} rows",
            v.rows()
        )));
    }
    if !w.is_multiple_of(p) {
        return Err(Error::NotDivisible { inner: w, p });
    }
    let step = w / p;
    Ok(BlockPartition {
        u_blocks: (0..p)
            .map(|j| u.col_block(j * step, (j + 1) * step))
            .collect(),
        v_blocks: (0..p)
            .map(|j| v.row_block(j * step, (j + 1) * step))
            .collect(),
    })
}

/// An uploaded or downloaded matrix, either carried at a fixed digit budget or
/// untruncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Share {
    Fixed(Matrix<TruncatedValue>),
    Exact(RationalMatrix),
}

impl Share {
    /// Quantize an exact matrix to `precision`.
    pub fn quantize(m: RationalMatrix, precision: Precision, base: u32) -> Result<Self> {
        match precision {
            Precision::Digits(g) => Ok(Share::Fixed(m.try_map(|x| truncate(x, g, base))?)),
            Precision::Exact => Ok(Share::Exact(m)),
        }
    }

    pub fn values(&self) -> RationalMatrix {
        match self {
            Share::Fixed(m) => m.values(),
            Share::Exact(m) => m.clone(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Share::Fixed(m) => m.shape(),
            Share::Exact(m) => m.shape(),
        }
    }

    pub fn len(&self) -> usize {
        let (r, c) = self.shape();
        r * c
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn precision(&self) -> Precision {
        match self {
            Share::Fixed(m) => Precision::Digits(m.entries().first().map_or(0, |v| v.scale())),
            Share::Exact(_) => Precision::Exact,
        }
    }

    /// Entries rendered at full precision: fixed-point strings, or `n/d`.
    pub fn render(&self) -> String {
        match self {
            Share::Fixed(m) => m.to_string(),
            Share::Exact(m) => m.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    MatDot,
    Amd,
    Repetition,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::MatDot, SchemeKind::Amd, SchemeKind::Repetition];

    /// Answers required to decode at partition level `p`.
    pub fn recovery_threshold(self, p: usize) -> usize {
        match self {
            SchemeKind::MatDot => 2 * p - 1,
            SchemeKind::Amd => p,
            SchemeKind::Repetition => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::MatDot => "matdot",
            SchemeKind::Amd => "amd",
            SchemeKind::Repetition => "repetition",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "matdot" => Ok(SchemeKind::MatDot),
            "amd" | "approximate-matdot" => Ok(SchemeKind::Amd),
            "repetition" | "rep" => Ok(SchemeKind::Repetition),
            other => Err(Error::Parse(format!("unknown scheme kind `{other}`"))),
        }
    }
}

/// A fully specified coding scheme for an `N`-server cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeSpec {
    kind: SchemeKind,
    p: usize,
    eval_points: Vec<ExactRational>,
    n_servers: usize,
    upload: Precision,
    download: Precision,
    base: u32,
}

impl SchemeSpec {
    pub fn new(
        kind: SchemeKind,
        p: usize,
        eval_points: Vec<ExactRational>,
        n_servers: usize,
        upload: Precision,
        download: Precision,
        base: u32,
    ) -> Result<Self> {
        check_base(base)?;
        if p == 0 || n_servers == 0 {
            return Err(Error::InvalidParameter("p and N must be at least 1".into()));
        }
        match kind {
            SchemeKind::Repetition => {
                if p != 1 || !eval_points.is_empty() {
                    return Err(Error::InvalidParameter(
                        "repetition uploads whole matrices: p = 1 and no evaluation points".into(),
                    ));
                }
            }
            SchemeKind::MatDot | SchemeKind::Amd => {
                if eval_points.len() != n_servers {
                    return Err(Error::InvalidParameter(format!(
                        "{} evaluation points for {n_servers} servers",
                        eval_points.len()
                    )));
                }
                ensure_distinct(&eval_points)?;
            }
        }
        Ok(Self {
            kind,
            p,
            eval_points,
            n_servers,
            upload,
            download,
            base,
        })
    }

    pub fn matdot(
        p: usize,
        eval_points: Vec<ExactRational>,
        upload: Precision,
        download: Precision,
        base: u32,
    ) -> Result<Self> {
        let n = eval_points.len();
        Self::new(
            SchemeKind::MatDot,
            p,
            eval_points,
            n,
            upload,
            download,
            base,
        )
    }

    pub fn amd(
        p: usize,
        eval_points: Vec<ExactRational>,
        upload: Precision,
        download: Precision,
        base: u32,
    ) -> Result<Self> {
        let n = eval_points.len();
        Self::new(SchemeKind::Amd, p, eval_points, n, upload, download, base)
    }

    pub fn repetition(
        n_servers: usize,
        upload: Precision,
        download: Precision,
        base: u32,
    ) -> Result<Self> {
        Self::new(
            SchemeKind::Repetition,
            1,
            Vec::new(),
            n_servers,
            upload,
            download,
            base,
        )
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn eval_points(&self) -> &[ExactRational] {
        &self.eval_points
    }

    pub fn n_servers(&self) -> usize {
        self.n_servers
    }

    pub fn upload(&self) -> Precision {
        self.upload
    }

    pub fn download(&self) -> Precision {
        self.download
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn recovery_threshold(&self) -> usize {
        self.kind.recovery_threshold(self.p)
    }

    /// Evaluation point of a 1-based server id.
    pub fn point(&self, server_id: usize) -> Option<&ExactRational> {
        self.eval_points.get(server_id.checked_sub(1)?)
    }
}

/// The pair of coded shares uploaded to one server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedTask {
    pub server_id: usize,
    pub f: Share,
    pub g: Share,
}

fn horner(
    coeffs: impl DoubleEndedIterator<Item = RationalMatrix>,
    alpha: &ExactRational,
) -> Result<RationalMatrix> {
    // coefficients arrive in ascending powers; evaluate from the top
    let mut iter = coeffs.rev();
    let mut acc = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty polynomial".into()))?;
    for c in iter {
        acc = acc.scale(alpha).add(&c)?;
    }
    Ok(acc)
}

/// Exact (pre-truncation) MatDot shares at `alpha`.
pub fn matdot_polynomials(
    bp: &BlockPartition,
    alpha: &ExactRational,
) -> Result<(RationalMatrix, RationalMatrix)> {
    let f = horner(bp.u_blocks.iter().cloned(), alpha)?;
    let g = horner(bp.v_blocks.iter().rev().cloned(), alpha)?;
    Ok((f, g))
}

/// MatDot / approximate MatDot encoder. The upload budget is applied to the
/// coded share, after the polynomial is evaluated.
pub fn encode_matdot(
    bp: &BlockPartition,
    alpha: &ExactRational,
    upload: Precision,
    base: u32,
) -> Result<(Share, Share)> {
    let (f, g) = matdot_polynomials(bp, alpha)?;
    Ok((
        Share::quantize(f, upload, base)?,
        Share::quantize(g, upload, base)?,
    ))
}

/// Every server receives `U` and `V` in full.
pub fn encode_repetition(
    u: &RationalMatrix,
    v: &RationalMatrix,
    upload: Precision,
    base: u32,
) -> Result<(Share, Share)> {
    Ok((
        Share::quantize(u.clone(), upload, base)?,
        Share::quantize(v.clone(), upload, base)?,
    ))
}

/// Frobenius-norm bound on the inputs, `||U||_F, ||V||_F <= eta`, stored as
/// `eta^2` so that irrational `eta` such as `sqrt(3)` stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormBound {
    eta_squared: ExactRational,
}

impl NormBound {
    pub fn from_eta(eta: &ExactRational) -> Result<Self> {
        Self::from_eta_squared(eta * eta)
    }

    pub fn from_eta_squared(eta_squared: ExactRational) -> Result<Self> {
        if !eta_squared.is_positive() {
            return Err(Error::InvalidParameter("eta must be positive".into()));
        }
        Ok(Self { eta_squared })
    }

    pub fn eta_squared(&self) -> &ExactRational {
        &self.eta_squared
    }
}

const SQRT_DIGITS: u32 = 30;

/// Rational strictly above `sqrt(n)`, within `10^-30`.
pub fn sqrt_upper(n: u64) -> ExactRational {
    let scale = base_pow(10, SQRT_DIGITS);
    let root = (BigInt::from(n) * &scale * &scale).sqrt();
    ExactRational::new(root + BigInt::one(), scale)
}

/// Check `0 < epsilon <= min(2, 3 eta^2 sqrt(2p-1))` exactly.
pub fn check_epsilon_range(epsilon: &ExactRational, norm: &NormBound, p: usize) -> Result<()> {
    let two = ExactRational::from_integer(2.into());
    let nine = ExactRational::from_integer(9.into());
    let k = ExactRational::from_integer(BigInt::from(2 * p as u64 - 1));
    let within_norm_limit = epsilon * epsilon <= nine * &norm.eta_squared * &norm.eta_squared * k;
    if !epsilon.is_positive() || *epsilon > two || !within_norm_limit {
        return Err(Error::EpsilonRange {
            max: format!("min(2, 3*{}*sqrt({}))", norm.eta_squared, 2 * p - 1),
        });
    }
    Ok(())
}

/// Rational lower bound on `epsilon / (6 eta^2 sqrt(2p-1) (p^2 - p))`, the
/// largest evaluation-point magnitude that guarantees entrywise error
/// `epsilon` from `p` answers.
pub fn amd_alpha_max(epsilon: &ExactRational, norm: &NormBound, p: usize) -> Result<ExactRational> {
    if p < 2 {
        return Err(Error::InvalidParameter(
            "the alpha bound needs p >= 2".into(),
        ));
    }
    check_epsilon_range(epsilon, norm, p)?;
    let pp = (p * p - p) as u64;
    let denom = ExactRational::from_integer(BigInt::from(6 * pp))
        * &norm.eta_squared
        * sqrt_upper(2 * p as u64 - 1);
    Ok(epsilon / denom)
}

/// Whether `|alpha| <= epsilon / (6 eta^2 sqrt(2p-1) (p^2-p))`, checked by
/// squaring both sides so no square root is approximated.
pub fn satisfies_alpha_condition(
    alpha: &ExactRational,
    epsilon: &ExactRational,
    norm: &NormBound,
    p: usize,
) -> bool {
    let pp = ExactRational::from_integer(BigInt::from((p * p - p) as u64));
    let lhs = alpha.abs() * ExactRational::from_integer(6.into()) * &norm.eta_squared * pp;
    let k = ExactRational::from_integer(BigInt::from(2 * p as u64 - 1));
    &lhs * &lhs * k <= epsilon * epsilon
}

/// `a_i = (i / N) alpha_max` for `i = 1..=N`.
pub fn equispaced_points(alpha_max: &ExactRational, n: usize) -> Vec<ExactRational> {
    let n_big = BigInt::from(n as u64);
    (1..=n as u64)
        .map(|i| alpha_max * ExactRational::new(BigInt::from(i), n_big.clone()))
        .collect()
}

/// `N` distinct approximate-MatDot points meeting the achievability bound.
pub fn select_amd_points(
    epsilon: &ExactRational,
    norm: &NormBound,
    p: usize,
    n: usize,
) -> Result<Vec<ExactRational>> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let alpha_max = amd_alpha_max(epsilon, norm, p)?;
    Ok(equispaced_points(&alpha_max, n))
}

/// Smallness exponent `delta = -log_B max_i |a_i|`.
///
/// Exact when the largest magnitude is an integer power of `B^-1`; otherwise
/// the double-precision logarithm converted to a rational.
pub fn effective_delta(spec: &SchemeSpec) -> Result<ExactRational> {
    points_delta(spec.eval_points(), spec.base())
}

pub fn points_delta(points: &[ExactRational], base: u32) -> Result<ExactRational> {
    let max = points
        .iter()
        .map(Signed::abs)
        .max()
        .ok_or_else(|| Error::InvalidParameter("no evaluation points".into()))?;
    if max.is_zero() {
        return Err(Error::InvalidParameter(
            "evaluation points are all zero".into(),
        ));
    }
    if max > ExactRational::one() {
        return Err(Error::OutOfRange(format!("max |alpha| = {max} exceeds 1")));
    }
    if max.numer().is_one() {
        let mut d = max.denom().clone();
        let b = BigInt::from(base);
        let mut k: i64 = 0;
        while &d % &b == BigInt::zero() {
            d /= &b;
            k += 1;
        }
        if d.is_one() {
            return Ok(ExactRational::from_integer(k.into()));
        }
    }
    let delta = -log_base_abs(&max, base);
    ExactRational::from_float(delta.max(0.0))
        .ok_or_else(|| Error::OutOfRange("delta is not finite".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    fn ints(rows: usize, cols: usize, v: &[i64]) -> RationalMatrix {
        RationalMatrix::from_integers(rows, cols, v).unwrap()
    }

    #[test]
    fn partition_scalar_blocks() {
        let u = ints(1, 3, &[1, 2, 3]);
        let v = ints(3, 1, &[4, 5, 6]);
        let bp = partition(&u, &v, 3).unwrap();
        assert_eq!(bp.p(), 3);
        assert_eq!(bp.u_blocks()[1], ints(1, 1, &[2]));
        assert_eq!(bp.v_blocks()[2], ints(1, 1, &[6]));
        assert_eq!(bp.recombine().unwrap(), (u, v));
    }

    #[test]
    fn partition_trivial_and_block_sum() {
        let u = ints(2, 4, &[1, 2, 3, 4, 5, 6, 7, 8]);
        let v = ints(4, 2, &[1, 0, 2, 1, 0, 3, 1, 1]);
        let bp1 = partition(&u, &v, 1).unwrap();
        assert_eq!(bp1.u_blocks(), std::slice::from_ref(&u));
        assert_eq!(bp1.v_blocks(), std::slice::from_ref(&v));

        let bp = partition(&u, &v, 2).unwrap();
        assert_eq!(bp.u_blocks()[0].shape(), (2, 2));
        assert_eq!(bp.v_blocks()[1].shape(), (2, 2));
        // brute-force product of the full matrices
        let uv = Matrix::from_fn(2, 2, |r, c| {
            (0..4)
                .map(|k| &u[(r, k)] * &v[(k, c)])
                .sum::<ExactRational>()
        });
        assert_eq!(bp.block_product_sum().unwrap(), uv);
    }

    #[test]
    fn partition_errors() {
        let u = ints(1, 3, &[1, 2, 3]);
        let v = ints(3, 1, &[1, 2, 3]);
        assert_eq!(
            partition(&u, &v, 2),
            Err(Error::NotDivisible { inner: 3, p: 2 })
        );
        assert!(matches!(partition(&u, &u, 1), Err(Error::Dimension(_))));
        assert!(partition(&u, &v, 0).is_err());
    }

    #[test]
    fn encode_degree_zero_and_at_zero() {
        let u = ints(1, 3, &[1, 2, 3]);
        let v = ints(3, 1, &[4, 5, 6]);
        let bp1 = partition(&u, &v, 1).unwrap();
        let (f, g) = encode_matdot(&bp1, &q("7/3"), Precision::Digits(4), 10).unwrap();
        assert_eq!(f.values(), u);
        assert_eq!(g.values(), v);

        let bp = partition(&u, &v, 3).unwrap();
        let (f, g) = encode_matdot(&bp, &q("0"), Precision::Digits(4), 10).unwrap();
        assert_eq!(f.values(), ints(1, 1, &[1]));
        assert_eq!(g.values(), ints(1, 1, &[6]));
    }

    #[test]
    fn encode_horner_example() {
        // 1 + 2(0.1) + 3(0.01) = 1.23
        let u = ints(1, 3, &[1, 2, 3]);
        let v = ints(3, 1, &[1, 1, 1]);
        let bp = partition(&u, &v, 3).unwrap();
        let (f, _) = encode_matdot(&bp, &q("1/10"), Precision::Digits(4), 10).unwrap();
        match f {
            Share::Fixed(m) => assert_eq!(m[(0, 0)].to_string(), "1.2300"),
            Share::Exact(_) => panic!("expected fixed share"),
        }
    }

    #[test]
    fn repetition_truncates_uploads() {
        let u = RationalMatrix::from_rows(vec![vec![q("0.987654"), q("0.1234")]]).unwrap();
        let v = RationalMatrix::from_rows(vec![vec![q("0.5")], vec![q("0.25")]]).unwrap();
        let (f, g) = encode_repetition(&u, &v, Precision::Digits(4), 10).unwrap();
        assert_eq!(f.render().trim(), "0.9876 0.1234");
        assert_eq!(g.values(), v);
    }

    #[test]
    fn amd_point_examples() {
        let norm = NormBound::from_eta_squared(q("1")).unwrap();
        let pts = select_amd_points(&q("0.1"), &norm, 2, 3).unwrap();
        let max = pts.iter().max().unwrap().clone();
        // 0.1 / (12 sqrt 3) = 0.0048112522...
        assert!(max < q("0.0048112523") && max > q("0.0048112522"));
        assert!(pts
            .iter()
            .all(|a| satisfies_alpha_condition(a, &q("0.1"), &norm, 2)));

        let eq = equispaced_points(&q("1e-4"), 3);
        assert_eq!(eq, vec![q("1/30000"), q("2/30000"), q("1e-4")]);

        let shrink = select_amd_points(&q("1e-12"), &norm, 2, 3).unwrap();
        assert!(shrink[2] < q("1e-13"));
    }

    #[test]
    fn amd_point_errors() {
        let norm = NormBound::from_eta_squared(q("1")).unwrap();
        assert!(matches!(
            select_amd_points(&q("3"), &norm, 2, 3),
            Err(Error::EpsilonRange { .. })
        ));
        assert!(select_amd_points(&q("0"), &norm, 2, 3).is_err());
        // 3 eta^2 sqrt(3) = 0.0519... for eta^2 = 0.01
        let small = NormBound::from_eta_squared(q("0.01")).unwrap();
        assert!(select_amd_points(&q("0.052"), &small, 2, 3).is_err());
        assert!(select_amd_points(&q("0.051"), &small, 2, 3).is_ok());
        assert!(select_amd_points(&q("0.1"), &norm, 1, 3).is_err());
    }

    #[test]
    fn sqrt_upper_is_strict() {
        let s = sqrt_upper(9);
        assert!(s > q("3") && s < q("3.000000001"));
        let r = sqrt_upper(3);
        assert!(&r * &r > q("3"));
    }

    #[test]
    fn delta_examples() {
        let spec = |pts: Vec<ExactRational>| {
            SchemeSpec::amd(3, pts, Precision::Digits(12), Precision::Digits(12), 10).unwrap()
        };
        let s = spec(equispaced_points(&q("1e-4"), 3));
        assert_eq!(effective_delta(&s).unwrap(), q("4"));
        let s = spec(vec![q("1/2"), q("1"), q("1/3")]);
        assert_eq!(effective_delta(&s).unwrap(), q("0"));
        // 10^-2.5 = 0.00316227766016838...
        let s = spec(vec![q("0.00316227766016838"), q("0.001"), q("0.002")]);
        let d = effective_delta(&s).unwrap();
        assert!((&d - q("2.5")).abs() < q("1e-12"));
        let s = spec(vec![q("2"), q("0.1"), q("0.2")]);
        assert!(effective_delta(&s).is_err());
        assert!(points_delta(&[], 10).is_err());
        assert!(points_delta(&[q("0")], 10).is_err());
    }

    #[test]
    fn scheme_validation() {
        let pts = vec![q("1"), q("1"), q("2")];
        assert_eq!(
            SchemeSpec::matdot(2, pts, Precision::Exact, Precision::Exact, 10),
            Err(Error::RepeatedPoint)
        );
        assert!(SchemeSpec::new(
            SchemeKind::Repetition,
            2,
            vec![],
            3,
            Precision::Exact,
            Precision::Exact,
            10
        )
        .is_err());
        let rep =
            SchemeSpec::repetition(3, Precision::Digits(4), Precision::Digits(4), 10).unwrap();
        assert_eq!(rep.recovery_threshold(), 1);
        assert_eq!("AMD".parse::<SchemeKind>().unwrap(), SchemeKind::Amd);
        assert!("polynomial".parse::<SchemeKind>().is_err());
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(-50i64..50, rows * cols)
            .prop_map(move |v| RationalMatrix::from_integers(rows, cols, &v).unwrap())
    }

    /// Direct power-sum evaluation, independent of Horner.
    fn power_sum(blocks: &[RationalMatrix], alpha: &ExactRational) -> RationalMatrix {
        let mut acc = RationalMatrix::zeros(blocks[0].rows(), blocks[0].cols());
        for (j, b) in blocks.iter().enumerate() {
            let mut w = ExactRational::one();
            for _ in 0..j {
                w *= alpha;
            }
            acc = acc.add(&b.scale(&w)).unwrap();
        }
        acc
    }

    proptest! {
        #[test]
        fn partition_round_trip(u in arb_matrix(2, 6), v in arb_matrix(6, 3), p in prop::sample::select(vec![1usize, 2, 3, 6])) {
            let bp = partition(&u, &v, p).unwrap();
            prop_assert_eq!(bp.recombine().unwrap(), (u.clone(), v.clone()));
            prop_assert_eq!(bp.block_product_sum().unwrap(), u.matmul(&v).unwrap());
        }

        #[test]
        fn encoder_is_linear(u1 in arb_matrix(2, 4), u2 in arb_matrix(2, 4), v in arb_matrix(4, 2), num in -20i64..20, p in prop::sample::select(vec![1usize, 2, 4])) {
            let alpha = ExactRational::new(num.into(), 7.into());
            let a = matdot_polynomials(&partition(&u1, &v, p).unwrap(), &alpha).unwrap();
            let b = matdot_polynomials(&partition(&u2, &v, p).unwrap(), &alpha).unwrap();
            let sum = matdot_polynomials(&partition(&u1.add(&u2).unwrap(), &v, p).unwrap(), &alpha).unwrap();
            prop_assert_eq!(sum.0, a.0.add(&b.0).unwrap());
            prop_assert_eq!(sum.1, a.1);
        }

        #[test]
        fn horner_matches_power_sum(u in arb_matrix(1, 4), v in arb_matrix(4, 1), num in -30i64..30, p in prop::sample::select(vec![1usize, 2, 4])) {
            let alpha = ExactRational::new(num.into(), 11.into());
            let bp = partition(&u, &v, p).unwrap();
            let (f, g) = matdot_polynomials(&bp, &alpha).unwrap();
            let rev: Vec<_> = bp.v_blocks().iter().rev().cloned().collect();
            prop_assert_eq!(f, power_sum(bp.u_blocks(), &alpha));
            prop_assert_eq!(g, power_sum(&rev, &alpha));
        }

        #[test]
        fn product_polynomial_middle_coefficient(u in arb_matrix(2, 3), v in arb_matrix(3, 2), p in prop::sample::select(vec![1usize, 3])) {
            // F(a) G(a) = sum_k X_k a^k with X_k = sum_{i-j = k-(p-1)} U_i V_j
            // (blocks 0-based, G reversed); X_(p-1) must be UV.
            let bp = partition(&u, &v, p).unwrap();
            let deg = 2 * p - 1;
            let mut coeffs = vec![RationalMatrix::zeros(2, 2); deg];
            for i in 0..p {
                for j in 0..p {
                    let k = p - 1 + i - j;
                    coeffs[k] = coeffs[k].add(&bp.u_blocks()[i].matmul(&bp.v_blocks()[j]).unwrap()).unwrap();
                }
            }
            prop_assert_eq!(&coeffs[p - 1], &u.matmul(&v).unwrap());
            for num in [-3i64, 1, 5] {
                let alpha = ExactRational::new(num.into(), 4.into());
                let (f, g) = matdot_polynomials(&bp, &alpha).unwrap();
                prop_assert_eq!(f.matmul(&g).unwrap(), power_sum(&coeffs, &alpha));
            }
        }

        #[test]
        fn selected_points_satisfy_bound(e_num in 1i64..1000, eta_sq in 1i64..20, p in 2usize..6, n in 1usize..8) {
            let eps = ExactRational::new(e_num.into(), 1000.into());
            let norm = NormBound::from_eta_squared(ExactRational::from_integer(eta_sq.into())).unwrap();
            let pts = select_amd_points(&eps, &norm, p, n).unwrap();
            prop_assert!(ensure_distinct(&pts).is_ok());
            for a in &pts {
                prop_assert!(satisfies_alpha_condition(a, &eps, &norm, p));
            }
        }
    }
}
