//! Digit-level precision calculators and the scheme cost comparison.
//!
//! Precisions are measured in base-B digits. With evaluation points of size
//! `B^-delta` and answers known to `nu_y` digits, approximate MatDot recovers
//! the product to at most `(min(nu_y, p delta) - (p-1) delta)^+` digits, which
//! forces the uploads to carry `p nu` digits for a target of `nu`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::cluster::digit_mul_cost;
use crate::coding::{amd_alpha_max, NormBound, SchemeKind};
use crate::error::{Error, Result};
use crate::fixedpoint::{log_base_abs, ExactRational};

/// Upload, download and evaluation-point exponents for one configuration.
/// Magnitude scales are normalized to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionBudget {
    pub nu_f: ExactRational,
    pub nu_g: ExactRational,
    pub nu_y: ExactRational,
    pub delta: ExactRational,
    pub p: usize,
}

impl PrecisionBudget {
    pub fn new(
        nu_f: ExactRational,
        nu_g: ExactRational,
        nu_y: ExactRational,
        delta: ExactRational,
        p: usize,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("p must be at least 1".into()));
        }
        for (name, v) in [
            ("nu_f", &nu_f),
            ("nu_g", &nu_g),
            ("nu_y", &nu_y),
            ("delta", &delta),
        ] {
            if v.is_negative() {
                return Err(Error::OutOfRange(format!("{name} = {v} is negative")));
            }
        }
        Ok(Self {
            nu_f,
            nu_g,
            nu_y,
            delta,
            p,
        })
    }

    /// Budget whose uploads carry exactly the download precision.
    pub fn symmetric(nu_y: ExactRational, delta: ExactRational, p: usize) -> Result<Self> {
        Self::new(nu_y.clone(), nu_y.clone(), nu_y, delta, p)
    }

    /// `nu_y <= min(nu_f, nu_g)`: the download cannot carry more digits than
    /// the uploads determine.
    pub fn is_consistent(&self) -> bool {
        self.nu_y <= self.nu_f.clone().min(self.nu_g.clone())
    }
}

fn rat(n: usize) -> ExactRational {
    ExactRational::from_integer(BigInt::from(n as u64))
}

/// Recoverable product precision `max(0, min(nu_y, p delta) - (p-1) delta)`.
pub fn predicted_precision(budget: &PrecisionBudget) -> ExactRational {
    let p = rat(budget.p);
    let pm1 = rat(budget.p - 1);
    let v = budget.nu_y.clone().min(&p * &budget.delta) - &pm1 * &budget.delta;
    v.max(ExactRational::zero())
}

/// The same quantity written as the pair of bounds `nu <= delta` and
/// `nu <= (nu_y - (p-1) delta)^+`.
pub fn clamped_precision_bound(budget: &PrecisionBudget) -> ExactRational {
    let pm1 = rat(budget.p - 1);
    let residual = (&budget.nu_y - &pm1 * &budget.delta).max(ExactRational::zero());
    budget.delta.clone().min(residual)
}

/// Minimum upload precision `p nu` for a target product precision `nu`.
pub fn required_upload_precision(nu: &ExactRational, p: usize) -> Result<ExactRational> {
    if p == 0 || nu.is_negative() {
        return Err(Error::InvalidParameter("need p >= 1 and nu >= 0".into()));
    }
    Ok(nu * rat(p))
}

/// The achievability bound on evaluation points, with its digit exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBound {
    /// Rational lower bound on `epsilon / (6 eta^2 sqrt(2p-1) (p^2-p))`.
    pub value: ExactRational,
    /// `-log_B value`.
    pub delta: f64,
}

impl AlphaBound {
    /// Points at this bound are small enough for `nu` digits: `delta >= nu`.
    pub fn supports_precision(&self, nu: f64) -> bool {
        self.delta >= nu
    }
}

pub fn theorem1_alpha_bound(
    epsilon: &ExactRational,
    norm: &NormBound,
    p: usize,
    base: u32,
) -> Result<AlphaBound> {
    let value = amd_alpha_max(epsilon, norm, p)?;
    let delta = -log_base_abs(&value, base);
    Ok(AlphaBound { value, delta })
}

/// Symbolic Table-style expressions for one scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolicCosts {
    pub recovery_threshold: &'static str,
    pub upload_per_server: &'static str,
    pub total_download: &'static str,
    pub compute_per_server: &'static str,
}

pub fn symbolic_costs(kind: SchemeKind) -> SymbolicCosts {
    match kind {
        SchemeKind::MatDot => SymbolicCosts {
            recovery_threshold: "2p-1",
            upload_per_server: "ν/p",
            total_download: "(2p-1)ν",
            compute_per_server: "Õ(ν log ν / p)",
        },
        SchemeKind::Amd => SymbolicCosts {
            recovery_threshold: "p",
            upload_per_server: "ν",
            total_download: "p²ν",
            compute_per_server: "Õ(ν log(pν))",
        },
        SchemeKind::Repetition => SymbolicCosts {
            recovery_threshold: "1",
            upload_per_server: "ν",
            total_download: "ν",
            compute_per_server: "Õ(ν log ν)",
        },
    }
}

/// Costs of one scheme relative to uploading `U, V` once at `nu` digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub kind: SchemeKind,
    pub recovery_threshold: u64,
    pub upload_per_server: ExactRational,
    pub total_download: ExactRational,
    pub symbolic: SymbolicCosts,
    /// Per-server digit operations under [`digit_mul_cost`], with repetition's
    /// multiplication count normalized to one.
    pub compute_digit_ops: ExactRational,
}

impl CostReport {
    pub fn compute_cost_expr(&self) -> &'static str {
        self.symbolic.compute_per_server
    }
}

pub fn cost_table(p: usize, nu: &ExactRational) -> Result<Vec<CostReport>> {
    if p == 0 || nu.is_negative() {
        return Err(Error::InvalidParameter("need p >= 1 and nu >= 0".into()));
    }
    let pr = rat(p);
    // the cost model counts whole digits
    let digits = nu.ceil().to_integer();
    let n: u64 = digits
        .try_into()
        .map_err(|_| Error::OutOfRange(format!("nu = {nu} is too large")))?;
    let cost = |d: u64| ExactRational::from_integer(BigInt::from(digit_mul_cost(d)));
    Ok(SchemeKind::ALL
        .iter()
        .map(|&kind| {
            let (upload, download, compute) = match kind {
                SchemeKind::MatDot => (nu / &pr, rat(2 * p - 1) * nu, cost(n) / &pr),
                SchemeKind::Amd => (nu.clone(), &pr * &pr * nu, cost(p as u64 * n) / &pr),
                SchemeKind::Repetition => (nu.clone(), nu.clone(), cost(n)),
            };
            CostReport {
                kind,
                recovery_threshold: kind.recovery_threshold(p) as u64,
                upload_per_server: upload,
                total_download: download,
                symbolic: symbolic_costs(kind),
                compute_digit_ops: compute,
            }
        })
        .collect())
}

/// Aligned text table, one row per scheme.
pub fn render_cost_table(reports: &[CostReport]) -> String {
    let header = [
        "scheme",
        "R",
        "upload",
        "download",
        "compute",
        "compute_digit_ops",
    ];
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            [
                r.kind.to_string(),
                format!(
                    "{} = {}",
                    r.symbolic.recovery_threshold, r.recovery_threshold
                ),
                format!("{} = {}", r.symbolic.upload_per_server, r.upload_per_server),
                format!("{} = {}", r.symbolic.total_download, r.total_download),
                r.symbolic.compute_per_server.to_string(),
                r.compute_digit_ops.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for r in &rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// CSV with columns `scheme,R,upload,download,compute_digit_ops`.
pub fn cost_table_csv(reports: &[CostReport]) -> String {
    let mut out = String::from("scheme,R,upload,download,compute_digit_ops\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.kind,
            r.recovery_threshold,
            r.upload_per_server,
            r.total_download,
            r.compute_digit_ops
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    fn sym(nu_y: &str, p: usize, delta: &str) -> PrecisionBudget {
        PrecisionBudget::symmetric(q(nu_y), q(delta), p).unwrap()
    }

    #[test]
    fn predicted_examples() {
        assert_eq!(predicted_precision(&sym("12", 3, "4")), q("4"));
        assert_eq!(predicted_precision(&sym("4", 3, "4")), q("0"));
        assert_eq!(predicted_precision(&sym("10", 2, "6")), q("4"));
    }

    #[test]
    fn required_upload_examples() {
        assert_eq!(required_upload_precision(&q("4"), 3).unwrap(), q("12"));
        assert_eq!(required_upload_precision(&q("0"), 7).unwrap(), q("0"));
        assert_eq!(required_upload_precision(&q("5"), 4).unwrap(), q("20"));
        assert!(required_upload_precision(&q("1"), 0).is_err());
    }

    #[test]
    fn budget_validation() {
        assert!(PrecisionBudget::symmetric(q("-1"), q("1"), 2).is_err());
        let b = PrecisionBudget::new(q("4"), q("6"), q("5"), q("1"), 2).unwrap();
        assert!(!b.is_consistent());
        assert!(sym("5", 2, "1").is_consistent());
    }

    #[test]
    fn alpha_bound_examples() {
        // eta = B^(mu/2), epsilon = B^(mu - nu) with mu = 2, nu = 4
        let norm = NormBound::from_eta_squared(q("100")).unwrap();
        let b = theorem1_alpha_bound(&q("1e-2"), &norm, 3, 10).unwrap();
        assert!(b.supports_precision(4.0));
        // delta = nu + log10(6 sqrt 5 * 6)
        let expected = 4.0 + (36.0 * 5f64.sqrt()).log10();
        assert!((b.delta - expected).abs() < 1e-9);

        let unit = NormBound::from_eta_squared(q("1")).unwrap();
        let b = theorem1_alpha_bound(&q("0.1"), &unit, 2, 10).unwrap();
        assert!(
            (crate::fixedpoint::rational_to_f64(&b.value) - 0.1 / (12.0 * 3f64.sqrt())).abs()
                < 1e-15
        );

        // epsilon at its upper limit 3 eta^2 sqrt(3), with eta^2 = 1/3 so the
        // limit sqrt(3) stays below 2: the bound tends to 1/4.
        let third = NormBound::from_eta_squared(q("1/3")).unwrap();
        let eps = q("1.732050807568877"); // just below sqrt 3
        let b = theorem1_alpha_bound(&eps, &third, 2, 10).unwrap();
        assert!(b.value < q("1/4") && b.value > q("0.2499999999"));
        assert!(theorem1_alpha_bound(&q("0.1"), &unit, 1, 10).is_err());
    }

    #[test]
    fn cost_table_example() {
        let t = cost_table(3, &q("4")).unwrap();
        let by = |k| t.iter().find(|r| r.kind == k).unwrap();
        assert_eq!(by(SchemeKind::Amd).total_download, q("36"));
        assert_eq!(by(SchemeKind::Repetition).total_download, q("4"));
        assert_eq!(by(SchemeKind::MatDot).total_download, q("20"));
        assert_eq!(by(SchemeKind::MatDot).upload_per_server, q("4/3"));
        assert_eq!(by(SchemeKind::MatDot).recovery_threshold, 5);
        // AMD: cost(12)/3 = 48/3; repetition: cost(4) = 12
        assert_eq!(by(SchemeKind::Amd).compute_digit_ops, q("16"));
        assert_eq!(by(SchemeKind::Repetition).compute_digit_ops, q("12"));
        assert_eq!(by(SchemeKind::MatDot).compute_digit_ops, q("4"));
    }

    #[test]
    fn degenerate_partition_coincides() {
        let t = cost_table(1, &q("5")).unwrap();
        for r in &t {
            assert_eq!(r.recovery_threshold, 1);
            assert_eq!(r.upload_per_server, q("5"));
            assert_eq!(r.total_download, q("5"));
            assert_eq!(r.compute_digit_ops, t[2].compute_digit_ops);
        }
    }

    #[test]
    fn renders() {
        let t = cost_table(3, &q("4")).unwrap();
        let csv = cost_table_csv(&t);
        assert_eq!(
            csv.lines().next().unwrap(),
            "scheme,R,upload,download,compute_digit_ops"
        );
        assert!(csv.contains("amd,3,4,36,16"));
        let text = render_cost_table(&t);
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("p²ν = 36"));
    }

    proptest! {
        #[test]
        fn precision_monotonicity(nu_y in 0i64..30, delta in 0i64..10, p in 1usize..6) {
            let b = sym(&nu_y.to_string(), p, &delta.to_string());
            let b_next_p = sym(&nu_y.to_string(), p + 1, &delta.to_string());
            let b_more_y = sym(&(nu_y + 1).to_string(), p, &delta.to_string());
            let v = predicted_precision(&b);
            prop_assert!(predicted_precision(&b_next_p) <= v.clone());
            prop_assert!(predicted_precision(&b_more_y) >= v.clone());
            if nu_y >= p as i64 * delta {
                prop_assert_eq!(v.clone(), ExactRational::from_integer(delta.into()));
            }
            prop_assert_eq!(v.clone(), clamped_precision_bound(&b));
            if v.is_positive() {
                prop_assert!(required_upload_precision(&v, p).unwrap() <= b.nu_y.clone());
            }
        }

        #[test]
        fn cost_table_relations(p in 1usize..12, nu_num in 0i64..100, nu_den in 1i64..5) {
            let nu = ExactRational::new(nu_num.into(), nu_den.into());
            let t = cost_table(p, &nu).unwrap();
            let (md, amd, rep) = (&t[0], &t[1], &t[2]);
            prop_assert_eq!(&amd.upload_per_server, &rep.upload_per_server);
            prop_assert_eq!(&amd.total_download, &(&rep.total_download * rat(p * p)));
            if p >= 2 {
                prop_assert!(amd.recovery_threshold < md.recovery_threshold);
            }
        }
    }
}
