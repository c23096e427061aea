//! Exact base-B fixed-point values and truncation.
//!
//! A [`TruncatedValue`] is an unbounded integer mantissa scaled by `B^-scale`.
//! Sums and products are exact; digits are only ever dropped by an explicit
//! call to [`truncate`] or [`TruncatedValue::truncate_to`].

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for inputs, evaluation points and ground truth.
pub type ExactRational = BigRational;

/// Default radix, matching decimal experiments.
pub const DEFAULT_BASE: u32 = 10;

/// Digit budget for a truncation site.
///
/// `Exact` skips truncation entirely and is used for achievability checks
/// where only the coding approximation should contribute error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Digits(u32),
    Exact,
}

impl Precision {
    pub fn digits(self) -> Option<u32> {
        match self {
            Precision::Digits(d) => Some(d),
            Precision::Exact => None,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Digits(d) => write!(f, "{d}"),
            Precision::Exact => f.write_str("exact"),
        }
    }
}

pub(crate) fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        Err(Error::InvalidBase(base))
    } else {
        Ok(())
    }
}

/// `base^exp` as a big integer.
pub fn base_pow(base: u32, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// `base^exp` as an exact rational; negative exponents give `1 / base^-exp`.
pub fn base_pow_rational(base: u32, exp: i32) -> ExactRational {
    let p = base_pow(base, exp.unsigned_abs());
    if exp >= 0 {
        ExactRational::from_integer(p)
    } else {
        ExactRational::new(BigInt::one(), p)
    }
}

/// Fixed-point scalar: `mantissa * base^-scale`, exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedValue {
    mantissa: BigInt,
    scale: u32,
    base: u32,
}

impl TruncatedValue {
    pub fn new(mantissa: BigInt, scale: u32, base: u32) -> Result<Self> {
        check_base(base)?;
        Ok(Self {
            mantissa,
            scale,
            base,
        })
    }

    pub fn zero(scale: u32, base: u32) -> Result<Self> {
        Self::new(BigInt::zero(), scale, base)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// The represented real value.
    pub fn value(&self) -> ExactRational {
        ExactRational::new(self.mantissa.clone(), base_pow(self.base, self.scale))
    }

    /// Same value carried at a larger scale. Fails if digits would be lost.
    pub fn rescale(&self, scale: u32) -> Result<Self> {
        if scale < self.scale {
            return Err(Error::OutOfRange(format!(
                "cannot rescale from {} to {} digits without truncating",
                self.scale, scale
            )));
        }
        Ok(Self {
            mantissa: &self.mantissa * base_pow(self.base, scale - self.scale),
            scale,
            base: self.base,
        })
    }

    /// Truncate toward zero to `gamma` fractional digits. When `gamma` is at
    /// least the current scale the value is padded, not changed.
    pub fn truncate_to(&self, gamma: u32) -> Self {
        if gamma >= self.scale {
            return Self {
                mantissa: &self.mantissa * base_pow(self.base, gamma - self.scale),
                scale: gamma,
                base: self.base,
            };
        }
        // BigInt division rounds toward zero.
        Self {
            mantissa: &self.mantissa / base_pow(self.base, self.scale - gamma),
            scale: gamma,
            base: self.base,
        }
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            Err(Error::BaseMismatch {
                left: self.base,
                right: other.base,
            })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let scale = self.scale.max(other.scale);
        let a = &self.mantissa * base_pow(self.base, scale - self.scale);
        let b = &other.mantissa * base_pow(self.base, scale - other.scale);
        Ok(Self {
            mantissa: a + b,
            scale,
            base: self.base,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        Ok(Self {
            mantissa: &self.mantissa * &other.mantissa,
            scale: self.scale + other.scale,
            base: self.base,
        })
    }

    /// Lossy conversion for summaries and plotting only.
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value())
    }

    /// Parse a radix-`base` string such as `0.1234` or `-12.5`.
    ///
    /// The scale is the number of digits written after the radix point, so
    /// rendering the result gives back the input.
    pub fn parse(s: &str, base: u32) -> Result<Self> {
        check_base(base)?;
        if base > 36 {
            return Err(Error::InvalidBase(base));
        }
        let s = s.trim();
        let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('\u{2212}') {
            (true, rest)
        } else {
            (false, s.strip_prefix('+').unwrap_or(s))
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || body.ends_with('.') {
            return Err(Error::Parse(format!("malformed fixed-point literal `{s}`")));
        }
        let digits = format!("{int_part}{frac_part}");
        let magnitude = BigInt::parse_bytes(digits.as_bytes(), base)
            .filter(|_| digits.bytes().all(|b| b.is_ascii_alphanumeric()))
            .ok_or_else(|| Error::Parse(format!("malformed fixed-point literal `{s}`")))?;
        let mantissa = if negative { -magnitude } else { magnitude };
        Ok(Self {
            mantissa,
            scale: frac_part.len() as u32,
            base,
        })
    }
}

impl fmt::Display for TruncatedValue {
    /// Renders exactly `scale` digits after the radix point in the value's own
    /// base (digits above 9 use lowercase letters).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.mantissa.magnitude().to_str_radix(self.base);
        let scale = self.scale as usize;
        let padded = if digits.len() <= scale {
            format!("{}{}", "0".repeat(scale + 1 - digits.len()), digits)
        } else {
            digits
        };
        if self.mantissa.sign() == Sign::Minus {
            f.write_str("-")?;
        }
        if scale == 0 {
            f.write_str(&padded)
        } else {
            let (int, frac) = padded.split_at(padded.len() - scale);
            write!(f, "{int}.{frac}")
        }
    }
}

impl FromStr for TruncatedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, DEFAULT_BASE)
    }
}

pub fn fp_add(a: &TruncatedValue, b: &TruncatedValue) -> Result<TruncatedValue> {
    a.checked_add(b)
}

pub fn fp_mul(a: &TruncatedValue, b: &TruncatedValue) -> Result<TruncatedValue> {
    a.checked_mul(b)
}

/// Drop every digit of `x` past position `gamma` after the radix point,
/// toward zero: `sign(x) * floor(|x| B^gamma) * B^-gamma`.
pub fn truncate(x: &ExactRational, gamma: u32, base: u32) -> Result<TruncatedValue> {
    check_base(base)?;
    let scaled = x * ExactRational::from_integer(base_pow(base, gamma));
    Ok(TruncatedValue {
        mantissa: scaled.to_integer(),
        scale: gamma,
        base,
    })
}

/// Integer formed by the top `nu` digits of a normalized value in `[0, 1)`.
pub fn top_digits(w_bar: &ExactRational, nu: u32, base: u32) -> Result<BigInt> {
    check_base(base)?;
    if w_bar.is_negative() || *w_bar >= ExactRational::one() {
        return Err(Error::OutOfRange(format!(
            "normalized value {w_bar} is outside [0, 1)"
        )));
    }
    Ok((w_bar * ExactRational::from_integer(base_pow(base, nu)))
        .floor()
        .to_integer())
}

/// Parse an exact rational from `a/b`, a decimal literal, or scientific
/// notation such as `1e-4` or `2.5E3`.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let err = || Error::Parse(format!("cannot parse `{s}` as an exact rational"));
    let s_norm = s.replace('\u{2212}', "-");
    if let Some((n, d)) = s_norm.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(ExactRational::new(n, d));
    }
    let (mant, exp) = match s_norm.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s_norm[i + 1..].parse().map_err(|_| err())?;
            (&s_norm[..i], e)
        }
        None => (s_norm.as_str(), 0),
    };
    let fixed = TruncatedValue::parse(mant, 10).map_err(|_| err())?;
    Ok(fixed.value() * base_pow_rational(10, exp))
}

/// Nearest-ish `f64` of a big rational, robust to huge numerators and
/// denominators. Used only for reporting.
pub fn rational_to_f64(x: &ExactRational) -> f64 {
    if let Some(v) = x.to_f64().filter(|v| v.is_finite() && *v != 0.0) {
        return v;
    }
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_abs_bigint(x.numer()) - ln_abs_bigint(x.denom())).exp()
}

/// Natural log of `|n|` for arbitrarily large `n != 0`.
pub(crate) fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `log_base |x|` for a nonzero rational.
pub fn log_base_abs(x: &ExactRational, base: u32) -> f64 {
    (ln_abs_bigint(x.numer()) - ln_abs_bigint(x.denom())) / (base as f64).ln()
}

/// Whether `x` can be written with at most `digits` fractional base-B digits.
pub fn is_representable(x: &ExactRational, digits: u32, base: u32) -> bool {
    base_pow(base, digits).is_multiple_of(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> ExactRational {
        parse_rational(s).unwrap()
    }

    fn tv(s: &str) -> TruncatedValue {
        s.parse().unwrap()
    }

    #[test]
    fn truncate_drops_trailing_digits() {
        assert_eq!(
            truncate(&q("0.123456"), 4, 10).unwrap().to_string(),
            "0.1234"
        );
        assert_eq!(truncate(&q("0.1234"), 4, 10).unwrap().to_string(), "0.1234");
    }

    #[test]
    fn truncate_seven_thirds() {
        // 7/3 = 2.333333..., long division to six digits: 2.333333
        let t = truncate(&q("7/3"), 5, 10).unwrap();
        assert_eq!(t.to_string(), "2.33333");
        assert_eq!(t.value(), q("233333/100000"));
    }

    #[test]
    fn truncate_negative_is_toward_zero() {
        let t = truncate(&q("-0.98765"), 2, 10).unwrap();
        assert_eq!(t.to_string(), "-0.98");
        assert_eq!(truncate(&q("-1/3"), 3, 10).unwrap().to_string(), "-0.333");
    }

    #[test]
    fn add_examples() {
        assert_eq!(
            fp_add(&tv("0.12"), &tv("0.345")).unwrap().to_string(),
            "0.465"
        );
        let x = tv("0.4321");
        assert_eq!(fp_add(&x, &tv("0")).unwrap().value(), x.value());
        assert_eq!(
            fp_add(&tv("0.9999"), &tv("0.0001")).unwrap().to_string(),
            "1.0000"
        );
    }

    #[test]
    fn mul_examples() {
        assert_eq!(fp_mul(&tv("0.2"), &tv("0.3")).unwrap().to_string(), "0.06");
        let x = tv("0.4321");
        assert_eq!(fp_mul(&x, &tv("1")).unwrap(), x);
        // 1234 * 5678 = 7006652
        assert_eq!(
            fp_mul(&tv("0.1234"), &tv("0.5678")).unwrap().to_string(),
            "0.07006652"
        );
    }

    #[test]
    fn base_mismatch_is_rejected() {
        let a = TruncatedValue::parse("0.1", 10).unwrap();
        let b = TruncatedValue::parse("0.1", 2).unwrap();
        assert_eq!(
            fp_add(&a, &b),
            Err(Error::BaseMismatch { left: 10, right: 2 })
        );
        assert!(fp_mul(&a, &b).is_err());
    }

    #[test]
    fn top_digit_examples() {
        assert_eq!(
            top_digits(&q("0.123456"), 5, 10).unwrap(),
            BigInt::from(12345)
        );
        assert_eq!(top_digits(&q("0"), 7, 10).unwrap(), BigInt::zero());
        assert_eq!(top_digits(&q("1/3"), 3, 10).unwrap(), BigInt::from(333));
        assert!(top_digits(&q("1"), 3, 10).is_err());
        assert!(top_digits(&q("-0.1"), 3, 10).is_err());
    }

    #[test]
    fn invalid_base() {
        assert_eq!(truncate(&q("1/2"), 3, 1), Err(Error::InvalidBase(1)));
    }

    #[test]
    fn render_and_parse() {
        for s in ["0.1234", "-0.0001", "12", "-3.50", "0.000"] {
            assert_eq!(tv(s).to_string(), s);
        }
        assert_eq!(tv("\u{2212}0.5").to_string(), "-0.5");
        let b = TruncatedValue::parse("0.101", 2).unwrap();
        assert_eq!(b.value(), q("5/8"));
        assert_eq!(b.to_string(), "0.101");
        assert!(TruncatedValue::parse("1.2.3", 10).is_err());
        assert!(TruncatedValue::parse("1.", 10).is_err());
        assert!(TruncatedValue::parse("12a", 10).is_err());
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(q("1e-4"), ExactRational::new(1.into(), 10000.into()));
        assert_eq!(q("2.5E1"), ExactRational::from_integer(25.into()));
        assert_eq!(q("-3/6"), ExactRational::new((-1).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn truncate_to_matches_rational_truncation() {
        let x = tv("-0.987654");
        assert_eq!(x.truncate_to(3).to_string(), "-0.987");
        assert_eq!(x.truncate_to(8).value(), x.value());
    }

    #[test]
    fn f64_conversion_handles_huge_terms() {
        let tiny = ExactRational::new(BigInt::one(), base_pow(10, 400));
        assert!(rational_to_f64(&tiny) >= 0.0);
        assert!((log_base_abs(&tiny, 10) + 400.0).abs() < 1e-9);
        let big = ExactRational::new(base_pow(10, 500) * 3, base_pow(10, 500));
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-12);
    }

    fn arb_rational() -> impl Strategy<Value = ExactRational> {
        (any::<i64>(), 1i64..1_000_000_000)
            .prop_map(|(n, d)| ExactRational::new(BigInt::from(n), BigInt::from(d)))
    }

    fn arb_fixed() -> impl Strategy<Value = TruncatedValue> {
        (any::<i64>(), 0u32..12).prop_map(|(m, s)| TruncatedValue::new(m.into(), s, 10).unwrap())
    }

    proptest! {
        #[test]
        fn truncation_error_and_idempotence(x in arb_rational(), gamma in 0u32..20, base in 2u32..17) {
            let t = truncate(&x, gamma, base).unwrap();
            let err = (t.value() - &x).abs();
            prop_assert!(err < base_pow_rational(base, -(gamma as i32)));
            prop_assert!(t.value().abs() <= x.abs());
            prop_assert_eq!(truncate(&t.value(), gamma, base).unwrap(), t);
        }

        #[test]
        fn truncation_is_monotone(a in 0u64..u64::MAX, b in 0u64..u64::MAX, d in 1u64..1_000_000, gamma in 0u32..12) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let lo = ExactRational::new(lo.into(), d.into());
            let hi = ExactRational::new(hi.into(), d.into());
            prop_assert!(truncate(&lo, gamma, 10).unwrap().value() <= truncate(&hi, gamma, 10).unwrap().value());
        }

        #[test]
        fn fixed_ops_agree_with_rationals(a in arb_fixed(), b in arb_fixed()) {
            let s = fp_add(&a, &b).unwrap();
            prop_assert_eq!(s.scale(), a.scale().max(b.scale()));
            prop_assert_eq!(s.value(), a.value() + b.value());
            let p = fp_mul(&a, &b).unwrap();
            prop_assert_eq!(p.scale(), a.scale() + b.scale());
            prop_assert_eq!(p.value(), a.value() * b.value());
        }

        #[test]
        fn top_digits_rescale(n in 0u64..1_000_000, extra in 1u64..1_000_000, nu in 0u32..15) {
            let w = ExactRational::new(n.into(), (n + extra).into());
            let coarse = top_digits(&w, nu, 10).unwrap();
            let fine = top_digits(&w, nu + 1, 10).unwrap();
            prop_assert_eq!(coarse, fine.div_floor(&BigInt::from(10)));
        }

        #[test]
        fn render_round_trip(a in arb_fixed()) {
            let back = TruncatedValue::parse(&a.to_string(), a.base()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
