use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use super::LinAlgError;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Which arithmetic a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Exact,
    Float,
}

/// Field elements usable as matrix entries: `Rational` (exact) or `f64`.
///
/// Float comparisons go through [`Scalar::is_zero_within`]; in the exact
/// regime the tolerance argument is ignored.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static {
    const REGIME: Regime;

    fn from_int(v: i64) -> Self;
    fn from_ratio(p: i64, q: i64) -> Self;
    /// Exact conversion of a rational; rounds in the float regime.
    fn from_rational(r: &Rational) -> Self;
    /// Exact value of `self` as a rational (`None` for non-finite floats).
    fn to_rational(&self) -> Option<Rational>;
    fn to_float(&self) -> f64;
    fn is_zero_within(&self, tol: f64) -> bool;
    /// Square root when it exists in the regime (perfect squares only when exact).
    fn sqrt_checked(&self) -> Option<Self>;

    fn is_exact() -> bool {
        Self::REGIME == Regime::Exact
    }
}

impl Scalar for f64 {
    const REGIME: Regime = Regime::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
    fn to_float(&self) -> f64 {
        *self
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn sqrt_checked(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for Rational {
    const REGIME: Regime = Regime::Exact;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn to_float(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Rational::new(n, d))
    }
}

fn exact_isqrt(v: &BigInt) -> Option<BigInt> {
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Correctly scaled conversion that survives huge numerators/denominators.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift > 0 {
        Rational::new(r.numer().clone(), r.denom() << (shift as usize))
    } else {
        Rational::new(r.numer() << ((-shift) as usize), r.denom().clone())
    };
    let q = scaled.to_integer().to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

/// Parses "p/q", an integer, or a finite decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, LinAlgError> {
    let s = text.trim();
    let bad = || LinAlgError::Parse(format!("not a rational literal: {text:?}"));
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(Rational::from_integer(i));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let neg = mantissa.starts_with('-');
    let m = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = m.split_once('.').unwrap_or((m, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Formats a rational as "p/q" (or "p" for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
pub fn rational_approx(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(p1), BigInt::from(q1)))
}

pub(crate) fn from_f64<T: Scalar>(v: f64) -> T {
    match Rational::from_float(v) {
        Some(r) => T::from_rational(&r),
        None => T::from_int(0),
    }
}
