//! Scalars a polynomial can be evaluated over.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::ops::{Add, Mul, Sub};

pub type Rational = BigRational;

/// Exact complex numbers with rational real and imaginary parts.
pub type Gaussian = Complex<BigRational>;

/// A commutative ring that rational coefficients embed into.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Zero + One
{
    fn from_rational(q: &Rational) -> Self;
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Scalar for Gaussian {
    fn from_rational(q: &Rational) -> Self {
        Complex::new(q.clone(), Rational::zero())
    }
}

impl Scalar for f64 {
    fn from_rational(q: &Rational) -> Self {
        rat_to_f64(q)
    }
}

impl Scalar for Complex<f64> {
    fn from_rational(q: &Rational) -> Self {
        Complex::new(rat_to_f64(q), 0.0)
    }
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from a finite float (binary expansion, no rounding).
pub fn f64_to_rat(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Parse `"p"` or `"p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: num_bigint::BigInt = a.trim().parse().ok()?;
        let d: num_bigint::BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else if s.contains('.') || s.contains('e') || s.contains('E') {
        let v: f64 = s.parse().ok()?;
        decimal_to_rat(s).or_else(|| f64_to_rat(v))
    } else {
        let n: num_bigint::BigInt = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

/// Decimal literal such as `-0.125` read exactly as 1/8 rather than via binary float.
fn decimal_to_rat(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{ip}{fp}");
    let n: num_bigint::BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let scale = exp - fp.len() as i32;
    let ten = num_bigint::BigInt::from(10);
    let mut q = if scale >= 0 {
        Rational::from_integer(n * ten.pow(scale as u32))
    } else {
        Rational::new(n, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
