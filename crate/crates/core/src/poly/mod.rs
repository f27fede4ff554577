//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Everything else in the crate sits on top of this module: defining
//! polynomials of bodies, hyperbolic polynomials, determinantal pencils.
//! Floating-point work goes through [`FloatPoly`], a compiled copy of a
//! [`Polynomial`] that evaluates value, gradient and Hessian in one pass.

mod float;
pub mod matrix;
mod parse;
mod pencil;
pub mod scalar;
mod uni;

pub use float::FloatPoly;
pub use matrix::Matrix;
pub use pencil::{det_pencil, det_pencil_with_seed};
pub use scalar::{int, parse_rational, rat, rat_to_f64, Gaussian, Rational, Scalar};
pub use uni::{Bound, FloatUniPoly, UniPoly};

use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponent = Vec<u32>;

/// Sparse polynomial in `nvars` variables over the rationals.
///
/// Zero coefficients are never stored; every exponent vector has length `nvars`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    /// The coordinate function `x_i`.
    pub fn var(i: usize, nvars: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exp: Exponent, c: Rational) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Affine-linear polynomial `c0 + sum coeffs[i] x_i`.
    pub fn linear(coeffs: &[Rational], c0: Rational) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, c0);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: Rational) {
        debug_assert_eq!(exp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Maximal total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got });
        }
        Ok(())
    }

    /// Evaluate at a point; exact for rational or Gaussian-rational inputs.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> Result<S> {
        self.check_dim(x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked<S: Scalar>(&self, x: &[S]) -> S {
        let maxdeg: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        // powers[i][k] = x_i^k
        let powers: Vec<Vec<S>> = x
            .iter()
            .zip(&maxdeg)
            .map(|(xi, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                v.push(S::one());
                for k in 1..=m as usize {
                    let next = v[k - 1].clone() * xi.clone();
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_rational(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * powers[i][k as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval_gradient<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_dim(x.len())?;
        Ok(self.gradient().iter().map(|g| g.eval_unchecked(x)).collect())
    }

    /// Hessian matrix of second partials at `x`.
    pub fn hessian<S: Scalar>(&self, x: &[S]) -> Result<Matrix<S>> {
        self.check_dim(x.len())?;
        let n = self.nvars;
        let grad = self.gradient();
        let mut m = Matrix::filled(n, n, S::zero());
        for i in 0..n {
            for j in i..n {
                let v = grad[i].derivative(j).eval_unchecked(x);
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        Ok(m)
    }

    /// Insert a homogenizing variable at `position`; the result has degree
    /// `deg(p)` in `nvars + 1` variables.
    pub fn homogenize(&self, position: usize) -> Result<Self> {
        if position > self.nvars {
            return Err(Error::InvalidInput(format!(
                "homogenizing position {position} exceeds {} variables",
                self.nvars
            )));
        }
        let d = self.degree();
        let mut out = Self::zero(self.nvars + 1);
        for (e, c) in &self.terms {
            let td: u32 = e.iter().sum();
            let mut e2 = e.clone();
            e2.insert(position, d - td);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Set variable `position` to 1 and drop it.
    pub fn dehomogenize(&self, position: usize) -> Result<Self> {
        if position >= self.nvars {
            return Err(Error::InvalidInput(format!("no variable {position}")));
        }
        let mut out = Self::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.remove(position);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Coefficients of `t -> p(x + t e)`.
    pub fn restrict_line(&self, x: &[Rational], e: &[Rational]) -> Result<UniPoly> {
        self.check_dim(x.len())?;
        self.check_dim(e.len())?;
        let lines: Vec<UniPoly> = x
            .iter()
            .zip(e)
            .map(|(a, b)| UniPoly::new(vec![a.clone(), b.clone()]))
            .collect();
        Ok(self.eval_unchecked(&lines))
    }

    /// Floating-point version of [`Polynomial::restrict_line`].
    pub fn restrict_line_f64(&self, x: &[f64], e: &[f64]) -> Result<FloatUniPoly> {
        self.check_dim(x.len())?;
        self.check_dim(e.len())?;
        let lines: Vec<FloatUniPoly> = x
            .iter()
            .zip(e)
            .map(|(&a, &b)| FloatUniPoly::new(vec![a, b]))
            .collect();
        Ok(self.eval_unchecked(&lines))
    }

    /// Compose with an affine map: `y -> p(offset + basis * y)` where `basis`
    /// has one column per new variable.
    pub fn compose_affine(&self, offset: &[Rational], basis: &[Vec<Rational>]) -> Result<Self> {
        self.check_dim(offset.len())?;
        let m = basis.len();
        let subs: Vec<Polynomial> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<Rational> = basis.iter().map(|col| col[i].clone()).collect();
                Polynomial::linear(&coeffs, offset[i].clone())
            })
            .collect();
        let mut out = Polynomial::zero(m);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &subs[i].pow(k);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Embed into a ring with `n >= nvars` variables (new ones unused).
    pub fn with_nvars(&self, n: usize) -> Result<Self> {
        if n < self.nvars {
            return Err(Error::DimensionMismatch { expected: n, got: self.nvars });
        }
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.resize(n, 0);
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::from_polynomial(self)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "adding polynomials in different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "subtracting polynomials in different rings");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "multiplying polynomials in different rings");
        let mut out = Polynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::format_polynomial(self))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

impl std::str::FromStr for Polynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse::parse_polynomial(s, None)
    }
}

impl Polynomial {
    /// Parse the text format, fixing the number of variables (otherwise it is
    /// one more than the largest variable index that occurs).
    pub fn parse_with_nvars(s: &str, nvars: usize) -> Result<Self> {
        parse::parse_polynomial(s, Some(nvars))
    }
}

// JSON: {"nvars": n, "terms": [{"exp": [..], "num": "...", "den": "..."}]}
#[derive(serde::Serialize, serde::Deserialize)]
struct JsonTerm {
    exp: Vec<u32>,
    num: String,
    den: String,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct JsonPoly {
    nvars: usize,
    terms: Vec<JsonTerm>,
}

impl serde::Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JsonPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| JsonTerm {
                    exp: e.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = JsonPoly::deserialize(d)?;
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in j.terms {
            let n: num_bigint::BigInt = t.num.parse().map_err(D::Error::custom)?;
            let den: num_bigint::BigInt = t.den.parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            terms.push((t.exp, Rational::new(n, den)));
        }
        Polynomial::from_terms(j.nvars, terms).map_err(D::Error::custom)
    }
}

/// Rational vector from integers, handy in tests and fixtures.
pub fn ratvec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    fn cayley() -> Polynomial {
        p("x0^2 + x1^2 + x2^2 - 2*x0*x1*x2 - 1")
    }

    #[test]
    fn cayley_vanishes_at_vertex() {
        assert_eq!(cayley().eval(&ratvec(&[1, 1, 1])).unwrap(), int(0));
        assert_eq!(cayley().eval(&ratvec(&[1, 1, -1])).unwrap(), int(4));
    }

    #[test]
    fn zero_polynomial_evaluates_to_zero() {
        let z = Polynomial::zero(3);
        assert_eq!(z.eval(&ratvec(&[5, -2, 7])).unwrap(), int(0));
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        assert!(matches!(cayley().eval(&ratvec(&[1, 1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gradient_of_circle() {
        let g = p("x0^2 + x1^2 - 1").gradient();
        assert_eq!(g[0], p("2*x0 + 0*x1"));
        assert_eq!(g[1], Polynomial::parse_with_nvars("2*x1", 2).unwrap());
        let c = Polynomial::constant(3, int(5)).gradient();
        assert!(c.iter().all(|q| q.is_zero()));
    }

    #[test]
    fn hessian_of_homogenized_cayley_at_edge_midpoint() {
        let h = cayley().homogenize(0).unwrap();
        let m = h.hessian(&ratvec(&[1, 1, 0, 0])).unwrap();
        let expect = [[-6, 2, 0, 0], [2, 2, 0, 0], [0, 0, 2, -2], [0, 0, -2, 2]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), &int(expect[i][j]));
            }
        }
        assert!(m.is_symmetric_exact());
    }

    #[test]
    fn homogenize_examples() {
        let circ = p("x0^2 + x1^2 - 1");
        assert_eq!(circ.homogenize(2).unwrap(), p("x0^2 + x1^2 - x2^2"));
        let hc = cayley().homogenize(0).unwrap();
        assert_eq!(hc, p("x0*x1^2 + x0*x2^2 + x0*x3^2 - 2*x1*x2*x3 - x0^3"));
        assert_eq!(hc.dehomogenize(0).unwrap(), cayley());
        // a homogeneous input only gains an unused variable
        let lor = p("x0^2 - x1^2 - x2^2");
        let l2 = lor.homogenize(3).unwrap();
        assert_eq!(l2.nvars(), 4);
        assert!(l2.terms().all(|(e, _)| e[3] == 0));
    }

    #[test]
    fn restrict_line_examples() {
        let circ = p("x0^2 + x1^2 - 1");
        let q = circ.restrict_line(&ratvec(&[0, 0]), &ratvec(&[1, 0])).unwrap();
        assert_eq!(q, UniPoly::new(ratvec(&[-1, 0, 1])));
        let hc = cayley().homogenize(0).unwrap();
        let q = hc.restrict_line(&ratvec(&[1, 1, 1, 1]), &ratvec(&[1, 0, 0, 0])).unwrap();
        // (1+t)*3 - 2 - (1+t)^3 = -t^3 - 3t^2
        assert_eq!(q, UniPoly::new(ratvec(&[0, 0, -3, -1])));
        assert_eq!(q.multiplicity_at_zero().unwrap(), 2);
    }

    #[test]
    fn restrict_along_itself_is_binomial() {
        let lor = p("x0^2 - x1^2 - x2^2");
        let e = ratvec(&[2, 1, 0]);
        let q = lor.restrict_line(&e, &e).unwrap();
        assert_eq!(q, UniPoly::new(ratvec(&[3, 6, 3])));
    }

    #[test]
    fn compose_affine_matches_direct_evaluation() {
        let f = cayley();
        let off = ratvec(&[1, 0, 0]);
        let basis = vec![ratvec(&[0, 1, 0]), ratvec(&[0, 0, 1])];
        let g = f.compose_affine(&off, &basis).unwrap();
        assert_eq!(g, p("x0^2 - 2*x0*x1 + x1^2"));
    }

    #[test]
    fn json_roundtrip() {
        let f = p("-7/36*x0^3*x2 + 1/2*x1 - 3");
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"num\":\"-7\""));
        let g: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
