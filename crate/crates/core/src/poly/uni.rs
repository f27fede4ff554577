//! Univariate polynomials: exact Sturm counting and a float companion.

use super::scalar::{rat_to_f64, Rational, Scalar};
use crate::error::{Error, Result};
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Sub};

/// Exact univariate polynomial, coefficients in ascending degree.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        self.scale(&(Rational::one() / l))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        let n = r.len();
        if n <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dj) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Yun's algorithm: returns `f_1, f_2, ...` with `q = c * prod f_i^i`,
    /// each `f_i` square-free, monic and pairwise coprime.
    pub fn square_free_decomposition(&self) -> Result<Vec<UniPoly>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut out = Vec::new();
        if self.degree() == Some(0) {
            return Ok(out);
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let mut c = d.div_rem(&a0).0;
        let mut dd = &c - &b.derivative();
        loop {
            let a = b.gcd(&dd);
            b = b.div_rem(&a).0;
            c = dd.div_rem(&a).0;
            out.push(a);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            dd = &c - &b.derivative();
        }
        while out.last().is_some_and(|f| f.degree() == Some(0)) {
            out.pop();
        }
        Ok(out)
    }

    /// Product of the distinct irreducible factors.
    pub fn square_free_part(&self) -> Result<UniPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == Some(0) {
            return Ok(UniPoly::one());
        }
        Ok(self.div_rem(&self.gcd(&self.derivative())).0.monic())
    }

    /// Sturm chain `q, q', -rem(q, q'), ...`.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return seq;
        }
        seq.push(self.derivative());
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-&r);
        }
        seq
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> Result<usize> {
        self.count_roots_between(Bound::NegInf, Bound::PosInf)
    }

    /// Number of distinct roots in `(a, b]`.
    pub fn count_roots_between(&self, a: Bound, b: Bound) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let seq = self.square_free_part()?.sturm_sequence();
        let va = sign_changes(&seq, &a);
        let vb = sign_changes(&seq, &b);
        Ok(va.saturating_sub(vb))
    }

    /// Distinct roots in the open ray `(0, inf)`.
    pub fn count_positive_roots(&self) -> Result<usize> {
        self.count_roots_between(Bound::At(Rational::zero()), Bound::PosInf)
    }

    /// All roots real when counted with multiplicity.
    pub fn is_real_rooted(&self) -> Result<bool> {
        let factors = self.square_free_decomposition()?;
        let mut real = 0;
        for (i, f) in factors.iter().enumerate() {
            real += (i + 1) * f.count_real_roots()?;
        }
        Ok(real == self.degree().unwrap_or(0))
    }

    /// Multiplicity of 0 as a root.
    pub fn multiplicity_at_zero(&self) -> Result<usize> {
        self.coeffs.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroPolynomial)
    }

    pub fn to_float(&self) -> FloatUniPoly {
        FloatUniPoly::new(self.coeffs.iter().map(rat_to_f64).collect())
    }
}

/// Evaluation point for Sturm sign counts.
#[derive(Clone, Debug)]
pub enum Bound {
    NegInf,
    At(Rational),
    PosInf,
}

fn sign_changes(seq: &[UniPoly], at: &Bound) -> usize {
    let signs = seq.iter().map(|p| match at {
        Bound::At(t) => sign(&p.eval(t)),
        Bound::PosInf => sign(&p.leading()),
        Bound::NegInf => {
            let s = sign(&p.leading());
            if p.degree().unwrap_or(0) % 2 == 1 {
                -s
            } else {
                s
            }
        }
    });
    let mut prev = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

fn sign(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl Zero for UniPoly {
    fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for UniPoly {
    fn one() -> Self {
        UniPoly { coeffs: vec![Rational::one()] }
    }
}

fn zip_coeffs<T: Clone + Zero>(a: &[T], b: &[T], f: impl Fn(T, T) -> T) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            f(x, y)
        })
        .collect()
}

fn convolve<T: Clone + Zero + Mul<Output = T>>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::new(zip_coeffs(&self.coeffs, &rhs.coeffs, |x, y| x + y))
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::new(zip_coeffs(&self.coeffs, &rhs.coeffs, |x, y| x - y))
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        UniPoly::new(convolve(&self.coeffs, &rhs.coeffs))
    }
}

impl std::ops::Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        &self + &rhs
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        &self - &rhs
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        &self * &rhs
    }
}

impl Scalar for UniPoly {
    fn from_rational(q: &Rational) -> Self {
        UniPoly::new(vec![q.clone()])
    }
}

/// Float univariate polynomial, coefficients ascending.
#[derive(Clone, PartialEq, Debug)]
pub struct FloatUniPoly {
    coeffs: Vec<f64>,
}

impl FloatUniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        FloatUniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// First coefficient with `|c| > tol * max|c|`.
    pub fn multiplicity_at_zero(&self, tol: f64) -> Result<usize> {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.coeffs.iter().position(|c| c.abs() > tol * m).unwrap_or(0))
    }

    /// Drop leading coefficients below `tol * max|c|`.
    pub fn truncated(&self, tol: f64) -> FloatUniPoly {
        let m = self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.abs() <= tol * m) {
            c.pop();
        }
        FloatUniPoly::new(c)
    }

    /// Complex roots from companion-matrix eigenvalues.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let p = self.truncated(1e-14);
        let n = match p.coeffs.len() {
            0 | 1 => return Vec::new(),
            k => k - 1,
        };
        let lc = p.coeffs[n];
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -p.coeffs[i] / lc;
        }
        m.complex_eigenvalues().iter().copied().collect()
    }

    /// Smallest real root in `(0, hi]`, with nearly real complex roots counted as
    /// real.  Ranges where the constant term dominates are skipped without
    /// root finding.
    pub fn smallest_root_in(&self, hi: f64, imag_tol: f64) -> Option<f64> {
        let c = &self.coeffs;
        if c.len() <= 1 {
            return None;
        }
        if hi.is_finite() {
            let mut bound = 0.0;
            let mut t = 1.0;
            for a in &c[1..] {
                t *= hi;
                bound += a.abs() * t;
            }
            if bound < 0.999_999 * c[0].abs() {
                return None;
            }
        }
        let scale = c.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut k = c.len() - 1;
        while k > 0 && c[k].abs() <= 1e-14 * scale {
            k -= 1;
        }
        let keep = |r: f64| r > 0.0 && r <= hi;
        match k {
            0 => None,
            1 => Some(-c[0] / c[1]).filter(|&r| keep(r)),
            2 => {
                let (a, b, c0) = (c[2], c[1], c[0]);
                let disc = b * b - 4.0 * a * c0;
                let roots: [f64; 2] = if disc >= 0.0 {
                    let q = -0.5 * (b + b.signum() * disc.sqrt());
                    let q = if q == 0.0 { -0.5 * b } else { q };
                    if q == 0.0 { [0.0, 0.0] } else { [q / a, c0 / q] }
                } else {
                    let re = -b / (2.0 * a);
                    let im = (-disc).sqrt() / (2.0 * a.abs());
                    if im <= imag_tol * (1.0 + re.abs()) { [re, re] } else { return None }
                };
                roots.into_iter().filter(|&r| keep(r)).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))))
            }
            _ => self.smallest_root_above(0.0, imag_tol).filter(|&r| r <= hi),
        }
    }

    /// Smallest real root in `(lo, inf)`, with imaginary parts up to
    /// `imag_tol * (1 + |re|)` treated as real.
    pub fn smallest_root_above(&self, lo: f64, imag_tol: f64) -> Option<f64> {
        self.roots()
            .into_iter()
            .filter(|z| z.im.abs() <= imag_tol * (1.0 + z.re.abs()) && z.re > lo)
            .map(|z| z.re)
            .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))))
    }
}

impl Zero for FloatUniPoly {
    fn zero() -> Self {
        FloatUniPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for FloatUniPoly {
    fn one() -> Self {
        FloatUniPoly { coeffs: vec![1.0] }
    }
}

impl Add for FloatUniPoly {
    type Output = FloatUniPoly;
    fn add(self, rhs: FloatUniPoly) -> FloatUniPoly {
        FloatUniPoly::new(zip_coeffs(&self.coeffs, &rhs.coeffs, |x, y| x + y))
    }
}

impl Sub for FloatUniPoly {
    type Output = FloatUniPoly;
    fn sub(self, rhs: FloatUniPoly) -> FloatUniPoly {
        FloatUniPoly::new(zip_coeffs(&self.coeffs, &rhs.coeffs, |x, y| x - y))
    }
}

impl Mul for FloatUniPoly {
    type Output = FloatUniPoly;
    fn mul(self, rhs: FloatUniPoly) -> FloatUniPoly {
        FloatUniPoly::new(convolve(&self.coeffs, &rhs.coeffs))
    }
}

impl Scalar for FloatUniPoly {
    fn from_rational(q: &Rational) -> Self {
        FloatUniPoly::new(vec![rat_to_f64(q)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn basic_counts() {
        assert_eq!(u(&[-1, 0, 1]).count_real_roots().unwrap(), 2);
        assert!(u(&[-1, 0, 1]).is_real_rooted().unwrap());
        assert_eq!(u(&[1, 0, 1]).count_real_roots().unwrap(), 0);
        assert!(!u(&[1, 0, 1]).is_real_rooted().unwrap());
        assert!(matches!(UniPoly::zero().count_real_roots(), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn multiplicity() {
        assert_eq!(u(&[0, 0, 2, 1]).multiplicity_at_zero().unwrap(), 2);
        assert_eq!(u(&[5, 1]).multiplicity_at_zero().unwrap(), 0);
        let f = FloatUniPoly::new(vec![1e-13, -2e-12, 3.0, 1.0]);
        assert_eq!(f.multiplicity_at_zero(1e-9).unwrap(), 2);
    }

    #[test]
    fn repeated_roots_are_real_rooted() {
        // (t-1)^3 (t+2)^2
        let p = &u(&[-1, 1]).pow_i(3) * &u(&[2, 1]).pow_i(2);
        assert_eq!(p.count_real_roots().unwrap(), 2);
        assert!(p.is_real_rooted().unwrap());
        let sf = p.square_free_decomposition().unwrap();
        assert_eq!(sf.len(), 3);
        assert_eq!(sf[1], u(&[2, 1]));
        assert_eq!(sf[2], u(&[-1, 1]));
        // (t^2+1)^2 t
        let q = &u(&[1, 0, 1]).pow_i(2) * &u(&[0, 1]);
        assert!(!q.is_real_rooted().unwrap());
    }

    #[test]
    fn positive_roots() {
        // t (t-1)(t+3)(t-5)
        let p = &(&u(&[0, 1]) * &u(&[-1, 1])) * &(&u(&[3, 1]) * &u(&[-5, 1]));
        assert_eq!(p.count_positive_roots().unwrap(), 2);
        assert_eq!(u(&[1, 1]).count_positive_roots().unwrap(), 0);
        assert_eq!(u(&[0, 0, 1]).count_positive_roots().unwrap(), 0);
    }

    #[test]
    fn companion_roots() {
        let p = FloatUniPoly::new(vec![-6.0, 11.0, -6.0, 1.0]);
        let mut r: Vec<f64> = p.roots().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((p.smallest_root_above(1.5, 1e-9).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(FloatUniPoly::new(vec![1.0, 0.0, 1.0]).smallest_root_above(0.0, 1e-9), None);
    }

    impl UniPoly {
        fn pow_i(&self, k: u32) -> UniPoly {
            (0..k).fold(UniPoly::one(), |acc, _| &acc * self)
        }
    }

    // Independent oracle: Descartes-rule bisection on (0,1) after mapping
    // the Cauchy interval onto it.
    fn taylor_shift_one(c: &[Rational]) -> Vec<Rational> {
        let mut a = c.to_vec();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1].clone();
                a[j] += t;
            }
        }
        a
    }

    fn variations(c: &[Rational]) -> usize {
        let mut prev = 0;
        let mut v = 0;
        for s in c.iter().map(sign).filter(|&s| s != 0) {
            if prev != 0 && s != prev {
                v += 1;
            }
            prev = s;
        }
        v
    }

    // roots of c in (0,1), c square-free
    fn oracle_unit(c: &[Rational], depth: u32) -> usize {
        assert!(depth < 200);
        // (x+1)^n c(1/(x+1))
        let mut rev: Vec<Rational> = c.iter().rev().cloned().collect();
        rev = taylor_shift_one(&rev);
        match variations(&rev) {
            0 => return 0,
            1 => return 1,
            _ => {}
        }
        let n = c.len() - 1;
        let two = Rational::from_integer(2.into());
        // left half: 2^n c(x/2)
        let left: Vec<Rational> = c
            .iter()
            .enumerate()
            .map(|(k, a)| a * num_traits::pow(two.clone(), n - k))
            .collect();
        let right = taylor_shift_one(&left);
        let mid = usize::from(right[0].is_zero());
        oracle_unit(&left, depth + 1) + oracle_unit(&right, depth + 1) + mid
    }

    fn oracle_count(p: &UniPoly) -> usize {
        let q = p.square_free_part().unwrap();
        let n = q.degree().unwrap();
        if n == 0 {
            return 0;
        }
        let lc = q.leading();
        let bound = Rational::one()
            + q.coeffs()[..n].iter().map(|a| (a / &lc).abs()).fold(Rational::zero(), |m, x| m.max(x));
        // x in (0,1) -> t = -B + 2B x
        let lin = UniPoly::new(vec![-bound.clone(), &bound * Rational::from_integer(2.into())]);
        let mut acc = UniPoly::zero();
        for c in q.coeffs().iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::new(vec![c.clone()]);
        }
        let mut c = acc.coeffs().to_vec();
        c.resize(n + 1, Rational::zero());
        oracle_unit(&c, 0)
    }

    #[test]
    fn sturm_agrees_with_descartes_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 10_000 {
            let deg = rng.random_range(1..=6);
            let c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-3..=3)).collect();
            let p = u(&c);
            if p.is_zero() {
                continue;
            }
            assert_eq!(p.count_real_roots().unwrap(), oracle_count(&p), "{c:?}");
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn product_of_linear_factors_is_real_rooted(roots in prop::collection::vec(-5i64..5, 1..6)) {
            let p = roots.iter().fold(UniPoly::one(), |acc, &r| &acc * &u(&[-r, 1]));
            prop_assert!(p.is_real_rooted().unwrap());
            let mut d = roots.clone();
            d.sort();
            d.dedup();
            prop_assert_eq!(p.count_real_roots().unwrap(), d.len());
        }

        #[test]
        fn division_identity(a in prop::collection::vec(-4i64..4, 1..7), b in prop::collection::vec(-4i64..4, 1..5)) {
            let a = u(&a);
            let b = u(&b);
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b);
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
        }
    }
}
