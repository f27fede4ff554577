//! Hyperbolic polynomials and their cones.
//!
//! `p` homogeneous of degree `g` is hyperbolic in direction `e` when every
//! restriction `t -> p(x + t e)` is real-rooted.  The closed cone is taken
//! as `{x : every real root of p(x + t e) is <= 0}` (so `x = e` has the
//! root `-1` with multiplicity `g`).  Face dimensions follow Renegar: at a
//! regular boundary point the face containing `x` has dimension
//! `n + 2 - rank H(x)` in `R^(n+1)`.

use crate::body::{cone_contains_float, Body, BodySpec, Rep};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub};
use crate::poly::scalar::{f64_to_rat, rat_to_f64};
use crate::poly::{int, Matrix, Polynomial, Rational, UniPoly};
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct HyperbolicCone {
    p: Polynomial,
    e: Vec<Rational>,
    e_f: Vec<f64>,
}

impl HyperbolicCone {
    pub fn new(p: Polynomial, e: Vec<Rational>) -> Result<Self> {
        if e.len() != p.nvars() {
            return Err(Error::DimensionMismatch { expected: p.nvars(), got: e.len() });
        }
        if p.is_zero() || !p.is_homogeneous() {
            return Err(Error::InvalidInput("hyperbolic polynomial must be homogeneous and nonzero".into()));
        }
        if p.eval(&e)?.is_zero() {
            return Err(Error::InvalidInput("p(e) = 0".into()));
        }
        let e_f = e.iter().map(rat_to_f64).collect();
        Ok(HyperbolicCone { p, e, e_f })
    }

    /// `e` given in floating point; every `f64` is an exact rational.
    pub fn with_f64_direction(p: Polynomial, e: &[f64]) -> Result<Self> {
        let e = e
            .iter()
            .map(|&v| f64_to_rat(v).ok_or_else(|| Error::InvalidInput("non-finite direction".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, e)
    }

    pub fn poly(&self) -> &Polynomial {
        &self.p
    }

    pub fn direction(&self) -> &[Rational] {
        &self.e
    }

    pub fn degree(&self) -> u32 {
        self.p.degree()
    }

    pub fn nplus1(&self) -> usize {
        self.e.len()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.nplus1() {
            return Err(Error::DimensionMismatch { expected: self.nplus1(), got: n });
        }
        Ok(())
    }

    /// `t -> p(x + t e)`.
    pub fn restriction(&self, x: &[Rational]) -> Result<UniPoly> {
        self.check_len(x.len())?;
        self.p.restrict_line(x, &self.e)
    }

    /// Exact membership in the closed cone: no root of `p(x + t e)` in `(0, inf)`.
    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        Ok(self.restriction(x)?.count_positive_roots()? == 0)
    }

    /// Float membership: no root exceeds `tol` (relative to the root scale).
    pub fn contains_f64(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_len(x.len())?;
        Ok(cone_contains_float(&self.p.to_float(), &self.e_f, x, tol))
    }

    /// Multiplicity of `0` as a root of `p(x + t e)`: 0 inside, >= 1 on the boundary.
    pub fn multiplicity(&self, x: &[Rational]) -> Result<usize> {
        let r = self.restriction(x)?;
        if r.count_positive_roots()? != 0 {
            return Err(Error::OutsideCone);
        }
        r.multiplicity_at_zero()
    }

    /// Number of roots of `p(x + t e)` within `tol * (1 + |x|/|e|)` of zero.
    pub fn multiplicity_f64(&self, x: &[f64], tol: f64) -> Result<usize> {
        self.check_len(x.len())?;
        let scale = 1.0 + norm(x) / norm(&self.e_f);
        let roots = self.p.restrict_line_f64(x, &self.e_f)?.roots();
        if roots.iter().any(|z| z.im.abs() <= tol * scale && z.re > tol * scale) {
            return Err(Error::OutsideCone);
        }
        Ok(roots.iter().filter(|z| z.norm() <= tol * scale).count())
    }

    /// Exact face dimension of the face containing `x` in its relative
    /// interior; `x` must be a regular boundary point.
    pub fn renegar_face_dim(&self, x: &[Rational]) -> Result<usize> {
        match self.multiplicity(x)? {
            0 => return Err(Error::InsideBody),
            1 => {}
            m => return Err(Error::HighMultiplicity(m)),
        }
        if self.p.eval_gradient(x)?.iter().all(|g| g.is_zero()) {
            return Err(Error::SingularPoint);
        }
        let rank = self.p.hessian(x)?.rank_exact()?;
        Ok(self.nplus1() + 1 - rank)
    }

    /// Float face dimension; the Hessian rank counts singular values above
    /// `rank_tol * sigma_max`, boundary and singularity tests use `tol`.
    pub fn renegar_face_dim_f64(&self, x: &[f64], tol: f64, rank_tol: f64) -> Result<usize> {
        match self.multiplicity_f64(x, tol)? {
            0 => return Err(Error::InsideBody),
            1 => {}
            m => return Err(Error::HighMultiplicity(m)),
        }
        let fp = self.p.to_float();
        let (_, g, h) = fp.value_grad_hess(x, true);
        let n = self.nplus1();
        let hm = Matrix::from_rows(h.chunks(n).map(|r| r.to_vec()).collect())?;
        if norm(&g) <= tol * hessian_scale(&hm) * (1.0 + norm(x)) {
            return Err(Error::SingularPoint);
        }
        Ok(n + 1 - hm.numeric_rank(rank_tol)?)
    }
}

fn hessian_scale(h: &Matrix<f64>) -> f64 {
    h.to_rows().iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HyperbolicityCheck {
    CertifiedOnSamples { samples: usize, seed: u64 },
    Refuted { witness: Vec<String> },
}

/// Tests real-rootedness of `p(x + t e)` exactly at the coordinate vectors
/// and then at `n_samples` seeded rationals of the unit box (denominators
/// up to 16).  Monte Carlo: a certificate covers only the samples.
pub fn check_hyperbolic(c: &HyperbolicCone, n_samples: usize, seed: u64) -> Result<HyperbolicityCheck> {
    let n = c.nplus1();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let unit = (0..n).map(|i| (0..n).map(|j| int(i64::from(i == j))).collect::<Vec<_>>());
    let random: Vec<Vec<Rational>> = (0..n_samples)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let q: i64 = rng.random_range(1..=16);
                    Rational::new(rng.random_range(-q..=q).into(), q.into())
                })
                .collect()
        })
        .collect();
    for x in unit.chain(random) {
        if !c.restriction(&x)?.is_real_rooted()? {
            return Ok(HyperbolicityCheck::Refuted { witness: x.iter().map(crate::poly::scalar::format_rational).collect() });
        }
    }
    Ok(HyperbolicityCheck::CertifiedOnSamples { samples: n_samples, seed })
}

/// The slice `{x in C : <x, e> = |e|^2}` as a body.  Rejects cones that are
/// not pointed (both `x` and `-x` inside for a sampled `x`) and slices that
/// are unbounded along a coordinate probe.
pub fn hyperbolic_body(c: &HyperbolicCone) -> Result<Body> {
    let n = c.nplus1();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xc0e);
    for _ in 0..64 {
        let x: Vec<f64> = c.e_f.iter().map(|&a| a + rng.random_range(-2.0..2.0)).collect();
        let neg: Vec<f64> = x.iter().map(|a| -a).collect();
        if norm(&x) > 1e-9 && c.contains_f64(&x, 0.0)? && c.contains_f64(&neg, 0.0)? {
            return Err(Error::Degenerate("cone is not pointed".into()));
        }
    }
    let body = Body::new(BodySpec {
        name: None,
        rep: Rep::Hyperbolic { p: c.p.clone(), e: c.e_f.clone() },
        interior_point: None,
        components: None,
    })?;
    for k in 0..n - 1 {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; n - 1];
            v[k] = s;
            match body.ray_exit(&v, 1e-6) {
                Ok(_) => {}
                Err(Error::Unbounded(m)) => return Err(Error::Unbounded(format!("slice is unbounded along probe {k}: {m}"))),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(body)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstancyReport {
    /// Multiplicity -> number of samples.
    pub multiplicities: BTreeMap<usize, usize>,
    pub face_dim: usize,
    pub samples: usize,
    pub pass: bool,
}

/// Samples the relative interior of the face `C ∩ {<l, x> = 0}` and
/// records the root multiplicity at each sample.
///
/// The face is found by minimising `l` over the slice body; its span is
/// the radical of the Hessian form on the tangent space at that point.
/// Samples are strict convex combinations of points spread along the span
/// up to where the multiplicity would jump (the relative boundary).
pub fn multiplicity_constancy_probe(c: &HyperbolicCone, l: &[f64], n_samples: usize, seed: u64) -> Result<ConstancyReport> {
    c.check_len(l.len())?;
    let n = c.nplus1();
    let body = hyperbolic_body(c)?;
    let e = &c.e_f;
    let basis: Vec<Vec<f64>> = (0..n - 1)
        .map(|j| {
            let mut y = vec![0.0; n - 1];
            y[j] = 1.0;
            sub(&body.to_cone_point(&y).expect("hyperbolic body"), e)
        })
        .collect();
    let lu: Vec<f64> = l.iter().map(|a| a / norm(l)).collect();
    // min over the slice of <l, x> = <l, e> - h(-B^T l)
    let neg_bt: Vec<f64> = basis.iter().map(|b| -dot(b, &lu)).collect();
    let (min, x0) = if norm(&neg_bt) < 1e-14 {
        (dot(&lu, e), e.clone())
    } else {
        let s = body.support(&neg_bt)?;
        (dot(&lu, e) - s.value, body.to_cone_point(&s.maximizer).expect("hyperbolic body"))
    };
    let tol = 1e-6 * norm(e);
    if min < -tol {
        return Err(Error::NotSupporting(format!("min <l, x> on the slice is {min:e} < 0")));
    }
    if min > tol {
        return Err(Error::NotSupporting(format!("l is strictly positive on the cone (min {min:e}); it exposes only the origin")));
    }
    let mult_tol = 1e-5;
    let m0 = c.multiplicity_f64(&x0, mult_tol)?;
    let span = face_span(c, &x0, m0);
    let face_dim = span.len();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // directions in the face span orthogonal to e (they stay in the slice)
    let dirs: Vec<Vec<f64>> = span
        .iter()
        .map(|v| {
            let t = dot(v, e) / dot(e, e);
            v.iter().zip(e).map(|(a, b)| a - t * b).collect::<Vec<f64>>()
        })
        .filter(|v| norm(v) > 1e-6)
        .collect();
    let mut ends = vec![x0.clone()];
    if !dirs.is_empty() {
        for _ in 0..8 {
            let mut w = vec![0.0; n];
            for d in &dirs {
                let a: f64 = rng.random_range(-1.0..1.0);
                for k in 0..n {
                    w[k] += a * d[k];
                }
            }
            let w: Vec<f64> = w.iter().map(|a| a / norm(&w)).collect();
            ends.push(face_exit(c, &x0, &w, m0, mult_tol));
        }
    }
    let mut mult = BTreeMap::new();
    for _ in 0..n_samples {
        // strictly positive weights keep the sample off the relative boundary
        let wts: Vec<f64> = (0..ends.len()).map(|_| rng.random_range(0.05..1.0)).collect();
        let tot: f64 = wts.iter().sum();
        let x: Vec<f64> = (0..n).map(|k| ends.iter().zip(&wts).map(|(p, w)| p[k] * w / tot).sum()).collect();
        *mult.entry(c.multiplicity_f64(&x, mult_tol)?).or_insert(0) += 1;
    }
    let pass = mult.len() == 1;
    Ok(ConstancyReport { multiplicities: mult, face_dim, samples: n_samples, pass })
}

/// Orthonormal basis of the span of the face containing `x`: the radical
/// of the Hessian form restricted to the tangent space (regular points),
/// or the ray through `x` itself otherwise.
fn face_span(c: &HyperbolicCone, x: &[f64], mult: usize) -> Vec<Vec<f64>> {
    let n = c.nplus1();
    let unit: Vec<f64> = x.iter().map(|a| a / norm(x)).collect();
    if mult != 1 {
        return vec![unit];
    }
    let (_, g, h) = c.p.to_float().value_grad_hess(x, true);
    let gn = norm(&g);
    // tangent basis: complement of the gradient
    let mut t: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v: Vec<f64> = (0..n).map(|k| f64::from(u8::from(k == i))).collect();
        for b in std::iter::once(g.iter().map(|a| a / gn).collect::<Vec<_>>()).chain(t.clone()) {
            let d = dot(&v, &b);
            v.iter_mut().zip(&b).for_each(|(a, bb)| *a -= d * bb);
        }
        if norm(&v) > 1e-8 {
            let nv = norm(&v);
            t.push(v.iter().map(|a| a / nv).collect());
        }
        if t.len() == n - 1 {
            break;
        }
    }
    let q = DMatrix::from_fn(n, t.len(), |i, j| t[j][i]);
    let hm = DMatrix::from_row_slice(n, n, &h);
    let m = q.transpose() * &hm * &q;
    let eig = SymmetricEigen::new(m);
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut span: Vec<Vec<f64>> = Vec::new();
    for (i, lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() <= 1e-6 * top {
            let v = &q * eig.eigenvectors.column(i);
            span.push(v.iter().copied().collect());
        }
    }
    if span.is_empty() {
        span.push(unit);
    }
    span
}

/// Furthest point `x + s w` (bisection on `s`) whose multiplicity equals
/// `m` and which stays in the cone; the face boundary is where either fails.
fn face_exit(c: &HyperbolicCone, x: &[f64], w: &[f64], m: usize, tol: f64) -> Vec<f64> {
    let at = |s: f64| -> Vec<f64> { x.iter().zip(w).map(|(a, b)| a + s * b).collect() };
    let ok = |s: f64| matches!(c.multiplicity_f64(&at(s), tol), Ok(k) if k == m);
    let mut hi = 1.0;
    while ok(hi) && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// Exact check of `H(x) x = (g - 1) grad p(x)`.
pub fn euler_hessian_identity(p: &Polynomial, x: &[Rational]) -> Result<bool> {
    let h = p.hessian(x)?;
    let g = p.eval_gradient(x)?;
    let k = int(i64::from(p.degree()) - 1);
    Ok((0..x.len()).all(|i| {
        let hx = (0..x.len()).fold(Rational::zero(), |acc, j| acc + h.get(i, j) * &x[j]);
        hx == &k * &g[i]
    }))
}

/// True when every gradient entry vanishes exactly.
pub fn is_singular_point(p: &Polynomial, x: &[Rational]) -> Result<bool> {
    Ok(p.eval_gradient(x)?.iter().all(|g| g.is_zero()))
}

/// Rational point of the unit circle from the parameter `u`:
/// `((1-u^2)/(1+u^2), 2u/(1+u^2))`.
pub fn rational_circle_point(u: &Rational) -> (Rational, Rational) {
    let one = int(1);
    let d = &one + u * u;
    ((&one - u * u) / &d, (int(2) * u) / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::poly::rat;
    use crate::poly::ratvec;

    fn lorentz() -> HyperbolicCone {
        HyperbolicCone::new(gallery::lorentz_poly(), ratvec(&[1, 0, 0])).unwrap()
    }

    fn cayley() -> HyperbolicCone {
        HyperbolicCone::new(gallery::cayley_cone(), ratvec(&[1, 0, 0, 0])).unwrap()
    }

    #[test]
    fn certification() {
        assert!(matches!(check_hyperbolic(&lorentz(), 500, 1).unwrap(), HyperbolicityCheck::CertifiedOnSamples { .. }));
        let c = HyperbolicCone::new("x0^2 + x1^2".parse().unwrap(), ratvec(&[1, 0])).unwrap();
        let r = check_hyperbolic(&c, 10, 1).unwrap();
        assert_eq!(r, HyperbolicityCheck::Refuted { witness: vec!["0".into(), "1".into()] });
    }

    #[test]
    fn rejects_bad_cones() {
        assert!(HyperbolicCone::new("x0^2 - x1".parse().unwrap(), ratvec(&[1, 0])).is_err());
        assert!(HyperbolicCone::new(gallery::lorentz_poly(), ratvec(&[1, 1, 0])).is_err());
        assert!(matches!(
            HyperbolicCone::new(gallery::lorentz_poly(), ratvec(&[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn membership() {
        let l = lorentz();
        assert!(l.contains(&ratvec(&[1, 0, 0])).unwrap());
        assert!(!l.contains(&ratvec(&[1, 2, 0])).unwrap());
        assert!(l.contains(&ratvec(&[5, 3, 4])).unwrap());
        assert!(!l.contains(&ratvec(&[-1, 0, 0])).unwrap());
        assert!(cayley().contains(&ratvec(&[1, 1, 1, 1])).unwrap());
        assert!(!cayley().contains(&ratvec(&[1, 1, 1, 2])).unwrap());
        assert!(l.contains_f64(&[1.0, 0.6, 0.8], 1e-9).unwrap());
        assert!(!l.contains_f64(&[1.0, 0.61, 0.8], 1e-9).unwrap());
    }

    #[test]
    fn multiplicities() {
        let c = cayley();
        assert_eq!(c.multiplicity(&ratvec(&[1, 0, 0, 0])).unwrap(), 0);
        assert_eq!(c.multiplicity(&ratvec(&[1, 1, 0, 0])).unwrap(), 1);
        assert_eq!(c.multiplicity(&ratvec(&[1, 1, 1, 1])).unwrap(), 2);
        assert_eq!(c.multiplicity(&ratvec(&[1, 2, 0, 0])), Err(Error::OutsideCone));
        assert_eq!(c.multiplicity_f64(&[1.0, 1.0, 1.0, 1.0], 1e-6).unwrap(), 2);
        assert_eq!(lorentz().multiplicity(&ratvec(&[0, 0, 0])).unwrap(), 2);
    }

    #[test]
    fn renegar() {
        assert_eq!(lorentz().renegar_face_dim(&ratvec(&[1, 1, 0])).unwrap(), 1);
        let c = cayley();
        assert_eq!(c.renegar_face_dim(&ratvec(&[1, 1, 0, 0])).unwrap(), 2);
        // generic rational boundary point: x = cos a, y = cos b, z = cos(a+b)
        let (ca, sa) = rational_circle_point(&rat(1, 2));
        let (cb, sb) = rational_circle_point(&rat(1, 3));
        let z = &ca * &cb - &sa * &sb;
        let x = vec![int(1), ca, cb, z];
        assert_eq!(c.renegar_face_dim(&x).unwrap(), 1);
        assert_eq!(c.renegar_face_dim(&ratvec(&[1, 1, 1, 1])), Err(Error::HighMultiplicity(2)));
        assert!(c.renegar_face_dim(&ratvec(&[1, 0, 0, 0])).is_err());
        assert_eq!(c.renegar_face_dim_f64(&[1.0, 1.0, 0.0, 0.0], 1e-9, 1e-8).unwrap(), 2);
    }

    #[test]
    fn scale_invariance() {
        let c = cayley();
        let x = ratvec(&[1, 1, 0, 0]);
        for k in [2, 7] {
            let y: Vec<Rational> = x.iter().map(|a| a * rat(k, 3)).collect();
            assert_eq!(c.multiplicity(&y).unwrap(), 1);
            assert_eq!(c.renegar_face_dim(&y).unwrap(), 2);
        }
    }

    #[test]
    fn euler_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [gallery::cayley_cone(), gallery::lorentz_poly(), gallery::quartic_printed()] {
            for _ in 0..20 {
                let x: Vec<Rational> = (0..p.nvars()).map(|_| rat(rng.random_range(-9..=9), rng.random_range(1..=5))).collect();
                assert!(euler_hessian_identity(&p, &x).unwrap());
            }
        }
    }

    #[test]
    fn bodies() {
        let b = hyperbolic_body(&lorentz()).unwrap();
        assert!(b.contains(&[0.6, 0.8], 1e-9).unwrap());
        assert!(!b.contains(&[0.7, 0.8], 1e-9).unwrap());
        let e = hyperbolic_body(&cayley()).unwrap();
        assert!(e.contains(&[0.99, 0.99, 0.99], 1e-9).unwrap());
        let q = HyperbolicCone::new(gallery::quartic_printed(), ratvec(&[1, 0, 0, 0])).unwrap();
        assert!(matches!(hyperbolic_body(&q), Err(Error::Unbounded(_))));
        let c = HyperbolicCone::new("x0*x1".parse().unwrap(), ratvec(&[1, 1])).unwrap();
        assert!(hyperbolic_body(&c).is_ok());
    }

    #[test]
    fn constancy_probe() {
        // l = (1, -1, 0) exposes the ray through (1, 1, 0)
        let r = multiplicity_constancy_probe(&lorentz(), &[1.0, -1.0, 0.0], 50, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.multiplicities.keys().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(r.face_dim, 1);
        // w - x vanishes on the cone over the edge from (1,1,1) to (1,-1,-1)
        let r = multiplicity_constancy_probe(&cayley(), &[1.0, -1.0, 0.0, 0.0], 50, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.face_dim, 2);
        assert!(matches!(multiplicity_constancy_probe(&cayley(), &[1.0, 0.0, 0.0, 0.0], 10, 3), Err(Error::NotSupporting(_))));
        assert!(matches!(multiplicity_constancy_probe(&cayley(), &[0.0, 1.0, 0.0, 0.0], 10, 3), Err(Error::NotSupporting(_))));
    }
}
