use crate::poly::{FloatPoly, Polynomial};
use serde::{Deserialize, Serialize};

/// One inequality `g <= 0` of a sublevel-set body.
///
/// `Piecewise` glues two polynomials along the zero set of a selector: the
/// value is `below` where `selector < 0` and `above` elsewhere.  Gallery
/// bodies use it only where the two pieces agree to first order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Poly(#[serde(with = "poly_or_text")] Polynomial),
    Piecewise {
        #[serde(with = "poly_or_text")]
        selector: Polynomial,
        #[serde(with = "poly_or_text")]
        below: Polynomial,
        #[serde(with = "poly_or_text")]
        above: Polynomial,
    },
}

impl Constraint {
    pub fn nvars(&self) -> usize {
        match self {
            Constraint::Poly(p) => p.nvars(),
            Constraint::Piecewise { selector, .. } => selector.nvars(),
        }
    }

    pub(crate) fn compile(&self) -> Compiled {
        let kind = match self {
            Constraint::Poly(p) => Kind::Poly(p.to_float()),
            Constraint::Piecewise { selector, below, above } => Kind::Piecewise {
                selector: selector.to_float(),
                below: below.to_float(),
                above: above.to_float(),
            },
        };
        Compiled { kind, map: None, sign: 1.0, cone: None }
    }

    /// Same constraint read in `n >= nvars` variables.
    pub fn promoted(&self, n: usize) -> crate::error::Result<Constraint> {
        Ok(match self {
            Constraint::Poly(p) => Constraint::Poly(p.with_nvars(n)?),
            Constraint::Piecewise { selector, below, above } => Constraint::Piecewise {
                selector: selector.with_nvars(n)?,
                below: below.with_nvars(n)?,
                above: above.with_nvars(n)?,
            },
        })
    }

    /// `z -> g(c + z)`, expanded exactly.
    pub fn translated(&self, c: &[crate::poly::Rational]) -> crate::error::Result<Constraint> {
        let id = crate::body::identity_columns(c.len());
        let t = |p: &Polynomial| p.compose_affine(c, &id);
        Ok(match self {
            Constraint::Poly(p) => Constraint::Poly(t(p)?),
            Constraint::Piecewise { selector, below, above } => {
                Constraint::Piecewise { selector: t(selector)?, below: t(below)?, above: t(above)? }
            }
        })
    }

    /// Compiled form of a translated constraint, read back in the original
    /// coordinates: `y -> g(y - c)`.
    pub(crate) fn compile_shifted(&self, c: &[f64]) -> Compiled {
        let n = c.len();
        let basis = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let mut k = self.compile();
        k.map = Some(Affine { offset: c.iter().map(|v| -v).collect(), basis });
        k
    }

    /// Value at a point, in float arithmetic.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.compile().eval(x, false).0
    }
}

/// Polynomials in body files may be given either as the JSON term list or
/// as a string in the text format.
pub(crate) mod poly_or_text {
    use crate::poly::Polynomial;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either {
        Text(String),
        Json(Polynomial),
    }

    pub fn serialize<S: Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
        p.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Polynomial, D::Error> {
        match Either::deserialize(d)? {
            Either::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Either::Json(p) => Ok(p),
        }
    }
}

pub(crate) use poly_or_text as poly_serde;

#[derive(Clone, Debug)]
enum Kind {
    Poly(FloatPoly),
    Piecewise { selector: FloatPoly, below: FloatPoly, above: FloatPoly },
}

/// `y -> offset + basis * y`, basis stored as columns.
#[derive(Clone, Debug)]
pub(crate) struct Affine {
    pub offset: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl Affine {
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.offset.clone();
        for (col, &yi) in self.basis.iter().zip(y) {
            for (xk, ck) in x.iter_mut().zip(col) {
                *xk += ck * yi;
            }
        }
        x
    }

    pub fn apply_linear(&self, d: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.offset.len()];
        for (col, &di) in self.basis.iter().zip(d) {
            for (xk, ck) in x.iter_mut().zip(col) {
                *xk += ck * di;
            }
        }
        x
    }

    /// Coordinates of the orthogonal projection onto the affine image.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|col| col.iter().zip(x).zip(&self.offset).map(|((c, xi), oi)| c * (xi - oi)).sum())
            .collect()
    }
}

/// Float form of a constraint, optionally pulled back along an affine map
/// and multiplied by a sign.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    kind: Kind,
    map: Option<Affine>,
    sign: f64,
    /// Hyperbolicity direction, in the polynomial's own coordinates, when the
    /// feasible region is the hyperbolicity cone rather than a sign condition.
    cone: Option<Vec<f64>>,
}

impl Compiled {
    #[cfg(test)]
    pub fn pulled_back(p: &Polynomial, map: Affine, sign: f64) -> Self {
        Compiled { kind: Kind::Poly(p.to_float()), map: Some(map), sign, cone: None }
    }

    /// `sign * p <= 0` (with `sign = -sgn p(e)`) restricted to the hyperbolicity cone of `p` in direction `e`.
    pub fn hyperbolic(p: &Polynomial, map: Affine, e: &[f64], sign: f64) -> Self {
        Compiled { kind: Kind::Poly(p.to_float()), map: Some(map), sign, cone: Some(e.to_vec()) }
    }

    /// Membership in the open region this constraint carves out, beyond
    /// the sign test: for cone constraints, every root of `p(x + s e)` must
    /// be negative.  Degree drops along `e` are impossible for homogeneous `p`
    /// with `p(e) != 0`, so the coefficient list is the full one.
    pub fn admits(&self, y: &[f64]) -> bool {
        let Some(e) = &self.cone else { return true };
        let x = match &self.map {
            None => y.to_vec(),
            Some(map) => map.apply(y),
        };
        match &self.kind {
            // p(x + s e) is real-rooted, so its roots are all negative exactly
            // when its coefficients share one strict sign
            Kind::Poly(p) => {
                let q = p.restrict_line(&x, e);
                let c = q.coeffs();
                !c.is_empty() && c.iter().all(|&a| a * self.sign < 0.0)
            }
            Kind::Piecewise { .. } => true,
        }
    }

    /// Step cap used inside Newton iterations.  Cone constraints need none:
    /// the cone is convex, so checking the trial point suffices.
    pub fn step_cap(&self, y: &[f64], d: &[f64], hi: f64) -> Option<f64> {
        if self.cone.is_some() {
            None
        } else {
            self.first_root_within(y, d, hi)
        }
    }

    fn piece(&self, x: &[f64]) -> &FloatPoly {
        match &self.kind {
            Kind::Poly(p) => p,
            Kind::Piecewise { selector, below, above } => {
                if selector.value(x) < 0.0 {
                    below
                } else {
                    above
                }
            }
        }
    }

    /// Value, gradient and optionally Hessian (row-major) at `y`.
    pub fn eval(&self, y: &[f64], hess: bool) -> (f64, Vec<f64>, Vec<f64>) {
        match &self.map {
            None => {
                let (v, g, h) = self.piece(y).value_grad_hess(y, hess);
                if self.sign == 1.0 {
                    (v, g, h)
                } else {
                    let s = self.sign;
                    (s * v, g.iter().map(|a| s * a).collect(), h.iter().map(|a| s * a).collect())
                }
            }
            Some(map) => {
                let x = map.apply(y);
                let (v, gx, hx) = self.piece(&x).value_grad_hess(&x, hess);
                let n = x.len();
                let m = map.basis.len();
                let s = self.sign;
                let g: Vec<f64> =
                    map.basis.iter().map(|c| s * c.iter().zip(&gx).map(|(a, b)| a * b).sum::<f64>()).collect();
                let mut h = Vec::new();
                if hess {
                    h = vec![0.0; m * m];
                    // B^T H B
                    let hb: Vec<Vec<f64>> = map
                        .basis
                        .iter()
                        .map(|c| (0..n).map(|i| (0..n).map(|j| hx[i * n + j] * c[j]).sum()).collect())
                        .collect();
                    for a in 0..m {
                        for b in 0..m {
                            h[a * m + b] = s * map.basis[a].iter().zip(&hb[b]).map(|(x, y)| x * y).sum::<f64>();
                        }
                    }
                }
                (s * v, g, h)
            }
        }
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        match &self.map {
            None => self.sign * self.piece(y).value(y),
            Some(map) => {
                let x = map.apply(y);
                self.sign * self.piece(&x).value(&x)
            }
        }
    }

    /// Smallest `t > 0` with `g(y + t d) = 0`, if any.
    #[cfg(test)]
    pub fn first_root(&self, y: &[f64], d: &[f64]) -> Option<f64> {
        self.first_root_within(y, d, f64::INFINITY)
    }

    /// Smallest `t` in `(0, hi]` with `g(y + t d) = 0`, if any.
    pub fn first_root_within(&self, y: &[f64], d: &[f64], hi: f64) -> Option<f64> {
        let mapped;
        let (x, dx): (&[f64], &[f64]) = match &self.map {
            None => (y, d),
            Some(map) => {
                mapped = (map.apply(y), map.apply_linear(d));
                (&mapped.0, &mapped.1)
            }
        };
        const IMAG: f64 = 1e-6;
        match &self.kind {
            Kind::Poly(p) => p.restrict_line(x, dx).smallest_root_in(hi, IMAG),
            Kind::Piecewise { selector, below, above } => {
                let at = |t: f64| -> Vec<f64> { x.iter().zip(dx).map(|(a, b)| a + t * b).collect() };
                let mut best: Option<f64> = None;
                for (piece, want_below) in [(below, true), (above, false)] {
                    let q = piece.restrict_line(x, dx);
                    if q.smallest_root_in(hi, IMAG).is_none() {
                        continue;
                    }
                    for z in q.roots() {
                        let r = z.re;
                        if z.im.abs() > IMAG * (1.0 + r.abs()) || r <= 0.0 || r > hi || best.is_some_and(|b| r >= b) {
                            continue;
                        }
                        if (selector.value(&at(r)) < 0.0) == want_below {
                            best = Some(r);
                        }
                    }
                }
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_value_and_root() {
        let c = Constraint::Piecewise {
            selector: Polynomial::parse_with_nvars("x0", 2).unwrap(),
            below: Polynomial::parse_with_nvars("x1^2 - 1", 2).unwrap(),
            above: "x0^2 + x1^2 - 1".parse().unwrap(),
        };
        assert_eq!(c.value(&[-5.0, 0.0]), -1.0);
        assert_eq!(c.value(&[2.0, 0.0]), 3.0);
        let k = c.compile();
        // from the origin to the right the circle is hit at 1, to the left nothing
        assert!((k.first_root(&[0.0, 0.0], &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(k.first_root(&[0.0, 0.0], &[-1.0, 0.0]), None);
        assert!((k.first_root(&[-3.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_accepts_text_polynomials() {
        let c: Constraint = serde_json::from_str(r#"{"poly": "x0^2 + x1^2 - 1"}"#).unwrap();
        assert_eq!(c, Constraint::Poly("x0^2 + x1^2 - 1".parse().unwrap()));
        let s = serde_json::to_string(&c).unwrap();
        let back: Constraint = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn pullback_chain_rule() {
        let p: Polynomial = "x0^2 - x1^2 - x2^2".parse().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let map = Affine { offset: vec![1.0, 0.0, 0.0], basis: vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]] };
        let c = Compiled::pulled_back(&p, map, -1.0);
        let (v, g, h) = c.eval(&[s, 0.0], true);
        assert!((v - (-0.5)).abs() < 1e-12);
        assert!((g[0] - 2.0 * s).abs() < 1e-12 && g[1].abs() < 1e-12);
        assert_eq!(h, vec![2.0, 0.0, 0.0, 2.0]);
        assert!((c.first_root(&[0.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    }
}
