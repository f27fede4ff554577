//! Convex bodies and the maps attached to them: membership, distance `d_K`,
//! metric projection `p_K`, the dual map `u_K`, support function and polar
//! membership.

pub mod barrier;
pub mod constraint;
pub mod wolfe;

pub use barrier::BarrierOptions;
pub use constraint::Constraint;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub};
use crate::poly::{rat_to_f64, FloatPoly, Polynomial, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use barrier::{DistSq, NegLinear};
use constraint::{poly_serde, Affine, Compiled};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// How the body is described.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rep", rename_all = "snake_case")]
pub enum Rep {
    /// Convex hull of finitely many points.
    PointCloudHull { points: Vec<Vec<f64>> },
    /// Component of `{g_i <= 0 for all i}` containing `selector`.
    SublevelSet {
        constraints: Vec<Constraint>,
        selector: Vec<f64>,
        /// Optional box `[lo, hi]` per coordinate intersected with the set.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bbox: Option<Vec<[f64; 2]>>,
    },
    /// Slice `{x in C : <x, e> = |e|^2}` of the hyperbolicity cone of `p`
    /// through `e`, in orthonormal coordinates of `e`'s complement.
    Hyperbolic {
        #[serde(with = "poly_serde")]
        p: Polynomial,
        e: Vec<f64>,
    },
}

/// On-disk form of a body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub rep: Rep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_point: Option<Vec<f64>>,
    /// Polynomials of the algebraic boundary, used to label hull facets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Constraint>>,
}

/// Solver knobs shared by projection and support.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub starts: usize,
    pub agreement_tol: f64,
    pub seed: u64,
    pub barrier: BarrierOptions,
    pub wolfe_gap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { starts: 8, agreement_tol: 1e-6, seed: 0x0b0d_1e5, barrier: BarrierOptions::default(), wolfe_gap: 1e-10 }
    }
}

/// Result of maximising a linear functional over the body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportResult {
    pub value: f64,
    pub maximizer: Vec<f64>,
    pub certificate_gap: f64,
}

#[derive(Clone, Debug)]
enum Engine {
    Points(Vec<Vec<f64>>),
    /// `exact` holds the polynomial constraints of a sublevel set (the
    /// first `exact.len()` entries of `cons`); box rows follow.
    Barrier { cons: Vec<Compiled>, hyperbolic: Option<HypData>, exact: Vec<Constraint> },
}

#[derive(Clone, Debug)]
struct HypData {
    exact: Polynomial,
    sign: f64,
    p: FloatPoly,
    e: Vec<f64>,
    map: Affine,
}

/// A convex body with its numerical services.
#[derive(Clone, Debug)]
pub struct Body {
    spec: BodySpec,
    dim: usize,
    interior: Vec<f64>,
    engine: Engine,
    opts: SolverOptions,
    start_cache: std::sync::OnceLock<Vec<Vec<f64>>>,
}

impl Body {
    pub fn new(spec: BodySpec) -> Result<Self> {
        let (dim, engine, default_interior) = match &spec.rep {
            Rep::PointCloudHull { points } => {
                let d = points.first().map(|p| p.len()).ok_or_else(|| Error::Empty("no points".into()))?;
                if let Some(bad) = points.iter().find(|p| p.len() != d) {
                    return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
                }
                if affine_rank(points) < d {
                    return Err(Error::Degenerate("point cloud is not full-dimensional".into()));
                }
                let c = centroid(points);
                (d, Engine::Points(points.clone()), c)
            }
            Rep::SublevelSet { constraints, selector, bbox } => {
                let d = selector.len();
                if constraints.is_empty() {
                    return Err(Error::Empty("no constraints".into()));
                }
                let exact = constraints.iter().map(|c| c.promoted(d)).collect::<Result<Vec<_>>>()?;
                let mut cons: Vec<Compiled> = exact.iter().map(|c| c.compile()).collect();
                if let Some(b) = bbox {
                    if b.len() != d {
                        return Err(Error::DimensionMismatch { expected: d, got: b.len() });
                    }
                    cons.extend(box_constraints(b)?);
                }
                if !barrier::strictly_feasible(&cons, selector) {
                    return Err(Error::InvalidInput("selector point does not satisfy all constraints strictly".into()));
                }
                (d, Engine::Barrier { cons, hyperbolic: None, exact }, selector.clone())
            }
            Rep::Hyperbolic { p, e } => {
                let p = &p.with_nvars(e.len())?;
                if !p.is_homogeneous() || p.is_zero() {
                    return Err(Error::InvalidInput("hyperbolic polynomial must be homogeneous and nonzero".into()));
                }
                let fp = p.to_float();
                let pe = fp.value(e);
                if pe == 0.0 {
                    return Err(Error::InvalidInput("p(e) = 0".into()));
                }
                let basis = orthonormal_complement(e);
                let map = Affine { offset: e.clone(), basis };
                let cons = vec![Compiled::hyperbolic(p, map.clone(), e, -pe.signum())];
                let d = e.len() - 1;
                (d, Engine::Barrier { cons, hyperbolic: Some(HypData { exact: p.clone(), sign: -pe.signum(), p: fp, e: e.clone(), map }), exact: Vec::new() }, vec![0.0; d])
            }
        };
        let interior = spec.interior_point.clone().unwrap_or(default_interior);
        if interior.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: interior.len() });
        }
        let body = Body { spec, dim, interior, engine, opts: SolverOptions::default(), start_cache: Default::default() };
        if !body.strictly_inside(&body.interior) {
            return Err(Error::InvalidInput("interior point is not strictly inside the body".into()));
        }
        Ok(body)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Body::new(serde_json::from_str(s)?)
    }

    /// Body file: JSON, or CSV with one point per row for a point cloud.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
            let mut points = Vec::new();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
                let p: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
                points.push(p.map_err(|e| Error::Parse(e.to_string()))?);
            }
            Body::new(BodySpec { name: None, rep: Rep::PointCloudHull { points }, interior_point: None, components: None })
        } else {
            Body::from_json(&text)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("body spec serialises")
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    pub fn name(&self) -> Option<&str> {
        self.spec.name.as_deref()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    pub fn components(&self) -> Option<&[Constraint]> {
        self.spec.components.as_deref()
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn with_options(mut self, opts: SolverOptions) -> Self {
        self.opts = opts;
        self.start_cache = Default::default();
        self
    }

    pub fn with_starts(&self, starts: usize) -> Body {
        let mut b = self.clone();
        b.opts.starts = starts.max(1);
        b.start_cache = Default::default();
        b
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// For hyperbolic bodies: the point `e + B y` of the cone.
    pub fn to_cone_point(&self, y: &[f64]) -> Option<Vec<f64>> {
        match &self.engine {
            Engine::Barrier { hyperbolic: Some(h), .. } => Some(h.map.apply(y)),
            _ => None,
        }
    }

    /// For hyperbolic bodies: slice coordinates of a cone point, after
    /// scaling it onto the slice.
    pub fn from_cone_point(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.engine {
            Engine::Barrier { hyperbolic: Some(h), .. } => {
                let ee = dot(&h.e, &h.e);
                let s = dot(x, &h.e);
                if s == 0.0 {
                    return None;
                }
                let xs: Vec<f64> = x.iter().map(|v| v * ee / s).collect();
                Some(h.map.coords(&xs))
            }
            _ => None,
        }
    }

    fn strictly_inside(&self, x: &[f64]) -> bool {
        match &self.engine {
            Engine::Points(_) => self.contains(x, -1e-9).unwrap_or(false),
            Engine::Barrier { cons, .. } => barrier::strictly_feasible(cons, x),
        }
    }

    /// Membership up to `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check(x)?;
        match &self.engine {
            Engine::Points(pts) => {
                if tol < 0.0 {
                    // strict interior: every facet direction must have slack; test by
                    // shrinking towards the centroid
                    let c = centroid(pts);
                    let z: Vec<f64> = x.iter().zip(&c).map(|(a, b)| b + (a - b) * (1.0 - tol)).collect();
                    let (p, _) = wolfe::nearest_point(pts, &z, self.opts.wolfe_gap)?;
                    return Ok(norm(&sub(&z, &p)) <= 1e-12);
                }
                let (p, _) = wolfe::nearest_point(pts, x, self.opts.wolfe_gap)?;
                Ok(norm(&sub(x, &p)) <= tol)
            }
            Engine::Barrier { hyperbolic: Some(h), .. } => {
                let xc = h.map.apply(x);
                Ok(cone_contains_float(&h.p, &h.e, &xc, tol))
            }
            Engine::Barrier { cons, .. } => Ok(cons.iter().all(|c| c.value(x) <= tol)),
        }
    }

    /// How far `x` is from satisfying the defining inequalities (0 inside).
    pub fn violation(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(match &self.engine {
            Engine::Points(pts) => norm(&sub(x, &wolfe::nearest_point(pts, x, self.opts.wolfe_gap)?.0)),
            Engine::Barrier { hyperbolic: Some(h), .. } => {
                let xc = h.map.apply(x);
                let top = h.p.restrict_line(&xc, &h.e).roots().iter().map(|z| z.re).fold(0.0, f64::max);
                top * norm(&h.e)
            }
            Engine::Barrier { cons, .. } => cons.iter().map(|c| c.value(x)).fold(0.0, f64::max),
        })
    }

    /// Boundary point on the ray from the interior point in direction `v`,
    /// located by bisecting membership to relative width `rel_tol`.
    /// Returns the last point inside and the first point outside.
    pub fn ray_exit(&self, v: &[f64], rel_tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check(v)?;
        if norm(v) == 0.0 {
            return Err(Error::InvalidInput("zero ray direction".into()));
        }
        let at = |t: f64| -> Vec<f64> { self.interior.iter().zip(v).map(|(a, b)| a + t * b).collect() };
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.contains(&at(hi), 0.0)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e8 {
                return Err(Error::Unbounded("ray does not leave the body".into()));
            }
        }
        while hi - lo > rel_tol * hi {
            let mid = 0.5 * (lo + hi);
            if self.contains(&at(mid), 0.0)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((at(lo), at(hi)))
    }

    /// Start points for multi-start runs: the interior point, then points
    /// halfway to the boundary along seeded random directions.
    fn starts(&self, cons: &[Compiled]) -> &[Vec<f64>] {
        self.start_cache.get_or_init(|| self.make_starts(cons))
    }

    fn make_starts(&self, cons: &[Compiled]) -> Vec<Vec<f64>> {
        use rand_distr::{Distribution, StandardNormal};
        let mut out = vec![self.interior.clone()];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.opts.seed);
        while out.len() < self.opts.starts {
            let v: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let nv = norm(&v);
            if nv == 0.0 {
                continue;
            }
            let v: Vec<f64> = v.iter().map(|a| a / nv).collect();
            let t = barrier::max_step(cons, &self.interior, &v);
            let mut t = if t.is_finite() { 0.5 * t } else { 1.0 };
            for _ in 0..30 {
                let s: Vec<f64> = self.interior.iter().zip(&v).map(|(a, b)| a + t * b).collect();
                if barrier::strictly_feasible(cons, &s) {
                    out.push(s);
                    break;
                }
                t *= 0.5;
            }
        }
        out
    }

    /// Metric projection `p_K(x)`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        match &self.engine {
            Engine::Points(pts) => Ok(wolfe::nearest_point(pts, x, self.opts.wolfe_gap)?.0),
            Engine::Barrier { cons, .. } => {
                if self.contains(x, 0.0)? {
                    return Ok(x.to_vec());
                }
                let obj = DistSq(x);
                let closest = |sols: &[(Vec<f64>, f64)]| -> Vec<f64> {
                    sols.iter()
                        .map(|s| &s.0)
                        .min_by(|a, b| norm(&sub(a, x)).total_cmp(&norm(&sub(b, x))))
                        .unwrap()
                        .clone()
                };
                let mut local: Option<Vec<Compiled>> = None;
                let mut rounds = 0;
                loop {
                    let sols = self.run_starts(&obj, local.as_deref().unwrap_or(cons))?;
                    let best = closest(&sols);
                    let pts: Vec<Vec<f64>> = sols.iter().map(|s| s.0.clone()).collect();
                    let agreed = agree(&pts, self.opts.agreement_tol);
                    // Near singular points of the boundary the expanded
                    // polynomials lose accuracy; re-expand them around the
                    // candidate and solve again.
                    let again = rounds < 3 && (agreed.is_err() || (rounds == 0 && self.near_singular(&best)));
                    if again {
                        if let Some(c) = self.recentred_constraints(&best)? {
                            local = Some(c);
                            rounds += 1;
                            continue;
                        }
                    }
                    return agreed.map(|()| best);
                }
            }
        }
    }

    /// Whether a solution sits where some active constraint has a (nearly)
    /// vanishing gradient.  Hyperbolic bodies are always treated as singular.
    fn near_singular(&self, y: &[f64]) -> bool {
        match &self.engine {
            Engine::Points(_) => false,
            Engine::Barrier { hyperbolic: Some(_), .. } => true,
            Engine::Barrier { cons, exact, .. } => cons[..exact.len()].iter().any(|c| {
                let (v, g, _) = c.eval(y, false);
                v > -1e-6 && norm(&g) < 1e-4
            }),
        }
    }

    fn recentred_constraints(&self, y: &[f64]) -> Result<Option<Vec<Compiled>>> {
        match &self.engine {
            Engine::Points(_) => Ok(None),
            Engine::Barrier { hyperbolic: Some(h), .. } => Ok(Some(vec![h.recentred(y)?])),
            Engine::Barrier { cons, exact, .. } => {
                let c = dyadic(y);
                let cf: Vec<f64> = c.iter().map(rat_to_f64).collect();
                let mut out = Vec::with_capacity(cons.len());
                for k in exact {
                    out.push(k.translated(&c)?.compile_shifted(&cf));
                }
                out.extend(cons[exact.len()..].iter().cloned());
                Ok(Some(out))
            }
        }
    }

    fn run_starts(&self, obj: &(dyn barrier::Objective + Sync), cons: &[Compiled]) -> Result<Vec<(Vec<f64>, f64)>> {
        let starts = self.starts(cons);
        let runs: Vec<Result<(Vec<f64>, f64)>> =
            starts.par_iter().map(|s| barrier::solve(obj, cons, s, &self.opts.barrier)).collect();
        runs.into_iter().collect()
    }

    /// `d_K(x) = |x - p_K(x)|`.
    pub fn dist(&self, x: &[f64]) -> Result<f64> {
        let p = self.project(x)?;
        Ok(norm(&sub(x, &p)))
    }

    /// Dual map `u_K(x) = (x - p) / <p - x, p>`, with `p` measured from
    /// the interior point.
    pub fn dual_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.project(x)?;
        self.dual_normal_from(x, &p)
    }

    pub(crate) fn dual_normal_from(&self, x: &[f64], p: &[f64]) -> Result<Vec<f64>> {
        let v = sub(x, p);
        let nv = norm(&v);
        let scale = 1.0 + norm(x);
        if nv <= 1e-12 * scale {
            return Err(Error::InsideBody);
        }
        let po = sub(p, &self.interior);
        let den = -dot(&v, &po);
        if den >= -1e-12 * nv {
            return Err(Error::OriginNotInterior(den));
        }
        Ok(v.iter().map(|a| a / den).collect())
    }

    /// `max <l, x>` over the body.
    pub fn support(&self, l: &[f64]) -> Result<SupportResult> {
        self.check(l)?;
        if norm(l) == 0.0 {
            return Err(Error::InvalidInput("support of the zero functional".into()));
        }
        match &self.engine {
            Engine::Points(pts) => {
                let mut best = 0;
                for (i, p) in pts.iter().enumerate() {
                    if dot(l, p) > dot(l, &pts[best]) {
                        best = i;
                    }
                }
                Ok(SupportResult { value: dot(l, &pts[best]), maximizer: pts[best].clone(), certificate_gap: 0.0 })
            }
            Engine::Barrier { cons, .. } => {
                let starts = self.starts(cons);
                let obj = NegLinear(l);
                let runs: Vec<Result<(Vec<f64>, f64)>> =
                    starts.par_iter().map(|s| barrier::solve(&obj, cons, s, &self.opts.barrier)).collect();
                let sols = runs.into_iter().collect::<Result<Vec<_>>>()?;
                let pts: Vec<Vec<f64>> = sols.iter().map(|s| s.0.clone()).collect();
                let (best, mu) = sols
                    .into_iter()
                    .max_by(|a, b| dot(l, &a.0).total_cmp(&dot(l, &b.0)))
                    .unwrap();
                let value = dot(l, &best);
                let gap = cons.len() as f64 * mu;
                // values must agree; maximizers need not be unique
                let spread = pts.iter().map(|p| value - dot(l, p)).fold(0.0, f64::max);
                if spread > self.opts.agreement_tol * (1.0 + value.abs()) {
                    return Err(Error::NonConvergence(format!("support runs disagree by {spread:e}")));
                }
                Ok(SupportResult { value, maximizer: best, certificate_gap: gap })
            }
        }
    }

    /// `l` in the polar (relative to the interior point) iff `h(-l) <= 1 + tol`.
    pub fn polar_contains(&self, l: &[f64], tol: f64) -> Result<bool> {
        self.check(l)?;
        if norm(l) == 0.0 {
            return Ok(true);
        }
        let neg: Vec<f64> = l.iter().map(|a| -a).collect();
        let s = self.support(&neg)?;
        let shifted = s.value - dot(&neg, &self.interior);
        Ok(shifted <= 1.0 + tol + s.certificate_gap)
    }
}

impl HypData {
    /// The cone constraint with `p` re-expanded exactly around a dyadic point
    /// near the slice point `y`.
    fn recentred(&self, y: &[f64]) -> Result<Compiled> {
        let c = dyadic(&self.map.apply(y));
        let n = c.len();
        let pc = self.exact.compose_affine(&c, &identity_columns(n))?;
        let cf: Vec<f64> = c.iter().map(rat_to_f64).collect();
        let offset: Vec<f64> = self.map.offset.iter().zip(&cf).map(|(a, b)| a - b).collect();
        Ok(Compiled::hyperbolic(&pc, Affine { offset, basis: self.map.basis.clone() }, &self.e, self.sign))
    }
}

/// Nearby point with coordinates on the grid `2^-40 Z`.
fn dyadic(x: &[f64]) -> Vec<Rational> {
    let scale = (1u64 << 40) as f64;
    x.iter().map(|v| Rational::new(BigInt::from((v * scale).round() as i64), BigInt::from(1u64 << 40))).collect()
}

pub(crate) fn identity_columns(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Float membership in the closed hyperbolicity cone: no root of
/// `t -> p(x + t e)` exceeds `tol` (relative to the root scale).
pub fn cone_contains_float(p: &FloatPoly, e: &[f64], x: &[f64], tol: f64) -> bool {
    // shift by tol along e, then test strict interior: p(x' + s e) is
    // real-rooted, so all roots are negative iff all coefficients carry the
    // sign of p(e)
    let scale = (1.0 + norm(x) / norm(e)).max(1.0);
    let tau = tol.max(1e-12) * scale;
    let xs: Vec<f64> = x.iter().zip(e).map(|(a, b)| a + tau * b).collect();
    let q = p.restrict_line(&xs, e);
    let lead = p.value(e);
    let c = q.coeffs();
    !c.is_empty() && c.iter().all(|&a| a * lead > 0.0)
}

fn agree(sols: &[Vec<f64>], tol: f64) -> Result<()> {
    let first = &sols[0];
    for s in &sols[1..] {
        let d = norm(&sub(s, first));
        if d > tol {
            return Err(Error::NonConvergence(format!("multi-start projections disagree by {d:e}")));
        }
    }
    Ok(())
}

fn box_constraints(b: &[[f64; 2]]) -> Result<Vec<Compiled>> {
    let d = b.len();
    let mut out = Vec::new();
    for (i, [lo, hi]) in b.iter().enumerate() {
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!("empty box side {i}")));
        }
        let to_rat = |v: f64| crate::poly::scalar::f64_to_rat(v).ok_or_else(|| Error::InvalidInput("non-finite box".into()));
        let xi = Polynomial::var(i, d);
        let hi_c = Polynomial::constant(d, to_rat(*hi)?);
        let lo_c = Polynomial::constant(d, to_rat(*lo)?);
        out.push(Constraint::Poly(&xi - &hi_c).compile());
        out.push(Constraint::Poly(&lo_c - &xi).compile());
    }
    Ok(out)
}

fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let d = points[0].len();
    let mut c = vec![0.0; d];
    for p in points {
        for k in 0..d {
            c[k] += p[k];
        }
    }
    c.iter_mut().for_each(|v| *v /= points.len() as f64);
    c
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let d = points[0].len();
    let rows: Vec<f64> = points[1..].iter().flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b)).collect();
    let m = nalgebra::DMatrix::from_row_slice(points.len() - 1, d, &rows);
    let sv = m.singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
}

/// Orthonormal basis of the complement of `e` (Gram-Schmidt on the standard basis).
pub(crate) fn orthonormal_complement(e: &[f64]) -> Vec<Vec<f64>> {
    let n = e.len();
    let ne = norm(e);
    let mut basis: Vec<Vec<f64>> = vec![e.iter().map(|a| a / ne).collect()];
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for b in &basis {
            let c = dot(&v, b);
            for i in 0..n {
                v[i] -= c * b[i];
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            basis.push(v.iter().map(|a| a / nv).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}
