//! The normal cycle `N(K)`: pairs of a boundary point and a supporting
//! functional, reached through the homeomorphism `phi: ∂(K + B) -> N(K)`
//! and its inverse `psi`, plus two direct boundary samplers.
//!
//! Functionals use the polar convention relative to the interior point `o`:
//! `<ell, x - o> = -1` on the supporting hyperplane, `>= -1` on the body.

use crate::body::Body;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm, normalize, sub};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Shell tolerance: how far `d_K(y)` may be from 1 for `phi`.
pub const SHELL_TOL: f64 = 1e-6;
/// Pairs with a larger residual are rejected by the samplers and by `psi`.
pub const PAIR_TOL: f64 = 1e-7;
/// `d_K = 1` tolerance of the ray shooter.
pub const RAY_TOL: f64 = 1e-10;
/// Push-out distance of the primal stabbing sampler.
pub const STAB_EPS: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalCyclePair {
    pub x: Vec<f64>,
    pub ell: Vec<f64>,
    /// Largest violation among `<ell, x - o> = -1` and `x ∈ K`.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    K1Rayshoot,
    DualDirections,
    PrimalStab,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k1-rayshoot" => Ok(Strategy::K1Rayshoot),
            "dual-directions" => Ok(Strategy::DualDirections),
            "primal-stab" => Ok(Strategy::PrimalStab),
            _ => Err(Error::InvalidInput(format!("unknown strategy {s:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::K1Rayshoot => "k1-rayshoot",
            Strategy::DualDirections => "dual-directions",
            Strategy::PrimalStab => "primal-stab",
        })
    }
}

/// Residual of a candidate pair.
pub fn pair_residual(b: &Body, x: &[f64], ell: &[f64]) -> Result<f64> {
    let o = b.interior_point();
    let incidence = (dot(ell, &sub(x, o)) + 1.0).abs();
    Ok(incidence.max(b.violation(x)?))
}

/// `phi(y) = (p_K(y), u_K(y))` for `y` on the unit shell around `K`.
pub fn phi(b: &Body, y: &[f64]) -> Result<NormalCyclePair> {
    phi_with_tol(b, y, SHELL_TOL)
}

pub fn phi_with_tol(b: &Body, y: &[f64], tol: f64) -> Result<NormalCyclePair> {
    let p = b.project(y)?;
    let d = norm(&sub(y, &p));
    if (d - 1.0).abs() > tol {
        return Err(Error::NotOnUnitShell(d));
    }
    let ell = b.dual_normal_from(y, &p)?;
    let residual = pair_residual(b, &p, &ell)?;
    Ok(NormalCyclePair { x: p, ell, residual })
}

/// `psi(x, ell) = x - ell / |ell|`.
pub fn psi(b: &Body, pair: &NormalCyclePair) -> Result<Vec<f64>> {
    let n = norm(&pair.ell);
    if n == 0.0 {
        return Err(Error::InvalidInput("zero functional".into()));
    }
    let r = pair_residual(b, &pair.x, &pair.ell)?;
    if r > PAIR_TOL * (1.0 + norm(&pair.x)) {
        return Err(Error::InvalidInput(format!("pair residual {r:e} too large")));
    }
    Ok(axpy(&pair.x, -1.0 / n, &pair.ell))
}

/// Residuals of a pair against probe points of the body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    /// `max_z (-1 - <ell, z - o>)` over the probes (`<= 0` for a valid pair).
    pub support_violation: f64,
    /// `|<ell, x - o> + 1|`
    pub incidence: f64,
    /// `d_K(x)`
    pub dist: f64,
    pub valid: bool,
}

pub fn verify_pair(b: &Body, pair: &NormalCyclePair, n_probe: usize, tol: f64) -> Result<PairReport> {
    let o = b.interior_point();
    let probes = probe_points(b, n_probe, 0x9e37)?;
    let support_violation =
        probes.iter().map(|z| -1.0 - dot(&pair.ell, &sub(z, o))).fold(f64::NEG_INFINITY, f64::max);
    let incidence = (dot(&pair.ell, &sub(&pair.x, o)) + 1.0).abs();
    let dist = b.dist(&pair.x)?;
    let valid = support_violation <= tol && incidence <= tol && dist <= tol;
    Ok(PairReport { support_violation, incidence, dist, valid })
}

/// Points of the body used to test supporting inequalities: boundary points
/// along seeded random rays, plus the generators of a point cloud.
pub fn probe_points(b: &Body, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = match &b.spec().rep {
        crate::body::Rep::PointCloudHull { points } => points.clone(),
        _ => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = b.ambient_dim();
    for _ in 0..n {
        let v = random_unit(&mut rng, dim);
        match b.ray_exit(&v, 1e-13) {
            Ok((inside, _)) => out.push(inside),
            Err(Error::Unbounded(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if let Some(u) = normalize(&v) {
            return u;
        }
    }
}

/// `n` validated pairs.  Attempt `j` draws from its own stream of a
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn sample_normal_cycle(b: &Body, n: usize, strategy: Strategy, seed: u64) -> Result<Vec<NormalCyclePair>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let fast = b.with_starts(1);
    let mut out = Vec::with_capacity(n);
    let mut next = 0usize;
    let limit = 10 * n;
    while out.len() < n && next < limit {
        let batch = (n - out.len()).min(limit - next);
        let got: Vec<Option<NormalCyclePair>> = (next..next + batch)
            .into_par_iter()
            .map(|j| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(j as u64);
                attempt(b, &fast, strategy, &mut rng).ok().filter(|p| p.residual <= PAIR_TOL * (1.0 + norm(&p.x)))
            })
            .collect();
        next += batch;
        out.extend(got.into_iter().flatten());
    }
    if out.len() < n {
        return Err(Error::NonConvergence(format!("only {} of {n} pairs after {limit} attempts", out.len())));
    }
    Ok(out)
}

fn attempt(b: &Body, fast: &Body, strategy: Strategy, rng: &mut ChaCha8Rng) -> Result<NormalCyclePair> {
    let v = random_unit(rng, b.ambient_dim());
    match strategy {
        Strategy::K1Rayshoot => {
            let y = shoot_to_shell(fast, &v)?;
            phi(b, &y)
        }
        Strategy::DualDirections => {
            let neg: Vec<f64> = v.iter().map(|a| -a).collect();
            let s = b.support(&neg)?;
            let x = s.maximizer;
            let h = dot(&v, &sub(&x, b.interior_point()));
            if h >= 0.0 {
                return Err(Error::OriginNotInterior(h));
            }
            let ell: Vec<f64> = v.iter().map(|a| a / -h).collect();
            let residual = pair_residual(b, &x, &ell)?;
            Ok(NormalCyclePair { x, ell, residual })
        }
        Strategy::PrimalStab => {
            let (inside, outside) = b.ray_exit(&v, 1e-12)?;
            let probe = axpy(&outside, STAB_EPS, &v);
            let w = normalize(&sub(&probe, &b.project(&probe)?))
                .ok_or_else(|| Error::NonConvergence("probe projected onto itself".into()))?;
            let z = axpy(&inside, STAB_EPS, &w);
            let p = b.project(&z)?;
            let ell = b.dual_normal_from(&z, &p)?;
            let residual = pair_residual(b, &p, &ell)?;
            Ok(NormalCyclePair { x: p, ell, residual })
        }
    }
}

/// Point `o + t v` with `d_K = 1`, by Newton steps on the convex function
/// `t -> d_K(o + t v)` safeguarded by bisection.
pub fn shoot_to_shell(b: &Body, v: &[f64]) -> Result<Vec<f64>> {
    let o = b.interior_point();
    let eval = |t: f64| -> Result<(Vec<f64>, f64, f64)> {
        let y = axpy(o, t, v);
        let p = b.project(&y)?;
        let r = sub(&y, &p);
        let d = norm(&r);
        let slope = if d > 0.0 { dot(v, &r) / d } else { 0.0 };
        Ok((y, d, slope))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut cur = eval(hi)?;
    while cur.1 < 1.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::Unbounded("ray never reaches the unit shell".into()));
        }
        cur = eval(hi)?;
    }
    let mut t = hi;
    for _ in 0..200 {
        let (y, d, slope) = cur;
        if (d - 1.0).abs() <= RAY_TOL {
            return Ok(y);
        }
        if d > 1.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = if slope > 1e-12 { t - (d - 1.0) / slope } else { f64::NAN };
        t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi {
            return Err(Error::NonConvergence("ray bracket collapsed before reaching the shell".into()));
        }
        cur = eval(t)?;
    }
    Err(Error::NonConvergence("ray shooting did not converge".into()))
}

/// One JSON object per line.
pub fn to_jsonl(pairs: &[NormalCyclePair]) -> String {
    let mut s = String::new();
    for p in pairs {
        s.push_str(&crate::canonical::to_string(p));
        s.push('\n');
    }
    s
}

pub fn from_jsonl(s: &str) -> Result<Vec<NormalCyclePair>> {
    s.lines().filter(|l| !l.trim().is_empty()).map(|l| Ok(serde_json::from_str(l)?)).collect()
}
