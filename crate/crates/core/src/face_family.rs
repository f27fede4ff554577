//! Hausdorff distances between face slices of a patch and convergence
//! experiments along sequences of functionals.
//!
//! A slice `Q_l` is approximated by the sampled pairs whose functional is
//! within an angular window of `l`; exact hyperplane sections of a finite
//! sample are generically empty.

use crate::body::Body;
use crate::error::{Error, Result};
use crate::linalg::{angle, dot, norm, sub};
use crate::normal_cycle::{pair_residual, NormalCyclePair};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// `max_a min_b |a - b|`.
pub fn directed_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("Hausdorff distance of an empty set".into()));
    }
    Ok(a.par_iter()
        .map(|p| b.iter().map(|q| norm(&sub(p, q))).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max))
}

pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceSlice {
    pub ell: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub mesh: f64,
}

/// Points of the pairs whose functional is within `angle_tol` of `ell`.
/// An empty slice is returned as such.
pub fn slice_patch(pairs: &[NormalCyclePair], ell: &[f64], angle_tol: f64, mesh: f64) -> FaceSlice {
    let points = pairs.iter().filter(|p| angle(&p.ell, ell) <= angle_tol).map(|p| p.x.clone()).collect();
    FaceSlice { ell: ell.to_vec(), points, mesh }
}

/// Median distance from a sampled point to its nearest neighbour.
pub fn sample_mesh(pairs: &[NormalCyclePair]) -> f64 {
    let mut nn: Vec<f64> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            pairs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| norm(&sub(&p.x, &q.x)))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|d| d.is_finite())
        .collect();
    if nn.is_empty() {
        return 0.0;
    }
    nn.sort_by(f64::total_cmp);
    nn[nn.len() / 2]
}

/// The exact pair `(x, l)` for the outward direction `u`: `x` maximises
/// `<u, .>` over the body and `l = -u / <u, x - o>`.
pub fn support_pair(b: &Body, u: &[f64]) -> Result<NormalCyclePair> {
    let s = b.support(u)?;
    let h = dot(u, &sub(&s.maximizer, b.interior_point()));
    if h <= 0.0 {
        return Err(Error::OriginNotInterior(h));
    }
    let ell: Vec<f64> = u.iter().map(|a| -a / h).collect();
    let residual = pair_residual(b, &s.maximizer, &ell)?;
    Ok(NormalCyclePair { x: s.maximizer, ell, residual })
}

/// Support pairs for many directions, in parallel.  Directions whose solve
/// fails are skipped.
pub fn support_pairs(b: &Body, dirs: &[Vec<f64>]) -> Vec<NormalCyclePair> {
    let fast = b.with_starts(1);
    dirs.par_iter().filter_map(|u| support_pair(&fast, u).ok()).collect()
}

/// `n` unit vectors forming a Fibonacci lattice on the spherical cap of
/// angular radius `radius` around the unit vector `centre` (3D).
pub fn cap_directions(centre: &[f64], radius: f64, n: usize) -> Result<Vec<Vec<f64>>> {
    if centre.len() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: centre.len() });
    }
    let c: Vec<f64> = centre.iter().map(|a| a / norm(centre)).collect();
    let (e1, e2) = orthonormal_pair(&c);
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let zmin = radius.cos();
    Ok((0..n)
        .map(|i| {
            let z = 1.0 - (1.0 - zmin) * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            (0..3).map(|k| z * c[k] + r * (t.cos() * e1[k] + t.sin() * e2[k])).collect()
        })
        .collect())
}

/// Unit vector at angle `theta` from the unit vector `c`, rotated towards
/// the first vector orthogonal to `c` (3D).
pub fn tilt(c: &[f64], theta: f64) -> Vec<f64> {
    let (e1, _) = orthonormal_pair(c);
    (0..3).map(|k| theta.cos() * c[k] + theta.sin() * e1[k]).collect()
}

fn orthonormal_pair(c: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pick = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = dot(&pick, c);
    let e1: Vec<f64> = (0..3).map(|k| pick[k] - d * c[k]).collect();
    let n1 = norm(&e1);
    let e1: Vec<f64> = e1.iter().map(|a| a / n1).collect();
    let e2 = vec![c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]];
    (e1, e2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Converges,
    Diverges,
    /// The face dimension jumps at the limit functional (a patch-boundary
    /// functional), where continuity is not expected.
    OutOfScopeLimit,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Converges => "CONVERGES",
            Verdict::Diverges => "DIVERGES",
            Verdict::OutOfScopeLimit => "OUT-OF-SCOPE-LIMIT",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// Angular window of a slice.
    pub angle_tol: f64,
    /// Convergence threshold in mesh units.
    pub c: f64,
    /// Sampling density; `None` measures it from the pairs.
    pub mesh: Option<f64>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        ExperimentParams { angle_tol: 1e-3, c: 5.0, mesh: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `sup_{a in Q_n} d(a, Q)`
    pub d_n: f64,
    /// `sup_{b in Q} d(b, Q_n)`
    pub delta_n: f64,
    pub slice_size: usize,
    pub slice_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub verdict: Verdict,
    pub mesh: f64,
    pub threshold: f64,
    pub limit_size: usize,
    pub limit_dim: usize,
    /// Largest `max(d_n, delta_n)` over the last quartile.
    pub final_distance: f64,
    /// Smallest `d_n` over the last quartile.
    pub final_gap: f64,
}

/// Slices along `ell_seq` against the slice at `ell_limit`.  CONVERGES iff
/// `max(d_n, delta_n) <= c * mesh` on the last quartile of the sequence;
/// OUT-OF-SCOPE-LIMIT when the limit slice has larger face dimension than
/// every slice of the last quartile.
pub fn convergence_experiment(
    pairs: &[NormalCyclePair],
    ell_seq: &[Vec<f64>],
    ell_limit: &[f64],
    params: &ExperimentParams,
) -> Result<ConvergenceReport> {
    if ell_seq.is_empty() {
        return Err(Error::Empty("no functionals in the sequence".into()));
    }
    let mesh = params.mesh.unwrap_or_else(|| sample_mesh(pairs));
    let threshold = params.c * mesh;
    let q = slice_patch(pairs, ell_limit, params.angle_tol, mesh);
    if q.points.is_empty() {
        return Err(Error::Empty("slice at the limit functional is empty".into()));
    }
    let limit_dim = extent_dim(&q.points, threshold);
    let mut rows = Vec::with_capacity(ell_seq.len());
    for (n, l) in ell_seq.iter().enumerate() {
        let qn = slice_patch(pairs, l, params.angle_tol, mesh);
        if qn.points.is_empty() {
            return Err(Error::Empty(format!("slice {n} of the sequence is empty")));
        }
        rows.push(ConvergenceRow {
            n,
            d_n: directed_hausdorff(&qn.points, &q.points)?,
            delta_n: directed_hausdorff(&q.points, &qn.points)?,
            slice_size: qn.points.len(),
            slice_dim: extent_dim(&qn.points, threshold),
        });
    }
    let tail = &rows[rows.len() - rows.len().div_ceil(4)..];
    let final_distance = tail.iter().map(|r| r.d_n.max(r.delta_n)).fold(0.0, f64::max);
    let final_gap = tail.iter().map(|r| r.d_n).fold(f64::INFINITY, f64::min);
    let verdict = if tail.iter().all(|r| r.slice_dim < limit_dim) {
        Verdict::OutOfScopeLimit
    } else if final_distance <= threshold {
        Verdict::Converges
    } else {
        Verdict::Diverges
    };
    Ok(ConvergenceReport { rows, verdict, mesh, threshold, limit_size: q.points.len(), limit_dim, final_distance, final_gap })
}

/// Elliptope experiment around the outward direction `centre`: a pool of
/// `pool` support pairs on a cap of angular radius `0.35`, functionals
/// tilting towards `centre` as `0.25 * 0.7^n`, `n = 1..=16`.
pub fn elliptope_experiment(centre: &[f64], pool: usize) -> Result<ConvergenceReport> {
    let b = crate::gallery::elliptope()?.body;
    let c: Vec<f64> = centre.iter().map(|a| a / norm(centre)).collect();
    let pairs = support_pairs(&b, &cap_directions(&c, 0.35, pool)?);
    let limit = support_pair(&b, &c)?.ell;
    let seq = (1..=16)
        .map(|n| support_pair(&b, &tilt(&c, 0.25 * 0.7f64.powi(n))).map(|p| p.ell))
        .collect::<Result<Vec<_>>>()?;
    let spacing = (std::f64::consts::PI * 0.35f64.powi(2) / pool as f64).sqrt();
    convergence_experiment(&pairs, &seq, &limit, &ExperimentParams { angle_tol: 2.0 * spacing, ..Default::default() })
}

/// Helmet experiment on the lines `x_n = 0.2 * 0.6^n`, `n = 1..=16`,
/// towards the middle face `x = 0`, with `z`-spacing `h` (the mesh).
pub fn helmet_experiment(h: f64, closed: bool) -> Result<ConvergenceReport> {
    let xs: Vec<f64> = (1..=16).map(|n| 0.2 * 0.6f64.powi(n)).collect();
    let mut all = xs.clone();
    all.push(0.0);
    let pairs = crate::gallery::helmet_patch_pairs(&all, h, closed);
    let ell = |x: f64| {
        let s = 0.7 + x * x / 2.0;
        vec![-x / s, -1.0 / s, 0.0]
    };
    let seq: Vec<Vec<f64>> = xs.iter().map(|&x| ell(x)).collect();
    convergence_experiment(&pairs, &seq, &ell(0.0), &ExperimentParams { angle_tol: 1e-9, c: 5.0, mesh: Some(h) })
}

/// Principal axes along which the points extend further than `threshold`.
fn extent_dim(pts: &[Vec<f64>], threshold: f64) -> usize {
    let d = pts[0].len();
    let m = pts.len() as f64;
    let mean: Vec<f64> = (0..d).map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / m).collect();
    let cov = DMatrix::from_fn(d, d, |i, j| pts.iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).sum::<f64>());
    let eig = SymmetricEigen::new(cov);
    (0..d)
        .filter(|&a| {
            let axis = eig.eigenvectors.column(a);
            let (lo, hi) = pts
                .iter()
                .map(|p| (0..d).map(|k| (p[k] - mean[k]) * axis[k]).sum::<f64>())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), x| (l.min(x), u.max(x)));
            hi - lo > threshold
        })
        .count()
}
