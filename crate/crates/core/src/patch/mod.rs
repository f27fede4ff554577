//! Numerical patch detection: hull a boundary sample, join ridge-adjacent
//! facets with close normals, take connected components and prune them.
//!
//! Graph edges across which the facets' vertex sets jump by more than a
//! few mesh lengths are cut first (within a patch exposed faces vary
//! continuously).  Pruning is then a fixpoint of four rules, each parameterised in
//! [`PruneParams`]:
//! 1. facets near the singular locus of the algebraic boundary (two
//!    defining polynomials nearly vanish, or one vanishes with a small
//!    gradient) are dropped, when polynomials are supplied;
//! 2. facets whose enclosing-ball radius exceeds `outlier_factor` times the
//!    median go (large simplices bridging separate patches);
//! 3. inside each component, facets whose face-dimension estimate differs
//!    from the component mode go;
//! 4. components with fewer than `min_count` facets, or fewer than
//!    `min_fraction` times the facets of the largest component, go.
//!
//! Components are recomputed after every rule.

pub mod hull;

pub use hull::{convex_hull, HullComplex, HullFacet, Ridge};

use crate::body::constraint::Compiled;
use crate::body::{Body, Constraint};
use crate::error::{Error, Result};
use crate::linalg::{angle, dot, norm, sub};
use crate::normal_cycle::NormalCyclePair;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Ridges whose normals differ by less than this are treated as interior
/// to a flat face and left out of angle statistics.
pub const FLAT_ANGLE: f64 = 1e-6;

/// Normal angle at every ridge, in ridge order.
pub fn ridge_angles(h: &HullComplex) -> Vec<f64> {
    h.ridges.iter().map(|r| angle(&h.facets[r.facets[0]].normal, &h.facets[r.facets[1]].normal)).collect()
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Median normal angle over the curved (non-flat) ridges.
pub fn median_ridge_angle(h: &HullComplex) -> f64 {
    median(ridge_angles(h).into_iter().filter(|&a| a > FLAT_ANGLE).collect()).unwrap_or(FLAT_ANGLE)
}

/// Default `theta`: three times the median curved-ridge angle.
pub fn auto_theta(h: &HullComplex) -> f64 {
    3.0 * median_ridge_angle(h)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetGraph {
    pub n_facets: usize,
    pub edges: Vec<(usize, usize)>,
    pub theta: f64,
}

pub fn build_facet_graph(h: &HullComplex, theta: f64) -> FacetGraph {
    let edges = h
        .ridges
        .iter()
        .zip(ridge_angles(h))
        .filter(|(_, a)| *a <= theta)
        .map(|(r, _)| (r.facets[0].min(r.facets[1]), r.facets[0].max(r.facets[1])))
        .collect();
    FacetGraph { n_facets: h.facets.len(), edges, theta }
}

impl FacetGraph {
    /// Connected components of the subgraph induced by `keep`, each sorted,
    /// listed by smallest member.
    pub fn components_within(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n_facets).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for &(a, b) in &self.edges {
            if keep[a] && keep[b] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.n_facets {
            if keep[i] {
                let r = find(&mut parent, i);
                groups.entry(r).or_default().push(i);
            }
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&vec![true; self.n_facets])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PruneParams {
    pub min_count: usize,
    /// Fragments left between patches after rules 1-3 are dropped when
    /// smaller than this fraction of the largest component.
    pub min_fraction: f64,
    pub outlier_factor: f64,
    /// Normal agreement used by the face-dimension estimate, as a multiple
    /// of the median curved-ridge angle.
    pub cluster_factor: f64,
    /// A principal extent counts as a face dimension when it exceeds this
    /// many mesh lengths.
    pub dim_factor: f64,
    /// Distance to a defining hypersurface below which a facet barycenter
    /// is labelled by that polynomial, in units of `mesh^2 / radius` (the
    /// chordal error of an inscribed facet), `radius` being half the sample
    /// diameter.
    pub label_factor: f64,
    /// Graph edges whose facets' vertex sets are further apart (Hausdorff)
    /// than this many mesh or shared-ridge lengths are cut: the exposed
    /// face jumps there.
    pub jump_factor: f64,
    /// A label is singular when the gradient is below this fraction of its
    /// median over the facets carrying the label.
    pub grad_factor: f64,
}

impl Default for PruneParams {
    fn default() -> Self {
        PruneParams { min_count: 3, min_fraction: 0.05, outlier_factor: 5.0, cluster_factor: 0.5, dim_factor: 4.0, label_factor: 1.0, jump_factor: 4.0, grad_factor: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum PruneReason {
    SingularLocus,
    SizeOutlier,
    FaceDimMismatch,
    SmallComponent,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatchCandidate {
    pub facet_ids: Vec<usize>,
    pub face_dim_estimate: usize,
    pub sample_pairs: Vec<NormalCyclePair>,
    pub pruned: Option<PruneReason>,
}

/// Median over facets of the shortest facet edge.
pub fn mesh_size(h: &HullComplex) -> f64 {
    let shortest: Vec<f64> = (0..h.facets.len())
        .map(|f| {
            let p = h.facet_points(f);
            let mut m = f64::INFINITY;
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    m = m.min(norm(&sub(p[i], p[j])));
                }
            }
            m
        })
        .collect();
    median(shortest).unwrap_or(0.0)
}

/// Circumradius of a facet inside its own affine hull.
pub fn circumradius(h: &HullComplex, f: usize) -> f64 {
    circumball(&h.facet_points(f)).map_or(f64::INFINITY, |(_, r, _)| r)
}

/// Radius of the smallest ball containing a facet: the circumradius of
/// the smallest face whose circumcentre lies in that face and whose
/// circumball holds every vertex.  Equals the circumradius for facets
/// without obtuse angles, and stays bounded for slivers.
pub fn enclosing_radius(h: &HullComplex, f: usize) -> f64 {
    let p = h.facet_points(f);
    let k = p.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << k) {
        let s: Vec<&[f64]> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| p[i]).collect();
        let Some((c, r, bary)) = circumball(&s) else { continue };
        if r < best && bary.iter().all(|&w| w >= -1e-12) && p.iter().all(|q| norm(&sub(q, &c)) <= r * (1.0 + 1e-9) + 1e-300) {
            best = r;
        }
    }
    best
}

/// Circumcentre, circumradius and barycentric coordinates of the
/// circumcentre for affinely independent points.
fn circumball(p: &[&[f64]]) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let k = p.len() - 1;
    if k == 0 {
        return Some((p[0].to_vec(), 0.0, vec![1.0]));
    }
    let e: Vec<Vec<f64>> = p[1..].iter().map(|q| sub(q, p[0])).collect();
    let g = DMatrix::from_fn(k, k, |i, j| dot(&e[i], &e[j]));
    let rhs = nalgebra::DVector::from_fn(k, |i, _| 0.5 * dot(&e[i], &e[i]));
    let lam = g.lu().solve(&rhs)?;
    let mut c = p[0].to_vec();
    for (i, ei) in e.iter().enumerate() {
        for (a, b) in c.iter_mut().zip(ei) {
            *a += lam[i] * b;
        }
    }
    let r = norm(&sub(&c, p[0]));
    let mut bary = vec![1.0 - lam.iter().sum::<f64>()];
    bary.extend(lam.iter());
    r.is_finite().then_some((c, r, bary))
}

/// `(d-1)`-volume of a facet.
pub fn facet_volume(h: &HullComplex, f: usize) -> f64 {
    let p = h.facet_points(f);
    let k = p.len() - 1;
    let e: Vec<Vec<f64>> = p[1..].iter().map(|q| sub(q, p[0])).collect();
    let g = DMatrix::from_fn(k, k, |i, j| dot(&e[i], &e[j]));
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    g.determinant().max(0.0).sqrt() / fact
}

/// Face-dimension estimate of every facet: the number of principal
/// extents, above `dim_factor * mesh`, of the vertices of all facets
/// reachable through ridges whose normals stay within `cluster_tol` of the
/// starting facet's normal.
pub fn facet_face_dims(h: &HullComplex, cluster_tol: f64, dim_factor: f64) -> Vec<usize> {
    let adj = h.adjacency();
    let mesh = mesh_size(h);
    let diam = diameter(&h.points);
    (0..h.facets.len())
        .into_par_iter()
        .map(|f| {
            let n0 = &h.facets[f].normal;
            let queue = flood(&adj, f, |nb| angle(n0, &h.facets[nb].normal) <= cluster_tol);
            let curved = affine_extent_dim(&union_points(h, &queue), dim_factor * mesh);
            // facets glued along flat ridges span an exact polytopal face,
            // however coarse the sample
            let flat = flood(&adj, f, |nb| angle(n0, &h.facets[nb].normal) <= FLAT_ANGLE);
            let flat_dim = if flat.len() > 1 { affine_extent_dim(&union_points(h, &flat), 1e-9 * diam) } else { 0 };
            curved.max(flat_dim).min(h.dim - 1)
        })
        .collect()
}

fn flood(adj: &[Vec<(usize, usize)>], start: usize, accept: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut seen = std::collections::HashSet::from([start]);
    let mut queue = vec![start];
    let mut i = 0;
    while i < queue.len() {
        let g = queue[i];
        i += 1;
        for &(nb, _) in &adj[g] {
            if !seen.contains(&nb) && accept(nb) {
                seen.insert(nb);
                queue.push(nb);
            }
        }
    }
    queue
}

fn union_points<'a>(h: &'a HullComplex, facets: &[usize]) -> Vec<&'a [f64]> {
    let mut verts: Vec<usize> = facets.iter().flat_map(|&g| h.facets[g].vertices.iter().copied()).collect();
    verts.sort_unstable();
    verts.dedup();
    verts.iter().map(|&v| h.points[v].as_slice()).collect()
}

fn diameter(pts: &[Vec<f64>]) -> f64 {
    let d = pts[0].len();
    let lo: Vec<f64> = (0..d).map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|k| pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    norm(&sub(&hi, &lo))
}

/// Number of principal axes along which the point set extends further
/// than `threshold`.
fn affine_extent_dim(pts: &[&[f64]], threshold: f64) -> usize {
    let d = pts[0].len();
    let m = pts.len() as f64;
    let mean: Vec<f64> = (0..d).map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / m).collect();
    let cov = DMatrix::from_fn(d, d, |i, j| pts.iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).sum::<f64>());
    let eig = SymmetricEigen::new(cov);
    (0..d)
        .filter(|&a| {
            let axis = eig.eigenvectors.column(a);
            let proj = pts.iter().map(|p| (0..d).map(|k| (p[k] - mean[k]) * axis[k]).sum::<f64>());
            let (lo, hi) = proj.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), x| (l.min(x), u.max(x)));
            hi - lo > threshold
        })
        .count()
}

/// Mode of the face-dimension estimates over a candidate (ties go to the
/// smaller dimension) and the facets that disagree with it.
pub fn estimate_face_dimension(dims: &[usize], candidate: &[usize]) -> (usize, Vec<usize>) {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &f in candidate {
        *counts.entry(dims[f]).or_default() += 1;
    }
    let mode = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&d, _)| d).unwrap_or(0);
    (mode, candidate.iter().copied().filter(|&f| dims[f] != mode).collect())
}

/// Which defining polynomials nearly vanish at each facet barycenter, and
/// whether the barycenter sits near the singular locus of their union.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetLabels {
    pub labels: Vec<Vec<usize>>,
    pub singular: Vec<bool>,
}

pub fn label_facets(h: &HullComplex, polys: &[Constraint], tol: f64, grad_factor: f64) -> FacetLabels {
    let compiled: Vec<Compiled> = polys.iter().map(|c| c.compile()).collect();
    let evals: Vec<Vec<(f64, f64)>> = (0..h.facets.len())
        .into_par_iter()
        .map(|f| {
            let b = h.barycenter(f);
            compiled
                .iter()
                .map(|c| {
                    let (v, g, _) = c.eval(&b, false);
                    (v, norm(&g))
                })
                .collect()
        })
        .collect();
    let labels: Vec<Vec<usize>> = evals
        .iter()
        .map(|e| e.iter().enumerate().filter(|(_, (v, g))| v.abs() <= tol * g.max(1e-300)).map(|(i, _)| i).collect())
        .collect();
    let grad_ref: Vec<f64> = (0..polys.len())
        .map(|i| median(labels.iter().zip(&evals).filter(|(l, _)| l.contains(&i)).map(|(_, e)| e[i].1).collect()).unwrap_or(0.0))
        .collect();
    let singular = labels
        .iter()
        .zip(&evals)
        .map(|(l, e)| l.len() >= 2 || l.iter().any(|&i| e[i].1 < grad_factor * grad_ref[i]))
        .collect();
    FacetLabels { labels, singular }
}

/// Supporting pair of a facet: its barycenter and the polar-normalised
/// facet normal relative to `origin`.
pub fn facet_pair(h: &HullComplex, f: usize, origin: &[f64]) -> Option<NormalCyclePair> {
    let x = h.barycenter(f);
    let n = &h.facets[f].normal;
    let s = dot(n, &sub(&x, origin));
    (s > 0.0).then(|| NormalCyclePair { x, ell: n.iter().map(|a| -a / s).collect(), residual: f64::NAN })
}

/// Hausdorff distance between the vertex sets of two facets.
pub fn facet_hausdorff(h: &HullComplex, a: usize, b: usize) -> f64 {
    let pa = h.facet_points(a);
    let pb = h.facet_points(b);
    let directed = |x: &[&[f64]], y: &[&[f64]]| {
        x.iter().map(|p| y.iter().map(|q| norm(&sub(p, q))).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    directed(&pa, &pb).max(directed(&pb, &pa))
}

/// The graph without edges across which the facet vertex sets jump: the
/// Hausdorff distance exceeds `factor` times the longer of `mesh` and the
/// shared ridge's diameter (long ruled slivers legitimately differ by
/// about their ridge length).
pub fn cut_face_jumps(g: &FacetGraph, h: &HullComplex, factor: f64, mesh: f64) -> FacetGraph {
    let ridge_len: HashMap<(usize, usize), f64> = h
        .ridges
        .iter()
        .map(|r| {
            let pts: Vec<&[f64]> = r.vertices.iter().map(|&v| h.points[v].as_slice()).collect();
            let (a, b) = (r.facets[0].min(r.facets[1]), r.facets[0].max(r.facets[1]));
            ((a, b), diameter_of(&pts))
        })
        .collect();
    let edges = g
        .edges
        .iter()
        .copied()
        .filter(|e| facet_hausdorff(h, e.0, e.1) <= factor * mesh.max(ridge_len.get(e).copied().unwrap_or(0.0)))
        .collect();
    FacetGraph { n_facets: g.n_facets, edges, theta: g.theta }
}

fn diameter_of(pts: &[&[f64]]) -> f64 {
    let mut m: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            m = m.max(norm(&sub(p, q)));
        }
    }
    m
}

/// Full pruning fixpoint.  `polys` enables the singular-locus rule.
pub fn components_and_prune(
    g: &FacetGraph,
    h: &HullComplex,
    params: &PruneParams,
    polys: Option<&[Constraint]>,
    origin: &[f64],
) -> Vec<PatchCandidate> {
    prune_within(g, h, params, polys, origin, &vec![true; h.facets.len()])
}

/// As [`components_and_prune`], starting from the facets flagged in `keep`.
pub fn prune_within(
    g: &FacetGraph,
    h: &HullComplex,
    params: &PruneParams,
    polys: Option<&[Constraint]>,
    origin: &[f64],
    keep: &[bool],
) -> Vec<PatchCandidate> {
    let nf = h.facets.len();
    let cluster_tol = params.cluster_factor * median_ridge_angle(h);
    let dims = facet_face_dims(h, cluster_tol, params.dim_factor);
    let radii: Vec<f64> = (0..nf).into_par_iter().map(|f| enclosing_radius(h, f)).collect();
    let mut alive = keep.to_vec();
    let mut removed: Vec<Option<PruneReason>> = vec![None; nf];
    let mut drop = |f: usize, why: PruneReason, alive: &mut Vec<bool>| {
        alive[f] = false;
        removed[f] = Some(why);
    };

    let mesh = mesh_size(h);
    let g = &cut_face_jumps(g, h, params.jump_factor, mesh);
    if let Some(polys) = polys.filter(|p| !p.is_empty()) {
        let tol = params.label_factor * mesh * mesh / (0.5 * diameter(&h.points));
        let lab = label_facets(h, polys, tol, params.grad_factor);
        for f in 0..nf {
            if alive[f] && lab.singular[f] {
                drop(f, PruneReason::SingularLocus, &mut alive);
            }
        }
    }
    loop {
        let before = alive.iter().filter(|&&a| a).count();
        if let Some(med) = median((0..nf).filter(|&f| alive[f]).map(|f| radii[f]).collect()) {
            for f in 0..nf {
                if alive[f] && radii[f] > params.outlier_factor * med {
                    drop(f, PruneReason::SizeOutlier, &mut alive);
                }
            }
        }
        for comp in g.components_within(&alive) {
            for f in estimate_face_dimension(&dims, &comp).1 {
                drop(f, PruneReason::FaceDimMismatch, &mut alive);
            }
        }
        let comps = g.components_within(&alive);
        let largest = comps.iter().map(|c| c.len()).max().unwrap_or(0) as f64;
        for comp in comps {
            if comp.len() < params.min_count || (comp.len() as f64) < params.min_fraction * largest {
                for f in comp {
                    drop(f, PruneReason::SmallComponent, &mut alive);
                }
            }
        }
        if alive.iter().filter(|&&a| a).count() == before {
            break;
        }
    }

    let mut out: Vec<PatchCandidate> = g
        .components_within(&alive)
        .into_iter()
        .map(|comp| {
            let (dim, _) = estimate_face_dimension(&dims, &comp);
            let sample_pairs = comp.iter().filter_map(|&f| facet_pair(h, f, origin)).collect();
            PatchCandidate { facet_ids: comp, face_dim_estimate: dim, sample_pairs, pruned: None }
        })
        .collect();
    let mut by_reason: BTreeMap<PruneReason, Vec<usize>> = BTreeMap::new();
    for (f, r) in removed.iter().enumerate() {
        if let (Some(r), true) = (r, keep[f]) {
            by_reason.entry(*r).or_default().push(f);
        }
    }
    for (r, facets) in by_reason {
        let (dim, _) = estimate_face_dimension(&dims, &facets);
        out.push(PatchCandidate { facet_ids: facets, face_dim_estimate: dim, sample_pairs: Vec::new(), pruned: Some(r) });
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateSummary {
    pub id: usize,
    pub facet_count: usize,
    pub area_fraction: f64,
    pub face_dim_estimate: usize,
    pub sample_pairs: Vec<NormalCyclePair>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatchReport {
    pub dim: usize,
    pub n_points: usize,
    pub n_facets: usize,
    pub theta: f64,
    pub mesh: f64,
    pub candidates: Vec<CandidateSummary>,
    pub pruned: BTreeMap<String, usize>,
    pub unassigned_fraction: f64,
    pub unassigned_area_fraction: f64,
    /// Every facet is a simplex by construction.
    pub simplicial: bool,
    pub extreme_fraction: f64,
}

/// Summary of surviving candidates; at most `max_pairs` pairs each, spread
/// evenly over the candidate.
pub fn patch_report(candidates: &[PatchCandidate], h: &HullComplex, theta: f64, max_pairs: usize) -> PatchReport {
    let areas: Vec<f64> = (0..h.facets.len()).map(|f| facet_volume(h, f)).collect();
    let total: f64 = areas.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let alive: Vec<&PatchCandidate> = candidates.iter().filter(|c| c.pruned.is_none()).collect();
    let summaries: Vec<CandidateSummary> = alive
        .iter()
        .enumerate()
        .map(|(id, c)| {
            let step = (c.sample_pairs.len() as f64 / max_pairs.max(1) as f64).max(1.0);
            let pairs = (0..c.sample_pairs.len().min(max_pairs)).map(|k| c.sample_pairs[(k as f64 * step) as usize].clone()).collect();
            CandidateSummary {
                id,
                facet_count: c.facet_ids.len(),
                area_fraction: c.facet_ids.iter().map(|&f| areas[f]).sum::<f64>() / total,
                face_dim_estimate: c.face_dim_estimate,
                sample_pairs: pairs,
            }
        })
        .collect();
    let assigned: usize = alive.iter().map(|c| c.facet_ids.len()).sum();
    let assigned_area: f64 = summaries.iter().map(|s| s.area_fraction).sum();
    let mut pruned = BTreeMap::new();
    for c in candidates.iter().filter(|c| c.pruned.is_some()) {
        let key = serde_json::to_value(c.pruned.unwrap()).unwrap().as_str().unwrap().to_string();
        *pruned.entry(key).or_insert(0) += c.facet_ids.len();
    }
    let all: Vec<usize> = (0..h.points.len()).collect();
    PatchReport {
        dim: h.dim,
        n_points: h.points.len(),
        n_facets: h.facets.len(),
        theta,
        mesh: mesh_size(h),
        candidates: summaries,
        pruned,
        unassigned_fraction: 1.0 - assigned as f64 / h.facets.len().max(1) as f64,
        unassigned_area_fraction: (1.0 - assigned_area).max(0.0),
        simplicial: h.facets.iter().all(|f| f.vertices.len() == h.dim),
        extreme_fraction: h.extreme_fraction(&all),
    }
}

/// Candidate owning a normal-cycle pair: the surviving facet whose plane
/// passes within `tol` of `x`, whose enclosing ball (grown by `tol`)
/// contains `x`, and whose normal is within `max_angle` of the outward
/// direction `-ell`; the closest such facet decides.
pub fn assign_pair(h: &HullComplex, candidates: &[PatchCandidate], pair: &NormalCyclePair, tol: f64, max_angle: f64) -> Option<usize> {
    let out: Vec<f64> = pair.ell.iter().map(|a| -a).collect();
    let mut best: Option<(f64, usize)> = None;
    for (id, c) in candidates.iter().filter(|c| c.pruned.is_none()).enumerate() {
        for &f in &c.facet_ids {
            let fc = &h.facets[f];
            let gap = (dot(&fc.normal, &pair.x) - fc.offset).abs();
            if gap > tol || angle(&fc.normal, &out) > max_angle {
                continue;
            }
            let r = norm(&sub(&pair.x, &h.barycenter(f)));
            if r > enclosing_radius(h, f) + tol {
                continue;
            }
            if best.is_none_or(|(g, _)| gap < g) {
                best = Some((gap, id));
            }
        }
    }
    best.map(|(_, id)| id)
}

/// Pipeline parameters beyond pruning.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineParams {
    /// `None` selects [`auto_theta`].
    pub theta: Option<f64>,
    pub prune: PruneParams,
    pub max_pairs: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams { theta: None, prune: PruneParams::default(), max_pairs: 16 }
    }
}

#[derive(Clone, Debug)]
pub struct PatchAnalysis {
    pub hull: HullComplex,
    pub graph: FacetGraph,
    pub candidates: Vec<PatchCandidate>,
    pub report: PatchReport,
}

impl PatchAnalysis {
    pub fn surviving(&self) -> impl Iterator<Item = &PatchCandidate> {
        self.candidates.iter().filter(|c| c.pruned.is_none())
    }
}

/// Hull, graph, pruning and report in one go.  With a body, its defining
/// polynomials drive the singular-locus rule and pair residuals are filled in.
pub fn run_pipeline(points: &[Vec<f64>], body: Option<&Body>, params: &PipelineParams) -> Result<PatchAnalysis> {
    let hull = convex_hull(points)?;
    let theta = params.theta.unwrap_or_else(|| auto_theta(&hull));
    if !(theta > 0.0) {
        return Err(Error::InvalidInput(format!("theta must be positive, got {theta}")));
    }
    let graph = build_facet_graph(&hull, theta);
    let origin: Vec<f64> = match body {
        Some(b) => {
            if b.ambient_dim() != hull.dim {
                return Err(Error::DimensionMismatch { expected: b.ambient_dim(), got: hull.dim });
            }
            b.interior_point().to_vec()
        }
        None => (0..hull.dim).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / points.len() as f64).collect(),
    };
    let polys = body.and_then(|b| b.components());
    let mut candidates = components_and_prune(&graph, &hull, &params.prune, polys, &origin);
    if let Some(b) = body {
        for c in &mut candidates {
            for p in &mut c.sample_pairs {
                p.residual = crate::normal_cycle::pair_residual(b, &p.x, &p.ell).unwrap_or(f64::NAN);
            }
        }
    }
    let report = patch_report(&candidates, &hull, theta, params.max_pairs);
    Ok(PatchAnalysis { hull, graph, candidates, report })
}

fn exit_point(b: &Body, v: &[f64]) -> Result<Option<Vec<f64>>> {
    match b.ray_exit(v, 1e-13) {
        Ok((inside, _)) => Ok(Some(inside)),
        Err(Error::Unbounded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Boundary points on rays from the interior point.  In 2D the rays start
/// at jittered angles and the widest gap between consecutive boundary
/// points is split (by bisecting its angle) until `n` points exist, so the
/// sample is close to uniform in arc length.  In 3D the directions form a
/// rotated Fibonacci lattice; higher dimensions use Gaussian directions.
/// Rays that never leave the body are skipped.
pub fn boundary_sample(b: &Body, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    use rand::SeedableRng;
    let d = b.ambient_dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    if d == 2 {
        return boundary_sample_2d(b, n, &mut rng);
    }
    let dirs: Vec<Vec<f64>> = match d {
        3 => {
            let rot = random_rotation(&mut rng);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * i as f64;
                    let v = [r * t.cos(), r * t.sin(), z];
                    (0..3).map(|a| (0..3).map(|k| rot[a][k] * v[k]).sum()).collect()
                })
                .collect()
        }
        _ => (0..n).map(|_| crate::normal_cycle::random_unit(&mut rng, d)).collect(),
    };
    let exits: Vec<Result<Option<Vec<f64>>>> = dirs.par_iter().map(|v| exit_point(b, v)).collect();
    Ok(exits.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

fn boundary_sample_2d(b: &Body, n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    use rand::Rng;
    use std::collections::BinaryHeap;
    let at = |t: f64| exit_point(b, &[t.cos(), t.sin()]);
    let m = (n / 4).max(8);
    let shift: f64 = rng.random();
    let mut pts: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in 0..m {
        let t = std::f64::consts::TAU * (i as f64 + shift + 0.5 * rng.random::<f64>()) / m as f64;
        if let Some(p) = at(t)? {
            pts.push((t, p));
        }
    }
    if pts.len() < 3 {
        return Ok(pts.into_iter().map(|(_, p)| p).collect());
    }
    // (gap length, angle at start, angle at end, start point, end point)
    #[derive(PartialEq)]
    struct Gap(f64, f64, f64, Vec<f64>, Vec<f64>);
    impl Eq for Gap {}
    impl PartialOrd for Gap {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Gap {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0)
        }
    }
    let mut heap = BinaryHeap::new();
    for i in 0..pts.len() {
        let (t0, p0) = &pts[i];
        let (t1, p1) = &pts[(i + 1) % pts.len()];
        let t1 = if i + 1 == pts.len() { t1 + std::f64::consts::TAU } else { *t1 };
        heap.push(Gap(norm(&sub(p0, p1)), *t0, t1, p0.clone(), p1.clone()));
    }
    let mut out: Vec<Vec<f64>> = pts.into_iter().map(|(_, p)| p).collect();
    while out.len() < n {
        let Some(Gap(_, t0, t1, p0, p1)) = heap.pop() else { break };
        let t = 0.5 * (t0 + t1);
        match at(t)? {
            Some(p) => {
                heap.push(Gap(norm(&sub(&p0, &p)), t0, t, p0, p.clone()));
                heap.push(Gap(norm(&sub(&p, &p1)), t, t1, p.clone(), p1));
                out.push(p);
            }
            None => heap.push(Gap(0.0, t0, t1, p0, p1)),
        }
    }
    Ok(out)
}

fn random_rotation(rng: &mut rand_chacha::ChaCha8Rng) -> [[f64; 3]; 3] {
    let a = nalgebra::Matrix3::from_fn(|_, _| rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, rng));
    let q = a.qr().q();
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = q[(i, j)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn cube() -> HullComplex {
        let pts: Vec<Vec<f64>> = (0..8).map(|i| (0..3).map(|k| ((i >> k) & 1) as f64).collect()).collect();
        convex_hull(&pts).unwrap()
    }

    #[test]
    fn cube_graph_components() {
        let h = cube();
        assert_eq!(build_facet_graph(&h, 0.5).components().len(), 6);
        assert_eq!(build_facet_graph(&h, std::f64::consts::FRAC_PI_2 + 1e-9).components().len(), 1);
    }

    #[test]
    fn cube_candidates() {
        let h = cube();
        let g = build_facet_graph(&h, 0.5);
        // each square face is only two facets
        let params = PruneParams { min_count: 2, ..PruneParams::default() };
        let c = components_and_prune(&g, &h, &params, None, &[0.5; 3]);
        let alive: Vec<_> = c.iter().filter(|c| c.pruned.is_none()).collect();
        assert_eq!(alive.len(), 6);
        assert!(alive.iter().all(|c| c.face_dim_estimate == 2));
        let r = patch_report(&c, &h, 0.5, 4);
        assert_eq!(r.unassigned_fraction, 0.0);
        assert!((r.candidates.iter().map(|c| c.area_fraction).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_is_one_point_patch() {
        let b = gallery::unit_ball(3);
        let pts = boundary_sample(&b, 500, 7).unwrap();
        let a = run_pipeline(&pts, Some(&b), &PipelineParams::default()).unwrap();
        let alive: Vec<_> = a.surviving().collect();
        assert_eq!(alive.len(), 1, "{:?}", a.report.pruned);
        assert_eq!(alive[0].face_dim_estimate, 0);
    }

    #[test]
    fn circumradius_and_volume() {
        let h = convex_hull(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        for f in 0..h.facets.len() {
            let r = circumradius(&h, f);
            let v = facet_volume(&h, f);
            if h.facets[f].vertices == vec![1, 2, 3] {
                assert!((r - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
                assert!((v - 3f64.sqrt() / 2.0).abs() < 1e-12);
            } else {
                assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
                assert!((v - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_auto_theta_fixture() {
        let pts = boundary_sample(&gallery::unit_ball(3), 500, 7).unwrap();
        let h = convex_hull(&pts).unwrap();
        let th = auto_theta(&h);
        assert!((th - 0.384904).abs() < 1e-5, "{th}");
        assert_eq!(build_facet_graph(&h, th).components().len(), 1);
    }

    #[test]
    fn circle_and_stick_fixture() {
        let e = gallery::entry("bellows").unwrap();
        let pts = gallery::bellows_generators(200, 7);
        let a = run_pipeline(&pts, Some(&e.body), &PipelineParams::default()).unwrap();
        assert_eq!(a.hull.facets.len(), 400);
        let alive: Vec<_> = a.surviving().collect();
        assert_eq!(alive.len(), 2);
        assert!(alive.iter().all(|c| c.face_dim_estimate == 1 && c.facet_ids.len() == 191));
        assert!((a.report.unassigned_fraction - 0.045).abs() < 1e-12);
        // the two families face opposite sides of the plane of the circle
        let mean_nz = |c: &PatchCandidate| c.facet_ids.iter().map(|&f| a.hull.facets[f].normal[2]).sum::<f64>() / c.facet_ids.len() as f64;
        assert!(mean_nz(alive[0]) * mean_nz(alive[1]) < 0.0);
    }

    #[test]
    fn helmet_fixture() {
        let e = gallery::entry("helmet").unwrap();
        let pts = boundary_sample(&e.body, 1000, 7).unwrap();
        let a = run_pipeline(&pts, Some(&e.body), &PipelineParams::default()).unwrap();
        let mut got: Vec<(usize, usize)> = a.surviving().map(|c| (c.facet_ids.len(), c.face_dim_estimate)).collect();
        got.sort();
        assert_eq!(got, vec![(48, 1), (48, 1), (61, 1), (771, 0)]);
    }

    #[test]
    fn pruning_is_idempotent() {
        for name in ["bellows", "elliptope"] {
            let e = gallery::entry(name).unwrap();
            let pts = if name == "bellows" { gallery::bellows_generators(300, 3) } else { boundary_sample(&e.body, 400, 3).unwrap() };
            let a = run_pipeline(&pts, Some(&e.body), &PipelineParams::default()).unwrap();
            let mut keep = vec![false; a.hull.facets.len()];
            for c in a.surviving() {
                for &f in &c.facet_ids {
                    keep[f] = true;
                }
            }
            let polys = e.body.components();
            let again = prune_within(&a.graph, &a.hull, &PruneParams::default(), polys, e.body.interior_point(), &keep);
            let mut first: Vec<_> = a.surviving().map(|c| c.facet_ids.clone()).collect();
            let mut second: Vec<_> = again.iter().filter(|c| c.pruned.is_none()).map(|c| c.facet_ids.clone()).collect();
            first.sort();
            second.sort();
            assert_eq!(first, second, "{name}");
        }
    }

    #[test]
    fn hausdorff_between_facets() {
        let h = cube();
        for &(a, b) in &build_facet_graph(&h, 0.5).edges {
            // co-facet triangles of one unit square
            assert!((facet_hausdorff(&h, a, b) - 1.0).abs() < 1e-9);
        }
        assert_eq!(cut_face_jumps(&build_facet_graph(&h, 0.5), &h, 0.5, 1.0).edges.len(), 0);
        assert_eq!(cut_face_jumps(&build_facet_graph(&h, 0.5), &h, 1.0, 1.0).edges.len(), 6);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn graph_grows_with_theta(seed in 0u64..1000, t1 in 0.01f64..1.0, t2 in 0.01f64..1.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| rng.random::<f64>()).collect()).collect();
            let h = convex_hull(&pts).unwrap();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let a = build_facet_graph(&h, lo);
            let b = build_facet_graph(&h, hi);
            let angles = ridge_angles(&h);
            for e in &a.edges {
                proptest::prop_assert!(b.edges.contains(e));
            }
            for (r, &t) in h.ridges.iter().zip(&angles) {
                let e = (r.facets[0].min(r.facets[1]), r.facets[0].max(r.facets[1]));
                proptest::prop_assert_eq!(a.edges.contains(&e), t <= lo);
            }
            proptest::prop_assert_eq!(a.edges.len(), angles.iter().filter(|&&t| t <= lo).count());
            proptest::prop_assert!(b.components().len() <= a.components().len());
        }
    }
}
