//! Incremental (quickhull) convex hull in dimensions 2 to 6.
//!
//! Inputs are moved by a fixed pseudo-random perturbation far below the
//! sampling scale before the hull is built, so every facet is a simplex
//! even for degenerate inputs (collinear samples, cube corners, ...).
//! Normals and offsets are reported against the unperturbed points.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Relative size of the general-position perturbation.
const PERTURB: f64 = 1e-10;
/// Relative distance below which a point counts as lying on a facet.
const PLANE_EPS: f64 = 1e-13;
/// Relative distance within which a planar point is put on a hull edge.
const ON_EDGE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HullFacet {
    /// Sorted indices into [`HullComplex::points`]; always `dim` of them.
    pub vertices: Vec<usize>,
    /// Outward unit normal.
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Ridge {
    pub facets: [usize; 2],
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullComplex {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub facets: Vec<HullFacet>,
    pub ridges: Vec<Ridge>,
}

impl HullComplex {
    /// Indices of points that are vertices of some facet, sorted.
    pub fn vertex_ids(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.facets.iter().flat_map(|f| f.vertices.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Facet-to-facet adjacency: `adj[f]` lists `(neighbour, ridge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.facets.len()];
        for (r, ridge) in self.ridges.iter().enumerate() {
            let [a, b] = ridge.facets;
            adj[a].push((b, r));
            adj[b].push((a, r));
        }
        adj
    }

    pub fn facet_points(&self, f: usize) -> Vec<&[f64]> {
        self.facets[f].vertices.iter().map(|&i| self.points[i].as_slice()).collect()
    }

    pub fn barycenter(&self, f: usize) -> Vec<f64> {
        let pts = self.facet_points(f);
        let mut c = vec![0.0; self.dim];
        for p in &pts {
            for (a, b) in c.iter_mut().zip(p.iter()) {
                *a += b / pts.len() as f64;
            }
        }
        c
    }

    /// Worst violation of the facet-plane invariants over all points.
    pub fn max_plane_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for f in &self.facets {
            for &v in &f.vertices {
                worst = worst.max((dot(&f.normal, &self.points[v]) - f.offset).abs());
            }
            for p in &self.points {
                worst = worst.max(dot(&f.normal, p) - f.offset);
            }
        }
        worst
    }

    /// Fraction of the given point indices that are hull vertices.
    pub fn extreme_fraction(&self, ids: &[usize]) -> f64 {
        if ids.is_empty() {
            return 1.0;
        }
        let verts = self.vertex_ids();
        ids.iter().filter(|i| verts.binary_search(i).is_ok()).count() as f64 / ids.len() as f64
    }
}

struct Facet {
    verts: Vec<usize>,
    neigh: Vec<usize>,
    n: Vec<f64>,
    off: f64,
    outside: Vec<usize>,
    alive: bool,
}

/// Unit normal of the hyperplane through `pts` (`d` points in `R^d`),
/// oriented away from `centre`.
fn plane(pts: &[&[f64]], centre: &[f64]) -> Option<(Vec<f64>, f64)> {
    let d = centre.len();
    let base = pts[0];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for p in &pts[1..] {
        let mut v = sub(p, base);
        // two rounds of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = norm(&v);
        if nv == 0.0 {
            return None;
        }
        basis.push(v.iter().map(|x| x / nv).collect());
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for k in 0..d {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let nv = norm(&v);
        if nv > best_norm {
            best_norm = nv;
            best = Some(v.iter().map(|x| x / nv).collect());
        }
    }
    let mut n = best?;
    let mut off = dot(&n, base);
    if dot(&n, centre) > off {
        n.iter_mut().for_each(|x| *x = -*x);
        off = -off;
    }
    Some((n, off))
}

/// Convex hull of `points` with full facet and ridge incidences.
pub fn convex_hull(points: &[Vec<f64>]) -> Result<HullComplex> {
    let d = points.first().map(|p| p.len()).ok_or_else(|| Error::Empty("no points".into()))?;
    if !(2..=6).contains(&d) {
        return Err(Error::InvalidInput(format!("hull dimension {d} is outside 2..=6")));
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: p.len() });
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    if points.len() < d + 1 {
        return Err(Error::Degenerate(format!("{} points cannot span dimension {d}", points.len())));
    }
    let lo: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..d).map(|k| points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let diam = norm(&sub(&hi, &lo)).max(f64::MIN_POSITIVE);
    let simplex = initial_simplex(points, diam)?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let pts: Vec<Vec<f64>> =
        points.iter().map(|p| p.iter().map(|x| x + PERTURB * diam * rng.random_range(-1.0..1.0)).collect()).collect();
    let eps = PLANE_EPS * diam;
    let mut centre = vec![0.0; d];
    for &i in &simplex {
        for k in 0..d {
            centre[k] += pts[i][k] / (d + 1) as f64;
        }
    }

    let mut facets: Vec<Facet> = Vec::new();
    for k in 0..=d {
        let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v).collect();
        let neigh: Vec<usize> = (0..=d).filter(|&j| j != k).collect();
        let vp: Vec<&[f64]> = verts.iter().map(|&v| pts[v].as_slice()).collect();
        let (n, off) = plane(&vp, &centre).ok_or_else(|| Error::Degenerate("initial simplex is flat".into()))?;
        facets.push(Facet { verts, neigh, n, off, outside: Vec::new(), alive: true });
    }
    for (i, p) in pts.iter().enumerate() {
        if simplex.contains(&i) {
            continue;
        }
        let best = facets.iter().enumerate().map(|(f, fc)| (f, dot(&fc.n, p) - fc.off)).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        if best.1 > eps {
            facets[best.0].outside.push(i);
        }
    }

    let mut stack: Vec<usize> = (0..facets.len()).filter(|&f| !facets[f].outside.is_empty()).collect();
    let mut mark: Vec<u32> = vec![0; facets.len()];
    let mut round = 0u32;
    while let Some(f0) = stack.pop() {
        if !facets[f0].alive || facets[f0].outside.is_empty() {
            continue;
        }
        let fc = &facets[f0];
        let apex = *fc.outside.iter().max_by(|&&a, &&b| (dot(&fc.n, &pts[a])).total_cmp(&dot(&fc.n, &pts[b]))).unwrap();
        let q = &pts[apex];

        // visible region by flood fill from f0
        round += 1;
        let mut visible = vec![f0];
        mark[f0] = round;
        let mut i = 0;
        while i < visible.len() {
            let f = visible[i];
            i += 1;
            for &g in &facets[f].neigh {
                if mark[g] != round && dot(&facets[g].n, q) - facets[g].off > eps {
                    mark[g] = round;
                    visible.push(g);
                }
            }
        }

        // cone the horizon to the apex
        let mut created = Vec::new();
        for &f in &visible {
            for slot in 0..d {
                let g = facets[f].neigh[slot];
                if mark[g] == round {
                    continue;
                }
                let mut verts: Vec<usize> = facets[f].verts.iter().enumerate().filter(|&(j, _)| j != slot).map(|(_, &v)| v).collect();
                verts.push(apex);
                let vp: Vec<&[f64]> = verts.iter().map(|&v| pts[v].as_slice()).collect();
                let (n, off) = plane(&vp, &centre).ok_or_else(|| Error::NonConvergence("hull facet collapsed".into()))?;
                let mut neigh = vec![usize::MAX; d];
                neigh[d - 1] = g;
                let id = facets.len();
                let back = facets[g].neigh.iter().position(|&x| x == f).expect("adjacency is symmetric");
                facets[g].neigh[back] = id;
                facets.push(Facet { verts, neigh, n, off, outside: Vec::new(), alive: true });
                mark.push(0);
                created.push(id);
            }
        }
        let mut open: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for &id in &created {
            for slot in 0..d - 1 {
                let mut key: Vec<usize> = facets[id].verts.iter().enumerate().filter(|&(j, _)| j != slot).map(|(_, &v)| v).collect();
                key.sort_unstable();
                if let Some((other, oslot)) = open.remove(&key) {
                    facets[id].neigh[slot] = other;
                    facets[other].neigh[oslot] = id;
                } else {
                    open.insert(key, (id, slot));
                }
            }
        }
        if !open.is_empty() {
            return Err(Error::NonConvergence("hull horizon is not a closed ridge cycle".into()));
        }

        let mut orphans = Vec::new();
        for &f in &visible {
            facets[f].alive = false;
            orphans.append(&mut facets[f].outside);
        }
        for p in orphans {
            if p == apex {
                continue;
            }
            let best = created.iter().map(|&f| (f, dot(&facets[f].n, &pts[p]) - facets[f].off)).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            if best.1 > eps {
                facets[best.0].outside.push(p);
            }
        }
        stack.extend(created.iter().copied().filter(|&f| !facets[f].outside.is_empty()));
    }

    // compact and report against the original coordinates
    let mut index = vec![usize::MAX; facets.len()];
    let mut out = Vec::new();
    for (i, f) in facets.iter().enumerate() {
        if f.alive {
            index[i] = out.len();
            let mut verts = f.verts.clone();
            verts.sort_unstable();
            let off = verts.iter().map(|&v| dot(&f.n, &points[v])).sum::<f64>() / d as f64;
            out.push(HullFacet { vertices: verts, normal: f.n.clone(), offset: off });
        }
    }
    let mut ridges = Vec::new();
    for (i, f) in facets.iter().enumerate() {
        if !f.alive {
            continue;
        }
        for slot in 0..d {
            let g = f.neigh[slot];
            if i < g {
                let mut verts: Vec<usize> = f.verts.iter().enumerate().filter(|&(j, _)| j != slot).map(|(_, &v)| v).collect();
                verts.sort_unstable();
                ridges.push(Ridge { facets: [index[i], index[g]], vertices: verts });
            }
        }
    }
    if d == 2 {
        (out, ridges) = split_edges(points, out, ridges, ON_EDGE * diam);
    }
    Ok(HullComplex { dim: d, points: points.to_vec(), facets: out, ridges })
}

/// In the plane, input points lying on a hull edge (within `tol`) become
/// vertices, so sampled segments keep their resolution.
fn split_edges(points: &[Vec<f64>], facets: Vec<HullFacet>, ridges: Vec<Ridge>, tol: f64) -> (Vec<HullFacet>, Vec<Ridge>) {
    let mut out = Vec::new();
    let mut new_ridges = Vec::new();
    // per old facet: (vertex, sub-edge) at both ends of its chain
    let mut ends: Vec<[(usize, usize); 2]> = Vec::new();
    for f in &facets {
        let (a, b) = (f.vertices[0], f.vertices[1]);
        let dir = sub(&points[b], &points[a]);
        let len = norm(&dir);
        let mut inner: Vec<(f64, usize)> = (0..points.len())
            .filter(|&i| i != a && i != b && (dot(&f.normal, &points[i]) - f.offset).abs() <= tol)
            .map(|i| (dot(&sub(&points[i], &points[a]), &dir) / len, i))
            .filter(|&(t, _)| t > tol && t < len - tol)
            .collect();
        inner.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut chain = vec![a];
        let mut last_t = 0.0;
        for (t, i) in inner {
            if t - last_t > tol {
                chain.push(i);
                last_t = t;
            }
        }
        if len - last_t <= tol && chain.len() > 1 {
            chain.pop();
        }
        chain.push(b);
        let first = out.len();
        for w in chain.windows(2) {
            let mut vertices = vec![w[0], w[1]];
            vertices.sort_unstable();
            let offset = vertices.iter().map(|&v| dot(&f.normal, &points[v])).sum::<f64>() / 2.0;
            if out.len() > first {
                new_ridges.push(Ridge { facets: [out.len() - 1, out.len()], vertices: vec![w[0]] });
            }
            out.push(HullFacet { vertices, normal: f.normal.clone(), offset });
        }
        ends.push([(a, first), (b, out.len() - 1)]);
    }
    for r in ridges {
        let v = r.vertices[0];
        let pick = |f: usize| ends[f].iter().find(|e| e.0 == v).expect("ridge vertex ends the chain").1;
        new_ridges.push(Ridge { facets: [pick(r.facets[0]), pick(r.facets[1])], vertices: vec![v] });
    }
    (out, new_ridges)
}

/// `d + 1` affinely independent input points, picked greedily by distance
/// to the affine hull of those already chosen.
fn initial_simplex(points: &[Vec<f64>], diam: f64) -> Result<Vec<usize>> {
    let d = points[0].len();
    let first = (0..points.len()).min_by(|&a, &b| points[a][0].total_cmp(&points[b][0])).unwrap();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while chosen.len() < d + 1 {
        let base = &points[first];
        let resid = |p: &[f64]| -> Vec<f64> {
            let mut v = sub(p, base);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&v, b);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            v
        };
        let (best, dist) = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, norm(&resid(p))))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if dist <= 1e-9 * diam {
            return Err(Error::Degenerate(format!("points span only {} dimensions", chosen.len() - 1)));
        }
        let v = resid(&points[best]);
        basis.push(v.iter().map(|x| x / dist).collect());
        chosen.push(best);
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square() {
        let h = convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.ridges.len(), 4);
        assert_eq!(h.vertex_ids(), vec![0, 1, 2, 3]);
        assert!(h.max_plane_error() < 1e-8);
    }

    #[test]
    fn cube_is_triangulated() {
        let pts: Vec<Vec<f64>> = (0..8).map(|i| (0..3).map(|k| ((i >> k) & 1) as f64).collect()).collect();
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.facets.len(), 12);
        assert_eq!(h.ridges.len(), 18);
        assert!(h.max_plane_error() < 1e-8);
        // every facet normal is one of the six axis directions
        for f in &h.facets {
            let big = f.normal.iter().filter(|x| x.abs() > 1.0 - 1e-8).count();
            assert_eq!(big, 1, "{:?}", f.normal);
        }
    }

    #[test]
    fn ridges_have_two_facets() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in 2..=5 {
            let pts: Vec<Vec<f64>> = (0..60).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let h = convex_hull(&pts).unwrap();
            let mut count = vec![0usize; h.facets.len()];
            for r in &h.ridges {
                assert_eq!(r.vertices.len(), d - 1);
                for &f in &r.facets {
                    count[f] += 1;
                    assert!(r.vertices.iter().all(|v| h.facets[f].vertices.contains(v)));
                }
            }
            assert!(count.iter().all(|&c| c == d), "d = {d}");
            assert!(h.max_plane_error() < 1e-8);
        }
    }

    #[test]
    fn degenerate_input_rejected() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64, 0.0]).collect();
        assert!(matches!(convex_hull(&pts), Err(Error::Degenerate(_))));
        assert!(convex_hull(&vec![vec![0.0; 7]; 10]).is_err());
    }

    #[test]
    fn collinear_boundary_samples() {
        // many points on the sides of a triangle
        let mut pts = Vec::new();
        for i in 0..20 {
            let t = i as f64 / 20.0;
            pts.push(vec![t, 0.0]);
            pts.push(vec![0.0, 1.0 - t]);
            pts.push(vec![1.0 - t, t]);
        }
        let h = convex_hull(&pts).unwrap();
        assert!(h.max_plane_error() < 1e-8);
        assert_eq!(h.facets.len(), h.vertex_ids().len());
        // every distinct sample on the boundary is a vertex
        assert_eq!(h.vertex_ids().len(), 60);
        assert_eq!(h.ridges.len(), 60);
    }
}
