//! Wolfe's min-norm-point algorithm: the point of `conv(points)` nearest to `x`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Returns the nearest point and its convex weights (sparse: index, weight).
pub fn nearest_point(points: &[Vec<f64>], x: &[f64], gap_tol: f64) -> Result<(Vec<f64>, Vec<(usize, f64)>)> {
    if points.is_empty() {
        return Err(Error::Empty("point cloud has no points".into()));
    }
    let n = x.len();
    let q: Vec<Vec<f64>> = points.iter().map(|p| p.iter().zip(x).map(|(a, b)| a - b).collect()).collect();
    let scale = q.iter().map(|v| dot(v, v)).fold(0.0f64, f64::max).max(1e-300);

    let first = (0..q.len())
        .min_by(|&a, &b| dot(&q[a], &q[a]).total_cmp(&dot(&q[b], &q[b])))
        .unwrap();
    let mut set = vec![first];
    let mut lam = vec![1.0];
    let mut w = q[first].clone();

    let combo = |set: &[usize], lam: &[f64]| -> Vec<f64> {
        let mut w = vec![0.0; n];
        for (&i, &l) in set.iter().zip(lam) {
            for k in 0..n {
                w[k] += l * q[i][k];
            }
        }
        w
    };

    for _major in 0..(50 * q.len() + 100) {
        let ww = dot(&w, &w);
        let j = (0..q.len()).min_by(|&a, &b| dot(&w, &q[a]).total_cmp(&dot(&w, &q[b]))).unwrap();
        if ww - dot(&w, &q[j]) <= gap_tol * scale || set.contains(&j) {
            let p: Vec<f64> = w.iter().zip(x).map(|(a, b)| a + b).collect();
            return Ok((p, set.into_iter().zip(lam).collect()));
        }
        set.push(j);
        lam.push(0.0);
        loop {
            let alpha = match affine_min_norm(&q, &set) {
                Some(a) => a,
                None => {
                    // affinely dependent corral: drop the newcomer and stop
                    set.pop();
                    lam.pop();
                    let p: Vec<f64> = w.iter().zip(x).map(|(a, b)| a + b).collect();
                    return Ok((p, set.into_iter().zip(lam).collect()));
                }
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lam.iter().zip(&alpha) {
                if *a <= 1e-14 {
                    let t = l / (l - a);
                    if t < theta {
                        theta = t;
                    }
                }
            }
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut k = 0;
            while k < set.len() {
                if lam[k] <= 1e-14 {
                    set.remove(k);
                    lam.remove(k);
                } else {
                    k += 1;
                }
            }
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= s);
            if set.len() == 1 {
                lam = vec![1.0];
                break;
            }
        }
        w = combo(&set, &lam);
    }
    Err(Error::NonConvergence("min-norm point iteration limit".into()))
}

/// Affine combination of `q[set]` of minimal norm.
fn affine_min_norm(q: &[Vec<f64>], set: &[usize]) -> Option<Vec<f64>> {
    let k = set.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    for (r, &i) in set.iter().enumerate() {
        for (c, &j) in set.iter().enumerate() {
            a[(r, c)] = dot(&q[i], &q[j]);
        }
        a[(r, k)] = 1.0;
        a[(k, r)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k + 1);
    b[k] = 1.0;
    let sol = a.lu().solve(&b)?;
    let alpha: Vec<f64> = sol.iter().take(k).copied().collect();
    if alpha.iter().all(|v| v.is_finite()) {
        Some(alpha)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_projection() {
        let pts = vec![vec![-1.0, 0.0], vec![1.0, 0.0]];
        let (p, _) = nearest_point(&pts, &[0.0, 1.0], 1e-12).unwrap();
        assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
        let (p, w) = nearest_point(&pts, &[3.0, 1.0], 1e-12).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert_eq!(w, vec![(1, 1.0)]);
    }

    #[test]
    fn cube_faces_and_interior() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push((0..3).map(|k| if i >> k & 1 == 1 { 1.0 } else { -1.0 }).collect::<Vec<f64>>());
        }
        let (p, _) = nearest_point(&pts, &[0.3, 2.5, -0.2], 1e-12).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-9 && (p[1] - 1.0).abs() < 1e-9 && (p[2] + 0.2).abs() < 1e-9, "{p:?}");
        let (p, _) = nearest_point(&pts, &[0.1, 0.2, 0.3], 1e-12).unwrap();
        assert!((p[0] - 0.1).abs() < 1e-9 && (p[2] - 0.3).abs() < 1e-9);
    }
}
