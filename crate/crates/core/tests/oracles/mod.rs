//! Slow, independent reference implementations for the equivalence checks.

use num_traits::{One, Signed, Zero};
use patchscope::poly::{Matrix, Rational, UniPoly};
use patchscope::Polynomial;
use std::collections::BTreeSet;

/// Facets of the hull of points in general position: every `d`-subset whose
/// hyperplane leaves all other points strictly on one side.
pub fn brute_force_facets(pts: &[Vec<f64>]) -> BTreeSet<Vec<usize>> {
    let d = pts[0].len();
    let n = pts.len();
    let mut out = BTreeSet::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        if let Some((normal, off)) = hyperplane(&idx.iter().map(|&i| pts[i].as_slice()).collect::<Vec<_>>()) {
            let (mut pos, mut neg) = (false, false);
            for (j, p) in pts.iter().enumerate() {
                if idx.contains(&j) {
                    continue;
                }
                let s: f64 = normal.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() - off;
                pos |= s > 0.0;
                neg |= s < 0.0;
            }
            if !(pos && neg) {
                out.insert(idx.clone());
            }
        }
        // next combination
        let mut k = d;
        while k > 0 && idx[k - 1] == n - d + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        idx[k - 1] += 1;
        for m in k..d {
            idx[m] = idx[m - 1] + 1;
        }
    }
    out
}

// normal by generalised cross product (cofactors of the difference matrix)
fn hyperplane(p: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let d = p[0].len();
    let rows: Vec<Vec<f64>> = p[1..].iter().map(|q| q.iter().zip(p[0]).map(|(a, b)| a - b).collect()).collect();
    let normal: Vec<f64> = (0..d)
        .map(|k| {
            let minor: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| *x).collect()).collect();
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            s * det_f64(&minor)
        })
        .collect();
    let len = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len < 1e-12 {
        return None;
    }
    let off = normal.iter().zip(p[0]).map(|(a, b)| a * b).sum();
    Some((normal, off))
}

fn det_f64(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect()).collect();
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                s * m[0][j] * det_f64(&minor)
            })
            .sum(),
    }
}

fn sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

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

// roots of the square-free `c` in (0, 1) by Descartes-rule bisection
fn unit_interval_roots(c: &[Rational], depth: u32) -> usize {
    assert!(depth < 400, "bisection did not separate roots");
    let rev: Vec<Rational> = taylor_shift_one(&c.iter().rev().cloned().collect::<Vec<_>>());
    match variations(&rev) {
        0 => return 0,
        1 => return 1,
        _ => {}
    }
    let n = c.len() - 1;
    let two = Rational::from_integer(2.into());
    let left: Vec<Rational> = c.iter().enumerate().map(|(k, a)| a * num_traits::pow(two.clone(), n - k)).collect();
    let right = taylor_shift_one(&left);
    let mid = usize::from(right[0].is_zero());
    unit_interval_roots(&left, depth + 1) + unit_interval_roots(&right, depth + 1) + mid
}

/// Distinct real roots, by bisection on the Cauchy interval.
pub fn bisection_root_count(p: &UniPoly) -> usize {
    let q = p.square_free_part().unwrap();
    let n = q.degree().unwrap();
    if n == 0 {
        return 0;
    }
    let lc = q.leading();
    let bound = Rational::one() + q.coeffs()[..n].iter().map(|a| (a / &lc).abs()).fold(Rational::zero(), |m, x| m.max(x));
    // (0, 1) -> (-B, B)
    let lin = UniPoly::new(vec![-bound.clone(), &bound * Rational::from_integer(2.into())]);
    let mut acc = UniPoly::new(vec![]);
    for c in q.coeffs().iter().rev() {
        acc = &(&acc * &lin) + &UniPoly::new(vec![c.clone()]);
    }
    let mut c = acc.coeffs().to_vec();
    c.resize(n + 1, Rational::zero());
    unit_interval_roots(&c, 0)
}

/// `det(sum x_i M_i)` by cofactor expansion over the polynomial ring.
pub fn cofactor_pencil(mats: &[Matrix<Rational>]) -> Polynomial {
    let n = mats[0].rows();
    let m: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Polynomial::linear(&mats.iter().map(|m| m.get(i, j).clone()).collect::<Vec<_>>(), Rational::zero()))
                .collect()
        })
        .collect();
    cofactor(&m)
}

fn cofactor(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero(m[0][0].nvars());
    for j in 0..n {
        let minor: Vec<Vec<Polynomial>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
        let t = &m[0][j] * &cofactor(&minor);
        acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}
