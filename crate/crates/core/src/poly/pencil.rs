//! Determinant of a symmetric linear pencil `det(x_0 M_0 + ... + x_k M_k)`.

use super::matrix::Matrix;
use super::scalar::{int, Rational};
use super::{Exponent, Polynomial};
use crate::error::{Error, Result};
use num_traits::Zero;
use rand::{Rng, SeedableRng};

pub fn det_pencil(mats: &[Matrix<Rational>]) -> Result<Polynomial> {
    det_pencil_with_seed(mats, 0x5eed)
}

/// The determinant is homogeneous of degree `n` in `k+1` variables; it is
/// recovered exactly by interpolating on random integer points.
pub fn det_pencil_with_seed(mats: &[Matrix<Rational>], seed: u64) -> Result<Polynomial> {
    let first = mats.first().ok_or_else(|| Error::Empty("no pencil matrices".into()))?;
    let n = first.rows();
    for m in mats {
        if !m.is_square() || m.rows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.rows().max(m.cols()) });
        }
        if !m.is_symmetric_exact() {
            return Err(Error::InvalidInput("pencil matrix is not symmetric".into()));
        }
    }
    let k = mats.len();
    if n == 0 {
        return Ok(Polynomial::one(k));
    }
    let monos = monomials(k, n as u32);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let range = 3 + 2 * n as i64;
    for _attempt in 0..20 {
        let pts: Vec<Vec<Rational>> = (0..monos.len())
            .map(|_| (0..k).map(|_| int(rng.random_range(-range..=range))).collect())
            .collect();
        let rows: Vec<Vec<Rational>> = pts
            .iter()
            .map(|x| monos.iter().map(|e| monomial_value(e, x)).collect())
            .collect();
        let vals: Vec<Rational> = pts.iter().map(|x| eval_pencil(mats, x).determinant()).collect::<Result<_>>()?;
        let a = Matrix::from_rows(rows)?;
        if let Some(c) = a.solve(&vals) {
            return Polynomial::from_terms(k, monos.into_iter().zip(c));
        }
    }
    Err(Error::NonConvergence("interpolation system stayed singular".into()))
}

pub(crate) fn eval_pencil(mats: &[Matrix<Rational>], x: &[Rational]) -> Matrix<Rational> {
    let n = mats[0].rows();
    let mut out = Matrix::filled(n, n, Rational::zero());
    for (m, xi) in mats.iter().zip(x) {
        if xi.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let v = out.get(i, j) + m.get(i, j) * xi;
                out.set(i, j, v);
            }
        }
    }
    out
}

fn monomial_value(e: &[u32], x: &[Rational]) -> Rational {
    e.iter().zip(x).fold(int(1), |acc, (&k, xi)| acc * num_traits::pow(xi.clone(), k as usize))
}

/// All exponent vectors of total degree `d` in `k` variables.
fn monomials(k: usize, d: u32) -> Vec<Exponent> {
    if k == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for mut rest in monomials(k - 1, d - a) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}
