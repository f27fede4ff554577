use super::scalar::{rat_to_f64, Rational};
use crate::error::{Error, Result};
use num_traits::Zero;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Matrix { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if let Some(bad) = rows.iter().find(|x| x.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: bad.len() });
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl<T: Clone + PartialEq> Matrix<T> {
    pub fn is_symmetric_exact(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl Matrix<Rational> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::filled(n, n, Rational::zero());
        for i in 0..n {
            m.set(i, i, Rational::from_integer(1.into()));
        }
        m
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank_exact(&self) -> Result<usize> {
        if self.data.is_empty() {
            return Err(Error::Empty("matrix has no entries".into()));
        }
        let mut a = self.to_rows();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, piv);
            let p = a[rank][col].clone();
            for r in rank + 1..self.rows {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &p;
                for c in col..self.cols {
                    let t = &f * &a[rank][c];
                    a[r][c] -= t;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        Ok(rank)
    }

    /// Exact determinant by elimination.
    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = Rational::from_integer(1.into());
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Rational::zero());
            };
            if piv != col {
                a.swap(col, piv);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &p;
                for c in col..n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        Ok(det)
    }

    /// Solve `A x = b` exactly; `None` if singular.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return None;
        }
        let mut a: Vec<Vec<Rational>> = self
            .to_rows()
            .into_iter()
            .zip(b)
            .map(|(mut r, bi)| {
                r.push(bi.clone());
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            for c in col..=n {
                a[col][c] = &a[col][c] / &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in col..=n {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
            }
        }
        Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(rat_to_f64)
    }
}

impl Matrix<f64> {
    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Symmetric within `1e-12` relative to the largest entry.
    pub fn is_symmetric_approx(&self) -> bool {
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= 1e-12 * scale))
    }

    /// Singular values above `tol * sigma_max`.
    pub fn numeric_rank(&self, tol: f64) -> Result<usize> {
        if self.data.is_empty() {
            return Err(Error::Empty("matrix has no entries".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidInput(format!("rank tolerance must be positive, got {tol}")));
        }
        let sv = self.to_nalgebra().singular_values();
        let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
        if smax == 0.0 {
            return Ok(0);
        }
        Ok(sv.iter().filter(|&&s| s > tol * smax).count())
    }
}

pub const DEFAULT_RANK_TOL: f64 = 1e-8;
