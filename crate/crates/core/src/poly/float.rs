use super::scalar::rat_to_f64;
use super::Polynomial;

/// Float copy of a polynomial for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<u32>)>,
    maxk: usize,
}

impl FloatPoly {
    pub fn from_polynomial(p: &Polynomial) -> Self {
        FloatPoly {
            nvars: p.nvars(),
            terms: p.terms().map(|(e, c)| (rat_to_f64(c), e.clone())).collect(),
            maxk: p.terms().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0) as usize,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        if self.maxk < 9 && self.nvars <= 8 {
            let mut pw = [[1.0f64; 9]; 8];
            for (row, &xi) in pw.iter_mut().zip(x) {
                for k in 1..=self.maxk {
                    row[k] = row[k - 1] * xi;
                }
            }
            return self
                .terms
                .iter()
                .map(|(c, e)| c * e.iter().zip(&pw).map(|(&k, row)| row[k as usize]).product::<f64>())
                .sum();
        }
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_grad_hess(x, false).1
    }

    /// Value, gradient and (if requested) Hessian, row-major `n*n`.
    pub fn value_grad_hess(&self, x: &[f64], hess: bool) -> (f64, Vec<f64>, Vec<f64>) {
        let n = self.nvars;
        let mut v = 0.0;
        let mut g = vec![0.0; n];
        let mut h = if hess { vec![0.0; n * n] } else { Vec::new() };
        // pw[i][k] = x_i^k
        let maxk = self.maxk;
        let use_table = maxk < 9;
        let pw: Vec<[f64; 9]> = if use_table {
            x.iter()
                .map(|&xi| {
                    let mut r = [1.0f64; 9];
                    for k in 1..=maxk {
                        r[k] = r[k - 1] * xi;
                    }
                    r
                })
                .collect()
        } else {
            Vec::new()
        };
        let pow = |i: usize, k: u32| -> f64 {
            if use_table {
                pw[i][k as usize]
            } else {
                x[i].powi(k as i32)
            }
        };
        for (c, e) in &self.terms {
            let mono: f64 = (0..n).map(|i| pow(i, e[i])).product();
            v += c * mono;
            for i in 0..n {
                if e[i] == 0 {
                    continue;
                }
                let di = e[i] as f64 * pow(i, e[i] - 1);
                let rest: f64 = (0..n).filter(|&j| j != i).map(|j| pow(j, e[j])).product();
                g[i] += c * di * rest;
                if !hess {
                    continue;
                }
                for j in i..n {
                    let val = if j == i {
                        if e[i] < 2 {
                            continue;
                        }
                        (e[i] * (e[i] - 1)) as f64 * pow(i, e[i] - 2) * rest
                    } else {
                        if e[j] == 0 {
                            continue;
                        }
                        let dj = e[j] as f64 * pow(j, e[j] - 1);
                        let r2: f64 =
                            (0..n).filter(|&k| k != i && k != j).map(|k| pow(k, e[k])).product();
                        di * dj * r2
                    };
                    h[i * n + j] += c * val;
                    if j != i {
                        h[j * n + i] += c * val;
                    }
                }
            }
        }
        (v, g, h)
    }

    /// `t -> p(x + t d)` coefficients.
    pub fn restrict_line(&self, x: &[f64], d: &[f64]) -> super::FloatUniPoly {
        let mut out = Vec::new();
        self.restrict_line_into(x, d, &mut out);
        super::FloatUniPoly::new(out)
    }

    /// Allocation-light form of [`FloatPoly::restrict_line`]; `out` receives
    /// the coefficients in ascending order (not trimmed).
    pub fn restrict_line_into(&self, x: &[f64], d: &[f64], out: &mut Vec<f64>) {
        let n = self.nvars;
        let deg = self.terms.iter().map(|(_, e)| e.iter().sum::<u32>()).max().unwrap_or(0) as usize;
        out.clear();
        out.resize(deg + 1, 0.0);
        let mut term = vec![0.0; deg + 1];
        let mut tmp = vec![0.0; deg + 1];
        for (c, e) in &self.terms {
            term[0] = *c;
            let mut len = 1;
            for i in 0..n {
                for _ in 0..e[i] {
                    // multiply by (x_i + t d_i)
                    tmp[..=len].iter_mut().for_each(|v| *v = 0.0);
                    for k in 0..len {
                        tmp[k] += term[k] * x[i];
                        tmp[k + 1] += term[k] * d[i];
                    }
                    len += 1;
                    term[..len].copy_from_slice(&tmp[..len]);
                }
            }
            for k in 0..len {
                out[k] += term[k];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratvec;

    #[test]
    fn agrees_with_exact_derivatives() {
        let p: Polynomial = "x0*x1^2 + x0*x2^2 + x0*x3^2 - 2*x1*x2*x3 - x0^3 + 3/2*x3^5".parse().unwrap();
        let f = p.to_float();
        let xr = ratvec(&[1, -2, 3, 1]);
        let x = [1.0, -2.0, 3.0, 1.0];
        let (v, g, h) = f.value_grad_hess(&x, true);
        assert!((v - rat_to_f64(&p.eval(&xr).unwrap())).abs() < 1e-9);
        let ge = p.eval_gradient(&xr).unwrap();
        let he = p.hessian(&xr).unwrap();
        for i in 0..4 {
            assert!((g[i] - rat_to_f64(&ge[i])).abs() < 1e-9);
            for j in 0..4 {
                assert!((h[i * 4 + j] - rat_to_f64(he.get(i, j))).abs() < 1e-9);
            }
        }
        let q = f.restrict_line(&x, &[0.5, 1.0, 0.0, -1.0]);
        assert!((q.eval(2.0) - f.value(&[2.0, 0.0, 3.0, -1.0])).abs() < 1e-9);
    }
}
