//! Log-barrier Newton method over a list of smooth constraints `g_i <= 0`.
//!
//! Steps are capped at the first zero of every constraint along the search
//! direction, so iterates never leave the connected component they start in.

use super::constraint::Compiled;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Solver schedule and stopping rules.
#[derive(Clone, Debug)]
pub struct BarrierOptions {
    pub mu_start: f64,
    pub mu_final: f64,
    pub mu_factor: f64,
    pub max_newton: usize,
    /// Iterates beyond this norm signal an unbounded problem.
    pub blowup: f64,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions { mu_start: 1.0, mu_final: 1e-13, mu_factor: 0.01, max_newton: 80, blowup: 1e7 }
    }
}

/// Objective handed to the solver: value, gradient and dense Hessian.
pub(crate) trait Objective {
    fn eval(&self, y: &[f64]) -> (f64, Vec<f64>, Vec<f64>);
}

/// `1/2 |y - x|^2`
pub(crate) struct DistSq<'a>(pub &'a [f64]);

impl Objective for DistSq<'_> {
    fn eval(&self, y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = y.len();
        let g: Vec<f64> = y.iter().zip(self.0).map(|(a, b)| a - b).collect();
        let v = 0.5 * g.iter().map(|a| a * a).sum::<f64>();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
        (v, g, h)
    }
}

/// `-<l, y>`
pub(crate) struct NegLinear<'a>(pub &'a [f64]);

impl Objective for NegLinear<'_> {
    fn eval(&self, y: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let n = y.len();
        let v = -y.iter().zip(self.0).map(|(a, b)| a * b).sum::<f64>();
        (v, self.0.iter().map(|a| -a).collect(), vec![0.0; n * n])
    }
}

/// Barrier `-sum log(-g_i)` with derivatives; `None` outside the open region.
fn barrier(cons: &[Compiled], y: &[f64], hess: bool) -> Option<(f64, Vec<f64>, Vec<f64>)> {
    let n = y.len();
    let mut v = 0.0;
    let mut g = vec![0.0; n];
    let mut h = if hess { vec![0.0; n * n] } else { Vec::new() };
    for c in cons {
        let (gi, dgi, hgi) = c.eval(y, hess);
        if !(gi < 0.0) {
            return None;
        }
        let s = -gi;
        v -= s.ln();
        for k in 0..n {
            g[k] += dgi[k] / s;
        }
        if hess {
            for a in 0..n {
                for b in 0..n {
                    h[a * n + b] += dgi[a] * dgi[b] / (s * s) + hgi[a * n + b] / s;
                }
            }
        }
    }
    Some((v, g, h))
}

fn barrier_value(cons: &[Compiled], y: &[f64]) -> Option<f64> {
    let mut v = 0.0;
    for c in cons {
        let gi = c.value(y);
        if !(gi < 0.0) {
            return None;
        }
        v -= (-gi).ln();
    }
    cons.iter().all(|c| c.admits(y)).then_some(v)
}

/// Largest `t` such that the open segment `y + [0, t) d` stays feasible.
pub(crate) fn max_step(cons: &[Compiled], y: &[f64], d: &[f64]) -> f64 {
    max_step_within(cons, y, d, f64::INFINITY)
}

/// As [`max_step`], but only roots up to `hi` are looked for.
fn max_step_within(cons: &[Compiled], y: &[f64], d: &[f64], hi: f64) -> f64 {
    cons.iter().filter_map(|c| c.first_root_within(y, d, hi)).fold(f64::INFINITY, f64::min)
}

fn newton_cap(cons: &[Compiled], y: &[f64], d: &[f64], hi: f64) -> f64 {
    cons.iter().filter_map(|c| c.step_cap(y, d, hi)).fold(f64::INFINITY, f64::min)
}

pub(crate) fn strictly_feasible(cons: &[Compiled], y: &[f64]) -> bool {
    cons.iter().all(|c| c.value(y) < 0.0 && c.admits(y))
}

/// Regularised Newton direction for a symmetric matrix that may be indefinite.
fn newton_direction(h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let hm = DMatrix::from_row_slice(n, n, h);
    let gv = DVector::from_column_slice(g);
    let scale = hm.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut tau = 0.0;
    for _ in 0..60 {
        let mut a = hm.clone();
        for i in 0..n {
            a[(i, i)] += tau;
        }
        if let Some(ch) = a.cholesky() {
            let d = ch.solve(&gv);
            if d.iter().all(|x| x.is_finite()) {
                return d.iter().map(|x| -x).collect();
            }
        }
        tau = if tau == 0.0 { 1e-10 * scale } else { tau * 10.0 };
    }
    g.iter().map(|x| -x).collect()
}

/// Follow the central path of `obj + mu * barrier` from a strictly feasible start.
pub(crate) fn solve(obj: &dyn Objective, cons: &[Compiled], start: &[f64], opts: &BarrierOptions) -> Result<(Vec<f64>, f64)> {
    if !strictly_feasible(cons, start) {
        return Err(Error::InvalidInput("barrier start is not strictly feasible".into()));
    }
    let mut y = start.to_vec();
    let n = y.len();
    let mut mu = opts.mu_start;
    let mut prev: Option<(Vec<f64>, f64)> = None;
    loop {
        let last = mu <= opts.mu_final * 1.000001;
        for _ in 0..opts.max_newton {
            let (fo, go, ho) = obj.eval(&y);
            let (fb, gb, hb) = barrier(cons, &y, true).expect("iterate left the feasible region");
            let f = fo + mu * fb;
            let g: Vec<f64> = go.iter().zip(&gb).map(|(a, b)| a + mu * b).collect();
            let h: Vec<f64> = ho.iter().zip(&hb).map(|(a, b)| a + mu * b).collect();
            let d = newton_direction(&h, &g);
            let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let dnorm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            let ynorm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
            // -slope is the squared Newton decrement; intermediate stages only
            // need to stay near the central path
            let tol = if last { 1e-24 } else { 1e-3 * mu };
            if dnorm <= 1e-15 * (1.0 + ynorm) || -slope <= tol {
                break;
            }
            let cap = newton_cap(cons, &y, &d, 1.0 / 0.99);
            let mut alpha = if cap.is_finite() { (0.99 * cap).min(1.0) } else { 1.0 };
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
                if let Some(bt) = barrier_value(cons, &trial) {
                    let ft = obj.eval(&trial).0 + mu * bt;
                    if ft <= f + 1e-4 * alpha * slope {
                        y = trial;
                        // progress below rounding level: nothing more to gain
                        accepted = f - ft > 1e-15 * f.abs().max(mu);
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
            if y.iter().map(|x| x * x).sum::<f64>().sqrt() > opts.blowup {
                return Err(Error::Unbounded("barrier iterates diverged".into()));
            }
        }
        if last {
            break;
        }
        let next = (mu * opts.mu_factor).max(opts.mu_final);
        // the central path is close to affine in mu: extrapolate from the
        // last two centres
        let here = (y.clone(), mu);
        if let Some((yp, mp)) = prev.take() {
            let r = (next - mu) / (mu - mp);
            let step: Vec<f64> = y.iter().zip(&yp).map(|(a, b)| r * (a - b)).collect();
            if newton_cap(cons, &y, &step, 2.0) > 1.0 {
                let trial: Vec<f64> = y.iter().zip(&step).map(|(a, b)| a + b).collect();
                if strictly_feasible(cons, &trial) {
                    y = trial;
                }
            }
        }
        prev = Some(here);
        mu = next;
    }
    if y.iter().any(|v| !v.is_finite()) || y.len() != n {
        return Err(Error::NonConvergence("barrier iterate is not finite".into()));
    }
    Ok((y, mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::constraint::Constraint;

    fn disk() -> Vec<Compiled> {
        vec![Constraint::Poly("x0^2 + x1^2 - 1".parse().unwrap()).compile()]
    }

    #[test]
    fn projects_onto_disk() {
        let (y, _) = solve(&DistSq(&[3.0, 4.0]), &disk(), &[0.0, 0.0], &BarrierOptions::default()).unwrap();
        assert!((y[0] - 0.6).abs() < 1e-10 && (y[1] - 0.8).abs() < 1e-10, "{y:?}");
    }

    #[test]
    fn maximises_over_disk() {
        let (y, _) = solve(&NegLinear(&[0.0, 2.0]), &disk(), &[0.0, 0.5], &BarrierOptions::default()).unwrap();
        assert!(y[0].abs() < 1e-6 && (y[1] - 1.0).abs() < 1e-10, "{y:?}");
    }

    #[test]
    fn infeasible_start_rejected() {
        assert!(solve(&DistSq(&[3.0, 4.0]), &disk(), &[2.0, 0.0], &BarrierOptions::default()).is_err());
    }

    #[test]
    fn unbounded_detected() {
        let half: Vec<Compiled> = vec![Constraint::Poly("x0".parse().unwrap()).compile()];
        let r = solve(&NegLinear(&[-1.0]), &half, &[-1.0], &BarrierOptions::default());
        assert!(matches!(r, Err(Error::Unbounded(_))));
    }
}
