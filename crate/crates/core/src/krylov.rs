//! Restarted GMRES with right preconditioning on real vectors.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct GmresOptions {
    /// Relative residual target `‖b − Ax‖ ≤ tol ‖b‖`.
    pub tol: f64,
    /// Total inner iteration cap across restarts.
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 500, restart: 60 }
    }
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual, recomputed from the true operator.
    pub relative_residual: f64,
    pub converged: bool,
}

impl GmresOutcome {
    /// Turns a missed tolerance into [`Error::KrylovStall`].
    pub fn require(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::KrylovStall { iterations: self.iterations, relative: self.relative_residual })
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` with `A M⁻¹ y = b`, `x = M⁻¹ y`, starting from zero.
///
/// Operator and preconditioner may fail (for example on a singular mode); the
/// error is propagated unchanged. Missing the tolerance is reported through
/// [`GmresOutcome::converged`].
pub fn gmres<A, M>(mut apply_a: A, mut apply_m: M, b: &[f64], opts: &GmresOptions) -> Result<GmresOutcome>
where
    A: FnMut(&[f64]) -> Result<Vec<f64>>,
    M: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x, iterations: 0, relative_residual: 0.0, converged: true });
    }
    let m = opts.restart.max(1);
    let mut iterations = 0;
    let mut r = b.to_vec();
    let mut rel = 1.0;

    while iterations < opts.max_iter {
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= opts.tol {
            break;
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|x| x / beta).collect()];
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k = 0;
        while k < m && iterations < opts.max_iter {
            let zk = apply_m(&v[k])?;
            let mut w = apply_a(&zk)?;
            z.push(zk);
            // modified Gram-Schmidt, twice for stability
            for _ in 0..2 {
                for (j, vj) in v.iter().enumerate() {
                    let hj = dot(&w, vj);
                    h[j][k] += hj;
                    w.iter_mut().zip(vj).for_each(|(a, b)| *a -= hj * b);
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            iterations += 1;
            k += 1;
            let est = g[k].abs() / bnorm;
            if est <= opts.tol || hn <= 1e-300 {
                break;
            }
            v.push(w.iter().map(|x| x / hn).collect());
        }
        // back substitution on the k×k triangle; numerically singular pivots
        // (the operator is singular on the Krylov space) are dropped
        let hmax = (0..k).map(|i| h[i][i].abs()).fold(0.0, f64::max);
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= h[i][j] * y[j];
            }
            y[i] = if h[i][i].abs() <= 1e-14 * hmax { 0.0 } else { s / h[i][i] };
        }
        let mut trial = x.clone();
        for (j, yj) in y.iter().enumerate() {
            trial.iter_mut().zip(&z[j]).for_each(|(a, b)| *a += yj * b);
        }
        let ax = apply_a(&trial)?;
        let trial_r: Vec<f64> = b.iter().zip(&ax).map(|(a, b)| a - b).collect();
        let new_rel = norm(&trial_r) / bnorm;
        if new_rel >= rel * (1.0 - 1e-3) {
            // no progress over a full cycle
            break;
        }
        x = trial;
        r = trial_r;
        rel = new_rel;
        if rel <= opts.tol {
            break;
        }
    }
    Ok(GmresOutcome { x, iterations, relative_residual: rel, converged: rel <= opts.tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut v = 4.0 * x[i] + 0.3 * i as f64 * x[i] / n as f64;
                if i > 0 {
                    v -= x[i - 1];
                }
                if i + 1 < n {
                    v -= 2.0 * x[i + 1];
                }
                v
            })
            .collect()
    }

    #[test]
    fn solves_nonsymmetric_system() {
        let n = 200;
        let b: Vec<f64> = (0..n).map(|i| ((i * 31) % 7) as f64 - 3.0).collect();
        let opts = GmresOptions { tol: 1e-12, max_iter: 400, restart: 20 };
        let out = gmres(|x| Ok(tridiag(x)), |x| Ok(x.to_vec()), &b, &opts).unwrap();
        let r: Vec<f64> = tridiag(&out.x).iter().zip(&b).map(|(a, c)| a - c).collect();
        assert!(norm(&r) <= 1e-12 * norm(&b));
        assert!(out.relative_residual <= 1e-12);
    }

    #[test]
    fn exact_preconditioner_converges_in_one_step() {
        let b = vec![1.0, -2.0, 3.0];
        let a = |x: &[f64]| Ok(x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v).collect());
        let m = |x: &[f64]| Ok(x.iter().enumerate().map(|(i, v)| v / (i as f64 + 1.0)).collect());
        let out = gmres(a, m, &b, &GmresOptions::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.x[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reports_stall() {
        // singular operator with b outside its range
        let b = vec![1.0, 1.0];
        let a = |x: &[f64]| Ok(vec![x[0], 0.0]);
        let r = gmres(a, |x| Ok(x.to_vec()), &b, &GmresOptions { tol: 1e-12, max_iter: 10, restart: 5 }).unwrap();
        assert!(!r.converged);
        assert!((r.relative_residual - 0.5f64.sqrt()).abs() < 1e-12, "{r:?}");
        assert!(matches!(r.require(), Err(Error::KrylovStall { .. })));
    }
}
