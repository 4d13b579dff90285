//! Scalar root bracketing and a damped Newton iteration with a
//! finite-difference Jacobian for small systems.

use nalgebra::{DMatrix, DVector};
use roots::{find_root_brent, SimpleConvergency};

use crate::error::{Error, Result};

/// Root of `g` on a sign-changing bracket `[a, b]`.
pub fn brent<F: FnMut(f64) -> f64>(a: f64, b: f64, g: F, tol: f64) -> Result<f64> {
    let mut conv = SimpleConvergency {
        eps: tol,
        max_iter: 200,
    };
    find_root_brent(a, b, g, &mut conv)
        .map_err(|e| Error::Numerical(format!("root search on [{a}, {b}] failed: {e:?}")))
}

#[derive(Debug, Clone)]
pub struct NewtonOptions {
    /// Stop once `‖F‖∞` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Finite-difference step for column `j` of the Jacobian.
    pub fd_steps: Vec<f64>,
    /// Smallest damping factor tried by the backtracking line search.
    pub min_damping: f64,
    /// A stalled line search is accepted if `‖F‖∞` is already below this
    /// (rounding floor of the residual).
    pub stall_tol: f64,
}

#[derive(Debug, Clone)]
pub struct NewtonReport {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian<F>(f: &F, x: &[f64], steps: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = f(x)?.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = steps[j];
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j] - h;
        let fm = f(&xp)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Damped Newton. Trial points where `f` errors (typically because they left
/// the admissible region) are treated like a failed line-search step.
pub fn newton<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    let mut res = inf_norm(&fx);
    for it in 0..opts.max_iter {
        if res < opts.tol {
            return Ok(NewtonReport {
                x,
                residual: res,
                iterations: it,
            });
        }
        let jac = fd_jacobian(&f, &x, &opts.fd_steps)?;
        let rhs = DVector::from_iterator(fx.len(), fx.iter().map(|v| -v));
        let dx = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Numerical("singular Jacobian in Newton iteration".into()))?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Ok(ft) = f(&trial) {
                let rt = inf_norm(&ft);
                if rt.is_finite() && (rt < res || rt < opts.tol) {
                    x = trial;
                    fx = ft;
                    res = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < opts.min_damping {
                if res < opts.stall_tol {
                    return Ok(NewtonReport {
                        x,
                        residual: res,
                        iterations: it,
                    });
                }
                return Err(Error::Numerical(format!(
                    "Newton stalled at residual {res:.3e} after {it} iterations"
                )));
            }
        }
    }
    if res < opts.tol {
        Ok(NewtonReport {
            x,
            residual: res,
            iterations: opts.max_iter,
        })
    } else {
        Err(Error::Numerical(format!(
            "Newton did not converge: residual {res:.3e} after {} iterations",
            opts.max_iter
        )))
    }
}
