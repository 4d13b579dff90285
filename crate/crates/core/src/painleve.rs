//! Airy function, the Hastings–McLeod solution of Painlevé II
//! `q'' = s q + 2q³`, and the trailing-edge expansion built from it.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodograph::EdgeLayerData;

/// `Ai(0)`.
const AI0: f64 = 0.355_028_053_887_817_2;
/// `-Ai'(0)`.
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Below this the Maclaurin series is used on the positive axis.
const MACLAURIN_RIGHT: f64 = 6.0;
/// Above this (in `-s`) the Maclaurin series is used on the negative axis.
const MACLAURIN_LEFT: f64 = 8.0;

fn airy_maclaurin(z: f64) -> f64 {
    let z3 = z * z * z;
    let (mut f, mut tf) = (1.0, 1.0);
    let (mut g, mut tg) = (z, z);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 * f.abs().max(1.0) && tg.abs() < 1e-18 * g.abs().max(1.0) {
            break;
        }
    }
    AI0 * f - AIP0 * g
}

/// Coefficients `u_k` of the large-argument expansions, up to the point
/// where the series for `ζ` starts to diverge.
fn asymptotic_terms(zeta: f64) -> Vec<f64> {
    let mut out = vec![1.0];
    let mut u = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let term = u / zeta.powi(k);
        if term >= prev || term < 1e-17 {
            break;
        }
        prev = term;
        out.push(u);
    }
    out
}

/// Airy function `Ai(s)` on the real line, to about `1e-10` absolute.
pub fn airy(s: f64) -> f64 {
    if (-MACLAURIN_LEFT..=MACLAURIN_RIGHT).contains(&s) {
        return airy_maclaurin(s);
    }
    let x = s.abs();
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = asymptotic_terms(zeta);
    if s > 0.0 {
        let sum: f64 = u
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { 1.0 } else { -1.0 } * c / zeta.powi(k as i32))
            .sum();
        (-zeta).exp() / (2.0 * PI.sqrt() * x.powf(0.25)) * sum
    } else {
        let (mut even, mut odd) = (0.0, 0.0);
        for (k, c) in u.iter().enumerate() {
            let term = c / zeta.powi(k as i32);
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                even += sign * term;
            } else {
                odd += sign * term;
            }
        }
        let ph = zeta + FRAC_PI_4;
        (ph.sin() * even - ph.cos() * odd) / (PI.sqrt() * x.powf(0.25))
    }
}

/// `sqrt(-s/2)(1 + 1/(8s³) - 73/(128s⁶) + 10657/(1024s⁹))`, the behaviour of
/// the Hastings–McLeod solution as `s → -∞`.
pub fn hm_left_asymptotic(s: f64) -> f64 {
    let r = 1.0 / (s * s * s);
    (-s / 2.0).sqrt() * (1.0 + r / 8.0 - 73.0 / 128.0 * r * r + 10657.0 / 1024.0 * r * r * r)
}

/// Finite-difference weights for the `order`-th derivative at `x0` on the
/// nodes `xs` (Fornberg's recursion).
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    a: Vec<f64>,
}

impl Banded {
    fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            a: vec![0.0; n * (kl + ku + 1)],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.a[k] += v;
    }

    /// Gaussian elimination without pivoting; overwrites `b` with the solution.
    fn solve(mut self, b: &mut [f64]) -> Result<()> {
        let n = self.n;
        for k in 0..n {
            let piv = self.a[self.idx(k, k)];
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::Numerical("zero pivot in banded solve".into()));
            }
            for i in k + 1..(k + self.kl + 1).min(n) {
                let l = self.a[self.idx(i, k)] / piv;
                if l == 0.0 {
                    continue;
                }
                for j in k..(k + self.ku + 1).min(n) {
                    let v = self.a[self.idx(k, j)];
                    let t = self.idx(i, j);
                    self.a[t] -= l * v;
                }
                b[i] -= l * b[k];
            }
        }
        for k in (0..n).rev() {
            let hi = (k + self.ku + 1).min(n);
            let s: f64 = (k + 1..hi).map(|j| self.a[self.idx(k, j)] * b[j]).sum();
            b[k] = (b[k] - s) / self.a[self.idx(k, k)];
        }
        Ok(())
    }
}

/// Sparse rows `(first column, weights)` of a 6th-order derivative operator
/// on a uniform grid of `n` nodes with spacing `h`.
fn fd_rows(n: usize, h: f64, order: usize) -> Vec<(usize, Vec<f64>)> {
    // one-sided stencils need an extra node for the second derivative
    let edge_width = if order == 1 { 7 } else { 8 };
    (0..n)
        .map(|i| {
            let (start, len) = if i < 3 {
                (0, edge_width)
            } else if i + 3 >= n {
                (n - edge_width, edge_width)
            } else {
                (i - 3, 7)
            };
            let xs: Vec<f64> = (start..start + len).map(|j| (j as f64 - i as f64) * h).collect();
            (start, fd_weights(0.0, &xs, order))
        })
        .collect()
}

/// Hastings–McLeod solution on `[-L, L]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HastingsMcLeod {
    pub l: f64,
    pub s: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    /// Final `‖q'' - sq - 2q³‖∞` of the discrete system.
    pub residual: f64,
}

const HM_START_L: f64 = 6.0;
const HM_TOL: f64 = 1e-10;

fn initial_guess(s: f64) -> f64 {
    ((-s).max(0.0) / 2.0 + airy(s).powi(2)).sqrt()
}

fn solve_bvp(l: f64, n: usize, guess: &dyn Fn(f64) -> f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let h = 2.0 * l / (n - 1) as f64;
    let s: Vec<f64> = (0..n).map(|i| -l + i as f64 * h).collect();
    let mut q: Vec<f64> = s.iter().map(|&x| guess(x)).collect();
    q[0] = hm_left_asymptotic(-l);
    q[n - 1] = airy(l);
    let rows = fd_rows(n, h, 2);
    let m = n - 2;
    let residual = |q: &[f64]| -> Vec<f64> {
        (1..n - 1)
            .map(|i| {
                let (start, w) = &rows[i];
                let d2: f64 = w.iter().enumerate().map(|(k, c)| c * q[start + k]).sum();
                d2 - s[i] * q[i] - 2.0 * q[i].powi(3)
            })
            .collect()
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut r = residual(&q);
    let mut res = norm(&r);
    for _ in 0..50 {
        if res < HM_TOL {
            return Ok((s, q, res));
        }
        let mut jac = Banded::zeros(m, 6, 6);
        for i in 1..n - 1 {
            let (start, w) = &rows[i];
            for (k, c) in w.iter().enumerate() {
                let j = start + k;
                if j >= 1 && j <= n - 2 {
                    jac.add(i - 1, j - 1, *c);
                }
            }
            jac.add(i - 1, i - 1, -(s[i] + 6.0 * q[i] * q[i]));
        }
        let mut dx: Vec<f64> = r.iter().map(|v| -v).collect();
        jac.solve(&mut dx)?;
        let mut lam = 1.0;
        loop {
            let mut trial = q.clone();
            for i in 1..n - 1 {
                trial[i] += lam * dx[i - 1];
            }
            let rt = residual(&trial);
            let nt = norm(&rt);
            if nt < res {
                q = trial;
                r = rt;
                res = nt;
                break;
            }
            lam *= 0.5;
            if lam < 1e-6 {
                if res < 10.0 * HM_TOL {
                    return Ok((s, q, res));
                }
                return Err(Error::RefineMesh(format!(
                    "Painlevé II Newton stalled at residual {res:.3e} (L={l}, n={n})"
                )));
            }
        }
    }
    if res < HM_TOL {
        Ok((s, q, res))
    } else {
        Err(Error::RefineMesh(format!(
            "Painlevé II Newton did not converge: residual {res:.3e} (L={l}, n={n})"
        )))
    }
}

impl HastingsMcLeod {
    /// Solve on `[-L, L]` with `n` nodes, continuing in `L` from 6.
    pub fn new(l: f64, n: usize) -> Result<Self> {
        if !(l >= 8.0) {
            return Err(Error::Parameter(format!("Hastings-McLeod interval needs L >= 8, got {l}")));
        }
        if n < 16 {
            return Err(Error::Parameter(format!("need at least 16 nodes, got {n}")));
        }
        let h = 2.0 * l / (n - 1) as f64;
        let mut lengths = vec![];
        let mut lk = HM_START_L;
        while lk < l {
            lengths.push(lk);
            lk += 2.0;
        }
        lengths.push(l);
        let mut current: Option<Self> = None;
        for &lk in &lengths {
            let nk = if lk == l { n } else { (2.0 * lk / h).round() as usize + 1 };
            let (s, q, residual) = match &current {
                None => solve_bvp(lk, nk, &initial_guess)?,
                Some(prev) => solve_bvp(lk, nk, &|x: f64| {
                    if x.abs() <= prev.l {
                        prev.eval(x)
                    } else {
                        initial_guess(x)
                    }
                })?,
            };
            let hk = s[1] - s[0];
            let d1 = fd_rows(s.len(), hk, 1);
            let dq = d1
                .iter()
                .map(|(start, w)| w.iter().enumerate().map(|(k, c)| c * q[start + k]).sum())
                .collect();
            current = Some(Self {
                l: lk,
                s,
                q,
                dq,
                residual,
            });
        }
        current.ok_or_else(|| Error::Numerical("empty continuation in L".into()))
    }

    /// Default solve: `L = 10`, spacing `0.01`.
    pub fn standard() -> Result<Self> {
        Self::new(10.0, 2001)
    }

    fn spacing(&self) -> f64 {
        self.s[1] - self.s[0]
    }

    /// `(q(s), q'(s))`. Off the grid the ODE is integrated by RK4 from the
    /// node to the left; beyond `±L` the boundary asymptotics are used.
    pub fn eval_with_derivative(&self, s: f64) -> (f64, f64) {
        if s > self.l {
            let d = 1e-5;
            return (airy(s), (airy(s + d) - airy(s - d)) / (2.0 * d));
        }
        if s < -self.l {
            let d = 1e-5;
            return (
                hm_left_asymptotic(s),
                (hm_left_asymptotic(s + d) - hm_left_asymptotic(s - d)) / (2.0 * d),
            );
        }
        let h = self.spacing();
        let i = (((s + self.l) / h).floor() as usize).min(self.s.len() - 2);
        let d = s - self.s[i];
        if d == 0.0 {
            return (self.q[i], self.dq[i]);
        }
        const SUB: usize = 4;
        let dt = d / SUB as f64;
        let rhs = |x: f64, y: [f64; 2]| [y[1], x * y[0] + 2.0 * y[0].powi(3)];
        let mut y = [self.q[i], self.dq[i]];
        let mut x = self.s[i];
        for _ in 0..SUB {
            let k1 = rhs(x, y);
            let k2 = rhs(x + dt / 2.0, [y[0] + dt / 2.0 * k1[0], y[1] + dt / 2.0 * k1[1]]);
            let k3 = rhs(x + dt / 2.0, [y[0] + dt / 2.0 * k2[0], y[1] + dt / 2.0 * k2[1]]);
            let k4 = rhs(x + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
            for c in 0..2 {
                y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            x += dt;
        }
        (y[0], y[1])
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.eval_with_derivative(s).0
    }
}

/// Layer variable `s = -(x - x₋)/(c^{1/3} sqrt(v-ξ) ε^{2/3})`.
pub fn layer_variable(x: f64, epsilon: f64, edge: &EdgeLayerData) -> f64 {
    -(x - edge.x_minus) / (edge.c_e.cbrt() * (edge.v - edge.xi).sqrt() * epsilon.powf(2.0 / 3.0))
}

/// `u ≈ v - 4ε^{1/3} c^{-1/3} q(s) cos(Θ/ε)` near the trailing edge.
pub fn edge_expansion(x: f64, t: f64, epsilon: f64, edge: &EdgeLayerData, hm: &HastingsMcLeod) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if (t - edge.t).abs() > 1e-12 * (1.0 + t.abs()) {
        return Err(Error::Parameter(format!(
            "edge data computed for t={} but evaluated at t={t}",
            edge.t
        )));
    }
    if !(edge.c_e > 0.0) {
        return Err(Error::Degeneracy(format!("edge constant c = {} is not positive", edge.c_e)));
    }
    let s = layer_variable(x, epsilon, edge);
    let amp = 4.0 * epsilon.cbrt() / edge.c_e.cbrt();
    Ok(edge.v - amp * hm.eval(s) * (edge.theta(x) / epsilon).cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_at_zero() {
        let expected = 1.0 / (3f64.powf(2.0 / 3.0) * 1.354_117_939_426_400_4);
        assert!((airy(0.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn airy_branches_join() {
        for &s in &[MACLAURIN_RIGHT, -MACLAURIN_LEFT] {
            let a = airy_maclaurin(s);
            let b = airy(s + 1e-12 * s.signum());
            assert!((a - b).abs() < 1e-11, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn fd_weights_central() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn banded_solve_tridiagonal() {
        let mut a = Banded::zeros(4, 1, 1);
        for i in 0..4 {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
                a.add(i - 1, i, -1.0);
            }
        }
        let mut b = vec![1.0, 0.0, 0.0, 1.0];
        a.solve(&mut b).unwrap();
        for v in b {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn hm_rejects_short_interval() {
        assert!(HastingsMcLeod::new(6.0, 400).is_err());
    }
}
