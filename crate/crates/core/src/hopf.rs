//! The dispersionless limit `v_t + 6 v v_x = 0`: initial profiles with their
//! branch inverses, characteristics and the gradient catastrophe.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solve::brent;

/// Coarse shape of an initial profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    SmoothStep,
    NegativeHump,
    Custom,
}

/// Shape of a tabulated profile, detected from its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// Non-increasing.
    Step,
    /// Decreasing then increasing, one interior minimum.
    Hump,
    /// Non-decreasing; never breaks.
    Monotone,
}

/// Samples `(x, u)` of an initial profile, interpolated by a monotone
/// piecewise-cubic Hermite spline (Fritsch–Carlson slopes).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TableSamples", into = "TableSamples")]
pub struct TabulatedProfile {
    x: Vec<f64>,
    u: Vec<f64>,
    slope: Vec<f64>,
    shape: Shape,
    argmin: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableSamples {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl TryFrom<TableSamples> for TabulatedProfile {
    type Error = Error;
    fn try_from(t: TableSamples) -> Result<Self> {
        Self::new(t.x, t.u)
    }
}

impl From<TabulatedProfile> for TableSamples {
    fn from(t: TabulatedProfile) -> Self {
        TableSamples { x: t.x, u: t.u }
    }
}

impl TabulatedProfile {
    pub fn new(x: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if x.len() != u.len() || x.len() < 4 {
            return Err(Error::Configuration(
                "tabulated profile needs at least 4 (x, u) pairs of equal length".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::Configuration(
                "tabulated profile abscissae must be finite and strictly increasing".into(),
            ));
        }
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1).map(|i| (u[i + 1] - u[i]) / (x[i + 1] - x[i])).collect();
        let mut slope = vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        let argmin = (0..n).fold(0, |b, i| if u[i] < u[b] { i } else { b });
        let dec = u[..=argmin].windows(2).all(|w| w[1] <= w[0]);
        let inc = u[argmin..].windows(2).all(|w| w[1] >= w[0]);
        let shape = if argmin == n - 1 && dec {
            Shape::Step
        } else if argmin == 0 && inc {
            Shape::Monotone
        } else if dec && inc {
            Shape::Hump
        } else {
            return Err(Error::Configuration(
                "tabulated profile must be a step, a single hump, or monotone".into(),
            ));
        };
        Ok(Self {
            x,
            u,
            slope,
            shape,
            argmin,
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return None;
        }
        Some(self.x.partition_point(|&xi| xi <= x).clamp(1, n - 1) - 1)
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        match self.locate(x) {
            None if x < self.x[0] => self.u[0],
            None => self.u[n - 1],
            Some(i) => {
                let h = self.x[i + 1] - self.x[i];
                let s = (x - self.x[i]) / h;
                let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
                let h10 = s * (1.0 - s) * (1.0 - s);
                let h01 = s * s * (3.0 - 2.0 * s);
                let h11 = s * s * (s - 1.0);
                h00 * self.u[i] + h10 * h * self.slope[i] + h01 * self.u[i + 1] + h11 * h * self.slope[i + 1]
            }
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some(i) => {
                let h = self.x[i + 1] - self.x[i];
                let s = (x - self.x[i]) / h;
                let d00 = 6.0 * s * (s - 1.0) / h;
                let d10 = (1.0 - s) * (1.0 - 3.0 * s);
                let d01 = -d00;
                let d11 = s * (3.0 * s - 2.0);
                d00 * self.u[i] + d10 * self.slope[i] + d01 * self.u[i + 1] + d11 * self.slope[i + 1]
            }
        }
    }

    fn min_spacing(&self) -> f64 {
        self.x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Initial datum `f` of the Hopf / KdV problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialProfile {
    /// `f(x) = -A sech²(x/w)`.
    NegativeHump { amplitude: f64, width: f64 },
    /// `f(x) = c (1 - tanh(x/w)) / 2`.
    SmoothStep { c: f64, width: f64 },
    Tabulated(TabulatedProfile),
}

/// Gradient catastrophe of the Hopf solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakPoint {
    pub x_c: f64,
    pub t_c: f64,
    pub u_c: f64,
    /// Foot of the first breaking characteristic, `u_c = f(ζ_c)`.
    pub zeta_c: f64,
}

/// Which monotone branch of `f` an inverse refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

impl InitialProfile {
    /// The running example `-sech² x`.
    pub fn sech2() -> Self {
        InitialProfile::NegativeHump {
            amplitude: 1.0,
            width: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialProfile::NegativeHump { amplitude, width } => {
                if !(amplitude > 0.0 && width > 0.0) {
                    return Err(Error::Configuration(format!(
                        "negative-hump needs amplitude > 0 and width > 0, got ({amplitude}, {width})"
                    )));
                }
            }
            InitialProfile::SmoothStep { c, width } => {
                if !(c > 0.0 && width > 0.0) {
                    return Err(Error::Configuration(format!(
                        "smooth-step needs c > 0 and width > 0, got ({c}, {width})"
                    )));
                }
            }
            InitialProfile::Tabulated(_) => {}
        }
        Ok(())
    }

    pub fn kind(&self) -> ProfileKind {
        match self {
            InitialProfile::NegativeHump { .. } => ProfileKind::NegativeHump,
            InitialProfile::SmoothStep { .. } => ProfileKind::SmoothStep,
            InitialProfile::Tabulated(_) => ProfileKind::Custom,
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            InitialProfile::NegativeHump { .. } => Shape::Hump,
            InitialProfile::SmoothStep { .. } => Shape::Step,
            InitialProfile::Tabulated(t) => t.shape,
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        match *self {
            InitialProfile::NegativeHump { amplitude, width } => {
                let s = 1.0 / (x / width).cosh();
                -amplitude * s * s
            }
            InitialProfile::SmoothStep { c, width } => 0.5 * c * (1.0 - (x / width).tanh()),
            InitialProfile::Tabulated(ref t) => t.eval(x),
        }
    }

    pub fn fprime(&self, x: f64) -> f64 {
        match *self {
            InitialProfile::NegativeHump { amplitude, width } => {
                let th = (x / width).tanh();
                2.0 * amplitude / width * (1.0 - th * th) * th
            }
            InitialProfile::SmoothStep { c, width } => {
                let th = (x / width).tanh();
                -0.5 * c / width * (1.0 - th * th)
            }
            InitialProfile::Tabulated(ref t) => t.deriv(x),
        }
    }

    pub fn f2(&self, x: f64) -> f64 {
        match *self {
            InitialProfile::NegativeHump { amplitude, width } => {
                let th2 = (x / width).tanh().powi(2);
                2.0 * amplitude / (width * width) * (1.0 - th2) * (1.0 - 3.0 * th2)
            }
            InitialProfile::SmoothStep { c, width } => {
                let th = (x / width).tanh();
                c / (width * width) * th * (1.0 - th * th)
            }
            InitialProfile::Tabulated(ref t) => {
                let h = 0.25 * t.min_spacing();
                let d = |s: f64| t.deriv(x + s * h);
                (d(-2.0) - 8.0 * d(-1.0) + 8.0 * d(1.0) - d(2.0)) / (12.0 * h)
            }
        }
    }

    pub fn f3(&self, x: f64) -> f64 {
        match *self {
            InitialProfile::NegativeHump { amplitude, width } => {
                let th = (x / width).tanh();
                let th2 = th * th;
                2.0 * amplitude / width.powi(3) * (1.0 - th2) * (12.0 * th2 * th - 8.0 * th)
            }
            InitialProfile::SmoothStep { c, width } => {
                let th2 = (x / width).tanh().powi(2);
                c / width.powi(3) * (1.0 - th2) * (1.0 - 3.0 * th2)
            }
            InitialProfile::Tabulated(ref t) => {
                let h = 0.25 * t.min_spacing();
                let d = |s: f64| self.f2(x + s * h);
                (d(-2.0) - 8.0 * d(-1.0) + 8.0 * d(1.0) - d(2.0)) / (12.0 * h)
            }
        }
    }

    /// Interval outside which `f` is (numerically) constant.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            InitialProfile::NegativeHump { width, .. } | InitialProfile::SmoothStep { width, .. } => {
                (-20.0 * width, 20.0 * width)
            }
            InitialProfile::Tabulated(ref t) => (t.x[0], t.x[t.x.len() - 1]),
        }
    }

    /// Range `[inf f, sup f]`.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            InitialProfile::NegativeHump { amplitude, .. } => (-amplitude, 0.0),
            InitialProfile::SmoothStep { c, .. } => (0.0, c),
            InitialProfile::Tabulated(ref t) => (
                t.u.iter().cloned().fold(f64::INFINITY, f64::min),
                t.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ),
        }
    }

    pub fn f_min(&self) -> f64 {
        self.range().0
    }

    /// Location of the hump minimum.
    pub fn zeta_min(&self) -> Option<f64> {
        match *self {
            InitialProfile::NegativeHump { .. } => Some(0.0),
            InitialProfile::SmoothStep { .. } => None,
            InitialProfile::Tabulated(ref t) => (t.shape == Shape::Hump).then(|| t.x[t.argmin]),
        }
    }

    pub fn has_right_branch(&self) -> bool {
        self.zeta_min().is_some()
    }

    /// Range of `u` covered by the decreasing branch, `(lower, upper)`.
    pub fn left_range(&self) -> Result<(f64, f64)> {
        match *self {
            InitialProfile::NegativeHump { amplitude, .. } => Ok((-amplitude, 0.0)),
            InitialProfile::SmoothStep { c, .. } => Ok((0.0, c)),
            InitialProfile::Tabulated(ref t) => match t.shape {
                Shape::Monotone => Err(Error::NoBreaking),
                _ => Ok((t.u[t.argmin], t.u[0])),
            },
        }
    }

    fn right_range(&self) -> Result<(f64, f64)> {
        match *self {
            InitialProfile::NegativeHump { amplitude, .. } => Ok((-amplitude, 0.0)),
            InitialProfile::Tabulated(ref t) if t.shape == Shape::Hump => {
                Ok((t.u[t.argmin], t.u[t.u.len() - 1]))
            }
            _ => Err(Error::Configuration(
                "profile has no increasing branch, h_R is undefined".into(),
            )),
        }
    }

    fn check_range(u: f64, (lo, hi): (f64, f64), name: &str) -> Result<()> {
        if !(u >= lo && u <= hi) {
            return Err(Error::Domain(format!("{name}({u}) outside branch range [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Inverse of the decreasing part of `f`.
    pub fn h_l(&self, u: f64) -> Result<f64> {
        self.inverse(u, Branch::Left)
    }

    /// Inverse of the increasing part of `f` (hump profiles only).
    pub fn h_r(&self, u: f64) -> Result<f64> {
        self.inverse(u, Branch::Right)
    }

    pub fn inverse(&self, u: f64, branch: Branch) -> Result<f64> {
        let range = match branch {
            Branch::Left => self.left_range()?,
            Branch::Right => self.right_range()?,
        };
        Self::check_range(u, range, "h")?;
        let sign = if branch == Branch::Left { -1.0 } else { 1.0 };
        match *self {
            InitialProfile::NegativeHump { amplitude, width } => {
                // acosh(sqrt(A/-u)) = asinh(sqrt((A+u)/(-u))), accurate near u = -A
                if u == 0.0 {
                    return Ok(sign * f64::INFINITY);
                }
                Ok(sign * width * ((amplitude + u) / (-u)).max(0.0).sqrt().asinh())
            }
            InitialProfile::SmoothStep { c, width } => Ok(width * (1.0 - 2.0 * u / c).atanh()),
            InitialProfile::Tabulated(ref t) => {
                let (a, b) = match branch {
                    Branch::Left => (t.x[0], t.x[t.argmin]),
                    Branch::Right => (t.x[t.argmin], t.x[t.x.len() - 1]),
                };
                if u == t.eval(a) {
                    return Ok(a);
                }
                if u == t.eval(b) {
                    return Ok(b);
                }
                brent(a, b, |x| t.eval(x) - u, 1e-15)
            }
        }
    }

    /// `(h', h'', h''')` of the chosen branch inverse at `u`.
    pub fn inverse_derivatives(&self, u: f64, branch: Branch) -> Result<[f64; 3]> {
        let z = self.inverse(u, branch)?;
        let f1 = self.fprime(z);
        if f1 == 0.0 {
            return Err(Error::Domain(format!("inverse derivative singular at u={u}")));
        }
        let f2 = self.f2(z);
        let f3 = self.f3(z);
        Ok([
            1.0 / f1,
            -f2 / f1.powi(3),
            (3.0 * f2 * f2 - f1 * f3) / f1.powi(5),
        ])
    }

    /// `h'(u) = 1/f'(h(u))` on the chosen branch.
    pub fn inverse_prime(&self, u: f64, branch: Branch) -> Result<f64> {
        let f1 = self.fprime(self.inverse(u, branch)?);
        if f1 == 0.0 {
            return Err(Error::Domain(format!("inverse derivative singular at u={u}")));
        }
        Ok(1.0 / f1)
    }

    pub fn h_l_prime(&self, u: f64) -> Result<f64> {
        self.inverse_prime(u, Branch::Left)
    }

    pub fn h_l_2nd(&self, u: f64) -> Result<f64> {
        Ok(self.inverse_derivatives(u, Branch::Left)?[1])
    }

    pub fn h_l_3rd(&self, u: f64) -> Result<f64> {
        Ok(self.inverse_derivatives(u, Branch::Left)?[2])
    }

    pub fn h_r_prime(&self, u: f64) -> Result<f64> {
        self.inverse_prime(u, Branch::Right)
    }
}

/// Feet `ζ` of all characteristics `x = 6 f(ζ) t + ζ` through `(x, t)`,
/// in increasing order.
pub fn characteristic_roots(x: f64, t: f64, profile: &InitialProfile) -> Result<Vec<f64>> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("hopf_solve needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(vec![x]);
    }
    let g = |z: f64| z + 6.0 * t * profile.f(z) - x;
    let (sa, sb) = profile.support();
    let (fmin, fmax) = profile.range();
    let lo = sa.min(x - 6.0 * t * fmax) - 1.0;
    let hi = sb.max(x - 6.0 * t * fmin) + 1.0;
    const SAMPLES: usize = 8000;
    let mut grid = Vec::with_capacity(SAMPLES + 3);
    grid.push(lo);
    for i in 0..=SAMPLES {
        let z = sa + (sb - sa) * i as f64 / SAMPLES as f64;
        if z > lo && z < hi {
            grid.push(z);
        }
    }
    grid.push(hi);
    let mut roots = Vec::new();
    let mut prev = (grid[0], g(grid[0]));
    for &z in &grid[1..] {
        let gz = g(z);
        if prev.1 == 0.0 {
            roots.push(prev.0);
        } else if prev.1 * gz < 0.0 {
            roots.push(brent(prev.0, z, g, 1e-15)?);
        }
        prev = (z, gz);
    }
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    if roots.is_empty() {
        return Err(Error::Numerical(format!(
            "no characteristic through (x={x}, t={t}) found on [{lo}, {hi}]"
        )));
    }
    Ok(roots)
}

/// All branch values `v = f(ζ)` of the Hopf solution at `(x, t)`, ordered by
/// the characteristic foot `ζ`.
pub fn hopf_solve(x: f64, t: f64, profile: &InitialProfile) -> Result<Vec<f64>> {
    Ok(characteristic_roots(x, t, profile)?
        .into_iter()
        .map(|z| profile.f(z))
        .collect())
}

/// First time at which `1 + 6 t f'(ζ) = 0` for some `ζ`.
pub fn breaking_point(profile: &InitialProfile) -> Result<BreakPoint> {
    let (sa, sb) = profile.support();
    const SAMPLES: usize = 20_000;
    let h = (sb - sa) / SAMPLES as f64;
    let mut best = (f64::INFINITY, sa);
    for i in 0..=SAMPLES {
        let z = sa + h * i as f64;
        let d = profile.fprime(z);
        if d < best.0 {
            best = (d, z);
        }
    }
    if !(best.0 < 0.0) {
        return Err(Error::NoBreaking);
    }
    let (a, b) = (best.1 - h, best.1 + h);
    let zeta_c = if profile.f2(a) * profile.f2(b) < 0.0 {
        brent(a, b, |z| profile.f2(z), 1e-15)?
    } else {
        golden_min(a, b, |z| profile.fprime(z))
    };
    let d = profile.fprime(zeta_c);
    let t_c = -1.0 / (6.0 * d);
    let u_c = profile.f(zeta_c);
    Ok(BreakPoint {
        x_c: 6.0 * u_c * t_c + zeta_c,
        t_c,
        u_c,
        zeta_c,
    })
}

fn golden_min<F: Fn(f64) -> f64>(mut a: f64, mut b: f64, g: F) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > 1e-13 * (1.0 + a.abs()) {
        if g(c) < g(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}
