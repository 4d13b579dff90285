//! Fixed-order quadrature rules.
//!
//! Gauss–Legendre for smooth integrands (after whatever substitution removes
//! endpoint singularities) and Gauss–Chebyshev of the first kind for
//! integrands carrying an explicit `1/sqrt((b-x)(x-a))` weight.

use std::f64::consts::PI;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build an `n`-point rule. Nodes are found by Newton iteration on the
    /// three-term Legendre recurrence, seeded with the Tricomi approximation.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_a^b g(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut g: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * g(x)).sum()
    }
}

/// Composite rule on `[0, len]` over panels `[0, a], [a, 2a], [2a, 4a], …`,
/// for integrands that vary on the scale `a` near `0` and on the scale `len`
/// elsewhere. Each panel uses `base`.
pub fn graded_nodes(base: &GaussLegendre, a: f64, len: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut hi = a.min(len);
    loop {
        out.extend(base.mapped(lo, hi));
        if hi >= len {
            return out;
        }
        lo = hi;
        hi = (2.0 * hi).min(len);
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `∫_a^b g(x) / sqrt((b - x)(x - a)) dx` by the `n`-point Gauss–Chebyshev rule
/// of the first kind. Exact for polynomial `g` of degree `< 2n`.
pub fn gauss_chebyshev<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut g: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let w = PI / n as f64;
    (0..n)
        .map(|j| {
            let x = mid + half * (PI * (j as f64 + 0.5) / n as f64).cos();
            g(x)
        })
        .sum::<f64>()
        * w
}

/// Gauss–Chebyshev with order doubling from `n0` until successive values
/// differ by less than `tol` (absolute), capped at `n_max` nodes.
pub fn gauss_chebyshev_adaptive<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    n0: usize,
    n_max: usize,
    tol: f64,
    mut g: F,
) -> (f64, bool) {
    let mut n = n0.max(1);
    let mut prev = gauss_chebyshev(a, b, n, &mut g);
    while n < n_max {
        n *= 2;
        let cur = gauss_chebyshev(a, b, n, &mut g);
        if (cur - prev).abs() < tol {
            return (cur, true);
        }
        prev = cur;
    }
    (prev, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_rule_resolves_near_singularity() {
        let base = GaussLegendre::new(20);
        let d: f64 = 1e-8;
        let nodes = graded_nodes(&base, d.sqrt(), 1.0);
        // ∫₀¹ dx/(d + x²) = atan(1/√d)/√d
        let exact = (1.0 / d.sqrt()).atan() / d.sqrt();
        let approx: f64 = nodes.iter().map(|&(x, w)| w / (d + x * x)).sum();
        assert!((approx / exact - 1.0).abs() < 1e-12);
        assert!((nodes.iter().map(|n| n.1).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 polynomial
        let v = gl.integrate(-1.0, 2.0, |x| x.powi(15) + 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
        let s: f64 = gl.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_order_rule_is_stable() {
        let gl = GaussLegendre::new(200);
        let v = gl.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
        assert!(gl.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn chebyshev_weight_integral() {
        // ∫_a^b dx / sqrt((b-x)(x-a)) = π
        let v = gauss_chebyshev(-0.3, 1.7, 4, |_| 1.0);
        assert!((v - PI).abs() < 1e-14);
        // ∫_0^1 x^2 / sqrt(x(1-x)) = 3π/8
        let v = gauss_chebyshev(0.0, 1.0, 4, |x| x * x);
        assert!((v - 3.0 * PI / 8.0).abs() < 1e-14);
    }
}
