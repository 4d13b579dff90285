//! Characteristic speeds of the diagonal Whitham system and the
//! quasi-momentum / quasi-energy differentials.

use crate::error::{Error, Result};
use crate::quad::{gauss_chebyshev_adaptive, GaussLegendre};
use crate::specfun::complete_integrals;
use crate::wave::RiemannTriple;

/// Below this `m` (or above `1 - NEAR_EDGE`) [`speeds`] switches to the
/// closed-form edge limits with their first corrections.
pub const NEAR_EDGE: f64 = 1e-6;

/// `(λ₁, λ₂, λ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedVector {
    pub lambda: [f64; 3],
    /// Set when all three invariants coincide and the speeds collapse to `6β`.
    pub degenerate: bool,
}

impl SpeedVector {
    pub fn lambda1(&self) -> f64 {
        self.lambda[0]
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda[1]
    }
    pub fn lambda3(&self) -> f64 {
        self.lambda[2]
    }
}

/// `λᵢ = 2Σβ + 4 ∏_{k≠i}(βᵢ-βₖ)/(βᵢ+α)`.
///
/// The products are rewritten in terms of `m`, `K`, `E` and `K-E` so that
/// nothing cancels near either edge:
///
/// ```text
/// λ₁ = 2Σ + 4d (1-m) K/E
/// λ₂ = 2Σ - 4d m(1-m) K/(E - (1-m)K)
/// λ₃ = 2Σ - 4d m K/(K-E)
/// ```
/// with `d = β₁-β₃`.
pub fn speeds(triple: &RiemannTriple) -> SpeedVector {
    let s2 = 2.0 * triple.sum();
    let d = triple.width();
    if d == 0.0 {
        let l = 6.0 * triple.beta1;
        return SpeedVector {
            lambda: [l; 3],
            degenerate: true,
        };
    }
    let m = triple.m();
    let lambda = if m < NEAR_EDGE {
        // K = π/2(1 + m/4 + 9m²/64), E = π/2(1 - m/4 - 3m²/64) give
        // (1-m)K/E = 1 - m/2, m(1-m)K/(E-(1-m)K) = 2 - 7m/4, mK/(K-E) = 2 - m/4.
        [
            s2 + 4.0 * d - 2.0 * d * m,
            s2 - 8.0 * d + 7.0 * d * m,
            s2 - 8.0 * d + d * m,
        ]
    } else if m > 1.0 - NEAR_EDGE {
        let m1 = 1.0 - m;
        if m1 == 0.0 {
            [s2 + 0.0, s2, s2 - 4.0 * d]
        } else {
            let l = 0.5 * (16.0 / m1).ln();
            let kk = l + 0.25 * m1 * (l - 1.0);
            let ee = 1.0 + 0.5 * m1 * (l - 0.5);
            [
                s2 + 4.0 * d * m1 * kk / ee,
                s2 - 4.0 * d * m * m1 * kk / (ee - m1 * kk),
                s2 - 4.0 * d * m * kk / (kk - ee),
            ]
        }
    } else {
        let ci = complete_integrals(m).expect("0 < m < 1");
        let m1 = 1.0 - m;
        [
            s2 + 4.0 * d * m1 * ci.k / ci.e,
            s2 - 4.0 * d * m * m1 * ci.k / (m * ci.k - ci.k_minus_e),
            s2 - 4.0 * d * m * ci.k / ci.k_minus_e,
        ]
    };
    SpeedVector {
        lambda,
        degenerate: false,
    }
}

/// `k(β)` as a plain function of three reals (no ordering validation).
fn wavenumber(b: [f64; 3]) -> f64 {
    let d = b[0] - b[2];
    let m = (b[1] - b[2]) / d;
    std::f64::consts::PI * d.sqrt() / complete_integrals(m).expect("m in [0,1)").k
}

/// `∂k/∂βᵢ` by fourth-order centred differences with step `1e-5 (β₁-β₃)`.
pub fn wavenumber_gradient(triple: &RiemannTriple) -> [f64; 3] {
    let h = 1e-5 * triple.width();
    let b = triple.as_array();
    let mut g = [0.0; 3];
    for (i, gi) in g.iter_mut().enumerate() {
        let at = |s: f64| {
            let mut bb = b;
            bb[i] += s * h;
            wavenumber(bb)
        };
        *gi = (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h);
    }
    g
}

/// Speeds from the wave-conservation form: `λᵢ = 2Σβ + 2k/∂_{βᵢ}k`.
pub fn speeds_via_k(triple: &RiemannTriple) -> Result<SpeedVector> {
    if !(triple.beta1 > triple.beta2 && triple.beta2 > triple.beta3) {
        return Err(Error::Conditioning(
            "speeds_via_k needs strictly ordered invariants".into(),
        ));
    }
    let m = triple.m();
    if !(1e-4..=1.0 - 1e-4).contains(&m) {
        return Err(Error::Conditioning(format!(
            "m={m} too close to an edge for differentiating k"
        )));
    }
    let k = triple.k();
    let g = wavenumber_gradient(triple);
    let s2 = 2.0 * triple.sum();
    Ok(SpeedVector {
        lambda: [s2 + 2.0 * k / g[0], s2 + 2.0 * k / g[1], s2 + 2.0 * k / g[2]],
        degenerate: false,
    })
}

/// Normalisation constants and densities of `dp` and `dq`.
///
/// `dp = (λ+α) dλ / (2√R)`, `dq = 12(λ² - Σλ/2 + γ) dλ / (2√R)` with
/// `R = (β₁-λ)(λ-β₂)(λ-β₃)`; the densities use `|R|` so that they are real
/// on the gap as well.
#[derive(Debug, Clone, Copy)]
pub struct AbelianDifferentials {
    pub triple: RiemannTriple,
    pub alpha: f64,
    pub gamma: f64,
}

/// Which interval of the real line a spectral point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralZone {
    /// `(-∞, β₃]`
    LowerBand,
    /// `(β₃, β₂)`
    Gap,
    /// `[β₂, β₁]`
    UpperBand,
    /// `(β₁, ∞)`
    Above,
}

const QUAD_TOL: f64 = 1e-11;

impl AbelianDifferentials {
    pub fn new(triple: &RiemannTriple) -> Result<Self> {
        if !(triple.beta1 > triple.beta2 && triple.beta2 > triple.beta3) {
            return Err(Error::Domain(
                "quasi-momentum needs strictly ordered invariants".into(),
            ));
        }
        let alpha = triple.alpha();
        let RiemannTriple { beta1, beta2, beta3 } = *triple;
        let gamma = alpha / 6.0 * triple.sum() + (beta1 * beta2 + beta1 * beta3 + beta2 * beta3) / 3.0;
        Ok(Self {
            triple: *triple,
            alpha,
            gamma,
        })
    }

    pub fn zone(&self, lambda: f64) -> SpectralZone {
        let t = &self.triple;
        if lambda <= t.beta3 {
            SpectralZone::LowerBand
        } else if lambda < t.beta2 {
            SpectralZone::Gap
        } else if lambda <= t.beta1 {
            SpectralZone::UpperBand
        } else {
            SpectralZone::Above
        }
    }

    fn radicand(&self, l: f64) -> f64 {
        let t = &self.triple;
        (t.beta1 - l) * (l - t.beta2) * (l - t.beta3)
    }

    /// Numerator polynomial of `dp` (without the `1/(2√|R|)`).
    pub fn dp_numerator(&self, l: f64) -> f64 {
        l + self.alpha
    }

    /// Numerator polynomial of `dq` (without the `1/(2√|R|)`).
    pub fn dq_numerator(&self, l: f64) -> f64 {
        12.0 * (l * l - 0.5 * self.triple.sum() * l + self.gamma)
    }

    /// Density of `dp` with respect to `dλ`, using `|R|`.
    pub fn dp_density(&self, l: f64) -> f64 {
        self.dp_numerator(l) / (2.0 * self.radicand(l).abs().sqrt())
    }

    /// Density of `dq` with respect to `dλ`, using `|R|`.
    pub fn dq_density(&self, l: f64) -> f64 {
        self.dq_numerator(l) / (2.0 * self.radicand(l).abs().sqrt())
    }

    /// `∫_{β₃}^{β₂} num(λ) dλ / (2√|R|)` by Gauss–Chebyshev.
    pub fn gap_integral<F: Fn(f64) -> f64>(&self, num: F) -> f64 {
        let t = self.triple;
        gauss_chebyshev_adaptive(t.beta3, t.beta2, 64, 1 << 14, QUAD_TOL, |l| {
            num(l) / (2.0 * (t.beta1 - l).sqrt())
        })
        .0
    }

    /// `∫_{β₂}^{β₁} num(λ) dλ / (2√R)` by Gauss–Chebyshev.
    pub fn band_integral<F: Fn(f64) -> f64>(&self, num: F) -> f64 {
        let t = self.triple;
        gauss_chebyshev_adaptive(t.beta2, t.beta1, 64, 1 << 14, QUAD_TOL, |l| {
            num(l) / (2.0 * (l - t.beta3).sqrt())
        })
        .0
    }

    /// `∫_{β₂}^{λ} num dλ'/(2√R)` on a band; the path from `β₂` to the lower
    /// band crosses the gap, whose contribution vanishes by normalisation.
    fn abelian_integral<F: Fn(f64) -> f64>(&self, lambda: f64, num: F) -> Result<f64> {
        let t = self.triple;
        match self.zone(lambda) {
            SpectralZone::UpperBand => {
                // λ' = β₂ + (β₁-β₂) sin²θ  =>  dλ'/sqrt((β₁-λ')(λ'-β₂)) = 2 dθ
                let s = ((lambda - t.beta2) / (t.beta1 - t.beta2)).clamp(0.0, 1.0);
                let theta_end = s.sqrt().asin();
                let g = |th: f64| {
                    let l = t.beta2 + (t.beta1 - t.beta2) * th.sin().powi(2);
                    num(l) / (l - t.beta3).sqrt()
                };
                Ok(doubling_legendre(0.0, theta_end, g))
            }
            SpectralZone::LowerBand => {
                // λ' = β₃ - s²  =>  dλ'/sqrt(β₃-λ') = -2 ds
                let s_end = (t.beta3 - lambda).sqrt();
                let g = |s: f64| {
                    let l = t.beta3 - s * s;
                    num(l) / ((t.beta1 - l) * (t.beta2 - l)).sqrt()
                };
                Ok(-doubling_legendre(0.0, s_end, g))
            }
            zone => Err(Error::Domain(format!(
                "lambda={lambda} lies in {zone:?}, outside the stability bands"
            ))),
        }
    }

    /// Quasi-momentum `p(λ) = ∫_{β₂}^{λ} dp`.
    pub fn quasi_momentum(&self, lambda: f64) -> Result<f64> {
        self.abelian_integral(lambda, |l| self.dp_numerator(l))
    }

    /// Quasi-energy `q(λ) = ∫_{β₂}^{λ} dq`.
    pub fn quasi_energy(&self, lambda: f64) -> Result<f64> {
        self.abelian_integral(lambda, |l| self.dq_numerator(l))
    }

    /// Period of `dp` around the band cycle, `∮ dp = 2∫_{β₂}^{β₁} dp = k`.
    pub fn cycle_momentum(&self) -> f64 {
        2.0 * self.band_integral(|l| self.dp_numerator(l))
    }

    /// `∮ dq = 2∫_{β₂}^{β₁} dq = ω`.
    pub fn cycle_energy(&self) -> f64 {
        2.0 * self.band_integral(|l| self.dq_numerator(l))
    }
}

/// Gauss–Legendre starting at 64 nodes, doubled until successive values agree
/// to `QUAD_TOL`.
fn doubling_legendre<F: Fn(f64) -> f64>(a: f64, b: f64, g: F) -> f64 {
    let mut n = 64;
    let mut prev = GaussLegendre::new(n).integrate(a, b, &g);
    while n < 1024 {
        n *= 2;
        let cur = GaussLegendre::new(n).integrate(a, b, &g);
        if (cur - prev).abs() < QUAD_TOL {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `p(λ)` for a triple.
pub fn quasi_momentum(triple: &RiemannTriple, lambda: f64) -> Result<f64> {
    AbelianDifferentials::new(triple)?.quasi_momentum(lambda)
}

/// `q(λ)` for a triple.
pub fn quasi_energy(triple: &RiemannTriple, lambda: f64) -> Result<f64> {
    AbelianDifferentials::new(triple)?.quasi_energy(lambda)
}
