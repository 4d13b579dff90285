//! Complete elliptic integrals, Jacobi `cn`, and the one-dimensional theta
//! function.
//!
//! All elliptic quantities use the *parameter* convention:
//! `K(m) = ∫_0^{π/2} dψ / sqrt(1 - m sin²ψ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Elliptic parameter `m ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) || m.is_nan() {
            return Err(Error::Domain(format!("elliptic parameter m={m} outside [0,1]")));
        }
        Ok(Self(m))
    }

    pub fn m(self) -> f64 {
        self.0
    }

    /// Complementary parameter `1 - m`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

/// `K`, `E`, and `K - E` evaluated together from one AGM run.
///
/// `K - E` is accumulated directly from the AGM sums, so it keeps full
/// relative precision as `m -> 0` where the naive difference cancels.
#[derive(Debug, Clone, Copy)]
pub struct CompleteIntegrals {
    pub k: f64,
    pub e: f64,
    pub k_minus_e: f64,
}

/// `K(m)`, `E(m)` and `K(m) - E(m)` for `0 <= m < 1`.
pub fn complete_integrals(m: f64) -> Result<CompleteIntegrals> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("complete integrals need 0 <= m < 1, got {m}")));
    }
    let mut a = 1.0;
    let mut b = (1.0 - m).sqrt();
    // Σ 2^{n-1} c_n², with c_0² = m.
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        let term = pow * c * c;
        sum += term;
        if c.abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    let k_minus_e = k * sum;
    Ok(CompleteIntegrals {
        k,
        e: k - k_minus_e,
        k_minus_e,
    })
}

/// Complete elliptic integral of the first kind by the arithmetic–geometric mean.
pub fn ellip_k(m: f64) -> Result<f64> {
    if m >= 1.0 {
        return Err(Error::Domain(format!("K(m) diverges at m={m} >= 1")));
    }
    if m < 0.0 || m.is_nan() {
        return Err(Error::Domain(format!("K(m) needs m >= 0, got {m}")));
    }
    Ok(complete_integrals(m)?.k)
}

/// Complete elliptic integral of the second kind.
pub fn ellip_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("E(m) needs m in [0,1], got {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    Ok(complete_integrals(m)?.e)
}

/// Jacobi elliptic function `cn(z; m)`.
///
/// Descending Landen (AGM) scheme after reducing `z` modulo `4K(m)`. For
/// `1 - m < 1e-12` the first-order expansion about `sech` is used instead.
pub fn jacobi_cn(z: f64, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("cn needs m in [0,1], got {m}")));
    }
    if m == 0.0 {
        return Ok(z.cos());
    }
    let m1 = 1.0 - m;
    if m1 < 1e-12 {
        // cn(z|m) ≈ sech z - (m1/4)(sinh z cosh z - z) tanh z sech z
        let az = z.abs();
        if az > 700.0 {
            return Ok(0.0);
        }
        let sech = 1.0 / az.cosh();
        let corr = 0.25 * m1 * (az.sinh() * az.cosh() - az) * az.tanh() * sech;
        return Ok(sech - corr);
    }
    let k = ellip_k(m)?;
    // cn is even and 4K-periodic; fold into [0, 2K].
    let period = 4.0 * k;
    let mut r = z.abs() % period;
    if r > 2.0 * k {
        r = period - r;
    }
    Ok(cn_landen(r, m))
}

fn cn_landen(z: f64, m: f64) -> f64 {
    const MAX: usize = 16;
    let mut a = [0.0; MAX + 1];
    let mut c = [0.0; MAX + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while n < MAX && c[n].abs() > 1e-16 * a[n] {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * z;
    for j in (1..=n).rev() {
        let s = (c[j] / a[j] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    phi.cos()
}

/// Parameters of the theta series `ϑ(z; τ)` for purely imaginary `τ`.
#[derive(Debug, Clone, Copy)]
pub struct ThetaParams {
    /// `Im τ`; the series requires it to be positive.
    pub tau_im: f64,
    /// The series is cut once the first omitted term falls below this.
    pub truncation_tol: f64,
}

impl ThetaParams {
    pub fn new(tau_im: f64) -> Result<Self> {
        Self::with_tolerance(tau_im, 1e-15)
    }

    pub fn with_tolerance(tau_im: f64, truncation_tol: f64) -> Result<Self> {
        if !(tau_im > 0.0) {
            return Err(Error::Domain(format!("theta series needs Im(tau) > 0, got {tau_im}")));
        }
        if tau_im < 0.05 {
            log::warn!("theta series poorly conditioned: Im(tau)={tau_im:.3e} < 0.05");
        }
        Ok(Self {
            tau_im,
            truncation_tol,
        })
    }

    /// `τ = i K(1-m)/K(m)` for `0 < m < 1`.
    pub fn from_modulus(m: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Domain(format!("tau(m) needs 0 < m < 1, got {m}")));
        }
        Self::new(ellip_k(1.0 - m)? / ellip_k(m)?)
    }

    /// Number of retained terms `N`: the first omitted term is
    /// `exp(-π (N+1)² Im τ) < truncation_tol`.
    pub fn truncation(&self) -> usize {
        let n = ((-self.truncation_tol.ln()) / (PI * self.tau_im)).sqrt();
        n.ceil() as usize
    }
}

/// `ϑ` and its first two `z`-derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ThetaValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl ThetaValue {
    /// `d² log ϑ / dz²`.
    pub fn log_d2(&self) -> f64 {
        self.d2 / self.value - (self.d1 / self.value).powi(2)
    }
}

/// `ϑ(z; τ) = Σ_n exp(iπn²τ + 2πinz)` for real `z` and imaginary `τ`,
/// with term-wise derivatives.
pub fn theta3(z: f64, params: &ThetaParams) -> ThetaValue {
    let q = (-PI * params.tau_im).exp();
    let n_max = params.truncation();
    let mut value = 1.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for n in 1..=n_max {
        let nf = n as f64;
        let w = q.powf(nf * nf);
        let arg = 2.0 * PI * nf * z;
        let (s, c) = arg.sin_cos();
        let kn = 2.0 * PI * nf;
        value += 2.0 * w * c;
        d1 -= 2.0 * w * kn * s;
        d2 -= 2.0 * w * kn * kn * c;
    }
    ThetaValue { value, d1, d2 }
}

/// Convenience wrapper returning only `ϑ(z; i tau_im)`.
pub fn theta3_value(z: f64, tau_im: f64) -> Result<f64> {
    Ok(theta3(z, &ThetaParams::new(tau_im)?).value)
}
