//! Fixtures shared by the benchmarks.

use whitham_core::{RiemannTriple, SpectralGrid};

/// Triples `(1, b, 0)` with `b` spread over `(0, 1)`, covering moduli from
/// the harmonic to the soliton end.
pub fn triples(n: usize) -> Vec<RiemannTriple> {
    (1..=n)
        .map(|i| RiemannTriple::new(1.0, i as f64 / (n + 1) as f64, 0.0).expect("ordered"))
        .collect()
}

/// Grid and initial soliton for a short direct run.
pub fn soliton_run(n: usize) -> (SpectralGrid, Vec<f64>) {
    let eps = 0.1;
    let g = SpectralGrid::new(8.0, n, eps, 1e-4).expect("valid grid");
    let u0 = g.x().iter().map(|&x| 2.0 / (x / eps).cosh().powi(2)).collect();
    (g, u0)
}
