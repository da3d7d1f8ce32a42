//! Reference formulas written independently of the library, used as test
//! oracles.
#![allow(dead_code)]

use raman_cavity::fock::{FockCutoff, TwoModeKet};
use raman_cavity::linalg::{CMatrix, CVector};
use raman_cavity::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{−|γ|²/2} γⁿ/√n!` for `n = 0..=n_max`, from the log-factorial.
pub fn coherent_amplitudes(gamma: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut log_fact = 0.0;
    (0..=n_max)
        .map(|n| {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            if gamma.norm() == 0.0 {
                return if n == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            }
            let modulus = (n as f64 * gamma.norm().ln() - 0.5 * log_fact - 0.5 * gamma.norm_sqr()).exp();
            Complex64::from_polar(modulus, n as f64 * gamma.arg())
        })
        .collect()
}

/// `|γ₁⟩ ⊗ |γ₂⟩` on the triangular cutoff.
pub fn product_coherent(g1: Complex64, g2: Complex64, cutoff: FockCutoff) -> TwoModeKet {
    let (a, b) = (coherent_amplitudes(g1, cutoff.n_max()), coherent_amplitudes(g2, cutoff.n_max()));
    TwoModeKet::from_fn(cutoff, |n1, n2| a[n1] * b[n2]).unwrap()
}

/// `Σ_k w_k |γ_k⟩⟨γ_k|` as a dense `(n_max+1)²` matrix.
pub fn mixture_matrix(terms: &[(f64, Complex64)], n_max: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n_max + 1, n_max + 1);
    for &(w, g) in terms {
        let v = CVector::from_vec(coherent_amplitudes(g, n_max));
        m += (&v * v.adjoint()) * c(w, 0.0);
    }
    m
}

/// Eigenvalues of a 2×2 Hermitian matrix, smaller first.
pub fn eig2(m: &CMatrix) -> (f64, f64) {
    let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mid - rad, mid + rad)
}

/// Trace norm of a 2×2 Hermitian matrix.
pub fn trace_norm2(m: &CMatrix) -> f64 {
    let (l0, l1) = eig2(m);
    l0.abs() + l1.abs()
}

/// `⟨n|ρ_A|n⟩` of a discrete mixture: a weighted Poisson term.
pub fn poisson_diagonal(terms: &[(f64, Complex64)], a: f64, n: usize) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    terms
        .iter()
        .map(|&(w, g)| {
            let x = a * a * g.norm_sqr();
            w * x.powi(n as i32) * (-x).exp() / fact
        })
        .sum()
}

/// Largest average conclusive probability `(1−s²)(C_ρ+C_σ)/2` over weights
/// for which `1 − C_ρ|u⟩⟨u| − C_σ|v⟩⟨v|` stays positive, with `u ⊥ Φ_σ`,
/// `v ⊥ Φ_ρ`.
///
/// The feasible region's edge runs almost along `C_ρ + C_σ = const`, so a
/// square grid aliases badly. Instead, each `C_ρ` on a grid gets the
/// largest feasible `C_σ` from nested one-dimensional grids, and the `C_ρ`
/// grid is refined around the best column.
pub fn grid_search_pmax(phi_rho: &CVector, phi_sigma: &CVector) -> f64 {
    let perp = |v: &CVector| CVector::from_vec(vec![-v[1].conj(), v[0].conj()]);
    let (u, v) = (perp(phi_sigma), perp(phi_rho));
    let s2 = phi_sigma.dotc(phi_rho).norm_sqr();
    let feasible = |cr: f64, cs: f64| {
        let a = 1.0 - cr * u[0].norm_sqr() - cs * v[0].norm_sqr();
        let d = 1.0 - cr * u[1].norm_sqr() - cs * v[1].norm_sqr();
        let b = -(u[0] * u[1].conj() * cr + v[0] * v[1].conj() * cs);
        let m = CMatrix::from_row_slice(2, 2, &[c(a, 0.0), b, b.conj(), c(d, 0.0)]);
        eig2(&m).0 >= 0.0
    };
    let max_cs = |cr: f64| -> Option<f64> {
        if !feasible(cr, 0.0) {
            return None;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..14 {
            let step = (hi - lo) / 20.0;
            let last = (0..=20).map(|k| lo + step * k as f64).take_while(|&cs| feasible(cr, cs)).last().unwrap_or(lo);
            (lo, hi) = (last, (last + step).min(1.0));
        }
        Some(lo)
    };
    let (mut best, mut best_cr) = (0.0, 0.0);
    let (mut lo, mut hi, mut steps) = (0.0, 1.0, 2000);
    for _ in 0..4 {
        for k in 0..=steps {
            let cr = lo + (hi - lo) * k as f64 / steps as f64;
            if let Some(cs) = max_cs(cr) {
                let p = 0.5 * (1.0 - s2) * (cr + cs);
                if p > best {
                    (best, best_cr) = (p, cr);
                }
            }
        }
        let half = 2.0 * (hi - lo) / steps as f64;
        (lo, hi, steps) = ((best_cr - half).max(0.0), (best_cr + half).min(1.0), 200);
    }
    best
}
