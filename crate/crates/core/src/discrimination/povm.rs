use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

const NORM_TOL: f64 = 1e-10;
const IDENTICAL_TOL: f64 = 1e-12;
const SCAN_POINTS: usize = 4001;

/// A-priori probabilities of the two hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Priors {
    pub rho: f64,
    pub sigma: f64,
}

impl Priors {
    pub const EQUAL: Priors = Priors { rho: 0.5, sigma: 0.5 };

    pub fn new(rho: f64, sigma: f64) -> Result<Self> {
        if !(rho >= 0.0 && sigma >= 0.0 && ((rho + sigma) - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidParameter(format!("priors ({rho}, {sigma}) must be non-negative and sum to 1")));
        }
        Ok(Self { rho, sigma })
    }

    pub fn is_equal(&self) -> bool {
        (self.rho - self.sigma).abs() <= 1e-15
    }
}

/// Unambiguous-discrimination POVM `{E_ρ, E_σ, E_?}` for two pure qubit
/// states, with `E_ρ = C_ρ|Φ_σ⊥⟩⟨Φ_σ⊥|`, `E_σ = C_σ|Φ_ρ⊥⟩⟨Φ_ρ⊥|` and
/// `E_? = 1 − E_ρ − E_σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmTriple {
    pub e_rho: CMatrix,
    pub e_sigma: CMatrix,
    pub e_inconclusive: CMatrix,
    pub c_rho: f64,
    pub c_sigma: f64,
    /// `|⟨Φ_σ|Φ_ρ⟩|`.
    pub overlap: f64,
    pub priors: Priors,
}

/// `(−v₁*, v₀*)`, orthogonal to `v` in two dimensions.
fn orthogonal(v: &CVector) -> CVector {
    CVector::from_vec(vec![-v[1].conj(), v[0].conj()])
}

/// `C_ρ = C_σ = 1/(1+s)`, optimal for equal priors.
pub fn equal_prior_weights(overlap: f64) -> (f64, f64) {
    let c = 1.0 / (1.0 + overlap);
    (c, c)
}

/// `C_σ` on the boundary `det E_? = 0`:
/// `(1 − C_ρ)(1 − C_σ) = C_ρ C_σ s²`.
fn boundary_sigma(c_rho: f64, overlap: f64) -> f64 {
    let s2 = overlap * overlap;
    let denom = 1.0 - c_rho * (1.0 - s2);
    if denom <= 0.0 {
        0.0
    } else {
        ((1.0 - c_rho) / denom).clamp(0.0, 1.0)
    }
}

/// Weights maximizing `p_ρ C_ρ (1−s²) + p_σ C_σ (1−s²)` with `E_? ⪰ 0`,
/// by scanning `C_ρ` along the positivity boundary and refining the best
/// bracket with golden-section search.
pub fn optimal_weights(overlap: f64, priors: Priors) -> (f64, f64) {
    if overlap == 0.0 {
        return (1.0, 1.0);
    }
    let objective = |c_rho: f64| priors.rho * c_rho + priors.sigma * boundary_sigma(c_rho, overlap);
    let step = 1.0 / (SCAN_POINTS - 1) as f64;
    let best =
        (0..SCAN_POINTS).map(|i| i as f64 * step).max_by(|a, b| objective(*a).total_cmp(&objective(*b))).unwrap_or(0.0);
    let (mut lo, mut hi) = ((best - step).max(0.0), (best + step).min(1.0));
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let x1 = hi - ratio * (hi - lo);
        let x2 = lo + ratio * (hi - lo);
        if objective(x1) < objective(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let refined = 0.5 * (lo + hi);
    let c_rho = [best, refined].into_iter().max_by(|a, b| objective(*a).total_cmp(&objective(*b))).unwrap();
    (c_rho, boundary_sigma(c_rho, overlap))
}

/// Builds the POVM for unit vectors `phi_rho`, `phi_sigma`.
///
/// Equal priors use the closed form `C = 1/(1+s)`, giving success
/// probability `1 − s`. Unequal priors use [`optimal_weights`].
pub fn build_povm(phi_rho: &CVector, phi_sigma: &CVector, priors: Priors) -> Result<PovmTriple> {
    for v in [phi_rho, phi_sigma] {
        if v.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: v.len() });
        }
        if (v.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("POVM input has norm {}", v.norm())));
        }
    }
    let overlap = phi_sigma.dotc(phi_rho).norm().min(1.0);
    if 1.0 - overlap <= IDENTICAL_TOL {
        return Err(Error::StatesIdentical { overlap });
    }
    let (c_rho, c_sigma) =
        if priors.is_equal() { equal_prior_weights(overlap) } else { optimal_weights(overlap, priors) };
    let e_rho = linalg::outer(&orthogonal(phi_sigma)).scale(c_rho);
    let e_sigma = linalg::outer(&orthogonal(phi_rho)).scale(c_sigma);
    let e_inconclusive = CMatrix::identity(2, 2) - &e_rho - &e_sigma;
    Ok(PovmTriple { e_rho, e_sigma, e_inconclusive, c_rho, c_sigma, overlap, priors })
}

impl PovmTriple {
    /// Largest entry of `|E_ρ + E_σ + E_? − I|`.
    pub fn completeness_error(&self) -> f64 {
        linalg::max_abs(&(&self.e_rho + &self.e_sigma + &self.e_inconclusive - CMatrix::identity(2, 2)))
    }

    /// Smallest eigenvalue across the three elements.
    pub fn min_eigenvalue(&self) -> f64 {
        [&self.e_rho, &self.e_sigma, &self.e_inconclusive]
            .into_iter()
            .map(linalg::min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    /// Born probabilities `[p(ρ), p(σ), p(?)]` of the outcomes for `state`.
    pub fn probabilities(&self, state: &CMatrix) -> [f64; 3] {
        let p = |e: &CMatrix| (e * state).trace().re;
        [p(&self.e_rho), p(&self.e_sigma), p(&self.e_inconclusive)]
    }

    /// Average probability of a conclusive outcome,
    /// `(1 − s²)(p_ρ C_ρ + p_σ C_σ)`; `1 − s` for equal priors.
    pub fn success_probability(&self) -> f64 {
        (1.0 - self.overlap * self.overlap) * (self.priors.rho * self.c_rho + self.priors.sigma * self.c_sigma)
    }
}
