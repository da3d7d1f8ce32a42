//! Attenuation of coherent-state mixtures into the vacuum/one-photon
//! subspace and unambiguous discrimination of the attenuated states.
//!
//! For small `A` the mode-one marginal `Σ_k w_k |Aγ_k⟩⟨Aγ_k|` is, to second
//! order,
//!
//! ```text
//! ρ_A ≈ [[1 − A²⟨|γ|²⟩, A⟨γ*⟩],
//!        [A⟨γ⟩,          A²⟨|γ|²⟩]]
//! ```
//!
//! on `{|0⟩, |1⟩}`. When the P-function variance is small it is close to
//! the pure state `|Φ⟩ ∝ |0⟩ + A(⟨|γ|²⟩/⟨γ*⟩)|1⟩`, and two such states can
//! be told apart without error by a three-outcome POVM.

mod experiment;
mod povm;

pub use experiment::{
    run_discrimination_experiment, run_qubit_experiment, AnalyticSummary, EmpiricalRates, ExperimentOptions,
    ExperimentReport, OutcomeCounts,
};
pub use povm::{build_povm, equal_prior_weights, optimal_weights, PovmTriple, Priors};

use num_complex::Complex64;
use serde::Serialize;

use crate::beamsplitter::Tuning;
use crate::error::{Error, Result};
use crate::fock::{CoherentMixture, SingleModeState};
use crate::linalg::{self, CMatrix, CVector};

/// Tolerance for qubit-state invariants.
pub const QUBIT_TOL: f64 = 1e-10;
/// The "much smaller than" clause of the purity condition, as a fraction of `⟨|γ|²⟩`.
pub const MUCH_LESS_FRACTION: f64 = 0.01;

/// Attenuation amplitude `A ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Attenuation(f64);

impl Attenuation {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidParameter(format!("attenuation must lie in (0, 1], got {a}")));
        }
        Ok(Self(a))
    }

    /// `A = 1/√(1+|κ|²)`.
    pub fn from_tuning(tuning: &Tuning) -> Self {
        Self(tuning.attenuation())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// First moments of a P-function: `⟨γ⟩ = tr(ρ a)` and `⟨|γ|²⟩ = tr(ρ a†a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean_gamma: Complex64,
    pub mean_abs2: f64,
}

impl MomentSummary {
    /// `⟨|γ|²⟩ − |⟨γ⟩|²`.
    pub fn variance(&self) -> f64 {
        self.mean_abs2 - self.mean_gamma.norm_sqr()
    }
}

pub fn moments(mix: &CoherentMixture) -> MomentSummary {
    let mut mean_gamma = Complex64::new(0.0, 0.0);
    let mut mean_abs2 = 0.0;
    for t in mix.terms() {
        mean_gamma += t.amplitude * t.weight;
        mean_abs2 += t.weight * t.amplitude.norm_sqr();
    }
    MomentSummary { mean_gamma, mean_abs2 }
}

/// Exact attenuated marginal `Σ_k w_k |Aγ_k⟩⟨Aγ_k|` truncated at `n_max`.
pub fn attenuate_exact(
    mix: &CoherentMixture,
    attenuation: Attenuation,
    n_max: usize,
    tail_tolerance: f64,
) -> Result<SingleModeState> {
    mix.scaled(Complex64::new(attenuation.value(), 0.0)).single_mode_state(n_max, tail_tolerance)
}

/// Hermitian, unit-trace 2×2 matrix on `{|0⟩, |1⟩}` that need not be
/// positive: the second-order attenuated state has a negative eigenvalue of
/// order `A⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelMatrix {
    matrix: CMatrix,
}

impl TwoLevelMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// Validates positivity and converts into a [`QubitState`].
    pub fn to_qubit_state(&self) -> Result<QubitState> {
        QubitState::new(self.matrix.clone())
    }
}

/// Second-order attenuated state on `{|0⟩, |1⟩}`.
pub fn attenuate_two_level(ms: &MomentSummary, attenuation: Attenuation) -> Result<TwoLevelMatrix> {
    let a = attenuation.value();
    let population = a * a * ms.mean_abs2;
    if population >= 1.0 {
        return Err(Error::InvalidTruncation { population });
    }
    let off = ms.mean_gamma * a;
    let matrix = CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(1.0 - population, 0.0), off.conj(), off, Complex64::new(population, 0.0)],
    );
    Ok(TwoLevelMatrix { matrix })
}

/// `⟨n|ρ_A|n⟩ = Σ_k w_k (A²|γ_k|²)ⁿ e^{−A²|γ_k|²} / n!`.
pub fn diagonal_term(mix: &CoherentMixture, attenuation: Attenuation, n: usize) -> f64 {
    let a2 = attenuation.value().powi(2);
    let log_factorial: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    mix.terms()
        .iter()
        .map(|t| {
            let x = a2 * t.amplitude.norm_sqr();
            let poisson = if n == 0 {
                (-x).exp()
            } else if x == 0.0 {
                0.0
            } else {
                (n as f64 * x.ln() - x - log_factorial).exp()
            };
            t.weight * poisson
        })
        .sum()
}

/// Both sides of the purity condition `⟨|γ|²⟩ − |⟨γ⟩|² = A²⟨|γ|²⟩² ≪ ⟨|γ|²⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PurityCheck {
    pub satisfied: bool,
    pub variance: f64,
    pub threshold: f64,
}

/// Evaluates the purity condition as an order bound: the variance may not
/// exceed `slack · A²⟨|γ|²⟩²`, and that threshold must itself be below
/// [`MUCH_LESS_FRACTION`]` · ⟨|γ|²⟩`.
pub fn purity_condition(ms: &MomentSummary, attenuation: Attenuation, slack: f64) -> Result<PurityCheck> {
    if ms.mean_abs2.is_nan() || ms.mean_abs2 <= 0.0 {
        return Err(Error::InvalidParameter("purity condition needs <|γ|²> > 0".into()));
    }
    let a = attenuation.value();
    let variance = ms.variance();
    let threshold = a * a * ms.mean_abs2 * ms.mean_abs2;
    // Relative slack of 1e-12 keeps A = 0.1, <|γ|²> = 1 on the boundary inclusive.
    let small = threshold <= MUCH_LESS_FRACTION * ms.mean_abs2 * (1.0 + 1e-12);
    Ok(PurityCheck { satisfied: variance <= threshold * slack && small, variance, threshold })
}

/// Attenuated pure state `|Φ⟩` on `{|0⟩, |1⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiState {
    /// Unit-norm amplitudes `(⟨0|Φ⟩, ⟨1|Φ⟩)`.
    pub ket: CVector,
    /// `1 − ‖v‖²` of the vector before renormalization.
    pub norm_residual: f64,
}

/// `|Φ⟩ = [1 − A²⟨|γ|²⟩]^{1/2} (|0⟩ + A ⟨|γ|²⟩/⟨γ*⟩ |1⟩)`, renormalized.
///
/// The prefactor only normalizes to leading order; the defect is kept in
/// [`PhiState::norm_residual`].
pub fn phi_state(ms: &MomentSummary, attenuation: Attenuation) -> Result<PhiState> {
    if ms.mean_gamma.norm() <= 1e-12 * ms.mean_abs2.sqrt().max(1.0) {
        return Err(Error::ZeroMeanAmplitude);
    }
    let a = attenuation.value();
    let population = a * a * ms.mean_abs2;
    if population >= 1.0 {
        return Err(Error::InvalidTruncation { population });
    }
    let prefactor = (1.0 - population).sqrt();
    let one = Complex64::new(a * ms.mean_abs2, 0.0) / ms.mean_gamma.conj();
    let raw = CVector::from_vec(vec![Complex64::new(prefactor, 0.0), one * prefactor]);
    let norm_sqr = raw.norm_squared();
    Ok(PhiState { ket: raw.unscale(norm_sqr.sqrt()), norm_residual: 1.0 - norm_sqr })
}

/// Density matrix on `{|0⟩, |1⟩}`: Hermitian, unit trace and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    matrix: CMatrix,
}

impl QubitState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (2, 2) {
            return Err(Error::DimensionMismatch { expected: 2, found: matrix.nrows() });
        }
        let asymmetry = linalg::hermitian_asymmetry(&matrix);
        if asymmetry > QUBIT_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > QUBIT_TOL {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = linalg::min_eigenvalue(&matrix);
        if min_eigenvalue < -QUBIT_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// `|v⟩⟨v|` for a unit vector.
    pub fn from_ket(ket: &CVector) -> Result<Self> {
        Self::new(linalg::outer(ket))
    }

    /// Restriction of `state` to `{|0⟩, |1⟩}`, renormalized.
    pub fn projected(state: &SingleModeState) -> Result<Self> {
        let p = state.project(1);
        let trace = p.trace().re;
        if trace.is_nan() || trace <= 0.0 {
            return Err(Error::InvalidParameter("state has no weight on {|0⟩, |1⟩}".into()));
        }
        Self::new(p.unscale(trace))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}
