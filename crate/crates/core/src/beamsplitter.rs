//! The two-mode quantum beam splitter `S(λ) = exp(λ a₁†a₂ − λ* a₂†a₁)`.
//!
//! `S(λ)` conserves `N₁ + N₂`, so it is assembled one photon-number block at
//! a time. With `λ = |θ|e^{−iφ}` it maps `|γ⟩₁|0⟩₂` to
//! `|γ cos|θ|⟩₁ |−e^{iφ} γ sin|θ|⟩₂`, which is the cavity transformation for
//! tuning `κ = e^{iφ} tan|θ|`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{Ket, TwoModeKet, TwoModeState};
use crate::linalg::{self, CMatrix, CVector};

/// Normalization tolerance for atom amplitudes.
const ATOM_NORM_TOL: f64 = 1e-12;

/// The tuning `κ = α/(βr)` set by the injected atom state and the ratio
/// `r` of the atom-photon coupling constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    kappa: Complex64,
    alpha: Complex64,
    beta: Complex64,
    r: f64,
}

impl Tuning {
    pub fn from_atom(alpha: Complex64, beta: Complex64, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("coupling ratio r must be positive, got {r}")));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > ATOM_NORM_TOL {
            return Err(Error::AtomNotNormalized { norm });
        }
        if beta.norm() == 0.0 {
            return Err(Error::DegenerateAtom);
        }
        Ok(Self { kappa: alpha / (beta * r), alpha, beta, r })
    }

    /// The tuning `κ` realized with `r = 1` and a real positive `β`.
    pub fn from_kappa(kappa: Complex64) -> Result<Self> {
        if !(kappa.re.is_finite() && kappa.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be finite, got {kappa}")));
        }
        let beta = 1.0 / (1.0 + kappa.norm_sqr()).sqrt();
        Ok(Self { kappa, alpha: kappa * beta, beta: Complex64::new(beta, 0.0), r: 1.0 })
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `A = 1/√(1+|κ|²)`, the amplitude left in mode one.
    pub fn attenuation(&self) -> f64 {
        1.0 / (1.0 + self.kappa.norm_sqr()).sqrt()
    }
}

/// Beam-splitter angles `(|θ|, φ)` with `e^{iφ} tan|θ| = κ`,
/// `|θ| ∈ [0, π/2)` and `φ ∈ (−π, π]`.
pub fn tuning_to_lambda(tuning: &Tuning) -> (f64, f64) {
    let kappa = tuning.kappa();
    let theta_abs = kappa.norm().atan();
    let mut phi = if kappa.norm() == 0.0 { 0.0 } else { kappa.arg() };
    if phi <= -PI {
        phi = PI;
    }
    (theta_abs, phi)
}

/// Photon fractions `(|κ|²/(1+|κ|²), 1/(1+|κ|²))`: the share of mode-one
/// photons converted into mode two, and the share of mode-two photons
/// converted into mode one.
pub fn conversion_fractions(kappa: Complex64) -> (f64, f64) {
    let k2 = kappa.norm_sqr();
    (k2 / (1.0 + k2), 1.0 / (1.0 + k2))
}

/// `S(λ)` restricted to every block `N = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSplitter {
    theta_abs: f64,
    phi: f64,
    lambda: Complex64,
    block_unitaries: Vec<CMatrix>,
}

impl BeamSplitter {
    /// Builds `S(|θ|e^{−iφ})` for `|θ| ∈ [0, π/2)`.
    pub fn new(theta_abs: f64, phi: f64, n_max: usize) -> Result<Self> {
        if !(0.0..FRAC_PI_2).contains(&theta_abs) || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beam splitter needs |θ| in [0, π/2) and finite φ, got ({theta_abs}, {phi})"
            )));
        }
        Ok(Self::assemble(theta_abs, phi, n_max, Exec::default()))
    }

    pub fn from_tuning(tuning: &Tuning, n_max: usize) -> Result<Self> {
        let (theta_abs, phi) = tuning_to_lambda(tuning);
        Self::new(theta_abs, phi, n_max)
    }

    /// Builds `S(λ)` for any complex `λ`, e.g. the inverse `S(−λ)`.
    pub fn from_lambda(lambda: Complex64, n_max: usize) -> Self {
        Self::from_lambda_with(lambda, n_max, Exec::default())
    }

    pub fn from_lambda_with(lambda: Complex64, n_max: usize, exec: Exec) -> Self {
        // λ = |θ| e^{−iφ}
        let phi = if lambda.norm() == 0.0 { 0.0 } else { -lambda.arg() };
        Self::assemble(lambda.norm(), phi, n_max, exec)
    }

    fn assemble(theta_abs: f64, phi: f64, n_max: usize, exec: Exec) -> Self {
        let lambda = Complex64::from_polar(theta_abs, -phi);
        let block_unitaries = exec.map_range(n_max + 1, |n| linalg::expm_skew_hermitian(&generator_block(lambda, n)));
        Self { theta_abs, phi, lambda, block_unitaries }
    }

    pub fn theta_abs(&self) -> f64 {
        self.theta_abs
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn n_max(&self) -> usize {
        self.block_unitaries.len() - 1
    }

    /// The unitary on block `N`, indexed by `n2`.
    pub fn block(&self, total: usize) -> &CMatrix {
        &self.block_unitaries[total]
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.block_unitaries
    }

    /// `S(−λ) = S(λ)⁻¹`.
    pub fn inverse(&self) -> Self {
        Self::from_lambda(-self.lambda, self.n_max())
    }

    /// Largest `|U†U − I|` entry over all blocks.
    pub fn unitarity_error(&self) -> f64 {
        self.block_unitaries.iter().map(linalg::unitarity_error).fold(0.0, f64::max)
    }

    fn check_cutoff(&self, n_max: usize) -> Result<()> {
        if n_max != self.n_max() {
            return Err(Error::DimensionMismatch { expected: self.n_max(), found: n_max });
        }
        Ok(())
    }

    /// `S ρ S†`.
    pub fn apply(&self, state: &TwoModeState) -> Result<TwoModeState> {
        self.apply_with(state, Exec::default())
    }

    pub fn apply_with(&self, state: &TwoModeState, exec: Exec) -> Result<TwoModeState> {
        self.check_cutoff(state.cutoff().n_max())?;
        Ok(state.sandwich(&self.block_unitaries, &self.block_unitaries, exec))
    }

    /// `S|ψ⟩`.
    pub fn apply_ket(&self, ket: &TwoModeKet) -> Result<TwoModeKet> {
        self.check_cutoff(ket.cutoff().n_max())?;
        let mut out = Vec::with_capacity(ket.amplitudes().len());
        for (n, u) in self.block_unitaries.iter().enumerate() {
            out.extend((u * CVector::from_column_slice(ket.block(n))).iter().copied());
        }
        TwoModeKet::new(ket.cutoff(), CVector::from_vec(out))
    }
}

/// `λ a₁†a₂ − λ* a₂†a₁` on block `N`, basis `|N−n2, n2⟩` indexed by `n2`.
pub fn generator_block(lambda: Complex64, total: usize) -> CMatrix {
    let mut g = CMatrix::zeros(total + 1, total + 1);
    for n2 in 0..total {
        let n1 = total - n2;
        // a₁†a₂ |n1−1, n2+1⟩ = √(n1 (n2+1)) |n1, n2⟩ and a₂†a₁ is its adjoint.
        let amp = ((n1 * (n2 + 1)) as f64).sqrt();
        g[(n2, n2 + 1)] = lambda * amp;
        g[(n2 + 1, n2)] = -lambda.conj() * amp;
    }
    g
}
