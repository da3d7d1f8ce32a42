//! Raman pump channel and its steady states.
//!
//! One atom prepared in `α|1⟩ + β|2⟩` crosses the cavity, interacts for a
//! time `τ` and is traced out:
//! `ρ ↦ tr_a[U(τ) (ρ ⊗ ρ_a) U†(τ)] = K₁ρK₁† + K₂ρK₂†` with
//! `K_j = ⟨j|U(τ)|α,β⟩`.
//!
//! The atom–field Hamiltonian (ħ = 1) is
//!
//! ```text
//! H = g [ r (a₁†a₂ |1⟩⟨2| + a₂†a₁ |2⟩⟨1|) + s (a₁†a₁ |1⟩⟨1| + r² a₂†a₂ |2⟩⟨2|) ]
//! ```
//!
//! with `s = 1` when Stark terms are included and `s = 0` otherwise. With
//! Stark terms `H = g D†D` for `D = a₁⟨1| + r a₂⟨2|`, so every field state
//! annihilated by `κ a₁ + a₂` (`κ = α/(βr)`) is dark and hence a fixed point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beamsplitter::Tuning;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{trace_distance, FockCutoff, TwoModeKet, TwoModeState};
use crate::linalg::{self, CMatrix};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Parameters of the Raman atom–field interaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RamanHamiltonianConfig {
    /// Coupling strength (1/time).
    pub g: f64,
    /// Ratio of the mode-two to mode-one atom–photon coupling constants.
    pub r: f64,
    pub include_stark: bool,
    /// Interaction time of one atom.
    pub tau: f64,
}

impl Default for RamanHamiltonianConfig {
    fn default() -> Self {
        Self { g: 1.0, r: 1.0, include_stark: true, tau: 1.0 }
    }
}

impl RamanHamiltonianConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be positive, got {}", self.g)));
        }
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {}", self.r)));
        }
        if !(self.tau.is_finite() && self.tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be non-negative, got {}", self.tau)));
        }
        Ok(())
    }

    /// Hamiltonian on the sector with `N` field photons, in the basis
    /// `|N−n2, n2⟩|1⟩` (first `N+1` entries) then `|N−n2, n2⟩|2⟩`.
    pub fn sector_hamiltonian(&self, total: usize) -> CMatrix {
        let d = total + 1;
        let mut h = CMatrix::zeros(2 * d, 2 * d);
        let stark = if self.include_stark { 1.0 } else { 0.0 };
        for n2 in 0..=total {
            let n1 = total - n2;
            h[(n2, n2)] = Complex64::new(self.g * stark * n1 as f64, 0.0);
            h[(d + n2, d + n2)] = Complex64::new(self.g * stark * self.r * self.r * n2 as f64, 0.0);
        }
        for n2 in 0..total {
            let n1 = total - n2;
            // ⟨n1, n2| a₁†a₂ |n1−1, n2+1⟩ = √(n1 (n2+1)), coupling |2⟩ (column) to |1⟩ (row).
            let amp = Complex64::new(self.g * self.r * ((n1 * (n2 + 1)) as f64).sqrt(), 0.0);
            h[(n2, d + n2 + 1)] = amp;
            h[(d + n2 + 1, n2)] = amp;
        }
        h
    }
}

/// The pump map as a pair of block-diagonal Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanChannel {
    config: RamanHamiltonianConfig,
    alpha: Complex64,
    beta: Complex64,
    kraus: [Vec<CMatrix>; 2],
}

impl RamanChannel {
    /// `K_j = ⟨j|U(τ)(I ⊗ (α|1⟩+β|2⟩))` for `j ∈ {1, 2}`, one block per
    /// total photon number.
    pub fn new(config: RamanHamiltonianConfig, alpha: Complex64, beta: Complex64, n_max: usize) -> Result<Self> {
        Self::new_with(config, alpha, beta, n_max, Exec::default())
    }

    pub fn new_with(
        config: RamanHamiltonianConfig,
        alpha: Complex64,
        beta: Complex64,
        n_max: usize,
        exec: Exec,
    ) -> Result<Self> {
        config.validate()?;
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::AtomNotNormalized { norm });
        }
        let pairs = exec.map_range(n_max + 1, |n| {
            let d = n + 1;
            let generator = config.sector_hamiltonian(n).map(|z| Complex64::new(0.0, -config.tau) * z);
            let u = linalg::expm_skew_hermitian(&generator);
            let k1 = u.view((0, 0), (d, d)) * alpha + u.view((0, d), (d, d)) * beta;
            let k2 = u.view((d, 0), (d, d)) * alpha + u.view((d, d), (d, d)) * beta;
            (k1, k2)
        });
        let (k1, k2) = pairs.into_iter().unzip();
        Ok(Self { config, alpha, beta, kraus: [k1, k2] })
    }

    /// Channel whose injected atoms realize `tuning` (`α`, `β` and `r` are
    /// taken from it; `config.r` is overridden).
    pub fn from_tuning(config: RamanHamiltonianConfig, tuning: &Tuning, n_max: usize) -> Result<Self> {
        let config = RamanHamiltonianConfig { r: tuning.r(), ..config };
        Self::new(config, tuning.alpha(), tuning.beta(), n_max)
    }

    pub fn config(&self) -> &RamanHamiltonianConfig {
        &self.config
    }

    pub fn atom(&self) -> (Complex64, Complex64) {
        (self.alpha, self.beta)
    }

    /// `κ = α/(βr)`, or `None` when `β = 0`.
    pub fn kappa(&self) -> Option<Complex64> {
        (self.beta.norm() > 0.0).then(|| self.alpha / (self.beta * self.config.r))
    }

    pub fn n_max(&self) -> usize {
        self.kraus[0].len() - 1
    }

    /// Block `N` of `K_j`, `j ∈ {0, 1}` for atomic levels |1⟩, |2⟩.
    pub fn kraus_block(&self, j: usize, total: usize) -> &CMatrix {
        &self.kraus[j][total]
    }

    /// Largest entry of `|K₁†K₁ + K₂†K₂ − I|` over all blocks.
    pub fn completeness_error(&self) -> f64 {
        (0..=self.n_max())
            .map(|n| {
                let (k1, k2) = (&self.kraus[0][n], &self.kraus[1][n]);
                let sum = k1.adjoint() * k1 + k2.adjoint() * k2;
                linalg::max_abs(&(sum - CMatrix::identity(n + 1, n + 1)))
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, rho: &TwoModeState) -> Result<TwoModeState> {
        self.apply_with(rho, Exec::default())
    }

    /// `K₁ρK₁† + K₂ρK₂†`.
    pub fn apply_with(&self, rho: &TwoModeState, exec: Exec) -> Result<TwoModeState> {
        if rho.cutoff().n_max() != self.n_max() {
            return Err(Error::DimensionMismatch { expected: self.n_max(), found: rho.cutoff().n_max() });
        }
        let [k1, k2] = &self.kraus;
        Ok(rho.map_blocks(exec, |row, col, b| &k1[row] * b * k1[col].adjoint() + &k2[row] * b * k2[col].adjoint()))
    }
}

/// Outcome of iterating the pump map.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyRun {
    pub state: TwoModeState,
    pub iterations: usize,
    pub converged: bool,
    /// Trace distance between the last two iterates.
    pub distance: f64,
    /// Trace distance between successive iterates, one entry per step.
    pub history: Vec<f64>,
}

impl SteadyRun {
    /// Turns a non-converged run into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                distance: self.distance,
                last: Box::new(self.state),
            })
        }
    }
}

/// Applies the channel until two successive iterates are within `tol` in
/// trace distance, or `max_iter` steps have been taken.
pub fn iterate_to_steady(channel: &RamanChannel, rho0: &TwoModeState, tol: f64, max_iter: usize) -> Result<SteadyRun> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut state = rho0.clone();
    let mut history = Vec::new();
    let mut distance = f64::INFINITY;
    for step in 1..=max_iter {
        let next = channel.apply(&state)?;
        distance = trace_distance(&next, &state)?;
        history.push(distance);
        state = next;
        if distance <= tol {
            return Ok(SteadyRun { state, iterations: step, converged: true, distance, history });
        }
    }
    Ok(SteadyRun { state, iterations: max_iter, converged: false, distance, history })
}

/// Trace distance from each iterate `ρ_l`, `l = 0..=steps`, to `reference`.
pub fn convergence_profile(
    channel: &RamanChannel,
    rho0: &TwoModeState,
    reference: &TwoModeState,
    steps: usize,
) -> Result<Vec<f64>> {
    let mut state = rho0.clone();
    let mut profile = vec![trace_distance(&state, reference)?];
    for _ in 0..steps {
        state = channel.apply(&state)?;
        profile.push(trace_distance(&state, reference)?);
    }
    Ok(profile)
}

/// Seed coefficients `C_{N,0}` and tuning `κ` of a product steady state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSpec {
    pub seed: Vec<Complex64>,
    pub kappa: Complex64,
}

impl SteadyStateSpec {
    /// Seed reproducing the steady state reached from `|γ⟩₁|0⟩₂`:
    /// `C_{N,0} = (Aγ)^N/√N!` with `A = 1/√(1+|κ|²)`.
    pub fn coherent(gamma: Complex64, kappa: Complex64, n_max: usize) -> Self {
        let a = gamma / (1.0 + kappa.norm_sqr()).sqrt();
        let mut seed = Vec::with_capacity(n_max + 1);
        seed.push(Complex64::new(1.0, 0.0));
        for n in 1..=n_max {
            let prev = seed[n - 1];
            seed.push(prev * a / (n as f64).sqrt());
        }
        Self { seed, kappa }
    }
}

/// `C_{n1,n2} = (−κ)^{n2} √(N!/(n1! n2!)) C_{N,0}` on `n1 + n2 ≤ n_max`,
/// normalized. Seed entries beyond its length are zero.
pub fn analytic_steady_state(spec: &SteadyStateSpec, cutoff: FockCutoff) -> Result<TwoModeKet> {
    if spec.seed.iter().take(cutoff.num_blocks()).all(|c| c.norm() == 0.0) {
        return Err(Error::DegenerateSeed);
    }
    let minus_kappa = -spec.kappa;
    TwoModeKet::from_fn(cutoff, |n1, n2| {
        let total = n1 + n2;
        let Some(&seed) = spec.seed.get(total) else {
            return Complex64::new(0.0, 0.0);
        };
        seed * minus_kappa.powu(n2 as u32) * binomial(total, n2).sqrt()
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `‖Φ(ρ) − ρ‖` in trace distance for the pure state `ket`.
pub fn fixed_point_residual(channel: &RamanChannel, ket: &TwoModeKet) -> Result<f64> {
    let rho = ket.to_density();
    trace_distance(&channel.apply(&rho)?, &rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_product_ket, Mode};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fifty_fifty() -> (Complex64, Complex64) {
        let s = 0.5_f64.sqrt();
        (c(-s, 0.0), c(s, 0.0))
    }

    #[test]
    fn zero_time_channel_is_identity() {
        let (alpha, beta) = (c(0.6, 0.0), c(0.0, 0.8));
        let config = RamanHamiltonianConfig { tau: 0.0, ..Default::default() };
        let ch = RamanChannel::new(config, alpha, beta, 4).unwrap();
        for n in 0..=4 {
            let id = CMatrix::identity(n + 1, n + 1);
            assert!(linalg::max_abs(&(ch.kraus_block(0, n) - &id * alpha)) < 1e-15);
            assert!(linalg::max_abs(&(ch.kraus_block(1, n) - &id * beta)) < 1e-15);
        }
    }

    #[test]
    fn kraus_completeness() {
        for stark in [true, false] {
            let config = RamanHamiltonianConfig { g: 1.3, r: 0.7, include_stark: stark, tau: 2.1 };
            let ch = RamanChannel::new(config, c(0.6, 0.0), c(0.0, 0.8), 12).unwrap();
            assert!(ch.completeness_error() < 1e-10);
        }
    }

    #[test]
    fn vacuum_is_fixed() {
        let (alpha, beta) = fifty_fifty();
        let ch = RamanChannel::new(RamanHamiltonianConfig::default(), alpha, beta, 3).unwrap();
        let vac = TwoModeKet::number(FockCutoff::new(3), 0, 0).unwrap().to_density();
        let out = ch.apply(&vac).unwrap();
        assert!(trace_distance(&out, &vac).unwrap() < 1e-14);
    }

    #[test]
    fn one_photon_stays_in_its_block() {
        let (alpha, beta) = fifty_fifty();
        let ch = RamanChannel::new(RamanHamiltonianConfig::default(), alpha, beta, 4).unwrap();
        let rho = TwoModeKet::number(FockCutoff::new(4), 1, 0).unwrap().to_density();
        let out = ch.apply(&rho).unwrap();
        let pops = out.block_populations();
        assert!((pops[1] - 1.0).abs() < 1e-12);
        assert!(out.validate().is_ok());
    }

    #[test]
    fn hamiltonian_is_hermitian_and_conserving() {
        let config = RamanHamiltonianConfig { g: 0.8, r: 1.7, include_stark: true, tau: 1.0 };
        let h = config.sector_hamiltonian(5);
        assert!(linalg::hermitian_asymmetry(&h) < 1e-15);
        assert_eq!(h.nrows(), 12);
    }

    #[test]
    fn analytic_state_is_dark() {
        let config = RamanHamiltonianConfig { g: 1.0, r: 1.4, include_stark: true, tau: 0.37 };
        let tuning = Tuning::from_atom(c(0.6, 0.0), c(0.0, 0.8), 1.4).unwrap();
        let cutoff = FockCutoff::new(14);
        let ch = RamanChannel::from_tuning(config, &tuning, cutoff.n_max()).unwrap();
        let spec = SteadyStateSpec::coherent(c(0.9, 0.2), tuning.kappa(), cutoff.n_max());
        let ket = analytic_steady_state(&spec, cutoff).unwrap();
        assert!(fixed_point_residual(&ch, &ket).unwrap() < 1e-10);
    }

    #[test]
    fn vacuum_seed_and_degenerate_seed() {
        let cutoff = FockCutoff::new(3);
        let spec = SteadyStateSpec { seed: vec![c(1.0, 0.0)], kappa: c(-1.0, 0.0) };
        let ket = analytic_steady_state(&spec, cutoff).unwrap();
        assert_eq!(ket.amplitude(0, 0), c(1.0, 0.0));
        let zero = SteadyStateSpec { seed: vec![c(0.0, 0.0); 4], kappa: c(-1.0, 0.0) };
        assert_eq!(analytic_steady_state(&zero, cutoff), Err(Error::DegenerateSeed));
    }

    #[test]
    fn coherent_seed_gives_product_state() {
        let cutoff = FockCutoff::new(20);
        let (gamma, kappa) = (c(1.0, 0.0), c(2.0, -0.5));
        let a = 1.0 / (1.0 + kappa.norm_sqr()).sqrt();
        let ket = analytic_steady_state(&SteadyStateSpec::coherent(gamma, kappa, 20), cutoff).unwrap();
        let product = coherent_product_ket(gamma * a, -kappa * gamma * a, cutoff, 1e-10).unwrap().value;
        assert!(crate::fock::overlap(&product, &ket).unwrap().norm() > 1.0 - 1e-12);
        let rho = ket.to_density();
        assert!((rho.mean_photons(Mode::Two) - kappa.norm_sqr() * a * a).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_converges_immediately() {
        let (alpha, beta) = fifty_fifty();
        let cutoff = FockCutoff::new(10);
        let ch = RamanChannel::new(RamanHamiltonianConfig::default(), alpha, beta, 10).unwrap();
        let spec = SteadyStateSpec::coherent(c(0.7, 0.0), c(-1.0, 0.0), 10);
        let rho = analytic_steady_state(&spec, cutoff).unwrap().to_density();
        let run = iterate_to_steady(&ch, &rho, 1e-8, 10).unwrap();
        assert!(run.converged);
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn non_convergence_reports_last_iterate() {
        let (alpha, beta) = fifty_fifty();
        let cutoff = FockCutoff::new(6);
        let ch = RamanChannel::new(RamanHamiltonianConfig::default(), alpha, beta, 6).unwrap();
        let rho = TwoModeKet::number(cutoff, 2, 0).unwrap().to_density();
        let run = iterate_to_steady(&ch, &rho, 1e-14, 2).unwrap();
        assert!(!run.converged);
        assert!(matches!(run.require_converged(), Err(Error::NotConverged { iterations: 2, .. })));
    }
}
