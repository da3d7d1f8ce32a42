//! Broadcasting coherent-state mixtures through the cavity beam splitter.
//!
//! Mode one starts in `Σ_k w_k |γ_k⟩⟨γ_k|`, mode two in vacuum. The output
//! is `Σ_k w_k |Aγ_k⟩⟨Aγ_k| ⊗ |−κAγ_k⟩⟨−κAγ_k|` with `A = 1/√(1+|κ|²)`;
//! at `κ = −1` both marginals equal `Σ_k w_k |γ_k/√2⟩⟨γ_k/√2|`.
//!
//! Every broadcast is computed twice, by conjugating with `S(λ)` and from
//! the closed form, and the two must agree.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::beamsplitter::{BeamSplitter, Tuning};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{
    coherent_product_ket, mixture_state_with, trace_distance, CoherentMixture, FockCutoff, Mode, SingleModeState,
    TwoModeKet, TwoModeState,
};

/// Largest trace distance tolerated between the numerical and closed-form outputs.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Purity threshold for the clone test.
const PURE_TOL: f64 = 1e-8;

/// Marginals of a broadcast and how close they are to each other and to
/// the closed-form targets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BroadcastReport {
    pub kappa: Complex64,
    pub attenuation: f64,
    #[serde(skip)]
    pub marginal1: SingleModeState,
    #[serde(skip)]
    pub marginal2: SingleModeState,
    /// Trace distance between the two output marginals.
    pub marginal_distance: f64,
    /// Distance of each marginal to `Σ w_k |Aγ_k⟩⟨Aγ_k|` and `Σ w_k |−κAγ_k⟩⟨−κAγ_k|`.
    pub target_distance1: f64,
    pub target_distance2: f64,
    /// Distance between beam-splitter conjugation and the closed form.
    pub consistency_distance: f64,
    pub output_purity: f64,
    pub marginal_purity1: f64,
    pub marginal_purity2: f64,
    pub marginal_entropy1: f64,
    pub marginal_entropy2: f64,
    pub photon_distribution1: Vec<f64>,
    pub photon_distribution2: Vec<f64>,
}

/// [`broadcast_with`] using the default execution policy.
pub fn broadcast(
    mix: &CoherentMixture,
    kappa: Complex64,
    cutoff: FockCutoff,
    tail_tolerance: f64,
) -> Result<(TwoModeState, BroadcastReport)> {
    broadcast_with(mix, kappa, cutoff, tail_tolerance, Exec::default())
}

/// Pushes `mix ⊗ |0⟩⟨0|` through the cavity transformation with tuning `κ`.
///
/// Fails with [`Error::Inconsistent`] if conjugation by `S(λ)` and the closed
/// form differ by more than [`CONSISTENCY_TOL`].
pub fn broadcast_with(
    mix: &CoherentMixture,
    kappa: Complex64,
    cutoff: FockCutoff,
    tail_tolerance: f64,
    exec: Exec,
) -> Result<(TwoModeState, BroadcastReport)> {
    let tuning = Tuning::from_kappa(kappa)?;
    let a = tuning.attenuation();
    let splitter = BeamSplitter::from_tuning(&tuning, cutoff.n_max())?;
    let input = mixture_state_with(mix, cutoff, tail_tolerance, exec)?;
    let output = splitter.apply_with(&input, exec)?;

    let closed_form = closed_form_output(mix, kappa, cutoff, tail_tolerance, exec)?;
    let consistency_distance = trace_distance(&output, &closed_form)?;
    if consistency_distance > CONSISTENCY_TOL {
        return Err(Error::Inconsistent { distance: consistency_distance, tolerance: CONSISTENCY_TOL });
    }

    let n_max = cutoff.n_max();
    let marginal1 = output.partial_trace(Mode::One);
    let marginal2 = output.partial_trace(Mode::Two);
    let target1 = mix.scaled(Complex64::new(a, 0.0)).single_mode_state(n_max, tail_tolerance)?;
    let target2 = mix.scaled(-kappa * a).single_mode_state(n_max, tail_tolerance)?;
    let report = BroadcastReport {
        kappa,
        attenuation: a,
        marginal_distance: trace_distance(&marginal1, &marginal2)?,
        target_distance1: trace_distance(&marginal1, &target1)?,
        target_distance2: trace_distance(&marginal2, &target2)?,
        consistency_distance,
        output_purity: output.purity(),
        marginal_purity1: marginal1.purity(),
        marginal_purity2: marginal2.purity(),
        marginal_entropy1: marginal1.entropy(),
        marginal_entropy2: marginal2.entropy(),
        photon_distribution1: marginal1.photon_distribution(),
        photon_distribution2: marginal2.photon_distribution(),
        marginal1,
        marginal2,
    };
    Ok((output, report))
}

/// `Σ_k w_k |Aγ_k⟩⟨Aγ_k| ⊗ |−κAγ_k⟩⟨−κAγ_k|` built directly from coherent kets.
pub fn closed_form_output(
    mix: &CoherentMixture,
    kappa: Complex64,
    cutoff: FockCutoff,
    tail_tolerance: f64,
    exec: Exec,
) -> Result<TwoModeState> {
    let a = 1.0 / (1.0 + kappa.norm_sqr()).sqrt();
    let kets = exec
        .map_slice(mix.terms(), |t| {
            coherent_product_ket(t.amplitude * a, -kappa * t.amplitude * a, cutoff, tail_tolerance).map(|k| k.value)
        })
        .into_iter()
        .collect::<Result<Vec<TwoModeKet>>>()?;
    let weights: Vec<f64> = mix.terms().iter().map(|t| t.weight).collect();
    Ok(crate::fock::coherent::pure_mixture(cutoff, &weights, &kets, exec))
}

/// Input mixture whose broadcast at `κ = −1` has both marginals equal to
/// `target`.
///
/// A continuous P-function would be replaced by `½ P(γ/√2, γ*/√2)`. For a
/// discrete mixture the change of variables only moves each atom from
/// `γ_k` to `√2 γ_k`; the `½` Jacobian is absorbed and weights are unchanged.
pub fn prepare_for_broadcast(target: &CoherentMixture) -> CoherentMixture {
    target.scaled(Complex64::new(SQRT_2, 0.0))
}

/// True when broadcasting `mix` at `κ = −1` yields a pure, factorized output
/// (exact cloning), which happens only for a single coherent state.
pub fn is_clone_case(mix: &CoherentMixture, cutoff: FockCutoff, tail_tolerance: f64) -> Result<bool> {
    let pruned = mix.pruned();
    let (_, report) = broadcast(&pruned, Complex64::new(-1.0, 0.0), cutoff, tail_tolerance)?;
    Ok(report.output_purity >= 1.0 - PURE_TOL
        && report.marginal_purity1 >= 1.0 - PURE_TOL
        && report.marginal_purity2 >= 1.0 - PURE_TOL)
}
