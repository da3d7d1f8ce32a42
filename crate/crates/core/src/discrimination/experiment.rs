//! Seeded Monte Carlo runs of the discrimination measurement.
//!
//! Trials are split into fixed batches; batch `b` draws from a ChaCha8
//! stream `b` of the run seed. Counts therefore depend only on the seed and
//! the trial count, never on how batches are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    attenuate_exact, build_povm, moments, phi_state, purity_condition, Attenuation, MomentSummary, PovmTriple, Priors,
    PurityCheck, QubitState,
};
use crate::error::Result;
use crate::exec::Exec;
use crate::fock::{CoherentMixture, DEFAULT_TAIL_TOLERANCE};
use crate::linalg::CMatrix;

const BATCH_SIZE: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentOptions {
    pub n_samples: u64,
    pub seed: u64,
    /// Slack on the purity condition.
    pub purity_slack: f64,
    /// Cutoff for the exact attenuated states used when the purity
    /// condition fails.
    pub n_max: usize,
    pub tail_tolerance: f64,
    #[serde(skip)]
    pub exec: Exec,
}

impl ExperimentOptions {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            purity_slack: 1.0,
            n_max: 40,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            exec: Exec::default(),
        }
    }
}

/// Outcome tallies. `rho` and `sigma` count conclusive outcomes naming that
/// state; `errors` counts conclusive outcomes naming the wrong one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub rho: u64,
    pub sigma: u64,
    pub inconclusive: u64,
    pub errors: u64,
    pub true_rho: u64,
    pub true_sigma: u64,
}

impl OutcomeCounts {
    fn add(&mut self, other: &OutcomeCounts) {
        self.rho += other.rho;
        self.sigma += other.sigma;
        self.inconclusive += other.inconclusive;
        self.errors += other.errors;
        self.true_rho += other.true_rho;
        self.true_sigma += other.true_sigma;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticSummary {
    /// `|⟨Φ_σ|Φ_ρ⟩|`.
    pub s: f64,
    /// Success probability of the POVM, `1 − s` for equal priors.
    pub pmax: f64,
    pub c_rho: f64,
    pub c_sigma: f64,
    /// Prior-weighted Born probability of a wrong conclusive outcome.
    pub error_probability: f64,
    pub inconclusive_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalRates {
    pub success: f64,
    pub error: f64,
    pub inconclusive: f64,
    /// Binomial standard deviation of the success rate around `pmax`.
    pub success_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub n_samples: u64,
    pub attenuation: Option<Attenuation>,
    pub moments_rho: Option<MomentSummary>,
    pub moments_sigma: Option<MomentSummary>,
    pub purity_rho: Option<PurityCheck>,
    pub purity_sigma: Option<PurityCheck>,
    /// True when the purity condition failed and exact attenuated states,
    /// projected to `{|0⟩, |1⟩}`, were measured instead of `|Φ⟩`.
    pub fallback_to_exact: bool,
    pub counts: OutcomeCounts,
    pub analytic: AnalyticSummary,
    pub empirical: EmpiricalRates,
}

/// Samples `n_samples` trials: the true state is drawn with the POVM's
/// priors, then an outcome from its Born probabilities.
pub fn run_qubit_experiment(
    states: [&CMatrix; 2],
    povm: &PovmTriple,
    n_samples: u64,
    seed: u64,
    exec: Exec,
) -> (OutcomeCounts, AnalyticSummary) {
    let probs = [povm.probabilities(states[0]), povm.probabilities(states[1])];
    let prior_rho = povm.priors.rho;
    let n_batches = n_samples.div_ceil(BATCH_SIZE);
    let batches = exec.map_range(n_batches as usize, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let start = b as u64 * BATCH_SIZE;
        let len = BATCH_SIZE.min(n_samples - start);
        let mut counts = OutcomeCounts::default();
        for _ in 0..len {
            let truth = if rng.random::<f64>() < prior_rho { 0 } else { 1 };
            let [p_rho, p_sigma, _] = probs[truth];
            let u: f64 = rng.random();
            if truth == 0 {
                counts.true_rho += 1;
            } else {
                counts.true_sigma += 1;
            }
            if u < p_rho {
                counts.rho += 1;
                counts.errors += u64::from(truth != 0);
            } else if u < p_rho + p_sigma {
                counts.sigma += 1;
                counts.errors += u64::from(truth != 1);
            } else {
                counts.inconclusive += 1;
            }
        }
        counts
    });
    let mut counts = OutcomeCounts::default();
    for c in &batches {
        counts.add(c);
    }
    let (pr, ps) = (povm.priors.rho, povm.priors.sigma);
    let analytic = AnalyticSummary {
        s: povm.overlap,
        pmax: povm.success_probability(),
        c_rho: povm.c_rho,
        c_sigma: povm.c_sigma,
        error_probability: pr * probs[0][1] + ps * probs[1][0],
        inconclusive_probability: pr * probs[0][2] + ps * probs[1][2],
    };
    (counts, analytic)
}

fn rates(counts: &OutcomeCounts, analytic: &AnalyticSummary, n: u64) -> EmpiricalRates {
    let n_f = n.max(1) as f64;
    EmpiricalRates {
        success: (counts.rho + counts.sigma - counts.errors) as f64 / n_f,
        error: counts.errors as f64 / n_f,
        inconclusive: counts.inconclusive as f64 / n_f,
        success_sigma: (analytic.pmax * (1.0 - analytic.pmax) / n_f).sqrt(),
    }
}

/// Attenuates both mixtures, builds the equal-prior POVM from their `|Φ⟩`
/// states and samples it.
///
/// When either mixture fails the purity condition the run still proceeds,
/// measuring the exact attenuated states restricted to `{|0⟩, |1⟩}`; this
/// is flagged in the report and errors can then occur.
pub fn run_discrimination_experiment(
    mix_rho: &CoherentMixture,
    mix_sigma: &CoherentMixture,
    attenuation: Attenuation,
    options: &ExperimentOptions,
) -> Result<ExperimentReport> {
    let (ms_rho, ms_sigma) = (moments(mix_rho), moments(mix_sigma));
    let phi_rho = phi_state(&ms_rho, attenuation)?;
    let phi_sigma = phi_state(&ms_sigma, attenuation)?;
    let purity_rho = purity_condition(&ms_rho, attenuation, options.purity_slack)?;
    let purity_sigma = purity_condition(&ms_sigma, attenuation, options.purity_slack)?;
    let povm = build_povm(&phi_rho.ket, &phi_sigma.ket, Priors::EQUAL)?;

    let fallback_to_exact = !(purity_rho.satisfied && purity_sigma.satisfied);
    let states = if fallback_to_exact {
        let project = |mix| -> Result<CMatrix> {
            let exact = attenuate_exact(mix, attenuation, options.n_max, options.tail_tolerance)?;
            Ok(QubitState::projected(&exact)?.matrix().clone())
        };
        [project(mix_rho)?, project(mix_sigma)?]
    } else {
        [QubitState::from_ket(&phi_rho.ket)?, QubitState::from_ket(&phi_sigma.ket)?].map(|q| q.matrix().clone())
    };

    let (counts, analytic) =
        run_qubit_experiment([&states[0], &states[1]], &povm, options.n_samples, options.seed, options.exec);
    Ok(ExperimentReport {
        seed: options.seed,
        n_samples: options.n_samples,
        attenuation: Some(attenuation),
        moments_rho: Some(ms_rho),
        moments_sigma: Some(ms_sigma),
        purity_rho: Some(purity_rho),
        purity_sigma: Some(purity_sigma),
        fallback_to_exact,
        empirical: rates(&counts, &analytic, options.n_samples),
        counts,
        analytic,
    })
}

impl ExperimentReport {
    /// Report for a run on explicitly given qubit states.
    pub fn from_qubit_run(counts: OutcomeCounts, analytic: AnalyticSummary, n_samples: u64, seed: u64) -> Self {
        Self {
            seed,
            n_samples,
            attenuation: None,
            moments_rho: None,
            moments_sigma: None,
            purity_rho: None,
            purity_sigma: None,
            fallback_to_exact: false,
            empirical: rates(&counts, &analytic, n_samples),
            counts,
            analytic,
        }
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::error::Error;
    use crate::linalg::{outer, CVector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn orthogonal_states_never_inconclusive() {
        let zero = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let one = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let povm = build_povm(&zero, &one, Priors::EQUAL).unwrap();
        let (counts, analytic) = run_qubit_experiment([&outer(&zero), &outer(&one)], &povm, 25_000, 7, Exec::default());
        assert_eq!(counts.inconclusive, 0);
        assert_eq!(counts.errors, 0);
        assert_eq!(counts.rho + counts.sigma, 25_000);
        assert_eq!(analytic.pmax, 1.0);
    }

    #[test]
    fn identical_mixtures_rejected() {
        let mix = CoherentMixture::single(c(1.0, 0.0));
        let err =
            run_discrimination_experiment(&mix, &mix, Attenuation::new(0.1).unwrap(), &ExperimentOptions::new(10, 1));
        assert!(matches!(err, Err(Error::StatesIdentical { .. })));
    }

    #[test]
    fn counts_do_not_depend_on_threads() {
        let (rho, sigma) = (CoherentMixture::single(c(1.0, 0.0)), CoherentMixture::single(c(0.0, 1.0)));
        let a = Attenuation::new(0.2).unwrap();
        let mut opts = ExperimentOptions::new(45_001, 99);
        opts.exec = Exec::Sequential;
        let seq = run_discrimination_experiment(&rho, &sigma, a, &opts).unwrap();
        opts.exec = Exec::Parallel;
        let par = run_discrimination_experiment(&rho, &sigma, a, &opts).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.counts.true_rho + seq.counts.true_sigma, 45_001);
    }

    #[test]
    fn fallback_flagged_for_broad_mixtures() {
        let rho = CoherentMixture::from_pairs(&[(0.5, c(1.0, 0.0)), (0.5, c(0.2, 0.0))]).unwrap();
        let sigma = CoherentMixture::single(c(0.0, 1.0));
        let report = run_discrimination_experiment(
            &rho,
            &sigma,
            Attenuation::new(0.1).unwrap(),
            &ExperimentOptions::new(1000, 3),
        )
        .unwrap();
        assert!(report.fallback_to_exact);
    }
}
