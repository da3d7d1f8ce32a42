mod common;

use common::{c, product_coherent};
use proptest::prelude::*;
use raman_cavity::beamsplitter::{BeamSplitter, Tuning};
use raman_cavity::cavity::{RamanChannel, RamanHamiltonianConfig};
use raman_cavity::fock::{mixture_state, overlap, trace_distance, CoherentMixture, FockCutoff, Mode, TwoModeState};
use raman_cavity::Complex64;

const N_MAX: usize = 16;

fn complex(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, p)| Complex64::from_polar(r, p))
}

fn mixture() -> impl Strategy<Value = CoherentMixture> {
    prop::collection::vec((0.05f64..1.0, complex(1.2)), 1..4).prop_map(|raw| {
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        let pairs: Vec<_> = raw.iter().map(|&(w, g)| (w / total, g)).collect();
        CoherentMixture::from_pairs(&pairs).unwrap()
    })
}

fn state(mix: &CoherentMixture) -> TwoModeState {
    mixture_state(mix, FockCutoff::new(N_MAX), 1e-6).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn marginals_are_states(mix in mixture()) {
        let rho = state(&mix);
        for mode in [Mode::One, Mode::Two] {
            let m = rho.partial_trace(mode);
            prop_assert!((m.trace() - 1.0).abs() < 1e-10);
            prop_assert!(m.min_eigenvalue() > -1e-10);
        }
        prop_assert!((rho.mean_photons(Mode::One) + rho.mean_photons(Mode::Two) - rho.mean_total_photons()).abs() < 1e-10);
    }

    #[test]
    fn dense_round_trip(mix in mixture()) {
        let rho = state(&mix);
        let back = TwoModeState::from_dense(rho.cutoff(), &rho.to_dense()).unwrap();
        prop_assert!(trace_distance(&rho, &back).unwrap() < 1e-14);
    }

    #[test]
    fn splitter_then_inverse_is_identity(theta in 0.0..1.5f64, phi in -3.1..3.1f64, mix in mixture()) {
        let bs = BeamSplitter::new(theta, phi, N_MAX).unwrap();
        prop_assert!(bs.unitarity_error() < 1e-12);
        let rho = state(&mix);
        let back = bs.inverse().apply(&bs.apply(&rho).unwrap()).unwrap();
        prop_assert!(trace_distance(&rho, &back).unwrap() < 1e-10);
    }

    #[test]
    fn splitter_maps_coherent_products(gamma in complex(1.0), kappa in complex(3.0)) {
        let cutoff = FockCutoff::new(30);
        let bs = BeamSplitter::from_tuning(&Tuning::from_kappa(kappa).unwrap(), 30).unwrap();
        let out = bs.apply_ket(&product_coherent(gamma, c(0.0, 0.0), cutoff)).unwrap();
        let a = 1.0 / (1.0 + kappa.norm_sqr()).sqrt();
        let target = product_coherent(gamma * a, -kappa * gamma * a, cutoff);
        prop_assert!(overlap(&target, &out).unwrap().norm_sqr() > 1.0 - 1e-10);
    }

    #[test]
    fn channel_is_linear_and_trace_preserving(
        kappa in complex(2.0),
        tau in 0.0..2.0f64,
        stark in any::<bool>(),
        p in 0.0..1.0f64,
        m1 in mixture(),
        m2 in mixture(),
    ) {
        let cfg = RamanHamiltonianConfig { g: 1.0, r: 1.0, include_stark: stark, tau };
        let ch = RamanChannel::from_tuning(cfg, &Tuning::from_kappa(kappa).unwrap(), N_MAX).unwrap();
        let (r1, r2) = (state(&m1), state(&m2));
        let mixed = TwoModeState::linear_combination(&[(p, &r1), (1.0 - p, &r2)]).unwrap();
        let lhs = ch.apply(&mixed).unwrap();
        let (o1, o2) = (ch.apply(&r1).unwrap(), ch.apply(&r2).unwrap());
        let rhs = TwoModeState::linear_combination(&[(p, &o1), (1.0 - p, &o2)]).unwrap();
        prop_assert!(trace_distance(&lhs, &rhs).unwrap() < 1e-12);
        prop_assert!((lhs.trace() - 1.0).abs() < 1e-10);
        prop_assert!(lhs.min_eigenvalue() > -1e-10);
    }
}
