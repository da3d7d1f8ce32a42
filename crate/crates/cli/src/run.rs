//! Scenario execution and report assembly.

use raman_cavity::beamsplitter::BeamSplitter;
use raman_cavity::broadcast::{broadcast, prepare_for_broadcast};
use raman_cavity::cavity::{
    analytic_steady_state, fixed_point_residual, iterate_to_steady, RamanChannel, SteadyStateSpec,
};
use raman_cavity::discrimination::{
    attenuate_exact, attenuate_two_level, build_povm, moments, phi_state, purity_condition,
    run_discrimination_experiment, Attenuation, ExperimentOptions, Priors,
};
use raman_cavity::fock::{
    coherent_ket, coherent_product_ket, fidelity_pure, overlap, trace_distance, FockCutoff, Mode, SCHEMA_VERSION,
};
use raman_cavity::{Complex64, Error};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ResolvedConfig, ScenarioSettings};

/// Tabular output for external plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    /// CSV with a header row, `.` decimals and `\n` line endings.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(f64::to_string))?;
        }
        let bytes = writer.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
    }
}

/// A named pass/fail physics check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    fn at_least(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, passed: value >= threshold, value, threshold }
    }

    fn at_most(name: &'static str, value: f64, threshold: f64) -> Self {
        Self { name, passed: value <= threshold, value, threshold }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Value,
    pub series: Option<Series>,
    pub checks: Vec<Check>,
}

impl RunOutput {
    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn distributions(p1: &[f64], p2: &[f64]) -> Series {
    let len = p1.len().max(p2.len());
    let rows = (0..len)
        .map(|n| vec![n as f64, p1.get(n).copied().unwrap_or(0.0), p2.get(n).copied().unwrap_or(0.0)])
        .collect();
    Series { header: vec!["n", "p_mode1", "p_mode2"], rows }
}

pub fn run(config: &ResolvedConfig) -> Result<RunOutput, Error> {
    let n_max = config.n_max;
    let cutoff = FockCutoff::new(n_max);
    let tol = config.tolerances.tol;
    let tail = config.tolerances.tail;
    let zero = Complex64::new(0.0, 0.0);

    let (result, series, checks) = match &config.settings {
        ScenarioSettings::Clone { gamma, tuning } => {
            let (kappa, a) = (tuning.kappa, tuning.attenuation);
            let input_amplitude = gamma / a;
            let splitter = BeamSplitter::from_tuning(&tuning.tuning, n_max)?;
            let input = coherent_product_ket(input_amplitude, zero, cutoff, tail)?;
            let output = splitter.apply_ket(&input.value)?;
            let target = coherent_product_ket(*gamma, -kappa * gamma, cutoff, tail)?;
            let fidelity = overlap(&target.value, &output)?.norm_sqr().min(1.0);
            let rho = output.to_density();
            let (m1, m2) = (rho.partial_trace(Mode::One), rho.partial_trace(Mode::Two));
            let mode1 = fidelity_pure(&coherent_ket(*gamma, n_max, tail)?.value, &m1)?;
            let mode2 = fidelity_pure(&coherent_ket(-kappa * gamma, n_max, tail)?.value, &m2)?;
            let result = json!({
                "input_amplitude": input_amplitude,
                "output_amplitudes": [gamma, -kappa * gamma],
                "fidelity": fidelity,
                "mode1_fidelity": mode1,
                "mode2_fidelity": mode2,
                "is_clone": (kappa + 1.0).norm() == 0.0,
                "input_tail": input.tail,
            });
            let series = distributions(&m1.photon_distribution(), &m2.photon_distribution());
            (result, Some(series), vec![Check::at_least("fidelity", fidelity, 1.0 - tol)])
        }
        ScenarioSettings::Broadcast { tuning, input, prepare } => {
            let target = &config.mixtures[input];
            let mix = if *prepare { prepare_for_broadcast(target) } else { target.clone() };
            let (_, report) = broadcast(&mix, tuning.kappa, cutoff, tail)?;
            let mut checks = vec![Check::at_most("consistency", report.consistency_distance, tol)];
            let mut result = to_value(&report);
            result["marginals_equal"] = json!(report.marginal_distance <= tol);
            if *prepare {
                let target_state = target.single_mode_state(n_max, tail)?;
                let d1 = trace_distance(&report.marginal1, &target_state)?;
                let d2 = trace_distance(&report.marginal2, &target_state)?;
                result["prepared_target_distance"] = json!([d1, d2]);
                if (tuning.kappa + 1.0).norm() == 0.0 {
                    checks.push(Check::at_most("prepared_round_trip", d1.max(d2), tol));
                }
            }
            let series = distributions(&report.photon_distribution1, &report.photon_distribution2);
            (result, Some(series), checks)
        }
        ScenarioSettings::SteadyState { gamma, tuning, channel, max_iter } => {
            let kappa = tuning.kappa;
            let analytic = analytic_steady_state(&SteadyStateSpec::coherent(*gamma, kappa, n_max), cutoff)?;
            let splitter = BeamSplitter::from_tuning(&tuning.tuning, n_max)?;
            let start = coherent_product_ket(*gamma, zero, cutoff, tail)?.value;
            let product_overlap = overlap(&analytic, &splitter.apply_ket(&start)?)?.norm_sqr().min(1.0);
            let pump = RamanChannel::new(*channel, tuning.alpha, tuning.beta, n_max)?;
            let residual = fixed_point_residual(&pump, &analytic)?;
            let mut checks = vec![Check::at_least("analytic_matches_beam_splitter", product_overlap, 1.0 - tol)];
            let mut result = json!({
                "product_overlap": product_overlap,
                "completeness_error": pump.completeness_error(),
                "fixed_point_residual": residual,
                "mean_photons": [analytic.to_density().mean_photons(Mode::One), analytic.to_density().mean_photons(Mode::Two)],
            });
            let mut series = None;
            if let Some(max_iter) = max_iter {
                let run = iterate_to_steady(&pump, &start.to_density(), tol, *max_iter)?;
                result["iteration"] = json!({
                    "converged": run.converged,
                    "iterations": run.iterations,
                    "distance": run.distance,
                    "purity": run.state.purity(),
                    "fidelity_with_analytic": fidelity_pure(&analytic, &run.state)?,
                });
                checks.push(Check::at_most("iteration_converged", run.distance, tol));
                let rows = run.history.iter().enumerate().map(|(i, d)| vec![(i + 1) as f64, *d]).collect();
                series = Some(Series { header: vec!["step", "distance"], rows });
            }
            (result, series, checks)
        }
        ScenarioSettings::Attenuate { attenuations, rho, sigma } => {
            let (mix_r, mix_s) = (&config.mixtures[rho], &config.mixtures[sigma]);
            let (ms_r, ms_s) = (moments(mix_r), moments(mix_s));
            let mut points = Vec::new();
            let mut rows = Vec::new();
            for &a in attenuations {
                let att = Attenuation::new(a)?;
                let (phi_r, phi_s) = (phi_state(&ms_r, att)?, phi_state(&ms_s, att)?);
                let povm = build_povm(&phi_r.ket, &phi_s.ket, Priors::EQUAL)?;
                let pmax = povm.success_probability();
                let two_level_error = |mix, ms| -> Result<f64, Error> {
                    let exact = attenuate_exact(mix, att, n_max, tail)?.project(1);
                    let approx = attenuate_two_level(ms, att)?;
                    Ok(2.0 * trace_distance(&exact, approx.matrix())?)
                };
                points.push(json!({
                    "attenuation": a,
                    "pmax": pmax,
                    "pmax_over_a2": pmax / (a * a),
                    "overlap": povm.overlap,
                    "purity_rho": purity_condition(&ms_r, att, config.tolerances.purity_slack)?,
                    "purity_sigma": purity_condition(&ms_s, att, config.tolerances.purity_slack)?,
                    "two_level_error_rho": two_level_error(mix_r, &ms_r)?,
                    "two_level_error_sigma": two_level_error(mix_s, &ms_s)?,
                    "phi_norm_residual": [phi_r.norm_residual, phi_s.norm_residual],
                }));
                rows.push(vec![a, pmax, pmax / (a * a)]);
            }
            let result = json!({ "moments_rho": ms_r, "moments_sigma": ms_s, "points": points });
            let series = Series { header: vec!["A", "pmax", "pmax_over_a2"], rows };
            (result, Some(series), Vec::new())
        }
        ScenarioSettings::Discriminate { attenuation, rho, sigma, monte_carlo } => {
            let mut options = ExperimentOptions::new(monte_carlo.n_samples, monte_carlo.seed);
            options.purity_slack = config.tolerances.purity_slack;
            options.n_max = n_max;
            options.tail_tolerance = tail;
            let report = run_discrimination_experiment(
                &config.mixtures[rho],
                &config.mixtures[sigma],
                Attenuation::new(*attenuation)?,
                &options,
            )?;
            let deviation = (report.empirical.success - report.analytic.pmax).abs();
            let mut result = to_value(&report);
            result["success_deviation_sigmas"] =
                json!(deviation / report.empirical.success_sigma.max(f64::MIN_POSITIVE));
            let mut checks = Vec::new();
            if !report.fallback_to_exact {
                checks.push(Check::at_most("zero_errors", report.counts.errors as f64, 0.0));
            }
            (result, None, checks)
        }
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "config": to_value(config),
        "result": result,
        "checks": to_value(&checks),
    });
    Ok(RunOutput { report, series, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run_text(text: &str) -> RunOutput {
        run(&parse_config(text, &[]).unwrap()).unwrap()
    }

    #[test]
    fn clone_reaches_unit_fidelity() {
        let out = run_text(r#"{"scenario": "clone", "gamma": 1.0, "n_max": 30}"#);
        assert!(out.report["result"]["fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
        assert!(out.failed_checks().is_empty());
        assert_eq!(out.report["config"]["tuning"]["kappa"], json!([-1.0, 0.0]));
    }

    #[test]
    fn unequal_broadcast_is_flagged_not_failed() {
        let out = run_text(
            r#"{"scenario": "broadcast", "n_max": 30, "tuning": {"kappa": -2},
                "mixtures": {"m": [{"weight": 1, "amplitude": 1}]}, "input": "m"}"#,
        );
        assert_eq!(out.report["result"]["marginals_equal"], json!(false));
        assert!(out.failed_checks().is_empty());
    }

    #[test]
    fn attenuation_sweep_rows() {
        let out = run_text(
            r#"{"scenario": "attenuate", "n_max": 20, "attenuations": [0.2, 0.1, 0.05],
                "mixtures": {"a": [{"weight": 1, "amplitude": 1}], "b": [{"weight": 1, "amplitude": [0, 1]}]},
                "rho": "a", "sigma": "b"}"#,
        );
        let series = out.series.unwrap();
        assert_eq!(series.rows.len(), 3);
        for row in &series.rows {
            assert!((row[2] - row[1] / (row[0] * row[0])).abs() < 1e-12);
        }
        let csv = series.to_csv().unwrap();
        assert!(csv.starts_with("A,pmax,pmax_over_a2\n0.2,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn phase_symmetric_sweep_is_a_physics_error() {
        let cfg = parse_config(
            r#"{"scenario": "attenuate", "n_max": 20, "attenuation": 0.1,
                "mixtures": {"a": [{"weight": 0.5, "amplitude": 1}, {"weight": 0.5, "amplitude": -1}],
                             "b": [{"weight": 1, "amplitude": 1}]},
                "rho": "a", "sigma": "b"}"#,
            &[],
        )
        .unwrap();
        assert_eq!(run(&cfg), Err(Error::ZeroMeanAmplitude));
    }
}
