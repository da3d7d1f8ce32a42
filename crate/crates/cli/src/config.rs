//! Scenario configuration: parsing, overrides, defaults and validation.

use std::collections::BTreeMap;

use raman_cavity::beamsplitter::Tuning;
use raman_cavity::cavity::RamanHamiltonianConfig;
use raman_cavity::discrimination::Attenuation;
use raman_cavity::fock::{CoherentMixture, MixtureTerm};
use raman_cavity::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_N_MAX: usize = 40;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_TAIL: f64 = 1e-10;
/// Relative tolerance when checking a given `κ` against the one derived
/// from `(α, β, r)`.
const KAPPA_MATCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse { message: String, path: Option<String>, line: Option<usize>, column: Option<usize> },
    Validation(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse { message, path, line, .. } => {
                write!(f, "parse error")?;
                if let Some(line) = line {
                    write!(f, " at line {line}")?;
                }
                if let Some(path) = path {
                    write!(f, " at `{path}`")?;
                }
                write!(f, ": {message}")
            }
            ConfigError::Validation(m) => write!(f, "invalid config: {m}"),
        }
    }
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Validation(message.into())
}

/// A complex number written as a bare real or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexInput> for Complex64 {
    fn from(z: ComplexInput) -> Self {
        match z {
            ComplexInput::Real(re) => Complex64::new(re, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Clone,
    Broadcast,
    SteadyState,
    Attenuate,
    Discriminate,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningInput {
    pub kappa: Option<ComplexInput>,
    pub alpha: Option<ComplexInput>,
    pub beta: Option<ComplexInput>,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermInput {
    pub weight: f64,
    pub amplitude: ComplexInput,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInput {
    pub g: Option<f64>,
    pub r: Option<f64>,
    pub include_stark: Option<bool>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationInput {
    pub max_iter: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloInput {
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesInput {
    pub tol: Option<f64>,
    pub tail: Option<f64>,
    pub purity_slack: Option<f64>,
}

/// Config as written by the user, before defaults.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n_max: Option<usize>,
    pub gamma: Option<ComplexInput>,
    pub tuning: Option<TuningInput>,
    pub attenuation: Option<f64>,
    pub attenuations: Option<Vec<f64>>,
    #[serde(default)]
    pub mixtures: BTreeMap<String, Vec<TermInput>>,
    pub input: Option<String>,
    pub prepare: Option<bool>,
    pub rho: Option<String>,
    pub sigma: Option<String>,
    pub channel: Option<ChannelInput>,
    pub iterate: Option<IterationInput>,
    pub monte_carlo: Option<MonteCarloInput>,
    pub tolerances: Option<TolerancesInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedTuning {
    pub kappa: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub r: f64,
    pub attenuation: f64,
    #[serde(skip)]
    pub tuning: Tuning,
}

impl ResolvedTuning {
    fn new(tuning: Tuning) -> Self {
        Self {
            kappa: tuning.kappa(),
            alpha: tuning.alpha(),
            beta: tuning.beta(),
            r: tuning.r(),
            attenuation: tuning.attenuation(),
            tuning,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub tail: f64,
    pub purity_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub n_samples: u64,
    pub seed: u64,
}

/// Scenario-specific settings with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "snake_case")]
pub enum ScenarioSettings {
    Clone { gamma: Complex64, tuning: ResolvedTuning },
    Broadcast { tuning: ResolvedTuning, input: String, prepare: bool },
    SteadyState { gamma: Complex64, tuning: ResolvedTuning, channel: RamanHamiltonianConfig, max_iter: Option<usize> },
    Attenuate { attenuations: Vec<f64>, rho: String, sigma: String },
    Discriminate { attenuation: f64, rho: String, sigma: String, monte_carlo: MonteCarlo },
}

/// Validated config; serializes to the provenance block of every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub n_max: usize,
    pub tolerances: Tolerances,
    #[serde(flatten)]
    pub settings: ScenarioSettings,
    pub mixtures: BTreeMap<String, CoherentMixture>,
}

/// Parses JSON text, applies `key=value` overrides and validates.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<ResolvedConfig, ConfigError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        message: e.to_string(),
        path: None,
        line: Some(e.line()),
        column: Some(e.column()),
    })?;
    for item in overrides {
        apply_override(&mut value, item)?;
    }
    let raw: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Parse {
        path: Some(e.path().to_string()),
        message: e.into_inner().to_string(),
        line: None,
        column: None,
    })?;
    resolve(raw)
}

/// Sets the dot-separated `key` in `root` to `value`, parsed as JSON when
/// possible and kept as a string otherwise. Missing objects are created.
pub fn apply_override(root: &mut Value, item: &str) -> Result<(), ConfigError> {
    let (key, raw) =
        item.split_once('=').ok_or_else(|| invalid(format!("override `{item}` is not of the form key=value")))?;
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(invalid(format!("override key `{key}` has an empty segment")));
        }
        let Value::Object(map) = node else {
            return Err(invalid(format!("override `{key}`: `{}` is not an object", parts[..i].join("."))));
        };
        if i + 1 == parts.len() {
            map.insert(part.to_string(), parsed);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split always yields at least one segment")
}

fn resolve_tuning(input: Option<&TuningInput>) -> Result<ResolvedTuning, ConfigError> {
    let input = input.cloned().unwrap_or_default();
    let given_kappa = input.kappa.map(Complex64::from);
    let tuning = match (input.alpha, input.beta) {
        (None, None) => {
            if input.r.is_some() {
                return Err(invalid("tuning.r needs tuning.alpha and tuning.beta"));
            }
            Tuning::from_kappa(given_kappa.unwrap_or(Complex64::new(-1.0, 0.0)))
                .map_err(|e| invalid(format!("tuning: {e}")))?
        }
        (Some(alpha), Some(beta)) => {
            let tuning = Tuning::from_atom(alpha.into(), beta.into(), input.r.unwrap_or(1.0))
                .map_err(|e| invalid(format!("tuning: {e}")))?;
            if let Some(kappa) = given_kappa {
                let derived = tuning.kappa();
                if (kappa - derived).norm() > KAPPA_MATCH_TOL * kappa.norm().max(1.0) {
                    return Err(invalid(format!("tuning.kappa = {kappa} is inconsistent with α/(βr) = {derived}")));
                }
            }
            tuning
        }
        _ => return Err(invalid("tuning.alpha and tuning.beta must be given together")),
    };
    Ok(ResolvedTuning::new(tuning))
}

fn require<T>(value: Option<T>, key: &str, scenario: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| invalid(format!("`{key}` is required for the {scenario} scenario")))
}

fn require_mixture(
    name: Option<String>,
    key: &str,
    mixtures: &BTreeMap<String, CoherentMixture>,
) -> Result<String, ConfigError> {
    let name = name.ok_or_else(|| invalid(format!("`{key}` must name a mixture")))?;
    if !mixtures.contains_key(&name) {
        return Err(invalid(format!("`{key}` refers to undefined mixture `{name}`")));
    }
    Ok(name)
}

fn check_attenuation(a: f64, key: &str) -> Result<f64, ConfigError> {
    Attenuation::new(a).map(Attenuation::value).map_err(|e| invalid(format!("{key}: {e}")))
}

/// Applies defaults and checks every invariant that does not need a
/// simulation.
pub fn resolve(raw: ScenarioConfig) -> Result<ResolvedConfig, ConfigError> {
    let n_max = raw.n_max.unwrap_or(DEFAULT_N_MAX);
    if n_max < 1 {
        return Err(invalid("n_max must be at least 1"));
    }
    let tol_in = raw.tolerances.clone().unwrap_or_default();
    let tolerances = Tolerances {
        tol: tol_in.tol.unwrap_or(DEFAULT_TOL),
        tail: tol_in.tail.unwrap_or(DEFAULT_TAIL),
        purity_slack: tol_in.purity_slack.unwrap_or(1.0),
    };
    for (key, v) in [("tol", tolerances.tol), ("tail", tolerances.tail), ("purity_slack", tolerances.purity_slack)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(format!("tolerances.{key} must be positive, got {v}")));
        }
    }
    let mut mixtures = BTreeMap::new();
    for (name, terms) in &raw.mixtures {
        let terms = terms.iter().map(|t| MixtureTerm { weight: t.weight, amplitude: t.amplitude.into() }).collect();
        let mix = CoherentMixture::new(terms).map_err(|e| invalid(format!("mixture `{name}`: {e}")))?;
        mixtures.insert(name.clone(), mix);
    }

    let scenario = raw.scenario;
    let unused = |present: bool, key: &str| -> Result<(), ConfigError> {
        if present {
            Err(invalid(format!("`{key}` is not used by the {} scenario", scenario_name(scenario))))
        } else {
            Ok(())
        }
    };
    unused(raw.channel.is_some() && scenario != Scenario::SteadyState, "channel")?;
    unused(raw.iterate.is_some() && scenario != Scenario::SteadyState, "iterate")?;
    unused(raw.monte_carlo.is_some() && scenario != Scenario::Discriminate, "monte_carlo")?;
    unused(raw.input.is_some() && scenario != Scenario::Broadcast, "input")?;
    unused(raw.prepare.is_some() && scenario != Scenario::Broadcast, "prepare")?;
    unused(raw.attenuations.is_some() && scenario != Scenario::Attenuate, "attenuations")?;
    unused(raw.gamma.is_some() && !matches!(scenario, Scenario::Clone | Scenario::SteadyState), "gamma")?;
    unused(
        (raw.rho.is_some() || raw.sigma.is_some()) && !matches!(scenario, Scenario::Attenuate | Scenario::Discriminate),
        "rho/sigma",
    )?;
    unused(
        raw.attenuation.is_some() && !matches!(scenario, Scenario::Attenuate | Scenario::Discriminate),
        "attenuation",
    )?;

    let name = scenario_name(scenario);
    let settings = match scenario {
        Scenario::Clone => ScenarioSettings::Clone {
            gamma: require(raw.gamma, "gamma", name)?.into(),
            tuning: resolve_tuning(raw.tuning.as_ref())?,
        },
        Scenario::Broadcast => ScenarioSettings::Broadcast {
            tuning: resolve_tuning(raw.tuning.as_ref())?,
            input: require_mixture(raw.input, "input", &mixtures)?,
            prepare: raw.prepare.unwrap_or(false),
        },
        Scenario::SteadyState => {
            let tuning = resolve_tuning(raw.tuning.as_ref())?;
            let ch = raw.channel.unwrap_or_default();
            if let Some(r) = ch.r {
                if (r - tuning.r).abs() > KAPPA_MATCH_TOL * r.abs().max(1.0) {
                    return Err(invalid(format!("channel.r = {r} differs from tuning r = {}", tuning.r)));
                }
            }
            let defaults = RamanHamiltonianConfig::default();
            let channel = RamanHamiltonianConfig {
                g: ch.g.unwrap_or(defaults.g),
                r: tuning.r,
                include_stark: ch.include_stark.unwrap_or(defaults.include_stark),
                tau: ch.tau.unwrap_or(defaults.tau),
            };
            channel.validate().map_err(|e| invalid(format!("channel: {e}")))?;
            ScenarioSettings::SteadyState {
                gamma: require(raw.gamma, "gamma", name)?.into(),
                tuning,
                channel,
                max_iter: raw.iterate.map(|it| it.max_iter),
            }
        }
        Scenario::Attenuate | Scenario::Discriminate => {
            let derived = raw.tuning.as_ref().map(|t| resolve_tuning(Some(t))).transpose()?.map(|t| t.attenuation);
            let rho = require_mixture(raw.rho, "rho", &mixtures)?;
            let sigma = require_mixture(raw.sigma, "sigma", &mixtures)?;
            if scenario == Scenario::Attenuate {
                let list = match (raw.attenuations, raw.attenuation, derived) {
                    (Some(list), None, None) => list,
                    (None, Some(a), None) => vec![a],
                    (None, None, Some(a)) => vec![a],
                    (None, None, None) => return Err(invalid("give `attenuations`, `attenuation` or `tuning`")),
                    _ => return Err(invalid("give only one of `attenuations`, `attenuation` and `tuning`")),
                };
                if list.is_empty() {
                    return Err(invalid("`attenuations` must not be empty"));
                }
                let attenuations =
                    list.iter().map(|&a| check_attenuation(a, "attenuations")).collect::<Result<_, _>>()?;
                ScenarioSettings::Attenuate { attenuations, rho, sigma }
            } else {
                let attenuation = match (raw.attenuation, derived) {
                    (Some(a), None) | (None, Some(a)) => check_attenuation(a, "attenuation")?,
                    (None, None) => return Err(invalid("give `attenuation` or `tuning`")),
                    (Some(_), Some(_)) => return Err(invalid("give only one of `attenuation` and `tuning`")),
                };
                let mc = raw.monte_carlo.ok_or_else(|| invalid("`monte_carlo` with a `seed` is required"))?;
                let seed =
                    mc.seed.ok_or_else(|| invalid("`monte_carlo.seed` is required: runs must be reproducible"))?;
                let n_samples = mc.n_samples.unwrap_or(100_000);
                if n_samples == 0 {
                    return Err(invalid("`monte_carlo.n_samples` must be positive"));
                }
                ScenarioSettings::Discriminate { attenuation, rho, sigma, monte_carlo: MonteCarlo { n_samples, seed } }
            }
        }
    };
    Ok(ResolvedConfig { n_max, tolerances, settings, mixtures })
}

pub fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Clone => "clone",
        Scenario::Broadcast => "broadcast",
        Scenario::SteadyState => "steady_state",
        Scenario::Attenuate => "attenuate",
        Scenario::Discriminate => "discriminate",
    }
}
