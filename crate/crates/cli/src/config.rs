//! JSON run configuration.

use std::path::{Path, PathBuf};

use pauliflow::{BlochVector, CanonicalCoupling, CoefficientTensor, GeneralHamiltonian};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub initial: Option<InitialConfig>,
    pub hamiltonian: Option<HamiltonianConfig>,
    pub schedule: Option<Vec<SegmentConfig>>,
    pub total_time: Option<f64>,
    pub objective: Option<String>,
    pub measure: Option<String>,
    pub bath: Option<BathConfig>,
    pub samples_per_collision: Option<usize>,
    pub window: Option<[f64; 2]>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub t: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Either a Bloch pair or a full coefficient tensor.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub a: Option<[f64; 3]>,
    pub b: Option<[f64; 3]>,
    pub e: Option<[[f64; 4]; 4]>,
}

/// Either canonical `gamma` or a general `Gamma` with optional local terms.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub gamma: Option<[f64; 3]>,
    #[serde(rename = "Gamma")]
    pub full: Option<[[f64; 3]; 3]>,
    pub alpha: Option<[f64; 3]>,
    pub beta: Option<[f64; 3]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub gamma: [f64; 3],
    pub duration: DurationValue,
    pub bounds: Option<[f64; 2]>,
}

/// A number, `"FREE"` or `"REMAINDER"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DurationValue {
    Time(f64),
    Symbol(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BathConfig {
    List(Vec<CollisionConfig>),
    Generator(GeneratorConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollisionConfig {
    pub b: [f64; 3],
    pub gamma: [f64; 3],
    pub tau: f64,
}

/// `count` collisions with exponentially distributed durations of mean
/// `tau`. `b` is either a fixed vector or `"random"` for a uniform draw from
/// the Bloch ball per collision.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub count: usize,
    pub b: BlochSource,
    pub gamma: [f64; 3],
    pub tau: f64,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum BlochSource {
    Fixed([f64; 3]),
    Keyword(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub curve: Option<PathBuf>,
}

/// Validated initial state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Product { a: BlochVector, b: BlochVector },
    Tensor(CoefficientTensor),
}

impl InitialState {
    pub fn tensor(&self) -> CoefficientTensor {
        match self {
            InitialState::Product { a, b } => pauliflow::product_tensor(a, b),
            InitialState::Tensor(e) => *e,
        }
    }
}

/// Validated Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hamiltonian {
    Canonical(CanonicalCoupling),
    General(GeneralHamiltonian),
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn initial_state(&self) -> Result<InitialState, CliError> {
        let init = self.initial.as_ref().ok_or_else(|| missing("initial"))?;
        match (init.a, init.b, init.e) {
            (Some(a), b, None) => {
                let a = bloch("initial.a", a)?;
                let b = bloch("initial.b", b.unwrap_or([0.0; 3]))?;
                Ok(InitialState::Product { a, b })
            }
            (None, None, Some(e)) => {
                let e = CoefficientTensor::new(e).map_err(|err| CliError::Unphysical(format!("initial.e: {err}")))?;
                if !pauliflow::is_physical(&e) {
                    return Err(CliError::Unphysical(format!(
                        "initial.e: density matrix has eigenvalue {:.3e}",
                        pauliflow::min_eigenvalue(&e)
                    )));
                }
                Ok(InitialState::Tensor(e))
            }
            (None, Some(_), None) => Err(CliError::Config("initial: `b` given without `a`".into())),
            (None, None, None) => Err(CliError::Config("initial: give either {a, b} or {e}".into())),
            _ => Err(CliError::Config("initial: give exactly one of {a, b} or {e}".into())),
        }
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        let h = self.hamiltonian.as_ref().ok_or_else(|| missing("hamiltonian"))?;
        match (h.gamma, h.full) {
            (Some(g), None) => {
                if h.alpha.is_some() || h.beta.is_some() {
                    return Err(CliError::Config("hamiltonian: alpha/beta belong with `Gamma`, not `gamma`".into()));
                }
                Ok(Hamiltonian::Canonical(coupling("hamiltonian.gamma", g)?))
            }
            (None, Some(full)) => {
                finite("hamiltonian.Gamma", full.iter().flatten())?;
                let alpha = h.alpha.unwrap_or([0.0; 3]);
                let beta = h.beta.unwrap_or([0.0; 3]);
                finite("hamiltonian.alpha", alpha.iter())?;
                finite("hamiltonian.beta", beta.iter())?;
                Ok(Hamiltonian::General(GeneralHamiltonian { alpha, beta, coupling: full }))
            }
            _ => Err(CliError::Config("hamiltonian: give exactly one of `gamma` or `Gamma`".into())),
        }
    }

    /// Canonical coupling, rejecting the general form.
    pub fn canonical_coupling(&self, command: &str) -> Result<CanonicalCoupling, CliError> {
        match self.hamiltonian()? {
            Hamiltonian::Canonical(g) => Ok(g),
            Hamiltonian::General(_) => Err(CliError::Config(format!(
                "hamiltonian: `{command}` takes a canonical `gamma`; `Gamma` is accepted by `evolve` only"
            ))),
        }
    }
}

pub(crate) fn missing(field: &str) -> CliError {
    CliError::Config(format!("missing field `{field}`"))
}

fn finite<'a>(field: &str, mut xs: impl Iterator<Item = &'a f64>) -> Result<(), CliError> {
    if xs.all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{field}: values must be finite")))
    }
}

pub(crate) fn bloch(field: &str, v: [f64; 3]) -> Result<BlochVector, CliError> {
    finite(field, v.iter())?;
    let b = BlochVector(v);
    if !b.is_physical() {
        return Err(CliError::Unphysical(format!("{field}: Bloch vector norm {} exceeds 1", b.norm())));
    }
    Ok(b)
}

pub(crate) fn coupling(field: &str, g: [f64; 3]) -> Result<CanonicalCoupling, CliError> {
    finite(field, g.iter())?;
    Ok(CanonicalCoupling { gamma: g })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_product_and_gamma() {
        let c = RunConfig::parse(r#"{"initial": {"a": [1, 0, 0]}, "hamiltonian": {"gamma": [0, 1, 1]}}"#).unwrap();
        assert_eq!(
            c.initial_state().unwrap(),
            InitialState::Product { a: BlochVector::new(1.0, 0.0, 0.0), b: BlochVector::ZERO }
        );
        assert_eq!(c.hamiltonian().unwrap(), Hamiltonian::Canonical(CanonicalCoupling::new(0.0, 1.0, 1.0)));
    }

    #[test]
    fn unknown_field_reports_location() {
        let err = RunConfig::parse("{\n  \"initial\": {\"a\": [1, 0, 0]},\n  \"gama\": 1\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gama") && msg.contains("line 3"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn rejects_ambiguous_and_unphysical_states() {
        let both = RunConfig::parse(r#"{"initial": {"a": [0, 0, 0], "e": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}}"#)
            .unwrap();
        assert_eq!(both.initial_state().unwrap_err().exit_code(), 2);
        let long = RunConfig::parse(r#"{"initial": {"a": [1, 1, 0]}}"#).unwrap();
        assert_eq!(long.initial_state().unwrap_err().exit_code(), 3);
        let bad_e = RunConfig::parse(r#"{"initial": {"e": [[1,0,0,0],[2,0,0,0],[0,0,0,0],[0,0,0,0]]}}"#).unwrap();
        assert_eq!(bad_e.initial_state().unwrap_err().exit_code(), 3);
        let bad_trace = RunConfig::parse(r#"{"initial": {"e": [[2,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}}"#).unwrap();
        assert_eq!(bad_trace.initial_state().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn general_hamiltonian_form() {
        let c =
            RunConfig::parse(r#"{"hamiltonian": {"Gamma": [[1,0,0],[0,2,0],[0,0,3]], "beta": [0, 0.1, 0]}}"#).unwrap();
        match c.hamiltonian().unwrap() {
            Hamiltonian::General(h) => assert_eq!(h.beta, [0.0, 0.1, 0.0]),
            other => panic!("{other:?}"),
        }
        assert!(c.canonical_coupling("map").is_err());
        let both =
            RunConfig::parse(r#"{"hamiltonian": {"gamma": [1,1,1], "Gamma": [[1,0,0],[0,2,0],[0,0,3]]}}"#).unwrap();
        assert!(both.hamiltonian().is_err());
    }
}
