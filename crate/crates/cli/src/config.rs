//! Run configuration: an optional JSON file merged with command-line flags.
//! Flags win over the file, the file wins over built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use privsense::linalg::DensityMatrix;
use privsense::states::{apply_noise, experimental_like, ghz, plus_state, EXPERIMENTAL_BIT_FLIP, EXPERIMENTAL_FIDELITY};
use privsense::verification::VerificationParams;
use privsense::{Error, NoiseKind, NoiseModel, PhaseVector};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateChoice {
    Ghz,
    Plus,
    /// GHZ with per-qubit bit flips, depolarized to GHZ fidelity 0.923.
    Experimental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseChoice {
    PaperMixture,
    Dephasing,
    Depolarizing,
}

impl From<NoiseChoice> for NoiseKind {
    fn from(c: NoiseChoice) -> Self {
        match c {
            NoiseChoice::PaperMixture => NoiseKind::PaperMixture,
            NoiseChoice::Dephasing => NoiseKind::Dephasing,
            NoiseChoice::Depolarizing => NoiseKind::Depolarizing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationSection {
    pub m: Option<f64>,
    pub c: Option<f64>,
    pub shots: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimationSection {
    pub nu: Option<usize>,
    pub nu_grid: Option<Vec<usize>>,
    pub repetitions: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub state: Option<StateChoice>,
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub verification: VerificationSection,
    pub phases: Option<Vec<f64>>,
    #[serde(default)]
    pub estimation: EstimationSection,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// The state a command runs on, as recorded in its artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct StateSpec {
    pub n: usize,
    pub state: StateChoice,
    pub noise: Option<NoiseModel>,
}

impl StateSpec {
    pub fn resolve(file: &FileConfig, n: Option<usize>, state: Option<StateChoice>, noise: Option<NoiseChoice>, strength: Option<f64>) -> Result<Self, CliError> {
        let n = n.or(file.n).unwrap_or(3);
        let state = state.or(file.state).unwrap_or(StateChoice::Ghz);
        let noise = match (noise, &file.noise) {
            (Some(kind), _) => Some(NoiseModel::new(kind.into(), strength.or(file.noise.as_ref().map(|m| m.strength)).unwrap_or(0.0))?),
            (None, Some(m)) if m.kind == NoiseKind::Custom => {
                if strength.is_some() {
                    return Err(CliError::Usage("--strength has no effect on a custom state".into()));
                }
                Some(m.clone())
            }
            (None, Some(m)) => Some(NoiseModel::new(m.kind, strength.unwrap_or(m.strength))?),
            (None, None) if strength.is_some() => return Err(CliError::Usage("--strength needs a noise kind".into())),
            (None, None) => None,
        };
        Ok(StateSpec { n, state, noise })
    }

    pub fn build(&self) -> Result<DensityMatrix, Error> {
        if let Some(NoiseModel {
            kind: NoiseKind::Custom,
            custom_state: Some(rho),
            ..
        }) = &self.noise
        {
            if rho.n_qubits() != self.n {
                return Err(Error::Dimension(format!("custom state has {} qubits, n = {}", rho.n_qubits(), self.n)));
            }
            return Ok(rho.clone());
        }
        let base = match self.state {
            StateChoice::Ghz => ghz(self.n)?.to_density(),
            StateChoice::Plus => plus_state(self.n)?.to_density(),
            StateChoice::Experimental => experimental_like(self.n, EXPERIMENTAL_FIDELITY, EXPERIMENTAL_BIT_FLIP)?,
        };
        match &self.noise {
            Some(model) => apply_noise(&base, model),
            None => Ok(base),
        }
    }

    pub fn describe(&self) -> String {
        let base = match self.state {
            StateChoice::Ghz => "GHZ",
            StateChoice::Plus => "|+>",
            StateChoice::Experimental => "experimental-like",
        };
        match &self.noise {
            Some(m) if m.kind == NoiseKind::Custom => format!("custom {}-qubit state", self.n),
            Some(m) => format!("{}-qubit {base} with {} noise at strength {}", self.n, m.kind.name(), m.strength),
            None => format!("{}-qubit {base}", self.n),
        }
    }
}

pub fn verification_params(file: &FileConfig, n: usize, m: Option<f64>, c: Option<f64>, shots: Option<u64>, seed: u64) -> Result<VerificationParams, Error> {
    let v = &file.verification;
    let mut p = VerificationParams::new(n, m.or(v.m).unwrap_or(1.0), c.or(v.c).unwrap_or(0.0), seed);
    p.shots_per_stabilizer = shots.or(v.shots);
    p.validate()?;
    Ok(p)
}

/// Explicit phases, or the whole of `π/2` on the first node.
pub fn phases(file: &FileConfig, flag: Option<Vec<f64>>, n: usize) -> Result<PhaseVector, Error> {
    match flag.or_else(|| file.phases.clone()) {
        Some(t) => {
            if t.len() != n {
                return Err(Error::InvalidParameter {
                    name: "phases",
                    reason: format!("{} phases for {n} nodes", t.len()),
                });
            }
            PhaseVector::new(t)
        }
        None => Ok(PhaseVector::on_first(n, std::f64::consts::FRAC_PI_2)),
    }
}
