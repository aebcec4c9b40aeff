use serde::{Deserialize, Serialize};

use super::ghz;
use crate::error::{Error, Result};
use crate::linalg::{fidelity_pure, ComplexMatrix, DensityMatrix, C64};
use crate::tolerances;

/// GHZ fidelity of the best experimental state.
pub const EXPERIMENTAL_FIDELITY: f64 = 0.923;
/// Per-qubit bit-flip rate of the experimental-like model state.
pub const EXPERIMENTAL_BIT_FLIP: f64 = 0.015;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// `p|GHZ⟩⟨GHZ| + (1−p)/2 (|0…0⟩⟨0…0| + |1…1⟩⟨1…1|)` with `p = 1 − strength`.
    PaperMixture,
    /// Independent phase flip `ρ → (1−q)ρ + q ZρZ` on every qubit.
    Dephasing,
    /// Global depolarizing `ρ → (1−q)ρ + q I/2^n`.
    Depolarizing,
    /// A fixed user-supplied state; strength is ignored.
    Custom,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::PaperMixture => "paper-mixture",
            NoiseKind::Dephasing => "dephasing",
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::Custom => "custom",
        }
    }

    /// Channel convention recorded alongside sweep outputs.
    pub fn convention(self) -> &'static str {
        match self {
            NoiseKind::PaperMixture => "rho = p GHZ + (1-p)/2 (|0..0><0..0| + |1..1><1..1|), p = 1 - strength",
            NoiseKind::Dephasing => "per-qubit phase flip rho -> (1-q) rho + q Z rho Z, q = strength",
            NoiseKind::Depolarizing => "global depolarizing rho -> (1-q) rho + q I/2^n, q = strength",
            NoiseKind::Custom => "fixed custom state",
        }
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-mixture" => Ok(NoiseKind::PaperMixture),
            "dephasing" => Ok(NoiseKind::Dephasing),
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            "custom" => Ok(NoiseKind::Custom),
            other => Err(Error::param("noise", format!("unknown kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoiseModel")]
pub struct NoiseModel {
    pub kind: NoiseKind,
    #[serde(default)]
    pub strength: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_state: Option<DensityMatrix>,
}

#[derive(Deserialize)]
struct RawNoiseModel {
    kind: NoiseKind,
    #[serde(default)]
    strength: f64,
    #[serde(default)]
    custom_state: Option<DensityMatrix>,
}

impl TryFrom<RawNoiseModel> for NoiseModel {
    type Error = Error;

    fn try_from(raw: RawNoiseModel) -> Result<Self> {
        match raw.kind {
            NoiseKind::Custom => NoiseModel::custom(raw.custom_state.ok_or_else(|| Error::param("custom_state", "required for kind `custom`"))?),
            kind => NoiseModel::new(kind, raw.strength),
        }
    }
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, strength: f64) -> Result<Self> {
        if kind == NoiseKind::Custom {
            return Err(Error::param("kind", "use NoiseModel::custom for custom states"));
        }
        if !(0.0..=1.0).contains(&strength) {
            return Err(Error::param("strength", format!("{strength} outside [0, 1]")));
        }
        Ok(NoiseModel {
            kind,
            strength,
            custom_state: None,
        })
    }

    pub fn custom(state: DensityMatrix) -> Result<Self> {
        Ok(NoiseModel {
            kind: NoiseKind::Custom,
            strength: 0.0,
            custom_state: Some(state),
        })
    }

    pub fn paper_mixture(p: f64) -> Result<Self> {
        Self::new(NoiseKind::PaperMixture, 1.0 - p)
    }
}

/// Applies `model` to `rho`. The paper-mixture kind is defined only on the
/// GHZ state and rejects any other input.
pub fn apply_noise(rho: &DensityMatrix, model: &NoiseModel) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    let q = model.strength;
    match model.kind {
        NoiseKind::PaperMixture => {
            if n < 2 {
                return Err(Error::param("state", "paper mixture needs at least two qubits"));
            }
            let target = ghz(n)?;
            if fidelity_pure(rho, &target)? < 1.0 - tolerances::GHZ_IDENTITY {
                return Err(Error::Validation("paper-mixture noise is defined on the GHZ state only".into()));
            }
            let p = 1.0 - q;
            let mut m = target.to_density().into_matrix().scale_re(p);
            m[(0, 0)] += C64::new((1.0 - p) / 2.0, 0.0);
            m[(dim - 1, dim - 1)] += C64::new((1.0 - p) / 2.0, 0.0);
            Ok(DensityMatrix::from_matrix_unchecked(n, m))
        }
        NoiseKind::Dephasing => {
            // each qubit contributes (1−q) + q z(x) z(y), i.e. (1−2q) where x and y differ
            let decay = 1.0 - 2.0 * q;
            let mut m = rho.matrix().clone();
            for x in 0..dim {
                for y in 0..dim {
                    let flips = (x ^ y).count_ones() as i32;
                    if flips > 0 {
                        m[(x, y)] *= decay.powi(flips);
                    }
                }
            }
            Ok(DensityMatrix::from_matrix_unchecked(n, m))
        }
        NoiseKind::Depolarizing => {
            let mixed = ComplexMatrix::identity(dim).scale_re(q / dim as f64);
            let m = rho.matrix().scale_re(1.0 - q).add(&mixed)?;
            Ok(DensityMatrix::from_matrix_unchecked(n, m))
        }
        NoiseKind::Custom => {
            let state = model
                .custom_state
                .as_ref()
                .ok_or_else(|| Error::param("custom_state", "missing"))?;
            if state.dim() != dim {
                return Err(Error::Dimension(format!("custom state on {} qubits, input on {n}", state.n_qubits())));
            }
            Ok(state.clone())
        }
    }
}

/// Independent bit flip `ρ → (1−r)ρ + r XρX` on every qubit.
pub fn bit_flip(rho: &DensityMatrix, r: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::param("rate", format!("{r} outside [0, 1]")));
    }
    let n = rho.n_qubits();
    let dim = rho.dim();
    let mut m = rho.matrix().clone();
    for j in 0..n {
        let mask = 1usize << (n - 1 - j);
        let prev = m.clone();
        for x in 0..dim {
            for y in 0..dim {
                m[(x, y)] = prev[(x, y)] * (1.0 - r) + prev[(x ^ mask, y ^ mask)] * r;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(n, m))
}

/// Model of the laboratory resource state: GHZ with per-qubit bit flips at
/// rate `bit_flip_rate`, followed by global depolarizing tuned so that the
/// GHZ fidelity equals `target_fidelity`.
pub fn experimental_like(n: usize, target_fidelity: f64, bit_flip_rate: f64) -> Result<DensityMatrix> {
    let g = ghz(n)?;
    let flipped = bit_flip(&g.to_density(), bit_flip_rate)?;
    let f0 = fidelity_pure(&flipped, &g)?;
    let floor = 1.0 / flipped.dim() as f64;
    if !(floor..=f0).contains(&target_fidelity) {
        return Err(Error::param(
            "target_fidelity",
            format!("{target_fidelity} not reachable: must lie in [{floor}, {f0:.6}] at bit-flip rate {bit_flip_rate}"),
        ));
    }
    let q = (f0 - target_fidelity) / (f0 - floor);
    apply_noise(&flipped, &NoiseModel::new(NoiseKind::Depolarizing, q)?)
}
