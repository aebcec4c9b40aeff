//! Resource states, Pauli strings, noise channels and local phase encoding.
//!
//! Qubit `j` (0-based) is bit `n - 1 - j` of a basis index, so qubit 0 is
//! the leftmost tensor factor.

mod noise;
mod pauli;

pub use noise::{apply_noise, bit_flip, experimental_like, NoiseKind, NoiseModel, EXPERIMENTAL_BIT_FLIP, EXPERIMENTAL_FIDELITY};
pub use pauli::{pauli_matrix, Pauli, PauliString};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, PureState, C64, ZERO};
use crate::tolerances;

fn check_range(n: usize, min: usize) -> Result<usize> {
    if n < min || n > tolerances::MAX_QUBITS {
        return Err(Error::param("n", format!("{n} outside {min}..={}", tolerances::MAX_QUBITS)));
    }
    Ok(1 << n)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n ≥ 2` qubits.
pub fn ghz(n: usize) -> Result<PureState> {
    let dim = check_range(n, 2)?;
    let mut amps = vec![ZERO; dim];
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[0] = h;
    amps[dim - 1] = h;
    PureState::new(n, amps)
}

/// `|+⟩^⊗n`, the non-private product state.
pub fn plus_state(n: usize) -> Result<PureState> {
    let dim = check_range(n, 1)?;
    let a = C64::new((dim as f64).sqrt().recip(), 0.0);
    PureState::new(n, vec![a; dim])
}

/// Computational basis state with index `idx`.
pub fn basis_state(n: usize, idx: usize) -> Result<PureState> {
    let dim = check_range(n, 1)?;
    if idx >= dim {
        return Err(Error::param("idx", format!("{idx} out of range for {n} qubits")));
    }
    let mut amps = vec![ZERO; dim];
    amps[idx] = C64::new(1.0, 0.0);
    PureState::new(n, amps)
}

#[inline]
pub(crate) fn bit(idx: usize, n: usize, qubit: usize) -> usize {
    (idx >> (n - 1 - qubit)) & 1
}

/// `±1` eigenvalue of `Z` on `qubit` for basis index `idx`.
#[inline]
pub(crate) fn z_sign(idx: usize, n: usize, qubit: usize) -> f64 {
    if bit(idx, n, qubit) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `U_q ρ U_q†` for a single-qubit unitary `u` acting on `qubit`.
pub(crate) fn conjugate_local(m: &ComplexMatrix, n: usize, qubit: usize, u: &[[C64; 2]; 2]) -> ComplexMatrix {
    let dim = m.rows();
    let mask = 1usize << (n - 1 - qubit);
    let mut out = m.clone();
    // rows: U ρ
    for r0 in (0..dim).filter(|r| r & mask == 0) {
        let r1 = r0 | mask;
        for c in 0..dim {
            let a = m[(r0, c)];
            let b = m[(r1, c)];
            out[(r0, c)] = u[0][0] * a + u[0][1] * b;
            out[(r1, c)] = u[1][0] * a + u[1][1] * b;
        }
    }
    // columns: (U ρ) U†
    let tmp = out.clone();
    for c0 in (0..dim).filter(|c| c & mask == 0) {
        let c1 = c0 | mask;
        for r in 0..dim {
            let a = tmp[(r, c0)];
            let b = tmp[(r, c1)];
            out[(r, c0)] = a * u[0][0].conj() + b * u[0][1].conj();
            out[(r, c1)] = a * u[1][0].conj() + b * u[1][1].conj();
        }
    }
    out
}

/// Local sensor phases `θ_1 … θ_n` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseVector {
    thetas: Vec<f64>,
}

impl PhaseVector {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::param("phases", "need at least one phase"));
        }
        if thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("phases", "phases must be finite"));
        }
        Ok(PhaseVector { thetas })
    }

    pub fn zeros(n: usize) -> Self {
        PhaseVector { thetas: vec![0.0; n] }
    }

    /// `(φ, 0, …, 0)`: the whole global phase on the first node.
    pub fn on_first(n: usize, phi: f64) -> Self {
        let mut thetas = vec![0.0; n];
        thetas[0] = phi;
        PhaseVector { thetas }
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// `φ = Σ θ_i`.
    pub fn global_phase(&self) -> f64 {
        self.thetas.iter().sum()
    }

    pub fn add(&self, other: &PhaseVector) -> Result<PhaseVector> {
        if self.len() != other.len() {
            return Err(Error::Dimension("phase vectors of different length".into()));
        }
        PhaseVector::new(self.thetas.iter().zip(&other.thetas).map(|(a, b)| a + b).collect())
    }
}

/// `U ρ U†` with `U = ⊗_j exp(−i θ_j Z/2)`.
pub fn encode_phases(rho: &DensityMatrix, phases: &PhaseVector) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if phases.len() != n {
        return Err(Error::Dimension(format!("{} phases for {n} qubits", phases.len())));
    }
    let dim = rho.dim();
    // U is diagonal: U|x⟩ = exp(−i Σ_j θ_j z_j(x)/2) |x⟩
    let angle: Vec<f64> = (0..dim)
        .map(|x| 0.5 * phases.thetas().iter().enumerate().map(|(j, t)| t * z_sign(x, n, j)).sum::<f64>())
        .collect();
    let mut m = rho.matrix().clone();
    for x in 0..dim {
        for y in 0..dim {
            m[(x, y)] *= C64::from_polar(1.0, angle[y] - angle[x]);
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(n, m))
}
