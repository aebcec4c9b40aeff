use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eigen::{eig_hermitian, EigenDecomposition};
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tolerances;

fn check_qubits(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::param("n_qubits", "must be at least 1"));
    }
    if n > tolerances::MAX_QUBITS {
        return Err(Error::SizeLimit {
            qubits: n,
            cap: tolerances::MAX_QUBITS,
        });
    }
    Ok(1usize << n)
}

/// Normalised state vector on `n` qubits. Qubit 1 is the most significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = check_qubits(n_qubits)?;
        if amplitudes.len() != dim {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > tolerances::NORM {
            return Err(Error::Validation(format!("state norm² is {norm}, expected 1")));
        }
        Ok(PureState { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension("inner product of states of different size".into()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Validated density operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity. Eigenvalues in
    /// `[-PSD, 0)` are clamped to zero and the trace renormalised.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n_qubits = matrix
            .qubit_count()
            .ok_or_else(|| Error::Dimension(format!("{}x{} is not a qubit operator", matrix.rows(), matrix.cols())))?;
        check_qubits(n_qubits)?;
        let defect = matrix.hermitian_defect();
        if defect > tolerances::HERMITIAN {
            return Err(Error::Validation(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tolerances::TRACE || tr.im.abs() > tolerances::TRACE {
            return Err(Error::Validation(format!("trace is {tr}, expected 1")));
        }
        let eig = eig_hermitian(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tolerances::PSD {
            return Err(Error::Validation(format!("negative eigenvalue {min:.3e}")));
        }
        let matrix = if min < 0.0 {
            let clamped = eig.reconstruct_with(|l| l.max(0.0));
            let t = clamped.trace().re;
            clamped.scale_re(1.0 / t)
        } else {
            matrix
        };
        Ok(DensityMatrix { n_qubits, matrix })
    }

    /// For operations known to map density matrices to density matrices.
    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_qubits);
        DensityMatrix { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        let dim = check_qubits(n_qubits)?;
        Ok(DensityMatrix {
            n_qubits,
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        })
    }

    /// Convex combination `Σ w_k ρ_k`. Weights must be non-negative and sum
    /// to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or_else(|| Error::param("parts", "empty mixture"))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > tolerances::TRACE {
            return Err(Error::param("weights", format!("must be non-negative and sum to 1, got {total}")));
        }
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.n_qubits != first.n_qubits {
                return Err(Error::Dimension("mixture of states on different qubit counts".into()));
            }
            acc = acc.add(&rho.matrix.scale_re(*w))?;
        }
        Ok(DensityMatrix::from_matrix_unchecked(first.n_qubits, acc))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> Result<EigenDecomposition> {
        eig_hermitian(&self.matrix)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Wire form `{"n": qubits, "re": [[..]], "im": [[..]]}`.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixJson {
    fn from_matrix(m: &ComplexMatrix) -> Option<Self> {
        let n = m.qubit_count()?;
        let rows = |f: fn(&C64) -> f64| (0..m.rows()).map(|i| m.row(i).iter().map(f).collect()).collect();
        Some(MatrixJson {
            n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        })
    }

    fn into_matrix(self) -> Result<ComplexMatrix> {
        if self.n == 0 || self.n > tolerances::MAX_QUBITS {
            return Err(Error::param("n", format!("{} qubits outside 1..={}", self.n, tolerances::MAX_QUBITS)));
        }
        let dim = 1usize << self.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == dim && rows.iter().all(|r| r.len() == dim);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Dimension(format!("`re` and `im` must both be {dim}x{dim} for n = {}", self.n)));
        }
        let data = self
            .re
            .iter()
            .flatten()
            .zip(self.im.iter().flatten())
            .map(|(&r, &i)| C64::new(r, i))
            .collect();
        ComplexMatrix::new(dim, dim, data)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(self)
            .ok_or_else(|| S::Error::custom("only square 2^n matrices have a JSON form"))?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        MatrixJson::deserialize(d)?.into_matrix().map_err(D::Error::custom)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        DensityMatrix::new(m).map_err(D::Error::custom)
    }
}
