//! Dense complex linear algebra at qubit dimension `2^n`.

mod eigen;
mod matrix;
mod state;

pub use eigen::{eig_hermitian, EigenDecomposition};
pub use matrix::{kron, kron_all, kron_capped, ComplexMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use state::{DensityMatrix, PureState};

use crate::error::{Error, Result};
use crate::tolerances;

fn same_dim(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

/// `Tr[ρ · obs]` for a Hermitian observable.
pub fn expectation(rho: &DensityMatrix, obs: &ComplexMatrix) -> Result<f64> {
    same_dim(rho.dim(), obs.rows(), "state vs observable")?;
    if !obs.is_hermitian(tolerances::HERMITIAN) {
        return Err(Error::Validation("observable is not Hermitian".into()));
    }
    let t = rho.matrix().trace_product(obs)?;
    if t.im.abs() > tolerances::IMAG_RESIDUE {
        return Err(Error::Numeric(format!("expectation has imaginary part {:.3e}", t.im)));
    }
    Ok(t.re)
}

fn clamp_unit(x: f64, what: &str) -> Result<f64> {
    if !(-tolerances::UNIT_INTERVAL..=1.0 + tolerances::UNIT_INTERVAL).contains(&x) {
        return Err(Error::Numeric(format!("{what} {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Fidelity `⟨ψ|ρ|ψ⟩` against a pure target.
pub fn fidelity_pure(rho: &DensityMatrix, target: &PureState) -> Result<f64> {
    same_dim(rho.dim(), target.dim(), "state vs target")?;
    let psi = target.amplitudes();
    let rho_psi = rho.matrix().apply(psi)?;
    let f: C64 = psi.iter().zip(&rho_psi).map(|(a, b)| a.conj() * b).sum();
    clamp_unit(f.re, "fidelity")
}

/// Trace distance `½ Σ |eig(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a.dim(), b.dim(), "trace distance")?;
    let diff = a.matrix().sub(b.matrix())?;
    let eig = eig_hermitian(&diff)?;
    clamp_unit(0.5 * eig.values.iter().map(|l| l.abs()).sum::<f64>(), "trace distance")
}

/// Purity `Tr[ρ²]`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr[ρ²] = Σ |ρ_ij|² for Hermitian ρ
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}
