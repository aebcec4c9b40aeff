//! Quantum Fisher information under unitary phase encoding and the direct
//! privacy parameter `ε_p`.
//!
//! For `ρ = Σ λ_k |φ_k⟩⟨φ_k|` and generator `A` the QFI is
//! `2 Σ (λ_k − λ_l)²/(λ_k + λ_l) |⟨φ_k|A|φ_l⟩|²`. The reducible QFI of node
//! `j` replaces `A` by `A_j + Σ_{k≠j} c_k A_k`; minimising it over the
//! co-encoding coefficients `c` gives `α_j`, and `ε_p = max_j α_j / n²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, DensityMatrix, EigenDecomposition, C64};
use crate::states::{Pauli, PauliString};
use crate::tolerances;

/// One commuting Hermitian generator per node.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    n_qubits: usize,
    generators: Vec<ComplexMatrix>,
    convention: String,
}

impl GeneratorSet {
    pub fn new(generators: Vec<ComplexMatrix>, convention: impl Into<String>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::param("generators", "need at least one generator"))?;
        let n_qubits = first
            .qubit_count()
            .ok_or_else(|| Error::Dimension(format!("generator dimension {} is not 2^n", first.rows())))?;
        for (j, g) in generators.iter().enumerate() {
            if g.rows() != first.rows() || !g.is_square() {
                return Err(Error::Dimension(format!("generator {j} has shape {}x{}", g.rows(), g.cols())));
            }
            if !g.is_hermitian(tolerances::HERMITIAN) {
                return Err(Error::Validation(format!("generator {j} is not Hermitian")));
            }
        }
        for a in 0..generators.len() {
            for b in a + 1..generators.len() {
                let comm = generators[a].commutator(&generators[b])?;
                let defect = comm.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
                if defect > tolerances::COMMUTATION {
                    return Err(Error::Validation(format!("generators {a} and {b} do not commute ({defect:.3e})")));
                }
            }
        }
        Ok(GeneratorSet {
            n_qubits,
            generators,
            convention: convention.into(),
        })
    }

    /// `A_j = Z_j/2` on each of the `n` qubits.
    pub fn local_z(n: usize) -> Result<Self> {
        let gens = (0..n)
            .map(|j| Ok(PauliString::single(n, j, Pauli::Z)?.matrix()?.scale_re(0.5)))
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(gens, "A_j = Z_j/2")
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn convention(&self) -> &str {
        &self.convention
    }
}

/// `Σ_j Z_j/(2n)`: moving every local phase together by `φ/n`.
pub fn global_phase_generator(n: usize) -> Result<ComplexMatrix> {
    if n == 0 || n > tolerances::MAX_QUBITS {
        return Err(Error::param("n", format!("{n} outside 1..={}", tolerances::MAX_QUBITS)));
    }
    let dim = 1usize << n;
    let diag: Vec<C64> = (0..dim)
        .map(|x| {
            let ones = x.count_ones() as f64;
            C64::new((n as f64 - 2.0 * ones) / (2.0 * n as f64), 0.0)
        })
        .collect();
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// Spectral data shared by every QFI evaluation on one state.
struct Spectrum {
    eig: EigenDecomposition,
    /// `(k, l, w_kl)` for pairs with a non-zero weight.
    pairs: Vec<(usize, usize, f64)>,
}

impl Spectrum {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let eig = rho.eigen()?;
        let d = eig.dim();
        let lam: Vec<f64> = eig.values.iter().map(|l| l.max(0.0)).collect();
        let mut pairs = Vec::new();
        for k in 0..d {
            for l in 0..d {
                let s = lam[k] + lam[l];
                if s > tolerances::QFI_PAIR {
                    let w = (lam[k] - lam[l]).powi(2) / s;
                    if w > 0.0 {
                        pairs.push((k, l, w));
                    }
                }
            }
        }
        Ok(Spectrum { eig, pairs })
    }

    fn elements(&self, a: &ComplexMatrix) -> Result<Vec<C64>> {
        let t = self.eig.transform(a)?;
        Ok(self.pairs.iter().map(|&(k, l, _)| t[(k, l)]).collect())
    }

    fn weighted_norm(&self, a: &[C64]) -> f64 {
        2.0 * self.pairs.iter().zip(a).map(|(p, z)| p.2 * z.norm_sqr()).sum::<f64>()
    }
}

fn check_generator(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<()> {
    if a.rows() != rho.dim() || !a.is_square() {
        return Err(Error::Dimension(format!("generator {}x{} on {}-dim state", a.rows(), a.cols(), rho.dim())));
    }
    if !a.is_hermitian(tolerances::HERMITIAN) {
        return Err(Error::Validation("generator is not Hermitian".into()));
    }
    Ok(())
}

/// QFI of `e^{−iθA} ρ e^{iθA}` with respect to `θ`.
pub fn qfi_unitary(rho: &DensityMatrix, generator: &ComplexMatrix) -> Result<f64> {
    check_generator(rho, generator)?;
    let s = Spectrum::new(rho)?;
    Ok(s.weighted_norm(&s.elements(generator)?))
}

/// QFI of the global phase `φ` along the symmetric direction `Σ_j Z_j/(2n)`.
pub fn qfi_global_phase(rho: &DensityMatrix) -> Result<f64> {
    qfi_unitary(rho, &global_phase_generator(rho.n_qubits())?)
}

fn check_set(rho: &DensityMatrix, gens: &GeneratorSet, j: usize) -> Result<()> {
    if gens.n_qubits() != rho.n_qubits() {
        return Err(Error::Dimension(format!("{}-qubit generators on {}-qubit state", gens.n_qubits(), rho.n_qubits())));
    }
    if gens.len() < 2 {
        return Err(Error::param("generators", "need at least two nodes"));
    }
    if j >= gens.len() {
        return Err(Error::param("j", format!("node {j} out of range for {} nodes", gens.len())));
    }
    Ok(())
}

/// Matrix elements of `A_j` and of the other generators, in node order.
fn split_elements(s: &Spectrum, gens: &GeneratorSet, j: usize) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    let a = s.elements(&gens.generators[j])?;
    let b = gens
        .generators
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .map(|(_, g)| s.elements(g))
        .collect::<Result<Vec<_>>>()?;
    Ok((a, b))
}

fn combine(a: &[C64], b: &[Vec<C64>], coeffs: &[f64]) -> Vec<C64> {
    let mut out = a.to_vec();
    for (bk, &c) in b.iter().zip(coeffs) {
        for (o, z) in out.iter_mut().zip(bk) {
            *o += z * c;
        }
    }
    out
}

/// QFI of node `j` when the other nodes co-encode `c_k θ_j`.
/// `coeffs` lists the `n − 1` coefficients of the other nodes in order.
pub fn reducible_qfi(rho: &DensityMatrix, j: usize, coeffs: &[f64], gens: &GeneratorSet) -> Result<f64> {
    check_set(rho, gens, j)?;
    if coeffs.len() != gens.len() - 1 {
        return Err(Error::param("coeffs", format!("expected {} coefficients, got {}", gens.len() - 1, coeffs.len())));
    }
    let s = Spectrum::new(rho)?;
    let (a, b) = split_elements(&s, gens, j)?;
    Ok(s.weighted_norm(&combine(&a, &b, coeffs)))
}

/// Minimum-norm solution of `M c = −v` via a spectral pseudo-inverse.
fn solve_min_norm(m: &[Vec<f64>], v: &[f64]) -> Result<Vec<f64>> {
    let k = v.len();
    let rows: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
    let eig = eig_hermitian(&ComplexMatrix::from_rows(&rows)?)?;
    let scale = eig.values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let mut c = vec![0.0; k];
    if scale == 0.0 {
        return Ok(c);
    }
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam.abs() <= tolerances::PINV_RELATIVE * scale {
            continue;
        }
        let u = eig.vector(idx);
        let proj: f64 = u.iter().zip(v).map(|(ui, vi)| ui.re * vi).sum();
        for (ci, ui) in c.iter_mut().zip(&u) {
            *ci -= ui.re * proj / lam;
        }
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("normal equations produced non-finite coefficients".into()));
    }
    Ok(c)
}

fn minimize_with(s: &Spectrum, gens: &GeneratorSet, j: usize) -> Result<NodePrivacy> {
    let (a, b) = split_elements(s, gens, j)?;
    let k = b.len();
    let w: Vec<f64> = s.pairs.iter().map(|p| p.2).collect();
    let re_dot = |x: &[C64], y: &[C64]| -> f64 { w.iter().zip(x.iter().zip(y)).map(|(wi, (p, q))| wi * (p.conj() * q).re).sum() };
    let m: Vec<Vec<f64>> = (0..k).map(|r| (0..k).map(|c| re_dot(&b[r], &b[c])).collect()).collect();
    let v: Vec<f64> = (0..k).map(|r| re_dot(&a, &b[r])).collect();
    let coefficients = solve_min_norm(&m, &v)?;
    let alpha = s.weighted_norm(&combine(&a, &b, &coefficients));
    if alpha < -tolerances::HERMITIAN {
        return Err(Error::Numeric(format!("negative minimised QFI {alpha}")));
    }
    Ok(NodePrivacy {
        node: j,
        alpha: alpha.max(0.0),
        coefficients,
    })
}

/// `(α_j, c)` minimising the reducible QFI of node `j`.
pub fn minimize_reducible_qfi(rho: &DensityMatrix, j: usize, gens: &GeneratorSet) -> Result<(f64, Vec<f64>)> {
    check_set(rho, gens, j)?;
    let r = minimize_with(&Spectrum::new(rho)?, gens, j)?;
    Ok((r.alpha, r.coefficients))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodePrivacy {
    /// 0-based node index.
    pub node: usize,
    pub alpha: f64,
    /// Coefficients of the other nodes, in node order.
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub n: usize,
    pub generator_convention: String,
    pub per_node: Vec<NodePrivacy>,
    pub epsilon_p: f64,
}

impl PrivacyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `ε_p = max_j α_j / n²`.
pub fn privacy_parameter(rho: &DensityMatrix, gens: &GeneratorSet) -> Result<PrivacyReport> {
    check_set(rho, gens, 0)?;
    let s = Spectrum::new(rho)?;
    let per_node = (0..gens.len())
        .into_par_iter()
        .map(|j| minimize_with(&s, gens, j))
        .collect::<Result<Vec<_>>>()?;
    let n = gens.len();
    let epsilon_p = per_node.iter().map(|p| p.alpha).fold(0.0, f64::max) / (n * n) as f64;
    Ok(PrivacyReport {
        n,
        generator_convention: gens.convention().to_string(),
        per_node,
        epsilon_p,
    })
}
