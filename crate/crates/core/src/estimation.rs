//! Parity-based estimation of the global phase and the integrity bounds on
//! its accuracy and precision.
//!
//! Each round every node measures `X` and announces `±1`; the mean parity
//! `ĝ` estimates `cos φ` and `φ̂ = arccos(ĝ)`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expectation, fidelity_pure, DensityMatrix};
use crate::rng::SeedStream;
use crate::states::{encode_phases, ghz, Pauli, PauliString, PhaseVector};
use crate::tolerances;
use crate::verification::{integrity_theo, MeasurementDistribution, VerificationParams};

/// Reports with more than this many single-node outcomes keep only the
/// summary statistics.
pub const DEFAULT_OUTCOME_LIMIT: usize = 200_000;

/// Maps `φ` into `[0, π]`, the range of `arccos`.
pub fn fold(phi: f64) -> f64 {
    let x = phi.rem_euclid(TAU);
    if x > PI {
        TAU - x
    } else {
        x
    }
}

fn arccos_clamped(g: f64) -> f64 {
    g.clamp(-1.0, 1.0).acos()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub phases: PhaseVector,
    /// `Σ θ_i`.
    pub true_phi: f64,
    /// `true_phi` folded into `[0, π]`.
    pub phi_ref: f64,
    pub nu: usize,
    pub seed: u64,
    pub g_hat: f64,
    pub phi_hat: f64,
    pub distance: f64,
    /// Plug-in `(1 − ĝ²)/(ν sin²φ̂)`; absent when `sin φ̂` is too small.
    pub empirical_variance: Option<f64>,
    /// Mean `X` outcome of each node.
    pub node_x_means: Vec<f64>,
    /// Omitted when the run exceeds the outcome limit.
    pub parity_outcomes: Option<Vec<i8>>,
    /// `ν × n`, omitted together with `parity_outcomes`.
    pub per_node_x_outcomes: Option<Vec<Vec<i8>>>,
}

impl EstimationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn parity_distribution(rho: &DensityMatrix, phases: &PhaseVector) -> Result<MeasurementDistribution> {
    let n = rho.n_qubits();
    if phases.len() != n {
        return Err(Error::Dimension(format!("{} phases for {n} nodes", phases.len())));
    }
    let encoded = encode_phases(rho, phases)?;
    MeasurementDistribution::new(&encoded, &PauliString::uniform(n, Pauli::X)?)
}

fn check_nu(nu: usize) -> Result<()> {
    if nu == 0 {
        return Err(Error::param("nu", "need at least one round"));
    }
    Ok(())
}

/// Draws `ν` rounds of joint `X` outcomes; round `r` uses position `r` of
/// the stream. Returns basis indices.
fn draw_rounds(dist: &MeasurementDistribution, nu: usize, stream: &SeedStream) -> Vec<usize> {
    (0..nu as u64)
        .into_par_iter()
        .map(|r| dist.sample_index(stream.uniform(r)))
        .collect()
}

pub fn sample_estimation_rounds(rho: &DensityMatrix, phases: &PhaseVector, nu: usize, seed: u64) -> Result<EstimationReport> {
    sample_estimation_rounds_with_limit(rho, phases, nu, seed, DEFAULT_OUTCOME_LIMIT)
}

pub fn sample_estimation_rounds_with_limit(rho: &DensityMatrix, phases: &PhaseVector, nu: usize, seed: u64, outcome_limit: usize) -> Result<EstimationReport> {
    check_nu(nu)?;
    let dist = parity_distribution(rho, phases)?;
    let n = rho.n_qubits();
    let idx = draw_rounds(&dist, nu, &SeedStream::new(seed).named("estimation"));
    let rows = idx.iter().map(|&i| (0..n).map(|j| dist.local_outcome(i, j)).collect()).collect();
    report_from_rows(phases, seed, rows, outcome_limit)
}

/// Builds a report from per-round node outcomes (`ν × n`, each `±1`).
pub(crate) fn report_from_rows(phases: &PhaseVector, seed: u64, rows: Vec<Vec<i8>>, outcome_limit: usize) -> Result<EstimationReport> {
    let nu = rows.len();
    check_nu(nu)?;
    let n = phases.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension(format!("round with {} outcomes for {n} nodes", bad.len())));
    }
    let parities: Vec<i8> = rows.iter().map(|r| r.iter().product()).collect();
    let g_hat = parities.iter().map(|&m| m as f64).sum::<f64>() / nu as f64;
    let phi_hat = arccos_clamped(g_hat);
    let true_phi = phases.global_phase();
    let phi_ref = fold(true_phi);
    let node_x_means = (0..n)
        .map(|j| rows.iter().map(|r| r[j] as f64).sum::<f64>() / nu as f64)
        .collect();
    let sin2 = phi_hat.sin().powi(2);
    let empirical_variance = (phi_hat.sin().abs() > tolerances::SIN_PHASE).then(|| (1.0 - g_hat * g_hat) / (nu as f64 * sin2));
    let keep = nu.saturating_mul(n + 1) <= outcome_limit;
    Ok(EstimationReport {
        phases: phases.clone(),
        true_phi,
        phi_ref,
        nu,
        seed,
        g_hat,
        phi_hat,
        distance: (phi_hat - phi_ref).abs(),
        empirical_variance,
        node_x_means,
        parity_outcomes: keep.then_some(parities),
        per_node_x_outcomes: keep.then_some(rows),
    })
}

/// Exact `Tr[X^⊗n · encode(ρ, θ)]`.
pub fn expected_parity(rho: &DensityMatrix, phases: &PhaseVector) -> Result<f64> {
    let n = rho.n_qubits();
    if phases.len() != n {
        return Err(Error::Dimension(format!("{} phases for {n} nodes", phases.len())));
    }
    let encoded = encode_phases(rho, phases)?;
    expectation(&encoded, &PauliString::uniform(n, Pauli::X)?.matrix()?)
}

/// Single-node estimate `arccos(⟨X_i⟩)` from node `i`'s outcomes alone.
pub fn estimate_local(report: &EstimationReport, i: usize) -> Result<f64> {
    let m = report
        .node_x_means
        .get(i)
        .ok_or_else(|| Error::param("i", format!("node {i} out of range for {} nodes", report.node_x_means.len())))?;
    Ok(arccos_clamped(*m))
}

/// `|φ̂_i − fold(θ_i)|` for the single-node estimate.
pub fn local_distance(report: &EstimationReport, i: usize) -> Result<f64> {
    let est = estimate_local(report, i)?;
    Ok((est - fold(report.phases.thetas()[i])).abs())
}

fn sin_checked(phi: f64) -> Result<f64> {
    let s = phi.sin();
    if s.abs() <= tolerances::SIN_PHASE.sin() {
        return Err(Error::Singularity { parameter: "phi", value: phi });
    }
    Ok(s)
}

/// `(1 − g²)/(ν sin²φ)`.
pub fn variance_formula(g: f64, phi: f64, nu: usize) -> Result<f64> {
    check_nu(nu)?;
    let s = sin_checked(phi)?;
    Ok((1.0 - g * g) / (nu as f64 * s * s))
}

/// `2ε_i/|sin φ|` with observable norm `o = 1`.
pub fn accuracy_bound(epsilon_i: f64, phi: f64) -> Result<f64> {
    let s = sin_checked(phi)?;
    Ok(2.0 * epsilon_i / s.abs())
}

/// `4ε_i(2/ν + ε_i)/sin²φ`.
pub fn precision_bound(epsilon_i: f64, nu: usize, phi: f64) -> Result<f64> {
    check_nu(nu)?;
    let s = sin_checked(phi)?;
    Ok(4.0 * epsilon_i * (2.0 / nu as f64 + epsilon_i) / (s * s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrityAssessment {
    pub phi: f64,
    pub nu: usize,
    pub fidelity: f64,
    pub f: f64,
    pub epsilon_i_exp: f64,
    pub epsilon_i_theo: f64,
    pub g_exact: f64,
    pub phi_hat_exact: f64,
    pub accuracy_lhs: f64,
    pub accuracy_rhs_exp: f64,
    pub accuracy_rhs_theo: f64,
    pub precision_lhs: f64,
    pub precision_rhs_exp: f64,
    pub precision_rhs_theo: f64,
}

impl IntegrityAssessment {
    /// Both inequalities hold for both choices of `ε_i`, up to round-off
    /// of `INEQUALITY_SLACK` (the exact GHZ state meets them with equality).
    pub fn holds(&self) -> bool {
        let le = |lhs: f64, rhs: f64| lhs <= rhs + tolerances::INEQUALITY_SLACK;
        le(self.accuracy_lhs, self.accuracy_rhs_exp)
            && le(self.accuracy_lhs, self.accuracy_rhs_theo)
            && le(self.precision_lhs, self.precision_rhs_exp)
            && le(self.precision_lhs, self.precision_rhs_theo)
    }
}

/// Evaluates both integrity inequalities for `ρ` encoded with the whole
/// phase `φ` on the first node, using the exact parity expectation in place
/// of `𝔼(φ̂)`. `ε_{i,exp} = √(1 − F(ρ, GHZ))`; `ε_{i,theo}` comes from the
/// verification failure rate `f`.
pub fn integrity_assessment(rho: &DensityMatrix, phi: f64, nu: usize, params: &VerificationParams, f: f64) -> Result<IntegrityAssessment> {
    let n = rho.n_qubits();
    if params.n != n {
        return Err(Error::Dimension(format!("state on {n} qubits, params for {}", params.n)));
    }
    sin_checked(phi)?;
    let fidelity = fidelity_pure(rho, &ghz(n)?)?;
    let epsilon_i_exp = (1.0 - fidelity).sqrt();
    let epsilon_i_theo = integrity_theo(f, n, params.c);
    let g_exact = expected_parity(rho, &PhaseVector::on_first(n, phi))?;
    let phi_hat_exact = arccos_clamped(g_exact);
    Ok(IntegrityAssessment {
        phi,
        nu,
        fidelity,
        f,
        epsilon_i_exp,
        epsilon_i_theo,
        g_exact,
        phi_hat_exact,
        accuracy_lhs: (phi_hat_exact - fold(phi)).abs(),
        accuracy_rhs_exp: accuracy_bound(epsilon_i_exp, phi)?,
        accuracy_rhs_theo: accuracy_bound(epsilon_i_theo, phi)?,
        precision_lhs: (variance_formula(g_exact, phi, nu)? - 1.0 / nu as f64).abs(),
        precision_rhs_exp: precision_bound(epsilon_i_exp, nu, phi)?,
        precision_rhs_theo: precision_bound(epsilon_i_theo, nu, phi)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub nu: usize,
    pub var_emp: f64,
    pub var_ideal: f64,
    /// `1/(ν ε_p)`; empty when `ε_p = 0`.
    pub var_privacy_ref: Option<f64>,
}

/// Sample variance of `φ̂` over `repetitions` independent runs for each
/// `ν`, next to the ideal `1/ν` and the privacy-limited `1/(ν ε_p)`.
pub fn variance_scaling_experiment(
    rho: &DensityMatrix,
    phases: &PhaseVector,
    nu_grid: &[usize],
    repetitions: usize,
    seed: u64,
    epsilon_p: f64,
) -> Result<Vec<VarianceRow>> {
    if repetitions < 2 {
        return Err(Error::param("repetitions", "need at least two repetitions for a sample variance"));
    }
    if let Some(&bad) = nu_grid.iter().find(|&&nu| nu < 2) {
        return Err(Error::param("nu", format!("every ν must be at least 2, got {bad}")));
    }
    if !(epsilon_p >= 0.0 && epsilon_p.is_finite()) {
        return Err(Error::param("epsilon_p", format!("must be non-negative, got {epsilon_p}")));
    }
    let dist = parity_distribution(rho, phases)?;
    let root = SeedStream::new(seed).named("variance");
    nu_grid
        .iter()
        .enumerate()
        .map(|(gi, &nu)| {
            let grid_stream = root.child(gi as u64);
            let estimates: Vec<f64> = (0..repetitions as u64)
                .into_par_iter()
                .map(|rep| {
                    let stream = grid_stream.child(rep);
                    let g = (0..nu as u64)
                        .map(|r| dist.sample(stream.uniform(r)) as f64)
                        .sum::<f64>()
                        / nu as f64;
                    arccos_clamped(g)
                })
                .collect();
            let mean = estimates.iter().sum::<f64>() / repetitions as f64;
            let var_emp = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (repetitions - 1) as f64;
            Ok(VarianceRow {
                nu,
                var_emp,
                var_ideal: 1.0 / nu as f64,
                var_privacy_ref: (epsilon_p > 0.0).then(|| 1.0 / (nu as f64 * epsilon_p)),
            })
        })
        .collect()
}

/// Least-squares slope of `ln var_emp` against `ln ν`.
pub fn log_log_slope(rows: &[VarianceRow]) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::param("rows", "need at least two points"));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.nu as f64).ln(), r.var_emp.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{apply_noise, plus_state, NoiseModel};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn fold_reflects_into_range() {
        assert!((fold(0.3) - 0.3).abs() < 1e-15);
        assert!((fold(-0.3) - 0.3).abs() < 1e-15);
        assert!((fold(TAU + 1.0) - 1.0).abs() < 1e-12);
        assert!((fold(4.0) - (TAU - 4.0)).abs() < 1e-15);
        assert!((fold(PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn zero_phase_ghz_is_exact() {
        let rho = ghz(3).unwrap().to_density();
        let r = sample_estimation_rounds(&rho, &PhaseVector::zeros(3), 500, 1).unwrap();
        assert!(r.parity_outcomes.as_ref().unwrap().iter().all(|&m| m == 1));
        assert_eq!(r.phi_hat, 0.0);
        assert_eq!(r.g_hat, 1.0);
    }

    #[test]
    fn report_invariants() {
        let rho = ghz(3).unwrap().to_density();
        let r = sample_estimation_rounds(&rho, &PhaseVector::on_first(3, 1.1), 1000, 3).unwrap();
        let parities = r.parity_outcomes.as_ref().unwrap();
        let mean = parities.iter().map(|&m| m as f64).sum::<f64>() / 1000.0;
        assert!((r.g_hat - mean).abs() < 1e-15);
        assert_eq!(r.phi_hat, r.g_hat.clamp(-1.0, 1.0).acos());
        let rows = r.per_node_x_outcomes.as_ref().unwrap();
        for (row, p) in rows.iter().zip(parities) {
            assert_eq!(row.iter().product::<i8>(), *p);
        }
        let small = sample_estimation_rounds_with_limit(&rho, &PhaseVector::on_first(3, 1.1), 1000, 3, 10).unwrap();
        assert!(small.parity_outcomes.is_none() && small.per_node_x_outcomes.is_none());
        assert_eq!(small.g_hat, r.g_hat);
    }

    #[test]
    fn expected_parity_closed_forms() {
        let g = ghz(3).unwrap().to_density();
        let mix = apply_noise(&g, &NoiseModel::paper_mixture(0.9).unwrap()).unwrap();
        let thetas = PhaseVector::new(vec![0.4, -0.2, 0.9]).unwrap();
        let phi = thetas.global_phase();
        assert!((expected_parity(&g, &thetas).unwrap() - phi.cos()).abs() < 1e-12);
        assert!((expected_parity(&mix, &thetas).unwrap() - 0.9 * phi.cos()).abs() < 1e-12);
        let plus = plus_state(3).unwrap().to_density();
        let prod: f64 = thetas.thetas().iter().map(|t| t.cos()).product();
        assert!((expected_parity(&plus, &thetas).unwrap() - prod).abs() < 1e-12);
        assert!(expected_parity(&g, &PhaseVector::zeros(2)).is_err());
    }

    #[test]
    fn local_estimates_on_product_state() {
        let plus = plus_state(3).unwrap().to_density();
        let thetas = PhaseVector::new(vec![0.7, 0.3, 0.5]).unwrap();
        let r = sample_estimation_rounds(&plus, &thetas, 40_000, 11).unwrap();
        for (i, t) in [0.7, 0.3, 0.5].iter().enumerate() {
            assert!((estimate_local(&r, i).unwrap() - t).abs() < 0.05);
        }
        assert!(estimate_local(&r, 3).is_err());
    }

    #[test]
    fn formula_values() {
        assert!((variance_formula(0.0, FRAC_PI_2, 100).unwrap() - 0.01).abs() < 1e-15);
        let phi: f64 = 1.2;
        assert!((variance_formula(phi.cos(), phi, 50).unwrap() - 1.0 / 50.0).abs() < 1e-14);
        assert_eq!(variance_formula(0.3, 1.0, 40).unwrap(), 2.0 * variance_formula(0.3, 1.0, 80).unwrap());
        assert_eq!(accuracy_bound(0.0, 1.0).unwrap(), 0.0);
        assert!((accuracy_bound(0.095f64.sqrt(), FRAC_PI_2).unwrap() - 0.6164).abs() < 1e-4);
        let a = accuracy_bound(0.2, FRAC_PI_2).unwrap();
        assert!((accuracy_bound(0.2, PI / 6.0).unwrap() - 2.0 * a).abs() < 1e-12);
        assert_eq!(precision_bound(0.0, 10, 1.0).unwrap(), 0.0);
        assert!((precision_bound(0.784, 3200, FRAC_PI_2).unwrap() - 2.4606).abs() < 1e-4);
        let e = integrity_theo(0.047, 3, 0.25);
        assert!((precision_bound(e, 3200, FRAC_PI_2).unwrap() - 2.4633).abs() < 1e-4);
    }

    #[test]
    fn singular_phases_error() {
        for phi in [0.0, PI, 1e-7, PI - 1e-7, TAU] {
            assert!(matches!(variance_formula(0.0, phi, 10), Err(Error::Singularity { .. })), "{phi}");
            assert!(matches!(accuracy_bound(0.1, phi), Err(Error::Singularity { .. })));
            assert!(matches!(precision_bound(0.1, 10, phi), Err(Error::Singularity { .. })));
        }
        assert!(accuracy_bound(0.1, 1e-5).is_ok());
    }

    #[test]
    fn pure_ghz_assessment_is_tight() {
        let rho = ghz(3).unwrap().to_density();
        let p = VerificationParams::new(3, 16.0, 0.25, 0);
        let a = integrity_assessment(&rho, 1.0, 3200, &p, 0.0).unwrap();
        assert!(a.epsilon_i_exp.abs() < 1e-7);
        assert!(a.accuracy_lhs < 1e-7 && a.precision_lhs < 1e-12);
        assert!(a.holds());
    }

    #[test]
    fn variance_rows_and_slope() {
        let rho = ghz(3).unwrap().to_density();
        let rows = variance_scaling_experiment(&rho, &PhaseVector::on_first(3, FRAC_PI_2), &[50, 200], 100, 4, 0.005).unwrap();
        assert_eq!(rows[0].var_ideal, 0.02);
        assert!((rows[1].var_privacy_ref.unwrap() - 1.0).abs() < 1e-12);
        assert!(log_log_slope(&rows).unwrap() < 0.0);
        let none = variance_scaling_experiment(&rho, &PhaseVector::on_first(3, 1.0), &[10], 2, 4, 0.0).unwrap();
        assert!(none[0].var_privacy_ref.is_none());
        assert!(variance_scaling_experiment(&rho, &PhaseVector::on_first(3, 1.0), &[1], 5, 4, 0.0).is_err());
    }
}
