//! Stabilizer-test verification of a shared GHZ resource.
//!
//! The verifier tests half of the `N_t` distributed copies against the
//! `n + 1` GHZ stabilizers, computes the failure rate `f`, accepts when
//! `f ≤ 1/(2n²)`, and nominates one untested copy as the sensing target.
//! The failure rate feeds the closed-form guarantees: a fidelity lower
//! bound, its confidence, an upper bound on the privacy parameter, and the
//! protocol-side integrity parameter.

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expectation, fidelity_pure, DensityMatrix};
use crate::rng::SeedStream;
use crate::states::{apply_noise, conjugate_local, ghz, NoiseKind, NoiseModel, Pauli, PauliString};

/// `K_1 … K_n` followed by `K_{n+1} = +X^⊗n`. `K_i` carries sign `−1`,
/// `Y` on qubits `i` and `i+1` (cyclically) and `X` elsewhere.
pub fn stabilizer_set(n: usize) -> Result<Vec<PauliString>> {
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 nodes, got {n}")));
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut letters = vec![Pauli::X; n];
        letters[i] = Pauli::Y;
        letters[(i + 1) % n] = Pauli::Y;
        out.push(PauliString::negative(letters)?);
    }
    out.push(PauliString::uniform(n, Pauli::X)?);
    Ok(out)
}

/// Acceptance threshold `1/(2n²)` on the failure rate.
pub fn acceptance_threshold(n: usize) -> f64 {
    1.0 / (2.0 * (n * n) as f64)
}

/// `N_t = ⌈2 m n⁵ ln n⌉`.
pub fn required_copies(n: usize, m: f64) -> Result<u64> {
    if n < 2 {
        return Err(Error::param("n", "need at least 2 nodes"));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::param("m", format!("must be positive, got {m}")));
    }
    Ok(copies_real(n, m).ceil() as u64)
}

pub(crate) fn copies_real(n: usize, m: f64) -> f64 {
    2.0 * m * (n as f64).powi(5) * (n as f64).ln()
}

/// Checks `3/(2m) < c < (n−1)²/4`.
pub fn check_c_constraint(n: usize, m: f64, c: f64) -> Result<()> {
    let lo = 3.0 / (2.0 * m);
    let hi = ((n - 1) * (n - 1)) as f64 / 4.0;
    if !(lo < c && c < hi) {
        return Err(Error::param("c", format!("{c} violates {lo} < c < {hi} for n = {n}, m = {m}")));
    }
    Ok(())
}

fn slack(f: f64, n: usize, c: f64) -> f64 {
    2.0 * c.sqrt() / n as f64 + 2.0 * n as f64 * f
}

/// `1 − 2√c/n − 2nf`, unclamped.
pub fn fidelity_lower_bound(f: f64, n: usize, c: f64) -> f64 {
    1.0 - slack(f, n, c)
}

/// Probability `1 − n^{1 − 2mc/3}` that the fidelity bound holds.
pub fn confidence(n: usize, m: f64, c: f64) -> Result<f64> {
    check_c_constraint(n, m, c)?;
    Ok(1.0 - (n as f64).powf(1.0 - 2.0 * m * c / 3.0))
}

/// `ε_p ≤ (24/n²) √(2√c/n + 2nf)`.
pub fn privacy_upper_bound(f: f64, n: usize, c: f64) -> f64 {
    24.0 / (n * n) as f64 * integrity_theo(f, n, c)
}

/// `ε_i = √(2√c/n + 2nf)`.
pub fn integrity_theo(f: f64, n: usize, c: f64) -> f64 {
    slack(f, n, c).sqrt()
}

/// Born distribution of the local outcomes when every node measures its
/// letter of a Pauli string. Outcome index bit `j` is `0` for the `+1`
/// eigenvalue on qubit `j`.
#[derive(Debug, Clone)]
pub struct MeasurementDistribution {
    stabilizer: PauliString,
    cdf: Vec<f64>,
    probs: Vec<f64>,
}

impl MeasurementDistribution {
    pub fn new(rho: &DensityMatrix, stabilizer: &PauliString) -> Result<Self> {
        let n = rho.n_qubits();
        if stabilizer.len() != n {
            return Err(Error::Dimension(format!("{}-qubit string on {n}-qubit state", stabilizer.len())));
        }
        let mut m = rho.matrix().clone();
        for (j, letter) in stabilizer.letters().iter().enumerate() {
            if *letter == Pauli::I || *letter == Pauli::Z {
                continue;
            }
            let v = letter.eigenbasis();
            let v_dag = [[v[0][0].conj(), v[1][0].conj()], [v[0][1].conj(), v[1][1].conj()]];
            m = conjugate_local(&m, n, j, &v_dag);
        }
        let mut probs: Vec<f64> = m.diagonal().iter().map(|z| z.re.max(0.0)).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(MeasurementDistribution {
            stabilizer: stabilizer.clone(),
            cdf,
            probs,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.stabilizer.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF draw for a uniform `u ∈ [0, 1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let pos = self.cdf.partition_point(|&c| c <= u);
        // guard against round-off leaving the last cdf entry below 1
        pos.min(self.cdf.len() - 1)
    }

    /// `±1` outcome of node `qubit`; identity positions report `+1`.
    pub fn local_outcome(&self, idx: usize, qubit: usize) -> i8 {
        let n = self.n_qubits();
        if self.stabilizer.letters()[qubit] == Pauli::I || (idx >> (n - 1 - qubit)) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    /// Recorded stabilizer value `sign × Π_j s_j`.
    pub fn joint_outcome(&self, idx: usize) -> i8 {
        let parity = (0..self.n_qubits()).fold(1i8, |acc, j| acc * self.local_outcome(idx, j));
        parity * self.stabilizer.sign()
    }

    pub fn sample(&self, u: f64) -> i8 {
        self.joint_outcome(self.sample_index(u))
    }

    /// Exact probability of a `−1` record.
    pub fn failure_probability(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| self.joint_outcome(*i) < 0)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Samples `shots` records of stabilizer `k` on `rho`. Shot `i` uses
/// position `i` of `stream`, so the result does not depend on how the work
/// is split across threads.
pub fn sample_stabilizer(rho: &DensityMatrix, k: &PauliString, shots: usize, stream: &SeedStream) -> Result<Vec<i8>> {
    if shots == 0 {
        return Err(Error::param("shots", "need at least one shot"));
    }
    let dist = MeasurementDistribution::new(rho, k)?;
    Ok((0..shots as u64)
        .into_par_iter()
        .map(|i| dist.sample(stream.uniform(i)))
        .collect())
}

/// Exact `(1 − ⟨K⟩)/2`, clamped against round-off.
pub fn exact_failure_probability(rho: &DensityMatrix, k: &PauliString) -> Result<f64> {
    Ok(((1.0 - expectation(rho, &k.matrix()?)?) / 2.0).clamp(0.0, 1.0))
}

/// Exact failure rate averaged uniformly over all `n + 1` stabilizers.
pub fn exact_failure_rate(rho: &DensityMatrix) -> Result<f64> {
    let stabs = stabilizer_set(rho.n_qubits())?;
    let total: f64 = stabs
        .iter()
        .map(|k| exact_failure_probability(rho, k))
        .sum::<Result<f64>>()?;
    Ok(total / stabs.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationParams {
    pub n: usize,
    /// Statistical-strength parameter in `N_t = ⌈2 m n⁵ ln n⌉`.
    pub m: f64,
    /// Confidence trade-off parameter.
    pub c: f64,
    /// Fixed number of test shots per stabilizer. `None` derives the test
    /// budget `⌊N_t/2⌋` from `m`.
    #[serde(default)]
    pub shots_per_stabilizer: Option<u64>,
    pub seed: u64,
}

impl VerificationParams {
    pub fn new(n: usize, m: f64, c: f64, seed: u64) -> Self {
        VerificationParams {
            n,
            m,
            c,
            shots_per_stabilizer: None,
            seed,
        }
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots_per_stabilizer = Some(shots);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", "need at least 2 nodes"));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::param("m", "must be positive"));
        }
        if self.shots_per_stabilizer == Some(0) {
            return Err(Error::param("shots_per_stabilizer", "must be positive"));
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::param("c", format!("must be non-negative, got {}", self.c)));
        }
        Ok(())
    }

    /// `(N_t, tests per stabilizer)`. The test budget `⌊N_t/2⌋` is split
    /// evenly over the `n + 1` stabilizers, remainder round-robin.
    pub fn allocation(&self) -> Result<(u64, Vec<u64>)> {
        let k = (self.n + 1) as u64;
        match self.shots_per_stabilizer {
            Some(s) => Ok((2 * s * k, vec![s; k as usize])),
            None => {
                let total = required_copies(self.n, self.m)?;
                let budget = total / 2;
                if budget < k {
                    return Err(Error::param(
                        "m",
                        format!("N_t = {total} leaves {budget} test copies for {k} stabilizers"),
                    ));
                }
                let counts = (0..k).map(|i| budget / k + u64::from(i < budget % k)).collect();
                Ok((total, counts))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerTally {
    pub stabilizer: PauliString,
    pub tested: u64,
    pub passed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub log_base: String,
    pub copy_allocation: String,
    pub seed: u64,
}

impl ReportMetadata {
    pub(crate) fn new(seed: u64) -> Self {
        ReportMetadata {
            log_base: "natural".into(),
            copy_allocation: "floor(N_t/2) test copies split evenly over the n+1 stabilizers, remainder round-robin \
                              (protocol table lists N_t/(2n) per stabilizer, which would exceed N_t/2)"
                .into(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: VerificationParams,
    pub total_copies: u64,
    pub tested_copies: u64,
    pub per_stabilizer: Vec<StabilizerTally>,
    pub f: f64,
    pub threshold: f64,
    pub accepted: bool,
    pub fidelity_lower_bound: f64,
    pub fidelity_lower_bound_clamped: f64,
    /// Whether `3/(2m) < c < (n−1)²/4`; the confidence is only defined
    /// inside that window.
    pub c_in_window: bool,
    pub confidence: Option<f64>,
    pub epsilon_p_upper: f64,
    pub epsilon_p_upper_clamped: f64,
    pub epsilon_i_theo: f64,
    pub target_copy_index: u64,
    pub metadata: ReportMetadata,
}

impl VerificationReport {
    /// Assembles the report from raw tallies; shared with the protocol
    /// harness so both paths compute `f` and the bounds identically.
    pub(crate) fn from_tallies(params: &VerificationParams, total_copies: u64, per_stabilizer: Vec<StabilizerTally>, target_copy_index: u64) -> Result<Self> {
        let tested: u64 = per_stabilizer.iter().map(|t| t.tested).sum();
        let passed: u64 = per_stabilizer.iter().map(|t| t.passed).sum();
        let f = (tested - passed) as f64 / tested as f64;
        let n = params.n;
        let threshold = acceptance_threshold(n);
        let flb = fidelity_lower_bound(f, n, params.c);
        let eps_p = privacy_upper_bound(f, n, params.c);
        Ok(VerificationReport {
            params: params.clone(),
            total_copies,
            tested_copies: tested,
            per_stabilizer,
            f,
            threshold,
            accepted: f <= threshold,
            fidelity_lower_bound: flb,
            fidelity_lower_bound_clamped: flb.clamp(0.0, 1.0),
            c_in_window: check_c_constraint(n, params.m, params.c).is_ok(),
            confidence: confidence(n, params.m, params.c).ok(),
            epsilon_p_upper: eps_p,
            epsilon_p_upper_clamped: eps_p.clamp(0.0, 1.0),
            epsilon_i_theo: integrity_theo(f, n, params.c),
            target_copy_index,
            metadata: ReportMetadata::new(params.seed),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs the verification protocol on `N_t` i.i.d. copies of `rho`.
pub fn run_verification(rho: &DensityMatrix, params: &VerificationParams) -> Result<VerificationReport> {
    params.validate()?;
    if rho.n_qubits() != params.n {
        return Err(Error::Dimension(format!("state on {} qubits, params for {}", rho.n_qubits(), params.n)));
    }
    let (total, counts) = params.allocation()?;
    let root = SeedStream::new(params.seed);
    let mut selection = TestSelection::draw(&root, total, &counts);
    let outcomes = root.named("outcomes");
    let stabs = stabilizer_set(params.n)?;

    let mut tallies = Vec::with_capacity(stabs.len());
    for (k, copies) in stabs.iter().zip(selection.by_stabilizer()) {
        let dist = MeasurementDistribution::new(rho, k)?;
        let passed = copies
            .par_iter()
            .filter(|&&copy| dist.sample(outcomes.uniform(copy)) > 0)
            .count() as u64;
        tallies.push(StabilizerTally {
            stabilizer: k.clone(),
            tested: copies.len() as u64,
            passed,
        });
    }
    let target = selection.pick_target();
    VerificationReport::from_tallies(params, total, tallies, target)
}

/// The verifier's private choice of test copies. Copies are drawn uniformly
/// without replacement from `0..N_t`; the first `counts[0]` drawn go to
/// stabilizer 0, the next `counts[1]` to stabilizer 1, and so on.
pub(crate) struct TestSelection {
    total: u64,
    assigned: Vec<Vec<u64>>,
    rng: ChaCha12Rng,
}

impl TestSelection {
    pub(crate) fn draw(root: &SeedStream, total: u64, counts: &[u64]) -> Self {
        let mut rng = root.named("verifier").rng();
        let budget: u64 = counts.iter().sum();
        let drawn = index::sample(&mut rng, total as usize, budget as usize).into_vec();
        let mut offset = 0usize;
        let assigned = counts
            .iter()
            .map(|&c| {
                let part = drawn[offset..offset + c as usize].iter().map(|&x| x as u64).collect();
                offset += c as usize;
                part
            })
            .collect();
        TestSelection { total, assigned, rng }
    }

    pub(crate) fn by_stabilizer(&self) -> &[Vec<u64>] {
        &self.assigned
    }

    pub(crate) fn is_tested(&self) -> Vec<bool> {
        let mut tested = vec![false; self.total as usize];
        for &c in self.assigned.iter().flatten() {
            tested[c as usize] = true;
        }
        tested
    }

    /// Uniformly random untested copy, drawn from the verifier's stream.
    pub(crate) fn pick_target(&mut self) -> u64 {
        let tested = self.is_tested();
        let untested = tested.iter().filter(|t| !**t).count();
        let pick = self.rng.gen_range(0..untested);
        tested
            .iter()
            .enumerate()
            .filter(|(_, &t)| !t)
            .nth(pick)
            .map(|(i, _)| i as u64)
            .expect("at least one untested copy")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureHistogram {
    pub rounds: usize,
    pub shots_per_round: usize,
    pub seed: u64,
    pub values: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    pub threshold: f64,
    pub within_threshold: usize,
    pub bins: Vec<HistogramBin>,
}

impl FailureHistogram {
    pub fn within_fraction(&self) -> f64 {
        self.within_threshold as f64 / self.rounds as f64
    }
}

/// Repeats the stabilizer-sampling stage `rounds` times with
/// `shots_per_round` shots split round-robin over the `n + 1` stabilizers,
/// and histograms the resulting failure rates into `bins` equal bins.
pub fn failure_rate_histogram(rho: &DensityMatrix, shots_per_round: usize, rounds: usize, seed: u64, bins: usize) -> Result<FailureHistogram> {
    if shots_per_round == 0 || rounds == 0 || bins == 0 {
        return Err(Error::param("histogram", "shots, rounds and bins must be positive"));
    }
    let n = rho.n_qubits();
    let stabs = stabilizer_set(n)?;
    let dists = stabs
        .iter()
        .map(|k| MeasurementDistribution::new(rho, k))
        .collect::<Result<Vec<_>>>()?;
    let k = stabs.len();
    let root = SeedStream::new(seed);

    let values: Vec<f64> = (0..rounds as u64)
        .into_par_iter()
        .map(|r| {
            let round = root.child(r);
            let failures = (0..shots_per_round)
                .filter(|&s| dists[s % k].sample(round.uniform(s as u64)) < 0)
                .count();
            failures as f64 / shots_per_round as f64
        })
        .collect();

    let mean = values.iter().sum::<f64>() / rounds as f64;
    let std_dev = if rounds > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (rounds - 1) as f64).sqrt()
    } else {
        0.0
    };
    let threshold = acceptance_threshold(n);
    let within_threshold = values.iter().filter(|&&v| v <= threshold).count();

    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 / shots_per_round as f64 };
    let mut hist: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            bin_left: lo + b as f64 * width,
            bin_right: lo + (b + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for v in &values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        hist[b].count += 1;
    }

    Ok(FailureHistogram {
        rounds,
        shots_per_round,
        seed,
        values,
        mean,
        std_dev,
        threshold,
        within_threshold,
        bins: hist,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strength: f64,
    pub f_exact: f64,
    pub fidelity: f64,
    pub fidelity_lower_bound: f64,
}

/// Exact failure rate, GHZ fidelity and asymptotic (`c → 0`) fidelity
/// bound of the noisy GHZ state at each strength.
pub fn failure_vs_fidelity_sweep(n: usize, kind: NoiseKind, strengths: &[f64]) -> Result<Vec<SweepRow>> {
    let g = ghz(n)?;
    let pure = g.to_density();
    strengths
        .iter()
        .map(|&s| {
            let rho = apply_noise(&pure, &NoiseModel::new(kind, s)?)?;
            let f_exact = exact_failure_rate(&rho)?;
            Ok(SweepRow {
                strength: s,
                f_exact,
                fidelity: fidelity_pure(&rho, &g)?,
                fidelity_lower_bound: fidelity_lower_bound(f_exact, n, 0.0),
            })
        })
        .collect()
}

/// `points` evenly spaced strengths covering `[0, 1]`.
pub fn unit_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::plus_state;

    #[test]
    fn stabilizers_n3() {
        let s: Vec<String> = stabilizer_set(3).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["-YYX", "-XYY", "-YXY", "+XXX"]);
    }

    #[test]
    fn stabilizers_n2_wrap_coincides() {
        let s: Vec<String> = stabilizer_set(2).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["-YY", "-YY", "+XX"]);
        assert!(stabilizer_set(1).is_err());
    }

    #[test]
    fn stabilizers_fix_ghz() {
        for n in 2..=6 {
            let rho = ghz(n).unwrap().to_density();
            for k in stabilizer_set(n).unwrap() {
                let e = expectation(&rho, &k.matrix().unwrap()).unwrap();
                assert!((e - 1.0).abs() < 1e-12, "{k} on GHZ_{n}: {e}");
            }
        }
    }

    #[test]
    fn copies_formula() {
        assert_eq!(required_copies(3, 1.0).unwrap(), 534);
        assert_eq!(required_copies(2, 1.0).unwrap(), 45);
        for m in [0.5, 1.0, 3.7] {
            assert!((copies_real(4, 2.0 * m) - 2.0 * copies_real(4, m)).abs() < 1e-9);
        }
        assert!(required_copies(3, 0.0).is_err());
    }

    #[test]
    fn bound_formulas() {
        assert!((fidelity_lower_bound(0.0, 3, 0.0) - 1.0).abs() < 1e-15);
        let at_threshold = fidelity_lower_bound(acceptance_threshold(3), 3, 0.0);
        assert!((at_threshold - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(privacy_upper_bound(0.0, 3, 0.0), 0.0);
        assert_eq!(integrity_theo(0.0, 3, 0.0), 0.0);
        assert!((integrity_theo(0.047, 3, 0.25) - 0.784_431).abs() < 1e-5);
        for (f, c) in [(0.01, 0.1), (0.03, 0.5), (0.2, 0.0)] {
            let ratio = privacy_upper_bound(f, 3, c) / integrity_theo(f, 3, c);
            assert!((ratio - 24.0 / 9.0).abs() < 1e-12);
        }
        assert!(privacy_upper_bound(0.02, 3, 0.1) < privacy_upper_bound(0.03, 3, 0.1));
        assert!(privacy_upper_bound(0.02, 3, 0.1) < privacy_upper_bound(0.02, 3, 0.2));
    }

    #[test]
    fn confidence_values() {
        assert!((confidence(3, 16.0, 0.25).unwrap() - (1.0 - 3f64.powf(-5.0 / 3.0))).abs() < 1e-14);
        assert!((confidence(3, 16.0, 0.25).unwrap() - 0.840).abs() < 1e-3);
        // the lower end of the c window is where the bound turns vacuous
        assert!(confidence(3, 6.0, 0.25).is_err());
        assert!(confidence(3, 6.0, 0.2501).unwrap() < 1e-3);
        assert!(confidence(3, 16.0, 0.25).unwrap() < confidence(3, 20.0, 0.25).unwrap());
        assert!(confidence(3, 16.0, 1.0).is_err());
        assert!(confidence(3, 16.0, 0.05).is_err());
    }

    #[test]
    fn pure_ghz_samples_all_pass() {
        let rho = ghz(3).unwrap().to_density();
        for k in stabilizer_set(3).unwrap() {
            let s = sample_stabilizer(&rho, &k, 1000, &SeedStream::new(1)).unwrap();
            assert!(s.iter().all(|&o| o == 1));
        }
    }

    #[test]
    fn maximally_mixed_xxx_is_unbiased() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let k = PauliString::uniform(3, Pauli::X).unwrap();
        let shots = 20_000;
        let s = sample_stabilizer(&rho, &k, shots, &SeedStream::new(9)).unwrap();
        let mean = s.iter().map(|&o| o as f64).sum::<f64>() / shots as f64;
        assert!(mean.abs() < 4.0 / (shots as f64).sqrt());
    }

    #[test]
    fn distribution_matches_exact_failure() {
        let rho = apply_noise(&ghz(3).unwrap().to_density(), &NoiseModel::paper_mixture(0.9).unwrap()).unwrap();
        for k in stabilizer_set(3).unwrap() {
            let d = MeasurementDistribution::new(&rho, &k).unwrap();
            assert!((d.failure_probability() - exact_failure_probability(&rho, &k).unwrap()).abs() < 1e-12);
        }
        let plus = plus_state(3).unwrap().to_density();
        let d = MeasurementDistribution::new(&plus, &"-YYX".parse().unwrap()).unwrap();
        assert!((d.failure_probability() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn allocation_respects_budget() {
        let p = VerificationParams::new(3, 1.0, 2.0, 0);
        let (total, counts) = p.allocation().unwrap();
        assert_eq!(total, 534);
        assert_eq!(counts, vec![67, 67, 67, 66]);
        let p = VerificationParams::new(3, 1.0, 0.5, 0).with_shots(10);
        assert_eq!(p.allocation().unwrap(), (80, vec![10; 4]));
    }

    #[test]
    fn pure_state_is_accepted() {
        let rho = ghz(3).unwrap().to_density();
        let params = VerificationParams::new(3, 16.0, 0.25, 5);
        let r = run_verification(&rho, &params).unwrap();
        assert_eq!(r.f, 0.0);
        assert!(r.accepted);
        assert_eq!(r.tested_copies, r.total_copies / 2);
        assert!(r.target_copy_index < r.total_copies);
        assert_eq!(r, run_verification(&rho, &params).unwrap());
    }

    #[test]
    fn run_verification_validates() {
        let rho = ghz(3).unwrap().to_density();
        assert!(run_verification(&rho, &VerificationParams::new(3, 16.0, -1.0, 0)).is_err());
        let outside = run_verification(&rho, &VerificationParams::new(3, 1.0, 0.5, 0)).unwrap();
        assert!(!outside.c_in_window && outside.confidence.is_none());
        assert!(run_verification(&rho, &VerificationParams::new(4, 16.0, 0.25, 0)).is_err());
        assert!(run_verification(&rho, &VerificationParams::new(3, 16.0, 0.25, 0).with_shots(0)).is_err());
    }

    #[test]
    fn sweep_paper_mixture_row() {
        let rows = failure_vs_fidelity_sweep(3, NoiseKind::PaperMixture, &[0.0, 0.1]).unwrap();
        assert!((rows[0].f_exact).abs() < 1e-14 && (rows[0].fidelity - 1.0).abs() < 1e-14);
        assert!((rows[0].fidelity_lower_bound - 1.0).abs() < 1e-13);
        assert!((rows[1].f_exact - 0.05).abs() < 1e-12);
        assert!((rows[1].fidelity - 0.95).abs() < 1e-12);
        assert!((rows[1].fidelity_lower_bound - 0.70).abs() < 1e-12);
    }
}
