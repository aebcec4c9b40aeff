//! Message-level simulation of verification (one round) and of repeated
//! verification plus sensing, with an untrusted source.
//!
//! Parties exchange [`Message`]s through a single FIFO queue. The server
//! distributes `N_t` copies; the verifier, privately, picks the test copies
//! and their stabilizers; nodes measure and report over private channels;
//! the verifier accepts or aborts and names the target copy. In sensing
//! rounds the nodes then encode their phases on the target, measure `X`
//! and broadcast the outcomes.
//!
//! Quantum states live in a `Lab` that no party can inspect. Joint outcomes
//! of a copy are drawn from its Born distribution the first time any node
//! measures it; each node only ever sees its own local result.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{report_from_rows, EstimationReport, DEFAULT_OUTCOME_LIMIT};
use crate::linalg::DensityMatrix;
use crate::rng::SeedStream;
use crate::states::{encode_phases, plus_state, Pauli, PauliString, PhaseVector};
use crate::verification::{stabilizer_set, MeasurementDistribution, StabilizerTally, TestSelection, VerificationParams, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Server,
    Verifier,
    Node,
}

/// Node indices are 1-based. The server has index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyId {
    pub role: Role,
    pub index: usize,
}

impl PartyId {
    pub fn server() -> Self {
        PartyId { role: Role::Server, index: 0 }
    }

    pub fn node(index: usize) -> Self {
        PartyId { role: Role::Node, index }
    }

    pub fn verifier(index: usize) -> Self {
        PartyId { role: Role::Verifier, index }
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Server => f.write_str("server"),
            Role::Verifier => write!(f, "verifier{}", self.index),
            Role::Node => write!(f, "node{}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recipient {
    Party(PartyId),
    Broadcast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum Payload {
    DistributeCopy { copy: u64 },
    MeasureInstruction { copy: u64, stabilizer: PauliString, sensing: bool },
    OutcomeReport { copy: u64, outcome: i8 },
    TargetAnnouncement { copy: u64 },
    Abort { reason: String },
    PhaseEncodeInstruction { copy: u64 },
    XOutcomeAnnouncement { copy: u64, outcome: i8 },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::DistributeCopy { .. } => "distribute-copy",
            Payload::MeasureInstruction { .. } => "measure-instruction",
            Payload::OutcomeReport { .. } => "outcome-report",
            Payload::TargetAnnouncement { .. } => "target-announcement",
            Payload::Abort { .. } => "abort",
            Payload::PhaseEncodeInstruction { .. } => "phase-encode-instruction",
            Payload::XOutcomeAnnouncement { .. } => "x-outcome-announcement",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub seq: u64,
    pub round: u64,
    pub from: PartyId,
    pub to: Recipient,
    #[serde(flatten)]
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Honest,
    /// Replaces each copy independently with `|+⟩^⊗n` with probability `q`.
    SwapPlus,
    /// Swaps only copies the verifier did not select for testing. Needs the
    /// verifier's private selection, so it is not a realisable attack; it
    /// shows what the random selection protects against.
    SelectionAwareSwap,
}

impl SourceKind {
    pub fn is_sound(self) -> bool {
        !matches!(self, SourceKind::SelectionAwareSwap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceStrategy {
    pub kind: SourceKind,
    pub honest_state: DensityMatrix,
    pub swap_fraction: f64,
}

impl SourceStrategy {
    pub fn new(kind: SourceKind, honest_state: DensityMatrix, swap_fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&swap_fraction) {
            return Err(Error::param("swap_fraction", format!("{swap_fraction} outside [0, 1]")));
        }
        Ok(SourceStrategy {
            kind,
            honest_state,
            swap_fraction,
        })
    }

    pub fn honest(state: DensityMatrix) -> Self {
        SourceStrategy {
            kind: SourceKind::Honest,
            honest_state: state,
            swap_fraction: 0.0,
        }
    }

    pub fn swap_plus(state: DensityMatrix, q: f64) -> Result<Self> {
        Self::new(SourceKind::SwapPlus, state, q)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifierPlacement {
    /// Node 1 doubles as the verifier.
    #[default]
    Node1,
    /// A separate party with index `n + 1`.
    External,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranscriptMode {
    #[default]
    Full,
    /// Only counts messages; for long runs.
    Summary,
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub params: VerificationParams,
    pub source: SourceStrategy,
    pub verifier: VerifierPlacement,
    pub mode: TranscriptMode,
}

impl ProtocolConfig {
    pub fn new(params: VerificationParams, source: SourceStrategy) -> Self {
        ProtocolConfig {
            params,
            source,
            verifier: VerifierPlacement::default(),
            mode: TranscriptMode::default(),
        }
    }

    pub fn with_mode(mut self, mode: TranscriptMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_verifier(mut self, verifier: VerifierPlacement) -> Self {
        self.verifier = verifier;
        self
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.source.honest_state.n_qubits() != self.params.n {
            return Err(Error::Dimension(format!(
                "source state on {} qubits, params for {}",
                self.source.honest_state.n_qubits(),
                self.params.n
            )));
        }
        Ok(())
    }

    fn verifier_id(&self) -> PartyId {
        match self.verifier {
            VerifierPlacement::Node1 => PartyId::verifier(1),
            VerifierPlacement::External => PartyId::verifier(self.params.n + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub round: u64,
    pub f: f64,
    pub accepted: bool,
    pub swapped_copies: u64,
    pub target_copy: Option<u64>,
    /// Whether the target was a swapped copy. Recorded for analysis only;
    /// no party learns it.
    pub target_swapped: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub protocol: u8,
    pub n: usize,
    pub seed: u64,
    pub source: SourceKind,
    pub swap_fraction: f64,
    pub sound_adversary: bool,
    pub verifier: PartyId,
    pub message_count: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub messages: Vec<Message>,
    /// Verification report of round 0.
    pub verification: Option<VerificationReport>,
    pub iterations: Vec<IterationRecord>,
    pub estimation: Option<EstimationReport>,
    pub aborted: bool,
    pub abort_reason: Option<String>,
}

impl ProtocolTranscript {
    /// One JSON object per message, then `{"summary": …}` with everything
    /// else.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for m in &self.messages {
            out.push_str(&serde_json::to_string(m)?);
            out.push('\n');
        }
        let mut summary = self.clone();
        summary.messages.clear();
        out.push_str(&serde_json::to_string(&serde_json::json!({ "summary": summary }))?);
        out.push('\n');
        Ok(out)
    }

    pub fn accepted(&self) -> bool {
        self.iterations.first().is_some_and(|r| r.accepted)
    }
}

/// Checks the channel rules on a full message log: outcome reports go only
/// to the verifier, sensing outcomes are broadcast, and within each round
/// every copy is distributed before any measurement instruction.
pub fn check_channel_discipline(messages: &[Message], verifier: PartyId) -> Result<()> {
    let mut instructed_rounds = std::collections::HashSet::new();
    for m in messages {
        match &m.payload {
            Payload::OutcomeReport { .. } if m.to != Recipient::Party(verifier) => {
                return Err(Error::Validation(format!("outcome report #{} sent to {:?}", m.seq, m.to)));
            }
            Payload::XOutcomeAnnouncement { .. } if m.to != Recipient::Broadcast => {
                return Err(Error::Validation(format!("sensing outcome #{} was not broadcast", m.seq)));
            }
            Payload::MeasureInstruction { .. } => {
                instructed_rounds.insert(m.round);
            }
            Payload::DistributeCopy { .. } if instructed_rounds.contains(&m.round) => {
                return Err(Error::Validation(format!("copy distributed after measurement began (#{})", m.seq)));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Holds the physical copies. Each copy is either the honest state or
/// `|+⟩^⊗n`; nothing else is stored per copy.
struct Lab<'a> {
    n: usize,
    honest: &'a DensityMatrix,
    plus: DensityMatrix,
    phases: Option<&'a PhaseVector>,
    dists: HashMap<(bool, String, bool), MeasurementDistribution>,
    swapped: Vec<bool>,
    encoded: HashMap<u64, Vec<bool>>,
    drawn: HashMap<(u64, bool), usize>,
    test_stream: SeedStream,
    sense_stream: SeedStream,
}

impl<'a> Lab<'a> {
    fn new(honest: &'a DensityMatrix, phases: Option<&'a PhaseVector>) -> Result<Self> {
        let n = honest.n_qubits();
        Ok(Lab {
            n,
            honest,
            plus: plus_state(n)?.to_density(),
            phases,
            dists: HashMap::new(),
            swapped: Vec::new(),
            encoded: HashMap::new(),
            drawn: HashMap::new(),
            test_stream: SeedStream::new(0),
            sense_stream: SeedStream::new(0),
        })
    }

    fn reset(&mut self, swapped: Vec<bool>, root: &SeedStream) {
        self.swapped = swapped;
        self.encoded.clear();
        self.drawn.clear();
        self.test_stream = root.named("outcomes");
        self.sense_stream = root.named("sensing");
    }

    fn encode(&mut self, copy: u64, node: usize) {
        let n = self.n;
        self.encoded.entry(copy).or_insert_with(|| vec![false; n])[node - 1] = true;
    }

    /// Local `±1` result of `node` (1-based) measuring its letter.
    fn measure(&mut self, copy: u64, node: usize, stabilizer: &PauliString, sensing: bool) -> Result<i8> {
        let swapped = self.swapped[copy as usize];
        let key = (swapped, stabilizer.to_string(), sensing);
        if !self.dists.contains_key(&key) {
            let base = if swapped { &self.plus } else { self.honest };
            let state = if sensing {
                let phases = self.phases.ok_or_else(|| Error::Validation("sensing measurement without phases".into()))?;
                encode_phases(base, phases)?
            } else {
                base.clone()
            };
            self.dists.insert(key.clone(), MeasurementDistribution::new(&state, stabilizer)?);
        }
        if sensing && !self.encoded.get(&copy).is_some_and(|e| e.iter().all(|&x| x)) {
            return Err(Error::Validation(format!("copy {copy} measured before every node encoded")));
        }
        let stream = if sensing { &self.sense_stream } else { &self.test_stream };
        let dist = &self.dists[&key];
        let idx = self
            .drawn
            .entry((copy, sensing))
            .or_insert_with(|| dist.sample_index(stream.uniform(copy)));
        Ok(dist.local_outcome(*idx, node - 1))
    }
}

struct RoundResult {
    report: VerificationReport,
    record: IterationRecord,
    x_row: Option<Vec<i8>>,
}

struct Engine<'a> {
    config: &'a ProtocolConfig,
    verifier: PartyId,
    stabs: Vec<PauliString>,
    log: Vec<Message>,
    seq: u64,
}

impl<'a> Engine<'a> {
    fn send(&mut self, queue: &mut VecDeque<Message>, round: u64, from: PartyId, to: Recipient, payload: Payload) {
        let m = Message {
            seq: self.seq,
            round,
            from,
            to,
            payload,
        };
        self.seq += 1;
        if self.config.mode == TranscriptMode::Full {
            self.log.push(m.clone());
        }
        queue.push_back(m);
    }

    fn run_round(&mut self, lab: &mut Lab, round: u64, root: &SeedStream, sensing: bool) -> Result<RoundResult> {
        let params = &self.config.params;
        let n = params.n;
        let (total, counts) = params.allocation()?;
        let mut selection = TestSelection::draw(root, total, &counts);

        let source = &self.config.source;
        let src = root.named("source");
        let q = source.swap_fraction;
        let swapped: Vec<bool> = match source.kind {
            SourceKind::Honest => vec![false; total as usize],
            SourceKind::SwapPlus => (0..total).map(|c| src.uniform(c) < q).collect(),
            SourceKind::SelectionAwareSwap => {
                let tested = selection.is_tested();
                (0..total).map(|c| !tested[c as usize] && src.uniform(c) < q).collect()
            }
        };
        let swapped_copies = swapped.iter().filter(|s| **s).count() as u64;
        lab.reset(swapped, root);

        let mut assignment: HashMap<u64, usize> = HashMap::new();
        for (s, copies) in selection.by_stabilizer().iter().enumerate() {
            for &c in copies {
                assignment.insert(c, s);
            }
        }
        let tested_total = assignment.len();
        let mut partial: HashMap<u64, (usize, i8)> = HashMap::new();
        let mut passed = vec![0u64; self.stabs.len()];
        let mut completed = 0usize;
        let mut received = 0u64;
        let mut report = None;
        let mut target = None;
        let mut x_row: Option<Vec<Option<i8>>> = None;

        let mut queue = VecDeque::new();
        let server = PartyId::server();
        let verifier = self.verifier;
        for c in 0..total {
            self.send(&mut queue, round, server, Recipient::Broadcast, Payload::DistributeCopy { copy: c });
        }

        while let Some(msg) = queue.pop_front() {
            match msg.payload {
                Payload::DistributeCopy { .. } => {
                    received += 1;
                    if received == total {
                        for (s, copies) in selection.by_stabilizer().iter().enumerate() {
                            for &c in copies {
                                for j in 1..=n {
                                    let payload = Payload::MeasureInstruction {
                                        copy: c,
                                        stabilizer: self.stabs[s].clone(),
                                        sensing: false,
                                    };
                                    self.send(&mut queue, round, verifier, Recipient::Party(PartyId::node(j)), payload);
                                }
                            }
                        }
                    }
                }
                Payload::MeasureInstruction { copy, stabilizer, sensing } => {
                    let Recipient::Party(node) = msg.to else {
                        return Err(Error::Validation("measurement instruction must be addressed".into()));
                    };
                    if received != total {
                        return Err(Error::Validation("measurement instruction before distribution finished".into()));
                    }
                    let outcome = lab.measure(copy, node.index, &stabilizer, sensing)?;
                    if sensing {
                        self.send(&mut queue, round, node, Recipient::Broadcast, Payload::XOutcomeAnnouncement { copy, outcome });
                    } else {
                        self.send(&mut queue, round, node, Recipient::Party(verifier), Payload::OutcomeReport { copy, outcome });
                    }
                }
                Payload::OutcomeReport { copy, outcome } => {
                    if msg.to != Recipient::Party(verifier) {
                        return Err(Error::Validation(format!("outcome report addressed to {:?}", msg.to)));
                    }
                    let s = *assignment
                        .get(&copy)
                        .ok_or_else(|| Error::Validation(format!("report for untested copy {copy}")))?;
                    let entry = partial.entry(copy).or_insert((0, 1));
                    entry.0 += 1;
                    entry.1 *= outcome;
                    if entry.0 == n {
                        if entry.1 * self.stabs[s].sign() > 0 {
                            passed[s] += 1;
                        }
                        completed += 1;
                    }
                    if completed == tested_total && report.is_none() {
                        let tallies = self
                            .stabs
                            .iter()
                            .zip(&counts)
                            .zip(&passed)
                            .map(|((k, &tested), &passed)| StabilizerTally {
                                stabilizer: k.clone(),
                                tested,
                                passed,
                            })
                            .collect();
                        let t = selection.pick_target();
                        let mut r = VerificationReport::from_tallies(params, total, tallies, t)?;
                        r.params.seed = root.seed();
                        r.metadata.seed = root.seed();
                        if r.accepted {
                            target = Some(t);
                            self.send(&mut queue, round, verifier, Recipient::Broadcast, Payload::TargetAnnouncement { copy: t });
                        } else {
                            let reason = format!("failure rate {:.6} above threshold {:.6}", r.f, r.threshold);
                            self.send(&mut queue, round, verifier, Recipient::Broadcast, Payload::Abort { reason });
                        }
                        report = Some(r);
                    }
                }
                Payload::TargetAnnouncement { copy } => {
                    if sensing {
                        for j in 1..=n {
                            self.send(&mut queue, round, verifier, Recipient::Party(PartyId::node(j)), Payload::PhaseEncodeInstruction { copy });
                        }
                        let xs = PauliString::uniform(n, Pauli::X)?;
                        for j in 1..=n {
                            let payload = Payload::MeasureInstruction {
                                copy,
                                stabilizer: xs.clone(),
                                sensing: true,
                            };
                            self.send(&mut queue, round, verifier, Recipient::Party(PartyId::node(j)), payload);
                        }
                        x_row = Some(vec![None; n]);
                    }
                }
                Payload::PhaseEncodeInstruction { copy } => {
                    let Recipient::Party(node) = msg.to else {
                        return Err(Error::Validation("encode instruction must be addressed".into()));
                    };
                    lab.encode(copy, node.index);
                }
                Payload::XOutcomeAnnouncement { outcome, .. } => {
                    if msg.to != Recipient::Broadcast {
                        return Err(Error::Validation("sensing outcome must be broadcast".into()));
                    }
                    let row = x_row
                        .as_mut()
                        .ok_or_else(|| Error::Validation("sensing outcome without a target".into()))?;
                    row[msg.from.index - 1] = Some(outcome);
                }
                Payload::Abort { .. } => {}
            }
        }

        let report = report.ok_or_else(|| Error::Numeric("round ended without a verification decision".into()))?;
        let x_row = match x_row {
            Some(row) => Some(
                row.into_iter()
                    .collect::<Option<Vec<i8>>>()
                    .ok_or_else(|| Error::Validation("missing sensing outcome".into()))?,
            ),
            None => None,
        };
        let record = IterationRecord {
            round,
            f: report.f,
            accepted: report.accepted,
            swapped_copies,
            target_copy: target,
            target_swapped: target.map(|t| lab.swapped[t as usize]),
        };
        Ok(RoundResult { report, record, x_row })
    }
}

fn transcript_shell(config: &ProtocolConfig, protocol: u8) -> ProtocolTranscript {
    ProtocolTranscript {
        protocol,
        n: config.params.n,
        seed: config.params.seed,
        source: config.source.kind,
        swap_fraction: config.source.swap_fraction,
        sound_adversary: config.source.kind.is_sound(),
        verifier: config.verifier_id(),
        message_count: 0,
        messages: Vec::new(),
        verification: None,
        iterations: Vec::new(),
        estimation: None,
        aborted: false,
        abort_reason: None,
    }
}

/// One verification round. With an honest source and the same seed the
/// report equals [`crate::verification::run_verification`] on the source
/// state.
pub fn run_protocol1(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    config.validate()?;
    let mut engine = Engine {
        config,
        verifier: config.verifier_id(),
        stabs: stabilizer_set(config.params.n)?,
        log: Vec::new(),
        seq: 0,
    };
    let mut lab = Lab::new(&config.source.honest_state, None)?;
    let root = SeedStream::new(config.params.seed);
    let result = engine.run_round(&mut lab, 0, &root, false)?;

    let mut t = transcript_shell(config, 1);
    t.aborted = !result.report.accepted;
    if t.aborted {
        t.abort_reason = Some(format!("failure rate {:.6} above threshold {:.6}", result.report.f, result.report.threshold));
    }
    t.verification = Some(result.report);
    t.iterations.push(result.record);
    t.message_count = engine.seq;
    t.messages = engine.log;
    Ok(t)
}

/// `ν` rounds of verification followed, on acceptance, by sensing on the
/// target copy. Rejected rounds are aborted and skipped; the estimate uses
/// all successful rounds.
pub fn run_protocol2(config: &ProtocolConfig, phases: &PhaseVector, nu: usize) -> Result<ProtocolTranscript> {
    config.validate()?;
    if phases.len() != config.params.n {
        return Err(Error::Dimension(format!("{} phases for {} nodes", phases.len(), config.params.n)));
    }
    if nu == 0 {
        return Err(Error::param("nu", "need at least one round"));
    }
    let mut engine = Engine {
        config,
        verifier: config.verifier_id(),
        stabs: stabilizer_set(config.params.n)?,
        log: Vec::new(),
        seq: 0,
    };
    let mut lab = Lab::new(&config.source.honest_state, Some(phases))?;
    let root = SeedStream::new(config.params.seed);
    let mut t = transcript_shell(config, 2);
    let mut rows = Vec::new();
    for r in 0..nu as u64 {
        let result = engine.run_round(&mut lab, r, &root.child(r), true)?;
        if r == 0 {
            t.verification = Some(result.report);
        }
        if let Some(row) = result.x_row {
            rows.push(row);
        }
        t.iterations.push(result.record);
    }
    if rows.is_empty() {
        t.aborted = true;
        t.abort_reason = Some(format!("all {nu} rounds failed verification"));
    } else {
        t.estimation = Some(report_from_rows(phases, config.params.seed, rows, DEFAULT_OUTCOME_LIMIT)?);
    }
    t.message_count = engine.seq;
    t.messages = engine.log;
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryRow {
    pub q: f64,
    pub accept_rate: f64,
    /// `P(target swapped | accepted)`; empty when nothing was accepted.
    pub compromise_rate: Option<f64>,
    pub trials: usize,
}

/// Per-trial outcome of the adversary experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub accepted: bool,
    pub target_swapped: bool,
}

/// Runs `trials` independent verification rounds for each swap fraction.
/// Trial `t` at grid point `i` uses seed stream `seed → i → t`.
pub fn adversary_trials(params: &VerificationParams, honest_state: &DensityMatrix, kind: SourceKind, q: f64, trials: usize, stream: &SeedStream) -> Result<Vec<TrialOutcome>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut p = params.clone();
            p.seed = stream.child(t).seed();
            let source = SourceStrategy::new(kind, honest_state.clone(), q)?;
            let config = ProtocolConfig::new(p, source).with_mode(TranscriptMode::Summary);
            let tr = run_protocol1(&config)?;
            let rec = &tr.iterations[0];
            Ok(TrialOutcome {
                accepted: rec.accepted,
                target_swapped: rec.target_swapped.unwrap_or(false),
            })
        })
        .collect()
}

pub fn adversary_experiment(params: &VerificationParams, honest_state: &DensityMatrix, kind: SourceKind, q_grid: &[f64], trials: usize, seed: u64) -> Result<Vec<AdversaryRow>> {
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let root = SeedStream::new(seed).named("adversary");
    q_grid
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let outcomes = adversary_trials(params, honest_state, kind, q, trials, &root.child(i as u64))?;
            let accepted = outcomes.iter().filter(|o| o.accepted).count();
            let compromised = outcomes.iter().filter(|o| o.accepted && o.target_swapped).count();
            Ok(AdversaryRow {
                q,
                accept_rate: accepted as f64 / trials as f64,
                compromise_rate: (accepted > 0).then(|| compromised as f64 / accepted as f64),
                trials,
            })
        })
        .collect()
}
