use std::hash::{BuildHasher, RandomState};
use std::path::PathBuf;

use privsense::estimation::{
    estimate_local, fold, integrity_assessment, local_distance, log_log_slope, sample_estimation_rounds, variance_scaling_experiment,
};
use privsense::export::{csv_string, json_string, write_file};
use privsense::protocol::{
    adversary_experiment, run_protocol1, run_protocol2, ProtocolConfig, SourceKind, SourceStrategy, TranscriptMode, VerifierPlacement,
};
use privsense::qfi::{privacy_parameter, qfi_global_phase, GeneratorSet};
use privsense::states::NoiseKind;
use privsense::verification::{
    acceptance_threshold, check_c_constraint, confidence, exact_failure_rate, failure_rate_histogram, failure_vs_fidelity_sweep, fidelity_lower_bound,
    integrity_theo, privacy_upper_bound, required_copies, run_verification, stabilizer_set, unit_grid,
};
use privsense::{estimation, Error};
use clap::ValueEnum;
use serde_json::json;

use crate::config::{phases, verification_params, FileConfig, Format, NoiseChoice, StateSpec};
use crate::{CliError, EstimationArgs, RunArgs, SourceChoice, StateArgs, TranscriptChoice, VerifierChoice, VerifyArgs};

type Result<T> = std::result::Result<T, CliError>;

struct Session {
    file: FileConfig,
    seed: Option<u64>,
    out: PathBuf,
    format: Format,
    pool: rayon::ThreadPool,
}

impl Session {
    fn new(run: &RunArgs) -> Result<Self> {
        if run.threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        let file = FileConfig::load(run.config.as_deref())?;
        let seed = if run.random_seed {
            let s = RandomState::new().hash_one(std::process::id());
            println!("seed: {s}");
            Some(s)
        } else {
            run.seed.or(file.seed)
        };
        let out = run.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
        let format = run.format.or(file.format).unwrap_or_default();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(run.threads)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        Ok(Session {
            file,
            seed,
            out,
            format,
            pool,
        })
    }

    fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::Usage("a seed is required: pass --seed, set \"seed\" in the config, or use --random-seed".into()))
    }

    /// `<command>-<seed>`, or just `<command>` for a deterministic command
    /// run without a seed.
    fn stem(&self, command: &str) -> String {
        match self.seed {
            Some(s) => format!("{command}-{s}"),
            None => command.to_string(),
        }
    }

    fn write(&self, name: String, contents: &str) -> Result<String> {
        let path = self.out.join(name);
        write_file(&path, contents)?;
        Ok(path.display().to_string())
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        self.pool.install(f)
    }
}

/// Compact number for summaries; round-off residue prints as 0.
fn num(x: f64) -> String {
    if x.abs() < 1e-12 {
        "0".into()
    } else {
        format!("{x:.4}")
    }
}

fn state_spec(s: &Session, a: &StateArgs) -> Result<StateSpec> {
    StateSpec::resolve(&s.file, a.n, a.state, a.noise, a.strength)
}

fn wrote(files: &[String]) -> String {
    format!("Wrote {}.", files.join(", "))
}

pub fn stabilizers(n: usize) -> Result<()> {
    for k in stabilizer_set(n)? {
        println!("{k}");
    }
    Ok(())
}

pub fn verify(run: &RunArgs, state: &StateArgs, v: &VerifyArgs) -> Result<()> {
    let s = Session::new(run)?;
    let seed = s.require_seed()?;
    let spec = state_spec(&s, state)?;
    s.install(|| {
        let rho = spec.build()?;
        let params = verification_params(&s.file, spec.n, v.m, v.c, v.shots, seed)?;
        let report = run_verification(&rho, &params)?;
        let exact = exact_failure_rate(&rho)?;
        let doc = json!({
            "command": "verify",
            "state": spec,
            "exact_failure_rate": exact,
            "report": report,
        });
        let file = s.write(format!("verify-{seed}.json"), &json_string(&doc)?)?;
        let confidence = report.confidence.map_or("undefined (c outside its window)".to_string(), num);
        println!(
            "Verification of the {} with N_t = {} copies ({} tested): f = {} against threshold {}, so the state is {}. \
             Fidelity lower bound {}, confidence {}, epsilon_p upper bound {}, epsilon_i,theo {}. Exact failure rate {}. {}",
            spec.describe(),
            report.total_copies,
            report.tested_copies,
            num(report.f),
            num(report.threshold),
            if report.accepted { "accepted" } else { "rejected" },
            num(report.fidelity_lower_bound),
            confidence,
            num(report.epsilon_p_upper),
            num(report.epsilon_i_theo),
            num(exact),
            wrote(&[file])
        );
        Ok(())
    })
}

pub fn privacy(run: &RunArgs, state: &StateArgs) -> Result<()> {
    let s = Session::new(run)?;
    let spec = state_spec(&s, state)?;
    s.install(|| {
        let rho = spec.build()?;
        let gens = GeneratorSet::local_z(spec.n)?;
        let report = privacy_parameter(&rho, &gens)?;
        let qfi = qfi_global_phase(&rho)?;
        let plus = 1.0 / (spec.n * spec.n) as f64;
        let doc = json!({
            "command": "privacy",
            "state": spec,
            "qfi_global_phase": qfi,
            "epsilon_p": report.epsilon_p,
            "plus_reference": plus,
            "privacy": report,
        });
        let file = s.write(format!("{}.json", s.stem("privacy")), &json_string(&doc)?)?;
        println!(
            "Privacy of the {}: epsilon_p = {} (the |+> product state gives {}), global-phase QFI {}. {}",
            spec.describe(),
            num(report.epsilon_p),
            num(plus),
            num(qfi),
            wrote(&[file])
        );
        Ok(())
    })
}

pub fn estimate(run: &RunArgs, state: &StateArgs, v: &VerifyArgs, e: &EstimationArgs, nu_grid: Option<Vec<usize>>, repetitions: Option<usize>) -> Result<()> {
    let s = Session::new(run)?;
    let seed = s.require_seed()?;
    let spec = state_spec(&s, state)?;
    s.install(|| {
        let rho = spec.build()?;
        let th = phases(&s.file, e.phases.clone(), spec.n)?;
        let nu = e.nu.or(s.file.estimation.nu).unwrap_or(1000);
        let report = sample_estimation_rounds(&rho, &th, nu, seed)?;
        let local = (0..spec.n)
            .map(|i| {
                Ok(json!({
                    "node": i + 1,
                    "theta": th.thetas()[i],
                    "theta_hat": estimate_local(&report, i)?,
                    "distance": local_distance(&report, i)?,
                }))
            })
            .collect::<std::result::Result<Vec<_>, Error>>()?;
        let min_local = (0..spec.n).map(|i| local_distance(&report, i)).collect::<std::result::Result<Vec<_>, Error>>()?;
        let min_local = min_local.into_iter().fold(f64::INFINITY, f64::min);

        let params = verification_params(&s.file, spec.n, v.m, v.c, v.shots, seed)?;
        let f = exact_failure_rate(&rho)?;
        let integrity = integrity_assessment(&rho, fold(th.global_phase()), nu, &params, f)?;

        let grid = nu_grid.or_else(|| s.file.estimation.nu_grid.clone());
        let mut files = Vec::new();
        let mut variance = None;
        let mut slope = None;
        if let Some(grid) = grid {
            let reps = repetitions.or(s.file.estimation.repetitions).unwrap_or(200);
            let eps = privacy_parameter(&rho, &GeneratorSet::local_z(spec.n)?)?.epsilon_p;
            let rows = variance_scaling_experiment(&rho, &th, &grid, reps, seed, eps)?;
            slope = if rows.len() >= 2 { Some(log_log_slope(&rows)?) } else { None };
            if s.format == Format::Csv {
                files.push(s.write(format!("estimate-{seed}.csv"), &csv_string(&rows)?)?);
            }
            variance = Some(rows);
        }
        let mut doc = json!({
            "command": "estimate",
            "state": spec,
            "report": report,
            "local": local,
            "integrity": integrity,
            "variance_slope": slope,
        });
        if s.format == Format::Json {
            doc["variance"] = json!(variance);
        }
        files.insert(0, s.write(format!("estimate-{seed}.json"), &json_string(&doc)?)?);

        let scan = match slope {
            Some(k) => format!(" Variance scan log-log slope {}.", num(k)),
            None => String::new(),
        };
        println!(
            "Estimation on the {} over {nu} rounds: phi = {}, phi_hat = {} (distance {}); the closest single-node estimate is {} away. \
             Integrity bounds hold: {}.{scan} {}",
            spec.describe(),
            num(report.true_phi),
            num(report.phi_hat),
            num(report.distance),
            num(min_local),
            integrity.holds(),
            wrote(&files)
        );
        Ok(())
    })
}

pub fn sweep(run: &RunArgs, n: Option<usize>, noise: Option<NoiseChoice>, points: usize) -> Result<()> {
    let s = Session::new(run)?;
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    let n = n.or(s.file.n).unwrap_or(3);
    let kind = match (noise, &s.file.noise) {
        (Some(k), _) => k.into(),
        (None, Some(m)) if m.kind == NoiseKind::Custom => return Err(CliError::Usage("sweep needs a noise channel, not a custom state".into())),
        (None, Some(m)) => m.kind,
        (None, None) => NoiseKind::PaperMixture,
    };
    s.install(|| {
        let rows = failure_vs_fidelity_sweep(n, kind, &unit_grid(points))?;
        let stem = s.stem("sweep");
        let file = match s.format {
            Format::Csv => s.write(format!("{stem}.csv"), &csv_string(&rows)?)?,
            Format::Json => {
                let doc = json!({ "command": "sweep", "n": n, "noise": kind.name(), "convention": kind.convention(), "rows": rows });
                s.write(format!("{stem}.json"), &json_string(&doc)?)?
            }
        };
        let gap = rows.iter().map(|r| r.fidelity - r.fidelity_lower_bound.max(0.0)).fold(f64::NEG_INFINITY, f64::max);
        println!(
            "Swept {} noise on the {n}-qubit GHZ state at {points} strengths ({}). The fidelity lower bound stays below the fidelity throughout, \
             with the largest gap to the bound clipped at zero {}. {}",
            kind.name(),
            kind.convention(),
            num(gap),
            wrote(&[file])
        );
        Ok(())
    })
}

pub fn histogram(run: &RunArgs, state: &StateArgs, shots: usize, rounds: usize, bins: usize) -> Result<()> {
    let s = Session::new(run)?;
    let seed = s.require_seed()?;
    let spec = state_spec(&s, state)?;
    s.install(|| {
        let rho = spec.build()?;
        let h = failure_rate_histogram(&rho, shots, rounds, seed, bins)?;
        let mut files = Vec::new();
        if s.format == Format::Csv {
            files.push(s.write(format!("histogram-{seed}.csv"), &csv_string(&h.bins)?)?);
        }
        let doc = json!({ "command": "histogram", "state": spec, "histogram": h });
        files.push(s.write(format!("histogram-{seed}.json"), &json_string(&doc)?)?);
        println!(
            "Failure rates of the {} over {rounds} rounds of {shots} shots: mean {}, standard deviation {}; \
             {} of {rounds} rounds ({}) are within the threshold {}. {}",
            spec.describe(),
            num(h.mean),
            num(h.std_dev),
            h.within_threshold,
            num(h.within_fraction()),
            num(h.threshold),
            wrote(&files)
        );
        Ok(())
    })
}

pub struct ProtocolOptions {
    pub protocol: u8,
    pub source: SourceChoice,
    pub q: f64,
    pub verifier: VerifierChoice,
    pub transcript: TranscriptChoice,
    pub q_grid: Option<Vec<f64>>,
    pub trials: usize,
}

pub fn protocol(run: &RunArgs, state: &StateArgs, v: &VerifyArgs, e: &EstimationArgs, o: ProtocolOptions) -> Result<()> {
    let s = Session::new(run)?;
    let seed = s.require_seed()?;
    let spec = state_spec(&s, state)?;
    let kind = match o.source {
        SourceChoice::Honest => SourceKind::Honest,
        SourceChoice::SwapPlus => SourceKind::SwapPlus,
        SourceChoice::SelectionAwareSwap => SourceKind::SelectionAwareSwap,
    };
    s.install(|| {
        let rho = spec.build()?;
        let params = verification_params(&s.file, spec.n, v.m, v.c, v.shots, seed)?;

        if let Some(grid) = &o.q_grid {
            let kind = if kind == SourceKind::Honest { SourceKind::SwapPlus } else { kind };
            let rows = adversary_experiment(&params, &rho, kind, grid, o.trials, seed)?;
            let file = match s.format {
                Format::Csv => s.write(format!("protocol-{seed}.csv"), &csv_string(&rows)?)?,
                Format::Json => {
                    let doc = json!({ "command": "protocol", "state": spec, "source": kind, "rows": rows });
                    s.write(format!("protocol-{seed}.json"), &json_string(&doc)?)?
                }
            };
            let rates: Vec<String> = rows.iter().map(|r| format!("q = {}: {}", r.q, num(r.accept_rate))).collect();
            println!(
                "Swap adversary against the {} with {} trials per swap fraction; acceptance rates {}. {}",
                spec.describe(),
                o.trials,
                rates.join(", "),
                wrote(&[file])
            );
            return Ok(());
        }

        let source = SourceStrategy::new(kind, rho, o.q)?;
        let verifier = match o.verifier {
            VerifierChoice::Node1 => VerifierPlacement::Node1,
            VerifierChoice::External => VerifierPlacement::External,
        };
        let mode = match o.transcript {
            TranscriptChoice::Full => TranscriptMode::Full,
            TranscriptChoice::Summary => TranscriptMode::Summary,
        };
        let config = ProtocolConfig::new(params, source).with_verifier(verifier).with_mode(mode);
        let t = if o.protocol == 1 {
            run_protocol1(&config)?
        } else {
            let th = phases(&s.file, e.phases.clone(), spec.n)?;
            let nu = e.nu.or(s.file.estimation.nu).unwrap_or(1000);
            run_protocol2(&config, &th, nu)?
        };
        let file = s.write(format!("protocol-{seed}.jsonl"), &t.to_jsonl()?)?;
        let accepted = t.iterations.iter().filter(|r| r.accepted).count();
        let outcome = match (&t.estimation, t.aborted) {
            (Some(est), _) => format!("phi_hat = {} for phi = {}", num(est.phi_hat), num(est.true_phi)),
            (None, true) => format!("the run aborted ({})", t.abort_reason.as_deref().unwrap_or("verification failed")),
            (None, false) => format!("the target is copy {}", t.iterations[0].target_copy.unwrap_or_default()),
        };
        let f = t.verification.as_ref().map_or(f64::NAN, |r| r.f);
        println!(
            "Protocol {} with the {} source on the {}: {} of {} verification rounds accepted (first round f = {}), {} messages; {}. {}",
            o.protocol,
            o.source.to_possible_value().map_or(String::new(), |v| v.get_name().to_string()),
            spec.describe(),
            accepted,
            t.iterations.len(),
            num(f),
            t.message_count,
            outcome,
            wrote(&[file])
        );
        Ok(())
    })
}

pub fn bounds(run: &RunArgs, n: Option<usize>, f: f64, c: Option<f64>, m: Option<f64>, phi: Option<f64>, nu: Option<usize>) -> Result<()> {
    let s = Session::new(run)?;
    let n = n.or(s.file.n).unwrap_or(3);
    let c = c.or(s.file.verification.c).unwrap_or(0.0);
    let m = m.or(s.file.verification.m);
    let nu = nu.or(s.file.estimation.nu).unwrap_or(1000);
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", reason: "need at least 2 nodes".into() }.into());
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter { name: "f", reason: format!("{f} outside [0, 1]") }.into());
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter { name: "c", reason: format!("must be non-negative, got {c}") }.into());
    }
    let eps_i = integrity_theo(f, n, c);
    let (accuracy, precision) = match phi {
        Some(phi) => (Some(estimation::accuracy_bound(eps_i, phi)?), Some(estimation::precision_bound(eps_i, nu, phi)?)),
        None => (None, None),
    };
    let (copies, in_window, conf) = match m {
        Some(m) => {
            let in_window = check_c_constraint(n, m, c).is_ok();
            (Some(required_copies(n, m)?), Some(in_window), if in_window { Some(confidence(n, m, c)?) } else { None })
        }
        None => (None, None, None),
    };
    let threshold = acceptance_threshold(n);
    let f_lb = fidelity_lower_bound(f, n, c);
    let eps_p = privacy_upper_bound(f, n, c);
    let doc = json!({
        "command": "bounds",
        "n": n,
        "f": f,
        "c": c,
        "m": m,
        "threshold": threshold,
        "threshold_fidelity": fidelity_lower_bound(threshold, n, 0.0),
        "fidelity_lower_bound": f_lb,
        "epsilon_p_upper": eps_p,
        "epsilon_i_theo": eps_i,
        "required_copies": copies,
        "c_in_window": in_window,
        "confidence": conf,
        "phi": phi,
        "nu": phi.map(|_| nu),
        "accuracy_bound": accuracy,
        "precision_bound": precision,
    });
    let file = s.write(format!("{}.json", s.stem("bounds")), &json_string(&doc)?)?;
    let extra = match (accuracy, precision) {
        (Some(a), Some(p)) => format!(" At phi = {} the accuracy bound is {} and the precision bound over {nu} rounds is {}.", num(phi.unwrap_or_default()), num(a), num(p)),
        _ => String::new(),
    };
    println!(
        "For n = {n}, f = {f} and c = {c}: fidelity lower bound {}, epsilon_p upper bound {}, epsilon_i,theo {}. \
         The acceptance threshold f = {} corresponds to fidelity {}.{extra} {}",
        num(f_lb),
        num(eps_p),
        num(eps_i),
        num(threshold),
        num(fidelity_lower_bound(threshold, n, 0.0)),
        wrote(&[file])
    );
    Ok(())
}
