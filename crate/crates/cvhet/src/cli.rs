//! Command-line surface and run orchestration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use cvhet_core::estimator::{self, EstimatorConfig};
use cvhet_core::oracle;
use cvhet_core::protocol::{self, CertificationParams, VerificationParams};
use cvhet_core::sampling::{self, AdversaryModel, ProtocolSamples, QSampler};
use cvhet_core::tomography::{self, ElementBank, TomographyParams, TomographyReport};
use cvhet_core::{Complex64, DensityMatrix, FockVector, HeterodyneSample};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::state_spec::{self, StateSpec};
use crate::{parallel, report, samples_io};

#[derive(Debug, Parser)]
#[command(
    name = "cvhet",
    version,
    about = "Heterodyne tomography, certification and verification of truncated single-mode states"
)]
pub struct Cli {
    /// Worker threads for sampling and estimation (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw heterodyne samples of a state into a sample log.
    Sample(SampleArgs),
    /// Estimate every density-matrix element up to the cutoff.
    Tomography(TomographyArgs),
    /// Fidelity certification under the i.i.d. assumption.
    Certify(CertifyArgs),
    /// Fidelity verification without the i.i.d. assumption.
    Verify(VerifyArgs),
    /// Samples needed for tomography at a given confidence.
    Plan(PlanArgs),
    /// Closed-form expectation of an estimator under a state.
    Oracle(OracleArgs),
}

/// `--samples`: a count when it parses as an integer, a path otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplesArg {
    Count(u64),
    Path(PathBuf),
}

impl FromStr for SamplesArg {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<u64>() {
            Ok(n) => SamplesArg::Count(n),
            Err(_) => SamplesArg::Path(PathBuf::from(s)),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Number of samples.
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample log to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Report path (stdout by default).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TomographyArgs {
    /// Sample log, or a count to simulate from `--state`.
    #[arg(long)]
    pub samples: SamplesArg,
    /// True state; required when simulating, used for error columns otherwise.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Energy cutoff E (defaults to the state's).
    #[arg(long, short = 'E')]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eps_prime: f64,
    /// Report (ρ̂ + ρ̂†)/2 instead of the raw estimates.
    #[arg(long)]
    pub hermitize: bool,
    /// Tab-separated estimate-vs-sample-count table.
    #[arg(long)]
    pub convergence: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    /// Target pure state Ψ.
    #[arg(long)]
    pub target: PathBuf,
    /// Sample log, or a count to simulate from `--state`.
    #[arg(long)]
    pub samples: SamplesArg,
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Samples measured (defaults to the number supplied).
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    /// Support threshold.
    #[arg(long)]
    pub s: u64,
    #[arg(long, short = 'E')]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eps_prime: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub target: PathBuf,
    /// State of every subsystem for a simulated i.i.d. prover.
    #[arg(long, conflicts_with_all = ["samples", "support_samples"])]
    pub state: Option<PathBuf>,
    /// Fidelity-estimation sample log (n − 4q − m lines).
    #[arg(long, requires = "support_samples")]
    pub samples: Option<PathBuf>,
    /// Support-estimation sample log (k lines).
    #[arg(long, requires = "samples")]
    pub support_samples: Option<PathBuf>,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub s: u64,
    #[arg(long, short = 'E')]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eps_prime: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    #[arg(long, short = 'E')]
    pub cutoff: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eps_prime: f64,
    /// Allowed failure probability.
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Operator A.
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub eta: f64,
    /// Zero-pad the smaller of state and operator to the larger cutoff.
    #[arg(long)]
    pub pad: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line, on `threads` workers if given.
pub fn run(cli: Cli) -> Result<()> {
    match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| dispatch(cli.command)),
        None => dispatch(cli.command),
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    let start = Instant::now();
    let (mut value, out) = match cmd {
        Command::Sample(a) => {
            let out = a.report.clone();
            (run_sample(&a)?, out)
        }
        Command::Tomography(a) => (run_tomography(&a)?, a.out),
        Command::Certify(a) => (run_certify(&a)?, a.out),
        Command::Verify(a) => (run_verify(&a)?, a.out),
        Command::Plan(a) => (run_plan(&a)?, a.out),
        Command::Oracle(a) => (run_oracle(&a)?, a.out),
    };
    value["version"] = json!(env!("CARGO_PKG_VERSION"));
    value["wall_clock_seconds"] = json!(start.elapsed().as_secs_f64());
    report::emit(&value, out.as_deref())
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn check_count(n: u64) -> Result<usize> {
    usize::try_from(n).map_err(|_| CliError::Usage(format!("{n} samples do not fit in memory")))
}

pub fn run_sample(a: &SampleArgs) -> Result<Value> {
    let state = state_spec::read_state(&a.state)?;
    let samples = draw(&state, check_count(a.samples)?, a.seed)?;
    samples_io::write_samples(&a.out, &samples)?;
    Ok(json!({
        "command": "sample",
        "seed": a.seed,
        "inputs": {
            "state_path": path_str(&a.state),
            "state": state_spec::state_json(&state),
            "samples": a.samples,
            "out": path_str(&a.out),
        },
        "results": {
            "written": samples.len(),
            "support_exceedances": sampling::support_count(&samples, state.cutoff()),
        },
    }))
}

fn draw(state: &StateSpec, count: usize, seed: u64) -> Result<Vec<HeterodyneSample>> {
    let sampler = match state {
        StateSpec::Pure(v) => QSampler::pure(v),
        StateSpec::Mixed(r) => QSampler::new(r),
    };
    parallel::sample_parallel(&sampler, count, seed)
}

fn read_optional_state(p: &Option<PathBuf>) -> Result<Option<StateSpec>> {
    p.as_deref().map(state_spec::read_state).transpose()
}

fn reference_entry(rho: &DensityMatrix, k: usize, l: usize) -> Complex64 {
    if k <= rho.cutoff() && l <= rho.cutoff() {
        rho.get(k, l)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

pub fn run_tomography(a: &TomographyArgs) -> Result<Value> {
    let state = read_optional_state(&a.state)?;
    let cutoff = a
        .cutoff
        .or(state.as_ref().map(StateSpec::cutoff))
        .ok_or_else(|| CliError::Usage("give --cutoff or --state".into()))?;
    let params = TomographyParams {
        cutoff,
        eps: a.eps,
        eps_prime: a.eps_prime,
        hermitize: a.hermitize,
    };
    params.validate()?;
    let bank = ElementBank::new(&params)?;
    let (n, blocks, source) = match &a.samples {
        SamplesArg::Path(p) => {
            let samples = samples_io::read_samples(p)?;
            let blocks = parallel::block_sums_of(&bank, &samples);
            (samples.len() as u64, blocks, json!(path_str(p)))
        }
        SamplesArg::Count(n) => {
            let st = state
                .as_ref()
                .ok_or_else(|| CliError::Usage("simulated tomography needs --state".into()))?;
            let sampler = match st {
                StateSpec::Pure(v) => QSampler::pure(v),
                StateSpec::Mixed(r) => QSampler::new(r),
            };
            (*n, parallel::sampled_block_sums(&bank, &sampler, *n, a.seed)?, json!(n))
        }
    };
    let rep = parallel::report_from_blocks(&params, n, &bank, &blocks)?;
    let rho = state.as_ref().map(StateSpec::density);
    if let Some(path) = &a.convergence {
        let rows = parallel::convergence(&params, n, &bank, &blocks)?;
        std::fs::write(path, convergence_table(&rows, rho.as_ref())).map_err(|e| CliError::io(path, e))?;
    }
    let mut results = report::tomography_json(&rep);
    if let Some(rho) = &rho {
        results["max_abs_error"] = json!(max_error(&rep, rho));
    }
    Ok(json!({
        "command": "tomography",
        "seed": a.seed,
        "inputs": {
            "samples": source,
            "state_path": a.state.as_deref().map(path_str),
            "state": state.as_ref().map(state_spec::state_json),
            "cutoff": cutoff,
            "eps": a.eps,
            "eps_prime": a.eps_prime,
            "hermitize": a.hermitize,
            "convergence": a.convergence.as_deref().map(path_str),
        },
        "results": results,
    }))
}

fn max_error(rep: &TomographyReport, rho: &DensityMatrix) -> f64 {
    let dim = rep.estimates.dim();
    let mut worst: f64 = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            worst = worst.max((rep.estimates.get(k, l) - reference_entry(rho, k, l)).norm());
        }
    }
    worst
}

/// One row per checkpoint and element.
pub fn convergence_table(rows: &[TomographyReport], rho: Option<&DensityMatrix>) -> String {
    let mut out = String::from("samples\tk\tl\tre\tim\tabs_error\tfailure_log_prob\n");
    for r in rows {
        let dim = r.estimates.dim();
        for k in 0..dim {
            for l in 0..dim {
                let z = r.estimates.get(k, l);
                let err = rho.map_or(f64::NAN, |rho| (z - reference_entry(rho, k, l)).norm());
                let _ = writeln!(
                    out,
                    "{}\t{k}\t{l}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
                    r.sample_count, z.re, z.im, err, r.failure_log_prob
                );
            }
        }
    }
    out
}

fn read_target(p: &Path) -> Result<FockVector> {
    state_spec::read_state(p)?
        .as_pure()
        .cloned()
        .ok_or_else(|| CliError::Field {
            path: path_str(p),
            field: "amplitudes",
            msg: "the target must be a pure state".into(),
        })
}

pub fn run_certify(a: &CertifyArgs) -> Result<Value> {
    let psi = read_target(&a.target)?;
    let state = read_optional_state(&a.state)?;
    let cutoff = a.cutoff.unwrap_or(psi.cutoff());
    let samples = match &a.samples {
        SamplesArg::Path(p) => samples_io::read_samples(p)?,
        SamplesArg::Count(count) => {
            let st = state
                .as_ref()
                .ok_or_else(|| CliError::Usage("simulated certification needs --state".into()))?;
            if let Some(n) = a.n.filter(|n| n != count) {
                return Err(cvhet_core::Error::Parameter(format!("--n {n} disagrees with --samples {count}")).into());
            }
            draw(st, check_count(*count)?, a.seed)?
        }
    };
    let params = CertificationParams {
        n: a.n.unwrap_or(samples.len() as u64),
        m: a.m,
        s: a.s,
        cutoff,
        eps: a.eps,
        eps_prime: a.eps_prime,
    };
    let rep = protocol::certify(&samples, &psi, &params)?;
    let truth = state
        .as_ref()
        .map(|st| cvhet_core::fock::fidelity_pure(&psi, &st.density(), cvhet_core::CutoffPolicy::ZeroPad))
        .transpose()?;
    let mut results = report::fidelity_json(&rep);
    if let Some(f) = truth {
        results["true_fidelity_m"] = json!(f.powi(a.m as i32));
    }
    Ok(json!({
        "command": "certify",
        "seed": a.seed,
        "inputs": {
            "target_path": path_str(&a.target),
            "target": state_spec::state_json(&StateSpec::Pure(psi.clone())),
            "samples": match &a.samples { SamplesArg::Path(p) => json!(path_str(p)), SamplesArg::Count(c) => json!(c) },
            "state_path": a.state.as_deref().map(path_str),
            "state": state.as_ref().map(state_spec::state_json),
            "n": params.n, "m": params.m, "s": params.s, "cutoff": cutoff,
            "eps": params.eps, "eps_prime": params.eps_prime,
        },
        "results": results,
    }))
}

pub fn run_verify(a: &VerifyArgs) -> Result<Value> {
    let psi = read_target(&a.target)?;
    let state = read_optional_state(&a.state)?;
    let params = VerificationParams {
        n: a.n,
        k: a.k,
        q: a.q,
        m: a.m,
        s: a.s,
        cutoff: a.cutoff.unwrap_or(psi.cutoff()),
        eps: a.eps,
        eps_prime: a.eps_prime,
    };
    params.validate(&psi)?;
    let shape = params.shape()?;
    let run = match (&state, &a.samples, &a.support_samples) {
        (Some(st), _, _) => {
            let adv = match st {
                StateSpec::Pure(v) => AdversaryModel::HonestIID(v.clone()),
                StateSpec::Mixed(r) => AdversaryModel::NoisyIID(r.clone()),
            };
            sampling::run_protocol_sampling(&adv, shape, a.seed)?
        }
        (None, Some(est), Some(sup)) => ProtocolSamples {
            shape,
            support_samples: samples_io::read_samples(sup)?,
            estimate_samples: samples_io::read_samples(est)?,
            kept: Vec::new(),
            rng_seed: a.seed,
        },
        _ => {
            return Err(CliError::Usage(
                "give --state, or both --samples and --support-samples".into(),
            ))
        }
    };
    let rep = protocol::verify(&run, &psi, &params)?;
    Ok(json!({
        "command": "verify",
        "seed": a.seed,
        "inputs": {
            "target_path": path_str(&a.target),
            "target": state_spec::state_json(&StateSpec::Pure(psi.clone())),
            "state_path": a.state.as_deref().map(path_str),
            "state": state.as_ref().map(state_spec::state_json),
            "samples": a.samples.as_deref().map(path_str),
            "support_samples": a.support_samples.as_deref().map(path_str),
            "n": params.n, "k": params.k, "q": params.q, "m": params.m, "s": params.s,
            "cutoff": params.cutoff, "eps": params.eps, "eps_prime": params.eps_prime,
        },
        "results": report::fidelity_json(&rep),
    }))
}

pub fn run_plan(a: &PlanArgs) -> Result<Value> {
    let n = tomography::required_samples_tomography(a.cutoff, a.eps, a.eps_prime, a.delta)?;
    let at = tomography::failure_log_prob(n, a.cutoff, a.eps, a.eps_prime)?;
    let below = if n > 1 {
        tomography::failure_log_prob(n - 1, a.cutoff, a.eps, a.eps_prime)?
    } else {
        f64::INFINITY
    };
    if !(at <= a.delta.ln() && below > a.delta.ln()) {
        return Err(CliError::Internal(format!("planner returned non-minimal n = {n}")));
    }
    Ok(json!({
        "command": "plan",
        "seed": null,
        "inputs": { "cutoff": a.cutoff, "eps": a.eps, "eps_prime": a.eps_prime, "delta": a.delta },
        "results": {
            "required_samples": n,
            "failure_log_prob": at,
            "failure_prob_clamped": cvhet_core::special::clamp_probability(at),
            "failure_log_prob_one_fewer": below,
        },
    }))
}

pub fn run_oracle(a: &OracleArgs) -> Result<Value> {
    let state = state_spec::read_state(&a.state)?;
    let mut rho = state.density();
    let mut op = state_spec::read_operator(&a.target)?;
    if rho.cutoff() != op.cutoff() {
        if !a.pad {
            return Err(cvhet_core::Error::DimensionMismatch {
                expected: rho.cutoff(),
                found: op.cutoff(),
            }
            .into());
        }
        let c = rho.cutoff().max(op.cutoff());
        rho = rho.padded(c)?;
        op = op.padded(c)?;
    }
    let cfg = EstimatorConfig::new(a.eta, rho.cutoff())?;
    let expected = oracle::cross_checked_expectation(&rho, &op, &cfg)?;
    let exact = op.trace_product(rho.as_operator())?;
    let k_a = estimator::k_const(&op);
    Ok(json!({
        "command": "oracle",
        "seed": null,
        "inputs": {
            "state_path": path_str(&a.state),
            "state": state_spec::state_json(&state),
            "operator_path": path_str(&a.target),
            "operator": state_spec::matrix_json(&op),
            "eta": a.eta,
            "pad": a.pad,
        },
        "results": {
            "expected_f": [expected.re, expected.im],
            "trace_a_rho": [exact.re, exact.im],
            "bias": (expected - exact).norm(),
            "k_a": k_a,
            "bias_bound": a.eta * k_a,
        },
    }))
}

/// Parses `args` (program name first) and runs them; for tests and embedding.
pub fn run_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}
