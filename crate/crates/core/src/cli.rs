//! The `rade-bounds` command line.
//!
//! Every subcommand is a thin dispatch to a library operation. [`run`] returns
//! the text to print and the exit status, so the binary only writes them out.
//!
//! Exit status: 0 success, 1 invalid input, 2 a verification or coverage
//! check failed, 3 a capacity limit was hit.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::chain::{bound_from_data, ChainOptions};
use crate::bounds::{self, Confidence, Method, Side, SupDeviationInputs, TailKind, TailParams};
use crate::class_eval::{class_stats, EvaluationMatrix, SignMatrix};
use crate::error::{Error, Result};
use crate::oracles::{self, Configurations, FiniteDomain, GeneratorSpec, SamplingBudget, VerifyOptions};
use crate::simulation::{self, McEraMode, SweepConfig, SweepTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rade-bounds", version, about = "Rademacher-average bounds for finite function classes")]
pub struct Cli {
    /// Worker threads for enumeration and sweeps (default: all cores).
    #[arg(long, global = true, env = "RADE_BOUNDS_THREADS")]
    pub threads: Option<usize>,
    /// Write the result to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; defaults to JSON for single results and CSV for sweeps.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical statistics of an evaluation matrix CSV.
    Stats {
        input: PathBuf,
    },
    /// Compute one bound from explicit parameters or from a CSV.
    Bound(BoundArgs),
    /// Check a self-bounding property exhaustively.
    Verify(VerifyArgs),
    /// Empirical failure frequency of a bound on a synthetic domain.
    Coverage(CoverageArgs),
    /// Parameter sweep comparing bounds, as CSV.
    Sweep(SweepArgs),
    /// Evaluate a tail probability.
    Tail(TailArgs),
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_tail_kind(s: &str) -> std::result::Result<TailKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Accepts integers written as `1000000`, `1e6` or `1_000_000`.
pub fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let cleaned = s.trim().replace('_', "");
    if let Ok(v) = cleaned.parse::<usize>() {
        return Ok(v);
    }
    match cleaned.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v <= 9_007_199_254_740_992.0 => Ok(v as usize),
        _ => Err(format!("`{s}` is not a nonnegative integer")),
    }
}

fn parse_count_u64(s: &str) -> std::result::Result<u64, String> {
    parse_count(s).map(|v| v as u64)
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Method tag in kebab-case, e.g. era-sb-nu.
    #[arg(value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Evaluation matrix CSV; statistics and the MCERA are computed from it.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Seed of the sign matrix used with --input.
    #[arg(long, default_value_t = 0)]
    pub sigma_seed: u64,
    /// Cap ERA estimates at nu_hat (with --input or for ERA methods).
    #[arg(long)]
    pub clamp_to_nu: bool,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    pub m: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub z_hat: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub mcera: Option<f64>,
    #[arg(long)]
    pub mcera1: Option<f64>,
    #[arg(long)]
    pub nu_hat: Option<f64>,
    #[arg(long)]
    pub wvar_hat: Option<f64>,
    #[arg(long)]
    pub wvar_ub: Option<f64>,
    #[arg(long)]
    pub era_ub: Option<f64>,
    #[arg(long)]
    pub eta_hat: Option<f64>,
    #[arg(long)]
    pub gamma_hat: Option<f64>,
    #[arg(long)]
    pub eta_ub: Option<f64>,
    #[arg(long)]
    pub gamma_ub: Option<f64>,
    #[arg(long)]
    pub ez_upper: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    /// n m MCERA is (1, n m nu_hat)-self-bounding.
    #[value(name = "mcera-sb")]
    McEraSb,
    /// n m MCERA is weakly (2 z_hat, 2 n m wvar_hat)-self-bounding; fails on some classes.
    #[value(name = "mcera-wsb")]
    McEraWsb,
    /// m SD+ is (1, m eta)-self-bounding.
    SdPos,
    /// m SD- is (1, m gamma)-self-bounding.
    SdNeg,
    /// m wvar_hat / z^2 is (1, 0)-self-bounding.
    Wvar,
    /// m eta_hat / c is (1, 0)-self-bounding.
    Eta,
    /// m gamma_hat / c is (1, 0)-self-bounding.
    Gamma,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub kind: VerifyKind,
    /// Evaluation matrix CSV: the sample for MCERA checks, or the whole domain
    /// (uniform distribution) for sample-replacement checks.
    #[arg(long, conflicts_with = "generator")]
    pub input: Option<PathBuf>,
    /// Generator TOML for sample-replacement checks.
    #[arg(long)]
    pub generator: Option<PathBuf>,
    /// Seed of the random tiny class used when no input is given.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of sign vectors for MCERA checks.
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub n: usize,
    /// Sample size (MCERA checks without input, and sample-replacement checks).
    #[arg(long, value_parser = parse_count)]
    pub m: Option<usize>,
    /// Number of functions in the random tiny class.
    #[arg(long, value_parser = parse_count, default_value = "4")]
    pub functions: usize,
    /// Check this many random configurations when exhaustive enumeration is too large.
    #[arg(long, value_parser = parse_count_u64)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long, value_parser = parse_method)]
    pub bound: Method,
    #[arg(long, value_parser = parse_count_u64, default_value = "10000")]
    pub trials: u64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generator TOML; defaults to a binary class of 3 functions on 4 points, m = 8, n = 2.
    #[arg(long)]
    pub generator: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub figure: Option<u8>,
    /// TOML sweep configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    pub m: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub massart_c: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub grid_points: Option<usize>,
    /// Set the MCERA to the sweep value instead of simulating it.
    #[arg(long)]
    pub worst_case: bool,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(value_parser = parse_tail_kind)]
    pub kind: TailKind,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, value_parser = parse_count)]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    pub m: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub z_hat: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub era: Option<f64>,
    #[arg(long)]
    pub rc: Option<f64>,
    #[arg(long)]
    pub nu_hat: Option<f64>,
    #[arg(long)]
    pub wvar_hat: Option<f64>,
    #[arg(long)]
    pub wvar: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub ez: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

/// Text for stdout and stderr plus the exit status of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Produced {
    body: String,
    log: String,
    ok: bool,
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("results always serialize");
    s.push('\n');
    s
}

fn text(body: String, ok: bool) -> Produced {
    Produced { body, log: String::new(), ok }
}

fn need<T>(value: Option<T>, flag: &str, method: Method) -> Result<T> {
    value.ok_or_else(|| Error::invalid(format!("{} needs --{flag}", method.cli_name())))
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Capacity(_) => EXIT_CAPACITY,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { stdout: rendered, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: rendered, code }
            };
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::invalid("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::invalid(format!("cannot start {t} worker threads: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(Produced { body, log, ok }) => {
            let code = if ok { EXIT_OK } else { EXIT_CHECK_FAILED };
            match &cli.output {
                Some(path) => match std::fs::write(path, &body) {
                    Ok(()) => Outcome { stdout: String::new(), stderr: log, code },
                    Err(e) => Outcome {
                        stdout: String::new(),
                        stderr: format!("error: cannot write {}: {e}\n", path.display()),
                        code: EXIT_INVALID,
                    },
                },
                None => Outcome { stdout: body, stderr: log, code },
            }
        }
        Err(err) => Outcome { stdout: String::new(), stderr: format!("error: {err}\n"), code: exit_code(&err) },
    }
}

fn execute(cli: &Cli) -> Result<Produced> {
    match &cli.command {
        Command::Stats { input } => cmd_stats(input, cli.format),
        Command::Bound(args) => cmd_bound(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Coverage(args) => cmd_coverage(args),
        Command::Sweep(args) => cmd_sweep(args, cli.format),
        Command::Tail(args) => cmd_tail(args),
    }
}

fn cmd_stats(input: &PathBuf, format: Option<Format>) -> Result<Produced> {
    let evals = EvaluationMatrix::from_csv_path(input)?;
    let stats = class_stats(&evals);
    let body = match format {
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(stats).map_err(|e| Error::invalid(e.to_string()))?;
            String::from_utf8(w.into_inner().map_err(|e| Error::invalid(e.to_string()))?)
                .expect("csv output is UTF-8")
        }
        _ => json_line(&stats),
    };
    Ok(text(body, true))
}

fn cmd_bound(a: &BoundArgs) -> Result<Produced> {
    let delta = Confidence::new(a.delta)?;
    if let Some(path) = &a.input {
        let evals = EvaluationMatrix::from_csv_path(path)?;
        let sigma = SignMatrix::generate(a.sigma_seed, a.n.unwrap_or(1), evals.m())?;
        let mut result = bound_from_data(a.method, &evals, &sigma, delta, ChainOptions { clamp_to_nu: a.clamp_to_nu })?;
        result.inputs.insert("sigma_seed".into(), a.sigma_seed as f64);
        return Ok(text(json_line(&result), true));
    }
    let method = a.method;
    let m = || need(a.m, "m", method);
    let n = || need(a.n, "n", method);
    let c = || need(a.c, "c", method);
    let z = || need(a.z, "z", method);
    let z_hat = || need(a.z_hat, "z-hat", method);
    let mcera = || need(a.mcera, "mcera", method);
    let ez = || need(a.ez_upper, "ez-upper", method);
    let result = match method {
        Method::EraBd => bounds::era_bound_bd(z()?, n()?, m()?, delta)?,
        Method::EraSbNu => {
            let r = bounds::era_bound_sb_nu(mcera()?, z_hat()?, need(a.nu_hat, "nu-hat", method)?, n()?, m()?, delta)?;
            if a.clamp_to_nu {
                let nu = r.inputs["nu_hat"];
                r.clamped(nu)
            } else {
                r
            }
        }
        Method::EraSbWvar => {
            let r = bounds::era_bound_sb_wvar(mcera()?, z_hat()?, need(a.wvar_hat, "wvar-hat", method)?, n()?, m()?, delta)?;
            match (a.clamp_to_nu, a.nu_hat) {
                (true, Some(nu)) => r.clamped(nu),
                (true, None) => return Err(Error::invalid("--clamp-to-nu needs --nu-hat")),
                _ => r,
            }
        }
        Method::RcFromEra => bounds::rc_bound_from_era(need(a.era_ub, "era-ub", method)?, c()?, m()?, delta)?,
        Method::RcN1Bd => bounds::rc_bound_n1_bd(need(a.mcera1.or(a.mcera), "mcera1", method)?, z()?, m()?, delta)?,
        Method::RcN1Var => bounds::rc_bound_n1_var(
            need(a.mcera1.or(a.mcera), "mcera1", method)?,
            z()?,
            need(a.wvar_ub, "wvar-ub", method)?,
            m()?,
            delta,
        )?,
        Method::WvarUb => bounds::wvar_upper_bound(need(a.wvar_hat, "wvar-hat", method)?, z()?, m()?, delta)?,
        Method::EtaUb => bounds::eta_upper_bound(need(a.eta_hat, "eta-hat", method)?, c()?, m()?, delta)?,
        Method::GammaUb => bounds::gamma_upper_bound(need(a.gamma_hat, "gamma-hat", method)?, c()?, m()?, delta)?,
        Method::TauBhatiaDavis => bounds::tau_upper_bhatia_davis(
            need(a.eta_ub.or(a.eta), "eta-ub", method)?,
            need(a.gamma_ub.or(a.gamma), "gamma-ub", method)?,
            c()?,
        )?,
        Method::SdBd => bounds::sd_bound_bd(c()?, m()?, delta)?,
        Method::SdBousquet => {
            let inp = SupDeviationInputs::new(ez()?, c()?, m()?).with_tau(need(a.tau, "tau", method)?);
            bounds::sd_bound_bousquet(&inp, delta)?
        }
        Method::SdSbPos => {
            let inp = SupDeviationInputs::new(ez()?, c()?, m()?).with_mean_gap(need(a.eta.or(a.eta_ub), "eta", method)?);
            bounds::sd_bound_sb(&inp, Side::Pos, delta)?
        }
        Method::SdSbNeg => {
            let gap = need(a.gamma.or(a.gamma_ub), "gamma", method)?;
            let inp = SupDeviationInputs::new(ez()?, c()?, m()?).with_mean_gap(gap);
            bounds::sd_bound_sb(&inp, Side::Neg, delta)?
        }
    };
    Ok(text(json_line(&result), true))
}

/// Random class with values uniform on `[-0.4, 0.6]`.
fn random_tiny_class(seed: u64, m: usize, functions: usize) -> Result<EvaluationMatrix> {
    if m == 0 || functions == 0 {
        return Err(Error::invalid("the random class needs m >= 1 and at least one function"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..m)
        .map(|_| (0..functions).map(|_| rng.gen_range(-0.4..=0.6)).collect())
        .collect();
    EvaluationMatrix::new(rows, -0.4, 0.6)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Produced> {
    let opts = VerifyOptions { sampling: a.samples.map(|count| SamplingBudget { count, seed: a.seed }) };
    let (name, report) = match a.kind {
        VerifyKind::McEraSb | VerifyKind::McEraWsb => {
            let evals = match &a.input {
                Some(path) => EvaluationMatrix::from_csv_path(path)?,
                None => random_tiny_class(a.seed, a.m.unwrap_or(3), a.functions)?,
            };
            let weak = a.kind == VerifyKind::McEraWsb;
            let name = if weak { "mcera-wsb" } else { "mcera-sb" };
            (name, oracles::verify_selfbounding_mcera(&evals, a.n, weak, opts)?)
        }
        kind => {
            let (domain, default_m) = match (&a.input, &a.generator) {
                (Some(path), _) => (FiniteDomain::uniform(EvaluationMatrix::from_csv_path(path)?), 3),
                (None, Some(path)) => {
                    let spec = read_generator(path)?;
                    (spec.build_domain()?, spec.m)
                }
                (None, None) => {
                    let mut spec = GeneratorSpec::default();
                    if let oracles::DomainSpec::Random { seed, .. } = &mut spec.domain {
                        *seed = a.seed;
                    }
                    (spec.build_domain()?, 3)
                }
            };
            let configs = Configurations::Exhaustive(a.m.unwrap_or(default_m));
            match kind {
                VerifyKind::SdPos => ("sd-pos", oracles::verify_selfbounding_sd(&domain, &configs, Side::Pos, opts)?),
                VerifyKind::SdNeg => ("sd-neg", oracles::verify_selfbounding_sd(&domain, &configs, Side::Neg, opts)?),
                VerifyKind::Wvar => ("wvar", oracles::verify_selfbounding_wvar(&domain, &configs, opts)?),
                VerifyKind::Eta => ("eta", oracles::verify_selfbounding_mean_gap(&domain, &configs, Side::Pos, opts)?),
                _ => ("gamma", oracles::verify_selfbounding_mean_gap(&domain, &configs, Side::Neg, opts)?),
            }
        }
    };
    let mut value = serde_json::to_value(report).expect("reports serialize");
    if let Value::Object(map) = &mut value {
        map.insert("property".into(), json!(name));
    }
    Ok(text(json_line(&value), report.passed))
}

fn read_generator(path: &PathBuf) -> Result<GeneratorSpec> {
    let raw = std::fs::read_to_string(path)?;
    toml::from_str(&raw).map_err(|e| Error::invalid(format!("generator {}: {e}", path.display())))
}

fn cmd_coverage(a: &CoverageArgs) -> Result<Produced> {
    let spec = match &a.generator {
        Some(path) => read_generator(path)?,
        None => GeneratorSpec::default(),
    };
    let report = oracles::coverage_experiment(&spec, a.bound, a.trials, Confidence::new(a.delta)?, a.seed)?;
    Ok(text(json_line(&report), report.passed))
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = match (&a.config, a.figure) {
        (Some(path), _) => {
            let raw = std::fs::read_to_string(path)?;
            let mut cfg: SweepConfig =
                toml::from_str(&raw).map_err(|e| Error::invalid(format!("sweep config {}: {e}", path.display())))?;
            if let Some(f) = a.figure {
                cfg.figure = f;
            }
            cfg
        }
        (None, Some(1)) => SweepConfig::figure1(a.n.unwrap_or(1)),
        (None, Some(2)) => SweepConfig::figure2(a.n.unwrap_or(1)),
        (None, Some(_)) => SweepConfig::figure3(a.m.unwrap_or(1000)),
        (None, None) => return Err(Error::invalid("sweep needs --figure or --config")),
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(m) = a.m {
        if m != cfg.m {
            // keep the sweep range anchored at 1/m
            if cfg.sweep_range[0] == 1.0 / cfg.m as f64 {
                cfg.sweep_range[0] = 1.0 / m as f64;
            }
            cfg.m = m;
        }
    }
    if let Some(d) = a.delta {
        cfg.delta = d;
    }
    if let Some(c) = a.massart_c {
        cfg.massart_c = c;
    }
    if let Some(g) = a.grid_points {
        cfg.grid_points = g;
    }
    if a.worst_case {
        cfg.mcera_mode = McEraMode::WorstCase;
    }
    Ok(cfg)
}

fn table_json(t: &SweepTable) -> String {
    let meta: serde_json::Map<String, Value> = t.metadata.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json_line(&json!({ "metadata": meta, "columns": t.columns, "rows": t.rows }))
}

fn cmd_sweep(a: &SweepArgs, format: Option<Format>) -> Result<Produced> {
    let cfg = sweep_config(a)?;
    let table = simulation::sweep(&cfg)?;
    let log = format!(
        "sweep figure {}: m={} n={} mcera={:?} -> {} rows\n",
        cfg.figure,
        cfg.m,
        cfg.n,
        cfg.mcera_mode,
        table.rows.len()
    );
    let body = match format {
        Some(Format::Json) => table_json(&table),
        _ => table.to_csv(),
    };
    Ok(Produced { body, log, ok: true })
}

fn cmd_tail(a: &TailArgs) -> Result<Produced> {
    let params = TailParams {
        z: a.z,
        z_hat: a.z_hat,
        c: a.c,
        n: a.n,
        m: a.m,
        era: a.era,
        rc: a.rc,
        nu_hat: a.nu_hat,
        wvar_hat: a.wvar_hat,
        wvar: a.wvar,
        eta: a.eta,
        gamma: a.gamma,
        ez: a.ez,
        tau: a.tau,
    };
    let p = bounds::tail_probability(a.kind, a.epsilon, &params)?;
    Ok(text(json_line(&json!({ "kind": a.kind, "epsilon": a.epsilon, "probability": p })), true))
}
