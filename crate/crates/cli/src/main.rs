mod model;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use renyirate::approx::{
    approx_rate_sequence, delta_matrix_diagnostic, markov_approximation, renyi_rate_approx, DeltaDiagnostic,
};
use renyirate::counterexample::{
    construct, level_header, level_rows, renyi_upper_bound_sequence, verdict, ConstructionParams,
    IndependencePolicy,
};
use renyirate::cutstack::{
    epsilon_independence, epsilon_independence_exact, independent_cut_stack, m_fold_ics, merge_gadget,
    normalized_shannon_entropy, parse_gadget, write_gadget, Gadget,
};
use renyirate::entropy::renyi_entropy;
use renyirate::processes::{prefix_entropies_nats, sample_path, EnumerationOptions, ProcessKind, ProcessModel};
use renyirate::rational;
use renyirate::spectral::{renyi_rate_markov, MarkovChain};
use renyirate::Error;

const WORKERS_ENV: &str = "RENYIRATE_WORKERS";

#[derive(Parser)]
#[command(name = "renyirate", version, about = "Rényi entropy rates and cutting-and-stacking experiments")]
struct Cli {
    /// Worker threads for enumeration (overrides RENYIRATE_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rényi rates of a model by enumeration or by the spectral formula.
    Renyi(RenyiArgs),
    /// Rates of the order-m Markov approximations with a geometric fit.
    Approx(ApproxArgs),
    /// Operations on gadget files.
    #[command(subcommand)]
    Cutstack(CutstackOp),
    /// Builds the cutting-and-stacking counterexample.
    Counterexample(CounterexampleArgs),
    /// Draws a sample path from a model.
    Sample(SampleArgs),
}

#[derive(Args)]
struct Common {
    /// Comma-separated orders.
    #[arg(long, value_delimiter = ',', default_value = "2", allow_negative_numbers = true)]
    alpha: Vec<f64>,
    /// Logarithm base.
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RenyiArgs {
    model: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Closed-form rate of a Markov or iid model.
    #[arg(long)]
    spectral: bool,
    /// H_α(Y_1^n)/n for n = 1..=n-max by enumeration.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
}

#[derive(Args)]
struct ApproxArgs {
    model: PathBuf,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    base: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 6)]
    m_max: usize,
}

#[derive(Subcommand)]
enum CutstackOp {
    /// Independent cutting and stacking of two gadgets.
    Ics {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// M-fold independent cutting and stacking of one gadget.
    Mfold {
        gadget: PathBuf,
        #[arg(short)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pools equally labeled columns.
    Merge {
        gadget: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Normalized Shannon entropy of a unit-measure gadget.
    Entropy {
        gadget: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Σ|λ(C∩D) − λ(C)λ(D)| over column pairs.
    EpsIndep {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Toy,
    Faithful,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long, value_enum, default_value = "toy")]
    mode: ModeArg,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    alpha: Vec<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// strict, best-effort or fixed:M; the mode picks the default.
    #[arg(long)]
    policy: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    model: PathBuf,
    #[arg(short, long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

enum Failure {
    Input(String),
    Numeric(String),
    Property(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Property(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) | Failure::Property(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::InvalidDistribution(_)
            | Error::NonAdmissibleAlpha { .. }
            | Error::InvalidBase(_)
            | Error::OutOfRange { .. }
            | Error::DimensionMismatch(_)
            | Error::SymbolOutOfRange { .. }
            | Error::WidthMismatch(_)
            | Error::OverlappingSupports(_)
            | Error::NonUniformHeight
            | Error::NonUnitMeasure(_)
            | Error::BlockTooLong { .. }
            | Error::InvalidGadget(_) => Failure::Input(msg),
            Error::PropertyViolated { .. } => Failure::Property(msg),
            _ => Failure::Numeric(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path) -> std::result::Result<ProcessModel, Failure> {
    model::parse_model(&read(path)?).map_err(|e| {
        let f = Failure::from(e);
        match f {
            Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
            other => other,
        }
    })
}

fn read_gadget(path: &Path) -> std::result::Result<Gadget, Failure> {
    parse_gadget(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn out_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Outcome {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Numeric(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn check_alphas(alphas: &[f64]) -> Outcome {
    if alphas.is_empty() {
        return Err(Failure::Input("--alpha needs at least one value".into()));
    }
    Ok(())
}

fn spectral_rate(p: &ProcessModel, alpha: f64, base: f64) -> std::result::Result<f64, Failure> {
    let value = match p.kind() {
        ProcessKind::Iid { marginal } => renyi_entropy(marginal, alpha, base)?.value,
        ProcessKind::Markov { order: 1, table, initial } => {
            let mc = MarkovChain::from_dense(table, Some(initial.clone()))?;
            renyi_rate_markov(&mc, alpha, base)?.value
        }
        ProcessKind::Markov { order, .. } => renyi_rate_approx(&markov_approximation(p, (*order).max(1))?, alpha, base)?.value,
        ProcessKind::Hidden { .. } => {
            return Err(Failure::Input(
                "--spectral needs an iid or Markov model; hidden Markov rates have no closed form, use --enumerate or approx".into(),
            ))
        }
    };
    Ok(value)
}

fn cmd_renyi(a: &RenyiArgs) -> Outcome {
    check_alphas(&a.common.alpha)?;
    if !a.spectral && !a.enumerate {
        return Err(Failure::Input("pass --spectral, --enumerate or both".into()));
    }
    if a.common.base <= 1.0 || !a.common.base.is_finite() {
        return Err(Error::InvalidBase(a.common.base).into());
    }
    let p = read_model(&a.model)?;
    let mut rows = Vec::new();
    for &alpha in &a.common.alpha {
        if a.enumerate {
            let nats = prefix_entropies_nats(&p, a.n_max, alpha, EnumerationOptions::default())?;
            for (i, h) in nats.iter().enumerate() {
                let n = i + 1;
                rows.push(vec![alpha.to_string(), n.to_string(), (h / a.common.base.ln() / n as f64).to_string()]);
            }
        }
        if a.spectral {
            rows.push(vec![alpha.to_string(), "spectral".into(), spectral_rate(&p, alpha, a.common.base)?.to_string()]);
        }
    }
    out_dir(&a.common.out)?;
    fs::write(a.common.out.join("model.txt"), model::write_model(&p))?;
    let header: Vec<String> = ["alpha", "n_or_spectral", "value"].iter().map(|s| s.to_string()).collect();
    write_csv(&a.common.out.join("rates.csv"), &header, &rows)
}

#[derive(Serialize)]
struct FitJson {
    alpha: f64,
    base: f64,
    m_max: usize,
    rho_hat: Option<f64>,
    residual: f64,
    fitted_limit: f64,
    delta: Vec<DeltaRow>,
}

#[derive(Serialize)]
struct DeltaRow {
    m: usize,
    #[serde(flatten)]
    diagnostic: DeltaDiagnostic,
}

fn cmd_approx(a: &ApproxArgs) -> Outcome {
    if a.m_max == 0 {
        return Err(Failure::Input("--m-max must be at least 1".into()));
    }
    let p = read_model(&a.model)?;
    let report = approx_rate_sequence(&p, a.alpha, a.m_max, a.base)?;
    let diffs = report.resolved_differences();
    let rows: Vec<Vec<String>> = report
        .estimates
        .iter()
        .enumerate()
        .map(|(i, (m, v))| {
            let diff = if i == 0 { String::new() } else { diffs[i - 1].to_string() };
            vec![m.to_string(), v.to_string(), diff]
        })
        .collect();
    let delta = (1..a.m_max)
        .map(|m| Ok(DeltaRow { m, diagnostic: delta_matrix_diagnostic(&p, m, a.alpha)? }))
        .collect::<std::result::Result<Vec<_>, Error>>()?;
    let fit = FitJson {
        alpha: a.alpha,
        base: a.base,
        m_max: a.m_max,
        rho_hat: (!report.is_degenerate()).then_some(report.fitted_rate),
        residual: report.residual_rms,
        fitted_limit: report.fitted_limit,
        delta,
    };
    out_dir(&a.out)?;
    fs::write(a.out.join("model.txt"), model::write_model(&p))?;
    let header: Vec<String> = ["m", "value", "diff"].iter().map(|s| s.to_string()).collect();
    write_csv(&a.out.join("approx.csv"), &header, &rows)?;
    write_json(&a.out.join("fit.json"), &fit)
}

#[derive(Serialize)]
struct EntropyJson {
    entropy: f64,
    base: f64,
}

#[derive(Serialize)]
struct EpsilonJson {
    epsilon: f64,
    epsilon_exact: String,
}

fn json_line<T: Serialize>(v: &T) -> std::result::Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn cmd_cutstack(op: &CutstackOp) -> Outcome {
    match op {
        CutstackOp::Ics { first, second, output } => {
            let g = independent_cut_stack(&read_gadget(first)?, &read_gadget(second)?)?;
            emit(output.as_deref(), &write_gadget(&g))
        }
        CutstackOp::Mfold { gadget, m, output } => {
            if *m == 0 {
                return Err(Failure::Input("-m must be at least 1".into()));
            }
            emit(output.as_deref(), &write_gadget(&m_fold_ics(&read_gadget(gadget)?, *m)))
        }
        CutstackOp::Merge { gadget, output } => emit(output.as_deref(), &write_gadget(&merge_gadget(&read_gadget(gadget)?))),
        CutstackOp::Entropy { gadget, base, output } => {
            let h = normalized_shannon_entropy(&read_gadget(gadget)?, *base)?;
            emit(output.as_deref(), &json_line(&EntropyJson { entropy: h, base: *base })?)
        }
        CutstackOp::EpsIndep { first, second, output } => {
            let (s, t) = (read_gadget(first)?, read_gadget(second)?);
            let exact = epsilon_independence_exact(&s, &t);
            let v = EpsilonJson {
                epsilon: epsilon_independence(&s, &t),
                epsilon_exact: rational::format(&exact),
            };
            emit(output.as_deref(), &json_line(&v)?)
        }
    }
}

fn parse_policy(s: &str) -> std::result::Result<IndependencePolicy, Failure> {
    match s {
        "strict" => Ok(IndependencePolicy::Strict),
        "best-effort" => Ok(IndependencePolicy::BestEffort),
        _ => s
            .strip_prefix("fixed:")
            .and_then(|m| m.parse::<u64>().ok())
            .filter(|m| *m >= 1)
            .map(IndependencePolicy::Fixed)
            .ok_or_else(|| Failure::Input(format!("unknown policy `{s}`; use strict, best-effort or fixed:M"))),
    }
}

fn cmd_counterexample(a: &CounterexampleArgs) -> Outcome {
    check_alphas(&a.alpha)?;
    if a.levels == 0 {
        return Err(Failure::Input("--levels must be at least 1".into()));
    }
    let mut params = match a.mode {
        ModeArg::Toy => ConstructionParams::toy(),
        ModeArg::Faithful => ConstructionParams::faithful()?,
    };
    if let Some(p) = &a.policy {
        params.policy = parse_policy(p)?;
    }
    for &alpha in &a.alpha {
        renyi_upper_bound_sequence(&params, alpha, 1)?;
    }
    let levels = construct(&params, a.levels)?;
    out_dir(&a.out)?;
    write_csv(&a.out.join("levels.csv"), &level_header(&a.alpha), &level_rows(&params, &levels, &a.alpha))?;
    let v = verdict(&params, &levels, &a.alpha);
    write_json(&a.out.join("verdict.json"), &v)?;
    if !v.property_a {
        return Err(Failure::Property("property (A) violated: Σ α_m exceeds its bound".into()));
    }
    if !v.property_b {
        return Err(Failure::Property("property (B) violated: all-ones measure falls below its bound".into()));
    }
    if v.faithful && !v.property_d_holds {
        return Err(Failure::Property(format!(
            "property (D) violated: entropy bound {} is not above 1/2",
            v.property_d_bound
        )));
    }
    Ok(())
}

fn cmd_sample(a: &SampleArgs, seed: u64) -> Outcome {
    let p = read_model(&a.model)?;
    let path = sample_path(&p, a.n, seed);
    let text: Vec<String> = path.iter().map(|s| s.to_string()).collect();
    out_dir(&a.out)?;
    fs::write(a.out.join("sample.txt"), text.join(" ") + "\n")?;
    Ok(())
}

fn workers(flag: Option<usize>) -> std::result::Result<Option<usize>, Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Input(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?,
            ),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(Failure::Input("worker count must be at least 1".into()));
    }
    Ok(n)
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = workers(cli.workers)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    match &cli.command {
        Command::Renyi(a) => cmd_renyi(a),
        Command::Approx(a) => cmd_approx(a),
        Command::Cutstack(op) => cmd_cutstack(op),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Sample(a) => cmd_sample(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("renyirate: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
