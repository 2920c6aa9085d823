use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sogt::dynamics::{ctmc_simulate, estimate_rate, generator_rate, simulate_discrete, SamplerMode};
use sogt::harness::{run_experiment, ExperimentConfig, ExperimentKind};
use sogt::kernels::{
    check_desintegration, check_intertwining, l_k_pmf, l_k_row, n_step_law, nu_pmf, nu_tail_bound, p_d_closed,
    p_d_row, pieri_decompose, q_k_pmf, q_k_row, r_k_pmf, r_k_row, s_k_pmf, s_k_row, TripleState, WPlusPair,
};
use sogt::scalar::format_rational;
use sogt::spectra::{simulate_eigen_chain, write_spectrum_csv};
use sogt::{count_patterns, weyl_dimension, Error, JumpParam, QValue, Row, Scalar, SparseLaw};

#[derive(Parser)]
#[command(name = "sogt", version, about = "Gelfand-Tsetlin patterns, particle dynamics and their exact kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the discrete-time dynamics and write trajectories as JSONL.
    Simulate(SimulateArgs),
    /// Simulate the continuous-time dynamics.
    Ctmc(CtmcArgs),
    /// Evaluate a transition kernel entry or a whole truncated row.
    Kernel(KernelArgs),
    /// Decompose a tensor product with (m, 0, ..., 0).
    Pieri(PieriArgs),
    /// Count the patterns with a given top row.
    Count(CountArgs),
    /// Check the intertwining relation exactly.
    Intertwine(IntertwineArgs),
    /// Check the one-particle summation identities exactly.
    Desintegration(DesintegrationArgs),
    /// Run a configured experiment.
    Experiment(ExperimentArgs),
    /// Sample the top eigenvalues of the antisymmetric matrix chain.
    Eigen(EigenArgs),
}

fn parse_q(s: &str) -> Result<QValue, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_row(s: &str) -> Result<Row, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = parse_q)]
    q: QValue,
    #[arg(long)]
    horizon: usize,
    #[arg(long, default_value_t = 1000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Sampler::InverseCdf)]
    sampler: Sampler,
    /// JSONL file for the trajectories.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    InverseCdf,
    Counted,
}

impl From<Sampler> for SamplerMode {
    fn from(s: Sampler) -> Self {
        match s {
            Sampler::InverseCdf => SamplerMode::InverseCdf,
            Sampler::Counted => SamplerMode::Counted,
        }
    }
}

#[derive(Args)]
struct CtmcArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Estimate the jump rate of the top row from this row...
    #[arg(long, value_parser = parse_row, requires = "rate_to")]
    rate_from: Option<Row>,
    /// ...to this row.
    #[arg(long, value_parser = parse_row, requires = "rate_from")]
    rate_to: Option<Row>,
    /// JSON file for the event lists.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    /// Jump law ν of the Pieri mixture, indexed by m.
    Nu,
    /// P_d on highest weights.
    #[value(name = "p-d")]
    PD,
    /// Top-row kernel R_k.
    #[value(name = "r-k")]
    RK,
    /// n-step law of R_k from 0.
    NStep,
    /// Pair kernel S_k; states are written `z;y`.
    #[value(name = "s-k")]
    SK,
    /// Link kernel L_k; targets are written `x;z;y`.
    #[value(name = "l-k")]
    LK,
    /// Joint kernel Q_k; states are written `x;z;y`.
    #[value(name = "q-k")]
    QK,
    /// Jump rate of the continuous-time top row.
    Rate,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(value_enum)]
    kind: KernelKind,
    #[arg(long, value_parser = parse_q, default_value = "1/2")]
    q: QValue,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Source state.
    #[arg(long, default_value = "")]
    from: String,
    /// Target state; without it the whole row is printed.
    #[arg(long)]
    to: Option<String>,
    /// Jump size for `nu`.
    #[arg(long)]
    m: Option<i64>,
    /// Steps for `n-step`.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    radius: i64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PieriArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_row, allow_hyphen_values = true)]
    lambda: Row,
    #[arg(long)]
    m: i64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = parse_row, allow_hyphen_values = true)]
    lambda: Row,
    /// Also print the Weyl dimension of SO(k+1).
    #[arg(long)]
    weyl: bool,
}

#[derive(Args)]
struct IntertwineArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_parser = parse_q)]
    q: QValue,
    #[arg(long, default_value_t = 4)]
    bound: i64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DesintegrationArgs {
    #[arg(long, value_parser = parse_q)]
    q: QValue,
    #[arg(long, default_value_t = 6)]
    bound: i64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_parser = |s: &str| s.parse::<ExperimentKind>().map_err(|e| e.to_string()))]
    kind: ExperimentKind,
    /// JSON config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    /// N for the small-q and large-q experiments.
    #[arg(long)]
    scale: Option<u64>,
    /// Two scales `lo,hi` for the convergence trend.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    trend: Option<Vec<u64>>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    radius: Option<i64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    bound: Option<i64>,
    /// Threshold of the main statistic.
    #[arg(long)]
    threshold: Option<f64>,
    /// Directory for report.json and CSV files.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EigenArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    #[arg(long, default_value_t = 1000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file for the samples.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// `println!` that exits quietly when stdout is closed, as with `| head`.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("failed writing to stdout: {e}");
        }
    }};
}

/// Errors caused by the arguments rather than by the computation.
fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Contract(_) | Error::Parse(_))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}

/// Returns whether every check passed.
fn run(cmd: Command) -> sogt::Result<bool> {
    match cmd {
        Command::Simulate(a) => simulate(a),
        Command::Ctmc(a) => ctmc(a),
        Command::Kernel(a) => kernel(a),
        Command::Pieri(a) => {
            for (beta, mult) in pieri_decompose(a.d, &a.lambda, a.m)? {
                out!("{beta} {mult}");
            }
            Ok(true)
        }
        Command::Count(a) => {
            let n = count_patterns(a.k, &a.lambda)?;
            out!("{n}");
            if a.weyl {
                let w = weyl_dimension(a.k + 1, &a.lambda)?;
                out!("weyl {w}");
                return Ok(w == n);
            }
            Ok(true)
        }
        Command::Intertwine(a) => {
            let rep = check_intertwining(&JumpParam::new(exact(&a.q)?)?, a.k, a.bound)?;
            out!("max discrepancy {}", rep.max_discrepancy);
            out!("cases {}", rep.cases);
            if let Some((z, y, t)) = &rep.worst {
                out!("worst ({z}, {y}) -> ({}, {}, {})", t.x, t.z, t.y);
            }
            write_json(a.output.as_deref(), &serde_json::to_value(&rep)?)?;
            Ok(rep.passed())
        }
        Command::Desintegration(a) => {
            let rep = check_desintegration(&JumpParam::new(exact(&a.q)?)?, a.bound)?;
            for (i, n) in rep.checked.iter().enumerate() {
                out!("identity {}: {n} tuples", i + 1);
            }
            out!("violations {}", rep.violations.len());
            for v in rep.violations.iter().take(10) {
                out!("  ({}) {:?}: {} != {}", v.identity, v.args, v.lhs, v.rhs);
            }
            write_json(a.output.as_deref(), &serde_json::to_value(&rep)?)?;
            Ok(rep.passed())
        }
        Command::Experiment(a) => experiment(a),
        Command::Eigen(a) => {
            let samples = simulate_eigen_chain(a.d, a.steps, a.paths, a.seed)?;
            match &a.output {
                Some(p) => write_spectrum_csv(&samples, fs::File::create(p)?)?,
                None => write_spectrum_csv(&samples, std::io::stdout().lock())?,
            }
            Ok(true)
        }
    }
}

fn exact(q: &QValue) -> sogt::Result<num_rational::BigRational> {
    if !q.is_exact() {
        return Err(Error::Parse(format!("exact checks need q as num/den, got {q}")));
    }
    q.to_exact()
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> sogt::Result<()> {
    if let Some(p) = path {
        fs::write(p, serde_json::to_string_pretty(value)?)?;
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> sogt::Result<bool> {
    let store = simulate_discrete(&a.q, a.k, a.horizon, a.paths, a.seed, a.sampler.into())?;
    if let Some(p) = &a.output {
        store.write_jsonl(std::io::BufWriter::new(fs::File::create(p)?))?;
    }
    let law = SparseLaw::empirical(store.top_rows_at(a.horizon));
    out!("top row at n={} over {} paths", a.horizon, a.paths);
    for (row, p) in law.iter() {
        out!("{row} {p}");
    }
    Ok(true)
}

fn ctmc(a: CtmcArgs) -> sogt::Result<bool> {
    if let (Some(from), Some(to)) = (&a.rate_from, &a.rate_to) {
        let est = estimate_rate(a.k, from, to, a.t, a.paths, a.seed)?;
        let exact = generator_rate(a.k, from, to)?;
        out!("transitions {} holding time {:.4}", est.transitions, est.holding_time);
        out!("rate {:.5} exact {} ({:.5})", est.rate, format_rational(&exact), exact.to_f64());
        return Ok(true);
    }
    let paths = ctmc_simulate(a.k, a.t, a.paths, a.seed)?;
    if let Some(p) = &a.output {
        fs::write(p, serde_json::to_string(&paths)?)?;
    }
    let law = SparseLaw::empirical(paths.iter().map(|p| p.final_state.top().clone()));
    out!("top row at t={} over {} paths", a.t, a.paths);
    for (row, p) in law.iter() {
        out!("{row} {p}");
    }
    Ok(true)
}

fn parse_state(s: &str, parts: usize) -> sogt::Result<Vec<Row>> {
    let rows: Vec<Row> = s.split(';').map(str::parse).collect::<sogt::Result<_>>()?;
    if rows.len() != parts {
        return Err(Error::Parse(format!("{s:?} should have {parts} ';'-separated rows")));
    }
    Ok(rows)
}

fn pair(s: &str) -> sogt::Result<WPlusPair> {
    let mut r = parse_state(s, 2)?;
    let y = r.pop().unwrap();
    Ok(WPlusPair::new(r.pop().unwrap(), y))
}

fn triple(s: &str) -> sogt::Result<TripleState> {
    let mut r = parse_state(s, 3)?;
    let (y, z) = (r.pop().unwrap(), r.pop().unwrap());
    Ok(TripleState::new(r.pop().unwrap(), z, y))
}

fn need<T>(v: Option<T>, flag: &str) -> sogt::Result<T> {
    v.ok_or_else(|| Error::Parse(format!("--{flag} is required for this kernel")))
}

fn kernel(a: KernelArgs) -> sogt::Result<bool> {
    let value = if a.q.is_exact() {
        kernel_eval(&a, &JumpParam::new(a.q.to_exact()?)?)?
    } else {
        kernel_eval(&a, &JumpParam::new(a.q.as_f64())?)?
    };
    out!("{}", serde_json::to_string_pretty(&value)?);
    write_json(a.output.as_deref(), &value)?;
    Ok(true)
}

fn kernel_eval<S: Scalar>(a: &KernelArgs, q: &JumpParam<S>) -> sogt::Result<serde_json::Value> {
    let single = |p: S| json!({ "probability": p.render() });
    Ok(match a.kind {
        KernelKind::Nu => {
            let d = need(a.d, "d")?;
            let m = need(a.m, "m")?;
            json!({ "probability": nu_pmf(q, d, m)?.render(), "tail_after": nu_tail_bound(q, d, m).render() })
        }
        KernelKind::PD => {
            let d = need(a.d, "d")?;
            let from: Row = a.from.parse()?;
            match &a.to {
                Some(t) => single(p_d_closed(q, d, &from, &t.parse()?)?),
                None => p_d_row(q, d, &from, a.radius)?.to_json(),
            }
        }
        KernelKind::RK => {
            let k = need(a.k, "k")?;
            let from: Row = a.from.parse()?;
            match &a.to {
                Some(t) => single(r_k_pmf(q, k, &from, &t.parse()?)?),
                None => r_k_row(q, k, &from, a.radius)?.to_json(),
            }
        }
        KernelKind::NStep => n_step_law(q, need(a.k, "k")?, a.n, a.radius, 1.0)?.to_json(),
        KernelKind::SK => {
            let k = need(a.k, "k")?;
            let from = pair(&a.from)?;
            match &a.to {
                Some(t) => single(s_k_pmf(q, k, &from, &pair(t)?)?),
                None => s_k_row(q, k, &from, a.radius)?.to_json(),
            }
        }
        KernelKind::LK => {
            let k = need(a.k, "k")?;
            let from = pair(&a.from)?;
            match &a.to {
                Some(t) => single(l_k_pmf::<S>(k, &from, &triple(t)?)?),
                None => l_k_row::<S>(k, &from)?.to_json(),
            }
        }
        KernelKind::QK => {
            let k = need(a.k, "k")?;
            let from = triple(&a.from)?;
            match &a.to {
                Some(t) => single(q_k_pmf(q, k, &from, &triple(t)?)?),
                None => q_k_row(q, k, &from, a.radius)?.to_json(),
            }
        }
        KernelKind::Rate => {
            let k = need(a.k, "k")?;
            let to: Row = need(a.to.as_deref(), "to")?.parse()?;
            json!({ "rate": format_rational(&generator_rate(k, &a.from.parse()?, &to)?) })
        }
    })
}

fn experiment(a: ExperimentArgs) -> sogt::Result<bool> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_json(&fs::read_to_string(p)?)?,
        None => ExperimentConfig::new(a.kind),
    };
    cfg.experiment = a.kind;
    if let Some(v) = a.k {
        cfg.k = v;
    }
    if let Some(v) = a.q {
        cfg.q = v;
    }
    if let Some(v) = a.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = a.t_max {
        cfg.t_max = v;
    }
    if let Some(v) = a.scale {
        cfg.scale = v;
    }
    if let Some(v) = a.trend {
        cfg.trend = Some([v[0], v[1]]);
    }
    if let Some(v) = a.paths {
        cfg.n_paths = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.radius {
        cfg.radius = v;
    }
    if let Some(v) = a.tolerance {
        cfg.tolerance = v;
    }
    if let Some(v) = a.bound {
        cfg.bound = v;
    }
    if let Some(v) = a.threshold {
        match cfg.experiment {
            ExperimentKind::LargeQ => cfg.thresholds.ks = Some(v),
            _ => cfg.thresholds.tv = Some(v),
        }
    }
    if let Some(v) = a.output {
        cfg.output = Some(v);
    }
    let out = run_experiment(&cfg)?;
    let mut stdout = std::io::stdout().lock();
    for r in &out.reports {
        writeln!(stdout, "{r}")?;
    }
    for n in &out.notes {
        writeln!(stdout, "{n}")?;
    }
    writeln!(stdout, "{}", if out.passed() { "experiment passed" } else { "experiment failed" })?;
    Ok(out.passed())
}
