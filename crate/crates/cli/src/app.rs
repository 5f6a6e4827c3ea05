//! Argument parsing and command dispatch for the `survcmp` binary.
//!
//! [`run`] takes the raw argument list and returns the text destined for
//! stdout, so the whole command surface can be exercised in-process.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use survcmp::inference::{Alternative, Method, Target};
use survcmp::sim::{parse_scenarios, CensoringLevel, ExceedanceBasis, ScenarioConfig, Setup};
use survcmp::survival::BeyondHorizon;

use crate::simulate::{run_coverage, run_table1, Format};
use crate::{analyze, ingest_csv, read_csv, render_text, AnalysisRequest, ColumnMapping};

const TONGUE: &str = include_str!("../data/tongue.csv");

#[derive(Parser)]
#[command(name = "survcmp", version, about = "Mann-Whitney effect and win ratio for censored survival data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the effect and compute intervals and tests for a two-group CSV file.
    Analyze(AnalyzeArgs),
    /// Run the Monte-Carlo coverage study or the exceedance table.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Asymptotic,
    Bootstrap,
    Permutation,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    P,
    W,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlternativeArg {
    TwoSided,
    Greater,
    Less,
}

#[derive(Clone, Copy, ValueEnum)]
enum BeyondArg {
    Event,
    Censor,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Strong,
    Moderate,
    None,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV file; the bundled tongue-cancer data when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "time")]
    time_col: String,
    #[arg(long, default_value = "delta")]
    status_col: String,
    #[arg(long, default_value = "type")]
    group_col: String,
    /// Status value of an observed event.
    #[arg(long, default_value = "1")]
    event_code: String,
    /// Status value of a censored record.
    #[arg(long, default_value = "0")]
    censor_code: String,
    /// Truncation horizon K.
    #[arg(long)]
    k: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "all")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "two-sided")]
    alternative: AlternativeArg,
    #[arg(long, value_enum, default_value = "p")]
    target: TargetArg,
    /// Resampling replicates.
    #[arg(long, default_value_t = 1999)]
    b: usize,
    #[arg(long, env = "SURVCMP_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of the text table.
    #[arg(long)]
    json: bool,
    /// How records beyond K are recorded: as events at K, or censored at K.
    #[arg(long, value_enum, default_value = "event")]
    beyond_k: BeyondArg,
    /// Directory receiving one file of replicate statistics per resampling method.
    #[arg(long)]
    dump_replicates: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    setup: Option<u8>,
    #[arg(long, value_enum)]
    censoring: Option<LevelArg>,
    #[arg(long, default_value_t = 30)]
    n1: usize,
    #[arg(long, default_value_t = 30)]
    n2: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Outer Monte-Carlo replications.
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    /// Resampling replicates per replication.
    #[arg(long, default_value_t = 1999)]
    b: usize,
    #[arg(long, env = "SURVCMP_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Scenario file with `key = value` lines; blank lines separate scenarios.
    #[arg(long, conflicts_with = "full_study")]
    config: Option<PathBuf>,
    /// Every cell of the published grid (N = 10000, B = 1999; takes hours).
    #[arg(long)]
    full_study: bool,
    /// Percentages of times above K instead of coverages.
    #[arg(long, conflicts_with_all = ["config", "full_study"])]
    table1: bool,
    /// Count latent survival times above K rather than observed times.
    #[arg(long, requires = "table1")]
    latent: bool,
    /// Simulated subjects per group for the exceedance table.
    #[arg(long, default_value_t = 10_000)]
    subjects: usize,
    #[arg(long, conflicts_with = "json")]
    tsv: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn workers(n: usize) -> usize {
    if n > 0 {
        n
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

fn level(arg: LevelArg) -> CensoringLevel {
    match arg {
        LevelArg::Strong => CensoringLevel::Strong,
        LevelArg::Moderate => CensoringLevel::Moderate,
        LevelArg::None => CensoringLevel::None,
    }
}

/// Writes `text` to `out` when given; otherwise hands it back for stdout.
fn emit(out: Option<&Path>, text: String) -> anyhow::Result<String> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run_analyze(a: AnalyzeArgs) -> anyhow::Result<String> {
    let mapping = ColumnMapping {
        time: a.time_col,
        status: a.status_col,
        group: a.group_col,
        event_code: a.event_code,
        censor_code: a.censor_code,
    };
    let policy = match a.beyond_k {
        BeyondArg::Event => BeyondHorizon::Event,
        BeyondArg::Censor => BeyondHorizon::Censor,
    };
    let data = match &a.input {
        Some(path) => ingest_csv(path, &mapping, a.k, policy)?,
        None => read_csv(TONGUE.as_bytes(), &mapping, a.k, policy)?,
    };
    let methods = match a.method {
        MethodArg::Asymptotic => vec![Method::Asymptotic],
        MethodArg::Bootstrap => vec![Method::Bootstrap],
        MethodArg::Permutation => vec![Method::Permutation],
        MethodArg::All => vec![Method::Asymptotic, Method::Bootstrap, Method::Permutation],
    };
    let targets = match a.target {
        TargetArg::P => vec![Target::P],
        TargetArg::W => vec![Target::W],
        TargetArg::Both => vec![Target::P, Target::W],
    };
    let alternative = match a.alternative {
        AlternativeArg::TwoSided => Alternative::TwoSided,
        AlternativeArg::Greater => Alternative::Greater,
        AlternativeArg::Less => Alternative::Less,
    };
    let req = AnalysisRequest {
        alpha: a.alpha,
        methods,
        targets,
        alternative,
        b: a.b,
        seed: a.seed,
        workers: workers(a.workers),
    };
    let (report, dump) = analyze(&data, &req)?;
    if let Some(dir) = &a.dump_replicates {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (name, set) in &dump {
            let path = dir.join(format!("{name}.txt"));
            let file = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
            set.write_column(std::io::BufWriter::new(file))?;
        }
    }
    let text = if a.json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        render_text(&report)
    };
    emit(a.out.as_deref(), text)
}

fn run_simulate(s: SimulateArgs) -> anyhow::Result<String> {
    let format = if s.json {
        Format::Json
    } else if s.tsv {
        Format::Tsv
    } else {
        Format::Text
    };
    let setup = s.setup.map(Setup::from_id).transpose()?;
    let text = if s.table1 {
        let setups: Vec<Setup> = setup.map_or(Setup::ALL.to_vec(), |x| vec![x]);
        let levels: Vec<CensoringLevel> = s.censoring.map_or(CensoringLevel::ALL.to_vec(), |l| vec![level(l)]);
        let basis = if s.latent {
            ExceedanceBasis::Latent
        } else {
            ExceedanceBasis::Observed
        };
        run_table1(&setups, &levels, s.subjects, basis, s.seed, format)?
    } else {
        let base = ScenarioConfig {
            setup: setup.unwrap_or(Setup::Three),
            censoring: s.censoring.map_or(CensoringLevel::None, level),
            n1: s.n1,
            n2: s.n2,
            alpha: s.alpha,
            reps: s.reps,
            b: s.b,
            seed: s.seed,
        };
        let configs = if s.full_study {
            ScenarioConfig::full_grid(s.seed)
        } else if let Some(path) = &s.config {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            parse_scenarios(&text, base)?
        } else {
            base.validate()?;
            vec![base]
        };
        run_coverage(&configs, workers(s.workers), format)?
    };
    emit(s.out.as_deref(), text)
}

/// A failed invocation: the process exit code and the message for stderr.
#[derive(Debug)]
pub struct Failure {
    /// 2 for usage errors, 1 for everything else.
    pub code: u8,
    pub message: String,
}

/// Runs one invocation. `args` includes the program name, as with
/// [`std::env::args_os`].
pub fn run<I, T>(args: I) -> Result<String, Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.exit_code() == 0 => return Ok(e.render().to_string()),
        Err(e) => {
            return Err(Failure {
                code: 2,
                message: e.render().to_string(),
            })
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Simulate(s) => run_simulate(s),
    };
    result.map_err(|e| Failure {
        code: 1,
        message: format!("error: {e:#}\n"),
    })
}
