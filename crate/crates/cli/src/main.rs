use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use torus_zeros::experiment::{self, ExperimentConfig, ReportFormat, SummaryTable};
use torus_zeros::poly::{sample_bernoulli_system, SystemJson};
use torus_zeros::resultant::classify_exceptional;
use torus_zeros::solver::{count_check, solve_system};
use torus_zeros::stats::{
    discrepancy_bounds, discrepancy_report, erdos_turan_size_with, eta_upper_bound, AngleMode, SupNormMode,
};
use torus_zeros::{Error, PolySystem};

#[derive(Parser, Debug)]
#[command(name = "torus-zeros", version, about = "Zeros of random Bernoulli polynomial systems on the unit torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample Bernoulli systems as JSON lines.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a system read from JSON.
    Solve(InputArgs),
    /// Directional resultants and exceptional-set membership of a system.
    Classify(InputArgs),
    /// Solve, measure discrepancies and compute the Erdős–Turán size.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Run a Monte Carlo experiment.
    Experiment(ExperimentArgs),
    /// Classify all 64 linear systems with ±1 coefficients.
    EnumerateD1 {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild summaries and histograms from an experiment directory.
    Report {
        /// Experiment output directory.
        #[arg(long)]
        input: PathBuf,
        /// Defaults to `config.json` inside the input directory.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Defaults to the input directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_histograms: bool,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// System JSON file; `-` reads stdin.
    #[arg(long, default_value = "-")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2")]
    eps: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    angle_mode: Mode,
    #[arg(long, default_value_t = 256)]
    grid: usize,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u32>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    angle_mode: Option<Mode>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Grid,
}

impl From<Mode> for AngleMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => AngleMode::Exact,
            Mode::Grid => AngleMode::Grid,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::Json(_) => 2,
            Error::BoundViolation { .. } => 3,
            Error::Io { .. } | Error::Csv(_) => 4,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Error::io(path, e).into()
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    if path == Path::new("-") {
        io::stdin().read_to_string(&mut s).map_err(|e| io_failure(path, e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn read_system(path: &Path) -> Result<PolySystem, Failure> {
    let text = read_input(path)?;
    let j: SystemJson = serde_json::from_str(&text).map_err(Error::Json)?;
    Ok(PolySystem::from_json(&j)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_failure(Path::new("<stdout>"), e)),
    }
}

fn pretty<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(v).map_err(Error::Json)? + "\n")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Analysis {
    exceptional: bool,
    directional: torus_zeros::resultant::DirectionalRecord,
    count_verdict: Option<torus_zeros::solver::CountVerdict>,
    discrepancy: Option<torus_zeros::stats::DiscrepancyReport>,
    eta: torus_zeros::stats::EtaOutcome,
    eta_upper_bound: f64,
    b_ang: f64,
    b_rad: Vec<(f64, f64)>,
}

fn analyze(sys: &PolySystem, m: &MeasureArgs) -> Result<Analysis, Failure> {
    let report = classify_exceptional(sys)?;
    let eta = erdos_turan_size_with(sys, &report, SupNormMode::Upper)?;
    let (mut verdict, mut disc) = (None, None);
    if !report.exceptional {
        let sol = solve_system(sys)?;
        verdict = Some(count_check(sys, &sol.cycle, &report)?);
        disc = Some(discrepancy_report(&sol.cycle, m.angle_mode.into(), m.grid, &m.eps)?);
    }
    let e = eta.value();
    Ok(Analysis {
        exceptional: report.exceptional,
        directional: report.to_record(),
        count_verdict: verdict,
        discrepancy: disc,
        eta_upper_bound: eta_upper_bound(sys)?,
        b_ang: discrepancy_bounds(e, sys.n, 0.5).0,
        b_rad: m.eps.iter().map(|&x| (x, discrepancy_bounds(e, sys.n, x).1)).collect(),
        eta,
    })
}

fn experiment_config(a: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_failure(p, e))?;
            serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
        }
        None => ExperimentConfig {
            n: a.n.ok_or_else(|| Error::Config("--n is required without --config".into()))?,
            degrees: a.d.clone().ok_or_else(|| Error::Config("--d is required without --config".into()))?,
            trials_per_degree: a.trials.unwrap_or(1),
            master_seed: a.seed.unwrap_or(0),
            epsilons: vec![0.1, 0.2],
            angle_mode: AngleMode::Exact,
            grid_size: 256,
            box_probes: Vec::new(),
            output_dir: None,
            parallelism: None,
        },
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(d) = &a.d {
        cfg.degrees = d.clone();
    }
    if let Some(t) = a.trials {
        cfg.trials_per_degree = t;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(e) = &a.eps {
        cfg.epsilons = e.clone();
    }
    if let Some(m) = a.angle_mode {
        cfg.angle_mode = m.into();
    }
    if let Some(g) = a.grid {
        cfg.grid_size = g;
    }
    if let Some(o) = &a.out {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(p) = a.parallelism {
        cfg.parallelism = Some(p);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn summary_text(summary: &SummaryTable, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => pretty(summary),
        Format::Csv => Ok(experiment::summary_csv(summary)?),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Sample {
            n,
            d,
            seed,
            trials,
            out,
        } => {
            let mut text = String::new();
            for t in 0..trials {
                let sys = sample_bernoulli_system(n, d, seed, t)?;
                text += &serde_json::to_string(&sys.to_json()).map_err(Error::Json)?;
                text.push('\n');
            }
            emit(out.as_deref(), &text)?;
        }
        Command::Solve(io) => {
            let sys = read_system(&io.input)?;
            emit(io.out.as_deref(), &pretty(&solve_system(&sys)?)?)?;
        }
        Command::Classify(io) => {
            let sys = read_system(&io.input)?;
            emit(io.out.as_deref(), &pretty(&classify_exceptional(&sys)?.to_record())?)?;
        }
        Command::Analyze { input, measure } => {
            let sys = read_system(&input.input)?;
            let a = analyze(&sys, &measure)?;
            emit(input.out.as_deref(), &pretty(&a)?)?;
        }
        Command::Experiment(args) => {
            let cfg = experiment_config(&args)?;
            let out = experiment::run_experiment(&cfg)?;
            emit(None, &summary_text(&out.summary, args.format)?)?;
            if out.summary.total_count_failures > 0 {
                eprintln!(
                    "error: {} non-exceptional trials did not yield the generic number of zeros",
                    out.summary.total_count_failures
                );
                return Ok(3);
            }
        }
        Command::EnumerateD1 { format, out } => {
            let table = experiment::enumerate_d1()?;
            let text = match format {
                Format::Json => pretty(&table)?,
                Format::Csv => {
                    let mut s = String::from("pattern,a1,b1,c1,a2,b2,c2,exceptional,reason\n");
                    for r in &table.rows {
                        let [[a1, b1, c1], [a2, b2, c2]] = r.coefficients;
                        s += &format!(
                            "{},{a1},{b1},{c1},{a2},{b2},{c2},{},{}\n",
                            r.pattern,
                            r.oracle_exceptional,
                            r.oracle_reason.as_deref().unwrap_or("")
                        );
                    }
                    s
                }
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Report {
            input,
            config,
            format,
            out,
            no_histograms,
        } => {
            let cfg_path = config.unwrap_or_else(|| input.join("config.json"));
            let cfg = ExperimentConfig::load(&cfg_path)?;
            let records = experiment::read_records(&input)?;
            let refs: Vec<_> = records.iter().collect();
            let out = out.unwrap_or(input);
            for f in experiment::emit_report(&cfg, &refs, format.into(), !no_histograms, &out)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
