use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rocband::model::{Method, DEFAULT_GRID_POINTS};
use rocband::simulation::{write_report, Scenario};
use serde_json::{json, Value};

mod dataset;
mod error;
mod fit;
mod output;
mod simulate;
mod svg;

use dataset::{parse_dataset, Convention};
use error::CliError;
use fit::{fit_json, is_stochastic, run_fit, FitOptions};
use simulate::{build_dgm, parse_grid, parse_methods, summary_table, DgmKind, DgmParams};

#[derive(Parser)]
#[command(name = "rocband", version, about = "ROC curves with pointwise confidence bands")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit ROC curves to a "group,value" CSV file and print JSON.
    Fit(FitArgs),
    /// Run a Monte-Carlo coverage study and write a CSV report.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Empirical,
    ParamBiexp,
    ParamBinorm,
    SemiBiexp,
    SemiBinorm,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Empirical => vec![Method::Empirical],
            MethodArg::ParamBiexp => vec![Method::ParamBiexp],
            MethodArg::ParamBinorm => vec![Method::ParamBinorm],
            MethodArg::SemiBiexp => vec![Method::SemiBiexp],
            MethodArg::SemiBinorm => vec![Method::SemiBinorm],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV ("-" for standard input).
    input: PathBuf,
    #[arg(long, value_enum, default_value = "empirical")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "auto")]
    convention: Convention,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = rocband::bootstrap::DEFAULT_REPLICATES)]
    bootstrap: usize,
    /// Number of interior FPR grid points.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Write JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot path (single method).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Directory for one SVG per method.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 600)]
    width: u32,
    #[arg(long, default_value_t = 600)]
    height: u32,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    dgm: DgmKind,
    #[arg(long)]
    lambda0: Option<f64>,
    #[arg(long)]
    lambda1: Option<f64>,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    sd0: Option<f64>,
    #[arg(long)]
    mu1: Option<f64>,
    #[arg(long)]
    sd1: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta0: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    n0: usize,
    #[arg(long)]
    n1: usize,
    /// Comma-separated: empirical, wilson, param-biexp, param-binorm,
    /// semi-biexp, semi-binorm.
    #[arg(long, default_value = "empirical,wilson")]
    methods: String,
    /// Comma-separated FPR values (default 0.1,...,0.9).
    #[arg(long)]
    p: Option<String>,
    /// Monte-Carlo replicates.
    #[arg(long = "M", default_value_t = 1000)]
    m: usize,
    /// Bootstrap replicates per Monte-Carlo replicate.
    #[arg(long = "B", default_value_t = rocband::bootstrap::DEFAULT_REPLICATES)]
    b: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV report path; without it the CSV goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn with_workers<R: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    match workers {
        None => Ok(job()),
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<ExitCode, CliError> {
    if !(args.level > 0.5 && args.level < 1.0) {
        return Err(CliError::Usage(format!("--level {} outside (0.5, 1)", args.level)));
    }
    if args.grid == 0 {
        return Err(CliError::Usage("--grid must be at least 1".into()));
    }
    let methods = args.method.methods();
    if args.seed.is_none() && methods.iter().any(|&m| is_stochastic(m)) {
        return Err(CliError::Usage("--seed is required for bootstrap methods".into()));
    }
    if args.svg.is_some() && methods.len() > 1 {
        return Err(CliError::Usage("--svg takes one method; use --svg-dir".into()));
    }
    let sample = parse_dataset(read_input(&args.input)?.as_slice(), args.convention)?;
    let opts = FitOptions {
        level: args.level,
        bootstrap: args.bootstrap,
        grid: args.grid,
        seed: args.seed,
    };
    let results = with_workers(args.workers, || {
        methods
            .iter()
            .map(|&m| (m, run_fit(&sample, m, &opts)))
            .collect::<Vec<_>>()
    })?;

    if let [(_, Err(e))] = results.as_slice() {
        if let CliError::Usage(_) = e {
            return Err(CliError::Usage(e.to_string()));
        }
    }
    let docs: Vec<Value> = results
        .iter()
        .map(|(m, r)| fit_json(&sample, *m, args.level, r))
        .collect();
    let doc = if args.method == MethodArg::All {
        Value::Array(docs)
    } else {
        docs.into_iter().next().expect("one method")
    };
    emit(args.out.as_deref(), &output::to_json_bytes(&doc))?;

    if let Some(dir) = &args.svg_dir {
        fs::create_dir_all(dir)?;
    }
    let mut failed = false;
    for (m, r) in &results {
        match r {
            Ok(out) => {
                let title = format!("{} (AUC {:.3})", m.name(), out.auc);
                let plot = || svg::render(&out.curve, out.staircase.as_ref(), &title, args.width, args.height);
                if let Some(path) = &args.svg {
                    fs::write(path, plot())?;
                }
                if let Some(dir) = &args.svg_dir {
                    fs::write(dir.join(format!("{}.svg", m.name())), plot())?;
                }
                for w in &out.warnings {
                    eprintln!("warning: {}: {w}", m.name());
                }
            }
            Err(e) => {
                failed = true;
                report_error(e);
            }
        }
    }
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let params = DgmParams {
        lambda0: args.lambda0,
        lambda1: args.lambda1,
        mu0: args.mu0,
        sd0: args.sd0,
        mu1: args.mu1,
        sd1: args.sd1,
        alpha: args.alpha,
        beta0: args.beta0,
        beta1: args.beta1,
    };
    let scenario = Scenario {
        dgm: build_dgm(args.dgm, &params)?,
        n0: args.n0,
        n1: args.n1,
        methods: parse_methods(&args.methods)?,
        p_grid: parse_grid(args.p.as_deref())?,
        replicates: args.m,
        bootstrap: args.b,
        level: args.level,
        seed: args.seed,
    };
    simulate::validate(&scenario)?;
    let report = with_workers(args.workers, || rocband::simulation::run_scenario(&scenario))??;
    for m in &report.flagged {
        eprintln!("warning: {m} failed in more than 10% of replicates");
    }
    let mut csv = Vec::new();
    write_report(std::slice::from_ref(&report), &mut csv)?;
    match &args.out {
        Some(path) => {
            fs::write(path, &csv)?;
            io::stdout().write_all(summary_table(&report).as_bytes())?;
        }
        None => io::stdout().write_all(&csv)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn report_error(e: &CliError) {
    let doc = json!({ "error": e.to_json() });
    let _ = io::stderr().write_all(&output::to_json_bytes(&doc));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            report_error(&e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
