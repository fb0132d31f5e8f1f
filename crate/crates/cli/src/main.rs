use bmk_cli::{emit_report, run_experiment, CliError, Experiment, ExperimentConfig, Format};
use clap::{Parser, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    BmkVerify,
    BmkLp,
    Mollify,
    GreenStokes,
    YoungScan,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::BmkVerify => Experiment::BmkVerify,
            Command::BmkLp => Experiment::BmkLp,
            Command::Mollify => Experiment::Mollify,
            Command::GreenStokes => Experiment::GreenStokes,
            Command::YoungScan => Experiment::YoungScan,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Run a verification experiment and write its report.
///
/// Exit status: 0 pass, 1 fail, 2 usage error.
#[derive(Debug, Parser)]
#[command(name = "bmk", version)]
struct Args {
    #[arg(value_enum)]
    experiment: Command,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    level: Option<usize>,
    /// Comma-separated epsilon ladder.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn run(args: Args) -> Result<i32, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = Some(args.experiment.into());
    if args.level.is_some() {
        cfg.level = args.level;
    }
    if let Some(eps) = args.eps {
        cfg.eps = eps;
    }
    if let Some(p) = args.p {
        cfg.p = p;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    let report = run_experiment(&cfg)?;
    match &cfg.out {
        Some(path) => {
            for written in emit_report(&report, cfg.format, path)? {
                eprintln!("wrote {}", written.display());
            }
        }
        None => match cfg.format {
            Format::Csv => {
                report.write_csv(std::io::stdout().lock())?;
                eprintln!("{}", report.sidecar_json()?);
            }
            Format::Json => println!("{}", report.to_json()?),
        },
    }
    for c in &report.checks {
        eprintln!("{} {}: {:e} (threshold {:e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    if let Some(e) = &report.metadata.error {
        eprintln!("error: {e}");
    }
    eprintln!("verdict: {:?}", report.verdict);
    Ok(report.verdict.exit_code())
}

fn main() -> ExitCode {
    // clap exits with status 2 on its own usage errors
    let args = Args::parse();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("bmk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
