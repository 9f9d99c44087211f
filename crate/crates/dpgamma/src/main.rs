use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpgamma::commands::summary_table;
use dpgamma::config::{load_config, Overrides};
use dpgamma::{run, CliError, Command, RunConfig, Target};

/// Property O, mirror and Gamma-limit checks for del Pezzo surfaces.
#[derive(Parser)]
#[command(name = "dpgamma", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Numerical tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Working precision in decimal digits.
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Comma-separated t values for the Gamma limit.
    #[arg(long = "t-grid", global = true, value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
    /// Seed for the multistart Newton solver.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Gromov-Witten table to use instead of the bundled one.
    #[arg(long = "gw-table", global = true)]
    gw_table: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest number of series terms per grid point.
    #[arg(long = "max-terms", global = true)]
    max_terms: Option<usize>,
    /// `key = value` file with defaults for the flags above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct One {
    /// P2, P1xP1, X1..X8 or all.
    target: Option<String>,
}

#[derive(Args)]
struct Weighted {
    /// P2, P1xP1, X1..X8 or all.
    target: Option<String>,
    /// Weight vector of a weighted projective space, e.g. 1,1,2,3.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<u32>>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify Property O.
    #[command(name = "verify-o")]
    VerifyO(One),
    /// Compare mirror critical values with the spectrum.
    Mirror(Weighted),
    /// Check the limit direction of the J-function against the Gamma class.
    #[command(name = "gamma-limit")]
    GammaLimit(Weighted),
    /// List the exceptional classes.
    Exceptional(One),
    /// Print the quantum multiplication operator.
    Operator(One),
    /// Print the Gamma class.
    #[command(name = "gamma-class")]
    GammaClass(Weighted),
    /// Run everything and print a summary table.
    #[command(name = "report-all")]
    ReportAll,
}

fn config(o: &Opts) -> Result<RunConfig, CliError> {
    let file = match &o.config {
        Some(p) => load_config(p)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        tolerance: o.tol,
        precision_digits: o.digits,
        t_grid: o.t_grid.clone(),
        seed: o.seed,
        gw_table_path: o.gw_table.clone(),
        output_path: o.out.clone(),
        max_terms: o.max_terms,
    };
    RunConfig::from_overrides(file.merge(flags))
}

fn main_inner(cli: Cli) -> Result<i32, CliError> {
    let cfg = config(&cli.opts)?;
    let (cmd, target) = match &cli.command {
        Cmd::VerifyO(a) => (Command::VerifyO, Target::parse(a.target.as_deref(), None)?),
        Cmd::Exceptional(a) => (Command::Exceptional, Target::parse(a.target.as_deref(), None)?),
        Cmd::Operator(a) => (Command::Operator, Target::parse(a.target.as_deref(), None)?),
        Cmd::Mirror(a) => (Command::Mirror, Target::parse(a.target.as_deref(), a.weights.as_deref())?),
        Cmd::GammaLimit(a) => (Command::GammaLimit, Target::parse(a.target.as_deref(), a.weights.as_deref())?),
        Cmd::GammaClass(a) => (Command::GammaClass, Target::parse(a.target.as_deref(), a.weights.as_deref())?),
        Cmd::ReportAll => (Command::ReportAll, Target::All),
    };
    let report = run(cmd, &target, &cfg)?;
    let json = report.to_json();
    match &cfg.output_path {
        Some(p) => {
            std::fs::write(p, &json).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
        }
        None if cmd != Command::ReportAll => print!("{json}"),
        None => {}
    }
    if cmd == Command::ReportAll {
        print!("{}", summary_table(&report));
    }
    for e in &report.results {
        if let Some(m) = &e.message {
            eprintln!("{}: {m}", e.target);
        }
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
