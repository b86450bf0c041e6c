use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fucik::cli::{self, Command, Outcome, Overrides, CSV_FILE, JSON_FILE, PLOT_FILE};
use fucik::Error;

/// Fučík eigencurves of the weighted 1D p-Laplacian and homogenization rate checks.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// JSON experiment config (`-` for stdin).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write report.json, report.csv and plot.gp here instead of printing JSON.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for sweep points (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Solver tolerance; overrides the config.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    /// Seed for randomized corpora; the commands themselves are deterministic.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Eigenvalues of one weight.
    Eig,
    /// Points of a Fučík curve along a list of slopes.
    Curve,
    /// Eigenvalue gaps against the rate bound over an eps grid.
    SweepEig,
    /// Curve gaps against the rate bounds over an eps grid.
    SweepFucik,
    /// Rate constants of a weight pair.
    Constants,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Eig => Command::Eig,
            Cmd::Curve => Command::Curve,
            Cmd::SweepEig => Command::SweepEig,
            Cmd::SweepFucik => Command::SweepFucik,
            Cmd::Constants => Command::Constants,
        }
    }
}

fn read_config(path: Option<&Path>) -> Result<String, Error> {
    match path {
        None => Err(Error::InvalidInput {
            field: "config".into(),
            reason: "--config PATH is required".into(),
        }),
        Some(p) if p == Path::new("-") => Ok(std::io::read_to_string(std::io::stdin())?),
        Some(p) => Ok(fs::read_to_string(p)?),
    }
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), Error> {
    let r = &outcome.rendered;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(JSON_FILE), &r.json)?;
            fs::write(dir.join(CSV_FILE), &r.csv)?;
            if let Some(plot) = &r.plot {
                fs::write(dir.join(PLOT_FILE), plot)?;
            }
        }
        None => std::io::stdout().write_all(r.json.as_bytes())?,
    }
    Ok(())
}

fn run(args: &Args) -> Result<i32, Error> {
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(Error::InvalidInput {
                field: "jobs".into(),
                reason: "must be >= 1".into(),
            });
        }
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    if let Some(seed) = args.seed {
        log::debug!("seed {seed} ignored: commands are deterministic");
    }
    let text = read_config(args.config.as_deref())?;
    let outcome = cli::run(args.command.into(), &text, &Overrides { tol: args.tol })?;
    for note in &outcome.notes {
        log::warn!("{note}");
    }
    emit(&outcome, args.out.as_deref())?;
    if let Some(err) = &outcome.violation {
        eprintln!("{}", cli::error_json(err));
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let code = match run(&args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", cli::error_json(&err));
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
