use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pinch_curvature::harmonic::solve_cylinder_map;
use pinch_curvature::sweep::{operator_check, read_sweep, run_sweep, write_sweep, MapSummary, SweepConfig};
use pinch_curvature::{Error, Result};

#[derive(Parser)]
#[command(name = "pinch-curvature", version, about = "Curvature of pinching planes on hyperbolic collars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the model plane over a list of core lengths.
    Sweep(Box<SweepArgs>),
    /// Solve the rotationally symmetric harmonic map between two collars.
    SolveMap {
        l: f64,
        #[arg(value_name = "L")]
        big_l: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the collar operator self-checks.
    OperatorCheck {
        l: f64,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 8192)]
        fd_n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Summarise a sweep file and judge the fitted exponents.
    Report { path: PathBuf },
}

// Values stay strings so file and flag go through the same parser.
#[derive(Args)]
struct SweepArgs {
    /// Flat `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated, strictly decreasing, each in (0, 1).
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    c1: Option<String>,
    #[arg(long)]
    a1: Option<String>,
    #[arg(long)]
    b1: Option<String>,
    #[arg(long)]
    b2: Option<String>,
    /// `mixed` or `dirichlet`.
    #[arg(long)]
    bc_mode: Option<String>,
    #[arg(long)]
    offset: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<String>,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig> {
        let mut c = SweepConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        let flags = [
            ("lengths", &self.lengths),
            ("grid", &self.grid),
            ("c1", &self.c1),
            ("a1", &self.a1),
            ("b1", &self.b1),
            ("b2", &self.b2),
            ("bc-mode", &self.bc_mode),
            ("offset", &self.offset),
            ("out", &self.out),
            ("format", &self.format),
            ("workers", &self.workers),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                c.set(key, v)?;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let config = args.config()?;
    let result = run_sweep(&config)?;
    match &config.out {
        Some(path) => write_sweep(BufWriter::new(File::create(path)?), &config, &result),
        None => write_sweep(io::stdout().lock(), &config, &result),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.into()))
}

fn run(cli: Cli) -> Result<()> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Sweep(args) => sweep(&args)?,
        Command::SolveMap { l, big_l, tol, json } => {
            let s = MapSummary::of(&solve_cylinder_map(l, big_l, tol)?)?;
            if json {
                writeln!(out, "{}", to_json(&s)?)?;
            } else {
                writeln!(out, "l                       {:?}", s.l)?;
                writeln!(out, "L                       {:?}", s.big_l)?;
                writeln!(out, "c0                      {:?}", s.c0)?;
                writeln!(out, "hopf                    {:?}", s.hopf)?;
                writeln!(out, "residual at a           {:e}", s.residual_a)?;
                writeln!(out, "residual at core        {:e}", s.residual_core)?;
                writeln!(out, "first integral residual {:e}", s.first_integral)?;
            }
        }
        Command::OperatorCheck { l, grid, fd_n, json } => {
            let rows = operator_check(l, grid, fd_n)?;
            if json {
                writeln!(out, "{}", to_json(&rows)?)?;
            } else {
                for r in &rows {
                    let verdict = if r.pass { "PASS" } else { "FAIL" };
                    writeln!(out, "{verdict}  {:<36} {:>11.3e}  (tol {:.0e})", r.name, r.measured, r.tolerance)?;
                }
            }
        }
        Command::Report { path } => {
            let text = std::fs::read_to_string(&path)?;
            write!(out, "{}", read_sweep(&text)?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
