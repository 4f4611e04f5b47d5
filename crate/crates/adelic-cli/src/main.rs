//! `adelic`: degrees, polygons, minima, ellipsoids, heights and seeded check suites for
//! adelic vector bundles over Q.
//!
//! Exit codes: 0 on success, 2 when a reported check fails, 1 on usage or input errors.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Config, ConfigFile, Format, Overrides};

#[derive(Debug, Parser)]
#[command(name = "adelic", version, about = "Adelic vector bundles over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance override for checks.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Enumeration radius as a multiple of the incumbent norm.
    #[arg(long, global = true)]
    radius_factor: Option<f64>,

    /// Seed of randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// TOML configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Adelic degree and slope of a bundle file.
    Degree { file: PathBuf },
    /// Canonical polygon, or its John/Lowner bracket for body metrics.
    Polygon {
        file: PathBuf,
        /// Also write an SVG plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Successive minima with witness vectors.
    Minima { file: PathBuf },
    /// John and Lowner companion bundles and volume ratios.
    John {
        file: PathBuf,
        /// Write the John bundle as a bundle file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The constant log γ_{n,ℓ}.
    Gamma { n: usize, l: usize },
    /// Run a named check suite.
    Verify {
        /// hermitian-exact, body-brackets, all or hermitian-identities.
        suite: String,
        /// Number of instances.
        #[arg(default_value_t = 100)]
        count: usize,
        /// Suite seed (defaults to --seed).
        seed: Option<u64>,
    },
    /// Height of a vector, given as comma-separated rationals such as `1,2/3`.
    Height { file: PathBuf, vector: String },
}

fn run(cli: Cli) -> Result<bool, String> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let flags = Overrides {
        tol: cli.tol,
        radius_factor: cli.radius_factor,
        seed: cli.seed,
        format: cli.format,
        out: cli.out,
    };
    let cfg = Config::resolve(file, flags)?;
    let records = match &cli.command {
        Command::Degree { file } => commands::degree_cmd(file, &cfg),
        Command::Polygon { file, svg } => commands::polygon_cmd(file, svg.as_deref(), &cfg),
        Command::Minima { file } => commands::minima_cmd(file, &cfg),
        Command::John { file, emit } => commands::john_cmd(file, emit.as_deref(), &cfg),
        Command::Gamma { n, l } => commands::gamma_cmd(*n, *l, &cfg),
        Command::Verify { suite, count, seed } => {
            commands::verify_cmd(suite, *count, seed.unwrap_or(cfg.seed), &cfg)
        }
        Command::Height { file, vector } => commands::height_cmd(file, vector, &cfg),
    }
    .map_err(|e| e.0)?;
    let text = output::render(&records, cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(records.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
