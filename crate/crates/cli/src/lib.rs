//! Command-line front end: map files, JSON reports and the verification suite.

pub mod commands;
pub mod mapfile;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, PartitionArgs};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "isingkw", version, about = "Exact Ising partition functions on embedded graphs")]
pub struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the partition function.
    Partition {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        /// Keep every weight symbolic (the default unless --eval or --seed is given).
        #[arg(long, conflicts_with = "eval")]
        symbolic: bool,
        /// Evaluate at `name=value,...`; other variables get seeded values.
        #[arg(long)]
        eval: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the spin-structure classes.
    Spins { file: PathBuf },
    /// Print the Kac-Ward and Kasteleyn matrices of one class.
    Matrices {
        file: PathBuf,
        #[arg(long)]
        spin: usize,
    },
    /// Run the invariant suite on a file or on every `.map` file in a directory.
    Verify {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the truncated product over prime reduced closed paths.
    Zeta {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        spin: usize,
    },
    /// Time the Pfaffian evaluation on an N x N torus.
    Bench {
        #[arg(long)]
        torus: usize,
        #[arg(long, default_value_t = 0.3)]
        weight: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Brute,
    Kacward,
    Pfaffian,
    All,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Kacward => "kacward",
            Method::Pfaffian => "pfaffian",
            Method::All => "all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Output of one invocation.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn execute(cli: &Cli) -> Result<(Vec<Report>, bool), CliError> {
    Ok(match &cli.command {
        Command::Partition { file, method, symbolic, eval, seed } => {
            let args = PartitionArgs {
                method: *method,
                symbolic: *symbolic,
                eval: eval.as_deref(),
                seed: *seed,
                timings: cli.timings,
            };
            (vec![commands::partition(file, &args)?], false)
        }
        Command::Spins { file } => (vec![commands::spins(file)?], false),
        Command::Matrices { file, spin } => (vec![commands::matrices(file, *spin)?], false),
        Command::Verify { path, level, seed } => (commands::verify(path, *level, *seed, cli.timings)?, true),
        Command::Zeta { file, max_len, spin } => (vec![commands::zeta(file, *max_len, *spin)?], false),
        Command::Bench { torus, weight } => (vec![commands::bench(*torus, *weight)?], false),
    })
}

/// Runs a parsed command line; exit code 0 on success, 1 when a check
/// fails, 2 on bad input.
pub fn run(cli: &Cli) -> Outcome {
    match execute(cli) {
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
        Ok((reports, many)) => {
            let code = if commands::any_failed(&reports) { 1 } else { 0 };
            let stdout = if cli.json {
                let v = if many { serde_json::to_string_pretty(&reports) } else { serde_json::to_string_pretty(&reports[0]) };
                v.expect("reports serialize") + "\n"
            } else {
                let mut s: String = reports.iter().map(|r| r.render_text()).collect();
                if many {
                    let (p, f, k) = commands::status_counts(&reports);
                    s.push_str(&format!("{} files; checks: {p} passed, {f} failed, {k} skipped\n", reports.len()));
                }
                s
            };
            Outcome { code, stdout, stderr: String::new() }
        }
    }
}
