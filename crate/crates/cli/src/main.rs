use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use massey_cli::suites::{run_suite, Suite, SuiteOptions};
use massey_cli::{cmd_exponent, pretty, problem, Failure, Limits, Report};

#[derive(Parser, Debug)]
#[command(name = "massey", version, about = "Unipotent matrix groups, Massey products and Brauer-group formulas over finite groups")]
struct Cli {
    /// Print a human-readable table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Largest group enumerated element by element (U¹, U, fibers of the solver).
    #[arg(long, global = true, default_value_t = massey_core::conjact::DEFAULT_MAX_ELEMS)]
    max_elems: u64,
    /// Node cap for the embedding solver.
    #[arg(long, global = true, default_value_t = massey_core::cohom::DEFAULT_MAX_NODES)]
    max_nodes: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true, env = "MASSEY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Outer exponent of U¹(n, p).
    Exponent {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u32,
    },
    /// Run a verification suite: dwyer, conjact, prs, brauer, bogomolov, generalized.
    Suite {
        name: String,
        /// Exhaustive n = 6 Brauer scan instead of a sample.
        #[arg(long)]
        extended: bool,
    },
    /// Evaluate a problem file (`-` reads stdin).
    Run { file: PathBuf },
}

fn execute(cli: &Cli, limits: &Limits) -> Result<Report, Failure> {
    match &cli.command {
        Command::Exponent { n, p } => cmd_exponent(*n, *p, limits),
        Command::Suite { name, extended } => {
            let suite: Suite = name.parse()?;
            run_suite(suite, &SuiteOptions { extended: *extended }, limits)
        }
        Command::Run { file } => {
            let bytes = if file.as_os_str() == "-" {
                let mut buf = Vec::new();
                std::io::stdin()
                    .read_to_end(&mut buf)
                    .map_err(|e| Failure::input(format!("stdin: {e}")))?;
                buf
            } else {
                std::fs::read(file).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?
            };
            problem::run_problem(&bytes, limits)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("input error: --threads must be positive");
            return ExitCode::from(4);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let limits = Limits {
        max_elems: cli.max_elems,
        max_nodes: cli.max_nodes,
    };
    let start = Instant::now();
    let outcome = execute(&cli, &limits);
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(report) => {
            if cli.pretty {
                print!("{}", pretty::render(&report));
            } else {
                print!("{}", report.to_json());
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                for c in report.failing() {
                    eprintln!("FAIL {}: {}", c.name, c.detail);
                }
                ExitCode::from(2)
            }
        }
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
