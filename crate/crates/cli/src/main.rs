use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use steiner_core::bench::bench;
use steiner_core::bounds::{ratio_curves, solve_alpha_star};
use steiner_core::exact::{DEFAULT_OPT_K_LIMIT, DEFAULT_OPT_LIMIT};
use steiner_core::solve::{solve, Format, Mode, RunConfig};
use steiner_core::stp::parse_stp_file;
use steiner_core::SteinerError;

/// Steiner tree approximation via loss-contracting and relative greedy phases.
#[derive(Parser)]
#[command(name = "steiner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one STP instance.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve every .stp file in a directory and write a CSV table.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the ratio curves or locate their crossing.
    Bounds {
        #[arg(long, conflicts_with = "solve_alpha_star")]
        alpha: Option<f64>,
        #[arg(long)]
        solve_alpha_star: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Largest number of terminals per full component.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value = "full")]
    mode: Mode,
    /// Compute the exact optimum up to this many terminals.
    #[arg(long, default_value_t = DEFAULT_OPT_LIMIT)]
    exact_opt_limit: usize,
    /// Compute the optimal k-restricted tree up to this many terminals.
    #[arg(long, default_value_t = DEFAULT_OPT_K_LIMIT)]
    exact_optk_limit: usize,
    #[arg(long, default_value = "json")]
    format: Format,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            k: self.k,
            mode: self.mode,
            exact_opt_limit: self.exact_opt_limit,
            exact_optk_limit: self.exact_optk_limit,
            format: self.format,
        }
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<(), SteinerError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(SteinerError::from),
    }
}

fn run(cli: Cli) -> Result<(), SteinerError> {
    match cli.command {
        Command::Solve { file, run } => {
            let config = run.config();
            let instance = parse_stp_file(&file)?;
            let result = solve(&instance, &config)?;
            emit(&format!("{}\n", result.render(config.format).trim_end()))?;
            if !result.all_checks_pass() {
                log::warn!("{}: some bound or invariant checks failed", instance.name());
            }
        }
        Command::Bench { dir, run, out } => {
            let report = bench(&dir, &run.config())?;
            let csv = report.to_csv()?;
            match out {
                Some(path) => std::fs::write(&path, csv)?,
                None => emit(&csv)?,
            }
            if report.failures > 0 {
                log::warn!("{} instance(s) failed", report.failures);
            }
        }
        Command::Bounds {
            alpha,
            solve_alpha_star: crossing,
            tol,
        } => {
            if crossing || alpha.is_none() {
                if tol.is_nan() || tol <= 0.0 {
                    return Err(SteinerError::Domain(format!(
                        "tolerance {tol} must be positive"
                    )));
                }
                let start = Instant::now();
                let star = solve_alpha_star(tol);
                emit(&format!(
                    "alpha_star={:.10}\nratio={:.10}\nelapsed_ms={:.3}\n",
                    star.alpha,
                    star.ratio,
                    start.elapsed().as_secs_f64() * 1e3
                ))?;
            } else if let Some(a) = alpha {
                let (curve_a, curve_b) = ratio_curves(a)?;
                emit(&format!(
                    "alpha={a}\nA={curve_a:.10}\nB={curve_b:.10}\nmin={:.10}\n",
                    curve_a.min(curve_b)
                ))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STEINER_LOG", "warn")).init();
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
