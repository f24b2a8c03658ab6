use std::path::PathBuf;
use std::process::ExitCode;

use boussinesq_cli::{load, run, write_error, Command, CliError, Overrides};
use clap::Parser;

/// Fractional-dissipation Boussinesq solver and attractor experiments.
#[derive(Debug, Parser)]
#[command(name = "boussinesq", version)]
struct Cli {
    /// simulate | squeeze | determine | bounds | inequalities | gauss
    #[arg(value_enum)]
    command: Command,
    /// Run configuration (required except for `gauss`).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `[run] out`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Random seed; overrides `[run] seed`.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Accept dissipation exponents outside (1/2, 1).
    #[arg(long)]
    allow_out_of_range_exponents: bool,
    /// Digits printed by `gauss`.
    #[arg(long)]
    digits: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ov = Overrides {
        seed: cli.seed,
        out: cli.out,
        threads: cli.threads,
        allow_out_of_range: cli.allow_out_of_range_exponents,
        digits: cli.digits,
    };
    let cfg = match load(cli.command, cli.config.as_deref(), &ov) {
        Ok(cfg) => cfg,
        Err(e) => {
            if let Some(dir) = &ov.out {
                let _ = write_error(dir, &e);
            }
            return fail(&e);
        }
    };
    let result = (|| {
        if let Some(n) = cfg.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
        }
        run(&cfg)
    })();
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            out.deferred.as_ref().map_or(ExitCode::SUCCESS, fail)
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}
