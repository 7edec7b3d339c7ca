use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qwalk::cli::{execute, Invocation, OutputFormat};
use qwalk::config::Experiment;

#[derive(Parser)]
#[command(
    version,
    about = "Discrete-time quantum walks under correlated coin noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for ensemble realizations (QWALK_THREADS overrides).
    #[arg(long, global = true, env = "QWALK_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble σ(t) and its power-law exponent.
    Run(Args),
    /// Exponent as a function of θ₁.
    Scan(Args),
    /// Finite-size scaling of the long-time width.
    Fss(Args),
    /// Ensemble-averaged final probability profile.
    Profile(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON experiment config.
    config: PathBuf,

    /// `key=value` overrides, e.g. `steps=1000 noise.theta1=4pi/15`.
    overrides: Vec<String>,

    #[arg(short, long, default_value = "out")]
    output_dir: PathBuf,

    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    format: OutputFormat,

    /// Also run the uncorrelated twin into `<output_dir>/random_baseline`.
    #[arg(long)]
    with_random_baseline: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("qwalk: cannot configure {n} threads: {e}");
        }
    }

    let (experiment, args) = match cli.command {
        Command::Run(a) => (Experiment::Run, a),
        Command::Scan(a) => (Experiment::Scan, a),
        Command::Fss(a) => (Experiment::Fss, a),
        Command::Profile(a) => (Experiment::Profile, a),
    };
    let invocation = Invocation {
        experiment,
        config_path: args.config,
        overrides: args.overrides,
        output_dir: args.output_dir,
        format: args.format,
        with_random_baseline: args.with_random_baseline,
    };
    match execute(&invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
