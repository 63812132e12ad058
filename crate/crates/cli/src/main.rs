use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ftopt_cli::{run, Mode, RunConfig, DEFAULT_ALPHA_LEVELS, DEFAULT_SEED};
use ftopt_core::ingest::{DEFAULT_CORE_LEVEL, DEFAULT_SUPPORT_LEVEL};
use ftopt_core::monte_carlo::DEFAULT_STEPS;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Crisp,
    Fuzzy,
    #[value(name = "montecarlo", alias = "monte-carlo")]
    MonteCarlo,
    Compare,
    Ingest,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Crisp => Mode::Crisp,
            ModeArg::Fuzzy => Mode::Fuzzy,
            ModeArg::MonteCarlo => Mode::MonteCarlo,
            ModeArg::Compare => Mode::Compare,
            ModeArg::Ingest => Mode::Ingest,
        }
    }
}

/// Crisp, fuzzy and Monte Carlo solver for distributor transportation problems.
#[derive(Debug, Parser)]
#[command(name = "ftopt", version)]
struct Args {
    /// What to compute.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Problem JSON file; in ingest mode a sample file or a histogram CSV.
    input: PathBuf,
    /// Number of uniform alpha levels from 0 to 1.
    #[arg(long, default_value_t = DEFAULT_ALPHA_LEVELS)]
    alpha_levels: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    mc_steps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Confidence level read as the trapezoid core.
    #[arg(long, default_value_t = DEFAULT_CORE_LEVEL)]
    gamma_core: f64,
    /// Confidence level read as the trapezoid support.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_LEVEL)]
    gamma_support: f64,
    #[arg(long, short, default_value = "out")]
    out_dir: PathBuf,
    /// Also write the normalized problem (all trapezoids) to this path.
    #[arg(long)]
    export_problem: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        mode: args.mode.into(),
        input: args.input,
        alpha_levels: args.alpha_levels,
        mc_steps: args.mc_steps,
        seed: args.seed,
        gamma_core: args.gamma_core,
        gamma_support: args.gamma_support,
        out_dir: args.out_dir,
        export_problem: args.export_problem,
    };
    match run(&config) {
        Ok(report) => {
            println!("{}", report.summary);
            for file in report.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
