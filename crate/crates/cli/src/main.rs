use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use perclab_cli::{run, CliError, Command, Format, Overrides};

#[derive(Parser)]
#[command(name = "perclab", version, about = "Random walks, spectral profiles and percolation checks on finite graphs")]
struct Cli {
    /// Experiment configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Overrides `sampling.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `sampling.replicas`.
    #[arg(long, global = true)]
    replicas: Option<u32>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Sub {
    /// Build the configured graph and emit its edge list or summary.
    BuildGraph,
    /// Random-walk tasks.
    Walk,
    /// Killed-walk gaps and profiles.
    Spectral,
    /// Percolation estimators.
    Perc,
    /// Run one inequality check.
    Verify { check: String },
    /// Repeat the task over `sweep.values` of `sweep.axis`.
    Sweep,
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::parse(e.to_string().trim().to_string())),
    };
    let command = match cli.command {
        Sub::BuildGraph => Command::BuildGraph,
        Sub::Walk => Command::Walk,
        Sub::Spectral => Command::Spectral,
        Sub::Perc => Command::Perc,
        Sub::Verify { check } => Command::Verify(check),
        Sub::Sweep => Command::Sweep,
    };
    let Some(config) = cli.config else {
        return fail(&CliError::parse("--config is required"));
    };
    let overrides = Overrides {
        seed: cli.seed,
        replicas: cli.replicas,
        format: cli.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
        out: cli.out,
    };
    match run(&command, &config, &overrides) {
        Ok(done) => {
            // keep standard output clean when it carries the result itself
            match done.path {
                Some(_) => println!("{}", done.summary),
                None => eprintln!("{}", done.summary),
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
