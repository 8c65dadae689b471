use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nuwalk::config::{load_config, Format, Mode, Overrides};
use nuwalk::run::run;

/// Neutrino oscillation on a six-level quantum walk.
#[derive(Debug, Parser)]
#[command(name = "nuwalk", version)]
struct Cli {
    /// oscillate | entropy | flavor-corr | validate | map-params
    mode: Mode,

    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Output file; overrides `output.path`. Standard output when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv | json; overrides `output.format`.
    #[arg(long)]
    format: Option<Format>,

    /// Overrides `steps`.
    #[arg(long)]
    steps: Option<u64>,

    /// Overrides `stride`.
    #[arg(long)]
    stride: Option<u64>,
}

const EXIT_VALIDATION_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let overrides = Overrides {
        mode: Some(cli.mode),
        steps: cli.steps,
        stride: cli.stride,
        format: cli.format,
        out: cli.out,
    };

    let outcome = load_config(&cli.config, &overrides).and_then(|config| run(&config));
    match outcome {
        Ok((output, text)) => {
            if let Some(text) = text {
                let mut stdout = std::io::stdout().lock();
                if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                    eprintln!("error: writing output: {e}");
                    return ExitCode::from(EXIT_ERROR);
                }
            }
            if output.passed {
                ExitCode::SUCCESS
            } else {
                for row in &output.table.rows {
                    if row.last() == Some(&nuwalk::run::Cell::Text("FAIL".into())) {
                        if let Some(nuwalk::run::Cell::Text(name)) = row.first() {
                            log::error!("validation suite `{name}` failed");
                        }
                    }
                }
                ExitCode::from(EXIT_VALIDATION_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
