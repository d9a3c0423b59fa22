use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qrtlab::{execute, parse_commands, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "qrtlab", version, about = "Analyze finite quantum resource theories")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Load a spec and run the selected analyses.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated list of preorder, rates, measures, theorems.
        #[arg(long = "cmd", default_value = "preorder,rates,measures,theorems")]
        commands: String,
        #[arg(long, default_value_t = qrt_core::rates::DEFAULT_N_MAX)]
        n_max: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Overrides the closure depth declared in the spec.
        #[arg(long)]
        closure_depth: Option<usize>,
        #[arg(long, default_value = "json")]
        format: String,
        /// Writes the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Sub::Run {
        spec,
        commands,
        n_max,
        seed,
        closure_depth,
        format,
        out,
    } = Cli::parse().command;
    let parsed = parse_commands(&commands).and_then(|c| Ok((c, format.parse::<OutputFormat>()?)));
    let (commands, format) = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut config = RunConfig::new(spec, commands);
    config.n_max = n_max;
    config.seed = seed;
    config.closure_depth = closure_depth;
    config.format = format;
    config.output_path = out;

    let outcome = execute(&config);
    if outcome.exit_code == 2 {
        eprint!("{}", outcome.output);
    } else if config.output_path.is_none() {
        let _ = std::io::stdout().write_all(outcome.output.as_bytes());
    }
    ExitCode::from(outcome.exit_code as u8)
}
