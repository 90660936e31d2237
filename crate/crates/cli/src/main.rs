use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qevidence::evidence::OptimizerOptions;
use qevidence::scenario::{builtin, builtin_names, run_scenario, RunOptions, Scenario};
use qevidence::Error;

/// Decide whether measured statistics evidence entanglement.
#[derive(Parser)]
#[command(name = "qevidence", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a built-in scenario.
    Demo {
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// List the built-in scenarios.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Flags {
    /// Replace every seed in the scenario, including the optimizer's.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace every shot count in the scenario.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Penalty stages of the optimizer.
    #[arg(long, default_value_t = 6)]
    stages: usize,
    #[arg(long, default_value_t = 1e6)]
    penalty_max: f64,
    #[arg(long, default_value_t = 1e-7)]
    step_floor: f64,
    /// Run optimizer restarts one after another.
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    report: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add a wall-clock timestamp to the report.
    #[arg(long)]
    timestamp: bool,
}

impl Flags {
    fn options(&self) -> RunOptions {
        let optimizer = OptimizerOptions {
            restarts: self.restarts,
            seed: self.seed.unwrap_or(0),
            stages: self.stages,
            penalty_max: self.penalty_max,
            step_floor: self.step_floor,
            execution: if self.sequential {
                qevidence::evidence::Execution::Sequential
            } else {
                qevidence::evidence::Execution::Parallel
            },
            ..Default::default()
        };
        let timestamp = self.timestamp.then(|| {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            format!("unix:{secs}")
        });
        RunOptions {
            seed: self.seed,
            shots: self.shots,
            optimizer,
            timestamp,
        }
    }
}

fn execute(scenario: &Scenario, flags: &Flags) -> Result<(), Error> {
    let report = run_scenario(scenario, &flags.options())?;
    let text = match flags.report {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    match &flags.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => {
            for name in builtin_names() {
                let description = builtin(name).ok().and_then(|s| s.description).unwrap_or_default();
                println!("{name:<16} {description}");
            }
            Ok(())
        }
        Command::Demo { name, flags } => builtin(name).and_then(|s| execute(&s, flags)),
        Command::Run { file, flags } => std::fs::read_to_string(file)
            .map_err(|e| Error::Io(format!("{}: {e}", file.display())))
            .and_then(|text| Scenario::from_json(&text))
            .and_then(|s| execute(&s, flags)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
