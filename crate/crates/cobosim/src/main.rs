use std::path::PathBuf;

use clap::Parser;

use cobosim::scenario::{preset, run_scenario, Command, RunOptions, Scenario};
use cobosim::Error;

/// Exact multi-boson interference on invariant Fock blocks.
#[derive(Parser)]
#[command(name = "cobosim", disable_help_subcommand = true)]
struct Cli {
    /// What to report: eigen, trace, null or state.
    command: String,

    /// Named experiment, e.g. `--preset hom4` or `--preset general 2 1`.
    #[arg(long, num_args = 1..=5, value_name = "NAME [PARAMS]", conflicts_with = "scenario")]
    preset: Option<Vec<String>>,

    /// JSON scenario document to run instead of a preset.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Override the time span: grid end for trace/state, search window for null.
    #[arg(long, value_name = "T")]
    window: Option<f64>,

    /// Override the number of grid points.
    #[arg(long, value_name = "N")]
    steps: Option<u32>,
}

fn run(cli: &Cli) -> Result<(), Error> {
    let command: Command = cli.command.parse()?;
    let doc: Scenario = match (&cli.preset, &cli.scenario) {
        (Some(args), None) => preset(&args[0], &args[1..])?,
        (None, Some(path)) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        (None, None) => {
            return Err(Error::Scenario(
                "nothing to run: pass --preset NAME or --scenario FILE".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };
    let opts = RunOptions { window: cli.window, steps: cli.steps };
    let run = run_scenario(&doc, command, &opts)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    match &cli.out {
        Some(path) => std::fs::write(path, run.output.as_bytes())?,
        None => print!("{}", run.output),
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
