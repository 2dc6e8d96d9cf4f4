use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fcmp_cli::{output, presets, run, CliError};

/// Monte Carlo comparison of two forecasting experts.
#[derive(Debug, Parser)]
#[command(name = "fcmp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file or a bundled preset.
    Run {
        /// Path to a `.scenario` file, or a preset name.
        scenario: String,
        /// Override a setting, e.g. `--set epsilon=0.2` or `--set f0.p=0.4`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Worker threads; defaults to the number of cores.
        #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
        workers: Option<u64>,
        /// Output directory (default: the file's `output.dir`, else `fcmp-out/<name>`).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Exit with status 1 when an expectation is not met.
        #[arg(long)]
        check: bool,
    },
    /// List the bundled presets.
    ListPresets,
}

fn list_presets() -> Result<(), CliError> {
    let files = presets::all()?;
    let width = files.iter().map(|f| f.name.len()).max().unwrap_or(0);
    for f in files {
        println!("{:<width$}  [{}] {}", f.name, f.anchor, f.description);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ListPresets => list_presets().map(|_| true),
        Command::Run {
            scenario,
            overrides,
            workers,
            out,
            check,
        } => (|| {
            let file = run::load(&scenario, &overrides)?;
            let done = run::execute(&file, workers.map(|k| k as usize))?;
            let dir = run::output_dir(&file, out.as_deref());
            output::write_outputs(&dir, &file, &done.output, &done.expectations)?;
            print!("{}", output::summary(&file, &done.output, &done.expectations));
            println!("\nwrote {}", dir.join("report.json").display());
            Ok(!check || done.expectations_met())
        })(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
