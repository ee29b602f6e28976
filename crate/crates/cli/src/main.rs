use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Surface experiments in the homogeneous spaces E(κ, τ).
#[derive(Parser)]
#[command(name = "ekt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Config file (key=value format).
        config: PathBuf,
        /// Output directory; overrides the `output` key.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Validate a config file and print the settings in force.
    Check {
        /// Config file (key=value format).
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output } => ekt_cli::run(&config, output).map(|summary| {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            if let Some(line) = summary.diagnostic() {
                eprintln!("{line}");
            }
            summary.exit_code()
        }),
        Command::Check { config } => ekt_cli::load(&config, None).map(|settings| {
            for s in &settings.effective {
                println!("{} = {}  # {}", s.key, s.value, s.origin.label());
            }
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
