use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sphereflow::cli::{property_suite_command, run_flow_command, verify_command};
use sphereflow::suite::SuiteOptions;

/// Inverse curvature flows of convex graphs in the round sphere.
#[derive(Parser)]
#[command(name = "sphereflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a flow described by a JSON run document.
    RunFlow {
        /// Path to the run document; relative output paths resolve next to it.
        config: PathBuf,
    },
    /// Certify a stored profile and print its functionals and slacks.
    Verify {
        /// Profile text file as written by run-flow snapshots.
        profile: PathBuf,
        /// Dimension of the hypersurface.
        #[arg(long)]
        n: usize,
        /// `circle` or `axisym`.
        #[arg(long)]
        chart: String,
    },
    /// Run the randomized property suite.
    PropertySuite {
        /// Master seed for the sample stream.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random draws per invariant group.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let status = match cli.command {
        Command::RunFlow { config } => run_flow_command(&config, &mut out, &mut err),
        Command::Verify { profile, n, chart } => verify_command(&profile, n, &chart, &mut out, &mut err),
        Command::PropertySuite { seed, samples } => {
            property_suite_command(&SuiteOptions::new(seed, samples), &mut out, &mut err)
        }
    };
    ExitCode::from(status as u8)
}
