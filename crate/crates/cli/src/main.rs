use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use normsq_cli::{run, Command, Options};

#[derive(Parser)]
#[command(
    name = "normsq",
    version,
    about = "Critical structure of norm-squares of torus momentum maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List critical values with indices, minimizing coordinates and stabilizers.
    Analyze(Args),
    /// Equivariant Poincare series and Betti numbers of the level set.
    Poincare(Args),
    /// Numerically certify every critical component.
    Verify(Args),
    /// Flow a random ensemble and tabulate strata.
    Flow(Args),
    /// Draw the momentum image (rank 2) as SVG.
    Plot(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Spec document (JSON).
    spec: PathBuf,
    /// Target value, e.g. "0,0" or "(1/2,-1)"; overrides the document's.
    #[arg(long, allow_hyphen_values = true)]
    target: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Also write the table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Structured JSON report (SVG file for `plot`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (command, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Poincare(a) => (Command::Poincare, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Flow(a) => (Command::Flow, a),
        Cmd::Plot(a) => (Command::Plot, a),
    };
    let opts = Options {
        target: args.target,
        seed: args.seed,
        samples: args.samples,
        radius: args.radius,
        points: args.points,
        csv: args.csv,
        out: args.out,
    };
    let output = run(command, &args.spec, &opts);
    let _ = std::io::stdout().write_all(output.stdout.as_bytes());
    let _ = std::io::stderr().write_all(output.stderr.as_bytes());
    ExitCode::from(output.code as u8)
}
