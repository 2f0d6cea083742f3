//! `fdepth <subcommand> --spec <file> [--seed N] [--out PATH] [--threads N]`
//!
//! Exit codes: 0 on success, 2 for configuration, parse and I/O errors,
//! 3 for numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fdepth::experiment::{run, ExperimentKind, RawSpec, RunOutput};
use fdepth::FdError;

#[derive(Parser)]
#[command(name = "fdepth", version, about = "Functional depth experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment spec file (`key = value` lines).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Master seed; overrides the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; the result is written to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Extra `key=value` overrides, applied after the spec file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Mean outlier rank on models D1-D6.
    Outliers(Common),
    /// DD-classifier misclassification on models C1-C3.
    Classify(Common),
    /// Size and power of depth-rank Kruskal-Wallis tests on models T1-T4.
    Kwtest(Common),
    /// ISB / IVAR / MISE of the deepest curve on models L1-L6.
    Location(Common),
    /// Random RPD as a function of the number of directions.
    Converge(Common),
    /// Depth of every curve of a dataset CSV.
    Depth(Common),
}

fn execute(kind: ExperimentKind, args: Common) -> Result<(), FdError> {
    let mut raw = match &args.spec {
        Some(path) => RawSpec::parse(&std::fs::read_to_string(path)?)?,
        None => RawSpec::default(),
    };
    for assignment in &args.set {
        raw.set_assignment(assignment)?;
    }
    if let Some(seed) = args.seed {
        raw.set("seed", seed.to_string())?;
    }
    if let Some(threads) = args.threads {
        raw.set("threads", threads.to_string())?;
    }
    if let Some(out) = &args.out {
        raw.set("output", out.display().to_string())?;
    }
    let spec = raw.resolve(Some(kind))?;
    let output = run(&spec)?;
    let csv = output.to_csv();
    match &spec.output {
        Some(path) => {
            std::fs::write(path, csv)?;
            if let RunOutput::Table(table) = &output {
                print!("{}", table.render());
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Outliers(a) => (ExperimentKind::Outliers, a),
        Command::Classify(a) => (ExperimentKind::Classify, a),
        Command::Kwtest(a) => (ExperimentKind::KwTest, a),
        Command::Location(a) => (ExperimentKind::Location, a),
        Command::Converge(a) => (ExperimentKind::Converge, a),
        Command::Depth(a) => (ExperimentKind::Depth, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fdepth: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
