use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use agelab::experiment::{emit_report, run, ExperimentConfig, ExperimentKind, RunOptions, RunSummary};
use agelab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "agelab",
    version,
    about = "Age-operator and Hardy-space convergence experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Baker-map experiments.
    #[command(subcommand)]
    Baker(BakerCommand),
    /// Wave-packet experiments.
    #[command(subcommand)]
    Packets(PacketsCommand),
    /// Psi+/Psi- convergence sweep.
    Theorem(RunArgs),
    /// Aggregate run summaries into one JSON report.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum BakerCommand {
    /// Exact partition, duality, covariance and absorption checks.
    Verify(RunArgs),
    /// Convergence table for a Walsh expansion.
    Converge(RunArgs),
}

#[derive(Subcommand)]
enum PacketsCommand {
    /// Build a density kernel from packets and evolve it.
    Evolve(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Summary files or directories to search for `summary.json`;
    /// defaults to the output directory.
    inputs: Vec<PathBuf>,
    /// Directory receiving `report.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    quiet: bool,
}

fn run_experiment(kind: ExperimentKind, args: &RunArgs) -> Result<bool> {
    let config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let opts = RunOptions::resolve(&config, args.out.clone(), args.seed, args.config.as_deref())?;
    let summary = run(kind, &config, &opts)?;
    if !args.quiet {
        for c in &summary.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            let cmp = serde_json::to_value(c.comparison).expect("serializable");
            println!(
                "{mark}  {:<34} {:.6e} {} {:.6e}",
                c.name,
                c.measured,
                cmp.as_str().unwrap_or("?"),
                c.threshold
            );
        }
        println!(
            "{kind}: {} ({:.2}s, seed {}) -> {}",
            if summary.passed() { "pass" } else { "fail" },
            summary.duration_seconds,
            summary.seed,
            opts.out_dir.display()
        );
    }
    Ok(summary.passed())
}

fn collect_summaries(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::from(e).context(format!("reading {}", dir.display())))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_summaries(&path, found)?;
        } else if path.file_name().is_some_and(|n| n == "summary.json") {
            found.push(path);
        }
    }
    Ok(())
}

fn run_report(args: &ReportArgs) -> Result<bool> {
    let roots = if args.inputs.is_empty() {
        vec![args.out.clone()]
    } else {
        args.inputs.clone()
    };
    let mut paths = Vec::new();
    for root in &roots {
        if root.is_dir() {
            collect_summaries(root, &mut paths)?;
        } else {
            paths.push(root.clone());
        }
    }
    let summaries = paths.iter().map(|p| RunSummary::read(p)).collect::<Result<Vec<_>>>()?;
    std::fs::create_dir_all(&args.out)?;
    let target = args.out.join("report.json");
    let file =
        std::fs::File::create(&target).map_err(|e| Error::from(e).context(format!("creating {}", target.display())))?;
    emit_report(&summaries, std::io::BufWriter::new(file))?;
    let passed = summaries.iter().all(RunSummary::passed);
    if !args.quiet {
        println!(
            "report: {} experiment(s), {} -> {}",
            summaries.len(),
            if passed { "pass" } else { "fail" },
            target.display()
        );
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Baker(BakerCommand::Verify(a)) => run_experiment(ExperimentKind::BakerVerify, a),
        Command::Baker(BakerCommand::Converge(a)) => run_experiment(ExperimentKind::BakerConverge, a),
        Command::Packets(PacketsCommand::Evolve(a)) => run_experiment(ExperimentKind::PacketsEvolve, a),
        Command::Theorem(a) => run_experiment(ExperimentKind::Theorem, a),
        Command::Report(a) => run_report(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
