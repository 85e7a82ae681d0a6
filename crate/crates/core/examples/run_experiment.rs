//! Runs a configured experiment through the library API and prints its
//! pass/fail summary.
//!
//! cargo run --release --example run_experiment -- configs/baker-converge.toml

use std::path::PathBuf;

use agelab::experiment::{emit_report, run, ExperimentConfig, RunOptions};

fn main() -> agelab::Result<()> {
    let path = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "configs/baker-converge.toml".into()),
    );
    let config = ExperimentConfig::load(&path)?;
    let kind = config
        .experiment
        .ok_or_else(|| agelab::Error::config("experiment", "the config must name its experiment"))?;
    let out = std::env::temp_dir().join(format!("agelab-{kind}"));
    let opts = RunOptions::resolve(&config, Some(out), None, Some(&path))?;
    let summary = run(kind, &config, &opts)?;
    emit_report(&[summary], std::io::stdout().lock())?;
    Ok(())
}
