//! Certifies that the evolved Gaussian state converges to Psi- (age support
//! on a <= 0) and prints the sweep table.
//!
//! cargo run --release --example theorem_sweep

use agelab::hardy_continuous::{gaussian_tail_mass, reference_gaussian, theorem_sweep, SweepConfig};
use agelab::liouville::NuSigmaGrid;

fn main() -> agelab::Result<()> {
    let grid = NuSigmaGrid::single_slice(16.0, 4096, 16.0)?;
    let rho = reference_gaussian(&grid, 0.0, 1.0)?;
    let schedule: Vec<f64> = (0..=10).map(f64::from).collect();
    let report = theorem_sweep(&rho, &schedule, &SweepConfig::default())?;
    report.write_csv(std::io::stdout().lock())?;
    for row in &report.rows {
        println!(
            "t = {:>4}: plus - erfc/2 = {:+e}",
            row.t,
            row.plus_mass - gaussian_tail_mass(0.0, 1.0, row.t)
        );
    }
    println!("{}", serde_json::to_string(&report.summary(0)).expect("serializable"));
    Ok(())
}
