//! Time reversal in the age variable swaps the Psi+ and Psi- masses.
//!
//! cargo run --example time_reversal

use agelab::hardy_continuous::{psi_split, reference_gaussian, time_reverse, RegionMasses};
use agelab::liouville::{to_age, NuSigmaGrid};

fn main() -> agelab::Result<()> {
    let grid = NuSigmaGrid::single_slice(16.0, 1024, 16.0)?;
    let rep = to_age(&reference_gaussian(&grid, -2.5, 0.8)?)?;
    let reversed = time_reverse(&rep);

    let (m, k) = (RegionMasses::of(&rep), RegionMasses::of(&reversed));
    println!(
        "state:    a>0 {:.15e}  a<0 {:.15e}  a=0 {:.3e}",
        m.positive, m.negative, m.zero_bin
    );
    println!(
        "reversed: a>0 {:.15e}  a<0 {:.15e}  a=0 {:.3e}",
        k.positive, k.negative, k.zero_bin
    );
    println!("K is an involution: {}", time_reverse(&reversed) == rep);
    let split = psi_split(&reversed);
    println!(
        "reversed Psi+ mass {:.6}, Psi- mass {:.6}",
        split.plus_mass(),
        split.minus_mass()
    );
    Ok(())
}
