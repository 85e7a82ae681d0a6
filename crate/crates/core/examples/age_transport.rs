//! The age representation: transport from the nu-line, evolution as a shift,
//! the commutator [A, L] = i and pointwise decay on a fixed window.
//!
//! cargo run --example age_transport

use agelab::hardy_continuous::reference_gaussian;
use agelab::liouville::{
    commutator_residual, evolve_age, evolve_nu, from_age, pointwise_sup_after, to_age, NuSigmaGrid,
};

fn main() -> agelab::Result<()> {
    let grid = NuSigmaGrid::single_slice(16.0, 1024, 16.0)?;
    let rho = reference_gaussian(&grid, 0.0, 1.0)?;
    let rep = to_age(&rho)?;
    println!("||rho||^2 = {:.15}, mass in age = {:.15}", rho.norm_sqr(), rep.mass());
    println!("round trip error = {:e}", from_age(&rep).max_abs_diff(&rho)?);

    for t in [0.5, 2.0, 7.3] {
        let via_nu = to_age(&evolve_nu(&rho, t))?;
        let via_age = evolve_age(&rep, t)?;
        println!("t = {t}: two-route distance {:e}", via_nu.distance(&via_age)?);
    }
    println!("[A, L] residual = {:e}", commutator_residual(&rho)?);

    for t in 2..=6 {
        println!(
            "sup over [-1, 1] of |rho_hat(a + {t})| = {:e}",
            pointwise_sup_after(&rep, t as f64, (-1.0, 1.0))?
        );
    }
    Ok(())
}
