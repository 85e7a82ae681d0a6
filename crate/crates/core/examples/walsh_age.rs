//! Walsh expansions, the Koopman shift and the discrete age operator.
//!
//! cargo run --example walsh_age

use agelab::baker::{BitTape, WalshExpansion};

fn main() -> agelab::Result<()> {
    let rho: WalshExpansion = "F={-2,0} 1 0\nF={1,3} 0.5 -0.25\nF={-1} 0 2".parse()?;
    print!("rho:\n{}", rho.to_text());

    let shifted = rho.koopman_apply(2);
    print!("U^2 rho:\n{}", shifted.to_text());
    print!("T rho (age):\n{}", rho.age_apply()?.to_text());
    println!("|| T U - U (T + 1) || = {}", rho.age_commutation_residual(1)?);

    let w = BitTape::from_binary("0110110", "101101")?;
    let lhs = rho.koopman_apply(2).evaluate(&w)?;
    let rhs = rho.evaluate(&w.iterate(-2)?)?;
    println!("(U^2 rho)(w) = {lhs}, rho(B^-2 w) = {rhs}");

    // The constant function carries no age.
    let with_constant: WalshExpansion = "F={} 1 0\nF={2} 1 0".parse()?;
    println!(
        "age of a state with a constant term: {:?}",
        with_constant.age_apply().err()
    );
    Ok(())
}
