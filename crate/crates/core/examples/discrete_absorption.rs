//! Finite-time absorption of a Walsh expansion into the forward-stable
//! subspace, printed as a convergence table.
//!
//! cargo run --example discrete_absorption

use agelab::baker::WalshExpansion;
use agelab::hardy_discrete::{absorption_time, convergence_table, split_by_age, write_convergence_csv};

fn main() -> agelab::Result<()> {
    let rho: WalshExpansion = "F={-4,-2} 1 0\nF={-1,2} 0.5 0\nF={0} 0 1".parse()?;
    let split = split_by_age(&rho);
    print!(
        "plus part:\n{}minus part:\n{}",
        split.plus.to_text(),
        split.minus.to_text()
    );
    println!("absorption time: {}", absorption_time(&rho)?);

    let rows = convergence_table(&rho, 6);
    write_convergence_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
