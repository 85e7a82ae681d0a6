//! The Baker map as a shift on a finite bit tape, and exact cylinder measures.
//!
//! cargo run --example baker_symbolic

use agelab::baker::{baker_real, format_rational, BitTape, Cell, CylinderSpec};

fn main() -> agelab::Result<()> {
    let w = BitTape::from_binary("1011", "01")?;
    println!("w        = {w:?}  (x = {}, y = {})", w.x(), w.y());
    let bw = w.forward()?;
    println!("B w      = {bw:?}  (x = {}, y = {})", bw.x(), bw.y());
    println!("real map = {:?}", baker_real(w.x(), w.y())?);
    println!("B^-1 B w = {:?}", bw.inverse()?);

    for n in -3..=2 {
        println!("alpha_{n:<2} reads {:?}", w.cell_at(n)?);
    }

    // Running out of stored bits is an error, never silent zero padding.
    let short = BitTape::from_binary("1", "")?;
    println!(
        "forward twice on a 1-bit tape: {:?}",
        short.forward().and_then(|t| t.forward()).err()
    );

    let spec = CylinderSpec::new([(-2, Cell::Right), (0, Cell::Left), (3, Cell::Right)])?;
    println!(
        "mu(cylinder of depth {}) = {}",
        spec.depth(),
        format_rational(&spec.measure())
    );
    println!(
        "mu(shifted by 5)          = {}",
        format_rational(&spec.shifted(5).measure())
    );
    Ok(())
}
