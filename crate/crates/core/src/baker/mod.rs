//! Exact symbolic dynamics of the Baker transformation.

mod cylinder;
mod tape;
mod walsh;

pub use cylinder::{format_rational, parse_rational, CylinderSpec};
pub use tape::{baker_real, BitTape, Cell};
pub use walsh::{rademacher_eval, walsh_eval, WalshExpansion, WalshIndexSet};
