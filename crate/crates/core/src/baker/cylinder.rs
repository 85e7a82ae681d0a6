use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::tape::{BitTape, Cell};
use crate::error::{Error, Result};

/// A finite cylinder set `{w : B^{-n}(w) in cell_n for every constrained n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CylinderSpec {
    constraints: BTreeMap<i64, Cell>,
}

impl CylinderSpec {
    /// Builds a spec from `(time coordinate, cell)` pairs. Coordinates must be
    /// distinct and there must be at least one constraint.
    pub fn new(constraints: impl IntoIterator<Item = (i64, Cell)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, cell) in constraints {
            if map.insert(n, cell).is_some() {
                return Err(Error::Domain(format!("duplicate cylinder coordinate {n}")));
            }
        }
        if map.is_empty() {
            return Err(Error::Domain("cylinder needs at least one constraint".into()));
        }
        Ok(CylinderSpec { constraints: map })
    }

    pub fn constraints(&self) -> &BTreeMap<i64, Cell> {
        &self.constraints
    }

    pub fn depth(&self) -> usize {
        self.constraints.len()
    }

    /// Same constraints moved `k` steps in time.
    pub fn shifted(&self, k: i64) -> Self {
        CylinderSpec {
            constraints: self.constraints.iter().map(|(&n, &c)| (n + k, c)).collect(),
        }
    }

    pub fn contains(&self, tape: &BitTape) -> Result<bool> {
        for (&n, &cell) in &self.constraints {
            if tape.cell_at(n)? != cell {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact Lebesgue measure of the cylinder.
    ///
    /// Each constraint pins one bit of either the x or the y expansion, so the
    /// set is a product of a dyadic x-set and a dyadic y-set. Pinning `c` of
    /// the first `L` bits leaves `2^(L-c)` admissible prefixes out of `2^L`.
    pub fn measure(&self) -> BigRational {
        let (x_coords, y_coords): (Vec<i64>, Vec<i64>) = self.constraints.keys().partition(|&&n| n <= 0);
        side_measure(x_coords.iter().map(|n| (1 - n) as u64)) * side_measure(y_coords.iter().map(|&n| n as u64))
    }
}

/// Measure of the set of binary expansions with the given (1-based) bit
/// positions pinned.
fn side_measure(positions: impl Iterator<Item = u64>) -> BigRational {
    let positions: Vec<u64> = positions.collect();
    let Some(&depth) = positions.iter().max() else {
        return BigRational::one();
    };
    let free = depth - positions.len() as u64;
    let admissible = BigInt::one() << free;
    BigRational::new(admissible, BigInt::one() << depth)
}

/// Renders a rational as `p/q`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("expected p/q, got `{s}`")))?;
    let p: BigInt = p
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator `{p}`")))?;
    let q: BigInt = q
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator `{q}`")))?;
    if q == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(p, q))
}
