use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Which half of the generating partition a point lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    /// Left half, `x < 1/2` (leading x-bit 0).
    Left,
    /// Right half, `x >= 1/2` (leading x-bit 1).
    Right,
}

impl Cell {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Cell::Right
        } else {
            Cell::Left
        }
    }

    pub fn bit(self) -> bool {
        matches!(self, Cell::Right)
    }

    /// Partition label: 1 for the left half, 2 for the right half.
    pub fn label(self) -> u8 {
        match self {
            Cell::Left => 1,
            Cell::Right => 2,
        }
    }

    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            1 => Ok(Cell::Left),
            2 => Ok(Cell::Right),
            other => Err(Error::Domain(format!("partition index must be 1 or 2, got {other}"))),
        }
    }
}

/// Finite symbolic representation of a point `(x, y)` of the unit square.
///
/// The bits are kept as one bilateral sequence
/// `[y_K, ..., y_2, y_1 | x_1, x_2, ..., x_M]` with a movable binary point, so
/// a forward Baker step moves the point one place to the right and an
/// inverse step one place to the left. Nothing is ever padded: running out
/// of bits on either side is an error.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitTape {
    bits: Vec<bool>,
    point: usize,
}

impl BitTape {
    /// Builds a tape from explicit bit lists, `x_bits[0] = x_1` and
    /// `y_bits[0] = y_1`.
    pub fn new(x_bits: &[u8], y_bits: &[u8]) -> Result<Self> {
        let check = |b: &u8| -> Result<bool> {
            match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Domain(format!("tape bits must be 0 or 1, got {other}"))),
            }
        };
        let mut bits = Vec::with_capacity(x_bits.len() + y_bits.len());
        for b in y_bits.iter().rev() {
            bits.push(check(b)?);
        }
        for b in x_bits {
            bits.push(check(b)?);
        }
        Ok(BitTape {
            bits,
            point: y_bits.len(),
        })
    }

    /// Parses binary digit strings, e.g. `("01", "1")` is `x = 0.01b, y = 0.1b`.
    pub fn from_binary(x: &str, y: &str) -> Result<Self> {
        let parse = |s: &str| -> Result<Vec<u8>> {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::Parse(format!("invalid binary digit `{other}`"))),
                })
                .collect()
        };
        BitTape::new(&parse(x)?, &parse(y)?)
    }

    /// Uniformly random tape with the given bit budgets.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, x_len: usize, y_len: usize) -> Self {
        let bits = (0..x_len + y_len).map(|_| rng.random::<bool>()).collect();
        BitTape { bits, point: y_len }
    }

    pub fn x_bits(&self) -> Vec<u8> {
        self.bits[self.point..].iter().map(|&b| b as u8).collect()
    }

    pub fn y_bits(&self) -> Vec<u8> {
        self.bits[..self.point].iter().rev().map(|&b| b as u8).collect()
    }

    pub fn x_len(&self) -> usize {
        self.bits.len() - self.point
    }

    pub fn y_len(&self) -> usize {
        self.point
    }

    pub fn bit_count(&self) -> usize {
        self.bits.len()
    }

    /// One step of the Baker map: `x_1` becomes the new `y_1`.
    pub fn forward(&self) -> Result<Self> {
        if self.x_len() == 0 {
            return Err(Error::EmptyFuture);
        }
        Ok(BitTape {
            bits: self.bits.clone(),
            point: self.point + 1,
        })
    }

    /// One step of the inverse Baker map: `y_1` becomes the new `x_1`.
    pub fn inverse(&self) -> Result<Self> {
        if self.y_len() == 0 {
            return Err(Error::EmptyPast);
        }
        Ok(BitTape {
            bits: self.bits.clone(),
            point: self.point - 1,
        })
    }

    /// `B^n` applied to the tape; negative `n` applies the inverse map.
    pub fn iterate(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            let n = n as usize;
            if n > self.x_len() {
                return Err(Error::EmptyFuture);
            }
            Ok(BitTape {
                bits: self.bits.clone(),
                point: self.point + n,
            })
        } else {
            let n = n.unsigned_abs() as usize;
            if n > self.y_len() {
                return Err(Error::EmptyPast);
            }
            Ok(BitTape {
                bits: self.bits.clone(),
                point: self.point - n,
            })
        }
    }

    /// Leading x-bit of `B^{-n}(w)`: the bit that decides which partition
    /// cell the point occupies at time coordinate `n`.
    ///
    /// `n = 0` reads `x_1`, `n = k > 0` reads `y_k`, `n = -k` reads `x_{k+1}`.
    pub fn bit_at(&self, n: i64) -> Result<bool> {
        let idx = self.point as i64 - n;
        if idx < 0 || idx >= self.bits.len() as i64 {
            return Err(Error::PrecisionExhausted { coordinate: n });
        }
        Ok(self.bits[idx as usize])
    }

    pub fn cell_at(&self, n: i64) -> Result<Cell> {
        self.bit_at(n).map(Cell::from_bit)
    }

    /// Range of time coordinates readable by [`BitTape::bit_at`].
    pub fn coordinate_range(&self) -> std::ops::RangeInclusive<i64> {
        let lo = self.point as i64 - self.bits.len() as i64 + 1;
        lo..=self.point as i64
    }

    pub fn x(&self) -> f64 {
        decode_f64(self.bits[self.point..].iter().copied())
    }

    pub fn y(&self) -> f64 {
        decode_f64(self.bits[..self.point].iter().rev().copied())
    }

    /// Exact dyadic rationals `(x, y)`.
    pub fn decode_exact(&self) -> (BigRational, BigRational) {
        (
            decode_exact(self.bits[self.point..].iter().copied()),
            decode_exact(self.bits[..self.point].iter().rev().copied()),
        )
    }
}

fn decode_f64(bits: impl Iterator<Item = bool>) -> f64 {
    let mut value = 0.0;
    let mut weight = 0.5;
    for b in bits {
        if b {
            value += weight;
        }
        weight *= 0.5;
    }
    value
}

fn decode_exact(bits: impl Iterator<Item = bool>) -> BigRational {
    let mut numer = BigInt::zero();
    let mut denom = BigInt::one();
    for b in bits {
        numer *= 2;
        denom *= 2;
        if b {
            numer += 1;
        }
    }
    BigRational::new(numer, denom)
}

impl fmt::Debug for BitTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |v: Vec<u8>| v.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        write!(
            f,
            "BitTape {{ x: 0.{}b, y: 0.{}b }}",
            digits(self.x_bits()),
            digits(self.y_bits())
        )
    }
}

/// Floating-point Baker map on the unit square.
///
/// The boundary `x = 1/2` takes the second branch, matching the tape
/// convention where `x = 0.1000...b` has leading bit 1.
pub fn baker_real(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
        return Err(Error::Domain(format!("({x}, {y}) is outside [0,1) x [0,1)")));
    }
    if x < 0.5 {
        Ok((2.0 * x, 0.5 * y))
    } else {
        Ok((2.0 * x - 1.0, 0.5 * y + 0.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forward_first_branch() {
        let t = BitTape::from_binary("01", "1").unwrap();
        assert_eq!((t.x(), t.y()), (0.25, 0.5));
        let f = t.forward().unwrap();
        assert_eq!(f.x_bits(), vec![1]);
        assert_eq!(f.y_bits(), vec![0, 1]);
        assert_eq!((f.x(), f.y()), (0.5, 0.25));
    }

    #[test]
    fn forward_second_branch() {
        let t = BitTape::from_binary("11", "0").unwrap();
        let f = t.forward().unwrap();
        assert_eq!((f.x(), f.y()), (0.5, 0.5));
        assert_eq!(f.y_bits(), vec![1, 0]);
    }

    #[test]
    fn inverse_examples() {
        let t = BitTape::from_binary("1", "01").unwrap();
        let b = t.inverse().unwrap();
        assert_eq!((b.x(), b.y()), (0.25, 0.5));
        let t = BitTape::from_binary("1", "10").unwrap();
        let b = t.inverse().unwrap();
        assert_eq!(b.x_bits(), vec![1, 1]);
        assert_eq!(b.y_bits(), vec![0]);
    }

    #[test]
    fn exhausted_precision_is_an_error() {
        let t = BitTape::from_binary("", "1").unwrap();
        assert!(matches!(t.forward(), Err(Error::EmptyFuture)));
        let t = BitTape::from_binary("1", "").unwrap();
        assert!(matches!(t.inverse(), Err(Error::EmptyPast)));
        assert!(matches!(t.bit_at(1), Err(Error::PrecisionExhausted { coordinate: 1 })));
    }

    #[test]
    fn rejects_non_binary() {
        assert!(BitTape::new(&[0, 2], &[]).is_err());
        assert!(BitTape::from_binary("0a", "").is_err());
    }

    #[test]
    fn coordinate_reads_match_inverse_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = BitTape::random(&mut rng, 10, 10);
            for n in -9..=10 {
                let direct = t.bit_at(n).unwrap();
                let via_dynamics = t.iterate(-n).unwrap().bit_at(0).unwrap();
                assert_eq!(direct, via_dynamics);
            }
        }
    }

    #[test]
    fn baker_real_boundary_and_domain() {
        assert_eq!(baker_real(0.25, 0.5).unwrap(), (0.5, 0.25));
        assert_eq!(baker_real(0.75, 0.0).unwrap(), (0.5, 0.5));
        assert_eq!(baker_real(0.5, 0.0).unwrap(), (0.0, 0.5));
        assert!(matches!(baker_real(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(baker_real(0.2, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn baker_real_agrees_with_tape_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let t = BitTape::random(&mut rng, 40, 40);
            let (x, y) = baker_real(t.x(), t.y()).unwrap();
            let f = t.forward().unwrap();
            assert_eq!((x, y), (f.x(), f.y()));
            let (ex, ey) = f.decode_exact();
            assert_eq!(num_traits::ToPrimitive::to_f64(&ex).unwrap(), x);
            assert_eq!(num_traits::ToPrimitive::to_f64(&ey).unwrap(), y);
        }
    }
}
