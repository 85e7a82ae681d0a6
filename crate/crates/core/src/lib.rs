//! Numerical laboratory for age operators and the forward-in-time
//! convergence of evolved states to a Hardy subspace.
//!
//! The crate has two halves. [`baker`] and [`hardy_discrete`] treat the
//! Baker transformation exactly: points are finite bit tapes, functions are
//! finite Walsh expansions, and the Koopman operator is a shift of index
//! sets. [`liouville`] and [`hardy_continuous`] treat wave packets of a
//! continuous-spectrum Hamiltonian numerically: density kernels in Riesz
//! coordinates `(nu, sigma)`, transported by FFT into the age variable `a`,
//! where time evolution is the shift `a -> a + t`.
//!
//! [`experiment`] runs named, seeded experiments from a TOML config and
//! writes CSV/JSON artifacts; the `agelab` binary is a thin front end to it.

pub mod baker;
pub mod error;
pub mod experiment;
pub mod hardy_continuous;
pub mod hardy_discrete;
pub mod liouville;
pub mod numerics;
pub mod sampling;

pub use error::{Error, Result};
