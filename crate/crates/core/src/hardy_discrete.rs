//! Forward-stable / transient split of Walsh expansions by age.
//!
//! A term `alpha_F` is forward stable when its age `max F` is at least 1.
//! Terms of age `<= 0` and the constant term make up the transient part.
//! Every operation here works on exact coefficient maps.

use std::io::Write;

use crate::baker::{WalshExpansion, WalshIndexSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HardySplitDiscrete {
    pub plus: WalshExpansion,
    pub minus: WalshExpansion,
}

impl HardySplitDiscrete {
    pub fn reconstruct(&self) -> WalshExpansion {
        self.plus.add(&self.minus)
    }
}

/// Membership in the forward-stable subspace.
pub fn is_plus(set: &WalshIndexSet) -> bool {
    set.max_index().is_some_and(|age| age >= 1)
}

pub fn split_by_age(rho: &WalshExpansion) -> HardySplitDiscrete {
    HardySplitDiscrete {
        plus: rho.filter(is_plus),
        minus: rho.filter(|f| !is_plus(f)),
    }
}

/// Whether one Koopman step keeps a plus-subspace expansion in the plus
/// subspace.
pub fn verify_forward_stability(rho_plus: &WalshExpansion) -> Result<bool> {
    if let Some((f, _)) = rho_plus.terms().find(|(f, _)| !is_plus(f)) {
        return Err(Error::InvalidSubspace(format!("term F={f} has age <= 0")));
    }
    Ok(rho_plus.koopman_apply(1).terms().all(|(f, _)| is_plus(f)))
}

/// `|| minus component of U^n rho ||`.
pub fn minus_norm_after(rho: &WalshExpansion, n: u64) -> f64 {
    split_by_age(&rho.koopman_apply(n as i64)).minus.norm()
}

pub fn plus_norm_after(rho: &WalshExpansion, n: u64) -> f64 {
    split_by_age(&rho.koopman_apply(n as i64)).plus.norm()
}

/// Smallest `n` from which `U^n rho` has no transient component:
/// `max(0, 1 - min_F max F)`.
pub fn absorption_time(rho: &WalshExpansion) -> Result<u64> {
    if !rho.is_mean_zero() {
        return Err(Error::AgeUndefinedForEquilibrium);
    }
    let youngest = rho
        .terms()
        .filter_map(|(f, _)| f.max_index())
        .min()
        .ok_or(Error::EmptyExpansion)?;
    Ok((1 - youngest).max(0) as u64)
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub minus_norm: f64,
    pub plus_norm: f64,
}

pub fn convergence_table(rho: &WalshExpansion, steps: u64) -> Vec<ConvergenceRow> {
    (0..=steps)
        .map(|n| ConvergenceRow {
            n,
            minus_norm: minus_norm_after(rho, n),
            plus_norm: plus_norm_after(rho, n),
        })
        .collect()
}

/// CSV with header `n,minus_norm,plus_norm`.
pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[ConvergenceRow]) -> std::io::Result<()> {
    writeln!(out, "n,minus_norm,plus_norm")?;
    for r in rows {
        writeln!(out, "{},{:.16e},{:.16e}", r.n, r.minus_norm, r.plus_norm)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn set(v: &[i64]) -> WalshIndexSet {
        WalshIndexSet::new(v.iter().copied()).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn split_examples() {
        let rho = WalshExpansion::basis(set(&[1]));
        let s = split_by_age(&rho);
        assert_eq!(s.plus, rho);
        assert!(s.minus.is_zero());

        let rho = WalshExpansion::from_terms([(set(&[-2]), one()), (set(&[]), one())]);
        let s = split_by_age(&rho);
        assert!(s.plus.is_zero());
        assert_eq!(s.minus, rho);

        let rho = WalshExpansion::basis(set(&[-1, 2]));
        let s = split_by_age(&rho);
        assert_eq!(s.plus, rho);
        assert!(s.minus.is_zero());
    }

    #[test]
    fn minus_subspace_is_not_invariant() {
        let rho = WalshExpansion::basis(set(&[0]));
        assert!(split_by_age(&rho).plus.is_zero());
        let shifted = rho.koopman_apply(1);
        assert_eq!(split_by_age(&shifted).plus, shifted);
    }

    #[test]
    fn forward_stability_examples() {
        assert!(verify_forward_stability(&WalshExpansion::basis(set(&[1]))).unwrap());
        assert!(verify_forward_stability(&WalshExpansion::basis(set(&[1, 5]))).unwrap());
        assert!(matches!(
            verify_forward_stability(&WalshExpansion::basis(set(&[0]))),
            Err(Error::InvalidSubspace(_))
        ));
    }

    #[test]
    fn minus_norm_examples() {
        let rho = WalshExpansion::basis(set(&[-3]));
        assert_eq!(minus_norm_after(&rho, 3), 1.0);
        assert_eq!(minus_norm_after(&rho, 4), 0.0);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho =
            WalshExpansion::from_terms([(set(&[0]), Complex64::new(s, 0.0)), (set(&[1]), Complex64::new(s, 0.0))]);
        assert_eq!(minus_norm_after(&rho, 1), 0.0);

        let eq = WalshExpansion::basis(WalshIndexSet::empty());
        for n in [0, 1, 17, 1000] {
            assert_eq!(minus_norm_after(&eq, n), 1.0);
        }
    }

    #[test]
    fn absorption_examples() {
        assert_eq!(absorption_time(&WalshExpansion::basis(set(&[-3]))).unwrap(), 4);
        assert_eq!(absorption_time(&WalshExpansion::basis(set(&[2]))).unwrap(), 0);
        assert!(matches!(
            absorption_time(&WalshExpansion::zero()),
            Err(Error::EmptyExpansion)
        ));
        assert!(matches!(
            absorption_time(&WalshExpansion::basis(WalshIndexSet::empty())),
            Err(Error::AgeUndefinedForEquilibrium)
        ));
    }

    #[test]
    fn convergence_csv_layout() {
        let rows = convergence_table(&WalshExpansion::basis(set(&[-1])), 2);
        let mut buf = Vec::new();
        write_convergence_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "n,minus_norm,plus_norm");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("2,0.0000000000000000e0,1.0000000000000000e0"));
    }
}
