//! Walsh functions on the bilateral bit shift, the Koopman operator they
//! diagonalize into a shift, and the discrete age operator.
//!
//! `alpha_n(w)` is +1 when `B^{-n}(w)` lies in the left half of the square and
//! -1 otherwise; `alpha_F` is the product over a finite index set `F`. These
//! form an orthonormal basis of `L^2` of the square, so an expansion is just
//! its coefficient map and all Hilbert-space operations are coefficient
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;

use super::tape::BitTape;
use crate::error::{Error, Result};
use crate::numerics::compensated_sum;

/// Finite index set `F` labelling the Walsh function `alpha_F`. Stored sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WalshIndexSet(Vec<i64>);

impl WalshIndexSet {
    /// Index set from distinct integers in any order.
    pub fn new(indices: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut v: Vec<i64> = indices.into_iter().collect();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain(format!("Walsh index set has repeated entries: {v:?}")));
        }
        Ok(WalshIndexSet(v))
    }

    pub fn empty() -> Self {
        WalshIndexSet(Vec::new())
    }

    pub fn singleton(n: i64) -> Self {
        WalshIndexSet(vec![n])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[i64] {
        &self.0
    }

    /// Age of `alpha_F`: the largest index. `None` for the constant function.
    pub fn max_index(&self) -> Option<i64> {
        self.0.last().copied()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.0.first().copied()
    }

    /// `F + n`.
    pub fn shifted(&self, n: i64) -> Self {
        WalshIndexSet(self.0.iter().map(|&i| i + n).collect())
    }
}

impl fmt::Display for WalshIndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

/// `alpha_n(w)`: +1 if `B^{-n}(w)` is in the left cell, -1 otherwise.
pub fn rademacher_eval(n: i64, tape: &BitTape) -> Result<i8> {
    Ok(if tape.bit_at(n)? { -1 } else { 1 })
}

/// `alpha_F(w)`; the empty product is +1.
pub fn walsh_eval(set: &WalshIndexSet, tape: &BitTape) -> Result<i8> {
    let mut sign = 1;
    for &n in set.indices() {
        sign *= rademacher_eval(n, tape)?;
    }
    Ok(sign)
}

/// Finite linear combination `sum_F a_F alpha_F`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalshExpansion {
    terms: BTreeMap<WalshIndexSet, Complex64>,
}

impl WalshExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(set: WalshIndexSet) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(set, Complex64::new(1.0, 0.0));
        WalshExpansion { terms }
    }

    /// Collects terms, summing coefficients of repeated index sets.
    pub fn from_terms(terms: impl IntoIterator<Item = (WalshIndexSet, Complex64)>) -> Self {
        let mut e = WalshExpansion::zero();
        for (set, c) in terms {
            e.add_term(set, c);
        }
        e
    }

    pub fn add_term(&mut self, set: WalshIndexSet, coefficient: Complex64) {
        let sum = self.coefficient(&set) + coefficient;
        if sum.is_zero() {
            self.terms.remove(&set);
        } else {
            self.terms.insert(set, sum);
        }
    }

    pub fn coefficient(&self, set: &WalshIndexSet) -> Complex64 {
        self.terms.get(set).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WalshIndexSet, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// True iff the constant term vanishes.
    pub fn is_mean_zero(&self) -> bool {
        !self.terms.contains_key(&WalshIndexSet::empty())
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&WalshIndexSet::empty())
    }

    pub fn norm_sqr(&self) -> f64 {
        compensated_sum(self.terms.values().map(|c| c.norm_sqr()))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        WalshExpansion::from_terms(self.terms.iter().map(|(f, &c)| (f.clone(), c * factor)))
    }

    pub fn add(&self, other: &Self) -> Self {
        WalshExpansion::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(f, &c)| (f.clone(), c)),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&WalshIndexSet) -> bool) -> Self {
        WalshExpansion {
            terms: self
                .terms
                .iter()
                .filter(|(f, _)| keep(f))
                .map(|(f, &c)| (f.clone(), c))
                .collect(),
        }
    }

    /// Pointwise value `rho(w)`.
    pub fn evaluate(&self, tape: &BitTape) -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for (set, &c) in &self.terms {
            acc += c * f64::from(walsh_eval(set, tape)?);
        }
        Ok(acc)
    }

    /// `U^n rho`: every `alpha_F` becomes `alpha_{F+n}`.
    pub fn koopman_apply(&self, n: i64) -> Self {
        WalshExpansion {
            terms: self.terms.iter().map(|(f, &c)| (f.shifted(n), c)).collect(),
        }
    }

    /// Discrete age operator, `A alpha_F = (max F) alpha_F`.
    pub fn age_apply(&self) -> Result<Self> {
        if !self.is_mean_zero() {
            return Err(Error::AgeUndefinedForEquilibrium);
        }
        Ok(WalshExpansion::from_terms(self.terms.iter().map(|(f, &c)| {
            let age = f.max_index().expect("non-empty index set");
            (f.clone(), c * age as f64)
        })))
    }

    /// `|| (U^{-n} A U^n - A - n) rho ||`.
    ///
    /// The operator is diagonal on the Walsh basis with integer eigenvalue
    /// `max(F + n) - max F - n`, so the residual is evaluated termwise in
    /// integer arithmetic and is exact for any coefficients.
    pub fn age_commutation_residual(&self, n: i64) -> Result<f64> {
        if !self.is_mean_zero() {
            return Err(Error::AgeUndefinedForEquilibrium);
        }
        let residual = compensated_sum(self.terms.iter().map(|(f, c)| {
            let age = f.max_index().expect("non-empty index set");
            let shifted_age = f.shifted(n).max_index().expect("non-empty index set");
            let eigenvalue = shifted_age - age - n;
            c.norm_sqr() * (eigenvalue * eigenvalue) as f64
        }));
        Ok(residual.sqrt())
    }

    /// `<self, other> = sum_F conj(a_F) b_F`.
    pub fn inner_product(&self, other: &Self) -> Complex64 {
        let mut re = Vec::new();
        let mut im = Vec::new();
        for (f, a) in &self.terms {
            if let Some(b) = other.terms.get(f) {
                let p = a.conj() * b;
                re.push(p.re);
                im.push(p.im);
            }
        }
        Complex64::new(compensated_sum(re), compensated_sum(im))
    }

    /// Text form, one term per line: `F={n1,n2,...} re im`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (f, c) in &self.terms {
            out.push_str(&format!("F={f} {:.16e} {:.16e}\n", c.re, c.im));
        }
        out
    }
}

impl FromStr for WalshExpansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut e = WalshExpansion::zero();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}: `{line}`", lineno + 1));
            let rest = line.strip_prefix("F={").ok_or_else(|| err("expected `F={`"))?;
            let (set, coeffs) = rest.split_once('}').ok_or_else(|| err("unclosed index set"))?;
            let indices = set
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<i64>().map_err(|_| err("bad index")))
                .collect::<Result<Vec<_>>>()?;
            let mut parts = coeffs.split_whitespace();
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| err("missing coefficient"))?
                    .parse::<f64>()
                    .map_err(|_| err("bad coefficient"))
            };
            let c = Complex64::new(next()?, next()?);
            if parts.next().is_some() {
                return Err(err("trailing fields"));
            }
            e.add_term(WalshIndexSet::new(indices)?, c);
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[i64]) -> WalshIndexSet {
        WalshIndexSet::new(v.iter().copied()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn index_set_invariants() {
        assert_eq!(set(&[3, -1, 2]).indices(), &[-1, 2, 3]);
        assert!(WalshIndexSet::new([1, 1]).is_err());
        assert_eq!(set(&[-2, 1]).max_index(), Some(1));
        assert_eq!(WalshIndexSet::empty().max_index(), None);
        assert_eq!(set(&[-1, 4]).to_string(), "{-1,4}");
    }

    #[test]
    fn rademacher_and_walsh_values() {
        let t = BitTape::from_binary("0101", "1").unwrap();
        assert_eq!(rademacher_eval(0, &t).unwrap(), 1);
        let t = BitTape::from_binary("1101", "1").unwrap();
        assert_eq!(rademacher_eval(0, &t).unwrap(), -1);
        assert_eq!(walsh_eval(&set(&[0]), &t).unwrap(), -1);
        assert_eq!(walsh_eval(&WalshIndexSet::empty(), &t).unwrap(), 1);
        assert!(matches!(
            walsh_eval(&set(&[5]), &t),
            Err(Error::PrecisionExhausted { coordinate: 5 })
        ));
    }

    #[test]
    fn koopman_shifts_indices() {
        let e = WalshExpansion::basis(set(&[0]));
        assert_eq!(e.koopman_apply(1), WalshExpansion::basis(set(&[1])));
        let rho = WalshExpansion::from_terms([(set(&[-3, 2]), c(0.5)), (set(&[]), c(0.25))]);
        assert_eq!(rho.koopman_apply(4).koopman_apply(-4), rho);
        assert_eq!(rho.koopman_apply(4).constant_term(), c(0.25));
    }

    #[test]
    fn age_eigenvalues() {
        let e = WalshExpansion::basis(set(&[-2, 1]));
        assert_eq!(e.age_apply().unwrap(), e);
        let e = WalshExpansion::basis(set(&[-3]));
        assert_eq!(e.age_apply().unwrap(), e.scale(c(-3.0)));
        let e = WalshExpansion::basis(WalshIndexSet::empty());
        assert!(matches!(e.age_apply(), Err(Error::AgeUndefinedForEquilibrium)));
        // age zero drops the term entirely
        assert!(WalshExpansion::basis(set(&[0])).age_apply().unwrap().is_zero());
    }

    #[test]
    fn commutation_residual_examples() {
        let e = WalshExpansion::basis(set(&[0]));
        assert_eq!(e.age_commutation_residual(5).unwrap(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = WalshExpansion::from_terms([(set(&[-1]), c(s)), (set(&[2, 3]), c(s))]);
        assert_eq!(e.age_commutation_residual(-4).unwrap(), 0.0);
        let e = WalshExpansion::basis(WalshIndexSet::empty());
        assert!(e.age_commutation_residual(1).is_err());
    }

    #[test]
    fn commutation_by_explicit_composition_with_dyadic_coefficients() {
        // Dyadic coefficients keep every floating-point product and sum exact,
        // so composing the operators literally must also give zero.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        use rand::Rng;
        for _ in 0..200 {
            let terms = (0..rng.random_range(1..20)).map(|_| {
                let k = rng.random_range(1..6);
                let idx: Vec<i64> = (0..k).map(|_| rng.random_range(-16..=16)).collect();
                let mut idx = idx;
                idx.sort_unstable();
                idx.dedup();
                let re = rng.random_range(-512..512) as f64 / 1024.0;
                let im = rng.random_range(-512..512) as f64 / 1024.0;
                (WalshIndexSet::new(idx).unwrap(), Complex64::new(re, im))
            });
            let rho = WalshExpansion::from_terms(terms);
            let n = rng.random_range(-8..=8);
            let lhs = rho.koopman_apply(n).age_apply().unwrap().koopman_apply(-n);
            let rhs = rho.age_apply().unwrap().add(&rho.scale(c(n as f64)));
            assert!(lhs.sub(&rhs).is_zero());
            assert_eq!(rho.age_commutation_residual(n).unwrap(), 0.0);
        }
    }

    #[test]
    fn inner_product_orthonormality() {
        let a = WalshExpansion::basis(set(&[0]));
        let b = WalshExpansion::basis(set(&[1]));
        assert_eq!(a.inner_product(&a), c(1.0));
        assert_eq!(a.inner_product(&b), c(0.0));
        let rho = WalshExpansion::from_terms([(set(&[0]), Complex64::new(1.0, 2.0))]);
        assert_eq!(rho.inner_product(&a), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn text_format_round_trip() {
        let rho = WalshExpansion::from_terms([
            (WalshIndexSet::empty(), Complex64::new(0.1, -0.2)),
            (set(&[-1, 2]), Complex64::new(1.0 / 3.0, 0.0)),
        ]);
        let text = rho.to_text();
        assert!(text.starts_with("F={} "));
        assert!(text.contains("F={-1,2} "));
        let back: WalshExpansion = text.parse().unwrap();
        assert_eq!(back, rho);
        assert!("F={1 1.0 0.0".parse::<WalshExpansion>().is_err());
        assert!("F={1} 1.0".parse::<WalshExpansion>().is_err());
        assert!("F={1,1} 1.0 0.0".parse::<WalshExpansion>().is_err());
    }
}
