//! Seeded random families used by the experiments and property checks.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baker::{WalshExpansion, WalshIndexSet};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random non-empty index set with entries in `[lo, hi]` and at most
/// `max_len` elements.
pub fn random_index_set<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, max_len: usize) -> WalshIndexSet {
    let len = rng.random_range(1..=max_len);
    let mut v: Vec<i64> = (0..len).map(|_| rng.random_range(lo..=hi)).collect();
    v.sort_unstable();
    v.dedup();
    WalshIndexSet::new(v).expect("deduplicated")
}

/// Random mean-zero expansion with between 1 and `max_terms` terms drawn from
/// index sets in `[lo, hi]` and standard-normal-ish complex coefficients.
pub fn random_expansion<R: Rng + ?Sized>(rng: &mut R, max_terms: usize, lo: i64, hi: i64) -> WalshExpansion {
    let count = rng.random_range(1..=max_terms);
    let mut e = WalshExpansion::zero();
    while e.len() < count {
        let f = random_index_set(rng, lo, hi, 6);
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        e.add_term(f, c);
    }
    e
}

/// Random expansion whose terms all have age `>= 1`.
pub fn random_plus_expansion<R: Rng + ?Sized>(rng: &mut R, max_terms: usize, lo: i64, hi: i64) -> WalshExpansion {
    assert!(hi >= 1, "plus expansions need indices >= 1");
    let raw = random_expansion(rng, max_terms, lo, hi);
    WalshExpansion::from_terms(raw.terms().map(|(f, &c)| {
        if crate::hardy_discrete::is_plus(f) {
            (f.clone(), c)
        } else {
            let mut idx = f.indices().to_vec();
            idx.push(rng.random_range(1..=hi));
            idx.sort_unstable();
            idx.dedup();
            (WalshIndexSet::new(idx).expect("deduplicated"), c)
        }
    }))
}
