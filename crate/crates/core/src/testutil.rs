//! Shared helpers for unit tests: deterministic random field/polynomial/
//! group-element generators.

use alloc::vec::Vec;

use crate::algebra::field::{FieldElem, FieldSpec};
use crate::algebra::poly::Poly;
use crate::rng::SplitMix64;
use crate::tree::GroupElem;

pub(crate) fn f3() -> FieldSpec {
    FieldSpec::prime(3).unwrap()
}

pub(crate) fn random_poly(rng: &mut SplitMix64, max_deg: usize, f: &FieldSpec) -> Poly {
    let deg = rng.below(max_deg as u64 + 1) as usize;
    let coeffs: Vec<FieldElem> = (0..=deg)
        .map(|_| f.from_int(rng.below(f.q()) as i64))
        .collect();
    Poly::from_coeffs(coeffs)
}

/// Random element of SL₂(A) as a word in translations and the inversion.
pub(crate) fn random_sl2a(
    rng: &mut SplitMix64,
    max_deg: usize,
    words: usize,
    f: &FieldSpec,
) -> GroupElem {
    let mut g = GroupElem::identity(f);
    for _ in 0..words {
        let b = random_poly(rng, max_deg, f);
        g = g.mul(&GroupElem::translation(b, f), f);
        if rng.below(2) == 0 {
            g = g.mul(&GroupElem::inversion(f), f);
        }
    }
    g
}
