//! Distance of a symmetric difference from half of a length slice.

use rayon::prelude::*;

use crate::alphabet::Word;
use crate::error::{Error, Result};
use crate::languages::Language;
use crate::linalg::{abs, q, rational_from_usize, Rational};

/// `ℓ(n) = | |(A△B) ∩ Σ^n| / |Σ^n| − 1/2 |`.
pub fn density_ell(a: &Language, b: &Language, n: usize) -> Result<Rational> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(format!("{} and {} differ in alphabet", a.name(), b.name())));
    }
    let words: Vec<Word> = a.alphabet().words(n).collect();
    let differing = words.par_iter().filter(|x| a.contains(x) != b.contains(x)).count();
    Ok(abs(&(rational_from_usize(differing) / rational_from_usize(words.len()) - q(1, 2))))
}

/// `ℓ(n)` for each requested length.
pub fn density_table(
    a: &Language,
    b: &Language,
    lengths: impl IntoIterator<Item = usize>,
) -> Result<Vec<(usize, Rational)>> {
    lengths.into_iter().map(|n| Ok((n, density_ell(a, b, n)?))).collect()
}
