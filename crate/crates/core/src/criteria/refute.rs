//! Refutation procedures: given a candidate recognizer, follow the basis
//! argument to a concrete input the candidate gets wrong.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::advice::{advised_prob, AdviceFunction};
use crate::alphabet::{sym, Alphabet, Word};
use crate::automata::{classify, AcceptanceMode, Classification};
use crate::error::{Error, Result};
use crate::languages::{dup, ip_star, Language};
use crate::linalg::{q, Rational};

use super::certificate::{cequal_certificate, plin_certificate, BasisRule};
use super::gf2::{bits, gf2_solve, reversed_dot, word_of_bits};
use super::MachineAt;

/// A misclassified input, confirmed by evaluating the candidate directly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    #[serde(with = "crate::alphabet::serde_word")]
    pub input: Word,
    #[serde(with = "crate::linalg::serde_rational")]
    pub probability: Rational,
    /// Membership in the target language.
    pub member: bool,
    pub verdict: Classification,
    pub mode: String,
}

/// Which step of the argument exposed the candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// The candidate already errs on an input built from a basis prefix.
    BasisMisclassified,
    /// The candidate is right on all basis inputs, and the expansion then
    /// forces a wrong verdict elsewhere.
    ForcedByBasis,
}

fn confirm<M: MachineAt + ?Sized>(
    m: &M,
    h: &AdviceFunction,
    input: Word,
    member: bool,
    mode: &AcceptanceMode,
) -> Result<Counterexample> {
    let pfa = m.at_length(input.len())?;
    let probability = advised_prob(pfa.as_ref(), h, &input)?;
    let verdict = classify(&probability, mode);
    let wanted = if member { Classification::Member } else { Classification::NonMember };
    if verdict == wanted {
        return Err(Error::VerificationGap(format!(
            "`{}` is classified correctly on direct evaluation",
            crate::alphabet::render(&input)
        )));
    }
    Ok(Counterexample { input, probability, member, verdict, mode: mode.to_string() })
}

fn concat(a: &[crate::alphabet::Symbol], b: &[crate::alphabet::Symbol]) -> Word {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    w
}

/// Trace of a refutation of an exact-half recognizer for the complement of
/// `Dup`.
#[derive(Clone, Debug, Serialize)]
pub struct CequalRefutation {
    pub states: usize,
    pub n: usize,
    #[serde(with = "crate::alphabet::serde_word")]
    pub z: Word,
    #[serde(with = "crate::alphabet::serde_word")]
    pub y: Word,
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub basis: Vec<Word>,
    /// Expansion of the vector of `y` over the basis.
    #[serde(with = "crate::linalg::serde_rational::vec")]
    pub coefficients: Vec<Rational>,
    /// `p(wy)` for each basis prefix `w`.
    #[serde(with = "crate::linalg::serde_rational::vec")]
    pub basis_probabilities: Vec<Rational>,
    pub kind: FailureKind,
    pub counterexample: Counterexample,
}

/// Runs the exact-half argument against a candidate for `co-Dup`: with
/// `m = |Q|`, take the least even `n` with `2^{n/2} − 1 > m + 1`,
/// `z = 1^{n/2}`, the certificate basis `S ⊆ A_{n,z}` and some
/// `y ∉ S ∪ {z}`. Either some `wy` (`w ∈ S`, a member) is not at 1/2, or
/// `yy` (a non-member) is forced to 1/2.
pub fn refute_cequal_complement_dup<M: MachineAt + ?Sized>(m: &M, h: &AdviceFunction) -> Result<CequalRefutation> {
    let states = m.state_count();
    let mut half = 1usize;
    while (1u128 << half) - 1 <= states as u128 + 1 {
        half += 1;
    }
    let n = 2 * half;
    let z = vec![sym("1"); half];
    let lang = Language::dup().complement();
    let cert = cequal_certificate(m, h, n, half, &z, &lang)?;
    let basis = cert.basis_words();
    let y = Alphabet::binary()
        .words(half)
        .find(|w| *w != z && !basis.contains(w))
        .ok_or_else(|| Error::VerificationGap("no suffix outside S ∪ {z}".into()))?;
    let y_index = cert.prefixes.iter().position(|w| *w == y).expect("y ∈ A_{n,z}");
    let coefficients = cert.coefficients[y_index].clone();

    let mode = AcceptanceMode::ExactHalf;
    let pfa = m.at_length(n)?;
    let mut basis_probabilities = Vec::with_capacity(basis.len());
    for w in &basis {
        basis_probabilities.push(advised_prob(pfa.as_ref(), h, &concat(w, &y))?);
    }
    let half_p = q(1, 2);
    let (kind, input) = match basis.iter().zip(&basis_probabilities).find(|(_, p)| **p != half_p) {
        Some((w, _)) => (FailureKind::BasisMisclassified, concat(w, &y)),
        None => (FailureKind::ForcedByBasis, concat(&y, &y)),
    };
    let member = !dup(&input);
    let counterexample = confirm(m, h, input, member, &mode)?;
    Ok(CequalRefutation { states, n, z, y, basis, coefficients, basis_probabilities, kind, counterexample })
}

/// Search limits for [`refute_plin_ipstar`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlinSearch {
    /// First half-length `ℓ = n/2` tried; defaults to the state count (at
    /// least 2).
    pub start_half: Option<usize>,
    /// Further half-lengths tried when no usable `x` exists.
    pub extra_halves: usize,
    /// Largest allowed `|T| = 2^m`.
    pub budget: usize,
}

impl Default for PlinSearch {
    fn default() -> Self {
        PlinSearch { start_half: None, extra_halves: 4, budget: 4096 }
    }
}

/// Trace of a refutation of an unbounded-error recognizer for `IP*`.
#[derive(Clone, Debug, Serialize)]
pub struct PlinRefutation {
    pub n: usize,
    #[serde(with = "crate::linalg::serde_rational")]
    pub theta: Rational,
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub basis: Vec<Word>,
    /// `T`: the suffix `y_r` for each pattern `r`, as `(r, y_r)`.
    pub suffix_table: Vec<(String, String)>,
    #[serde(with = "crate::alphabet::serde_word")]
    pub x: Word,
    #[serde(with = "crate::linalg::serde_rational::vec")]
    pub coefficients: Vec<Rational>,
    #[serde(with = "crate::alphabet::serde_word")]
    pub y: Word,
    #[serde(with = "crate::alphabet::serde_word")]
    pub y_prime: Word,
    /// `β_{i,y}` and `β_{i,y'}` on the adjusted machine.
    #[serde(with = "crate::linalg::serde_rational::vec")]
    pub margins_y: Vec<Rational>,
    #[serde(with = "crate::linalg::serde_rational::vec")]
    pub margins_y_prime: Vec<Rational>,
    pub kind: FailureKind,
    pub counterexample: Counterexample,
}

/// Runs the unbounded-error argument against a candidate for `IP*` at
/// `n = 2ℓ`. The basis is chosen among prefixes whose bit strings are
/// independent over GF(2), so that a suffix `y_r` with `w_i^R ⊙ y_r ≡ r_i`
/// exists for every pattern `r`. A prefix `x` in the span with
/// `x^R ⊙ y_r ≡ 0` for all `r` makes `xy` and `xy'` members, where `y`, `y'`
/// realize the sign pattern of the expansion of `x` and its negation; the
/// expansion forces `xy'` below 1/2 unless some basis input is already
/// misclassified. When no such `x` exists, `ℓ` is increased.
pub fn refute_plin_ipstar<M: MachineAt + ?Sized>(
    m: &M,
    h: &AdviceFunction,
    search: &PlinSearch,
) -> Result<PlinRefutation> {
    let start = search.start_half.unwrap_or_else(|| m.state_count().max(2));
    let mode = AcceptanceMode::UnboundedError;
    let half_p = q(1, 2);
    for half in start..=start + search.extra_halves {
        let n = 2 * half;
        let cert = plin_certificate(m, h, n, half, BasisRule::Gf2Independent)?;
        let basis_words = cert.basis_words();
        let ws: Vec<Vec<bool>> = basis_words.iter().map(|w| bits(w).expect("binary prefix")).collect();
        let count = 1usize
            .checked_shl(ws.len() as u32)
            .filter(|&c| c <= search.budget)
            .ok_or_else(|| Error::ScaleLimit(format!("|T| = 2^{} exceeds {}", ws.len(), search.budget)))?;
        let mut table = Vec::with_capacity(count);
        for code in 0..count {
            let r: Vec<bool> = (0..ws.len()).map(|i| code >> (ws.len() - 1 - i) & 1 == 1).collect();
            let y = gf2_solve(&ws, &r)?
                .ok_or_else(|| Error::VerificationGap("independent rows without a solution".into()))?;
            table.push((r, y));
        }
        let found = cert.prefixes.iter().enumerate().find(|(k, x)| {
            let xb = bits(x).expect("binary prefix");
            cert.coefficients[*k].is_some() && table.iter().all(|(_, y)| !reversed_dot(&xb, y))
        });
        let Some((k, x)) = found else { continue };
        let alpha = cert.coefficients[k].clone().expect("expressible");
        let r_plus: Vec<bool> = alpha.iter().map(|a| *a >= Rational::zero()).collect();
        let r_minus: Vec<bool> = r_plus.iter().map(|b| !b).collect();
        let lookup = |r: &[bool]| table.iter().find(|(p, _)| p == r).map(|(_, y)| word_of_bits(y)).expect("pattern in T");
        let (y, y_prime) = (lookup(&r_plus), lookup(&r_minus));
        let index: HashMap<&Word, usize> = cert.suffixes.iter().enumerate().map(|(j, s)| (s, j)).collect();
        let (jy, jy2) = (index[&y], index[&y_prime]);
        let margins_y: Vec<Rational> = cert.margins.iter().map(|row| row[jy].clone()).collect();
        let margins_y_prime: Vec<Rational> = cert.margins.iter().map(|row| row[jy2].clone()).collect();

        let mut wrong_basis = None;
        'outer: for (&b, w) in cert.basis.iter().zip(&basis_words) {
            for &j in &[jy, jy2] {
                let input = concat(w, &cert.suffixes[j]);
                let accepted = *cert.original_probability(b, j) > half_p;
                if accepted != ip_star(&input) {
                    wrong_basis = Some(input);
                    break 'outer;
                }
            }
        }
        let (kind, input) = match wrong_basis {
            Some(input) => (FailureKind::BasisMisclassified, input),
            None => (FailureKind::ForcedByBasis, concat(x, &y_prime)),
        };
        let member = ip_star(&input);
        let counterexample = confirm(m, h, input, member, &mode)?;
        let suffix_table = table
            .iter()
            .map(|(r, y)| {
                let r: String = r.iter().map(|&b| if b { '1' } else { '0' }).collect();
                (r, crate::alphabet::render(&word_of_bits(y)))
            })
            .collect();
        return Ok(PlinRefutation {
            n,
            theta: cert.theta.clone(),
            basis: basis_words,
            suffix_table,
            x: x.clone(),
            coefficients: alpha,
            y,
            y_prime,
            margins_y,
            margins_y_prime,
            kind,
            counterexample,
        });
    }
    Err(Error::VerificationGap(format!(
        "no prefix orthogonal to T in the span for ℓ in {start}..={}",
        start + search.extra_halves
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cequal_candidates, plin_candidates};

    #[test]
    fn every_cequal_candidate_is_refuted() {
        for c in cequal_candidates().unwrap() {
            let r = refute_cequal_complement_dup(c.machine.as_ref(), &c.advice).unwrap_or_else(|e| panic!("{}: {e}", c.name));
            assert_eq!(r.counterexample.member, !dup(&r.counterexample.input), "{}", c.name);
            if c.name == "dup-uniform" {
                assert_eq!(r.kind, FailureKind::BasisMisclassified);
            }
            if c.name == "universal-fixed" || c.name == "coin" {
                assert_eq!(r.kind, FailureKind::ForcedByBasis);
            }
        }
    }

    #[test]
    fn every_plin_candidate_is_refuted() {
        for c in plin_candidates().unwrap() {
            let r = refute_plin_ipstar(c.machine.as_ref(), &c.advice, &PlinSearch::default())
                .unwrap_or_else(|e| panic!("{}: {e}", c.name));
            assert_eq!(r.counterexample.member, ip_star(&r.counterexample.input), "{}", c.name);
            assert_eq!(r.suffix_table.len(), 1 << r.basis.len());
        }
    }

    #[test]
    fn scale_limit_is_reported() {
        let c = plin_candidates().unwrap().pop().unwrap();
        let tight = PlinSearch { budget: 1, ..PlinSearch::default() };
        assert!(matches!(refute_plin_ipstar(c.machine.as_ref(), &c.advice, &tight), Err(Error::ScaleLimit(_))));
    }
}
