//! Basis certificates: a maximal independent set of post-prefix state
//! vectors with exact expansions of every other prefix over it.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::advice::AdviceFunction;
use crate::alphabet::{Alphabet, Symbol, TrackSymbol, Word};
use crate::automata::{always_accept, Pfa};
use crate::constructions::{flip_finals, mixture};
use crate::error::{Error, Result};
use crate::languages::Language;
use crate::linalg::{q, BasisBuilder, Rational, RowVector};

use super::gf2::{bits, Gf2Basis};
use super::{MachineAt, SplitEvaluator};

/// Evidence for the exact-half basis criterion at one context `(n, ℓ, z)`.
#[derive(Clone, Debug, Serialize)]
pub struct BasisCertificate {
    pub n: usize,
    pub ell: usize,
    #[serde(with = "crate::alphabet::serde_word")]
    pub suffix: Word,
    #[serde(with = "crate::alphabet::serde_word")]
    pub advice: Word,
    /// `A_{n,z} = {w : wz ∈ A, |w| = n−ℓ}` in enumeration order.
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub prefixes: Vec<Word>,
    /// Indices into `prefixes` of the basis `S`.
    pub basis: Vec<usize>,
    /// `coefficients[k][b]`: weight of `basis[b]` in the vector of prefix `k`.
    #[serde(with = "crate::linalg::serde_rational::nested")]
    pub coefficients: Vec<Vec<Rational>>,
    /// Whether every expansion has coefficient sum exactly 1.
    pub sums_to_one: bool,
    #[serde(skip)]
    pub(crate) vectors: Vec<RowVector<Rational>>,
    #[serde(skip)]
    pub(crate) machine: Option<Arc<Pfa>>,
}

impl BasisCertificate {
    pub fn basis_words(&self) -> Vec<Word> {
        self.basis.iter().map(|&i| self.prefixes[i].clone()).collect()
    }

    /// Recomputes every expansion and its coefficient sum.
    pub fn check(&self) -> Result<bool> {
        check_expansions(&self.vectors, &self.basis, self.coefficients.iter().map(Some))
    }

    fn evaluator(&self) -> Result<SplitEvaluator> {
        let machine = self.machine.clone().ok_or_else(|| Error::DegenerateContext("certificate without machine".into()))?;
        let h = AdviceFunction::single(advice_alphabet(&machine)?, self.n, self.advice.clone());
        SplitEvaluator::new(machine, &h, self.n, self.ell)
    }
}

fn advice_alphabet(m: &Pfa) -> Result<Alphabet> {
    let mut lowers = Vec::new();
    for c in m.alphabet().symbols() {
        let l = TrackSymbol::parse(c)
            .and_then(|t| t.lower)
            .ok_or_else(|| Error::MalformedMachine(format!("`{c}` is not a two-track cell")))?;
        if !lowers.contains(&l) {
            lowers.push(l);
        }
    }
    Alphabet::new(lowers)
}

fn check_expansions<'a>(
    vectors: &[RowVector<Rational>],
    basis: &[usize],
    coefficients: impl Iterator<Item = Option<&'a Vec<Rational>>>,
) -> Result<bool> {
    let dim = vectors.first().map_or(0, RowVector::dim);
    for (v, c) in vectors.iter().zip(coefficients) {
        let Some(c) = c else { continue };
        let mut acc = RowVector::zeros(dim);
        for (&b, a) in basis.iter().zip(c) {
            acc = acc.add(&vectors[b].scale(a))?;
        }
        if acc != *v || c.iter().fold(Rational::zero(), |s, a| s + a) != Rational::one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Builds the certificate for `A_{n,z}` from the machine's state vectors after
/// `¢⟨w,r⟩`, `h(n) = rs`, `|r| = n−ℓ`.
pub fn cequal_certificate<M: MachineAt + ?Sized>(
    m: &M,
    h: &AdviceFunction,
    n: usize,
    ell: usize,
    z: &[Symbol],
    lang: &Language,
) -> Result<BasisCertificate> {
    if ell == 0 || ell >= n || z.len() != ell {
        return Err(Error::DegenerateContext(format!("need 0 < ℓ = |z| < n, got ℓ = {ell}, |z| = {}, n = {n}", z.len())));
    }
    let pfa = m.at_length(n)?;
    let eval = SplitEvaluator::new(pfa.clone(), h, n, ell)?;
    let prefixes: Vec<Word> = lang
        .alphabet()
        .words(n - ell)
        .filter(|w| {
            let mut wz = w.clone();
            wz.extend_from_slice(z);
            lang.contains(&wz)
        })
        .collect();
    if prefixes.is_empty() {
        return Err(Error::DegenerateContext("A_{n,z} is empty".into()));
    }
    let vectors = prefixes.iter().map(|w| eval.prefix(w)).collect::<Result<Vec<_>>>()?;
    let extraction = crate::linalg::basis_extract(&vectors)?;
    let sums_to_one = extraction
        .coefficients
        .iter()
        .all(|c| c.iter().fold(Rational::zero(), |s, a| s + a).is_one());
    Ok(BasisCertificate {
        n,
        ell,
        suffix: z.to_vec(),
        advice: eval.advice(),
        prefixes,
        basis: extraction.basis,
        coefficients: extraction.coefficients,
        sums_to_one,
        vectors,
        machine: Some(pfa),
    })
}

/// Result of checking the basis implication for one suffix `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImplicationOutcome {
    #[serde(with = "crate::alphabet::serde_word")]
    pub y: Word,
    /// Whether every `wy`, `w ∈ S`, is accepted with probability exactly 1/2.
    pub antecedent: bool,
    pub holds: bool,
    /// Prefixes `x ∈ A_{n,z}` with `p(xy) ≠ 1/2` although the antecedent holds.
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub violations: Vec<Word>,
}

/// If `p(wy) = 1/2` for all `w ∈ S`, then `p(xy) = 1/2` for every
/// `x ∈ A_{n,z}`; membership is decided by exact evaluation of the machine
/// stored in the certificate.
pub fn cequal_implication_test(cert: &BasisCertificate, y: &[Symbol]) -> Result<ImplicationOutcome> {
    if y.len() != cert.ell {
        return Err(Error::DegenerateContext(format!("suffix of length {} for ℓ = {}", y.len(), cert.ell)));
    }
    let mut eval = cert.evaluator()?;
    let column = eval.suffix(y)?;
    let half = q(1, 2);
    let at_half = |k: usize| -> Result<bool> {
        let v = if let Some(v) = cert.vectors.get(k) { v.clone() } else { eval.prefix(&cert.prefixes[k])? };
        Ok(v.dot(&column)? == half)
    };
    let mut antecedent = true;
    for &b in &cert.basis {
        if !at_half(b)? {
            antecedent = false;
            break;
        }
    }
    let mut violations = Vec::new();
    if antecedent {
        for (k, x) in cert.prefixes.iter().enumerate() {
            if !at_half(k)? {
                violations.push(x.clone());
            }
        }
    }
    Ok(ImplicationOutcome { y: y.to_vec(), antecedent, holds: violations.is_empty(), violations })
}

/// How a PLIN certificate selects its basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisRule {
    /// Every prefix independent of the earlier ones joins.
    Greedy,
    /// A prefix joins only if, in addition, its bit string is non-zero and
    /// independent over GF(2) of the bit strings already chosen.
    Gf2Independent,
}

/// Evidence for the unbounded-error basis criterion, on the machine
/// adjusted so that no input has probability exactly 1/2.
#[derive(Clone, Debug, Serialize)]
pub struct PlinCertificate {
    pub n: usize,
    pub ell: usize,
    pub rule: BasisRule,
    #[serde(with = "crate::alphabet::serde_word")]
    pub advice: Word,
    /// Weight of the always-rejecting component mixed into the candidate.
    #[serde(with = "crate::linalg::serde_rational")]
    pub theta: Rational,
    /// `Σ^{n−ℓ}` in enumeration order.
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub prefixes: Vec<Word>,
    pub basis: Vec<usize>,
    /// Expansion per prefix; absent when the prefix lies outside the span
    /// (possible only under [`BasisRule::Gf2Independent`]).
    #[serde(serialize_with = "serialize_optional_rows")]
    pub coefficients: Vec<Option<Vec<Rational>>>,
    pub sums_to_one: bool,
    /// `Σ^ℓ` in enumeration order.
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub suffixes: Vec<Word>,
    /// `margins[i][j] = p(w_i y_j) − 1/2` on the adjusted machine.
    #[serde(with = "crate::linalg::serde_rational::nested")]
    pub margins: Vec<Vec<Rational>>,
    #[serde(skip)]
    pub(crate) vectors: Vec<RowVector<Rational>>,
    #[serde(skip)]
    pub(crate) probabilities: Vec<Vec<Rational>>,
}

fn serialize_optional_rows<S: serde::Serializer>(
    rows: &[Option<Vec<Rational>>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        seq.serialize_element(&row.as_ref().map(|r| r.iter().map(Rational::to_string).collect::<Vec<_>>()))?;
    }
    seq.end()
}

impl PlinCertificate {
    pub fn basis_words(&self) -> Vec<Word> {
        self.basis.iter().map(|&i| self.prefixes[i].clone()).collect()
    }

    pub fn check(&self) -> Result<bool> {
        check_expansions(&self.vectors, &self.basis, self.coefficients.iter().map(Option::as_ref))
    }

    /// Acceptance probability of the unadjusted candidate on
    /// `prefixes[i] · suffixes[j]`.
    pub fn original_probability(&self, i: usize, j: usize) -> &Rational {
        &self.probabilities[i][j]
    }

    /// `p'(xy) = (1−θ) p(xy)` on the adjusted machine.
    pub fn adjusted_probability(&self, i: usize, j: usize) -> Rational {
        (Rational::one() - &self.theta) * &self.probabilities[i][j]
    }
}

/// Largest `θ = 2^{-k}`, `k ≥ 1`, with `(1−θ) p > 1/2` whenever `p > 1/2`.
fn adjustment(probabilities: &[Vec<Rational>]) -> Result<Rational> {
    let half = q(1, 2);
    let least = probabilities.iter().flatten().filter(|p| **p > half).min();
    let Some(least) = least else {
        return Ok(q(1, 2));
    };
    let mut theta = q(1, 2);
    for _ in 0..1024 {
        if (Rational::one() - &theta) * least > half {
            return Ok(theta);
        }
        theta /= Rational::from_integer(2.into());
    }
    Err(Error::AdjustmentFailure(format!("no θ = 2^-k with k ≤ 1024 keeps {least} above 1/2")))
}

/// Builds the unbounded-error certificate over all of `Σ^{n−ℓ}`. The
/// candidate is first mixed with an always-rejecting machine of weight `θ`
/// so that no input of length `n` has probability exactly 1/2 while every
/// verdict is kept.
pub fn plin_certificate<M: MachineAt + ?Sized>(
    m: &M,
    h: &AdviceFunction,
    n: usize,
    ell: usize,
    rule: BasisRule,
) -> Result<PlinCertificate> {
    if ell == 0 || ell >= n {
        return Err(Error::DegenerateContext(format!("need 0 < ℓ < n, got ℓ = {ell}, n = {n}")));
    }
    let pfa = m.at_length(n)?;
    let sigma = pfa.alphabet().upper_alphabet()?;
    let prefixes: Vec<Word> = sigma.words(n - ell).collect();
    let suffixes: Vec<Word> = sigma.words(ell).collect();

    let mut original = SplitEvaluator::new(pfa.clone(), h, n, ell)?;
    let columns = suffixes.iter().map(|y| original.suffix(y)).collect::<Result<Vec<_>>>()?;
    let probabilities = prefixes
        .iter()
        .map(|w| {
            let v = original.prefix(w)?;
            columns.iter().map(|c| v.dot(c)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let theta = adjustment(&probabilities)?;

    let reject = flip_finals(&always_accept(pfa.alphabet().clone()));
    let adjusted = Arc::new(mixture(&[(Rational::one() - &theta, &pfa), (theta.clone(), &reject)])?);
    let mut eval = SplitEvaluator::new(adjusted, h, n, ell)?;
    let vectors = prefixes.iter().map(|w| eval.prefix(w)).collect::<Result<Vec<_>>>()?;

    let dim = vectors.first().map_or(0, RowVector::dim);
    let mut builder = BasisBuilder::new(dim);
    let mut field = Gf2Basis::new();
    for (i, (w, v)) in prefixes.iter().zip(&vectors).enumerate() {
        match rule {
            BasisRule::Greedy => {
                builder.insert(i, v)?;
            }
            BasisRule::Gf2Independent => {
                let b = bits(w).ok_or_else(|| Error::DegenerateContext("GF(2) rule needs a binary alphabet".into()))?;
                if field.is_independent(&b) && builder.express(v)?.is_none() {
                    builder.insert(i, v)?;
                    field.insert(&b);
                }
            }
        }
    }
    let coefficients = vectors.iter().map(|v| builder.express(v)).collect::<Result<Vec<_>>>()?;
    let sums_to_one = coefficients
        .iter()
        .flatten()
        .all(|c| c.iter().fold(Rational::zero(), |s, a| s + a).is_one());
    let basis = builder.members().to_vec();

    let adjusted_columns = suffixes.iter().map(|y| eval.suffix(y)).collect::<Result<Vec<_>>>()?;
    let half = q(1, 2);
    let margins = basis
        .iter()
        .map(|&b| {
            adjusted_columns
                .iter()
                .map(|c| Ok(vectors[b].dot(c)? - &half))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlinCertificate {
        n,
        ell,
        rule,
        advice: original.advice(),
        theta,
        prefixes,
        basis,
        coefficients,
        sums_to_one,
        suffixes,
        margins,
        vectors,
        probabilities,
    })
}
