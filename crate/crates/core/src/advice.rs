//! Deterministic advice functions, randomized advice ensembles and exhaustive
//! recognition checks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::{track_word, Alphabet, Symbol, Word};
use crate::automata::{classify, AcceptanceMode, Classification, Machine};
use crate::error::{Error, Result};
use crate::languages::Language;
use crate::linalg::{rational_from_usize, Rational};

/// Allowed advice length as a function of the input length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthPolicy {
    /// `|h(n)| = n`
    Exact,
    /// `|h(n)| ≤ c·n + d`
    Linear { c: usize, d: usize },
}

impl LengthPolicy {
    pub fn admits(&self, n: usize, len: usize) -> bool {
        match *self {
            LengthPolicy::Exact => len == n,
            LengthPolicy::Linear { c, d } => len <= c * n + d,
        }
    }

    fn check(&self, n: usize, len: usize) -> Result<()> {
        if self.admits(n, len) {
            Ok(())
        } else {
            Err(Error::AdvicePolicy { n, len })
        }
    }
}

impl fmt::Display for LengthPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthPolicy::Exact => f.write_str("exact"),
            LengthPolicy::Linear { c, d } => write!(f, "linear({c},{d})"),
        }
    }
}

type WordFn = dyn Fn(usize) -> Word + Send + Sync;

#[derive(Clone)]
enum AdviceSource {
    Table(BTreeMap<usize, Word>),
    Generator(Arc<WordFn>),
}

/// A deterministic advice function `h : ℕ → Γ*`.
#[derive(Clone)]
pub struct AdviceFunction {
    alphabet: Alphabet,
    policy: LengthPolicy,
    source: AdviceSource,
}

impl fmt::Debug for AdviceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdviceFunction")
            .field("alphabet", &self.alphabet)
            .field("policy", &self.policy)
            .finish_non_exhaustive()
    }
}

impl AdviceFunction {
    pub fn from_fn(
        alphabet: Alphabet,
        policy: LengthPolicy,
        f: impl Fn(usize) -> Word + Send + Sync + 'static,
    ) -> Self {
        AdviceFunction {
            alphabet,
            policy,
            source: AdviceSource::Generator(Arc::new(f)),
        }
    }

    /// Advice defined only on the tabulated lengths.
    pub fn tabulated(alphabet: Alphabet, policy: LengthPolicy, table: BTreeMap<usize, Word>) -> Self {
        AdviceFunction {
            alphabet,
            policy,
            source: AdviceSource::Table(table),
        }
    }

    /// The advice function with `h(n) = w` for the single length `n`.
    pub fn single(alphabet: Alphabet, n: usize, w: Word) -> Self {
        AdviceFunction::tabulated(alphabet, LengthPolicy::Exact, BTreeMap::from([(n, w)]))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn policy(&self) -> LengthPolicy {
        self.policy
    }

    /// `h(n)`, checked against the alphabet and the length policy.
    pub fn advice(&self, n: usize) -> Result<Word> {
        let w = match &self.source {
            AdviceSource::Table(t) => t.get(&n).cloned().ok_or(Error::AdviceUndefined(n))?,
            AdviceSource::Generator(f) => f(n),
        };
        self.alphabet.check_word(&w)?;
        self.policy.check(n, w.len())?;
        Ok(w)
    }

    /// Lengths with explicit entries; `None` for generated advice.
    pub fn table_lengths(&self) -> Option<Vec<usize>> {
        match &self.source {
            AdviceSource::Table(t) => Some(t.keys().copied().collect()),
            AdviceSource::Generator(_) => None,
        }
    }

    /// Snapshot of the given lengths as a table.
    pub fn tabulate(&self, lengths: impl IntoIterator<Item = usize>) -> Result<AdviceFunction> {
        let table = lengths
            .into_iter()
            .map(|n| Ok((n, self.advice(n)?)))
            .collect::<Result<_>>()?;
        Ok(AdviceFunction::tabulated(self.alphabet.clone(), self.policy, table))
    }
}

/// A finite-support distribution over strings of one common length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    #[serde(serialize_with = "serialize_support")]
    support: Vec<(Word, Rational)>,
    #[serde(skip)]
    length: usize,
}

fn serialize_support<S: serde::Serializer>(
    support: &[(Word, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(support.len()))?;
    for (w, p) in support {
        seq.serialize_element(&(crate::alphabet::render(w), p.to_string()))?;
    }
    seq.end()
}

impl Distribution {
    /// Merges repeated strings and drops zero weights. The weights must be
    /// non-negative and sum to exactly 1.
    pub fn new(entries: Vec<(Word, Rational)>) -> Result<Self> {
        let Some(length) = entries.first().map(|(w, _)| w.len()) else {
            return Err(Error::InvalidDistribution("empty support".into()));
        };
        let mut merged: BTreeMap<Word, Rational> = BTreeMap::new();
        let mut order = Vec::new();
        for (w, p) in entries {
            if p < Rational::zero() {
                return Err(Error::InvalidDistribution(format!("negative weight {p}")));
            }
            if w.len() != length {
                return Err(Error::InvalidDistribution(format!(
                    "support strings of lengths {length} and {}",
                    w.len()
                )));
            }
            match merged.get_mut(&w) {
                Some(q) => *q += p,
                None => {
                    order.push(w.clone());
                    merged.insert(w, p);
                }
            }
        }
        let total = merged.values().fold(Rational::zero(), |a, p| a + p);
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        let support = order
            .into_iter()
            .filter_map(|w| {
                let p = merged.remove(&w)?;
                (!p.is_zero()).then_some((w, p))
            })
            .collect();
        Ok(Distribution { support, length })
    }

    pub fn point(w: Word) -> Self {
        Distribution {
            length: w.len(),
            support: vec![(w, Rational::one())],
        }
    }

    pub fn uniform(ws: Vec<Word>) -> Result<Self> {
        if ws.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let p = Rational::one() / rational_from_usize(ws.len());
        Distribution::new(ws.into_iter().map(|w| (w, p.clone())).collect())
    }

    pub fn support(&self) -> &[(Word, Rational)] {
        &self.support
    }

    /// Common length of the support strings.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn probability(&self, w: &[Symbol]) -> Rational {
        self.support
            .iter()
            .find(|(y, _)| y.as_slice() == w)
            .map_or_else(Rational::zero, |(_, p)| p.clone())
    }

    /// `α·self + (1−α)·other`.
    pub fn mix(&self, other: &Distribution, alpha: &Rational) -> Result<Distribution> {
        if *alpha < Rational::zero() || *alpha > Rational::one() {
            return Err(Error::InvalidDistribution(format!("mixing weight {alpha}")));
        }
        let beta = Rational::one() - alpha;
        let entries = self
            .support
            .iter()
            .map(|(w, p)| (w.clone(), p * alpha))
            .chain(other.support.iter().map(|(w, p)| (w.clone(), p * &beta)))
            .collect();
        Distribution::new(entries)
    }
}

type DistFn = dyn Fn(usize) -> Result<Distribution> + Send + Sync;

/// Randomized advice: one distribution `D_n` per input length.
pub struct AdviceEnsemble {
    alphabet: Alphabet,
    policy: LengthPolicy,
    source: EnsembleSource,
    cache: Mutex<HashMap<usize, Arc<Distribution>>>,
}

#[derive(Clone)]
enum EnsembleSource {
    Table(BTreeMap<usize, Distribution>),
    Generator(Arc<DistFn>),
}

impl Clone for AdviceEnsemble {
    fn clone(&self) -> Self {
        AdviceEnsemble {
            alphabet: self.alphabet.clone(),
            policy: self.policy,
            source: self.source.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for AdviceEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdviceEnsemble")
            .field("alphabet", &self.alphabet)
            .field("policy", &self.policy)
            .finish_non_exhaustive()
    }
}

impl AdviceEnsemble {
    pub fn from_fn(
        alphabet: Alphabet,
        policy: LengthPolicy,
        f: impl Fn(usize) -> Result<Distribution> + Send + Sync + 'static,
    ) -> Self {
        AdviceEnsemble {
            alphabet,
            policy,
            source: EnsembleSource::Generator(Arc::new(f)),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn tabulated(alphabet: Alphabet, policy: LengthPolicy, table: BTreeMap<usize, Distribution>) -> Self {
        AdviceEnsemble {
            alphabet,
            policy,
            source: EnsembleSource::Table(table),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Point masses on `h(n)`.
    pub fn from_advice(h: &AdviceFunction) -> Self {
        let h = h.clone();
        AdviceEnsemble::from_fn(h.alphabet().clone(), h.policy(), move |n| {
            Ok(Distribution::point(h.advice(n)?))
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn policy(&self) -> LengthPolicy {
        self.policy
    }

    pub fn table_lengths(&self) -> Option<Vec<usize>> {
        match &self.source {
            EnsembleSource::Table(t) => Some(t.keys().copied().collect()),
            EnsembleSource::Generator(_) => None,
        }
    }

    /// `D_n`, checked against the alphabet and the length policy.
    pub fn at(&self, n: usize) -> Result<Arc<Distribution>> {
        if let Some(d) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(d.clone());
        }
        let d = match &self.source {
            EnsembleSource::Table(t) => t.get(&n).cloned().ok_or(Error::AdviceUndefined(n))?,
            EnsembleSource::Generator(f) => f(n)?,
        };
        for (w, _) in d.support() {
            self.alphabet.check_word(w)?;
        }
        if !self.policy.admits(n, d.length()) {
            return Err(Error::SupportLength {
                n,
                expected: if self.policy == LengthPolicy::Exact { n } else { d.length() },
                found: d.length(),
            });
        }
        let d = Arc::new(d);
        self.cache.lock().expect("cache lock").insert(n, d.clone());
        Ok(d)
    }

    pub fn tabulate(&self, lengths: impl IntoIterator<Item = usize>) -> Result<AdviceEnsemble> {
        let table = lengths
            .into_iter()
            .map(|n| Ok((n, (*self.at(n)?).clone())))
            .collect::<Result<_>>()?;
        Ok(AdviceEnsemble::tabulated(self.alphabet.clone(), self.policy, table))
    }
}

fn run_tracked<M: Machine + ?Sized>(m: &M, x: &[Symbol], y: &[Symbol]) -> Result<Rational> {
    let w = track_word(x, y)?;
    if let Some(cell) = w.iter().find(|c| !m.alphabet().contains(c)) {
        return Err(Error::AlphabetMismatch(format!(
            "cell {cell} is not in the machine's alphabet"
        )));
    }
    m.accept_prob(&w)
}

/// Probability that `m` accepts `⟨x, h(|x|)⟩`.
pub fn advised_prob<M: Machine + ?Sized>(m: &M, h: &AdviceFunction, x: &[Symbol]) -> Result<Rational> {
    run_tracked(m, x, &h.advice(x.len())?)
}

/// `Σ_y D_n(y) · p(⟨x, y⟩)` with `n = |x|`.
pub fn randomized_advised_prob<M: Machine + ?Sized>(
    m: &M,
    d: &AdviceEnsemble,
    x: &[Symbol],
) -> Result<Rational> {
    let dist = d.at(x.len())?;
    dist.support().iter().try_fold(Rational::zero(), |acc, (y, p)| {
        Ok(acc + p * run_tracked(m, x, y)?)
    })
}

/// Either kind of advice, or none for machines that read the input alone.
#[derive(Clone, Copy, Debug)]
pub enum Advice<'a> {
    None,
    Deterministic(&'a AdviceFunction),
    Randomized(&'a AdviceEnsemble),
}

impl Advice<'_> {
    pub fn prob<M: Machine + ?Sized>(&self, m: &M, x: &[Symbol]) -> Result<Rational> {
        match self {
            Advice::None => m.accept_prob(x),
            Advice::Deterministic(h) => advised_prob(m, h, x),
            Advice::Randomized(d) => randomized_advised_prob(m, d, x),
        }
    }
}

/// One misclassified or undetermined input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    #[serde(serialize_with = "serialize_word")]
    pub input: Word,
    #[serde(with = "crate::linalg::serde_rational")]
    pub probability: Rational,
    pub member: bool,
    pub verdict: Classification,
}

fn serialize_word<S: serde::Serializer>(w: &Word, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::alphabet::render(w))
}

/// Outcome of an exhaustive recognition check at one length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecognitionReport {
    pub n: usize,
    pub mode: String,
    pub inputs: usize,
    /// Largest probability of answering wrongly (`1−p` on members, `p` on
    /// non-members).
    #[serde(with = "crate::linalg::serde_rational")]
    pub max_error: Rational,
    pub violations: Vec<Violation>,
}

impl RecognitionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Classifies every `x ∈ Σ^n` and lists those the machine gets wrong.
/// Undetermined verdicts count as violations.
pub fn verify_recognition<M: Machine + ?Sized>(
    m: &M,
    advice: Advice<'_>,
    lang: &Language,
    n: usize,
    mode: &AcceptanceMode,
) -> Result<RecognitionReport> {
    let inputs: Vec<Word> = lang.alphabet().words(n).collect();
    let rows = inputs
        .par_iter()
        .map(|x| {
            let p = advice.prob(m, x)?;
            let member = lang.contains(x);
            let verdict = classify(&p, mode);
            let error = if member { Rational::one() - &p } else { p.clone() };
            Ok((x, p, member, verdict, error))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_error = Rational::zero();
    let mut violations = Vec::new();
    for (x, p, member, verdict, error) in rows {
        if error > max_error {
            max_error = error;
        }
        let wanted = if member {
            Classification::Member
        } else {
            Classification::NonMember
        };
        if verdict != wanted {
            violations.push(Violation {
                input: x.clone(),
                probability: p,
                member,
                verdict,
            });
        }
    }
    Ok(RecognitionReport {
        n,
        mode: mode.to_string(),
        inputs: inputs.len(),
        max_error,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{sym, word};
    use crate::automata::{always_accept, DfaBuilder, Step};
    use crate::linalg::q;
    use proptest::prelude::*;

    fn track_alphabet() -> Alphabet {
        Alphabet::binary().tracks(&Alphabet::binary())
    }

    /// Accepts iff the last upper symbol is 1, ignoring the lower track.
    fn oblivious() -> crate::automata::Dfa {
        let a = track_alphabet();
        let mut b = DfaBuilder::new(a.clone(), &["z", "o", "acc", "rej"]);
        for cell in a.symbols() {
            let upper = crate::alphabet::TrackSymbol::parse(cell).unwrap().upper.unwrap();
            let to = if upper.as_str() == "1" { 1 } else { 0 };
            b.set(0, &Step::Letter(cell.clone()), to).unwrap();
            b.set(1, &Step::Letter(cell.clone()), to).unwrap();
        }
        b.set(0, &Step::Right, 3).unwrap();
        b.set(1, &Step::Right, 2).unwrap();
        b.accept(2).reject(3);
        b.build(0).unwrap()
    }

    fn zeros() -> AdviceFunction {
        AdviceFunction::from_fn(Alphabet::binary(), LengthPolicy::Exact, |n| vec![sym("0"); n])
    }

    #[test]
    fn oblivious_machine_ignores_advice() {
        let m = oblivious();
        let ones = AdviceFunction::from_fn(Alphabet::binary(), LengthPolicy::Exact, |n| vec![sym("1"); n]);
        for n in 0..=4 {
            for x in Alphabet::binary().words(n) {
                let expected = if x.last().map(Symbol::as_str) == Some("1") { q(1, 1) } else { q(0, 1) };
                assert_eq!(advised_prob(&m, &zeros(), &x).unwrap(), expected);
                assert_eq!(advised_prob(&m, &ones, &x).unwrap(), expected);
            }
        }
    }

    #[test]
    fn policy_violations_are_errors() {
        let bad = AdviceFunction::from_fn(Alphabet::binary(), LengthPolicy::Exact, |n| vec![sym("0"); n + 1]);
        assert_eq!(bad.advice(2), Err(Error::AdvicePolicy { n: 2, len: 3 }));
        let lin = AdviceFunction::from_fn(Alphabet::binary(), LengthPolicy::Linear { c: 2, d: 1 }, |n| vec![sym("0"); 2 * n + 1]);
        assert!(lin.advice(3).is_ok());
        let table = AdviceFunction::single(Alphabet::binary(), 2, word("0 1"));
        assert_eq!(table.advice(3), Err(Error::AdviceUndefined(3)));
    }

    #[test]
    fn machine_alphabet_mismatch() {
        let m = always_accept(Alphabet::binary());
        assert!(matches!(
            advised_prob(&m, &zeros(), &word("0 1")),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn point_mass_matches_deterministic() {
        let m = oblivious();
        let d = AdviceEnsemble::from_advice(&zeros());
        for x in Alphabet::binary().words(3) {
            assert_eq!(
                randomized_advised_prob(&m, &d, &x).unwrap(),
                advised_prob(&m, &zeros(), &x).unwrap()
            );
        }
    }

    #[test]
    fn distributions_validate() {
        assert!(Distribution::new(vec![(word("0"), q(1, 2))]).is_err());
        assert!(Distribution::new(vec![(word("0"), q(3, 2)), (word("1"), q(-1, 2))]).is_err());
        assert!(Distribution::new(vec![(word("0"), q(1, 2)), (word("1 1"), q(1, 2))]).is_err());
        let d = Distribution::new(vec![(word("0"), q(1, 4)), (word("1"), q(1, 2)), (word("0"), q(1, 4))]).unwrap();
        assert_eq!(d.probability(&word("0")), q(1, 2));
        assert_eq!(d.support().len(), 2);
    }

    #[test]
    fn always_accept_lists_non_members() {
        let m = always_accept(track_alphabet());
        let report = verify_recognition(
            &m,
            Advice::Deterministic(&zeros()),
            &Language::dup(),
            2,
            &AcceptanceMode::UnboundedError,
        )
        .unwrap();
        let bad: Vec<String> = report.violations.iter().map(|v| crate::alphabet::render(&v.input)).collect();
        assert_eq!(bad, vec!["0 1", "1 0"]);
        assert_eq!(report.max_error, q(1, 1));
    }

    /// A two-track machine whose acceptance depends on both tracks.
    fn mixer() -> crate::automata::Pfa {
        use crate::automata::PfaBuilder;
        let a = track_alphabet();
        let mut b = PfaBuilder::new(a.clone(), vec!["s".into(), "t".into()]);
        for cell in a.symbols() {
            let t = crate::alphabet::TrackSymbol::parse(cell).unwrap();
            let w = if t.upper == t.lower { q(2, 3) } else { q(1, 4) };
            let rest = q(1, 1) - &w;
            b.row(&Step::Letter(cell.clone()), 0, &[(1, w), (0, rest)]).unwrap();
        }
        b.final_state(1);
        b.build(0).unwrap()
    }

    proptest! {
        #[test]
        fn ensemble_mixing_is_linear(
            xs in prop::collection::vec(0..2usize, 3),
            a in 0i64..=6,
        ) {
            let x: Word = xs.iter().map(|b| sym(&b.to_string())).collect();
            let m = mixer();
            let d1 = Distribution::uniform(Alphabet::binary().words(3).take(3).collect()).unwrap();
            let d2 = Distribution::point(word("1 1 0"));
            let alpha = q(a, 6);
            let mixed = d1.mix(&d2, &alpha).unwrap();
            let ens = |d: Distribution| {
                AdviceEnsemble::tabulated(Alphabet::binary(), LengthPolicy::Exact, BTreeMap::from([(3, d)]))
            };
            let p1 = randomized_advised_prob(&m, &ens(d1), &x).unwrap();
            let p2 = randomized_advised_prob(&m, &ens(d2), &x).unwrap();
            let pm = randomized_advised_prob(&m, &ens(mixed), &x).unwrap();
            prop_assert_eq!(pm.clone(), &alpha * p1 + (q(1, 1) - &alpha) * p2);
            prop_assert!(pm >= q(0, 1) && pm <= q(1, 1));
        }
    }
}
