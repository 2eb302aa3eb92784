//! One-way deterministic and probabilistic finite automata.
//!
//! Both endmarkers are explicit steps: a run on `x` reads `¢ x $`, and a PFA
//! carries its own `M_¢` and `M_$` matrices.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::linalg::{FromRational, Matrix, Rational, RowVector, Scalar, StochasticMatrix};

/// Anything that assigns an exact acceptance probability to a word.
pub trait Machine: Send + Sync {
    fn alphabet(&self) -> &Alphabet;
    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational>;
    /// Number of inner states (for length-indexed families, of every member).
    fn state_count(&self) -> usize;
}

/// One step of a run: an endmarker or an input letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Left,
    Right,
    Letter(Symbol),
}

/// Membership verdict under an acceptance mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Member,
    NonMember,
    Undetermined,
}

/// How an acceptance probability is turned into a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AcceptanceMode {
    /// member iff the probability is exactly 1/2
    ExactHalf,
    /// member iff the probability exceeds 1/2
    UnboundedError,
    /// member iff p ≥ 1−ε, non-member iff p ≤ ε
    BoundedError(Rational),
}

impl AcceptanceMode {
    pub fn bounded(epsilon: Rational) -> Result<Self> {
        if epsilon < Rational::zero() || epsilon >= Rational::new(1.into(), 2.into()) {
            return Err(Error::InvalidDistribution(format!(
                "error bound {epsilon} outside [0, 1/2)"
            )));
        }
        Ok(AcceptanceMode::BoundedError(epsilon))
    }
}

impl fmt::Display for AcceptanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceMode::ExactHalf => f.write_str("exact-half"),
            AcceptanceMode::UnboundedError => f.write_str("unbounded"),
            AcceptanceMode::BoundedError(e) => write!(f, "bounded({e})"),
        }
    }
}

pub fn classify(p: &Rational, mode: &AcceptanceMode) -> Classification {
    let half = Rational::new(1.into(), 2.into());
    let verdict = |b: bool| {
        if b {
            Classification::Member
        } else {
            Classification::NonMember
        }
    };
    match mode {
        AcceptanceMode::ExactHalf => verdict(*p == half),
        AcceptanceMode::UnboundedError => verdict(*p > half),
        AcceptanceMode::BoundedError(eps) => {
            if *p >= Rational::one() - eps {
                Classification::Member
            } else if p <= eps {
                Classification::NonMember
            } else {
                Classification::Undetermined
            }
        }
    }
}

fn check_state_names(states: &[String]) -> Result<()> {
    if states.is_empty() {
        return Err(Error::MalformedMachine("no states".into()));
    }
    let mut seen = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if seen.insert(s.as_str(), i).is_some() {
            return Err(Error::MalformedMachine(format!("duplicate state `{s}`")));
        }
    }
    Ok(())
}

/// A one-way DFA with explicit endmarker transitions.
#[derive(Clone, Debug, PartialEq)]
pub struct Dfa {
    states: Vec<String>,
    alphabet: Alphabet,
    initial: usize,
    left: Vec<usize>,
    right: Vec<usize>,
    /// `letters[a][q]`
    letters: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    rejecting: Vec<bool>,
}

/// Result of [`Dfa::run`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DfaRun {
    pub final_state: usize,
    pub accepted: bool,
}

impl Dfa {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        initial: usize,
        left: Vec<usize>,
        letters: Vec<Vec<usize>>,
        right: Vec<usize>,
        accepting: Vec<bool>,
        rejecting: Vec<bool>,
    ) -> Result<Self> {
        check_state_names(&states)?;
        let n = states.len();
        let bad = |what: &str| Err(Error::MalformedMachine(what.to_string()));
        if initial >= n {
            return bad("initial state out of range");
        }
        if letters.len() != alphabet.len() {
            return bad("one transition table per letter required");
        }
        for table in letters.iter().chain([&left, &right]) {
            if table.len() != n || table.iter().any(|&t| t >= n) {
                return bad("transition table is not total");
            }
        }
        if accepting.len() != n || rejecting.len() != n {
            return bad("halting sets must cover every state");
        }
        if accepting.iter().zip(&rejecting).any(|(a, r)| *a && *r) {
            return bad("accepting and rejecting states overlap");
        }
        Ok(Dfa {
            states,
            alphabet,
            initial,
            left,
            right,
            letters,
            accepting,
            rejecting,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn is_rejecting(&self, q: usize) -> bool {
        self.rejecting[q]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn target(&self, q: usize, step: &Step) -> Result<usize> {
        Ok(match step {
            Step::Left => self.left[q],
            Step::Right => self.right[q],
            Step::Letter(s) => {
                let a = self
                    .alphabet
                    .index_of(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
                self.letters[a][q]
            }
        })
    }

    /// State after reading `¢ w` (no right endmarker).
    pub fn run_prefix(&self, w: &[Symbol]) -> Result<usize> {
        let mut q = self.left[self.initial];
        for s in w {
            q = self.target(q, &Step::Letter(s.clone()))?;
        }
        Ok(q)
    }

    /// Reads `¢ w $`.
    pub fn run(&self, w: &[Symbol]) -> Result<DfaRun> {
        let q = self.right[self.run_prefix(w)?];
        Ok(DfaRun {
            final_state: q,
            accepted: self.accepting[q],
        })
    }

    /// Reads back a PFA whose matrices are all 0/1; the final states become
    /// the accepting set.
    pub fn from_pfa(m: &Pfa) -> Result<Dfa> {
        let table = |s: &StochasticMatrix<Rational>| -> Result<Vec<usize>> {
            (0..s.dim())
                .map(|i| {
                    s.row(i)
                        .iter()
                        .position(|p| p.is_one())
                        .ok_or_else(|| Error::MalformedMachine(format!("row of `{}` is not deterministic", m.states[i])))
                })
                .collect()
        };
        let letters = m.letters.iter().map(&table).collect::<Result<Vec<_>>>()?;
        let n = m.dim();
        Dfa::new(
            m.states.clone(),
            m.alphabet.clone(),
            m.initial,
            table(&m.left)?,
            letters,
            table(&m.right)?,
            m.finals.clone(),
            vec![false; n],
        )
    }

    /// Same machine as a PFA with 0/1 matrices and `F = Q_acc`.
    pub fn to_pfa(&self) -> Pfa {
        Pfa {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            left: StochasticMatrix::from_map(&self.left),
            right: StochasticMatrix::from_map(&self.right),
            letters: self
                .letters
                .iter()
                .map(|t| StochasticMatrix::from_map(t))
                .collect(),
            finals: self.accepting.clone(),
        }
    }
}

impl Machine for Dfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational> {
        Ok(if self.run(word)?.accepted {
            Rational::one()
        } else {
            Rational::zero()
        })
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }
}

/// Builds a DFA state by state; unspecified transitions are self-loops.
pub struct DfaBuilder {
    states: Vec<String>,
    alphabet: Alphabet,
    left: Vec<usize>,
    right: Vec<usize>,
    letters: Vec<Vec<usize>>,
    accepting: Vec<bool>,
    rejecting: Vec<bool>,
}

impl DfaBuilder {
    pub fn new(alphabet: Alphabet, states: &[&str]) -> Self {
        let n = states.len();
        let ident: Vec<usize> = (0..n).collect();
        DfaBuilder {
            states: states.iter().map(|s| s.to_string()).collect(),
            letters: vec![ident.clone(); alphabet.len()],
            alphabet,
            left: ident.clone(),
            right: ident,
            accepting: vec![false; n],
            rejecting: vec![false; n],
        }
    }

    pub fn with_states(alphabet: Alphabet, states: Vec<String>) -> Self {
        let refs: Vec<&str> = states.iter().map(String::as_str).collect();
        DfaBuilder::new(alphabet, &refs)
    }

    pub fn set(&mut self, from: usize, step: &Step, to: usize) -> Result<&mut Self> {
        match step {
            Step::Left => self.left[from] = to,
            Step::Right => self.right[from] = to,
            Step::Letter(s) => {
                let a = self
                    .alphabet
                    .index_of(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
                self.letters[a][from] = to;
            }
        }
        Ok(self)
    }

    pub fn accept(&mut self, q: usize) -> &mut Self {
        self.accepting[q] = true;
        self
    }

    pub fn reject(&mut self, q: usize) -> &mut Self {
        self.rejecting[q] = true;
        self
    }

    pub fn build(self, initial: usize) -> Result<Dfa> {
        Dfa::new(
            self.states,
            self.alphabet,
            initial,
            self.left,
            self.letters,
            self.right,
            self.accepting,
            self.rejecting,
        )
    }
}

/// A one-way PFA `(Q, Σ, ν_ini, {M_σ}, F)` with `ν_ini` the point mass on the
/// initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Pfa<T = Rational> {
    states: Vec<String>,
    alphabet: Alphabet,
    initial: usize,
    left: StochasticMatrix<T>,
    right: StochasticMatrix<T>,
    letters: Vec<StochasticMatrix<T>>,
    finals: Vec<bool>,
}

impl<T: Scalar> Pfa<T> {
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        initial: usize,
        left: StochasticMatrix<T>,
        letters: Vec<StochasticMatrix<T>>,
        right: StochasticMatrix<T>,
        finals: Vec<bool>,
    ) -> Result<Self> {
        check_state_names(&states)?;
        let n = states.len();
        if initial >= n {
            return Err(Error::MalformedMachine("initial state out of range".into()));
        }
        if letters.len() != alphabet.len() {
            return Err(Error::MalformedMachine(
                "one matrix per letter required".into(),
            ));
        }
        for m in letters.iter().chain([&left, &right]) {
            if m.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
        }
        if finals.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: finals.len(),
            });
        }
        Ok(Pfa {
            states,
            alphabet,
            initial,
            left,
            right,
            letters,
            finals,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial_vector(&self) -> RowVector<T> {
        RowVector::unit(self.dim(), self.initial)
    }

    /// `ξ_F`.
    pub fn final_vector(&self) -> RowVector<T> {
        RowVector::new(
            self.finals
                .iter()
                .map(|&f| if f { T::one() } else { T::zero() })
                .collect(),
        )
    }

    pub fn left(&self) -> &StochasticMatrix<T> {
        &self.left
    }

    pub fn right(&self) -> &StochasticMatrix<T> {
        &self.right
    }

    pub fn letter_matrices(&self) -> &[StochasticMatrix<T>] {
        &self.letters
    }

    pub fn matrix(&self, step: &Step) -> Result<&StochasticMatrix<T>> {
        Ok(match step {
            Step::Left => &self.left,
            Step::Right => &self.right,
            Step::Letter(s) => {
                let a = self
                    .alphabet
                    .index_of(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
                &self.letters[a]
            }
        })
    }

    /// Every matrix of the machine, endmarkers first.
    pub fn all_matrices(&self) -> impl Iterator<Item = &StochasticMatrix<T>> {
        [&self.left, &self.right].into_iter().chain(&self.letters)
    }

    /// `ν_ini · M_¢ · M_w`.
    pub fn prefix_vector(&self, w: &[Symbol]) -> Result<RowVector<T>> {
        let mut v = self.initial_vector().mul_matrix(self.left.matrix())?;
        for s in w {
            v = self.advance(&v, s)?;
        }
        Ok(v)
    }

    pub fn advance(&self, v: &RowVector<T>, s: &Symbol) -> Result<RowVector<T>> {
        v.mul_matrix(self.matrix(&Step::Letter(s.clone()))?.matrix())
    }

    /// `v · M_suffix · M_$ · ξ_F^T`.
    pub fn finish(&self, v: &RowVector<T>, suffix: &[Symbol]) -> Result<T> {
        let mut v = v.clone();
        for s in suffix {
            v = self.advance(&v, s)?;
        }
        let v = v.mul_matrix(self.right.matrix())?;
        v.dot(&self.final_vector())
    }

    /// `p_acc(w) = ν_ini M_{¢w$} ξ_F^T`.
    pub fn acceptance(&self, w: &[Symbol]) -> Result<T> {
        self.finish(&self.prefix_vector(w)?, &[])
    }

    /// Every intermediate distribution: after `¢`, after each letter, after `$`.
    pub fn trace(&self, w: &[Symbol]) -> Result<Vec<RowVector<T>>> {
        let mut v = self.initial_vector().mul_matrix(self.left.matrix())?;
        let mut out = vec![v.clone()];
        for s in w {
            v = self.advance(&v, s)?;
            out.push(v.clone());
        }
        out.push(v.mul_matrix(self.right.matrix())?);
        Ok(out)
    }
}

impl Pfa<Rational> {
    /// The machine over another scalar type (e.g. `f64` for quick sweeps).
    pub fn to_scalar<U: FromRational>(&self) -> Pfa<U> {
        let conv = |m: &StochasticMatrix<Rational>| m.map(U::from_rational);
        Pfa {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            initial: self.initial,
            left: conv(&self.left),
            right: conv(&self.right),
            letters: self.letters.iter().map(conv).collect(),
            finals: self.finals.clone(),
        }
    }
}

impl Machine for Pfa<Rational> {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational> {
        self.acceptance(word)
    }

    fn state_count(&self) -> usize {
        self.dim()
    }
}

/// Builds a PFA row by row; rows not set are identity rows.
pub struct PfaBuilder {
    states: Vec<String>,
    alphabet: Alphabet,
    left: Matrix<Rational>,
    right: Matrix<Rational>,
    letters: Vec<Matrix<Rational>>,
    finals: Vec<bool>,
}

impl PfaBuilder {
    pub fn new(alphabet: Alphabet, states: Vec<String>) -> Self {
        let n = states.len();
        PfaBuilder {
            letters: vec![Matrix::identity(n); alphabet.len()],
            left: Matrix::identity(n),
            right: Matrix::identity(n),
            states,
            alphabet,
            finals: vec![false; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    fn target(&mut self, step: &Step) -> Result<&mut Matrix<Rational>> {
        Ok(match step {
            Step::Left => &mut self.left,
            Step::Right => &mut self.right,
            Step::Letter(s) => {
                let a = self
                    .alphabet
                    .index_of(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string()))?;
                &mut self.letters[a]
            }
        })
    }

    /// Replaces row `from` of `M_step` by the given sparse distribution.
    pub fn row(&mut self, step: &Step, from: usize, targets: &[(usize, Rational)]) -> Result<&mut Self> {
        let n = self.dim();
        let m = self.target(step)?;
        for j in 0..n {
            m.set(from, j, Rational::zero());
        }
        for (to, p) in targets {
            let cur = m.get(from, *to).clone();
            m.set(from, *to, cur + p);
        }
        Ok(self)
    }

    /// Deterministic row.
    pub fn go(&mut self, step: &Step, from: usize, to: usize) -> Result<&mut Self> {
        self.row(step, from, &[(to, Rational::one())])
    }

    /// Row `from` of `M_step` replaced by the full row vector `row`.
    pub fn dense_row(&mut self, step: &Step, from: usize, row: &[Rational]) -> Result<&mut Self> {
        let m = self.target(step)?;
        for (j, p) in row.iter().enumerate() {
            m.set(from, j, p.clone());
        }
        Ok(self)
    }

    /// Replaces the whole matrix of one step.
    pub fn matrix(&mut self, step: &Step, m: Matrix<Rational>) -> Result<&mut Self> {
        *self.target(step)? = m;
        Ok(self)
    }

    pub fn final_state(&mut self, q: usize) -> &mut Self {
        self.finals[q] = true;
        self
    }

    pub fn build(self, initial: usize) -> Result<Pfa> {
        Pfa::new(
            self.states,
            self.alphabet,
            initial,
            StochasticMatrix::new(self.left)?,
            self.letters
                .into_iter()
                .map(StochasticMatrix::new)
                .collect::<Result<_>>()?,
            StochasticMatrix::new(self.right)?,
            self.finals,
        )
    }
}

type Generator = dyn Fn(usize) -> Result<Pfa> + Send + Sync;

/// A PFA whose matrices may depend on the input length.
pub struct PfaFamily {
    alphabet: Alphabet,
    states: Vec<String>,
    generator: Arc<Generator>,
    cache: Mutex<HashMap<usize, Arc<Pfa>>>,
}

impl PfaFamily {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        generator: impl Fn(usize) -> Result<Pfa> + Send + Sync + 'static,
    ) -> Self {
        PfaFamily {
            alphabet,
            states,
            generator: Arc::new(generator),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// The machine used on inputs of length `n`.
    pub fn at(&self, n: usize) -> Result<Arc<Pfa>> {
        if let Some(m) = self.cache.lock().expect("cache lock").get(&n) {
            return Ok(m.clone());
        }
        let m = (self.generator)(n)?;
        if m.alphabet() != &self.alphabet || m.states() != self.states.as_slice() {
            return Err(Error::MalformedMachine(format!(
                "family member for length {n} does not share states and alphabet"
            )));
        }
        let m = Arc::new(m);
        self.cache.lock().expect("cache lock").insert(n, m.clone());
        Ok(m)
    }
}

impl Clone for PfaFamily {
    fn clone(&self) -> Self {
        PfaFamily {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            generator: self.generator.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for PfaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PfaFamily")
            .field("alphabet", &self.alphabet)
            .field("states", &self.states)
            .finish_non_exhaustive()
    }
}

impl Machine for PfaFamily {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational> {
        self.at(word.len())?.acceptance(word)
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }
}

impl<M: Machine + ?Sized> Machine for Arc<M> {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }
    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational> {
        (**self).accept_prob(word)
    }
    fn state_count(&self) -> usize {
        (**self).state_count()
    }
}

impl<M: Machine + ?Sized> Machine for &M {
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }
    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational> {
        (**self).accept_prob(word)
    }
    fn state_count(&self) -> usize {
        (**self).state_count()
    }
}

/// The single-state-pair machine that accepts every input.
pub fn always_accept(alphabet: Alphabet) -> Pfa {
    let mut b = PfaBuilder::new(alphabet, vec!["acc".into()]);
    b.final_state(0);
    b.build(0).expect("trivial machine")
}

/// `M_$` splits the start state evenly between an accepting and a rejecting
/// state.
pub fn coin_machine(alphabet: Alphabet) -> Pfa {
    let half = Rational::new(1.into(), 2.into());
    let mut b = PfaBuilder::new(alphabet, vec!["q0".into(), "acc".into(), "rej".into()]);
    b.row(&Step::Right, 0, &[(1, half.clone()), (2, half)])
        .expect("endmarker row");
    b.final_state(1);
    b.build(0).expect("coin machine")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{sym, word};
    use crate::linalg::q;
    use proptest::prelude::*;

    /// Accepts binary strings ending in 1.
    fn ends_in_one() -> Dfa {
        let mut b = DfaBuilder::new(Alphabet::binary(), &["last0", "last1", "acc", "rej"]);
        for from in 0..2 {
            b.set(from, &Step::Letter(sym("0")), 0).unwrap();
            b.set(from, &Step::Letter(sym("1")), 1).unwrap();
        }
        b.set(0, &Step::Right, 3).unwrap();
        b.set(1, &Step::Right, 2).unwrap();
        b.accept(2).reject(3);
        b.build(0).unwrap()
    }

    #[test]
    fn dfa_traces() {
        let m = ends_in_one();
        assert!(m.run(&word("0 1")).unwrap().accepted);
        assert!(!m.run(&[]).unwrap().accepted);
        assert_eq!(
            m.run(&word("2")),
            Err(Error::UnknownSymbol("2".into()))
        );
    }

    #[test]
    fn dfa_rejects_overlapping_halting_sets() {
        let mut b = DfaBuilder::new(Alphabet::binary(), &["q"]);
        b.accept(0).reject(0);
        assert!(b.build(0).is_err());
    }

    #[test]
    fn trivial_probabilities() {
        let a = always_accept(Alphabet::binary());
        assert_eq!(a.acceptance(&word("0 1 1")).unwrap(), q(1, 1));
        let c = coin_machine(Alphabet::binary());
        assert_eq!(c.acceptance(&[]).unwrap(), q(1, 2));
    }

    #[test]
    fn classify_modes() {
        assert_eq!(classify(&q(1, 2), &AcceptanceMode::ExactHalf), Classification::Member);
        assert_eq!(classify(&q(1, 2), &AcceptanceMode::UnboundedError), Classification::NonMember);
        let b = AcceptanceMode::bounded(q(1, 4)).unwrap();
        assert_eq!(classify(&q(3, 5), &b), Classification::Undetermined);
        assert_eq!(classify(&q(3, 4), &b), Classification::Member);
        assert_eq!(classify(&q(1, 4), &b), Classification::NonMember);
        assert!(AcceptanceMode::bounded(q(1, 2)).is_err());
    }

    #[test]
    fn lifted_dfa_agrees_on_all_short_inputs() {
        let m = ends_in_one();
        let p = m.to_pfa();
        for n in 0..=8 {
            for w in Alphabet::binary().words(n) {
                let expected = if m.run(&w).unwrap().accepted { q(1, 1) } else { q(0, 1) };
                assert_eq!(p.acceptance(&w).unwrap(), expected);
            }
        }
    }

    #[test]
    fn float_copy_tracks_exact_machine() {
        let c = coin_machine(Alphabet::binary());
        let f: Pfa<f64> = c.to_scalar();
        assert!((f.acceptance(&word("0 1")).unwrap() - 0.5).abs() < 1e-12);
    }

    fn mixing_machine() -> Pfa {
        let mut b = PfaBuilder::new(Alphabet::binary(), vec!["a".into(), "b".into(), "c".into()]);
        b.row(&Step::Letter(sym("0")), 0, &[(1, q(1, 3)), (2, q(2, 3))]).unwrap();
        b.row(&Step::Letter(sym("1")), 1, &[(0, q(1, 2)), (2, q(1, 2))]).unwrap();
        b.row(&Step::Letter(sym("1")), 2, &[(0, q(1, 1))]).unwrap();
        b.final_state(2);
        b.build(0).unwrap()
    }

    proptest! {
        #[test]
        fn distributions_stay_stochastic(bits in prop::collection::vec(0..2usize, 0..10)) {
            let m = mixing_machine();
            let w: Vec<Symbol> = bits.iter().map(|b| sym(&b.to_string())).collect();
            for v in m.trace(&w).unwrap() {
                prop_assert_eq!(v.sum(), q(1, 1));
            }
            let p = m.acceptance(&w).unwrap();
            prop_assert!(p >= q(0, 1) && p <= q(1, 1));
        }
    }
}
