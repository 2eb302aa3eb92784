//! Finite-index equivalence relations on `{(x,n) : |x| ≤ n}` and the
//! correspondence with deterministic automata reading length-`n` advice.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::advice::{AdviceFunction, LengthPolicy};
use crate::alphabet::{sym, track_word, Alphabet, Symbol, Word};
use crate::automata::{Dfa, DfaBuilder, Step};
use crate::error::{Error, Result};
use crate::languages::Language;

/// A partition of `Σ^{≤n}` (the pairs `(x,n)` for one horizon `n`) into
/// numbered classes, with the verdicts of the strings of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalencePartition {
    horizon: usize,
    alphabet: Alphabet,
    class_of: HashMap<Word, usize>,
    class_count: usize,
    top: BTreeMap<Word, bool>,
}

impl EquivalencePartition {
    /// Builds a partition from an explicit class map. Every string of length
    /// at most `horizon` must be assigned, and every string of length exactly
    /// `horizon` must carry a verdict. Class ids are renumbered densely in
    /// order of first appearance.
    pub fn from_assignment(
        horizon: usize,
        alphabet: Alphabet,
        class_of: HashMap<Word, usize>,
        top: BTreeMap<Word, bool>,
    ) -> Result<Self> {
        let mut renumber = HashMap::new();
        let mut dense = HashMap::with_capacity(class_of.len());
        for k in 0..=horizon {
            for x in alphabet.words(k) {
                let Some(&c) = class_of.get(&x) else {
                    return Err(Error::MalformedPartition(format!("no class for `{}`", crate::alphabet::render(&x))));
                };
                let next = renumber.len();
                let id = *renumber.entry(c).or_insert(next);
                dense.insert(x, id);
            }
        }
        if dense.len() != class_of.len() {
            return Err(Error::MalformedPartition("class map covers strings beyond the horizon".into()));
        }
        if top.len() != alphabet.count_words(horizon).unwrap_or(usize::MAX)
            || top.keys().any(|x| x.len() != horizon || alphabet.check_word(x).is_err())
        {
            return Err(Error::MalformedPartition("verdicts must cover exactly the top stratum".into()));
        }
        Ok(EquivalencePartition { horizon, alphabet, class_count: renumber.len(), class_of: dense, top })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_of(&self, x: &[Symbol]) -> Option<usize> {
        self.class_of.get(x).copied()
    }

    /// Verdict of a string of length exactly `horizon`.
    pub fn verdict(&self, x: &[Symbol]) -> Option<bool> {
        self.top.get(x).copied()
    }

    /// Classes as sorted member lists, indexed by class id.
    pub fn classes(&self) -> Vec<Vec<Word>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (x, &c) in &self.class_of {
            out[c].push(x.clone());
        }
        for c in &mut out {
            c.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        }
        out
    }

    /// Whether every class of `self` lies inside one class of `other`.
    pub fn refines(&self, other: &EquivalencePartition) -> bool {
        if self.horizon != other.horizon || self.alphabet != other.alphabet {
            return false;
        }
        let mut image = HashMap::new();
        self.class_of.iter().all(|(x, c)| match other.class_of.get(x) {
            Some(d) => *image.entry(*c).or_insert(*d) == *d,
            None => false,
        })
    }
}

/// Membership pattern of `x` against every completion to length `n`.
fn signature(lang: &Language, x: &[Symbol], n: usize) -> Vec<bool> {
    lang.alphabet()
        .words(n - x.len())
        .map(|z| {
            let mut w = x.to_vec();
            w.extend(z);
            lang.contains(&w)
        })
        .collect()
}

/// The coarsest relation with `(x,n) ≡ (y,n)` iff `|x| = |y|` and
/// `S(xz) = S(yz)` for every `z` with `|xz| = n`. Distinct strata are kept in
/// distinct classes; ids follow enumeration order, so `λ` has class 0.
pub fn build_equivalence(lang: &Language, n: usize) -> EquivalencePartition {
    let alphabet = lang.alphabet().clone();
    let mut ids: HashMap<(usize, Vec<bool>), usize> = HashMap::new();
    let mut class_of = HashMap::new();
    let mut top = BTreeMap::new();
    for k in 0..=n {
        for x in alphabet.words(k) {
            let next = ids.len();
            let id = *ids.entry((k, signature(lang, &x, n))).or_insert(next);
            if k == n {
                top.insert(x.clone(), lang.contains(&x));
            }
            class_of.insert(x, id);
        }
    }
    EquivalencePartition { horizon: n, alphabet, class_count: ids.len(), class_of, top }
}

/// First pair `(x,y)` of equal length on which class equality and
/// agreement on all completions differ, if any.
pub fn condition_b_counterexample(p: &EquivalencePartition, lang: &Language) -> Option<(Word, Word)> {
    let n = p.horizon;
    for k in 0..=n {
        let mut by_class: HashMap<usize, (Vec<bool>, Word)> = HashMap::new();
        let mut by_sig: HashMap<Vec<bool>, (usize, Word)> = HashMap::new();
        for x in p.alphabet.words(k) {
            let c = p.class_of[&x];
            let s = signature(lang, &x, n);
            if let Some((s0, y)) = by_class.get(&c) {
                if *s0 != s {
                    return Some((y.clone(), x));
                }
            } else {
                by_class.insert(c, (s.clone(), x.clone()));
            }
            if let Some((c0, y)) = by_sig.get(&s) {
                if *c0 != c {
                    return Some((y.clone(), x));
                }
            } else {
                by_sig.insert(s, (c, x));
            }
        }
    }
    None
}

/// The finite functions `h_{n,i}` read off a partition: one transition table
/// per position, the last one with the accepting and rejecting top classes.
struct AdviceTables {
    steps: Vec<BTreeMap<(usize, usize), usize>>,
    accept: Option<usize>,
    reject: Option<usize>,
}

fn tables(p: &EquivalencePartition) -> Result<AdviceTables> {
    let n = p.horizon;
    let sigma = &p.alphabet;
    let mut steps = Vec::with_capacity(n);
    for i in 1..=n {
        let mut table = BTreeMap::new();
        for x in sigma.words(i - 1) {
            // the first position reads from the start state whatever λ's class is
            let from = if i == 1 { 0 } else { p.class_of[&x] };
            for (s, a) in sigma.symbols().iter().enumerate() {
                let mut xs = x.clone();
                xs.push(a.clone());
                let to = p.class_of[&xs];
                if let Some(&prev) = table.get(&(from, s)) {
                    if prev != to {
                        return Err(Error::MalformedPartition(format!(
                            "class {from} has two successors under `{a}` at position {i}"
                        )));
                    }
                }
                table.insert((from, s), to);
            }
        }
        steps.push(table);
    }
    let (mut acc, mut rej) = (BTreeSet::new(), BTreeSet::new());
    for (x, &v) in &p.top {
        if v { acc.insert(p.class_of[x]) } else { rej.insert(p.class_of[x]) };
    }
    if acc.len() > 1 || rej.len() > 1 {
        return Err(Error::MalformedPartition("top stratum splits a verdict across classes".into()));
    }
    if acc.intersection(&rej).next().is_some() {
        return Err(Error::MalformedPartition("a top class mixes members and non-members".into()));
    }
    Ok(AdviceTables { steps, accept: acc.first().copied(), reject: rej.first().copied() })
}

fn entries(table: &BTreeMap<(usize, usize), usize>) -> String {
    table.iter().map(|((q, s), t)| format!("{q}.{s}={t}")).collect::<Vec<_>>().join(",")
}

fn opt(x: Option<usize>) -> String {
    x.map_or_else(|| "-".into(), |c| c.to_string())
}

/// Compiles one partition into a DFA and its advice string of length `n`.
pub fn compile_advised_dfa(p: &EquivalencePartition) -> Result<(Dfa, Word)> {
    let (dfa, h) = compile_advised_family(std::slice::from_ref(p))?;
    Ok((dfa, h.advice(p.horizon)?))
}

/// Compiles partitions for several horizons into one DFA with a tabulated
/// advice function. Position `i < n` carries the token `T[q.s=q',…]`
/// listing `class × symbol-index → class`; position `n` carries
/// `F[…;a=q_acc;r=q_rej]`. The machine has one state per class (up to the
/// largest class count) plus `acc'`, `rej'`, `acc` and `rej`.
pub fn compile_advised_family(partitions: &[EquivalencePartition]) -> Result<(Dfa, AdviceFunction)> {
    let Some(first) = partitions.first() else {
        return Err(Error::MalformedPartition("no partitions to compile".into()));
    };
    let sigma = first.alphabet.clone();
    let mut seen = BTreeSet::new();
    let mut compiled = Vec::with_capacity(partitions.len());
    for p in partitions {
        if p.alphabet != sigma {
            return Err(Error::AlphabetMismatch("partitions over different alphabets".into()));
        }
        if !seen.insert(p.horizon) {
            return Err(Error::MalformedPartition(format!("horizon {} given twice", p.horizon)));
        }
        compiled.push((p, tables(p)?));
    }

    let classes = partitions.iter().map(|p| p.class_count).max().unwrap_or(1).max(1);
    let mut tokens: Vec<Symbol> = Vec::new();
    let mut index: HashMap<Symbol, usize> = HashMap::new();
    let mut moves: Vec<(BTreeMap<(usize, usize), usize>, Option<(Option<usize>, Option<usize>)>)> = Vec::new();
    let mut advice = BTreeMap::new();
    let mut lambda_accepts = false;
    for (p, t) in &compiled {
        let n = p.horizon;
        if n == 0 {
            lambda_accepts = p.top.get(&Word::new()).copied().unwrap_or(false);
        }
        let mut h = Word::with_capacity(n);
        for (i, table) in t.steps.iter().enumerate() {
            let last = i + 1 == n;
            let token = if last {
                sym(&format!("F[{};a={};r={}]", entries(table), opt(t.accept), opt(t.reject)))
            } else {
                sym(&format!("T[{}]", entries(table)))
            };
            if !index.contains_key(&token) {
                index.insert(token.clone(), tokens.len());
                tokens.push(token.clone());
                moves.push((table.clone(), last.then_some((t.accept, t.reject))));
            }
            h.push(token);
        }
        advice.insert(n, h);
    }
    if tokens.is_empty() {
        // only the empty horizon; keep the advice alphabet non-empty
        tokens.push(sym("T[]"));
        moves.push((BTreeMap::new(), None));
    }
    let gamma = Alphabet::new(tokens.clone())?;

    let mut names: Vec<String> = (0..classes).map(|c| format!("c{c}")).collect();
    names.extend(["acc'", "rej'", "acc", "rej"].map(String::from));
    let (acc_p, rej_p, acc, rej) = (classes, classes + 1, classes + 2, classes + 3);
    let mut b = DfaBuilder::with_states(sigma.tracks(&gamma), names);
    for q in 0..classes + 4 {
        b.set(q, &Step::Left, if q == 0 { 0 } else { rej })?;
        let end = match q {
            0 => if lambda_accepts { acc } else { rej },
            q if q == acc_p || q == acc => acc,
            _ => rej,
        };
        b.set(q, &Step::Right, end)?;
        for (s, a) in sigma.symbols().iter().enumerate() {
            for (token, (table, fin)) in tokens.iter().zip(&moves) {
                let to = match (table.get(&(q, s)), fin) {
                    (Some(&t), None) if q < classes => t,
                    (Some(&t), Some((ya, yr))) if q < classes => {
                        if Some(t) == *ya {
                            acc_p
                        } else if Some(t) == *yr {
                            rej_p
                        } else {
                            rej
                        }
                    }
                    _ => rej,
                };
                b.set(q, &Step::Letter(a.over(token)), to)?;
            }
        }
    }
    b.accept(acc).reject(rej);
    let dfa = b.build(0)?;
    Ok((dfa, AdviceFunction::tabulated(gamma, LengthPolicy::Exact, advice)))
}

/// The relation induced by a DFA with advice: `x` is placed in the class of
/// the state reached after `¢⟨x, h(n)[..|x|]⟩`, followed by `$` when
/// `|x| = n`. Classes are keyed by state alone, so their number is at most
/// the number of states.
pub fn extract_equivalence(m: &Dfa, h: &AdviceFunction, n: usize) -> Result<EquivalencePartition> {
    let advice = h.advice(n)?;
    if advice.len() != n {
        return Err(Error::AdvicePolicy { n, len: advice.len() });
    }
    let sigma = m.alphabet().upper_alphabet()?;
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut class_of = HashMap::new();
    let mut top = BTreeMap::new();
    for k in 0..=n {
        for x in sigma.words(k) {
            let mut state = m.target(m.initial(), &Step::Left)?;
            for cell in track_word(&x, &advice[..k])? {
                state = m.target(state, &Step::Letter(cell))?;
            }
            if k == n {
                state = m.target(state, &Step::Right)?;
                top.insert(x.clone(), m.is_accepting(state));
            }
            let next = ids.len();
            class_of.insert(x, *ids.entry(state).or_insert(next));
        }
    }
    Ok(EquivalencePartition { horizon: n, alphabet: sigma, class_count: ids.len(), class_of, top })
}

/// The language `{x : M accepts ⟨x, h(|x|)⟩}` restricted to the lengths `h`
/// is defined on.
pub fn advised_language(m: &Dfa, h: &AdviceFunction) -> Result<Language> {
    let sigma = m.alphabet().upper_alphabet()?;
    let (m, h) = (m.clone(), h.clone());
    Ok(Language::new("advised", sigma, move |x| {
        h.advice(x.len())
            .and_then(|a| track_word(x, &a))
            .and_then(|cells| m.run(&cells))
            .map(|r| r.accepted)
            .unwrap_or(false)
    }))
}
