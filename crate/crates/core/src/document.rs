//! JSON documents for machines, advice and language references. Rationals
//! are always `"p/q"` strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::advice::{Advice, AdviceEnsemble, AdviceFunction, Distribution, LengthPolicy};
use crate::alphabet::{render, Alphabet, Symbol, LEFT_END, RIGHT_END};
use crate::automata::{Dfa, Machine, Pfa, PfaBuilder, PfaFamily, Step};
use crate::criteria::MachineAt;
use crate::error::{Error, Result};
use crate::languages::Language;
use crate::linalg::{format_rational, parse_rational, Matrix, Rational};

use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaBody {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub accepting: Vec<String>,
    #[serde(default)]
    pub rejecting: Vec<String>,
    /// `[from, step, to]`; missing entries are self-loops.
    pub transitions: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfaBody {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub finals: Vec<String>,
    /// `[from, step, to, probability]`, non-zero entries only; a state with
    /// no entry for a step stays put.
    pub transitions: Vec<[String; 4]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBody {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    /// One machine per input length.
    pub members: Vec<FamilyMember>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyMember {
    pub length: usize,
    pub machine: PfaBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdviceBody {
    pub alphabet: Vec<String>,
    /// `exact` or `linear(c,d)`.
    pub policy: String,
    pub table: Vec<AdviceEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdviceEntry {
    pub length: usize,
    pub advice: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleBody {
    pub alphabet: Vec<String>,
    pub policy: String,
    pub table: Vec<EnsembleEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleEntry {
    pub length: usize,
    /// `[advice string, weight]`
    pub support: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleBody {
    pub machine: Box<MachineDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advice: Option<Box<MachineDocument>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MachineDocument {
    Dfa(DfaBody),
    Pfa(PfaBody),
    PfaFamily(FamilyBody),
    AdviceFn(AdviceBody),
    Ensemble(EnsembleBody),
    LanguageRef {
        name: String,
    },
    Bundle(BundleBody),
}

fn tokens(a: &Alphabet) -> Vec<String> {
    a.symbols().iter().map(|s| s.as_str().to_string()).collect()
}

fn alphabet_of(tokens: &[String]) -> Result<Alphabet> {
    Alphabet::new(tokens.iter().map(|t| Symbol::new(t)).collect::<Result<_>>()?)
}

fn step_token(step: &Step) -> String {
    match step {
        Step::Left => LEFT_END.to_string(),
        Step::Right => RIGHT_END.to_string(),
        Step::Letter(s) => s.as_str().to_string(),
    }
}

fn parse_step(alphabet: &Alphabet, token: &str) -> Result<Step> {
    match token {
        LEFT_END => Ok(Step::Left),
        RIGHT_END => Ok(Step::Right),
        t => {
            let s = Symbol::new(t)?;
            if !alphabet.contains(&s) {
                return Err(Error::UnknownSymbol(t.to_string()));
            }
            Ok(Step::Letter(s))
        }
    }
}

/// `¢`, the letters in alphabet order, then `$`.
fn steps(alphabet: &Alphabet) -> Vec<Step> {
    let mut out = vec![Step::Left];
    out.extend(alphabet.symbols().iter().cloned().map(Step::Letter));
    out.push(Step::Right);
    out
}

fn state_index(states: &[String], name: &str) -> Result<usize> {
    states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| Error::Document(format!("undeclared state `{name}`")))
}

fn format_policy(p: LengthPolicy) -> String {
    p.to_string()
}

fn parse_policy(text: &str) -> Result<LengthPolicy> {
    if text == "exact" {
        return Ok(LengthPolicy::Exact);
    }
    let bad = || Error::Document(format!("unknown length policy `{text}`"));
    let inner = text.strip_prefix("linear(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let (c, d) = inner.split_once(',').ok_or_else(bad)?;
    Ok(LengthPolicy::Linear {
        c: c.trim().parse().map_err(|_| bad())?,
        d: d.trim().parse().map_err(|_| bad())?,
    })
}

impl PfaBody {
    pub fn from_pfa(m: &Pfa) -> PfaBody {
        let mut transitions = Vec::new();
        for step in steps(m.alphabet()) {
            let matrix = m.matrix(&step).expect("step of the machine's alphabet");
            for i in 0..m.dim() {
                for (j, p) in matrix.row(i).iter().enumerate() {
                    if !num_traits::Zero::is_zero(p) {
                        transitions.push([
                            m.states()[i].clone(),
                            step_token(&step),
                            m.states()[j].clone(),
                            format_rational(p),
                        ]);
                    }
                }
            }
        }
        PfaBody {
            alphabet: tokens(m.alphabet()),
            states: m.states().to_vec(),
            initial: m.states()[m.initial()].clone(),
            finals: m.states().iter().zip(m.finals()).filter(|(_, f)| **f).map(|(s, _)| s.clone()).collect(),
            transitions,
        }
    }

    pub fn to_pfa(&self) -> Result<Pfa> {
        let alphabet = alphabet_of(&self.alphabet)?;
        let n = self.states.len();
        let mut grids: BTreeMap<usize, Matrix<Rational>> = BTreeMap::new();
        let all = steps(&alphabet);
        let mut touched = vec![vec![false; n]; all.len()];
        for [from, step, to, p] in &self.transitions {
            let step = parse_step(&alphabet, step)?;
            let k = all.iter().position(|s| *s == step).expect("listed step");
            let (i, j) = (state_index(&self.states, from)?, state_index(&self.states, to)?);
            let grid = grids.entry(k).or_insert_with(|| Matrix::zeros(n, n));
            let cur = grid.get(i, j).clone();
            grid.set(i, j, cur + parse_rational(p)?);
            touched[k][i] = true;
        }
        let mut b = PfaBuilder::new(alphabet, self.states.clone());
        for (k, step) in all.iter().enumerate() {
            if let Some(grid) = grids.get(&k) {
                for i in (0..n).filter(|&i| touched[k][i]) {
                    b.dense_row(step, i, grid.row(i))?;
                }
            }
        }
        for f in &self.finals {
            b.final_state(state_index(&self.states, f)?);
        }
        b.build(state_index(&self.states, &self.initial)?)
    }
}

impl DfaBody {
    pub fn from_dfa(m: &Dfa) -> DfaBody {
        let names = m.states();
        let mut transitions = Vec::new();
        for (q, name) in names.iter().enumerate() {
            for step in steps(m.alphabet()) {
                let to = m.target(q, &step).expect("step of the machine's alphabet");
                transitions.push([name.clone(), step_token(&step), names[to].clone()]);
            }
        }
        let pick = |f: &dyn Fn(usize) -> bool| (0..names.len()).filter(|&q| f(q)).map(|q| names[q].clone()).collect();
        DfaBody {
            alphabet: tokens(m.alphabet()),
            states: names.to_vec(),
            initial: names[m.initial()].clone(),
            accepting: pick(&|q| m.is_accepting(q)),
            rejecting: pick(&|q| m.is_rejecting(q)),
            transitions,
        }
    }

    pub fn to_dfa(&self) -> Result<Dfa> {
        let alphabet = alphabet_of(&self.alphabet)?;
        let n = self.states.len();
        let mut left: Vec<usize> = (0..n).collect();
        let mut right = left.clone();
        let mut letters = vec![left.clone(); alphabet.len()];
        for [from, step, to] in &self.transitions {
            let (i, j) = (state_index(&self.states, from)?, state_index(&self.states, to)?);
            match parse_step(&alphabet, step)? {
                Step::Left => left[i] = j,
                Step::Right => right[i] = j,
                Step::Letter(s) => letters[alphabet.index_of(&s).expect("checked letter")][i] = j,
            }
        }
        let mark = |names: &[String]| -> Result<Vec<bool>> {
            let mut v = vec![false; n];
            for s in names {
                v[state_index(&self.states, s)?] = true;
            }
            Ok(v)
        };
        Dfa::new(
            self.states.clone(),
            alphabet,
            state_index(&self.states, &self.initial)?,
            left,
            letters,
            right,
            mark(&self.accepting)?,
            mark(&self.rejecting)?,
        )
    }
}

/// A machine read from a document.
#[derive(Clone, Debug)]
pub enum LoadedMachine {
    Dfa(Dfa),
    Pfa(Pfa),
    Family(PfaFamily),
}

impl Machine for LoadedMachine {
    fn alphabet(&self) -> &Alphabet {
        match self {
            LoadedMachine::Dfa(m) => m.alphabet(),
            LoadedMachine::Pfa(m) => m.alphabet(),
            LoadedMachine::Family(m) => Machine::alphabet(m),
        }
    }

    fn accept_prob(&self, word: &[Symbol]) -> Result<Rational> {
        match self {
            LoadedMachine::Dfa(m) => m.accept_prob(word),
            LoadedMachine::Pfa(m) => m.accept_prob(word),
            LoadedMachine::Family(m) => m.accept_prob(word),
        }
    }

    fn state_count(&self) -> usize {
        match self {
            LoadedMachine::Dfa(m) => Machine::state_count(m),
            LoadedMachine::Pfa(m) => Machine::state_count(m),
            LoadedMachine::Family(m) => Machine::state_count(m),
        }
    }
}

impl MachineAt for LoadedMachine {
    fn at_length(&self, n: usize) -> Result<Arc<Pfa>> {
        match self {
            LoadedMachine::Dfa(m) => m.at_length(n),
            LoadedMachine::Pfa(m) => m.at_length(n),
            LoadedMachine::Family(m) => m.at_length(n),
        }
    }

    fn state_count(&self) -> usize {
        Machine::state_count(self)
    }
}

/// Advice read from a document.
#[derive(Clone)]
pub enum LoadedAdvice {
    Deterministic(AdviceFunction),
    Randomized(AdviceEnsemble),
}

impl LoadedAdvice {
    pub fn as_advice(&self) -> Advice<'_> {
        match self {
            LoadedAdvice::Deterministic(h) => Advice::Deterministic(h),
            LoadedAdvice::Randomized(d) => Advice::Randomized(d),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            LoadedAdvice::Deterministic(h) => h.alphabet(),
            LoadedAdvice::Randomized(d) => d.alphabet(),
        }
    }
}

fn lengths_or_table(explicit: Option<Vec<usize>>, table: Option<Vec<usize>>) -> Result<Vec<usize>> {
    explicit
        .or(table)
        .ok_or_else(|| Error::Document("advice given by a rule needs explicit lengths to be written out".into()))
}

impl MachineDocument {
    pub fn dfa(m: &Dfa) -> Self {
        MachineDocument::Dfa(DfaBody::from_dfa(m))
    }

    pub fn pfa(m: &Pfa) -> Self {
        MachineDocument::Pfa(PfaBody::from_pfa(m))
    }

    pub fn family(m: &PfaFamily, lengths: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members = lengths
            .into_iter()
            .map(|n| Ok(FamilyMember { length: n, machine: PfaBody::from_pfa(m.at(n)?.as_ref()) }))
            .collect::<Result<_>>()?;
        Ok(MachineDocument::PfaFamily(FamilyBody {
            alphabet: tokens(Machine::alphabet(m)),
            states: m.states().to_vec(),
            members,
        }))
    }

    /// Writes `h` at `lengths`, or at the lengths of its table.
    pub fn advice(h: &AdviceFunction, lengths: Option<Vec<usize>>) -> Result<Self> {
        let table = lengths_or_table(lengths, h.table_lengths())?
            .into_iter()
            .map(|n| Ok(AdviceEntry { length: n, advice: render(&h.advice(n)?) }))
            .collect::<Result<_>>()?;
        Ok(MachineDocument::AdviceFn(AdviceBody {
            alphabet: tokens(h.alphabet()),
            policy: format_policy(h.policy()),
            table,
        }))
    }

    pub fn ensemble(d: &AdviceEnsemble, lengths: Option<Vec<usize>>) -> Result<Self> {
        let table = lengths_or_table(lengths, d.table_lengths())?
            .into_iter()
            .map(|n| {
                let dist = d.at(n)?;
                let support = dist.support().iter().map(|(w, p)| [render(w), format_rational(p)]).collect();
                Ok(EnsembleEntry { length: n, support })
            })
            .collect::<Result<_>>()?;
        Ok(MachineDocument::Ensemble(EnsembleBody {
            alphabet: tokens(d.alphabet()),
            policy: format_policy(d.policy()),
            table,
        }))
    }

    pub fn language(name: &str) -> Self {
        MachineDocument::LanguageRef { name: name.to_string() }
    }

    pub fn bundle(machine: MachineDocument, advice: Option<MachineDocument>, language: Option<String>) -> Self {
        MachineDocument::Bundle(BundleBody { machine: Box::new(machine), advice: advice.map(Box::new), language })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MachineDocument::Dfa(_) => "dfa",
            MachineDocument::Pfa(_) => "pfa",
            MachineDocument::PfaFamily(_) => "pfa-family",
            MachineDocument::AdviceFn(_) => "advice-fn",
            MachineDocument::Ensemble(_) => "ensemble",
            MachineDocument::LanguageRef { .. } => "language-ref",
            MachineDocument::Bundle(_) => "bundle",
        }
    }

    /// Parses a document; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    /// Canonical pretty-printed JSON, newline-terminated.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// The machine of a `dfa`, `pfa`, `pfa-family` or `bundle` document.
    pub fn load_machine(&self) -> Result<LoadedMachine> {
        match self {
            MachineDocument::Dfa(b) => Ok(LoadedMachine::Dfa(b.to_dfa()?)),
            MachineDocument::Pfa(b) => Ok(LoadedMachine::Pfa(b.to_pfa()?)),
            MachineDocument::PfaFamily(b) => {
                let alphabet = alphabet_of(&b.alphabet)?;
                let mut members = BTreeMap::new();
                for FamilyMember { length: n, machine } in &b.members {
                    let m = machine.to_pfa()?;
                    if m.alphabet() != &alphabet || m.states() != b.states.as_slice() {
                        return Err(Error::Document(format!("member for length {n} does not share states and alphabet")));
                    }
                    members.insert(*n, m);
                }
                Ok(LoadedMachine::Family(PfaFamily::new(alphabet, b.states.clone(), move |n| {
                    members.get(&n).cloned().ok_or_else(|| Error::MalformedMachine(format!("no member for length {n}")))
                })))
            }
            MachineDocument::Bundle(b) => b.machine.load_machine(),
            other => Err(Error::Document(format!("a `{}` document holds no machine", other.kind()))),
        }
    }

    /// The advice of an `advice-fn`, `ensemble` or `bundle` document.
    pub fn load_advice(&self) -> Result<Option<LoadedAdvice>> {
        match self {
            MachineDocument::AdviceFn(b) => {
                let alphabet = alphabet_of(&b.alphabet)?;
                let table = b
                    .table
                    .iter()
                    .map(|e| Ok((e.length, alphabet.parse_word(&e.advice)?)))
                    .collect::<Result<_>>()?;
                Ok(Some(LoadedAdvice::Deterministic(AdviceFunction::tabulated(alphabet, parse_policy(&b.policy)?, table))))
            }
            MachineDocument::Ensemble(b) => {
                let alphabet = alphabet_of(&b.alphabet)?;
                let mut table = BTreeMap::new();
                for EnsembleEntry { length: n, support } in &b.table {
                    let entries = support
                        .iter()
                        .map(|[w, p]| Ok((alphabet.parse_word(w)?, parse_rational(p)?)))
                        .collect::<Result<Vec<_>>>()?;
                    table.insert(*n, Distribution::new(entries)?);
                }
                Ok(Some(LoadedAdvice::Randomized(AdviceEnsemble::tabulated(alphabet, parse_policy(&b.policy)?, table))))
            }
            MachineDocument::Bundle(b) => b.advice.as_ref().map_or(Ok(None), |a| a.load_advice()),
            _ => Ok(None),
        }
    }

    /// The language named by a `language-ref` or `bundle` document.
    pub fn load_language(&self) -> Result<Option<Language>> {
        match self {
            MachineDocument::LanguageRef { name } => Language::by_name(name).map(Some),
            MachineDocument::Bundle(b) => b.language.as_deref().map(Language::by_name).transpose(),
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::advice::advised_prob;
    use crate::alphabet::word;
    use crate::constructions::{dup_cequal_family, dup_cequal_uniform, palhash_rn};
    use crate::fixtures::{random_advised_dfa, random_advised_pfa, rng};

    fn round_trip(doc: &MachineDocument) -> MachineDocument {
        let text = doc.emit();
        let back = MachineDocument::parse(&text).unwrap();
        assert_eq!(&back, doc);
        assert_eq!(back.emit(), text);
        back
    }

    #[test]
    fn pfa_round_trip_is_exact() {
        let (m, h) = dup_cequal_uniform().unwrap();
        let doc = MachineDocument::bundle(
            MachineDocument::pfa(&m),
            Some(MachineDocument::advice(&h, Some((0..=6).collect())).unwrap()),
            Some("co-dup".into()),
        );
        let back = round_trip(&doc);
        let LoadedMachine::Pfa(again) = back.load_machine().unwrap() else { panic!("not a pfa") };
        assert_eq!(again, m);
        let Some(LoadedAdvice::Deterministic(h2)) = back.load_advice().unwrap() else { panic!("no advice") };
        for x in Alphabet::binary().words(4) {
            assert_eq!(advised_prob(&again, &h2, &x).unwrap(), advised_prob(&m, &h, &x).unwrap());
        }
        assert!(back.load_language().unwrap().unwrap().contains(&word("0 1")));
    }

    #[test]
    fn random_machines_round_trip() {
        let sigma = Alphabet::binary();
        let mut r = rng(17);
        for _ in 0..10 {
            let m = random_advised_pfa(&mut r, 4, &sigma, &sigma, &[2, 3, 7]).unwrap();
            let LoadedMachine::Pfa(back) = round_trip(&MachineDocument::pfa(&m)).load_machine().unwrap() else { panic!() };
            assert_eq!(back, m);
            let d = random_advised_dfa(&mut r, 3, &sigma, &sigma).unwrap();
            let LoadedMachine::Dfa(back) = round_trip(&MachineDocument::dfa(&d)).load_machine().unwrap() else { panic!() };
            assert_eq!(back, d);
        }
    }

    #[test]
    fn family_and_ensemble_round_trip() {
        let (fam, _) = dup_cequal_family();
        let doc = round_trip(&MachineDocument::family(&fam, 0..=4).unwrap());
        let loaded = doc.load_machine().unwrap();
        assert_eq!(*loaded.at_length(4).unwrap(), *fam.at(4).unwrap());
        assert!(loaded.at_length(5).is_err());

        let (_, d) = palhash_rn(false).unwrap();
        let doc = round_trip(&MachineDocument::ensemble(&d, Some(vec![1, 3, 5])).unwrap());
        let Some(LoadedAdvice::Randomized(back)) = doc.load_advice().unwrap() else { panic!() };
        assert_eq!(*back.at(5).unwrap(), *d.at(5).unwrap());
        assert!(MachineDocument::ensemble(&d, None).is_err());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let err = MachineDocument::parse("{\n  \"kind\": \"pfa\",\n  \"states\": [}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(MachineDocument::parse(r#"{"kind": "robot"}"#).is_err());
        let not_stochastic = r#"{"kind": "pfa", "alphabet": ["0"], "states": ["a", "b"], "initial": "a",
            "transitions": [["a", "0", "b", "1/2"]]}"#;
        assert!(MachineDocument::parse(not_stochastic).unwrap().load_machine().is_err());
        let undeclared = r#"{"kind": "dfa", "alphabet": ["0"], "states": ["a"], "initial": "a",
            "transitions": [["a", "1", "a"]]}"#;
        assert!(MachineDocument::parse(undeclared).unwrap().load_machine().is_err());
        let float = r#"{"kind": "pfa", "alphabet": ["0"], "states": ["a"], "initial": "a",
            "transitions": [["a", "0", "a", "1.0"]]}"#;
        assert!(matches!(MachineDocument::parse(float).unwrap().load_machine(), Err(Error::InvalidRational(_))));
        assert!(MachineDocument::language("nope").load_language().is_err());
        assert!(MachineDocument::language("dup").load_machine().is_err());
    }

    #[test]
    fn policies_parse() {
        assert_eq!(parse_policy("exact").unwrap(), LengthPolicy::Exact);
        assert_eq!(parse_policy("linear(1,1)").unwrap(), LengthPolicy::Linear { c: 1, d: 1 });
        assert_eq!(parse_policy(&format_policy(LengthPolicy::Linear { c: 2, d: 0 })).unwrap(), LengthPolicy::Linear { c: 2, d: 0 });
        assert!(parse_policy("sometimes").is_err());
    }
}
