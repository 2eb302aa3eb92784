//! Seeded random machines, advice, languages and candidate sets used by the
//! test suites and the command-line tool.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::advice::{AdviceEnsemble, AdviceFunction, Distribution, LengthPolicy};
use crate::alphabet::{Alphabet, Word};
use crate::automata::{always_accept, coin_machine, Dfa, DfaBuilder, Pfa, PfaBuilder, Step};
use crate::constructions::{dup_cequal_family, dup_cequal_uniform, universal_cequal_rlin};
use crate::criteria::MachineAt;
use crate::error::Result;
use crate::languages::Language;
use crate::linalg::{q, Matrix, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random distribution over `0..len` whose weights have denominator drawn
/// from `denominators`, with at most three non-zero entries.
fn random_row(rng: &mut ChaCha8Rng, len: usize, denominators: &[i64]) -> Vec<Rational> {
    let d = *denominators.choose(rng).expect("some denominator");
    let targets: Vec<usize> = (0..rng.gen_range(1..=3.min(len))).map(|_| rng.gen_range(0..len)).collect();
    let mut units = vec![0i64; len];
    for _ in 0..d {
        units[*targets.choose(rng).expect("a target")] += 1;
    }
    units.into_iter().map(|u| q(u, d)).collect()
}

/// A random PFA: every row of every matrix is random, finals are random and
/// the initial state is 0.
pub fn random_pfa(rng: &mut ChaCha8Rng, states: usize, alphabet: Alphabet, denominators: &[i64]) -> Result<Pfa> {
    let names = (0..states).map(|i| format!("s{i}")).collect();
    let mut b = PfaBuilder::new(alphabet.clone(), names);
    let mut steps = vec![Step::Left, Step::Right];
    steps.extend(alphabet.symbols().iter().cloned().map(Step::Letter));
    for step in &steps {
        let rows = (0..states).map(|_| random_row(rng, states, denominators)).collect();
        b.matrix(step, Matrix::from_rows(rows)?)?;
    }
    for s in 0..states {
        if rng.gen_bool(0.5) {
            b.final_state(s);
        }
    }
    b.build(0)
}

/// A random PFA over the cells `<σ|τ>`.
pub fn random_advised_pfa(
    rng: &mut ChaCha8Rng,
    states: usize,
    sigma: &Alphabet,
    gamma: &Alphabet,
    denominators: &[i64],
) -> Result<Pfa> {
    random_pfa(rng, states, sigma.tracks(gamma), denominators)
}

/// A random DFA over the cells `<σ|τ>`; the last state accepts and the
/// right endmarker sends each state to it or to the one before it.
pub fn random_advised_dfa(rng: &mut ChaCha8Rng, states: usize, sigma: &Alphabet, gamma: &Alphabet) -> Result<Dfa> {
    let tracks = sigma.tracks(gamma);
    let mut names: Vec<String> = (0..states).map(|i| format!("s{i}")).collect();
    names.push("acc".into());
    names.push("rej".into());
    let mut b = DfaBuilder::with_states(tracks.clone(), names);
    for q in 0..states {
        for cell in tracks.symbols() {
            b.set(q, &Step::Letter(cell.clone()), rng.gen_range(0..states))?;
        }
        b.set(q, &Step::Right, if rng.gen_bool(0.5) { states } else { states + 1 })?;
    }
    b.accept(states).reject(states + 1);
    b.build(0)
}

/// Advice of length `n` drawn from a generator seeded by `(seed, n)`, so
/// every length has a fixed string.
pub fn random_advice(seed: u64, gamma: Alphabet) -> AdviceFunction {
    let symbols = gamma.symbols().to_vec();
    AdviceFunction::from_fn(gamma, LengthPolicy::Exact, move |n| {
        let mut r = rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(n as u64));
        (0..n).map(|_| symbols.choose(&mut r).expect("symbol").clone()).collect()
    })
}

/// A random ensemble with at most `support` strings per length.
pub fn random_ensemble(seed: u64, gamma: Alphabet, support: usize) -> AdviceEnsemble {
    let symbols = gamma.symbols().to_vec();
    AdviceEnsemble::from_fn(gamma, LengthPolicy::Exact, move |n| {
        let mut r = rng(seed.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(n as u64));
        let k = r.gen_range(1..=support.max(1));
        let entries = (0..k)
            .map(|_| {
                let w: Word = (0..n).map(|_| symbols.choose(&mut r).expect("symbol").clone()).collect();
                (w, q(1, k as i64))
            })
            .collect();
        Distribution::new(entries)
    })
}

/// A language with each string of length at most `max_len` included with
/// probability 1/2.
pub fn random_language(rng: &mut ChaCha8Rng, sigma: &Alphabet, max_len: usize) -> Language {
    let members: HashSet<Word> = (0..=max_len)
        .flat_map(|k| sigma.words(k).collect::<Vec<_>>())
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    Language::from_set("random", sigma.clone(), members)
}

/// A random 0/1 payoff grid.
pub fn random_payoff(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<Rational> {
    let grid = (0..rows)
        .map(|_| (0..cols).map(|_| if rng.gen_bool(0.5) { q(1, 1) } else { q(0, 1) }).collect())
        .collect();
    Matrix::from_rows(grid).expect("rectangular grid")
}

/// `m` random bit rows of length `len`.
pub fn random_bits(rng: &mut ChaCha8Rng, m: usize, len: usize) -> Vec<Vec<bool>> {
    (0..m).map(|_| (0..len).map(|_| rng.gen_bool(0.5)).collect()).collect()
}

/// A named candidate recognizer with deterministic advice.
pub struct Candidate {
    pub name: String,
    pub machine: Box<dyn MachineAt>,
    pub advice: AdviceFunction,
}

/// Machines with deterministic advice offered as exact-half recognizers of
/// the complement of `Dup`.
pub fn cequal_candidates() -> Result<Vec<Candidate>> {
    let sigma = Alphabet::binary();
    let mut out = Vec::new();
    let (uniform, h) = dup_cequal_uniform()?;
    out.push(Candidate { name: "dup-uniform".into(), machine: Box::new(uniform), advice: h });
    let (family, h) = dup_cequal_family();
    out.push(Candidate { name: "dup-family".into(), machine: Box::new(family), advice: h });

    let co_dup = Language::dup().complement();
    let (universal, ensemble) = universal_cequal_rlin(&co_dup, 8)?;
    let mut table = BTreeMap::new();
    for n in 0..=8 {
        table.insert(n, ensemble.at(n)?.support()[0].0.clone());
    }
    let h = AdviceFunction::tabulated(ensemble.alphabet().clone(), LengthPolicy::Exact, table);
    out.push(Candidate { name: "universal-fixed".into(), machine: Box::new(universal), advice: h });

    let tracks = sigma.tracks(&sigma);
    out.push(Candidate { name: "coin".into(), machine: Box::new(coin_machine(tracks.clone())), advice: random_advice(1, sigma.clone()) });
    out.push(Candidate { name: "always".into(), machine: Box::new(always_accept(tracks)), advice: random_advice(2, sigma.clone()) });

    let mut r = rng(0xc0ffee);
    for i in 0..8 {
        let states = 2 + i % 3;
        let m = random_advised_pfa(&mut r, states, &sigma, &sigma, &[1, 2, 3, 4])?;
        out.push(Candidate { name: format!("random-{i}"), machine: Box::new(m), advice: random_advice(100 + i as u64, sigma.clone()) });
    }
    Ok(out)
}

/// Machines with deterministic advice offered as unbounded-error
/// recognizers of `IP*`.
pub fn plin_candidates() -> Result<Vec<Candidate>> {
    let sigma = Alphabet::binary();
    let tracks = sigma.tracks(&sigma);
    let mut out = Vec::new();
    out.push(Candidate { name: "always".into(), machine: Box::new(always_accept(tracks.clone())), advice: random_advice(3, sigma.clone()) });
    out.push(Candidate { name: "coin".into(), machine: Box::new(coin_machine(tracks.clone())), advice: random_advice(4, sigma.clone()) });

    let mut b = PfaBuilder::new(tracks.clone(), vec!["s".into(), "acc".into(), "rej".into()]);
    b.row(&Step::Right, 0, &[(1, q(2, 3)), (2, q(1, 3))])?;
    b.final_state(1);
    out.push(Candidate { name: "constant-2/3".into(), machine: Box::new(b.build(0)?), advice: random_advice(5, sigma.clone()) });

    let mut r = rng(0xbadc0de);
    for i in 0..9 {
        let states = 2 + i % 2;
        let m = random_advised_pfa(&mut r, states, &sigma, &sigma, &[1, 2, 3])?;
        out.push(Candidate { name: format!("random-{i}"), machine: Box::new(m), advice: random_advice(200 + i as u64, sigma.clone()) });
    }
    Ok(out)
}
