//! Moving all randomness of a PFA into its advice: state expansion to a
//! uniform-`1/d` machine, then a deterministic automaton reading advice
//! annotated with successor choices.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::advice::{AdviceEnsemble, Distribution, LengthPolicy};
use crate::alphabet::{sym, Alphabet, Symbol, TrackSymbol};
use crate::automata::{Dfa, DfaBuilder, Pfa, Step};
use crate::error::{Error, Result};
use crate::linalg::{lcm_of_denominators, Matrix, Rational, StochasticMatrix};

/// Largest `d` accepted by [`dnormalize`].
pub const MAX_EXPANSION: usize = 256;

/// Largest annotated support produced per length by [`derandomize`].
pub const MAX_SUPPORT: usize = 1 << 22;

fn all_entries(m: &Pfa) -> impl Iterator<Item = &Rational> {
    m.all_matrices().flat_map(|x| x.matrix().entries())
}

/// The `d` for which every non-zero entry equals `1/d`, if any.
pub fn uniform_denominator(m: &Pfa) -> Option<usize> {
    let mut d: Option<BigInt> = None;
    for x in all_entries(m).filter(|x| !x.is_zero()) {
        if *x.numer() != BigInt::from(1) {
            return None;
        }
        match &d {
            None => d = Some(x.denom().clone()),
            Some(e) if e != x.denom() => return None,
            _ => {}
        }
    }
    d.unwrap_or_else(|| BigInt::from(1)).to_usize()
}

/// Expands every state into `d` copies, `d` the lcm of all denominators, so
/// that every entry is 0 or `1/d`. A transition of weight `c/d` from `q_i`
/// to `q_j` becomes `1/d`-edges from every copy of `q_i` into the first `c`
/// copies of `q_j`. Acceptance probabilities are unchanged.
pub fn dnormalize(m: &Pfa) -> Result<Pfa> {
    let d_big = lcm_of_denominators(all_entries(m));
    let d = d_big
        .to_usize()
        .filter(|&d| d <= MAX_EXPANSION)
        .ok_or_else(|| Error::ScaleLimit(format!("normalizing denominator {d_big} exceeds {MAX_EXPANSION}")))?;
    let n = m.dim();
    let unit = Rational::new(1.into(), d_big.clone());
    let expand = |src: &StochasticMatrix<Rational>| -> Result<StochasticMatrix<Rational>> {
        let mut out = Matrix::zeros(n * d, n * d);
        for i in 0..n {
            for (j, p) in src.row(i).iter().enumerate() {
                let copies = (p * &d_big).to_integer().to_usize().unwrap_or(0);
                for k in 0..d {
                    for l in 0..copies {
                        out.set(i * d + k, j * d + l, unit.clone());
                    }
                }
            }
        }
        StochasticMatrix::new(out)
    };
    let states = m
        .states()
        .iter()
        .flat_map(|s| (1..=d).map(move |k| format!("{s}.{k}")))
        .collect();
    let finals = m.finals().iter().flat_map(|&f| std::iter::repeat(f).take(d)).collect();
    Pfa::new(
        states,
        m.alphabet().clone(),
        m.initial() * d,
        expand(m.left())?,
        m.letter_matrices().iter().map(expand).collect::<Result<_>>()?,
        expand(m.right())?,
        finals,
    )
}

/// Token `(τ,k,j)` of the annotated advice alphabet.
pub fn annotated(tau: &Symbol, k: usize, j: usize) -> Symbol {
    sym(&format!("({tau},{k},{j})"))
}

/// Token `($,k,j)` carried by the extra final advice cell.
pub fn end_token(k: usize, j: usize) -> Symbol {
    sym(&format!("($,{k},{j})"))
}

/// Successor lists: `succ[i]` are the states reached from `i` with weight
/// `1/d`, in state order.
fn successors(m: &StochasticMatrix<Rational>) -> Vec<Vec<usize>> {
    (0..m.dim())
        .map(|i| {
            m.row(i)
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// Replaces a uniform-`1/d` machine `M` with randomized advice `D` by a DFA
/// with randomized advice over annotated symbols.
///
/// The advice for inputs of length `n` has length `n+1`. Cell `i ≤ n` carries
/// `(τ_i,k_i,j_i)`: the DFA takes the `k_i`-th successor under `<σ_i|τ_i>`,
/// and on the first cell it first takes the `j_1`-th successor under `¢`.
/// The extra cell `($,k,j)` fixes the successor under `$` (and under `¢`
/// when `n = 0`). The annotated ensemble gives each string
/// `D_n(τ)/d^{n+2}`, so acceptance probabilities are preserved exactly.
pub fn derandomize(m: &Pfa, ensemble: &AdviceEnsemble) -> Result<(Dfa, AdviceEnsemble)> {
    let d = uniform_denominator(m)
        .ok_or_else(|| Error::NotUniformD("some non-zero entry differs from 1/d".into()))?;
    let cells: Vec<(Symbol, Symbol)> = m
        .alphabet()
        .symbols()
        .iter()
        .map(|s| match TrackSymbol::parse(s) {
            Some(TrackSymbol { upper: Some(u), lower: Some(l) }) => Ok((u, l)),
            _ => Err(Error::MalformedMachine(format!("`{s}` is not a two-track cell"))),
        })
        .collect::<Result<_>>()?;

    let mut symbols = Vec::new();
    for (u, l) in &cells {
        for k in 1..=d {
            for j in 1..=d {
                symbols.push(u.over(&annotated(l, k, j)));
            }
        }
    }
    let end_cell = |k: usize, j: usize| {
        TrackSymbol::new(None, Some(end_token(k, j))).expect("half-blank cell").to_symbol()
    };
    for k in 1..=d {
        for j in 1..=d {
            symbols.push(end_cell(k, j));
        }
    }
    let alphabet = Alphabet::new(symbols)?;

    let n = m.dim();
    let mut names = vec!["init".to_string(), "fresh".to_string()];
    names.extend(m.states().iter().map(|s| format!("m:{s}")));
    names.push("acc".into());
    names.push("rej".into());
    let (init, fresh, off, acc, rej) = (0, 1, 2, n + 2, n + 3);
    let mut b = DfaBuilder::with_states(alphabet.clone(), names);

    let left = successors(m.left());
    let right = successors(m.right());
    let start = m.initial();
    let verdict = |q: usize| if m.finals()[q] { acc } else { rej };

    for s in alphabet.symbols() {
        for q in [init, acc, rej] {
            b.set(q, &Step::Letter(s.clone()), rej)?;
        }
    }
    for (a, (u, l)) in cells.iter().enumerate() {
        let succ = successors(&m.letter_matrices()[a]);
        for k in 1..=d {
            for j in 1..=d {
                let step = Step::Letter(u.over(&annotated(l, k, j)));
                b.set(fresh, &step, off + succ[left[start][j - 1]][k - 1])?;
                for q in 0..n {
                    b.set(off + q, &step, off + succ[q][k - 1])?;
                }
            }
        }
    }
    for k in 1..=d {
        for j in 1..=d {
            let step = Step::Letter(end_cell(k, j));
            b.set(fresh, &step, verdict(right[left[start][j - 1]][k - 1]))?;
            for q in 0..n {
                b.set(off + q, &step, verdict(right[q][k - 1]))?;
            }
        }
    }
    b.set(init, &Step::Left, fresh)?;
    for q in 0..n + 4 {
        if q != init {
            b.set(q, &Step::Left, rej)?;
        }
        b.set(q, &Step::Right, if q == acc { acc } else { rej })?;
    }
    b.accept(acc).reject(rej);
    let dfa = b.build(init)?;

    let source = ensemble.clone();
    let mut lowers: Vec<Symbol> = Vec::new();
    for s in alphabet.symbols() {
        let l = TrackSymbol::parse(s).and_then(|t| t.lower).expect("annotated cell");
        if !lowers.contains(&l) {
            lowers.push(l);
        }
    }
    let gamma = Alphabet::new(lowers)?;
    let annotated_ensemble = AdviceEnsemble::from_fn(gamma, LengthPolicy::Linear { c: 1, d: 1 }, move |len| {
        let dist = source.at(len)?;
        if dist.length() != len {
            return Err(Error::SupportLength { n: len, expected: len, found: dist.length() });
        }
        let choices = d.checked_pow(len as u32 + 2).filter(|&c| c.saturating_mul(dist.support().len()) <= MAX_SUPPORT);
        let Some(choices) = choices else {
            return Err(Error::ScaleLimit(format!("annotated support for length {len} is too large")));
        };
        let scale = Rational::from_integer(BigInt::from(choices));
        let mut entries = Vec::with_capacity(choices * dist.support().len());
        for (y, p) in dist.support() {
            let weight = p / &scale;
            // digits: j for ¢, k_1..k_n, k for $
            let mut digits = vec![1usize; len + 2];
            loop {
                let mut w = Vec::with_capacity(len + 1);
                for (i, tau) in y.iter().enumerate() {
                    let j = if i == 0 { digits[0] } else { 1 };
                    w.push(annotated(tau, digits[i + 1], j));
                }
                let j_end = if len == 0 { digits[0] } else { 1 };
                w.push(end_token(digits[len + 1], j_end));
                entries.push((w, weight.clone()));
                let Some(pos) = (0..digits.len()).rev().find(|&i| digits[i] < d) else {
                    break;
                };
                digits[pos] += 1;
                for x in &mut digits[pos + 1..] {
                    *x = 1;
                }
            }
        }
        Distribution::new(entries)
    });
    Ok((dfa, annotated_ensemble))
}
