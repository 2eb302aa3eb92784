//! Machines for `Dup = {ww}`: exact-half recognizers with center-marking
//! advice, and a bounded-error recognizer with randomized advice.

use crate::advice::{AdviceEnsemble, AdviceFunction, Distribution, LengthPolicy};
use crate::alphabet::{sym, Alphabet, Symbol, Word};
use crate::automata::{Pfa, PfaBuilder, PfaFamily, Step};
use crate::error::Result;
use crate::linalg::{pow2_inv, q, Rational};

use super::compose::amplify;

/// Advice alphabet `{a, b, c, r}` shared by both exact-half builders.
pub fn dup_advice_alphabet() -> Alphabet {
    Alphabet::from_tokens("a b c r").expect("static alphabet")
}

/// `h(2n) = a^{n−1} b c^n`; odd lengths get `r^N`, which forces rejection.
pub fn dup_advice() -> AdviceFunction {
    AdviceFunction::from_fn(dup_advice_alphabet(), LengthPolicy::Exact, |len| {
        if len % 2 == 1 {
            return vec![sym("r"); len];
        }
        let n = len / 2;
        let mut w = Vec::with_capacity(len);
        w.extend(std::iter::repeat(sym("a")).take(n.saturating_sub(1)));
        if n > 0 {
            w.push(sym("b"));
        }
        w.extend(std::iter::repeat(sym("c")).take(n));
        w
    })
}

fn cell(x: &str, y: &str) -> Symbol {
    sym(x).over(&sym(y))
}

const Q0: usize = 0;
const Q1: usize = 1;
const Q2: usize = 2;
const Q3: usize = 3;
const ACC: usize = 4;
const REJ: usize = 5;

/// First-half step on input bit `bit`: `q2` releases half its mass to `q0`
/// (bit 0) or `q1` (bit 1).
fn half_step(bit: u8) -> Vec<Vec<(usize, Rational)>> {
    let target = if bit == 0 { Q0 } else { Q1 };
    vec![
        vec![(Q0, q(1, 1))],
        vec![(Q1, q(1, 1))],
        vec![(target, q(1, 2)), (Q2, q(1, 2))],
        vec![(Q3, q(1, 1))],
    ]
}

/// The center matrix for input length `2n`; `c = 2^{-(n−1)}`, or `1/2` when
/// `n ≤ 1` so that `1 − 2c` stays non-negative.
fn middle(n: usize) -> Vec<Vec<(usize, Rational)>> {
    let c = if n >= 2 { pow2_inv((n - 1) as u32) } else { q(1, 2) };
    let rest = q(1, 1) - &c * q(2, 1);
    vec![
        vec![(Q0, c.clone()), (Q2, c.clone()), (Q3, rest.clone())],
        vec![(Q1, c.clone()), (Q2, c.clone()), (Q3, rest)],
        vec![(Q2, c.clone()), (Q3, q(1, 1) - &c)],
        vec![(Q3, q(1, 1))],
    ]
}

/// Sparse product of two 4×4 row lists.
fn compose(a: &[Vec<(usize, Rational)>], b: &[Vec<(usize, Rational)>]) -> Vec<Vec<(usize, Rational)>> {
    a.iter()
        .map(|row| {
            let mut acc = vec![q(0, 1); 4];
            for (k, p) in row {
                for (j, r) in &b[*k] {
                    acc[*j] += p * r;
                }
            }
            acc.into_iter()
                .enumerate()
                .filter(|(_, x)| *x != q(0, 1))
                .collect()
        })
        .collect()
}

fn family_states() -> Vec<String> {
    ["q0", "q1", "q2", "q3", "acc", "rej"].iter().map(|s| s.to_string()).collect()
}

fn family_member(len: usize) -> Result<Pfa> {
    let sigma = Alphabet::binary();
    let track = sigma.tracks(&dup_advice_alphabet());
    let mut b = PfaBuilder::new(track, family_states());
    b.go(&Step::Left, Q0, Q2)?;
    let n = len / 2;
    for (bit, x) in [(0u8, "0"), (1u8, "1")] {
        let first = half_step(bit);
        let centre = compose(&first, &middle(n));
        // second half swaps the roles of the two bits
        let second = half_step(1 - bit);
        for (adv, rows) in [("a", &first), ("b", &centre), ("c", &second)] {
            for (i, row) in rows.iter().enumerate() {
                b.row(&Step::Letter(cell(x, adv)), i, row)?;
            }
        }
        for i in 0..6 {
            b.go(&Step::Letter(cell(x, "r")), i, REJ)?;
        }
    }
    b.go(&Step::Right, Q0, REJ)?;
    b.go(&Step::Right, Q1, ACC)?;
    b.row(&Step::Right, Q2, &[(ACC, q(1, 2)), (REJ, q(1, 2))])?;
    b.row(&Step::Right, Q3, &[(ACC, q(1, 2)), (REJ, q(1, 2))])?;
    b.final_state(ACC);
    b.build(Q0)
}

/// Per-length four-state machine (plus halting states) with
/// `p(ww') = 1/2 ⇔ w = w'` under [`dup_advice`].
pub fn dup_cequal_family() -> (PfaFamily, AdviceFunction) {
    let sigma = Alphabet::binary();
    let family = PfaFamily::new(sigma.tracks(&dup_advice_alphabet()), family_states(), family_member);
    (family, dup_advice())
}

/// Length-independent machine: component X accumulates `Σ_{w_i=1} 2^{-i}` on
/// the first half, component Y does the same on the second half, and
/// `p = 1/2 + (p_X − p_Y)/2`.
pub fn dup_cequal_uniform() -> Result<(Pfa, AdviceFunction)> {
    let sigma = Alphabet::binary();
    let names = ["start", "x-live", "x-one", "x-zero", "y-live", "y-one", "y-zero", "acc", "rej"];
    let mut b = PfaBuilder::new(sigma.tracks(&dup_advice_alphabet()), names.iter().map(|s| s.to_string()).collect());
    let [start, x_live, x_one, x_zero, y_live, y_one, y_zero, acc, rej] = [0, 1, 2, 3, 4, 5, 6, 7, 8];
    b.row(&Step::Left, start, &[(x_live, q(1, 2)), (y_live, q(1, 2))])?;
    for x in ["0", "1"] {
        let (xt, yt) = if x == "1" { (x_one, y_one) } else { (x_zero, y_zero) };
        for adv in ["a", "b"] {
            b.row(&Step::Letter(cell(x, adv)), x_live, &[(x_live, q(1, 2)), (xt, q(1, 2))])?;
        }
        b.row(&Step::Letter(cell(x, "c")), y_live, &[(y_live, q(1, 2)), (yt, q(1, 2))])?;
        for i in 0..names.len() {
            b.go(&Step::Letter(cell(x, "r")), i, rej)?;
        }
    }
    for (from, to) in [(x_one, acc), (x_zero, rej), (x_live, acc), (y_one, rej), (y_zero, acc), (y_live, rej)] {
        b.go(&Step::Right, from, to)?;
    }
    b.row(&Step::Right, start, &[(acc, q(1, 2)), (rej, q(1, 2))])?;
    b.final_state(acc);
    Ok((b.build(start)?, dup_advice()))
}

/// Advice alphabet `{0, 1, 0', 1'}`; primed bits mark the second half.
pub fn dup_rn_alphabet() -> Alphabet {
    Alphabet::from_tokens("0 1 0' 1'").expect("static alphabet")
}

fn marked(y: &[Symbol]) -> Word {
    y.iter().map(|s| sym(&format!("{}'", s.as_str()))).collect()
}

/// Uniform over `y·y'` for `y ∈ {0,1}^n` (primed copy) on length `2n`; a point
/// mass on `0^N` for odd `N`.
pub fn dup_rn_ensemble() -> AdviceEnsemble {
    AdviceEnsemble::from_fn(dup_rn_alphabet(), LengthPolicy::Exact, |len| {
        if len % 2 == 1 {
            return Ok(Distribution::point(vec![sym("0"); len]));
        }
        let support = Alphabet::binary()
            .words(len / 2)
            .map(|y| {
                let mut w = y.clone();
                w.extend(marked(&y));
                w
            })
            .collect();
        Distribution::uniform(support)
    })
}

/// Compares `u⊙y` with `v⊙y` on input `uv`: members are accepted with
/// certainty, non-members with probability 1/2 (1/4 when amplified).
pub fn dup_rn(amplified: bool) -> Result<(Pfa, AdviceEnsemble)> {
    let sigma = Alphabet::binary();
    let gamma = dup_rn_alphabet();
    let names = ["start", "ph1-0", "ph1-1", "ph2-0", "ph2-1", "acc", "rej"];
    let mut b = PfaBuilder::new(sigma.tracks(&gamma), names.iter().map(|s| s.to_string()).collect());
    let [start, p10, p11, p20, p21, acc, rej] = [0, 1, 2, 3, 4, 5, 6];
    for x in ["0", "1"] {
        for (y, primed) in [("0", false), ("1", false), ("0'", true), ("1'", true)] {
            let flip = x == "1" && y.starts_with('1');
            let step = Step::Letter(cell(x, y));
            // parity-0 and parity-1 states of the phase this cell belongs to
            let (t0, t1) = if primed { (p20, p21) } else { (p10, p11) };
            let (even, odd) = if flip { (t1, t0) } else { (t0, t1) };
            b.go(&step, p10, even)?;
            b.go(&step, p11, odd)?;
            if primed {
                b.go(&step, start, rej)?;
                b.go(&step, p20, even)?;
                b.go(&step, p21, odd)?;
            } else {
                b.go(&step, start, even)?;
                b.go(&step, p20, rej)?;
                b.go(&step, p21, rej)?;
            }
        }
    }
    b.go(&Step::Right, start, acc)?;
    b.go(&Step::Right, p10, rej)?;
    b.go(&Step::Right, p11, rej)?;
    b.go(&Step::Right, p20, acc)?;
    b.go(&Step::Right, p21, rej)?;
    b.final_state(acc);
    let single = b.build(start)?;
    let ensemble = dup_rn_ensemble();
    if !amplified {
        return Ok((single, ensemble));
    }
    Ok((amplify(&single, &sigma, &gamma)?, super::randomized::paired_ensemble(ensemble)))
}
