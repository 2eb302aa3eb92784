//! Combinators on PFAs: tensor products, final-set flips, weighted mixtures
//! and two-copy amplification over paired advice.

use num_traits::{One, Zero};

use crate::alphabet::{Alphabet, TrackSymbol};
use crate::automata::{Pfa, Step};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational, RowVector, StochasticMatrix};

/// Runs `a` and `b` side by side on the same input; `accept` decides the
/// final set from the two component verdicts.
pub fn tensor(a: &Pfa, b: &Pfa, accept: impl Fn(bool, bool) -> bool) -> Result<Pfa> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch("tensor of machines over different alphabets".into()));
    }
    let mut states = Vec::with_capacity(a.dim() * b.dim());
    let mut finals = Vec::with_capacity(a.dim() * b.dim());
    for (p, fp) in a.states().iter().zip(a.finals()) {
        for (q, fq) in b.states().iter().zip(b.finals()) {
            states.push(format!("({p},{q})"));
            finals.push(accept(*fp, *fq));
        }
    }
    Pfa::new(
        states,
        a.alphabet().clone(),
        a.initial() * b.dim() + b.initial(),
        a.left().kron(b.left()),
        a.letter_matrices()
            .iter()
            .zip(b.letter_matrices())
            .map(|(x, y)| x.kron(y))
            .collect(),
        a.right().kron(b.right()),
        finals,
    )
}

/// The same machine with `F` replaced by `Q − F`.
pub fn flip_finals(m: &Pfa) -> Pfa {
    Pfa::new(
        m.states().to_vec(),
        m.alphabet().clone(),
        m.initial(),
        m.left().clone(),
        m.letter_matrices().to_vec(),
        m.right().clone(),
        m.finals().iter().map(|f| !f).collect(),
    )
    .expect("flipping finals keeps the machine well formed")
}

/// A fresh start state whose `¢` step picks component `c` with probability
/// `w_c` and then performs that component's own `¢` step; afterwards the
/// components run independently. The acceptance probability is
/// `Σ_c w_c · p_c`.
pub fn mixture(components: &[(Rational, &Pfa)]) -> Result<Pfa> {
    let Some((_, first)) = components.first() else {
        return Err(Error::MalformedMachine("empty mixture".into()));
    };
    let alphabet = first.alphabet().clone();
    let total = components.iter().fold(Rational::zero(), |acc, (w, _)| acc + w);
    if !total.is_one() || components.iter().any(|(w, _)| *w < Rational::zero()) {
        return Err(Error::InvalidDistribution(format!("mixture weights sum to {total}")));
    }
    let mut states = vec!["start".to_string()];
    let mut finals = vec![false];
    let mut offsets = Vec::with_capacity(components.len());
    for (c, (_, m)) in components.iter().enumerate() {
        if m.alphabet() != &alphabet {
            return Err(Error::AlphabetMismatch("mixture components differ in alphabet".into()));
        }
        offsets.push(states.len());
        states.extend(m.states().iter().map(|s| format!("{c}:{s}")));
        finals.extend_from_slice(m.finals());
    }
    let dim = states.len();
    let block = |pick: &dyn Fn(&Pfa) -> &StochasticMatrix<Rational>| -> Matrix<Rational> {
        let mut out = Matrix::zeros(dim, dim);
        out.set(0, 0, Rational::one());
        for ((_, m), &o) in components.iter().zip(&offsets) {
            let src = pick(m);
            for i in 0..m.dim() {
                for (j, x) in src.row(i).iter().enumerate() {
                    if !x.is_zero() {
                        out.set(o + i, o + j, x.clone());
                    }
                }
            }
        }
        out
    };
    let mut left = block(&|m: &Pfa| m.left());
    left.set(0, 0, Rational::zero());
    for ((w, m), &o) in components.iter().zip(&offsets) {
        for (j, x) in m.left().row(m.initial()).iter().enumerate() {
            if !x.is_zero() {
                let cur = left.get(0, o + j).clone();
                left.set(0, o + j, cur + w * x);
            }
        }
    }
    let letters = (0..alphabet.len())
        .map(|a| StochasticMatrix::new(block(&|m: &Pfa| &m.letter_matrices()[a])))
        .collect::<Result<_>>()?;
    Pfa::new(
        states,
        alphabet,
        0,
        StochasticMatrix::new(left)?,
        letters,
        StochasticMatrix::new(block(&|m: &Pfa| m.right()))?,
        finals,
    )
}

/// Two independent copies of an advised machine reading paired advice: on
/// the cell `<σ|<u|l>>` the first copy reads `<σ|u>` and the second reads
/// `<σ|l>`. Accepts iff both copies accept.
pub fn amplify(m: &Pfa, sigma: &Alphabet, gamma: &Alphabet) -> Result<Pfa> {
    let product = tensor(m, m, |a, b| a && b)?;
    let paired = gamma.tracks(gamma);
    let mut cells = Vec::new();
    let mut letters = Vec::new();
    for s in sigma.symbols() {
        for pair in paired.symbols() {
            let t = TrackSymbol::parse(pair).expect("paired advice symbol");
            let (u, l) = (t.upper.expect("upper"), t.lower.expect("lower"));
            let mu = m.matrix(&Step::Letter(s.over(&u)))?;
            let ml = m.matrix(&Step::Letter(s.over(&l)))?;
            cells.push(s.over(pair));
            letters.push(mu.kron(ml));
        }
    }
    Pfa::new(
        product.states().to_vec(),
        Alphabet::new(cells)?,
        product.initial(),
        product.left().clone(),
        letters,
        product.right().clone(),
        product.finals().to_vec(),
    )
}

/// Total mass of `v` on the given states.
pub fn block_mass(v: &RowVector<Rational>, states: &[usize]) -> Rational {
    states.iter().fold(Rational::zero(), |acc, &i| acc + &v[i])
}
