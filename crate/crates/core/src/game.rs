//! Advice as a zero-sum game: the advice player picks `y ∈ Γ^n`, the input
//! player picks `x ∈ Σ^n`, and the advice player wins when the machine
//! classifies `⟨x, y⟩` correctly.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::advice::{AdviceEnsemble, AdviceFunction, Distribution, LengthPolicy};
use crate::alphabet::{render, track_word, Alphabet, Word};
use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::languages::Language;
use crate::linalg::{solve_zero_sum, Matrix, Rational};

/// Enumeration limits for [`payoff_matrix_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GameBudget {
    pub max_inputs: usize,
    pub max_columns: usize,
}

impl Default for GameBudget {
    fn default() -> Self {
        GameBudget { max_inputs: 4096, max_columns: 4096 }
    }
}

/// `P_{x,y} = 1` iff the machine is right on `⟨x, y⟩`. Rows are inputs,
/// columns advice strings, both in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PayoffMatrix {
    pub n: usize,
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub inputs: Vec<Word>,
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub advice: Vec<Word>,
    #[serde(serialize_with = "serialize_grid")]
    pub grid: Matrix<Rational>,
    /// Set when the columns are a subsample of `Γ^n`; the game then says
    /// nothing about the omitted advice strings.
    pub subsampled: bool,
}

fn serialize_grid<S: serde::Serializer>(m: &Matrix<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    rows.serialize(s)
}

impl PayoffMatrix {
    /// Wraps a bare grid, labelling rows and columns by their indices.
    pub fn from_grid(grid: Matrix<Rational>) -> PayoffMatrix {
        let label = |k: usize| (0..k).map(|i| vec![crate::alphabet::sym(&i.to_string())]).collect();
        PayoffMatrix { n: 1, inputs: label(grid.rows()), advice: label(grid.cols()), grid, subsampled: false }
    }

    /// `Σ_y ρ(y) P_{x,y}` for every input `x`.
    pub fn advice_success(&self, rho: &Distribution) -> Vec<Rational> {
        let weights: Vec<Rational> = self.advice.iter().map(|y| rho.probability(y)).collect();
        (0..self.grid.rows())
            .map(|i| self.grid.row(i).iter().zip(&weights).fold(Rational::zero(), |acc, (p, w)| acc + p * w))
            .collect()
    }

    /// `Σ_x μ(x) P_{x,y}` for every advice string `y`.
    pub fn input_success(&self, mu: &Distribution) -> Vec<Rational> {
        let weights: Vec<Rational> = self.inputs.iter().map(|x| mu.probability(x)).collect();
        (0..self.grid.cols())
            .map(|j| (0..self.grid.rows()).fold(Rational::zero(), |acc, i| acc + self.grid.get(i, j) * &weights[i]))
            .collect()
    }
}

/// Builds the game of `M` against `A` at length `n` with the default budget.
pub fn payoff_matrix(m: &Dfa, lang: &Language, n: usize, gamma: &Alphabet) -> Result<PayoffMatrix> {
    payoff_matrix_with(m, lang, n, gamma, &GameBudget::default())
}

fn count_within(alphabet: &Alphabet, n: usize, limit: usize, what: &str) -> Result<()> {
    match alphabet.count_words(n) {
        Some(k) if k <= limit => Ok(()),
        _ => Err(Error::ScaleLimit(format!("{what}: |{}|^{n} exceeds {limit}", alphabet.len()))),
    }
}

pub fn payoff_matrix_with(
    m: &Dfa,
    lang: &Language,
    n: usize,
    gamma: &Alphabet,
    budget: &GameBudget,
) -> Result<PayoffMatrix> {
    count_within(lang.alphabet(), n, budget.max_inputs, "inputs")?;
    count_within(gamma, n, budget.max_columns, "advice columns")?;
    let mut p = payoff_columns(m, lang, n, gamma.words(n).collect())?;
    p.subsampled = false;
    Ok(p)
}

/// The game restricted to the given advice columns.
pub fn payoff_columns(m: &Dfa, lang: &Language, n: usize, advice: Vec<Word>) -> Result<PayoffMatrix> {
    if advice.is_empty() {
        return Err(Error::SupportMismatch("no advice columns".into()));
    }
    if let Some(y) = advice.iter().find(|y| y.len() != n) {
        return Err(Error::SupportMismatch(format!("advice `{}` does not have length {n}", render(y))));
    }
    let inputs: Vec<Word> = lang.alphabet().words(n).collect();
    let rows = inputs
        .par_iter()
        .map(|x| {
            let member = lang.contains(x);
            advice
                .iter()
                .map(|y| {
                    let accepted = m.run(&track_word(x, y)?)?.accepted;
                    Ok(if accepted == member { Rational::one() } else { Rational::zero() })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PayoffMatrix { n, inputs, advice, grid: Matrix::from_rows(rows)?, subsampled: true })
}

/// `k` distinct advice strings of length `n` drawn uniformly with a seeded
/// generator, in lexicographic order.
pub fn sample_columns(gamma: &Alphabet, n: usize, k: usize, seed: u64) -> Result<Vec<Word>> {
    let total = gamma
        .count_words(n)
        .ok_or_else(|| Error::ScaleLimit(format!("|{}|^{n} overflows", gamma.len())))?;
    let mut picked = rand::seq::index::sample(&mut crate::fixtures::rng(seed), total, k.min(total)).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|mut i| {
            let mut w = vec![gamma.get(0).clone(); n];
            for slot in w.iter_mut().rev() {
                *slot = gamma.get(i % gamma.len()).clone();
                i /= gamma.len();
            }
            w
        })
        .collect())
}

/// Optimal strategies of both players and the value of the game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameSolution {
    #[serde(with = "crate::linalg::serde_rational")]
    pub value: Rational,
    /// `ρ_n`, maximizing the worst-case success over inputs.
    pub advice: Distribution,
    /// `μ_n`, minimizing the best-case success over advice strings.
    pub input: Distribution,
}

impl GameSolution {
    /// `ρ_n` as an ensemble defined at length `n` only.
    pub fn ensemble(&self, gamma: Alphabet, n: usize) -> AdviceEnsemble {
        let table = BTreeMap::from([(n, self.advice.clone())]);
        AdviceEnsemble::tabulated(gamma, LengthPolicy::Exact, table)
    }
}

fn distribution(labels: &[Word], weights: Vec<Rational>) -> Result<Distribution> {
    Distribution::new(labels.iter().cloned().zip(weights).collect())
}

/// Solves the game with the advice player maximizing.
pub fn optimal_randomized_advice(p: &PayoffMatrix) -> Result<GameSolution> {
    let g = solve_zero_sum(&p.grid.transpose())?;
    Ok(GameSolution {
        value: g.value,
        advice: distribution(&p.advice, g.row_strategy)?,
        input: distribution(&p.inputs, g.col_strategy)?,
    })
}

/// A hardest input distribution and the advice string that does best
/// against it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    pub input: Distribution,
    #[serde(with = "crate::alphabet::serde_word")]
    pub best_advice: Word,
    /// `Σ_x μ(x) P_{x,y*}`.
    #[serde(with = "crate::linalg::serde_rational")]
    pub attained: Rational,
}

/// Solves the game from the input player's side, as the maximizer of the
/// error grid `1 − P`, then picks the lexicographically first best reply.
pub fn worst_case_distribution(p: &PayoffMatrix) -> Result<WorstCase> {
    let error = p.grid.map(|v| Rational::one() - v);
    let g = solve_zero_sum(&error)?;
    let input = distribution(&p.inputs, g.row_strategy)?;
    let success = p.input_success(&input);
    let (best, attained) = success
        .into_iter()
        .enumerate()
        .fold(None::<(usize, Rational)>, |best, (j, v)| match best {
            Some((_, ref b)) if *b >= v => best,
            _ => Some((j, v)),
        })
        .expect("at least one column");
    Ok(WorstCase { input, best_advice: p.advice[best].clone(), attained })
}

/// Outcome of [`averreg_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageCase {
    /// `Σ_{x: M(⟨x,h(n)⟩) = A(x)} μ(x)`.
    #[serde(with = "crate::linalg::serde_rational")]
    pub success: Rational,
    #[serde(with = "crate::alphabet::serde_word::vec")]
    pub misclassified: Vec<Word>,
    pub passed: bool,
}

/// Success mass of `(M, h)` on `μ`; passes iff it is at least `1 − ε`.
pub fn averreg_check(
    m: &Dfa,
    h: &AdviceFunction,
    mu: &Distribution,
    lang: &Language,
    n: usize,
    epsilon: &Rational,
) -> Result<AverageCase> {
    if mu.length() != n {
        return Err(Error::SupportMismatch(format!("distribution over length {}, expected {n}", mu.length())));
    }
    for (x, _) in mu.support() {
        lang.alphabet().check_word(x).map_err(|e| Error::SupportMismatch(e.to_string()))?;
    }
    let y = h.advice(n)?;
    let mut success = Rational::zero();
    let mut misclassified = Vec::new();
    for (x, w) in mu.support() {
        if m.run(&track_word(x, &y)?)?.accepted == lang.contains(x) {
            success += w;
        } else {
            misclassified.push(x.clone());
        }
    }
    let passed = success >= Rational::one() - epsilon;
    Ok(AverageCase { success, misclassified, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{sym, word};
    use crate::automata::DfaBuilder;
    use crate::constructions::palhash_rn;
    use crate::criteria::density_ell;
    use crate::fixtures::{random_advised_dfa, random_language, random_payoff, rng};
    use crate::languages::pal_alphabet;
    use crate::linalg::q;

    fn grid(rows: &[&[i64]]) -> PayoffMatrix {
        PayoffMatrix::from_grid(Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()).unwrap())
    }

    /// Ignores the advice track and accepts iff the last letter is `1`.
    fn last_is_one() -> Dfa {
        let sigma = Alphabet::binary();
        let tracks = sigma.tracks(&sigma);
        let mut b = DfaBuilder::new(tracks.clone(), &["zero", "one", "acc", "rej"]);
        for cell in tracks.symbols() {
            let upper = crate::alphabet::TrackSymbol::parse(cell).unwrap().upper.unwrap();
            let to = if upper.as_str() == "1" { 1 } else { 0 };
            b.set(0, &crate::automata::Step::Letter(cell.clone()), to).unwrap();
            b.set(1, &crate::automata::Step::Letter(cell.clone()), to).unwrap();
        }
        b.set(0, &crate::automata::Step::Right, 3).unwrap();
        b.set(1, &crate::automata::Step::Right, 2).unwrap();
        b.accept(2).reject(3);
        b.build(0).unwrap()
    }

    fn ends_in_one() -> Language {
        Language::new("ends-in-1", Alphabet::binary(), |x| x.last().is_some_and(|s| s.as_str() == "1"))
    }

    #[test]
    fn oblivious_machines_give_constant_grids() {
        let m = last_is_one();
        let right = payoff_matrix(&m, &ends_in_one(), 3, &Alphabet::binary()).unwrap();
        assert!(right.grid.entries().all(|v| v.is_one()));
        let wrong = payoff_matrix(&m, &ends_in_one().complement(), 3, &Alphabet::binary()).unwrap();
        assert!(wrong.grid.entries().all(|v| v.is_zero()));
        assert_eq!(optimal_randomized_advice(&right).unwrap().value, q(1, 1));
        let wc = worst_case_distribution(&right).unwrap();
        assert_eq!((wc.attained, wc.best_advice), (q(1, 1), word("0 0 0")));
    }

    #[test]
    fn diagonal_game() {
        let p = grid(&[&[1, 0], &[0, 1]]);
        let s = optimal_randomized_advice(&p).unwrap();
        assert_eq!(s.value, q(1, 2));
        assert_eq!(s.advice.support().len(), 2);
        let wc = worst_case_distribution(&p).unwrap();
        assert_eq!(wc.attained, q(1, 2));
        assert!(wc.input.support().iter().all(|(_, w)| *w == q(1, 2)));
        assert_eq!(wc.best_advice, vec![sym("0")]);
    }

    #[test]
    fn parity_comparator_by_hand() {
        // accepts iff input and advice agree on their single cell
        let sigma = Alphabet::binary();
        let tracks = sigma.tracks(&sigma);
        let mut b = DfaBuilder::new(tracks, &["start", "same", "diff", "acc", "rej"]);
        for (x, y) in [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")] {
            let to = if x == y { 1 } else { 2 };
            b.set(0, &crate::automata::Step::Letter(sym(x).over(&sym(y))), to).unwrap();
        }
        b.set(1, &crate::automata::Step::Right, 3).unwrap();
        b.set(2, &crate::automata::Step::Right, 4).unwrap();
        b.accept(3).reject(4);
        let m = b.build(0).unwrap();
        let lang = Language::new("is-1", sigma.clone(), |x| x == [sym("1")]);
        let p = payoff_matrix(&m, &lang, 1, &sigma).unwrap();
        // x=0: correct iff rejected iff y=1; x=1: correct iff y=1
        assert_eq!(p.grid, grid(&[&[0, 1], &[0, 1]]).grid);
        assert_eq!(optimal_randomized_advice(&p).unwrap().value, q(1, 1));
    }

    #[test]
    fn random_games_satisfy_duality() {
        let mut r = rng(11);
        for k in 1..=12 {
            let p = PayoffMatrix::from_grid(random_payoff(&mut r, 1 + k % 8, 8));
            let s = optimal_randomized_advice(&p).unwrap();
            let wc = worst_case_distribution(&p).unwrap();
            assert_eq!(s.value, wc.attained);
            assert!(p.advice_success(&s.advice).iter().all(|v| *v >= s.value));
            assert!(p.input_success(&wc.input).iter().all(|v| *v <= s.value));
            assert!(s.value >= Rational::zero() && s.value <= Rational::one());
        }
    }

    #[test]
    fn palhash_game_beats_the_error_bound() {
        let (pfa, _) = palhash_rn(false).unwrap();
        let m = Dfa::from_pfa(&pfa).unwrap();
        let sigma = pal_alphabet();
        let p = payoff_matrix(&m, &Language::pal_hash(), 3, &sigma).unwrap();
        let s = optimal_randomized_advice(&p).unwrap();
        assert!(s.value >= q(1, 2));
        let wc = worst_case_distribution(&p).unwrap();
        assert_eq!(wc.attained, s.value);
        // statement (*): the best reply to μ has error at most 1/2 on μ
        let h = AdviceFunction::single(sigma.clone(), 3, wc.best_advice.clone());
        let avg = averreg_check(&m, &h, &wc.input, &Language::pal_hash(), 3, &q(1, 2)).unwrap();
        assert!(avg.passed);
        assert_eq!(avg.success, wc.attained);
        // a single support string of the ensemble, uniform inputs
        let y = word("1 # 1");
        let uniform = Distribution::uniform(sigma.words(3).collect()).unwrap();
        let h = AdviceFunction::single(sigma, 3, y);
        let avg = averreg_check(&m, &h, &uniform, &Language::pal_hash(), 3, &q(1, 2)).unwrap();
        assert!(avg.success >= q(1, 2));
    }

    #[test]
    fn averreg_edge_cases() {
        let m = last_is_one();
        let sigma = Alphabet::binary();
        let h = AdviceFunction::single(sigma.clone(), 2, word("0 0"));
        let lang = ends_in_one();
        let point = Distribution::point(word("0 1"));
        assert_eq!(averreg_check(&m, &h, &point, &lang, 2, &q(0, 1)).unwrap().success, q(1, 1));
        let wrong = averreg_check(&m, &h, &point, &lang.complement(), 2, &q(0, 1)).unwrap();
        assert!(!wrong.passed && wrong.misclassified == vec![word("0 1")]);
        assert!(matches!(averreg_check(&m, &h, &point, &lang, 3, &q(0, 1)), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn uniform_error_is_density_offset() {
        let mut r = rng(3);
        let sigma = Alphabet::binary();
        let n = 4;
        for i in 0..8 {
            let m = random_advised_dfa(&mut r, 3, &sigma, &sigma).unwrap();
            let a = random_language(&mut r, &sigma, n);
            let h = crate::fixtures::random_advice(i, sigma.clone());
            let y = h.advice(n).unwrap();
            let defined = m.clone();
            let b = Language::new("B", sigma.clone(), move |x| defined.run(&track_word(x, &y).unwrap()).unwrap().accepted);
            let uniform = Distribution::uniform(sigma.words(n).collect()).unwrap();
            let check = averreg_check(&m, &h, &uniform, &a, n, &q(0, 1)).unwrap();
            let error = Rational::one() - check.success;
            let differing = sigma.words(n).filter(|x| a.contains(x) != b.contains(x)).count();
            assert_eq!(error, q(differing as i64, 16));
            assert_eq!(crate::linalg::abs(&(error - q(1, 2))), density_ell(&a, &b, n).unwrap());
        }
    }

    #[test]
    fn sampled_columns_are_distinct_words() {
        let sigma = Alphabet::binary();
        let cols = sample_columns(&sigma, 4, 5, 9).unwrap();
        assert_eq!(cols.len(), 5);
        assert!(cols.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_columns(&sigma, 2, 10, 9).unwrap(), sigma.words(2).collect::<Vec<_>>());
    }

    #[test]
    fn budget_is_enforced() {
        let tight = GameBudget { max_inputs: 4, max_columns: 4096 };
        let err = payoff_matrix_with(&last_is_one(), &ends_in_one(), 3, &Alphabet::binary(), &tight);
        assert!(matches!(err, Err(Error::ScaleLimit(_))));
    }
}
