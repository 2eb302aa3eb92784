//! Exact zero-sum game solving through a tableau simplex with Bland's rule.

use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::scalar::Scalar;

/// Value and optimal mixed strategies of a zero-sum game whose rows belong to
/// the maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct GameValue<T> {
    pub value: T,
    /// Maximizer's mixed strategy over rows.
    pub row_strategy: Vec<T>,
    /// Minimizer's mixed strategy over columns.
    pub col_strategy: Vec<T>,
}

impl<T: Scalar> GameValue<T> {
    /// Payoff of every pure column against the row strategy.
    pub fn column_payoffs(&self, payoff: &Matrix<T>) -> Vec<T> {
        (0..payoff.cols())
            .map(|j| {
                (0..payoff.rows()).fold(T::zero(), |acc, i| {
                    acc + self.row_strategy[i].clone() * payoff.get(i, j).clone()
                })
            })
            .collect()
    }

    /// Payoff of every pure row against the column strategy.
    pub fn row_payoffs(&self, payoff: &Matrix<T>) -> Vec<T> {
        (0..payoff.rows())
            .map(|i| {
                (0..payoff.cols()).fold(T::zero(), |acc, j| {
                    acc + self.col_strategy[j].clone() * payoff.get(i, j).clone()
                })
            })
            .collect()
    }
}

struct Tableau<T> {
    /// constraint rows, last entry is the right-hand side
    rows: Vec<Vec<T>>,
    /// reduced costs, last entry is minus the objective value
    objective: Vec<T>,
    basis: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, r: usize, s: usize) {
        let p = self.rows[r][s].clone();
        for x in &mut self.rows[r] {
            *x = x.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[s].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
            row[s] = T::zero();
        }
        let f = self.objective[s].clone();
        if !f.is_zero() {
            for (x, y) in self.objective.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
            self.objective[s] = T::zero();
        }
        self.basis[r] = s;
    }

    /// Runs to optimality (the problem is bounded by construction).
    fn optimize(&mut self) -> Result<()> {
        let width = self.objective.len() - 1;
        let limit = 1_000_000usize;
        for _ in 0..limit {
            // Bland: smallest improving column
            let Some(s) = (0..width).find(|&j| {
                self.objective[j] > T::zero() && !self.objective[j].is_negligible()
            }) else {
                return Ok(());
            };
            // Bland: minimum ratio, ties to the smallest basic variable
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[s];
                if *a <= T::zero() || a.is_negligible() {
                    continue;
                }
                let ratio = row[width].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br && !ratio.near(&br)
                            || ratio.near(&br) && self.basis[i] < self.basis[bi]
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return Err(Error::VerificationGap("unbounded game LP".into()));
            };
            self.pivot(r, s);
        }
        Err(Error::VerificationGap("simplex iteration limit".into()))
    }
}

/// Solves the zero-sum game with payoff grid `payoff` (rows maximize, columns
/// minimize).
pub fn solve_zero_sum<T: Scalar>(payoff: &Matrix<T>) -> Result<GameValue<T>> {
    let (m, n) = (payoff.rows(), payoff.cols());
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    // shift so every payoff is at least 1
    let min = payoff
        .entries()
        .fold(payoff.get(0, 0).clone(), |acc, x| if *x < acc { x.clone() } else { acc });
    let shift = T::one() - min;

    // maximize Σ t_j subject to (P + shift) t ≤ 1, t ≥ 0
    let width = n + m;
    let rows = (0..m)
        .map(|i| {
            let mut row = vec![T::zero(); width + 1];
            for j in 0..n {
                row[j] = payoff.get(i, j).clone() + shift.clone();
            }
            row[n + i] = T::one();
            row[width] = T::one();
            row
        })
        .collect();
    let mut objective = vec![T::zero(); width + 1];
    for x in objective.iter_mut().take(n) {
        *x = T::one();
    }
    let mut tableau = Tableau {
        rows,
        objective,
        basis: (n..n + m).collect(),
    };
    tableau.optimize()?;

    let mut t = vec![T::zero(); n];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < n {
            t[b] = tableau.rows[i][width].clone();
        }
    }
    let total = t.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let shifted_value = T::one() / total;
    let col_strategy = t.into_iter().map(|x| x * shifted_value.clone()).collect();
    let row_strategy = (0..m)
        .map(|i| -tableau.objective[n + i].clone() * shifted_value.clone())
        .collect();
    Ok(GameValue {
        value: shifted_value - shift,
        row_strategy,
        col_strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, Rational};
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect()).unwrap()
    }

    fn check(p: &Matrix<Rational>, g: &GameValue<Rational>) {
        let is_dist = |s: &[Rational]| {
            s.iter().all(|x| *x >= Rational::zero())
                && s.iter().fold(Rational::zero(), |a, x| a + x) == Rational::one()
        };
        assert!(is_dist(&g.row_strategy));
        assert!(is_dist(&g.col_strategy));
        assert!(g.column_payoffs(p).iter().all(|x| *x >= g.value));
        assert!(g.row_payoffs(p).iter().all(|x| *x <= g.value));
    }

    #[test]
    fn diagonal_game_is_half() {
        let p = grid(&[&[1, 0], &[0, 1]]);
        let g = solve_zero_sum(&p).unwrap();
        assert_eq!(g.value, q(1, 2));
        assert_eq!(g.row_strategy, vec![q(1, 2), q(1, 2)]);
        assert_eq!(g.col_strategy, vec![q(1, 2), q(1, 2)]);
        check(&p, &g);
    }

    #[test]
    fn all_ones_game() {
        let p = grid(&[&[1, 1, 1], &[1, 1, 1]]);
        let g = solve_zero_sum(&p).unwrap();
        assert_eq!(g.value, q(1, 1));
        check(&p, &g);
    }

    #[test]
    fn matching_pennies_with_negative_payoffs() {
        let p = grid(&[&[1, -1], &[-1, 1]]);
        let g = solve_zero_sum(&p).unwrap();
        assert_eq!(g.value, q(0, 1));
        check(&p, &g);
    }

    #[test]
    fn rock_paper_scissors() {
        let p = grid(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]]);
        let g = solve_zero_sum(&p).unwrap();
        assert_eq!(g.value, q(0, 1));
        assert_eq!(g.row_strategy, vec![q(1, 3); 3]);
        check(&p, &g);
    }

    #[test]
    fn random_games_satisfy_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(1..=6);
            let p = Matrix::from_rows(
                (0..m)
                    .map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect())
                    .collect(),
            )
            .unwrap();
            let g = solve_zero_sum(&p).unwrap();
            check(&p, &g);
        }
    }

    #[test]
    fn float_solver_matches_exact_value() {
        let p = grid(&[&[3, 0, 2], &[1, 2, 0]]);
        let exact = solve_zero_sum(&p).unwrap();
        let approx = solve_zero_sum(&p.map(|x| num_traits::ToPrimitive::to_f64(x).unwrap())).unwrap();
        let v = num_traits::ToPrimitive::to_f64(&exact.value).unwrap();
        assert!((approx.value - v).abs() < 1e-9);
    }
}
