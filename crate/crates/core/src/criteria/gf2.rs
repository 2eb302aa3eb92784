//! Linear systems over GF(2) in the reversed-inner-product form
//! `w_i^R ⊙ y ≡ r_i (mod 2)`.

use crate::alphabet::{sym, Symbol, Word};
use crate::error::{Error, Result};

/// Bits of a word over `{0,1}`; `None` if another symbol occurs.
pub fn bits(w: &[Symbol]) -> Option<Vec<bool>> {
    w.iter()
        .map(|s| match s.as_str() {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        })
        .collect()
}

pub fn word_of_bits(b: &[bool]) -> Word {
    b.iter().map(|&x| sym(if x { "1" } else { "0" })).collect()
}

/// `u ⊙ v mod 2`.
pub fn dot(u: &[bool], v: &[bool]) -> bool {
    u.iter().zip(v).filter(|(a, b)| **a && **b).count() % 2 == 1
}

/// `w^R ⊙ y mod 2`.
pub fn reversed_dot(w: &[bool], y: &[bool]) -> bool {
    w.iter().rev().zip(y).filter(|(a, b)| **a && **b).count() % 2 == 1
}

/// Row-reduced system: pivot column and right-hand side per row.
struct Echelon {
    rows: Vec<(Vec<bool>, bool, usize)>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    fn reduce(&self, mut v: Vec<bool>, mut rhs: bool) -> (Vec<bool>, bool) {
        for (row, r, pivot) in &self.rows {
            if v[*pivot] {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= *y;
                }
                rhs ^= *r;
            }
        }
        (v, rhs)
    }

    /// Adds an equation; `Err(())` when it contradicts the others, `Ok(false)`
    /// when it is implied by them.
    fn insert(&mut self, v: Vec<bool>, rhs: bool) -> std::result::Result<bool, ()> {
        let (v, rhs) = self.reduce(v, rhs);
        let Some(pivot) = v.iter().position(|&x| x) else {
            return if rhs { Err(()) } else { Ok(false) };
        };
        for (row, r, _) in &mut self.rows {
            if row[pivot] {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x ^= *y;
                }
                *r ^= rhs;
            }
        }
        self.rows.push((v, rhs, pivot));
        Ok(true)
    }
}

/// Solves `w_i^R ⊙ y ≡ r_i` for all `i` by Gaussian elimination, setting free
/// variables to 0. `Ok(None)` when the system is inconsistent.
pub fn gf2_solve(ws: &[Vec<bool>], r: &[bool]) -> Result<Option<Vec<bool>>> {
    if ws.len() != r.len() {
        return Err(Error::DimensionMismatch { expected: ws.len(), found: r.len() });
    }
    let Some(len) = ws.first().map(Vec::len) else {
        return Ok(Some(Vec::new()));
    };
    let mut e = Echelon::new();
    for (w, &ri) in ws.iter().zip(r) {
        if w.len() != len {
            return Err(Error::DimensionMismatch { expected: len, found: w.len() });
        }
        let reversed: Vec<bool> = w.iter().rev().copied().collect();
        if e.insert(reversed, ri).is_err() {
            return Ok(None);
        }
    }
    // fully reduced: each pivot appears in exactly one row
    let mut y = vec![false; len];
    for (_, rhs, pivot) in &e.rows {
        y[*pivot] = *rhs;
    }
    Ok(Some(y))
}

/// Rank of a set of bit vectors.
pub fn gf2_rank(ws: &[Vec<bool>]) -> usize {
    let mut e = Echelon::new();
    ws.iter().filter(|w| e.insert((*w).clone(), false) == Ok(true)).count()
}

/// Incremental independence test over GF(2).
pub struct Gf2Basis {
    echelon: Echelon,
}

impl Default for Gf2Basis {
    fn default() -> Self {
        Gf2Basis { echelon: Echelon::new() }
    }
}

impl Gf2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_independent(&self, v: &[bool]) -> bool {
        self.echelon.reduce(v.to_vec(), false).0.iter().any(|&x| x)
    }

    /// Adds `v` when independent; returns whether it was added.
    pub fn insert(&mut self, v: &[bool]) -> bool {
        self.echelon.insert(v.to_vec(), false) == Ok(true)
    }

    pub fn len(&self) -> usize {
        self.echelon.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.echelon.rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(len: usize, i: usize) -> Vec<bool> {
        (0..len).map(|j| j == i).collect()
    }

    #[test]
    fn reversed_units_read_off_r() {
        let ws: Vec<Vec<bool>> = (0..4).map(|i| unit(4, 3 - i)).collect();
        let r = [true, false, true, true];
        assert_eq!(gf2_solve(&ws, &r).unwrap(), Some(r.to_vec()));
    }

    #[test]
    fn conflicting_duplicates() {
        let w = vec![true, false, true];
        assert_eq!(gf2_solve(&[w.clone(), w], &[true, false]).unwrap(), None);
    }

    #[test]
    fn empty_and_mismatched() {
        assert_eq!(gf2_solve(&[], &[]).unwrap(), Some(vec![]));
        assert!(gf2_solve(&[vec![true]], &[]).is_err());
        assert!(gf2_solve(&[vec![true], vec![true, false]], &[true, true]).is_err());
    }

    #[test]
    fn bit_words() {
        let w = crate::alphabet::word("1 0 1");
        assert_eq!(bits(&w), Some(vec![true, false, true]));
        assert_eq!(word_of_bits(&[true, false, true]), w);
        assert_eq!(bits(&crate::alphabet::word("1 #")), None);
        assert!(reversed_dot(&[true, false], &[false, true]));
        assert!(!dot(&[true, false], &[false, true]));
    }

    fn system() -> impl Strategy<Value = (Vec<Vec<bool>>, Vec<bool>)> {
        (1usize..=8, 1usize..=10).prop_flat_map(|(m, len)| {
            (
                prop::collection::vec(prop::collection::vec(any::<bool>(), len), m),
                prop::collection::vec(any::<bool>(), m),
            )
        })
    }

    proptest! {
        #[test]
        fn solutions_verify((ws, r) in system()) {
            match gf2_solve(&ws, &r).unwrap() {
                Some(y) => {
                    for (w, ri) in ws.iter().zip(&r) {
                        prop_assert_eq!(reversed_dot(w, &y), *ri);
                    }
                }
                None => prop_assert!(gf2_rank(&ws) < ws.len()),
            }
        }

        #[test]
        fn full_rank_always_solvable((ws, r) in system()) {
            prop_assume!(gf2_rank(&ws) == ws.len());
            prop_assert!(gf2_solve(&ws, &r).unwrap().is_some());
        }
    }
}
