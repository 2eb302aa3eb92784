//! Necessary conditions for membership in advised cut-point classes, turned
//! into certificates and into procedures that refute a candidate recognizer
//! with a concrete misclassified input.

mod certificate;
mod density;
mod gf2;
mod refute;

use std::collections::HashMap;
use std::sync::Arc;

pub use certificate::{
    cequal_certificate, cequal_implication_test, plin_certificate, BasisCertificate, BasisRule, ImplicationOutcome,
    PlinCertificate,
};
pub use density::{density_ell, density_table};
pub use gf2::{bits, dot, gf2_rank, gf2_solve, reversed_dot, word_of_bits, Gf2Basis};
pub use refute::{
    refute_cequal_complement_dup, refute_plin_ipstar, CequalRefutation, Counterexample, FailureKind,
    PlinRefutation, PlinSearch,
};

use crate::advice::AdviceFunction;
use crate::alphabet::{track_word, Symbol, Word};
use crate::automata::{Dfa, Pfa, PfaFamily, Step};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational, RowVector};

/// Machines whose matrices are known for each input length.
pub trait MachineAt: Send + Sync {
    fn at_length(&self, n: usize) -> Result<Arc<Pfa>>;
    fn state_count(&self) -> usize;
}

impl MachineAt for Pfa {
    fn at_length(&self, _: usize) -> Result<Arc<Pfa>> {
        Ok(Arc::new(self.clone()))
    }

    fn state_count(&self) -> usize {
        self.dim()
    }
}

impl MachineAt for Arc<Pfa> {
    fn at_length(&self, _: usize) -> Result<Arc<Pfa>> {
        Ok(self.clone())
    }

    fn state_count(&self) -> usize {
        self.dim()
    }
}

impl MachineAt for PfaFamily {
    fn at_length(&self, n: usize) -> Result<Arc<Pfa>> {
        self.at(n)
    }

    fn state_count(&self) -> usize {
        self.states().len()
    }
}

impl MachineAt for Dfa {
    fn at_length(&self, _: usize) -> Result<Arc<Pfa>> {
        Ok(Arc::new(self.to_pfa()))
    }

    fn state_count(&self) -> usize {
        self.states().len()
    }
}

/// Splits the advised computation on inputs `wy` into the state vector after
/// `¢⟨w,r⟩` and the column `M_{⟨y,s⟩$} ξ_F^T`, where `h(n) = rs`.
pub(crate) struct SplitEvaluator {
    pfa: Arc<Pfa>,
    r: Word,
    s: Word,
    transposed: HashMap<Symbol, Matrix<Rational>>,
}

impl SplitEvaluator {
    pub(crate) fn new(pfa: Arc<Pfa>, h: &AdviceFunction, n: usize, ell: usize) -> Result<Self> {
        let advice = h.advice(n)?;
        if advice.len() != n {
            return Err(Error::AdvicePolicy { n, len: advice.len() });
        }
        if ell > n {
            return Err(Error::DegenerateContext(format!("suffix length {ell} exceeds {n}")));
        }
        let (r, s) = advice.split_at(n - ell);
        Ok(SplitEvaluator { pfa, r: r.to_vec(), s: s.to_vec(), transposed: HashMap::new() })
    }

    pub(crate) fn advice(&self) -> Word {
        let mut a = self.r.clone();
        a.extend(self.s.iter().cloned());
        a
    }

    pub(crate) fn prefix(&self, w: &[Symbol]) -> Result<RowVector<Rational>> {
        self.pfa.prefix_vector(&track_word(w, &self.r)?)
    }

    pub(crate) fn suffix(&mut self, y: &[Symbol]) -> Result<RowVector<Rational>> {
        let cells = track_word(y, &self.s)?;
        let mut c = self.pfa.final_vector().mul_matrix(&self.pfa.right().matrix().transpose())?;
        for cell in cells.iter().rev() {
            if !self.transposed.contains_key(cell) {
                let t = self.pfa.matrix(&Step::Letter(cell.clone()))?.matrix().transpose();
                self.transposed.insert(cell.clone(), t);
            }
            c = c.mul_matrix(&self.transposed[cell])?;
        }
        Ok(c)
    }
}
