//! Exact-half machines for letter-count equality and their intersection.

use crate::alphabet::sym;
use crate::automata::{always_accept, Pfa, PfaBuilder, Step};
use crate::error::{Error, Result};
use crate::languages::sigma6;
use crate::linalg::{q, rational_from_usize, Rational};

use super::compose::{flip_finals, mixture, tensor};

/// Five-state machine over `{a1..a6,#}` with
/// `p(w) = 1/2 + (2^{-#a_i(w)} − 2^{-#a_j(w)})/2`.
pub fn lij_cequal(i: usize, j: usize) -> Result<Pfa> {
    if i == j || !(1..=6).contains(&i) || !(1..=6).contains(&j) {
        return Err(Error::MalformedMachine(format!("L_{{{i},{j}}} needs distinct indices in 1..=6")));
    }
    let states = ["q0", "a-live", "a-dead", "b-live", "b-dead"];
    let mut b = PfaBuilder::new(sigma6(), states.iter().map(|s| s.to_string()).collect());
    let (q0, a_live, a_dead, b_live, b_dead) = (0, 1, 2, 3, 4);
    b.row(&Step::Left, q0, &[(a_live, q(1, 2)), (b_live, q(1, 2))])?;
    b.row(&Step::Letter(sym(&format!("a{i}"))), a_live, &[(a_live, q(1, 2)), (a_dead, q(1, 2))])?;
    b.row(&Step::Letter(sym(&format!("a{j}"))), b_live, &[(b_live, q(1, 2)), (b_dead, q(1, 2))])?;
    b.final_state(a_live).final_state(b_dead);
    b.build(q0)
}

/// Exact-half intersection of two machines:
/// `p − 1/2 = [(p1 − 1/2)² + (p2 − 1/2)²]/5`.
pub fn cequal_intersect(m1: &Pfa, m2: &Pfa) -> Result<Pfa> {
    cequal_intersect_all(&[m1, m2])
}

/// Exact-half intersection of `k ≥ 1` machines: an always-accepting sink with
/// weight 1/5, and for every `M_i` the square `M_i⊗M_i` and the flip of `M_i`
/// with weight `2/(5k)` each, so that
/// `p − 1/2 = (2/(5k)) Σ_i (p_i − 1/2)²`.
pub fn cequal_intersect_all(machines: &[&Pfa]) -> Result<Pfa> {
    let Some(first) = machines.first() else {
        return Err(Error::MalformedMachine("intersection of no machines".into()));
    };
    let sink = always_accept(first.alphabet().clone());
    let mut parts = Vec::with_capacity(2 * machines.len());
    for m in machines {
        parts.push(tensor(m, m, |a, b| a && b)?);
        parts.push(flip_finals(m));
    }
    let w = q(2, 5) / rational_from_usize(machines.len());
    let mut components: Vec<(Rational, &Pfa)> = vec![(q(1, 5), &sink)];
    components.extend(parts.iter().map(|m| (w.clone(), m)));
    mixture(&components)
}

/// `Equal6 = ⋂_{i=2..6} L_{1,i}` as one exact-half machine.
pub fn equal6_machine() -> Result<Pfa> {
    let parts = equal6_components()?;
    let refs: Vec<&Pfa> = parts.iter().collect();
    cequal_intersect_all(&refs)
}

/// The five machines `L_{1,2}, …, L_{1,6}`.
pub fn equal6_components() -> Result<Vec<Pfa>> {
    (2..=6).map(|i| lij_cequal(1, i)).collect()
}
