//! Concrete machines and the transformations between them.

pub mod cequal;
pub mod compose;
pub mod dup;
pub mod equivalence;
pub mod normalize;
pub mod randomized;

pub use cequal::{cequal_intersect, cequal_intersect_all, equal6_components, equal6_machine, lij_cequal};
pub use compose::{amplify, flip_finals, mixture, tensor};
pub use dup::{dup_advice, dup_cequal_family, dup_cequal_uniform, dup_rn, dup_rn_ensemble};
pub use equivalence::{
    build_equivalence, compile_advised_dfa, compile_advised_family, condition_b_counterexample,
    extract_equivalence, EquivalencePartition,
};
pub use normalize::{derandomize, dnormalize, uniform_denominator};
pub use randomized::{palhash_rn, paired_ensemble, universal_cequal_rlin};
