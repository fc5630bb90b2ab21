//! Structural analysis of conjunctive queries.

mod acyclic;
mod canon;
mod classify;
mod core;
mod hom;
mod images;

use thiserror::Error;

use crate::qmodel::{max_query_size, Query};

pub use self::acyclic::{gyo_acyclic, is_acyclic, is_free_connex, JoinTree};
pub use self::canon::{canonical_key, canonical_labelling};
pub use self::classify::{
    classify, lookup_registered, Assumption, ClassificationReport, Problem, Registered, Verdict,
    VerdictLabel,
};
pub use self::core::{core, endomorphisms, full_core, is_minimal, minimal_form, retraction_onto};
pub use self::hom::{homomorphism_fixing_free, isomorphism, VarMap};
pub use self::images::{
    hardness_transfer, has_nested_images, images, is_mirror, is_untangleable,
    untangle_with_origins, untangling_step, Image, MirrorWitness, Origin, UntangleStep,
    Untangleability, UntanglingWitness, DEFAULT_UNTANGLE_BUDGET,
};

pub(crate) use self::hom::HomSearch;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("query has {vars} variables and {atoms} atoms; the limit is {limit}")]
    LimitExceeded { vars: usize, atoms: usize, limit: usize },
    #[error("query is not full")]
    NotFull,
}

pub(crate) fn check_size(q: &Query) -> Result<(), StructureError> {
    let limit = max_query_size();
    let (vars, atoms) = (q.vars().len(), q.atoms().len());
    if vars > limit || atoms > limit {
        return Err(StructureError::LimitExceeded { vars, atoms, limit });
    }
    Ok(())
}
