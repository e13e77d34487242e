//! Marked matrix groups: generator lists, Coxeter realizations, canonical
//! element keys and word balls.

mod diagram;
mod element;
pub mod fixtures;
mod marked;
mod vinberg;

pub use diagram::{CoxeterDiagram, Label};
pub use element::{ElementIndex, ElementKey, GroupElement, KeyScheme, Word};
pub use marked::{ball, verify_relations, Ball, MarkedGroup, RelationReport};
pub use vinberg::{triangle_family, vinberg_realize, Signature};

use thiserror::Error;

use crate::hypgeom::GeomError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad word: {0}")]
    BadWord(String),
    #[error("diagram is {kind}: signature (+{positive}, -{negative}, 0x{zero})\n{diagram}")]
    Signature {
        positive: usize,
        negative: usize,
        zero: usize,
        kind: &'static str,
        diagram: String,
    },
    #[error("parameters are not hyperbolic: {0}")]
    NonHyperbolic(String),
    #[error("{what} {value} exceeds the cap {limit}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("key collision {key:#018x}: matrices differ by {distance:e}\n  {left}\n  {right}")]
    Collision {
        key: u64,
        distance: f64,
        left: String,
        right: String,
    },
    #[error("generators {0} and {1} coincide")]
    DuplicateGenerator(usize, usize),
    #[error("empty generating set")]
    EmptyGenerators,
    #[error("elements belong to different models")]
    ModelMismatch,
    #[error("group has no Coxeter diagram")]
    NoDiagram,
}

