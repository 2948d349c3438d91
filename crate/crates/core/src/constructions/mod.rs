//! Polytopal k-wedges and blowups with their inverse blowdowns, plus the
//! matching transports of characteristic maps.

mod blowdown;
mod blowup;
mod wedge;

use num_bigint::BigInt;
use thiserror::Error;

use crate::char_map::CharMapError;
use crate::polytope::{PolytopeError, Violation};

pub use blowdown::{
    blowdown, blowdown_at, detect_product_structure, restrict_char, BlowdownResult, FiberCheck,
    ProductStructure, Restriction,
};
pub use blowup::{blowup, extend_char, BlowupResult};
pub use wedge::{k_wedge, k_wedge_char, wedge_char_on_product, WedgeParams, WedgeResult};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("the face is the whole polytope")]
    WholeFace,
    #[error("blowing up a facet changes nothing")]
    FacetBlowup,
    #[error("facet index {0} is not a facet of the polytope")]
    NotAFacet(usize),
    #[error("the base face is not a proper face of the big facet")]
    BaseNotInFacet,
    #[error("no product structure: {0}")]
    NotProductType(String),
    #[error("ambiguous product structure: candidates {candidates:?} all verify")]
    Ambiguous { candidates: Vec<usize> },
    #[error("constructed polytope is invalid: {0}")]
    InvalidOutput(Violation),
    #[error("k must be positive")]
    ZeroK,
    #[error("parameter a = 1 makes the wedge characteristic map degenerate")]
    ParameterA,
    #[error("restricted map is not a characteristic function: det {det} at vertex {vertex} of the blowdown")]
    RestrictionInvalid { vertex: usize, det: BigInt, fibers: Vec<FiberCheck> },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    CharMap(#[from] CharMapError),
}
