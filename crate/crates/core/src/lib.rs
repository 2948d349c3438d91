//! Exact combinatorics of simple polytopes and their characteristic maps,
//! from wedge and blowup constructions to replayable torsion certificates.

pub mod char_map;
pub mod constructions;
pub mod io;
pub mod iso;
pub mod lattice;
pub mod polytope;
pub mod retraction;
pub mod simplicial;
pub mod torsion;

pub use char_map::{CharMap, CharMapError, InducedCharMap, SingularityGroup};
pub use lattice::{IntMatrix, IntVector, LatticeError, SnfResult};
pub use polytope::{Face, FacetSet, Polytope, PolytopeError, SubComplex, VertexSet, Violation};
pub use io::PolytopeFile;
pub use retraction::{RetractionError, RetractionSequence, SearchOptions};
pub use simplicial::SimplicialComplex;
pub use torsion::{Conclusion, TorsionCertificate, TorsionError};
