//! Retraction sequences and their traces, plus the sequences they induce
//! on faces and on the results of constructions.

mod induced;
mod search;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::char_map::{induce_on_face, CharMap, CharMapError, InducedCharMap};
use crate::constructions::ConstructionError;
use crate::polytope::{Face, FacePolytope, FacetSet, Polytope, SubComplex, VertexSet};

pub use induced::{
    induced_retraction_2wedge, induced_retraction_blowdown, InducedRetractionReport, StepCase, WedgeRetraction,
};
pub use search::{
    enumerate_retractions, find_p_clean_retraction, find_retraction, find_retraction_with, SearchOptions, StepView,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RetractionError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("vertex {vertex} is not free at step {step}")]
    NotFree { step: usize, vertex: usize },
    #[error("vertex {0} appears twice")]
    Repeated(usize),
    #[error("sequence covers {found} of {expected} vertices")]
    Incomplete { found: usize, expected: usize },
    #[error("the vertices of the wedged facet are not retracted last")]
    NotDeferred,
    #[error("parameter a = 1")]
    ParameterA,
    #[error("induced order is not a retraction: {0}")]
    InducedInfeasible(Box<RetractionError>),
    #[error("blowdown does not match the polytope")]
    ForeignBlowdown,
    #[error(transparent)]
    CharMap(#[from] CharMapError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractionStep {
    pub complex: SubComplex,
    pub max_face: Face,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractionSequence {
    steps: Vec<RetractionStep>,
}

impl RetractionSequence {
    pub fn steps(&self) -> &[RetractionStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.vertex).collect()
    }

    pub fn record(&self, p: &Polytope) -> SequenceRecord {
        SequenceRecord {
            steps: self
                .steps
                .iter()
                .map(|s| StepRecord {
                    vertex: s.vertex,
                    max_face_facets: p.facet_names_of(s.max_face.support()),
                    max_face_dim: s.max_face.dim(),
                    complex_maximal_faces: s
                        .complex
                        .maximal_faces()
                        .iter()
                        .map(|f| p.facet_names_of(f.support()))
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub vertex: usize,
    pub max_face_facets: Vec<String>,
    pub max_face_dim: usize,
    pub complex_maximal_faces: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceRecord {
    pub steps: Vec<StepRecord>,
}

/// Vertices of `b` lying in exactly one maximal face.
pub fn free_vertices(b: &SubComplex) -> VertexSet {
    b.vertices().into_iter().filter(|&v| b.maximal_faces_at(v).len() == 1).collect()
}

/// Faces of `b` that avoid the free vertex `v`.
pub fn next_complex(p: &Polytope, b: &SubComplex, v: usize) -> Result<SubComplex, RetractionError> {
    let at = b.maximal_faces_at(v);
    if at.len() != 1 {
        return Err(RetractionError::NotFree { step: 0, vertex: v });
    }
    let mut faces: Vec<Face> = b.maximal_faces().iter().filter(|m| !m.contains_vertex(v)).cloned().collect();
    faces.extend(p.facets_of_face(at[0]).into_iter().filter(|g| !g.contains_vertex(v)));
    Ok(SubComplex::from_faces(faces))
}

/// Replays a vertex order, checking freeness at every step.
pub fn from_order(p: &Polytope, order: &[usize]) -> Result<RetractionSequence, RetractionError> {
    let m = p.num_vertices();
    let mut seen = BTreeSet::new();
    for &v in order {
        if v >= m {
            return Err(RetractionError::UnknownVertex(v));
        }
        if !seen.insert(v) {
            return Err(RetractionError::Repeated(v));
        }
    }
    if order.len() != m {
        return Err(RetractionError::Incomplete { found: order.len(), expected: m });
    }
    let mut b = SubComplex::whole(p);
    let mut steps = Vec::with_capacity(m);
    for (i, &v) in order.iter().enumerate() {
        let at = b.maximal_faces_at(v);
        if at.len() != 1 {
            return Err(RetractionError::NotFree { step: i, vertex: v });
        }
        let max_face = at[0].clone();
        let next = next_complex(p, &b, v)?;
        steps.push(RetractionStep { complex: b, max_face, vertex: v });
        b = next;
    }
    Ok(RetractionSequence { steps })
}

/// Caches induced maps by face support.
pub(crate) struct OrderCache<'a> {
    p: &'a Polytope,
    lambda: &'a CharMap,
    maps: HashMap<FacetSet, InducedCharMap>,
}

impl<'a> OrderCache<'a> {
    pub(crate) fn new(p: &'a Polytope, lambda: &'a CharMap) -> Self {
        OrderCache { p, lambda, maps: HashMap::new() }
    }

    pub(crate) fn order(&mut self, face: &Face, v: usize) -> Result<u64, CharMapError> {
        if !self.maps.contains_key(face.support()) {
            let m = induce_on_face(self.p, self.lambda, face, None)?;
            self.maps.insert(face.support().clone(), m);
        }
        self.maps[face.support()].order_at(self.p, v)
    }
}

/// `|G_{E_ℓ}(b_ℓ)|` for every step.
pub fn singularity_trace(p: &Polytope, lambda: &CharMap, seq: &RetractionSequence) -> Result<Vec<u64>, CharMapError> {
    let mut cache = OrderCache::new(p, lambda);
    seq.steps.iter().map(|s| cache.order(&s.max_face, s.vertex)).collect()
}

/// A retraction of a face, obtained by restricting the vertex order.
#[derive(Clone, Debug)]
pub struct FaceRetraction {
    pub face: FacePolytope,
    /// In the face's local vertex numbering.
    pub sequence: RetractionSequence,
    /// Step of the source sequence that each local step came from.
    pub source_steps: Vec<usize>,
}

impl FaceRetraction {
    /// Trace of the face sequence under λ induced on the face.
    pub fn trace(&self, p: &Polytope, lambda: &CharMap, face: &Face) -> Result<Vec<u64>, CharMapError> {
        if face.dim() == 0 {
            return Ok(vec![1]);
        }
        let induced = induce_on_face(p, lambda, face, None)?;
        let vectors = self.face.facet_ids.iter().map(|j| induced.vectors()[j].clone()).collect();
        let local = CharMap::new(face.dim(), vectors)?;
        singularity_trace(&self.face.polytope, &local, &self.sequence)
    }
}

pub fn face_induced_retraction(
    p: &Polytope,
    seq: &RetractionSequence,
    face: &Face,
) -> Result<FaceRetraction, RetractionError> {
    let fp = p.face_polytope(face);
    let mut order = Vec::new();
    let mut source_steps = Vec::new();
    for (i, s) in seq.steps.iter().enumerate() {
        if let Some(local) = fp.local_vertex(s.vertex) {
            order.push(local);
            source_steps.push(i);
        }
    }
    let sequence = if fp.polytope.dim() == 0 {
        let only = fp.polytope.whole();
        RetractionSequence {
            steps: vec![RetractionStep { complex: SubComplex::from_faces([only.clone()]), max_face: only, vertex: 0 }],
        }
    } else {
        from_order(&fp.polytope, &order)?
    };
    Ok(FaceRetraction { face: fp, sequence, source_steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex(n: usize) -> Polytope {
        let verts: Vec<Vec<usize>> = (0..=n).map(|v| (0..=n).filter(|&j| j != v).collect()).collect();
        let refs: Vec<&[usize]> = verts.iter().map(Vec::as_slice).collect();
        Polytope::from_lists(n, n + 1, &refs).unwrap()
    }

    #[test]
    fn whole_polytope_all_free() {
        let t = simplex(3);
        assert_eq!(free_vertices(&SubComplex::whole(&t)).len(), 4);
    }

    #[test]
    fn simplex_vertex_removal_leaves_opposite_facet() {
        let t = simplex(3);
        let next = next_complex(&t, &SubComplex::whole(&t), 0).unwrap();
        assert_eq!(next.maximal_faces().len(), 1);
        assert_eq!(next.maximal_faces()[0].support(), &FacetSet::from([0]));
    }

    #[test]
    fn edge_endpoint() {
        let i = Polytope::from_lists(1, 2, &[&[0], &[1]]).unwrap();
        let b = SubComplex::whole(&i);
        assert_eq!(free_vertices(&b).len(), 2);
        let next = next_complex(&i, &b, 0).unwrap();
        assert_eq!(next.vertices(), VertexSet::from([1]));
    }

    #[test]
    fn replay_rejects_bad_orders() {
        let sq = Polytope::from_lists(2, 4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]).unwrap();
        assert!(from_order(&sq, &[0, 1, 2, 3]).is_ok());
        // after removing 0, vertex 2 sits in two edges
        assert_eq!(from_order(&sq, &[0, 2, 1, 3]), Err(RetractionError::NotFree { step: 1, vertex: 2 }));
        assert_eq!(from_order(&sq, &[0, 1, 1, 3]), Err(RetractionError::Repeated(1)));
    }
}
