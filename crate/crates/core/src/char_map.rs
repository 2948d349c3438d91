//! Characteristic functions on facets, induced maps on faces, and
//! singularity orders.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{
    self, complement_basis, det_of_rows, primitive, saturation_basis, smith_normal_form, to_u64,
    verify_complement, IntMatrix, IntVector, LatticeError, Projector,
};
use crate::polytope::{Face, Polytope};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CharMapError {
    #[error("expected {expected} facet vectors, found {found}")]
    FacetCount { expected: usize, found: usize },
    #[error("no vector for facet {0:?}")]
    MissingFacet(String),
    #[error("vector given for unknown facet {0:?}")]
    UnknownFacet(String),
    #[error("vector for facet {facet} has length {found}, expected {expected}")]
    Length { facet: usize, expected: usize, found: usize },
    #[error("vector {vector} for facet {facet} is not primitive")]
    NotPrimitive { facet: usize, vector: IntVector },
    #[error("vectors at vertex {vertex} are dependent (det = {det})")]
    Degenerate { vertex: usize, det: BigInt },
    #[error("facet {facet} projects to zero on the face")]
    ZeroProjection { facet: usize },
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("vertex {vertex} is not on the face")]
    NotOnFace { vertex: usize },
    #[error("facet {facet} does not meet the face")]
    FacetMissesFace { facet: usize },
    #[error("facet {facet} contains the face")]
    FacetContainsFace { facet: usize },
    #[error("the rational combination does not reproduce the target vector")]
    CombinationFails,
    #[error("{combo} coefficients for {facets} facets")]
    CoefficientCount { facets: usize, combo: usize },
    #[error("projected combination is not an integer multiple of the target: {0}")]
    NotIntegralScaling(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// One primitive vector per facet, indexed by facet position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharMap {
    rank: usize,
    vectors: Vec<IntVector>,
}

impl CharMap {
    pub fn new(rank: usize, vectors: Vec<IntVector>) -> Result<Self, CharMapError> {
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != rank {
                return Err(CharMapError::Length { facet: j, expected: rank, found: v.len() });
            }
            if !v.content().is_one() {
                return Err(CharMapError::NotPrimitive { facet: j, vector: v.clone() });
            }
        }
        Ok(CharMap { rank, vectors })
    }

    pub fn from_i64s(rank: usize, rows: &[&[i64]]) -> Result<Self, CharMapError> {
        Self::new(rank, rows.iter().map(|r| IntVector::from_i64s(r)).collect())
    }

    /// Builds from a name-keyed map; every facet of `p` must be present.
    pub fn from_named(p: &Polytope, named: &BTreeMap<String, IntVector>) -> Result<Self, CharMapError> {
        if let Some(unknown) = named.keys().find(|k| p.facet_index(k).is_err()) {
            return Err(CharMapError::UnknownFacet(unknown.clone()));
        }
        let vectors = p
            .facet_names()
            .iter()
            .map(|n| named.get(n).cloned().ok_or_else(|| CharMapError::MissingFacet(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(p.dim(), vectors)
    }

    pub fn to_named(&self, p: &Polytope) -> BTreeMap<String, IntVector> {
        p.facet_names().iter().cloned().zip(self.vectors.iter().cloned()).collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, j: usize) -> &IntVector {
        &self.vectors[j]
    }

    pub fn vectors(&self) -> &[IntVector] {
        &self.vectors
    }

    fn rows_at(&self, p: &Polytope, v: usize) -> Vec<IntVector> {
        p.vertex_facets(v).iter().map(|&j| self.vectors[j].clone()).collect()
    }
}

fn check_shape(p: &Polytope, lambda: &CharMap) -> Result<(), CharMapError> {
    if lambda.len() != p.num_facets() {
        return Err(CharMapError::FacetCount { expected: p.num_facets(), found: lambda.len() });
    }
    if lambda.rank() != p.dim() {
        return Err(CharMapError::Length { facet: 0, expected: p.dim(), found: lambda.rank() });
    }
    Ok(())
}

/// Independence at every vertex. Every nonempty intersection of facets in a
/// simple polytope extends to a vertex, so this covers all of them.
pub fn validate_rchar(p: &Polytope, lambda: &CharMap) -> Result<(), CharMapError> {
    check_shape(p, lambda)?;
    for v in 0..p.num_vertices() {
        let det = det_of_rows(&lambda.rows_at(p, v))?;
        if det.is_zero() {
            return Err(CharMapError::Degenerate { vertex: v, det });
        }
    }
    Ok(())
}

pub fn singularity_order(p: &Polytope, lambda: &CharMap, v: usize) -> Result<u64, CharMapError> {
    check_shape(p, lambda)?;
    if v >= p.num_vertices() {
        return Err(CharMapError::UnknownVertex(v));
    }
    Ok(to_u64(&det_of_rows(&lambda.rows_at(p, v))?.abs())?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityGroup {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
}

impl SingularityGroup {
    fn of_rows(rows: &[IntVector], n: usize) -> Result<Self, CharMapError> {
        if rows.is_empty() {
            return Ok(SingularityGroup { invariant_factors: Vec::new(), order: 1 });
        }
        let snf = smith_normal_form(&IntMatrix::from_rows(rows, n)?);
        let invariant_factors = snf.invariant_factors.iter().map(to_u64).collect::<Result<Vec<_>, _>>()?;
        let order = if invariant_factors.contains(&0) { 0 } else { to_u64(&snf.torsion_order())? };
        Ok(SingularityGroup { invariant_factors, order })
    }
}

pub fn singularity_group(p: &Polytope, lambda: &CharMap, v: usize) -> Result<SingularityGroup, CharMapError> {
    check_shape(p, lambda)?;
    if v >= p.num_vertices() {
        return Err(CharMapError::UnknownVertex(v));
    }
    SingularityGroup::of_rows(&lambda.rows_at(p, v), p.dim())
}

/// λ pushed to the quotient lattice of a face.
#[derive(Clone, Debug)]
pub struct InducedCharMap {
    face: Face,
    sat: Vec<IntVector>,
    comp: Vec<IntVector>,
    projector: Option<Projector>,
    vectors: BTreeMap<usize, IntVector>,
}

impl InducedCharMap {
    pub fn face(&self) -> &Face {
        &self.face
    }

    pub fn sat_basis(&self) -> &[IntVector] {
        &self.sat
    }

    pub fn comp_basis(&self) -> &[IntVector] {
        &self.comp
    }

    /// True for the whole polytope, where the map is λ itself.
    pub fn is_trivial(&self) -> bool {
        self.projector.is_none()
    }

    /// Vectors keyed by the parent facet index `j` of `F ∩ F_j`.
    pub fn vectors(&self) -> &BTreeMap<usize, IntVector> {
        &self.vectors
    }

    pub fn vector(&self, facet: usize) -> Option<&IntVector> {
        self.vectors.get(&facet)
    }

    /// Raw projection (before taking the primitive vector).
    pub fn project(&self, v: &IntVector) -> Result<IntVector, CharMapError> {
        match &self.projector {
            Some(pr) => Ok(pr.project(v)?),
            None => Ok(v.clone()),
        }
    }

    fn rows_at(&self, p: &Polytope, v: usize) -> Result<Vec<IntVector>, CharMapError> {
        if v >= p.num_vertices() {
            return Err(CharMapError::UnknownVertex(v));
        }
        if !self.face.contains_vertex(v) {
            return Err(CharMapError::NotOnFace { vertex: v });
        }
        Ok(p.vertex_facets(v)
            .iter()
            .filter(|j| !self.face.support().contains(j))
            .map(|j| self.vectors[j].clone())
            .collect())
    }

    pub fn order_at(&self, p: &Polytope, v: usize) -> Result<u64, CharMapError> {
        let rows = self.rows_at(p, v)?;
        Ok(to_u64(&det_of_rows(&rows)?.abs())?)
    }

    pub fn group_at(&self, p: &Polytope, v: usize) -> Result<SingularityGroup, CharMapError> {
        let rows = self.rows_at(p, v)?;
        SingularityGroup::of_rows(&rows, self.face.dim())
    }
}

pub fn induce_on_face(
    p: &Polytope,
    lambda: &CharMap,
    face: &Face,
    comp: Option<&[IntVector]>,
) -> Result<InducedCharMap, CharMapError> {
    check_shape(p, lambda)?;
    let n = p.dim();
    let facets = p.face_polytope(face).facet_ids;
    if face.support().is_empty() {
        let vectors = facets.iter().map(|&j| (j, lambda.vector(j).clone())).collect();
        let comp = (0..n).map(|i| IntVector::unit(n, i)).collect();
        return Ok(InducedCharMap { face: face.clone(), sat: Vec::new(), comp, projector: None, vectors });
    }
    let normals: Vec<IntVector> = face.support().iter().map(|&j| lambda.vector(j).clone()).collect();
    let sat = saturation_basis(&normals)?;
    let comp = match comp {
        Some(c) => {
            verify_complement(&sat, c)?;
            c.to_vec()
        }
        None => complement_basis(&sat)?,
    };
    let projector = Projector::new(&sat, &comp)?;
    let mut vectors = BTreeMap::new();
    for &j in &facets {
        let raw = projector.project(lambda.vector(j))?;
        let v = primitive(&raw).map_err(|_| CharMapError::ZeroProjection { facet: j })?;
        vectors.insert(j, v);
    }
    Ok(InducedCharMap { face: face.clone(), sat, comp, projector: Some(projector), vectors })
}

pub fn singularity_order_in_face(
    p: &Polytope,
    lambda: &CharMap,
    face: &Face,
    v: usize,
    comp: Option<&[IntVector]>,
) -> Result<u64, CharMapError> {
    induce_on_face(p, lambda, face, comp)?.order_at(p, v)
}

pub fn singularity_group_in_face(
    p: &Polytope,
    lambda: &CharMap,
    face: &Face,
    v: usize,
    comp: Option<&[IntVector]>,
) -> Result<SingularityGroup, CharMapError> {
    induce_on_face(p, lambda, face, comp)?.group_at(p, v)
}

fn rational_vector(v: &IntVector) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Checks `λ(target) = Σ cᵢ λ(comboᵢ)` exactly.
pub fn combination_holds(lambda: &CharMap, target: usize, combo: &[usize], coeffs: &[BigRational]) -> bool {
    let n = lambda.rank();
    let mut sum = vec![BigRational::zero(); n];
    for (&j, c) in combo.iter().zip(coeffs) {
        for (s, x) in sum.iter_mut().zip(rational_vector(lambda.vector(j))) {
            *s += c * x;
        }
    }
    sum == rational_vector(lambda.vector(target))
}

/// The positive integer `d` with `λ_F(target) = Σ cᵢ λ_F(comboᵢ) / d`.
/// Zero coefficients are dropped before the facets are checked.
pub fn compute_d_f(
    p: &Polytope,
    lambda: &CharMap,
    face: &Face,
    target: usize,
    combo: &[usize],
    coeffs: &[BigRational],
) -> Result<u64, CharMapError> {
    if combo.len() != coeffs.len() {
        return Err(CharMapError::CoefficientCount { facets: combo.len(), combo: coeffs.len() });
    }
    check_shape(p, lambda)?;
    if !combination_holds(lambda, target, combo, coeffs) {
        return Err(CharMapError::CombinationFails);
    }
    let terms: Vec<(usize, &BigRational)> =
        combo.iter().copied().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect();
    for j in std::iter::once(target).chain(terms.iter().map(|t| t.0)) {
        if face.support().contains(&j) {
            return Err(CharMapError::FacetContainsFace { facet: j });
        }
        if !face.vertices().iter().any(|&v| p.vertex_facets(v).contains(&j)) {
            return Err(CharMapError::FacetMissesFace { facet: j });
        }
    }
    let induced = induce_on_face(p, lambda, face, None)?;
    let dim = face.dim();
    let mut sum = vec![BigRational::zero(); dim];
    for (j, c) in &terms {
        for (s, x) in sum.iter_mut().zip(rational_vector(&induced.vectors[j])) {
            *s += *c * x;
        }
    }
    let t = rational_vector(&induced.vectors[&target]);
    let mut ratio: Option<BigRational> = None;
    for (s, x) in sum.iter().zip(&t) {
        if x.is_zero() {
            if !s.is_zero() {
                return Err(CharMapError::NotIntegralScaling("not parallel".into()));
            }
            continue;
        }
        let q = s / x;
        match &ratio {
            Some(r) if *r != q => return Err(CharMapError::NotIntegralScaling("not parallel".into())),
            _ => ratio = Some(q),
        }
    }
    let d = ratio.ok_or_else(|| CharMapError::NotIntegralScaling("zero target".into()))?;
    if !d.is_integer() || !d.is_positive() {
        return Err(CharMapError::NotIntegralScaling(format!("ratio {d}")));
    }
    Ok(lattice::to_u64(&d.to_integer())?)
}
