//! Simple polytopes as vertex-to-facet incidence, plus faces and subcomplexes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::iso;

pub type FacetSet = BTreeSet<usize>;
pub type VertexSet = BTreeSet<usize>;

/// First invariant that a candidate polytope breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Dimension { dim: usize },
    FacetIndex { vertex: usize, facet: usize },
    Simplicity { vertex: usize, facets: Vec<usize> },
    Ridge { ridge: Vec<usize>, vertices: Vec<usize> },
    DuplicateVertex { first: usize, second: usize },
    EmptyFacet { facet: usize },
    Disconnected { vertex: usize },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Dimension { .. } => "dimension",
            Violation::FacetIndex { .. } => "facet index",
            Violation::Simplicity { .. } => "simplicity",
            Violation::Ridge { .. } => "ridge condition",
            Violation::DuplicateVertex { .. } => "duplicate vertex",
            Violation::EmptyFacet { .. } => "empty facet",
            Violation::Disconnected { .. } => "connectivity",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { dim } => write!(f, "dimension: n = {dim} is not supported"),
            Violation::FacetIndex { vertex, facet } => {
                write!(f, "facet index: vertex {vertex} names facet {facet}, which does not exist")
            }
            Violation::Simplicity { vertex, facets } => {
                write!(f, "simplicity: vertex {vertex} has facet list {facets:?}")
            }
            Violation::Ridge { ridge, vertices } => write!(
                f,
                "ridge condition: ridge {ridge:?} lies in {} vertices {vertices:?}",
                vertices.len()
            ),
            Violation::DuplicateVertex { first, second } => {
                write!(f, "duplicate vertex: vertices {first} and {second} coincide")
            }
            Violation::EmptyFacet { facet } => write!(f, "empty facet: facet {facet} has no vertex"),
            Violation::Disconnected { vertex } => {
                write!(f, "connectivity: vertex {vertex} is unreachable from vertex 0")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("invalid polytope: {0}")]
    Invalid(Violation),
    #[error("duplicate facet name {0:?}")]
    DuplicateName(String),
    #[error("facet count mismatch: {names} names but vertices reference index {max}")]
    FacetCount { names: usize, max: usize },
    #[error("unknown facet index {0}")]
    UnknownFacet(usize),
    #[error("unknown facet name {0:?}")]
    UnknownFacetName(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("facets {0:?} have empty intersection")]
    EmptyFace(Vec<String>),
}

/// A nonempty face, named by its full facet support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    support: FacetSet,
    vertices: VertexSet,
    dim: usize,
}

impl Face {
    pub fn support(&self) -> &FacetSet {
        &self.support
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.vertices.is_subset(&other.vertices)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    facet_names: Vec<String>,
    vertices: Vec<FacetSet>,
    facet_vertices: Vec<VertexSet>,
}

impl Polytope {
    /// Builds and validates.
    pub fn new(dim: usize, facet_names: Vec<String>, vertices: Vec<FacetSet>) -> Result<Self, PolytopeError> {
        let p = Self::new_unchecked(dim, facet_names, vertices)?;
        p.validate().map_err(PolytopeError::Invalid)?;
        Ok(p)
    }

    /// Builds without checking the polytope invariants. Names must still be
    /// distinct; out-of-range facet indices are kept and reported by
    /// [`Polytope::validate`].
    pub fn new_unchecked(
        dim: usize,
        facet_names: Vec<String>,
        vertices: Vec<FacetSet>,
    ) -> Result<Self, PolytopeError> {
        if let Some(dup) = facet_names.iter().duplicates().next() {
            return Err(PolytopeError::DuplicateName(dup.clone()));
        }
        let mut facet_vertices = vec![VertexSet::new(); facet_names.len()];
        for (v, s) in vertices.iter().enumerate() {
            for &j in s {
                if let Some(fv) = facet_vertices.get_mut(j) {
                    fv.insert(v);
                }
            }
        }
        Ok(Polytope { dim, facet_names, vertices, facet_vertices })
    }

    /// Convenience constructor from index lists with generated names `F0..`.
    pub fn from_lists(dim: usize, facets: usize, vertices: &[&[usize]]) -> Result<Self, PolytopeError> {
        let names = (0..facets).map(|i| format!("F{i}")).collect();
        Self::new(dim, names, vertices.iter().map(|s| s.iter().copied().collect()).collect())
    }

    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.dim;
        if n == 0 {
            return Err(Violation::Dimension { dim: 0 });
        }
        let r = self.facet_names.len();
        for (v, s) in self.vertices.iter().enumerate() {
            if let Some(&j) = s.iter().find(|&&j| j >= r) {
                return Err(Violation::FacetIndex { vertex: v, facet: j });
            }
            if s.len() != n {
                return Err(Violation::Simplicity { vertex: v, facets: s.iter().copied().collect() });
            }
        }
        let mut ridges: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (v, s) in self.vertices.iter().enumerate() {
            for drop in s {
                let ridge: Vec<usize> = s.iter().copied().filter(|j| j != drop).collect();
                ridges.entry(ridge).or_default().push(v);
            }
        }
        if let Some((ridge, vs)) = ridges.iter().find(|(_, vs)| vs.len() != 2) {
            return Err(Violation::Ridge { ridge: ridge.clone(), vertices: vs.clone() });
        }
        let mut seen: HashMap<&FacetSet, usize> = HashMap::new();
        for (v, s) in self.vertices.iter().enumerate() {
            if let Some(&first) = seen.get(s) {
                return Err(Violation::DuplicateVertex { first, second: v });
            }
            seen.insert(s, v);
        }
        if let Some(j) = self.facet_vertices.iter().position(BTreeSet::is_empty) {
            return Err(Violation::EmptyFacet { facet: j });
        }
        let m = self.vertices.len();
        let mut adj = vec![Vec::new(); m];
        for vs in ridges.values() {
            adj[vs[0]].push(vs[1]);
            adj[vs[1]].push(vs[0]);
        }
        let mut reached = vec![false; m];
        let mut queue = VecDeque::from([0]);
        reached[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !reached[w] {
                    reached[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = reached.iter().position(|&x| !x) {
            return Err(Violation::Disconnected { vertex: v });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.facet_names.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facet_names(&self) -> &[String] {
        &self.facet_names
    }

    pub fn facet_name(&self, j: usize) -> &str {
        &self.facet_names[j]
    }

    pub fn facet_index(&self, name: &str) -> Result<usize, PolytopeError> {
        self.facet_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| PolytopeError::UnknownFacetName(name.to_string()))
    }

    pub fn vertices(&self) -> &[FacetSet] {
        &self.vertices
    }

    pub fn vertex_facets(&self, v: usize) -> &FacetSet {
        &self.vertices[v]
    }

    pub fn facet_vertices(&self, j: usize) -> &VertexSet {
        &self.facet_vertices[j]
    }

    pub fn vertex_by_facets(&self, s: &FacetSet) -> Option<usize> {
        self.vertices.iter().position(|t| t == s)
    }

    pub fn facet_names_of(&self, s: &FacetSet) -> Vec<String> {
        s.iter().map(|&j| self.facet_names[j].clone()).collect()
    }

    /// `v<i>` followed by the facet names, for reports.
    pub fn vertex_label(&self, v: usize) -> String {
        format!("v{v}{{{}}}", self.facet_names_of(&self.vertices[v]).join(","))
    }

    pub fn with_facet_names(mut self, names: Vec<String>) -> Result<Self, PolytopeError> {
        if names.len() != self.facet_names.len() {
            return Err(PolytopeError::FacetCount { names: names.len(), max: self.facet_names.len() });
        }
        if let Some(dup) = names.iter().duplicates().next() {
            return Err(PolytopeError::DuplicateName(dup.clone()));
        }
        self.facet_names = names;
        Ok(self)
    }

    /// The face cut out by `s`, or `None` if no vertex contains `s`.
    pub fn face_from_facets(&self, s: &FacetSet) -> Result<Option<Face>, PolytopeError> {
        if let Some(&j) = s.iter().find(|&&j| j >= self.num_facets()) {
            return Err(PolytopeError::UnknownFacet(j));
        }
        let verts: VertexSet = (0..self.num_vertices()).filter(|&v| s.is_subset(&self.vertices[v])).collect();
        Ok(self.face_of_vertices(verts))
    }

    pub fn face_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Face, PolytopeError> {
        let s = names.iter().map(|n| self.facet_index(n.as_ref())).collect::<Result<FacetSet, _>>()?;
        self.face_from_facets(&s)?.ok_or_else(|| {
            PolytopeError::EmptyFace(names.iter().map(|n| n.as_ref().to_string()).collect())
        })
    }

    // vertices must already be the vertex set of a face
    fn face_of_vertices(&self, verts: VertexSet) -> Option<Face> {
        let first = *verts.first()?;
        let support: FacetSet = self.vertices[first]
            .iter()
            .copied()
            .filter(|j| verts.iter().all(|&v| self.vertices[v].contains(j)))
            .collect();
        let dim = self.dim - support.len();
        Some(Face { support, vertices: verts, dim })
    }

    /// Smallest face containing all of `verts`.
    pub fn face_spanned_by(&self, verts: &VertexSet) -> Option<Face> {
        let first = *verts.first()?;
        let common: FacetSet = self.vertices[first]
            .iter()
            .copied()
            .filter(|j| verts.iter().all(|&v| self.vertices[v].contains(j)))
            .collect();
        self.face_from_facets(&common).ok().flatten()
    }

    pub fn whole(&self) -> Face {
        Face {
            support: FacetSet::new(),
            vertices: (0..self.num_vertices()).collect(),
            dim: self.dim,
        }
    }

    pub fn vertex_face(&self, v: usize) -> Face {
        Face { support: self.vertices[v].clone(), vertices: VertexSet::from([v]), dim: 0 }
    }

    pub fn facet_face(&self, j: usize) -> Face {
        Face {
            support: FacetSet::from([j]),
            vertices: self.facet_vertices[j].clone(),
            dim: self.dim - 1,
        }
    }

    pub fn is_facet(&self, f: &Face) -> bool {
        f.support.len() == 1
    }

    /// All nonempty faces, including the polytope itself, sorted by
    /// decreasing dimension then support.
    pub fn faces(&self) -> Vec<Face> {
        let mut by_vertices: BTreeMap<VertexSet, Face> = BTreeMap::new();
        for s in &self.vertices {
            let facets: Vec<usize> = s.iter().copied().collect();
            for t in facets.iter().copied().powerset() {
                let t: FacetSet = t.into_iter().collect();
                let verts: VertexSet =
                    (0..self.num_vertices()).filter(|&v| t.is_subset(&self.vertices[v])).collect();
                if !by_vertices.contains_key(&verts) {
                    let face = self.face_of_vertices(verts.clone()).expect("nonempty");
                    by_vertices.insert(verts, face);
                }
            }
        }
        let mut faces: Vec<Face> = by_vertices.into_values().collect();
        faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.support.cmp(&b.support)));
        faces
    }

    /// Facets of the face `f` as faces of `self`.
    pub fn facets_of_face(&self, f: &Face) -> Vec<Face> {
        if f.dim == 0 {
            return Vec::new();
        }
        (0..self.num_facets())
            .filter(|j| !f.support.contains(j))
            .filter_map(|j| {
                let verts: VertexSet =
                    f.vertices.iter().copied().filter(|&v| self.vertices[v].contains(&j)).collect();
                self.face_of_vertices(verts)
            })
            .filter(|g| g.dim + 1 == f.dim)
            .collect()
    }

    pub fn face_counts(&self) -> FaceCounts {
        let mut counts = vec![0usize; self.dim];
        for f in self.faces() {
            if f.dim < self.dim {
                counts[f.dim] += 1;
            }
        }
        let euler: i64 = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum();
        let expected = if self.dim % 2 == 0 { 0 } else { 2 };
        FaceCounts { counts, euler, expected }
    }

    /// The face as a polytope in its own right.
    pub fn face_polytope(&self, f: &Face) -> FacePolytope {
        let vertex_ids: Vec<usize> = f.vertices.iter().copied().collect();
        let facet_ids: Vec<usize> = (0..self.num_facets())
            .filter(|j| !f.support.contains(j))
            .filter(|&j| vertex_ids.iter().any(|&v| self.vertices[v].contains(&j)))
            .collect();
        let local: HashMap<usize, usize> = facet_ids.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let verts: Vec<FacetSet> = vertex_ids
            .iter()
            .map(|&v| self.vertices[v].iter().filter_map(|j| local.get(j).copied()).collect())
            .collect();
        let names = facet_ids.iter().map(|&j| self.facet_names[j].clone()).collect();
        let polytope = Polytope::new_unchecked(f.dim, names, verts).expect("names are distinct");
        FacePolytope { polytope, vertex_ids, facet_ids }
    }

    /// `P × Δᵏ`: facets `F_j × Δ` in order, then `D0..Dk`. Vertex `(v, s)`
    /// has index `v(k+1) + s` and lies on every `D_t` with `t ≠ s`.
    pub fn product_with_simplex(&self, k: usize) -> Polytope {
        let r = self.num_facets();
        let mut names = self.facet_names.clone();
        for t in 0..=k {
            let n = fresh_name(&names, &format!("D{t}"));
            names.push(n);
        }
        let mut verts = Vec::with_capacity(self.num_vertices() * (k + 1));
        for s in &self.vertices {
            for pos in 0..=k {
                let mut t = s.clone();
                t.extend((0..=k).filter(|&q| q != pos).map(|q| r + q));
                verts.push(t);
            }
        }
        Polytope::new_unchecked(self.dim + k, names, verts).expect("generated names are distinct")
    }

    /// Isomorphism of the vertex-facet incidence, ignoring names and order.
    pub fn is_isomorphic(&self, other: &Polytope) -> bool {
        self.dim == other.dim
            && iso::isomorphic(self.num_facets(), &self.vertices, other.num_facets(), &other.vertices)
    }

    /// A facet bijection `self -> other` carrying vertices to vertices.
    pub fn facet_isomorphism(&self, other: &Polytope) -> Option<Vec<usize>> {
        if self.dim != other.dim {
            return None;
        }
        iso::point_isomorphism(self.num_facets(), &self.vertices, other.num_facets(), &other.vertices)
    }

    /// Same facet positions and same vertex sets (vertex order ignored).
    pub fn same_incidence(&self, other: &Polytope) -> bool {
        let a: BTreeSet<&FacetSet> = self.vertices.iter().collect();
        let b: BTreeSet<&FacetSet> = other.vertices.iter().collect();
        self.dim == other.dim && self.num_facets() == other.num_facets() && a == b
    }

    /// Vertex pairs sharing `n-1` facets.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let m = self.num_vertices();
        let mut out = Vec::new();
        for u in 0..m {
            for w in u + 1..m {
                if self.vertices[u].intersection(&self.vertices[w]).count() + 1 == self.dim {
                    out.push((u, w));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceCounts {
    /// `f_0 .. f_{n-1}`.
    pub counts: Vec<usize>,
    pub euler: i64,
    pub expected: i64,
}

impl FaceCounts {
    pub fn euler_ok(&self) -> bool {
        self.euler == self.expected
    }
}

/// A face re-expressed as a polytope; local indices map back to the parent.
#[derive(Clone, Debug)]
pub struct FacePolytope {
    pub polytope: Polytope,
    pub vertex_ids: Vec<usize>,
    pub facet_ids: Vec<usize>,
}

impl FacePolytope {
    pub fn local_vertex(&self, global: usize) -> Option<usize> {
        self.vertex_ids.iter().position(|&v| v == global)
    }
}

/// A union of faces, stored by its maximal faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubComplex {
    maximal: Vec<Face>,
}

impl SubComplex {
    /// Keeps only the inclusion-maximal members, in canonical order.
    pub fn from_faces(faces: impl IntoIterator<Item = Face>) -> Self {
        let mut faces: Vec<Face> = faces.into_iter().collect();
        faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.support.cmp(&b.support)));
        faces.dedup_by(|a, b| a.vertices == b.vertices);
        let mut maximal: Vec<Face> = Vec::new();
        for f in faces {
            if !maximal.iter().any(|m| f.vertices.is_subset(&m.vertices)) {
                maximal.push(f);
            }
        }
        SubComplex { maximal }
    }

    pub fn whole(p: &Polytope) -> Self {
        SubComplex { maximal: vec![p.whole()] }
    }

    pub fn maximal_faces(&self) -> &[Face] {
        &self.maximal
    }

    pub fn vertices(&self) -> VertexSet {
        self.maximal.iter().flat_map(|f| f.vertices.iter().copied()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.maximal.is_empty()
    }

    pub fn contains_face(&self, f: &Face) -> bool {
        self.maximal.iter().any(|m| f.vertices.is_subset(&m.vertices))
    }

    /// Maximal faces that contain `v`.
    pub fn maximal_faces_at(&self, v: usize) -> Vec<&Face> {
        self.maximal.iter().filter(|m| m.contains_vertex(v)).collect()
    }
}

/// `base`, primed until it clashes with none of `taken`.
pub(crate) fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}
