//! Simplicial complexes dual to simple polytopes, the simplicial k-wedge and
//! characteristic vectors on the 2-wedge.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::char_map::{CharMap, CharMapError};
use crate::iso;
use crate::lattice::{det_of_rows, to_u64, IntVector};
use crate::polytope::Polytope;

pub type Simplex = BTreeSet<usize>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("no maximal simplices")]
    Empty,
    #[error("duplicate vertex name {0:?}")]
    DuplicateName(String),
    #[error("simplex refers to vertex {0}, which does not exist")]
    UnknownVertex(usize),
    #[error("vertex {0:?} lies in no simplex")]
    UnusedVertex(String),
    #[error("unknown vertex name {0:?}")]
    UnknownName(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("parameter a = 1 does not give a fan")]
    ParameterA,
    #[error("the complex is not pure of dimension {0}")]
    NotPure(usize),
    #[error("vectors of simplex {0:?} are linearly dependent")]
    Dependent(Vec<String>),
    #[error(transparent)]
    CharMap(#[from] CharMapError),
}

#[derive(Serialize, Deserialize)]
struct RawComplex {
    vertices: Vec<String>,
    maximal: Vec<Vec<usize>>,
}

/// Named vertices and an antichain of maximal simplices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex", into = "RawComplex")]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    maximal: Vec<Simplex>,
}

impl TryFrom<RawComplex> for SimplicialComplex {
    type Error = SimplicialError;

    fn try_from(raw: RawComplex) -> Result<Self, Self::Error> {
        SimplicialComplex::new(raw.vertices, raw.maximal.into_iter().map(|s| s.into_iter().collect()).collect())
    }
}

impl From<SimplicialComplex> for RawComplex {
    fn from(k: SimplicialComplex) -> Self {
        RawComplex { vertices: k.vertices, maximal: k.maximal.into_iter().map(|s| s.into_iter().collect()).collect() }
    }
}

// Drops simplices contained in others and sorts the rest.
fn antichain(simplices: impl IntoIterator<Item = Simplex>) -> Vec<Simplex> {
    let all: BTreeSet<Simplex> = simplices.into_iter().collect();
    all.iter().filter(|s| !all.iter().any(|t| t != *s && s.is_subset(t))).cloned().collect()
}

impl SimplicialComplex {
    pub fn new(vertices: Vec<String>, maximal: Vec<Simplex>) -> Result<Self, SimplicialError> {
        if let Some(dup) = vertices.iter().duplicates().next() {
            return Err(SimplicialError::DuplicateName(dup.clone()));
        }
        if maximal.iter().all(BTreeSet::is_empty) {
            return Err(SimplicialError::Empty);
        }
        if let Some(&v) = maximal.iter().flatten().find(|&&v| v >= vertices.len()) {
            return Err(SimplicialError::UnknownVertex(v));
        }
        let maximal = antichain(maximal);
        let used: BTreeSet<usize> = maximal.iter().flatten().copied().collect();
        if let Some(v) = (0..vertices.len()).find(|v| !used.contains(v)) {
            return Err(SimplicialError::UnusedVertex(vertices[v].clone()));
        }
        Ok(SimplicialComplex { vertices, maximal })
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn maximal(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize, SimplicialError> {
        self.vertices.iter().position(|n| n == name).ok_or_else(|| SimplicialError::UnknownName(name.into()))
    }

    /// Dimension of the largest simplex.
    pub fn dim(&self) -> usize {
        self.maximal.iter().map(BTreeSet::len).max().unwrap_or(0) - 1
    }

    pub fn is_pure(&self) -> bool {
        self.maximal.iter().map(BTreeSet::len).all_equal()
    }

    /// Maximal faces of the link of `v`.
    pub fn link(&self, v: usize) -> Vec<Simplex> {
        antichain(self.maximal.iter().filter(|s| s.contains(&v)).map(|s| s.iter().copied().filter(|&u| u != v).collect()))
    }

    /// Maximal faces of the deletion of `v`.
    pub fn deletion(&self, v: usize) -> Vec<Simplex> {
        antichain(self.maximal.iter().map(|s| s.iter().copied().filter(|&u| u != v).collect()))
    }

    pub fn names_of(&self, s: &Simplex) -> Vec<String> {
        s.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Isomorphism as abstract complexes, ignoring names.
    pub fn is_isomorphic(&self, other: &SimplicialComplex) -> bool {
        iso::isomorphic(self.num_vertices(), &self.maximal, other.num_vertices(), &other.maximal)
    }
}

/// One vertex per facet of `p`, one maximal simplex per vertex of `p`.
pub fn dual_of_polytope(p: &Polytope) -> SimplicialComplex {
    SimplicialComplex::new(p.facet_names().to_vec(), p.vertices().to_vec()).expect("a valid polytope has a dual")
}

/// Which joins the k-wedge uses. `Literal` joins single new vertices with
/// the deletion, which is not pure for `k ≥ 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WedgeVariant {
    #[default]
    Pure,
    Literal,
}

/// `K_k(v)`: old vertices keep their order, `v` becomes `v^0..v^k` at the end.
/// Pure variant: `{v^0..v^k} * link(v) ∪ ∂{v^0..v^k} * del(v)`.
pub fn simplicial_k_wedge(
    k_cx: &SimplicialComplex,
    v: usize,
    k: usize,
    variant: WedgeVariant,
) -> Result<SimplicialComplex, SimplicialError> {
    if v >= k_cx.num_vertices() {
        return Err(SimplicialError::UnknownVertex(v));
    }
    if k == 0 {
        return Err(SimplicialError::ZeroK);
    }
    let old = k_cx.num_vertices() - 1;
    let relabel = |u: usize| if u < v { u } else { u - 1 };
    let new: Simplex = (old..=old + k).collect();
    let mut names: Vec<String> = k_cx.vertices.iter().enumerate().filter(|&(u, _)| u != v).map(|(_, n)| n.clone()).collect();
    names.extend((0..=k).map(|i| format!("{}^{i}", k_cx.vertices[v])));

    let second: Vec<Simplex> = match variant {
        WedgeVariant::Pure => new.iter().map(|&x| new.iter().copied().filter(|&y| y != x).collect()).collect(),
        WedgeVariant::Literal => new.iter().map(|&x| Simplex::from([x])).collect(),
    };
    let mut maximal = Vec::new();
    for l in k_cx.link(v) {
        maximal.push(l.iter().map(|&u| relabel(u)).chain(new.iter().copied()).collect());
    }
    for d in k_cx.deletion(v) {
        for s in &second {
            maximal.push(d.iter().map(|&u| relabel(u)).chain(s.iter().copied()).collect());
        }
    }
    SimplicialComplex::new(names, maximal)
}

/// Per-cone independence; returns each maximal simplex's `|det|` in order.
pub fn cone_orders(k_cx: &SimplicialComplex, lambda: &CharMap) -> Result<Vec<u64>, SimplicialError> {
    let n = lambda.rank();
    if lambda.len() != k_cx.num_vertices() {
        return Err(CharMapError::FacetCount { expected: k_cx.num_vertices(), found: lambda.len() }.into());
    }
    if !k_cx.is_pure() || k_cx.dim() + 1 != n {
        return Err(SimplicialError::NotPure(n - 1));
    }
    k_cx.maximal
        .iter()
        .map(|s| {
            let rows: Vec<IntVector> = s.iter().map(|&u| lambda.vector(u).clone()).collect();
            let det = det_of_rows(&rows).map_err(CharMapError::from)?;
            if det.is_zero() {
                return Err(SimplicialError::Dependent(k_cx.names_of(s)));
            }
            Ok(to_u64(&num_traits::Signed::abs(&det)).map_err(CharMapError::from)?)
        })
        .collect()
}

/// `K_2(v)` with `λ_v²`: `(0,0,λᵢ)` on old vertices, then `(-1,-1,λ(v))`,
/// `(1,a,0)`, `(0,1,0)` on `v^0, v^1, v^2`.
pub fn wedge_vertex_vectors(
    k_cx: &SimplicialComplex,
    lambda: &CharMap,
    v: usize,
    a: i64,
) -> Result<(SimplicialComplex, CharMap), SimplicialError> {
    if a == 1 {
        return Err(SimplicialError::ParameterA);
    }
    let wedge = simplicial_k_wedge(k_cx, v, 2, WedgeVariant::Pure)?;
    let n = lambda.rank();
    let mut vectors: Vec<IntVector> =
        (0..k_cx.num_vertices()).filter(|&u| u != v).map(|u| IntVector::zeros(2).concat(lambda.vector(u))).collect();
    vectors.push(IntVector::from_i64s(&[-1, -1]).concat(lambda.vector(v)));
    vectors.push(IntVector::from_i64s(&[1, a]).concat(&IntVector::zeros(n)));
    vectors.push(IntVector::from_i64s(&[0, 1]).concat(&IntVector::zeros(n)));
    let out = CharMap::new(n + 2, vectors)?;
    cone_orders(&wedge, &out)?;
    Ok((wedge, out))
}
