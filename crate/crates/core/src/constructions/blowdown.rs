use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::ConstructionError;
use crate::char_map::{validate_rchar, CharMap, CharMapError};
use crate::lattice::det_of_rows;
use crate::polytope::{Face, FacetSet, Polytope};

/// A verified identification of the facet `big` with `base × Δ^{n-d-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductStructure {
    pub big_facet: usize,
    pub base_face: Face,
    /// `P_1..P_{n-d}`, ascending.
    pub p_facets: Vec<usize>,
    /// The one `P` facet not containing the base face.
    pub distinguished: usize,
    /// Fiber key `S(w) ∖ ({big} ∪ P)` to its members `(vertex, missed P facet)`.
    pub fibers: BTreeMap<FacetSet, Vec<(usize, usize)>>,
}

impl ProductStructure {
    /// Checks the product conditions for a given distinguished facet.
    pub fn verify(p: &Polytope, big: usize, base: &Face, distinguished: usize) -> Result<Self, String> {
        let codim = base.support().len();
        let mut p_facets: Vec<usize> = base.support().iter().copied().filter(|&j| j != big).collect();
        p_facets.push(distinguished);
        p_facets.sort_unstable();
        let pset: FacetSet = p_facets.iter().copied().collect();
        let big_vertices = p.facet_vertices(big);
        if big_vertices.len() != base.vertices().len() * codim {
            return Err(format!(
                "facet has {} vertices, base face {} times {codim}",
                big_vertices.len(),
                base.vertices().len()
            ));
        }
        if let Some(&v) = base.vertices().iter().find(|&&v| p.vertex_facets(v).contains(&distinguished)) {
            return Err(format!("base vertex {v} lies on facet {distinguished}"));
        }
        let mut fibers: BTreeMap<FacetSet, Vec<(usize, usize)>> = BTreeMap::new();
        for &w in big_vertices {
            let s = p.vertex_facets(w);
            let missed: Vec<usize> = p_facets.iter().copied().filter(|j| !s.contains(j)).collect();
            if missed.len() != 1 {
                return Err(format!("vertex {w} misses {} of the P facets", missed.len()));
            }
            let key: FacetSet = s.iter().copied().filter(|j| *j != big && !pset.contains(j)).collect();
            fibers.entry(key).or_default().push((w, missed[0]));
        }
        for (key, members) in &fibers {
            let misses: BTreeSet<usize> = members.iter().map(|m| m.1).collect();
            if members.len() != codim || misses.len() != codim {
                return Err(format!("fiber {key:?} has {} members, {} distinct misses", members.len(), misses.len()));
            }
        }
        Ok(ProductStructure { big_facet: big, base_face: base.clone(), p_facets, distinguished, fibers })
    }

    /// Fiber key of a vertex of the big facet.
    pub fn fiber_of(&self, w: usize) -> Option<&FacetSet> {
        self.fibers.iter().find(|(_, ms)| ms.iter().any(|m| m.0 == w)).map(|(k, _)| k)
    }
}

/// Finds the unique product structure of `big` over `base`.
pub fn detect_product_structure(p: &Polytope, big: usize, base: &Face) -> Result<ProductStructure, ConstructionError> {
    if big >= p.num_facets() {
        return Err(ConstructionError::NotAFacet(big));
    }
    if !base.support().contains(&big) || base.support().len() < 2 {
        return Err(ConstructionError::BaseNotInFacet);
    }
    let big_vertices = p.facet_vertices(big);
    let candidates: Vec<usize> = (0..p.num_facets())
        .filter(|&g| g != big && !base.support().contains(&g))
        .filter(|&g| big_vertices.iter().any(|&w| p.vertex_facets(w).contains(&g)))
        .collect();
    let mut found = Vec::new();
    let mut reasons = Vec::new();
    for g in candidates {
        match ProductStructure::verify(p, big, base, g) {
            Ok(ps) => found.push(ps),
            Err(why) => reasons.push(format!("{}: {why}", p.facet_name(g))),
        }
    }
    match found.len() {
        0 if reasons.is_empty() => Err(ConstructionError::NotProductType("no candidate facet".into())),
        0 => Err(ConstructionError::NotProductType(reasons.join("; "))),
        1 => Ok(found.pop().unwrap()),
        _ => Err(ConstructionError::Ambiguous { candidates: found.iter().map(|ps| ps.distinguished).collect() }),
    }
}

#[derive(Clone, Debug)]
pub struct BlowdownResult {
    pub polytope: Polytope,
    pub structure: ProductStructure,
    /// Old facet to new facet; `None` for the collapsed facet.
    pub facet_map: Vec<Option<usize>>,
    /// Old vertex to new vertex, constant on fibers.
    pub vertex_map: Vec<usize>,
}

impl BlowdownResult {
    /// Image of an old facet set (the collapsed facet is dropped).
    pub fn map_facets(&self, s: &FacetSet) -> FacetSet {
        s.iter().filter_map(|&j| self.facet_map[j]).collect()
    }

    /// New vertices that are images of fibers.
    pub fn collapsed_vertices(&self) -> BTreeSet<usize> {
        self.structure.fibers.values().map(|ms| self.vertex_map[ms[0].0]).collect()
    }
}

pub fn blowdown(p: &Polytope, ps: &ProductStructure) -> Result<BlowdownResult, ConstructionError> {
    let big = ps.big_facet;
    let mut facet_map = vec![None; p.num_facets()];
    let mut names = Vec::new();
    for j in (0..p.num_facets()).filter(|&j| j != big) {
        facet_map[j] = Some(names.len());
        names.push(p.facet_name(j).to_string());
    }
    let remap = |s: &FacetSet| -> FacetSet { s.iter().filter_map(|&j| facet_map[j]).collect() };
    let mut verts: Vec<FacetSet> = Vec::new();
    let mut vertex_map = vec![usize::MAX; p.num_vertices()];
    let mut fiber_image: BTreeMap<&FacetSet, usize> = BTreeMap::new();
    for (v, s) in p.vertices().iter().enumerate() {
        if !s.contains(&big) {
            vertex_map[v] = verts.len();
            verts.push(remap(s));
            continue;
        }
        let key = ps.fiber_of(v).ok_or_else(|| ConstructionError::NotProductType(format!("vertex {v} in no fiber")))?;
        if let Some(&img) = fiber_image.get(key) {
            vertex_map[v] = img;
            continue;
        }
        let mut t: FacetSet = key.clone();
        t.extend(ps.p_facets.iter().copied());
        fiber_image.insert(key, verts.len());
        vertex_map[v] = verts.len();
        verts.push(remap(&t));
    }
    let polytope = Polytope::new_unchecked(p.dim(), names, verts)?;
    polytope.validate().map_err(ConstructionError::InvalidOutput)?;
    Ok(BlowdownResult { polytope, structure: ps.clone(), facet_map, vertex_map })
}

/// Detects the product structure and blows down.
pub fn blowdown_at(p: &Polytope, big: usize, base: &Face) -> Result<BlowdownResult, ConstructionError> {
    let ps = detect_product_structure(p, big, base)?;
    blowdown(p, &ps)
}

/// Independence of `S_b` at the image of one fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCheck {
    pub base_vertex: usize,
    pub image_vertex: usize,
    pub det: BigInt,
}

impl FiberCheck {
    pub fn independent(&self) -> bool {
        !self.det.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub char_map: CharMap,
    pub fibers: Vec<FiberCheck>,
}

/// Transports λ along the facet map and checks the result on the blowdown.
pub fn restrict_char(p: &Polytope, lambda: &CharMap, bd: &BlowdownResult) -> Result<Restriction, ConstructionError> {
    validate_rchar(p, lambda)?;
    let q = &bd.polytope;
    let mut vectors = vec![None; q.num_facets()];
    for (j, img) in bd.facet_map.iter().enumerate() {
        if let Some(i) = img {
            vectors[*i] = Some(lambda.vector(j).clone());
        }
    }
    let char_map = CharMap::new(lambda.rank(), vectors.into_iter().map(|v| v.expect("bijective")).collect())?;
    let mut fibers = Vec::new();
    for &b in bd.structure.base_face.vertices() {
        let image = bd.vertex_map[b];
        let rows: Vec<_> = q.vertex_facets(image).iter().map(|&j| char_map.vector(j).clone()).collect();
        fibers.push(FiberCheck { base_vertex: b, image_vertex: image, det: det_of_rows(&rows).map_err(CharMapError::from)? });
    }
    match validate_rchar(q, &char_map) {
        Ok(()) => Ok(Restriction { char_map, fibers }),
        Err(CharMapError::Degenerate { vertex, det }) => Err(ConstructionError::RestrictionInvalid { vertex, det, fibers }),
        Err(e) => Err(e.into()),
    }
}
