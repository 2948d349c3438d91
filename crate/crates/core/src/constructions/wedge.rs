use num_bigint::BigInt;

use super::ConstructionError;
use crate::char_map::{validate_rchar, CharMap};
use crate::lattice::IntVector;
use crate::polytope::{fresh_name, FacetSet, Polytope};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WedgeParams {
    pub k: usize,
    pub a: i64,
}

impl WedgeParams {
    pub fn new(k: usize, a: i64) -> Result<Self, ConstructionError> {
        if k == 0 {
            return Err(ConstructionError::ZeroK);
        }
        if a == 1 {
            return Err(ConstructionError::ParameterA);
        }
        Ok(WedgeParams { k, a })
    }
}

#[derive(Clone, Debug)]
pub struct WedgeResult {
    pub polytope: Polytope,
    /// Old facet to new facet; the wedged facet maps to `H`.
    pub facet_map: Vec<usize>,
    pub h: usize,
    /// `W1..Wk`.
    pub w: Vec<usize>,
    /// Per new vertex: the source vertex and its simplex slot (0 for the
    /// corner and for vertices over the wedged facet, t for the t-th
    /// hyperplane vertex).
    pub vertex_origin: Vec<(usize, usize)>,
}

/// The polytopal k-wedge at facet `f`. Facets: old ones except `f` in order,
/// then `H`, then `W1..Wk`.
pub fn k_wedge(p: &Polytope, f: usize, k: usize) -> Result<WedgeResult, ConstructionError> {
    if f >= p.num_facets() {
        return Err(ConstructionError::NotAFacet(f));
    }
    if k == 0 {
        return Err(ConstructionError::ZeroK);
    }
    let r = p.num_facets();
    let h = r - 1;
    let w: Vec<usize> = (1..=k).map(|s| h + s).collect();
    let mut facet_map = vec![0; r];
    let mut names = Vec::with_capacity(r + k);
    for j in (0..r).filter(|&j| j != f) {
        facet_map[j] = names.len();
        names.push(p.facet_name(j).to_string());
    }
    facet_map[f] = h;
    for base in std::iter::once("H".to_string()).chain((1..=k).map(|s| format!("W{s}"))) {
        let n = fresh_name(&names, &base);
        names.push(n);
    }

    let mut verts = Vec::new();
    let mut origin = Vec::new();
    for (v, s) in p.vertices().iter().enumerate() {
        let base: FacetSet = s.iter().filter(|&&j| j != f).map(|&j| facet_map[j]).collect();
        if s.contains(&f) {
            let mut t = base;
            t.insert(h);
            t.extend(w.iter().copied());
            verts.push(t);
            origin.push((v, 0));
            continue;
        }
        let mut corner = base.clone();
        corner.extend(w.iter().copied());
        verts.push(corner);
        origin.push((v, 0));
        for t in 1..=k {
            let mut hv = base.clone();
            hv.insert(h);
            hv.extend((1..=k).filter(|&s| s != t).map(|s| h + s));
            verts.push(hv);
            origin.push((v, t));
        }
    }
    let polytope = Polytope::new_unchecked(p.dim() + k, names, verts)?;
    polytope.validate().map_err(ConstructionError::InvalidOutput)?;
    Ok(WedgeResult { polytope, facet_map, h, w, vertex_origin: origin })
}

// Rows over the simplex part: index 0 is the wedged-facet row, s ≥ 1 the
// row of W_s / D_s.
fn simplex_rows(lambda: &CharMap, f: usize, params: WedgeParams) -> Vec<IntVector> {
    let k = params.k;
    let n = lambda.rank();
    let mut rows = Vec::with_capacity(k + 1);
    rows.push(IntVector::from_i64s(&vec![-1; k]).concat(lambda.vector(f)));
    let mut first = vec![BigInt::from(0); n + k];
    first[0] = BigInt::from(1);
    first[1] = BigInt::from(params.a);
    rows.push(IntVector::new(first));
    for s in 2..=k {
        rows.push(IntVector::unit(n + k, s - 1));
    }
    rows
}

fn lift(v: &IntVector, k: usize) -> IntVector {
    IntVector::zeros(k).concat(v)
}

/// λ̃ on `P × Δᵏ` (facet order of [`Polytope::product_with_simplex`]).
pub fn wedge_char_on_product(
    p: &Polytope,
    lambda: &CharMap,
    f: usize,
    params: WedgeParams,
) -> Result<CharMap, ConstructionError> {
    let params = WedgeParams::new(params.k, params.a)?;
    if f >= p.num_facets() {
        return Err(ConstructionError::NotAFacet(f));
    }
    validate_rchar(p, lambda)?;
    let mut vectors: Vec<IntVector> = lambda.vectors().iter().map(|v| lift(v, params.k)).collect();
    vectors.extend(simplex_rows(lambda, f, params));
    let out = CharMap::new(lambda.rank() + params.k, vectors)?;
    validate_rchar(&p.product_with_simplex(params.k), &out)?;
    Ok(out)
}

/// λ_F^k on the k-wedge (facet order of [`k_wedge`]).
pub fn k_wedge_char(
    p: &Polytope,
    lambda: &CharMap,
    f: usize,
    params: WedgeParams,
) -> Result<(WedgeResult, CharMap), ConstructionError> {
    let params = WedgeParams::new(params.k, params.a)?;
    validate_rchar(p, lambda)?;
    let wr = k_wedge(p, f, params.k)?;
    let mut vectors: Vec<IntVector> =
        (0..p.num_facets()).filter(|&j| j != f).map(|j| lift(lambda.vector(j), params.k)).collect();
    vectors.extend(simplex_rows(lambda, f, params));
    let out = CharMap::new(lambda.rank() + params.k, vectors)?;
    validate_rchar(&wr.polytope, &out)?;
    Ok((wr, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polytope {
        Polytope::from_lists(2, 4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]).unwrap()
    }

    #[test]
    fn interval_two_wedge_is_tetrahedron() {
        let i = Polytope::from_lists(1, 2, &[&[0], &[1]]).unwrap();
        let w = k_wedge(&i, 1, 2).unwrap().polytope;
        assert_eq!((w.dim(), w.num_facets(), w.num_vertices()), (3, 4, 4));
        assert_eq!(w.face_counts().counts, vec![4, 6, 4]);
    }

    #[test]
    fn square_rows_for_a_two() {
        let l = CharMap::from_i64s(2, &[&[1, 0], &[2, 1], &[-3, 7], &[5, 4]]).unwrap();
        let (_, c) = k_wedge_char(&square(), &l, 3, WedgeParams { k: 2, a: 2 }).unwrap();
        let want = CharMap::from_i64s(
            4,
            &[&[0, 0, 1, 0], &[0, 0, 2, 1], &[0, 0, -3, 7], &[-1, -1, 5, 4], &[1, 2, 0, 0], &[0, 1, 0, 0]],
        )
        .unwrap();
        assert_eq!(c, want);
    }

    #[test]
    fn a_equal_one_rejected() {
        let l = CharMap::from_i64s(2, &[&[1, 0], &[2, 1], &[-3, 7], &[5, 4]]).unwrap();
        assert!(matches!(
            k_wedge_char(&square(), &l, 3, WedgeParams { k: 2, a: 1 }),
            Err(ConstructionError::ParameterA)
        ));
        assert!(matches!(
            wedge_char_on_product(&square(), &l, 3, WedgeParams { k: 1, a: 1 }),
            Err(ConstructionError::ParameterA)
        ));
    }
}
