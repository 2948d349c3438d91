use itertools::Itertools;

use super::ConstructionError;
use crate::char_map::{validate_rchar, CharMap};
use crate::lattice::IntVector;
use crate::polytope::{fresh_name, Face, FacetSet, Polytope};

#[derive(Clone, Debug)]
pub struct BlowupResult {
    pub polytope: Polytope,
    /// Index of the new facet; old facets keep their positions.
    pub new_facet: usize,
    /// Old vertex each new vertex came from.
    pub vertex_origin: Vec<usize>,
}

/// Truncates the face `f`. Each vertex of `f` is replaced, in place, by one
/// vertex per facet of the support, in support order.
pub fn blowup(p: &Polytope, f: &Face) -> Result<BlowupResult, ConstructionError> {
    match f.support().len() {
        0 => return Err(ConstructionError::WholeFace),
        1 => return Err(ConstructionError::FacetBlowup),
        _ => {}
    }
    let r = p.num_facets();
    let mut names = p.facet_names().to_vec();
    let t = fresh_name(&names, &format!("T:{}", f.support().iter().map(|&j| p.facet_name(j)).join("+")));
    names.push(t);
    let mut verts = Vec::new();
    let mut origin = Vec::new();
    for (v, s) in p.vertices().iter().enumerate() {
        if !f.contains_vertex(v) {
            verts.push(s.clone());
            origin.push(v);
            continue;
        }
        for h in f.support() {
            let mut t: FacetSet = s.iter().copied().filter(|j| j != h).collect();
            t.insert(r);
            verts.push(t);
            origin.push(v);
        }
    }
    let polytope = Polytope::new_unchecked(p.dim(), names, verts)?;
    polytope.validate().map_err(ConstructionError::InvalidOutput)?;
    Ok(BlowupResult { polytope, new_facet: r, vertex_origin: origin })
}

/// λ on the blowup: old vectors unchanged, `v` on the new facet.
pub fn extend_char(bu: &BlowupResult, lambda: &CharMap, v: IntVector) -> Result<CharMap, ConstructionError> {
    let mut vectors = lambda.vectors().to_vec();
    vectors.push(v);
    let ext = CharMap::new(lambda.rank(), vectors)?;
    validate_rchar(&bu.polytope, &ext)?;
    Ok(ext)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_corner_cut_is_pentagon() {
        let sq = Polytope::from_lists(2, 4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]).unwrap();
        let bu = blowup(&sq, &sq.vertex_face(0)).unwrap();
        assert_eq!((bu.polytope.num_facets(), bu.polytope.num_vertices()), (5, 5));
        assert_eq!(bu.polytope.facet_name(4), "T:F0+F1");
        assert!(matches!(blowup(&sq, &sq.facet_face(0)), Err(ConstructionError::FacetBlowup)));
        assert!(matches!(blowup(&sq, &sq.whole()), Err(ConstructionError::WholeFace)));
    }
}
