mod common;

use std::collections::BTreeSet;

use common::*;
use polywedge::char_map::{singularity_order, validate_rchar};
use polywedge::constructions::*;
use polywedge::{FacetSet, Polytope};
use proptest::prelude::*;

fn vertex_sets(p: &Polytope) -> BTreeSet<FacetSet> {
    p.vertices().iter().cloned().collect()
}

// F × Δᵏ inside P × Δᵏ, and its face F × {vertex 0}.
fn product_faces(p: &Polytope, f: usize, k: usize) -> (Polytope, usize, polywedge::Face) {
    let prod = p.product_with_simplex(k);
    let r = p.num_facets();
    let support: FacetSet = std::iter::once(f).chain((1..=k).map(|t| r + t)).collect();
    let base = prod.face_from_facets(&support).unwrap().unwrap();
    (prod, f, base)
}

#[test]
fn wedge_is_blowdown_of_product() {
    for (name, p) in corpus() {
        for f in 0..p.num_facets() {
            for k in 1..=3 {
                let w = k_wedge(&p, f, k).unwrap().polytope;
                let (prod, big, base) = product_faces(&p, f, k);
                let bd = blowdown_at(&prod, big, &base).unwrap_or_else(|e| panic!("{name} F{f} k{k}: {e}"));
                assert!(w.is_isomorphic(&bd.polytope), "{name} F{f} k{k}");
                // facets line up as old-minus-F, then H ~ D0, W_s ~ D_s
                assert_eq!(vertex_sets(&w), vertex_sets(&bd.polytope), "{name} F{f} k{k}");
            }
        }
    }
}

#[test]
fn wedge_counts() {
    for (name, p) in corpus() {
        let (m, r) = (p.num_vertices(), p.num_facets());
        for f in 0..r {
            let alpha = p.facet_vertices(f).len();
            for k in 1..=3 {
                let w = k_wedge(&p, f, k).unwrap().polytope;
                assert_eq!(w.num_vertices(), (k + 1) * (m - alpha) + alpha, "{name} F{f} k{k}");
                assert_eq!(w.num_facets(), r + k, "{name} F{f} k{k}");
                assert_eq!(w.dim(), p.dim() + k);
                assert!(w.face_counts().euler_ok(), "{name} F{f} k{k}");
                w.validate().unwrap();
            }
        }
    }
}

#[test]
fn interval_two_wedge_is_tetrahedron() {
    for f in 0..2 {
        let w = k_wedge(&interval(), f, 2).unwrap().polytope;
        assert_eq!((w.num_vertices(), w.num_facets()), (4, 4));
        assert!(w.is_isomorphic(&simplex(3)));
    }
    // and the k-wedge of an interval is the (k+1)-simplex
    for k in 1..=4 {
        assert!(k_wedge(&interval(), 0, k).unwrap().polytope.is_isomorphic(&simplex(k + 1)));
    }
}

#[test]
fn one_wedge_of_a_polygon() {
    let w = k_wedge(&polygon(5), 0, 1).unwrap().polytope;
    assert_eq!((w.dim(), w.num_facets(), w.num_vertices()), (3, 6, 8));
    assert_eq!(w.face_counts().counts, vec![8, 12, 6]);
}

#[test]
fn blowup_then_blowdown_round_trips() {
    for (name, p) in corpus() {
        for face in p.faces().into_iter().filter(|f| f.support().len() >= 2) {
            let bu = match blowup(&p, &face) {
                Ok(b) => b,
                Err(e) => panic!("{name} {:?}: {e}", face.support()),
            };
            let t = bu.new_facet;
            let q = &bu.polytope;
            assert_eq!(q.num_facets(), p.num_facets() + 1);
            let c = face.support().len();
            assert_eq!(q.num_vertices(), p.num_vertices() + (c - 1) * face.vertices().len());
            // T ∩ (support minus its first facet) meets T in a copy of the face
            let h0 = *face.support().iter().next().unwrap();
            let base_support: FacetSet =
                face.support().iter().copied().filter(|&h| h != h0).chain(std::iter::once(t)).collect();
            let base = q.face_from_facets(&base_support).unwrap().unwrap();
            assert_eq!(base.dim(), face.dim());
            let bd = blowdown_at(q, t, &base).unwrap_or_else(|e| panic!("{name} {:?}: {e}", face.support()));
            assert!(bd.polytope.is_isomorphic(&p), "{name} {:?}", face.support());
            assert_eq!(vertex_sets(&bd.polytope), vertex_sets(&p), "{name} {:?}", face.support());
        }
    }
}

#[test]
fn blowup_rejects_whole_and_facets() {
    let c = cube();
    assert!(matches!(blowup(&c, &c.whole()), Err(ConstructionError::WholeFace)));
    assert!(matches!(blowup(&c, &c.facet_face(2)), Err(ConstructionError::FacetBlowup)));
}

#[test]
fn blowdown_error_paths() {
    let c = cube();
    // a square facet on one of its vertices is not of product type
    let e = blowdown_at(&c, 5, &c.vertex_face(0)).unwrap_err();
    assert!(matches!(e, ConstructionError::NotProductType(_)), "{e}");
    // base outside the facet
    let e = blowdown_at(&c, 5, &c.vertex_face(4)).unwrap_err();
    assert!(matches!(e, ConstructionError::BaseNotInFacet), "{e}");
    // a triangle on a vertex is a product, but collapsing it breaks the tetrahedron
    let t = simplex(3);
    let e = blowdown_at(&t, 0, &t.vertex_face(1)).unwrap_err();
    assert!(matches!(e, ConstructionError::InvalidOutput(_)), "{e}");
}

#[test]
fn restriction_of_wedge_map_matches_wedge_map() {
    let mut r = rng(21);
    for (name, p) in corpus().into_iter().filter(|(_, p)| p.dim() <= 3) {
        let l = random_char(&p, &mut r, 3);
        for f in 0..p.num_facets() {
            for (k, a) in [(1, 0), (2, 2), (2, -3), (3, 5)] {
                let params = WedgeParams::new(k, a).unwrap();
                let (_, on_wedge) = k_wedge_char(&p, &l, f, params).unwrap();
                let on_prod = wedge_char_on_product(&p, &l, f, params).unwrap();
                let (prod, big, base) = product_faces(&p, f, k);
                let bd = blowdown_at(&prod, big, &base).unwrap();
                let res = restrict_char(&prod, &on_prod, &bd).unwrap_or_else(|e| panic!("{name} F{f}: {e}"));
                assert_eq!(res.char_map, on_wedge, "{name} F{f} k{k} a{a}");
                assert!(res.fibers.iter().all(FiberCheck::independent));
            }
        }
    }
}

// Vertex (v, s) of P × Δᵏ picks up |1-a| exactly when s = 2.
fn order_law_holds(p: &Polytope, l: &polywedge::CharMap, f: usize, k: usize, a: i64) {
    let on_prod = wedge_char_on_product(p, l, f, WedgeParams::new(k, a).unwrap()).unwrap();
    let prod = p.product_with_simplex(k);
    let raw = small(&on_prod);
    let r = p.num_facets();
    for v in 0..p.num_vertices() {
        let base = singularity_order(p, l, v).unwrap();
        for s in 0..=k {
            let idx = v * (k + 1) + s;
            let rows: Vec<Vec<i128>> = prod.vertex_facets(idx).iter().map(|&j| raw[j].clone()).collect();
            let oracle = det(&rows).unsigned_abs() as u64;
            let ours = singularity_order(&prod, &on_prod, idx).unwrap();
            assert_eq!(ours, oracle);
            let on_d0_d1 = prod.vertex_facets(idx).contains(&r) && prod.vertex_facets(idx).contains(&(r + 1));
            let off_d2 = k >= 2 && !prod.vertex_facets(idx).contains(&(r + 2));
            let factor = if on_d0_d1 && off_d2 { (1 - a).unsigned_abs() } else { 1 };
            assert_eq!(ours, factor * base, "v{v} s{s} k{k} a{a}");
        }
    }
}

#[test]
fn product_order_law() {
    let mut r = rng(22);
    for (_, p) in corpus().into_iter().filter(|(_, p)| p.dim() <= 3) {
        let l = random_char(&p, &mut r, 3);
        for f in 0..p.num_facets() {
            for k in 1..=3 {
                for a in [-4, -1, 0, 2, 3, 7] {
                    order_law_holds(&p, &l, f, k, a);
                }
            }
        }
    }
}

#[test]
fn parameter_one_is_rejected() {
    let (sq, l) = square();
    assert!(matches!(WedgeParams::new(2, 1), Err(ConstructionError::ParameterA)));
    assert!(matches!(WedgeParams::new(0, 0), Err(ConstructionError::ZeroK)));
    assert!(matches!(k_wedge(&sq, 0, 0), Err(ConstructionError::ZeroK)));
    assert!(matches!(k_wedge(&sq, 9, 1), Err(ConstructionError::NotAFacet(9))));
    let bad = WedgeParams { k: 2, a: 1 };
    assert!(matches!(wedge_char_on_product(&sq, &l, 0, bad), Err(ConstructionError::ParameterA)));
}

#[test]
fn extended_maps_validate_or_report() {
    let c = cube();
    let l = cube_map(A3_CUBE);
    let edge = c.face_from_names(&["F0", "Ft"]).unwrap();
    let bu = blowup(&c, &edge).unwrap();
    // λ(F0) + λ(Ft) is a valid choice on the new facet
    let v = l.vector(0).add(l.vector(5));
    let ext = extend_char(&bu, &l, v).unwrap();
    validate_rchar(&bu.polytope, &ext).unwrap();
    // λ(F0) itself repeats a vector at a vertex of the new facet
    assert!(extend_char(&bu, &l, l.vector(0).clone()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn order_law_on_random_maps(seed in any::<u64>(), idx in 0usize..16, k in 1usize..4, a in -6i64..7) {
        prop_assume!(a != 1);
        let all = corpus();
        let (_, p) = &all[idx % all.len()];
        prop_assume!(p.dim() <= 3);
        let mut r = rng(seed);
        let l = random_char(p, &mut r, 3);
        order_law_holds(p, &l, (seed % p.num_facets() as u64) as usize, k, a);
    }

    #[test]
    fn wedge_of_wedge_counts(idx in 0usize..16, f in 0usize..8, k1 in 1usize..3, k2 in 1usize..3) {
        let all = corpus();
        let (_, p) = &all[idx % all.len()];
        prop_assume!(p.dim() <= 3);
        let w1 = k_wedge(p, f % p.num_facets(), k1).unwrap().polytope;
        let g = f % w1.num_facets();
        let alpha = w1.facet_vertices(g).len();
        let w2 = k_wedge(&w1, g, k2).unwrap().polytope;
        prop_assert_eq!(w2.num_vertices(), (k2 + 1) * (w1.num_vertices() - alpha) + alpha);
        prop_assert!(w2.face_counts().euler_ok());
    }
}
