mod common;

use common::*;
use num_bigint::BigInt;
use polywedge::char_map::*;
use polywedge::retraction::{face_induced_retraction, find_retraction, singularity_trace};
use polywedge::{Polytope, SearchOptions};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn vertex_orders_are_absolute_determinants() {
    let mut r = rng(11);
    for (name, p) in corpus() {
        let l = random_char(&p, &mut r, 4);
        let raw = small(&l);
        for v in 0..p.num_vertices() {
            let rows: Vec<Vec<i128>> = p.vertex_facets(v).iter().map(|&j| raw[j].clone()).collect();
            let want = det(&rows).unsigned_abs() as u64;
            assert_eq!(singularity_order(&p, &l, v).unwrap(), want, "{name} v{v}");
            assert_eq!(singularity_group(&p, &l, v).unwrap().order, want, "{name} v{v}");
        }
    }
}

#[test]
fn face_orders_match_the_minor_oracle() {
    let mut r = rng(12);
    for (name, p) in corpus().into_iter().filter(|(_, p)| p.dim() <= 4) {
        for _ in 0..3 {
            let l = random_char(&p, &mut r, 5);
            let raw = small(&l);
            for face in p.faces() {
                let induced = match induce_on_face(&p, &l, &face, None) {
                    Ok(m) => m,
                    // a facet of the face can project to zero only if λ is degenerate
                    Err(e) => panic!("{name}: {e}"),
                };
                for &v in face.vertices() {
                    let ours = induced.order_at(&p, v).unwrap();
                    let group = induced.group_at(&p, v).unwrap();
                    let want = oracle_order(&p, &raw, face.support(), v);
                    assert_eq!(ours as i128, want, "{name} face {:?} v{v}", face.support());
                    assert_eq!(group.order, ours);
                    assert_eq!(group.invariant_factors.iter().product::<u64>(), ours);
                }
            }
        }
    }
}

#[test]
fn vertex_faces_have_trivial_groups() {
    let c = cube();
    let l = cube_map(TARGET_235);
    for v in 0..8 {
        assert_eq!(singularity_order_in_face(&c, &l, &c.vertex_face(v), v, None).unwrap(), 1);
    }
}

#[test]
fn complement_choice_does_not_change_orders() {
    let all = corpus();
    let mut r = rng(13);
    let mut samples = 0;
    while samples < 100 {
        let (name, p) = &all[r.random_range(0..all.len())];
        let l = random_char(p, &mut r, 4);
        let faces: Vec<_> = p.faces().into_iter().filter(|f| !f.support().is_empty() && f.dim() > 0).collect();
        if faces.is_empty() {
            continue;
        }
        let face = &faces[r.random_range(0..faces.len())];
        let verts: Vec<usize> = face.vertices().iter().copied().collect();
        let v = verts[r.random_range(0..verts.len())];
        let first = induce_on_face(p, &l, face, None).unwrap();
        let other = second_complement(first.sat_basis(), first.comp_basis(), &mut r);
        let a = singularity_order_in_face(p, &l, face, v, Some(first.comp_basis())).unwrap();
        let b = singularity_order_in_face(p, &l, face, v, Some(&other)).unwrap();
        assert_eq!(a, b, "{name} face {:?} v{v}", face.support());
        let ga = singularity_group_in_face(p, &l, face, v, Some(first.comp_basis())).unwrap();
        let gb = singularity_group_in_face(p, &l, face, v, Some(&other)).unwrap();
        assert_eq!(ga, gb);
        samples += 1;
    }
}

#[test]
fn bad_complements_are_rejected() {
    let c = cube();
    let l = cube_map(TARGET_235);
    let f1 = c.facet_face(1);
    let m = induce_on_face(&c, &l, &f1, None).unwrap();
    // doubling a complement vector leaves an index-2 sublattice
    let mut bad = m.comp_basis().to_vec();
    bad[0] = bad[0].scale(&BigInt::from(2));
    assert!(induce_on_face(&c, &l, &f1, Some(&bad)).is_err());
    assert!(induce_on_face(&c, &l, &f1, Some(&m.comp_basis()[..1])).is_err());
}

fn divisibility_holds(p: &Polytope, l: &CharMap, seed: u64) {
    let seq = find_retraction(p, &SearchOptions { seed: Some(seed), ..Default::default() }).unwrap();
    let source = singularity_trace(p, l, &seq).unwrap();
    let raw = small(l);
    for (s, &o) in seq.steps().iter().zip(&source) {
        assert_eq!(o as i128, oracle_order(p, &raw, s.max_face.support(), s.vertex));
    }
    for face in p.faces() {
        let fr = face_induced_retraction(p, &seq, &face).unwrap();
        let local = fr.trace(p, l, &face).unwrap();
        for (t, &i) in local.iter().zip(&fr.source_steps) {
            assert_eq!(source[i] % t, 0, "face {:?}: {t} does not divide {}", face.support(), source[i]);
        }
    }
}

#[test]
fn face_traces_divide_source_traces() {
    let mut r = rng(14);
    for (_, p) in corpus() {
        for seed in 0..3 {
            let l = random_char(&p, &mut r, 4);
            divisibility_holds(&p, &l, seed);
        }
    }
    divisibility_holds(&cube(), &cube_map(TARGET_235), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn divisibility_on_random_pairs(idx in 0usize..16, seed in any::<u64>()) {
        let all = corpus();
        let (_, p) = &all[idx % all.len()];
        let l = random_char(p, &mut rng(seed), 3);
        divisibility_holds(p, &l, seed);
    }

    #[test]
    fn induced_vectors_are_primitive(idx in 0usize..16, seed in any::<u64>()) {
        let all = corpus();
        let (_, p) = &all[idx % all.len()];
        let l = random_char(p, &mut rng(seed), 3);
        for face in p.faces() {
            let m = induce_on_face(p, &l, &face, None).unwrap();
            prop_assert_eq!(m.vectors().len(), p.face_polytope(&face).facet_ids.len());
            for v in m.vectors().values() {
                prop_assert_eq!(v.len(), face.dim());
                prop_assert_eq!(v.content(), BigInt::from(1));
            }
        }
    }
}
