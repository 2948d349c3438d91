//! Fixtures and independent oracles shared by the integration tests. The
//! oracles use plain `i128` arithmetic and set enumeration only; nothing
//! here calls the library's face, complex or lattice routines.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use polywedge::char_map::validate_rchar;
use polywedge::{CharMap, IntVector, Polytope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Set = BTreeSet<usize>;

// ---------------------------------------------------------------- fixtures

pub fn named(p: Polytope, names: &[&str]) -> Polytope {
    p.with_facet_names(names.iter().map(|s| s.to_string()).collect()).unwrap()
}

pub fn interval() -> Polytope {
    Polytope::from_lists(1, 2, &[&[0], &[1]]).unwrap()
}

/// Vertex `i` lies on edges `i` and `i+1`.
pub fn polygon(n: usize) -> Polytope {
    let verts: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let refs: Vec<&[usize]> = verts.iter().map(Vec::as_slice).collect();
    Polytope::from_lists(2, n, &refs).unwrap()
}

/// Vertex `v` is opposite facet `v`.
pub fn simplex(n: usize) -> Polytope {
    let verts: Vec<Vec<usize>> = (0..=n).map(|v| (0..=n).filter(|&j| j != v).collect()).collect();
    let refs: Vec<&[usize]> = verts.iter().map(Vec::as_slice).collect();
    Polytope::from_lists(n, n + 1, &refs).unwrap()
}

pub const CUBE_FACETS: [&str; 6] = ["F0", "F1", "F2", "F3", "F4", "Ft"];

/// F0 top, F1 bottom, F2 right, F3 back, F4 left, Ft front.
pub fn cube() -> Polytope {
    let p = Polytope::from_lists(
        3,
        6,
        &[&[0, 2, 5], &[0, 4, 5], &[1, 2, 5], &[1, 4, 5], &[0, 2, 3], &[0, 3, 4], &[1, 2, 3], &[1, 3, 4]],
    )
    .unwrap();
    named(p, &CUBE_FACETS)
}

pub fn cube_map(rows: [[i64; 3]; 6]) -> CharMap {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    CharMap::from_i64s(3, &refs).unwrap()
}

pub const TARGET_235: [[i64; 3]; 6] = [[2, 1, 4], [6, 3, 5], [3, 1, 7], [1, 2, 6], [4, 1, 3], [2, 3, 5]];
pub const TARGET_133: [[i64; 3]; 6] = [[0, 2, 1], [1, 1, 2], [0, 1, 1], [1, 0, 1], [1, 0, 0], [1, 3, 3]];
/// Valid map with λ(Ft) = λ(F0) + λ(F1) and one blowdown step of `d = 3`.
pub const A3_CUBE: [[i64; 3]; 6] = [[0, 0, 1], [-2, 1, -1], [1, 0, 0], [0, 1, 0], [-1, -1, 0], [-2, 1, 0]];
/// Valid on the cube; the transported map on the blowdown is not.
pub const DEGENERATE_RESTRICTION: [[i64; 3]; 6] =
    [[1, 0, 0], [1, 0, 0], [2, 3, 5], [1, 3, 2], [4, 1, 0], [1, 0, 1]];

/// Bottom, right, top, left with vectors (1,0), (2,1), (-3,7), (5,4).
pub fn square() -> (Polytope, CharMap) {
    let p = named(polygon(4), &["F1", "F2", "F3", "F4"]);
    let l = CharMap::from_i64s(2, &[&[1, 0], &[2, 1], &[-3, 7], &[5, 4]]).unwrap();
    (p, l)
}

/// Triangles T1 (front), T2 (back); quads Qa, Qb (bottom), Qc. Vertices
/// b1..b6 in the order of the six-step retraction used below.
pub fn prism() -> Polytope {
    let p = Polytope::from_lists(3, 5, &[&[0, 2, 4], &[1, 2, 4], &[1, 2, 3], &[1, 3, 4], &[0, 3, 4], &[0, 2, 3]])
        .unwrap();
    named(p, &["T1", "T2", "Qa", "Qb", "Qc"])
}

pub const PRISM_MAP: [[i64; 3]; 5] = [[1, 0, 0], [1, 2, 1], [1, 1, 0], [3, 2, 1], [0, 2, 1]];

/// Named corpus of at least ten simple polytopes.
pub fn corpus() -> Vec<(String, Polytope)> {
    use polywedge::constructions::{blowup, k_wedge};
    let mut out = vec![
        ("interval".to_string(), interval()),
        ("triangle".into(), polygon(3)),
        ("square".into(), polygon(4)),
        ("pentagon".into(), polygon(5)),
        ("hexagon".into(), polygon(6)),
        ("tetrahedron".into(), simplex(3)),
        ("simplex4".into(), simplex(4)),
        ("cube".into(), cube()),
        ("triangular prism".into(), polygon(3).product_with_simplex(1)),
        ("pentagonal prism".into(), polygon(5).product_with_simplex(1)),
        ("hexagonal prism".into(), polygon(6).product_with_simplex(1)),
        ("square x triangle".into(), polygon(4).product_with_simplex(2)),
    ];
    out.push(("square 2-wedge".into(), k_wedge(&polygon(4), 0, 2).unwrap().polytope));
    out.push(("pentagon 1-wedge".into(), k_wedge(&polygon(5), 0, 1).unwrap().polytope));
    let c = cube();
    out.push(("cube cut at vertex".into(), blowup(&c, &c.vertex_face(0)).unwrap().polytope));
    let edge = c.face_from_names(&["F0", "F2"]).unwrap();
    out.push(("cube cut at edge".into(), blowup(&c, &edge).unwrap().polytope));
    out
}

/// Rejection-samples a characteristic map with small entries.
pub fn random_char(p: &Polytope, rng: &mut ChaCha8Rng, bound: i64) -> CharMap {
    let n = p.dim();
    loop {
        let vectors: Vec<IntVector> = (0..p.num_facets())
            .map(|_| loop {
                let xs: Vec<i64> = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
                let v = IntVector::from_i64s(&xs);
                if !v.is_zero() && v.content() == 1.into() {
                    break v;
                }
            })
            .collect();
        let l = CharMap::new(n, vectors).unwrap();
        if validate_rchar(p, &l).is_ok() {
            return l;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small(l: &CharMap) -> Vec<Vec<i128>> {
    l.vectors().iter().map(|v| v.to_i64s().unwrap().into_iter().map(i128::from).collect()).collect()
}

// ------------------------------------------------------------ face oracle

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleFace {
    pub support: Set,
    pub vertices: Set,
}

/// Every nonempty face, from all facet subsets of size at most `n`.
pub fn oracle_faces(p: &Polytope) -> Vec<OracleFace> {
    let n = p.dim();
    let sets: Vec<Set> = (0..p.num_vertices()).map(|v| p.vertex_facets(v).iter().copied().collect()).collect();
    let mut out = BTreeSet::new();
    for size in 0..=n {
        for s in (0..p.num_facets()).combinations(size) {
            let verts: Set = (0..sets.len()).filter(|&v| s.iter().all(|j| sets[v].contains(j))).collect();
            if verts.is_empty() {
                continue;
            }
            let support: Set =
                verts.iter().map(|&v| sets[v].clone()).reduce(|a, b| a.intersection(&b).copied().collect()).unwrap();
            out.insert(OracleFace { support, vertices: verts });
        }
    }
    out.into_iter().collect()
}

/// Replays a vertex order from scratch: at each step the complex is every
/// face avoiding the removed vertices; the vertex must lie in exactly one
/// maximal face. Returns each step's face.
pub fn oracle_replay(p: &Polytope, order: &[usize]) -> Result<Vec<OracleFace>, String> {
    oracle_replay_faces(&oracle_faces(p), p.num_vertices(), order)
}

/// [`oracle_replay`] with the face list computed once by the caller.
pub fn oracle_replay_faces(faces: &[OracleFace], m: usize, order: &[usize]) -> Result<Vec<OracleFace>, String> {
    if order.iter().copied().collect::<Set>().len() != order.len() || order.len() != m {
        return Err("not a permutation of the vertices".into());
    }
    let mut removed = Set::new();
    let mut out = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let alive: Vec<&OracleFace> = faces.iter().filter(|f| f.vertices.is_disjoint(&removed)).collect();
        let maximal: Vec<&OracleFace> = alive
            .iter()
            .copied()
            .filter(|f| !alive.iter().any(|g| g.vertices.len() > f.vertices.len() && f.vertices.is_subset(&g.vertices)))
            .collect();
        let at: Vec<&OracleFace> = maximal.into_iter().filter(|f| f.vertices.contains(&v)).collect();
        if at.len() != 1 {
            return Err(format!("step {i}: vertex {v} lies in {} maximal faces", at.len()));
        }
        out.push(at[0].clone());
        removed.insert(v);
    }
    Ok(out)
}

/// Every retraction sequence, by brute force over the oracle.
pub fn oracle_all_sequences(p: &Polytope) -> Vec<Vec<usize>> {
    fn free(faces: &[OracleFace], removed: &Set, v: usize) -> bool {
        let alive: Vec<&OracleFace> = faces.iter().filter(|f| f.vertices.is_disjoint(removed)).collect();
        alive
            .iter()
            .filter(|f| f.vertices.contains(&v))
            .filter(|f| !alive.iter().any(|g| g.vertices.len() > f.vertices.len() && f.vertices.is_subset(&g.vertices)))
            .count()
            == 1
    }
    fn go(m: usize, faces: &[OracleFace], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        let removed: Set = prefix.iter().copied().collect();
        for v in (0..m).filter(|v| !removed.contains(v)) {
            if free(faces, &removed, v) {
                prefix.push(v);
                go(m, faces, prefix, out);
                prefix.pop();
            }
        }
    }
    let faces = oracle_faces(p);
    let mut out = Vec::new();
    go(p.num_vertices(), &faces, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------- order oracle

/// Laplace expansion; fine for the sizes used here.
pub fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i128>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// gcd of the maximal minors of the rows; the index of their span in its
/// saturation. Empty input gives 1.
pub fn minor_gcd(rows: &[Vec<i128>]) -> i128 {
    if rows.is_empty() {
        return 1;
    }
    let n = rows[0].len();
    (0..n)
        .combinations(rows.len())
        .map(|cols| det(&rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect::<Vec<_>>()))
        .fold(0, gcd)
}

/// `|G_E(v)|` for the face with support `support`, from determinants only:
/// the full determinant at `v`, divided by the saturation index of the
/// support vectors and by the content of every projected vector.
pub fn oracle_order(p: &Polytope, lambda: &[Vec<i128>], support: &Set, v: usize) -> i128 {
    let at: Vec<usize> = p.vertex_facets(v).iter().copied().collect();
    let full = det(&at.iter().map(|&j| lambda[j].clone()).collect::<Vec<_>>()).abs();
    let s_rows: Vec<Vec<i128>> = support.iter().map(|&j| lambda[j].clone()).collect();
    let base = minor_gcd(&s_rows);
    let mut denom = base;
    for &j in at.iter().filter(|j| !support.contains(j)) {
        let mut rows = s_rows.clone();
        rows.push(lambda[j].clone());
        denom *= minor_gcd(&rows) / base;
    }
    full / denom
}

/// A second complement: random unimodular row operations and sign flips on
/// `comp`, plus integer multiples of the saturation basis.
pub fn second_complement(sat: &[IntVector], comp: &[IntVector], r: &mut ChaCha8Rng) -> Vec<IntVector> {
    loop {
        let mut out = comp.to_vec();
        let k = out.len();
        for _ in 0..6 {
            if k >= 2 {
                let i = r.random_range(0..k);
                let j = (i + r.random_range(1..k)) % k;
                let c = BigInt::from(r.random_range(-3..=3));
                out[i] = out[i].add(&out[j].scale(&c));
            }
            let i = r.random_range(0..k);
            if r.random_bool(0.3) {
                out[i] = out[i].scale(&BigInt::from(-1));
            }
        }
        for v in out.iter_mut() {
            for s in sat {
                *v = v.add(&s.scale(&BigInt::from(r.random_range(-4..=4))));
            }
        }
        if out != comp {
            return out;
        }
    }
}
