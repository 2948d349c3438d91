//! Isomorphism of finite set systems via their bipartite incidence graphs.

use std::collections::BTreeSet;

use petgraph::algo::isomorphism::{is_isomorphic_matching, subgraph_isomorphisms_iter};
use petgraph::graph::{NodeIndex, UnGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Point,
    Block,
}

fn incidence_graph(points: usize, blocks: &[BTreeSet<usize>]) -> UnGraph<Side, ()> {
    let mut g = UnGraph::with_capacity(points + blocks.len(), blocks.iter().map(BTreeSet::len).sum());
    for _ in 0..points {
        g.add_node(Side::Point);
    }
    for (b, block) in blocks.iter().enumerate() {
        let node = g.add_node(Side::Block);
        debug_assert_eq!(node.index(), points + b);
        for &p in block {
            g.add_edge(NodeIndex::new(p), node, ());
        }
    }
    g
}

/// True when some bijection of points carries the blocks of `a` onto the
/// blocks of `b`.
pub fn isomorphic(points_a: usize, a: &[BTreeSet<usize>], points_b: usize, b: &[BTreeSet<usize>]) -> bool {
    if points_a != points_b || a.len() != b.len() {
        return false;
    }
    let ga = incidence_graph(points_a, a);
    let gb = incidence_graph(points_b, b);
    is_isomorphic_matching(&ga, &gb, |x, y| x == y, |_, _| true)
}

/// A point bijection `a -> b` realizing an isomorphism, if one exists.
pub fn point_isomorphism(
    points_a: usize,
    a: &[BTreeSet<usize>],
    points_b: usize,
    b: &[BTreeSet<usize>],
) -> Option<Vec<usize>> {
    if points_a != points_b || a.len() != b.len() {
        return None;
    }
    let ga = incidence_graph(points_a, a);
    let gb = incidence_graph(points_b, b);
    if ga.edge_count() != gb.edge_count() {
        return None;
    }
    let mut nm = |x: &Side, y: &Side| x == y;
    let mut em = |_: &(), _: &()| true;
    // Equal node and edge counts make an induced-subgraph match a full one.
    let mapping = subgraph_isomorphisms_iter(&&ga, &&gb, &mut nm, &mut em)?.next()?;
    Some(mapping[..points_a].to_vec())
}
