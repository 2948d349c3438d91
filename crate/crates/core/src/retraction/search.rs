use std::cell::RefCell;
use std::collections::HashSet;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{from_order, OrderCache, RetractionSequence};
use crate::char_map::{CharMap, CharMapError};
use crate::polytope::{Face, FacetSet, Polytope, VertexSet};

/// Search knobs. Deferred vertices are taken only when no other vertex is
/// free; with `strict_defer` only after every other vertex is gone.
#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub prefix: Vec<usize>,
    pub defer: VertexSet,
    pub strict_defer: bool,
    /// Shuffles candidate order; `None` keeps vertex-index order.
    pub seed: Option<u64>,
}

impl SearchOptions {
    pub fn start(v: usize) -> Self {
        SearchOptions { prefix: vec![v], ..Default::default() }
    }

    pub fn deferring(defer: VertexSet) -> Self {
        SearchOptions { defer, ..Default::default() }
    }
}

/// What a step predicate sees.
pub struct StepView<'a> {
    pub step: usize,
    pub vertex: usize,
    pub face: &'a Face,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct Removed(Vec<u64>);

impl Removed {
    pub(crate) fn new(m: usize) -> Self {
        Removed(vec![0; m.div_ceil(64)])
    }

    pub(crate) fn has(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    pub(crate) fn flip(&mut self, v: usize) {
        self.0[v / 64] ^= 1 << (v % 64);
    }
}

// v is free in the complex of faces avoiding `removed` iff the facets forced
// by singleton differences already separate v from every removed vertex.
pub(crate) fn free_support(p: &Polytope, removed: &Removed, v: usize) -> Option<FacetSet> {
    let sv = p.vertex_facets(v);
    let diffs: Vec<Vec<usize>> = (0..p.num_vertices())
        .filter(|&u| removed.has(u))
        .map(|u| {
            let su = p.vertex_facets(u);
            sv.iter().copied().filter(|j| !su.contains(j)).collect()
        })
        .collect();
    let forced: FacetSet = diffs.iter().filter(|d| d.len() == 1).map(|d| d[0]).collect();
    diffs.iter().all(|d| d.iter().any(|j| forced.contains(j))).then_some(forced)
}

struct Search<'a, F> {
    p: &'a Polytope,
    opts: &'a SearchOptions,
    pred: F,
    rng: Option<ChaCha8Rng>,
    dead: HashSet<Removed>,
    removed: Removed,
    order: Vec<usize>,
    found: Vec<Vec<usize>>,
    cap: usize,
}

impl<F: FnMut(&StepView) -> bool> Search<'_, F> {
    fn candidates(&mut self) -> Vec<(usize, Face)> {
        let m = self.p.num_vertices();
        let depth = self.order.len();
        if let Some(&v) = self.opts.prefix.get(depth) {
            if v >= m || self.removed.has(v) {
                return Vec::new();
            }
            return self.face_if_free(v).map(|f| vec![(v, f)]).unwrap_or_default();
        }
        let live: Vec<usize> = (0..m).filter(|&v| !self.removed.has(v)).collect();
        let free: Vec<(usize, Face)> =
            live.iter().filter_map(|&v| self.face_if_free(v).map(|f| (v, f))).collect();
        let (plain, deferred): (Vec<_>, Vec<_>) = free.into_iter().partition(|(v, _)| !self.opts.defer.contains(v));
        let mut out = if !plain.is_empty() {
            plain
        } else if self.opts.strict_defer && live.iter().any(|v| !self.opts.defer.contains(v)) {
            Vec::new()
        } else {
            deferred
        };
        if let Some(rng) = self.rng.as_mut() {
            out.shuffle(rng);
        }
        out
    }

    fn face_if_free(&self, v: usize) -> Option<Face> {
        let support = free_support(self.p, &self.removed, v)?;
        self.p.face_from_facets(&support).ok().flatten()
    }

    // Returns the number of completions found below this state.
    fn dfs(&mut self) -> usize {
        if self.order.len() == self.p.num_vertices() {
            self.found.push(self.order.clone());
            return 1;
        }
        let memo = self.order.len() >= self.opts.prefix.len();
        if memo && self.dead.contains(&self.removed) {
            return 0;
        }
        let mut total = 0;
        for (v, face) in self.candidates() {
            let view = StepView { step: self.order.len(), vertex: v, face: &face };
            if !(self.pred)(&view) {
                continue;
            }
            self.removed.flip(v);
            self.order.push(v);
            total += self.dfs();
            self.order.pop();
            self.removed.flip(v);
            if self.found.len() >= self.cap {
                break;
            }
        }
        if memo && total == 0 {
            self.dead.insert(self.removed.clone());
        }
        total
    }
}

fn run<F: FnMut(&StepView) -> bool>(p: &Polytope, opts: &SearchOptions, cap: usize, pred: F) -> Vec<RetractionSequence> {
    let mut s = Search {
        p,
        opts,
        pred,
        rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
        dead: HashSet::new(),
        removed: Removed::new(p.num_vertices()),
        order: Vec::new(),
        found: Vec::new(),
        cap,
    };
    s.dfs();
    s.found.iter().map(|o| from_order(p, o).expect("search emits valid orders")).collect()
}

pub fn find_retraction(p: &Polytope, opts: &SearchOptions) -> Option<RetractionSequence> {
    find_retraction_with(p, opts, |_| true)
}

/// First sequence (under the candidate order) whose every step passes `pred`.
pub fn find_retraction_with<F: FnMut(&StepView) -> bool>(
    p: &Polytope,
    opts: &SearchOptions,
    pred: F,
) -> Option<RetractionSequence> {
    run(p, opts, 1, pred).pop()
}

/// Up to `cap` sequences passing `pred`, in search order.
pub fn enumerate_retractions<F: FnMut(&StepView) -> bool>(
    p: &Polytope,
    opts: &SearchOptions,
    cap: usize,
    pred: F,
) -> Vec<RetractionSequence> {
    run(p, opts, cap, pred)
}

/// Sequences whose every step order is prime to `prime`. Exhaustive, so an
/// empty result means none exist under `opts`.
pub fn find_p_clean_retraction(
    p: &Polytope,
    lambda: &CharMap,
    prime: u64,
    opts: &SearchOptions,
    cap: usize,
) -> Result<Vec<RetractionSequence>, CharMapError> {
    let cache = RefCell::new(OrderCache::new(p, lambda));
    let err = RefCell::new(None);
    let out = run(p, opts, cap, |view| match cache.borrow_mut().order(view.face, view.vertex) {
        Ok(o) => o.gcd(&prime) == 1,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            false
        }
    });
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
