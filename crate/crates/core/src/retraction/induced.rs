use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use serde::Serialize;

use super::search::{free_support, Removed};
use super::{from_order, singularity_trace, RetractionError, RetractionSequence};
use crate::char_map::{compute_d_f, validate_rchar, CharMap, CharMapError};
use crate::constructions::{k_wedge_char, restrict_char, BlowdownResult, WedgeParams, WedgeResult};
use crate::lattice::{solve_rational, IntVector};
use crate::polytope::Polytope;

/// How the face of an induced step relates to its source face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepCase {
    Unaffected,
    FaceOf,
    BlowdownOf,
}

#[derive(Clone, Debug)]
pub struct InducedRetractionReport {
    pub sequence: RetractionSequence,
    /// Source step each induced step was taken from (0-based).
    pub source_steps: Vec<usize>,
    pub cases: Vec<StepCase>,
    /// Induced steps whose image had to wait for freeness.
    pub postponed: Vec<usize>,
    /// `λ(F̃) = Σ c_s λ(P_s)` over the sorted `P` facets, when solvable.
    pub coeffs: Option<Vec<BigRational>>,
    /// Induced step to `d_t`, on blowdown-of steps only. `None` when the
    /// combination does not satisfy the projection hypotheses on that face.
    pub d_values: BTreeMap<usize, Option<u64>>,
    /// Transported λ on the blowdown, when it is a characteristic map there.
    pub restricted: Option<CharMap>,
    pub source_trace: Option<Vec<u64>>,
    pub trace: Option<Vec<u64>>,
}

impl InducedRetractionReport {
    /// Source orders at the steps that were kept.
    pub fn source_orders(&self) -> Option<Vec<u64>> {
        let src = self.source_trace.as_ref()?;
        Some(self.source_steps.iter().map(|&i| src[i]).collect())
    }
}

fn combination(lambda: &CharMap, bd: &BlowdownResult) -> Result<Option<Vec<BigRational>>, CharMapError> {
    let cols: Vec<IntVector> = bd.structure.p_facets.iter().map(|&j| lambda.vector(j).clone()).collect();
    Ok(solve_rational(&cols, lambda.vector(bd.structure.big_facet))?)
}

/// The retraction of the blowdown induced by `seq`: images in order of first
/// appearance, each step's face forced by freeness.
pub fn induced_retraction_blowdown(
    p: &Polytope,
    seq: &RetractionSequence,
    bd: &BlowdownResult,
    lambda: Option<&CharMap>,
) -> Result<InducedRetractionReport, RetractionError> {
    if bd.vertex_map.len() != p.num_vertices() || bd.facet_map.len() != p.num_facets() {
        return Err(RetractionError::ForeignBlowdown);
    }
    let q = &bd.polytope;
    // Images in order of first appearance; an image that is not yet free
    // waits until it is.
    let mut order = Vec::new();
    let mut source_steps = Vec::new();
    let mut postponed = Vec::new();
    let mut seen = vec![false; q.num_vertices()];
    let mut removed = Removed::new(q.num_vertices());
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for (i, s) in seq.steps().iter().enumerate() {
        let img = bd.vertex_map[s.vertex];
        if seen[img] {
            continue;
        }
        seen[img] = true;
        pending.push((img, i));
        while let Some(k) = pending.iter().position(|&(v, _)| free_support(q, &removed, v).is_some()) {
            let (v, src) = pending.remove(k);
            if src != i {
                postponed.push(order.len());
            }
            removed.flip(v);
            order.push(v);
            source_steps.push(src);
        }
    }
    if let Some(&(v, _)) = pending.first() {
        return Err(RetractionError::InducedInfeasible(Box::new(RetractionError::NotFree { step: order.len(), vertex: v })));
    }
    let sequence = from_order(q, &order).map_err(|e| RetractionError::InducedInfeasible(Box::new(e)))?;

    let mut cases = Vec::with_capacity(order.len());
    for (t, &i) in source_steps.iter().enumerate() {
        let src = &seq.steps()[i].max_face;
        let dst = &sequence.steps()[t].max_face;
        let images: std::collections::BTreeSet<usize> = src.vertices().iter().map(|&v| bd.vertex_map[v]).collect();
        cases.push(if dst.dim() < src.dim() {
            StepCase::FaceOf
        } else if images.len() < src.vertices().len() {
            StepCase::BlowdownOf
        } else {
            StepCase::Unaffected
        });
    }

    let mut report = InducedRetractionReport {
        sequence,
        source_steps,
        cases,
        postponed,
        coeffs: None,
        d_values: BTreeMap::new(),
        restricted: None,
        source_trace: None,
        trace: None,
    };
    let Some(lambda) = lambda else {
        return Ok(report);
    };
    validate_rchar(p, lambda)?;
    report.source_trace = Some(singularity_trace(p, lambda, seq)?);
    report.coeffs = combination(lambda, bd)?;
    for (t, case) in report.cases.iter().enumerate() {
        if *case != StepCase::BlowdownOf {
            continue;
        }
        let d = report.coeffs.as_ref().and_then(|c| {
            let face = &seq.steps()[report.source_steps[t]].max_face;
            compute_d_f(p, lambda, face, bd.structure.big_facet, &bd.structure.p_facets, c).ok()
        });
        report.d_values.insert(t, d);
    }
    if let Ok(r) = restrict_char(p, lambda, bd) {
        report.trace = Some(singularity_trace(q, &r.char_map, &report.sequence)?);
        report.restricted = Some(r.char_map);
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct WedgeRetraction {
    pub wedge: WedgeResult,
    pub char_map: CharMap,
    pub sequence: RetractionSequence,
    pub trace: Vec<u64>,
    /// Source step of each wedge step.
    pub source_steps: Vec<usize>,
    /// Source order times `|1-a|` on the `(v, 2)` steps.
    pub predicted: Vec<u64>,
}

/// The `3m - 2α` step retraction of `Q_F(2)` built from a retraction of `Q`
/// that takes the vertices of `f` last. Each other vertex `v` expands to
/// `(v,1)`, `(v,2)`, then the corner.
pub fn induced_retraction_2wedge(
    p: &Polytope,
    seq: &RetractionSequence,
    f: usize,
    lambda: &CharMap,
    a: i64,
) -> Result<WedgeRetraction, RetractionError> {
    if a == 1 {
        return Err(RetractionError::ParameterA);
    }
    let on_f = p.facet_vertices(f);
    let alpha = on_f.len();
    let order = seq.order();
    if order[order.len() - alpha..].iter().any(|v| !on_f.contains(v)) {
        return Err(RetractionError::NotDeferred);
    }
    let (wedge, char_map) = k_wedge_char(p, lambda, f, WedgeParams::new(2, a)?)?;
    let index: HashMap<(usize, usize), usize> =
        wedge.vertex_origin.iter().enumerate().map(|(i, &key)| (key, i)).collect();
    let source = singularity_trace(p, lambda, seq)?;
    let factor = (1 - a).unsigned_abs();
    let mut new_order = Vec::new();
    let mut source_steps = Vec::new();
    let mut predicted = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let slots: &[(usize, u64)] = if on_f.contains(&v) { &[(0, 1)] } else { &[(1, 1), (2, factor), (0, 1)] };
        for &(slot, mult) in slots {
            new_order.push(index[&(v, slot)]);
            source_steps.push(i);
            predicted.push(source[i] * mult);
        }
    }
    let sequence =
        from_order(&wedge.polytope, &new_order).map_err(|e| RetractionError::InducedInfeasible(Box::new(e)))?;
    let trace = singularity_trace(&wedge.polytope, &char_map, &sequence)?;
    Ok(WedgeRetraction { wedge, char_map, sequence, trace, source_steps, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retraction::{find_retraction, SearchOptions};

    #[test]
    fn interval_two_wedge_steps() {
        let i = Polytope::from_lists(1, 2, &[&[0], &[1]]).unwrap();
        let l = CharMap::from_i64s(1, &[&[1], &[-1]]).unwrap();
        let seq = crate::retraction::from_order(&i, &[0, 1]).unwrap();
        let w = induced_retraction_2wedge(&i, &seq, 1, &l, 0).unwrap();
        assert_eq!(w.sequence.len(), 4);
        assert_eq!(w.trace, w.predicted);
    }

    #[test]
    fn rejects_undeferred() {
        let sq = Polytope::from_lists(2, 4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]).unwrap();
        let l = CharMap::from_i64s(2, &[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]]).unwrap();
        let seq = find_retraction(&sq, &SearchOptions::default()).unwrap();
        // facet 1 holds vertices 0 and 1, which come first in index order
        assert!(matches!(
            induced_retraction_2wedge(&sq, &seq, 1, &l, 2),
            Err(RetractionError::NotDeferred)
        ));
        assert!(matches!(
            induced_retraction_2wedge(&sq, &seq, 1, &l, 1),
            Err(RetractionError::ParameterA)
        ));
    }
}
