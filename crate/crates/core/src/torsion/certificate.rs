//! Replays a certificate from its raw data alone. Nothing here calls the
//! search; every recorded number is recomputed and compared.

use num_rational::BigRational;
use thiserror::Error;

use super::{clean, gcd_u64, Conclusion, Kind, SequenceEvidence, Stage, TorsionCertificate};
use crate::char_map::{combination_holds, validate_rchar, CharMap};
use crate::constructions::{blowdown_at, restrict_char};
use crate::io::{IoError, PolytopeFile};
use crate::polytope::Polytope;
use crate::retraction::{
    from_order, induced_retraction_2wedge, induced_retraction_blowdown, singularity_trace, RetractionSequence,
};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("certificate data is malformed: {0}")]
    Malformed(String),
    #[error("{what}: recorded {recorded}, recomputed {recomputed}")]
    Mismatch { what: &'static str, recorded: String, recomputed: String },
    #[error("conclusion is not supported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

fn malformed(e: impl std::fmt::Display) -> ReplayError {
    ReplayError::Malformed(e.to_string())
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &'static str, recorded: &T, recomputed: &T) -> Result<(), ReplayError> {
    if recorded == recomputed {
        Ok(())
    } else {
        Err(ReplayError::Mismatch { what, recorded: format!("{recorded:?}"), recomputed: format!("{recomputed:?}") })
    }
}

struct Replayed {
    polytope: Polytope,
    lambda: CharMap,
    sequence: RetractionSequence,
}

// Rebuilds the pair and recomputes the trace of the recorded order.
fn replay_sequence(ev: &SequenceEvidence) -> Result<Replayed, ReplayError> {
    let (polytope, lambda) = ev.polytope.clone().into_parts()?;
    let lambda = lambda.ok_or_else(|| malformed("polytope without a characteristic map"))?;
    validate_rchar(&polytope, &lambda).map_err(malformed)?;
    let sequence = from_order(&polytope, &ev.order).map_err(malformed)?;
    let trace = singularity_trace(&polytope, &lambda, &sequence).map_err(malformed)?;
    expect_eq("trace", &ev.trace, &trace)?;
    Ok(Replayed { polytope, lambda, sequence })
}

fn parse_rational(s: &str) -> Result<BigRational, ReplayError> {
    s.parse().map_err(|_| malformed(format!("bad rational {s:?}")))
}

/// Checks every recorded number against a fresh computation and checks that
/// the conclusion follows from them.
pub fn replay(cert: &TorsionCertificate) -> Result<(), ReplayError> {
    let p = cert.prime;
    if !super::is_prime(p) {
        return Err(malformed(format!("{p} is not a prime")));
    }
    let target = cert.sequence.as_ref().map(replay_sequence).transpose()?;
    let source = cert.source.as_ref().map(replay_sequence).transpose()?;
    if let Some(t) = &target {
        let stored = cert.sequence.as_ref().expect("replayed").trace.clone();
        if cert.conclusion == Conclusion::NoPTorsion && !clean(&stored, p) {
            return Err(ReplayError::Unsupported("trace entry shares a factor with p".into()));
        }
        debug_assert_eq!(t.sequence.len(), stored.len());
    }
    match cert.kind {
        Kind::Plain => {
            if cert.conclusion == Conclusion::NoPTorsion && target.is_none() {
                return Err(ReplayError::Unsupported("no sequence recorded".into()));
            }
            if cert.failed_at == Some(Stage::A1) && target.is_some() {
                return Err(ReplayError::Unsupported("A1 recorded as failing but a sequence is given".into()));
            }
        }
        Kind::Blowdown => replay_blowdown(cert, target.as_ref(), source.as_ref())?,
        Kind::TwoWedge => replay_wedge(cert, target.as_ref(), source.as_ref())?,
    }
    match (cert.conclusion, cert.failed_at) {
        (Conclusion::NoPTorsion, Some(_)) => Err(ReplayError::Unsupported("certified with a failed stage".into())),
        (Conclusion::Inconclusive, None) => Err(ReplayError::Unsupported("inconclusive without a failed stage".into())),
        _ => Ok(()),
    }
}

fn replay_blowdown(
    cert: &TorsionCertificate,
    target: Option<&Replayed>,
    source: Option<&Replayed>,
) -> Result<(), ReplayError> {
    let p = cert.prime;
    let certified = cert.conclusion == Conclusion::NoPTorsion;
    let a2 = cert.a2.as_ref();
    if let (Some(a2), Some(src)) = (a2, source) {
        let lambda = &src.lambda;
        let q = &src.polytope;
        let t = q.facet_index(&a2.target).map_err(malformed)?;
        let combo = a2.combo.iter().map(|n| q.facet_index(n)).collect::<Result<Vec<_>, _>>().map_err(malformed)?;
        if a2.solvable {
            let coeffs = a2.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            if coeffs.len() != combo.len() || !combination_holds(lambda, t, &combo, &coeffs) {
                return Err(ReplayError::Unsupported("combination does not hold".into()));
            }
            let gcds: Vec<u64> = coeffs
                .iter()
                .map(|c| gcd_u64(crate::lattice::to_u64(&(c.denom() % p)).expect("small"), p))
                .collect();
            expect_eq("denominator gcds", &a2.denominator_gcds, &gcds)?;
            expect_eq("A2 verdict", &a2.pass, &gcds.iter().all(|&g| g == 1))?;
        }
    }
    if let (Some(tgt), Some(src), Some(bdata)) = (target, source, &cert.blowdown) {
        replay_induced(cert, tgt, src, bdata)?;
    }
    match cert.failed_at {
        Some(Stage::A2) if a2.is_none_or(|a| a.pass) => Err(ReplayError::Unsupported("A2 recorded as failing but passes".into())),
        Some(Stage::A3) if cert.a3.as_ref().is_none_or(|a| a.d_values.iter().all(|d| d.gcd == Some(1))) => {
            Err(ReplayError::Unsupported("A3 recorded as failing but passes".into()))
        }
        Some(Stage::InducedTrace) if cert.sequence.as_ref().is_none_or(|s| clean(&s.trace, p)) => {
            Err(ReplayError::Unsupported("induced trace recorded as failing but is clean".into()))
        }
        _ if !certified => Ok(()),
        _ => {
            let (Some(_), Some(_), Some(a2), Some(a3)) = (target, source, a2, &cert.a3) else {
                return Err(ReplayError::Unsupported("blowdown evidence is incomplete".into()));
            };
            if !a2.pass || !a2.solvable {
                return Err(ReplayError::Unsupported("A2 does not pass".into()));
            }
            if !clean(&cert.source.as_ref().expect("present").trace, p) {
                return Err(ReplayError::Unsupported("source trace is not clean".into()));
            }
            if let Some(d) = a3.d_values.iter().find(|d| d.gcd != Some(1)) {
                return Err(ReplayError::Unsupported(format!("A3 fails at induced step {}", d.step)));
            }
            Ok(())
        }
    }
}

// Rebuilds the blowdown side from the source sequence and checks the
// recorded d values against it.
fn replay_induced(
    cert: &TorsionCertificate,
    tgt: &Replayed,
    src: &Replayed,
    bdata: &super::BlowdownData,
) -> Result<(), ReplayError> {
    let q = &src.polytope;
    let big = q.facet_index(&bdata.big_facet).map_err(malformed)?;
    let base = q.face_from_names(&bdata.base_face).map_err(malformed)?;
    let bd = blowdown_at(q, big, &base).map_err(malformed)?;
    if !bd.polytope.same_incidence(&tgt.polytope) {
        return Err(ReplayError::Unsupported("recorded blowdown differs from the recomputed one".into()));
    }
    let restricted = restrict_char(q, &src.lambda, &bd).map_err(malformed)?;
    expect_eq(
        "transported map",
        &PolytopeFile::new(&tgt.polytope, Some(&tgt.lambda)),
        &PolytopeFile::new(&bd.polytope, Some(&restricted.char_map)),
    )?;
    let report = induced_retraction_blowdown(q, &src.sequence, &bd, Some(&src.lambda)).map_err(malformed)?;
    expect_eq("induced order", &tgt.sequence.order(), &report.sequence.order())?;
    let Some(a3) = &cert.a3 else {
        return Err(malformed("induced sequence without A3 evidence"));
    };
    let recorded: Vec<(usize, Option<u64>)> = a3.d_values.iter().map(|d| (d.step, d.d)).collect();
    let recomputed: Vec<(usize, Option<u64>)> = report.d_values.iter().map(|(&s, &d)| (s, d)).collect();
    expect_eq("d values", &recorded, &recomputed)?;
    for d in &a3.d_values {
        expect_eq("d gcd", &d.gcd, &d.d.map(|d| gcd_u64(d, cert.prime)))?;
    }
    expect_eq("A3 verdict", &a3.pass, &a3.d_values.iter().all(|d| d.gcd == Some(1)))?;
    Ok(())
}

fn replay_wedge(
    cert: &TorsionCertificate,
    target: Option<&Replayed>,
    source: Option<&Replayed>,
) -> Result<(), ReplayError> {
    let p = cert.prime;
    let Some(w) = &cert.wedge else {
        return Err(malformed("missing wedge data"));
    };
    let g = gcd_u64((1 - w.a).unsigned_abs() % p, p);
    expect_eq("parameter gcd", &w.gcd, &g)?;
    if cert.failed_at == Some(Stage::Parameter) && g == 1 {
        return Err(ReplayError::Unsupported("parameter stage recorded as failing but passes".into()));
    }
    if let (Some(tgt), Some(src)) = (target, source) {
        let f = src.polytope.facet_index(&w.facet).map_err(malformed)?;
        let wr = induced_retraction_2wedge(&src.polytope, &src.sequence, f, &src.lambda, w.a).map_err(malformed)?;
        expect_eq(
            "wedge pair",
            &PolytopeFile::new(&tgt.polytope, Some(&tgt.lambda)),
            &PolytopeFile::new(&wr.wedge.polytope, Some(&wr.char_map)),
        )?;
        expect_eq("wedge order", &tgt.sequence.order(), &wr.sequence.order())?;
    }
    if cert.failed_at == Some(Stage::InducedTrace) && cert.sequence.as_ref().is_none_or(|s| clean(&s.trace, p)) {
        return Err(ReplayError::Unsupported("induced trace recorded as failing but is clean".into()));
    }
    if cert.conclusion != Conclusion::NoPTorsion {
        return Ok(());
    }
    if g != 1 {
        return Err(ReplayError::Unsupported("gcd(|1-a|, p) is not 1".into()));
    }
    if target.is_none() || source.is_none() {
        return Err(ReplayError::Unsupported("wedge evidence is incomplete".into()));
    }
    if !clean(&cert.source.as_ref().expect("present").trace, p) {
        return Err(ReplayError::Unsupported("source trace is not clean".into()));
    }
    Ok(())
}
