//! Hypothesis checks and certificates for the p-torsion criteria: plain
//! p-clean retractions, blowdowns (A1, A2, A3) and 2-wedges.

mod certificate;
mod scan;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::char_map::{validate_rchar, CharMap, CharMapError};
use crate::constructions::{blowdown, detect_product_structure, restrict_char, ConstructionError, ProductStructure};
use crate::io::PolytopeFile;
use crate::lattice::{solve_rational, to_u64, IntVector, LatticeError};
use crate::polytope::{Face, Polytope};
use crate::retraction::{
    find_p_clean_retraction, induced_retraction_2wedge, induced_retraction_blowdown, singularity_trace,
    RetractionError, RetractionSequence, SearchOptions,
};

pub use certificate::{replay, ReplayError};
pub use scan::{all_prime_scan, plain_prime_scan, prime_factors, PrimeScan};

#[derive(Debug, Error)]
pub enum TorsionError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error(transparent)]
    CharMap(#[from] CharMapError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Retraction(#[from] RetractionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    NoPTorsion,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Plain,
    Blowdown,
    TwoWedge,
}

/// First hypothesis that could not be established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    A1,
    A2,
    Restriction,
    A3,
    InducedTrace,
    Parameter,
}

/// `λ(target) = Σ c_s λ(P_s)` with zero terms dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalCombination {
    pub target: usize,
    pub combo: Vec<usize>,
    pub coeffs: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct A2Evidence {
    pub target: String,
    pub combo: Vec<String>,
    /// Reduced fractions such as `"3/2"`; empty when unsolvable.
    pub coeffs: Vec<String>,
    pub denominator_gcds: Vec<u64>,
    pub solvable: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DValue {
    /// Induced step, 0-based.
    pub step: usize,
    pub d: Option<u64>,
    pub gcd: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct A3Evidence {
    pub d_values: Vec<DValue>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEvidence {
    pub polytope: PolytopeFile,
    pub order: Vec<usize>,
    pub trace: Vec<u64>,
}

impl SequenceEvidence {
    fn new(p: &Polytope, lambda: &CharMap, seq: &RetractionSequence, trace: Vec<u64>) -> Self {
        SequenceEvidence { polytope: PolytopeFile::new(p, Some(lambda)), order: seq.order(), trace }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowdownData {
    pub big_facet: String,
    pub base_face: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeData {
    pub facet: String,
    pub a: i64,
    pub gcd: u64,
}

/// Evidence for one prime. `sequence` lives on the polytope the conclusion
/// is about; `source` is the A1 sequence it was induced from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionCertificate {
    pub prime: u64,
    pub kind: Kind,
    pub conclusion: Conclusion,
    pub failed_at: Option<Stage>,
    pub sequence: Option<SequenceEvidence>,
    pub source: Option<SequenceEvidence>,
    pub blowdown: Option<BlowdownData>,
    pub a2: Option<A2Evidence>,
    pub a3: Option<A3Evidence>,
    pub wedge: Option<WedgeData>,
    /// Source retractions tried before concluding.
    pub attempts: usize,
}

impl TorsionCertificate {
    fn empty(prime: u64, kind: Kind) -> Self {
        TorsionCertificate {
            prime,
            kind,
            conclusion: Conclusion::Inconclusive,
            failed_at: None,
            sequence: None,
            source: None,
            blowdown: None,
            a2: None,
            a3: None,
            wedge: None,
            attempts: 0,
        }
    }

    fn fail(mut self, stage: Stage) -> Self {
        self.conclusion = Conclusion::Inconclusive;
        self.failed_at = Some(stage);
        self
    }

    pub fn certified(&self) -> bool {
        self.conclusion == Conclusion::NoPTorsion
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Bounds on the search behind each pipeline.
#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub search: SearchOptions,
    /// Source retractions tried before giving up on A3.
    pub retries: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { search: SearchOptions::default(), retries: 512 }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn check_prime(p: u64) -> Result<(), TorsionError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(TorsionError::NotPrime(p))
    }
}

pub(crate) fn gcd_u64(a: u64, p: u64) -> u64 {
    a.gcd(&p)
}

pub(crate) fn clean(trace: &[u64], p: u64) -> bool {
    trace.iter().all(|&t| gcd_u64(t, p) == 1)
}

fn denominator_gcd(c: &BigRational, p: u64) -> u64 {
    let g = c.denom().gcd(&BigInt::from(p));
    to_u64(&g).expect("divides a u64")
}

/// Solves `λ(big) = Σ c_s λ(P_s)` over the product structure's `P` facets.
pub fn solve_combination(lambda: &CharMap, ps: &ProductStructure) -> Result<Option<RationalCombination>, CharMapError> {
    let cols: Vec<IntVector> = ps.p_facets.iter().map(|&j| lambda.vector(j).clone()).collect();
    let Some(coeffs) = solve_rational(&cols, lambda.vector(ps.big_facet))? else {
        return Ok(None);
    };
    let (combo, coeffs) = ps.p_facets.iter().copied().zip(coeffs).filter(|(_, c)| !c.is_zero()).unzip();
    Ok(Some(RationalCombination { target: ps.big_facet, combo, coeffs }))
}

/// Hypothesis A2: the combination exists and its denominators are prime to `p`.
pub fn check_a2(p: &Polytope, lambda: &CharMap, ps: &ProductStructure, prime: u64) -> Result<A2Evidence, TorsionError> {
    check_prime(prime)?;
    let combination = solve_combination(lambda, ps)?;
    let names = |js: &[usize]| js.iter().map(|&j| p.facet_name(j).to_string()).collect::<Vec<_>>();
    Ok(match combination {
        None => A2Evidence {
            target: p.facet_name(ps.big_facet).to_string(),
            combo: names(&ps.p_facets),
            coeffs: Vec::new(),
            denominator_gcds: Vec::new(),
            solvable: false,
            pass: false,
        },
        Some(rc) => {
            let gcds: Vec<u64> = rc.coeffs.iter().map(|c| denominator_gcd(c, prime)).collect();
            A2Evidence {
                target: p.facet_name(rc.target).to_string(),
                combo: names(&rc.combo),
                coeffs: rc.coeffs.iter().map(|c| c.to_string()).collect(),
                pass: gcds.iter().all(|&g| g == 1),
                denominator_gcds: gcds,
                solvable: true,
            }
        }
    })
}

/// Hypothesis A1 alone: a p-clean retraction of `p`.
pub fn check_plain(
    p: &Polytope,
    lambda: &CharMap,
    prime: u64,
    opts: &PipelineOptions,
) -> Result<TorsionCertificate, TorsionError> {
    check_prime(prime)?;
    validate_rchar(p, lambda)?;
    let mut cert = TorsionCertificate::empty(prime, Kind::Plain);
    let Some(seq) = find_p_clean_retraction(p, lambda, prime, &opts.search, 1)?.pop() else {
        return Ok(cert.fail(Stage::A1));
    };
    cert.attempts = 1;
    let trace = singularity_trace(p, lambda, &seq)?;
    cert.sequence = Some(SequenceEvidence::new(p, lambda, &seq, trace));
    cert.conclusion = Conclusion::NoPTorsion;
    Ok(cert)
}

/// The blowdown pipeline: product structure, A2, restriction, then p-clean
/// retractions of `p` until one induces A3 and a p-clean induced trace.
pub fn blowdown_torsion_check(
    p: &Polytope,
    lambda: &CharMap,
    big: usize,
    base: &Face,
    prime: u64,
    opts: &PipelineOptions,
) -> Result<TorsionCertificate, TorsionError> {
    check_prime(prime)?;
    validate_rchar(p, lambda)?;
    let ps = detect_product_structure(p, big, base)?;
    let bd = blowdown(p, &ps)?;
    let mut cert = TorsionCertificate::empty(prime, Kind::Blowdown);
    cert.blowdown = Some(BlowdownData {
        big_facet: p.facet_name(big).to_string(),
        base_face: p.facet_names_of(base.support()),
    });
    let a2 = match check_a2(p, lambda, &ps, prime) {
        // Dependent P vectors meet at every fiber image, so λ′ is degenerate there.
        Err(TorsionError::CharMap(CharMapError::Lattice(LatticeError::Dependent))) => {
            return Ok(cert.fail(Stage::Restriction));
        }
        r => r?,
    };
    let a2_pass = a2.pass;
    cert.a2 = Some(a2);
    if !a2_pass {
        return Ok(cert.fail(Stage::A2));
    }
    let restricted = match restrict_char(p, lambda, &bd) {
        Ok(r) => r.char_map,
        Err(ConstructionError::RestrictionInvalid { .. }) => return Ok(cert.fail(Stage::Restriction)),
        Err(e) => return Err(e.into()),
    };
    let candidates = find_p_clean_retraction(p, lambda, prime, &opts.search, opts.retries)?;
    if candidates.is_empty() {
        return Ok(cert.fail(Stage::A1));
    }
    let mut first_failure: Option<TorsionCertificate> = None;
    for (n, seq) in candidates.iter().enumerate() {
        let report = induced_retraction_blowdown(p, seq, &bd, Some(lambda))?;
        let d_values: Vec<DValue> = report
            .d_values
            .iter()
            .map(|(&step, &d)| DValue { step, d, gcd: d.map(|d| gcd_u64(d, prime)) })
            .collect();
        let a3_pass = d_values.iter().all(|d| d.gcd == Some(1));
        let trace = report.trace.clone().expect("restriction is valid");
        let mut attempt = cert.clone();
        attempt.attempts = n + 1;
        attempt.source =
            Some(SequenceEvidence::new(p, lambda, seq, report.source_trace.clone().expect("map given")));
        attempt.sequence = Some(SequenceEvidence::new(&bd.polytope, &restricted, &report.sequence, trace.clone()));
        attempt.a3 = Some(A3Evidence { d_values, pass: a3_pass });
        let verdict = if !a3_pass {
            Some(Stage::A3)
        } else if !clean(&trace, prime) {
            Some(Stage::InducedTrace)
        } else {
            None
        };
        match verdict {
            None => {
                attempt.conclusion = Conclusion::NoPTorsion;
                return Ok(attempt);
            }
            Some(stage) => {
                first_failure.get_or_insert(attempt.fail(stage));
            }
        }
    }
    let mut out = first_failure.expect("at least one candidate");
    out.attempts = candidates.len();
    Ok(out)
}

/// The 2-wedge pipeline: a p-clean retraction of `p` taking `V(f)` last,
/// expanded to `Q_F(2)`.
pub fn kwedge_torsion_check(
    p: &Polytope,
    lambda: &CharMap,
    f: usize,
    a: i64,
    prime: u64,
    opts: &PipelineOptions,
) -> Result<TorsionCertificate, TorsionError> {
    check_prime(prime)?;
    if a == 1 {
        return Err(RetractionError::ParameterA.into());
    }
    validate_rchar(p, lambda)?;
    let mut cert = TorsionCertificate::empty(prime, Kind::TwoWedge);
    let factor = BigInt::from(1 - a).abs();
    let g = gcd_u64(to_u64(&(factor % prime)).expect("small"), prime);
    cert.wedge = Some(WedgeData { facet: p.facet_name(f).to_string(), a, gcd: g });
    if g != 1 {
        return Ok(cert.fail(Stage::Parameter));
    }
    let mut search = opts.search.clone();
    search.defer = p.facet_vertices(f).clone();
    search.strict_defer = true;
    let Some(seq) = find_p_clean_retraction(p, lambda, prime, &search, 1)?.pop() else {
        return Ok(cert.fail(Stage::A1));
    };
    cert.attempts = 1;
    let w = induced_retraction_2wedge(p, &seq, f, lambda, a)?;
    cert.source = Some(SequenceEvidence::new(p, lambda, &seq, singularity_trace(p, lambda, &seq)?));
    cert.sequence = Some(SequenceEvidence::new(&w.wedge.polytope, &w.char_map, &w.sequence, w.trace.clone()));
    if !clean(&w.trace, prime) {
        return Ok(cert.fail(Stage::InducedTrace));
    }
    cert.conclusion = Conclusion::NoPTorsion;
    Ok(cert)
}
