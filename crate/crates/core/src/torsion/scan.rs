use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::{
    blowdown_torsion_check, check_plain, check_prime, solve_combination, PipelineOptions, TorsionCertificate,
    TorsionError,
};
use crate::char_map::{compute_d_f, singularity_order, validate_rchar, CharMap};
use crate::constructions::{blowdown, detect_product_structure, restrict_char};
use crate::lattice::to_u64;
use crate::polytope::{Face, Polytope};

/// Prime factors of `n` in increasing order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn add_factors(set: &mut BTreeSet<u64>, n: &BigInt) {
    // Quantities here are vertex determinants and small rationals; anything
    // beyond u64 would be a bug upstream.
    let n = to_u64(&n.abs()).expect("relevant quantity fits in u64");
    if n > 1 {
        set.extend(prime_factors(n));
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeScan {
    pub relevant_primes: Vec<u64>,
    pub certificates: Vec<TorsionCertificate>,
    pub torsion_free: bool,
    pub justification: String,
}

const PLAIN_REASON: &str = "every face order divides the vertex order below it, so a prime \
    dividing no vertex order divides no trace entry; the relevant set is the primes of the vertex orders";

const BLOWDOWN_REASON: &str = "trace entries on both polytopes divide vertex orders, and every \
    remaining quantity is a combination coefficient or a d value; a prime outside the union of their \
    factors passes every gcd check by construction, so only the listed primes need a pipeline run";

/// Primes dividing some vertex order of `p`.
pub fn vertex_order_primes(p: &Polytope, lambda: &CharMap) -> Result<BTreeSet<u64>, TorsionError> {
    let mut set = BTreeSet::new();
    for v in 0..p.num_vertices() {
        add_factors(&mut set, &BigInt::from(singularity_order(p, lambda, v)?));
    }
    Ok(set)
}

/// `check_plain` at every relevant prime.
pub fn plain_prime_scan(p: &Polytope, lambda: &CharMap, opts: &PipelineOptions) -> Result<PrimeScan, TorsionError> {
    validate_rchar(p, lambda)?;
    let primes = vertex_order_primes(p, lambda)?;
    let certificates =
        primes.iter().map(|&q| check_plain(p, lambda, q, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(PrimeScan {
        torsion_free: certificates.iter().all(TorsionCertificate::certified),
        relevant_primes: primes.into_iter().collect(),
        certificates,
        justification: PLAIN_REASON.to_string(),
    })
}

/// Relevant primes for a blowdown: the vertex orders on both sides, plus
/// whatever divides the combination coefficients or some defined `d_E`.
pub fn blowdown_relevant_primes(
    p: &Polytope,
    lambda: &CharMap,
    big: usize,
    base: &Face,
) -> Result<BTreeSet<u64>, TorsionError> {
    let mut set = vertex_order_primes(p, lambda)?;
    let ps = detect_product_structure(p, big, base)?;
    let bd = blowdown(p, &ps)?;
    if let Ok(r) = restrict_char(p, lambda, &bd) {
        set.extend(vertex_order_primes(&bd.polytope, &r.char_map)?);
    }
    // Dependent P vectors leave no well-defined combination to factor.
    if let Ok(Some(rc)) = solve_combination(lambda, &ps) {
        for c in &rc.coeffs {
            add_factors(&mut set, c.numer());
            add_factors(&mut set, c.denom());
        }
        for face in p.faces() {
            if let Ok(d) = compute_d_f(p, lambda, &face, big, &rc.combo, &rc.coeffs) {
                add_factors(&mut set, &BigInt::from(d));
            }
        }
    }
    Ok(set)
}

/// The blowdown pipeline at every relevant prime. With an empty relevant set
/// the pipeline still runs once at 2 so the structural hypotheses are checked.
pub fn all_prime_scan(
    p: &Polytope,
    lambda: &CharMap,
    big: usize,
    base: &Face,
    opts: &PipelineOptions,
) -> Result<PrimeScan, TorsionError> {
    validate_rchar(p, lambda)?;
    let primes = blowdown_relevant_primes(p, lambda, big, base)?;
    let run: Vec<u64> = if primes.is_empty() { vec![2] } else { primes.iter().copied().collect() };
    let mut certificates = Vec::with_capacity(run.len());
    for &q in &run {
        check_prime(q)?;
        certificates.push(blowdown_torsion_check(p, lambda, big, base, q, opts)?);
    }
    let mut justification = BLOWDOWN_REASON.to_string();
    if primes.is_empty() {
        justification.push_str("; the set is empty, and the run at 2 witnesses the structural hypotheses");
    }
    Ok(PrimeScan {
        torsion_free: certificates.iter().all(TorsionCertificate::certified),
        relevant_primes: primes.into_iter().collect(),
        certificates,
        justification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors() {
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(64), vec![2]);
        assert_eq!(prime_factors(2 * 9 * 49 * 13), vec![2, 3, 7, 13]);
        assert_eq!(prime_factors(97), vec![97]);
    }
}
