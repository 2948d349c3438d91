//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt`/`BigRational`; there is no floating
//! point. Matrices are small (n rarely exceeds 10), so the algorithms favour
//! clarity over asymptotics.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged rows: expected length {expected}, found {found}")]
    Ragged { expected: usize, found: usize },
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("sublattice is not saturated")]
    NotSaturated,
    #[error("basis is not unimodular (det = {det})")]
    NotUnimodular { det: BigInt },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("value {0} does not fit in u64")]
    Overflow(BigInt),
}

/// An integer vector of arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.len(), other.len());
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn concat(&self, other: &IntVector) -> IntVector {
        let mut e = self.0.clone();
        e.extend(other.0.iter().cloned());
        IntVector(e)
    }
}

impl Index<usize> for IntVector {
    type Output = BigInt;
    fn index(&self, i: usize) -> &BigInt {
        &self.0[i]
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(v: Vec<i64>) -> Self {
        IntVector::from_i64s(&v)
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

// Entries serialize as plain JSON numbers when they fit in i64 and as
// decimal strings otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Small(i64),
    Big(String),
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = self
            .0
            .iter()
            .map(|x| match x.to_i64() {
                Some(v) => Entry::Small(v),
                None => Entry::Big(x.to_string()),
            })
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Entry>::deserialize(d)?;
        raw.into_iter()
            .map(|e| match e {
                Entry::Small(v) => Ok(BigInt::from(v)),
                Entry::Big(s) => s.parse::<BigInt>().map_err(serde::de::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(IntVector)
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix whose rows are the given vectors. `cols` is needed
    /// only to shape an empty row list.
    pub fn from_rows(rows: &[IntVector], cols: usize) -> Result<Self, LatticeError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::Ragged { expected: cols, found: r.len() });
            }
            data.extend(r.iter().cloned());
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        Self::from_rows(&vs, cols)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[IntVector], rows: usize) -> Result<Self, LatticeError> {
        Ok(Self::from_rows(cols, rows)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for t in 0..self.cols {
                    acc += self.get(i, t) * other.get(t, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &IntVector) -> Result<IntVector, LatticeError> {
        if v.len() != self.rows {
            return Err(LatticeError::Dimension(format!(
                "vector of length {} against {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += x * self.get(i, j);
            }
        }
        Ok(IntVector(out))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    // row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let t = self.get(src, j) * q;
            self.data[dst * self.cols + j] += t;
        }
    }

    // col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let t = self.get(i, src) * q;
            self.data[i * self.cols + dst] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    pub fn det(&self) -> Result<BigInt, LatticeError> {
        det_exact(self)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

pub fn to_u64(x: &BigInt) -> Result<u64, LatticeError> {
    x.to_u64().ok_or_else(|| LatticeError::Overflow(x.clone()))
}

/// Divides out the content. Direction is preserved.
pub fn primitive(v: &IntVector) -> Result<IntVector, LatticeError> {
    let g = v.content();
    if g.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(IntVector(v.iter().map(|x| x / &g).collect()))
}

/// Bareiss fraction-free elimination.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt, LatticeError> {
    if m.rows != m.cols {
        return Err(LatticeError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let pivot = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (a.get(i, j) * &pivot - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = pivot;
    }
    let d = a.get(n - 1, n - 1).clone();
    Ok(if negate { -d } else { d })
}

/// Determinant of the square matrix whose rows are `vs`.
pub fn det_of_rows(vs: &[IntVector]) -> Result<BigInt, LatticeError> {
    let n = vs.len();
    det_exact(&IntMatrix::from_rows(vs, n)?)
}

pub fn rank(m: &IntMatrix) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| BigRational::from_integer(m.get(i, j).clone())).collect())
        .collect();
    row_reduce(&mut a, m.cols).len()
}

// Gauss-Jordan in place over the rationals on the first `cols` columns.
// Returns the pivot columns in order; pivot rows are 0..len.
fn row_reduce(a: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let src = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (d, s) in row.iter_mut().zip(&src) {
                    *d -= &f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Smith normal form with transforms: `left * A * right = diagonal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub invariant_factors: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub diagonal: IntMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).count()
    }

    /// Product of the nonzero factors.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_zero())
            .fold(BigInt::one(), |acc, d| acc * d)
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let steps = r.min(c);
    let mut t = 0;
    while t < steps {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut clean = true;
        for i in t + 1..r {
            let q = a.get(i, t) / a.get(t, t);
            if !q.is_zero() {
                a.add_row(i, t, &-&q);
                u.add_row(i, t, &-&q);
            }
            if !a.get(i, t).is_zero() {
                clean = false;
            }
        }
        for j in t + 1..c {
            let q = a.get(t, j) / a.get(t, t);
            if !q.is_zero() {
                a.add_col(j, t, &-&q);
                v.add_col(j, t, &-&q);
            }
            if !a.get(t, j).is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        let piv = a.get(t, t).clone();
        let bad_row = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a.get(i, j).is_multiple_of(&piv)));
        if let Some(i) = bad_row {
            a.add_row(t, i, &BigInt::one());
            u.add_row(t, i, &BigInt::one());
            continue;
        }
        if piv.is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let invariant_factors = (0..steps).map(|i| a.get(i, i).clone()).collect();
    SnfResult { invariant_factors, left: u, right: v, diagonal: a }
}

/// Inverse of a unimodular matrix, computed exactly.
pub fn inverse_unimodular(m: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    let d = det_exact(m)?;
    if d.abs() != BigInt::one() {
        return Err(LatticeError::NotUnimodular { det: d });
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                (0..n).map(|j| BigRational::from_integer(m.get(i, j).clone())).collect();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    row_reduce(&mut a, n);
    let mut inv = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // integral because det = ±1
            inv.set(i, j, a[i][n + j].to_integer());
        }
    }
    Ok(inv)
}

/// Row-style Hermite normal form of a full-row-rank matrix: echelon, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[IntVector], n: usize) -> Result<Vec<IntVector>, LatticeError> {
    let mut a = IntMatrix::from_rows(rows, n)?;
    let k = a.rows;
    let mut r = 0;
    for c in 0..n {
        if r == k {
            break;
        }
        // Euclid down column c among rows r..k
        loop {
            let nz: Vec<usize> = (r..k).filter(|&i| !a.get(i, c).is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a.get(i, c).abs()).unwrap();
            a.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..k {
                let q = a.get(i, c).div_floor(a.get(r, c));
                a.add_row(i, r, &-q);
                if !a.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a.get(r, c).is_zero() {
            continue;
        }
        if a.get(r, c).is_negative() {
            a.negate_row(r);
        }
        let piv = a.get(r, c).clone();
        for i in 0..r {
            let q = a.get(i, c).div_floor(&piv);
            if !q.is_zero() {
                a.add_row(i, r, &-q);
            }
        }
        r += 1;
    }
    if r < k {
        return Err(LatticeError::Dependent);
    }
    Ok(a.row_vectors())
}

fn check_lengths(vs: &[IntVector]) -> Result<usize, LatticeError> {
    let n = vs.first().map(IntVector::len).ok_or_else(|| LatticeError::Dimension("empty vector list".into()))?;
    if let Some(bad) = vs.iter().find(|v| v.len() != n) {
        return Err(LatticeError::Ragged { expected: n, found: bad.len() });
    }
    Ok(n)
}

/// Basis of (span_Q(vs) ∩ ℤⁿ), in Hermite normal form.
pub fn saturation_basis(vs: &[IntVector]) -> Result<Vec<IntVector>, LatticeError> {
    let n = check_lengths(vs)?;
    let m = IntMatrix::from_rows(vs, n)?;
    let snf = smith_normal_form(&m);
    if snf.rank() < vs.len() {
        return Err(LatticeError::Dependent);
    }
    let vinv = inverse_unimodular(&snf.right)?;
    let first: Vec<IntVector> = (0..vs.len()).map(|i| vinv.row(i)).collect();
    hermite_normal_form(&first, n)
}

/// Vectors completing a saturated basis to a basis of ℤⁿ.
pub fn complement_basis(sat: &[IntVector]) -> Result<Vec<IntVector>, LatticeError> {
    let n = check_lengths(sat)?;
    let snf = smith_normal_form(&IntMatrix::from_rows(sat, n)?);
    if snf.rank() < sat.len() {
        return Err(LatticeError::Dependent);
    }
    if snf.invariant_factors.iter().any(|d| !d.is_one()) {
        return Err(LatticeError::NotSaturated);
    }
    let vinv = inverse_unimodular(&snf.right)?;
    Ok((sat.len()..n).map(|i| vinv.row(i)).collect())
}

/// Checks that `sat ∪ comp` is a ℤ-basis of ℤⁿ.
pub fn verify_complement(sat: &[IntVector], comp: &[IntVector]) -> Result<(), LatticeError> {
    let all: Vec<IntVector> = sat.iter().chain(comp).cloned().collect();
    let n = check_lengths(&all)?;
    if all.len() != n {
        return Err(LatticeError::Dimension(format!(
            "{} basis vectors in dimension {n}",
            all.len()
        )));
    }
    let d = det_of_rows(&all)?;
    if d.abs().is_one() {
        Ok(())
    } else {
        Err(LatticeError::NotUnimodular { det: d })
    }
}

/// Coordinates with respect to a fixed unimodular basis `sat ∪ comp`,
/// keeping only the `comp` part.
#[derive(Clone, Debug)]
pub struct Projector {
    k: usize,
    inverse: IntMatrix,
}

impl Projector {
    pub fn new(sat: &[IntVector], comp: &[IntVector]) -> Result<Self, LatticeError> {
        verify_complement(sat, comp)?;
        let all: Vec<IntVector> = sat.iter().chain(comp).cloned().collect();
        let n = all.len();
        let basis = IntMatrix::from_rows(&all, n)?;
        Ok(Projector { k: sat.len(), inverse: inverse_unimodular(&basis)? })
    }

    pub fn ambient(&self) -> usize {
        self.inverse.rows
    }

    pub fn quotient_rank(&self) -> usize {
        self.inverse.rows - self.k
    }

    pub fn project(&self, v: &IntVector) -> Result<IntVector, LatticeError> {
        let coords = self.inverse.left_apply(v)?;
        Ok(IntVector(coords.0[self.k..].to_vec()))
    }
}

pub fn project_coordinates(
    v: &IntVector,
    sat: &[IntVector],
    comp: &[IntVector],
) -> Result<IntVector, LatticeError> {
    Projector::new(sat, comp)?.project(v)
}

/// Unique rational `x` with `Σ x_i columns_i = b`, or `None` when `b` is
/// outside the span.
pub fn solve_rational(
    columns: &[IntVector],
    b: &IntVector,
) -> Result<Option<Vec<BigRational>>, LatticeError> {
    let n = b.len();
    let k = columns.len();
    if let Some(bad) = columns.iter().find(|c| c.len() != n) {
        return Err(LatticeError::Ragged { expected: n, found: bad.len() });
    }
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            columns
                .iter()
                .map(|c| BigRational::from_integer(c[i].clone()))
                .chain(std::iter::once(BigRational::from_integer(b[i].clone())))
                .collect()
        })
        .collect();
    let pivots = row_reduce(&mut a, k + 1);
    let col_pivots = pivots.iter().filter(|&&c| c < k).count();
    if col_pivots < k {
        return Err(LatticeError::Dependent);
    }
    if pivots.contains(&k) {
        return Ok(None);
    }
    Ok(Some((0..k).map(|i| a[i][k].clone()).collect()))
}
