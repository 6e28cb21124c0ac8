//! Residue arithmetic, exponent vectors over finite abelian p-groups, and
//! small matrices over F_p.
//!
//! Central values are stored additively: the multiplicative `z^a` of a cyclic
//! group `Z = <z>` of order `m` is the residue `a mod m`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Returns `Some(e)` when `n = p^e` with `e >= 1`.
pub fn prime_power_exponent(n: u32, p: u32) -> Option<u32> {
    if n < p || p < 2 {
        return None;
    }
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some(e)
}

#[inline]
pub(crate) fn reduce(x: i64, m: u32) -> u32 {
    x.rem_euclid(m as i64) as u32
}

/// An integer modulo a positive modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u32,
    modulus: u32,
}

impl Residue {
    pub fn new(value: i64, modulus: u32) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        Residue {
            value: reduce(value, modulus),
            modulus,
        }
    }

    pub fn zero(modulus: u32) -> Self {
        Residue::new(0, modulus)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Additive order of the residue.
    pub fn order(self) -> u32 {
        self.modulus / gcd(self.value, self.modulus)
    }

    fn check(self, other: Residue) {
        assert_eq!(self.modulus, other.modulus, "residue modulus mismatch");
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::new(self.value as i64 + rhs.value as i64, self.modulus)
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check(rhs);
        Residue::new(self.value as i64 - rhs.value as i64, self.modulus)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(-(self.value as i64), self.modulus)
    }
}

impl Mul<i64> for Residue {
    type Output = Residue;
    fn mul(self, rhs: i64) -> Residue {
        Residue::new(self.value as i64 * rhs.rem_euclid(self.modulus as i64), self.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// An element of `Z_{m_1} x ... x Z_{m_k}` written in coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpVector {
    coords: Vec<u32>,
    moduli: Vec<u32>,
}

impl FpVector {
    pub fn new(coords: &[i64], moduli: &[u32]) -> Result<Self> {
        if coords.len() != moduli.len() {
            return Err(Error::Dimension {
                expected: moduli.len(),
                got: coords.len(),
            });
        }
        Ok(FpVector {
            coords: coords.iter().zip(moduli).map(|(&c, &m)| reduce(c, m)).collect(),
            moduli: moduli.to_vec(),
        })
    }

    /// A vector over `F_p^k` (all slots share the modulus `p`).
    pub fn uniform(p: u32, coords: &[i64]) -> Self {
        FpVector {
            coords: coords.iter().map(|&c| reduce(c, p)).collect(),
            moduli: vec![p; coords.len()],
        }
    }

    pub fn zero(moduli: &[u32]) -> Self {
        FpVector {
            coords: vec![0; moduli.len()],
            moduli: moduli.to_vec(),
        }
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn basis(moduli: &[u32], i: usize) -> Self {
        let mut v = FpVector::zero(moduli);
        v.coords[i] = 1 % moduli[i];
        v
    }

    pub(crate) fn from_raw(coords: Vec<u32>, moduli: Vec<u32>) -> Self {
        debug_assert_eq!(coords.len(), moduli.len());
        debug_assert!(coords.iter().zip(&moduli).all(|(c, m)| c < m));
        FpVector { coords, moduli }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &FpVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        for (slot, (&a, &b)) in self.moduli.iter().zip(&other.moduli).enumerate() {
            if a != b {
                return Err(Error::Modulus {
                    slot,
                    left: a,
                    right: b,
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &FpVector) -> Result<FpVector> {
        self.check_compatible(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(&self.moduli)
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect();
        Ok(FpVector::from_raw(coords, self.moduli.clone()))
    }

    pub fn sub(&self, other: &FpVector) -> Result<FpVector> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FpVector {
        self.scale(-1)
    }

    pub fn scale(&self, s: i64) -> FpVector {
        let coords = self
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| reduce(a as i64 * s.rem_euclid(m as i64), m))
            .collect();
        FpVector::from_raw(coords, self.moduli.clone())
    }

    /// Mixed-radix rank with the first coordinate most significant.
    pub fn rank(&self) -> usize {
        rank(&self.coords, &self.moduli)
    }

    pub fn unrank(index: usize, moduli: &[u32]) -> FpVector {
        let mut coords = vec![0; moduli.len()];
        unrank_into(index, moduli, &mut coords);
        FpVector::from_raw(coords, moduli.to_vec())
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn vec_add(a: &FpVector, b: &FpVector) -> Result<FpVector> {
    a.add(b)
}

#[inline]
pub(crate) fn rank(coords: &[u32], moduli: &[u32]) -> usize {
    coords
        .iter()
        .zip(moduli)
        .fold(0usize, |acc, (&c, &m)| acc * m as usize + c as usize)
}

#[inline]
pub(crate) fn unrank_into(mut index: usize, moduli: &[u32], out: &mut [u32]) {
    for i in (0..moduli.len()).rev() {
        let m = moduli[i] as usize;
        out[i] = (index % m) as u32;
        index /= m;
    }
}

pub(crate) fn group_order(moduli: &[u32]) -> usize {
    moduli.iter().map(|&m| m as usize).product()
}

/// Every element of `Z_{m_1} x ... x Z_{m_k}` in rank order.
pub fn all_vectors(moduli: &[u32]) -> impl Iterator<Item = FpVector> + '_ {
    (0..group_order(moduli)).map(move |i| FpVector::unrank(i, moduli))
}

/// A square matrix over F_p, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    k: usize,
    p: u32,
    entries: Vec<u32>,
}

impl FpMatrix {
    pub fn new(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::Dimension {
                    expected: k,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| reduce(x, p)));
        }
        Ok(FpMatrix { k, p, entries })
    }

    pub fn identity(k: usize, p: u32) -> Self {
        let mut entries = vec![0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1;
        }
        FpMatrix { k, p, entries }
    }

    pub fn zero(k: usize, p: u32) -> Self {
        FpMatrix {
            k,
            p,
            entries: vec![0; k * k],
        }
    }

    /// Builds the matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(p: u32, columns: &[Vec<u32>]) -> Self {
        let k = columns.len();
        let mut entries = vec![0; k * k];
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                entries[i * k + j] = x % p;
            }
        }
        FpMatrix { k, p, entries }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.k + col]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.k).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.k.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.k != other.k || self.p != other.p {
            return Err(Error::Dimension {
                expected: self.k,
                got: other.k,
            });
        }
        let k = self.k;
        let mut entries = vec![0; k * k];
        for i in 0..k {
            for j in 0..k {
                let s: u64 = (0..k)
                    .map(|t| self.get(i, t) as u64 * other.get(t, j) as u64)
                    .sum();
                entries[i * k + j] = (s % self.p as u64) as u32;
            }
        }
        Ok(FpMatrix {
            k,
            p: self.p,
            entries,
        })
    }

    /// Rank by Gaussian elimination mod p.
    pub fn rank(&self) -> usize {
        let p = self.p as u64;
        let k = self.k;
        let mut a: Vec<u64> = self.entries.iter().map(|&x| x as u64).collect();
        let mut rank = 0;
        for col in 0..k {
            let Some(pivot) = (rank..k).find(|&r| a[r * k + col] != 0) else {
                continue;
            };
            for t in 0..k {
                a.swap(rank * k + t, pivot * k + t);
            }
            let inv = mod_inverse(a[rank * k + col], p);
            for t in 0..k {
                a[rank * k + t] = a[rank * k + t] * inv % p;
            }
            for r in 0..k {
                if r != rank && a[r * k + col] != 0 {
                    let f = a[r * k + col];
                    for t in 0..k {
                        a[r * k + t] = (a[r * k + t] + p * p - f * a[rank * k + t] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.k
    }
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime and a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Matrix-vector product `M v` over F_p.
pub fn mat_apply(m: &FpMatrix, v: &FpVector) -> Result<FpVector> {
    if v.dim() != m.k {
        return Err(Error::Dimension {
            expected: m.k,
            got: v.dim(),
        });
    }
    if let Some((slot, &q)) = v.moduli().iter().enumerate().find(|(_, &q)| q != m.p) {
        return Err(Error::Modulus {
            slot,
            left: m.p,
            right: q,
        });
    }
    let coords = (0..m.k)
        .map(|i| {
            let s: u64 = (0..m.k)
                .map(|j| m.get(i, j) as u64 * v.coords()[j] as u64)
                .sum();
            (s % m.p as u64) as u32
        })
        .collect();
    Ok(FpVector::from_raw(coords, vec![m.p; m.k]))
}

/// Default ceiling on `p^(k^2)` for exhaustive matrix searches. Admits
/// `k <= 5` over F_2, `k <= 4` over F_3 and `k <= 3` over F_5.
pub const DEFAULT_MATRIX_BUDGET: u128 = 43_046_721; // 3^16

pub fn matrix_space_size(k: usize, p: u32) -> u128 {
    (p as u128).checked_pow((k * k) as u32).unwrap_or(u128::MAX)
}

pub fn gl_order(k: usize, p: u32) -> u128 {
    let q = (p as u128).pow(k as u32);
    (0..k).map(|i| q - (p as u128).pow(i as u32)).product()
}

/// Streams every invertible `k x k` matrix over F_p exactly once, in
/// row-major lexicographic order.
pub fn enumerate_invertible(k: usize, p: u32) -> Result<InvertibleMatrices> {
    InvertibleMatrices::with_budget(k, p, DEFAULT_MATRIX_BUDGET)
}

/// Row-by-row backtracking over independent rows. Rows are identified by
/// their rank in `F_p^k`, so lexicographic order on rows is numeric order.
#[derive(Clone, Debug)]
pub struct InvertibleMatrices {
    k: usize,
    p: u32,
    q: usize,
    rows: Vec<usize>,
    // spans[i] marks the span of the first i rows
    spans: Vec<Vec<bool>>,
    started: bool,
    done: bool,
}

impl InvertibleMatrices {
    pub fn with_budget(k: usize, p: u32, budget: u128) -> Result<Self> {
        check_prime(p)?;
        if k == 0 {
            return Err(Error::Index("matrix dimension must be at least 1".into()));
        }
        if matrix_space_size(k, p) > budget {
            return Err(Error::Budget(format!(
                "{p}^({k}^2) matrices exceeds the budget of {budget}"
            )));
        }
        let q = (p as usize).pow(k as u32);
        let mut span0 = vec![false; q];
        span0[0] = true;
        Ok(InvertibleMatrices {
            k,
            p,
            q,
            rows: Vec::with_capacity(k),
            spans: vec![span0],
            started: false,
            done: false,
        })
    }

    fn extend_span(&self, span: &[bool], row: usize) -> Vec<bool> {
        let moduli = vec![self.p; self.k];
        let mut r = vec![0u32; self.k];
        unrank_into(row, &moduli, &mut r);
        let mut out = vec![false; self.q];
        let mut s = vec![0u32; self.k];
        let mut t = vec![0u32; self.k];
        for (idx, &inside) in span.iter().enumerate() {
            if !inside {
                continue;
            }
            unrank_into(idx, &moduli, &mut s);
            for mult in 0..self.p {
                for i in 0..self.k {
                    t[i] = (s[i] + mult * r[i]) % self.p;
                }
                out[rank(&t, &moduli)] = true;
            }
        }
        out
    }

    /// Finds the next candidate at depth `self.rows.len()` starting from `from`.
    fn push_from(&mut self, from: usize) -> bool {
        let span = self.spans.last().unwrap();
        match (from..self.q).find(|&r| !span[r]) {
            Some(r) => {
                // the span of a full set of rows is never consulted
                let next = if self.rows.len() + 1 < self.k {
                    self.extend_span(span, r)
                } else {
                    Vec::new()
                };
                self.rows.push(r);
                self.spans.push(next);
                true
            }
            None => false,
        }
    }

    /// Advances to the next invertible matrix and returns its rows as ranks.
    pub fn next_rows(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
        } else {
            // backtrack: bump the last row
            loop {
                let Some(last) = self.rows.pop() else {
                    self.done = true;
                    return None;
                };
                self.spans.pop();
                if self.push_from(last + 1) {
                    break;
                }
            }
        }
        while self.rows.len() < self.k {
            if !self.push_from(0) {
                // cannot happen: a proper subspace never covers F_p^k
                self.done = true;
                return None;
            }
        }
        Some(&self.rows)
    }

    fn rows_to_matrix(&self) -> FpMatrix {
        let moduli = vec![self.p; self.k];
        let mut entries = Vec::with_capacity(self.k * self.k);
        let mut r = vec![0u32; self.k];
        for &row in &self.rows {
            unrank_into(row, &moduli, &mut r);
            entries.extend_from_slice(&r);
        }
        FpMatrix {
            k: self.k,
            p: self.p,
            entries,
        }
    }
}

impl Iterator for InvertibleMatrices {
    type Item = FpMatrix;

    fn next(&mut self) -> Option<FpMatrix> {
        self.next_rows()?;
        Some(self.rows_to_matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_arithmetic() {
        let a = Residue::new(5, 3);
        assert_eq!(a.value(), 2);
        assert_eq!((a + Residue::new(2, 3)).value(), 1);
        assert_eq!((-a).value(), 1);
        assert_eq!(Residue::new(-7, 4).value(), 1);
        assert_eq!(Residue::new(2, 4).order(), 2);
        assert_eq!(Residue::new(0, 9).order(), 1);
    }

    #[test]
    fn vector_addition_examples() {
        let a = FpVector::uniform(2, &[1, 1, 0]);
        let b = FpVector::uniform(2, &[0, 1, 1]);
        assert_eq!(vec_add(&a, &b).unwrap(), FpVector::uniform(2, &[1, 0, 1]));
        let z = FpVector::zero(&[2, 2, 2]);
        assert_eq!(vec_add(&a, &z).unwrap(), a);
        let c = FpVector::uniform(3, &[2, 1]);
        let d = FpVector::uniform(3, &[2, 2]);
        assert_eq!(vec_add(&c, &d).unwrap(), FpVector::uniform(3, &[1, 0]));
    }

    #[test]
    fn vector_mismatch_errors() {
        let a = FpVector::uniform(2, &[1, 1]);
        let b = FpVector::uniform(2, &[1, 1, 1]);
        assert!(matches!(a.add(&b), Err(Error::Dimension { .. })));
        let c = FpVector::uniform(3, &[1, 1]);
        assert!(matches!(a.add(&c), Err(Error::Modulus { slot: 0, .. })));
    }

    #[test]
    fn mixed_radix_rank_roundtrip() {
        let moduli = [4, 2, 3];
        for i in 0..24 {
            assert_eq!(FpVector::unrank(i, &moduli).rank(), i);
        }
        assert_eq!(FpVector::new(&[1, 0, 0], &moduli).unwrap().rank(), 6);
    }

    #[test]
    fn matrix_apply_examples() {
        let v = FpVector::uniform(2, &[1, 0]);
        assert_eq!(mat_apply(&FpMatrix::identity(2, 2), &v).unwrap(), v);
        assert!(mat_apply(&FpMatrix::zero(2, 2), &v).unwrap().is_zero());
        let swap = FpMatrix::new(2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            mat_apply(&swap, &v).unwrap(),
            FpVector::uniform(2, &[0, 1])
        );
        assert!(mat_apply(&swap, &FpVector::uniform(2, &[1, 0, 0])).is_err());
    }

    fn brute_force_invertible(k: usize, p: u32) -> Vec<FpMatrix> {
        let total = (p as usize).pow((k * k) as u32);
        let moduli = vec![p; k * k];
        (0..total)
            .map(|i| {
                let e = FpVector::unrank(i, &moduli);
                FpMatrix {
                    k,
                    p,
                    entries: e.coords().to_vec(),
                }
            })
            .filter(|m| m.is_invertible())
            .collect()
    }

    #[test]
    fn invertible_counts() {
        assert_eq!(enumerate_invertible(2, 2).unwrap().count(), 6);
        assert_eq!(enumerate_invertible(1, 3).unwrap().count(), 2);
        assert_eq!(enumerate_invertible(2, 3).unwrap().count(), 48);
        for (k, p) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3), (1, 5), (2, 5)] {
            assert_eq!(
                enumerate_invertible(k, p).unwrap().count() as u128,
                gl_order(k, p),
                "k={k} p={p}"
            );
        }
    }

    #[test]
    fn invertible_order_matches_filtered_row_major_scan() {
        for (k, p) in [(2, 2), (2, 3), (3, 2)] {
            let streamed: Vec<_> = enumerate_invertible(k, p).unwrap().collect();
            assert_eq!(streamed, brute_force_invertible(k, p));
        }
    }

    #[test]
    fn every_streamed_matrix_has_an_inverse_in_the_stream() {
        for (k, p) in [(2, 2), (2, 3), (3, 2)] {
            let all: Vec<_> = enumerate_invertible(k, p).unwrap().collect();
            let id = FpMatrix::identity(k, p);
            for m in &all {
                assert!(all.iter().any(|n| m.mul(n).unwrap() == id));
            }
        }
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        assert!(matches!(enumerate_invertible(5, 3), Err(Error::Budget(_))));
        assert!(matches!(enumerate_invertible(6, 2), Err(Error::Budget(_))));
        assert!(InvertibleMatrices::with_budget(5, 3, u128::MAX).is_ok());
        assert!(matches!(enumerate_invertible(2, 4), Err(Error::NotPrime(4))));
    }
}
