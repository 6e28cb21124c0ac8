//! Coded vector spaces: an F_p-space `C` with a power form `sigma`, a
//! commutator form `chi` and an associator form `alpha`, all valued in the
//! group of order `p` (written additively).
//!
//! A space is stored by its basis values `sigma_i`, `chi_ij` (`i < j`) and
//! `alpha_ijl` (`i < j < l`); the evaluators extend them to all of `C`. For
//! odd `p` the extensions are multilinear. For `p = 2` the commutator form
//! polarizes to the associator form and the power form polarizes to the
//! commutator form, so both use closed-form cubic expressions.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    check_prime, group_order, matrix_space_size, rank, unrank_into, FpMatrix, FpVector, Residue,
    DEFAULT_MATRIX_BUDGET,
};
use crate::error::{Error, Result};
use crate::forms::{ChiMode, Forms};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cvs {
    p: u32,
    k: usize,
    sigma: Vec<u32>,
    forms: Forms,
}

/// Pairs `(i, j)` with `i < j < k` in lexicographic order.
pub fn pair_indices(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            out.push((i, j));
        }
    }
    out
}

/// Triples `(i, j, l)` with `i < j < l < k` in lexicographic order.
pub fn triple_indices(k: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            for l in (j + 1)..k {
                out.push((i, j, l));
            }
        }
    }
    out
}

impl Cvs {
    /// Builds a space from sparse basis data. Indices are 0-based; `chi`
    /// entries need `i < j` and `alpha` entries `i < j < l`.
    pub fn new(
        p: u32,
        k: usize,
        sigma: &[u32],
        chi: &[(usize, usize, u32)],
        alpha: &[(usize, usize, usize, u32)],
    ) -> Result<Self> {
        check_prime(p)?;
        if sigma.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: sigma.len(),
            });
        }
        let mut chi_table = vec![0u32; pair_indices(k).len()];
        let pairs = pair_indices(k);
        for &(i, j, v) in chi {
            if !(i < j && j < k) {
                return Err(Error::Index(format!("chi entry ({i},{j}) for dimension {k}")));
            }
            let slot = pairs.iter().position(|&q| q == (i, j)).unwrap();
            if chi_table[slot] != 0 {
                return Err(Error::InvalidCvs(format!("duplicate chi entry ({i},{j})")));
            }
            chi_table[slot] = v % p;
        }
        let triples = triple_indices(k);
        let mut alpha_table = vec![0u32; triples.len()];
        for &(i, j, l, v) in alpha {
            if !(i < j && j < l && l < k) {
                return Err(Error::Index(format!(
                    "alpha entry ({i},{j},{l}) for dimension {k}"
                )));
            }
            let slot = triples.iter().position(|&q| q == (i, j, l)).unwrap();
            if alpha_table[slot] != 0 {
                return Err(Error::InvalidCvs(format!(
                    "duplicate alpha entry ({i},{j},{l})"
                )));
            }
            alpha_table[slot] = v % p;
        }
        Cvs::from_tables(p, k, sigma, &chi_table, &alpha_table)
    }

    /// Builds a space from dense tables: `chi` in [`pair_indices`] order and
    /// `alpha` in [`triple_indices`] order.
    pub fn from_tables(p: u32, k: usize, sigma: &[u32], chi: &[u32], alpha: &[u32]) -> Result<Self> {
        check_prime(p)?;
        let pairs = pair_indices(k);
        let triples = triple_indices(k);
        if sigma.len() != k || chi.len() != pairs.len() || alpha.len() != triples.len() {
            return Err(Error::Dimension {
                expected: k,
                got: sigma.len(),
            });
        }
        if p > 3 {
            if let Some(pos) = alpha.iter().position(|&v| v % p != 0) {
                let (i, j, l) = triples[pos];
                return Err(Error::InvalidCvs(format!(
                    "alpha({},{},{}) must vanish for p = {p} > 3",
                    i + 1,
                    j + 1,
                    l + 1
                )));
            }
        }
        let mode = if p == 2 {
            ChiMode::Polarized
        } else {
            ChiMode::Bilinear
        };
        let forms = Forms::new(
            k,
            p,
            mode,
            pairs.iter().zip(chi).map(|(&(i, j), &v)| (i, j, v % p)),
            triples.iter().zip(alpha).map(|(&(i, j, l), &v)| (i, j, l, v % p)),
        );
        Ok(Cvs {
            p,
            k,
            sigma: sigma.iter().map(|&s| s % p).collect(),
            forms,
        })
    }

    /// The space of the octonion loop: every basis value equals 1 over F_2.
    pub fn octonion() -> Cvs {
        Cvs::from_tables(2, 3, &[1, 1, 1], &[1, 1, 1], &[1]).unwrap()
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn moduli(&self) -> Vec<u32> {
        vec![self.p; self.k]
    }

    /// Number of vectors, `p^k`.
    pub fn size(&self) -> usize {
        group_order(&self.moduli())
    }

    pub fn sigma_basis(&self) -> &[u32] {
        &self.sigma
    }

    /// `chi(e_i, e_j)` for `i < j` in [`pair_indices`] order.
    pub fn chi_table(&self) -> Vec<u32> {
        pair_indices(self.k)
            .into_iter()
            .map(|(i, j)| self.forms.chi_basis(i, j))
            .collect()
    }

    /// `alpha(e_i, e_j, e_l)` for `i < j < l` in [`triple_indices`] order.
    pub fn alpha_table(&self) -> Vec<u32> {
        triple_indices(self.k)
            .into_iter()
            .map(|(i, j, l)| self.forms.alpha_basis(i, j, l))
            .collect()
    }

    pub fn chi_basis(&self, i: usize, j: usize) -> u32 {
        self.forms.chi_basis(i, j)
    }

    pub fn alpha_basis(&self, i: usize, j: usize, l: usize) -> u32 {
        self.forms.alpha_basis(i, j, l)
    }

    pub fn alpha_is_zero(&self) -> bool {
        !self.forms.alpha_nonzero
    }

    pub fn chi_is_zero(&self) -> bool {
        self.forms.chi.iter().all(|&v| v == 0)
    }

    /// Overwrites one raw commutator entry without restoring skew symmetry.
    /// Exists to exercise the validator.
    #[doc(hidden)]
    pub fn corrupt_chi_entry(&mut self, i: usize, j: usize, v: u32) {
        self.forms.chi[i * self.k + j] = v % self.p;
    }

    fn check_vec(&self, v: &FpVector) -> Result<()> {
        if v.dim() != self.k {
            return Err(Error::Dimension {
                expected: self.k,
                got: v.dim(),
            });
        }
        if let Some((slot, &q)) = v.moduli().iter().enumerate().find(|(_, &q)| q != self.p) {
            return Err(Error::Modulus {
                slot,
                left: self.p,
                right: q,
            });
        }
        Ok(())
    }

    pub fn eval_sigma(&self, c: &FpVector) -> Result<Residue> {
        self.check_vec(c)?;
        Ok(Residue::new(self.sigma_raw(c.coords()) as i64, self.p))
    }

    pub fn eval_chi(&self, c: &FpVector, d: &FpVector) -> Result<Residue> {
        self.check_vec(c)?;
        self.check_vec(d)?;
        Ok(Residue::new(self.chi_raw(c.coords(), d.coords()) as i64, self.p))
    }

    pub fn eval_alpha(&self, c: &FpVector, d: &FpVector, e: &FpVector) -> Result<Residue> {
        self.check_vec(c)?;
        self.check_vec(d)?;
        self.check_vec(e)?;
        Ok(Residue::new(
            self.alpha_raw(c.coords(), d.coords(), e.coords()) as i64,
            self.p,
        ))
    }

    pub(crate) fn sigma_raw(&self, c: &[u32]) -> u32 {
        if self.p == 2 {
            self.forms.sigma_polarized(&self.sigma, c)
        } else {
            self.forms.sigma_linear(&self.sigma, c)
        }
    }

    pub(crate) fn chi_raw(&self, c: &[u32], d: &[u32]) -> u32 {
        self.forms.eval_chi(c, d)
    }

    pub(crate) fn alpha_raw(&self, c: &[u32], d: &[u32], e: &[u32]) -> u32 {
        self.forms.eval_alpha(c, d, e)
    }

    fn vectors(&self) -> Vec<Vec<u32>> {
        let moduli = self.moduli();
        (0..self.size())
            .map(|i| {
                let mut v = vec![0; self.k];
                unrank_into(i, &moduli, &mut v);
                v
            })
            .collect()
    }

    fn radical_budget(&self) -> Result<()> {
        if self.size() > RADICAL_BUDGET {
            return Err(Error::Budget(format!(
                "radical by exhaustion needs p^k <= {RADICAL_BUDGET}, have {}",
                self.size()
            )));
        }
        Ok(())
    }

    /// Every `c` with `chi(c, d) = 0` for all `d`.
    pub fn rad_chi_elements(&self) -> Result<Vec<FpVector>> {
        self.radical_budget()?;
        let all = self.vectors();
        let moduli = self.moduli();
        Ok(all
            .iter()
            .filter(|c| all.iter().all(|d| self.chi_raw(c, d) == 0))
            .map(|c| FpVector::from_raw(c.clone(), moduli.clone()))
            .collect())
    }

    /// Every `c` with `alpha(c, d, e) = 0` for all `d, e`.
    pub fn rad_alpha_elements(&self) -> Result<Vec<FpVector>> {
        self.radical_budget()?;
        let all = self.vectors();
        let moduli = self.moduli();
        Ok(all
            .iter()
            .filter(|c| {
                all.iter()
                    .all(|d| all.iter().all(|e| self.alpha_raw(c, d, e) == 0))
            })
            .map(|c| FpVector::from_raw(c.clone(), moduli.clone()))
            .collect())
    }

    /// A basis of the radical of `chi`, found by exhaustive evaluation.
    pub fn rad_chi(&self) -> Result<Vec<FpVector>> {
        Ok(greedy_basis(self.p, &self.rad_chi_elements()?))
    }

    /// A basis of the radical of `alpha`, found by exhaustive evaluation.
    pub fn rad_alpha(&self) -> Result<Vec<FpVector>> {
        Ok(greedy_basis(self.p, &self.rad_alpha_elements()?))
    }

    /// The space with `chi(c, d)` replaced by `chi(c, d) + alpha(c, k, d)`.
    pub fn adjoint_translate(&self, kappa: &FpVector) -> Result<Cvs> {
        self.check_vec(kappa)?;
        let kv = kappa.coords();
        let chi: Vec<u32> = pair_indices(self.k)
            .into_iter()
            .map(|(i, j)| {
                let ei = unit(self.k, i);
                let ej = unit(self.k, j);
                (self.forms.chi_basis(i, j) + self.alpha_raw(&ei, kv, &ej)) % self.p
            })
            .collect();
        Cvs::from_tables(self.p, self.k, &self.sigma, &chi, &self.alpha_table())
    }

    /// The space `B` with `B(x) = scalar * A(M x)` for every argument, where
    /// `images[i] = M e_i`.
    pub fn pullback(&self, images: &[Vec<u32>], scalar: u32) -> Cvs {
        let p = self.p;
        let k = images.len();
        let sigma: Vec<u32> = images
            .iter()
            .map(|x| self.sigma_raw(x) * scalar % p)
            .collect();
        let chi: Vec<u32> = pair_indices(k)
            .into_iter()
            .map(|(i, j)| self.chi_raw(&images[i], &images[j]) * scalar % p)
            .collect();
        let alpha: Vec<u32> = triple_indices(k)
            .into_iter()
            .map(|(i, j, l)| self.alpha_raw(&images[i], &images[j], &images[l]) * scalar % p)
            .collect();
        Cvs::from_tables(p, k, &sigma, &chi, &alpha).expect("pullback of a valid space")
    }

    /// Every basis value multiplied by `scalar`.
    pub fn scaled(&self, scalar: u32) -> Cvs {
        let images: Vec<Vec<u32>> = (0..self.k).map(|i| unit(self.k, i)).collect();
        self.pullback(&images, scalar)
    }

    /// The same space written in the reversed basis `e_k, ..., e_1`.
    pub fn reversed_basis(&self) -> Cvs {
        let images: Vec<Vec<u32>> = (0..self.k).rev().map(|i| unit(self.k, i)).collect();
        self.pullback(&images, 1)
    }

    pub fn validate_axioms(&self, budget: &ValidationBudget) -> AxiomReport {
        crate::cvs_validate::validate(self, budget)
    }

    /// Text form; see [`parse_cvs`].
    pub fn emit(&self) -> String {
        let mut out = String::new();
        out.push_str("cvs\n");
        out.push_str(&format!("p {}\n", self.p));
        out.push_str(&format!("dim {}\n", self.k));
        for (i, &s) in self.sigma.iter().enumerate() {
            if s != 0 {
                out.push_str(&format!("sigma {} {}\n", i + 1, s));
            }
        }
        for ((i, j), v) in pair_indices(self.k).into_iter().zip(self.chi_table()) {
            if v != 0 {
                out.push_str(&format!("chi {} {} {}\n", i + 1, j + 1, v));
            }
        }
        for ((i, j, l), v) in triple_indices(self.k).into_iter().zip(self.alpha_table()) {
            if v != 0 {
                out.push_str(&format!("alpha {} {} {} {}\n", i + 1, j + 1, l + 1, v));
            }
        }
        out
    }
}

impl fmt::Display for Cvs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

pub(crate) fn unit(k: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; k];
    v[i] = 1;
    v
}

const RADICAL_BUDGET: usize = 729;

/// Picks, in order, each vector not in the span of those already chosen.
pub fn greedy_basis(p: u32, vectors: &[FpVector]) -> Vec<FpVector> {
    let mut basis: Vec<FpVector> = Vec::new();
    let Some(first) = vectors.first() else {
        return basis;
    };
    let moduli = first.moduli().to_vec();
    let mut span = vec![false; group_order(&moduli)];
    span[0] = true;
    for v in vectors {
        if span[v.rank()] {
            continue;
        }
        let members: Vec<usize> = (0..span.len()).filter(|&i| span[i]).collect();
        let mut s = vec![0u32; moduli.len()];
        for idx in members {
            unrank_into(idx, &moduli, &mut s);
            for mult in 1..p {
                let t: Vec<u32> = s
                    .iter()
                    .zip(v.coords())
                    .map(|(&a, &b)| (a + mult * b) % p)
                    .collect();
                span[rank(&t, &moduli)] = true;
            }
        }
        basis.push(v.clone());
    }
    basis
}

/// An isomorphism up to scalar: `B(M x) = scalar * A(x)` for every form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvsIso {
    pub matrix: FpMatrix,
    pub scalar: Residue,
}

/// Searches for a [`CvsIso`] from `a` to `b`. Equal inputs give the
/// identity. Otherwise candidate maps are tried with the least scalar first,
/// then in lexicographic order of the images of `e_1, e_2, ...`; the first
/// hit is returned.
pub fn iso_up_to_scalar(a: &Cvs, b: &Cvs) -> Result<Option<CvsIso>> {
    iso_up_to_scalar_with_budget(a, b, DEFAULT_MATRIX_BUDGET)
}

pub fn iso_up_to_scalar_with_budget(a: &Cvs, b: &Cvs, budget: u128) -> Result<Option<CvsIso>> {
    if a.p != b.p || a.k != b.k {
        return Err(Error::Dimension {
            expected: a.k,
            got: b.k,
        });
    }
    let (p, k) = (a.p, a.k);
    if k == 0 {
        return Ok(Some(CvsIso {
            matrix: FpMatrix::identity(0, p),
            scalar: Residue::new(1, p),
        }));
    }
    if matrix_space_size(k, p) > budget {
        return Err(Error::Budget(format!(
            "isomorphism search over {p}^({k}^2) matrices exceeds {budget}"
        )));
    }
    if a == b {
        return Ok(Some(CvsIso {
            matrix: FpMatrix::identity(k, p),
            scalar: Residue::new(1, p),
        }));
    }
    let vectors = b.vectors();
    for scalar in 1..p {
        let mut search = IsoSearch {
            a,
            b,
            scalar,
            vectors: &vectors,
            images: Vec::with_capacity(k),
            spans: vec![{
                let mut s = vec![false; vectors.len()];
                s[0] = true;
                s
            }],
        };
        if search.run() {
            let matrix = FpMatrix::from_columns(
                p,
                &search.images.iter().map(|&i| vectors[i].clone()).collect::<Vec<_>>(),
            );
            return Ok(Some(CvsIso {
                matrix,
                scalar: Residue::new(scalar as i64, p),
            }));
        }
    }
    Ok(None)
}

struct IsoSearch<'a> {
    a: &'a Cvs,
    b: &'a Cvs,
    scalar: u32,
    vectors: &'a [Vec<u32>],
    images: Vec<usize>,
    spans: Vec<Vec<bool>>,
}

impl IsoSearch<'_> {
    fn run(&mut self) -> bool {
        let depth = self.images.len();
        if depth == self.a.k {
            return true;
        }
        let p = self.a.p;
        let s = self.scalar;
        let want_sigma = self.a.sigma[depth] * s % p;
        for cand in 1..self.vectors.len() {
            if self.spans[depth][cand] {
                continue;
            }
            let x = &self.vectors[cand];
            if self.b.sigma_raw(x) != want_sigma {
                continue;
            }
            let chi_ok = (0..depth).all(|j| {
                let y = &self.vectors[self.images[j]];
                self.b.chi_raw(y, x) == self.a.chi_basis(j, depth) * s % p
            });
            if !chi_ok {
                continue;
            }
            let alpha_ok = self.a.p > 3
                || (0..depth).all(|i| {
                    (i + 1..depth).all(|j| {
                        let yi = &self.vectors[self.images[i]];
                        let yj = &self.vectors[self.images[j]];
                        self.b.alpha_raw(yi, yj, x) == self.a.alpha_basis(i, j, depth) * s % p
                    })
                });
            if !alpha_ok {
                continue;
            }
            let span = extend_span(&self.spans[depth], x, p, self.a.k);
            self.images.push(cand);
            self.spans.push(span);
            if self.run() {
                return true;
            }
            self.images.pop();
            self.spans.pop();
        }
        false
    }
}

fn extend_span(span: &[bool], x: &[u32], p: u32, k: usize) -> Vec<bool> {
    let moduli = vec![p; k];
    let mut out = vec![false; span.len()];
    let mut s = vec![0u32; k];
    let mut t = vec![0u32; k];
    for (idx, &inside) in span.iter().enumerate() {
        if !inside {
            continue;
        }
        unrank_into(idx, &moduli, &mut s);
        for mult in 0..p {
            for i in 0..k {
                t[i] = (s[i] + mult * x[i]) % p;
            }
            out[rank(&t, &moduli)] = true;
        }
    }
    out
}

/// Deterministic pseudo-random basis data; `alpha` vanishes for `p > 3`.
pub fn random_cvs(p: u32, k: usize, seed: u64) -> Result<Cvs> {
    check_prime(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p)).collect();
    let chi: Vec<u32> = pair_indices(k).iter().map(|_| rng.gen_range(0..p)).collect();
    let alpha: Vec<u32> = triple_indices(k)
        .iter()
        .map(|_| if p > 3 { 0 } else { rng.gen_range(0..p) })
        .collect();
    Cvs::from_tables(p, k, &sigma, &chi, &alpha)
}

/// Limits for [`Cvs::validate_axioms`].
#[derive(Clone, Debug)]
pub struct ValidationBudget {
    /// Check every argument tuple when `p^k` is at most this.
    pub exhaustive_limit: usize,
    /// Number of random tuples otherwise.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidationBudget {
    fn default() -> Self {
        ValidationBudget {
            exhaustive_limit: 81,
            samples: 20_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: &'static str,
    pub witness: Vec<FpVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub tuples_checked: usize,
    pub failure: Option<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Parses the line-oriented text form:
///
/// ```text
/// cvs
/// p 2
/// dim 3
/// sigma 1 1
/// chi 1 2 1
/// alpha 1 2 3 1
/// ```
///
/// Indices are 1-based, unlisted entries are 0, `#` starts a comment.
pub fn parse_cvs(text: &str) -> Result<Cvs> {
    let mut lines = crate::text::tokenized_lines(text);
    let Some((line_no, header)) = lines.next() else {
        return Err(Error::parse(1, 1, "empty input, expected `cvs`"));
    };
    if header.len() != 1 || header[0].text != "cvs" {
        return Err(Error::parse(line_no, header[0].column, "expected `cvs` header"));
    }
    let mut p: Option<u32> = None;
    let mut k: Option<usize> = None;
    let mut sigma: Vec<(usize, usize, u32)> = Vec::new();
    let mut chi: Vec<(usize, usize, usize, u32)> = Vec::new();
    let mut alpha: Vec<(usize, usize, usize, usize, u32)> = Vec::new();
    for (line_no, toks) in lines {
        let key = &toks[0];
        let need = |n: usize| -> Result<()> {
            if toks.len() != n {
                Err(Error::parse(
                    line_no,
                    key.column,
                    format!("`{}` takes {} argument(s)", key.text, n - 1),
                ))
            } else {
                Ok(())
            }
        };
        match key.text {
            "p" => {
                need(2)?;
                if p.is_some() {
                    return Err(Error::parse(line_no, key.column, "duplicate `p`"));
                }
                let v: u32 = toks[1].parse(line_no)?;
                if !crate::algebra::is_prime(v) {
                    return Err(Error::parse(line_no, toks[1].column, format!("{v} is not prime")));
                }
                p = Some(v);
            }
            "dim" => {
                need(2)?;
                if k.is_some() {
                    return Err(Error::parse(line_no, key.column, "duplicate `dim`"));
                }
                k = Some(toks[1].parse(line_no)?);
            }
            "sigma" | "chi" | "alpha" => {
                let (Some(p), Some(k)) = (p, k) else {
                    return Err(Error::parse(
                        line_no,
                        key.column,
                        "`p` and `dim` must precede table entries",
                    ));
                };
                let arity = match key.text {
                    "sigma" => 1,
                    "chi" => 2,
                    _ => 3,
                };
                need(arity + 2)?;
                let mut idx = Vec::with_capacity(arity);
                for t in &toks[1..=arity] {
                    let i: usize = t.parse(line_no)?;
                    if i == 0 || i > k {
                        return Err(Error::parse(
                            line_no,
                            t.column,
                            format!("index {i} outside 1..={k}"),
                        ));
                    }
                    idx.push(i - 1);
                }
                if idx.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse(
                        line_no,
                        toks[1].column,
                        "indices must be strictly increasing",
                    ));
                }
                let vt = &toks[arity + 1];
                let v: u32 = vt.parse(line_no)?;
                if v >= p {
                    return Err(Error::parse(line_no, vt.column, format!("value {v} not in [0,{p})")));
                }
                match arity {
                    1 => sigma.push((line_no, idx[0], v)),
                    2 => chi.push((line_no, idx[0], idx[1], v)),
                    _ => alpha.push((line_no, idx[0], idx[1], idx[2], v)),
                }
            }
            other => {
                return Err(Error::parse(line_no, key.column, format!("unknown keyword `{other}`")));
            }
        }
    }
    let p = p.ok_or_else(|| Error::parse(1, 1, "missing `p`"))?;
    let k = k.ok_or_else(|| Error::parse(1, 1, "missing `dim`"))?;
    let mut sigma_vals = vec![None; k];
    for (line, i, v) in sigma {
        if sigma_vals[i].replace(v).is_some() {
            return Err(Error::parse(line, 1, format!("duplicate sigma entry {}", i + 1)));
        }
    }
    let pairs = pair_indices(k);
    let mut chi_vals = vec![None; pairs.len()];
    for (line, i, j, v) in chi {
        let slot = pairs.iter().position(|&q| q == (i, j)).unwrap();
        if chi_vals[slot].replace(v).is_some() {
            return Err(Error::parse(line, 1, format!("duplicate chi entry {} {}", i + 1, j + 1)));
        }
    }
    let triples = triple_indices(k);
    let mut alpha_vals = vec![None; triples.len()];
    for (line, i, j, l, v) in alpha {
        let slot = triples.iter().position(|&q| q == (i, j, l)).unwrap();
        if alpha_vals[slot].replace(v).is_some() {
            return Err(Error::parse(
                line,
                1,
                format!("duplicate alpha entry {} {} {}", i + 1, j + 1, l + 1),
            ));
        }
        if p > 3 && v != 0 {
            return Err(Error::parse(line, 1, format!("alpha must vanish for p = {p}")));
        }
    }
    let flat = |v: Vec<Option<u32>>| v.into_iter().map(|x| x.unwrap_or(0)).collect::<Vec<_>>();
    Cvs::from_tables(p, k, &flat(sigma_vals), &flat(chi_vals), &flat(alpha_vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: usize, i: usize, p: u32) -> FpVector {
        FpVector::basis(&vec![p; k], i)
    }

    fn v(p: u32, c: &[i64]) -> FpVector {
        FpVector::uniform(p, c)
    }

    /// Expands `chi` by repeated polarization, peeling one basis vector at a
    /// time off each argument. Independent of the closed form.
    fn chi_by_polarization(cvs: &Cvs, c: &[u32], d: &[u32]) -> u32 {
        let p = cvs.prime();
        let k = cvs.dim();
        let Some(i) = (0..k).rev().find(|&i| c[i] != 0) else {
            return 0;
        };
        let mut rest = c.to_vec();
        rest[i] = 0;
        let ei = unit(k, i);
        // chi(rest + e_i, d) = chi(rest, d) + chi(e_i, d) + alpha(rest, e_i, d)
        let head = chi_by_polarization(cvs, &rest, d);
        let tail = chi_unit(cvs, i, d);
        (head + tail + cvs.alpha_raw(&rest, &ei, d)) % p
    }

    fn chi_unit(cvs: &Cvs, i: usize, d: &[u32]) -> u32 {
        // chi(e_i, d) = chi(d, e_i) in characteristic 2
        let k = cvs.dim();
        let Some(j) = (0..k).rev().find(|&j| d[j] != 0) else {
            return 0;
        };
        let mut rest = d.to_vec();
        rest[j] = 0;
        let ej = unit(k, j);
        let ei = unit(k, i);
        let basis = match i.cmp(&j) {
            std::cmp::Ordering::Less => cvs.chi_basis(i, j),
            std::cmp::Ordering::Greater => cvs.chi_basis(j, i),
            std::cmp::Ordering::Equal => 0,
        };
        (chi_unit(cvs, i, &rest) + basis + cvs.alpha_raw(&rest, &ej, &ei)) % 2
    }

    #[test]
    fn octonion_values() {
        let o = Cvs::octonion();
        assert_eq!(o.eval_alpha(&e(3, 0, 2), &e(3, 1, 2), &e(3, 2, 2)).unwrap().value(), 1);
        assert_eq!(
            o.eval_alpha(&v(2, &[1, 1, 0]), &e(3, 1, 2), &e(3, 2, 2)).unwrap().value(),
            1
        );
        assert_eq!(o.eval_chi(&v(2, &[1, 1, 0]), &e(3, 2, 2)).unwrap().value(), 1);
        assert_eq!(o.eval_sigma(&v(2, &[1, 1, 0])).unwrap().value(), 1);
        assert_eq!(o.eval_sigma(&v(2, &[0, 0, 0])).unwrap().value(), 0);
        let all_ones = v(2, &[1, 1, 1]);
        for d in crate::algebra::all_vectors(&[2, 2, 2]).skip(1) {
            assert_eq!(o.eval_sigma(&d).unwrap().value(), 1);
            let want = if d == all_ones { 0 } else { 1 };
            assert_eq!(o.eval_chi(&all_ones, &d).unwrap().value(), want);
        }
    }

    #[test]
    fn construction_rules() {
        assert!(Cvs::new(2, 3, &[1, 1, 1], &[(0, 1, 1), (0, 2, 1), (1, 2, 1)], &[(0, 1, 2, 1)]).is_ok());
        assert!(matches!(
            Cvs::new(5, 3, &[0, 0, 0], &[], &[(0, 1, 2, 1)]),
            Err(Error::InvalidCvs(_))
        ));
        let one = Cvs::new(3, 1, &[1], &[], &[]).unwrap();
        assert_eq!(one.dim(), 1);
        assert!(matches!(Cvs::new(3, 2, &[0, 0], &[(1, 0, 1)], &[]), Err(Error::Index(_))));
        assert!(matches!(Cvs::new(3, 2, &[0, 0], &[(0, 5, 1)], &[]), Err(Error::Index(_))));
        assert!(matches!(Cvs::new(4, 1, &[0], &[], &[]), Err(Error::NotPrime(4))));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let o = Cvs::octonion();
        assert!(o.eval_sigma(&v(2, &[1, 1])).is_err());
        assert!(o.eval_chi(&v(3, &[1, 1, 0]), &v(2, &[1, 1, 0])).is_err());
    }

    #[test]
    fn closed_form_chi_matches_polarization_recursion() {
        for seed in 0..40 {
            let cvs = random_cvs(2, 4, seed).unwrap();
            let all: Vec<Vec<u32>> = cvs.vectors();
            for c in &all {
                for d in &all {
                    assert_eq!(cvs.chi_raw(c, d), chi_by_polarization(&cvs, c, d), "seed {seed}");
                }
            }
        }
    }

    #[test]
    fn radicals() {
        let o = Cvs::octonion();
        assert!(o.rad_chi().unwrap().is_empty());
        assert!(o.rad_alpha().unwrap().is_empty());
        assert_eq!(o.rad_chi_elements().unwrap().len(), 1);
        let line = Cvs::new(3, 1, &[1], &[], &[]).unwrap();
        assert_eq!(line.rad_chi().unwrap().len(), 1);
        assert_eq!(line.rad_alpha().unwrap().len(), 1);
    }

    #[test]
    fn adjoint_translate_examples() {
        let c = random_cvs(3, 3, 7).unwrap();
        let zero = FpVector::zero(&[3, 3, 3]);
        assert_eq!(c.adjoint_translate(&zero).unwrap(), c);
        for kv in crate::algebra::all_vectors(&[3, 3, 3]) {
            let there = c.adjoint_translate(&kv).unwrap();
            assert_eq!(there.adjoint_translate(&kv.neg()).unwrap(), c);
            assert_eq!(there.sigma_basis(), c.sigma_basis());
            assert_eq!(there.alpha_table(), c.alpha_table());
        }
        // chi(e2,e3) = 1 and alpha(e2,e1,e3) = -1, so translating by e1
        // kills the commutator form.
        let nc = Cvs::new(3, 3, &[0, 0, 0], &[(1, 2, 1)], &[(0, 1, 2, 1)]).unwrap();
        let t = nc.adjoint_translate(&e(3, 0, 3)).unwrap();
        assert!(t.chi_is_zero());
    }

    #[test]
    fn iso_examples() {
        let a = random_cvs(3, 3, 11).unwrap();
        let iso = iso_up_to_scalar(&a, &a).unwrap().unwrap();
        assert_eq!(iso.matrix, FpMatrix::identity(3, 3));
        assert_eq!(iso.scalar.value(), 1);

        let scaled = a.scaled(2);
        assert_ne!(scaled, a);
        let iso = iso_up_to_scalar(&a, &scaled).unwrap().unwrap();
        check_iso(&a, &scaled, &iso);

        let commutative = Cvs::new(3, 3, &[0, 0, 0], &[], &[(0, 1, 2, 1)]).unwrap();
        let noncommutative = Cvs::new(3, 3, &[0, 0, 0], &[(1, 2, 1)], &[(0, 1, 2, 1)]).unwrap();
        assert!(iso_up_to_scalar(&commutative, &noncommutative).unwrap().is_none());
    }

    fn check_iso(a: &Cvs, b: &Cvs, iso: &CvsIso) {
        let s = iso.scalar.value();
        let p = a.prime();
        let all = a.vectors();
        let img = |x: &Vec<u32>| {
            crate::algebra::mat_apply(&iso.matrix, &FpVector::uniform(p, &x.iter().map(|&t| t as i64).collect::<Vec<_>>()))
                .unwrap()
                .coords()
                .to_vec()
        };
        for c in &all {
            assert_eq!(b.sigma_raw(&img(c)), a.sigma_raw(c) * s % p);
            for d in &all {
                assert_eq!(b.chi_raw(&img(c), &img(d)), a.chi_raw(c, d) * s % p);
            }
        }
    }

    #[test]
    fn iso_is_symmetric_on_random_pairs() {
        for seed in 0..10 {
            let a = random_cvs(2, 3, seed).unwrap();
            let b = a.reversed_basis();
            let fwd = iso_up_to_scalar(&a, &b).unwrap().unwrap();
            check_iso(&a, &b, &fwd);
            let back = iso_up_to_scalar(&b, &a).unwrap().unwrap();
            check_iso(&b, &a, &back);
        }
    }

    #[test]
    fn random_cvs_is_deterministic() {
        assert_eq!(random_cvs(3, 4, 9).unwrap(), random_cvs(3, 4, 9).unwrap());
        assert!(random_cvs(5, 4, 9).unwrap().alpha_is_zero());
    }

    #[test]
    fn text_format() {
        let text = "cvs\n# octonions\np 2\ndim 3\nsigma 1 1\nsigma 2 1\nsigma 3 1\nchi 1 2 1\nchi 1 3 1\nchi 2 3 1\nalpha 1 2 3 1\n";
        let c = parse_cvs(text).unwrap();
        assert_eq!(c, Cvs::octonion());
        assert_eq!(parse_cvs(&c.emit()).unwrap(), c);
        let dup = parse_cvs("cvs\np 3\ndim 2\nchi 1 2 1\nchi 1 2 2\n");
        assert!(matches!(dup, Err(Error::Parse { line: 5, .. })));
        let order = parse_cvs("cvs\np 3\ndim 2\nchi 2 1 1\n");
        assert!(matches!(order, Err(Error::Parse { line: 4, .. })));
        let value = parse_cvs("cvs\np 3\ndim 2\nsigma 1 3\n");
        assert!(matches!(value, Err(Error::Parse { line: 4, column: 9, .. })));
        assert!(parse_cvs("cvs\np 5\ndim 3\nalpha 1 2 3 1\n").is_err());
        assert!(parse_cvs("cvs\nsigma 1 1\n").is_err());
    }
}
