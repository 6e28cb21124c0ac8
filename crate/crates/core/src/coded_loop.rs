//! Coded extensions: the class-2 loop `L` with central `Z` and `L/Z = C`
//! realizing a coded vector space, built by repeated semidirect central
//! products of cyclic pieces.
//!
//! An element is a pair `(z, v)`. The product is
//! `(z1, v1)(z2, v2) = (z1 + z2 + theta(v1, v2), v1 + v2)` where the cocycle
//! `theta` sums, over the splits `C = <x_1..x_{j-1}> + <x_j>`, the carry of
//! the cyclic piece `<x_j>` and the gluing term
//! `chi(e1,d2) + alpha(d1, e1-d2, e2) + 2 alpha(d1,e1,d2) - 2 alpha(e1,d2,e2)`.

use std::sync::atomic::{AtomicU8, Ordering};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{group_order, rank, unrank_into, FpVector, Residue};
use crate::cvs::{Cvs, ValidationBudget};
use crate::error::{Error, Result};
use crate::forms::{ChiMode, Forms};
use crate::table::{FiniteLoop, LoopTable};

/// Largest supported number of basis slots.
pub const MAX_DIM: usize = 32;

/// Cocycle tables are cached when `|C|` is at most this.
pub const THETA_CACHE_LIMIT: usize = 4096;

/// Default bound on the order of a loop turned into a table.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 13;

/// An element `z * x_1^{v_1}(x_2^{v_2}(...))` stored as `(z, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodedLoopElement {
    pub z: Residue,
    pub v: FpVector,
}

/// How the cocycle is computed.
#[derive(Clone, Debug)]
enum Cocycle {
    /// One cyclic piece per basis slot.
    Recursive,
    /// Semidirect central product of two loops on the first `d.dim()` and
    /// the remaining slots.
    Glued(Box<CodedLoop>, Box<CodedLoop>),
}

#[derive(Debug)]
pub struct CodedLoop {
    k: usize,
    /// Order of each basis slot.
    q: Vec<u32>,
    /// Order of `Z`.
    m: u32,
    /// `x_j^{q_j} = power[j]`.
    power: Vec<u32>,
    forms: Forms,
    /// Present when built from a coded vector space.
    cvs: Option<Cvs>,
    cocycle: Cocycle,
    kappa: Option<Vec<u32>>,
    perturb: Option<(usize, usize, u32)>,
    nc: usize,
    cache: OnceLock<Vec<AtomicU8>>,
}

impl Clone for CodedLoop {
    fn clone(&self) -> Self {
        CodedLoop {
            k: self.k,
            q: self.q.clone(),
            m: self.m,
            power: self.power.clone(),
            forms: self.forms.clone(),
            cvs: self.cvs.clone(),
            cocycle: self.cocycle.clone(),
            kappa: self.kappa.clone(),
            perturb: self.perturb,
            nc: self.nc,
            cache: OnceLock::new(),
        }
    }
}

impl CodedLoop {
    /// The coded extension of `cvs`. Only a light axiom check runs here;
    /// use [`Cvs::validate_axioms`] for a thorough one.
    pub fn build(cvs: &Cvs) -> Result<CodedLoop> {
        let budget = ValidationBudget {
            exhaustive_limit: 9,
            samples: 256,
            seed: 0,
        };
        let report = cvs.validate_axioms(&budget);
        if let Some(f) = report.failure {
            return Err(Error::InvalidCvs(format!("{} fails", f.axiom)));
        }
        let k = cvs.dim();
        if k > MAX_DIM {
            return Err(Error::Budget(format!("dimension {k} exceeds {MAX_DIM}")));
        }
        let p = cvs.prime();
        Ok(CodedLoop::from_parts(
            vec![p; k],
            p,
            cvs.sigma_basis().to_vec(),
            cvs_forms(cvs),
            Some(cvs.clone()),
        ))
    }

    pub(crate) fn from_parts(q: Vec<u32>, m: u32, power: Vec<u32>, forms: Forms, cvs: Option<Cvs>) -> CodedLoop {
        let nc = group_order(&q);
        CodedLoop {
            k: q.len(),
            q,
            m,
            power,
            forms,
            cvs,
            cocycle: Cocycle::Recursive,
            kappa: None,
            perturb: None,
            nc,
            cache: OnceLock::new(),
        }
    }

    pub fn cvs(&self) -> Option<&Cvs> {
        self.cvs.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn slot_orders(&self) -> &[u32] {
        &self.q
    }

    pub fn z_order(&self) -> u32 {
        self.m
    }

    /// `|C|`.
    pub fn quotient_order(&self) -> usize {
        self.nc
    }

    pub fn kappa(&self) -> Option<&[u32]> {
        self.kappa.as_deref()
    }

    pub fn identity_element(&self) -> CodedLoopElement {
        self.element(0, &vec![0; self.k]).unwrap()
    }

    /// `z^a` as an element.
    pub fn central(&self, a: i64) -> CodedLoopElement {
        self.element(a, &vec![0; self.k]).unwrap()
    }

    /// The basis element `x_i` (0-based).
    pub fn generator(&self, i: usize) -> Result<CodedLoopElement> {
        if i >= self.k {
            return Err(Error::Index(format!("generator {} of {}", i + 1, self.k)));
        }
        let mut v = vec![0; self.k];
        v[i] = 1;
        self.element(0, &v)
    }

    pub fn element(&self, z: i64, v: &[i64]) -> Result<CodedLoopElement> {
        Ok(CodedLoopElement {
            z: Residue::new(z, self.m),
            v: FpVector::new(v, &self.q)?,
        })
    }

    fn check(&self, a: &CodedLoopElement) -> Result<()> {
        if a.z.modulus() != self.m || a.v.moduli() != self.q.as_slice() {
            return Err(Error::Dimension {
                expected: self.k,
                got: a.v.dim(),
            });
        }
        Ok(())
    }

    pub fn index_of(&self, a: &CodedLoopElement) -> usize {
        a.z.value() as usize * self.nc + rank(a.v.coords(), &self.q)
    }

    pub fn element_at(&self, index: usize) -> CodedLoopElement {
        let mut v = vec![0u32; self.k];
        unrank_into(index % self.nc, &self.q, &mut v);
        CodedLoopElement {
            z: Residue::new((index / self.nc) as i64, self.m),
            v: FpVector::from_raw(v, self.q.clone()),
        }
    }

    /// The recursive cocycle without cache, isotope twist or perturbation.
    fn theta_plain(&self, u: &[u32], w: &[u32]) -> u32 {
        match &self.cocycle {
            Cocycle::Recursive => theta_recursive(&self.q, self.m, &self.power, &self.forms, u, w),
            Cocycle::Glued(d, e) => {
                let kd = d.k;
                let m = self.m as u64;
                let mut acc = d.theta(&u[..kd], &w[..kd]) as u64 + e.theta(&u[kd..], &w[kd..]) as u64;
                let mut d1 = vec![0u32; self.k];
                let mut d2 = vec![0u32; self.k];
                let mut e1 = vec![0u32; self.k];
                let mut e2 = vec![0u32; self.k];
                d1[..kd].copy_from_slice(&u[..kd]);
                d2[..kd].copy_from_slice(&w[..kd]);
                e1[kd..].copy_from_slice(&u[kd..]);
                e2[kd..].copy_from_slice(&w[kd..]);
                acc += gluing_term(&self.forms, &self.q, &d1, &e1, &d2, &e2) as u64;
                (acc % m) as u32
            }
        }
    }

    /// Full cocycle: the z-part of `(0,u)(0,w)`.
    pub(crate) fn theta(&self, u: &[u32], w: &[u32]) -> u32 {
        let mut t = self.theta_plain(u, w) as u64;
        if let Some(k) = &self.kappa {
            t += self.forms.eval_alpha(u, k, w) as u64;
        }
        if let Some((ru, rw, delta)) = self.perturb {
            if rank(u, &self.q) == ru && rank(w, &self.q) == rw {
                t += delta as u64;
            }
        }
        (t % self.m as u64) as u32
    }

    fn theta_by_rank(&self, ru: usize, rw: usize) -> u32 {
        let compute = || {
            let mut u = [0u32; MAX_DIM];
            let mut w = [0u32; MAX_DIM];
            unrank_into(ru, &self.q, &mut u[..self.k]);
            unrank_into(rw, &self.q, &mut w[..self.k]);
            self.theta(&u[..self.k], &w[..self.k])
        };
        if self.nc > THETA_CACHE_LIMIT || self.m > 254 {
            return compute();
        }
        let cache = self
            .cache
            .get_or_init(|| (0..self.nc * self.nc).map(|_| AtomicU8::new(0)).collect());
        let slot = &cache[ru * self.nc + rw];
        match slot.load(Ordering::Relaxed) {
            0 => {
                let t = compute();
                // every writer stores the same value
                slot.store(t as u8 + 1, Ordering::Relaxed);
                t
            }
            s => (s - 1) as u32,
        }
    }

    /// `theta(u, w)` as a value in `Z`.
    pub fn cocycle(&self, u: &FpVector, w: &FpVector) -> Result<Residue> {
        if u.moduli() != self.q.as_slice() || w.moduli() != self.q.as_slice() {
            return Err(Error::Dimension {
                expected: self.k,
                got: u.dim(),
            });
        }
        Ok(Residue::new(self.theta(u.coords(), w.coords()) as i64, self.m))
    }

    fn add_ranks(&self, ra: usize, rb: usize) -> usize {
        let mut u = [0u32; MAX_DIM];
        let mut w = [0u32; MAX_DIM];
        unrank_into(ra, &self.q, &mut u[..self.k]);
        unrank_into(rb, &self.q, &mut w[..self.k]);
        let mut idx = 0usize;
        for i in 0..self.k {
            let q = self.q[i];
            let s = u[i] + w[i];
            idx = idx * q as usize + if s >= q { s - q } else { s } as usize;
        }
        idx
    }

    fn neg_rank(&self, r: usize) -> usize {
        let mut u = [0u32; MAX_DIM];
        unrank_into(r, &self.q, &mut u[..self.k]);
        for i in 0..self.k {
            u[i] = (self.q[i] - u[i]) % self.q[i];
        }
        rank(&u[..self.k], &self.q)
    }

    pub fn mul(&self, a: &CodedLoopElement, b: &CodedLoopElement) -> Result<CodedLoopElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element_at(self.mul_index(self.index_of(a), self.index_of(b))))
    }

    pub fn inv(&self, a: &CodedLoopElement) -> Result<CodedLoopElement> {
        self.check(a)?;
        Ok(self.element_at(self.inv_index(self.index_of(a))))
    }

    /// `a^n` with `a^0 = 1`, `a^{n+1} = a a^n`; negative `n` uses the inverse.
    pub fn pow(&self, a: &CodedLoopElement, n: i64) -> Result<CodedLoopElement> {
        self.check(a)?;
        Ok(self.element_at(self.pow_index(self.index_of(a), n)))
    }

    /// `[a,b] = (ba)^-1 (ab)`.
    pub fn commutator(&self, a: &CodedLoopElement, b: &CodedLoopElement) -> Result<CodedLoopElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.element_at(crate::analysis::commutator(self, self.index_of(a), self.index_of(b))))
    }

    /// `[a,b,c] = (a(bc))^-1 ((ab)c)`.
    pub fn associator(
        &self,
        a: &CodedLoopElement,
        b: &CodedLoopElement,
        c: &CodedLoopElement,
    ) -> Result<CodedLoopElement> {
        self.check(a)?;
        self.check(b)?;
        self.check(c)?;
        Ok(self.element_at(crate::analysis::associator(
            self,
            self.index_of(a),
            self.index_of(b),
            self.index_of(c),
        )))
    }

    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        let nc = self.nc;
        let (za, ra) = (a / nc, a % nc);
        let (zb, rb) = (b / nc, b % nc);
        let t = self.theta_by_rank(ra, rb) as usize;
        let z = (za + zb + t) % self.m as usize;
        z * nc + self.add_ranks(ra, rb)
    }

    pub fn inv_index(&self, a: usize) -> usize {
        let nc = self.nc;
        let (za, ra) = (a / nc, a % nc);
        let rn = self.neg_rank(ra);
        let t = self.theta_by_rank(ra, rn) as usize;
        let m = self.m as usize;
        let z = (2 * m - za - t) % m;
        z * nc + rn
    }

    pub fn pow_index(&self, a: usize, n: i64) -> usize {
        // a^n depends only on n modulo the exponent, which divides max(q) * m
        let e = *self.q.iter().max().unwrap_or(&1) as i64 * self.m as i64;
        let (base, n) = if n < 0 { (self.inv_index(a), (-n) % e) } else { (a, n % e) };
        let mut acc = 0usize;
        for _ in 0..n {
            acc = self.mul_index(base, acc);
        }
        acc
    }

    pub fn order(&self) -> usize {
        self.nc * self.m as usize
    }

    /// The loop with product `a o b = ab * z^{alpha(a, kappa, b)}`.
    pub fn kappa_isotope(&self, kappa: &FpVector) -> Result<CodedLoop> {
        if kappa.moduli() != self.q.as_slice() {
            return Err(Error::Dimension {
                expected: self.k,
                got: kappa.dim(),
            });
        }
        let mut out = self.clone();
        let mut k = out.kappa.take().unwrap_or_else(|| vec![0; self.k]);
        for (slot, (&x, &q)) in k.iter_mut().zip(kappa.coords().iter().zip(&self.q)) {
            *slot = (*slot + x) % q;
        }
        out.kappa = if k.iter().all(|&x| x == 0) { None } else { Some(k) };
        Ok(out)
    }

    /// Adds `delta` to one cocycle value. Exists to exercise the verifier.
    #[doc(hidden)]
    pub fn with_perturbed_cocycle(&self, u: &FpVector, w: &FpVector, delta: u32) -> CodedLoop {
        let mut out = self.clone();
        out.perturb = Some((u.rank(), w.rank(), delta % self.m));
        out
    }

    pub fn to_table(&self) -> Result<LoopTable> {
        self.to_table_with_budget(DEFAULT_TABLE_BUDGET)
    }

    /// Cayley table with element index `z * |C| + rank(v)`.
    pub fn to_table_with_budget(&self, max_order: usize) -> Result<LoopTable> {
        let n = self.order();
        if n > max_order {
            return Err(Error::Budget(format!("loop order {n} exceeds table budget {max_order}")));
        }
        let t = LoopTable::from_fn(n, |a, b| self.mul_index(a, b))?;
        Ok(match &self.cvs {
            Some(c) => t.with_meta(c.prime(), c.dim()),
            None => t,
        })
    }

    /// Checks `a^q = sigma`, `[a,b] = chi` and `[a,b,c] = alpha` on
    /// representatives `(0, v)`. For coded vector spaces the power law is
    /// checked on every vector; for modules on basis slots. On a
    /// `kappa`-isotope the expected commutator is `chi(c,d) - alpha(c,kappa,d)`.
    pub fn verify_coded_extension(&self, budget: &ExtensionBudget) -> ExtensionReport {
        let nc = self.nc;
        let exhaustive = nc <= budget.exhaustive_limit;
        let vec_of = |r: usize| {
            let mut v = vec![0u32; self.k];
            unrank_into(r, &self.q, &mut v);
            v
        };
        let z_of = |idx: usize| -> Option<u32> {
            if idx % nc == 0 {
                Some((idx / nc) as u32)
            } else {
                None
            }
        };
        let fail = |law: &'static str, w: &[usize], checks: usize| ExtensionReport {
            exhaustive,
            checks,
            failure: Some(ExtensionFailure {
                law,
                witness: w.iter().map(|&r| self.element_at(r)).collect(),
            }),
        };
        let mut checks = 0;
        let power_ok = |r: usize| -> bool {
            let v = vec_of(r);
            if let Some(c) = &self.cvs {
                return z_of(self.pow_index(r, c.prime() as i64)) == Some(c.sigma_raw(&v));
            }
            // module: only basis slots carry a prescribed power
            let support: Vec<usize> = (0..v.len()).filter(|&j| v[j] != 0).collect();
            match support[..] {
                [j] if v[j] == 1 => z_of(self.pow_index(r, self.q[j] as i64)) == Some(self.power[j]),
                _ => true,
            }
        };
        let m = self.m;
        let comm_ok = |a: usize, b: usize| -> bool {
            let (u, w) = (vec_of(a), vec_of(b));
            let mut want = self.forms.eval_chi(&u, &w);
            if let Some(k) = &self.kappa {
                want = (want + m - self.forms.eval_alpha(&u, k, &w)) % m;
            }
            z_of(crate::analysis::commutator(self, a, b)) == Some(want)
        };
        let assoc_ok = |a: usize, b: usize, c: usize| -> bool {
            z_of(crate::analysis::associator(self, a, b, c))
                == Some(self.forms.eval_alpha(&vec_of(a), &vec_of(b), &vec_of(c)))
        };
        if exhaustive {
            for a in 0..nc {
                checks += 1;
                if !power_ok(a) {
                    return fail("power", &[a], checks);
                }
            }
            for a in 0..nc {
                for b in 0..nc {
                    checks += 1;
                    if !comm_ok(a, b) {
                        return fail("commutator", &[a, b], checks);
                    }
                }
            }
            for a in 0..nc {
                for b in 0..nc {
                    for c in 0..nc {
                        checks += 1;
                        if !assoc_ok(a, b, c) {
                            return fail("associator", &[a, b, c], checks);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            for _ in 0..budget.samples {
                let (a, b, c) = (rng.gen_range(0..nc), rng.gen_range(0..nc), rng.gen_range(0..nc));
                checks += 1;
                if !power_ok(a) {
                    return fail("power", &[a], checks);
                }
                if !comm_ok(a, b) {
                    return fail("commutator", &[a, b], checks);
                }
                if !assoc_ok(a, b, c) {
                    return fail("associator", &[a, b, c], checks);
                }
            }
        }
        ExtensionReport {
            exhaustive,
            checks,
            failure: None,
        }
    }

    /// Glues coded extensions of two independent sub-spaces of `ambient`.
    /// `embed_d[i]` is the image of the `i`-th basis vector of `d`, likewise
    /// for `e`. The result is a coded extension of the span, written in the
    /// basis `embed_d ++ embed_e`.
    pub fn semidirect_central_product(
        d: &CodedLoop,
        e: &CodedLoop,
        ambient: &Cvs,
        embed_d: &[FpVector],
        embed_e: &[FpVector],
    ) -> Result<CodedLoop> {
        let (Some(dc), Some(ec)) = (d.cvs(), e.cvs()) else {
            return Err(Error::Unsupported("gluing needs loops built from coded vector spaces".into()));
        };
        if d.kappa.is_some() || e.kappa.is_some() {
            return Err(Error::Unsupported("gluing isotopes".into()));
        }
        let p = ambient.prime();
        if dc.prime() != p || ec.prime() != p {
            return Err(Error::InvalidCvs("pieces and ambient space differ in p".into()));
        }
        if embed_d.len() != dc.dim() || embed_e.len() != ec.dim() {
            return Err(Error::Dimension {
                expected: dc.dim() + ec.dim(),
                got: embed_d.len() + embed_e.len(),
            });
        }
        let images: Vec<Vec<u32>> = embed_d
            .iter()
            .chain(embed_e)
            .map(|v| {
                if v.moduli() != ambient.moduli().as_slice() {
                    Err(Error::Dimension {
                        expected: ambient.dim(),
                        got: v.dim(),
                    })
                } else {
                    Ok(v.coords().to_vec())
                }
            })
            .collect::<Result<_>>()?;
        let as_vectors: Vec<FpVector> = embed_d.iter().chain(embed_e).cloned().collect();
        if crate::cvs::greedy_basis(p, &as_vectors).len() != as_vectors.len() {
            return Err(Error::InvalidCvs("embedded pieces are not linearly independent".into()));
        }
        let span = ambient.pullback(&images, 1);
        let kd = dc.dim();
        let restrict_d: Vec<Vec<u32>> = (0..kd).map(|i| crate::cvs::unit(span.dim(), i)).collect();
        let restrict_e: Vec<Vec<u32>> = (kd..span.dim()).map(|i| crate::cvs::unit(span.dim(), i)).collect();
        if &restrict(&span, &restrict_d) != dc {
            return Err(Error::InvalidCvs("restriction to the first piece differs from its space".into()));
        }
        if &restrict(&span, &restrict_e) != ec {
            return Err(Error::InvalidCvs("restriction to the second piece differs from its space".into()));
        }
        let k = span.dim();
        let mut out = CodedLoop::from_parts(vec![p; k], p, span.sigma_basis().to_vec(), cvs_forms(&span), Some(span));
        out.cocycle = Cocycle::Glued(Box::new(d.clone()), Box::new(e.clone()));
        Ok(out)
    }
}

fn restrict(cvs: &Cvs, images: &[Vec<u32>]) -> Cvs {
    let k = images.len();
    let sigma: Vec<u32> = images.iter().map(|x| cvs.sigma_raw(x)).collect();
    let chi: Vec<u32> = crate::cvs::pair_indices(k)
        .into_iter()
        .map(|(i, j)| cvs.chi_raw(&images[i], &images[j]))
        .collect();
    let alpha: Vec<u32> = crate::cvs::triple_indices(k)
        .into_iter()
        .map(|(i, j, l)| cvs.alpha_raw(&images[i], &images[j], &images[l]))
        .collect();
    Cvs::from_tables(cvs.prime(), k, &sigma, &chi, &alpha).expect("restriction of a valid space")
}

pub(crate) fn cvs_forms(cvs: &Cvs) -> Forms {
    let k = cvs.dim();
    let mode = if cvs.prime() == 2 {
        ChiMode::Polarized
    } else {
        ChiMode::Bilinear
    };
    Forms::new(
        k,
        cvs.prime(),
        mode,
        crate::cvs::pair_indices(k)
            .into_iter()
            .map(|(i, j)| (i, j, cvs.chi_basis(i, j))),
        crate::cvs::triple_indices(k)
            .into_iter()
            .map(|(i, j, l)| (i, j, l, cvs.alpha_basis(i, j, l))),
    )
}

/// `chi(e1,d2) + alpha(d1, e1-d2, e2) + 2 alpha(d1,e1,d2) - 2 alpha(e1,d2,e2)`
pub(crate) fn gluing_term(f: &Forms, q: &[u32], d1: &[u32], e1: &[u32], d2: &[u32], e2: &[u32]) -> u32 {
    let m = f.m as u64;
    let diff: Vec<u32> = e1
        .iter()
        .zip(d2)
        .zip(q)
        .map(|((&a, &b), &q)| (a + q - b) % q)
        .collect();
    let mut acc = f.eval_chi(e1, d2) as u64;
    acc += f.eval_alpha(d1, &diff, e2) as u64;
    acc += 2 * f.eval_alpha(d1, e1, d2) as u64;
    acc += (m - f.eval_alpha(e1, d2, e2) as u64) * 2;
    (acc % m) as u32
}

/// The cocycle of the slot-by-slot construction. With `e1 = a x_j`,
/// `e2 = b x_j` the gluing term at slot `j` reduces to
/// `a chi(x_j, d2) - (b + 2a) alpha(d1, d2, x_j)`.
pub(crate) fn theta_recursive(q: &[u32], m: u32, power: &[u32], f: &Forms, u: &[u32], w: &[u32]) -> u32 {
    let m64 = m as u64;
    let mut acc: u64 = 0;
    for j in 0..q.len() {
        let (a, b) = (u[j], w[j]);
        if a + b >= q[j] {
            acc += power[j] as u64;
        }
        if a != 0 {
            acc += a as u64 * f.chi_unit_prefix(j, w) as u64 % m64;
        }
        let coef = (b as u64 + 2 * a as u64) % m64;
        if coef != 0 && j >= 2 {
            let t = f.alpha_prefix(u, w, j) as u64;
            acc += m64 - coef * t % m64;
        }
    }
    (acc % m64) as u32
}

/// Limits for [`CodedLoop::verify_coded_extension`].
#[derive(Clone, Debug)]
pub struct ExtensionBudget {
    /// Exhaustive when `|C|` is at most this.
    pub exhaustive_limit: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ExtensionBudget {
    fn default() -> Self {
        ExtensionBudget {
            exhaustive_limit: 729,
            samples: 100_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionFailure {
    /// `power`, `commutator` or `associator`.
    pub law: &'static str,
    pub witness: Vec<CodedLoopElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub exhaustive: bool,
    pub checks: usize,
    pub failure: Option<ExtensionFailure>,
}

impl ExtensionReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl FiniteLoop for CodedLoop {
    fn order(&self) -> usize {
        CodedLoop::order(self)
    }

    fn identity(&self) -> usize {
        0
    }

    #[inline]
    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_index(a, b)
    }

    fn inv(&self, a: usize) -> usize {
        self.inv_index(a)
    }

    /// Moufang loops have the inverse property: `a \ b = a^-1 b`.
    fn ldiv(&self, a: usize, b: usize) -> usize {
        self.mul_index(self.inv_index(a), b)
    }

    fn rdiv(&self, b: usize, a: usize) -> usize {
        self.mul_index(b, self.inv_index(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvs::random_cvs;

    fn octonions() -> CodedLoop {
        CodedLoop::build(&Cvs::octonion()).unwrap()
    }

    /// The gluing term evaluated on full vectors at every split.
    fn theta_literal(l: &CodedLoop, u: &[u32], w: &[u32]) -> u32 {
        let k = l.k;
        let mut acc = 0u64;
        for j in 0..k {
            let mut d1 = vec![0; k];
            let mut d2 = vec![0; k];
            d1[..j].copy_from_slice(&u[..j]);
            d2[..j].copy_from_slice(&w[..j]);
            let mut e1 = vec![0; k];
            let mut e2 = vec![0; k];
            e1[j] = u[j];
            e2[j] = w[j];
            acc += gluing_term(&l.forms, &l.q, &d1, &e1, &d2, &e2) as u64;
            acc += (u[j] + w[j]) as u64 / l.q[j] as u64 * l.power[j] as u64;
        }
        (acc % l.m as u64) as u32
    }

    /// The per-prime simplifications of the gluing term.
    fn gluing_specialized(cvs: &Cvs, d1: &[u32], e1: &[u32], d2: &[u32], e2: &[u32]) -> u32 {
        let p = cvs.prime();
        let sub = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(&x, &y)| (x + p - y) % p).collect() };
        let add = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(&x, &y)| (x + y) % p).collect() };
        let chi = cvs.chi_raw(e1, d2);
        match p {
            2 => (chi + cvs.alpha_raw(d1, &add(e1, d2), e2)) % 2,
            3 => {
                (chi + cvs.alpha_raw(d1, &sub(e1, d2), e2) + 2 * cvs.alpha_raw(d1, e1, d2) + cvs.alpha_raw(e1, d2, e2))
                    % 3
            }
            _ => chi,
        }
    }

    #[test]
    fn octonion_basics() {
        let l = octonions();
        assert_eq!(l.order(), 16);
        let x1 = l.generator(0).unwrap();
        let x2 = l.generator(1).unwrap();
        let x3 = l.generator(2).unwrap();
        let z = l.central(1);
        assert_eq!(l.mul(&x1, &x1).unwrap(), z);
        let left = l.mul(&l.mul(&x1, &x2).unwrap(), &x3).unwrap();
        let right = l.mul(&x1, &l.mul(&x2, &x3).unwrap()).unwrap();
        assert_ne!(left, right);
        assert_eq!(left.v, right.v);
        assert_eq!((left.z - right.z).value(), 1);
        assert_eq!(l.associator(&x1, &x2, &x3).unwrap(), z);
        assert_eq!(l.commutator(&x1, &x2).unwrap(), z);
        assert_eq!(l.commutator(&x1, &x1).unwrap(), l.identity_element());
        assert_eq!(l.inv(&x1).unwrap(), l.mul(&z, &x1).unwrap());
        assert_eq!(l.inv(&l.identity_element()).unwrap(), l.identity_element());
        let id = l.identity_element();
        assert_eq!(l.mul(&x2, &id).unwrap(), x2);
    }

    #[test]
    fn small_builds() {
        let trivial = CodedLoop::build(&Cvs::new(3, 0, &[], &[], &[]).unwrap()).unwrap();
        assert_eq!(trivial.order(), 3);
        let t = trivial.to_table().unwrap();
        assert_eq!(t.entries(), &[0, 1, 2, 1, 2, 0, 2, 0, 1]);

        let l = CodedLoop::build(&Cvs::new(3, 1, &[1], &[], &[]).unwrap()).unwrap();
        assert_eq!(l.order(), 9);
        let x = l.generator(0).unwrap();
        // cyclic of order 9: x generates
        let mut seen = std::collections::HashSet::new();
        for n in 0..9 {
            seen.insert(l.pow(&x, n).unwrap());
        }
        assert_eq!(seen.len(), 9);
        assert_eq!(l.pow(&x, 3).unwrap(), l.central(1));
    }

    #[test]
    fn powers_match_sigma() {
        for seed in 0..6 {
            for p in [2u32, 3, 5] {
                let c = random_cvs(p, 3, seed).unwrap();
                let l = CodedLoop::build(&c).unwrap();
                for v in crate::algebra::all_vectors(&c.moduli()) {
                    let a = CodedLoopElement {
                        z: Residue::new(seed as i64, p),
                        v: v.clone(),
                    };
                    let want = c.eval_sigma(&v).unwrap();
                    assert_eq!(l.pow(&a, p as i64).unwrap(), l.central(want.value() as i64));
                    let b = l.inv(&a).unwrap();
                    assert_eq!(l.mul(&a, &b).unwrap(), l.identity_element());
                    assert_eq!(l.mul(&b, &a).unwrap(), l.identity_element());
                    assert_eq!(l.pow(&a, -1).unwrap(), b);
                }
            }
        }
    }

    #[test]
    fn recursive_cocycle_matches_literal_gluing_terms() {
        for seed in 0..8 {
            for p in [2u32, 3, 5] {
                let c = random_cvs(p, 4, seed).unwrap();
                let l = CodedLoop::build(&c).unwrap();
                let all: Vec<Vec<u32>> = crate::algebra::all_vectors(&c.moduli())
                    .map(|v| v.coords().to_vec())
                    .collect();
                for (i, u) in all.iter().enumerate().step_by(3) {
                    for w in all.iter().skip(i % 5).step_by(2) {
                        assert_eq!(l.theta(u, w), theta_literal(&l, u, w));
                    }
                }
            }
        }
    }

    #[test]
    fn general_gluing_term_matches_specializations() {
        for p in [2u32, 3, 5] {
            for seed in 0..4 {
                let c = random_cvs(p, 3, seed).unwrap();
                let f = cvs_forms(&c);
                let q = c.moduli();
                let all: Vec<Vec<u32>> = crate::algebra::all_vectors(&q).map(|v| v.coords().to_vec()).collect();
                // D = <x1,x2>, E = <x3>
                let split = |v: &Vec<u32>| (vec![v[0], v[1], 0], vec![0, 0, v[2]]);
                for u in &all {
                    for w in &all {
                        let (d1, e1) = split(u);
                        let (d2, e2) = split(w);
                        assert_eq!(
                            gluing_term(&f, &q, &d1, &e1, &d2, &e2),
                            gluing_specialized(&c, &d1, &e1, &d2, &e2)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn verification_passes_and_catches_corruption() {
        let l = octonions();
        let r = l.verify_coded_extension(&ExtensionBudget::default());
        assert!(r.passed() && r.exhaustive);
        for p in [2u32, 3] {
            for k in 0..=3 {
                for seed in 0..3 {
                    let l = CodedLoop::build(&random_cvs(p, k, seed).unwrap()).unwrap();
                    assert!(l.verify_coded_extension(&ExtensionBudget::default()).passed());
                }
            }
        }
        let q = [2, 2, 2];
        let bad = l.with_perturbed_cocycle(&FpVector::basis(&q, 0), &FpVector::basis(&q, 1), 1);
        let r = bad.verify_coded_extension(&ExtensionBudget::default());
        let f = r.failure.expect("corruption detected");
        assert!(!f.witness.is_empty());
    }

    #[test]
    fn gluing_three_lines_gives_octonions() {
        let o = Cvs::octonion();
        let line = Cvs::new(2, 1, &[1], &[], &[]).unwrap();
        let piece = CodedLoop::build(&line).unwrap();
        let q = [2, 2, 2];
        let e = |i| FpVector::basis(&q, i);
        let ambient12 = o.clone();
        let two = CodedLoop::semidirect_central_product(&piece, &piece, &ambient12, &[e(0)], &[e(1)]).unwrap();
        let three = CodedLoop::semidirect_central_product(&two, &piece, &o, &[e(0), e(1)], &[e(2)]).unwrap();
        let direct = octonions();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(three.mul_index(a, b), direct.mul_index(a, b));
            }
        }
        // dependent embeddings are rejected
        assert!(CodedLoop::semidirect_central_product(&piece, &piece, &o, &[e(0)], &[e(0)]).is_err());
        // restricted forms must match
        let zero_line = CodedLoop::build(&Cvs::new(2, 1, &[0], &[], &[]).unwrap()).unwrap();
        assert!(CodedLoop::semidirect_central_product(&zero_line, &piece, &o, &[e(0)], &[e(1)]).is_err());
    }

    #[test]
    fn gluing_with_trivial_piece() {
        let c = random_cvs(3, 2, 5).unwrap();
        let d = CodedLoop::build(&c).unwrap();
        let empty = CodedLoop::build(&Cvs::new(3, 0, &[], &[], &[]).unwrap()).unwrap();
        let q = [3, 3];
        let g = CodedLoop::semidirect_central_product(&d, &empty, &c, &[FpVector::basis(&q, 0), FpVector::basis(&q, 1)], &[])
            .unwrap();
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(g.mul_index(a, b), d.mul_index(a, b));
            }
        }
    }

    #[test]
    fn central_product_when_cross_terms_vanish() {
        // chi and alpha vanish across the pieces: the product is the
        // ordinary central product, so (0,d,0)(0,0,e) needs no correction
        let c = Cvs::new(3, 2, &[1, 1], &[], &[]).unwrap();
        let line = CodedLoop::build(&Cvs::new(3, 1, &[1], &[], &[]).unwrap()).unwrap();
        let q = [3, 3];
        let g = CodedLoop::semidirect_central_product(&line, &line, &c, &[FpVector::basis(&q, 0)], &[FpVector::basis(&q, 1)])
            .unwrap();
        for a in 0..27 {
            for b in 0..27 {
                assert_eq!(g.mul_index(a, b), g.mul_index(b, a));
            }
        }
    }

    #[test]
    fn kappa_isotope_examples() {
        let c = random_cvs(3, 3, 2).unwrap();
        let l = CodedLoop::build(&c).unwrap();
        let zero = FpVector::zero(&[3, 3, 3]);
        let same = l.kappa_isotope(&zero).unwrap();
        for a in 0..81 {
            for b in 0..81 {
                assert_eq!(same.mul_index(a, b), l.mul_index(a, b));
            }
        }
        let k = FpVector::uniform(3, &[1, 2, 0]);
        let iso = l.kappa_isotope(&k).unwrap();
        let back = iso.kappa_isotope(&k.neg()).unwrap();
        assert!(back.kappa().is_none());
    }

    #[test]
    fn table_indexing() {
        let l = octonions();
        let t = l.to_table().unwrap();
        assert_eq!(t.order(), 16);
        assert_eq!(t.meta(), Some((2, 3)));
        let x = l.element(1, &[1, 0, 1]).unwrap();
        assert_eq!(l.index_of(&x), 8 + 5);
        assert_eq!(l.element_at(13), x);
        assert!(l.to_table_with_budget(8).is_err());
    }
}
