//! Independent check of the form identities on evaluated values.
//!
//! Works for coded vector spaces and coded modules alike: vectors are
//! mixed-radix, values live in a cyclic group of order `m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{group_order, unrank_into, FpVector};
use crate::cvs::{AxiomFailure, AxiomReport, Cvs, ValidationBudget};

pub(crate) trait FormOracle {
    fn moduli(&self) -> Vec<u32>;
    fn value_modulus(&self) -> u32;
    /// `None` when the object carries no power form.
    fn sigma(&self, c: &[u32]) -> Option<u32>;
    fn chi(&self, c: &[u32], d: &[u32]) -> u32;
    fn alpha(&self, c: &[u32], d: &[u32], e: &[u32]) -> u32;
    /// Whether the power form polarizes to the commutator form.
    fn sigma_polarizes(&self) -> bool;
}

impl FormOracle for Cvs {
    fn moduli(&self) -> Vec<u32> {
        Cvs::moduli(self)
    }
    fn value_modulus(&self) -> u32 {
        self.prime()
    }
    fn sigma(&self, c: &[u32]) -> Option<u32> {
        Some(self.sigma_raw(c))
    }
    fn chi(&self, c: &[u32], d: &[u32]) -> u32 {
        self.chi_raw(c, d)
    }
    fn alpha(&self, c: &[u32], d: &[u32], e: &[u32]) -> u32 {
        self.alpha_raw(c, d, e)
    }
    fn sigma_polarizes(&self) -> bool {
        self.prime() == 2
    }
}

pub(crate) fn validate(cvs: &Cvs, budget: &ValidationBudget) -> AxiomReport {
    validate_forms(cvs, budget)
}

struct Checker<'a, S: FormOracle> {
    s: &'a S,
    moduli: Vec<u32>,
    m: u32,
    basis: Vec<Vec<u32>>,
}

impl<S: FormOracle> Checker<'_, S> {
    fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &q)| (x + y) % q)
            .collect()
    }

    fn scale(&self, a: &[u32], n: u32) -> Vec<u32> {
        a.iter()
            .zip(&self.moduli)
            .map(|(&x, &q)| ((x as u64 * n as u64) % q as u64) as u32)
            .collect()
    }

    fn mulv(&self, v: u32, n: u32) -> u32 {
        ((v as u64 * n as u64) % self.m as u64) as u32
    }

    fn negv(&self, v: u32) -> u32 {
        (self.m - v) % self.m
    }

    /// Checks every identity on the tuple `(c, d, e)`; the additive identity
    /// in the first slot of `alpha` also uses each `f` in `extra`.
    fn check(&self, c: &[u32], d: &[u32], e: &[u32], extra: &[Vec<u32>]) -> Option<(&'static str, Vec<Vec<u32>>)> {
        let s = self.s;
        let m = self.m;
        let w2 = |name, x: &[u32], y: &[u32]| Some((name, vec![x.to_vec(), y.to_vec()]));
        let w3 = |name, x: &[u32], y: &[u32], z: &[u32]| Some((name, vec![x.to_vec(), y.to_vec(), z.to_vec()]));
        let exponent = *self.moduli.iter().max().unwrap_or(&1);
        let cd = self.add(c, d);

        if let Some(sc) = s.sigma(c) {
            for n in 0..=exponent {
                if s.sigma(&self.scale(c, n)) != Some(self.mulv(sc, n)) {
                    return Some(("sigma-power", vec![c.to_vec()]));
                }
            }
            let sd = s.sigma(d).unwrap();
            let mut want = (sc + sd) % m;
            if s.sigma_polarizes() {
                want = (want + s.chi(c, d)) % m;
            }
            if s.sigma(&cd) != Some(want) {
                return w2("sigma-additivity", c, d);
            }
        }

        if s.chi(c, c) != 0 {
            return w2("chi-alternating", c, c);
        }
        let chi_cd = s.chi(c, d);
        if chi_cd != self.negv(s.chi(d, c)) {
            return w2("chi-skew", c, d);
        }
        for n in 0..=exponent {
            if s.chi(&self.scale(c, n), d) != self.mulv(chi_cd, n) {
                return w2("chi-power", c, d);
            }
        }
        let a_cde = s.alpha(c, d, e);
        let want = (s.chi(c, e) + s.chi(d, e) + self.mulv(a_cde, 3)) % m;
        if s.chi(&cd, e) != want {
            return w3("chi-polarization", c, d, e);
        }

        if s.alpha(c, d, d) != 0 || s.alpha(d, c, d) != 0 || s.alpha(d, d, c) != 0 {
            return w2("alpha-alternating", c, d);
        }
        if a_cde != self.negv(s.alpha(d, c, e)) || a_cde != s.alpha(d, e, c) {
            return w3("alpha-skew", c, d, e);
        }
        for n in 0..=exponent {
            if s.alpha(&self.scale(c, n), d, e) != self.mulv(a_cde, n) {
                return w3("alpha-power", c, d, e);
            }
        }
        for f in extra {
            let want = (s.alpha(c, e, f) + s.alpha(d, e, f)) % m;
            if s.alpha(&cd, e, f) != want {
                return Some(("alpha-additivity", vec![c.to_vec(), d.to_vec(), e.to_vec(), f.clone()]));
            }
        }
        None
    }
}

/// Exhaustive over all triples when the space is at most
/// `budget.exhaustive_limit` vectors; the four-argument additivity of
/// `alpha` then runs its last argument over the basis. Otherwise
/// `budget.samples` random tuples are drawn.
pub(crate) fn validate_forms<S: FormOracle>(s: &S, budget: &ValidationBudget) -> AxiomReport {
    let moduli = s.moduli();
    let k = moduli.len();
    let checker = Checker {
        s,
        moduli: moduli.clone(),
        m: s.value_modulus(),
        basis: (0..k)
            .map(|i| {
                let mut v = vec![0; k];
                v[i] = 1;
                v
            })
            .collect(),
    };
    let n = group_order(&moduli);
    let to_vectors = |w: Vec<Vec<u32>>| -> Vec<FpVector> {
        w.into_iter()
            .map(|x| FpVector::from_raw(x, moduli.clone()))
            .collect()
    };
    if n <= budget.exhaustive_limit {
        let all: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut v = vec![0; k];
                unrank_into(i, &moduli, &mut v);
                v
            })
            .collect();
        let mut count = 0;
        for c in &all {
            for d in &all {
                for e in &all {
                    count += 1;
                    if let Some((axiom, w)) = checker.check(c, d, e, &checker.basis) {
                        return AxiomReport {
                            exhaustive: true,
                            tuples_checked: count,
                            failure: Some(AxiomFailure {
                                axiom,
                                witness: to_vectors(w),
                            }),
                        };
                    }
                }
            }
        }
        AxiomReport {
            exhaustive: true,
            tuples_checked: count,
            failure: None,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<u32> {
            moduli.iter().map(|&q| rng.gen_range(0..q)).collect()
        };
        for count in 1..=budget.samples {
            let c = draw(&mut rng);
            let d = draw(&mut rng);
            let e = draw(&mut rng);
            let f = vec![draw(&mut rng)];
            if let Some((axiom, w)) = checker.check(&c, &d, &e, &f) {
                return AxiomReport {
                    exhaustive: false,
                    tuples_checked: count,
                    failure: Some(AxiomFailure {
                        axiom,
                        witness: to_vectors(w),
                    }),
                };
            }
        }
        AxiomReport {
            exhaustive: false,
            tuples_checked: budget.samples,
            failure: None,
        }
    }
}
