//! Coded modules: the commutator and associator data of a class-2 Moufang
//! loop whose quotient by a cyclic central subgroup is an arbitrary finite
//! abelian p-group.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{check_prime, gcd, group_order, prime_power_exponent, unrank_into, FpVector, Residue};
use crate::coded_loop::{CodedLoop, ExtensionBudget};
use crate::cvs::{pair_indices, triple_indices, AxiomReport, Cvs, ValidationBudget};
use crate::cvs_validate::{validate_forms, FormOracle};
use crate::error::{Error, Result};
use crate::forms::{ChiMode, Forms};

/// Largest loop built by [`CodedModule::build`].
pub const MODULE_LOOP_BUDGET: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedModule {
    p: u32,
    orders: Vec<u32>,
    z_order: u32,
    z_values: Vec<u32>,
    forms: Forms,
}

fn invalid(clause: &str, detail: impl fmt::Display) -> Error {
    Error::InvalidModule(format!("{clause}: {detail}"))
}

impl CodedModule {
    /// `orders[i]` is the order of the basis element `x_i`, `z_values[i]` is
    /// `x_i^{orders[i]}`. Commutator entries `(i, j, v)` need `i != j` and set
    /// `chi_ji = -v`; associator entries `(i, j, l, v)` need `i < j < l`.
    /// Indices are 0-based.
    pub fn new(
        p: u32,
        orders: &[u32],
        z_order: u32,
        z_values: &[u32],
        chi: &[(usize, usize, u32)],
        alpha: &[(usize, usize, usize, u32)],
    ) -> Result<Self> {
        check_prime(p)?;
        let k = orders.len();
        for (i, &q) in orders.iter().enumerate() {
            if q < p || prime_power_exponent(q, p).is_none() {
                return Err(invalid("basis orders", format!("q_{} = {q} is not a power of {p}", i + 1)));
            }
        }
        if z_order < p || prime_power_exponent(z_order, p).is_none() {
            return Err(invalid("value group", format!("order {z_order} is not a power of {p}")));
        }
        if z_values.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: z_values.len(),
            });
        }
        if let Some(i) = z_values.iter().position(|&z| z >= z_order) {
            return Err(invalid("z values", format!("z_{} = {} not in Z_{z_order}", i + 1, z_values[i])));
        }
        let mut chi_upper = vec![None; k * k];
        for &(i, j, v) in chi {
            if i >= k || j >= k {
                return Err(Error::Index(format!("chi index ({}, {}) outside 1..={k}", i + 1, j + 1)));
            }
            if i == j {
                return Err(invalid("chi_ii = 0", format!("chi_{0}{0} is given", i + 1)));
            }
            if v >= z_order {
                return Err(invalid("chi values", format!("{v} not in Z_{z_order}")));
            }
            let (a, b, w) = if i < j { (i, j, v) } else { (j, i, (z_order - v) % z_order) };
            match chi_upper[a * k + b] {
                Some(old) if old != w => {
                    return Err(invalid("chi_ij = -chi_ji", format!("conflicting entries for ({}, {})", a + 1, b + 1)));
                }
                _ => chi_upper[a * k + b] = Some(w),
            }
            let ord = Residue::new(w as i64, z_order).order();
            for (slot, q) in [(i, orders[i]), (j, orders[j])] {
                if q % ord != 0 {
                    return Err(invalid(
                        "order of chi_ij divides q_i",
                        format!("chi_{}{} has order {ord}, x_{} has order {q}", i + 1, j + 1, slot + 1),
                    ));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j, l, v) in alpha {
            if l >= k {
                return Err(Error::Index(format!("alpha index {} outside 1..={k}", l + 1)));
            }
            if !(i < j && j < l) {
                return Err(invalid("alpha alternating", "indices must be strictly increasing"));
            }
            if !seen.insert((i, j, l)) {
                return Err(invalid("alpha entries", format!("duplicate ({}, {}, {})", i + 1, j + 1, l + 1)));
            }
            if v >= z_order {
                return Err(invalid("alpha values", format!("{v} not in Z_{z_order}")));
            }
            let bound = match p {
                2 => 2,
                3 => 3,
                _ => 1,
            };
            if v as u64 * bound as u64 % z_order as u64 != 0 {
                let clause = match p {
                    2 => "2 alpha = 0",
                    3 => "3 alpha = 0",
                    _ => "alpha = 0 for p > 3",
                };
                return Err(invalid(clause, format!("alpha_{}{}{} = {v}", i + 1, j + 1, l + 1)));
            }
        }
        let mode = if p == 2 { ChiMode::Polarized } else { ChiMode::Bilinear };
        let chi_entries: Vec<(usize, usize, u32)> = pair_indices(k)
            .into_iter()
            .filter_map(|(i, j)| chi_upper[i * k + j].map(|v| (i, j, v)))
            .collect();
        let forms = Forms::new(k, z_order, mode, chi_entries, alpha.iter().copied());
        Ok(CodedModule {
            p,
            orders: orders.to_vec(),
            z_order,
            z_values: z_values.to_vec(),
            forms,
        })
    }

    /// The module of a coded vector space: every `q_i = p`, `Z = Z_p` and
    /// `z_i = sigma(x_i)`.
    pub fn from_cvs(cvs: &Cvs) -> Result<Self> {
        let p = cvs.prime();
        let k = cvs.dim();
        let chi: Vec<_> = pair_indices(k)
            .into_iter()
            .zip(cvs.chi_table())
            .map(|((i, j), v)| (i, j, v))
            .collect();
        let alpha: Vec<_> = triple_indices(k)
            .into_iter()
            .zip(cvs.alpha_table())
            .map(|((i, j, l), v)| (i, j, l, v))
            .collect();
        CodedModule::new(p, &vec![p; k], p, cvs.sigma_basis(), &chi, &alpha)
    }

    /// The coded vector space when `C` and `Z` are elementary abelian.
    pub fn to_cvs(&self) -> Result<Cvs> {
        if self.z_order != self.p || self.orders.iter().any(|&q| q != self.p) {
            return Err(Error::Unsupported("module is not elementary abelian".into()));
        }
        let k = self.dim();
        let chi: Vec<u32> = pair_indices(k).into_iter().map(|(i, j)| self.forms.chi_basis(i, j)).collect();
        let alpha: Vec<u32> = triple_indices(k)
            .into_iter()
            .map(|(i, j, l)| self.forms.alpha_basis(i, j, l))
            .collect();
        Cvs::from_tables(self.p, k, &self.z_values, &chi, &alpha)
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn basis_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn z_order(&self) -> u32 {
        self.z_order
    }

    pub fn z_values(&self) -> &[u32] {
        &self.z_values
    }

    /// `|C|`.
    pub fn size(&self) -> usize {
        group_order(&self.orders)
    }

    pub fn chi_basis(&self, i: usize, j: usize) -> u32 {
        self.forms.chi_basis(i, j)
    }

    pub fn alpha_basis(&self, i: usize, j: usize, l: usize) -> u32 {
        self.forms.alpha_basis(i, j, l)
    }

    fn check(&self, v: &FpVector) -> Result<()> {
        if v.moduli() != self.orders.as_slice() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// The commutator form: for `p = 2` the closed form with the associator
    /// corrections, otherwise the bilinear extension.
    pub fn eval_chi(&self, c: &FpVector, d: &FpVector) -> Result<Residue> {
        self.check(c)?;
        self.check(d)?;
        Ok(Residue::new(self.forms.eval_chi(c.coords(), d.coords()) as i64, self.z_order))
    }

    pub fn eval_alpha(&self, c: &FpVector, d: &FpVector, e: &FpVector) -> Result<Residue> {
        self.check(c)?;
        self.check(d)?;
        self.check(e)?;
        Ok(Residue::new(
            self.forms.eval_alpha(c.coords(), d.coords(), e.coords()) as i64,
            self.z_order,
        ))
    }

    /// `sum c_i s_i + sum_{i<j} c_i c_j chi_ij + sum_{i<j<l} c_i c_j c_l alpha_ijl`
    /// for chosen values `s_i`. Only for `p = 2`.
    pub fn eval_sigma2(&self, sigma: &[u32], c: &FpVector) -> Result<Residue> {
        if self.p != 2 {
            return Err(Error::Unsupported(format!("the squaring form needs p = 2, got {}", self.p)));
        }
        if sigma.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: sigma.len(),
            });
        }
        self.check(c)?;
        Ok(Residue::new(self.sigma2_raw(sigma, c.coords()) as i64, self.z_order))
    }

    fn sigma2_raw(&self, sigma: &[u32], c: &[u32]) -> u32 {
        let k = self.dim();
        let m = self.z_order as u64;
        let mut acc: u64 = 0;
        for i in 0..k {
            acc += c[i] as u64 * sigma[i] as u64 % m;
            for j in i + 1..k {
                let cij = c[i] as u64 * c[j] as u64 % m;
                acc += cij * self.forms.chi_basis(i, j) as u64 % m;
                for l in j + 1..k {
                    acc += cij * c[l] as u64 % m * self.forms.alpha_basis(i, j, l) as u64 % m;
                }
            }
        }
        (acc % m) as u32
    }

    /// Checks the commutator and associator identities, exhaustively when
    /// `|C|` is within the budget.
    pub fn validate_axioms(&self, budget: &ValidationBudget) -> AxiomReport {
        validate_forms(self, budget)
    }

    /// As [`validate_axioms`](Self::validate_axioms), also checking that the
    /// squaring form built from `sigma` polarizes to the commutator form.
    pub fn validate_sigma2(&self, sigma: &[u32], budget: &ValidationBudget) -> Result<AxiomReport> {
        if self.p != 2 {
            return Err(Error::Unsupported(format!("the squaring form needs p = 2, got {}", self.p)));
        }
        if sigma.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: sigma.len(),
            });
        }
        Ok(validate_forms(&WithSigma { module: self, sigma }, budget))
    }

    /// The coded extension: elements `(z, c)` with `z` in `Z_{|Z|}`, built
    /// slot by slot from cyclic pieces with `x_i^{q_i} = z_i`. The power
    /// relations are re-checked on the result.
    pub fn build(&self) -> Result<CodedLoop> {
        let order = self.size() as u128 * self.z_order as u128;
        if order > MODULE_LOOP_BUDGET as u128 {
            return Err(Error::Budget(format!(
                "loop order {order} exceeds the budget {MODULE_LOOP_BUDGET}"
            )));
        }
        let l = CodedLoop::from_parts(
            self.orders.clone(),
            self.z_order,
            self.z_values.clone(),
            self.forms.clone(),
            None,
        );
        for (j, (&q, &z)) in self.orders.iter().zip(&self.z_values).enumerate() {
            let x = l.index_of(&l.generator(j)?);
            let power = l.pow_index(x, q as i64);
            if power != z as usize * l.quotient_order() {
                return Err(Error::InvalidModule(format!(
                    "built loop has x_{}^{q} different from z_{}",
                    j + 1,
                    j + 1
                )));
            }
        }
        Ok(l)
    }

    pub fn emit(&self) -> String {
        let k = self.dim();
        let mut out = String::from("module\n");
        out.push_str(&format!("p {}\n", self.p));
        let orders: Vec<String> = self.orders.iter().map(|q| q.to_string()).collect();
        out.push_str(&format!("orders {}\n", orders.join(" ")));
        out.push_str(&format!("zorder {}\n", self.z_order));
        for (i, &z) in self.z_values.iter().enumerate() {
            if z != 0 {
                out.push_str(&format!("zi {} {}\n", i + 1, z));
            }
        }
        for (i, j) in pair_indices(k) {
            let v = self.forms.chi_basis(i, j);
            if v != 0 {
                out.push_str(&format!("chi {} {} {}\n", i + 1, j + 1, v));
            }
        }
        for (i, j, l) in triple_indices(k) {
            let v = self.forms.alpha_basis(i, j, l);
            if v != 0 {
                out.push_str(&format!("alpha {} {} {} {}\n", i + 1, j + 1, l + 1, v));
            }
        }
        out
    }
}

impl fmt::Display for CodedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}

impl FormOracle for CodedModule {
    fn moduli(&self) -> Vec<u32> {
        self.orders.clone()
    }
    fn value_modulus(&self) -> u32 {
        self.z_order
    }
    fn sigma(&self, _: &[u32]) -> Option<u32> {
        None
    }
    fn chi(&self, c: &[u32], d: &[u32]) -> u32 {
        self.forms.eval_chi(c, d)
    }
    fn alpha(&self, c: &[u32], d: &[u32], e: &[u32]) -> u32 {
        self.forms.eval_alpha(c, d, e)
    }
    fn sigma_polarizes(&self) -> bool {
        false
    }
}

struct WithSigma<'a> {
    module: &'a CodedModule,
    sigma: &'a [u32],
}

impl FormOracle for WithSigma<'_> {
    fn moduli(&self) -> Vec<u32> {
        self.module.moduli()
    }
    fn value_modulus(&self) -> u32 {
        self.module.z_order
    }
    fn sigma(&self, c: &[u32]) -> Option<u32> {
        Some(self.module.sigma2_raw(self.sigma, c))
    }
    fn chi(&self, c: &[u32], d: &[u32]) -> u32 {
        self.module.forms.eval_chi(c, d)
    }
    fn alpha(&self, c: &[u32], d: &[u32], e: &[u32]) -> u32 {
        self.module.forms.eval_alpha(c, d, e)
    }
    fn sigma_polarizes(&self) -> bool {
        true
    }
}

/// Random module with the given basis orders: commutator values of order
/// dividing both slot orders, associator values of order dividing `p` (zero
/// for `p > 3`).
pub fn random_module(p: u32, orders: &[u32], z_order: u32, seed: u64) -> Result<CodedModule> {
    check_prime(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = orders.len();
    let z_values: Vec<u32> = (0..k).map(|_| rng.gen_range(0..z_order)).collect();
    let chi: Vec<(usize, usize, u32)> = pair_indices(k)
        .into_iter()
        .map(|(i, j)| {
            let step = z_order / gcd(z_order, orders[i].min(orders[j]));
            (i, j, rng.gen_range(0..z_order / step) * step)
        })
        .collect();
    let alpha: Vec<(usize, usize, usize, u32)> = triple_indices(k)
        .into_iter()
        .map(|(i, j, l)| {
            let v = if p > 3 { 0 } else { rng.gen_range(0..p) * (z_order / p) };
            (i, j, l, v)
        })
        .collect();
    CodedModule::new(p, orders, z_order, &z_values, &chi, &alpha)
}

/// `x^q` for any preimage `x` of `c`, in a loop whose central subgroup has
/// prime order. Two preimages are compared to confirm the value does not
/// depend on the choice.
pub fn sigma_q(l: &CodedLoop, q: u32, c: &FpVector) -> Result<Residue> {
    let m = l.z_order();
    if !crate::algebra::is_prime(m) {
        return Err(Error::Unsupported(format!("the central subgroup has order {m}, not a prime")));
    }
    if prime_power_exponent(q, m).is_none() {
        return Err(Error::InvalidModule(format!("{q} is not a power of {m}")));
    }
    if c.moduli() != l.slot_orders() {
        return Err(Error::Dimension {
            expected: l.dim(),
            got: c.dim(),
        });
    }
    if c.coords().iter().zip(l.slot_orders()).any(|(&x, &o)| x as u64 * q as u64 % o as u64 != 0) {
        return Err(Error::InvalidModule(format!("{c} has order not dividing {q}")));
    }
    let nc = l.quotient_order();
    let a = c.rank();
    let first = l.pow_index(a, q as i64);
    let second = l.pow_index(nc + a, q as i64);
    if first != second || first % nc != 0 {
        return Err(Error::InvalidLoop(format!("{q}-th powers over {c} are not a single central value")));
    }
    Ok(Residue::new((first / nc) as i64, m))
}

/// Result of [`module_isotopy_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotopyReport {
    pub kappas: usize,
    pub failure: Option<String>,
}

/// For `p = 3` and `|Z| = 3`: for each `kappa` (all of `C` when `|C|` is at
/// most `exhaustive_limit`, else `samples` random ones) checks that the
/// isotope keeps every power, keeps the associator, and has commutator
/// `chi(c,d) - alpha(c,kappa,d)`.
pub fn module_isotopy_check(module: &CodedModule, exhaustive_limit: usize, samples: usize, seed: u64) -> Result<IsotopyReport> {
    if module.p != 3 || module.z_order != 3 {
        return Err(Error::Unsupported("isotopy check needs p = 3 and |Z| = 3".into()));
    }
    let l = module.build()?;
    let nc = module.size();
    let kappas: Vec<usize> = if nc <= exhaustive_limit {
        (0..nc).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).map(|_| rng.gen_range(0..nc)).collect()
    };
    let exponent = *module.orders.iter().max().unwrap_or(&1) as i64;
    let budget = ExtensionBudget {
        seed,
        ..ExtensionBudget::default()
    };
    for &r in &kappas {
        let mut coords = vec![0u32; module.dim()];
        unrank_into(r, &module.orders, &mut coords);
        let kappa = FpVector::from_raw(coords, module.orders.clone());
        let iso = l.kappa_isotope(&kappa)?;
        for a in 0..l.order() {
            for n in 1..=exponent {
                if iso.pow_index(a, n) != l.pow_index(a, n) {
                    return Ok(IsotopyReport {
                        kappas: kappas.len(),
                        failure: Some(format!("power {n} of element {a} changes under kappa = {kappa}")),
                    });
                }
            }
        }
        let report = iso.verify_coded_extension(&budget);
        if let Some(f) = report.failure {
            return Ok(IsotopyReport {
                kappas: kappas.len(),
                failure: Some(format!("{} law fails under kappa = {kappa}", f.law)),
            });
        }
    }
    Ok(IsotopyReport {
        kappas: kappas.len(),
        failure: None,
    })
}

pub fn parse_module(text: &str) -> Result<CodedModule> {
    let mut lines = crate::text::tokenized_lines(text);
    let Some((line_no, header)) = lines.next() else {
        return Err(Error::parse(1, 1, "empty input, expected `module`"));
    };
    if header.len() != 1 || header[0].text != "module" {
        return Err(Error::parse(line_no, header[0].column, "expected `module` header"));
    }
    let mut p: Option<u32> = None;
    let mut orders: Option<Vec<u32>> = None;
    let mut z_order: Option<u32> = None;
    let mut z_values: Vec<(usize, u32)> = Vec::new();
    let mut chi = Vec::new();
    let mut alpha = Vec::new();
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
        let index = |t: &crate::text::Token, k: usize| -> Result<usize> {
            let i: usize = t.parse(line_no)?;
            if i == 0 || i > k {
                return Err(Error::parse(line_no, t.column, format!("index {i} outside 1..={k}")));
            }
            Ok(i - 1)
        };
        match key.text {
            "p" => {
                need(2)?;
                let v: u32 = toks[1].parse(line_no)?;
                if !crate::algebra::is_prime(v) {
                    return Err(Error::parse(line_no, toks[1].column, format!("{v} is not prime")));
                }
                p = Some(v);
            }
            "orders" => {
                if toks.len() < 2 {
                    return Err(Error::parse(line_no, key.column, "`orders` needs at least one value"));
                }
                orders = Some(toks[1..].iter().map(|t| t.parse(line_no)).collect::<Result<_>>()?);
            }
            "zorder" => {
                need(2)?;
                z_order = Some(toks[1].parse(line_no)?);
            }
            "zi" | "chi" | "alpha" => {
                let Some(k) = orders.as_ref().map(|o| o.len()) else {
                    return Err(Error::parse(line_no, key.column, "`orders` must precede table entries"));
                };
                let arity = match key.text {
                    "zi" => 1,
                    "chi" => 2,
                    _ => 3,
                };
                need(arity + 2)?;
                let idx: Vec<usize> = toks[1..=arity].iter().map(|t| index(t, k)).collect::<Result<_>>()?;
                let v: u32 = toks[arity + 1].parse(line_no)?;
                match arity {
                    1 => z_values.push((idx[0], v)),
                    2 => chi.push((idx[0], idx[1], v)),
                    _ => alpha.push((idx[0], idx[1], idx[2], v)),
                }
            }
            other => {
                return Err(Error::parse(line_no, key.column, format!("unknown keyword `{other}`")));
            }
        }
    }
    let p = p.ok_or_else(|| Error::parse(1, 1, "missing `p`"))?;
    let orders = orders.ok_or_else(|| Error::parse(1, 1, "missing `orders`"))?;
    let z_order = z_order.ok_or_else(|| Error::parse(1, 1, "missing `zorder`"))?;
    let mut z = vec![0u32; orders.len()];
    for (i, v) in z_values {
        z[i] = v;
    }
    CodedModule::new(p, &orders, z_order, &z, &chi, &alpha)
}
