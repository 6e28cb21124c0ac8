//! Enumeration of coded vector spaces up to isomorphism (with scalars) and
//! up to adjoint translation.
//!
//! The associator form is fixed first: every space is isomorphic to one
//! whose `alpha` is a chosen representative of its orbit, so only those
//! representatives are combined with all `sigma` and `chi` tables.

use std::collections::BTreeMap;

use crate::algebra::{all_vectors, check_prime};
use crate::cvs::{iso_up_to_scalar, pair_indices, triple_indices, Cvs};
use crate::error::{Error, Result};

/// What to enumerate.
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub p: u32,
    pub dim: usize,
    /// `p` means every `p`-th power is trivial (`sigma = 0`); `p^2` asks for
    /// `sigma != 0`.
    pub exponent: u32,
    /// Keep only spaces with `alpha != 0`.
    pub nonassociative: bool,
    /// Combine `chi` and `sigma` with one `alpha` per orbit instead of every
    /// `alpha`.
    pub prune_alpha: bool,
}

/// Isomorphism invariants of a space, used to avoid hopeless searches.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Invariants {
    pub rad_chi_dim: usize,
    pub rad_alpha_dim: usize,
    /// Whether `rad(alpha)` lies inside `rad(chi)`.
    pub rad_alpha_in_rad_chi: bool,
    /// Number of vectors with `sigma = 0`.
    pub sigma_zeros: usize,
}

impl Invariants {
    pub fn of(cvs: &Cvs) -> Result<Self> {
        let rc = cvs.rad_chi_elements()?;
        let ra = cvs.rad_alpha_elements()?;
        let sigma_zeros = all_vectors(&cvs.moduli())
            .filter(|v| cvs.eval_sigma(v).map(|s| s.is_zero()).unwrap_or(false))
            .count();
        Ok(Invariants {
            rad_chi_dim: log_size(rc.len(), cvs.prime()),
            rad_alpha_dim: log_size(ra.len(), cvs.prime()),
            rad_alpha_in_rad_chi: ra.iter().all(|x| rc.contains(x)),
            sigma_zeros,
        })
    }

    /// The four cases of a 4-dimensional space over `F_3` with `alpha != 0`:
    /// `chi` trivial, nondegenerate, or with a 2-dimensional radical that
    /// contains `rad(alpha)` or does not.
    pub fn dim4_case(&self, dim: usize) -> &'static str {
        match (dim - self.rad_chi_dim, self.rad_alpha_in_rad_chi) {
            (0, _) => "chi-trivial",
            (r, _) if r == dim => "chi-nondegenerate",
            (2, true) if self.rad_chi_dim == 2 => "rad-chi-contains-rad-alpha",
            (2, false) if self.rad_chi_dim == 2 => "rad-chi-misses-rad-alpha",
            _ => "other",
        }
    }
}

fn log_size(n: usize, p: u32) -> usize {
    let mut d = 0;
    let mut m = 1;
    while m < n {
        m *= p as usize;
        d += 1;
    }
    d
}

#[derive(Clone, Debug)]
pub struct IsoClass {
    pub representative: Cvs,
    pub invariants: Invariants,
    /// Enumerated spaces that landed in this class.
    pub members: usize,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub classes: Vec<IsoClass>,
    /// Isomorphism classes joined by adjoint translation, as sorted class
    /// indices.
    pub isotopy_classes: Vec<Vec<usize>>,
    pub enumerated: usize,
    pub alpha_orbits: usize,
}

/// Buckets spaces by invariants, then by explicit isomorphism search.
struct Buckets {
    classes: Vec<IsoClass>,
    by_key: BTreeMap<Invariants, Vec<usize>>,
}

impl Buckets {
    fn new() -> Self {
        Buckets {
            classes: Vec::new(),
            by_key: BTreeMap::new(),
        }
    }

    fn find(&self, cvs: &Cvs, key: &Invariants) -> Result<Option<usize>> {
        if let Some(ids) = self.by_key.get(key) {
            for &id in ids {
                if iso_up_to_scalar(cvs, &self.classes[id].representative)?.is_some() {
                    return Ok(Some(id));
                }
            }
        }
        Ok(None)
    }

    fn insert(&mut self, cvs: Cvs) -> Result<usize> {
        let key = Invariants::of(&cvs)?;
        if let Some(id) = self.find(&cvs, &key)? {
            self.classes[id].members += 1;
            return Ok(id);
        }
        let id = self.classes.len();
        self.by_key.entry(key.clone()).or_default().push(id);
        self.classes.push(IsoClass {
            representative: cvs,
            invariants: key,
            members: 1,
        });
        Ok(id)
    }
}

/// All tables with entries in `0..p` and `len` slots, in lexicographic order.
fn tables(p: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as usize).pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut t = vec![0u32; len];
        for slot in (0..len).rev() {
            t[slot] = (idx % p as usize) as u32;
            idx /= p as usize;
        }
        t
    })
}

/// One representative per orbit of associator forms, as spaces with
/// `sigma = chi = 0`.
pub fn alpha_orbits(p: u32, dim: usize, nonzero: bool) -> Result<Vec<Cvs>> {
    let zero_sigma = vec![0; dim];
    let zero_chi = vec![0; pair_indices(dim).len()];
    let mut buckets = Buckets::new();
    let alpha_len = if p > 3 { 0 } else { triple_indices(dim).len() };
    for alpha in tables(p, alpha_len) {
        if nonzero && alpha.iter().all(|&a| a == 0) {
            continue;
        }
        let alpha = if alpha_len == 0 { vec![0; triple_indices(dim).len()] } else { alpha };
        buckets.insert(Cvs::from_tables(p, dim, &zero_sigma, &zero_chi, &alpha)?)?;
    }
    Ok(buckets.classes.into_iter().map(|c| c.representative).collect())
}

pub fn classify(opts: &ClassifyOptions) -> Result<Classification> {
    let p = opts.p;
    let k = opts.dim;
    check_prime(p)?;
    let sigma_zero = if opts.exponent == p {
        true
    } else if opts.exponent == p * p {
        false
    } else {
        return Err(Error::Unsupported(format!("exponent {} is neither {p} nor {}", opts.exponent, p * p)));
    };
    let alphas: Vec<Vec<u32>> = if opts.prune_alpha {
        alpha_orbits(p, k, opts.nonassociative)?
            .iter()
            .map(|c| c.alpha_table())
            .collect()
    } else {
        let len = triple_indices(k).len();
        let all: Vec<Vec<u32>> = if p > 3 { vec![vec![0; len]] } else { tables(p, len).collect() };
        all.into_iter()
            .filter(|a| !opts.nonassociative || a.iter().any(|&x| x != 0))
            .collect()
    };
    let alpha_orbits = if opts.prune_alpha { alphas.len() } else { alpha_orbits(p, k, opts.nonassociative)?.len() };
    let mut buckets = Buckets::new();
    let mut enumerated = 0;
    for alpha in &alphas {
        for sigma in tables(p, k) {
            if sigma_zero != sigma.iter().all(|&s| s == 0) {
                continue;
            }
            for chi in tables(p, pair_indices(k).len()) {
                let cvs = Cvs::from_tables(p, k, &sigma, &chi, alpha)?;
                enumerated += 1;
                buckets.insert(cvs)?;
            }
        }
    }
    let n = buckets.classes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for id in 0..n {
        let rep = buckets.classes[id].representative.clone();
        for kappa in all_vectors(&rep.moduli()) {
            let t = rep.adjoint_translate(&kappa)?;
            let key = Invariants::of(&t)?;
            let other = buckets
                .find(&t, &key)?
                .ok_or_else(|| Error::InvalidCvs(format!("adjoint translate of class {id} left the enumeration")))?;
            let (a, b) = (root(&mut parent, id), root(&mut parent, other));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for id in 0..n {
        let r = root(&mut parent, id);
        groups.entry(r).or_default().push(id);
    }
    Ok(Classification {
        classes: buckets.classes,
        isotopy_classes: groups.into_values().collect(),
        enumerated,
        alpha_orbits,
    })
}

/// Buckets every space by pairwise isomorphism search alone, no invariants.
/// Slow; for cross-checking [`classify`] in small dimension.
pub fn classify_naive(opts: &ClassifyOptions) -> Result<usize> {
    let p = opts.p;
    let k = opts.dim;
    let mut reps: Vec<Cvs> = Vec::new();
    let len = triple_indices(k).len();
    for alpha in tables(p, if p > 3 { 0 } else { len }) {
        let alpha = if p > 3 { vec![0; len] } else { alpha };
        if opts.nonassociative && alpha.iter().all(|&a| a == 0) {
            continue;
        }
        for sigma in tables(p, k) {
            if (opts.exponent == p) != sigma.iter().all(|&s| s == 0) {
                continue;
            }
            for chi in tables(p, pair_indices(k).len()) {
                let cvs = Cvs::from_tables(p, k, &sigma, &chi, &alpha)?;
                let mut found = false;
                for r in &reps {
                    if iso_up_to_scalar(&cvs, r)?.is_some() {
                        found = true;
                        break;
                    }
                }
                if !found {
                    reps.push(cvs);
                }
            }
        }
    }
    Ok(reps.len())
}
