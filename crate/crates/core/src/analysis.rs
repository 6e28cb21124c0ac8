//! Structure theory for finite loops: identities, centers, derived
//! subloops, central series, Frattini subloop, torsion and isomorphism.
//!
//! Everything is generic over [`FiniteLoop`], so it runs on Cayley tables
//! and directly on coded loops.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::gcd;
use crate::error::{Error, Result};
use crate::table::{FiniteLoop, LoopTable};

/// `[a,b] = (ba)^-1 (ab)`
pub fn commutator<L: FiniteLoop + ?Sized>(l: &L, a: usize, b: usize) -> usize {
    l.mul(l.inv(l.mul(b, a)), l.mul(a, b))
}

/// `[a,b,c] = (a(bc))^-1 ((ab)c)`
pub fn associator<L: FiniteLoop + ?Sized>(l: &L, a: usize, b: usize, c: usize) -> usize {
    l.mul(l.inv(l.mul(a, l.mul(b, c))), l.mul(l.mul(a, b), c))
}

/// `a^n` with `a^0 = 1` and `a^{n+1} = a a^n`; negative `n` inverts first.
pub fn pow<L: FiniteLoop + ?Sized>(l: &L, a: usize, n: i64) -> usize {
    let (base, n) = if n < 0 { (l.inv(a), n.unsigned_abs()) } else { (a, n as u64) };
    let mut acc = l.identity();
    for _ in 0..n {
        acc = l.mul(base, acc);
    }
    acc
}

/// Least `n >= 1` with `a^n = 1`.
pub fn element_order<L: FiniteLoop + ?Sized>(l: &L, a: usize) -> usize {
    let e = l.identity();
    let mut acc = a;
    let mut n = 1;
    while acc != e {
        acc = l.mul(a, acc);
        n += 1;
        if n > l.order() {
            // not power-associative enough to cycle back through 1
            return 0;
        }
    }
    n
}

pub fn element_orders<L: FiniteLoop + ?Sized>(l: &L) -> Vec<usize> {
    (0..l.order()).map(|a| element_order(l, a)).collect()
}

/// A set of element indices, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subloop {
    elements: Vec<usize>,
    /// Whether closure under products was verified.
    closed: bool,
}

impl Subloop {
    fn from_sorted(elements: Vec<usize>, closed: bool) -> Self {
        Subloop { elements, closed }
    }

    fn from_mask(mask: &[bool], closed: bool) -> Self {
        Subloop {
            elements: (0..mask.len()).filter(|&i| mask[i]).collect(),
            closed,
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Subloop) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn intersect(&self, other: &Subloop) -> Subloop {
        Subloop::from_sorted(
            self.elements.iter().copied().filter(|&x| other.contains(x)).collect(),
            self.closed && other.closed,
        )
    }

    fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &x in &self.elements {
            m[x] = true;
        }
        m
    }
}

/// First `(a, b, c)` in lexicographic order where `f` fails.
fn first_failing_triple<L, F>(l: &L, f: F) -> Option<[usize; 3]>
where
    L: FiniteLoop + ?Sized,
    F: Fn(usize, usize, usize) -> bool + Sync,
{
    let n = l.order();
    (0..n)
        .into_par_iter()
        .find_map_first(|a| {
            for b in 0..n {
                for c in 0..n {
                    if !f(a, b, c) {
                        return Some([a, b, c]);
                    }
                }
            }
            None
        })
}

/// A failed identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub identity: &'static str,
    pub witness: Vec<usize>,
}

fn moufang_at<L: FiniteLoop + ?Sized>(l: &L, c: usize, d: usize, e: usize) -> Option<&'static str> {
    let m = |a, b| l.mul(a, b);
    // ((dc)e)c = d(c(ec))
    if m(m(m(d, c), e), c) != m(d, m(c, m(e, c))) {
        return Some("((dc)e)c = d(c(ec))");
    }
    // ((cd)c)e = c(d(ce))
    if m(m(m(c, d), c), e) != m(c, m(d, m(c, e))) {
        return Some("((cd)c)e = c(d(ce))");
    }
    let cd_ec = m(m(c, d), m(e, c));
    // (c(de))c = (cd)(ec)
    if m(m(c, m(d, e)), c) != cd_ec {
        return Some("(c(de))c = (cd)(ec)");
    }
    // (cd)(ec) = c((de)c)
    if cd_ec != m(c, m(m(d, e), c)) {
        return Some("(cd)(ec) = c((de)c)");
    }
    None
}

/// Checks the four Moufang identities on every triple `(c, d, e)`.
pub fn is_moufang<L: FiniteLoop + ?Sized>(l: &L) -> std::result::Result<(), Violation> {
    match first_failing_triple(l, |c, d, e| moufang_at(l, c, d, e).is_none()) {
        None => Ok(()),
        Some([c, d, e]) => Err(Violation {
            identity: moufang_at(l, c, d, e).unwrap(),
            witness: vec![c, d, e],
        }),
    }
}

/// The Moufang identities on `samples` random triples.
pub fn is_moufang_sampled<L: FiniteLoop + ?Sized>(
    l: &L,
    samples: usize,
    seed: u64,
) -> std::result::Result<(), Violation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = l.order();
    for _ in 0..samples {
        let (c, d, e) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if let Some(identity) = moufang_at(l, c, d, e) {
            return Err(Violation {
                identity,
                witness: vec![c, d, e],
            });
        }
    }
    Ok(())
}

/// `None` when associative, else the first non-associating triple.
pub fn associativity_witness<L: FiniteLoop + ?Sized>(l: &L) -> Option<[usize; 3]> {
    first_failing_triple(l, |a, b, c| l.mul(l.mul(a, b), c) == l.mul(a, l.mul(b, c)))
}

pub fn is_associative<L: FiniteLoop + ?Sized>(l: &L) -> bool {
    associativity_witness(l).is_none()
}

/// `c^k (d (c e)) = ((c^k d) c) e` for all `c, d, e`.
pub fn mk_law_holds<L: FiniteLoop + ?Sized>(l: &L, k: i64) -> bool {
    let powers: Vec<usize> = (0..l.order()).map(|c| pow(l, c, k)).collect();
    first_failing_triple(l, |c, d, e| {
        let ck = powers[c];
        l.mul(ck, l.mul(d, l.mul(c, e))) == l.mul(l.mul(l.mul(ck, d), c), e)
    })
    .is_none()
}

fn commutes_with_all<L: FiniteLoop + ?Sized>(l: &L, a: usize) -> bool {
    (0..l.order()).all(|x| l.mul(a, x) == l.mul(x, a))
}

fn in_nucleus<L: FiniteLoop + ?Sized>(l: &L, a: usize) -> bool {
    let n = l.order();
    let e = l.identity();
    (0..n).all(|x| {
        (0..n).all(|y| {
            associator(l, a, x, y) == e && associator(l, x, a, y) == e && associator(l, x, y, a) == e
        })
    })
}

/// Elements that commute and associate with everything.
pub fn center<L: FiniteLoop + ?Sized>(l: &L) -> Subloop {
    let mask: Vec<bool> = (0..l.order())
        .into_par_iter()
        .map(|a| commutes_with_all(l, a) && in_nucleus(l, a))
        .collect();
    Subloop::from_mask(&mask, true)
}

/// Center membership tested against `samples` random pairs per element.
pub fn center_sampled<L: FiniteLoop + ?Sized>(l: &L, samples: usize, seed: u64) -> Subloop {
    let n = l.order();
    let e = l.identity();
    let mask: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (a as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            (0..samples).all(|_| {
                let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
                l.mul(a, x) == l.mul(x, a)
                    && associator(l, a, x, y) == e
                    && associator(l, x, a, y) == e
                    && associator(l, x, y, a) == e
            })
        })
        .collect();
    Subloop::from_mask(&mask, false)
}

pub fn nucleus<L: FiniteLoop + ?Sized>(l: &L) -> Subloop {
    let mask: Vec<bool> = (0..l.order()).into_par_iter().map(|a| in_nucleus(l, a)).collect();
    Subloop::from_mask(&mask, true)
}

/// Elements commuting with everything.
pub fn moufang_center<L: FiniteLoop + ?Sized>(l: &L) -> Subloop {
    let mask: Vec<bool> = (0..l.order()).into_par_iter().map(|a| commutes_with_all(l, a)).collect();
    Subloop::from_mask(&mask, true)
}

/// The subloop generated by `seeds`.
pub fn generate<L: FiniteLoop + ?Sized>(l: &L, seeds: &[usize]) -> Subloop {
    let n = l.order();
    let mut inside = vec![false; n];
    let mut elems = vec![l.identity()];
    inside[l.identity()] = true;
    for &s in seeds {
        if !inside[s] {
            inside[s] = true;
            elems.push(s);
        }
    }
    close(l, &mut inside, &mut elems, 0);
    elems.sort_unstable();
    Subloop::from_sorted(elems, true)
}

/// Closes `elems` under products, assuming the first `done` are closed
/// among themselves.
fn close<L: FiniteLoop + ?Sized>(l: &L, inside: &mut [bool], elems: &mut Vec<usize>, done: usize) {
    let mut i = done;
    while i < elems.len() {
        let a = elems[i];
        let mut j = 0;
        while j <= i {
            let b = elems[j];
            for prod in [l.mul(a, b), l.mul(b, a)] {
                if !inside[prod] {
                    inside[prod] = true;
                    elems.push(prod);
                }
            }
            j += 1;
        }
        i += 1;
    }
}

fn extend<L: FiniteLoop + ?Sized>(l: &L, s: &Subloop, extra: usize) -> Subloop {
    let mut inside = s.mask(l.order());
    let mut elems = s.elements.clone();
    let done = elems.len();
    if !inside[extra] {
        inside[extra] = true;
        elems.push(extra);
    }
    close(l, &mut inside, &mut elems, done);
    elems.sort_unstable();
    Subloop::from_sorted(elems, true)
}

/// Some image of `s` under `T_x`, `L_{x,y}` or `R_{x,y}` outside `s`.
fn inner_escape<L: FiniteLoop + ?Sized>(l: &L, s: &Subloop, central: &[bool]) -> Option<usize> {
    let n = l.order();
    for &h in &s.elements {
        if central[h] {
            continue;
        }
        for x in 0..n {
            // T_x(h) = x \ (h x)
            let t = l.ldiv(x, l.mul(h, x));
            if !s.contains(t) {
                return Some(t);
            }
        }
        let found = (0..n).into_par_iter().find_map_first(|x| {
            for y in 0..n {
                // L_{x,y}(h) = (yx) \ (y(xh))
                let lv = l.ldiv(l.mul(y, x), l.mul(y, l.mul(x, h)));
                if !s.contains(lv) {
                    return Some(lv);
                }
                // R_{x,y}(h) = ((hx)y) / (xy)
                let rv = l.rdiv(l.mul(l.mul(h, x), y), l.mul(x, y));
                if !s.contains(rv) {
                    return Some(rv);
                }
            }
            None
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Smallest normal subloop containing `seeds`: closure under products and
/// under the inner maps `T_x`, `L_{x,y}`, `R_{x,y}`.
pub fn normal_closure<L: FiniteLoop + ?Sized>(l: &L, seeds: &[usize]) -> Subloop {
    let z = center(l).mask(l.order());
    normal_closure_with_center(l, seeds, &z)
}

fn normal_closure_with_center<L: FiniteLoop + ?Sized>(l: &L, seeds: &[usize], central: &[bool]) -> Subloop {
    let mut s = generate(l, seeds);
    while let Some(extra) = inner_escape(l, &s, central) {
        s = extend(l, &s, extra);
    }
    s
}

/// Whether `s` is a normal subloop, via the inner maps.
pub fn is_normal<L: FiniteLoop + ?Sized>(l: &L, s: &Subloop) -> bool {
    let none = vec![false; l.order()];
    inner_escape(l, s, &none).is_none()
}

/// `(L', L*)`: normal closures of all commutators and associators, and of
/// all associators.
pub fn derived_subloops<L: FiniteLoop + ?Sized>(l: &L) -> (Subloop, Subloop) {
    let n = l.order();
    let central = center(l).mask(n);
    let mut assoc = vec![false; n];
    let per_a: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut seen = vec![false; n];
            for b in 0..n {
                for c in 0..n {
                    seen[associator(l, a, b, c)] = true;
                }
            }
            seen
        })
        .collect();
    for row in per_a {
        for (x, s) in row.into_iter().enumerate() {
            assoc[x] |= s;
        }
    }
    let mut comm = assoc.clone();
    for a in 0..n {
        for b in 0..n {
            comm[commutator(l, a, b)] = true;
        }
    }
    let seeds = |m: &[bool]| (0..n).filter(|&i| m[i]).collect::<Vec<_>>();
    let lstar = normal_closure_with_center(l, &seeds(&assoc), &central);
    let lprime = normal_closure_with_center(l, &seeds(&comm), &central);
    (lprime, lstar)
}

/// `L/N` for a normal subloop `N`; cosets are numbered by least element.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub table: LoopTable,
    pub coset_of: Vec<usize>,
    pub representatives: Vec<usize>,
}

pub fn quotient<L: FiniteLoop + ?Sized>(l: &L, normal: &Subloop) -> Result<Quotient> {
    let n = l.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &h in normal.elements() {
            coset_of[l.mul(x, h)] = id;
        }
    }
    let m = reps.len();
    if m * normal.len() != n {
        return Err(Error::InvalidLoop("cosets do not partition the loop".into()));
    }
    let table = LoopTable::from_fn(m, |a, b| coset_of[l.mul(reps[a], reps[b])])?;
    Ok(Quotient {
        table,
        coset_of,
        representatives: reps,
    })
}

/// `1 = Z_0 <= Z_1 <= ...` with `Z_{i+1}/Z_i = Z(L/Z_i)`, stopping when the
/// chain stabilizes.
pub fn upper_central_series<L: FiniteLoop + ?Sized>(l: &L) -> Result<Vec<Subloop>> {
    let n = l.order();
    let mut chain = vec![generate(l, &[])];
    loop {
        let last = chain.last().unwrap();
        let q = quotient(l, last)?;
        let zq = center(&q.table);
        let next: Vec<usize> = (0..n).filter(|&x| zq.contains(q.coset_of[x])).collect();
        if next.len() == last.len() {
            return Ok(chain);
        }
        chain.push(Subloop::from_sorted(next, true));
    }
}

/// Least `c` with `Z_c = L`; `None` when not centrally nilpotent.
pub fn nilpotency_class<L: FiniteLoop + ?Sized>(l: &L) -> Result<Option<usize>> {
    let chain = upper_central_series(l)?;
    Ok(if chain.last().unwrap().len() == l.order() {
        Some(chain.len() - 1)
    } else {
        None
    })
}

/// Largest order for the maximal-subloop Frattini computation.
pub const FRATTINI_ORACLE_LIMIT: usize = 128;
const SUBLOOP_BUDGET: usize = 200_000;

/// All maximal subloops, by exploring the subloop lattice upward from the
/// trivial subloop.
pub fn maximal_subloops<L: FiniteLoop + ?Sized>(l: &L) -> Result<Vec<Subloop>> {
    let n = l.order();
    if n > FRATTINI_ORACLE_LIMIT {
        return Err(Error::Budget(format!(
            "subloop lattice of a loop of order {n} (limit {FRATTINI_ORACLE_LIMIT})"
        )));
    }
    if n == 1 {
        return Ok(Vec::new());
    }
    let start = generate(l, &[]);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(start.elements.clone());
    let mut queue = VecDeque::from([start]);
    let mut maximal = Vec::new();
    while let Some(s) = queue.pop_front() {
        let mut is_max = true;
        let mut covered = s.mask(n);
        for y in 0..n {
            if covered[y] {
                continue;
            }
            let t = extend(l, &s, y);
            if t.len() == n {
                continue;
            }
            is_max = false;
            // y and yh generate the same subloop over s
            for &h in &s.elements {
                covered[l.mul(y, h)] = true;
            }
            if seen.insert(t.elements.clone()) {
                if seen.len() > SUBLOOP_BUDGET {
                    return Err(Error::Budget(format!("more than {SUBLOOP_BUDGET} subloops")));
                }
                queue.push_back(t);
            }
        }
        if is_max {
            maximal.push(s);
        }
    }
    maximal.sort_by(|a, b| a.elements.cmp(&b.elements));
    Ok(maximal)
}

/// Intersection of the maximal subloops (the non-generators).
pub fn frattini_by_maximal_subloops<L: FiniteLoop + ?Sized>(l: &L) -> Result<Subloop> {
    let maxes = maximal_subloops(l)?;
    let all = Subloop::from_sorted((0..l.order()).collect(), true);
    Ok(maxes.iter().fold(all, |acc, m| acc.intersect(m)))
}

/// Subloop generated by commutators, associators and `p`-th powers,
/// closed up to a normal subloop.
pub fn frattini_by_generation<L: FiniteLoop + ?Sized>(l: &L, p: u32) -> Subloop {
    let n = l.order();
    let (lprime, _) = derived_subloops(l);
    let mut seeds = lprime.elements.clone();
    for a in 0..n {
        seeds.push(pow(l, a, p as i64));
    }
    seeds.sort_unstable();
    seeds.dedup();
    normal_closure(l, &seeds)
}

/// The prime `p` when the order is a power of `p`.
pub fn p_loop_prime(n: usize) -> Option<u32> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p as u32)
}

/// The Frattini subloop: maximal-subloop intersection up to order 128,
/// generation formula above that (for `p`-loops).
pub fn frattini<L: FiniteLoop + ?Sized>(l: &L) -> Result<Subloop> {
    if l.order() <= FRATTINI_ORACLE_LIMIT {
        return frattini_by_maximal_subloops(l);
    }
    match p_loop_prime(l.order()) {
        Some(p) => Ok(frattini_by_generation(l, p)),
        None => Err(Error::Unsupported(
            "Frattini subloop of large loops is computed for p-loops only".into(),
        )),
    }
}

/// `{x : order(x) is a power of p}`, checked to be closed.
pub fn torsion_component<L: FiniteLoop + ?Sized>(l: &L, p: u32) -> Result<Subloop> {
    let orders = element_orders(l);
    let members: Vec<usize> = (0..l.order())
        .filter(|&x| orders[x] > 0 && p_power(orders[x], p))
        .collect();
    let s = Subloop::from_sorted(members, false);
    for &a in s.elements() {
        for &b in s.elements() {
            if !s.contains(l.mul(a, b)) {
                return Err(Error::InvalidLoop(format!(
                    "{p}-elements {a} and {b} have product {} outside",
                    l.mul(a, b)
                )));
            }
        }
    }
    Ok(Subloop { closed: true, ..s })
}

fn p_power(mut n: usize, p: u32) -> bool {
    while n % p as usize == 0 {
        n /= p as usize;
    }
    n == 1
}

/// The components `L_p` for the primes dividing `|L|`, verified to give a
/// direct decomposition: sizes multiply to `|L|` and mixed commutators and
/// associators are trivial.
pub fn torsion_decomposition<L: FiniteLoop + ?Sized>(l: &L) -> Result<Vec<(u32, Subloop)>> {
    let n = l.order();
    let mut primes = Vec::new();
    let mut m = n;
    let mut d = 2;
    while m > 1 {
        if m % d == 0 {
            primes.push(d as u32);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    let comps: Vec<(u32, Subloop)> = primes
        .iter()
        .map(|&p| torsion_component(l, p).map(|s| (p, s)))
        .collect::<Result<_>>()?;
    let product: usize = comps.iter().map(|(_, s)| s.len()).product();
    if product != n {
        return Err(Error::InvalidLoop("torsion components do not fill the loop".into()));
    }
    let e = l.identity();
    let owner = |x: usize| comps.iter().position(|(_, s)| s.contains(x));
    for (i, (_, s)) in comps.iter().enumerate() {
        for (j, (_, t)) in comps.iter().enumerate() {
            if i >= j {
                continue;
            }
            for &a in s.elements() {
                for &b in t.elements() {
                    if commutator(l, a, b) != e {
                        return Err(Error::InvalidLoop(format!("[{a},{b}] is not trivial")));
                    }
                    for c in 0..n {
                        if owner(c) == Some(i) || owner(c) == Some(j) {
                            if associator(l, a, b, c) != e || associator(l, a, c, b) != e {
                                return Err(Error::InvalidLoop(format!(
                                    "associator of {a},{b},{c} is not trivial"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(comps)
}

/// Least common multiple of the element orders of `s`.
pub fn exponent<L: FiniteLoop + ?Sized>(l: &L, s: &Subloop) -> usize {
    s.elements().iter().fold(1usize, |acc, &x| {
        let o = element_order(l, x);
        if o == 0 {
            acc
        } else {
            acc / gcd(acc as u32, o as u32) as usize * o
        }
    })
}

/// Invariant used to prune isomorphism candidates.
fn signature<L: FiniteLoop + ?Sized>(l: &L) -> Vec<(usize, usize, usize)> {
    let n = l.order();
    let mut squares = vec![0usize; n];
    for x in 0..n {
        squares[l.mul(x, x)] += 1;
    }
    (0..n)
        .into_par_iter()
        .map(|a| {
            let commuting = (0..n).filter(|&x| l.mul(a, x) == l.mul(x, a)).count();
            (element_order(l, a), commuting, squares[a])
        })
        .collect()
}

/// Default bound on the loop order for [`brute_force_isomorphic`].
pub const ISOMORPHISM_BUDGET: usize = 256;

/// Greedy generating set: repeatedly adds the least element that enlarges
/// the generated subloop the most.
pub fn generating_set<L: FiniteLoop + ?Sized>(l: &L) -> Vec<usize> {
    let all: Vec<usize> = (0..l.order()).collect();
    let mut gens = Vec::new();
    grow_generators(l, &mut gens, &all);
    gens
}

/// Extends `gens` greedily from `pool` until it generates all of `pool`'s
/// span, and returns the generated subloop.
fn grow_generators<L: FiniteLoop + ?Sized>(l: &L, gens: &mut Vec<usize>, pool: &[usize]) -> Subloop {
    let mut s = generate(l, gens);
    loop {
        let mut best: Option<(usize, Subloop)> = None;
        for &y in pool {
            if s.contains(y) {
                continue;
            }
            let t = extend(l, &s, y);
            if best.as_ref().map_or(true, |(_, b)| t.len() > b.len()) {
                let full = t.len() == l.order();
                best = Some((y, t));
                if full {
                    break;
                }
            }
        }
        let Some((y, t)) = best else {
            return s;
        };
        gens.push(y);
        s = t;
    }
}

/// An isomorphism `phi` from `l` to `m` (`phi[x]` is the image of `x`), or
/// `None`. Generators of `l` are mapped to candidates with equal invariants
/// in increasing order, so the result is the one whose generator images are
/// lexicographically least.
pub fn brute_force_isomorphic<A, B>(l: &A, m: &B) -> Result<Option<Vec<usize>>>
where
    A: FiniteLoop + ?Sized,
    B: FiniteLoop + ?Sized,
{
    brute_force_isomorphic_with_budget(l, m, ISOMORPHISM_BUDGET)
}

pub fn brute_force_isomorphic_with_budget<A, B>(l: &A, m: &B, budget: usize) -> Result<Option<Vec<usize>>>
where
    A: FiniteLoop + ?Sized,
    B: FiniteLoop + ?Sized,
{
    let n = l.order();
    if m.order() != n {
        return Ok(None);
    }
    if n > budget {
        return Err(Error::Budget(format!("isomorphism search at order {n} (limit {budget})")));
    }
    let sig_l = signature(l);
    let sig_m = signature(m);
    let mut a = sig_l.clone();
    let mut b = sig_m.clone();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return Ok(None);
    }
    // Central generators first: their images pin down commutator and
    // associator values early, which prunes the later levels.
    let mut gens = Vec::new();
    grow_generators(l, &mut gens, center(l).elements());
    let all: Vec<usize> = (0..n).collect();
    grow_generators(l, &mut gens, &all);
    let mut search = IsoSearch {
        l,
        m,
        gens: &gens,
        sig_l: &sig_l,
        sig_m: &sig_m,
    };
    let mut phi = vec![usize::MAX; n];
    phi[l.identity()] = m.identity();
    Ok(search.run(0, phi))
}

struct IsoSearch<'a, A: ?Sized, B: ?Sized> {
    l: &'a A,
    m: &'a B,
    gens: &'a [usize],
    sig_l: &'a [(usize, usize, usize)],
    sig_m: &'a [(usize, usize, usize)],
}

impl<A: FiniteLoop + ?Sized, B: FiniteLoop + ?Sized> IsoSearch<'_, A, B> {
    fn run(&mut self, depth: usize, phi: Vec<usize>) -> Option<Vec<usize>> {
        if depth == self.gens.len() {
            return Some(phi);
        }
        let g = self.gens[depth];
        let n = self.l.order();
        let mut used = vec![false; n];
        for &x in &phi {
            if x != usize::MAX {
                used[x] = true;
            }
        }
        for cand in 0..n {
            if used[cand] || self.sig_m[cand] != self.sig_l[g] || !self.agrees(&phi, depth, cand) {
                continue;
            }
            let mut next = phi.clone();
            next[g] = cand;
            if self.propagate(&mut next) {
                if let Some(done) = self.run(depth + 1, next) {
                    return Some(done);
                }
            }
        }
        None
    }

    /// Cheap necessary condition for `gens[depth] -> cand`: commutators and
    /// associators with earlier generators that already have images must
    /// map to the matching commutators and associators.
    fn agrees(&self, phi: &[usize], depth: usize, cand: usize) -> bool {
        let (l, m) = (self.l, self.m);
        let g = self.gens[depth];
        let earlier = &self.gens[..depth];
        let fits = |x: usize, y: usize| phi[x] == usize::MAX || phi[x] == y;
        for &a in earlier {
            if !fits(commutator(l, a, g), commutator(m, phi[a], cand)) {
                return false;
            }
            for &b in earlier {
                if !fits(associator(l, a, b, g), associator(m, phi[a], phi[b], cand))
                    || !fits(associator(l, a, g, b), associator(m, phi[a], cand, phi[b]))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Extends `phi` to the subloop generated by its domain, checking that
    /// it stays a well-defined injective homomorphism.
    fn propagate(&self, phi: &mut [usize]) -> bool {
        let n = self.l.order();
        let mut used = vec![false; n];
        let mut domain = Vec::new();
        for (x, &y) in phi.iter().enumerate() {
            if y != usize::MAX {
                if used[y] {
                    return false;
                }
                used[y] = true;
                domain.push(x);
            }
        }
        let mut i = 0;
        while i < domain.len() {
            let a = domain[i];
            for j in 0..=i {
                let b = domain[j];
                for (x, y) in [(a, b), (b, a)] {
                    let prod = self.l.mul(x, y);
                    let img = self.m.mul(phi[x], phi[y]);
                    if phi[prod] == usize::MAX {
                        if used[img] || self.sig_m[img] != self.sig_l[prod] {
                            return false;
                        }
                        used[img] = true;
                        phi[prod] = img;
                        domain.push(prod);
                    } else if phi[prod] != img {
                        return false;
                    }
                }
            }
            i += 1;
        }
        true
    }
}

/// Outcome of [`class2_identities`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: usize,
    pub failure: Option<Violation>,
}

/// For loops whose associators are central: skew symmetry and power
/// linearity of associators, the expansion of `[ab, c]`, the five-term
/// identity and the exchange identity. Three-variable identities run over
/// all of `L`; four-variable ones over representatives of `L/Z(L)`, which
/// is enough because both sides only depend on the cosets.
pub fn class2_identities<L: FiniteLoop + ?Sized>(l: &L) -> IdentityReport {
    let n = l.order();
    let e = l.identity();
    let z = center(l);
    let m = |a, b| l.mul(a, b);
    let inv = |a| l.inv(a);
    let asc = |a, b, c| associator(l, a, b, c);
    let com = |a, b| commutator(l, a, b);
    let powz = |a: usize, k: i64| pow(l, a, k);
    let mut checks = 0usize;
    let fail = |identity: &'static str, witness: Vec<usize>, checks: usize| IdentityReport {
        checks,
        failure: Some(Violation { identity, witness }),
    };

    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                checks += 1;
                let t = asc(a, b, c);
                if !z.contains(t) {
                    return fail("associators are central", vec![a, b, c], checks);
                }
                if t != asc(b, c, a) || t != inv(asc(b, a, c)) {
                    return fail("[a,b,c] = [b,c,a] = [b,a,c]^-1", vec![a, b, c], checks);
                }
                for k in [-1i64, 2, 3] {
                    if asc(powz(a, k), b, c) != powz(t, k) {
                        return fail("[a^n,b,c] = [a,b,c]^n", vec![a, b, c], checks);
                    }
                }
                let ac = com(a, c);
                let rhs = m(m(m(m(ac, com(ac, b)), com(b, c)), t), m(t, t));
                if com(m(a, b), c) != rhs {
                    return fail("[ab,c] = [a,c][[a,c],b][b,c][a,b,c]^3", vec![a, b, c], checks);
                }
            }
        }
    }

    let reps = match quotient(l, &z) {
        Ok(q) => q.representatives,
        Err(_) => (0..n).collect(),
    };
    for &c in &reps {
        for &d in &reps {
            for &f in &reps {
                for &g in &reps {
                    checks += 1;
                    // [cd,e,f] = [c,d,e][c,de,f][d,e,f][c,d,ef]^-1
                    let (ee, ff) = (f, g);
                    let lhs = asc(m(c, d), ee, ff);
                    let rhs = m(m(m(asc(c, d, ee), asc(c, m(d, ee), ff)), asc(d, ee, ff)), inv(asc(c, d, m(ee, ff))));
                    if lhs != rhs {
                        return fail("[cd,e,f] = [c,d,e][c,de,f][d,e,f][c,d,ef]^-1", vec![c, d, ee, ff], checks);
                    }
                    // [wx,y,z] = [wz,y,x][w,x,y][w,y,z][x,y,z]^2
                    let (w, x, y, zz) = (c, d, f, g);
                    let lhs = asc(m(w, x), y, zz);
                    let xyz = asc(x, y, zz);
                    let rhs = m(m(m(asc(m(w, zz), y, x), asc(w, x, y)), asc(w, y, zz)), m(xyz, xyz));
                    if lhs != rhs {
                        return fail("[wx,y,z] = [wz,y,x][w,x,y][w,y,z][x,y,z]^2", vec![w, x, y, zz], checks);
                    }
                }
            }
        }
    }
    let _ = e;
    IdentityReport { checks, failure: None }
}

/// Whether `s` is generated by one element.
pub fn is_cyclic<L: FiniteLoop + ?Sized>(l: &L, s: &Subloop) -> bool {
    s.elements().iter().any(|&x| element_order(l, x) == s.len())
}

/// Summary used by the command-line report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSummary {
    pub order: usize,
    pub moufang: bool,
    pub associative: bool,
    pub class: Option<usize>,
    pub center: usize,
    pub nucleus: usize,
    pub moufang_center: usize,
    pub derived: usize,
    pub associator_subloop: usize,
    pub associator_exponent: usize,
    pub frattini: Option<usize>,
    pub small_frattini: bool,
    pub special: bool,
    pub extraspecial: bool,
}

pub fn summarize<L: FiniteLoop + ?Sized>(l: &L) -> Result<LoopSummary> {
    let n = l.order();
    let moufang = is_moufang(l).is_ok();
    let associative = is_associative(l);
    let class = nilpotency_class(l)?;
    let z = center(l);
    let nuc = nucleus(l);
    let cl = moufang_center(l);
    debug_assert_eq!(z, nuc.intersect(&cl));
    let (lprime, lstar) = derived_subloops(l);
    let phi = frattini(l).ok();
    let p = p_loop_prime(n);
    let small_frattini = match (&phi, p) {
        (Some(f), Some(p)) => p as usize % f.len() == 0,
        _ => false,
    };
    let special = match (&phi, p) {
        (Some(f), Some(_)) => *f == z && z == lprime,
        _ => false,
    };
    let extraspecial = special && z.len() > 1 && is_cyclic(l, &z);
    Ok(LoopSummary {
        order: n,
        moufang,
        associative,
        class,
        center: z.len(),
        nucleus: nuc.len(),
        moufang_center: cl.len(),
        derived: lprime.len(),
        associator_subloop: lstar.len(),
        associator_exponent: exponent(l, &lstar),
        frattini: phi.map(|f| f.len()),
        small_frattini,
        special,
        extraspecial,
    })
}
