//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

use std::time::{Duration, Instant};

use codeloops::algebra::{all_vectors, FpVector};
use codeloops::analysis::{
    associator, brute_force_isomorphic, class2_identities, commutator, derived_subloops, element_orders,
    exponent, frattini, is_associative, is_moufang, is_moufang_sampled, mk_law_holds, summarize,
};
use codeloops::classify::{classify, ClassifyOptions};
use codeloops::code::{builtin_golay24, builtin_hamming734, code_to_cvs, cvs_to_code, parse_code};
use codeloops::coded_loop::ExtensionBudget;
use codeloops::module::random_module;
use codeloops::{random_cvs, CodedLoop, CodedModule, Cvs, FiniteLoop, LoopTable, ValidationBudget};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Check)> = vec![
        ("octonion reconstruction", Duration::from_secs(1), octonions),
        ("length-67 construction", Duration::from_secs(1), length_67),
        ("round trip at scale", Duration::from_secs(10), round_trip),
        ("Parker loop", Duration::from_secs(60), parker),
        ("classification dim 3 over F_3", Duration::from_secs(30), classify_dim3),
        ("classification dim 4 over F_3", Duration::from_secs(600), classify_dim4),
        ("associator exponent divides 6", Duration::from_secs(120), associator_exponents),
        ("M_k law on the 81-element loop", Duration::from_secs(30), mk_law),
        ("isotopes are adjoint translates", Duration::from_secs(300), isotopes_are_translates),
        ("G-loop check", Duration::from_secs(120), g_loops),
        ("class-2 identity battery", Duration::from_secs(120), identity_battery),
        ("coded modules", Duration::from_secs(60), coded_modules),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{elapsed:.2?} < {limit:?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria passed");
}

fn octonion_loop() -> Result<CodedLoop, String> {
    let cvs = code_to_cvs(&builtin_hamming734()).map_err(err)?;
    CodedLoop::build(&cvs).map_err(err)
}

fn octonions() -> Check {
    let l = octonion_loop()?;
    ensure(l.order() == 16, || format!("order {}", l.order()))?;
    is_moufang(&l).map_err(|v| format!("{} fails at {:?}", v.identity, v.witness))?;
    ensure(!is_associative(&l), || "associative".into())?;
    let s = summarize(&l).map_err(err)?;
    ensure(s.center == 2 && s.nucleus == 2 && s.frattini == Some(2), || {
        format!("|Z|={} |N|={} |Phi|={:?}", s.center, s.nucleus, s.frattini)
    })?;
    let z = codeloops::analysis::center(&l);
    let orders = element_orders(&l);
    let outside: Vec<usize> = (0..16).filter(|&x| !z.contains(x)).map(|x| orders[x]).collect();
    ensure(outside.len() == 14 && outside.iter().all(|&o| o == 4), || {
        format!("orders outside Z: {outside:?}")
    })?;
    ensure(s.extraspecial, || "not extraspecial".into())?;
    Ok("order 16, Moufang on 4096 triples, |Z|=|N|=|Phi|=2, 14 elements of order 4, extraspecial".into())
}

fn length_67() -> Check {
    let cvs = code_to_cvs(&builtin_hamming734()).map_err(err)?;
    let code = cvs_to_code(&cvs).map_err(err)?;
    ensure(code.length() == 67, || format!("length {}", code.length()))?;
    ensure(code.is_doubly_even_exhaustive() == Some(true), || "not doubly even".into())?;
    let reparsed = parse_code(&code.emit()).map_err(err)?;
    let back = code_to_cvs(&reparsed).map_err(err)?;
    ensure(back == cvs, || format!("round trip differs:\n{}", back.emit()))?;
    Ok("doubly even [67,3] code, code2cvs recovers the tables".into())
}

fn round_trip() -> Check {
    let budget = ValidationBudget {
        exhaustive_limit: 32,
        ..ValidationBudget::default()
    };
    let mut checks = 0;
    for seed in 0..100u64 {
        let dim = 1 + (seed % 5) as usize;
        let cvs = random_cvs(2, dim, seed).map_err(err)?;
        let back = code_to_cvs(&cvs_to_code(&cvs).map_err(err)?).map_err(err)?;
        ensure(
            back.sigma_basis() == cvs.sigma_basis()
                && back.chi_table() == cvs.chi_table()
                && back.alpha_table() == cvs.alpha_table(),
            || format!("seed {seed}: tables differ"),
        )?;
        let report = cvs.validate_axioms(&budget);
        ensure(report.exhaustive && report.passed(), || {
            format!("seed {seed}: {:?}", report.failure)
        })?;
        checks += report.tuples_checked;
    }
    Ok(format!("100 spaces, dims 1-5, {checks} exhaustive evaluator checks"))
}

fn parker() -> Check {
    let golay = builtin_golay24();
    ensure(golay.length() == 24 && golay.dimension() == 12, || "not [24,12]".into())?;
    ensure(golay.minimum_weight().map_err(err)? == Some(8), || "minimum weight".into())?;
    ensure(golay.is_doubly_even_exhaustive() == Some(true), || "not doubly even".into())?;
    let dist = golay.weight_distribution().map_err(err)?;
    let nonzero: Vec<(usize, u64)> = dist.iter().enumerate().filter(|(_, &n)| n > 0).map(|(w, &n)| (w, n)).collect();
    ensure(nonzero == vec![(0, 1), (8, 759), (12, 2576), (16, 759), (24, 1)], || {
        format!("weights {nonzero:?}")
    })?;
    let l = CodedLoop::build(&code_to_cvs(&golay).map_err(err)?).map_err(err)?;
    ensure(l.order() == 8192, || format!("order {}", l.order()))?;
    let report = l.verify_coded_extension(&ExtensionBudget {
        exhaustive_limit: 0,
        samples: 100_000,
        seed: 24,
    });
    ensure(report.passed(), || format!("{:?}", report.failure))?;
    is_moufang_sampled(&l, 100_000, 24).map_err(|v| format!("{} fails at {:?}", v.identity, v.witness))?;
    let gens: Vec<usize> = (0..12).map(|i| l.index_of(&l.generator(i).unwrap())).collect();
    let g = &gens;
    let witness = g
        .iter()
        .flat_map(|&a| g.iter().flat_map(move |&b| g.iter().map(move |&c| (a, b, c))))
        .find(|&(a, b, c)| associator(&l, a, b, c) != 0)
        .ok_or("all generator associators trivial")?;
    Ok(format!(
        "[24,12,8] weights 1/759/2576/759/1, order 8192, {} extension checks, nontrivial associator at {witness:?}",
        report.checks
    ))
}

fn classify_dim3() -> Check {
    let c = classify(&ClassifyOptions {
        p: 3,
        dim: 3,
        exponent: 3,
        nonassociative: true,
        prune_alpha: true,
    })
    .map_err(err)?;
    ensure(c.classes.len() == 2 && c.isotopy_classes.len() == 1, || {
        format!("{} classes, {} isotopy classes", c.classes.len(), c.isotopy_classes.len())
    })?;
    Ok("2 isomorphism classes, 1 isotopy class".into())
}

fn classify_dim4() -> Check {
    let c = classify(&ClassifyOptions {
        p: 3,
        dim: 4,
        exponent: 3,
        nonassociative: true,
        prune_alpha: true,
    })
    .map_err(err)?;
    ensure(c.classes.len() == 4 && c.isotopy_classes.len() == 2, || {
        format!("{} classes, {} isotopy classes", c.classes.len(), c.isotopy_classes.len())
    })?;
    let mut cases: Vec<&str> = c.classes.iter().map(|k| k.invariants.dim4_case(4)).collect();
    cases.sort();
    ensure(
        cases
            == [
                "chi-nondegenerate",
                "chi-trivial",
                "rad-chi-contains-rad-alpha",
                "rad-chi-misses-rad-alpha",
            ],
        || format!("cases {cases:?}"),
    )?;
    let mut groups: Vec<Vec<&str>> = c
        .isotopy_classes
        .iter()
        .map(|g| {
            let mut v: Vec<&str> = g.iter().map(|&i| cases_of(&c, i)).collect();
            v.sort();
            v
        })
        .collect();
    groups.sort();
    Ok(format!("4 classes ({}), isotopy classes {groups:?}", cases.join(", ")))
}

fn cases_of(c: &codeloops::classify::Classification, i: usize) -> &'static str {
    c.classes[i].invariants.dim4_case(4)
}

/// Built loops used by the structural criteria.
fn corpus() -> Result<Vec<(String, u32, CodedLoop)>, String> {
    let mut out = vec![("octonions".to_string(), 2, octonion_loop()?)];
    for (p, dims) in [(2u32, 2..=6usize), (3, 2..=5)] {
        for dim in dims {
            for seed in 0..2u64 {
                let cvs = random_cvs(p, dim, 100 * dim as u64 + seed).map_err(err)?;
                out.push((format!("random p={p} dim={dim} seed={seed}"), p, CodedLoop::build(&cvs).map_err(err)?));
            }
        }
    }
    let m = CodedModule::new(3, &[9, 3, 3], 9, &[3, 0, 0], &[(1, 2, 3)], &[(0, 1, 2, 3)]).map_err(err)?;
    out.push(("module Z9+Z3+Z3 over Z9".into(), 3, m.build().map_err(err)?));
    for seed in 0..2u64 {
        let m = random_module(2, &[4, 2, 2], 2, seed).map_err(err)?;
        out.push((format!("module Z4+Z2+Z2 seed={seed}"), 2, m.build().map_err(err)?));
    }
    Ok(out)
}

fn associator_exponents() -> Check {
    let corpus = corpus()?;
    let mut nonassoc = 0;
    for (name, p, l) in &corpus {
        let table = LoopTable::from_loop(l).map_err(err)?;
        let (_, lstar) = derived_subloops(&table);
        let e = exponent(&table, &lstar);
        ensure(6 % e == 0 && (*p as usize) % e == 0, || format!("{name}: exp(L*) = {e}"))?;
        if e > 1 {
            nonassoc += 1;
        }
    }
    let cvs = random_cvs(5, 3, 5).map_err(err)?;
    ensure(cvs.alpha_is_zero(), || "alpha nonzero over F_5".into())?;
    let l = CodedLoop::build(&cvs).map_err(err)?;
    let table = LoopTable::from_loop(&l).map_err(err)?;
    ensure(table.order() == 625, || format!("order {}", table.order()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1_000_000 {
        let (a, b, c) = (rng.gen_range(0..625), rng.gen_range(0..625), rng.gen_range(0..625));
        let lhs = table.mul(table.mul(a, b), c);
        ensure(lhs == table.mul(a, table.mul(b, c)), || format!("({a}{b}){c} != {a}({b}{c})"))?;
    }
    Ok(format!(
        "{} corpus loops ({nonassoc} nonassociative), p=5 dim 3 loop of order 625 associative on 10^6 triples with alpha = 0",
        corpus.len()
    ))
}

fn mk_law() -> Check {
    let cvs = Cvs::new(3, 3, &[0, 0, 0], &[], &[(0, 1, 2, 1)]).map_err(err)?;
    let l = CodedLoop::build(&cvs).map_err(err)?;
    let table = LoopTable::from_loop(&l).map_err(err)?;
    ensure(table.order() == 81, || format!("order {}", table.order()))?;
    ensure((0..81).all(|a| (0..81).all(|b| commutator(&table, a, b) == 0)), || "not commutative".into())?;
    ensure(!is_associative(&table), || "associative".into())?;
    let holds: Vec<i64> = (1..=6).filter(|&k| mk_law_holds(&table, k)).collect();
    ensure(holds == [1, 4], || format!("M_k holds for {holds:?}"))?;
    Ok("M_k holds exactly for k in {1, 4}".into())
}

/// `c o d = (c k)(k^-1 d)` on a table.
fn isotope_table<L: FiniteLoop>(l: &L, k: usize) -> Result<LoopTable, String> {
    let ki = l.inv(k);
    LoopTable::from_fn(l.order(), |c, d| l.mul(l.mul(c, k), l.mul(ki, d))).map_err(err)
}

fn isotopes_are_translates() -> Check {
    let mut spaces = Vec::new();
    for sigma in [[0u32, 0, 0], [1, 0, 0], [1, 2, 1]] {
        for chi in all_vectors(&[3, 3, 3]) {
            for a in [1u32, 2] {
                spaces.push(Cvs::from_tables(3, 3, &sigma, chi.coords(), &[a]).map_err(err)?);
            }
        }
    }
    let mut isomorphisms = 0;
    for cvs in &spaces {
        let base = CodedLoop::build(cvs).map_err(err)?;
        let base_table = LoopTable::from_loop(&base).map_err(err)?;
        let vectors: Vec<FpVector> = all_vectors(&cvs.moduli()).collect();
        for kappa in &vectors {
            let iso = base.kappa_isotope(kappa).map_err(err)?;
            let t = LoopTable::from_loop(&iso).map_err(err)?;
            let at = |v: &FpVector| v.rank();
            let z = |x: usize| (x / 27) as u32;
            for c in &vectors {
                let power = t.mul(t.mul(at(c), at(c)), at(c));
                ensure(power % 27 == 0 && z(power) == cvs.eval_sigma(c).unwrap().value(), || {
                    format!("power of {:?} with kappa {:?}", c.coords(), kappa.coords())
                })?;
                for d in &vectors {
                    let want = (cvs.eval_chi(c, d).unwrap().value() + 3
                        - cvs.eval_alpha(c, kappa, d).unwrap().value())
                        % 3;
                    let got = commutator(&t, at(c), at(d));
                    ensure(got % 27 == 0 && z(got) == want, || {
                        format!("commutator {:?},{:?} with kappa {:?}", c.coords(), d.coords(), kappa.coords())
                    })?;
                    for e in &vectors {
                        let got = associator(&t, at(c), at(d), at(e));
                        ensure(got % 27 == 0 && z(got) == cvs.eval_alpha(c, d, e).unwrap().value(), || {
                            format!("associator with kappa {:?}", kappa.coords())
                        })?;
                    }
                }
            }
            let translate = CodedLoop::build(&cvs.adjoint_translate(&kappa.neg()).map_err(err)?).map_err(err)?;
            let translate = LoopTable::from_loop(&translate).map_err(err)?;
            let from_ops = isotope_table(&base_table, at(kappa))?;
            ensure(brute_force_isomorphic(&from_ops, &translate).map_err(err)?.is_some(), || {
                format!("isotope by {:?} not isomorphic to the translate\n{}", kappa.coords(), cvs.emit())
            })?;
            isomorphisms += 1;
        }
    }
    Ok(format!(
        "{} spaces x 27 kappa, exhaustive power/commutator/associator, {isomorphisms} isomorphisms found",
        spaces.len()
    ))
}

fn g_loops() -> Check {
    let oct = octonion_loop()?;
    let sfm = (0..)
        .map(|seed| random_cvs(2, 4, seed))
        .find(|c| c.as_ref().map(|c| !c.alpha_is_zero()).unwrap_or(true))
        .unwrap()
        .map_err(err)?;
    let sfm = CodedLoop::build(&sfm).map_err(err)?;
    let phi = frattini(&sfm).map_err(err)?;
    ensure(sfm.order() == 32 && phi.len() <= 2, || format!("order {}, |Phi| {}", sfm.order(), phi.len()))?;
    let mut count = 0;
    for l in [&oct, &sfm] {
        for k in 0..l.order() {
            let t = isotope_table(l, k)?;
            ensure(brute_force_isomorphic(&t, l).map_err(err)?.is_some(), || {
                format!("isotope by element {k} of a loop of order {} not isomorphic", l.order())
            })?;
            count += 1;
        }
    }
    Ok(format!("all {count} isotopes of the octonion loop and a 32-element loop are isomorphic to it"))
}

fn identity_battery() -> Check {
    let mut checked = 0;
    let mut loops = 0;
    for (name, _, l) in corpus()? {
        if l.order() > 256 {
            continue;
        }
        let table = LoopTable::from_loop(&l).map_err(err)?;
        let report = class2_identities(&table);
        if let Some(v) = report.failure {
            return Err(format!("{name}: {} fails at {:?}", v.identity, v.witness));
        }
        checked += report.checks;
        loops += 1;
    }
    Ok(format!("{loops} loops of order <= 256, {checked} identity checks"))
}

fn coded_modules() -> Check {
    let budget = ValidationBudget {
        exhaustive_limit: 16,
        ..ValidationBudget::default()
    };
    let mut built = 0;
    for (i, orders) in [[4u32, 2], [8, 2]].iter().enumerate() {
        for seed in 0..25u64 {
            let m = random_module(2, orders, 2, 1000 * i as u64 + seed).map_err(err)?;
            let report = m.validate_axioms(&budget);
            ensure(report.exhaustive && report.passed(), || {
                format!("{orders:?} seed {seed}: {:?}", report.failure)
            })?;
            let l = m.build().map_err(err)?;
            for (j, &q) in orders.iter().enumerate() {
                let x = l.index_of(&l.generator(j).map_err(err)?);
                let want = l.index_of(&l.central(m.z_values()[j] as i64));
                ensure(l.pow_index(x, q as i64) == want, || format!("{orders:?} seed {seed}: x_{j}^{q}"))?;
            }
            is_moufang(&l).map_err(|v| format!("{orders:?} seed {seed}: {}", v.identity))?;
            built += 1;
        }
    }
    Ok(format!("{built} modules over Z4+Z2 and Z8+Z2, axioms exhaustive, x_i^q_i = z_i"))
}
