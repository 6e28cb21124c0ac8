use proptest::prelude::*;

use codeloops::algebra::{all_vectors, FpVector};
use codeloops::analysis::{is_moufang, nilpotency_class, normal_closure};
use codeloops::code::{code_to_cvs, cvs_to_code, parse_code};
use codeloops::module::{parse_module, random_module};
use codeloops::word::{eval_word, parse_word, Word};
use codeloops::{iso_up_to_scalar, parse_cvs, random_cvs, CodedLoop, LoopTable, ValidationBudget};

fn small_space() -> impl Strategy<Value = (u32, usize, u64)> {
    (prop_oneof![Just(2u32), Just(3)], 1usize..=3, any::<u64>())
}

fn word(depth: u32) -> BoxedStrategy<Word> {
    let leaf = prop_oneof![(0usize..3).prop_map(Word::Generator), Just(Word::Central)];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Word::Product(Box::new(a), Box::new(b))),
            (inner.clone(), -4i64..5).prop_map(|(a, n)| Word::Power(Box::new(a), n)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Word::Commutator(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), inner)
                .prop_map(|(a, b, c)| Word::Associator(Box::new(a), Box::new(b), Box::new(c))),
        ]
    })
    .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_spaces_satisfy_axioms((p, k, seed) in small_space()) {
        let cvs = random_cvs(p, k, seed).unwrap();
        let report = cvs.validate_axioms(&ValidationBudget { exhaustive_limit: 27, ..ValidationBudget::default() });
        prop_assert!(report.passed(), "{:?}", report.failure);
    }

    #[test]
    fn built_loops_are_moufang_of_class_at_most_two((p, k, seed) in small_space()) {
        let cvs = random_cvs(p, k, seed).unwrap();
        let l = CodedLoop::build(&cvs).unwrap();
        let t = LoopTable::from_loop(&l).unwrap();
        prop_assert!(is_moufang(&t).is_ok());
        let class = nilpotency_class(&t).unwrap();
        prop_assert!(matches!(class, Some(c) if c <= 2), "class {class:?}");
        // the central coordinate is a normal subloop of order p
        let z = l.index_of(&l.central(1));
        prop_assert_eq!(normal_closure(&t, &[z]).len(), p as usize);
    }

    #[test]
    fn space_text_round_trips((p, k, seed) in small_space()) {
        let cvs = random_cvs(p, k, seed).unwrap();
        prop_assert_eq!(parse_cvs(&cvs.emit()).unwrap(), cvs);
    }

    #[test]
    fn codes_round_trip(k in 1usize..=4, seed in any::<u64>()) {
        let cvs = random_cvs(2, k, seed).unwrap();
        let code = cvs_to_code(&cvs).unwrap();
        prop_assert!(code.is_doubly_even());
        let code = parse_code(&code.emit()).unwrap();
        prop_assert_eq!(code_to_cvs(&code).unwrap(), cvs);
    }

    #[test]
    fn tables_round_trip_through_csv((p, k, seed) in small_space()) {
        let l = CodedLoop::build(&random_cvs(p, k, seed).unwrap()).unwrap();
        let t = LoopTable::from_loop(&l).unwrap().with_meta(p, k);
        let back = LoopTable::parse_csv(&t.to_csv()).unwrap();
        prop_assert_eq!(back.entries(), t.entries());
        prop_assert_eq!(back.meta(), Some((p, k)));
    }

    #[test]
    fn translation_is_invertible(seed in any::<u64>(), coords in proptest::collection::vec(0i64..3, 3)) {
        let cvs = random_cvs(3, 3, seed).unwrap();
        let kappa = FpVector::new(&coords, &cvs.moduli()).unwrap();
        let there = cvs.adjoint_translate(&kappa).unwrap();
        prop_assert_eq!(there.adjoint_translate(&kappa.neg()).unwrap(), cvs.clone());
        prop_assert_eq!(there.alpha_table(), cvs.alpha_table());
    }

    #[test]
    fn changes_of_basis_are_found((p, k, seed) in small_space(), shift in 1u32..3) {
        let cvs = random_cvs(p, k, seed).unwrap();
        // e_i -> e_i + shift * e_{i+1}, which is invertible
        let images: Vec<Vec<u32>> = (0..k)
            .map(|i| (0..k).map(|j| if j == i { 1 } else if j == i + 1 { shift % p } else { 0 }).collect())
            .collect();
        let moved = cvs.pullback(&images, 1);
        prop_assert!(iso_up_to_scalar(&cvs, &moved).unwrap().is_some());
    }

    #[test]
    fn modules_round_trip(seed in any::<u64>()) {
        let m = random_module(2, &[4, 2], 2, seed).unwrap();
        prop_assert_eq!(parse_module(&m.emit()).unwrap(), m);
    }

    #[test]
    fn rendered_words_reparse(w in word(4)) {
        prop_assert_eq!(parse_word(&w.render()).unwrap(), w);
    }

    #[test]
    fn words_evaluate_consistently(w in word(3), seed in any::<u64>()) {
        let l = CodedLoop::build(&random_cvs(2, 3, seed).unwrap()).unwrap();
        let once = eval_word(&w, &l).unwrap();
        let again = eval_word(&parse_word(&w.render()).unwrap(), &l).unwrap();
        prop_assert_eq!(&once, &again);
        prop_assert!(l.index_of(&once) < l.order());
    }
}

#[test]
fn every_small_vector_is_ranked_once() {
    let moduli = [3, 2, 4];
    let ranks: Vec<usize> = all_vectors(&moduli).map(|v| v.rank()).collect();
    assert_eq!(ranks, (0..24).collect::<Vec<_>>());
}
