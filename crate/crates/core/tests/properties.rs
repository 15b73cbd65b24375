mod support;

use csr_core::equivalence::replay;
use csr_core::genprop::{generate, instance, random_term, GenMode, GenParams};
use csr_core::transitions::singles;
use csr_core::{
    check, check_with, maximal_bisimulation_with, translate, validate, verify_relation,
    CheckOptions, ConfigStructure, Direction, EquivalenceKind as K,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracle;

fn small_pair(seed: u64, index: u64, max_events: usize) -> (ConfigStructure, ConfigStructure) {
    let i = instance(seed, index, max_events).unwrap();
    (i.left, i.right)
}

fn kind() -> impl Strategy<Value = K> {
    proptest::sample::select(K::ALL.to_vec())
}

fn mode() -> impl Strategy<Value = GenMode> {
    proptest::sample::select(vec![GenMode::PrimeEs, GenMode::Rejection, GenMode::Gadget])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translated_terms_are_stable(seed: u64, events in 0usize..9, alphabet in 1usize..4) {
        let t = random_term(&mut ChaCha8Rng::seed_from_u64(seed), events, alphabet);
        let s = translate(&t).unwrap();
        prop_assert!(validate(&s).unwrap().stable(), "{}", t);
        prop_assert_eq!(s.num_events(), events);
    }

    #[test]
    fn generated_structures_are_stable(seed: u64, mode in mode(), max_events in 3usize..8) {
        let s = generate(&GenParams { seed, mode, max_events, ..GenParams::default() }).unwrap();
        prop_assert!(validate(&s).unwrap().stable());
        prop_assert!(s.num_events() <= max_events);
    }

    #[test]
    fn exchange_format_round_trips(seed: u64, mode in mode()) {
        let s = generate(&GenParams { seed, mode, ..GenParams::default() }).unwrap();
        let back = ConfigStructure::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), s.to_json());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn reverse_singles_invert_forward_singles(seed: u64, mode in mode()) {
        let s = generate(&GenParams { seed, mode, ..GenParams::default() }).unwrap();
        for &x in s.configurations() {
            for m in singles(&s, x, Direction::Forward).unwrap() {
                let back = singles(&s, m.target, Direction::Reverse).unwrap();
                prop_assert!(back.iter().any(|r| r.target == x && r.kind == m.kind));
            }
        }
    }

    #[test]
    fn equivalences_are_reflexive_and_symmetric(seed: u64, index in 0u64..64, kind in kind()) {
        let (c, d) = small_pair(seed, index, 6);
        prop_assert!(check(kind, &c, &c, false).unwrap().equivalent);
        prop_assert_eq!(
            check(kind, &c, &d, false).unwrap().equivalent,
            check(kind, &d, &c, false).unwrap().equivalent
        );
    }

    #[test]
    fn prefilter_does_not_change_the_fixpoint(seed: u64, index in 0u64..64, kind in kind()) {
        let (c, d) = small_pair(seed, index, 6);
        let with = |prefilter| CheckOptions { prefilter, ..CheckOptions::default() };
        let a = maximal_bisimulation_with(kind, &c, &d, &with(true)).unwrap();
        let b = maximal_bisimulation_with(kind, &c, &d, &with(false)).unwrap();
        prop_assert_eq!(&a.pairs, &b.pairs);
        prop_assert_eq!(a.triples.len(), b.triples.len());
    }

    #[test]
    fn fixpoints_certify_and_witnesses_replay(seed: u64, index in 0u64..64, kind in kind()) {
        let (c, d) = small_pair(seed, index, 6);
        let v = check_with(kind, &c, &d, &CheckOptions { witness: true, ..CheckOptions::default() }).unwrap();
        if v.equivalent {
            let r = maximal_bisimulation_with(kind, &c, &d, &CheckOptions::default()).unwrap();
            prop_assert!(verify_relation(kind, &c, &d, &r).is_ok());
        } else {
            let w = v.witness.as_ref().unwrap();
            prop_assert!(replay(kind, &c, &d, w).is_ok());
        }
    }

    #[test]
    fn inclusions_hold(seed: u64, index in 0u64..64) {
        let (c, d) = small_pair(seed, index, 6);
        let v = |k| check(k, &c, &d, false).unwrap().equivalent;
        let implies = |a: bool, b: bool| !a || b;
        prop_assert!(implies(v(K::Hh), v(K::Rsb)));
        prop_assert!(implies(v(K::Rsb), v(K::Rb)));
        prop_assert!(implies(v(K::Rsb), v(K::Sb)));
        prop_assert!(implies(v(K::Rb), v(K::Ib)));
        prop_assert!(implies(v(K::Sb), v(K::Ib)));
        prop_assert!(implies(v(K::Db), v(K::Sb)));
        prop_assert!(implies(v(K::Rdb), v(K::Rsb)));
        prop_assert_eq!(v(K::Rsb), v(K::Rhsb));
        prop_assert_eq!(v(K::Rsb), v(K::Rhesb));
        prop_assert_eq!(v(K::Rsb), v(K::Rdb));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn checker_agrees_with_oracle(seed: u64, index in 0u64..64, kind in kind()) {
        let (c, d) = small_pair(seed, index, if kind == K::Hh { 4 } else { 5 });
        let fast = check(kind, &c, &d, false).unwrap().equivalent;
        let slow = if kind == K::Hh { oracle::hh_bisimilar(&c, &d) } else { oracle::bisimilar(kind, &c, &d) };
        prop_assert_eq!(Some(fast), slow);
    }
}

#[test]
fn oracle_reproduces_classic_verdicts() {
    for e in csr_core::corpus::entries() {
        let (c, d) = e.structures().unwrap();
        for kind in K::ALL {
            let got = if kind == K::Hh {
                oracle::hh_bisimilar(&c, &d)
            } else {
                oracle::bisimilar(kind, &c, &d)
            };
            assert_eq!(got, Some(e.expected(kind)), "{kind} on {}", e.name);
        }
    }
}

#[test]
fn full_enumeration_agrees_with_search_on_classic_pairs() {
    for e in csr_core::corpus::entries() {
        let (c, d) = e.structures().unwrap();
        for kind in K::ALL.into_iter().filter(|&k| k != K::Hh) {
            if let Some(all) = oracle::enumerate_all(kind, &c, &d, 16) {
                assert_eq!(all, e.expected(kind), "{kind} on {}", e.name);
            }
        }
    }
}
