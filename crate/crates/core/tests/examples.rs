mod support;

use csr_core::transitions::{depth_singles, singles, special_steps, steps};
use csr_core::{
    auto_concurrency, causality, depths, lift, maximal_bisimulation, minimal_events, parse, slice,
    slice_leq, validate, verify_relation, CandidateRelation, ConfigStructure, Configuration,
    Direction, EquivalenceKind as K, EventId, Label, MoveKind, StepConstraint, Term,
};
use support::oracle::Naive;
use support::term;

fn cfg(s: &ConfigStructure, ids: &[&str]) -> Configuration {
    s.configuration(ids).unwrap()
}

fn full(s: &ConfigStructure) -> Configuration {
    *s.configurations().last().unwrap()
}

fn event(s: &ConfigStructure, id: &str) -> usize {
    s.event_index(id).unwrap()
}

#[test]
fn trivial_structures_validate() {
    let empty_only = ConfigStructure::new(vec![], vec![Vec::<String>::new()]).unwrap();
    assert!(validate(&empty_only).unwrap().stable());

    let ev = |id: &str| (EventId::new(id).unwrap(), Label::new("a").unwrap());
    let jump =
        ConfigStructure::new(vec![ev("e1"), ev("e2")], vec![vec![], vec!["e1", "e2"]]).unwrap();
    let r = validate(&jump).unwrap();
    assert_eq!(r.connected.witness(), Some(&cfg(&jump, &["e1", "e2"])));
    assert!(!r.stable());
}

#[test]
fn causality_matches_the_definition() {
    let chain = term("a.a");
    let x = cfg(&chain, &["e1", "e2"]);
    let o = causality(&chain, x).unwrap();
    assert!(o.lt(0, 1) && o.concurrent_pairs().is_empty());

    let par = term("a | a");
    assert!(causality(&par, full(&par)).unwrap().concurrent(0, 1));

    let d = csr_core::corpus::or_causation();
    let x = cfg(&d, &["0", "b"]);
    let naive = Naive::new(&d);
    let (zero, b) = (event(&d, "0"), event(&d, "b"));
    assert!(naive.lt(x.bits(), zero, b));
    assert!(causality(&d, x).unwrap().lt(zero, b));
}

#[test]
fn causal_order_and_depth_agree_with_naive_definitions() {
    for t in [
        "a | b.a",
        "(a | (b + c)) + (a | b) + ((a + c) | b)",
        "a.(b | c.a) + b",
        "(a.b | c) | a",
    ] {
        let s = term(t);
        let naive = Naive::new(&s);
        for &x in s.configurations() {
            let o = causality(&s, x).unwrap();
            let dm = depths(&s, x).unwrap();
            for d in x.iter() {
                assert_eq!(dm.get(d), Some(naive.depth(x.bits(), d)), "{t}");
                for e in x.iter() {
                    assert_eq!(o.lt(d, e), naive.lt(x.bits(), d, e), "{t}");
                }
            }
        }
    }
}

#[test]
fn depths_of_chains_and_mixed_terms() {
    let chain = term("a.a");
    let dm = depths(&chain, full(&chain)).unwrap();
    assert_eq!((dm.get(0), dm.get(1)), (Some(1), Some(2)));

    let mixed = term("a | b.a");
    let dm = depths(&mixed, full(&mixed)).unwrap();
    let mut a_depths: Vec<usize> = (0..3)
        .filter(|&e| mixed.label(e).as_str() == "a")
        .map(|e| dm.get(e).unwrap())
        .collect();
    a_depths.sort();
    assert_eq!(a_depths, vec![1, 2]);

    for t in ["a | b.a", "a.(b | c)", "(a + b) | c.d"] {
        let s = term(t);
        for &x in s.configurations() {
            let dm = depths(&s, x).unwrap();
            for e in minimal_events(&s, x).unwrap().iter() {
                assert_eq!(dm.get(e), Some(1));
            }
        }
    }
}

#[test]
fn minimal_events_and_slices() {
    let chain = term("a.a");
    let x = full(&chain);
    assert_eq!(minimal_events(&chain, x).unwrap(), cfg(&chain, &["e1"]));
    assert_eq!(slice_leq(&chain, x, 1).unwrap(), cfg(&chain, &["e1"]));
    assert_eq!(
        slice(&chain, x, 2, 2).unwrap(),
        chain.event_set(&["e2"]).unwrap()
    );

    let par = term("a | a");
    assert_eq!(minimal_events(&par, full(&par)).unwrap(), full(&par));
    assert_eq!(
        minimal_events(&par, Configuration::EMPTY).unwrap(),
        Configuration::EMPTY
    );

    let mixed = term("a | b.a");
    let x = full(&mixed);
    let dm = depths(&mixed, x).unwrap();
    let first_level: Configuration = x.iter().filter(|&e| dm.get(e) == Some(1)).collect();
    assert_eq!(slice(&mixed, x, 1, 1).unwrap(), first_level);
    let labels: Vec<&str> = first_level
        .iter()
        .map(|e| mixed.label(e).as_str())
        .collect();
    assert_eq!(labels.len(), 2);
    assert!(labels.contains(&"a") && labels.contains(&"b"));
}

#[test]
fn lifting_by_direct_enumeration() {
    let chain = term("a.a");
    let m = cfg(&chain, &["e1"]);
    let l = lift(&chain, m).unwrap();
    // residuals X \ M of configurations X with min X = M
    let expected: Vec<Vec<String>> = chain
        .configurations()
        .iter()
        .filter(|&&x| m.is_subset(x) && minimal_events(&chain, x).unwrap() == m)
        .map(|&x| {
            chain
                .ids(x.difference(m))
                .iter()
                .map(|i| i.as_str().to_string())
                .collect()
        })
        .collect();
    let got: Vec<Vec<String>> = l
        .configurations()
        .iter()
        .map(|&x| l.ids(x).iter().map(|i| i.as_str().to_string()).collect())
        .collect();
    assert_eq!(got, expected);
    assert_eq!(got, vec![vec![], vec!["e2".to_string()]]);
    assert_eq!(l.label(0).as_str(), "a");

    assert_eq!(
        lift(&chain, Configuration::EMPTY)
            .unwrap()
            .num_configurations(),
        1
    );
    let par = term("a | a");
    assert_eq!(lift(&par, full(&par)).unwrap().num_configurations(), 1);
}

#[test]
fn auto_concurrency_examples() {
    let r = auto_concurrency(&term("a | a")).unwrap();
    assert!(r.has_auto_concurrency() && r.has_equidepth_auto_concurrency());
    let r = auto_concurrency(&term("a | b.a")).unwrap();
    assert!(r.has_auto_concurrency() && !r.has_equidepth_auto_concurrency());
    let r = auto_concurrency(&term("a.a")).unwrap();
    assert!(!r.has_auto_concurrency() && !r.has_equidepth_auto_concurrency());
}

#[test]
fn parsing_and_translation_sizes() {
    let t = parse("a.b + b.a").unwrap();
    let pre = |a: &str, body| Term::prefix(Label::new(a).unwrap(), body);
    assert_eq!(
        t,
        Term::choice(pre("a", pre("b", Term::Nil)), pre("b", pre("a", Term::Nil)))
    );
    assert!(parse("a..b").is_err());

    let sizes = |t: &str| {
        let s = term(t);
        (s.num_events(), s.num_configurations())
    };
    assert_eq!(sizes("a | a"), (2, 4));
    assert_eq!(sizes("a.a"), (2, 3));
    // a.b + b.a: ∅, {a1}, {a1,b1}, {b2}, {b2,a2}
    let interleaved = term("a.b + b.a");
    let naive_count = (0u64..1 << interleaved.num_events())
        .filter(|&bits| interleaved.contains(Configuration::from_bits(bits)))
        .count();
    assert_eq!((interleaved.num_events(), naive_count), (4, 5));
    assert!(
        csr_core::check(K::Ib, &interleaved, &term("a | b"), false)
            .unwrap()
            .equivalent
    );
}

#[test]
fn single_and_step_moves() {
    let par = term("a | a");
    assert_eq!(
        singles(&par, Configuration::EMPTY, Direction::Forward)
            .unwrap()
            .len(),
        2
    );
    let st = steps(&par, Configuration::EMPTY, Direction::Forward).unwrap();
    assert!(st
        .iter()
        .any(|m| m.target == full(&par) && m.events().len() == 2));

    let chain = term("a.a");
    let x = full(&chain);
    let rev = singles(&chain, x, Direction::Reverse).unwrap();
    assert_eq!(rev.len(), 1);
    assert_eq!(rev[0].events(), chain.event_set(&["e2"]).unwrap());
    assert!(singles(&chain, x, Direction::Forward).unwrap().is_empty());
    assert!(steps(&chain, Configuration::EMPTY, Direction::Forward)
        .unwrap()
        .iter()
        .all(|m| m.events().len() == 1));

    let mixed = term("(a | a) + a.a");
    let chain_top: Vec<Configuration> = mixed
        .configurations()
        .iter()
        .copied()
        .filter(|&x| x.len() == 2 && causality(&mixed, x).unwrap().concurrent_pairs().is_empty())
        .collect();
    assert_eq!(chain_top.len(), 1);
    assert!(steps(&mixed, chain_top[0], Direction::Reverse)
        .unwrap()
        .iter()
        .all(|m| m.events().len() == 1));
}

#[test]
fn depth_indexed_and_special_steps() {
    let chain = term("a.a");
    let first = depth_singles(&chain, Configuration::EMPTY, Direction::Forward).unwrap();
    assert_eq!(first.len(), 1);
    assert!(matches!(&first[0].kind, MoveKind::DepthSingle(a, 1) if a.as_str() == "a"));
    let second = depth_singles(&chain, first[0].target, Direction::Forward).unwrap();
    assert!(matches!(&second[0].kind, MoveKind::DepthSingle(_, 2)));

    let par = term("a | a");
    let eq = special_steps(
        &par,
        full(&par),
        Direction::Reverse,
        StepConstraint::EquidepthHomogeneous,
    )
    .unwrap();
    assert!(eq.iter().any(|m| m.target == Configuration::EMPTY));

    let mixed = term("a | b.a");
    let x = full(&mixed);
    let a_pair = |m: &csr_core::Move| {
        m.events().len() == 2 && m.events().iter().all(|e| mixed.label(e).as_str() == "a")
    };
    let hom = special_steps(&mixed, x, Direction::Reverse, StepConstraint::Homogeneous).unwrap();
    assert!(hom.iter().any(a_pair));
    let eqd = special_steps(
        &mixed,
        x,
        Direction::Reverse,
        StepConstraint::EquidepthHomogeneous,
    )
    .unwrap();
    assert!(!eqd.iter().any(a_pair));

    for kind in [
        StepConstraint::Homogeneous,
        StepConstraint::EquidepthHomogeneous,
    ] {
        assert!(
            special_steps(&mixed, Configuration::EMPTY, Direction::Reverse, kind)
                .unwrap()
                .is_empty()
        );
    }
}

/// Every forward step decomposes into depth-indexed singles taken in
/// non-increasing order of depth.
#[test]
fn steps_decompose_into_depth_singles() {
    for e in csr_core::corpus::entries() {
        let (c, d) = e.structures().unwrap();
        for s in [c, d] {
            for &x in s.configurations() {
                for step in steps(&s, x, Direction::Forward).unwrap() {
                    let dm = depths(&s, step.target).unwrap();
                    let mut events: Vec<usize> = step.events().iter().collect();
                    events.sort_by_key(|&ev| std::cmp::Reverse(dm.get(ev)));
                    let mut here = x;
                    for ev in events {
                        let k = dm.get(ev).unwrap();
                        let next = depth_singles(&s, here, Direction::Forward)
                            .unwrap()
                            .into_iter()
                            .find(|m| m.events() == Configuration::singleton(ev))
                            .unwrap_or_else(|| panic!("{}: no single for event in step", e.name));
                        assert!(
                            matches!(next.kind, MoveKind::DepthSingle(_, j) if j == k),
                            "{}",
                            e.name
                        );
                        here = next.target;
                    }
                    assert_eq!(here, step.target);
                }
            }
        }
    }
}

#[test]
fn fixpoint_examples() {
    let ab = term("a + b");
    let r = maximal_bisimulation(K::Ib, &ab, &ab).unwrap();
    let (a, b) = (cfg(&ab, &["e1"]), cfg(&ab, &["e2"]));
    assert!(r.contains(a, b) && r.contains(b, a));

    for t in ["a | b.a", "(a | a) + a.a"] {
        let s = term(t);
        let r = maximal_bisimulation(K::Rb, &s, &s).unwrap();
        assert!(s.configurations().iter().all(|&x| r.contains(x, x)));
        let identity = CandidateRelation {
            kind: K::Rb,
            pairs: s.configurations().iter().map(|&x| (x, x)).collect(),
            triples: Vec::new(),
            rounds: 0,
            initial_size: 0,
        };
        assert!(verify_relation(K::Rb, &s, &s, &identity).is_ok());
    }

    let (c, d) = (term("a | a"), term("a.a"));
    assert!(!maximal_bisimulation(K::Sb, &c, &d).unwrap().contains_root());
    let ib = maximal_bisimulation(K::Ib, &c, &d).unwrap();
    assert!(verify_relation(K::Ib, &c, &d, &ib).is_ok());
}

#[test]
fn generator_examples() {
    use csr_core::genprop::{generate, GenMode, GenParams};
    let prime = generate(&GenParams {
        max_events: 5,
        seed: 42,
        mode: GenMode::PrimeEs,
        ..GenParams::default()
    })
    .unwrap();
    let r = validate(&prime).unwrap();
    assert!(r.stable() && r.prime_intersections.passed());

    // Statistical coverage: gadget mode yields non-prime structures.
    let non_prime = (0..100)
        .filter(|&seed| {
            let s = generate(&GenParams {
                seed,
                mode: GenMode::Gadget,
                ..GenParams::default()
            })
            .unwrap();
            let r = validate(&s).unwrap();
            assert!(r.stable());
            !r.prime_intersections.passed()
        })
        .count();
    assert!(non_prime >= 1, "{non_prime}");
}
