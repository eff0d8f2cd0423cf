use ahl_core::arbitrary::*;
use ahl_core::assertions::{
    check_implication, enumerate_states, eval_assertion, holds, substitute, ImplicationVerdict, Obligation,
};
use ahl_core::calculus::{check_derivation, check_triple_semantic, dualize, Derivation, Triple};
use ahl_core::semantics::{eval_expr, exec, run, ExecOutcome, State};
use ahl_core::syntax::{parse_assertion, parse_stmt, Assertion, Sort, Var};
use ahl_core::transformers::{sp_semantic, sp_syntactic, termination_set, wp_semantic, StateSet};
use ahl_core::vcgen::{vcgen, verify, VerifyVerdict};
use proptest::prelude::*;
use proptest::sample::select;

const FUEL: u64 = 2_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn statements_round_trip(c in any_stmt(4)) {
        let env = small_env();
        prop_assert_eq!(parse_stmt(&c.to_string(), &env).unwrap(), c.clone());
        prop_assert_eq!(parse_stmt(&ahl_core::syntax::pretty_stmt(&c), &env).unwrap(), c);
    }

    #[test]
    fn assertions_round_trip(a in assertion(3)) {
        prop_assert_eq!(parse_assertion(&a.to_string(), &small_env()).unwrap(), a);
    }

    #[test]
    fn substitution_lemma(
        a in assertion(3),
        v in select(VARS.to_vec()),
        e in int_expr(2),
        s in state(-2, 4),
    ) {
        let lhs = eval_assertion(&substitute(&a, &Var::new(v, Sort::Int), &e).unwrap(), &s);
        let mut t = s.clone();
        t.set(v, eval_expr(&e, &s).unwrap());
        let rhs = eval_assertion(&a, &t);
        if let (Ok(l), Ok(r)) = (lhs, rhs) {
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn implication_agrees_with_brute_force(h in assertion(2), c in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let r = check_implication(&Obligation::new(h.clone(), c.clone(), "p"), &env, &dom).unwrap();
        let mut first = None;
        'outer: for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    let s = State::new()
                        .with("x", ahl_core::semantics::Value::int(x))
                        .with("y", ahl_core::semantics::Value::int(y))
                        .with("z", ahl_core::semantics::Value::int(z));
                    if eval_assertion(&h, &s).unwrap() && !eval_assertion(&c, &s).unwrap() {
                        first = Some(s);
                        break 'outer;
                    }
                }
            }
        }
        match first {
            None => prop_assert_eq!(r.verdict, ImplicationVerdict::Valid),
            Some(s) => prop_assert_eq!(r.verdict, ImplicationVerdict::Counterexample(s)),
        }
    }

    #[test]
    fn classical_laws(a in assertion(2), b in assertion(2), s in state(0, 2)) {
        let ev = |p: &Assertion| eval_assertion(p, &s).unwrap();
        let not = |p: &Assertion| Assertion::not(p.clone());
        prop_assert_eq!(ev(&not(&Assertion::and(a.clone(), b.clone()))), ev(&Assertion::or(not(&a), not(&b))));
        prop_assert_eq!(ev(&not(&Assertion::or(a.clone(), b.clone()))), ev(&Assertion::and(not(&a), not(&b))));
        prop_assert_eq!(ev(&not(&not(&a))), ev(&a));
        prop_assert!(ev(&Assertion::or(a.clone(), not(&a))));
        prop_assert_eq!(ev(&Assertion::implies(a.clone(), b.clone())), ev(&Assertion::or(not(&a), b.clone())));
    }

    #[test]
    fn execution_is_deterministic(c in any_stmt(4), s in state(0, 2)) {
        prop_assert_eq!(run(&c, &s, FUEL), run(&c, &s, FUEL));
    }

    #[test]
    fn more_fuel_changes_nothing_once_terminated(c in any_stmt(4), s in state(0, 2), extra in 1u64..500) {
        let r = run(&c, &s, FUEL);
        if let ExecOutcome::Terminated(_) = &r.outcome {
            prop_assert_eq!(exec(&c, &s, FUEL + extra), r.outcome.clone());
            prop_assert_eq!(exec(&c, &s, r.fuel_used), r.outcome);
            if r.fuel_used > 0 {
                prop_assert_eq!(exec(&c, &s, r.fuel_used - 1), ExecOutcome::FuelExhausted);
            }
        }
    }

    #[test]
    fn sequencing_composes(a in terminating_stmt(3), b in terminating_stmt(3), s in state(0, 2)) {
        let whole = exec(&ahl_core::syntax::Stmt::seq(a.clone(), b.clone()), &s, 100_000);
        let ExecOutcome::Terminated(mid) = exec(&a, &s, 100_000) else {
            return Err(TestCaseError::fail("counting loops terminate"));
        };
        prop_assert_eq!(whole, exec(&b, &mid, 100_000));
    }

    #[test]
    fn duality(c in terminating_stmt(4), p in assertion(2), q in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let t = Triple::access(p, c, q);
        let a = check_triple_semantic(&t, &env, &dom, FUEL).unwrap();
        let d = dualize(&t);
        let h = check_triple_semantic(&d, &env, &dom, FUEL).unwrap();
        prop_assert_eq!(a.is_definitely_valid(), h.is_definitely_valid());
        let dd = check_triple_semantic(&dualize(&d), &env, &dom, FUEL).unwrap();
        prop_assert_eq!(a.is_valid(), dd.is_valid());
    }

    #[test]
    fn strongest_precondition_is_least(c in any_stmt(3), q in assertion(2), p in state_predicate()) {
        let env = small_env();
        let dom = small_domain();
        let sp = sp_semantic(&c, &q, &env, &dom, FUEL).unwrap();
        let wp = wp_semantic(&c, &q, &env, &dom, FUEL).unwrap();
        let ps = StateSet::of_assertion(&p, &env, &dom).unwrap();
        let access = check_triple_semantic(&Triple::access(p.clone(), c.clone(), q.clone()), &env, &dom, FUEL).unwrap();
        let hoare = check_triple_semantic(&Triple::hoare(p, c, q), &env, &dom, FUEL).unwrap();
        prop_assert_eq!(access.is_valid(), sp.set.is_subset(&ps));
        prop_assert_eq!(hoare.is_valid(), ps.is_subset(&wp.set));
    }

    #[test]
    fn sp_is_wp_on_terminating_states(c in any_stmt(3), q in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let sp = sp_semantic(&c, &q, &env, &dom, FUEL).unwrap();
        let wp = wp_semantic(&c, &q, &env, &dom, FUEL).unwrap();
        let t = termination_set(&c, &env, &dom, FUEL).unwrap();
        prop_assert_eq!(&sp.set, &wp.set.intersection(&t.set));
        if t.set.is_full() {
            prop_assert_eq!(&sp.set, &wp.set);
        }
    }

    #[test]
    fn syntactic_sp_is_exact(c in loop_free_stmt(4), q in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let syn = sp_syntactic(&c, &q).unwrap();
        let sem = sp_semantic(&c, &q, &env, &dom, FUEL).unwrap();
        prop_assert_eq!(StateSet::of_assertion(&syn, &env, &dom).unwrap(), sem.set);
        let r = vcgen(&c, &q).unwrap();
        prop_assert!(r.obligations.is_empty());
        prop_assert_eq!(r.pre, syn);
    }

    #[test]
    fn verified_means_valid(c in closed_annotated_stmt(3), p in assertion(2), q in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let t = Triple::access(p, c, q);
        let r = verify(&t, &env, &dom, FUEL).unwrap();
        prop_assert_ne!(&r.verdict, &VerifyVerdict::Qualified);
        if r.verdict == VerifyVerdict::Proved {
            prop_assert!(check_triple_semantic(&t, &env, &dom, 100_000).unwrap().is_definitely_valid());
            prop_assert!(r.derivation_check.unwrap().is_definitive());
        }
    }

    #[test]
    fn accepted_derivations_are_sound(c in closed_annotated_stmt(3), q in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let d = vcgen(&c, &q).unwrap().derivation;
        let check = check_derivation(&d, &env, &dom, FUEL).unwrap();
        prop_assert!(check.closure.is_closed());
        if check.is_definitive() {
            prop_assert!(check_triple_semantic(&d.conclusion, &env, &dom, 100_000).unwrap().is_definitely_valid());
        }
    }

    #[test]
    fn escaping_runs_never_prove(c in annotated_stmt(3), p in assertion(2), q in assertion(2)) {
        let env = small_env();
        let dom = small_domain();
        let t = Triple::access(p, c, q);
        let r = verify(&t, &env, &dom, FUEL).unwrap();
        if r.verdict == VerifyVerdict::Proved {
            prop_assert!(check_triple_semantic(&t, &env, &dom, 100_000).unwrap().is_definitely_valid());
        }
    }

    #[test]
    fn derivation_json_round_trips(c in annotated_stmt(3), q in assertion(2)) {
        let d = vcgen(&c, &q).unwrap().derivation;
        prop_assert_eq!(Derivation::from_json(&d.to_json(), &small_env()).unwrap(), d);
    }

    #[test]
    fn enumeration_positions(s in state(0, 2)) {
        let env = small_env();
        let dom = small_domain();
        let i = dom.index_of(&env, &s).unwrap();
        prop_assert_eq!(enumerate_states(&env, &dom).unwrap().nth(i), Some(s.clone()));
        prop_assert!(holds(&assertion_of_states(std::slice::from_ref(&s)), &s));
    }
}
