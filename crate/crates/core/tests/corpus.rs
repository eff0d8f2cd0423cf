use std::path::PathBuf;

use ahl_core::assertions::{check_implication, eval_assertion, Obligation};
use ahl_core::calculus::{check_derivation, check_triple_semantic, Triple, TripleVerdict};
use ahl_core::semantics::{exec, ExecOutcome, State, Value};
use ahl_core::syntax::{parse_assertion, parse_program, Program, Stmt};
use ahl_core::transformers::{check_corollary, sp_semantic, sp_syntactic, termination_set, wp_semantic, CorollaryVerdict};
use ahl_core::vcgen::{vcgen, verify, VcError, VerifyVerdict};

const FUEL: u64 = 10_000;

fn load(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_program(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn triple(p: &Program) -> Triple {
    Triple::access(p.pre.clone().unwrap(), p.body.clone(), p.post.clone().unwrap())
}

fn state(pairs: &[(&str, Value)]) -> State {
    pairs.iter().cloned().collect()
}

#[test]
fn hotel_sp_is_the_precondition() {
    let p = load("hotel_p1.ahl");
    let env = p.domain.sort_env();
    let sp = sp_semantic(&p.body, p.post.as_ref().unwrap(), &env, &p.domain, FUEL).unwrap();
    // Independent oracle: run by hand over all 16 states.
    let mut expected = Vec::new();
    for dk in 0..2 {
        for ck1 in 0..2 {
            for ck2 in 0..2 {
                for acc in [false, true] {
                    let opens = if dk != ck1 { dk == ck2 } else { true };
                    if opens {
                        expected.push((dk, ck1, ck2, acc));
                    }
                }
            }
        }
    }
    assert_eq!(sp.set.len(), expected.len());
    assert_eq!(sp.set.len(), 12);
    for s in sp.set.states() {
        let pre = p.pre.as_ref().unwrap();
        assert_eq!(eval_assertion(pre, &s), Ok(true), "{s}");
    }
}

#[test]
fn hotel_p2_wp_is_everything() {
    let p = load("hotel_p2.ahl");
    let env = p.domain.sort_env();
    let wp = wp_semantic(&p.body, p.post.as_ref().unwrap(), &env, &p.domain, FUEL).unwrap();
    assert!(wp.set.is_full());
}

#[test]
fn hotel_verification() {
    let p1 = load("hotel_p1.ahl");
    let env = p1.domain.sort_env();
    let r = verify(&triple(&p1), &env, &p1.domain, FUEL).unwrap();
    assert_eq!(r.verdict, VerifyVerdict::Proved);
    assert_eq!(r.obligations.len(), 1);

    let p2 = load("hotel_p2.ahl");
    let r = verify(&triple(&p2), &env, &p2.domain, FUEL).unwrap();
    let VerifyVerdict::Failed {
        obligation,
        counterexample,
    } = r.verdict
    else {
        panic!("P2 must fail");
    };
    assert_eq!(obligation.origin, "top");
    let want = state(&[
        ("dk", Value::int(0)),
        ("ck1", Value::int(1)),
        ("ck2", Value::int(1)),
        ("acc", Value::Bool(false)),
    ]);
    assert_eq!(counterexample, want);
}

#[test]
fn hotel_syntactic_sp_matches_semantic() {
    let p = load("hotel_p1.ahl");
    let env = p.domain.sort_env();
    let q = p.post.as_ref().unwrap();
    let sp = sp_syntactic(&p.body, q).unwrap();
    assert_eq!(
        sp.to_string(),
        "!(dk == ck1) && (dk == ck2) == true || !!(dk == ck1) && true == true"
    );
    let pre = p.pre.clone().unwrap();
    for (h, c) in [(&sp, &pre), (&pre, &sp)] {
        let ob = Obligation::new(h.clone(), c.clone(), "eq");
        assert!(check_implication(&ob, &env, &p.domain).unwrap().is_valid());
    }
}

#[test]
fn checklist_runs() {
    let p = load("checklist.ahl");
    let s = state(&[
        ("p", Value::int(2)),
        ("L", Value::list([1, 2])),
        ("i", Value::int(0)),
        ("acc", Value::Bool(false)),
    ]);
    let ExecOutcome::Terminated(t) = exec(&p.body, &s, FUEL) else {
        panic!("checklist must terminate");
    };
    assert_eq!(t.get("acc"), Some(&Value::Bool(true)));
    assert_eq!(t.get("i"), Some(&Value::int(3)));
}

#[test]
fn checklist_is_secure_and_proved() {
    let p = load("checklist.ahl");
    let env = p.domain.sort_env();
    let t = triple(&p);
    assert_eq!(
        check_triple_semantic(&t, &env, &p.domain, FUEL).unwrap().verdict,
        TripleVerdict::Valid { qualified: false }
    );
    let r = verify(&t, &env, &p.domain, FUEL).unwrap();
    assert_eq!(r.verdict, VerifyVerdict::Proved, "{}", r.to_json());
    let check = check_derivation(r.derivation.as_ref().unwrap(), &env, &p.domain, FUEL).unwrap();
    assert_eq!(check.verdict(), "accepted");
}

#[test]
fn checklist_vcgen_shape() {
    let p = load("checklist.ahl");
    let env = p.domain.sort_env();
    let Stmt::Seq(_, rest) = &p.body else { panic!() };
    let Stmt::Seq(_, lp) = &**rest else { panic!() };
    let Stmt::While { invariant, .. } = &**lp else { panic!() };
    let inv = invariant.clone().unwrap();
    let post = p.post.clone().unwrap();
    let r = vcgen(lp, &post).unwrap();
    assert_eq!(r.pre, inv);
    assert_eq!(r.obligations.len(), 2);
    for ob in &r.obligations {
        assert!(check_implication(ob, &env, &p.domain).unwrap().is_valid(), "{}", ob.origin);
    }
    let exit = &r.obligations[1];
    assert_eq!(
        exit.hypothesis,
        parse_assertion("acc == true && !(i <= lh(L))", &env).unwrap()
    );
    // Prefixing the initialisation gives exactly membership of p in L.
    let whole = vcgen(&p.body, &post).unwrap();
    let member = p.pre.clone().unwrap();
    for (h, c) in [(&whole.pre, &member), (&member, &whole.pre)] {
        let ob = Obligation::new(h.clone(), c.clone(), "eq");
        assert!(check_implication(&ob, &env, &p.domain).unwrap().is_valid());
    }
}

#[test]
fn checklist_terminates_everywhere_and_corollary_holds() {
    let p = load("checklist.ahl");
    let env = p.domain.sort_env();
    let t = termination_set(&p.body, &env, &p.domain, FUEL).unwrap();
    assert!(t.set.is_full());
    let r = check_corollary(&p.body, p.post.as_ref().unwrap(), &env, &p.domain, FUEL).unwrap();
    assert_eq!(r.verdict, CorollaryVerdict::Holds);
    assert_eq!(r.sp.set, r.wp.set);
}

#[test]
fn checklist_without_invariant() {
    let p = load("checklist_noinv.ahl");
    let env = p.domain.sort_env();
    assert!(matches!(
        verify(&triple(&p), &env, &p.domain, FUEL),
        Err(VcError::MissingInvariant(_))
    ));
}

#[test]
fn divergence_is_vacuously_secure_but_qualified() {
    let p = load("diverge.ahl");
    let env = p.domain.sort_env();
    let r = check_triple_semantic(&triple(&p), &env, &p.domain, 100).unwrap();
    assert_eq!(r.verdict, TripleVerdict::Valid { qualified: true });
}

#[test]
fn bitcoin_toy_locking_script() {
    let p = load("bitcoin_toy.ahl");
    let env = p.domain.sort_env();
    let r = check_triple_semantic(&triple(&p), &env, &p.domain, FUEL).unwrap();
    assert_eq!(r.states, 250);
    assert_eq!(r.verdict, TripleVerdict::Valid { qualified: false });
    // Oracle: the precondition holds exactly for matching hash and signature.
    let sp = sp_semantic(&p.body, p.post.as_ref().unwrap(), &env, &p.domain, FUEL).unwrap();
    // One (hash, sig) pair per key, times the two initial values of accept.
    assert_eq!(sp.set.len(), 5 * 2);
    for s in sp.set.states() {
        let pk = match s.get("pubKey") {
            Some(Value::Int(n)) => i64::try_from(n).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(s.get("pubKeyHash"), Some(&Value::int((7 * pk + 3) % 5)));
        assert_eq!(s.get("sig"), Some(&Value::int((pk + 1) % 5)));
    }
}

#[test]
fn seeds_verify() {
    for name in ["seeds/count.ahl", "seeds/swap.ahl", "seeds/branch.ahl"] {
        let p = load(name);
        let env = p.domain.sort_env();
        let t = triple(&p);
        assert!(check_triple_semantic(&t, &env, &p.domain, FUEL).unwrap().is_valid(), "{name}");
        assert_eq!(verify(&t, &env, &p.domain, FUEL).unwrap().verdict, VerifyVerdict::Proved, "{name}");
    }
}
