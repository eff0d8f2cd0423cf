//! Triples, their semantic validity, duality, and derivation checking.

mod derivation;
mod json;
mod triple;

pub use derivation::{
    check_derivation, Derivation, DerivationReport, NodeReport, ObligationResult, ObligationStatus, Rule,
};
pub use json::DerivationJsonError;
pub use triple::{check_triple_semantic, dualize, Flavor, Triple, TripleReport, TripleVerdict};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::{FiniteDomain, VarDomain};
    use crate::semantics::{State, Value};
    use crate::syntax::{parse_assertion, parse_stmt, Assertion, SortEnv, Stmt};

    const FUEL: u64 = 1000;

    fn hotel() -> (SortEnv, FiniteDomain) {
        let bit = VarDomain::Int { lo: 0, hi: 1 };
        let dom = FiniteDomain::new()
            .with("dk", bit.clone())
            .with("ck1", bit.clone())
            .with("ck2", bit)
            .with("acc", VarDomain::Bool);
        (dom.sort_env(), dom)
    }

    const P1: &str = "if not (dk == ck1) then { acc := dk == ck2 } else { dk := ck2; acc := true }";
    const P2: &str = "if not (dk == ck1) then { acc := dk == ck2 } else { dk := ck2 }; acc := true";

    fn hotel_triple(prog: &str) -> (Triple, SortEnv, FiniteDomain) {
        let (env, dom) = hotel();
        let t = Triple::access(
            parse_assertion("ck1 == dk || ck2 == dk", &env).unwrap(),
            parse_stmt(prog, &env).unwrap(),
            parse_assertion("acc == true", &env).unwrap(),
        );
        (t, env, dom)
    }

    #[test]
    fn p1_is_access_secure() {
        let (t, env, dom) = hotel_triple(P1);
        let r = check_triple_semantic(&t, &env, &dom, FUEL).unwrap();
        assert_eq!(r.verdict, TripleVerdict::Valid { qualified: false });
    }

    #[test]
    fn p2_is_not() {
        let (t, env, dom) = hotel_triple(P2);
        let r = check_triple_semantic(&t, &env, &dom, FUEL).unwrap();
        let TripleVerdict::Invalid { initial, last } = r.verdict else {
            panic!("expected a counterexample");
        };
        let want: State = [
            ("dk", Value::int(0)),
            ("ck1", Value::int(1)),
            ("ck2", Value::int(1)),
            ("acc", Value::Bool(false)),
        ]
        .into_iter()
        .collect();
        assert_eq!(initial, want);
        assert_eq!(last.get("acc"), Some(&Value::Bool(true)));
    }

    #[test]
    fn duality_on_hotel() {
        for prog in [P1, P2] {
            let (t, env, dom) = hotel_triple(prog);
            let d = dualize(&t);
            assert_eq!(d.flavor, Flavor::Hoare);
            assert_eq!(d.pre.to_string(), "!(ck1 == dk || ck2 == dk)");
            let a = check_triple_semantic(&t, &env, &dom, FUEL).unwrap();
            let b = check_triple_semantic(&d, &env, &dom, FUEL).unwrap();
            assert_eq!(a.is_valid(), b.is_valid());
            assert_eq!(dualize(&d).flavor, Flavor::Access);
        }
    }

    fn x_env() -> (SortEnv, FiniteDomain) {
        let dom = FiniteDomain::new().with("x", VarDomain::Int { lo: 0, hi: 3 });
        (dom.sort_env(), dom)
    }

    #[test]
    fn assignment_axiom_instance_is_accepted() {
        let (env, dom) = x_env();
        let c = parse_stmt("x := x + 1", &env).unwrap();
        let d = Derivation::assign(&c, parse_assertion("x == 2", &env).unwrap()).unwrap();
        assert_eq!(d.pre().to_string(), "x + 1 == 2");
        assert!(check_derivation(&d, &env, &dom, FUEL).unwrap().accepted());
    }

    #[test]
    fn wrong_assignment_precondition_is_rejected() {
        let (env, dom) = x_env();
        let c = parse_stmt("x := x + 1", &env).unwrap();
        let a = |s: &str| parse_assertion(s, &env).unwrap();
        let d = Derivation::new(Triple::access(a("x == 1"), c, a("x == 2")), Rule::Assign);
        let r = check_derivation(&d, &env, &dom, FUEL).unwrap();
        assert!(!r.accepted());
        assert_eq!(r.first_rejection().unwrap().0, "root");
    }

    fn loop_parts(env: &SortEnv) -> (Stmt, Assertion, Derivation) {
        let c = parse_stmt("while x < 3 do { x := x + 1 }", env).unwrap();
        let Stmt::While { body, guard, .. } = &c else { unreachable!() };
        let inv = parse_assertion("true", env).unwrap();
        let g = Assertion::atom(guard.clone());
        let body_d = Derivation::assign(body, inv.clone()).unwrap();
        let body_d = Derivation::conseq(Assertion::implies(g, inv.clone()), body_d, inv.clone());
        (c, inv, body_d)
    }

    #[test]
    fn while_rule_schema() {
        let (env, dom) = x_env();
        let (c, inv, body_d) = loop_parts(&env);
        let good = Derivation::while_rule(&c, inv.clone(), body_d.clone()).unwrap();
        let r = check_derivation(&good, &env, &dom, FUEL).unwrap();
        assert!(r.accepted(), "{:?}", r.first_rejection());

        let mut bad = good.clone();
        bad.conclusion.post = inv;
        let r = check_derivation(&bad, &env, &dom, FUEL).unwrap();
        assert!(!r.accepted());
        assert!(r.first_rejection().unwrap().1.contains("expected postcondition"));
    }

    #[test]
    fn failing_obligation_rejects() {
        let (env, dom) = x_env();
        let a = |s: &str| parse_assertion(s, &env).unwrap();
        let d = Derivation::conseq(a("x == 0"), Derivation::skip(a("x == 1")), a("x == 1"));
        let r = check_derivation(&d, &env, &dom, FUEL).unwrap();
        assert!(!r.accepted());
        assert_eq!(r.failed_obligations().count(), 1);
        assert!(r.first_rejection().is_none());
    }

    #[test]
    fn curried_obligation_form() {
        let (env, dom) = x_env();
        let a = |s: &str| parse_assertion(s, &env).unwrap();
        let sub = Derivation::skip(a("x >= 1"));
        let pre = a("x == 2 ==> x >= 1");
        let left = crate::assertions::Obligation::new(a("x >= 1 && x == 2"), a("x >= 1"), "t");
        let right = crate::assertions::Obligation::new(a("x >= 1"), a("x >= 1"), "t");
        let d = Derivation::conseq_with(pre, sub, a("x >= 1"), left, right);
        assert!(check_derivation(&d, &env, &dom, FUEL).unwrap().accepted());
    }

    #[test]
    fn json_round_trip() {
        let (env, _) = x_env();
        let (c, inv, body_d) = loop_parts(&env);
        let d = Derivation::while_rule(&c, inv, body_d).unwrap();
        let back = Derivation::from_json(&d.to_json(), &env).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_defaults_conseq_obligations() {
        let (env, dom) = x_env();
        let v = serde_json::json!({
            "rule": "conseq", "pre": "x >= 0", "prog": "skip", "post": "x == 2",
            "premises": [{ "rule": "skip", "pre": "x >= 1", "prog": "skip", "post": "x >= 1" }]
        });
        let d = Derivation::from_json(&v, &env).unwrap();
        assert!(check_derivation(&d, &env, &dom, FUEL).unwrap().accepted());
    }

    #[test]
    fn json_arity_is_checked() {
        let (env, _) = x_env();
        let v = serde_json::json!({ "rule": "comp", "pre": "true", "prog": "skip", "post": "true" });
        assert!(matches!(
            Derivation::from_json(&v, &env),
            Err(DerivationJsonError::Shape { .. })
        ));
    }
}
