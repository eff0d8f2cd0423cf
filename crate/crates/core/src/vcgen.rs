//! Verification-condition generation from loop invariants.
//!
//! Loop-free code is handled exactly by the syntactic strongest
//! precondition. Each loop contributes two obligations: the body, run
//! backwards from the invariant, must imply the invariant when the guard
//! holds, and the postcondition must imply the invariant when it does not.
//! The result also carries a derivation tree that the calculus checker
//! accepts whenever every obligation is valid.

use serde_json::json;
use thiserror::Error;

use crate::assertions::{
    check_implication, substitute, DomainError, FiniteDomain, ImplicationReport, Obligation, SubstError,
};
use crate::calculus::{check_derivation, Derivation, DerivationReport, Flavor, Triple};
use crate::semantics::State;
use crate::syntax::{Assertion, SortEnv, Span, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VcError {
    #[error("while loop at {0} has no invariant")]
    MissingInvariant(Span),
    #[error(transparent)]
    Subst(#[from] SubstError),
    #[error("only access triples can be verified")]
    NotAccess,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcResult {
    pub pre: Assertion,
    /// Loop obligations, innermost and leftmost first.
    pub obligations: Vec<Obligation>,
    pub derivation: Derivation,
}

/// Computes a precondition for `c` and `q` together with the obligations
/// under which `(| pre |) c (| q |)` is derivable.
pub fn vcgen(c: &Stmt, q: &Assertion) -> Result<VcResult, VcError> {
    match c {
        Stmt::Skip => Ok(VcResult {
            pre: q.clone(),
            obligations: vec![],
            derivation: Derivation::skip(q.clone()),
        }),
        Stmt::Assign { target, value, .. } => {
            let pre = substitute(q, target, value)?;
            let derivation = Derivation::assign(c, q.clone()).expect("assignment");
            Ok(VcResult {
                pre,
                obligations: vec![],
                derivation,
            })
        }
        Stmt::Seq(s, t) => {
            let second = vcgen(t, q)?;
            let first = vcgen(s, &second.pre)?;
            let mut obligations = first.obligations;
            obligations.extend(second.obligations);
            Ok(VcResult {
                pre: first.pre,
                obligations,
                derivation: Derivation::comp(first.derivation, second.derivation),
            })
        }
        Stmt::If {
            guard,
            then_branch,
            else_branch,
            ..
        } => {
            let then_r = vcgen(then_branch, q)?;
            let else_r = vcgen(else_branch, q)?;
            let b = Assertion::atom(guard.clone());
            let nb = Assertion::not(b.clone());
            let pre = Assertion::or(
                Assertion::and(b.clone(), then_r.pre.clone()),
                Assertion::and(nb.clone(), else_r.pre.clone()),
            );
            let bridge = |cond: Assertion, r: VcResult, origin: &str| {
                let left = Obligation::new(Assertion::and(r.pre.clone(), cond.clone()), pre.clone(), origin);
                let right = Obligation::new(q.clone(), q.clone(), origin);
                Derivation::conseq_with(Assertion::implies(cond, pre.clone()), r.derivation, q.clone(), left, right)
            };
            let mut obligations = then_r.obligations.clone();
            obligations.extend(else_r.obligations.iter().cloned());
            let then_d = bridge(b, then_r, "if.then");
            let else_d = bridge(nb, else_r, "if.else");
            Ok(VcResult {
                derivation: Derivation::cond(c, pre.clone(), then_d, else_d),
                pre,
                obligations,
            })
        }
        Stmt::While {
            guard,
            invariant,
            body,
            at,
        } => {
            let inv = invariant.clone().ok_or(VcError::MissingInvariant(*at))?;
            let body_r = vcgen(body, &inv)?;
            let b = Assertion::atom(guard.clone());
            let nb = Assertion::not(b.clone());
            let preserve = Obligation::new(Assertion::and(body_r.pre.clone(), b.clone()), inv.clone(), "while.body");
            let exit = Obligation::new(Assertion::and(q.clone(), nb), inv.clone(), "while.exit");
            let body_d = Derivation::conseq_with(
                Assertion::implies(b, inv.clone()),
                body_r.derivation,
                inv.clone(),
                preserve.clone(),
                Obligation::new(inv.clone(), inv.clone(), "while.body"),
            );
            let loop_d = Derivation::while_rule(c, inv.clone(), body_d).expect("while statement");
            let derivation = Derivation::conseq_with(
                inv.clone(),
                loop_d,
                q.clone(),
                Obligation::new(inv.clone(), inv.clone(), "while.exit"),
                exit.clone(),
            );
            let mut obligations = body_r.obligations;
            obligations.push(preserve);
            obligations.push(exit);
            Ok(VcResult {
                pre: inv,
                obligations,
                derivation,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DischargedObligation {
    pub obligation: Obligation,
    /// `None` when hypothesis and conclusion coincide.
    pub report: Option<ImplicationReport>,
}

impl DischargedObligation {
    pub fn is_valid(&self) -> bool {
        self.report.as_ref().is_none_or(ImplicationReport::is_valid)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.obligation.to_json();
        match &self.report {
            None => v["verdict"] = json!("valid"),
            Some(r) => {
                v["verdict"] = json!(if r.is_valid() { "valid" } else { "counterexample" });
                v["states_checked"] = json!(r.states_checked);
                v["assertion_errors"] = json!(r.assertion_errors);
                if let Some(s) = r.counterexample() {
                    v["counterexample"] = s.to_json();
                }
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyVerdict {
    Proved,
    /// The first obligation, in report order, that has a counterexample.
    Failed { obligation: Obligation, counterexample: State },
    /// All obligations hold but some run from a domain state leaves the
    /// domain or runs out of fuel, so the obligations do not cover it.
    Qualified,
    /// All obligations hold but the emitted derivation was rejected.
    Rejected { path: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdict: VerifyVerdict,
    pub computed_pre: Assertion,
    /// Loop obligations followed by the top-level `computed pre -> pre`.
    pub obligations: Vec<DischargedObligation>,
    /// Present when every obligation holds.
    pub derivation: Option<Derivation>,
    pub derivation_check: Option<DerivationReport>,
}

impl VerifyReport {
    pub fn proved(&self) -> bool {
        self.verdict == VerifyVerdict::Proved
    }

    pub fn assertion_errors(&self) -> u64 {
        self.obligations
            .iter()
            .filter_map(|o| o.report.as_ref())
            .map(|r| r.assertion_errors)
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "computed_pre": self.computed_pre.to_string(),
            "obligations": self.obligations.iter().map(DischargedObligation::to_json).collect::<Vec<_>>(),
            "assertion_errors": self.assertion_errors(),
        });
        match &self.verdict {
            VerifyVerdict::Proved => v["verdict"] = json!("proved"),
            VerifyVerdict::Failed {
                obligation,
                counterexample,
            } => {
                v["verdict"] = json!("failed");
                v["failed_obligation"] = obligation.to_json();
                v["counterexample"] = counterexample.to_json();
            }
            VerifyVerdict::Qualified => v["verdict"] = json!("qualified"),
            VerifyVerdict::Rejected { path, reason } => {
                v["verdict"] = json!("rejected");
                v["rejected_node"] = json!({ "path": path, "reason": reason });
            }
        }
        if let Some(r) = &self.derivation_check {
            v["derivation"] = json!({ "verdict": r.verdict(), "nodes": r.nodes.len() });
            v["closure"] = r.closure.to_json();
        }
        v
    }
}

/// Generates and discharges the obligations for an access triple, and on
/// success re-checks the emitted derivation. `fuel` bounds the runs used to
/// confirm that the program stays inside the domain.
pub fn verify(t: &Triple, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<VerifyReport, VcError> {
    if t.flavor != Flavor::Access {
        return Err(VcError::NotAccess);
    }
    let r = vcgen(&t.prog, &t.post)?;
    let top = Obligation::new(r.pre.clone(), t.pre.clone(), "top");
    let mut obligations = Vec::new();
    for ob in r.obligations.iter().chain(std::iter::once(&top)) {
        let report = if ob.hypothesis == ob.conclusion {
            None
        } else {
            Some(check_implication(ob, env, dom)?)
        };
        obligations.push(DischargedObligation {
            obligation: ob.clone(),
            report,
        });
    }
    let failed = obligations.iter().find_map(|o| {
        let s = o.report.as_ref()?.counterexample()?;
        Some(VerifyVerdict::Failed {
            obligation: o.obligation.clone(),
            counterexample: s.clone(),
        })
    });
    if let Some(verdict) = failed {
        return Ok(VerifyReport {
            verdict,
            computed_pre: r.pre,
            obligations,
            derivation: None,
            derivation_check: None,
        });
    }
    let derivation = Derivation::conseq_with(
        t.pre.clone(),
        r.derivation,
        t.post.clone(),
        top,
        Obligation::new(t.post.clone(), t.post.clone(), "top"),
    );
    let check = check_derivation(&derivation, env, dom, fuel)?;
    let verdict = if check.is_definitive() {
        VerifyVerdict::Proved
    } else if check.accepted() {
        VerifyVerdict::Qualified
    } else {
        let (path, reason) = check
            .first_rejection()
            .map(|(p, r)| (p.to_string(), r.to_string()))
            .or_else(|| {
                check
                    .failed_obligations()
                    .next()
                    .map(|o| (o.path.clone(), format!("obligation {} failed", o.obligation.origin)))
            })
            .unwrap_or_default();
        VerifyVerdict::Rejected { path, reason }
    };
    Ok(VerifyReport {
        verdict,
        computed_pre: r.pre,
        obligations,
        derivation: Some(derivation),
        derivation_check: Some(check),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::VarDomain;
    use crate::syntax::{parse_assertion, parse_stmt};

    fn x_env() -> (SortEnv, FiniteDomain) {
        let dom = FiniteDomain::new().with("x", VarDomain::Int { lo: 0, hi: 4 });
        (dom.sort_env(), dom)
    }

    #[test]
    fn skip_is_trivial() {
        let (env, _) = x_env();
        let q = parse_assertion("x == 1", &env).unwrap();
        let r = vcgen(&Stmt::Skip, &q).unwrap();
        assert_eq!(r.pre, q);
        assert!(r.obligations.is_empty());
    }

    #[test]
    fn missing_invariant_is_reported_with_location() {
        let (env, _) = x_env();
        let c = parse_stmt("skip;\nwhile x < 3 do { x := x + 1 }", &env).unwrap();
        match vcgen(&c, &Assertion::True) {
            Err(VcError::MissingInvariant(at)) => assert_eq!(at.line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn escaping_runs_qualify() {
        let (env, dom) = x_env();
        let c = parse_stmt("invariant: x <= 9 while x < 6 do { x := x + 1 }", &env).unwrap();
        let t = Triple::access(Assertion::True, c, parse_assertion("x == 6", &env).unwrap());
        let r = verify(&t, &env, &dom, 1000).unwrap();
        assert_eq!(r.verdict, VerifyVerdict::Qualified);
        assert_eq!(r.derivation_check.unwrap().closure.escapes, 5);
    }

    #[test]
    fn counting_loop_is_proved() {
        let (env, dom) = x_env();
        let c = parse_stmt("invariant: x <= 3 while x < 3 do { x := x + 1 }", &env).unwrap();
        let t = Triple::access(
            parse_assertion("x <= 3", &env).unwrap(),
            c,
            parse_assertion("x == 3", &env).unwrap(),
        );
        let r = verify(&t, &env, &dom, 1000).unwrap();
        assert_eq!(r.verdict, VerifyVerdict::Proved);
        assert_eq!(r.obligations.len(), 3);
        assert!(r.derivation_check.unwrap().accepted());
    }

    #[test]
    fn weak_precondition_fails_at_top() {
        let (env, dom) = x_env();
        let c = parse_stmt("x := 2", &env).unwrap();
        let t = Triple::access(
            parse_assertion("x == 0", &env).unwrap(),
            c,
            parse_assertion("x == 2", &env).unwrap(),
        );
        let r = verify(&t, &env, &dom, 1000).unwrap();
        match r.verdict {
            VerifyVerdict::Failed {
                obligation,
                counterexample,
            } => {
                assert_eq!(obligation.origin, "top");
                assert_eq!(counterexample.to_string(), "{x=1}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hoare_triples_are_refused() {
        let (env, dom) = x_env();
        let t = Triple::hoare(Assertion::True, Stmt::Skip, Assertion::True);
        assert_eq!(verify(&t, &env, &dom, 1000), Err(VcError::NotAccess));
    }
}
