use serde_json::json;

use super::triple::{Flavor, Triple};
use crate::assertions::{check_implication, substitute, DomainError, FiniteDomain, ImplicationReport, Obligation};
use crate::syntax::{Assertion, SortEnv, Stmt};
use crate::transformers::{domain_closure, Closure};

/// A proof tree in the access Hoare calculus. Every node carries the triple
/// it concludes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Triple,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Skip,
    Assign,
    /// Strengthen the postcondition, weaken the precondition.
    Conseq {
        left: Obligation,
        sub: Box<Derivation>,
        right: Obligation,
    },
    Comp(Box<Derivation>, Box<Derivation>),
    Cond(Box<Derivation>, Box<Derivation>),
    While(Box<Derivation>),
    Conj(Box<Derivation>, Box<Derivation>),
    Disj(Box<Derivation>, Box<Derivation>),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Skip => "skip",
            Rule::Assign => "assign",
            Rule::Conseq { .. } => "conseq",
            Rule::Comp(..) => "comp",
            Rule::Cond(..) => "cond",
            Rule::While(..) => "while",
            Rule::Conj(..) => "conj",
            Rule::Disj(..) => "disj",
        }
    }

    pub fn premises(&self) -> Vec<&Derivation> {
        match self {
            Rule::Skip | Rule::Assign => vec![],
            Rule::Conseq { sub, .. } | Rule::While(sub) => vec![sub],
            Rule::Comp(a, b) | Rule::Cond(a, b) | Rule::Conj(a, b) | Rule::Disj(a, b) => vec![a, b],
        }
    }
}

impl Derivation {
    pub fn new(conclusion: Triple, rule: Rule) -> Self {
        Derivation { conclusion, rule }
    }

    pub fn pre(&self) -> &Assertion {
        &self.conclusion.pre
    }

    pub fn post(&self) -> &Assertion {
        &self.conclusion.post
    }

    pub fn prog(&self) -> &Stmt {
        &self.conclusion.prog
    }

    /// `(| p |) skip (| p |)`.
    pub fn skip(p: Assertion) -> Self {
        Derivation::new(Triple::access(p.clone(), Stmt::Skip, p), Rule::Skip)
    }

    /// `(| p[e/v] |) v := e (| p |)` for an assignment statement `c`.
    pub fn assign(c: &Stmt, p: Assertion) -> Option<Self> {
        let Stmt::Assign { target, value, .. } = c else {
            return None;
        };
        let pre = substitute(&p, target, value).ok()?;
        Some(Derivation::new(Triple::access(pre, c.clone(), p), Rule::Assign))
    }

    /// Consequence with obligations in their literal form.
    pub fn conseq(pre: Assertion, sub: Derivation, post: Assertion) -> Self {
        let left = Obligation::new(sub.pre().clone(), pre.clone(), "conseq.pre");
        let right = Obligation::new(post.clone(), sub.post().clone(), "conseq.post");
        Derivation::conseq_with(pre, sub, post, left, right)
    }

    pub fn conseq_with(pre: Assertion, sub: Derivation, post: Assertion, left: Obligation, right: Obligation) -> Self {
        let prog = sub.prog().clone();
        Derivation::new(
            Triple::access(pre, prog, post),
            Rule::Conseq {
                left,
                sub: Box::new(sub),
                right,
            },
        )
    }

    pub fn comp(first: Derivation, second: Derivation) -> Self {
        let t = Triple::access(
            first.pre().clone(),
            Stmt::seq(first.prog().clone(), second.prog().clone()),
            second.post().clone(),
        );
        Derivation::new(t, Rule::Comp(Box::new(first), Box::new(second)))
    }

    /// Conditional over statement `c` concluding `(| p |) c (| post of then |)`.
    pub fn cond(c: &Stmt, p: Assertion, then_d: Derivation, else_d: Derivation) -> Self {
        let post = then_d.post().clone();
        Derivation::new(
            Triple::access(p, c.clone(), post),
            Rule::Cond(Box::new(then_d), Box::new(else_d)),
        )
    }

    /// Loop rule over statement `c` with invariant-like assertion `p`.
    pub fn while_rule(c: &Stmt, p: Assertion, body: Derivation) -> Option<Self> {
        let Stmt::While { guard, .. } = c else {
            return None;
        };
        let post = Assertion::implies(Assertion::not(Assertion::atom(guard.clone())), p.clone());
        Some(Derivation::new(Triple::access(p, c.clone(), post), Rule::While(Box::new(body))))
    }

    pub fn conj(a: Derivation, b: Derivation) -> Self {
        let t = Triple::access(
            Assertion::and(a.pre().clone(), b.pre().clone()),
            a.prog().clone(),
            Assertion::and(a.post().clone(), b.post().clone()),
        );
        Derivation::new(t, Rule::Conj(Box::new(a), Box::new(b)))
    }

    pub fn disj(a: Derivation, b: Derivation) -> Self {
        let t = Triple::access(
            Assertion::or(a.pre().clone(), b.pre().clone()),
            a.prog().clone(),
            Assertion::or(a.post().clone(), b.post().clone()),
        );
        Derivation::new(t, Rule::Disj(Box::new(a), Box::new(b)))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.rule.premises().iter().map(|d| d.size()).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeReport {
    pub path: String,
    pub rule: &'static str,
    pub triple: String,
    /// `None` when the node matches its rule schema.
    pub rejection: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObligationStatus {
    /// Hypothesis and conclusion are the same assertion.
    Reflexive,
    Checked(ImplicationReport),
    /// The obligation does not match the shape the rule requires.
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationResult {
    pub path: String,
    pub side: &'static str,
    pub obligation: Obligation,
    pub status: ObligationStatus,
}

impl ObligationResult {
    pub fn is_valid(&self) -> bool {
        match &self.status {
            ObligationStatus::Reflexive => true,
            ObligationStatus::Checked(r) => r.is_valid(),
            ObligationStatus::Malformed => false,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "path": self.path,
            "side": self.side,
            "origin": self.obligation.origin,
            "hypothesis": self.obligation.hypothesis.to_string(),
            "conclusion": self.obligation.conclusion.to_string(),
        });
        match &self.status {
            ObligationStatus::Reflexive => v["verdict"] = json!("valid"),
            ObligationStatus::Malformed => v["verdict"] = json!("malformed"),
            ObligationStatus::Checked(r) => {
                v["verdict"] = json!(if r.is_valid() { "valid" } else { "counterexample" });
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
pub struct DerivationReport {
    pub nodes: Vec<NodeReport>,
    pub obligations: Vec<ObligationResult>,
    /// Whether runs of the concluded program stay inside the domain on
    /// which the obligations were checked.
    pub closure: Closure,
}

impl DerivationReport {
    /// Every node matches its schema and every obligation holds on the domain.
    pub fn accepted(&self) -> bool {
        self.nodes.iter().all(|n| n.rejection.is_none()) && self.obligations.iter().all(ObligationResult::is_valid)
    }

    /// `accepted`, and the domain is closed under the program, so the
    /// conclusion holds on the domain.
    pub fn is_definitive(&self) -> bool {
        self.accepted() && self.closure.is_closed()
    }

    pub fn verdict(&self) -> &'static str {
        if !self.accepted() {
            "rejected"
        } else if !self.closure.is_closed() {
            "qualified"
        } else {
            "accepted"
        }
    }

    /// First rejected node, if any, with its reason.
    pub fn first_rejection(&self) -> Option<(&str, &str)> {
        self.nodes
            .iter()
            .find_map(|n| n.rejection.as_deref().map(|r| (n.path.as_str(), r)))
    }

    pub fn failed_obligations(&self) -> impl Iterator<Item = &ObligationResult> {
        self.obligations.iter().filter(|o| !o.is_valid())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "verdict": self.verdict(),
            "closure": self.closure.to_json(),
            "nodes": self.nodes.iter().map(|n| {
                let mut v = json!({
                    "path": n.path,
                    "rule": n.rule,
                    "triple": n.triple,
                    "status": if n.rejection.is_none() { "ok" } else { "rejected" },
                });
                if let Some(r) = &n.rejection {
                    v["reason"] = json!(r);
                }
                v
            }).collect::<Vec<_>>(),
            "obligations": self.obligations.iter().map(ObligationResult::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Checks every node against its rule schema and discharges every
/// consequence obligation by enumeration over `dom`. Runs of the concluded
/// program, with at most `fuel` steps each, are followed to see whether they
/// stay inside `dom`.
pub fn check_derivation(
    d: &Derivation,
    env: &SortEnv,
    dom: &FiniteDomain,
    fuel: u64,
) -> Result<DerivationReport, DomainError> {
    let mut report = DerivationReport {
        nodes: Vec::new(),
        obligations: Vec::new(),
        closure: domain_closure(d.prog(), env, dom, fuel)?,
    };
    walk(d, "root".to_string(), env, dom, &mut report)?;
    Ok(report)
}

fn walk(d: &Derivation, path: String, env: &SortEnv, dom: &FiniteDomain, out: &mut DerivationReport) -> Result<(), DomainError> {
    let rejection = schema(d).err();
    if let Rule::Conseq { left, sub, right } = &d.rule {
        let left_ok = left_form(left, sub.pre(), d.pre());
        let right_ok = right_form(right, d.post(), sub.post());
        for (side, ob, ok) in [("left", left, left_ok), ("right", right, right_ok)] {
            let status = if !ok {
                ObligationStatus::Malformed
            } else if ob.hypothesis == ob.conclusion {
                ObligationStatus::Reflexive
            } else {
                ObligationStatus::Checked(check_implication(ob, env, dom)?)
            };
            out.obligations.push(ObligationResult {
                path: path.clone(),
                side,
                obligation: ob.clone(),
                status,
            });
        }
    }
    out.nodes.push(NodeReport {
        path: path.clone(),
        rule: d.rule.name(),
        triple: d.conclusion.to_string(),
        rejection,
    });
    for (i, p) in d.rule.premises().into_iter().enumerate() {
        walk(p, format!("{path}.{i}"), env, dom, out)?;
    }
    Ok(())
}

/// Accepts `weaker -> stronger` literally, or curried when `stronger` is
/// itself an implication `a ==> c`: `(weaker && a) -> c`.
fn implication_form(ob: &Obligation, hyp: &Assertion, concl: &Assertion) -> bool {
    if ob.hypothesis == *hyp && ob.conclusion == *concl {
        return true;
    }
    match concl {
        Assertion::Implies(a, c) => ob.hypothesis == Assertion::and(hyp.clone(), (**a).clone()) && ob.conclusion == **c,
        _ => false,
    }
}

fn left_form(ob: &Obligation, sub_pre: &Assertion, pre: &Assertion) -> bool {
    implication_form(ob, sub_pre, pre)
}

fn right_form(ob: &Obligation, post: &Assertion, sub_post: &Assertion) -> bool {
    implication_form(ob, post, sub_post)
}

fn expect(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn schema(d: &Derivation) -> Result<(), String> {
    let t = &d.conclusion;
    expect(t.flavor == Flavor::Access, || "conclusion must be an access triple".into())?;
    for p in d.rule.premises() {
        expect(p.conclusion.flavor == Flavor::Access, || "premises must be access triples".into())?;
    }
    match &d.rule {
        Rule::Skip => {
            expect(t.prog == Stmt::Skip, || format!("skip rule applied to `{}`", t.prog))?;
            expect(t.pre == t.post, || {
                format!("expected (| P |) skip (| P |), found pre `{}` and post `{}`", t.pre, t.post)
            })
        }
        Rule::Assign => {
            let Stmt::Assign { target, value, .. } = &t.prog else {
                return Err(format!("assign rule applied to `{}`", t.prog));
            };
            let want = substitute(&t.post, target, value).map_err(|e| e.to_string())?;
            expect(t.pre == want, || format!("expected precondition `{want}`, found `{}`", t.pre))
        }
        Rule::Conseq { left, sub, right } => {
            expect(sub.prog() == &t.prog, || format!("premise is about `{}`, conclusion about `{}`", sub.prog(), t.prog))?;
            expect(left_form(left, sub.pre(), &t.pre), || {
                format!("left obligation must be `{}` -> `{}`", sub.pre(), t.pre)
            })?;
            expect(right_form(right, &t.post, sub.post()), || {
                format!("right obligation must be `{}` -> `{}`", t.post, sub.post())
            })
        }
        Rule::Comp(a, b) => {
            expect(t.prog == Stmt::seq(a.prog().clone(), b.prog().clone()), || {
                format!("expected `{}; {}`, found `{}`", a.prog(), b.prog(), t.prog)
            })?;
            expect(a.post() == b.pre(), || {
                format!("middle assertions differ: `{}` and `{}`", a.post(), b.pre())
            })?;
            expect(&t.pre == a.pre(), || format!("expected precondition `{}`", a.pre()))?;
            expect(&t.post == b.post(), || format!("expected postcondition `{}`", b.post()))
        }
        Rule::Cond(a, b) => {
            let Stmt::If {
                guard,
                then_branch,
                else_branch,
                ..
            } = &t.prog
            else {
                return Err(format!("cond rule applied to `{}`", t.prog));
            };
            let g = Assertion::atom(guard.clone());
            let want_a = Assertion::implies(g.clone(), t.pre.clone());
            let want_b = Assertion::implies(Assertion::not(g), t.pre.clone());
            expect(a.prog() == &**then_branch, || format!("first premise must be about `{then_branch}`"))?;
            expect(b.prog() == &**else_branch, || format!("second premise must be about `{else_branch}`"))?;
            expect(a.pre() == &want_a, || format!("first premise precondition must be `{want_a}`"))?;
            expect(b.pre() == &want_b, || format!("second premise precondition must be `{want_b}`"))?;
            expect(a.post() == &t.post && b.post() == &t.post, || {
                format!("premise postconditions must both be `{}`", t.post)
            })
        }
        Rule::While(body) => {
            let Stmt::While { guard, body: s, .. } = &t.prog else {
                return Err(format!("while rule applied to `{}`", t.prog));
            };
            let g = Assertion::atom(guard.clone());
            let want_pre = Assertion::implies(g, t.pre.clone());
            let want_post = Assertion::implies(Assertion::not(Assertion::atom(guard.clone())), t.pre.clone());
            expect(body.prog() == &**s, || format!("premise must be about `{s}`"))?;
            expect(body.pre() == &want_pre, || format!("premise precondition must be `{want_pre}`"))?;
            expect(body.post() == &t.pre, || format!("premise postcondition must be `{}`", t.pre))?;
            expect(t.post == want_post, || {
                format!("expected postcondition `{want_post}`, found `{}`", t.post)
            })
        }
        Rule::Conj(a, b) | Rule::Disj(a, b) => {
            let join = |x: &Assertion, y: &Assertion| match d.rule {
                Rule::Conj(..) => Assertion::and(x.clone(), y.clone()),
                _ => Assertion::or(x.clone(), y.clone()),
            };
            expect(a.prog() == &t.prog && b.prog() == &t.prog, || "premises must be about the same program".into())?;
            let pre = join(a.pre(), b.pre());
            let post = join(a.post(), b.post());
            expect(t.pre == pre, || format!("expected precondition `{pre}`"))?;
            expect(t.post == post, || format!("expected postcondition `{post}`"))
        }
    }
}
