//! Strongest and weakest preconditions as state sets over a finite domain,
//! and the syntactic strongest precondition of loop-free programs.

use fixedbitset::FixedBitSet;
use serde_json::json;
use thiserror::Error;

use crate::assertions::{enumerate_states, substitute, truth, DomainError, FiniteDomain, SubstError};
use crate::semantics::{exec, run_observed, ExecOutcome, State};
use crate::syntax::{Assertion, SortEnv, Stmt};

/// A set of states of one finite domain, stored as a bitset over the
/// enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    env: SortEnv,
    dom: FiniteDomain,
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(env: &SortEnv, dom: &FiniteDomain) -> Result<Self, DomainError> {
        let n = enumerate_states(env, dom)?.len();
        Ok(StateSet {
            env: env.clone(),
            dom: dom.clone(),
            bits: FixedBitSet::with_capacity(n),
        })
    }

    pub fn full(env: &SortEnv, dom: &FiniteDomain) -> Result<Self, DomainError> {
        let mut s = StateSet::empty(env, dom)?;
        s.bits.insert_range(..);
        Ok(s)
    }

    /// States satisfying `a` under total evaluation.
    pub fn of_assertion(a: &Assertion, env: &SortEnv, dom: &FiniteDomain) -> Result<Self, DomainError> {
        let mut out = StateSet::empty(env, dom)?;
        for (i, s) in enumerate_states(env, dom)?.enumerate() {
            out.bits.set(i, truth(a, &s).value);
        }
        Ok(out)
    }

    /// States `s` (by enumeration index) for which `keep(i)` holds.
    pub fn from_indices(
        env: &SortEnv,
        dom: &FiniteDomain,
        keep: impl Fn(usize) -> bool,
    ) -> Result<Self, DomainError> {
        let mut out = StateSet::empty(env, dom)?;
        for i in 0..out.universe_size() {
            out.bits.set(i, keep(i));
        }
        Ok(out)
    }

    pub fn universe_size(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe_size()
    }

    pub fn contains(&self, s: &State) -> bool {
        self.dom
            .index_of(&self.env, s)
            .is_some_and(|i| self.bits.contains(i))
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert_index(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn complement(&self) -> StateSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    /// Member states in enumeration order.
    pub fn states(&self) -> Vec<State> {
        enumerate_states(&self.env, &self.dom)
            .map(|it| {
                it.enumerate()
                    .filter(|(i, _)| self.bits.contains(*i))
                    .map(|(_, s)| s)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// First index where the two sets differ.
    pub fn first_difference(&self, other: &StateSet) -> Option<usize> {
        let mut diff = self.bits.clone();
        diff.symmetric_difference_with(&other.bits);
        diff.ones().next()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.states().iter().map(State::to_json).collect())
    }
}

/// A computed state set with the bookkeeping of how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformed {
    pub set: StateSet,
    /// Some state ran out of fuel, so membership is only approximate.
    pub qualified: bool,
    pub fuel_exhausted: u64,
    pub runtime_errors: u64,
    pub assertion_errors: u64,
}

impl Transformed {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "qualified": self.qualified,
            "size": self.set.len(),
            "of": self.set.universe_size(),
            "fuel_exhausted": self.fuel_exhausted,
            "runtime_errors": self.runtime_errors,
            "assertion_errors": self.assertion_errors,
            "states": self.set.to_json(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Run {
    /// Terminated; whether the final state satisfies the postcondition.
    Lands(bool),
    Exhausted,
    Failed,
}

struct Runs {
    runs: Vec<Run>,
    assertion_errors: u64,
}

fn runs(c: &Stmt, q: &Assertion, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<Runs, DomainError> {
    let mut out = Vec::new();
    let mut assertion_errors = 0;
    for s in enumerate_states(env, dom)? {
        out.push(match exec(c, &s, fuel) {
            ExecOutcome::Terminated(t) => {
                let v = truth(q, &t);
                assertion_errors += v.partial as u64;
                Run::Lands(v.value)
            }
            ExecOutcome::FuelExhausted => Run::Exhausted,
            ExecOutcome::RuntimeError(_) => Run::Failed,
        });
    }
    Ok(Runs {
        runs: out,
        assertion_errors,
    })
}

impl Runs {
    fn collect(&self, env: &SortEnv, dom: &FiniteDomain, member: impl Fn(Run) -> bool) -> Result<Transformed, DomainError> {
        let set = StateSet::from_indices(env, dom, |i| member(self.runs[i]))?;
        let count = |r: Run| self.runs.iter().filter(|x| **x == r).count() as u64;
        let fuel_exhausted = count(Run::Exhausted);
        Ok(Transformed {
            set,
            qualified: fuel_exhausted > 0,
            fuel_exhausted,
            runtime_errors: count(Run::Failed),
            assertion_errors: self.assertion_errors,
        })
    }
}

/// States from which `c` terminates in a state satisfying `q`.
pub fn sp_semantic(c: &Stmt, q: &Assertion, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<Transformed, DomainError> {
    runs(c, q, env, dom, fuel)?.collect(env, dom, |r| r == Run::Lands(true))
}

/// States from which every terminating run of `c` satisfies `q`.
pub fn wp_semantic(c: &Stmt, q: &Assertion, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<Transformed, DomainError> {
    runs(c, q, env, dom, fuel)?.collect(env, dom, |r| r != Run::Lands(false))
}

/// States from which `c` terminates within `fuel`.
pub fn termination_set(c: &Stmt, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<Transformed, DomainError> {
    runs(c, &Assertion::True, env, dom, fuel)?.collect(env, dom, |r| matches!(r, Run::Lands(_)))
}

/// Whether runs of a program from domain states stay inside the domain.
///
/// Obligations are only checked on domain states. A run that passes through
/// a state outside the domain can therefore break a conclusion drawn from
/// them, and verdicts that rely on obligations are qualified unless the
/// domain is closed under the program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    /// Initial states whose run reaches a state outside the domain.
    pub escapes: u64,
    /// Initial states whose run was cut off before it could be followed.
    pub fuel_exhausted: u64,
    /// The first escaping run: initial state and the first state outside.
    pub first_escape: Option<(State, State)>,
}

impl Closure {
    pub fn is_closed(&self) -> bool {
        self.escapes == 0 && self.fuel_exhausted == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "closed": self.is_closed(),
            "escapes": self.escapes,
            "fuel_exhausted": self.fuel_exhausted,
        });
        if let Some((init, out)) = &self.first_escape {
            v["first_escape"] = json!({ "initial": init.to_json(), "outside": out.to_json() });
        }
        v
    }
}

/// Runs `c` from every domain state and watches every intermediate state.
pub fn domain_closure(c: &Stmt, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<Closure, DomainError> {
    let mut out = Closure {
        escapes: 0,
        fuel_exhausted: 0,
        first_escape: None,
    };
    for s in enumerate_states(env, dom)? {
        let mut outside: Option<State> = None;
        let r = run_observed(c, &s, fuel, &mut |t| {
            if outside.is_none() && dom.index_of(env, t).is_none() {
                outside = Some(t.clone());
            }
        });
        if let Some(t) = outside {
            out.escapes += 1;
            if out.first_escape.is_none() {
                out.first_escape = Some((s, t));
            }
        } else if r.outcome == ExecOutcome::FuelExhausted {
            out.fuel_exhausted += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("program contains a while loop")]
    ContainsLoop,
    #[error(transparent)]
    Subst(#[from] SubstError),
}

/// Syntactic strongest precondition of a loop-free program.
pub fn sp_syntactic(c: &Stmt, q: &Assertion) -> Result<Assertion, TransformError> {
    match c {
        Stmt::Skip => Ok(q.clone()),
        Stmt::Assign { target, value, .. } => Ok(substitute(q, target, value)?),
        Stmt::Seq(s, t) => sp_syntactic(s, &sp_syntactic(t, q)?),
        Stmt::If {
            guard,
            then_branch,
            else_branch,
            ..
        } => {
            let b = Assertion::atom(guard.clone());
            Ok(Assertion::or(
                Assertion::and(b.clone(), sp_syntactic(then_branch, q)?),
                Assertion::and(Assertion::not(b), sp_syntactic(else_branch, q)?),
            ))
        }
        Stmt::While { .. } => Err(TransformError::ContainsLoop),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorollaryVerdict {
    Holds,
    /// Some state ran out of fuel; no definitive verdict is given.
    Qualified { fuel_exhausted: u64 },
    /// A state where `sp = wp ∩ T` fails (`law = "intersection"`) or where
    /// `wp(s) <=> (T(s) -> sp(s))` fails (`law = "termination"`).
    Counterexample { law: &'static str, state: State },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorollaryReport {
    pub verdict: CorollaryVerdict,
    pub sp: Transformed,
    pub wp: Transformed,
    pub terminating: Transformed,
}

impl CorollaryReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "sp_size": self.sp.set.len(),
            "wp_size": self.wp.set.len(),
            "terminating_size": self.terminating.set.len(),
            "of": self.sp.set.universe_size(),
        });
        match &self.verdict {
            CorollaryVerdict::Holds => v["verdict"] = json!("holds"),
            CorollaryVerdict::Qualified { fuel_exhausted } => {
                v["verdict"] = json!("qualified");
                v["fuel_exhausted"] = json!(fuel_exhausted);
            }
            CorollaryVerdict::Counterexample { law, state } => {
                v["verdict"] = json!("counterexample");
                v["law"] = json!(law);
                v["state"] = state.to_json();
            }
        }
        v
    }
}

/// Checks pointwise that the strongest precondition equals the weakest
/// precondition restricted to terminating states, and that `s` is in the
/// weakest precondition iff termination from `s` implies `s` is in the
/// strongest precondition.
pub fn check_corollary(c: &Stmt, q: &Assertion, env: &SortEnv, dom: &FiniteDomain, fuel: u64) -> Result<CorollaryReport, DomainError> {
    let r = runs(c, q, env, dom, fuel)?;
    let sp = r.collect(env, dom, |r| r == Run::Lands(true))?;
    let wp = r.collect(env, dom, |r| r != Run::Lands(false))?;
    let terminating = r.collect(env, dom, |r| matches!(r, Run::Lands(_)))?;

    let meet = wp.set.intersection(&terminating.set);
    let weak = terminating.set.complement().union(&sp.set);
    let bad = sp
        .set
        .first_difference(&meet)
        .map(|i| ("intersection", i))
        .or_else(|| wp.set.first_difference(&weak).map(|i| ("termination", i)));

    let verdict = if sp.qualified {
        CorollaryVerdict::Qualified {
            fuel_exhausted: sp.fuel_exhausted,
        }
    } else if let Some((law, i)) = bad {
        let state = enumerate_states(env, dom)?.nth(i).expect("index within domain");
        CorollaryVerdict::Counterexample { law, state }
    } else {
        CorollaryVerdict::Holds
    };
    Ok(CorollaryReport {
        verdict,
        sp,
        wp,
        terminating,
    })
}
