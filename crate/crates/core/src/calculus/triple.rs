use std::fmt;
use std::str::FromStr;

use serde_json::json;

use crate::assertions::{enumerate_states, truth, DomainError, FiniteDomain};
use crate::semantics::{exec, ExecOutcome, State};
use crate::syntax::{Assertion, SortEnv, Stmt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `(| P |) C (| Q |)`: a terminating run ending in `Q` started in `P`.
    Access,
    /// `{ P } C { Q }`: a terminating run started in `P` ends in `Q`.
    Hoare,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Access => "access",
            Flavor::Hoare => "hoare",
        }
    }

    pub fn dual(self) -> Flavor {
        match self {
            Flavor::Access => Flavor::Hoare,
            Flavor::Hoare => Flavor::Access,
        }
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "access" => Ok(Flavor::Access),
            "hoare" => Ok(Flavor::Hoare),
            other => Err(format!("unknown flavor `{other}` (expected access or hoare)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub flavor: Flavor,
    pub pre: Assertion,
    pub prog: Stmt,
    pub post: Assertion,
}

impl Triple {
    pub fn access(pre: Assertion, prog: Stmt, post: Assertion) -> Triple {
        Triple {
            flavor: Flavor::Access,
            pre,
            prog,
            post,
        }
    }

    pub fn hoare(pre: Assertion, prog: Stmt, post: Assertion) -> Triple {
        Triple {
            flavor: Flavor::Hoare,
            pre,
            prog,
            post,
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Flavor::Access => write!(f, "(| {} |) {} (| {} |)", self.pre, self.prog, self.post),
            Flavor::Hoare => write!(f, "{{ {} }} {} {{ {} }}", self.pre, self.prog, self.post),
        }
    }
}

/// Flips the flavor and negates both assertions.
pub fn dualize(t: &Triple) -> Triple {
    Triple {
        flavor: t.flavor.dual(),
        pre: Assertion::not(t.pre.clone()),
        prog: t.prog.clone(),
        post: Assertion::not(t.post.clone()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleVerdict {
    /// No violating run exists. `qualified` when some state ran out of fuel,
    /// in which case a longer run could still be a counterexample.
    Valid { qualified: bool },
    /// First violating run in enumeration order of its initial state.
    Invalid { initial: State, last: State },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleReport {
    pub verdict: TripleVerdict,
    pub states: u64,
    pub fuel_exhausted: u64,
    pub runtime_errors: u64,
    pub assertion_errors: u64,
}

impl TripleReport {
    pub fn is_valid(&self) -> bool {
        matches!(self.verdict, TripleVerdict::Valid { .. })
    }

    pub fn is_definitely_valid(&self) -> bool {
        self.verdict == TripleVerdict::Valid { qualified: false }
    }

    pub fn verdict_name(&self) -> &'static str {
        match self.verdict {
            TripleVerdict::Valid { qualified: false } => "valid",
            TripleVerdict::Valid { qualified: true } => "qualified",
            TripleVerdict::Invalid { .. } => "invalid",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "verdict": self.verdict_name(),
            "states": self.states,
            "fuel_exhausted": self.fuel_exhausted,
            "runtime_errors": self.runtime_errors,
            "assertion_errors": self.assertion_errors,
        });
        if let TripleVerdict::Invalid { initial, last } = &self.verdict {
            v["counterexample"] = json!({ "initial": initial.to_json(), "final": last.to_json() });
        }
        v
    }
}

/// Decides a triple by running the program from every state of the domain.
/// Runs that error or exhaust their fuel contribute no pair of states.
pub fn check_triple_semantic(
    t: &Triple,
    env: &SortEnv,
    dom: &FiniteDomain,
    fuel: u64,
) -> Result<TripleReport, DomainError> {
    let mut report = TripleReport {
        verdict: TripleVerdict::Valid { qualified: false },
        states: 0,
        fuel_exhausted: 0,
        runtime_errors: 0,
        assertion_errors: 0,
    };
    for s in enumerate_states(env, dom)? {
        report.states += 1;
        let last = match exec(&t.prog, &s, fuel) {
            ExecOutcome::Terminated(last) => last,
            ExecOutcome::FuelExhausted => {
                report.fuel_exhausted += 1;
                continue;
            }
            ExecOutcome::RuntimeError(_) => {
                report.runtime_errors += 1;
                continue;
            }
        };
        let p = truth(&t.pre, &s);
        let q = truth(&t.post, &last);
        if p.partial || q.partial {
            report.assertion_errors += 1;
        }
        let ok = match t.flavor {
            Flavor::Access => !q.value || p.value,
            Flavor::Hoare => !p.value || q.value,
        };
        if !ok {
            report.verdict = TripleVerdict::Invalid { initial: s, last };
            return Ok(report);
        }
    }
    report.verdict = TripleVerdict::Valid {
        qualified: report.fuel_exhausted > 0,
    };
    Ok(report)
}
