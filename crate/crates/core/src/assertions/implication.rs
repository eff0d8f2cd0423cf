use serde_json::json;

use super::domain::{enumerate_states, DomainError, FiniteDomain};
use super::eval::truth;
use crate::semantics::State;
use crate::syntax::{Assertion, SortEnv};

/// A side condition `hypothesis -> conclusion` to be discharged over a domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Obligation {
    pub hypothesis: Assertion,
    pub conclusion: Assertion,
    pub origin: String,
}

impl Obligation {
    pub fn new(hypothesis: Assertion, conclusion: Assertion, origin: impl Into<String>) -> Self {
        Obligation {
            hypothesis,
            conclusion,
            origin: origin.into(),
        }
    }

    /// `hypothesis ==> conclusion` as a single assertion.
    pub fn to_assertion(&self) -> Assertion {
        Assertion::implies(self.hypothesis.clone(), self.conclusion.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "origin": self.origin,
            "hypothesis": self.hypothesis.to_string(),
            "conclusion": self.conclusion.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImplicationVerdict {
    Valid,
    /// First state in enumeration order where the hypothesis holds and the
    /// conclusion does not.
    Counterexample(State),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicationReport {
    pub verdict: ImplicationVerdict,
    pub states_checked: u64,
    /// States where some atom failed to evaluate and was read as false.
    pub assertion_errors: u64,
}

impl ImplicationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == ImplicationVerdict::Valid
    }

    pub fn counterexample(&self) -> Option<&State> {
        match &self.verdict {
            ImplicationVerdict::Counterexample(s) => Some(s),
            ImplicationVerdict::Valid => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "verdict": if self.is_valid() { "valid" } else { "counterexample" },
            "states_checked": self.states_checked,
            "assertion_errors": self.assertion_errors,
        });
        if let Some(s) = self.counterexample() {
            v["counterexample"] = s.to_json();
        }
        v
    }
}

/// Decides `hypothesis -> conclusion` by enumerating every state of `dom`.
pub fn check_implication(
    ob: &Obligation,
    env: &SortEnv,
    dom: &FiniteDomain,
) -> Result<ImplicationReport, DomainError> {
    let mut checked = 0;
    let mut errors = 0;
    for s in enumerate_states(env, dom)? {
        checked += 1;
        let h = truth(&ob.hypothesis, &s);
        let mut partial = h.partial;
        let mut ok = true;
        if h.value {
            let c = truth(&ob.conclusion, &s);
            partial |= c.partial;
            ok = c.value;
        }
        if partial {
            errors += 1;
        }
        if !ok {
            return Ok(ImplicationReport {
                verdict: ImplicationVerdict::Counterexample(s),
                states_checked: checked,
                assertion_errors: errors,
            });
        }
    }
    Ok(ImplicationReport {
        verdict: ImplicationVerdict::Valid,
        states_checked: checked,
        assertion_errors: errors,
    })
}
