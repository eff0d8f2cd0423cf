use num_bigint::BigInt;
use num_traits::One;

use crate::semantics::{eval_in, RuntimeError, State, Value};
use crate::syntax::{Assertion, Expr, Quantifier};

/// Strict evaluation: any expression error propagates.
///
/// Connectives are evaluated left to right with short-circuiting; bounded
/// quantifiers evaluate their body for every `j` in `1..=bound`.
pub fn eval_assertion(a: &Assertion, s: &State) -> Result<bool, RuntimeError> {
    strict(a, s, &mut Vec::new())
}

fn range(bound: &Expr, s: &State, env: &[(String, BigInt)]) -> Result<BigInt, RuntimeError> {
    match eval_in(bound, s, env)? {
        Value::Int(n) => Ok(n),
        other => Err(RuntimeError {
            kind: crate::semantics::RuntimeErrorKind::SortMismatch,
            at: Default::default(),
            detail: format!("quantifier bound `{bound}` evaluated to {other}"),
        }),
    }
}

fn atom(e: &Expr, s: &State, env: &[(String, BigInt)]) -> Result<bool, RuntimeError> {
    match eval_in(e, s, env)? {
        Value::Bool(b) => Ok(b),
        other => Err(RuntimeError {
            kind: crate::semantics::RuntimeErrorKind::SortMismatch,
            at: Default::default(),
            detail: format!("`{e}` evaluated to {other}, expected a bool"),
        }),
    }
}

fn strict(a: &Assertion, s: &State, env: &mut Vec<(String, BigInt)>) -> Result<bool, RuntimeError> {
    Ok(match a {
        Assertion::True => true,
        Assertion::False => false,
        Assertion::Atom(e) => atom(e, s, env)?,
        Assertion::And(l, r) => strict(l, s, env)? && strict(r, s, env)?,
        Assertion::Or(l, r) => strict(l, s, env)? || strict(r, s, env)?,
        Assertion::Implies(l, r) => !strict(l, s, env)? || strict(r, s, env)?,
        Assertion::Not(x) => !strict(x, s, env)?,
        Assertion::Bounded {
            quantifier,
            var,
            bound,
            body,
        } => {
            let hi = range(bound, s, env)?;
            let mut any = false;
            let mut all = true;
            let mut j = BigInt::one();
            while j <= hi {
                env.push((var.clone(), j.clone()));
                let r = strict(body, s, env);
                env.pop();
                let v = r?;
                any |= v;
                all &= v;
                j += 1;
            }
            match quantifier {
                Quantifier::Exists => any,
                Quantifier::Forall => all,
            }
        }
    })
}

/// Result of total evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truth {
    pub value: bool,
    /// Some atom or quantifier bound failed to evaluate on the way.
    pub partial: bool,
}

/// Total evaluation used by every checker. An atom whose expression fails to
/// evaluate is false; a quantifier whose bound fails ranges over nothing.
/// Either event marks the result as partial so callers can report it.
pub fn truth(a: &Assertion, s: &State) -> Truth {
    let mut partial = false;
    let value = total(a, s, &mut Vec::new(), &mut partial);
    Truth { value, partial }
}

/// Shorthand for `truth(a, s).value`.
pub fn holds(a: &Assertion, s: &State) -> bool {
    truth(a, s).value
}

fn total(a: &Assertion, s: &State, env: &mut Vec<(String, BigInt)>, partial: &mut bool) -> bool {
    match a {
        Assertion::True => true,
        Assertion::False => false,
        Assertion::Atom(e) => atom(e, s, env).unwrap_or_else(|_| {
            *partial = true;
            false
        }),
        Assertion::And(l, r) => total(l, s, env, partial) && total(r, s, env, partial),
        Assertion::Or(l, r) => total(l, s, env, partial) || total(r, s, env, partial),
        Assertion::Implies(l, r) => !total(l, s, env, partial) || total(r, s, env, partial),
        Assertion::Not(x) => !total(x, s, env, partial),
        Assertion::Bounded {
            quantifier,
            var,
            bound,
            body,
        } => {
            let hi = range(bound, s, env).unwrap_or_else(|_| {
                *partial = true;
                BigInt::from(0)
            });
            let mut any = false;
            let mut all = true;
            let mut j = BigInt::one();
            while j <= hi {
                env.push((var.clone(), j.clone()));
                let v = total(body, s, env, partial);
                env.pop();
                any |= v;
                all &= v;
                j += 1;
            }
            match quantifier {
                Quantifier::Exists => any,
                Quantifier::Forall => all,
            }
        }
    }
}
