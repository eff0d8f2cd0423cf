//! Assertion evaluation, substitution, finite domains and implication checks.
//!
//! Checkers evaluate assertions totally (see [`truth`]): an atom that fails to
//! evaluate, such as `el(0, L) == p`, is read as false and the state is
//! counted as an assertion error in the report. [`eval_assertion`] is the
//! strict evaluator that surfaces the error itself.

mod domain;
mod eval;
mod implication;
mod subst;

pub use domain::{enumerate_states, DomainError, FiniteDomain, States, VarDomain, DEFAULT_STATE_CAP};
pub use eval::{eval_assertion, holds, truth, Truth};
pub use implication::{check_implication, ImplicationReport, ImplicationVerdict, Obligation};
pub use subst::{substitute, SubstError};
