//! Deterministic big-step interpreter with an explicit fuel bound.
//!
//! Fuel is charged one unit per statement node entered and one unit per
//! loop-guard test. Running out of fuel is not a verdict about the program,
//! only about the budget, and is reported as [`ExecOutcome::FuelExhausted`].

use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::json;

use crate::syntax::{ArithOp, BoolOp, CmpOp, Expr, Sort, Span, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    List(Vec<BigInt>),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Bool(_) => Sort::Bool,
            Value::List(_) => Sort::List,
        }
    }

    pub fn int(v: impl Into<BigInt>) -> Value {
        Value::Int(v.into())
    }

    pub fn list<I: Into<BigInt>>(items: impl IntoIterator<Item = I>) -> Value {
        Value::List(items.into_iter().map(Into::into).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        fn int_json(n: &BigInt) -> serde_json::Value {
            match n.to_i64() {
                Some(v) => json!(v),
                None => json!(n.to_string()),
            }
        }
        match self {
            Value::Int(n) => int_json(n),
            Value::Bool(b) => json!(b),
            Value::List(items) => serde_json::Value::Array(items.iter().map(int_json).collect()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A program state: variable name to value, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct State {
    vars: IndexMap<String, Value>,
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: Value) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.get(name)
    }

    pub fn set(&mut self, name: impl Into<String>, value: Value) {
        self.vars.insert(name.into(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// JSON object `{name: value}` in declaration order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.vars
                .iter()
                .map(|(k, v)| (k.clone(), v.to_json()))
                .collect(),
        )
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for State {
    fn from_iter<I: IntoIterator<Item = (S, Value)>>(iter: I) -> Self {
        State {
            vars: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuntimeErrorKind {
    IndexOutOfRange,
    SortMismatch,
}

impl RuntimeErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            RuntimeErrorKind::IndexOutOfRange => "index_out_of_range",
            RuntimeErrorKind::SortMismatch => "sort_mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} at {at}: {detail}", kind.name())]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    pub at: Span,
    pub detail: String,
}

impl RuntimeError {
    fn new(kind: RuntimeErrorKind, detail: impl Into<String>) -> Self {
        RuntimeError {
            kind,
            at: Span::default(),
            detail: detail.into(),
        }
    }

    fn sort(detail: impl Into<String>) -> Self {
        RuntimeError::new(RuntimeErrorKind::SortMismatch, detail)
    }

    fn located(mut self, at: Span) -> Self {
        self.at = at;
        self
    }
}

/// Values of quantifier-bound variables, innermost last.
pub(crate) type Bindings = [(String, BigInt)];

/// Evaluates `e` in state `s`.
pub fn eval_expr(e: &Expr, s: &State) -> Result<Value, RuntimeError> {
    eval_in(e, s, &[])
}

fn int_of(v: Value, what: &Expr) -> Result<BigInt, RuntimeError> {
    match v {
        Value::Int(n) => Ok(n),
        other => Err(RuntimeError::sort(format!(
            "`{what}` evaluated to {other}, expected an int"
        ))),
    }
}

fn bool_of(v: Value, what: &Expr) -> Result<bool, RuntimeError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(RuntimeError::sort(format!(
            "`{what}` evaluated to {other}, expected a bool"
        ))),
    }
}

fn list_of(v: Value, what: &Expr) -> Result<Vec<BigInt>, RuntimeError> {
    match v {
        Value::List(l) => Ok(l),
        other => Err(RuntimeError::sort(format!(
            "`{what}` evaluated to {other}, expected a list"
        ))),
    }
}

pub(crate) fn eval_in(e: &Expr, s: &State, bound: &Bindings) -> Result<Value, RuntimeError> {
    match e {
        Expr::Int(n) => Ok(Value::Int(n.clone())),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Var(v) => {
            if let Some((_, n)) = bound.iter().rev().find(|(name, _)| *name == v.name) {
                return Ok(Value::Int(n.clone()));
            }
            s.get(&v.name)
                .cloned()
                .ok_or_else(|| RuntimeError::sort(format!("`{}` is not in the state", v.name)))
        }
        Expr::Arith(op, l, r) => {
            let a = int_of(eval_in(l, s, bound)?, l)?;
            let b = int_of(eval_in(r, s, bound)?, r)?;
            Ok(Value::Int(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            }))
        }
        Expr::Cmp(op, l, r) => {
            let a = eval_in(l, s, bound)?;
            let b = eval_in(r, s, bound)?;
            if a.sort() != b.sort() {
                return Err(RuntimeError::sort(format!(
                    "`{e}` compares {a} with {b}"
                )));
            }
            Ok(Value::Bool(match op {
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
                _ => {
                    let (a, b) = (int_of(a, l)?, int_of(b, r)?);
                    match op {
                        CmpOp::Lt => a < b,
                        CmpOp::Le => a <= b,
                        CmpOp::Gt => a > b,
                        _ => a >= b,
                    }
                }
            }))
        }
        // Left-to-right, short-circuiting.
        Expr::Logic(op, l, r) => {
            let a = bool_of(eval_in(l, s, bound)?, l)?;
            match (op, a) {
                (BoolOp::And, false) => Ok(Value::Bool(false)),
                (BoolOp::Or, true) => Ok(Value::Bool(true)),
                _ => Ok(Value::Bool(bool_of(eval_in(r, s, bound)?, r)?)),
            }
        }
        Expr::Not(a) => Ok(Value::Bool(!bool_of(eval_in(a, s, bound)?, a)?)),
        Expr::Lh(l) => {
            let list = list_of(eval_in(l, s, bound)?, l)?;
            Ok(Value::Int(BigInt::from(list.len())))
        }
        Expr::El(i, l) => {
            let idx = int_of(eval_in(i, s, bound)?, i)?;
            let list = list_of(eval_in(l, s, bound)?, l)?;
            let pos = if idx >= BigInt::one() {
                (&idx - 1u32).to_usize().filter(|p| *p < list.len())
            } else {
                None
            };
            match pos {
                Some(p) => Ok(Value::Int(list[p].clone())),
                None => Err(RuntimeError::new(
                    RuntimeErrorKind::IndexOutOfRange,
                    format!("el({idx}, {l}) on a list of length {}", list.len()),
                )),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecOutcome {
    Terminated(State),
    FuelExhausted,
    RuntimeError(RuntimeError),
}

impl ExecOutcome {
    pub fn final_state(&self) -> Option<&State> {
        match self {
            ExecOutcome::Terminated(s) => Some(s),
            _ => None,
        }
    }
}

pub const DEFAULT_FUEL: u64 = 10_000;

/// Outcome of a run together with the fuel it consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub outcome: ExecOutcome,
    pub fuel_used: u64,
}

/// Runs `c` from `s` with at most `fuel` units.
pub fn exec(c: &Stmt, s: &State, fuel: u64) -> ExecOutcome {
    run(c, s, fuel).outcome
}

/// Like [`exec`], also reporting the fuel consumed.
pub fn run(c: &Stmt, s: &State, fuel: u64) -> Execution {
    run_observed(c, s, fuel, &mut |_| {})
}

/// Like [`run`], calling `observe` with the state after every assignment.
pub fn run_observed(c: &Stmt, s: &State, fuel: u64, observe: &mut dyn FnMut(&State)) -> Execution {
    let mut m = Machine {
        remaining: fuel,
        used: 0,
        observe,
    };
    let mut state = s.clone();
    let outcome = match m.exec(c, &mut state) {
        Ok(()) => ExecOutcome::Terminated(state),
        Err(Halt::Fuel) => ExecOutcome::FuelExhausted,
        Err(Halt::Error(e)) => ExecOutcome::RuntimeError(e),
    };
    Execution {
        outcome,
        fuel_used: m.used,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Yes,
    NoWithinFuel,
    Error,
}

pub fn terminates(c: &Stmt, s: &State, fuel: u64) -> Termination {
    match exec(c, s, fuel) {
        ExecOutcome::Terminated(_) => Termination::Yes,
        ExecOutcome::FuelExhausted => Termination::NoWithinFuel,
        ExecOutcome::RuntimeError(_) => Termination::Error,
    }
}

enum Halt {
    Fuel,
    Error(RuntimeError),
}

struct Machine<'a> {
    remaining: u64,
    used: u64,
    observe: &'a mut dyn FnMut(&State),
}

impl Machine<'_> {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.remaining == 0 {
            return Err(Halt::Fuel);
        }
        self.remaining -= 1;
        self.used += 1;
        Ok(())
    }

    fn guard(&self, g: &Expr, s: &State, at: Span) -> Result<bool, Halt> {
        match eval_expr(g, s) {
            Ok(Value::Bool(b)) => Ok(b),
            Ok(v) => Err(Halt::Error(
                RuntimeError::sort(format!("guard `{g}` evaluated to {v}")).located(at),
            )),
            Err(e) => Err(Halt::Error(e.located(at))),
        }
    }

    fn exec(&mut self, c: &Stmt, s: &mut State) -> Result<(), Halt> {
        self.tick()?;
        match c {
            Stmt::Skip => Ok(()),
            Stmt::Assign { target, value, at } => {
                let v = eval_expr(value, s).map_err(|e| Halt::Error(e.located(*at)))?;
                match s.get(&target.name) {
                    Some(old) if old.sort() == v.sort() => {
                        s.set(target.name.clone(), v);
                        (self.observe)(s);
                        Ok(())
                    }
                    Some(old) => Err(Halt::Error(
                        RuntimeError::sort(format!(
                            "cannot store {v} into `{}` holding {old}",
                            target.name
                        ))
                        .located(*at),
                    )),
                    None => Err(Halt::Error(
                        RuntimeError::sort(format!("`{}` is not in the state", target.name))
                            .located(*at),
                    )),
                }
            }
            Stmt::Seq(a, b) => {
                self.exec(a, s)?;
                self.exec(b, s)
            }
            Stmt::If {
                guard,
                then_branch,
                else_branch,
                at,
            } => {
                if self.guard(guard, s, *at)? {
                    self.exec(then_branch, s)
                } else {
                    self.exec(else_branch, s)
                }
            }
            Stmt::While {
                guard, body, at, ..
            } => loop {
                self.tick()?;
                if !self.guard(guard, s, *at)? {
                    return Ok(());
                }
                self.exec(body, s)?;
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_stmt, SortEnv};

    fn list_env() -> SortEnv {
        [("L", Sort::List), ("i", Sort::Int)].into_iter().collect()
    }

    fn l57() -> State {
        State::new()
            .with("L", Value::list([5, 7]))
            .with("i", Value::int(0))
    }

    #[test]
    fn length_and_one_based_indexing() {
        let env = list_env();
        assert_eq!(eval_expr(&parse_expr("lh(L)", &env).unwrap(), &l57()), Ok(Value::int(2)));
        assert_eq!(eval_expr(&parse_expr("el(1, L)", &env).unwrap(), &l57()), Ok(Value::int(5)));
        assert_eq!(eval_expr(&parse_expr("el(2, L)", &env).unwrap(), &l57()), Ok(Value::int(7)));
    }

    #[test]
    fn out_of_range_indices_are_errors() {
        let env = list_env();
        for src in ["el(3, L)", "el(0, L)", "el(0 - 1, L)"] {
            let err = eval_expr(&parse_expr(src, &env).unwrap(), &l57()).unwrap_err();
            assert_eq!(err.kind, RuntimeErrorKind::IndexOutOfRange, "{src}");
        }
    }

    #[test]
    fn logic_short_circuits_left_to_right() {
        let env = list_env();
        let e = parse_expr("i >= 1 and el(i, L) == 5", &env).unwrap();
        assert_eq!(eval_expr(&e, &l57()), Ok(Value::Bool(false)));
        let e = parse_expr("el(i, L) == 5 and i >= 1", &env).unwrap();
        assert!(eval_expr(&e, &l57()).is_err());
    }

    #[test]
    fn skip_leaves_state_unchanged() {
        assert_eq!(exec(&Stmt::Skip, &l57(), 1), ExecOutcome::Terminated(l57()));
    }

    #[test]
    fn fuel_zero_runs_nothing() {
        assert_eq!(exec(&Stmt::Skip, &l57(), 0), ExecOutcome::FuelExhausted);
    }

    #[test]
    fn fuel_accounting() {
        let env: SortEnv = [("x", Sort::Int)].into_iter().collect();
        // while node + 3 guard tests + 2 * (seq? no: assign) bodies
        let c = parse_stmt("while x < 2 do { x := x + 1 }", &env).unwrap();
        let s = State::new().with("x", Value::int(0));
        let r = run(&c, &s, 100);
        assert_eq!(r.fuel_used, 1 + 3 + 2);
        assert_eq!(exec(&c, &s, 6), r.outcome);
        assert_eq!(exec(&c, &s, 5), ExecOutcome::FuelExhausted);
    }

    #[test]
    fn runtime_errors_carry_statement_location() {
        let env = list_env();
        let c = parse_stmt("skip;\n  i := el(9, L)", &env).unwrap();
        match exec(&c, &l57(), 10) {
            ExecOutcome::RuntimeError(e) => {
                assert_eq!(e.kind, RuntimeErrorKind::IndexOutOfRange);
                assert_eq!((e.at.line, e.at.col), (2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn assignment_into_wrong_sort_is_reported() {
        let env = list_env();
        let c = parse_stmt("i := 1", &env).unwrap();
        let s = State::new().with("i", Value::Bool(true));
        match exec(&c, &s, 10) {
            ExecOutcome::RuntimeError(e) => assert_eq!(e.kind, RuntimeErrorKind::SortMismatch),
            other => panic!("unexpected {other:?}"),
        }
    }
}
