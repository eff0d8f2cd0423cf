//! Proptest strategies for random programs and assertions over three int
//! variables `x`, `y`, `z`.
//!
//! Expressions never multiply two non-constant terms, so values grow at most
//! geometrically even inside loops.

use proptest::prelude::*;
use proptest::sample::select;

use crate::assertions::{FiniteDomain, VarDomain};
use crate::semantics::{State, Value};
use crate::syntax::{ArithOp, Assertion, BoolOp, CmpOp, Expr, Sort, SortEnv, Stmt, Var};

pub const VARS: [&str; 3] = ["x", "y", "z"];

/// `x, y, z in 0..2`.
pub fn small_domain() -> FiniteDomain {
    VARS.iter().fold(FiniteDomain::new(), |d, v| d.with(*v, VarDomain::Int { lo: 0, hi: 2 }))
}

pub fn small_env() -> SortEnv {
    small_domain().sort_env()
}

fn var(name: &str) -> Expr {
    Expr::var(name, Sort::Int)
}

fn int_leaf() -> BoxedStrategy<Expr> {
    prop_oneof![(0i64..4).prop_map(Expr::int), select(VARS.to_vec()).prop_map(var)].boxed()
}

/// Int expressions of nesting depth at most `depth`.
pub fn int_expr(depth: u32) -> BoxedStrategy<Expr> {
    if depth == 0 {
        return int_leaf();
    }
    let sub = int_expr(depth - 1);
    prop_oneof![
        2 => int_leaf(),
        1 => (sub.clone(), sub.clone()).prop_map(|(l, r)| Expr::arith(ArithOp::Add, l, r)),
        1 => (sub.clone(), sub).prop_map(|(l, r)| Expr::arith(ArithOp::Sub, l, r)),
        1 => (int_expr(depth - 1), 0i64..4).prop_map(|(l, k)| Expr::arith(ArithOp::Mul, l, Expr::int(k))),
    ]
    .boxed()
}

fn cmp_op() -> impl Strategy<Value = CmpOp> {
    select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge])
}

fn comparison(depth: u32) -> BoxedStrategy<Expr> {
    (cmp_op(), int_expr(depth), int_expr(depth))
        .prop_map(|(op, l, r)| Expr::cmp(op, l, r))
        .boxed()
}

/// Bool expressions; comparisons at the leaves.
pub fn bool_expr(depth: u32) -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![4 => comparison(1), 1 => any::<bool>().prop_map(Expr::Bool)];
    if depth == 0 {
        return leaf.boxed();
    }
    let sub = bool_expr(depth - 1);
    prop_oneof![
        3 => leaf,
        1 => sub.clone().prop_map(Expr::not),
        1 => (sub.clone(), sub.clone()).prop_map(|(l, r)| Expr::logic(BoolOp::And, l, r)),
        1 => (sub.clone(), sub).prop_map(|(l, r)| Expr::logic(BoolOp::Or, l, r)),
    ]
    .boxed()
}

/// Assertions with connectives and, below the top, bounded quantifiers over
/// the logical variable `j`.
pub fn assertion(depth: u32) -> BoxedStrategy<Assertion> {
    let leaf = prop_oneof![
        6 => comparison(1).prop_map(Assertion::atom),
        1 => Just(Assertion::True),
        1 => Just(Assertion::False),
    ];
    if depth == 0 {
        return leaf.boxed();
    }
    let sub = assertion(depth - 1);
    let quantified = (any::<bool>(), int_expr(1), cmp_op(), select(VARS.to_vec())).prop_map(|(ex, bound, op, v)| {
        let body = Assertion::atom(Expr::cmp(op, var("j"), var(v)));
        if ex {
            Assertion::exists("j", bound, body)
        } else {
            Assertion::forall("j", bound, body)
        }
    });
    prop_oneof![
        4 => leaf,
        1 => sub.clone().prop_map(Assertion::not),
        2 => (sub.clone(), sub.clone()).prop_map(|(l, r)| Assertion::and(l, r)),
        2 => (sub.clone(), sub.clone()).prop_map(|(l, r)| Assertion::or(l, r)),
        1 => (sub.clone(), sub).prop_map(|(l, r)| Assertion::implies(l, r)),
        1 => quantified,
    ]
    .boxed()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loops {
    None,
    /// `while v < c do { body; v := v + 1 }` with `body` not assigning `v`.
    Counting,
    /// Any guard, any body.
    Any,
}

fn stmt(depth: u32, targets: Vec<&'static str>, loops: Loops) -> BoxedStrategy<Stmt> {
    let leaf = if targets.is_empty() {
        Just(Stmt::Skip).boxed()
    } else {
        prop_oneof![
            1 => Just(Stmt::Skip),
            3 => (select(targets.clone()), int_expr(2))
                .prop_map(|(v, e)| Stmt::assign(Var::new(v, Sort::Int), e)),
        ]
        .boxed()
    };
    if depth == 0 {
        return leaf;
    }
    let sub = stmt(depth - 1, targets.clone(), loops);
    let seq = (sub.clone(), sub.clone()).prop_map(|(a, b)| Stmt::seq(a, b));
    let cond = (bool_expr(1), sub.clone(), sub.clone()).prop_map(|(g, a, b)| Stmt::if_then_else(g, a, b));
    match loops {
        Loops::None => prop_oneof![2 => leaf, 2 => seq, 1 => cond].boxed(),
        Loops::Any => {
            let lp = (bool_expr(1), sub).prop_map(|(g, b)| Stmt::while_loop(g, None, b));
            prop_oneof![2 => leaf, 2 => seq, 1 => cond, 1 => lp].boxed()
        }
        Loops::Counting if targets.is_empty() => prop_oneof![2 => leaf, 2 => seq, 1 => cond].boxed(),
        Loops::Counting => {
            let lp = select(targets.clone())
                .prop_flat_map(move |v| {
                    let rest: Vec<&'static str> = targets.iter().copied().filter(|t| *t != v).collect();
                    (Just(v), 0i64..4, stmt(depth - 1, rest, Loops::Counting))
                })
                .prop_map(|(v, c, body)| {
                    let step = Stmt::assign(
                        Var::new(v, Sort::Int),
                        Expr::arith(ArithOp::Add, var(v), Expr::int(1)),
                    );
                    Stmt::while_loop(Expr::cmp(CmpOp::Lt, var(v), Expr::int(c)), None, Stmt::seq(body, step))
                });
            prop_oneof![2 => leaf, 2 => seq, 1 => cond, 1 => lp].boxed()
        }
    }
}

/// Programs whose loops all count a variable up to a constant, so every run
/// terminates.
pub fn terminating_stmt(depth: u32) -> BoxedStrategy<Stmt> {
    stmt(depth, VARS.to_vec(), Loops::Counting)
}

/// Programs whose loops may diverge.
pub fn any_stmt(depth: u32) -> BoxedStrategy<Stmt> {
    stmt(depth, VARS.to_vec(), Loops::Any)
}

pub fn loop_free_stmt(depth: u32) -> BoxedStrategy<Stmt> {
    stmt(depth, VARS.to_vec(), Loops::None)
}

fn fill_invariants(s: &Stmt, pool: &mut impl Iterator<Item = Assertion>) -> Stmt {
    match s {
        Stmt::Skip | Stmt::Assign { .. } => s.clone(),
        Stmt::Seq(a, b) => Stmt::seq(fill_invariants(a, pool), fill_invariants(b, pool)),
        Stmt::If {
            guard,
            then_branch,
            else_branch,
            at,
        } => Stmt::If {
            guard: guard.clone(),
            then_branch: Box::new(fill_invariants(then_branch, pool)),
            else_branch: Box::new(fill_invariants(else_branch, pool)),
            at: *at,
        },
        Stmt::While { guard, body, at, .. } => Stmt::While {
            guard: guard.clone(),
            invariant: Some(pool.next().unwrap_or(Assertion::True)),
            body: Box::new(fill_invariants(body, pool)),
            at: *at,
        },
    }
}

/// Terminating programs with every loop annotated by `true` or a random
/// assertion.
pub fn annotated_stmt(depth: u32) -> BoxedStrategy<Stmt> {
    let inv = prop_oneof![1 => Just(Assertion::True), 2 => assertion(2)];
    (terminating_stmt(depth), proptest::collection::vec(inv, 16))
        .prop_map(|(s, invs)| fill_invariants(&s, &mut invs.into_iter()))
        .boxed()
}

/// Terminating programs that never leave [`small_domain`]: assignments copy
/// a variable or a constant in `0..=2`, and loops count up to at most 2.
pub fn closed_stmt(depth: u32) -> BoxedStrategy<Stmt> {
    closed(depth, VARS.to_vec())
}

fn closed(depth: u32, targets: Vec<&'static str>) -> BoxedStrategy<Stmt> {
    let small = prop_oneof![(0i64..3).prop_map(Expr::int), select(VARS.to_vec()).prop_map(var)];
    let leaf = if targets.is_empty() {
        Just(Stmt::Skip).boxed()
    } else {
        prop_oneof![
            1 => Just(Stmt::Skip),
            3 => (select(targets.clone()), small).prop_map(|(v, e)| Stmt::assign(Var::new(v, Sort::Int), e)),
        ]
        .boxed()
    };
    if depth == 0 || targets.is_empty() {
        return leaf;
    }
    let sub = closed(depth - 1, targets.clone());
    let seq = (sub.clone(), sub.clone()).prop_map(|(a, b)| Stmt::seq(a, b));
    let cond = (bool_expr(1), sub.clone(), sub).prop_map(|(g, a, b)| Stmt::if_then_else(g, a, b));
    let lp = select(targets.clone())
        .prop_flat_map(move |v| {
            let rest: Vec<&'static str> = targets.iter().copied().filter(|t| *t != v).collect();
            (Just(v), 0i64..3, closed(depth - 1, rest))
        })
        .prop_map(|(v, c, body)| {
            let step = Stmt::assign(Var::new(v, Sort::Int), Expr::arith(ArithOp::Add, var(v), Expr::int(1)));
            Stmt::while_loop(Expr::cmp(CmpOp::Lt, var(v), Expr::int(c)), None, Stmt::seq(body, step))
        });
    prop_oneof![2 => leaf, 2 => seq, 1 => cond, 1 => lp].boxed()
}

/// [`closed_stmt`] with every loop annotated by `true` or a random assertion.
pub fn closed_annotated_stmt(depth: u32) -> BoxedStrategy<Stmt> {
    let inv = prop_oneof![1 => Just(Assertion::True), 2 => assertion(2)];
    (closed_stmt(depth), proptest::collection::vec(inv, 16))
        .prop_map(|(s, invs)| fill_invariants(&s, &mut invs.into_iter()))
        .boxed()
}

/// States over `x, y, z` with values in `lo..=hi`.
pub fn state(lo: i64, hi: i64) -> BoxedStrategy<State> {
    (lo..=hi, lo..=hi, lo..=hi)
        .prop_map(|(x, y, z)| {
            State::new()
                .with("x", Value::int(x))
                .with("y", Value::int(y))
                .with("z", Value::int(z))
        })
        .boxed()
}

/// The assertion satisfied by exactly the given states of [`small_domain`].
pub fn assertion_of_states(states: &[State]) -> Assertion {
    states
        .iter()
        .map(|s| {
            VARS.iter()
                .map(|v| {
                    let Some(Value::Int(n)) = s.get(v) else {
                        panic!("state lacks int `{v}`");
                    };
                    Assertion::atom(Expr::cmp(CmpOp::Eq, var(v), Expr::Int(n.clone())))
                })
                .reduce(Assertion::and)
                .unwrap_or(Assertion::True)
        })
        .reduce(Assertion::or)
        .unwrap_or(Assertion::False)
}

/// A random subset of the 27 states of [`small_domain`] as an assertion.
pub fn state_predicate() -> BoxedStrategy<Assertion> {
    proptest::collection::vec(any::<bool>(), 27)
        .prop_map(|keep| {
            let env = small_env();
            let states: Vec<State> = crate::assertions::enumerate_states(&env, &small_domain())
                .expect("small domain")
                .zip(keep)
                .filter_map(|(s, k)| k.then_some(s))
                .collect();
            assertion_of_states(&states)
        })
        .boxed()
}
