//! Abstract syntax of the While language and of the assertion language.

use std::fmt;
use std::hash::{Hash, Hasher};

use indexmap::IndexMap;
use num_bigint::BigInt;

/// Sort of a program variable or expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Int,
    Bool,
    List,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "int",
            Sort::Bool => "bool",
            Sort::List => "list",
        })
    }
}

/// Source position (1-based). Positions never take part in structural equality,
/// so a re-parsed AST compares equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// Only `==` and `!=` accept non-integer operands.
    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

/// A variable occurrence. The sort is recorded at elaboration time so that
/// sort checks (e.g. in substitution) need no environment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Var {
            name: name.into(),
            sort,
        }
    }
}

/// Side-effect free expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Bool(bool),
    Var(Var),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Logic(BoolOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    /// `lh(L)`: length of a list.
    Lh(Box<Expr>),
    /// `el(i, L)`: the `i`-th element of `L`, 1-based.
    El(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: impl Into<BigInt>) -> Expr {
        Expr::Int(v.into())
    }

    pub fn var(name: impl Into<String>, sort: Sort) -> Expr {
        Expr::Var(Var::new(name, sort))
    }

    pub fn arith(op: ArithOp, l: Expr, r: Expr) -> Expr {
        Expr::Arith(op, Box::new(l), Box::new(r))
    }

    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Expr {
        Expr::Cmp(op, Box::new(l), Box::new(r))
    }

    pub fn logic(op: BoolOp, l: Expr, r: Expr) -> Expr {
        Expr::Logic(op, Box::new(l), Box::new(r))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn lh(l: Expr) -> Expr {
        Expr::Lh(Box::new(l))
    }

    pub fn el(i: Expr, l: Expr) -> Expr {
        Expr::El(Box::new(i), Box::new(l))
    }

    /// Sort of a well-sorted expression.
    pub fn sort(&self) -> Sort {
        match self {
            Expr::Int(_) | Expr::Arith(..) | Expr::Lh(_) | Expr::El(..) => Sort::Int,
            Expr::Bool(_) | Expr::Cmp(..) | Expr::Logic(..) | Expr::Not(_) => Sort::Bool,
            Expr::Var(v) => v.sort,
        }
    }

    /// Whether the variable `name` occurs in the expression.
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Int(_) | Expr::Bool(_) => false,
            Expr::Var(v) => v.name == name,
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) | Expr::Logic(_, l, r) | Expr::El(l, r) => {
                l.mentions(name) || r.mentions(name)
            }
            Expr::Not(e) | Expr::Lh(e) => e.mentions(name),
        }
    }

    /// Replaces every occurrence of the variable `name` by `by`.
    pub fn replace(&self, name: &str, by: &Expr) -> Expr {
        match self {
            Expr::Int(_) | Expr::Bool(_) => self.clone(),
            Expr::Var(v) if v.name == name => by.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Arith(op, l, r) => Expr::arith(*op, l.replace(name, by), r.replace(name, by)),
            Expr::Cmp(op, l, r) => Expr::cmp(*op, l.replace(name, by), r.replace(name, by)),
            Expr::Logic(op, l, r) => Expr::logic(*op, l.replace(name, by), r.replace(name, by)),
            Expr::Not(e) => Expr::not(e.replace(name, by)),
            Expr::Lh(e) => Expr::lh(e.replace(name, by)),
            Expr::El(i, l) => Expr::el(i.replace(name, by), l.replace(name, by)),
        }
    }

    pub(crate) fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => out.push(&v.name),
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) | Expr::Logic(_, l, r) | Expr::El(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::Not(e) | Expr::Lh(e) => e.collect_vars(out),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        }
    }
}

/// First-order assertions with quantifiers bounded to `1..=bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Assertion {
    True,
    False,
    /// A bool-sorted expression. Never holds a top-level connective or
    /// boolean literal; see [`Assertion::atom`].
    Atom(Expr),
    And(Box<Assertion>, Box<Assertion>),
    Or(Box<Assertion>, Box<Assertion>),
    Not(Box<Assertion>),
    Implies(Box<Assertion>, Box<Assertion>),
    Bounded {
        quantifier: Quantifier,
        var: String,
        bound: Expr,
        body: Box<Assertion>,
    },
}

impl Assertion {
    /// Lifts a bool-sorted expression into an assertion. Top-level `and`,
    /// `or`, `not` and boolean literals become assertion connectives so that
    /// printing and re-parsing is the identity.
    pub fn atom(e: Expr) -> Assertion {
        match e {
            Expr::Bool(true) => Assertion::True,
            Expr::Bool(false) => Assertion::False,
            Expr::Logic(BoolOp::And, l, r) => Assertion::and(Assertion::atom(*l), Assertion::atom(*r)),
            Expr::Logic(BoolOp::Or, l, r) => Assertion::or(Assertion::atom(*l), Assertion::atom(*r)),
            Expr::Not(e) => Assertion::not(Assertion::atom(*e)),
            e => Assertion::Atom(e),
        }
    }

    pub fn and(l: Assertion, r: Assertion) -> Assertion {
        Assertion::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Assertion, r: Assertion) -> Assertion {
        Assertion::Or(Box::new(l), Box::new(r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Assertion) -> Assertion {
        Assertion::Not(Box::new(a))
    }

    pub fn implies(l: Assertion, r: Assertion) -> Assertion {
        Assertion::Implies(Box::new(l), Box::new(r))
    }

    pub fn exists(var: impl Into<String>, bound: Expr, body: Assertion) -> Assertion {
        Assertion::Bounded {
            quantifier: Quantifier::Exists,
            var: var.into(),
            bound,
            body: Box::new(body),
        }
    }

    pub fn forall(var: impl Into<String>, bound: Expr, body: Assertion) -> Assertion {
        Assertion::Bounded {
            quantifier: Quantifier::Forall,
            var: var.into(),
            bound,
            body: Box::new(body),
        }
    }

    /// Free variables, in first-occurrence order, without duplicates.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_expr = |e: &Expr, bound: &Vec<String>, out: &mut Vec<String>| {
            let mut names = Vec::new();
            e.collect_vars(&mut names);
            for n in names {
                if !bound.iter().any(|b| b == n) && !out.iter().any(|o| o == n) {
                    out.push(n.to_string());
                }
            }
        };
        match self {
            Assertion::True | Assertion::False => {}
            Assertion::Atom(e) => push_expr(e, bound, out),
            Assertion::And(l, r) | Assertion::Or(l, r) | Assertion::Implies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Assertion::Not(a) => a.collect_free(bound, out),
            Assertion::Bounded { var, bound: b, body, .. } => {
                push_expr(b, bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names bound by quantifiers anywhere in the assertion.
    pub fn binders(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders(&self, out: &mut Vec<String>) {
        match self {
            Assertion::True | Assertion::False | Assertion::Atom(_) => {}
            Assertion::And(l, r) | Assertion::Or(l, r) | Assertion::Implies(l, r) => {
                l.collect_binders(out);
                r.collect_binders(out);
            }
            Assertion::Not(a) => a.collect_binders(out),
            Assertion::Bounded { var, body, .. } => {
                if !out.contains(var) {
                    out.push(var.clone());
                }
                body.collect_binders(out);
            }
        }
    }
}

/// Statements of the While language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign {
        target: Var,
        value: Expr,
        at: Span,
    },
    Seq(Box<Stmt>, Box<Stmt>),
    If {
        guard: Expr,
        then_branch: Box<Stmt>,
        else_branch: Box<Stmt>,
        at: Span,
    },
    While {
        guard: Expr,
        /// Loop invariant; used by VC generation only.
        invariant: Option<Assertion>,
        body: Box<Stmt>,
        at: Span,
    },
}

impl Stmt {
    pub fn assign(target: Var, value: Expr) -> Stmt {
        Stmt::Assign {
            target,
            value,
            at: Span::default(),
        }
    }

    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        Stmt::Seq(Box::new(first), Box::new(second))
    }

    /// Right-nested sequence of the given statements; `skip` when empty.
    pub fn block(stmts: impl IntoIterator<Item = Stmt>) -> Stmt {
        let mut stmts: Vec<Stmt> = stmts.into_iter().collect();
        let Some(mut acc) = stmts.pop() else {
            return Stmt::Skip;
        };
        while let Some(s) = stmts.pop() {
            acc = Stmt::seq(s, acc);
        }
        acc
    }

    pub fn if_then_else(guard: Expr, then_branch: Stmt, else_branch: Stmt) -> Stmt {
        Stmt::If {
            guard,
            then_branch: Box::new(then_branch),
            else_branch: Box::new(else_branch),
            at: Span::default(),
        }
    }

    pub fn while_loop(guard: Expr, invariant: Option<Assertion>, body: Stmt) -> Stmt {
        Stmt::While {
            guard,
            invariant,
            body: Box::new(body),
            at: Span::default(),
        }
    }

    pub fn has_loop(&self) -> bool {
        match self {
            Stmt::Skip | Stmt::Assign { .. } => false,
            Stmt::Seq(a, b) => a.has_loop() || b.has_loop(),
            Stmt::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.has_loop() || else_branch.has_loop(),
            Stmt::While { .. } => true,
        }
    }

    /// Drops all loop invariants.
    pub fn erase_invariants(&self) -> Stmt {
        match self {
            Stmt::Skip | Stmt::Assign { .. } => self.clone(),
            Stmt::Seq(a, b) => Stmt::seq(a.erase_invariants(), b.erase_invariants()),
            Stmt::If {
                guard,
                then_branch,
                else_branch,
                at,
            } => Stmt::If {
                guard: guard.clone(),
                then_branch: Box::new(then_branch.erase_invariants()),
                else_branch: Box::new(else_branch.erase_invariants()),
                at: *at,
            },
            Stmt::While {
                guard, body, at, ..
            } => Stmt::While {
                guard: guard.clone(),
                invariant: None,
                body: Box::new(body.erase_invariants()),
                at: *at,
            },
        }
    }
}

/// Declared sorts of program variables, in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SortEnv {
    vars: IndexMap<String, Sort>,
}

impl SortEnv {
    pub fn new() -> Self {
        SortEnv::default()
    }

    /// Declares `name`; returns `false` if it was already declared.
    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) -> bool {
        let name = name.into();
        if self.vars.contains_key(&name) {
            return false;
        }
        self.vars.insert(name, sort);
        true
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.vars.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Sort)> {
        self.vars.iter().map(|(n, s)| (n.as_str(), *s))
    }

    pub fn var(&self, name: &str) -> Option<Var> {
        self.sort_of(name).map(|s| Var::new(name, s))
    }
}

impl<S: Into<String>> FromIterator<(S, Sort)> for SortEnv {
    fn from_iter<I: IntoIterator<Item = (S, Sort)>>(iter: I) -> Self {
        let mut env = SortEnv::new();
        for (n, s) in iter {
            env.declare(n, s);
        }
        env
    }
}
