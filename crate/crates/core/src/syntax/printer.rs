//! Concrete-syntax printing. Output re-parses to a structurally equal AST.
//!
//! `Display` gives single-line text (used in reports and derivation JSON);
//! [`pretty_stmt`] and [`pretty_program`] give indented multi-line text.

use std::fmt::{self, Write};

use super::ast::*;
use super::parser::Program;
use crate::assertions::DEFAULT_STATE_CAP;

const PREC_QUANT: u8 = 0;
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_CMP: u8 = 5;
const PREC_ADD: u8 = 6;
const PREC_MUL: u8 = 7;
const PREC_ATOM: u8 = 9;

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Logic(BoolOp::Or, ..) => PREC_OR,
        Expr::Logic(BoolOp::And, ..) => PREC_AND,
        Expr::Not(_) => PREC_NOT,
        Expr::Cmp(..) => PREC_CMP,
        Expr::Arith(ArithOp::Mul, ..) => PREC_MUL,
        Expr::Arith(..) => PREC_ADD,
        _ => PREC_ATOM,
    }
}

fn write_expr(out: &mut impl Write, e: &Expr, min: u8) -> fmt::Result {
    let prec = expr_prec(e);
    if prec < min {
        out.write_char('(')?;
    }
    match e {
        Expr::Int(n) => write!(out, "{n}")?,
        Expr::Bool(b) => write!(out, "{b}")?,
        Expr::Var(v) => out.write_str(&v.name)?,
        Expr::Arith(op, l, r) => {
            write_expr(out, l, prec)?;
            write!(out, " {} ", op.symbol())?;
            write_expr(out, r, prec + 1)?;
        }
        Expr::Cmp(op, l, r) => {
            write_expr(out, l, PREC_ADD)?;
            write!(out, " {} ", op.symbol())?;
            write_expr(out, r, PREC_ADD)?;
        }
        Expr::Logic(op, l, r) => {
            write_expr(out, l, prec)?;
            out.write_str(if *op == BoolOp::And { " and " } else { " or " })?;
            write_expr(out, r, prec + 1)?;
        }
        Expr::Not(a) => {
            out.write_str("not ")?;
            let min = if matches!(**a, Expr::Not(_)) { PREC_NOT } else { PREC_CMP + 1 };
            write_expr(out, a, min)?;
        }
        Expr::Lh(l) => {
            out.write_str("lh(")?;
            write_expr(out, l, 0)?;
            out.write_char(')')?;
        }
        Expr::El(i, l) => {
            out.write_str("el(")?;
            write_expr(out, i, 0)?;
            out.write_str(", ")?;
            write_expr(out, l, 0)?;
            out.write_char(')')?;
        }
    }
    if prec < min {
        out.write_char(')')?;
    }
    Ok(())
}

fn assertion_prec(a: &Assertion) -> u8 {
    match a {
        Assertion::True | Assertion::False => PREC_ATOM,
        Assertion::Atom(e) => expr_prec(e),
        Assertion::And(..) => PREC_AND,
        Assertion::Or(..) => PREC_OR,
        Assertion::Not(_) => PREC_NOT,
        Assertion::Implies(..) => PREC_IMPLIES,
        Assertion::Bounded { .. } => PREC_QUANT,
    }
}

fn write_assertion(out: &mut impl Write, a: &Assertion, min: u8) -> fmt::Result {
    if let Assertion::Atom(e) = a {
        return write_expr(out, e, min);
    }
    let prec = assertion_prec(a);
    if prec < min {
        out.write_char('(')?;
    }
    match a {
        Assertion::True => out.write_str("true")?,
        Assertion::False => out.write_str("false")?,
        Assertion::Atom(_) => unreachable!(),
        Assertion::And(l, r) => {
            write_assertion(out, l, PREC_AND)?;
            out.write_str(" && ")?;
            write_assertion(out, r, PREC_AND + 1)?;
        }
        Assertion::Or(l, r) => {
            write_assertion(out, l, PREC_OR)?;
            out.write_str(" || ")?;
            write_assertion(out, r, PREC_OR + 1)?;
        }
        Assertion::Not(x) => {
            out.write_char('!')?;
            let min = if matches!(**x, Assertion::Not(_)) { PREC_NOT } else { PREC_CMP + 1 };
            write_assertion(out, x, min)?;
        }
        Assertion::Implies(l, r) => {
            write_assertion(out, l, PREC_IMPLIES + 1)?;
            out.write_str(" ==> ")?;
            write_assertion(out, r, PREC_IMPLIES)?;
        }
        Assertion::Bounded {
            quantifier,
            var,
            bound,
            body,
        } => {
            write!(out, "{} {var} <= ", quantifier.keyword())?;
            write_expr(out, bound, PREC_ADD)?;
            out.write_str(" . ")?;
            write_assertion(out, body, PREC_IMPLIES)?;
        }
    }
    if prec < min {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_assertion(f, self, 0)
    }
}

fn write_stmt_inline(out: &mut impl Write, s: &Stmt) -> fmt::Result {
    match s {
        Stmt::Skip => out.write_str("skip"),
        Stmt::Assign { target, value, .. } => write!(out, "{} := {value}", target.name),
        Stmt::Seq(a, b) => {
            if matches!(**a, Stmt::Seq(..)) {
                out.write_str("{ ")?;
                write_stmt_inline(out, a)?;
                out.write_str(" }")?;
            } else {
                write_stmt_inline(out, a)?;
            }
            out.write_str("; ")?;
            write_stmt_inline(out, b)
        }
        Stmt::If {
            guard,
            then_branch,
            else_branch,
            ..
        } => {
            write!(out, "if {guard} then {{ ")?;
            write_stmt_inline(out, then_branch)?;
            out.write_str(" } else { ")?;
            write_stmt_inline(out, else_branch)?;
            out.write_str(" }")
        }
        Stmt::While {
            guard,
            invariant,
            body,
            ..
        } => {
            if let Some(inv) = invariant {
                write!(out, "invariant: {inv} ")?;
            }
            write!(out, "while {guard} do {{ ")?;
            write_stmt_inline(out, body)?;
            out.write_str(" }")
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stmt_inline(f, self)
    }
}

fn write_stmt_pretty(out: &mut String, s: &Stmt, indent: usize) {
    let pad = "  ".repeat(indent);
    match s {
        Stmt::Seq(a, b) => {
            if matches!(**a, Stmt::Seq(..)) {
                out.push_str(&pad);
                out.push_str("{\n");
                write_stmt_pretty(out, a, indent + 1);
                out.push('\n');
                out.push_str(&pad);
                out.push('}');
            } else {
                write_stmt_pretty(out, a, indent);
            }
            out.push_str(";\n");
            write_stmt_pretty(out, b, indent);
        }
        Stmt::If {
            guard,
            then_branch,
            else_branch,
            ..
        } => {
            let _ = writeln!(out, "{pad}if {guard} then {{");
            write_stmt_pretty(out, then_branch, indent + 1);
            let _ = writeln!(out, "\n{pad}}} else {{");
            write_stmt_pretty(out, else_branch, indent + 1);
            let _ = write!(out, "\n{pad}}}");
        }
        Stmt::While {
            guard,
            invariant,
            body,
            ..
        } => {
            if let Some(inv) = invariant {
                let _ = writeln!(out, "{pad}invariant: {inv}");
            }
            let _ = writeln!(out, "{pad}while {guard} do {{");
            write_stmt_pretty(out, body, indent + 1);
            let _ = write!(out, "\n{pad}}}");
        }
        Stmt::Skip | Stmt::Assign { .. } => {
            out.push_str(&pad);
            let _ = write_stmt_inline(out, s);
        }
    }
}

/// Indented multi-line rendering of a statement.
pub fn pretty_stmt(s: &Stmt) -> String {
    let mut out = String::new();
    write_stmt_pretty(&mut out, s, 0);
    out
}

/// Renders a whole `.ahl` file.
pub fn pretty_program(p: &Program) -> String {
    let mut out = String::from("domains:\n");
    for (name, dom) in p.domain.iter() {
        let _ = writeln!(out, "  {name} in {dom}");
    }
    if p.domain.state_cap != DEFAULT_STATE_CAP {
        let _ = writeln!(out, "  statecap = {}", p.domain.state_cap);
    }
    if let Some(pre) = &p.pre {
        let _ = writeln!(out, "pre: {pre}");
    }
    if let Some(post) = &p.post {
        let _ = writeln!(out, "post: {post}");
    }
    out.push_str("program:\n");
    write_stmt_pretty(&mut out, &p.body, 1);
    out.push('\n');
    out
}
