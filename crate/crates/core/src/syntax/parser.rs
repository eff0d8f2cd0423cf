//! Recursive-descent parser for `.ahl` files.
//!
//! Parsing happens in two phases. The first builds an untyped surface tree in
//! which program expressions and assertions share one grammar; the second
//! elaborates it against a [`SortEnv`], checking sorts and quantifier scope.
//! Sections of a file may appear in any order because elaboration only starts
//! once the `domains:` block is known.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::ast::*;
use super::lexer::{tokenize, Kw, Sym, Tok, Token};
use super::ParseError;
use crate::assertions::{FiniteDomain, VarDomain};

/// A parsed `.ahl` file.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub env: SortEnv,
    pub domain: FiniteDomain,
    pub pre: Option<Assertion>,
    pub post: Option<Assertion>,
    pub body: Stmt,
}

/// Parses a complete `.ahl` source. A source without section headers is read
/// as a bare program over an empty environment.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let file = p.file()?;
    let env = file.domain.sort_env();
    let pre = file.pre.map(|r| Elab::new(&env).assertion(&r)).transpose()?;
    let post = file.post.map(|r| Elab::new(&env).assertion(&r)).transpose()?;
    let body = match file.program {
        Some(s) => Elab::new(&env).stmt(&s)?,
        None => {
            return Err(ParseError::Syntax {
                at: p.peek().span,
                message: "missing `program:` section".into(),
            })
        }
    };
    Ok(Program {
        env,
        domain: file.domain,
        pre,
        post,
        body,
    })
}

/// Parses a statement (sequence) over the given environment.
pub fn parse_stmt(src: &str, env: &SortEnv) -> Result<Stmt, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.seq()?;
    p.expect_eof()?;
    Elab::new(env).stmt(&raw)
}

/// Parses an assertion over the given environment.
pub fn parse_assertion(src: &str, env: &SortEnv) -> Result<Assertion, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.term()?;
    p.expect_eof()?;
    Elab::new(env).assertion(&raw)
}

/// Parses a program expression over the given environment.
pub fn parse_expr(src: &str, env: &SortEnv) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.term()?;
    p.expect_eof()?;
    Elab::new(env).expr(&raw)
}

// ---------------------------------------------------------------------------
// Surface syntax

#[derive(Debug, Clone)]
struct Raw {
    kind: RawKind,
    span: Span,
}

#[derive(Debug, Clone)]
enum RawKind {
    Int(BigInt),
    Bool(bool),
    Ident(String),
    Neg(Box<Raw>),
    Arith(ArithOp, Box<Raw>, Box<Raw>),
    Cmp(CmpOp, Box<Raw>, Box<Raw>),
    Logic(BoolOp, Box<Raw>, Box<Raw>),
    Not(Box<Raw>),
    Implies(Box<Raw>, Box<Raw>),
    Lh(Box<Raw>),
    El(Box<Raw>, Box<Raw>),
    Quant(Quantifier, String, Box<Raw>, Box<Raw>),
}

#[derive(Debug, Clone)]
enum RawStmt {
    Skip,
    Assign(String, Raw, Span),
    Seq(Box<RawStmt>, Box<RawStmt>),
    If(Raw, Box<RawStmt>, Box<RawStmt>, Span),
    While(Raw, Option<Raw>, Box<RawStmt>, Span),
}

struct RawFile {
    domain: FiniteDomain,
    pre: Option<Raw>,
    post: Option<Raw>,
    program: Option<RawStmt>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: Sym) -> bool {
        self.peek().tok == Tok::Sym(s)
    }

    fn is_kw(&self, k: Kw) -> bool {
        self.peek().tok == Tok::Kw(k)
    }

    fn eat_sym(&mut self, s: Sym) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError::Syntax {
            at: t.span,
            message: format!("expected {expected}, found {}", describe(&t.tok)),
        })
    }

    fn expect_sym(&mut self, s: Sym) -> Result<Span, ParseError> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{}`", s.text()))
        }
    }

    fn expect_kw(&mut self, k: Kw, text: &str) -> Result<Span, ParseError> {
        if self.is_kw(k) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{text}`"))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Span), ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => self.error("identifier"),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    /// A section header is a section keyword directly followed by `:`.
    fn at_section(&self) -> bool {
        matches!(
            self.peek().tok,
            Tok::Kw(Kw::Domains | Kw::Pre | Kw::Post | Kw::Program)
        ) && *self.peek_at(1) == Tok::Sym(Sym::Colon)
    }

    // -- files --------------------------------------------------------------

    fn file(&mut self) -> Result<RawFile, ParseError> {
        let mut file = RawFile {
            domain: FiniteDomain::new(),
            pre: None,
            post: None,
            program: None,
        };
        if !self.at_section() {
            file.program = Some(self.seq()?);
            self.expect_eof()?;
            return Ok(file);
        }
        let mut seen_domains = false;
        while self.peek().tok != Tok::Eof {
            if !self.at_section() {
                return self.error("section header (`domains:`, `pre:`, `post:` or `program:`)");
            }
            let head = self.bump();
            self.bump();
            let Tok::Kw(kw) = head.tok else { unreachable!() };
            let dup = |name: &str| ParseError::Syntax {
                at: head.span,
                message: format!("duplicate `{name}:` section"),
            };
            match kw {
                Kw::Domains => {
                    if seen_domains {
                        return Err(dup("domains"));
                    }
                    seen_domains = true;
                    self.domains(&mut file.domain)?;
                }
                Kw::Pre => {
                    if file.pre.is_some() {
                        return Err(dup("pre"));
                    }
                    file.pre = Some(self.term()?);
                }
                Kw::Post => {
                    if file.post.is_some() {
                        return Err(dup("post"));
                    }
                    file.post = Some(self.term()?);
                }
                Kw::Program => {
                    if file.program.is_some() {
                        return Err(dup("program"));
                    }
                    file.program = Some(self.seq()?);
                }
                _ => unreachable!(),
            }
        }
        Ok(file)
    }

    fn domains(&mut self, dom: &mut FiniteDomain) -> Result<(), ParseError> {
        while !self.at_section() && self.peek().tok != Tok::Eof {
            if self.eat_kw(Kw::Statecap) {
                self.expect_sym(Sym::Eq)?;
                let at = self.peek().span;
                let n = self.int_literal()?;
                match n.to_u64() {
                    Some(cap) if cap > 0 => dom.state_cap = cap,
                    _ => {
                        return Err(ParseError::Domain {
                            at,
                            message: "statecap must be a positive integer".into(),
                        })
                    }
                }
            } else {
                let mut names = vec![self.expect_ident()?];
                while self.eat_sym(Sym::Comma) {
                    names.push(self.expect_ident()?);
                }
                self.expect_kw(Kw::In, "in")?;
                let vd = self.var_domain()?;
                for (name, at) in names {
                    if !dom.insert(name.clone(), vd.clone()) {
                        return Err(ParseError::Duplicate { at, name });
                    }
                }
            }
            if !self.eat_sym(Sym::Comma) {
                self.eat_sym(Sym::Semi);
            }
        }
        Ok(())
    }

    fn var_domain(&mut self) -> Result<VarDomain, ParseError> {
        if self.eat_kw(Kw::Bool) {
            return Ok(VarDomain::Bool);
        }
        if self.eat_kw(Kw::List) {
            self.expect_sym(Sym::LParen)?;
            self.expect_kw(Kw::Maxlen, "maxlen")?;
            self.expect_sym(Sym::Eq)?;
            let at = self.peek().span;
            let max_len = self
                .int_literal()?
                .to_usize()
                .ok_or_else(|| ParseError::Domain {
                    at,
                    message: "maxlen must be a small non-negative integer".into(),
                })?;
            self.expect_sym(Sym::Comma)?;
            let (lo, hi) = self.range()?;
            self.expect_sym(Sym::RParen)?;
            return Ok(VarDomain::List { max_len, lo, hi });
        }
        let (lo, hi) = self.range()?;
        Ok(VarDomain::Int { lo, hi })
    }

    fn range(&mut self) -> Result<(i64, i64), ParseError> {
        let at = self.peek().span;
        let lo = self.int_literal()?;
        self.expect_sym(Sym::DotDot)?;
        let hi = self.int_literal()?;
        let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
            return Err(ParseError::Domain {
                at,
                message: "range bounds must fit in 64 bits".into(),
            });
        };
        if lo > hi {
            return Err(ParseError::Domain {
                at,
                message: format!("empty range {lo}..{hi}"),
            });
        }
        Ok((lo, hi))
    }

    fn int_literal(&mut self) -> Result<BigInt, ParseError> {
        let neg = self.eat_sym(Sym::Minus);
        match &self.peek().tok {
            Tok::Int(n) => {
                let n = n.clone();
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => self.error("integer literal"),
        }
    }

    // -- statements ---------------------------------------------------------

    fn at_seq_end(&self) -> bool {
        self.is_sym(Sym::RBrace) || self.peek().tok == Tok::Eof || self.at_section()
    }

    fn seq(&mut self) -> Result<RawStmt, ParseError> {
        let mut items = vec![self.stmt()?];
        while self.eat_sym(Sym::Semi) {
            if self.at_seq_end() {
                break;
            }
            items.push(self.stmt()?);
        }
        let mut acc = items.pop().expect("non-empty");
        while let Some(s) = items.pop() {
            acc = RawStmt::Seq(Box::new(s), Box::new(acc));
        }
        Ok(acc)
    }

    fn block(&mut self) -> Result<RawStmt, ParseError> {
        self.expect_sym(Sym::LBrace)?;
        if self.eat_sym(Sym::RBrace) {
            return Ok(RawStmt::Skip);
        }
        let s = self.seq()?;
        self.expect_sym(Sym::RBrace)?;
        Ok(s)
    }

    fn stmt(&mut self) -> Result<RawStmt, ParseError> {
        let span = self.peek().span;
        match self.peek().tok.clone() {
            Tok::Kw(Kw::Skip) => {
                self.bump();
                Ok(RawStmt::Skip)
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect_sym(Sym::Assign)?;
                let value = self.term()?;
                Ok(RawStmt::Assign(name, value, span))
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let guard = self.term()?;
                self.expect_kw(Kw::Then, "then")?;
                let then_branch = self.block()?;
                let else_branch = if self.eat_kw(Kw::Else) {
                    self.block()?
                } else {
                    RawStmt::Skip
                };
                Ok(RawStmt::If(
                    guard,
                    Box::new(then_branch),
                    Box::new(else_branch),
                    span,
                ))
            }
            Tok::Kw(Kw::Invariant) => {
                self.bump();
                self.expect_sym(Sym::Colon)?;
                let inv = self.term()?;
                if !self.is_kw(Kw::While) {
                    return self.error("`while` after `invariant:` clause");
                }
                self.while_loop(Some(inv))
            }
            Tok::Kw(Kw::While) => self.while_loop(None),
            Tok::Sym(Sym::LBrace) => self.block(),
            _ => self.error("statement"),
        }
    }

    fn while_loop(&mut self, inv: Option<Raw>) -> Result<RawStmt, ParseError> {
        let span = self.expect_kw(Kw::While, "while")?;
        let guard = self.term()?;
        self.expect_kw(Kw::Do, "do")?;
        let body = self.block()?;
        Ok(RawStmt::While(guard, inv, Box::new(body), span))
    }

    // -- terms --------------------------------------------------------------

    fn term(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.or()?;
        if self.is_sym(Sym::Implies) {
            let span = self.bump().span;
            let rhs = self.term()?;
            return Ok(Raw {
                kind: RawKind::Implies(Box::new(lhs), Box::new(rhs)),
                span,
            });
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.and()?;
        while self.is_sym(Sym::OrOr) || self.is_kw(Kw::Or) {
            let span = self.bump().span;
            let rhs = self.and()?;
            lhs = Raw {
                kind: RawKind::Logic(BoolOp::Or, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.not()?;
        while self.is_sym(Sym::AndAnd) || self.is_kw(Kw::And) {
            let span = self.bump().span;
            let rhs = self.not()?;
            lhs = Raw {
                kind: RawKind::Logic(BoolOp::And, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Raw, ParseError> {
        if self.is_sym(Sym::Bang) || self.is_kw(Kw::Not) {
            let span = self.bump().span;
            let arg = self.not()?;
            return Ok(Raw {
                kind: RawKind::Not(Box::new(arg)),
                span,
            });
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Raw, ParseError> {
        let lhs = self.add()?;
        let op = match self.peek().tok {
            Tok::Sym(Sym::EqEq) => CmpOp::Eq,
            Tok::Sym(Sym::NotEq) => CmpOp::Ne,
            Tok::Sym(Sym::Lt) => CmpOp::Lt,
            Tok::Sym(Sym::Le) => CmpOp::Le,
            Tok::Sym(Sym::Gt) => CmpOp::Gt,
            Tok::Sym(Sym::Ge) => CmpOp::Ge,
            _ => return Ok(lhs),
        };
        let span = self.bump().span;
        let rhs = self.add()?;
        if matches!(
            self.peek().tok,
            Tok::Sym(Sym::EqEq | Sym::NotEq | Sym::Lt | Sym::Le | Sym::Gt | Sym::Ge)
        ) {
            return self.error("parentheses around chained comparison");
        }
        Ok(Raw {
            kind: RawKind::Cmp(op, Box::new(lhs), Box::new(rhs)),
            span,
        })
    }

    fn add(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.mul()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym(Sym::Plus) => ArithOp::Add,
                Tok::Sym(Sym::Minus) => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().span;
            let rhs = self.mul()?;
            lhs = Raw {
                kind: RawKind::Arith(op, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn mul(&mut self) -> Result<Raw, ParseError> {
        let mut lhs = self.unary()?;
        while self.is_sym(Sym::Star) {
            let span = self.bump().span;
            let rhs = self.unary()?;
            lhs = Raw {
                kind: RawKind::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Raw, ParseError> {
        if self.is_sym(Sym::Minus) {
            let span = self.bump().span;
            if let Tok::Int(n) = &self.peek().tok {
                let n = -n.clone();
                self.bump();
                return Ok(Raw {
                    kind: RawKind::Int(n),
                    span,
                });
            }
            let arg = self.unary()?;
            return Ok(Raw {
                kind: RawKind::Neg(Box::new(arg)),
                span,
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Raw, ParseError> {
        let span = self.peek().span;
        let kind = match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.bump();
                RawKind::Int(n)
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                RawKind::Bool(true)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                RawKind::Bool(false)
            }
            Tok::Ident(name) => {
                self.bump();
                RawKind::Ident(name)
            }
            Tok::Kw(Kw::Lh) => {
                self.bump();
                self.expect_sym(Sym::LParen)?;
                let l = self.term()?;
                self.expect_sym(Sym::RParen)?;
                RawKind::Lh(Box::new(l))
            }
            Tok::Kw(Kw::El) => {
                self.bump();
                self.expect_sym(Sym::LParen)?;
                let i = self.term()?;
                self.expect_sym(Sym::Comma)?;
                let l = self.term()?;
                self.expect_sym(Sym::RParen)?;
                RawKind::El(Box::new(i), Box::new(l))
            }
            Tok::Sym(Sym::LParen) => {
                self.bump();
                let inner = self.term()?;
                self.expect_sym(Sym::RParen)?;
                return Ok(inner);
            }
            Tok::Kw(q @ (Kw::Exists | Kw::Forall)) => {
                self.bump();
                let quantifier = if q == Kw::Exists {
                    Quantifier::Exists
                } else {
                    Quantifier::Forall
                };
                let (var, _) = self.expect_ident()?;
                self.expect_sym(Sym::Le)?;
                let bound = self.add()?;
                self.expect_sym(Sym::Dot)?;
                let body = self.term()?;
                RawKind::Quant(quantifier, var, Box::new(bound), Box::new(body))
            }
            _ => return self.error("expression"),
        };
        Ok(Raw { kind, span })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(n) => format!("identifier `{n}`"),
        Tok::Int(n) => format!("integer `{n}`"),
        Tok::Kw(k) => format!("keyword `{}`", format!("{k:?}").to_lowercase()),
        Tok::Sym(s) => format!("`{}`", s.text()),
        Tok::Eof => "end of input".into(),
    }
}

// ---------------------------------------------------------------------------
// Elaboration

struct Elab<'a> {
    env: &'a SortEnv,
    logical: Vec<String>,
}

impl<'a> Elab<'a> {
    fn new(env: &'a SortEnv) -> Self {
        Elab {
            env,
            logical: Vec::new(),
        }
    }

    fn stmt(&mut self, raw: &RawStmt) -> Result<Stmt, ParseError> {
        Ok(match raw {
            RawStmt::Skip => Stmt::Skip,
            RawStmt::Assign(name, value, at) => {
                let Some(target) = self.env.var(name) else {
                    return Err(ParseError::Undeclared {
                        at: *at,
                        name: name.clone(),
                    });
                };
                let value = self.expr(value)?;
                if value.sort() != target.sort {
                    return Err(ParseError::Sort {
                        at: *at,
                        message: format!(
                            "cannot assign a {} value to `{}` of sort {}",
                            value.sort(),
                            name,
                            target.sort
                        ),
                    });
                }
                Stmt::Assign {
                    target,
                    value,
                    at: *at,
                }
            }
            RawStmt::Seq(a, b) => Stmt::seq(self.stmt(a)?, self.stmt(b)?),
            RawStmt::If(guard, t, e, at) => Stmt::If {
                guard: self.guard(guard)?,
                then_branch: Box::new(self.stmt(t)?),
                else_branch: Box::new(self.stmt(e)?),
                at: *at,
            },
            RawStmt::While(guard, inv, body, at) => Stmt::While {
                guard: self.guard(guard)?,
                invariant: inv.as_ref().map(|i| self.assertion(i)).transpose()?,
                body: Box::new(self.stmt(body)?),
                at: *at,
            },
        })
    }

    fn guard(&mut self, raw: &Raw) -> Result<Expr, ParseError> {
        let e = self.expr(raw)?;
        if e.sort() != Sort::Bool {
            return Err(ParseError::Sort {
                at: raw.span,
                message: format!("guard `{e}` has sort {}, expected bool", e.sort()),
            });
        }
        Ok(e)
    }

    fn assertion(&mut self, raw: &Raw) -> Result<Assertion, ParseError> {
        Ok(match &raw.kind {
            RawKind::Bool(true) => Assertion::True,
            RawKind::Bool(false) => Assertion::False,
            RawKind::Logic(BoolOp::And, l, r) => {
                Assertion::and(self.assertion(l)?, self.assertion(r)?)
            }
            RawKind::Logic(BoolOp::Or, l, r) => {
                Assertion::or(self.assertion(l)?, self.assertion(r)?)
            }
            RawKind::Not(a) => Assertion::not(self.assertion(a)?),
            RawKind::Implies(l, r) => Assertion::implies(self.assertion(l)?, self.assertion(r)?),
            RawKind::Quant(q, var, bound, body) => {
                if self.env.contains(var) {
                    return Err(ParseError::Sort {
                        at: raw.span,
                        message: format!(
                            "quantified variable `{var}` clashes with a program variable"
                        ),
                    });
                }
                let bound = self.int_operand(bound, q.keyword())?;
                self.logical.push(var.clone());
                let body = self.assertion(body);
                self.logical.pop();
                Assertion::Bounded {
                    quantifier: *q,
                    var: var.clone(),
                    bound,
                    body: Box::new(body?),
                }
            }
            _ => {
                let e = self.expr(raw)?;
                if e.sort() != Sort::Bool {
                    return Err(ParseError::Sort {
                        at: raw.span,
                        message: format!("assertion `{e}` has sort {}, expected bool", e.sort()),
                    });
                }
                Assertion::atom(e)
            }
        })
    }

    fn expr(&mut self, raw: &Raw) -> Result<Expr, ParseError> {
        Ok(match &raw.kind {
            RawKind::Int(n) => Expr::Int(n.clone()),
            RawKind::Bool(b) => Expr::Bool(*b),
            RawKind::Ident(name) => {
                if self.logical.iter().any(|l| l == name) {
                    Expr::var(name.clone(), Sort::Int)
                } else if let Some(v) = self.env.var(name) {
                    Expr::Var(v)
                } else {
                    return Err(ParseError::Undeclared {
                        at: raw.span,
                        name: name.clone(),
                    });
                }
            }
            RawKind::Neg(a) => {
                Expr::arith(ArithOp::Sub, Expr::int(0), self.int_operand(a, "-")?)
            }
            RawKind::Arith(op, l, r) => Expr::arith(
                *op,
                self.int_operand(l, op.symbol())?,
                self.int_operand(r, op.symbol())?,
            ),
            RawKind::Cmp(op, l, r) => {
                if op.is_equality() {
                    let le = self.expr(l)?;
                    let re = self.expr(r)?;
                    if le.sort() != re.sort() {
                        return Err(ParseError::Sort {
                            at: raw.span,
                            message: format!(
                                "`{}` compares `{le}` of sort {} with `{re}` of sort {}",
                                op.symbol(),
                                le.sort(),
                                re.sort()
                            ),
                        });
                    }
                    Expr::cmp(*op, le, re)
                } else {
                    Expr::cmp(
                        *op,
                        self.int_operand(l, op.symbol())?,
                        self.int_operand(r, op.symbol())?,
                    )
                }
            }
            RawKind::Logic(op, l, r) => {
                let sym = if *op == BoolOp::And { "and" } else { "or" };
                Expr::logic(*op, self.bool_operand(l, sym)?, self.bool_operand(r, sym)?)
            }
            RawKind::Not(a) => Expr::not(self.bool_operand(a, "not")?),
            RawKind::Lh(l) => Expr::lh(self.operand(l, Sort::List, "lh")?),
            RawKind::El(i, l) => Expr::el(
                self.int_operand(i, "el")?,
                self.operand(l, Sort::List, "el")?,
            ),
            RawKind::Implies(..) => {
                return Err(ParseError::Syntax {
                    at: raw.span,
                    message: "`==>` is only allowed in assertions".into(),
                })
            }
            RawKind::Quant(..) => {
                return Err(ParseError::Syntax {
                    at: raw.span,
                    message: "quantifiers are only allowed in assertions".into(),
                })
            }
        })
    }

    fn int_operand(&mut self, raw: &Raw, op: &str) -> Result<Expr, ParseError> {
        self.operand(raw, Sort::Int, op)
    }

    fn bool_operand(&mut self, raw: &Raw, op: &str) -> Result<Expr, ParseError> {
        self.operand(raw, Sort::Bool, op)
    }

    fn operand(&mut self, raw: &Raw, want: Sort, op: &str) -> Result<Expr, ParseError> {
        let e = self.expr(raw)?;
        if e.sort() != want {
            return Err(ParseError::Sort {
                at: raw.span,
                message: format!(
                    "operand `{e}` of `{op}` has sort {}, expected {want}",
                    e.sort()
                ),
            });
        }
        Ok(e)
    }
}
