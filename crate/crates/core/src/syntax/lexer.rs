use num_bigint::BigInt;

use super::ast::Span;
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    Kw(Kw),
    Sym(Sym),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kw {
    Skip,
    If,
    Then,
    Else,
    While,
    Do,
    True,
    False,
    Not,
    And,
    Or,
    Exists,
    Forall,
    Lh,
    El,
    In,
    Bool,
    List,
    Maxlen,
    Statecap,
    Domains,
    Pre,
    Post,
    Program,
    Invariant,
}

const KEYWORDS: &[(&str, Kw)] = &[
    ("skip", Kw::Skip),
    ("if", Kw::If),
    ("then", Kw::Then),
    ("else", Kw::Else),
    ("while", Kw::While),
    ("do", Kw::Do),
    ("true", Kw::True),
    ("false", Kw::False),
    ("not", Kw::Not),
    ("and", Kw::And),
    ("or", Kw::Or),
    ("exists", Kw::Exists),
    ("forall", Kw::Forall),
    ("lh", Kw::Lh),
    ("el", Kw::El),
    ("in", Kw::In),
    ("bool", Kw::Bool),
    ("list", Kw::List),
    ("maxlen", Kw::Maxlen),
    ("statecap", Kw::Statecap),
    ("domains", Kw::Domains),
    ("pre", Kw::Pre),
    ("post", Kw::Post),
    ("program", Kw::Program),
    ("invariant", Kw::Invariant),
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.iter().any(|(k, _)| *k == s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sym {
    Assign,
    Colon,
    Semi,
    Comma,
    Dot,
    DotDot,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Plus,
    Minus,
    Star,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Implies,
    Eq,
}

impl Sym {
    pub fn text(self) -> &'static str {
        match self {
            Sym::Assign => ":=",
            Sym::Colon => ":",
            Sym::Semi => ";",
            Sym::Comma => ",",
            Sym::Dot => ".",
            Sym::DotDot => "..",
            Sym::LParen => "(",
            Sym::RParen => ")",
            Sym::LBrace => "{",
            Sym::RBrace => "}",
            Sym::Plus => "+",
            Sym::Minus => "-",
            Sym::Star => "*",
            Sym::EqEq => "==",
            Sym::NotEq => "!=",
            Sym::Lt => "<",
            Sym::Le => "<=",
            Sym::Gt => ">",
            Sym::Ge => ">=",
            Sym::AndAnd => "&&",
            Sym::OrOr => "||",
            Sym::Bang => "!",
            Sym::Implies => "==>",
            Sym::Eq => "=",
        }
    }
}

// Longest match first.
const SYMBOLS: &[(&str, Sym)] = &[
    ("==>", Sym::Implies),
    (":=", Sym::Assign),
    ("..", Sym::DotDot),
    ("==", Sym::EqEq),
    ("!=", Sym::NotEq),
    ("<=", Sym::Le),
    (">=", Sym::Ge),
    ("&&", Sym::AndAnd),
    ("||", Sym::OrOr),
    (":", Sym::Colon),
    (";", Sym::Semi),
    (",", Sym::Comma),
    (".", Sym::Dot),
    ("(", Sym::LParen),
    (")", Sym::RParen),
    ("{", Sym::LBrace),
    ("}", Sym::RBrace),
    ("+", Sym::Plus),
    ("-", Sym::Minus),
    ("*", Sym::Star),
    ("<", Sym::Lt),
    (">", Sym::Gt),
    ("!", Sym::Bang),
    ("=", Sym::Eq),
];

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut rest = src;

    while let Some(c) = rest.chars().next() {
        let span = Span::new(line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            rest = &rest[1..];
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '#' {
            let end = rest.find('\n').unwrap_or(rest.len());
            col += rest[..end].chars().count() as u32;
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_digit() {
            let end = rest
                .find(|ch: char| !ch.is_ascii_digit())
                .unwrap_or(rest.len());
            let value: BigInt = rest[..end].parse().expect("ascii digits");
            out.push(Token {
                tok: Tok::Int(value),
                span,
            });
            col += end as u32;
            rest = &rest[end..];
            continue;
        }
        if c.is_ascii_alphabetic() {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            let word = &rest[..end];
            let tok = match KEYWORDS.iter().find(|(k, _)| *k == word) {
                Some((_, kw)) => Tok::Kw(*kw),
                None => Tok::Ident(word.to_string()),
            };
            out.push(Token { tok, span });
            col += end as u32;
            rest = &rest[end..];
            continue;
        }
        match SYMBOLS.iter().find(|(s, _)| rest.starts_with(s)) {
            Some((text, sym)) => {
                out.push(Token {
                    tok: Tok::Sym(*sym),
                    span,
                });
                col += text.len() as u32;
                rest = &rest[text.len()..];
            }
            None => {
                return Err(ParseError::Syntax {
                    at: span,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ranges_and_implication() {
        assert_eq!(
            toks("0..12 ==> x"),
            vec![
                Tok::Int(0.into()),
                Tok::Sym(Sym::DotDot),
                Tok::Int(12.into()),
                Tok::Sym(Sym::Implies),
                Tok::Ident("x".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("# header\n  acc := true # trailing\n").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("acc".into()));
        assert_eq!((t[0].span.line, t[0].span.col), (2, 3));
        assert_eq!(t[1].tok, Tok::Sym(Sym::Assign));
        assert_eq!(t[2].tok, Tok::Kw(Kw::True));
        assert_eq!(t[3].tok, Tok::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("x := 1 $").unwrap_err();
        assert!(err.to_string().contains("1:8"), "{err}");
    }
}
