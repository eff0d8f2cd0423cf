//! Abstract syntax, parser and printer for the While language and its
//! assertion language.

mod ast;
mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use lexer::is_keyword;
pub use parser::{parse_assertion, parse_expr, parse_program, parse_stmt, Program};
pub use printer::{pretty_program, pretty_stmt};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Span, message: String },
    #[error("sort error at {at}: {message}")]
    Sort { at: Span, message: String },
    #[error("undeclared identifier `{name}` at {at}")]
    Undeclared { at: Span, name: String },
    #[error("duplicate declaration of `{name}` at {at}")]
    Duplicate { at: Span, name: String },
    #[error("invalid domain at {at}: {message}")]
    Domain { at: Span, message: String },
}
