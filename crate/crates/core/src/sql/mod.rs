//! SQL front end: tokenizer, parser and name resolution.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod resolve;

pub use ast::*;
pub use lexer::{tokenize, Keyword, LexError, Token, TokenKind};
pub use parser::{parse, ParseError};
pub use resolve::{
    resolve, OutputColumn, ResolveError, ResolvedQuery, Schema, SchemaError, Warning,
};
