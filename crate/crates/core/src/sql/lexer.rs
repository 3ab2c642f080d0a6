//! Tokenizer for the supported SQL subset.

use std::fmt;

use thiserror::Error;

use crate::span::SourceSpan;

use super::ast::CompOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keyword {
    Select,
    Distinct,
    All,
    From,
    Where,
    And,
    Or,
    Not,
    Exists,
    In,
    As,
    // Reserved so that queries outside the subset get a precise diagnostic.
    Group,
    By,
    Having,
    Order,
    Limit,
    Union,
    Intersect,
    Except,
    Join,
    Inner,
    Left,
    Right,
    Full,
    Outer,
    Cross,
    On,
    Null,
    Is,
    Like,
    Between,
}

impl Keyword {
    pub fn from_word(lower: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match lower {
            "select" => Select,
            "distinct" => Distinct,
            "all" => All,
            "from" => From,
            "where" => Where,
            "and" => And,
            "or" => Or,
            "not" => Not,
            "exists" => Exists,
            "in" => In,
            "as" => As,
            "group" => Group,
            "by" => By,
            "having" => Having,
            "order" => Order,
            "limit" => Limit,
            "union" => Union,
            "intersect" => Intersect,
            "except" => Except,
            "join" => Join,
            "inner" => Inner,
            "left" => Left,
            "right" => Right,
            "full" => Full,
            "outer" => Outer,
            "cross" => Cross,
            "on" => On,
            "null" => Null,
            "is" => Is,
            "like" => Like,
            "between" => Between,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Select => "select",
            Distinct => "distinct",
            All => "all",
            From => "from",
            Where => "where",
            And => "and",
            Or => "or",
            Not => "not",
            Exists => "exists",
            In => "in",
            As => "as",
            Group => "group",
            By => "by",
            Having => "having",
            Order => "order",
            Limit => "limit",
            Union => "union",
            Intersect => "intersect",
            Except => "except",
            Join => "join",
            Inner => "inner",
            Left => "left",
            Right => "right",
            Full => "full",
            Outer => "outer",
            Cross => "cross",
            On => "on",
            Null => "null",
            Is => "is",
            Like => "like",
            Between => "between",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident,
    Integer,
    String,
    Dot,
    Comma,
    LParen,
    RParen,
    Star,
    Semicolon,
    Op(CompOp),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "{}", k.as_str().to_uppercase()),
            TokenKind::Ident => f.write_str("identifier"),
            TokenKind::Integer => f.write_str("integer"),
            TokenKind::String => f.write_str("string"),
            TokenKind::Dot => f.write_str("`.`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Star => f.write_str("`*`"),
            TokenKind::Semicolon => f.write_str("`;`"),
            TokenKind::Op(op) => write!(f, "`{op}`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The exact source text, original casing included.
    pub lexeme: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unexpected character `{ch}`")]
    UnexpectedChar { ch: char, span: SourceSpan },
    #[error("unterminated string literal")]
    UnterminatedString { span: SourceSpan },
    #[error("integer literal out of range")]
    IntegerOverflow { span: SourceSpan },
}

impl LexError {
    pub fn span(&self) -> SourceSpan {
        match self {
            LexError::UnexpectedChar { span, .. }
            | LexError::UnterminatedString { span }
            | LexError::IntegerOverflow { span } => *span,
        }
    }
}

/// Splits `source` into tokens. Whitespace and `--` line comments are skipped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = match c {
            b'.' => {
                i += 1;
                TokenKind::Dot
            }
            b',' => {
                i += 1;
                TokenKind::Comma
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            b'*' => {
                i += 1;
                TokenKind::Star
            }
            b';' => {
                i += 1;
                TokenKind::Semicolon
            }
            b'=' => {
                i += 1;
                TokenKind::Op(CompOp::Eq)
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                TokenKind::Op(CompOp::Ne)
            }
            b'<' => match bytes.get(i + 1) {
                Some(b'>') => {
                    i += 2;
                    TokenKind::Op(CompOp::Ne)
                }
                Some(b'=') => {
                    i += 2;
                    TokenKind::Op(CompOp::Le)
                }
                _ => {
                    i += 1;
                    TokenKind::Op(CompOp::Lt)
                }
            },
            b'>' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    TokenKind::Op(CompOp::Ge)
                } else {
                    i += 1;
                    TokenKind::Op(CompOp::Gt)
                }
            }
            b'\'' => {
                i += 1;
                loop {
                    match bytes.get(i) {
                        None => {
                            return Err(LexError::UnterminatedString {
                                span: SourceSpan::new(start, source.len()),
                            })
                        }
                        Some(b'\'') if bytes.get(i + 1) == Some(&b'\'') => i += 2,
                        Some(b'\'') => {
                            i += 1;
                            break;
                        }
                        Some(_) => i += 1,
                    }
                }
                TokenKind::String
            }
            b'0'..=b'9' => {
                i = scan_digits(bytes, i);
                check_integer(source, start, i)?;
                TokenKind::Integer
            }
            b'-' if bytes.get(i + 1).is_some_and(u8::is_ascii_digit) => {
                i = scan_digits(bytes, i + 1);
                check_integer(source, start, i)?;
                TokenKind::Integer
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = source[start..i].to_ascii_lowercase();
                match Keyword::from_word(&word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident,
                }
            }
            _ => {
                let ch = source[start..].chars().next().expect("non-empty remainder");
                return Err(LexError::UnexpectedChar {
                    ch,
                    span: SourceSpan::new(start, start + ch.len_utf8()),
                });
            }
        };
        tokens.push(Token {
            kind,
            lexeme: source[start..i].to_string(),
            span: SourceSpan::new(start, i),
        });
    }
    Ok(tokens)
}

fn scan_digits(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn check_integer(source: &str, start: usize, end: usize) -> Result<(), LexError> {
    source[start..end]
        .parse::<i64>()
        .map(|_| ())
        .map_err(|_| LexError::IntegerOverflow {
            span: SourceSpan::new(start, end),
        })
}
