//! Recursive-descent parser for the supported SQL subset:
//!
//! ```text
//! query    := block [';'] EOF
//! block    := SELECT [DISTINCT] ('*' | attr (',' attr)*)
//!             FROM item (',' item)*
//!             [WHERE cond (AND cond)*]
//! item     := relation [[AS] alias]
//! cond     := [NOT] EXISTS '(' block ')'
//!           | attr [NOT] IN '(' block ')'
//!           | operand op operand
//! operand  := attr | integer | string
//! attr     := ident ['.' ident]
//! ```
//!
//! Constructs just outside the subset (OR, GROUP BY, aggregates, joins, ...)
//! are recognised and reported as [`ParseError::Unsupported`].

use thiserror::Error;

use crate::span::SourceSpan;
use crate::value::Value;

use super::ast::*;
use super::lexer::{tokenize, Keyword, LexError, Token, TokenKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        span: SourceSpan,
        expected: Vec<String>,
        found: String,
    },
    #[error("unsupported SQL feature: {feature}")]
    Unsupported { span: SourceSpan, feature: String },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Lex(e) => e.span(),
            ParseError::Syntax { span, .. } | ParseError::Unsupported { span, .. } => *span,
        }
    }
}

/// Parses exactly one query.
pub fn parse(source: &str) -> Result<SqlAst, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        source_len: source.len(),
        next_from: 0,
    };
    let ast = p.block()?;
    p.eat(TokenKind::Semicolon);
    if p.peek().is_some() {
        return Err(p.syntax_error(&["end of input"]));
    }
    Ok(ast)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    source_len: usize,
    next_from: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn peek_kind_at(&self, ahead: usize) -> Option<TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| t.kind)
    }

    fn at_kw(&self, kw: Keyword) -> bool {
        self.peek_kind() == Some(TokenKind::Keyword(kw))
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: TokenKind) -> Option<Token> {
        (self.peek_kind() == Some(kind)).then(|| self.bump())
    }

    fn eat_kw(&mut self, kw: Keyword) -> Option<Token> {
        self.eat(TokenKind::Keyword(kw))
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        match self.eat(kind) {
            Some(t) => Ok(t),
            None => Err(self.syntax_error(&[&kind.to_string()])),
        }
    }

    fn prev_end(&self) -> usize {
        self.pos
            .checked_sub(1)
            .map_or(0, |i| self.tokens[i].span.end)
    }

    fn here(&self) -> SourceSpan {
        match self.peek() {
            Some(t) => t.span,
            None => SourceSpan::new(self.source_len, self.source_len),
        }
    }

    fn syntax_error(&self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!("`{}`", t.lexeme),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            span: self.here(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn unsupported(&self, span: SourceSpan, feature: &str) -> ParseError {
        ParseError::Unsupported {
            span,
            feature: feature.to_string(),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Ident> {
        match self.eat(TokenKind::Ident) {
            Some(t) => Ok(Ident {
                name: t.lexeme.to_ascii_lowercase(),
                span: t.span,
            }),
            None => Err(self.syntax_error(&[what])),
        }
    }

    fn block(&mut self) -> PResult<SqlAst> {
        let select = self.expect(TokenKind::Keyword(Keyword::Select))?;
        let start = select.span.start;
        if let Some(t) = self.eat_kw(Keyword::All) {
            return Err(self.unsupported(t.span, "SELECT ALL (bag semantics)"));
        }
        let distinct = self.eat_kw(Keyword::Distinct).is_some();
        let select_list = if let Some(star) = self.eat(TokenKind::Star) {
            SelectList::Star(star.span)
        } else {
            let mut items = vec![self.select_item()?];
            while self.eat(TokenKind::Comma).is_some() {
                items.push(self.select_item()?);
            }
            SelectList::Items(items)
        };
        let select_span = SourceSpan::new(start, self.prev_end());

        if self.peek_kind() != Some(TokenKind::Keyword(Keyword::From)) {
            return Err(self.syntax_error(&["`,`", "FROM"]));
        }
        self.bump();
        let mut from = vec![self.from_item()?];
        while self.eat(TokenKind::Comma).is_some() {
            from.push(self.from_item()?);
        }

        let mut conjuncts = Vec::new();
        if self.eat_kw(Keyword::Where).is_some() {
            loop {
                conjuncts.push(self.condition()?);
                if let Some(t) = self.eat_kw(Keyword::Or) {
                    return Err(self.unsupported(t.span, "OR"));
                }
                if self.eat_kw(Keyword::And).is_none() {
                    break;
                }
            }
        }
        self.reject_trailing_clause()?;
        Ok(SqlAst {
            distinct,
            select: select_list,
            select_span,
            from,
            conjuncts,
            span: SourceSpan::new(start, self.prev_end()),
        })
    }

    fn reject_trailing_clause(&self) -> PResult<()> {
        let Some(TokenKind::Keyword(kw)) = self.peek_kind() else {
            return Ok(());
        };
        let feature = match kw {
            Keyword::Group => "GROUP BY",
            Keyword::Having => "HAVING",
            Keyword::Order => "ORDER BY",
            Keyword::Limit => "LIMIT",
            Keyword::Union => "UNION",
            Keyword::Intersect => "INTERSECT",
            Keyword::Except => "EXCEPT",
            _ => return Ok(()),
        };
        Err(self.unsupported(self.here(), feature))
    }

    fn select_item(&mut self) -> PResult<AttrRef> {
        if self.peek_kind() == Some(TokenKind::Ident)
            && self.peek_kind_at(1) == Some(TokenKind::LParen)
        {
            let span = self.here();
            return Err(self.unsupported(span, "aggregate or function call"));
        }
        if self.at_kw(Keyword::Distinct) {
            return Err(self.syntax_error(&["attribute reference"]));
        }
        self.attr_ref()
    }

    fn attr_ref(&mut self) -> PResult<AttrRef> {
        let first = self.ident("attribute reference")?;
        if self.eat(TokenKind::Dot).is_some() {
            let attr = self.ident("attribute name")?;
            Ok(AttrRef {
                span: first.span.cover(attr.span),
                qualifier: Some(first),
                attr,
                binding: None,
            })
        } else {
            Ok(AttrRef {
                span: first.span,
                qualifier: None,
                attr: first,
                binding: None,
            })
        }
    }

    fn from_item(&mut self) -> PResult<FromItem> {
        if self.peek_kind() == Some(TokenKind::LParen) {
            return Err(self.unsupported(self.here(), "derived table in FROM"));
        }
        let relation = self.ident("relation name")?;
        let (alias, explicit_alias) =
            if self.eat_kw(Keyword::As).is_some() || self.peek_kind() == Some(TokenKind::Ident) {
                (self.ident("alias")?, true)
            } else {
                (relation.clone(), false)
            };
        if let Some(TokenKind::Keyword(kw)) = self.peek_kind() {
            let feature = match kw {
                Keyword::Join | Keyword::Inner | Keyword::Cross | Keyword::On => Some("JOIN"),
                Keyword::Left | Keyword::Right | Keyword::Full | Keyword::Outer => {
                    Some("outer join")
                }
                _ => None,
            };
            if let Some(feature) = feature {
                return Err(self.unsupported(self.here(), feature));
            }
        }
        let id = FromId(self.next_from);
        self.next_from += 1;
        Ok(FromItem {
            id,
            span: relation.span.cover(alias.span),
            relation,
            alias,
            explicit_alias,
        })
    }

    fn condition(&mut self) -> PResult<Conjunct> {
        let start = self.here().start;
        if self.at_kw(Keyword::Not) {
            if self.peek_kind_at(1) == Some(TokenKind::Keyword(Keyword::Exists)) {
                self.bump();
                self.bump();
                let subquery = self.parenthesized_block()?;
                return Ok(Conjunct::Exists {
                    negated: true,
                    subquery: Box::new(subquery),
                    span: SourceSpan::new(start, self.prev_end()),
                });
            }
            self.bump();
            return Err(self.syntax_error(&["EXISTS"]));
        }
        if self.eat_kw(Keyword::Exists).is_some() {
            let subquery = self.parenthesized_block()?;
            return Ok(Conjunct::Exists {
                negated: false,
                subquery: Box::new(subquery),
                span: SourceSpan::new(start, self.prev_end()),
            });
        }

        let left = self.operand()?;
        let negated_in = if self.at_kw(Keyword::Not) {
            match self.peek_kind_at(1) {
                Some(TokenKind::Keyword(Keyword::In)) => {
                    self.bump();
                    Some(true)
                }
                Some(TokenKind::Keyword(Keyword::Like)) => {
                    return Err(self.unsupported(self.tokens[self.pos + 1].span, "LIKE"))
                }
                Some(TokenKind::Keyword(Keyword::Between)) => {
                    return Err(self.unsupported(self.tokens[self.pos + 1].span, "BETWEEN"))
                }
                _ => {
                    self.bump();
                    return Err(self.syntax_error(&["IN"]));
                }
            }
        } else if self.at_kw(Keyword::In) {
            Some(false)
        } else {
            None
        };

        if let Some(negated) = negated_in {
            self.bump(); // IN
            let test = match left {
                Operand::Attr(a) => a,
                Operand::Const { span, .. } => {
                    return Err(ParseError::Syntax {
                        span,
                        expected: vec!["attribute reference".into()],
                        found: "constant".into(),
                    })
                }
            };
            if self.peek_kind() == Some(TokenKind::LParen)
                && self.peek_kind_at(1) != Some(TokenKind::Keyword(Keyword::Select))
            {
                let span = self.tokens[self.pos + 1].span;
                return Err(self.unsupported(span, "IN with a value list"));
            }
            let subquery = self.parenthesized_block()?;
            match &subquery.select {
                SelectList::Items(items) if items.len() == 1 => {}
                _ => {
                    return Err(ParseError::Syntax {
                        span: subquery.select_span,
                        expected: vec!["exactly one column in the IN subquery".into()],
                        found: "a different select list".into(),
                    })
                }
            }
            return Ok(Conjunct::In {
                negated,
                test,
                subquery: Box::new(subquery),
                span: SourceSpan::new(start, self.prev_end()),
            });
        }

        let op = match self.peek_kind() {
            Some(TokenKind::Op(op)) => {
                self.bump();
                op
            }
            Some(TokenKind::Keyword(Keyword::Is)) => {
                return Err(self.unsupported(self.here(), "NULL test (IS [NOT] NULL)"))
            }
            Some(TokenKind::Keyword(Keyword::Like)) => {
                return Err(self.unsupported(self.here(), "LIKE"))
            }
            Some(TokenKind::Keyword(Keyword::Between)) => {
                return Err(self.unsupported(self.here(), "BETWEEN"))
            }
            _ => return Err(self.syntax_error(&["comparison operator", "IN", "NOT IN"])),
        };
        let right = self.operand()?;
        let span = SourceSpan::new(start, self.prev_end());
        match (left, right) {
            (Operand::Attr(left), right) => Ok(Conjunct::Comparison {
                left,
                op,
                right,
                span,
            }),
            (left @ Operand::Const { .. }, Operand::Attr(right)) => Ok(Conjunct::Comparison {
                left: right,
                op: op.flipped(),
                right: left,
                span,
            }),
            (Operand::Const { .. }, right @ Operand::Const { .. }) => Err(ParseError::Syntax {
                span: right.span(),
                expected: vec!["attribute reference".into()],
                found: "constant".into(),
            }),
        }
    }

    fn parenthesized_block(&mut self) -> PResult<SqlAst> {
        self.expect(TokenKind::LParen)?;
        let block = self.block()?;
        self.expect(TokenKind::RParen)?;
        Ok(block)
    }

    fn operand(&mut self) -> PResult<Operand> {
        match self.peek_kind() {
            Some(TokenKind::Ident) => {
                if self.peek_kind_at(1) == Some(TokenKind::LParen) {
                    return Err(self.unsupported(self.here(), "aggregate or function call"));
                }
                Ok(Operand::Attr(self.attr_ref()?))
            }
            Some(TokenKind::Integer) => {
                let t = self.bump();
                let value = t.lexeme.parse::<i64>().expect("lexer validated integer");
                Ok(Operand::Const {
                    value: Value::Int(value),
                    span: t.span,
                })
            }
            Some(TokenKind::String) => {
                let t = self.bump();
                let inner = &t.lexeme[1..t.lexeme.len() - 1];
                Ok(Operand::Const {
                    value: Value::Str(inner.replace("''", "'")),
                    span: t.span,
                })
            }
            Some(TokenKind::Keyword(Keyword::Null)) => Err(self.unsupported(self.here(), "NULL")),
            Some(TokenKind::LParen)
                if self.peek_kind_at(1) == Some(TokenKind::Keyword(Keyword::Select)) =>
            {
                Err(self.unsupported(self.here(), "scalar subquery"))
            }
            _ => {
                Err(self.syntax_error(&["attribute reference", "constant", "EXISTS", "NOT EXISTS"]))
            }
        }
    }
}
