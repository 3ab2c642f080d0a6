//! End-to-end entry points: SQL text to calculus, diagrams and rendered
//! output, with source-annotated diagnostics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{to_calculus, CalculusQuery};
use crate::diagram::{build_queryvis, build_relational_diagram, BuildError, Dialect};
use crate::layout::{layout, LayoutError, PositionedDiagram};
use crate::render::{to_dot, to_interchange, to_svg, StyleConfig};
use crate::span::{line_col, SourceSpan};
use crate::sql::{parse, resolve, ParseError, ResolveError, ResolvedQuery, Schema};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

impl PipelineError {
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            PipelineError::Parse(e) => Some(e.span()),
            PipelineError::Resolve(e) => Some(e.span()),
            PipelineError::Build(_) | PipelineError::Layout(_) => None,
        }
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self, PipelineError::Parse(ParseError::Unsupported { .. }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub resolved: ResolvedQuery,
    pub calculus: CalculusQuery,
}

pub fn compile(sql: &str, schema: Option<&Schema>) -> Result<Compiled, PipelineError> {
    let resolved = resolve(parse(sql)?, schema)?;
    let calculus = to_calculus(&resolved);
    Ok(Compiled { resolved, calculus })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub dialect: Dialect,
    /// Apply the ∀-rewrite before building a QueryVis diagram.
    pub forall: bool,
    /// Switch to Relational Diagrams when QueryVis cannot show the query.
    pub fallback: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            dialect: Dialect::QueryVis,
            forall: true,
            fallback: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Visualization {
    pub compiled: Compiled,
    pub positioned: PositionedDiagram,
    /// Why QueryVis was abandoned, when the fallback was taken.
    pub fallback: Option<BuildError>,
}

pub fn visualize(
    sql: &str,
    schema: Option<&Schema>,
    opts: Options,
) -> Result<Visualization, PipelineError> {
    let compiled = compile(sql, schema)?;
    let (diagram, fallback) = match opts.dialect {
        Dialect::RelationalDiagrams => (build_relational_diagram(&compiled.calculus), None),
        Dialect::QueryVis => match build_queryvis(&compiled.calculus, opts.forall) {
            Ok(d) => (d, None),
            Err(e) if opts.fallback => (build_relational_diagram(&compiled.calculus), Some(e)),
            Err(e) => return Err(e.into()),
        },
    };
    let positioned = layout(&diagram)?;
    Ok(Visualization {
        compiled,
        positioned,
        fallback,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Dot,
    Json,
}

pub fn render(pd: &PositionedDiagram, format: Format, style: &StyleConfig) -> String {
    match format {
        Format::Svg => to_svg(pd, style),
        Format::Dot => to_dot(&pd.diagram, style),
        Format::Json => to_interchange(pd),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

/// A message about the query text, positioned for editors (byte span) and
/// humans (1-based line and column).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Option<SourceSpan>,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl Diagnostic {
    pub fn new(
        severity: Severity,
        message: String,
        span: Option<SourceSpan>,
        source: &str,
    ) -> Self {
        let (line, column) = match span {
            Some(s) => {
                let (l, c) = line_col(source, s.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        Diagnostic {
            severity,
            message,
            span,
            line,
            column,
        }
    }

    pub fn from_error(e: &PipelineError, source: &str) -> Self {
        Diagnostic::new(Severity::Error, e.to_string(), e.span(), source)
    }

    pub fn warnings(resolved: &ResolvedQuery, source: &str) -> Vec<Diagnostic> {
        resolved
            .warnings
            .iter()
            .map(|w| Diagnostic::new(Severity::Warning, w.message.clone(), Some(w.span), source))
            .collect()
    }

    /// Compiler-style text: message, location, the source line and a caret
    /// underline of the span.
    pub fn render(&self, source: &str, file: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "note",
        };
        let mut out = format!("{sev}: {}\n", self.message);
        if let (Some(span), Some(line), Some(col)) = (self.span, self.line, self.column) {
            out.push_str(&format!("  --> {file}:{line}:{col}\n"));
            let text = source.lines().nth(line - 1).unwrap_or("");
            let line_start = source
                .char_indices()
                .filter(|&(_, c)| c == '\n')
                .map(|(i, _)| i + 1)
                .take(line - 1)
                .last()
                .unwrap_or(0);
            let line_end = line_start + text.len();
            let width = source
                .get(span.start.min(line_end)..span.end.min(line_end))
                .map_or(0, |s| s.chars().count())
                .max(1);
            out.push_str(&format!("   | {text}\n"));
            out.push_str(&format!(
                "   | {}{}\n",
                " ".repeat(col - 1),
                "^".repeat(width)
            ));
        }
        out
    }
}
