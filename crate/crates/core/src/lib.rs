//! SQL to visual query diagrams.
//!
//! A query in the supported SQL subset (conjunctive `SELECT`/`FROM`/`WHERE`
//! with nested `[NOT] EXISTS`, `[NOT] IN` and comparison predicates) goes
//! through these stages:
//!
//! 1. [`sql`]: tokenize, parse, bind names ([`sql::resolve`]).
//! 2. [`calculus`]: lower to tuple relational calculus, optionally apply the
//!    ∀-rewrite, evaluate on small databases.
//! 3. [`diagram`]: build a QueryVis or Relational Diagrams model.
//! 4. [`layout`]: layers, crossing reduction, rectangles.
//! 5. [`render`]: SVG, Graphviz DOT, interchange JSON.
//!
//! [`pattern`] canonicalizes queries so that surface variants share a hash,
//! and [`pipeline`] chains the stages. [`cli`] and [`serve`] expose them as a
//! command line tool and an HTTP API.
//!
//! ```
//! use qviz::pipeline::{render, visualize, Format, Options};
//! use qviz::render::StyleConfig;
//!
//! let sql = "select distinct r.a from r where not exists \
//!            (select * from s where s.b = r.b)";
//! let v = visualize(sql, None, Options::default()).unwrap();
//! assert_eq!(v.positioned.diagram.groups.len(), 1);
//! let svg = render(&v.positioned, Format::Svg, &StyleConfig::default());
//! assert!(svg.contains("not-exists-dashed"));
//! ```

pub mod calculus;
pub mod cli;
pub mod diagram;
pub mod layout;
pub mod pattern;
pub mod pipeline;
pub mod render;
pub mod serve;
pub mod span;
pub mod sql;
pub mod value;
