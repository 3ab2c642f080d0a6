//! The `qviz` command line: `visualize`, `check`, `cluster` and `serve`.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 parse or name-resolution
//! error, 3 unsupported SQL feature.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::diagram::Dialect;
use crate::pattern::{cluster, CanonOptions};
use crate::pipeline::{self, compile, Diagnostic, Format, Options, PipelineError};
use crate::render::StyleConfig;
use crate::sql::Schema;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qviz",
    version,
    about = "Turn SQL queries into QueryVis and Relational Diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a query as a diagram.
    Visualize {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "queryvis")]
        dialect: DialectArg,
        /// Apply the ∀-rewrite (default).
        #[arg(long, overrides_with = "no_forall")]
        forall: bool,
        /// Keep ¬∃¬∃ nesting as written.
        #[arg(long = "no-forall")]
        no_forall: bool,
        /// JSON file mapping each relation to its attribute list.
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "svg")]
        format: FormatArg,
    },
    /// Parse and resolve a query; print the inferred schema when none is given.
    Check {
        file: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Group the .sql files of a directory by query pattern.
    Cluster {
        dir: PathBuf,
        /// Treat all constants as equal.
        #[arg(long)]
        abstract_constants: bool,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DialectArg {
    Queryvis,
    #[value(alias = "relational-diagrams")]
    Rd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Svg,
    Dot,
    Json,
}

/// Runs the CLI with explicit arguments and output streams; returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match cli.command {
        Command::Visualize {
            file,
            dialect,
            forall: _,
            no_forall,
            schema,
            out: out_file,
            format,
        } => {
            let opts = Options {
                dialect: match dialect {
                    DialectArg::Queryvis => Dialect::QueryVis,
                    DialectArg::Rd => Dialect::RelationalDiagrams,
                },
                forall: !no_forall,
                fallback: true,
            };
            let format = match format {
                FormatArg::Svg => Format::Svg,
                FormatArg::Dot => Format::Dot,
                FormatArg::Json => Format::Json,
            };
            visualize(
                &file,
                schema.as_deref(),
                opts,
                format,
                out_file.as_deref(),
                out,
                err,
            )
        }
        Command::Check { file, schema } => check(&file, schema.as_deref(), out, err),
        Command::Cluster {
            dir,
            abstract_constants,
            schema,
        } => cluster_dir(&dir, abstract_constants, schema.as_deref(), out, err),
        Command::Serve { port, host } => serve(&host, port, err),
    }
}

fn read(path: &Path, err: &mut dyn Write) -> Result<String, i32> {
    std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_schema(path: Option<&Path>, err: &mut dyn Write) -> Result<Option<Schema>, i32> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = read(path, err)?;
    Schema::from_json(&text).map(Some).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn fail(e: &PipelineError, source: &str, file: &Path, err: &mut dyn Write) -> i32 {
    let d = Diagnostic::from_error(e, source);
    let _ = err.write_all(d.render(source, &file.display().to_string()).as_bytes());
    if e.is_unsupported() {
        EXIT_UNSUPPORTED
    } else {
        EXIT_INVALID
    }
}

fn report_warnings(c: &pipeline::Compiled, source: &str, file: &Path, err: &mut dyn Write) {
    for w in Diagnostic::warnings(&c.resolved, source) {
        let _ = err.write_all(w.render(source, &file.display().to_string()).as_bytes());
    }
}

fn visualize(
    file: &Path,
    schema: Option<&Path>,
    opts: Options,
    format: Format,
    out_file: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let source = match read(file, err) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let schema = match load_schema(schema, err) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let style = match StyleConfig::from_env() {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let v = match pipeline::visualize(&source, schema.as_ref(), opts) {
        Ok(v) => v,
        Err(e) => return fail(&e, &source, file, err),
    };
    report_warnings(&v.compiled, &source, file, err);
    if let Some(reason) = &v.fallback {
        let _ = writeln!(
            err,
            "note: {reason}; rendering as relational-diagrams instead"
        );
    }
    let text = pipeline::render(&v.positioned, format, &style);
    match out_file {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    EXIT_OK
}

fn check(file: &Path, schema: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let source = match read(file, err) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let schema = match load_schema(schema, err) {
        Ok(s) => s,
        Err(c) => return c,
    };
    match compile(&source, schema.as_ref()) {
        Ok(c) => {
            report_warnings(&c, &source, file, err);
            if c.resolved.schema_inferred {
                let _ = out.write_all(c.resolved.schema.to_json().as_bytes());
                let _ = writeln!(out);
            } else {
                let _ = writeln!(out, "ok");
            }
            EXIT_OK
        }
        Err(e) => fail(&e, &source, file, err),
    }
}

fn cluster_dir(
    dir: &Path,
    abstract_constants: bool,
    schema: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let schema = match load_schema(schema, err) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read directory {}: {e}", dir.display());
            return EXIT_USAGE;
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "sql"))
        .collect();
    files.sort();

    let mut queries = Vec::new();
    let mut skipped = Vec::new();
    for path in &files {
        let name = path
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        let source = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                skipped.push((name, e.to_string()));
                continue;
            }
        };
        match compile(&source, schema.as_ref()) {
            Ok(c) => queries.push((name, c.calculus)),
            Err(e) => {
                let d = Diagnostic::from_error(&e, &source);
                let at = match (d.line, d.column) {
                    (Some(l), Some(c)) => format!("{l}:{c}: "),
                    _ => String::new(),
                };
                skipped.push((name, format!("{at}{}", d.message)));
            }
        }
    }
    let clusters = cluster(
        queries.iter().map(|(n, q)| (n.as_str(), q)),
        CanonOptions { abstract_constants },
    );
    let _ = writeln!(
        out,
        "{} cluster{} from {} file{}",
        clusters.len(),
        if clusters.len() == 1 { "" } else { "s" },
        queries.len(),
        if queries.len() == 1 { "" } else { "s" }
    );
    for (i, c) in clusters.iter().enumerate() {
        let _ = writeln!(
            out,
            "cluster {} [{}] size {}",
            i + 1,
            c.hash.short(),
            c.members.len()
        );
        for m in &c.members {
            let _ = writeln!(out, "  {m}");
        }
    }
    if !skipped.is_empty() {
        let _ = writeln!(out, "skipped:");
        for (name, why) in &skipped {
            let _ = writeln!(out, "  {name}: {why}");
        }
    }
    if queries.is_empty() && !skipped.is_empty() {
        EXIT_INVALID
    } else {
        EXIT_OK
    }
}

fn serve(host: &str, port: u16, err: &mut dyn Write) -> i32 {
    let style = match StyleConfig::from_env() {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let listener = match std::net::TcpListener::bind((host, port)) {
        Ok(l) => l,
        Err(e) => {
            let _ = writeln!(err, "error: cannot listen on {host}:{port}: {e}");
            return EXIT_USAGE;
        }
    };
    let addr = listener
        .local_addr()
        .map(|a| a.to_string())
        .unwrap_or_default();
    let _ = writeln!(err, "listening on http://{addr}");
    let _ = err.flush();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start runtime: {e}");
            return EXIT_USAGE;
        }
    };
    match runtime.block_on(crate::serve::serve_std(listener, style)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    code
}
