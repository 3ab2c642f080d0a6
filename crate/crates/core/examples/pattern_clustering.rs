//! Group a directory of queries by logical pattern.
//!
//! cargo run --example pattern_clustering [dir] [schema.json]

use std::path::PathBuf;

use qviz::pattern::{canonicalize, cluster, CanonOptions};
use qviz::pipeline::compile;
use qviz::sql::Schema;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let here = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/corpus");
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| here.clone());
    let schema_path = args.next().map(PathBuf::from).or_else(|| {
        let p = dir.join("schema.json");
        p.exists().then_some(p)
    });
    let schema = match schema_path {
        Some(p) => Some(Schema::from_json(&std::fs::read_to_string(p)?)?),
        None => None,
    };

    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "sql"))
        .collect();
    paths.sort();

    let mut queries = Vec::new();
    for p in &paths {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        match compile(&std::fs::read_to_string(p)?, schema.as_ref()) {
            Ok(c) => queries.push((name, c.calculus)),
            Err(e) => eprintln!("skipping {name}: {e}"),
        }
    }

    let clusters = cluster(
        queries.iter().map(|(n, q)| (n.as_str(), q)),
        CanonOptions::default(),
    );
    for c in &clusters {
        println!("[{}] {} queries", c.hash.short(), c.members.len());
        for m in &c.members {
            println!("    {m}");
        }
        let (_, q) = queries.iter().find(|(n, _)| n == &c.members[0]).unwrap();
        for line in canonicalize(q).as_str().lines() {
            println!("  | {line}");
        }
    }
    Ok(())
}
