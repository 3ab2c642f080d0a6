mod common;

use common::*;
use proptest::prelude::*;
use qviz::calculus::{check_equivalent, Equivalence};
use qviz::pattern::{
    canonical_labeling, canonicalize, cluster, pattern_hash, pattern_hash_with, query_graph,
    CanonOptions,
};

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 96,
        ..ProptestConfig::default()
    }
}

#[test]
fn generated_queries_compile() {
    for seed in 0..300 {
        let q = gen_query(seed, &GenConfig::default());
        for r in [Rendering::plain(&q), Rendering::random(&q, seed)] {
            let sql = to_sql(&q, &r);
            qviz::pipeline::compile(&sql, None).unwrap_or_else(|e| panic!("{sql}: {e}"));
        }
    }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn surface_variants_share_a_form(seed in any::<u64>(), variant in any::<u64>()) {
        let q = gen_query(seed, &GenConfig::default());
        let a = calc(&to_sql(&q, &Rendering::plain(&q)));
        let b = calc(&to_sql(&q, &Rendering::random(&q, variant)));
        prop_assert_eq!(canonicalize(&a), canonicalize(&b));
        prop_assert_eq!(pattern_hash(&a), pattern_hash(&b));
    }

    #[test]
    fn surface_variants_are_equivalent(seed in 0u64..10_000, variant in any::<u64>()) {
        let q = gen_query(seed, &GenConfig { max_vars: 4, ..GenConfig::default() });
        let a = calc(&to_sql(&q, &Rendering::plain(&q)));
        let b = calc(&to_sql(&q, &Rendering::random(&q, variant)));
        let eq = check_equivalent(&a, &b, 20, 3, 3, seed).unwrap();
        let ok = matches!(eq, Equivalence::Equivalent { .. });
        prop_assert!(ok, "{:?}", eq);
    }

    #[test]
    fn equal_forms_iff_isomorphic_graphs(s1 in 0u64..400, s2 in 0u64..400) {
        let cfg = GenConfig { max_vars: 4, max_depth: 2, constants: true };
        let a = calc(&to_sql(&gen_query(s1, &cfg), &Rendering::plain(&gen_query(s1, &cfg))));
        let b = calc(&to_sql(&gen_query(s2, &cfg), &Rendering::plain(&gen_query(s2, &cfg))));
        let ga = query_graph(&a, CanonOptions::default());
        let gb = query_graph(&b, CanonOptions::default());
        prop_assert_eq!(canonicalize(&a) == canonicalize(&b), isomorphic(&ga, &gb));
    }

    #[test]
    fn canonical_labeling_ignores_node_numbering(seed in any::<u64>(), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let q = gen_query(seed, &GenConfig::default());
        let g = query_graph(&calc(&to_sql(&q, &Rendering::plain(&q))), CanonOptions::default());
        let mut perm: Vec<usize> = (0..g.len()).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let h = g.permuted(&perm);
        prop_assert!(isomorphic(&g, &h));
        let relabel = |x: &qviz::pattern::LabeledGraph| {
            let lab = canonical_labeling(x);
            x.permuted(&lab)
        };
        let (cg, ch) = (relabel(&g), relabel(&h));
        prop_assert_eq!(cg.labels, ch.labels);
        let mut e1 = cg.edges;
        let mut e2 = ch.edges;
        e1.sort();
        e2.sort();
        prop_assert_eq!(e1, e2);
    }
}

#[test]
fn constants_distinguish_unless_abstracted() {
    let a = calc("select r.a from r where r.b = 1");
    let b = calc("select r.a from r where r.b = 2");
    assert_ne!(pattern_hash(&a), pattern_hash(&b));
    let abs = CanonOptions {
        abstract_constants: true,
    };
    assert_eq!(pattern_hash_with(&a, abs), pattern_hash_with(&b, abs));
}

#[test]
fn different_relations_differ() {
    let a = calc("select r.a from r, s where r.b = s.b");
    let b = calc("select r.a from r, t where r.b = t.b");
    assert_ne!(pattern_hash(&a), pattern_hash(&b));
}

#[test]
fn negation_scope_matters() {
    let a =
        calc("select r.a from r where not exists (select * from s where s.a = r.a and s.b = 1)");
    let b = calc(
        "select r.a from r where not exists (select * from s where s.a = r.a and \
         not exists (select * from t where t.b = 1 and t.a = s.a))",
    );
    assert_ne!(pattern_hash(&a), pattern_hash(&b));
}

#[test]
fn corpus_clusters_by_pattern() {
    let schema = qviz::sql::Schema::from_json(&read_example("corpus/schema.json")).unwrap();
    let dir = example_path("corpus");
    let mut named = Vec::new();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "sql") {
            let sql = std::fs::read_to_string(&p).unwrap();
            let c = qviz::pipeline::compile(&sql, Some(&schema)).unwrap();
            named.push((
                p.file_name().unwrap().to_string_lossy().into_owned(),
                c.calculus,
            ));
        }
    }
    let clusters = cluster(
        named.iter().map(|(n, q)| (n.as_str(), q)),
        CanonOptions::default(),
    );
    let sizes: Vec<usize> = clusters.iter().map(|c| c.members.len()).collect();
    assert_eq!(sizes, vec![4, 2]);
    assert!(clusters[0].members.iter().all(|m| m.starts_with("some_")));
    assert!(clusters[1].members.iter().all(|m| m.starts_with("anti_")));
}

#[test]
fn equal_forms_iff_isomorphic_on_a_dense_space() {
    let cfg = GenConfig {
        max_vars: 3,
        max_depth: 1,
        constants: false,
    };
    let items: Vec<_> = (0..160)
        .map(|s| {
            let q = gen_query(s, &cfg);
            let c = calc(&to_sql(&q, &Rendering::random(&q, s ^ 0x5eed)));
            (canonicalize(&c), query_graph(&c, CanonOptions::default()))
        })
        .collect();
    let (mut same, mut checked) = (0, 0);
    for i in 0..items.len() {
        for j in 0..i {
            let (fa, ga) = &items[i];
            let (fb, gb) = &items[j];
            if ga.len() != gb.len() {
                continue;
            }
            checked += 1;
            let iso = isomorphic(ga, gb);
            assert_eq!(fa == fb, iso, "pair {i} {j}");
            same += iso as usize;
        }
    }
    assert!(same > 20, "only {same} isomorphic pairs of {checked}");
}
