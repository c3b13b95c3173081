use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use quasicut_cli::format::{
    emit_decomposition, emit_graph, emit_pairs, parse_decomposition_file, parse_graph_file, parse_pairs_file,
};
use quasicut_cli::{determinism_check, execute, Command as Cmd, Inputs, RunConfig};
use quasicut_core::gen::random_treewidth2;
use quasicut_core::{Edge, TerminalPair, WeightedDigraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).to_str().unwrap().to_owned()
}

fn quasicut(args: &[&str], max_n: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_quasicut"));
    cmd.args(args).env_remove("QUASICUT_MAX_N");
    if let Some(n) = max_n {
        cmd.env("QUASICUT_MAX_N", n);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn weight() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (0u32..100).prop_map(|k| f64::from(k) / 8.0), 1e-300f64..1e300]
}

fn graph() -> impl Strategy<Value = WeightedDigraph> {
    (1usize..8).prop_flat_map(|n| {
        proptest::collection::btree_map((0..n, 0..n), weight(), 0..=n * n).prop_map(move |m| {
            let edges = m.into_iter().filter(|((u, v), _)| u != v).map(|((u, v), w)| Edge::new(u, v, w)).collect();
            WeightedDigraph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn graph_round_trip(g in graph()) {
        prop_assert_eq!(parse_graph_file(&emit_graph(&g)).unwrap(), g);
    }

    #[test]
    fn pairs_round_trip(raw in proptest::collection::vec((0usize..20, 1usize..20, weight()), 0..12)) {
        let pairs: Vec<TerminalPair> = raw.into_iter().map(|(s, k, d)| TerminalPair::new(s, s + k, d)).collect();
        prop_assert_eq!(parse_pairs_file(&emit_pairs(&pairs)).unwrap(), pairs);
    }

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), n in 1usize..10) {
        let (_, td) = random_treewidth2(&mut ChaCha8Rng::seed_from_u64(seed), n, 0.5);
        prop_assert_eq!(parse_decomposition_file(&emit_decomposition(&td)).unwrap(), td);
    }
}

#[test]
fn two_node_tree_partition_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("pair.txt");
    std::fs::write(&path, "n 2\ne 0 1 1.0\ne 1 0 1.0\n").unwrap();
    let p = path.to_str().unwrap();
    let a = quasicut(&["partition", p, "--r", "1", "--seed", "7"], None);
    let b = quasicut(&["partition", p, "--r", "1", "--seed", "7"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["sampler"], "tree");
}

#[test]
fn single_edge_sparsity_is_one() {
    let out = quasicut(&["sparsest-cut", &data("single_edge.txt"), "--pairs", &data("single_edge.pairs")], None);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["cut"]["sparsity"].as_f64(), Some(1.0));
    assert_eq!(v["cut"]["edges"], serde_json::json!([0]));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"sparsity\": 1.0000000000000000"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("loop.txt");
    std::fs::write(&bad, "n 2\ne 0 0 1.0\n").unwrap();
    let out = quasicut(&["partition", bad.to_str().unwrap(), "--r", "1"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(quasicut(&["partition", &data("tree.txt")], None).status.code(), Some(1));
    assert_eq!(quasicut(&["sparsest-cut", &data("tree.txt")], None).status.code(), Some(1));
    assert_eq!(quasicut(&["bogus"], None).status.code(), Some(1));
    assert_eq!(quasicut(&["partition", "/nonexistent/graph.txt", "--r", "1"], None).status.code(), Some(1));
}

#[test]
fn size_cap_comes_from_the_environment() {
    let g = data("treewidth2.txt");
    let pairs = data("treewidth2.pairs");
    assert_eq!(quasicut(&["sparsest-cut", &g, "--pairs", &pairs], Some("5")).status.code(), Some(1));
    assert_eq!(quasicut(&["partition", &g, "--r", "2"], Some("5")).status.code(), Some(1));
    assert!(quasicut(&["sparsest-cut", &g, "--pairs", &pairs], Some("6")).status.success());
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = quasicut(&["embed", &data("tree.txt"), "--seed", "3", "--out", out_path.to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let direct = quasicut(&["embed", &data("tree.txt"), "--seed", "3"], None);
    assert_eq!(std::fs::read(&out_path).unwrap(), direct.stdout);
}

#[test]
fn embedding_never_contracts() {
    let out = quasicut(&["embed", &data("treewidth2.txt"), "--decomposition", &data("treewidth2.td")], None);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["distortion"]["contraction"].as_f64().unwrap() <= 1.0);
    assert_eq!(v["sampler"], "treewidth");
}

#[test]
fn seeds_change_partitions_but_not_their_validity() {
    let tree = std::fs::read_to_string(data("tree.txt")).unwrap();
    let inputs = Inputs { graph: tree, ..Inputs::default() };
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..20 {
        let mut cfg = RunConfig::new(Cmd::Partition);
        cfg.seed = seed;
        cfg.r = Some(4.0);
        let (v, _) = execute(&cfg, &inputs).unwrap();
        assert_eq!(v["certificate"]["r_bounded"], true);
        seen.insert(v["pairs"].to_string());
    }
    assert!(seen.len() > 1);
}

#[test]
fn bundled_samples_are_deterministic() {
    let (cases, failures) = determinism_check(11);
    assert!(cases >= 6);
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn multicut_separates_every_bundled_pair() {
    let out = quasicut(&["multicut", &data("treewidth2.txt"), "--pairs", &data("treewidth2.pairs")], None);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["cut"]["separated"], serde_json::json!([0, 1, 2]));
}
