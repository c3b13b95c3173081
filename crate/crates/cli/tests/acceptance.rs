//! Runs every acceptance criterion and prints one line per criterion.
//! Criteria 1 to 9 run in process on the default seeded corpus; criterion 10
//! runs each CLI command twice and compares the bytes.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use quasicut_core::verify::{run_all, VerifyConfig};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn quasicut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasicut")).args(args).env_remove("QUASICUT_MAX_N").output().expect("binary runs")
}

fn determinism() -> (bool, String) {
    let start = Instant::now();
    let tree = data("tree.txt");
    let graph = data("treewidth2.txt");
    let td = data("treewidth2.td");
    let pairs = data("treewidth2.pairs");
    let (tree, graph, td, pairs) =
        (tree.to_str().unwrap(), graph.to_str().unwrap(), td.to_str().unwrap(), pairs.to_str().unwrap());
    let runs: Vec<Vec<&str>> = vec![
        vec!["partition", tree, "--r", "2", "--seed", "7"],
        vec!["partition", graph, "--r", "4", "--seed", "7", "--decomposition", td],
        vec!["partition", graph, "--r", "4", "--seed", "7", "--treewidth", "2"],
        vec!["embed", tree, "--seed", "7"],
        vec!["embed", graph, "--seed", "7", "--decomposition", td],
        vec!["sparsest-cut", graph, "--pairs", pairs, "--seed", "7"],
        vec!["sparsest-cut", graph, "--pairs", pairs, "--decomposition", td],
        vec!["multicut", graph, "--pairs", pairs, "--seed", "7"],
        vec!["verify", "--seed", "7"],
    ];
    let mut failures = Vec::new();
    for args in &runs {
        let (a, b) = (quasicut(args), quasicut(args));
        let label = args[0];
        if !a.status.success() {
            failures.push(format!("{label}: exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)));
        } else if a.stdout != b.stdout || a.status.code() != b.status.code() {
            failures.push(format!("{label}: two runs differ"));
        } else if a.stdout.is_empty() {
            failures.push(format!("{label}: empty output"));
        }
    }
    let passed = failures.is_empty();
    let mut line = format!(
        "criterion 10 {} determinism: {} commands run twice, {} failed, {:.2}s",
        if passed { "PASS" } else { "FAIL" },
        runs.len(),
        failures.len(),
        start.elapsed().as_secs_f64()
    );
    for f in failures {
        line.push_str(&format!("\n    {f}"));
    }
    (passed, line)
}

fn main() -> ExitCode {
    let mut all = true;
    for outcome in run_all(&VerifyConfig::default()) {
        println!("{outcome}");
        all &= outcome.passed();
    }
    let (passed, line) = determinism();
    println!("{line}");
    all &= passed;
    println!("acceptance: {}", if all { "all criteria pass" } else { "FAILURES" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
