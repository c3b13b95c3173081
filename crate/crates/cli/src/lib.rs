//! Command surface for `quasicut`: reads the text formats in [`format`],
//! runs one pipeline and renders a deterministic JSON report.

pub mod format;
pub mod json;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use quasicut_core::cut::{solve_multicut, solve_sparsest_cut, CutError, CutOptions, LpError, SeparatorStrategy};
use quasicut_core::embedding::{
    build_scale_family, distortion, embed_01_combination, embed_quasiultrametric, expected_ultrametric_distance,
    EmbeddingError, ScaleFamily,
};
use quasicut_core::graph::{is_bidirected_tree, shortest_path_quasimetric};
use quasicut_core::oracle::is_quasipartition;
use quasicut_core::partition::{
    draw_z, PartitionError, SeparatorProvider, SupportBuilder, TreeBuilder, TreeSampler, TreewidthBuilder,
    TreewidthSampler,
};
use quasicut_core::verify::{run_all, VerifyConfig};
use quasicut_core::{CutInstance, CutResult, Limits, TreeDecomposition, WeightedDigraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use crate::format::{parse_decomposition_file, parse_graph_file, parse_pairs_file, ParseError};
use crate::json::{num, nums, object};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Partition,
    Embed,
    SparsestCut,
    Multicut,
    Verify,
}

impl Command {
    pub const ALL: [Command; 5] =
        [Command::Partition, Command::Embed, Command::SparsestCut, Command::Multicut, Command::Verify];

    pub fn name(self) -> &'static str {
        match self {
            Command::Partition => "partition",
            Command::Embed => "embed",
            Command::SparsestCut => "sparsest-cut",
            Command::Multicut => "multicut",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Graph file; unused by `verify`.
    pub input: Option<PathBuf>,
    pub seed: u64,
    /// Radius for `partition`.
    pub r: Option<f64>,
    /// Largest separator the exhaustive search may use.
    pub treewidth: Option<usize>,
    pub decomposition: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    /// Monte Carlo trials for `verify`.
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
    pub limits: Limits,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            seed: 0,
            r: None,
            treewidth: None,
            decomposition: None,
            pairs: None,
            trials: None,
            out: None,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> Self {
        match e {
            EmbeddingError::Partition(p) => p.into(),
            EmbeddingError::DegenerateSpace => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CutError> for CliError {
    fn from(e: CutError) -> Self {
        match e {
            CutError::InvalidPair { .. } | CutError::NoDemand | CutError::TooLarge { .. } | CutError::Graph(_) => {
                CliError::Input(e.to_string())
            }
            CutError::Partition(p) => p.into(),
            CutError::Embedding(em) => em.into(),
            CutError::Lp(LpError::Invalid(_)) => CliError::Input(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Text of the files a command reads.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inputs {
    pub graph: String,
    pub pairs: Option<String>,
    pub decomposition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    /// JSON report; empty on error.
    pub stdout: String,
    /// Error message or, for `verify`, the human-readable table.
    pub stderr: String,
}

/// Runs `cfg`, writing the report to `cfg.out` when set and returning it.
pub fn run(cfg: &RunConfig) -> RunOutput {
    let result = load(cfg).and_then(|inputs| execute(cfg, &inputs));
    match result {
        Ok((report, table)) => {
            let text = json::to_string(&report);
            if let Some(path) = &cfg.out {
                if let Err(e) = fs::write(path, &text) {
                    return RunOutput {
                        code: EXIT_INPUT,
                        stdout: String::new(),
                        stderr: format!("{}: {e}\n", path.display()),
                    };
                }
            }
            let passed = report.get("passed").and_then(Value::as_bool).unwrap_or(true);
            RunOutput { code: if passed { EXIT_OK } else { EXIT_INTERNAL }, stdout: text, stderr: table }
        }
        Err(e) => RunOutput { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load(cfg: &RunConfig) -> Result<Inputs, CliError> {
    if cfg.command == Command::Verify {
        return Ok(Inputs::default());
    }
    let input =
        cfg.input.as_deref().ok_or_else(|| CliError::Input(format!("{} needs a graph file", cfg.command.name())))?;
    Ok(Inputs {
        graph: read(input)?,
        pairs: cfg.pairs.as_deref().map(read).transpose()?,
        decomposition: cfg.decomposition.as_deref().map(read).transpose()?,
    })
}

/// Runs a command on in-memory inputs; returns the report and a side table.
pub fn execute(cfg: &RunConfig, inputs: &Inputs) -> Result<(Value, String), CliError> {
    if cfg.treewidth.is_some() && inputs.decomposition.is_some() {
        return Err(CliError::Input("--treewidth and --decomposition are exclusive".into()));
    }
    if cfg.treewidth == Some(0) {
        return Err(CliError::Input("--treewidth must be positive".into()));
    }
    if cfg.command == Command::Verify {
        return verify(cfg);
    }
    let g = parse_graph_file(&inputs.graph)?;
    g.check_size(cfg.limits.max_vertices).map_err(|e| CliError::Input(e.to_string()))?;
    let td = inputs.decomposition.as_deref().map(parse_decomposition_file).transpose()?;
    if let Some(td) = &td {
        td.validate(&g)?;
    }
    let report = match cfg.command {
        Command::Partition => partition(cfg, &g, td)?,
        Command::Embed => embed(cfg, &g, td)?,
        Command::SparsestCut | Command::Multicut => {
            let text = inputs.pairs.as_deref().ok_or_else(|| CliError::Input("cut commands need --pairs".into()))?;
            let inst = CutInstance::new(g, parse_pairs_file(text)?)?;
            let strategy = match (td, cfg.treewidth) {
                (Some(td), _) => SeparatorStrategy::Decomposition(td),
                (None, Some(t)) => SeparatorStrategy::Exhaustive(t),
                (None, None) => SeparatorStrategy::Auto,
            };
            let opts = CutOptions { strategy, max_lp_vertices: cfg.limits.max_lp_vertices };
            if cfg.command == Command::SparsestCut {
                sparsest_cut(&inst, &opts)?
            } else {
                multicut(&inst, &opts)?
            }
        }
        Command::Verify => unreachable!("handled above"),
    };
    Ok((report, String::new()))
}

/// How a graph is partitioned: the tree sampler for bidirected trees unless a
/// separator source is given, the treewidth sampler otherwise.
enum Builder {
    Tree(TreeBuilder),
    Treewidth(TreewidthBuilder),
}

impl Builder {
    fn choose(cfg: &RunConfig, g: &WeightedDigraph, td: Option<TreeDecomposition>) -> Result<Self, CliError> {
        let provider = match (td, cfg.treewidth) {
            (Some(td), _) => SeparatorProvider::Decomposition(td),
            (None, Some(t)) => SeparatorProvider::Exhaustive { max_size: t },
            (None, None) if g.vertex_count() > 0 && is_bidirected_tree(g) => {
                return Ok(Builder::Tree(TreeBuilder { root: 0 }));
            }
            (None, None) => {
                let (t, _) = quasicut_core::partition::SeparatorTree::smallest_exhaustive(g)?;
                SeparatorProvider::Exhaustive { max_size: t }
            }
        };
        Ok(Builder::Treewidth(TreewidthBuilder::new(g, &provider)?))
    }

    fn name(&self) -> &'static str {
        match self {
            Builder::Tree(_) => "tree",
            Builder::Treewidth(_) => "treewidth",
        }
    }

    fn lipschitz_bound(&self, n: usize) -> f64 {
        match self {
            Builder::Tree(b) => b.lipschitz_bound(n),
            Builder::Treewidth(b) => b.lipschitz_bound(n),
        }
    }

    fn family(&self, g: &WeightedDigraph) -> Result<ScaleFamily, CliError> {
        let m = shortest_path_quasimetric(g);
        Ok(match self {
            Builder::Tree(b) => build_scale_family(&m, g, b)?,
            Builder::Treewidth(b) => build_scale_family(&m, g, b)?,
        })
    }
}

fn pair_list(pairs: impl Iterator<Item = (usize, usize)>) -> Value {
    Value::Array(pairs.map(|(u, v)| Value::from(vec![u, v])).collect())
}

fn partition(cfg: &RunConfig, g: &WeightedDigraph, td: Option<TreeDecomposition>) -> Result<Value, CliError> {
    let r = cfg.r.ok_or_else(|| CliError::Input("partition needs --r".into()))?;
    if !(r.is_finite() && r > 0.0) {
        return Err(CliError::Input(format!("--r must be positive and finite, got {r}")));
    }
    let builder = Builder::choose(cfg, g, td)?;
    let z = draw_z(&mut ChaCha8Rng::seed_from_u64(cfg.seed), r);
    let (p, support, metric, width) = match &builder {
        Builder::Tree(b) => {
            let s = TreeSampler::new(g, r, b.root)?;
            (s.sample(z)?, s.support(), s.metric().clone(), None)
        }
        Builder::Treewidth(b) => {
            let s = TreewidthSampler::new(g, r, b.hierarchy.clone())?;
            (s.sample(z)?, s.support(), s.metric().clone(), Some(b.width()))
        }
    };
    let max_related = p.proper_pairs().map(|(u, v)| metric.get(u, v)).fold(0.0, f64::max);
    if !is_quasipartition(p.relation()) {
        return Err(CliError::Internal("sampled relation is not reflexive and transitive".into()));
    }
    if max_related > r {
        return Err(CliError::Internal(format!("sampled relation relates a pair at distance {max_related} > {r}")));
    }
    let n = g.vertex_count();
    Ok(object([
        ("command", "partition".into()),
        ("sampler", builder.name().into()),
        ("n", n.into()),
        ("r", num(r)),
        ("seed", cfg.seed.into()),
        ("z", num(z)),
        ("pairs", pair_list(p.proper_pairs())),
        (
            "certificate",
            object([
                ("r_bounded", true.into()),
                ("transitive", true.into()),
                ("max_related_distance", num(max_related)),
                ("lipschitz_bound", num(builder.lipschitz_bound(n))),
                ("separator_width", width.map_or(Value::Null, Value::from)),
                ("support_size", support.len().into()),
            ]),
        ),
    ]))
}

fn embed(cfg: &RunConfig, g: &WeightedDigraph, td: Option<TreeDecomposition>) -> Result<Value, CliError> {
    let builder = Builder::choose(cfg, g, td)?;
    let fam = builder.family(g)?;
    let choices = fam.sample_choices(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let um = embed_quasiultrametric(&fam, &choices)?;
    let unit = 1.0 / fam.scale_factor();
    let original = shortest_path_quasimetric(g);
    let distances = um.matrix().scaled(unit);
    let (contraction, expansion) = distortion(original.matrix(), &distances);
    if contraction > 1.0 {
        return Err(CliError::Internal(format!("embedding contracts a pair by {contraction}")));
    }
    let n = g.vertex_count();
    let mut expected_max: f64 = 0.0;
    for (u, v) in fam.metric().off_diagonal() {
        let d = fam.metric().get(u, v);
        if d > 0.0 && d.is_finite() {
            expected_max = expected_max.max(expected_ultrametric_distance(&fam, u, v) / d);
        }
    }
    let phi = embed_01_combination(&fam);
    Ok(object([
        ("command", "embed".into()),
        ("sampler", builder.name().into()),
        ("n", n.into()),
        ("seed", cfg.seed.into()),
        ("unit", num(unit)),
        ("scales", fam.scales().len().into()),
        ("choices", Value::from(choices)),
        ("distances", Value::Array((0..n).map(|u| nums((0..n).map(|v| distances.get(u, v)))).collect())),
        (
            "distortion",
            object([
                ("contraction", num(contraction)),
                ("expansion", num(expansion)),
                ("expected_expansion_max", num(expected_max)),
                ("lipschitz_bound", num(fam.lipschitz_bound())),
                ("measured_lipschitz", num(fam.measured_lipschitz())),
            ]),
        ),
        ("combination", object([("items", phi.items().len().into()), ("normalizer", num(phi.normalizer()))])),
    ]))
}

fn cut_json(inst: &CutInstance, cut: &CutResult) -> Value {
    let g = inst.graph();
    object([
        ("edges", Value::from(cut.edges.clone())),
        ("edge_endpoints", pair_list(cut.edges.iter().map(|&e| (g.edge(e).tail, g.edge(e).head)))),
        ("capacity", num(cut.capacity)),
        ("separated", Value::from(cut.separated.clone())),
        ("separated_demand", num(cut.separated_demand)),
        ("sparsity", num(cut.sparsity)),
    ])
}

fn sparsest_cut(inst: &CutInstance, opts: &CutOptions) -> Result<Value, CliError> {
    let report = solve_sparsest_cut(inst, opts)?;
    let c = &report.certificate;
    Ok(object([
        ("command", "sparsest-cut".into()),
        ("cut", cut_json(inst, &report.cut)),
        ("lp_value", num(report.lp_value)),
        ("lp_lengths", nums(report.lp_lengths.iter().copied())),
        (
            "certificate",
            object([
                ("trivial", report.trivial.into()),
                ("combination_ratio", num(c.combination_ratio)),
                ("fractional_ratio", num(c.fractional_ratio)),
                ("contraction", num(c.contraction)),
                ("expansion", num(c.expansion)),
                ("distortion", num(c.distortion())),
                ("bound", num(report.bound())),
                ("approximation_ratio", num(report.approximation_ratio())),
                ("separator_width", report.separator_width.into()),
                ("scales", report.scale_count.into()),
                ("combination_size", report.combination_size.into()),
            ]),
        ),
    ]))
}

fn multicut(inst: &CutInstance, opts: &CutOptions) -> Result<Value, CliError> {
    let report = solve_multicut(inst, opts)?;
    let rounds = report
        .iterations
        .iter()
        .map(|it| {
            object([
                ("remaining", Value::from(it.remaining.clone())),
                ("separated", Value::from(it.separated.clone())),
                ("edges", Value::from(it.edges.clone())),
                ("capacity", num(it.capacity)),
                ("sparsity", num(it.sparsity)),
                ("lp_value", num(it.lp_value)),
            ])
        })
        .collect();
    Ok(object([
        ("command", "multicut".into()),
        ("cut", cut_json(inst, &report.cut)),
        ("iterations", Value::Array(rounds)),
        (
            "certificate",
            object([
                ("pairs", inst.pairs().len().into()),
                ("harmonic_number", num(quasicut_core::cut::harmonic(inst.pairs().len()))),
                ("harmonic_weight", num(report.harmonic_weight())),
                ("iteration_capacity", num(report.iteration_capacity())),
            ]),
        ),
    ]))
}

/// Bundled sample inputs used by the determinism check.
pub mod samples {
    pub const TREE: &str = include_str!("../../../data/tree.txt");
    pub const GRAPH: &str = include_str!("../../../data/treewidth2.txt");
    pub const DECOMPOSITION: &str = include_str!("../../../data/treewidth2.td");
    pub const PAIRS: &str = include_str!("../../../data/treewidth2.pairs");
}

/// Every non-verify command on the bundled samples, each run twice.
pub fn determinism_check(seed: u64) -> (usize, Vec<String>) {
    let tree = Inputs { graph: samples::TREE.into(), ..Inputs::default() };
    let graph = Inputs {
        graph: samples::GRAPH.into(),
        pairs: Some(samples::PAIRS.into()),
        decomposition: Some(samples::DECOMPOSITION.into()),
    };
    let mut cases = Vec::new();
    for (label, inputs) in [("tree", &tree), ("treewidth", &graph)] {
        for command in [Command::Partition, Command::Embed, Command::SparsestCut, Command::Multicut] {
            if label == "tree" && matches!(command, Command::SparsestCut | Command::Multicut) {
                continue;
            }
            let mut cfg = RunConfig::new(command);
            cfg.seed = seed;
            cfg.r = Some(2.0);
            cases.push((format!("{} on {label}", command.name()), cfg, inputs));
        }
    }
    let mut failures = Vec::new();
    for (label, cfg, inputs) in &cases {
        let render = || execute(cfg, inputs).map(|(v, _)| json::to_string(&v)).map_err(|e| e.to_string());
        match (render(), render()) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => failures.push(format!("{label}: outputs differ")),
            (Err(e), _) | (_, Err(e)) => failures.push(format!("{label}: {e}")),
        }
    }
    (cases.len(), failures)
}

fn verify(cfg: &RunConfig) -> Result<(Value, String), CliError> {
    let mut vc = VerifyConfig { seed: cfg.seed, ..VerifyConfig::default() };
    if let Some(trials) = cfg.trials {
        if trials < quasicut_core::oracle::MIN_TRIALS {
            return Err(CliError::Input(format!("--trials must be at least {}", quasicut_core::oracle::MIN_TRIALS)));
        }
        vc.trials = trials;
    }
    let mut table = String::new();
    let mut rows = Vec::new();
    let mut all = true;
    for o in run_all(&vc) {
        table.push_str(&format!("{o}\n"));
        all &= o.passed();
        rows.push(object([
            ("id", o.id.into()),
            ("name", o.name.into()),
            ("passed", o.passed().into()),
            ("checks", o.checks.into()),
            ("failed", o.failed.into()),
            ("summary", o.summary.clone().into()),
            ("notes", Value::from(o.notes.clone())),
        ]));
    }
    let start = Instant::now();
    let (cases, failures) = determinism_check(cfg.seed);
    let passed = failures.is_empty();
    all &= passed;
    table.push_str(&format!(
        "criterion 10 {} determinism: {} checks, {} failed, {:.2}s\n",
        if passed { "PASS" } else { "FAIL" },
        cases,
        failures.len(),
        start.elapsed().as_secs_f64()
    ));
    for f in &failures {
        table.push_str(&format!("    {f}\n"));
    }
    rows.push(object([
        ("id", 10.into()),
        ("name", "determinism".into()),
        ("passed", passed.into()),
        ("checks", cases.into()),
        ("failed", failures.len().into()),
        ("summary", format!("{cases} commands run twice on bundled samples").into()),
        ("notes", Value::from(failures)),
    ]));
    let report = object([
        ("command", "verify".into()),
        ("seed", cfg.seed.into()),
        ("trials", vc.trials.into()),
        ("criteria", Value::Array(rows)),
        ("passed", all.into()),
    ]);
    Ok((report, table))
}
