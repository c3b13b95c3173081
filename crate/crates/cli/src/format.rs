//! Line-oriented text formats for graphs, terminal pairs and tree
//! decompositions. `#` starts a comment; blank lines are ignored.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use quasicut_core::{Edge, TerminalPair, TreeDecomposition, WeightedDigraph};
use thiserror::Error;

/// Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate edge {tail} -> {head}")]
    DuplicateEdge { line: usize, tail: usize, head: usize },
    #[error("line {line}: bad vertex id {vertex}")]
    BadVertexId { line: usize, vertex: usize },
    #[error("line {line}: pair endpoints are both {vertex}")]
    SameEndpoints { line: usize, vertex: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match *self {
            Self::Syntax { line, .. }
            | Self::DuplicateEdge { line, .. }
            | Self::BadVertexId { line, .. }
            | Self::SameEndpoints { line, .. } => line,
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

/// Non-empty lines with comments stripped, split on whitespace.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn int(line: usize, field: &str) -> Result<usize, ParseError> {
    field.parse().map_err(|_| syntax(line, format!("expected a non-negative integer, found {field:?}")))
}

fn real(line: usize, field: &str, what: &str) -> Result<f64, ParseError> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(syntax(line, format!("expected a finite non-negative {what}, found {field:?}"))),
    }
}

fn arity(line: usize, fields: &[&str], expected: usize) -> Result<(), ParseError> {
    if fields.len() == expected {
        Ok(())
    } else {
        Err(syntax(line, format!("{:?} takes {} fields, found {}", fields[0], expected - 1, fields.len() - 1)))
    }
}

/// `n <count>` once, then `e <u> <v> <w>` lines.
pub fn parse_graph_file(text: &str) -> Result<WeightedDigraph, ParseError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut last = 0;
    for (line, fields) in records(text) {
        last = line;
        match fields[0] {
            "n" => {
                arity(line, &fields, 2)?;
                if n.is_some() {
                    return Err(syntax(line, "vertex count given twice"));
                }
                n = Some(int(line, fields[1])?);
            }
            "e" => {
                arity(line, &fields, 4)?;
                let count = n.ok_or_else(|| syntax(line, "edge before the vertex count"))?;
                let (u, v) = (int(line, fields[1])?, int(line, fields[2])?);
                let w = real(line, fields[3], "weight")?;
                for x in [u, v] {
                    if x >= count {
                        return Err(ParseError::BadVertexId { line, vertex: x });
                    }
                }
                if u == v {
                    return Err(ParseError::BadVertexId { line, vertex: u });
                }
                if !seen.insert((u, v)) {
                    return Err(ParseError::DuplicateEdge { line, tail: u, head: v });
                }
                edges.push(Edge::new(u, v, w));
            }
            other => return Err(syntax(line, format!("unknown record {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| syntax(last.max(1), "missing vertex count"))?;
    WeightedDigraph::new(n, edges).map_err(|e| syntax(last.max(1), e.to_string()))
}

/// `t <s> <t> <demand>` lines, in file order.
pub fn parse_pairs_file(text: &str) -> Result<Vec<TerminalPair>, ParseError> {
    let mut pairs = Vec::new();
    for (line, fields) in records(text) {
        if fields[0] != "t" {
            return Err(syntax(line, format!("unknown record {:?}", fields[0])));
        }
        arity(line, &fields, 4)?;
        let (s, t) = (int(line, fields[1])?, int(line, fields[2])?);
        if s == t {
            return Err(ParseError::SameEndpoints { line, vertex: s });
        }
        pairs.push(TerminalPair::new(s, t, real(line, fields[3], "demand")?));
    }
    Ok(pairs)
}

/// `b <id> <v...>` bags and `link <id> <id>` tree edges. Bag ids may be any
/// distinct integers; they are renumbered in ascending order.
pub fn parse_decomposition_file(text: &str) -> Result<TreeDecomposition, ParseError> {
    let mut bags: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut links = Vec::new();
    for (line, fields) in records(text) {
        match fields[0] {
            "b" => {
                if fields.len() < 2 {
                    return Err(syntax(line, "bag without an id"));
                }
                let id = int(line, fields[1])?;
                let members = fields[2..].iter().map(|f| int(line, f)).collect::<Result<Vec<_>, _>>()?;
                if bags.insert(id, members).is_some() {
                    return Err(syntax(line, format!("bag {id} defined twice")));
                }
            }
            "link" => {
                arity(line, &fields, 3)?;
                links.push((line, int(line, fields[1])?, int(line, fields[2])?));
            }
            other => return Err(syntax(line, format!("unknown record {other:?}"))),
        }
    }
    let index: BTreeMap<usize, usize> = bags.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let tree_edges = links
        .into_iter()
        .map(|(line, a, b)| match (index.get(&a), index.get(&b)) {
            (Some(&x), Some(&y)) => Ok((x, y)),
            _ => Err(syntax(line, format!("link references an undefined bag ({a}, {b})"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TreeDecomposition::new(bags.into_values().collect(), tree_edges))
}

pub fn emit_graph(g: &WeightedDigraph) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.tail, e.head, e.weight).unwrap();
    }
    out
}

pub fn emit_pairs(pairs: &[TerminalPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        writeln!(out, "t {} {} {}", p.source, p.sink, p.demand).unwrap();
    }
    out
}

pub fn emit_decomposition(td: &TreeDecomposition) -> String {
    let mut out = String::new();
    for (id, bag) in td.bags().iter().enumerate() {
        write!(out, "b {id}").unwrap();
        for v in bag {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    for (a, b) in td.tree_edges() {
        writeln!(out, "link {a} {b}").unwrap();
    }
    out
}
