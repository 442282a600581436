use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linmath::ComplexMatrix;

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(g: GraphJson) -> Result<Self> {
        Graph::new(g.n, g.edges)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl Graph {
    /// Duplicate edges (in either orientation) collapse; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![false; n * n];
        for &(u, v) in &set {
            adj[u * n + v] = true;
            adj[v * n + u] = true;
        }
        Ok(Self {
            n,
            edges: set.into_iter().collect(),
            adj,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("a cycle needs 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Outer 5-cycle 0..5, inner pentagram 5..10, spokes v ↔ v+5.
    pub fn petersen() -> Self {
        let outer = (0..5).map(|v| (v, (v + 1) % 5));
        let inner = (0..5).map(|v| (5 + v, 5 + (v + 2) % 5));
        let spokes = (0..5).map(|v| (v, v + 5));
        Self::new(10, outer.chain(inner).chain(spokes).collect::<Vec<_>>()).expect("valid")
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Self::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    /// Equal or adjacent.
    pub fn confusable(&self, u: usize, v: usize) -> bool {
        u == v || self.adjacent(u, v)
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&w| self.adjacent(v, w)).count()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(k, &u)| {
            u < self.n && set[k + 1..].iter().all(|&v| v != u && !self.adjacent(u, v))
        })
    }

    /// Edge list (`n m` header, 0-indexed) or DIMACS (`p edge n m`,
    /// `e u v`, 1-indexed), detected from the first non-comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('c'));
        match first {
            Some(l) if l.starts_with('p') => Self::parse_dimacs(text),
            _ => Self::parse_edge_list(text),
        }
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut header = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let code = raw.split('#').next().unwrap_or("").trim();
            if code.is_empty() {
                continue;
            }
            let nums = numbers(line, code.split_whitespace())?;
            if nums.len() != 2 {
                return Err(parse_err(line, "expected two integers"));
            }
            match header {
                None => header = Some((nums[0], nums[1])),
                Some(_) => edges.push((nums[0], nums[1])),
            }
        }
        let (n, m) = header.ok_or_else(|| parse_err(1, "missing `n m` header"))?;
        if edges.len() != m {
            return Err(parse_err(
                text.lines().count().max(1),
                format!("header announces {m} edges, found {}", edges.len()),
            ));
        }
        Self::new(n, edges)
    }

    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let mut tok = raw.split_whitespace();
            match tok.next() {
                None | Some("c") => {}
                Some("p") => {
                    if header.is_some() {
                        return Err(parse_err(line, "duplicate problem line"));
                    }
                    if tok.next() != Some("edge") {
                        return Err(parse_err(line, "expected `p edge n m`"));
                    }
                    let nums = numbers(line, tok)?;
                    if nums.len() != 2 {
                        return Err(parse_err(line, "expected `p edge n m`"));
                    }
                    header = Some((nums[0], nums[1]));
                }
                Some("e") => {
                    if header.is_none() {
                        return Err(parse_err(line, "edge before problem line"));
                    }
                    let nums = numbers(line, tok)?;
                    if nums.len() != 2 || nums[0] == 0 || nums[1] == 0 {
                        return Err(parse_err(line, "expected `e u v` with 1-indexed vertices"));
                    }
                    edges.push((nums[0] - 1, nums[1] - 1));
                }
                Some(other) => {
                    return Err(parse_err(line, format!("unknown line type `{other}`")));
                }
            }
        }
        let (n, m) = header.ok_or_else(|| parse_err(1, "missing problem line"))?;
        if edges.len() != m {
            return Err(parse_err(
                text.lines().count().max(1),
                format!("problem line announces {m} edges, found {}", edges.len()),
            ));
        }
        Self::new(n, edges)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn numbers<'a>(line: usize, tokens: impl Iterator<Item = &'a str>) -> Result<Vec<usize>> {
    tokens
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(line, format!("`{t}` is not a non-negative integer")))
        })
        .collect()
}

/// 0/1 matrix with ones on the diagonal and on edges.
pub fn confusability_matrix(g: &Graph) -> ComplexMatrix {
    let n = g.n();
    let diag: Vec<f64> = vec![1.0; n];
    let mut a = ComplexMatrix::from_real_diag(&diag);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0.into();
        a[(v, u)] = 1.0.into();
    }
    a
}
