//! Simple graphs, their adjacency matrices, and the graph-theoretic measures
//! used to judge a sparsification.

pub mod generators;
mod metrics;

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bdm::BitMatrix;

pub use metrics::{
    betweenness_centrality, connected_components, degree_centrality, edge_betweenness, eigenvector_centrality, global_clustering, laplacian, local_clustering,
    mean_clustering, spectrum, EIGEN_MAX_ITER, EIGEN_TOL,
};

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("self-loop on node {0}")]
    SelfLoop(u64),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(u64, u64),
    #[error("edge endpoint {0} out of range for {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("operation needs an undirected graph")]
    Directed,
    #[error("adjacency matrix is not square")]
    NotSquare,
    #[error("adjacency matrix of an undirected graph must be symmetric")]
    Asymmetric,
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
}

/// A simple graph (no loops, no multi-edges) with stable node indices.
///
/// Edges are stored canonically: `(u, v)` with `u < v` when undirected, sorted.
/// An edge's id is its position in that list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize)>,
    labels: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, directed: bool, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        Self::with_labels((0..n as u64).collect(), directed, edges)
    }

    pub fn with_labels(
        labels: Vec<u64>,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::NodeOutOfRange(u.max(v), n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(labels[u]));
            }
            list.push(if directed { (u, v) } else { (u.min(v), u.max(v)) });
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(labels[w[0].0], labels[w[0].1]));
        }
        Ok(Self::assemble(labels, directed, list))
    }

    fn assemble(labels: Vec<u64>, directed: bool, edges: Vec<(usize, usize)>) -> Self {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            if !directed {
                adj[v].push(u);
            }
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        Graph {
            n,
            directed,
            edges,
            labels,
            adj,
        }
    }

    /// Parses the edge-list format: one `u v` pair per line, `#` comments,
    /// optional `directed` header as the first non-comment line. Nodes are
    /// indexed in order of first appearance.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut directed = false;
        let mut seen_content = false;
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut labels = Vec::new();
        let mut pairs = Vec::new();
        let mut lines_of = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_content && line == "directed" {
                directed = true;
                seen_content = true;
                continue;
            }
            seen_content = true;
            let mut parts = line.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GraphError::Parse {
                        line: line_no,
                        reason: "expected two node labels".into(),
                    })
                }
            };
            let parse = |s: &str| {
                s.parse::<u64>().map_err(|_| GraphError::Parse {
                    line: line_no,
                    reason: format!("{s:?} is not a non-negative integer"),
                })
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a == b {
                return Err(GraphError::Parse {
                    line: line_no,
                    reason: format!("self-loop on node {a}"),
                });
            }
            let mut idx = |l: u64| {
                *index.entry(l).or_insert_with(|| {
                    labels.push(l);
                    labels.len() - 1
                })
            };
            let (u, v) = (idx(a), idx(b));
            pairs.push((u, v));
            lines_of.push(line_no);
        }
        // report duplicates with their line number
        let mut seen = HashMap::new();
        for (&(u, v), &line) in pairs.iter().zip(&lines_of) {
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if let Some(first) = seen.insert(key, line) {
                return Err(GraphError::Parse {
                    line,
                    reason: format!("duplicate edge {} {} (first on line {first})", labels[u], labels[v]),
                });
            }
        }
        Self::with_labels(labels, directed, pairs)
    }

    /// Edge list with original labels, one edge per line in edge-id order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        if self.directed {
            out.push_str("directed\n");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", self.labels[u], self.labels[v]);
        }
        out
    }

    pub fn from_adjacency(m: &BitMatrix, directed: bool) -> Result<Self, GraphError> {
        Self::from_adjacency_labeled(m, directed, (0..m.rows() as u64).collect())
    }

    pub fn from_adjacency_labeled(m: &BitMatrix, directed: bool, labels: Vec<u64>) -> Result<Self, GraphError> {
        if m.rows() != m.cols() || labels.len() != m.rows() {
            return Err(GraphError::NotSquare);
        }
        let n = m.rows();
        let mut edges = Vec::new();
        for u in 0..n {
            if m.get(u, u) != 0 {
                return Err(GraphError::SelfLoop(labels[u]));
            }
            for v in 0..n {
                if m.get(u, v) == 1 {
                    if directed {
                        edges.push((u, v));
                    } else if m.get(v, u) != 1 {
                        return Err(GraphError::Asymmetric);
                    } else if u < v {
                        edges.push((u, v));
                    }
                }
            }
        }
        Self::with_labels(labels, directed, edges)
    }

    pub fn adjacency(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            m.set(u, v, 1);
            if !self.directed {
                m.set(v, u, 1);
            }
        }
        m
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Out-neighbours (all neighbours when undirected), ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        self.edges.binary_search(&key).ok()
    }

    /// Row sum of the adjacency matrix (out-degree when directed).
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// `hist[k]` = number of nodes of degree `k`.
    pub fn degree_distribution(&self) -> Vec<usize> {
        let degs = self.degrees();
        let mut hist = vec![0; degs.iter().max().map_or(0, |m| m + 1)];
        degs.iter().for_each(|&d| hist[d] += 1);
        hist
    }

    /// Same nodes, only the edges whose id satisfies `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, e)| *e)
            .collect();
        Self::assemble(self.labels.clone(), self.directed, edges)
    }

    /// Subgraph induced by the nodes satisfying `keep`, re-indexed in order.
    pub fn induced(&self, mut keep: impl FnMut(usize) -> bool) -> Graph {
        let mut map = vec![usize::MAX; self.n];
        let mut labels = Vec::new();
        for v in 0..self.n {
            if keep(v) {
                map[v] = labels.len();
                labels.push(self.labels[v]);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| map[u] != usize::MAX && map[v] != usize::MAX)
            .map(|&(u, v)| (map[u], map[v]))
            .collect();
        Self::assemble(labels, self.directed, edges)
    }

    /// Applies a node permutation: node `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut labels = vec![0; self.n];
        for v in 0..self.n {
            labels[perm[v]] = self.labels[v];
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v]));
        Self::with_labels(labels, self.directed, edges).expect("permutation preserves simplicity")
    }

    pub(crate) fn require_undirected(&self) -> Result<(), GraphError> {
        if self.directed {
            Err(GraphError::Directed)
        } else {
            Ok(())
        }
    }
}
