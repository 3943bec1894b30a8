//! Comparison sparsifiers: random edge deletion, BFS spanning tree,
//! transitive reduction and effective-resistance spectral sparsification.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{connected_components, laplacian, Graph, GraphError};
use crate::rng::seeded;

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("target size {target} exceeds the {count} edges present")]
    TargetTooLarge { target: usize, count: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has a directed cycle")]
    CycleDetected,
    #[error("transitive reduction needs a directed graph")]
    Undirected,
    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Keeps `target` edges chosen uniformly without replacement.
pub fn random_deletion(g: &Graph, target: usize, seed: u64) -> Result<Graph, BaselineError> {
    let m = g.edge_count();
    if target > m {
        return Err(BaselineError::TargetTooLarge { target, count: m });
    }
    let mut keep = vec![false; m];
    for i in index::sample(&mut seeded(seed), m, target) {
        keep[i] = true;
    }
    Ok(g.filter_edges(|id| keep[id]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    pub graph: Graph,
    /// True when the input was disconnected and a spanning forest was returned.
    pub is_forest: bool,
}

/// Breadth-first spanning tree from node 0, smallest neighbour first. A
/// disconnected input yields a forest, each further tree rooted at the
/// smallest unvisited node.
pub fn spanning_tree(g: &Graph) -> Result<SpanningTree, BaselineError> {
    g.require_undirected()?;
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut keep = vec![false; g.edge_count()];
    let mut roots = 0;
    for root in 0..n {
        if seen[root] {
            continue;
        }
        roots += 1;
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    keep[g.edge_id(v, w).expect("neighbour edge exists")] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(SpanningTree {
        graph: g.filter_edges(|id| keep[id]),
        is_forest: roots > 1,
    })
}

/// Nodes in topological order, or `CycleDetected`.
fn topological_order(g: &Graph) -> Result<Vec<usize>, BaselineError> {
    let n = g.node_count();
    let mut indeg = vec![0usize; n];
    for &(_, v) in g.edges() {
        indeg[v] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in g.neighbors(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() < n {
        return Err(BaselineError::CycleDetected);
    }
    Ok(order)
}

/// `reach[u][v]`: a directed path of length >= 1 leads from `u` to `v`.
pub fn reachability(g: &Graph) -> Result<Vec<Vec<bool>>, BaselineError> {
    let order = topological_order(g)?;
    let n = g.node_count();
    let mut reach = vec![vec![false; n]; n];
    for &u in order.iter().rev() {
        for &w in g.neighbors(u) {
            reach[u][w] = true;
            let from_w = reach[w].clone();
            reach[u].iter_mut().zip(from_w).for_each(|(x, y)| *x |= y);
        }
    }
    Ok(reach)
}

/// Smallest subgraph with the same reachability relation. An arc `u -> v`
/// is dropped when `v` is reachable from another out-neighbour of `u`.
pub fn transitive_reduction(g: &Graph) -> Result<Graph, BaselineError> {
    if !g.is_directed() {
        return Err(BaselineError::Undirected);
    }
    let reach = reachability(g)?;
    Ok(g.filter_edges(|id| {
        let (u, v) = g.edges()[id];
        !g.neighbors(u).iter().any(|&w| w != v && reach[w][v])
    }))
}

fn require_connected(g: &Graph) -> Result<(), BaselineError> {
    if connected_components(g).iter().any(|&c| c != 0) {
        return Err(BaselineError::Disconnected);
    }
    Ok(())
}

/// Moore–Penrose pseudoinverse of the Laplacian of a connected graph,
/// `(L + J/n)^-1 - J/n`.
pub fn laplacian_pseudoinverse(g: &Graph) -> Result<DMatrix<f64>, BaselineError> {
    require_connected(g)?;
    let n = g.node_count();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    let inv = (laplacian(g)? + &j).try_inverse().expect("L + J/n is invertible for connected graphs");
    Ok(inv - j)
}

/// Effective resistance across each edge, indexed by edge id, with every
/// edge a unit resistor.
pub fn effective_resistances(g: &Graph) -> Result<Vec<f64>, BaselineError> {
    g.require_undirected()?;
    let lp = laplacian_pseudoinverse(g)?;
    Ok(g.edges().iter().map(|&(u, v)| lp[(u, u)] + lp[(v, v)] - 2.0 * lp[(u, v)]).collect())
}

/// Undirected graph with positive edge weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
}

impl WeightedGraph {
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            l[(u, v)] -= w;
            l[(v, u)] -= w;
            l[(u, u)] += w;
            l[(v, v)] += w;
        }
        l
    }

    /// Unweighted graph on the same edges; weights are dropped.
    pub fn topology(&self, labels: Vec<u64>) -> Graph {
        Graph::with_labels(labels, false, self.edges.iter().copied()).expect("sampled edges come from a simple graph")
    }

    /// `x^T L x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges.iter().zip(&self.weights).map(|(&(u, v), w)| w * (x[u] - x[v]).powi(2)).sum()
    }
}

/// Number of samples drawn by [`spectral_sparsify`]: `ceil(8 n ln n / eps^2)`.
pub fn spectral_sample_count(n: usize, epsilon: f64) -> usize {
    (8.0 * n as f64 * (n as f64).ln() / (epsilon * epsilon)).ceil() as usize
}

/// Samples edges with replacement, with probability proportional to
/// effective resistance, and gives each draw of edge `e` weight `1 / (q p_e)`.
pub fn spectral_sparsify(g: &Graph, epsilon: f64, seed: u64) -> Result<WeightedGraph, BaselineError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(BaselineError::InvalidEpsilon(epsilon));
    }
    let r = effective_resistances(g)?;
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Ok(WeightedGraph { n, edges: Vec::new(), weights: Vec::new() });
    }
    // resistances sum to n - 1 (Foster), so these are probabilities
    let p: Vec<f64> = r.iter().map(|&re| re / (n - 1) as f64).collect();
    let q = spectral_sample_count(n, epsilon);
    let dist = WeightedIndex::new(&p).expect("resistances are positive");
    let mut rng = seeded(seed);
    let mut weight = vec![0.0; g.edge_count()];
    for _ in 0..q {
        let e = dist.sample(&mut rng);
        weight[e] += 1.0 / (q as f64 * p[e]);
    }
    let (edges, weights) = g.edges().iter().zip(weight).filter(|(_, w)| *w > 0.0).map(|(&e, w)| (e, w)).unzip();
    Ok(WeightedGraph { n, edges, weights })
}

/// A comparison method with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum SparsifierSpec {
    Random { target: usize, seed: u64 },
    SpanningTree,
    Transitive,
    Spectral { epsilon: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutput {
    pub graph: Graph,
    /// Edge weights of the spectral sparsifier, aligned with `graph.edges()`.
    pub weights: Option<Vec<f64>>,
    pub is_forest: bool,
}

impl SparsifierSpec {
    pub fn apply(&self, g: &Graph) -> Result<BaselineOutput, BaselineError> {
        let plain = |graph| BaselineOutput {
            graph,
            weights: None,
            is_forest: false,
        };
        Ok(match *self {
            SparsifierSpec::Random { target, seed } => plain(random_deletion(g, target, seed)?),
            SparsifierSpec::SpanningTree => {
                let t = spanning_tree(g)?;
                BaselineOutput {
                    graph: t.graph,
                    weights: None,
                    is_forest: t.is_forest,
                }
            }
            SparsifierSpec::Transitive => plain(transitive_reduction(g)?),
            SparsifierSpec::Spectral { epsilon, seed } => {
                let h = spectral_sparsify(g, epsilon, seed)?;
                BaselineOutput {
                    graph: h.topology(g.labels().to_vec()),
                    weights: Some(h.weights),
                    is_forest: false,
                }
            }
        })
    }
}
