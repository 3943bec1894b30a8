use std::collections::VecDeque;

use nalgebra::DMatrix;

use super::{Graph, GraphError};

/// Iteration cap for power iteration.
pub const EIGEN_MAX_ITER: usize = 100_000;
/// Convergence tolerance (max-norm change between iterates).
pub const EIGEN_TOL: f64 = 1e-10;

/// `L = D - A`.
pub fn laplacian(g: &Graph) -> Result<DMatrix<f64>, GraphError> {
    g.require_undirected()?;
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, v)] = -1.0;
        l[(v, u)] = -1.0;
    }
    for v in 0..n {
        l[(v, v)] = g.degree(v) as f64;
    }
    Ok(l)
}

/// Adjacency eigenvalues, largest first.
pub fn spectrum(g: &Graph) -> Result<Vec<f64>, GraphError> {
    g.require_undirected()?;
    let n = g.node_count();
    let adj = g.adjacency();
    let a = DMatrix::from_fn(n, n, |r, c| adj.get(r, c) as f64);
    let mut ev: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

fn triangles_at(g: &Graph, v: usize) -> usize {
    let nb = g.neighbors(v);
    let mut t = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if g.has_edge(a, b) {
                t += 1;
            }
        }
    }
    t
}

/// Local clustering coefficient; 0 for nodes of degree below 2.
pub fn local_clustering(g: &Graph) -> Result<Vec<f64>, GraphError> {
    g.require_undirected()?;
    Ok((0..g.node_count())
        .map(|v| {
            let d = g.degree(v);
            if d < 2 {
                0.0
            } else {
                triangles_at(g, v) as f64 / (d * (d - 1) / 2) as f64
            }
        })
        .collect())
}

/// Fraction of 2-paths that are closed; 0 when there are none.
pub fn global_clustering(g: &Graph) -> Result<f64, GraphError> {
    g.require_undirected()?;
    let (mut closed, mut all) = (0usize, 0usize);
    for v in 0..g.node_count() {
        let d = g.degree(v);
        all += d * d.saturating_sub(1) / 2;
        closed += triangles_at(g, v);
    }
    Ok(if all == 0 { 0.0 } else { closed as f64 / all as f64 })
}

pub fn mean_clustering(g: &Graph) -> Result<f64, GraphError> {
    let local = local_clustering(g)?;
    Ok(if local.is_empty() {
        0.0
    } else {
        local.iter().sum::<f64>() / local.len() as f64
    })
}

/// Node and edge dependencies accumulated from every source (Brandes).
fn brandes(g: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let mut node = vec![0.0; n];
    let mut edge = vec![0.0; g.edge_count()];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    for s in 0..n {
        stack.clear();
        preds.iter_mut().for_each(Vec::clear);
        sigma.iter_mut().for_each(|x| *x = 0.0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        delta.iter_mut().for_each(|x| *x = 0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                delta[v] += c;
                let id = g.edge_id(v, w).expect("predecessor arcs are edges");
                edge[id] += c;
            }
            if w != s {
                node[w] += delta[w];
            }
        }
    }
    if !g.is_directed() {
        // every unordered pair was counted from both ends
        node.iter_mut().for_each(|x| *x /= 2.0);
        edge.iter_mut().for_each(|x| *x /= 2.0);
    }
    (node, edge)
}

/// Unnormalised betweenness: sum over pairs `s != i != t` of the share of
/// shortest `s`-`t` paths through `i`. Unordered pairs when undirected.
pub fn betweenness_centrality(g: &Graph) -> Vec<f64> {
    brandes(g).0
}

/// Edge betweenness, indexed by edge id.
pub fn edge_betweenness(g: &Graph) -> Vec<f64> {
    brandes(g).1
}

pub fn degree_centrality(g: &Graph) -> Vec<f64> {
    g.degrees().into_iter().map(|d| d as f64).collect()
}

/// Component id per node (weak components when directed), numbered by
/// smallest member.
pub fn connected_components(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut undirected: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    if g.is_directed() {
        for &(u, v) in g.edges() {
            undirected[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &undirected[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Dominant eigenvector of the adjacency matrix, non-negative, summing to 1.
///
/// Each connected component is solved on its own by power iteration on
/// `A + I` from the all-ones vector (the shift keeps bipartite components
/// from oscillating). A component of `k` nodes carries total weight `k / n`.
pub fn eigenvector_centrality(g: &Graph) -> Result<Vec<f64>, GraphError> {
    g.require_undirected()?;
    let n = g.node_count();
    let comp = connected_components(g);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut out = vec![0.0; n];
    for c in 0..ncomp {
        let members: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        let x = component_eigenvector(g, &members)?;
        let sum: f64 = x.iter().sum();
        for (&v, xv) in members.iter().zip(x) {
            out[v] = xv / sum * members.len() as f64 / n as f64;
        }
    }
    Ok(out)
}

fn component_eigenvector(g: &Graph, members: &[usize]) -> Result<Vec<f64>, GraphError> {
    let k = members.len();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let nbrs: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|&w| local[w]).collect())
        .collect();
    let step = |x: &[f64]| -> Vec<f64> {
        let mut y: Vec<f64> = (0..k).map(|i| x[i] + nbrs[i].iter().map(|&j| x[j]).sum::<f64>()).collect();
        let m = y.iter().copied().fold(0.0, f64::max);
        y.iter_mut().for_each(|v| *v /= m);
        y
    };
    let mut x = vec![1.0; k];
    let mut change = f64::INFINITY;
    for _ in 0..EIGEN_MAX_ITER {
        let y = step(&x);
        change = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if change < EIGEN_TOL {
            return Ok(x);
        }
    }
    Err(GraphError::NotConverged {
        iterations: EIGEN_MAX_ITER,
        residual: change,
    })
}
