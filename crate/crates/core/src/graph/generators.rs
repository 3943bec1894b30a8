//! Deterministic named graphs and seeded random graph models.

use rand::seq::index;
use rand::Rng;

use super::Graph;

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::new(n, false, edges).expect("complete graph is simple")
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, false, (1..n).map(|v| (v - 1, v))).expect("path is simple")
}

/// Cycle on `n >= 3` nodes.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a simple cycle needs three nodes");
    Graph::new(n, false, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
}

/// Star with centre 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    Graph::new(leaves + 1, false, (1..=leaves).map(|v| (0, v))).expect("star is simple")
}

/// Uniform random graph with exactly `m` edges, G(n, M).
pub fn gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    let slots = n * n.saturating_sub(1) / 2;
    assert!(m <= slots, "G({n}, {m}) has only {slots} possible edges");
    let mut chosen: Vec<usize> = index::sample(rng, slots, m).into_vec();
    chosen.sort_unstable();
    let edges = chosen.into_iter().map(|k| unrank_pair(n, k));
    Graph::new(n, false, edges).expect("distinct pairs form a simple graph")
}

/// k-th pair `(u, v)`, `u < v`, in row-major order of the upper triangle.
fn unrank_pair(n: usize, mut k: usize) -> (usize, usize) {
    for u in 0..n {
        let row = n - 1 - u;
        if k < row {
            return (u, u + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair index out of range")
}

/// Watts–Strogatz small world: ring lattice with `k` neighbours per node
/// (`k` even), each lattice edge rewired with probability `p`.
pub fn watts_strogatz<R: Rng + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Graph {
    assert!(k.is_multiple_of(2) && k < n, "need an even k smaller than n");
    let mut adj = vec![vec![false; n]; n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u][v] = true;
            adj[v][u] = true;
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u][v] || rng.random::<f64>() >= p {
                continue;
            }
            let free: Vec<usize> = (0..n).filter(|&w| w != u && !adj[u][w]).collect();
            if free.is_empty() {
                continue;
            }
            let w = free[rng.random_range(0..free.len())];
            adj[u][v] = false;
            adj[v][u] = false;
            adj[u][w] = true;
            adj[w][u] = true;
        }
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| adj[u][v]);
    Graph::new(n, false, edges.collect::<Vec<_>>()).expect("rewiring keeps the graph simple")
}

/// Barabási–Albert preferential attachment, `m` edges per new node.
pub fn barabasi_albert<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    assert!(m >= 1 && m < n, "need 1 <= m < n");
    let mut edges = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    // seed: star on the first m + 1 nodes
    for v in 1..=m {
        edges.push((0, v));
        ends.extend([0, v]);
    }
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = ends[rng.random_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        targets.sort_unstable();
        for t in targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    Graph::new(n, false, edges).expect("preferential attachment is simple")
}

/// Random DAG: each pair `u < v` of a random topological order becomes the
/// arc `u -> v` with probability `p`.
pub fn random_dag<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((order[i], order[j]));
            }
        }
    }
    Graph::new(n, true, edges).expect("arcs follow one order")
}

/// Random undirected graph with independent edge probability `p`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, false, edges).expect("pairs are distinct")
}
