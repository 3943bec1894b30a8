//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL without failing
//! the run; the README explains why they cannot hold. Any other failure, or
//! a known failure that starts passing, fails the test.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mils_cli::estimator::EstimatorSpec;
use mils_cli::eval::{run_experiment, total_variation, ExperimentConfig, GeneratorSpec, MethodResult, MethodSpec, Metric, RunOptions, Schedule};
use mils_core::baselines::{effective_resistances, random_deletion, spanning_tree, spectral_sparsify, transitive_reduction};
use mils_core::bdm::{bdm, BinaryObject, BitMatrix, EstimatorConfig};
use mils_core::ctm::{bundled_array_table, bundled_string_table, count_machines, enumerate_machines, BlankTape, BlockKey, MachineSpec, Shape};
use mils_core::eca::{coarse_grain, evolve, rule_table, single_one};
use mils_core::graph::generators::{complete, gnm, random_dag, watts_strogatz};
use mils_core::graph::{betweenness_centrality, connected_components, edge_betweenness, eigenvector_centrality, global_clustering, Graph};
use mils_core::mils::{mils, EdgeDeletion, Execution, NeutralityMode};
use mils_core::rng::seeded;
use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

type Criterion = (u32, &'static str, fn() -> Outcome);

const KNOWN_FAILURES: &[u32] = &[2, 6, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(limit: Duration, started: Instant) -> (bool, String) {
    let t = started.elapsed();
    (t < limit, format!("{:.1}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

fn connected(g: &Graph) -> bool {
    connected_components(g).iter().all(|&c| c == 0)
}

// 1. Determinism of the sparsify command across runs and worker counts.
fn determinism() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seeded(1001);
    let mut mismatches = Vec::new();
    for i in 0..50 {
        let n = rng.random_range(8..=40);
        let m = rng.random_range(n..=(3 * n).min(n * (n - 1) / 2));
        let g = gnm(n, m, &mut rng);
        let target = rng.random_range(0..m);
        let input = dir.path().join(format!("g{i}.txt"));
        fs::write(&input, g.to_edge_list()).unwrap();
        let mut outputs = Vec::new();
        for (run, workers) in [(0, 1), (1, 1), (0, 8), (1, 8)] {
            let out = dir.path().join(format!("g{i}-w{workers}-r{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_mils"))
                .args(["sparsify", "--method", "mils", "--target", &target.to_string(), "--workers", &workers.to_string()])
                .arg("--graph")
                .arg(&input)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
            outputs.push((fs::read(out.join("edges.txt")).unwrap(), fs::read(out.join("trace.json")).unwrap()));
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(i);
        }
    }
    let (fast, time) = within(Duration::from_secs(300), started);
    outcome(mismatches.is_empty() && fast, format!("50 graphs x (1, 8 workers) x 2 runs, mismatches {mismatches:?}, {time}"))
}

// 2. K4 under a single 4x4 block collapses to the empty graph in one sweep.
fn complete_graph_collapse() -> Outcome {
    let cfg = EstimatorConfig::bundled();
    let out = mils(EdgeDeletion::new(complete(4), &cfg), 0, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap();
    let sweeps: Vec<usize> = out.trace.iter().map(|s| s.deleted.len()).collect();
    outcome(
        out.final_count() == 0 && out.trace.len() == 1,
        format!("K4 emptied in {} sweep(s), edges per sweep {sweeps:?}; expected 1 sweep", out.trace.len()),
    )
}

// 3. Two-state census: size, busy-beaver runtime, complement symmetry.
fn ctm_oracle() -> Outcome {
    let started = Instant::now();
    let spec = MachineSpec::new(2).unwrap();
    let dist = enumerate_machines(spec, 6, BlankTape::Both).unwrap();
    let longer = enumerate_machines(spec, 12, BlankTape::Both).unwrap();
    let census = count_machines(spec).unwrap();
    let symmetric = dist.counts.iter().all(|(k, &c)| dist.count(&k.complement()) == c);
    let (fast, time) = within(Duration::from_secs(60), started);
    outcome(
        dist.machines == 10_000 && census == 10_000 && dist.longest_halt == 6 && longer.counts == dist.counts && symmetric && fast,
        format!(
            "{} machines, longest halt {} steps, complement-symmetric {symmetric}, {time}",
            dist.machines, dist.longest_halt
        ),
    )
}

fn exact_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = BigRational::zero();
    for t in terms {
        acc += BigRational::from_float(t).unwrap();
    }
    acc.to_f64().unwrap()
}

fn reference_bdm(blocks: impl IntoIterator<Item = BlockKey>, lookup: impl Fn(&BlockKey) -> f64) -> f64 {
    let mut counts: HashMap<BlockKey, u64> = HashMap::new();
    for b in blocks {
        *counts.entry(b).or_default() += 1;
    }
    exact_sum(counts.iter().map(|(b, &n)| (n as f64).log2() + lookup(b)))
}

// 4. BDM equals the direct block-count formula, and doubling a uniform tiling adds one bit.
fn bdm_exactness() -> Outcome {
    let cfg = EstimatorConfig::bundled();
    let strings = bundled_string_table();
    let arrays = bundled_array_table();
    let mut rng = seeded(1004);
    let mut mismatches = 0;
    for i in 0..1000 {
        let p: f64 = rng.random_range(0.0..=1.0);
        let (object, expected) = if i % 2 == 0 {
            let s: Vec<u8> = (0..12 * rng.random_range(1..=30)).map(|_| rng.random_bool(p) as u8).collect();
            let blocks = s.chunks(12).map(BlockKey::string);
            let expected = reference_bdm(blocks, |b| strings.lookup(b).unwrap());
            (BinaryObject::String(s), expected)
        } else {
            let (r, c) = (4 * rng.random_range(1..=8), 4 * rng.random_range(1..=8));
            let m = BitMatrix::from_fn(r, c, |_, _| rng.random_bool(p));
            let blocks = (0..r / 4).flat_map(|i| (0..c / 4).map(move |j| (i, j))).map(|(i, j)| {
                let cells: Vec<u8> = (0..16).map(|k| m.get(4 * i + k / 4, 4 * j + k % 4)).collect();
                BlockKey::from_cells(Shape::Array(4, 4), cells)
            });
            let expected = reference_bdm(blocks.collect::<Vec<_>>(), |b| arrays.lookup(b).unwrap());
            (BinaryObject::Matrix(m), expected)
        };
        if bdm(&object, &cfg).unwrap().to_bits() != expected.to_bits() {
            mismatches += 1;
        }
    }
    let mut doubling = true;
    for k in [1usize, 2, 5, 16] {
        for bit in [0u8, 1] {
            let one = bdm(&BinaryObject::String(vec![bit; 12 * k]), &cfg).unwrap();
            let two = bdm(&BinaryObject::String(vec![bit; 24 * k]), &cfg).unwrap();
            let m1 = bdm(&BinaryObject::Matrix(BitMatrix::from_fn(4 * k, 4, |_, _| bit == 1)), &cfg).unwrap();
            let m2 = bdm(&BinaryObject::Matrix(BitMatrix::from_fn(4 * k, 8, |_, _| bit == 1)), &cfg).unwrap();
            doubling &= two - one == 1.0 && m2 - m1 == 1.0;
        }
    }
    outcome(
        mismatches == 0 && doubling,
        format!("1000 objects, {mismatches} bit mismatches; doubling adds exactly 1 bit: {doubling}"),
    )
}

fn bfs_distances(g: &Graph, s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.node_count()];
    d[s] = 0;
    let mut frontier = vec![s];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in frontier {
            for &w in g.neighbors(v) {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    d
}

fn walks(g: &Graph, t: usize, len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let v = *path.last().unwrap();
    if path.len() - 1 == len {
        if v == t {
            out.push(path.clone());
        }
        return;
    }
    for &w in g.neighbors(v) {
        path.push(w);
        walks(g, t, len, path, out);
        path.pop();
    }
}

/// Node and edge betweenness by listing every shortest path.
fn brute_betweenness(g: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let mut node = vec![0.0; n];
    let mut edge = vec![0.0; g.edge_count()];
    for s in 0..n {
        let d = bfs_distances(g, s);
        for t in (0..n).filter(|&t| t != s && d[t] != usize::MAX) {
            let mut paths = Vec::new();
            walks(g, t, d[t], &mut vec![s], &mut paths);
            let share = 1.0 / paths.len() as f64;
            for p in &paths {
                p[1..p.len() - 1].iter().for_each(|&v| node[v] += share);
                p.windows(2).for_each(|w| edge[g.edge_id(w[0], w[1]).unwrap()] += share);
            }
        }
    }
    if !g.is_directed() {
        node.iter_mut().chain(edge.iter_mut()).for_each(|x| *x /= 2.0);
    }
    (node, edge)
}

// 5. Betweenness, eigenvector centrality and effective resistances against references.
fn metric_oracles() -> Outcome {
    let mut rng = seeded(1005);
    let mut worst_betweenness = 0.0f64;
    for i in 0..200 {
        let n = rng.random_range(2..=10);
        let directed = i % 4 == 3;
        let p: f64 = rng.random_range(0.1..0.9);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && (directed || u < v))
            .collect();
        let edges: Vec<_> = pairs.into_iter().filter(|_| rng.random_bool(p)).collect();
        let g = Graph::new(n, directed, edges).unwrap();
        let (node, edge) = brute_betweenness(&g);
        for (a, b) in betweenness_centrality(&g).iter().zip(&node).chain(edge_betweenness(&g).iter().zip(&edge)) {
            worst_betweenness = worst_betweenness.max((a - b).abs());
        }
    }
    let (mut worst_residual, mut worst_foster, mut graphs) = (0.0f64, 0.0f64, 0);
    while graphs < 50 {
        let n = rng.random_range(3..=40);
        let g = gnm(n, rng.random_range(n - 1..=n * (n - 1) / 2), &mut rng);
        if !connected(&g) {
            continue;
        }
        graphs += 1;
        let x = DMatrix::from_vec(n, 1, eigenvector_centrality(&g).unwrap());
        let a = DMatrix::from_fn(n, n, |i, j| g.has_edge(i, j) as u8 as f64);
        let ax = &a * &x;
        let lambda = x.dot(&ax) / x.dot(&x);
        worst_residual = worst_residual.max((ax - lambda * &x).amax() / x.amax());
        let total: f64 = effective_resistances(&g).unwrap().iter().sum();
        worst_foster = worst_foster.max((total - (n - 1) as f64).abs());
    }
    outcome(
        worst_betweenness <= 1e-9 && worst_residual <= 1e-6 && worst_foster <= 1e-8,
        format!(
            "betweenness max error {worst_betweenness:.1e} (200 graphs), eigenvector residual {worst_residual:.1e}, Foster error {worst_foster:.1e} (50 graphs)"
        ),
    )
}

fn result<'a>(results: &'a [MethodResult], method: &str, target: usize, seed: Option<u64>) -> &'a MethodResult {
    results
        .iter()
        .find(|r| r.method == method && r.target == Some(target) && r.seed == seed)
        .unwrap()
}

fn tv(r: &MethodResult, metric: Metric) -> f64 {
    r.metrics.iter().find(|m| m.metric == metric).unwrap().total_variation
}

// 6. MILS preserves degree and edge-betweenness histograms at least as well as random deletion.
//
// Sweeps may overshoot the target, so the detail line also compares random
// deletion at MILS's actual edge count and the one-at-a-time variant. Only
// the literal comparison decides the outcome.
fn distribution_preservation() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        inputs: Vec::new(),
        generators: (0..20).map(|seed| GeneratorSpec::Er { n: 100, m: 200, seed }).collect(),
        estimator: EstimatorSpec::default(),
        methods: vec![MethodSpec::Mils { mode: Default::default(), epsilon: 0.0 }, MethodSpec::MilsSeq, MethodSpec::Random],
        metrics: vec![Metric::Degree, Metric::EdgeBetweenness],
        schedule: Schedule::Edges(vec![140, 50]),
        seeds: (0..20).collect(),
        output_dir: dir.path().to_path_buf(),
    };
    let report = run_experiment(&cfg, RunOptions { execution: Execution::Parallel, timings: false }).unwrap();
    let mut wins = [0usize; 2];
    let mut seq_wins = [0usize; 2];
    let mut matched_wins = [0usize; 2];
    let mut kept = [Vec::new(), Vec::new()];
    for (input, generator) in report.inputs.iter().zip(&cfg.generators) {
        let g = generator.generate().unwrap();
        for (k, (target, metric)) in [(140, Metric::Degree), (50, Metric::EdgeBetweenness)].into_iter().enumerate() {
            let ours = result(&input.results, "mils", target, None);
            let random: f64 = (0..20).map(|s| tv(result(&input.results, "random", target, Some(s)), metric)).sum::<f64>() / 20.0;
            wins[k] += (tv(ours, metric) <= random) as usize;
            seq_wins[k] += (tv(result(&input.results, "mils-seq", target, None), metric) <= random) as usize;
            let matched: f64 = (0..20).map(|s| metric_tv(&g, &random_deletion(&g, ours.final_edges, s).unwrap(), metric)).sum::<f64>() / 20.0;
            matched_wins[k] += (tv(ours, metric) <= matched) as usize;
            kept[k].push(ours.final_edges);
        }
    }
    let (fast, time) = within(Duration::from_secs(900), started);
    let range = |v: &[usize]| format!("{}..={}", v.iter().min().unwrap(), v.iter().max().unwrap());
    outcome(
        wins.iter().all(|&w| w >= 14) && fast,
        format!(
            "MILS TV <= mean random TV in {}/20 graphs (degree, 60 removed) and {}/20 (edge betweenness, 150 removed), need 14; \
             MILS kept {} and {} edges; against random at MILS's edge count {}/20 and {}/20; one-at-a-time variant {}/20 and {}/20; {time}",
            wins[0],
            wins[1],
            range(&kept[0]),
            range(&kept[1]),
            matched_wins[0],
            matched_wins[1],
            seq_wins[0],
            seq_wins[1]
        ),
    )
}

fn metric_tv(original: &Graph, reduced: &Graph, metric: Metric) -> f64 {
    let base = metric.values(original).unwrap().unwrap();
    let binning = metric.binning(&base);
    total_variation(&binning.histogram(&base), &binning.histogram(&metric.values(reduced).unwrap().unwrap()))
}

// 7. A spanning tree destroys clustering; MILS at 70% of the edges keeps some.
fn spanning_tree_destructiveness() -> Outcome {
    let g = watts_strogatz(60, 6, 0.1, &mut seeded(1007));
    let before = global_clustering(&g).unwrap();
    let tree = global_clustering(&spanning_tree(&g).unwrap().graph).unwrap();
    let cfg = EstimatorConfig::bundled();
    let target = (0.7 * g.edge_count() as f64).round() as usize;
    let reduced = mils(EdgeDeletion::new(g.clone(), &cfg), target, &cfg, NeutralityMode::min_loss(), Execution::Serial).unwrap();
    let after = global_clustering(&reduced.object.graph()).unwrap();
    outcome(
        before >= 0.3 && tree == 0.0 && after > 0.0,
        format!(
            "small world clustering {before:.3}, spanning tree {tree}, MILS at {}/{} edges {after:.3}",
            reduced.final_count(),
            g.edge_count()
        ),
    )
}

fn closure(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut r = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        r[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                r[i][j] |= r[i][k] && r[k][j];
            }
        }
    }
    r
}

// 8. Transitive reduction keeps reachability with no redundant arc.
fn transitive_reduction_oracle() -> Outcome {
    let mut rng = seeded(1008);
    let (mut changed, mut redundant) = (0, 0);
    for _ in 0..100 {
        let g = random_dag(rng.random_range(1..=8), rng.random_range(0.1..0.9), &mut rng);
        let h = transitive_reduction(&g).unwrap();
        let target = closure(&g);
        changed += (closure(&h) != target || h.edges().iter().any(|&(u, v)| !g.has_edge(u, v))) as usize;
        redundant += (0..h.edge_count()).filter(|&id| closure(&h.filter_edges(|e| e != id)) == target).count();
    }
    outcome(
        changed == 0 && redundant == 0,
        format!("100 DAGs, {changed} with changed reachability, {redundant} redundant arcs"),
    )
}

// 9. Spectral sparsifier keeps Laplacian quadratic forms within 1 +- 2 eps.
fn spectral_quadratic_form() -> Outcome {
    let mut rng = seeded(1009);
    let g = loop {
        let g = gnm(50, 400, &mut rng);
        if connected(&g) {
            break g;
        }
    };
    let eps = 0.5;
    let h = spectral_sparsify(&g, eps, 9).unwrap();
    let hits = (0..50)
        .filter(|_| {
            let x: Vec<f64> = (0..50).map(|_| rng.random_range(-1.0..1.0)).collect();
            let orig: f64 = g.edges().iter().map(|&(u, v)| (x[u] - x[v]).powi(2)).sum();
            (1.0 - 2.0 * eps..=1.0 + 2.0 * eps).contains(&(h.quadratic_form(&x) / orig))
        })
        .count();
    outcome(
        hits * 100 >= 95 * 50,
        format!("{hits}/50 test vectors within the bound, {} of {} edges sampled", h.edges.len(), g.edge_count()),
    )
}

// 10. Rule 22 coarse-graining masks background first and keeps most structure.
fn eca_coarse_graining() -> Outcome {
    let started = Instant::now();
    let cfg = EstimatorConfig::bundled();
    let d = evolve(rule_table(22).unwrap(), &single_one(104), 103).unwrap();
    let cg = coarse_grain(&d, 8, 0.6, &cfg, Execution::Parallel).unwrap();
    let r = &cg.regions;
    let first_all_zero = cg.trace[0].deleted.iter().all(|&id| r.is_zero(id));
    let structured: Vec<usize> = (0..r.region_count()).filter(|&id| !r.is_zero(id)).collect();
    let survived = structured.iter().filter(|&&id| !r.is_masked(id)).count();
    let mut sweep_sizes = BTreeMap::new();
    for s in &cg.trace {
        sweep_sizes.insert(s.step, s.deleted.len());
    }
    let (fast, time) = within(Duration::from_secs(120), started);
    outcome(
        first_all_zero && survived * 100 >= 80 * structured.len() && fast,
        format!(
            "first sweep all-zero {first_all_zero}; {survived}/{} structured regions survive (need 80%); sweep sizes {:?}; {time}",
            structured.len(),
            sweep_sizes.values().collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "determinism", determinism),
        (2, "complete-graph collapse", complete_graph_collapse),
        (3, "CTM oracle", ctm_oracle),
        (4, "BDM exactness", bdm_exactness),
        (5, "metric oracles", metric_oracles),
        (6, "distribution preservation", distribution_preservation),
        (7, "spanning-tree destructiveness", spanning_tree_destructiveness),
        (8, "transitive reduction", transitive_reduction_oracle),
        (9, "spectral quadratic form", spectral_quadratic_form),
        (10, "ECA coarse-graining", eca_coarse_graining),
    ];
    let mut unexpected = Vec::new();
    let mut lines = Vec::new();
    for (id, name, check) in criteria {
        let o = check();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as known failure)",
        };
        if o.pass == known {
            unexpected.push(id);
        }
        let line = format!("criterion {id:>2} {tag}: {name}: {}", o.detail);
        println!("{line}");
        lines.push(line);
    }
    if let Ok(path) = std::env::var("ACCEPTANCE_REPORT") {
        fs::write(Path::new(&path), lines.join("\n") + "\n").unwrap();
    }
    let passed = lines.iter().filter(|l| l.contains(" PASS")).count();
    println!("acceptance: {passed} of {} criteria pass, known failures {KNOWN_FAILURES:?}", lines.len());
    if !unexpected.is_empty() {
        eprintln!("criteria with unexpected outcome: {unexpected:?}");
        std::process::exit(1);
    }
}
