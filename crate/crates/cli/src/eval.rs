//! Experiment harness: runs sparsifiers over a deletion schedule and compares
//! metric distributions of each result with those of the original graph.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use mils_core::baselines::{random_deletion, spanning_tree, spectral_sparsify, transitive_reduction};
use mils_core::bdm::EstimatorConfig;
use mils_core::graph::generators::{barabasi_albert, gnm, watts_strogatz};
use mils_core::graph::{betweenness_centrality, edge_betweenness, eigenvector_centrality, local_clustering, Graph};
use mils_core::mils::{mils, mils_sequential, trace_json, EdgeDeletion, Execution, Neutrality, NeutralityMode, TraceStep};
use mils_core::rng::seeded;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimator::EstimatorSpec;

pub const REPORT_SCHEMA: &str = "mils-report/1";
/// Bin count for real-valued metrics.
pub const CONTINUOUS_BINS: usize = 20;

/// Bin boundaries; bin `i` is `[edges[i], edges[i + 1])`, the last bin closed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub edges: Vec<f64>,
}

impl Binning {
    /// Unit bins `[k, k + 1)` for `k = 0..=max`.
    pub fn integer(max: usize) -> Self {
        Binning {
            edges: (0..=max + 1).map(|k| k as f64).collect(),
        }
    }

    /// `bins` equal-width bins over `[lo, hi]`; a degenerate range is widened to `[lo, lo + 1]`.
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Self {
        let hi = if hi > lo { hi } else { lo + 1.0 };
        let w = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * w).collect();
        edges.push(hi);
        Binning { edges }
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// Out-of-range values go to the nearest end bin.
    pub fn bin_of(&self, x: f64) -> usize {
        let i = self.edges.partition_point(|&e| e <= x);
        i.saturating_sub(1).min(self.bins() - 1)
    }

    pub fn histogram(&self, values: &[f64]) -> Vec<u64> {
        let mut counts = vec![0; self.bins()];
        values.iter().for_each(|&x| counts[self.bin_of(x)] += 1);
        counts
    }

    pub fn to_csv(&self, counts: &[u64]) -> String {
        let mut s = String::from("bin_low,bin_high,count\n");
        for (i, c) in counts.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", self.edges[i], self.edges[i + 1], c);
        }
        s
    }
}

/// Totals and the cross-scaled sums `sum |a_i B - b_i A|` and
/// `sum min(a_i B, b_i A)`, exact in integers.
fn cross(a: &[u64], b: &[u64]) -> (u128, u128, u128, u128) {
    let (ta, tb) = (a.iter().map(|&x| x as u128).sum::<u128>(), b.iter().map(|&x| x as u128).sum::<u128>());
    let (mut diff, mut common) = (0u128, 0u128);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as u128 * tb, y as u128 * ta);
        diff += x.abs_diff(y);
        common += x.min(y);
    }
    (ta, tb, diff, common)
}

/// Total variation distance between two histograms on the same bins. Two
/// empty histograms are at distance 0, an empty and a non-empty one at 1.
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    match cross(a, b) {
        (0, 0, _, _) => 0.0,
        (0, _, _, _) | (_, 0, _, _) => 1.0,
        (ta, tb, diff, _) => diff as f64 / (2 * ta * tb) as f64,
    }
}

/// Shared area of the two normalised histograms, `1 - TV`.
pub fn histogram_intersection(a: &[u64], b: &[u64]) -> f64 {
    match cross(a, b) {
        (0, 0, _, _) => 1.0,
        (0, _, _, _) | (_, 0, _, _) => 0.0,
        (ta, tb, _, common) => common as f64 / (ta * tb) as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Degree,
    Clustering,
    Betweenness,
    EdgeBetweenness,
    Eigenvector,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Degree => "degree",
            Metric::Clustering => "clustering",
            Metric::Betweenness => "betweenness",
            Metric::EdgeBetweenness => "edge-betweenness",
            Metric::Eigenvector => "eigenvector",
        }
    }

    /// Values for every node (every edge for edge betweenness); `None` when
    /// the metric is undefined for directed graphs.
    pub fn values(self, g: &Graph) -> Result<Option<Vec<f64>>> {
        Ok(Some(match self {
            Metric::Degree => g.degrees().into_iter().map(|d| d as f64).collect(),
            Metric::Betweenness => betweenness_centrality(g),
            Metric::EdgeBetweenness => edge_betweenness(g),
            Metric::Clustering if g.is_directed() => return Ok(None),
            Metric::Eigenvector if g.is_directed() => return Ok(None),
            Metric::Clustering => local_clustering(g)?,
            Metric::Eigenvector => eigenvector_centrality(g)?,
        }))
    }

    /// Binning fixed by the original graph.
    pub fn binning(self, original: &[f64]) -> Binning {
        match self {
            Metric::Degree => Binning::integer(original.iter().copied().fold(0.0, f64::max) as usize),
            _ => {
                let lo = original.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = original.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if lo.is_finite() {
                    Binning::uniform(lo, hi, CONTINUOUS_BINS)
                } else {
                    Binning::uniform(0.0, 1.0, CONTINUOUS_BINS)
                }
            }
        }
    }
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Degree, Metric::Clustering, Metric::Betweenness, Metric::EdgeBetweenness, Metric::Eigenvector]
}

/// Seeded synthetic graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// G(n, M).
    Er { n: usize, m: usize, seed: u64 },
    /// Watts–Strogatz ring of `k` neighbours with rewiring probability `p`.
    Ws { n: usize, k: usize, p: f64, seed: u64 },
    /// Barabási–Albert with `m` edges per new node.
    Ba { n: usize, m: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn name(&self) -> String {
        match self {
            GeneratorSpec::Er { n, m, seed } => format!("er-n{n}-m{m}-s{seed}"),
            GeneratorSpec::Ws { n, k, p, seed } => format!("ws-n{n}-k{k}-p{p}-s{seed}"),
            GeneratorSpec::Ba { n, m, seed } => format!("ba-n{n}-m{m}-s{seed}"),
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        Ok(match *self {
            GeneratorSpec::Er { n, m, seed } => {
                ensure!(m <= n * n.saturating_sub(1) / 2, "G({n}, {m}) has too many edges");
                gnm(n, m, &mut seeded(seed))
            }
            GeneratorSpec::Ws { n, k, p, seed } => {
                ensure!(k.is_multiple_of(2) && k < n && (0.0..=1.0).contains(&p), "invalid small-world parameters");
                watts_strogatz(n, k, p, &mut seeded(seed))
            }
            GeneratorSpec::Ba { n, m, seed } => {
                ensure!(m >= 1 && m < n, "invalid scale-free parameters");
                barabasi_albert(n, m, &mut seeded(seed))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodSpec {
    Mils {
        #[serde(default)]
        mode: Neutrality,
        #[serde(default)]
        epsilon: f64,
    },
    MilsSeq,
    Random,
    SpanningTree,
    Transitive,
    Spectral { epsilon: f64 },
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Mils { .. } => "mils",
            MethodSpec::MilsSeq => "mils-seq",
            MethodSpec::Random => "random",
            MethodSpec::SpanningTree => "spanning-tree",
            MethodSpec::Transitive => "transitive",
            MethodSpec::Spectral { .. } => "spectral",
        }
    }

    fn seeded(&self) -> bool {
        matches!(self, MethodSpec::Random | MethodSpec::Spectral { .. })
    }

    /// Whether the result depends on the schedule's target edge count.
    fn scheduled(&self) -> bool {
        matches!(self, MethodSpec::Mils { .. } | MethodSpec::MilsSeq | MethodSpec::Random)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Target edge counts.
    Edges(Vec<usize>),
    /// Target fractions of the original edge count, rounded to the nearest edge.
    Fractions(Vec<f64>),
}

impl Schedule {
    pub fn targets(&self, edges: usize) -> Result<Vec<usize>> {
        let t: Vec<usize> = match self {
            Schedule::Edges(v) => v.clone(),
            Schedule::Fractions(f) => {
                ensure!(f.iter().all(|x| (0.0..=1.0).contains(x)), "schedule fractions must lie in [0, 1]");
                f.iter().map(|x| (x * edges as f64).round() as usize).collect()
            }
        };
        ensure!(!t.is_empty(), "schedule is empty");
        ensure!(t.windows(2).all(|w| w[0] > w[1]), "schedule must strictly decrease, got {t:?}");
        ensure!(t[0] <= edges, "schedule target {} exceeds the {edges} edges present", t[0]);
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Edge-list files.
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub estimator: EstimatorSpec,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    pub schedule: Schedule,
    /// Seeds for the stochastic methods; one result per seed.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl ExperimentConfig {
    /// Parses a config; relative paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: ExperimentConfig = serde_json::from_str(text).context("parsing experiment config")?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.inputs.iter_mut().for_each(resolve);
        cfg.estimator.tables.iter_mut().for_each(resolve);
        resolve(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.inputs.is_empty() || !self.generators.is_empty(), "no inputs or generators configured");
        ensure!(!self.methods.is_empty(), "no methods configured");
        ensure!(!self.metrics.is_empty(), "no metrics configured");
        ensure!(!self.seeds.is_empty(), "no seeds configured");
        for p in self.inputs.iter().chain(&self.estimator.tables) {
            if !p.is_file() {
                bail!("input file not found: {}", p.display());
            }
        }
        for m in &self.methods {
            if let MethodSpec::Spectral { epsilon } = m {
                ensure!(*epsilon > 0.0 && *epsilon < 1.0, "spectral epsilon must lie in (0, 1)");
            }
            if let MethodSpec::Mils { epsilon, .. } = m {
                ensure!(*epsilon >= 0.0, "mils epsilon must be non-negative");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricHistogram {
    pub metric: Metric,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: Metric,
    pub counts: Vec<u64>,
    pub total_variation: f64,
    pub intersection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub seed: Option<u64>,
    /// Target edge count; `None` for methods that ignore the schedule.
    pub target: Option<usize>,
    pub final_edges: usize,
    pub steps: Option<usize>,
    /// Trace file, relative to the output directory.
    pub trace: Option<String>,
    /// Weighted output reduced to edge presence before measuring.
    pub coerced_unweighted: bool,
    pub spanning_forest: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
    pub metrics: Vec<MetricScore>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputReport {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub directed: bool,
    pub schedule: Vec<usize>,
    pub original: Vec<MetricHistogram>,
    pub results: Vec<MethodResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsifyReport {
    pub schema: String,
    pub estimator: Vec<String>,
    pub binning: BinningNote,
    pub inputs: Vec<InputReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningNote {
    pub degree: String,
    pub continuous: String,
}

impl Default for BinningNote {
    fn default() -> Self {
        BinningNote {
            degree: "unit bins 0..=max degree of the original graph".into(),
            continuous: format!("{CONTINUOUS_BINS} equal-width bins over the original graph's range; out-of-range values go to the end bins"),
        }
    }
}

struct Baseline {
    metric: Metric,
    binning: Binning,
    counts: Vec<u64>,
}

fn score(g: &Graph, base: &[Baseline]) -> Result<Vec<MetricScore>> {
    let mut out = Vec::new();
    for b in base {
        let values = b.metric.values(g)?.expect("metric defined for the original is defined for subgraphs");
        let counts = b.binning.histogram(&values);
        out.push(MetricScore {
            metric: b.metric,
            total_variation: total_variation(&b.counts, &counts),
            intersection: histogram_intersection(&b.counts, &counts),
            counts,
        });
    }
    Ok(out)
}

/// One produced graph before scoring.
struct Produced {
    method: MethodSpec,
    seed: Option<u64>,
    target: Option<usize>,
    graph: Graph,
    trace: Option<Vec<TraceStep>>,
    coerced: bool,
    forest: bool,
    runtime_ms: f64,
}

fn run_method(g: &Graph, method: MethodSpec, seed: u64, targets: &[usize], est: &EstimatorConfig, exec: Execution) -> Result<Vec<Produced>> {
    let started = Instant::now();
    let elapsed = |t: Instant| t.elapsed().as_secs_f64() * 1e3;
    let seed_opt = method.seeded().then_some(seed);
    let mut out = Vec::new();
    match method {
        MethodSpec::Mils { .. } | MethodSpec::MilsSeq => {
            let mut object = EdgeDeletion::new(g.clone(), est);
            let mut trace = Vec::new();
            for &t in targets {
                let t0 = Instant::now();
                let step = match method {
                    MethodSpec::Mils { mode, epsilon } => mils(
                        object,
                        t.min(trace_count(g, &trace)),
                        est,
                        NeutralityMode { neutrality: mode, epsilon },
                        exec,
                    )?,
                    _ => mils_sequential(object, t.min(trace_count(g, &trace)), est, exec)?,
                };
                let offset = trace.len();
                trace.extend(step.trace.into_iter().map(|mut s| {
                    s.step += offset;
                    s
                }));
                object = step.object;
                out.push(Produced {
                    method,
                    seed: None,
                    target: Some(t),
                    graph: object.graph(),
                    trace: Some(trace.clone()),
                    coerced: false,
                    forest: false,
                    runtime_ms: elapsed(t0),
                });
            }
        }
        MethodSpec::Random => {
            for &t in targets {
                let t0 = Instant::now();
                let h = random_deletion(g, t, seed)?;
                out.push(Produced {
                    method,
                    seed: seed_opt,
                    target: Some(t),
                    graph: h,
                    trace: None,
                    coerced: false,
                    forest: false,
                    runtime_ms: elapsed(t0),
                });
            }
        }
        MethodSpec::SpanningTree | MethodSpec::Transitive | MethodSpec::Spectral { .. } => {
            let (graph, coerced, forest) = match method {
                MethodSpec::SpanningTree => {
                    let t = spanning_tree(g)?;
                    (t.graph, false, t.is_forest)
                }
                MethodSpec::Transitive => (transitive_reduction(g)?, false, false),
                MethodSpec::Spectral { epsilon } => (spectral_sparsify(g, epsilon, seed)?.topology(g.labels().to_vec()), true, false),
                _ => unreachable!(),
            };
            out.push(Produced {
                method,
                seed: seed_opt,
                target: None,
                graph,
                trace: None,
                coerced,
                forest,
                runtime_ms: elapsed(started),
            });
        }
    }
    Ok(out)
}

/// Edges left after a cumulative trace.
fn trace_count(g: &Graph, trace: &[TraceStep]) -> usize {
    g.edge_count() - trace.iter().map(|s| s.deleted.len()).sum::<usize>()
}

/// Options that do not change the report's scientific content.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub execution: Execution,
    /// Record wall-clock runtimes (breaks byte-reproducibility of the report).
    pub timings: bool,
}

fn file_stem_name(p: &Path) -> String {
    p.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

/// Runs an experiment and writes `report.json`, CSV histograms and traces
/// under the output directory.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<SparsifyReport> {
    cfg.validate()?;
    let est = cfg.estimator.build()?;
    let mut graphs: Vec<(String, Graph)> = Vec::new();
    for p in &cfg.inputs {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let g = Graph::from_edge_list(&text).with_context(|| format!("parsing {}", p.display()))?;
        graphs.push((file_stem_name(p), g));
    }
    for spec in &cfg.generators {
        graphs.push((spec.name(), spec.generate()?));
    }
    let mut names: Vec<&String> = graphs.iter().map(|(n, _)| n).collect();
    names.sort();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        bail!("two inputs share the name {}", w[0]);
    }

    let inputs: Vec<(InputReport, Vec<(String, String)>)> =
        graphs.par_iter().map(|(name, g)| run_input(name, g, cfg, &est, opts)).collect::<Result<_>>()?;

    let out = &cfg.output_dir;
    let mut report = SparsifyReport {
        schema: REPORT_SCHEMA.into(),
        estimator: EstimatorSpec::describe(&est),
        binning: BinningNote::default(),
        inputs: Vec::new(),
    };
    for (input, files) in inputs {
        for (rel, text) in files {
            let path = out.join(&rel);
            fs::create_dir_all(path.parent().expect("file paths have a parent"))?;
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        report.inputs.push(input);
    }
    fs::create_dir_all(out)?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(out.join("report.json"), json)?;
    Ok(report)
}

fn run_input(name: &str, g: &Graph, cfg: &ExperimentConfig, est: &EstimatorConfig, opts: RunOptions) -> Result<(InputReport, Vec<(String, String)>)> {
    let targets = cfg.schedule.targets(g.edge_count()).with_context(|| format!("input {name}"))?;
    let mut files = Vec::new();
    let mut base = Vec::new();
    let mut original = Vec::new();
    for &metric in &cfg.metrics {
        let Some(values) = metric.values(g)? else { continue };
        let binning = metric.binning(&values);
        let counts = binning.histogram(&values);
        files.push((format!("{name}/histograms/original-{}.csv", metric.name()), binning.to_csv(&counts)));
        original.push(MetricHistogram {
            metric,
            edges: binning.edges.clone(),
            counts: counts.clone(),
        });
        base.push(Baseline { metric, binning, counts });
    }

    let mut results = Vec::new();
    for &method in &cfg.methods {
        let seeds: &[u64] = if method.seeded() { &cfg.seeds } else { &cfg.seeds[..1] };
        for &seed in seeds {
            let produced = match run_method(g, method, seed, &targets, est, opts.execution) {
                Ok(p) => p,
                Err(e) => {
                    // inapplicable methods (e.g. transitive reduction of an undirected graph) are reported, not fatal
                    results.push(MethodResult {
                        method: method.name().into(),
                        seed: method.seeded().then_some(seed),
                        target: None,
                        final_edges: 0,
                        steps: None,
                        trace: None,
                        coerced_unweighted: false,
                        spanning_forest: false,
                        runtime_ms: None,
                        metrics: Vec::new(),
                        error: Some(format!("{e:#}")),
                    });
                    continue;
                }
            };
            for p in produced {
                let mut label = p.method.name().to_string();
                if let Some(s) = p.seed {
                    let _ = write!(label, "-s{s}");
                }
                if let (Some(t), true) = (p.target, p.method.scheduled()) {
                    let _ = write!(label, "-t{t}");
                }
                let metrics = score(&p.graph, &base)?;
                for m in &metrics {
                    let b = base.iter().find(|b| b.metric == m.metric).expect("scored metrics come from the baseline");
                    files.push((format!("{name}/histograms/{label}-{}.csv", m.metric.name()), b.binning.to_csv(&m.counts)));
                }
                let trace_file = p.trace.as_ref().map(|t| {
                    let rel = format!("{name}/traces/{label}.json");
                    files.push((rel.clone(), trace_json(t)));
                    rel
                });
                results.push(MethodResult {
                    method: p.method.name().into(),
                    seed: p.seed,
                    target: p.target,
                    final_edges: p.graph.edge_count(),
                    steps: p.trace.as_ref().map(Vec::len),
                    trace: trace_file,
                    coerced_unweighted: p.coerced,
                    spanning_forest: p.forest,
                    runtime_ms: opts.timings.then_some(p.runtime_ms),
                    metrics,
                    error: None,
                });
            }
        }
    }
    Ok((
        InputReport {
            name: name.into(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            directed: g.is_directed(),
            schedule: targets,
            original,
            results,
        },
        files,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_edges_and_clamping() {
        let b = Binning::integer(3);
        assert_eq!(b.bins(), 4);
        assert_eq!(b.histogram(&[0.0, 1.0, 1.0, 3.0, 7.0]), vec![1, 2, 0, 2]);
        let u = Binning::uniform(0.0, 10.0, 20);
        assert_eq!(u.bin_of(10.0), 19);
        assert_eq!(u.bin_of(-1.0), 0);
        assert_eq!(u.bin_of(0.5), 1);
        let flat = Binning::uniform(2.0, 2.0, 20);
        assert_eq!(flat.bin_of(2.0), 0);
    }

    #[test]
    fn divergence_scores() {
        assert_eq!(total_variation(&[1, 2, 3], &[2, 4, 6]), 0.0);
        assert_eq!(histogram_intersection(&[1, 2, 3], &[2, 4, 6]), 1.0);
        assert_eq!(total_variation(&[1, 0], &[0, 1]), 1.0);
        assert_eq!(histogram_intersection(&[1, 0], &[0, 1]), 0.0);
        assert!((total_variation(&[1, 1], &[1, 0]) - 0.5).abs() < 1e-15);
        assert_eq!(total_variation(&[0, 0], &[0, 0]), 0.0);
        assert_eq!(total_variation(&[0, 0], &[0, 1]), 1.0);
    }

    #[test]
    fn csv_header() {
        let b = Binning::integer(1);
        assert_eq!(b.to_csv(&[3, 4]), "bin_low,bin_high,count\n0,1,3\n1,2,4\n");
    }

    #[test]
    fn schedules() {
        assert_eq!(Schedule::Fractions(vec![1.0, 0.7]).targets(200).unwrap(), vec![200, 140]);
        assert!(Schedule::Edges(vec![140, 140]).targets(200).is_err());
        assert!(Schedule::Edges(vec![201]).targets(200).is_err());
    }

    #[test]
    fn config_parsing() {
        let text = r#"{
            "generators": [{"model": "er", "n": 20, "m": 30, "seed": 1}],
            "methods": [{"method": "mils"}, {"method": "random"}, {"method": "spectral", "epsilon": 0.5}],
            "schedule": {"edges": [30, 20]},
            "output_dir": "out"
        }"#;
        let cfg = ExperimentConfig::from_json(text, Path::new("/tmp/x")).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("/tmp/x/out"));
        assert_eq!(cfg.methods[0], MethodSpec::Mils { mode: Neutrality::MinLoss, epsilon: 0.0 });
        assert_eq!(cfg.metrics.len(), 5);
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#, Path::new(".")).is_err());
    }
}
