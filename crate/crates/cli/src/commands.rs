//! Subcommand implementations. Each returns the text printed on stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mils_core::baselines::{random_deletion, spanning_tree, spectral_sparsify, transitive_reduction};
use mils_core::bdm::{complexity as estimate, BinaryObject, Method};
use mils_core::ctm::{build_ctm_table, enumerate_machines, BlankTape, MachineSpec, MissingPolicy};
use mils_core::eca::{coarse_grain, evolve, rule_table, single_one, to_pbm, SpacetimeDiagram};
use mils_core::graph::Graph;
use mils_core::mils::{mils, mils_sequential, EdgeDeletion, Execution, Neutrality, NeutralityMode};
use serde::Serialize;

use crate::estimator::EstimatorSpec;
use crate::eval::{run_experiment, ExperimentConfig, RunOptions};
use crate::UsageError;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn ctm_gen(states: u32, max_steps: u64, blank: BlankTape, out: &Path) -> Result<String> {
    let spec = MachineSpec::new(states).map_err(|e| UsageError(e.to_string()))?;
    let dist = enumerate_machines(spec, max_steps, blank).map_err(|e| UsageError(e.to_string()))?;
    let table = build_ctm_table(&dist)?;
    table.save(out)?;
    Ok(format!(
        "{} machines, {} of {} runs halted (longest {} steps), {} distinct outputs written to {}\n",
        dist.machines,
        dist.halting,
        dist.runs,
        dist.longest_halt,
        table.len(),
        out.display()
    ))
}

pub fn complexity(input: &Path, method: Method, tables: Vec<PathBuf>, missing: MissingPolicy) -> Result<String> {
    let object = BinaryObject::parse(&read(input)?).with_context(|| format!("parsing {}", input.display()))?;
    let cfg = EstimatorSpec { method, tables, missing }.build()?;
    let bits = estimate(&object, &cfg)?;
    Ok(format!("{bits:.6}\n"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsifyMethod {
    Mils,
    MilsSeq,
    Random,
    SpanningTree,
    Transitive,
    Spectral,
}

#[derive(Debug, Clone)]
pub struct SparsifyArgs {
    pub graph: PathBuf,
    pub method: SparsifyMethod,
    pub target: Option<usize>,
    pub mode: Neutrality,
    pub tie_epsilon: f64,
    pub seed: u64,
    pub epsilon: f64,
    pub out: PathBuf,
    pub estimator: EstimatorSpec,
    pub execution: Execution,
}

/// Writes `edges.txt`, plus `trace.json` for the MILS methods and
/// `weights.csv` for the spectral sparsifier.
pub fn sparsify(a: &SparsifyArgs) -> Result<String> {
    let g = Graph::from_edge_list(&read(&a.graph)?).with_context(|| format!("parsing {}", a.graph.display()))?;
    let need_target = || -> Result<usize> {
        let t = a.target.ok_or_else(|| UsageError("--target is required for this method".into()))?;
        if t > g.edge_count() {
            return Err(UsageError(format!("target {t} exceeds the {} edges of {}", g.edge_count(), a.graph.display())).into());
        }
        Ok(t)
    };
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let mut summary = String::new();
    let reduced = match a.method {
        SparsifyMethod::Mils | SparsifyMethod::MilsSeq => {
            let target = need_target()?;
            let cfg = a.estimator.build()?;
            let object = EdgeDeletion::new(g.clone(), &cfg);
            let out = if a.method == SparsifyMethod::Mils {
                let mode = NeutralityMode {
                    neutrality: a.mode,
                    epsilon: a.tie_epsilon,
                };
                mils(object, target, &cfg, mode, a.execution)?
            } else {
                mils_sequential(object, target, &cfg, a.execution)?
            };
            write(&a.out.join("trace.json"), &out.trace_json())?;
            let _ = write!(summary, "{} steps, ", out.trace.len());
            out.object.graph()
        }
        SparsifyMethod::Random => random_deletion(&g, need_target()?, a.seed)?,
        SparsifyMethod::SpanningTree => {
            let t = spanning_tree(&g)?;
            if t.is_forest {
                summary.push_str("input disconnected, spanning forest returned; ");
            }
            t.graph
        }
        SparsifyMethod::Transitive => transitive_reduction(&g)?,
        SparsifyMethod::Spectral => {
            let h = spectral_sparsify(&g, a.epsilon, a.seed)?;
            let mut csv = String::from("u,v,weight\n");
            for (&(u, v), w) in h.edges.iter().zip(&h.weights) {
                let _ = writeln!(csv, "{},{},{}", g.labels()[u], g.labels()[v], w);
            }
            write(&a.out.join("weights.csv"), &csv)?;
            summary.push_str("weights in weights.csv, edges.txt holds the unweighted support; ");
            h.topology(g.labels().to_vec())
        }
    };
    write(&a.out.join("edges.txt"), &reduced.to_edge_list())?;
    let _ = writeln!(summary, "{} of {} edges kept", reduced.edge_count(), g.edge_count());
    Ok(summary)
}

pub fn evaluate(config: &Path, opts: RunOptions) -> Result<String> {
    let base = config.parent().unwrap_or(Path::new("."));
    let cfg = ExperimentConfig::from_json(&read(config)?, base)?;
    let report = run_experiment(&cfg, opts)?;
    let results: usize = report.inputs.iter().map(|i| i.results.len()).sum();
    Ok(format!(
        "{} inputs, {results} results; report written to {}\n",
        report.inputs.len(),
        cfg.output_dir.join("report.json").display()
    ))
}

#[derive(Serialize)]
struct RegionReport<'a> {
    rule: u8,
    width: usize,
    steps: usize,
    region_size: usize,
    retain: f64,
    grid: (usize, usize),
    regions: usize,
    target: usize,
    masked: Vec<usize>,
    trace: &'a [mils_core::mils::TraceStep],
    rankings: &'a [mils_core::mils::InfoRanking],
}

/// Writes `diagram.pbm` and `mask.pbm`, plus `regions.json` when coarse-graining.
pub fn eca(rule: u32, width: usize, steps: usize, coarse: Option<(usize, f64)>, estimator: &EstimatorSpec, execution: Execution, out: &Path) -> Result<String> {
    let rule = rule_table(rule).map_err(|e| UsageError(e.to_string()))?;
    let diagram = evolve(rule, &single_one(width), steps).map_err(|e| UsageError(e.to_string()))?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let (result, note): (SpacetimeDiagram, String) = match coarse {
        None => (diagram, String::new()),
        Some((size, retain)) => {
            let cfg = estimator.build()?;
            let cg = coarse_grain(&diagram, size, retain, &cfg, execution).map_err(|e| match e {
                mils_core::eca::EcaError::IncompatibleRegion { .. } | mils_core::eca::EcaError::InvalidRetain(_) => UsageError(e.to_string()).into(),
                other => anyhow::Error::from(other),
            })?;
            let masked: Vec<usize> = (0..cg.regions.region_count()).filter(|&i| cg.regions.is_masked(i)).collect();
            let report = RegionReport {
                rule: rule.number(),
                width,
                steps,
                region_size: size,
                retain,
                grid: cg.regions.grid(),
                regions: cg.regions.region_count(),
                target: cg.target,
                masked: masked.clone(),
                trace: &cg.trace,
                rankings: &cg.rankings,
            };
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            write(&out.join("regions.json"), &json)?;
            let note = format!("{} of {} regions masked in {} sweeps; ", masked.len(), cg.regions.region_count(), cg.trace.len());
            (cg.diagram, note)
        }
    };
    write(&out.join("diagram.pbm"), &to_pbm(&result.cells))?;
    write(&out.join("mask.pbm"), &to_pbm(&result.mask))?;
    Ok(format!("{note}{}x{} diagram written to {}\n", result.cells.rows(), result.cells.cols(), out.display()))
}
