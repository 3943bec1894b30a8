use std::borrow::Cow;

use super::{Execution, Perturbable};
use crate::bdm::{complexity, value_of_multiset, BdmError, BinaryObject, EstimatorConfig, MultisetScorer, TiledMatrix};
use crate::graph::Graph;
use rayon::prelude::*;

/// Edge deletion on a graph. The node set and adjacency dimensions stay
/// fixed; element ids are the original edge ids.
#[derive(Debug, Clone)]
pub struct EdgeDeletion {
    original: Graph,
    alive: Vec<bool>,
    tiled: TiledMatrix,
    array_block: usize,
    boundary: crate::bdm::BoundaryPolicy,
}

impl EdgeDeletion {
    /// Tiles the adjacency matrix with the block layout of `cfg`, which
    /// makes contribution sweeps under that layout incremental.
    pub fn new(graph: Graph, cfg: &EstimatorConfig) -> Self {
        let tiled = TiledMatrix::new(graph.adjacency(), cfg.array_block, cfg.boundary);
        EdgeDeletion {
            alive: vec![true; graph.edge_count()],
            original: graph,
            tiled,
            array_block: cfg.array_block,
            boundary: cfg.boundary,
        }
    }

    pub fn original(&self) -> &Graph {
        &self.original
    }

    /// The current graph. Its edge ids are renumbered; use
    /// [`EdgeDeletion::element_ids`] for the original ones.
    pub fn graph(&self) -> Graph {
        self.original.filter_edges(|id| self.alive[id])
    }

    pub fn is_alive(&self, id: usize) -> bool {
        self.alive[id]
    }

    fn cells(&self, id: usize) -> [(usize, usize, u8); 2] {
        let (u, v) = self.original.edges()[id];
        if self.original.is_directed() {
            [(u, v, 0), (u, v, 0)]
        } else {
            [(u, v, 0), (v, u, 0)]
        }
    }

    fn edits(&self, ids: &[usize]) -> Vec<(usize, usize, u8)> {
        ids.iter().flat_map(|&id| self.cells(id)).collect()
    }

    fn tiled_for(&self, cfg: &EstimatorConfig) -> Cow<'_, TiledMatrix> {
        if cfg.array_block == self.array_block && cfg.boundary == self.boundary {
            Cow::Borrowed(&self.tiled)
        } else {
            Cow::Owned(TiledMatrix::new(self.tiled.matrix().clone(), cfg.array_block, cfg.boundary))
        }
    }
}

impl Perturbable for EdgeDeletion {
    fn element_ids(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    fn element_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    fn complexity(&self, cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        cfg.validate()?;
        value_of_multiset(self.tiled_for(cfg).multiset(), cfg)
    }

    fn complexity_without(&self, ids: &[usize], cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        cfg.validate()?;
        let tiled = self.tiled_for(cfg);
        let scorer = MultisetScorer::new(tiled.multiset(), cfg)?;
        scorer.value_with(&tiled.cell_changes(&self.edits(ids)))
    }

    fn contributions(&self, cfg: &EstimatorConfig, exec: Execution) -> Result<Vec<(usize, f64)>, BdmError> {
        cfg.validate()?;
        let tiled = self.tiled_for(cfg);
        let scorer = MultisetScorer::new(tiled.multiset(), cfg)?;
        let base = scorer.value();
        let ids = self.element_ids();
        let one = |&id: &usize| scorer.value_with(&tiled.cell_changes(&self.cells(id))).map(|c| (id, base - c));
        match exec {
            Execution::Serial => ids.iter().map(one).collect(),
            Execution::Parallel => ids.par_iter().map(one).collect(),
        }
    }

    fn remove(&mut self, ids: &[usize]) {
        let edits: Vec<_> = ids.iter().filter(|&&id| self.alive[id]).flat_map(|&id| self.cells(id)).collect();
        self.tiled.set_cells(&edits);
        for &id in ids {
            self.alive[id] = false;
        }
    }
}

/// Node deletion on a graph: a deleted node loses its row and column.
/// Element ids are the original node indices.
#[derive(Debug, Clone)]
pub struct NodeDeletion {
    original: Graph,
    alive: Vec<bool>,
}

impl NodeDeletion {
    pub fn new(graph: Graph) -> Self {
        NodeDeletion {
            alive: vec![true; graph.node_count()],
            original: graph,
        }
    }

    pub fn original(&self) -> &Graph {
        &self.original
    }

    /// The induced subgraph on the surviving nodes, re-indexed; labels kept.
    pub fn graph(&self) -> Graph {
        self.original.induced(|v| self.alive[v])
    }

    fn value_of(g: &Graph, cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        if g.node_count() == 0 {
            return Ok(0.0);
        }
        complexity(&BinaryObject::Matrix(g.adjacency()), cfg)
    }
}

impl Perturbable for NodeDeletion {
    fn element_ids(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    fn complexity(&self, cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        Self::value_of(&self.graph(), cfg)
    }

    fn complexity_without(&self, ids: &[usize], cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        let g = self.original.induced(|v| self.alive[v] && !ids.contains(&v));
        Self::value_of(&g, cfg)
    }

    fn remove(&mut self, ids: &[usize]) {
        for &id in ids {
            self.alive[id] = false;
        }
    }
}
