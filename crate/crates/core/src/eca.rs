//! Elementary cellular automata and region coarse-graining of their
//! space-time diagrams.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bdm::{value_of_multiset, BdmError, BitMatrix, EstimatorConfig, MultisetScorer, TiledMatrix};
use crate::mils::{mils, Execution, InfoRanking, MilsError, NeutralityMode, Perturbable, TraceStep};

#[derive(Debug, Error)]
pub enum EcaError {
    #[error("rule {0} outside 0..=255")]
    InvalidRule(u32),
    #[error("width {0} is below the minimum of 3")]
    TooNarrow(usize),
    #[error(
        "region size {size} does not fit a {rows}x{cols} diagram with {block}x{block} blocks; \
         crop to {crop_rows}x{crop_cols} (size must be a multiple of {block} dividing both dimensions)"
    )]
    IncompatibleRegion {
        size: usize,
        block: usize,
        rows: usize,
        cols: usize,
        crop_rows: usize,
        crop_cols: usize,
    },
    #[error("retained fraction must lie in (0, 1], got {0}")]
    InvalidRetain(f64),
    #[error(transparent)]
    Mils(#[from] MilsError),
}

/// Wolfram-numbered radius-1 rule: neighbourhood `(l, c, r)` maps to bit
/// `4l + 2c + r` of the rule number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EcaRule {
    number: u8,
}

impl EcaRule {
    pub fn new(number: u32) -> Result<Self, EcaError> {
        u8::try_from(number).map(|number| EcaRule { number }).map_err(|_| EcaError::InvalidRule(number))
    }

    pub fn number(&self) -> u8 {
        self.number
    }

    pub fn apply(&self, l: u8, c: u8, r: u8) -> u8 {
        (self.number >> (4 * l + 2 * c + r)) & 1
    }

    /// Outputs for neighbourhoods `111, 110, ..., 000`.
    pub fn outputs(&self) -> [u8; 8] {
        std::array::from_fn(|i| (self.number >> (7 - i)) & 1)
    }

    /// The rule obtained by exchanging left and right.
    pub fn mirrored(&self) -> EcaRule {
        let mut n = 0u8;
        for k in 0..8u8 {
            let (l, c, r) = (k >> 2 & 1, k >> 1 & 1, k & 1);
            n |= self.apply(r, c, l) << k;
        }
        EcaRule { number: n }
    }
}

pub fn rule_table(number: u32) -> Result<EcaRule, EcaError> {
    EcaRule::new(number)
}

/// Row of `width` zeros with a single 1 at `width / 2`.
pub fn single_one(width: usize) -> Vec<u8> {
    let mut row = vec![0; width];
    if width > 0 {
        row[width / 2] = 1;
    }
    row
}

/// Space-time diagram (row `t` is time step `t`) with a mask of omitted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacetimeDiagram {
    pub cells: BitMatrix,
    pub mask: BitMatrix,
}

impl SpacetimeDiagram {
    pub fn new(cells: BitMatrix) -> Self {
        let mask = BitMatrix::zeros(cells.rows(), cells.cols());
        SpacetimeDiagram { cells, mask }
    }

    pub fn masked_cells(&self) -> usize {
        self.mask.count_ones()
    }

    /// Cells cropped to the top-left `rows x cols` corner.
    pub fn cropped(&self, rows: usize, cols: usize) -> SpacetimeDiagram {
        SpacetimeDiagram {
            cells: BitMatrix::from_fn(rows, cols, |r, c| self.cells.get(r, c) == 1),
            mask: BitMatrix::from_fn(rows, cols, |r, c| self.mask.get(r, c) == 1),
        }
    }
}

/// `steps + 1` rows under cyclic boundaries.
pub fn evolve(rule: EcaRule, initial: &[u8], steps: usize) -> Result<SpacetimeDiagram, EcaError> {
    let w = initial.len();
    if w < 3 {
        return Err(EcaError::TooNarrow(w));
    }
    let mut rows = vec![initial.iter().map(|&b| b & 1).collect::<Vec<u8>>()];
    for _ in 0..steps {
        let prev = rows.last().expect("at least the initial row");
        let next = (0..w).map(|i| rule.apply(prev[(i + w - 1) % w], prev[i], prev[(i + 1) % w])).collect();
        rows.push(next);
    }
    Ok(SpacetimeDiagram::new(BitMatrix::from_fn(rows.len(), w, |r, c| rows[r][c] == 1)))
}

/// Plain PBM (`P1`), lines of at most 70 characters.
pub fn to_pbm(m: &BitMatrix) -> String {
    let mut s = format!("P1\n{} {}\n", m.cols(), m.rows());
    for r in 0..m.rows() {
        let mut line = String::new();
        for &b in m.row(r) {
            if line.len() + 2 > 70 {
                s.push_str(line.trim_end());
                s.push('\n');
                line.clear();
            }
            let _ = write!(line, "{b} ");
        }
        s.push_str(line.trim_end());
        s.push('\n');
    }
    s
}

/// Square `size x size` regions of a diagram, masked by dropping their
/// blocks from the decomposition. Region ids run row-major.
#[derive(Debug, Clone)]
pub struct RegionMasking {
    tiled: TiledMatrix,
    size: usize,
    grid_cols: usize,
    region_rects: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl RegionMasking {
    pub fn new(cells: BitMatrix, size: usize, cfg: &EstimatorConfig) -> Result<Self, EcaError> {
        let (rows, cols, d) = (cells.rows(), cells.cols(), cfg.array_block);
        if size == 0 || !size.is_multiple_of(d) || !rows.is_multiple_of(size) || !cols.is_multiple_of(size) {
            let fit = if size == 0 { 0 } else { size.div_ceil(d) * d };
            return Err(EcaError::IncompatibleRegion {
                size,
                block: d,
                rows,
                cols,
                crop_rows: rows.checked_div(fit).map_or(0, |q| q * fit),
                crop_cols: cols.checked_div(fit).map_or(0, |q| q * fit),
            });
        }
        let tiled = TiledMatrix::new(cells, d, cfg.boundary);
        let grid_cols = cols / size;
        let regions = rows / size * grid_cols;
        let mut region_rects = vec![Vec::new(); regions];
        for (i, r) in tiled.rects().iter().enumerate() {
            region_rects[r.row / size * grid_cols + r.col / size].push(i);
        }
        Ok(RegionMasking {
            tiled,
            size,
            grid_cols,
            region_rects,
            alive: vec![true; regions],
        })
    }

    pub fn region_count(&self) -> usize {
        self.alive.len()
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.alive.len() / self.grid_cols, self.grid_cols)
    }

    /// Top-left cell of a region.
    pub fn origin(&self, id: usize) -> (usize, usize) {
        (id / self.grid_cols * self.size, id % self.grid_cols * self.size)
    }

    pub fn is_masked(&self, id: usize) -> bool {
        !self.alive[id]
    }

    pub fn is_zero(&self, id: usize) -> bool {
        let (r0, c0) = self.origin(id);
        let m = self.tiled.matrix();
        (r0..r0 + self.size).all(|r| (c0..c0 + self.size).all(|c| m.get(r, c) == 0))
    }

    /// Cell mask with masked regions set.
    pub fn mask(&self) -> BitMatrix {
        let m = self.tiled.matrix();
        BitMatrix::from_fn(m.rows(), m.cols(), |r, c| !self.alive[r / self.size * self.grid_cols + c / self.size])
    }

    fn rects_of(&self, ids: &[usize]) -> Vec<usize> {
        ids.iter().flat_map(|&id| self.region_rects[id].iter().copied()).collect()
    }

    fn check_layout(&self, cfg: &EstimatorConfig) -> Result<(), BdmError> {
        cfg.validate()?;
        if cfg.array_block != self.tiled.rects().first().map_or(cfg.array_block, |r| r.size) {
            return Err(BdmError::InvalidConfig("block size differs from the region layout".into()));
        }
        Ok(())
    }
}

impl Perturbable for RegionMasking {
    fn element_ids(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    fn complexity(&self, cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        self.check_layout(cfg)?;
        value_of_multiset(self.tiled.multiset(), cfg)
    }

    fn complexity_without(&self, ids: &[usize], cfg: &EstimatorConfig) -> Result<f64, BdmError> {
        self.check_layout(cfg)?;
        MultisetScorer::new(self.tiled.multiset(), cfg)?.value_with(&self.tiled.mask_changes(&self.rects_of(ids)))
    }

    fn contributions(&self, cfg: &EstimatorConfig, exec: Execution) -> Result<Vec<(usize, f64)>, BdmError> {
        use rayon::prelude::*;
        self.check_layout(cfg)?;
        let scorer = MultisetScorer::new(self.tiled.multiset(), cfg)?;
        let base = scorer.value();
        let ids = self.element_ids();
        let one = |&id: &usize| scorer.value_with(&self.tiled.mask_changes(&self.region_rects[id])).map(|c| (id, base - c));
        match exec {
            Execution::Serial => ids.iter().map(one).collect(),
            Execution::Parallel => ids.par_iter().map(one).collect(),
        }
    }

    fn remove(&mut self, ids: &[usize]) {
        let rects = self.rects_of(ids);
        self.tiled.mask(&rects);
        for &id in ids {
            self.alive[id] = false;
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoarseGrain {
    pub diagram: SpacetimeDiagram,
    pub regions: RegionMasking,
    /// Regions allowed to remain unmasked: `floor(retain * regions)`.
    pub target: usize,
    pub trace: Vec<TraceStep>,
    pub rankings: Vec<InfoRanking>,
}

/// Masks minimum-contribution regions, all ties of a sweep at once, until
/// at most `floor(retain * regions)` remain. Cell values are not changed.
pub fn coarse_grain(
    diagram: &SpacetimeDiagram,
    size: usize,
    retain: f64,
    cfg: &EstimatorConfig,
    exec: Execution,
) -> Result<CoarseGrain, EcaError> {
    if !(retain > 0.0 && retain <= 1.0) {
        return Err(EcaError::InvalidRetain(retain));
    }
    let regions = RegionMasking::new(diagram.cells.clone(), size, cfg)?;
    // the small slack keeps products like 0.6 * 10 from flooring to 5
    let target = ((retain * regions.region_count() as f64) + 1e-9).floor() as usize;
    let out = mils(regions, target, cfg, NeutralityMode::min_loss(), exec)?;
    let mut masked = diagram.clone();
    let region_mask = out.object.mask();
    masked.mask = BitMatrix::from_fn(region_mask.rows(), region_mask.cols(), |r, c| {
        region_mask.get(r, c) == 1 || diagram.mask.get(r, c) == 1
    });
    Ok(CoarseGrain {
        diagram: masked,
        regions: out.object,
        target,
        trace: out.trace,
        rankings: out.rankings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_tables() {
        assert_eq!(rule_table(0).unwrap().outputs(), [0; 8]);
        assert_eq!(rule_table(255).unwrap().outputs(), [1; 8]);
        assert_eq!(rule_table(30).unwrap().outputs(), [0, 0, 0, 1, 1, 1, 1, 0]);
        assert!(matches!(rule_table(256), Err(EcaError::InvalidRule(256))));
        assert_eq!(rule_table(30).unwrap().mirrored().number(), 86);
        assert_eq!(rule_table(110).unwrap().mirrored().number(), 124);
    }

    #[test]
    fn trivial_evolutions() {
        let init = vec![1, 0, 1, 1, 0, 0, 1];
        let zero = evolve(rule_table(0).unwrap(), &init, 5).unwrap();
        assert_eq!(zero.cells.rows(), 6);
        assert_eq!(zero.cells.row(0), &init[..]);
        assert!((1..6).all(|r| zero.cells.row(r).iter().all(|&b| b == 0)));
        let id = evolve(rule_table(204).unwrap(), &init, 4).unwrap();
        assert!((0..5).all(|r| id.cells.row(r) == &init[..]));
        assert!(matches!(evolve(rule_table(30).unwrap(), &[1, 0], 3), Err(EcaError::TooNarrow(2))));
    }

    #[test]
    fn rule_90_from_a_single_cell() {
        let d = evolve(rule_table(90).unwrap(), &single_one(9), 3).unwrap();
        let rows: Vec<String> = (0..4).map(|r| d.cells.row(r).iter().map(|b| b.to_string()).collect()).collect();
        assert_eq!(rows, ["000010000", "000101000", "001000100", "010101010"]);
    }

    #[test]
    fn pbm_layout() {
        let m = BitMatrix::from_fn(2, 3, |r, c| r == c);
        assert_eq!(to_pbm(&m), "P1\n3 2\n1 0 0\n0 1 0\n");
        let wide = BitMatrix::zeros(1, 40);
        let text = to_pbm(&wide);
        assert!(text.lines().all(|l| l.len() <= 70));
        assert_eq!(text.lines().skip(2).map(|l| l.split(' ').count()).sum::<usize>(), 40);
    }

    #[test]
    fn incompatible_region_names_crop() {
        let d = evolve(rule_table(22).unwrap(), &single_one(101), 100).unwrap();
        let err = coarse_grain(&d, 8, 0.6, &EstimatorConfig::bundled(), Execution::Serial).unwrap_err();
        assert!(err.to_string().contains("crop to 96x96"), "{err}");
    }

    #[test]
    fn retain_all_is_identity() {
        let d = evolve(rule_table(22).unwrap(), &single_one(16), 15).unwrap();
        let cg = coarse_grain(&d, 8, 1.0, &EstimatorConfig::bundled(), Execution::Serial).unwrap();
        assert!(cg.trace.is_empty());
        assert_eq!(cg.diagram, d);
    }

    #[test]
    fn uniform_diagram_collapses_in_one_sweep() {
        let d = SpacetimeDiagram::new(BitMatrix::zeros(16, 24));
        let cg = coarse_grain(&d, 8, 0.5, &EstimatorConfig::bundled(), Execution::Serial).unwrap();
        assert_eq!(cg.target, 3);
        assert_eq!(cg.trace.len(), 1);
        assert_eq!(cg.trace[0].deleted.len(), 6);
        assert_eq!(cg.diagram.masked_cells(), 16 * 24);
        assert_eq!(cg.diagram.cells, d.cells);
    }
}
