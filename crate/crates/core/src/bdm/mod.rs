//! Block Decomposition Method.
//!
//! An object is cut into non-overlapping blocks, identical blocks are merged,
//! and the estimate is `sum over distinct blocks of log2(multiplicity) + CTM(block)`.
//! Shannon block entropy over the same decomposition is available as an
//! alternative estimator, reported in total bits.

mod exact;
mod object;
mod tiling;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ctm::{self, BlockKey, CtmTable, MissingBlock, MissingPolicy, Shape, TableKind};

pub use exact::{fsum, ExactSum};
pub use object::{BinaryObject, BitMatrix};
pub use tiling::TiledMatrix;

/// Longest string block with reference CTM values.
pub const MAX_STRING_BLOCK: usize = 12;
/// Largest square array block with reference CTM values.
pub const MAX_ARRAY_BLOCK: usize = 4;

#[derive(Debug, Error)]
pub enum BdmError {
    #[error(transparent)]
    MissingBlock(#[from] MissingBlock),
    #[error("invalid estimator config: {0}")]
    InvalidConfig(String),
    #[error("no {0} table configured")]
    NoTable(TableKind),
    #[error("object is empty")]
    EmptyObject,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bdm,
    #[serde(alias = "entropy")]
    BlockEntropy,
}

/// What happens to the remainder when the block size does not divide the object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    /// Cover the remainder with smaller blocks (squares for matrices).
    Shrink,
    /// Drop the remainder; coverage drops below 1.
    Discard,
}

#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub method: Method,
    /// String block length.
    pub string_block: usize,
    /// Square array block dimension.
    pub array_block: usize,
    pub boundary: BoundaryPolicy,
    pub missing: MissingPolicy,
    pub string_table: Option<Arc<CtmTable>>,
    pub array_table: Option<Arc<CtmTable>>,
}

impl EstimatorConfig {
    /// BDM over the given tables with the default boundary policy. Block
    /// sizes are the largest each table covers, capped at the reference sizes.
    pub fn bdm(string_table: Option<Arc<CtmTable>>, array_table: Option<Arc<CtmTable>>) -> Self {
        let fit = |t: &Option<Arc<CtmTable>>, cap: usize| t.as_ref().map_or(cap, |t| (t.max_block_dim() as usize).clamp(1, cap));
        let mut cfg = EstimatorConfig {
            method: Method::Bdm,
            string_block: fit(&string_table, MAX_STRING_BLOCK),
            array_block: fit(&array_table, MAX_ARRAY_BLOCK),
            boundary: BoundaryPolicy::Shrink,
            missing: MissingPolicy::Error,
            string_table,
            array_table,
        };
        cfg.boundary = cfg.default_boundary();
        cfg
    }

    /// BDM over the bundled reference tables.
    pub fn bundled() -> Self {
        Self::bdm(Some(ctm::bundled_string_table()), Some(ctm::bundled_array_table()))
    }

    /// Block entropy with the default block sizes.
    pub fn block_entropy() -> Self {
        EstimatorConfig {
            method: Method::BlockEntropy,
            string_block: MAX_STRING_BLOCK,
            array_block: MAX_ARRAY_BLOCK,
            boundary: BoundaryPolicy::Shrink,
            missing: MissingPolicy::Error,
            string_table: None,
            array_table: None,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryPolicy) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_missing(mut self, missing: MissingPolicy) -> Self {
        self.missing = missing;
        self
    }

    pub fn with_block_sizes(mut self, string_block: usize, array_block: usize) -> Self {
        self.string_block = string_block;
        self.array_block = array_block;
        self
    }

    /// `Shrink` when every configured table has entries for all smaller block
    /// sizes, otherwise `Discard`.
    pub fn default_boundary(&self) -> BoundaryPolicy {
        let strings_ok = self.string_table.as_ref().is_none_or(|t| {
            (1..self.string_block).all(|l| t.has_shape(Shape::String(l as u16)))
        });
        let arrays_ok = self.array_table.as_ref().is_none_or(|t| {
            (1..self.array_block).all(|d| t.has_shape(Shape::Array(d as u16, d as u16)))
        });
        if strings_ok && arrays_ok {
            BoundaryPolicy::Shrink
        } else {
            BoundaryPolicy::Discard
        }
    }

    pub fn validate(&self) -> Result<(), BdmError> {
        if self.string_block == 0 || self.string_block > MAX_STRING_BLOCK {
            return Err(BdmError::InvalidConfig(format!(
                "string block length {} outside 1..={MAX_STRING_BLOCK}",
                self.string_block
            )));
        }
        if self.array_block == 0 || self.array_block > MAX_ARRAY_BLOCK {
            return Err(BdmError::InvalidConfig(format!(
                "array block dimension {} outside 1..={MAX_ARRAY_BLOCK}",
                self.array_block
            )));
        }
        for (t, want) in [(&self.string_table, TableKind::String), (&self.array_table, TableKind::Array)] {
            if let Some(t) = t {
                if t.kind() != want {
                    return Err(BdmError::InvalidConfig(format!("a {} table given where a {want} table is expected", t.kind())));
                }
            }
        }
        Ok(())
    }

    fn table_for(&self, shape: Shape) -> Result<&CtmTable, BdmError> {
        let kind = TableKind::of(shape);
        match kind {
            TableKind::String => self.string_table.as_deref(),
            TableKind::Array => self.array_table.as_deref(),
        }
        .ok_or(BdmError::NoTable(kind))
    }

    /// CTM value of one block under the configured missing-block policy.
    pub fn block_value(&self, key: &BlockKey) -> Result<f64, BdmError> {
        Ok(self.table_for(key.shape())?.value(key, self.missing)?)
    }

    fn block_size_for(&self, object: &BinaryObject) -> usize {
        match object {
            BinaryObject::String(_) => self.string_block,
            BinaryObject::Matrix(_) => self.array_block,
        }
    }
}

/// Distinct blocks with multiplicities, plus how much of the object they cover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockMultiset {
    counts: BTreeMap<BlockKey, u64>,
    covered_cells: u64,
    total_cells: u64,
}

impl BlockMultiset {
    pub fn new(total_cells: u64) -> Self {
        BlockMultiset {
            counts: BTreeMap::new(),
            covered_cells: 0,
            total_cells,
        }
    }

    pub fn insert(&mut self, key: BlockKey) {
        self.insert_n(key, 1);
    }

    pub fn insert_n(&mut self, key: BlockKey, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(key).or_insert(0) += n;
        self.covered_cells += n * key.shape().cells() as u64;
    }

    /// Removes one occurrence; panics if absent.
    pub fn remove(&mut self, key: &BlockKey) {
        let c = self.counts.get_mut(key).expect("block present in multiset");
        *c -= 1;
        if *c == 0 {
            self.counts.remove(key);
        }
        self.covered_cells -= key.shape().cells() as u64;
    }

    pub fn count(&self, key: &BlockKey) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// `(block, multiplicity)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&BlockKey, u64)> {
        self.counts.iter().map(|(k, c)| (k, *c))
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn blocks(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn covered_cells(&self) -> u64 {
        self.covered_cells
    }

    pub fn total_cells(&self) -> u64 {
        self.total_cells
    }

    /// Covered cells over total cells, as a fraction `(num, den)`.
    pub fn coverage(&self) -> (u64, u64) {
        (self.covered_cells, self.total_cells)
    }

    pub fn coverage_f64(&self) -> f64 {
        if self.total_cells == 0 {
            1.0
        } else {
            self.covered_cells as f64 / self.total_cells as f64
        }
    }
}

/// A square block of a matrix: top-left corner and side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub row: usize,
    pub col: usize,
    pub size: usize,
}

impl Rect {
    pub fn key(&self, m: &BitMatrix) -> BlockKey {
        let s = self.size as u16;
        BlockKey::from_cells(
            Shape::Array(s, s),
            (0..self.size).flat_map(|r| (0..self.size).map(move |c| m.get(self.row + r, self.col + c))),
        )
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        r >= self.row && r < self.row + self.size && c >= self.col && c < self.col + self.size
    }
}

/// Square blocks covering a `rows x cols` matrix, row-major over the grid of
/// full `d x d` tiles. Under `Shrink` each leftover strip is covered
/// recursively with squares of the strip's smaller side.
pub fn matrix_partition(rows: usize, cols: usize, d: usize, policy: BoundaryPolicy) -> Vec<Rect> {
    let mut out = Vec::new();
    partition_into(0, 0, rows, cols, d, policy, &mut out);
    out
}

fn partition_into(row: usize, col: usize, h: usize, w: usize, d: usize, policy: BoundaryPolicy, out: &mut Vec<Rect>) {
    if h == 0 || w == 0 || d == 0 {
        return;
    }
    let (full_h, full_w) = (h / d * d, w / d * d);
    for r in (0..full_h).step_by(d) {
        for c in (0..full_w).step_by(d) {
            out.push(Rect {
                row: row + r,
                col: col + c,
                size: d,
            });
        }
    }
    if policy == BoundaryPolicy::Discard {
        return;
    }
    let (rem_h, rem_w) = (h - full_h, w - full_w);
    if rem_w > 0 && full_h > 0 {
        partition_into(row, col + full_w, full_h, rem_w, rem_w.min(full_h), policy, out);
    }
    if rem_h > 0 {
        partition_into(row + full_h, col, rem_h, w, rem_h.min(w), policy, out);
    }
}

/// String segments `(start, len)` for block length `len`.
pub fn string_partition(n: usize, len: usize, policy: BoundaryPolicy) -> Vec<(usize, usize)> {
    let mut out: Vec<_> = (0..n / len).map(|i| (i * len, len)).collect();
    if policy == BoundaryPolicy::Shrink && !n.is_multiple_of(len) {
        out.push((n / len * len, n % len));
    }
    out
}

fn decompose_with(object: &BinaryObject, size: usize, policy: BoundaryPolicy) -> BlockMultiset {
    match object {
        BinaryObject::String(s) => {
            let mut ms = BlockMultiset::new(s.len() as u64);
            for (start, len) in string_partition(s.len(), size, policy) {
                ms.insert(BlockKey::string(&s[start..start + len]));
            }
            ms
        }
        BinaryObject::Matrix(m) => {
            let mut ms = BlockMultiset::new((m.rows() * m.cols()) as u64);
            for rect in matrix_partition(m.rows(), m.cols(), size, policy) {
                ms.insert(rect.key(m));
            }
            ms
        }
    }
}

/// Non-overlapping decomposition under the configured block size and boundary policy.
pub fn decompose(object: &BinaryObject, config: &EstimatorConfig) -> BlockMultiset {
    decompose_with(object, config.block_size_for(object), config.boundary)
}

/// `log2(n) + CTM(block)` for one distinct block.
pub fn bdm_term(key: &BlockKey, multiplicity: u64, config: &EstimatorConfig) -> Result<f64, BdmError> {
    Ok((multiplicity as f64).log2() + config.block_value(key)?)
}

/// BDM value of an already decomposed object.
pub fn bdm_of_multiset(ms: &BlockMultiset, config: &EstimatorConfig) -> Result<f64, BdmError> {
    let mut sum = ExactSum::new();
    for (k, n) in ms.iter() {
        sum.add(bdm_term(k, n, config)?);
    }
    Ok(sum.value())
}

/// Total Shannon entropy (bits per block times block count) of a multiset.
pub fn entropy_of_multiset(ms: &BlockMultiset) -> f64 {
    entropy_of_counts(ms.counts.values().copied())
}

fn entropy_of_counts(counts: impl Iterator<Item = u64> + Clone) -> f64 {
    let total: u64 = counts.clone().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    fsum(counts.filter(|&n| n > 0).map(|n| {
        let n = n as f64;
        n * (t / n).log2()
    }))
}

/// Estimate of an already decomposed object under the configured method.
pub fn value_of_multiset(ms: &BlockMultiset, config: &EstimatorConfig) -> Result<f64, BdmError> {
    match config.method {
        Method::Bdm => bdm_of_multiset(ms, config),
        Method::BlockEntropy => Ok(entropy_of_multiset(ms)),
    }
}

pub fn bdm(object: &BinaryObject, config: &EstimatorConfig) -> Result<f64, BdmError> {
    config.validate()?;
    if object.cells() == 0 {
        return Err(BdmError::EmptyObject);
    }
    bdm_of_multiset(&decompose(object, config), config)
}

/// Block entropy in total bits. Matrices use `block_size x block_size` blocks.
pub fn block_entropy(object: &BinaryObject, block_size: usize, policy: BoundaryPolicy) -> Result<f64, BdmError> {
    if block_size == 0 {
        return Err(BdmError::InvalidConfig("block size must be at least 1".into()));
    }
    Ok(entropy_of_multiset(&decompose_with(object, block_size, policy)))
}

/// Single entry point used by the perturbation code.
pub fn complexity(object: &BinaryObject, config: &EstimatorConfig) -> Result<f64, BdmError> {
    match config.method {
        Method::Bdm => bdm(object, config),
        Method::BlockEntropy => {
            config.validate()?;
            block_entropy(object, config.block_size_for(object), config.boundary)
        }
    }
}

/// Scores variants of one multiset that differ in a few block counts.
///
/// For BDM the exact term sum of the base multiset is kept, so each variant
/// costs only its changed terms and still matches a full recomputation bit
/// for bit.
pub struct MultisetScorer<'a> {
    base: &'a BlockMultiset,
    config: &'a EstimatorConfig,
    sum: Option<ExactSum>,
    value: f64,
}

impl<'a> MultisetScorer<'a> {
    pub fn new(base: &'a BlockMultiset, config: &'a EstimatorConfig) -> Result<Self, BdmError> {
        let (sum, value) = match config.method {
            Method::Bdm => {
                let mut s = ExactSum::new();
                for (k, n) in base.iter() {
                    s.add(bdm_term(k, n, config)?);
                }
                let v = s.value();
                (Some(s), v)
            }
            Method::BlockEntropy => (None, entropy_of_multiset(base)),
        };
        Ok(MultisetScorer {
            base,
            config,
            sum,
            value,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Value after applying count deltas. Deltas for the same key are summed;
    /// a resulting negative count is a caller bug.
    pub fn value_with(&self, changes: &[(BlockKey, i64)]) -> Result<f64, BdmError> {
        let mut merged: BTreeMap<BlockKey, i64> = BTreeMap::new();
        for (k, d) in changes {
            *merged.entry(*k).or_insert(0) += d;
        }
        merged.retain(|_, d| *d != 0);
        if merged.is_empty() {
            return Ok(self.value);
        }
        let new_count = |k: &BlockKey, d: i64| {
            let n = self.base.count(k) as i64 + d;
            assert!(n >= 0, "block count for {k} would become negative");
            n as u64
        };
        match &self.sum {
            Some(base_sum) => {
                let mut s = base_sum.clone();
                for (k, &d) in &merged {
                    let old = self.base.count(k);
                    if old > 0 {
                        s.sub(bdm_term(k, old, self.config)?);
                    }
                    let new = new_count(k, d);
                    if new > 0 {
                        s.add(bdm_term(k, new, self.config)?);
                    }
                }
                Ok(s.value())
            }
            None => {
                let unchanged = self
                    .base
                    .iter()
                    .filter(|(k, _)| !merged.contains_key(k))
                    .map(|(_, n)| n);
                let changed = merged.iter().map(|(k, &d)| new_count(k, d));
                let counts: Vec<u64> = unchanged.chain(changed).collect();
                Ok(entropy_of_counts(counts.into_iter()))
            }
        }
    }
}
