use super::{matrix_partition, BitMatrix, BlockMultiset, BoundaryPolicy, Rect};
use crate::ctm::BlockKey;

const UNCOVERED: u32 = u32::MAX;

/// A matrix together with its block decomposition, kept in sync under cell
/// edits and block masking so that variants can be scored from block deltas.
#[derive(Debug, Clone)]
pub struct TiledMatrix {
    matrix: BitMatrix,
    rects: Vec<Rect>,
    cell_rect: Vec<u32>,
    keys: Vec<BlockKey>,
    masked: Vec<bool>,
    multiset: BlockMultiset,
}

impl TiledMatrix {
    pub fn new(matrix: BitMatrix, block: usize, policy: BoundaryPolicy) -> Self {
        let rects = matrix_partition(matrix.rows(), matrix.cols(), block, policy);
        let mut cell_rect = vec![UNCOVERED; matrix.rows() * matrix.cols()];
        for (i, r) in rects.iter().enumerate() {
            for dr in 0..r.size {
                for dc in 0..r.size {
                    cell_rect[(r.row + dr) * matrix.cols() + r.col + dc] = i as u32;
                }
            }
        }
        let keys: Vec<BlockKey> = rects.iter().map(|r| r.key(&matrix)).collect();
        let mut multiset = BlockMultiset::new((matrix.rows() * matrix.cols()) as u64);
        keys.iter().for_each(|k| multiset.insert(*k));
        TiledMatrix {
            masked: vec![false; rects.len()],
            matrix,
            rects,
            cell_rect,
            keys,
            multiset,
        }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn multiset(&self) -> &BlockMultiset {
        &self.multiset
    }

    pub fn is_masked(&self, rect: usize) -> bool {
        self.masked[rect]
    }

    pub fn rect_of(&self, r: usize, c: usize) -> Option<usize> {
        match self.cell_rect[r * self.matrix.cols() + c] {
            UNCOVERED => None,
            i => Some(i as usize),
        }
    }

    /// Block count deltas produced by setting the given cells. Edits inside
    /// masked or uncovered blocks produce no delta.
    pub fn cell_changes(&self, edits: &[(usize, usize, u8)]) -> Vec<(BlockKey, i64)> {
        let mut touched: Vec<usize> = edits
            .iter()
            .filter_map(|&(r, c, _)| self.rect_of(r, c))
            .filter(|&i| !self.masked[i])
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let mut out = Vec::with_capacity(touched.len() * 2);
        for i in touched {
            let new = self.edited_key(i, edits);
            if new != self.keys[i] {
                out.push((self.keys[i], -1));
                out.push((new, 1));
            }
        }
        out
    }

    fn edited_key(&self, rect: usize, edits: &[(usize, usize, u8)]) -> BlockKey {
        let r = self.rects[rect];
        let s = r.size as u16;
        let cells = (0..r.size).flat_map(|dr| {
            (0..r.size).map(move |dc| {
                let (row, col) = (r.row + dr, r.col + dc);
                edits
                    .iter()
                    .rev()
                    .find(|e| e.0 == row && e.1 == col)
                    .map_or_else(|| self.matrix.get(row, col), |e| e.2)
            })
        });
        BlockKey::from_cells(crate::ctm::Shape::Array(s, s), cells)
    }

    /// Applies cell edits, updating the multiset.
    pub fn set_cells(&mut self, edits: &[(usize, usize, u8)]) {
        let mut touched: Vec<usize> = edits.iter().filter_map(|&(r, c, _)| self.rect_of(r, c)).collect();
        touched.sort_unstable();
        touched.dedup();
        for (k, d) in self.cell_changes(edits) {
            if d < 0 {
                self.multiset.remove(&k);
            } else {
                self.multiset.insert(k);
            }
        }
        for &(r, c, v) in edits {
            self.matrix.set(r, c, v);
        }
        for i in touched {
            self.keys[i] = self.rects[i].key(&self.matrix);
        }
    }

    /// Block count deltas produced by masking the given blocks.
    pub fn mask_changes(&self, rects: &[usize]) -> Vec<(BlockKey, i64)> {
        let mut rs = rects.to_vec();
        rs.sort_unstable();
        rs.dedup();
        rs.into_iter()
            .filter(|&i| !self.masked[i])
            .map(|i| (self.keys[i], -1))
            .collect()
    }

    /// Removes blocks from the multiset; cell values are left untouched.
    pub fn mask(&mut self, rects: &[usize]) {
        for (k, _) in self.mask_changes(rects) {
            self.multiset.remove(&k);
        }
        for &i in rects {
            self.masked[i] = true;
        }
    }
}
