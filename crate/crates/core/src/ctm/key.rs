use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest number of cells a block key can carry.
pub const MAX_BLOCK_CELLS: usize = 128;

/// Shape of a block: a binary string of some length, or an `rows x cols` array.
///
/// The derived order (strings before arrays, then by dimensions) is the
/// canonical order used when summing block terms and when writing tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    String(u16),
    Array(u16, u16),
}

impl Shape {
    pub fn cells(self) -> usize {
        match self {
            Shape::String(len) => len as usize,
            Shape::Array(r, c) => r as usize * c as usize,
        }
    }

    pub fn is_square(self) -> bool {
        matches!(self, Shape::Array(r, c) if r == c)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::String(len) => write!(f, "{len}"),
            Shape::Array(r, c) => write!(f, "{r}x{c}"),
        }
    }
}

/// A binary block packed into an integer, first cell most significant.
///
/// For arrays the cells are read row-major, so the integer value of a key is
/// the row-major bit pattern read as a binary number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockKey {
    shape: Shape,
    bits: u128,
}

impl BlockKey {
    /// Builds a key from 0/1 cell values. Panics if `cells` does not match the
    /// shape or exceeds [`MAX_BLOCK_CELLS`].
    pub fn from_cells(shape: Shape, cells: impl IntoIterator<Item = u8>) -> Self {
        let mut bits = 0u128;
        let mut n = 0usize;
        for c in cells {
            debug_assert!(c <= 1);
            bits = (bits << 1) | (c & 1) as u128;
            n += 1;
        }
        assert_eq!(n, shape.cells(), "cell count does not match shape {shape}");
        assert!(n <= MAX_BLOCK_CELLS);
        BlockKey { shape, bits }
    }

    pub fn string(cells: &[u8]) -> Self {
        Self::from_cells(Shape::String(cells.len() as u16), cells.iter().copied())
    }

    /// Parses a `0`/`1` pattern; `None` on any other character or length mismatch.
    pub fn parse(shape: Shape, pattern: &str) -> Option<Self> {
        let cells = shape.cells();
        if pattern.len() != cells || cells == 0 || cells > MAX_BLOCK_CELLS {
            return None;
        }
        let mut bits = 0u128;
        for ch in pattern.bytes() {
            let b = match ch {
                b'0' => 0,
                b'1' => 1,
                _ => return None,
            };
            bits = (bits << 1) | b;
        }
        Some(BlockKey { shape, bits })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn cell(&self, i: usize) -> u8 {
        let n = self.shape.cells();
        ((self.bits >> (n - 1 - i)) & 1) as u8
    }

    pub fn cells(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.shape.cells()).map(|i| self.cell(i))
    }

    /// Same shape with every cell flipped.
    pub fn complement(&self) -> Self {
        let n = self.shape.cells();
        let mask = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        BlockKey {
            shape: self.shape,
            bits: !self.bits & mask,
        }
    }

    pub fn pattern(&self) -> String {
        self.cells().map(|c| if c == 1 { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.shape, self.pattern())
    }
}
