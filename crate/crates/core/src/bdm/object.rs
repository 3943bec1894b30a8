use std::fmt;

use serde::{Deserialize, Serialize};

use super::BdmError;

/// Dense binary matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            cells: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, BdmError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(BdmError::Parse("rows have different lengths".into()));
        }
        if rows.iter().flatten().any(|&c| c > 1) {
            return Err(BdmError::Parse("cells must be 0 or 1".into()));
        }
        Ok(BitMatrix {
            rows: rows.len(),
            cols,
            cells: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.cells[r * cols + c] = f(r, c) as u8;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        debug_assert!(v <= 1);
        self.cells[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.cols..(r + 1) * self.cols]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }

    pub fn transpose(&self) -> BitMatrix {
        BitMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r) == 1)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for &c in self.row(r) {
                f.write_str(if c == 1 { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Anything the estimators accept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinaryObject {
    String(Vec<u8>),
    Matrix(BitMatrix),
}

impl BinaryObject {
    /// Parses text of `0`/`1` characters. One line is a string, several
    /// equally long lines a matrix. Blank lines and `#` comments are skipped;
    /// spaces and tabs inside a line are ignored.
    pub fn parse(text: &str) -> Result<Self, BdmError> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(BdmError::Parse(format!("line {}: unexpected character {other:?}", i + 1))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        match rows.len() {
            0 => Err(BdmError::EmptyObject),
            1 => Ok(BinaryObject::String(rows.pop().unwrap())),
            _ => Ok(BinaryObject::Matrix(BitMatrix::from_rows(&rows)?)),
        }
    }

    pub fn string_from(pattern: &str) -> Result<Self, BdmError> {
        match Self::parse(pattern)? {
            s @ BinaryObject::String(_) => Ok(s),
            BinaryObject::Matrix(_) => Err(BdmError::Parse("expected a single line".into())),
        }
    }

    pub fn cells(&self) -> usize {
        match self {
            BinaryObject::String(s) => s.len(),
            BinaryObject::Matrix(m) => m.rows() * m.cols(),
        }
    }
}

impl From<BitMatrix> for BinaryObject {
    fn from(m: BitMatrix) -> Self {
        BinaryObject::Matrix(m)
    }
}
