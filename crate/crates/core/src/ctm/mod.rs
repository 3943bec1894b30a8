//! Coding Theorem Method tables.
//!
//! Small Turing machines are enumerated exhaustively, their halting outputs
//! tallied, and each output `s` is assigned `-log2(P(s))` bits, where `P(s)`
//! is its share of all halting runs. Tables can also be loaded from CSV; two
//! reference tables (strings up to 12 bits, square arrays up to 4x4) are
//! bundled with the crate.

mod key;
mod machine;
mod table;

use std::sync::Arc;

use once_cell::sync::Lazy;
use thiserror::Error;

pub use key::{BlockKey, Shape, MAX_BLOCK_CELLS};
pub use machine::{count_machines, enumerate_machines, BlankTape, Halted, Machine, MachineSpec, OutputDistribution};
pub use table::{build_ctm_table, CtmTable, MissingPolicy, TableKind, CSV_HEADER};

/// A block with no table entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("missing block: no CTM value for {0}")]
pub struct MissingBlock(pub BlockKey);

#[derive(Debug, Error)]
pub enum CtmError {
    #[error("invalid machine spec: {0}")]
    InvalidSpec(String),
    #[error("machine count for {states} states overflows")]
    Overflow { states: u32 },
    #[error("output distribution is empty")]
    EmptyDistribution,
    #[error("invalid table entry: {0}")]
    InvalidEntry(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate key {key}")]
    DuplicateKey { line: usize, key: BlockKey },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Missing(#[from] MissingBlock),
}

static BUNDLED_STRINGS: Lazy<Arc<CtmTable>> = Lazy::new(|| {
    Arc::new(
        CtmTable::from_csv(include_str!("../../data/ctm-b2-d12.csv"), "bundled ctm-b2-d12.csv")
            .expect("bundled string table is valid"),
    )
});

static BUNDLED_ARRAYS: Lazy<Arc<CtmTable>> = Lazy::new(|| {
    Arc::new(
        CtmTable::from_csv(include_str!("../../data/ctm-b2-d4x4.csv"), "bundled ctm-b2-d4x4.csv")
            .expect("bundled array table is valid"),
    )
});

/// Reference table for binary strings of length 1 to 12.
pub fn bundled_string_table() -> Arc<CtmTable> {
    Arc::clone(&BUNDLED_STRINGS)
}

/// Reference table for square binary arrays from 1x1 to 4x4.
pub fn bundled_array_table() -> Arc<CtmTable> {
    Arc::clone(&BUNDLED_ARRAYS)
}
