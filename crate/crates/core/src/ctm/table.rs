use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::key::{BlockKey, Shape};
use super::machine::{BlankTape, OutputDistribution};
use super::{CtmError, MissingBlock};

pub const CSV_HEADER: &str = "kind,dims,bits,value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    String,
    Array,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::String => "string",
            TableKind::Array => "array",
        }
    }

    pub fn of(shape: Shape) -> TableKind {
        match shape {
            Shape::String(_) => TableKind::String,
            Shape::Array(..) => TableKind::Array,
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a lookup treats blocks absent from the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Fail with [`MissingBlock`].
    #[default]
    Error,
    /// Charge one bit more than the most complex stored block of the same
    /// shape (of the whole table when the shape is absent).
    MaxPlusOne,
}

/// Immutable map from binary blocks to estimated complexity in bits.
#[derive(Debug, Clone)]
pub struct CtmTable {
    kind: TableKind,
    values: HashMap<BlockKey, f64>,
    max_by_shape: BTreeMap<Shape, f64>,
    provenance: String,
}

impl PartialEq for CtmTable {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .all(|(k, v)| other.values.get(k).is_some_and(|w| w.to_bits() == v.to_bits()))
    }
}

impl CtmTable {
    /// Builds a table, checking every invariant on the entries.
    pub fn from_entries(
        kind: TableKind,
        entries: impl IntoIterator<Item = (BlockKey, f64)>,
        provenance: impl Into<String>,
    ) -> Result<Self, CtmError> {
        let mut values = HashMap::new();
        for (key, value) in entries {
            check_entry(kind, &key, value).map_err(CtmError::InvalidEntry)?;
            if values.insert(key, value).is_some() {
                return Err(CtmError::InvalidEntry(format!("duplicate key {key}")));
            }
        }
        Ok(Self::assemble(kind, values, provenance.into()))
    }

    fn assemble(kind: TableKind, values: HashMap<BlockKey, f64>, provenance: String) -> Self {
        let mut max_by_shape: BTreeMap<Shape, f64> = BTreeMap::new();
        for (k, &v) in &values {
            let m = max_by_shape.entry(k.shape()).or_insert(v);
            *m = m.max(v);
        }
        CtmTable {
            kind,
            values,
            max_by_shape,
            provenance,
        }
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Shapes present in the table, ascending.
    pub fn shapes(&self) -> impl Iterator<Item = Shape> + '_ {
        self.max_by_shape.keys().copied()
    }

    pub fn has_shape(&self, shape: Shape) -> bool {
        self.max_by_shape.contains_key(&shape)
    }

    /// True when every block of `shape` has an entry.
    pub fn is_complete_for(&self, shape: Shape) -> bool {
        let cells = shape.cells();
        cells < 64 && self.values.keys().filter(|k| k.shape() == shape).count() as u64 == 1u64 << cells
    }

    /// Longest string length, or largest square array dimension, present.
    pub fn max_block_dim(&self) -> u16 {
        self.shapes()
            .filter_map(|s| match s {
                Shape::String(l) => Some(l),
                Shape::Array(r, c) if r == c => Some(r),
                Shape::Array(..) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// The stored value; never interpolates.
    pub fn lookup(&self, key: &BlockKey) -> Result<f64, MissingBlock> {
        self.values.get(key).copied().ok_or(MissingBlock(*key))
    }

    pub fn value(&self, key: &BlockKey, policy: MissingPolicy) -> Result<f64, MissingBlock> {
        match (self.values.get(key), policy) {
            (Some(v), _) => Ok(*v),
            (None, MissingPolicy::Error) => Err(MissingBlock(*key)),
            (None, MissingPolicy::MaxPlusOne) => {
                let max = self
                    .max_by_shape
                    .get(&key.shape())
                    .copied()
                    .or_else(|| self.max_by_shape.values().copied().reduce(f64::max))
                    .ok_or(MissingBlock(*key))?;
                Ok(max + 1.0)
            }
        }
    }

    /// Entries in canonical order (shape, then bit pattern).
    pub fn entries(&self) -> Vec<(BlockKey, f64)> {
        let mut v: Vec<_> = self.values.iter().map(|(k, v)| (*k, *v)).collect();
        v.sort_by_key(|e| e.0);
        v
    }

    pub fn min_value(&self) -> Option<f64> {
        self.values.values().copied().reduce(f64::min)
    }

    /// Parses the CSV format (`kind,dims,bits,value`).
    pub fn from_csv(text: &str, origin: &str) -> Result<Self, CtmError> {
        let mut lines = text.split('\n').enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end_matches('\r') == CSV_HEADER => {}
            _ => {
                return Err(CtmError::Malformed {
                    line: 1,
                    reason: format!("expected header `{CSV_HEADER}`"),
                })
            }
        }
        let mut kind = None;
        let mut values = HashMap::new();
        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let malformed = |reason: String| CtmError::Malformed { line: line_no, reason };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(malformed(format!("expected 4 fields, found {}", fields.len())));
            }
            let shape = match fields[0] {
                "string" => fields[1]
                    .parse::<u16>()
                    .ok()
                    .filter(|&l| l > 0)
                    .map(Shape::String),
                "array" => fields[1].split_once('x').and_then(|(r, c)| {
                    let r = r.parse::<u16>().ok().filter(|&r| r > 0)?;
                    let c = c.parse::<u16>().ok().filter(|&c| c > 0)?;
                    Some(Shape::Array(r, c))
                }),
                other => return Err(malformed(format!("unknown kind {other:?}"))),
            }
            .ok_or_else(|| malformed(format!("bad dims {:?}", fields[1])))?;
            let this_kind = TableKind::of(shape);
            match kind {
                None => kind = Some(this_kind),
                Some(k) if k != this_kind => return Err(malformed(format!("{this_kind} entry in a {k} table"))),
                _ => {}
            }
            let key = BlockKey::parse(shape, fields[2])
                .ok_or_else(|| malformed(format!("bits {:?} do not match dims {shape}", fields[2])))?;
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| malformed(format!("bad value {:?}", fields[3])))?;
            check_entry(this_kind, &key, value).map_err(malformed)?;
            if values.insert(key, value).is_some() {
                return Err(CtmError::DuplicateKey { line: line_no, key });
            }
        }
        let kind = kind.ok_or_else(|| CtmError::Malformed {
            line: 1,
            reason: "table has no entries".into(),
        })?;
        Ok(Self::assemble(kind, values, format!("file: {origin}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for (k, v) in self.entries() {
            out.push_str(&format!("{},{},{},{}\n", self.kind, k.shape(), k.pattern(), v));
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CtmError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CtmError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CtmError> {
        let path = path.as_ref();
        let io = |source| CtmError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut f = fs::File::create(path).map_err(io)?;
        f.write_all(self.to_csv().as_bytes()).map_err(io)
    }
}

fn check_entry(kind: TableKind, key: &BlockKey, value: f64) -> Result<(), String> {
    if TableKind::of(key.shape()) != kind {
        return Err(format!("{key} does not belong in a {kind} table"));
    }
    if kind == TableKind::Array && !key.shape().is_square() {
        return Err(format!("array block {} is not square", key.shape()));
    }
    if !value.is_finite() || value < 0.0 {
        return Err(format!("value {value} is not a finite non-negative number"));
    }
    Ok(())
}

/// Coding-theorem table: `-log2(count / halting)` for every observed output.
pub fn build_ctm_table(dist: &OutputDistribution) -> Result<CtmTable, CtmError> {
    if dist.halting == 0 || dist.counts.is_empty() {
        return Err(CtmError::EmptyDistribution);
    }
    let total = dist.halting as f64;
    let values = dist
        .counts
        .iter()
        .map(|(k, &c)| (*k, -(c as f64 / total).log2()))
        .collect();
    let blank = match dist.blank {
        BlankTape::Zero => "zero",
        BlankTape::Both => "both",
    };
    Ok(CtmTable::assemble(
        TableKind::String,
        values,
        format!(
            "generated: states={} max_steps={} blank={blank}",
            dist.spec.states(),
            dist.max_steps
        ),
    ))
}
