//! Exhaustive enumeration of small 2-symbol Turing machines.
//!
//! Convention: each of the `2n` (state, symbol) entries either writes a bit,
//! moves one cell left or right and switches to one of the `n` states (`4n`
//! options), or writes a bit and halts without moving (2 options). That gives
//! `(4n + 2)^(2n)` machines. The halting transition counts as a step.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::key::{BlockKey, Shape, MAX_BLOCK_CELLS};
use super::CtmError;

/// Size of the machine family being enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineSpec {
    states: u32,
}

impl MachineSpec {
    /// Number of symbols, fixed.
    pub const SYMBOLS: u32 = 2;

    pub fn new(states: u32) -> Result<Self, CtmError> {
        if states == 0 {
            return Err(CtmError::InvalidSpec("a machine needs at least one state".into()));
        }
        // next-state must fit the compact transition encoding
        if states > 250 {
            return Err(CtmError::InvalidSpec(format!("{states} states is beyond the supported range")));
        }
        Ok(MachineSpec { states })
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    /// Options per transition entry.
    pub fn base(&self) -> u64 {
        4 * self.states as u64 + 2
    }

    /// Number of transition entries.
    pub fn entries(&self) -> u32 {
        2 * self.states
    }
}

/// `(4n + 2)^(2n)`, or [`CtmError::Overflow`] if it does not fit in a `u128`.
pub fn count_machines(spec: MachineSpec) -> Result<u128, CtmError> {
    (spec.base() as u128)
        .checked_pow(spec.entries())
        .ok_or(CtmError::Overflow { states: spec.states })
}

/// Which blank tapes every machine is started on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlankTape {
    /// All-0 tape only.
    Zero,
    /// All-0 and all-1 tapes; the resulting distribution is closed under complement.
    Both,
}

impl BlankTape {
    fn symbols(self) -> &'static [u8] {
        match self {
            BlankTape::Zero => &[0],
            BlankTape::Both => &[0, 1],
        }
    }
}

/// Output frequencies of one exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDistribution {
    pub spec: MachineSpec,
    pub blank: BlankTape,
    pub max_steps: u64,
    /// Machines in the census, `(4n + 2)^(2n)`.
    pub machines: u64,
    /// Machine runs performed: `machines` times the number of blank tapes.
    pub runs: u64,
    /// Runs that halted within `max_steps`; equals the sum of `counts`.
    pub halting: u64,
    /// Longest runtime among halting runs.
    pub longest_halt: u64,
    #[serde(with = "counts_serde")]
    pub counts: BTreeMap<BlockKey, u64>,
}

impl OutputDistribution {
    pub fn count(&self, output: &BlockKey) -> u64 {
        self.counts.get(output).copied().unwrap_or(0)
    }
}

mod counts_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<BlockKey, u64>, s: S) -> Result<S::Ok, S::Error> {
        let v: BTreeMap<String, u64> = m.iter().map(|(k, c)| (k.pattern(), *c)).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<BlockKey, u64>, D::Error> {
        let v: BTreeMap<String, u64> = BTreeMap::deserialize(d)?;
        v.into_iter()
            .map(|(p, c)| {
                BlockKey::parse(Shape::String(p.len() as u16), &p)
                    .map(|k| (k, c))
                    .ok_or_else(|| serde::de::Error::custom(format!("bad output pattern {p:?}")))
            })
            .collect()
    }
}

const HALT: u8 = u8::MAX;

#[derive(Debug, Clone, Copy)]
struct Transition {
    write: u8,
    right: bool,
    next: u8,
}

/// A decoded machine; entry `2 * state + symbol`.
#[derive(Debug, Clone)]
pub struct Machine {
    table: Vec<Transition>,
}

/// Result of a halting run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halted {
    pub steps: u64,
    /// Cells visited by the head, left to right.
    pub output: Vec<u8>,
}

impl Machine {
    /// Decodes machine number `index` (mixed radix, entry 0 least significant).
    pub fn decode(spec: MachineSpec, mut index: u64) -> Machine {
        let base = spec.base();
        let n = spec.states as u64;
        let table = (0..spec.entries())
            .map(|_| {
                let d = index % base;
                index /= base;
                if d < 4 * n {
                    Transition {
                        write: ((d >> 1) & 1) as u8,
                        right: d & 1 == 1,
                        next: (d / 4) as u8,
                    }
                } else {
                    Transition {
                        write: (d - 4 * n) as u8,
                        right: false,
                        next: HALT,
                    }
                }
            })
            .collect();
        Machine { table }
    }

    /// Runs from a blank tape of `blank` for at most `max_steps` steps.
    pub fn run(&self, blank: u8, max_steps: u64) -> Option<Halted> {
        let mut tape = Tape::new(blank, max_steps);
        self.run_on(&mut tape, max_steps)
    }

    fn run_on(&self, tape: &mut Tape, max_steps: u64) -> Option<Halted> {
        let mut state = 0u8;
        let mut steps = 0u64;
        while steps < max_steps {
            let sym = tape.read();
            let t = self.table[2 * state as usize + sym as usize];
            tape.write(t.write);
            steps += 1;
            if t.next == HALT {
                let output = tape.visited();
                tape.reset();
                return Some(Halted { steps, output });
            }
            tape.shift(t.right);
            state = t.next;
        }
        tape.reset();
        None
    }
}

/// Tape wide enough that the head can never fall off within `max_steps` moves.
struct Tape {
    cells: Vec<u8>,
    blank: u8,
    head: usize,
    lo: usize,
    hi: usize,
    origin: usize,
}

impl Tape {
    fn new(blank: u8, max_steps: u64) -> Tape {
        let origin = max_steps as usize + 1;
        Tape {
            cells: vec![blank; 2 * origin + 1],
            blank,
            head: origin,
            lo: origin,
            hi: origin,
            origin,
        }
    }

    fn read(&self) -> u8 {
        self.cells[self.head]
    }

    fn write(&mut self, b: u8) {
        self.cells[self.head] = b;
    }

    fn shift(&mut self, right: bool) {
        if right {
            self.head += 1;
            self.hi = self.hi.max(self.head);
        } else {
            self.head -= 1;
            self.lo = self.lo.min(self.head);
        }
    }

    fn visited(&self) -> Vec<u8> {
        self.cells[self.lo..=self.hi].to_vec()
    }

    fn reset(&mut self) {
        let blank = self.blank;
        self.cells[self.lo..=self.hi].iter_mut().for_each(|c| *c = blank);
        self.head = self.origin;
        self.lo = self.origin;
        self.hi = self.origin;
    }
}

#[derive(Default)]
struct Partial {
    counts: HashMap<BlockKey, u64>,
    halting: u64,
    longest: u64,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        self.halting += other.halting;
        self.longest = self.longest.max(other.longest);
        self
    }
}

/// Runs every machine of `spec` from the chosen blank tape(s) and tallies the
/// outputs of those halting within `max_steps`.
///
/// Work is split over the rayon pool; counts are merged by key, so the result
/// does not depend on the number of workers.
pub fn enumerate_machines(
    spec: MachineSpec,
    max_steps: u64,
    blank: BlankTape,
) -> Result<OutputDistribution, CtmError> {
    if max_steps == 0 {
        return Err(CtmError::InvalidSpec("max_steps must be at least 1".into()));
    }
    // the visited extent is at most max_steps cells
    if max_steps as usize > MAX_BLOCK_CELLS {
        return Err(CtmError::InvalidSpec(format!(
            "max_steps {max_steps} could produce outputs longer than {MAX_BLOCK_CELLS} cells"
        )));
    }
    let census = count_machines(spec)?;
    let machines = u64::try_from(census).map_err(|_| CtmError::Overflow { states: spec.states })?;
    let runs = machines
        .checked_mul(blank.symbols().len() as u64)
        .ok_or(CtmError::Overflow { states: spec.states })?;

    const CHUNK: u64 = 1 << 14;
    let chunks = machines.div_ceil(CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut part = Partial::default();
            let mut tapes: Vec<Tape> = blank.symbols().iter().map(|&b| Tape::new(b, max_steps)).collect();
            let end = ((chunk + 1) * CHUNK).min(machines);
            for index in chunk * CHUNK..end {
                let m = Machine::decode(spec, index);
                for tape in tapes.iter_mut() {
                    if let Some(h) = m.run_on(tape, max_steps) {
                        part.halting += 1;
                        part.longest = part.longest.max(h.steps);
                        *part.counts.entry(BlockKey::string(&h.output)).or_insert(0) += 1;
                    }
                }
            }
            part
        })
        .reduce(Partial::default, Partial::merge);

    Ok(OutputDistribution {
        spec,
        blank,
        max_steps,
        machines,
        runs,
        halting: total.halting,
        longest_halt: total.longest,
        counts: total.counts.into_iter().collect(),
    })
}
