//! Information contribution of elements and minimal-information-loss deletion.
//!
//! An element's contribution is `C(object) - C(object without it)`. Each sweep
//! of [`mils`] ranks every element and deletes all the most neutral ones at
//! once, which makes the outcome independent of element order.

mod objects;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdm::{BdmError, EstimatorConfig};

pub use objects::{EdgeDeletion, NodeDeletion};

/// Largest element count accepted by [`subset_search`].
pub const SUBSET_SEARCH_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum MilsError {
    #[error("target size {target} exceeds the {count} elements present")]
    TargetTooLarge { target: usize, count: usize },
    #[error("object has no elements to rank")]
    NoElements,
    #[error("exhaustive subset search needs at most {SUBSET_SEARCH_LIMIT} elements, got {0}")]
    TooManyElements(usize),
    #[error("unknown element id {0}")]
    UnknownElement(usize),
    #[error(transparent)]
    Estimator(#[from] BdmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    #[default]
    Serial,
    /// Spread contribution evaluations over the current rayon pool.
    Parallel,
}

/// An object whose elements can be deleted one subset at a time.
///
/// Element ids are stable: deleting some elements never renumbers the rest.
pub trait Perturbable: Sync {
    /// Ids of the elements still present, ascending.
    fn element_ids(&self) -> Vec<usize>;

    fn element_count(&self) -> usize {
        self.element_ids().len()
    }

    fn complexity(&self, cfg: &EstimatorConfig) -> Result<f64, BdmError>;

    /// Complexity after deleting `ids`, leaving `self` untouched.
    fn complexity_without(&self, ids: &[usize], cfg: &EstimatorConfig) -> Result<f64, BdmError>;

    /// `(id, contribution)` for every present element, in id order.
    fn contributions(&self, cfg: &EstimatorConfig, exec: Execution) -> Result<Vec<(usize, f64)>, BdmError> {
        let base = self.complexity(cfg)?;
        let ids = self.element_ids();
        let one = |&id: &usize| self.complexity_without(&[id], cfg).map(|c| (id, base - c));
        match exec {
            Execution::Serial => ids.iter().map(one).collect(),
            Execution::Parallel => ids.par_iter().map(one).collect(),
        }
    }

    fn remove(&mut self, ids: &[usize]);
}

/// Contribution of one element. Negative when deletion adds information.
pub fn info_contribution<P: Perturbable + ?Sized>(object: &P, element: usize, cfg: &EstimatorConfig) -> Result<f64, MilsError> {
    if object.element_ids().binary_search(&element).is_err() {
        return Err(MilsError::UnknownElement(element));
    }
    Ok(object.complexity(cfg)? - object.complexity_without(&[element], cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub id: usize,
    pub bits: f64,
}

/// Elements in ascending order of contribution, ties by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InfoRanking {
    entries: Vec<RankEntry>,
}

impl InfoRanking {
    pub fn from_contributions(mut c: Vec<(usize, f64)>) -> Self {
        c.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        InfoRanking {
            entries: c.into_iter().map(|(id, bits)| RankEntry { id, bits }).collect(),
        }
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.id).collect()
    }

    pub fn contribution(&self, id: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.bits)
    }
}

pub fn info_rank<P: Perturbable + ?Sized>(object: &P, cfg: &EstimatorConfig, exec: Execution) -> Result<InfoRanking, MilsError> {
    let c = object.contributions(cfg, exec)?;
    if c.is_empty() {
        return Err(MilsError::NoElements);
    }
    if let Some(&(id, _)) = c.iter().find(|(_, b)| !b.is_finite()) {
        return Err(BdmError::InvalidConfig(format!("non-finite contribution for element {id}")).into());
    }
    Ok(InfoRanking::from_contributions(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Neutrality {
    /// Smallest contribution.
    #[default]
    MinLoss,
    /// Contribution closest to `log2` of the current element count.
    LogTarget,
}

/// Which elements count as neutral, and how close counts as a tie.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NeutralityMode {
    pub neutrality: Neutrality,
    pub epsilon: f64,
}

impl NeutralityMode {
    pub fn min_loss() -> Self {
        NeutralityMode {
            neutrality: Neutrality::MinLoss,
            epsilon: 0.0,
        }
    }

    pub fn log_target() -> Self {
        NeutralityMode {
            neutrality: Neutrality::LogTarget,
            epsilon: 0.0,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        assert!(epsilon >= 0.0, "tie tolerance must be non-negative");
        self.epsilon = epsilon;
        self
    }
}

/// Neutral element ids, ascending. `size` is the current element count.
pub fn neutral_elements(ranking: &InfoRanking, size: usize, mode: NeutralityMode) -> Vec<usize> {
    let score = |bits: f64| match mode.neutrality {
        Neutrality::MinLoss => bits,
        Neutrality::LogTarget => (bits - (size as f64).log2()).abs(),
    };
    let best = ranking.entries.iter().map(|e| score(e.bits)).fold(f64::INFINITY, f64::min);
    let mut ids: Vec<usize> = ranking
        .entries
        .iter()
        .filter(|e| score(e.bits) - best <= mode.epsilon)
        .map(|e| e.id)
        .collect();
    ids.sort_unstable();
    ids
}

/// One deletion sweep: ids removed together and the contribution that
/// selected them (the first selected element in ranking order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub deleted: Vec<usize>,
    pub contribution_bits: f64,
}

#[derive(Debug, Clone)]
pub struct Reduction<P> {
    pub object: P,
    pub trace: Vec<TraceStep>,
    /// Ranking computed at the start of each step.
    pub rankings: Vec<InfoRanking>,
}

impl<P: Perturbable> Reduction<P> {
    /// Elements left; may be below the target when the last sweep overshot.
    pub fn final_count(&self) -> usize {
        self.object.element_count()
    }

    pub fn trace_json(&self) -> String {
        trace_json(&self.trace)
    }
}

pub fn trace_json(trace: &[TraceStep]) -> String {
    let mut s = serde_json::to_string_pretty(trace).expect("trace serializes");
    s.push('\n');
    s
}

fn check_target<P: Perturbable + ?Sized>(object: &P, target: usize) -> Result<(), MilsError> {
    let count = object.element_count();
    if target > count {
        return Err(MilsError::TargetTooLarge { target, count });
    }
    Ok(())
}

/// Simultaneous deletion of all neutral elements per sweep until at most
/// `target` elements remain.
pub fn mils<P: Perturbable>(
    mut object: P,
    target: usize,
    cfg: &EstimatorConfig,
    mode: NeutralityMode,
    exec: Execution,
) -> Result<Reduction<P>, MilsError> {
    check_target(&object, target)?;
    let mut trace = Vec::new();
    let mut rankings = Vec::new();
    while object.element_count() > target {
        let ranking = info_rank(&object, cfg, exec)?;
        let deleted = neutral_elements(&ranking, object.element_count(), mode);
        let contribution_bits = ranking.entries.iter().find(|e| deleted.binary_search(&e.id).is_ok()).expect("neutral set is non-empty").bits;
        object.remove(&deleted);
        trace.push(TraceStep {
            step: trace.len() + 1,
            deleted,
            contribution_bits,
        });
        rankings.push(ranking);
    }
    Ok(Reduction { object, trace, rankings })
}

/// One minimum-contribution element per step, smallest id on ties.
pub fn mils_sequential<P: Perturbable>(mut object: P, target: usize, cfg: &EstimatorConfig, exec: Execution) -> Result<Reduction<P>, MilsError> {
    check_target(&object, target)?;
    let mut trace = Vec::new();
    let mut rankings = Vec::new();
    while object.element_count() > target {
        let ranking = info_rank(&object, cfg, exec)?;
        let first = ranking.entries[0];
        object.remove(&[first.id]);
        trace.push(TraceStep {
            step: trace.len() + 1,
            deleted: vec![first.id],
            contribution_bits: first.bits,
        });
        rankings.push(ranking);
    }
    Ok(Reduction { object, trace, rankings })
}

/// Exhaustive variant: each step deletes the subset `F` with the smallest
/// `C(object) - C(object without F)` among non-empty subsets that do not
/// take the count below `target`. Ties go to the subset whose bitmask over
/// the ascending id list is smallest. Exponential; a reference only.
pub fn subset_search<P: Perturbable>(mut object: P, target: usize, cfg: &EstimatorConfig) -> Result<Reduction<P>, MilsError> {
    check_target(&object, target)?;
    let count = object.element_count();
    if count > SUBSET_SEARCH_LIMIT {
        return Err(MilsError::TooManyElements(count));
    }
    let mut trace = Vec::new();
    while object.element_count() > target {
        let ids = object.element_ids();
        let quota = ids.len() - target;
        let base = object.complexity(cfg)?;
        let mut best: Option<(f64, Vec<usize>)> = None;
        for mask in 1u32..(1 << ids.len()) {
            if mask.count_ones() as usize > quota {
                continue;
            }
            let subset: Vec<usize> = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &id)| id).collect();
            let loss = base - object.complexity_without(&subset, cfg)?;
            if best.as_ref().is_none_or(|(b, _)| loss < *b) {
                best = Some((loss, subset));
            }
        }
        let (loss, deleted) = best.expect("at least one candidate subset");
        object.remove(&deleted);
        trace.push(TraceStep {
            step: trace.len() + 1,
            deleted,
            contribution_bits: loss,
        });
    }
    Ok(Reduction {
        object,
        trace,
        rankings: Vec::new(),
    })
}
