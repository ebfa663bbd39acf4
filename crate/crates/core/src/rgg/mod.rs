//! The red-green-gray update engine over bounding-volume hierarchies, plus
//! the report and label types shared with the batch engine.

mod engine;
mod narrow;
mod tree;

pub use engine::SequentialEngine;
pub use narrow::{corners_hit, narrow_over_test, narrow_under_test, spline_hits};
pub use tree::AabbTree;

use crate::roadmap::{ComponentId, ObstacleId, ValidityState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    /// Run the inner-approximation tests. Disabling them leaves only the
    /// outer tests, which can prove validity but never invalidity.
    pub under_phase: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self { under_phase: true }
    }
}

/// Outcome of one obstacle update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateReport {
    pub obstacle: ObstacleId,
    /// Touched components whose state changed, by new state.
    pub newly_valid: usize,
    pub newly_invalid: usize,
    pub newly_unknown: usize,
    /// Totals after the update.
    pub valid: usize,
    pub invalid: usize,
    pub unknown: usize,
    /// Unknown components that are edges (nodes excluded).
    pub unknown_edges: usize,
    pub revalidated: usize,
    pub over_candidates: usize,
    pub over_hits: usize,
    pub under_candidates: usize,
    pub under_hits: usize,
    /// Inner hits on components without an outer hit. Nonzero values mean an
    /// approximation is inconsistent.
    pub under_without_over: usize,
    pub resolved: usize,
    pub resolved_invalid: usize,
    pub revalidate_us: f64,
    pub over_us: f64,
    pub under_us: f64,
    pub resolve_us: f64,
}

impl UpdateReport {
    pub fn total_us(&self) -> f64 {
        self.revalidate_us + self.over_us + self.under_us + self.resolve_us
    }
}

/// Component states plus, per component, the set of obstacles whose outer
/// box currently overlaps it, as a dense bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSnapshot {
    pub states: Vec<ValidityState>,
    pub words_per_component: usize,
    pub bits: Vec<u64>,
}

impl LabelSnapshot {
    pub fn obstacles_of(&self, c: ComponentId) -> Vec<ObstacleId> {
        let w = self.words_per_component;
        let row = &self.bits[c as usize * w..(c as usize + 1) * w];
        (0..w * 64)
            .filter(|&i| row[i / 64] >> (i % 64) & 1 == 1)
            .map(|i| i as ObstacleId)
            .collect()
    }

    /// Describes the first differences from `other`, or `None` if equal.
    pub fn diff(&self, other: &Self) -> Option<String> {
        if self == other {
            return None;
        }
        if self.states.len() != other.states.len() {
            return Some(format!("component counts differ: {} vs {}", self.states.len(), other.states.len()));
        }
        let lines: Vec<String> = (0..self.states.len() as ComponentId)
            .filter(|&c| {
                self.states[c as usize] != other.states[c as usize] || self.obstacles_of(c) != other.obstacles_of(c)
            })
            .take(10)
            .map(|c| {
                format!(
                    "component {c}: {:?} {:?} vs {:?} {:?}",
                    self.states[c as usize],
                    self.obstacles_of(c),
                    other.states[c as usize],
                    other.obstacles_of(c)
                )
            })
            .collect();
        Some(lines.join("\n"))
    }

    pub fn count(&self, s: ValidityState) -> usize {
        self.states.iter().filter(|&&x| x == s).count()
    }
}

pub(crate) fn words_for(obstacles: usize) -> usize {
    obstacles.div_ceil(64).max(1)
}

/// State array with running totals, shared by both engines.
#[derive(Debug, Clone)]
pub(crate) struct StateBook {
    pub states: Vec<ValidityState>,
    counts: [usize; 3],
    node_count: usize,
    unknown_nodes: usize,
}

impl StateBook {
    pub fn new(components: usize, node_count: usize) -> Self {
        Self {
            states: vec![ValidityState::Valid; components],
            counts: [components, 0, 0],
            node_count,
            unknown_nodes: 0,
        }
    }

    pub fn set(&mut self, c: ComponentId, s: ValidityState) {
        let old = std::mem::replace(&mut self.states[c as usize], s);
        self.counts[old as usize] -= 1;
        self.counts[s as usize] += 1;
        if (c as usize) < self.node_count {
            if old == ValidityState::Unknown {
                self.unknown_nodes -= 1;
            }
            if s == ValidityState::Unknown {
                self.unknown_nodes += 1;
            }
        }
    }

    pub fn get(&self, c: ComponentId) -> ValidityState {
        self.states[c as usize]
    }

    /// Fills the totals and transition counts of `r`. `before` holds the
    /// pre-update state of every touched component, sorted by id.
    pub fn finish_report(&self, r: &mut UpdateReport, before: &[(ComponentId, ValidityState)]) {
        for &(c, old) in before {
            let new = self.get(c);
            if new != old {
                match new {
                    ValidityState::Valid => r.newly_valid += 1,
                    ValidityState::Invalid => r.newly_invalid += 1,
                    ValidityState::Unknown => r.newly_unknown += 1,
                }
            }
        }
        r.valid = self.counts[0];
        r.invalid = self.counts[1];
        r.unknown = self.counts[2];
        r.unknown_edges = self.counts[2] - self.unknown_nodes;
    }
}

/// Records the first-seen state of each touched component.
#[derive(Debug, Default)]
pub(crate) struct Touched {
    seen: std::collections::HashMap<ComponentId, ValidityState>,
}

impl Touched {
    pub fn touch(&mut self, c: ComponentId, s: ValidityState) {
        self.seen.entry(c).or_insert(s);
    }

    /// Touched components with their first-seen state, sorted by id.
    pub fn into_sorted(self) -> Vec<(ComponentId, ValidityState)> {
        let mut v: Vec<_> = self.seen.into_iter().collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }
}

pub(crate) fn micros(t: std::time::Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e6
}
