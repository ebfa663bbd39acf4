use super::grid::{SpatialGrid, DEFAULT_CELL_CAPACITY};
use super::kernels::{batch_over, batch_under};
use super::layout::BatchLayout;
use crate::error::{Error, Result};
use crate::geometry::{aabb_of_corners, Transform};
use crate::rgg::{micros, words_for, EngineConfig, LabelSnapshot, StateBook, Touched, UpdateReport};
use crate::roadmap::{ComponentId, ExactOracle, ObstacleId, ObstacleSolid, RoadmapBundle, ValidityState};
use crate::swept::ObstacleModel;
use rayon::prelude::*;
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchConfig {
    pub engine: EngineConfig,
    pub cell_capacity: usize,
    /// Also require cells to pass a separating axis test against the
    /// obstacle box during the outer phase.
    pub sat_cells: bool,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            cell_capacity: DEFAULT_CELL_CAPACITY,
            sat_cells: false,
        }
    }
}

/// Per-component states and obstacle bitsets.
#[derive(Debug, Clone)]
pub struct LabelBuffer {
    book: StateBook,
    words: usize,
    bits: Vec<u64>,
    /// Per obstacle, the components whose bit is set, ascending.
    members: Vec<Vec<ComponentId>>,
}

impl LabelBuffer {
    fn new(components: usize, nodes: usize, obstacles: usize) -> Self {
        let words = words_for(obstacles);
        Self {
            book: StateBook::new(components, nodes),
            words,
            bits: vec![0; words * components],
            members: vec![Vec::new(); obstacles],
        }
    }

    fn word(&mut self, c: ComponentId, o: ObstacleId) -> (&mut u64, u64) {
        (&mut self.bits[c as usize * self.words + o as usize / 64], 1 << (o % 64))
    }

    fn row_empty(&self, c: ComponentId) -> bool {
        self.bits[c as usize * self.words..(c as usize + 1) * self.words]
            .iter()
            .all(|&w| w == 0)
    }

    fn has(&self, c: ComponentId, o: ObstacleId) -> bool {
        self.bits[c as usize * self.words + o as usize / 64] >> (o % 64) & 1 == 1
    }

    pub fn states(&self) -> &[ValidityState] {
        &self.book.states
    }

    pub fn snapshot(&self) -> LabelSnapshot {
        LabelSnapshot {
            states: self.book.states.clone(),
            words_per_component: self.words,
            bits: self.bits.clone(),
        }
    }
}

/// Batched red-green-gray engine over the dense layout and spatial grid.
#[derive(Debug, Clone)]
pub struct BatchEngine {
    data: Arc<RoadmapBundle>,
    config: BatchConfig,
    oracle: ExactOracle,
    obstacles: Vec<ObstacleModel>,
    solids: Vec<Option<ObstacleSolid>>,
    layout: BatchLayout,
    grid: SpatialGrid,
    labels: LabelBuffer,
}

impl BatchEngine {
    /// All components start green and no obstacle is placed.
    pub fn new(
        data: Arc<RoadmapBundle>,
        obstacles: Vec<ObstacleModel>,
        bounds: &crate::geometry::Aabb,
        config: BatchConfig,
    ) -> Result<Self> {
        let layout = BatchLayout::serialize(&data.geometry, &obstacles, None)?;
        let grid = SpatialGrid::build(&layout.component_aabb, bounds, config.cell_capacity)?;
        Ok(Self {
            oracle: ExactOracle::new(&data.robot, data.geometry.eps)?,
            labels: LabelBuffer::new(data.component_count(), data.roadmap.node_count(), obstacles.len()),
            solids: vec![None; obstacles.len()],
            obstacles,
            data,
            config,
            layout,
            grid,
        })
    }

    pub fn layout(&self) -> &BatchLayout {
        &self.layout
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn labels(&self) -> &LabelBuffer {
        &self.labels
    }

    pub fn states(&self) -> &[ValidityState] {
        self.labels.states()
    }

    pub fn snapshot(&self) -> LabelSnapshot {
        self.labels.snapshot()
    }

    pub fn placed_solids(&self) -> Vec<ObstacleSolid> {
        self.solids.iter().flatten().cloned().collect()
    }

    /// Applies `moves` in order, one report per move. Ids and poses are
    /// checked before anything changes.
    pub fn batch_update(&mut self, moves: &[(ObstacleId, Transform)], lazy: bool) -> Result<Vec<UpdateReport>> {
        if let Some(&(o, _)) = moves.iter().find(|(o, _)| *o as usize >= self.obstacles.len()) {
            return Err(Error::UnknownObstacle(o));
        }
        for (_, t) in moves {
            t.validate()?;
        }
        moves.iter().map(|&(o, t)| self.apply(o, t, lazy)).collect()
    }

    pub fn update_obstacle(&mut self, o: ObstacleId, pose: Transform, lazy: bool) -> Result<UpdateReport> {
        if o as usize >= self.obstacles.len() {
            return Err(Error::UnknownObstacle(o));
        }
        self.apply(o, pose, lazy)
    }

    fn revalidate(&mut self, o: ObstacleId, touched: &mut Touched) -> usize {
        let members = std::mem::take(&mut self.labels.members[o as usize]);
        let mut retest: Vec<ComponentId> = Vec::new();
        for &c in &members {
            touched.touch(c, self.labels.book.get(c));
            let (w, bit) = self.labels.word(c, o);
            *w &= !bit;
            if self.labels.row_empty(c) {
                self.labels.book.set(c, ValidityState::Valid);
            } else {
                self.labels.book.set(c, ValidityState::Unknown);
                retest.push(c);
            }
        }
        if self.config.engine.under_phase && !retest.is_empty() {
            let mut red = vec![false; retest.len()];
            for o2 in 0..self.obstacles.len() as ObstacleId {
                let idx: Vec<usize> = (0..retest.len())
                    .filter(|&i| !red[i] && self.labels.has(retest[i], o2))
                    .collect();
                if idx.is_empty() {
                    continue;
                }
                let cands: Vec<u32> = idx.iter().map(|&i| retest[i]).collect();
                for (i, hit) in idx.into_iter().zip(batch_under(&self.layout, &cands, o2 as usize)) {
                    red[i] |= hit;
                }
            }
            for (&c, _) in retest.iter().zip(&red).filter(|(_, &r)| r) {
                self.labels.book.set(c, ValidityState::Invalid);
            }
        }
        members.len()
    }

    fn apply(&mut self, o: ObstacleId, pose: Transform, lazy: bool) -> Result<UpdateReport> {
        let oi = o as usize;
        pose.validate()?;
        let mut r = UpdateReport {
            obstacle: o,
            ..Default::default()
        };
        let mut touched = Touched::default();

        let t = Instant::now();
        r.revalidated = self.revalidate(o, &mut touched);
        r.revalidate_us = micros(t);

        self.layout.update_transforms(&[(o, pose)])?;
        self.obstacles[oi].set_pose(pose)?;
        self.solids[oi] = Some(ObstacleSolid::new(&self.obstacles[oi]));

        let t = Instant::now();
        let oc = self.layout.obstacle_corners(oi);
        let cands = if self.config.sat_cells {
            self.grid.candidates_sat(&oc)
        } else {
            self.grid.candidates(&aabb_of_corners(&oc))
        };
        r.over_candidates = cands.len();
        let mask = batch_over(&self.layout, &cands, oi);
        let hits: Vec<ComponentId> = cands.iter().zip(&mask).filter(|(_, &m)| m).map(|(&c, _)| c).collect();
        for &c in &hits {
            touched.touch(c, self.labels.book.get(c));
            let (w, bit) = self.labels.word(c, o);
            *w |= bit;
            if self.labels.book.get(c) == ValidityState::Valid {
                self.labels.book.set(c, ValidityState::Unknown);
            }
        }
        r.over_hits = hits.len();
        self.labels.members[oi] = hits;
        r.over_us = micros(t);

        let t = Instant::now();
        if self.config.engine.under_phase {
            let cands = self.grid.candidates(&self.layout.obstacle_inner_aabb(oi));
            r.under_candidates = cands.len();
            let mask = batch_under(&self.layout, &cands, oi);
            for (&c, _) in cands.iter().zip(&mask).filter(|(_, &m)| m) {
                touched.touch(c, self.labels.book.get(c));
                if !self.labels.has(c, o) {
                    r.under_without_over += 1;
                    let (w, bit) = self.labels.word(c, o);
                    *w |= bit;
                    let m = &mut self.labels.members[oi];
                    let at = m.binary_search(&c).unwrap_err();
                    m.insert(at, c);
                }
                self.labels.book.set(c, ValidityState::Invalid);
                r.under_hits += 1;
            }
        }
        r.under_us = micros(t);

        let touched = touched.into_sorted();
        let t = Instant::now();
        if !lazy {
            let gray: Vec<ComponentId> = touched
                .iter()
                .map(|&(c, _)| c)
                .filter(|&c| self.labels.book.get(c) == ValidityState::Unknown)
                .collect();
            let solids = self.placed_solids();
            let verdicts: Vec<bool> = gray
                .par_iter()
                .map(|&c| self.oracle.component_valid(&self.data.roadmap, c, &solids))
                .collect();
            for (&c, valid) in gray.iter().zip(verdicts) {
                r.resolved += 1;
                if valid {
                    self.labels.book.set(c, ValidityState::Valid);
                } else {
                    r.resolved_invalid += 1;
                    self.labels.book.set(c, ValidityState::Invalid);
                }
            }
        }
        r.resolve_us = micros(t);
        self.labels.book.finish_report(&mut r, &touched);
        Ok(r)
    }

    /// Settles every gray component with the exact oracle.
    pub fn resolve_unknown(&mut self) -> usize {
        let solids = self.placed_solids();
        let gray: Vec<ComponentId> = (0..self.labels.book.states.len() as ComponentId)
            .filter(|&c| self.labels.book.get(c) == ValidityState::Unknown)
            .collect();
        let verdicts: Vec<bool> = gray
            .par_iter()
            .map(|&c| self.oracle.component_valid(&self.data.roadmap, c, &solids))
            .collect();
        for (&c, valid) in gray.iter().zip(verdicts) {
            self.labels
                .book
                .set(c, if valid { ValidityState::Valid } else { ValidityState::Invalid });
        }
        gray.len()
    }
}
