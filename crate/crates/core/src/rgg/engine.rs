use super::narrow::{corners_hit, spline_hits};
use super::tree::AabbTree;
use super::{micros, words_for, EngineConfig, LabelSnapshot, StateBook, Touched, UpdateReport};
use crate::error::{Error, Result};
use crate::geometry::{aabb_of_corners, Corners, Sphere, Transform};
use crate::roadmap::{ComponentId, ExactOracle, ObstacleId, ObstacleSolid, RoadmapBundle, ValidityState};
use crate::swept::ObstacleModel;
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy)]
struct SplineRef {
    component: ComponentId,
    body: u32,
    sphere: u32,
    piece: u32,
}

/// Reference red-green-gray engine: one tree over body boxes, one over
/// spline pieces, obstacle updates processed one at a time.
#[derive(Debug, Clone)]
pub struct SequentialEngine {
    data: Arc<RoadmapBundle>,
    config: EngineConfig,
    oracle: ExactOracle,
    obstacles: Vec<ObstacleModel>,
    placed: Vec<bool>,
    obstacle_corners: Vec<Corners>,
    obstacle_spheres: Vec<Vec<Sphere>>,
    solids: Vec<Option<ObstacleSolid>>,
    body_corners: Vec<Corners>,
    body_owner: Vec<ComponentId>,
    splines: Vec<SplineRef>,
    over_tree: Option<AabbTree<u32>>,
    under_tree: Option<AabbTree<u32>>,
    book: StateBook,
    lists: Vec<Vec<ObstacleId>>,
    members: Vec<Vec<ComponentId>>,
}

impl SequentialEngine {
    /// All components start green and no obstacle is placed; each obstacle
    /// enters the scene with its first update.
    pub fn new(data: Arc<RoadmapBundle>, obstacles: Vec<ObstacleModel>, config: EngineConfig) -> Result<Self> {
        let oracle = ExactOracle::new(&data.robot, data.geometry.eps)?;
        let mut body_corners = Vec::new();
        let mut body_owner = Vec::new();
        let mut over_items = Vec::new();
        let mut splines = Vec::new();
        let mut under_items = Vec::new();
        for (c, g) in data.geometry.components.iter().enumerate() {
            for o in &g.over {
                let corners = o.corners();
                over_items.push((aabb_of_corners(&corners), body_corners.len() as u32));
                body_corners.push(corners);
                body_owner.push(c as ComponentId);
            }
            for (b, body) in g.under.iter().enumerate() {
                for (s, pieces) in body.iter().enumerate() {
                    for (p, piece) in pieces.iter().enumerate() {
                        under_items.push((piece.aabb(), splines.len() as u32));
                        splines.push(SplineRef {
                            component: c as ComponentId,
                            body: b as u32,
                            sphere: s as u32,
                            piece: p as u32,
                        });
                    }
                }
            }
        }
        let over_tree = (!over_items.is_empty()).then(|| AabbTree::build(over_items)).transpose()?;
        let under_tree = (!under_items.is_empty()).then(|| AabbTree::build(under_items)).transpose()?;
        let n = data.component_count();
        let m = obstacles.len();
        Ok(Self {
            book: StateBook::new(n, data.roadmap.node_count()),
            lists: vec![Vec::new(); n],
            members: vec![Vec::new(); m],
            placed: vec![false; m],
            obstacle_corners: obstacles.iter().map(|o| o.outer_corners()).collect(),
            obstacle_spheres: obstacles.iter().map(|o| o.inner()).collect(),
            solids: vec![None; m],
            obstacles,
            data,
            config,
            oracle,
            body_corners,
            body_owner,
            splines,
            over_tree,
            under_tree,
        })
    }

    pub fn data(&self) -> &Arc<RoadmapBundle> {
        &self.data
    }

    pub fn states(&self) -> &[ValidityState] {
        &self.book.states
    }

    pub fn state(&self, c: ComponentId) -> ValidityState {
        self.book.get(c)
    }

    /// Obstacles whose outer box currently overlaps component `c`, ascending.
    pub fn intersecting(&self, c: ComponentId) -> &[ObstacleId] {
        &self.lists[c as usize]
    }

    pub fn obstacles(&self) -> &[ObstacleModel] {
        &self.obstacles
    }

    pub fn is_placed(&self, o: ObstacleId) -> bool {
        self.placed.get(o as usize).copied().unwrap_or(false)
    }

    /// Polytopes of every placed obstacle, for exact checks.
    pub fn placed_solids(&self) -> Vec<ObstacleSolid> {
        self.solids.iter().flatten().cloned().collect()
    }

    pub fn snapshot(&self) -> LabelSnapshot {
        let w = words_for(self.obstacles.len());
        let mut bits = vec![0u64; w * self.lists.len()];
        for (c, list) in self.lists.iter().enumerate() {
            for &o in list {
                bits[c * w + o as usize / 64] |= 1 << (o % 64);
            }
        }
        LabelSnapshot {
            states: self.book.states.clone(),
            words_per_component: w,
            bits,
        }
    }

    fn under_hits_obstacle(&self, c: ComponentId, o: ObstacleId) -> bool {
        let spheres = &self.obstacle_spheres[o as usize];
        self.data.geometry.components[c as usize]
            .splines()
            .any(|s| spline_hits(s, spheres))
    }

    /// Drops `o` from every component list that holds it. Components left
    /// with no obstacles become green; the rest turn gray and are re-tested
    /// against the inner spheres of their remaining obstacles.
    fn revalidate_old_intersections(&mut self, o: ObstacleId, touched: &mut Touched) -> usize {
        let members = std::mem::take(&mut self.members[o as usize]);
        for &c in &members {
            touched.touch(c, self.book.get(c));
            let list = &mut self.lists[c as usize];
            if let Ok(i) = list.binary_search(&o) {
                list.remove(i);
            }
            if list.is_empty() {
                self.book.set(c, ValidityState::Valid);
                continue;
            }
            self.book.set(c, ValidityState::Unknown);
            if self.config.under_phase {
                let hit = self.lists[c as usize].iter().any(|&o2| self.under_hits_obstacle(c, o2));
                if hit {
                    self.book.set(c, ValidityState::Invalid);
                }
            }
        }
        members.len()
    }

    /// Moves obstacle `o` to the absolute pose `pose` (world from canonical)
    /// and updates every affected label.
    pub fn update_obstacle(&mut self, o: ObstacleId, pose: Transform, lazy: bool) -> Result<UpdateReport> {
        let oi = o as usize;
        if oi >= self.obstacles.len() {
            return Err(Error::UnknownObstacle(o));
        }
        pose.validate()?;
        let mut r = UpdateReport {
            obstacle: o,
            ..Default::default()
        };
        let mut touched = Touched::default();

        let t = Instant::now();
        r.revalidated = self.revalidate_old_intersections(o, &mut touched);
        r.revalidate_us = micros(t);

        let ob = &mut self.obstacles[oi];
        ob.set_pose(pose)?;
        self.obstacle_corners[oi] = ob.outer_corners();
        self.obstacle_spheres[oi] = ob.inner();
        self.solids[oi] = Some(ObstacleSolid::new(ob));
        self.placed[oi] = true;

        let t = Instant::now();
        let mut hits = Vec::new();
        if let Some(tree) = &self.over_tree {
            let oc = &self.obstacle_corners[oi];
            tree.for_each_overlap(&aabb_of_corners(oc), |item| {
                r.over_candidates += 1;
                if corners_hit(&self.body_corners[item as usize], oc) {
                    hits.push(self.body_owner[item as usize]);
                }
            });
        }
        hits.sort_unstable();
        hits.dedup();
        for &c in &hits {
            touched.touch(c, self.book.get(c));
            let list = &mut self.lists[c as usize];
            if let Err(i) = list.binary_search(&o) {
                list.insert(i, o);
            }
            if self.book.get(c) == ValidityState::Valid {
                self.book.set(c, ValidityState::Unknown);
            }
        }
        r.over_hits = hits.len();
        self.members[oi] = hits;
        r.over_us = micros(t);

        let t = Instant::now();
        if let (true, Some(tree)) = (self.config.under_phase, &self.under_tree) {
            let spheres = &self.obstacle_spheres[oi];
            let q = spheres
                .iter()
                .fold(crate::geometry::Aabb::EMPTY, |b, s| b.union(&s.aabb()));
            let mut red = Vec::new();
            tree.for_each_overlap(&q, |item| {
                r.under_candidates += 1;
                let s = self.splines[item as usize];
                let piece = &self.data.geometry.components[s.component as usize].under[s.body as usize]
                    [s.sphere as usize][s.piece as usize];
                if spline_hits(piece, spheres) {
                    red.push(s.component);
                }
            });
            red.sort_unstable();
            red.dedup();
            for &c in &red {
                touched.touch(c, self.book.get(c));
                if let Err(i) = self.lists[c as usize].binary_search(&o) {
                    r.under_without_over += 1;
                    self.lists[c as usize].insert(i, o);
                    let m = &mut self.members[oi];
                    let at = m.binary_search(&c).unwrap_err();
                    m.insert(at, c);
                }
                self.book.set(c, ValidityState::Invalid);
            }
            r.under_hits = red.len();
        }
        r.under_us = micros(t);

        let touched = touched.into_sorted();
        let t = Instant::now();
        if !lazy {
            let solids = self.placed_solids();
            for &(c, _) in &touched {
                if self.book.get(c) == ValidityState::Unknown {
                    let valid = self.oracle.component_valid(&self.data.roadmap, c, &solids);
                    r.resolved += 1;
                    if valid {
                        self.book.set(c, ValidityState::Valid);
                    } else {
                        r.resolved_invalid += 1;
                        self.book.set(c, ValidityState::Invalid);
                    }
                }
            }
        }
        r.resolve_us = micros(t);
        self.book.finish_report(&mut r, &touched);
        Ok(r)
    }

    /// Settles every gray component with the exact oracle (the lazy query).
    pub fn resolve_unknown(&mut self) -> usize {
        let solids = self.placed_solids();
        let gray: Vec<ComponentId> = (0..self.book.states.len() as ComponentId)
            .filter(|&c| self.book.get(c) == ValidityState::Unknown)
            .collect();
        for &c in &gray {
            let s = if self.oracle.component_valid(&self.data.roadmap, c, &solids) {
                ValidityState::Valid
            } else {
                ValidityState::Invalid
            };
            self.book.set(c, s);
        }
        gray.len()
    }
}
