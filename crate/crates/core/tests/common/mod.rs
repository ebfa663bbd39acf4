#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgg_core::geometry::{Aabb, Transform, Vec3};
use rgg_core::rgg::SequentialEngine;
use rgg_core::roadmap::*;
use rgg_core::swept::*;
use std::sync::Arc;

pub fn cube() -> RobotModel {
    RobotModel::free_box(Vec3::splat(0.5), std::f64::consts::PI).unwrap()
}

pub fn env(half: f64) -> Aabb {
    Aabb::new(Vec3::splat(-half), Vec3::splat(half))
}

pub fn cfg(v: &[f64]) -> Configuration {
    Configuration::new(v.to_vec())
}

/// Roadmap of explicit nodes and edges for the unit cube.
pub fn bundle_from(nodes: Vec<Configuration>, edges: Vec<(u32, u32)>, eps: f64) -> Arc<RoadmapBundle> {
    let robot = cube();
    let roadmap = Roadmap::new(nodes, edges).unwrap();
    let geometry = RoadmapGeometry::build(&roadmap, &robot, eps, None, DEFAULT_SEGMENT_CAP).unwrap();
    Arc::new(RoadmapBundle::new(robot, roadmap, geometry).unwrap())
}

/// Two nodes at x = 0 and x = 4 joined by a pure translation.
pub fn line_bundle() -> Arc<RoadmapBundle> {
    bundle_from(
        vec![cfg(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), cfg(&[4.0, 0.0, 0.0, 0.0, 0.0, 0.0])],
        vec![(0, 1)],
        0.05,
    )
}

pub fn random_bundle(seed: u64, n_nodes: usize, k: usize, eps: f64, half: f64) -> Arc<RoadmapBundle> {
    let robot = cube();
    let scene = Scene::new(env(half), robot.clone());
    let roadmap = build_prm(&scene, &PrmParams::new(n_nodes, k, eps, seed)).unwrap();
    let geometry = RoadmapGeometry::build(&roadmap, &robot, eps, None, DEFAULT_SEGMENT_CAP).unwrap();
    Arc::new(RoadmapBundle::new(robot, roadmap, geometry).unwrap())
}

pub fn obstacle(h: Vec3) -> ObstacleModel {
    ObstacleModel::new(h, None).unwrap()
}

pub fn at(x: f64, y: f64, z: f64) -> Transform {
    Transform::from_translation(Vec3::new(x, y, z))
}

/// Random obstacle boxes and a move script that keeps them inside `half`.
pub struct RandomScript {
    pub obstacles: Vec<ObstacleModel>,
    pub moves: Vec<(u32, Transform)>,
}

pub fn random_script(rng: &mut ChaCha8Rng, count: usize, moves: usize, half: f64) -> RandomScript {
    let obstacles: Vec<ObstacleModel> = (0..count)
        .map(|_| {
            obstacle(Vec3::new(
                rng.gen_range(0.3..2.5),
                rng.gen_range(0.3..2.5),
                rng.gen_range(0.3..2.5),
            ))
        })
        .collect();
    // Place every obstacle first, then move them at random.
    let mut script: Vec<(u32, Transform)> = Vec::new();
    for i in 0..count + moves {
        let o = if i < count { i } else { rng.gen_range(0..count) };
        let h = obstacles[o].half_extents();
        let t = Vec3::new(
            rng.gen_range(-half + h.x..=half - h.x),
            rng.gen_range(-half + h.y..=half - h.y),
            rng.gen_range(-half + h.z..=half - h.z),
        );
        script.push((o as u32, Transform::from_translation(t)));
    }
    RandomScript {
        obstacles,
        moves: script,
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact validity of every component against the engine's placed obstacles.
pub fn exact_truth(engine: &SequentialEngine) -> Vec<bool> {
    let data = engine.data();
    let oracle = ExactOracle::new(&data.robot, data.geometry.eps).unwrap();
    let solids = engine.placed_solids();
    (0..data.component_count() as u32)
        .map(|c| oracle.component_valid(&data.roadmap, c, &solids))
        .collect()
}

/// Components whose label contradicts the exact oracle.
pub fn violations(states: &[ValidityState], truth: &[bool]) -> Vec<usize> {
    states
        .iter()
        .zip(truth)
        .enumerate()
        .filter(|(_, (s, t))| matches!((s, t), (ValidityState::Valid, false) | (ValidityState::Invalid, true)))
        .map(|(i, _)| i)
        .collect()
}
