use crate::error::{BenchError, Result};
use crate::report::{Preprocess, Report, Row};
use crate::scenario::{EngineChoice, Mode, Scenario};
use rgg_core::batch::{BatchConfig, BatchEngine};
use rgg_core::rgg::{EngineConfig, SequentialEngine};
use rgg_core::roadmap::{build_prm, load_roadmap, PrmParams, RoadmapBundle, RoadmapGeometry, Scene};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

/// A roadmap with its approximations and how long they took to make.
#[derive(Clone)]
pub struct Prepared {
    pub bundle: Arc<RoadmapBundle>,
    pub preprocess: Preprocess,
}

fn micros(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e6
}

/// Samples the obstacle-free roadmap and builds its approximations.
pub fn build_bundle(s: &Scenario) -> Result<Prepared> {
    let robot = s.robot_model()?;
    let scene = Scene::new(s.bounds(), robot.clone());
    let r = &s.roadmap;
    let t = Instant::now();
    let roadmap = build_prm(&scene, &PrmParams::new(r.nodes, r.neighbors, r.eps, r.seed))?;
    let roadmap_us = micros(t);
    let t = Instant::now();
    let geometry = RoadmapGeometry::build(&roadmap, &robot, r.eps, r.sphere_count, r.segment_cap)?;
    let geometry_us = micros(t);
    let preprocess = Preprocess {
        nodes: roadmap.node_count(),
        edges: roadmap.edge_count(),
        roadmap_us,
        geometry_us,
        setup_us: 0.0,
    };
    Ok(Prepared {
        bundle: Arc::new(RoadmapBundle::new(robot, roadmap, geometry)?),
        preprocess,
    })
}

/// Loads a roadmap saved by `build` and pairs it with the scenario's robot.
pub fn load_bundle(s: &Scenario, path: &Path) -> Result<Prepared> {
    let robot = s.robot_model()?;
    let t = Instant::now();
    let (roadmap, geometry) = load_roadmap(path)?;
    for q in roadmap.nodes() {
        robot.check_configuration(q)?;
    }
    let preprocess = Preprocess {
        nodes: roadmap.node_count(),
        edges: roadmap.edge_count(),
        roadmap_us: micros(t),
        geometry_us: 0.0,
        setup_us: 0.0,
    };
    Ok(Prepared {
        bundle: Arc::new(RoadmapBundle::new(robot, roadmap, geometry)?),
        preprocess,
    })
}

pub fn batch_config(s: &Scenario) -> BatchConfig {
    BatchConfig {
        engine: EngineConfig {
            under_phase: s.under_phase,
        },
        cell_capacity: s.cell_capacity,
        sat_cells: s.sat_cells,
    }
}

/// Replays the scenario's move script. With both engines selected, labels
/// and obstacle bitsets are compared after every move.
pub fn run_prepared(s: &Scenario, prepared: Prepared) -> Result<Report> {
    let Prepared { bundle, mut preprocess } = prepared;
    let obstacles = s.obstacles()?;
    let config = batch_config(s);
    let t = Instant::now();
    let mut seq = match s.engine {
        EngineChoice::Sequential | EngineChoice::Both => {
            Some(SequentialEngine::new(bundle.clone(), obstacles.clone(), config.engine)?)
        }
        EngineChoice::Batch => None,
    };
    let mut batch = match s.engine {
        EngineChoice::Batch | EngineChoice::Both => Some(BatchEngine::new(bundle, obstacles, &s.bounds(), config)?),
        EngineChoice::Sequential => None,
    };
    preprocess.setup_us = micros(t);

    let lazy = s.mode == Mode::Lazy;
    let mut rows = Vec::new();
    for (i, &(o, pose)) in s.move_script().iter().enumerate() {
        if let Some(e) = seq.as_mut() {
            rows.push(Row::update(i, "sequential", &e.update_obstacle(o, pose, lazy)?));
        }
        if let Some(e) = batch.as_mut() {
            let r = e.batch_update(&[(o, pose)], lazy)?;
            rows.push(Row::update(i, "batch", &r[0]));
        }
        if let (Some(a), Some(b)) = (&seq, &batch) {
            let (sa, sb) = (a.snapshot(), b.snapshot());
            if let Some(diff) = sa.diff(&sb) {
                return Err(BenchError::Mismatch { iteration: i, diff });
            }
        }
    }
    Ok(Report {
        scenario: s.name.clone(),
        preprocess: Some(preprocess),
        rows,
    })
}

pub fn run_scenario(s: &Scenario) -> Result<Report> {
    run_prepared(s, build_bundle(s)?)
}
