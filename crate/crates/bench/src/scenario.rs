use crate::error::{BenchError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rgg_core::geometry::{Aabb, Mat3, Transform, Vec3};
use rgg_core::swept::{BodyBox, Joint, Kinematics, ObstacleModel, RobotModel, DEFAULT_SEGMENT_CAP};
use serde::Deserialize;
use std::ops::Range;
use std::path::Path;
use toml::Spanned;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Sequential,
    Batch,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Lazy,
    Eager,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RobotSpec {
    /// One free-flying box of full size `size`.
    FreeBox { size: Vec3, rotation_limit: f64 },
    /// Revolute chain of `links` boxes of full size `link_size`, laid out
    /// along x with alternating z and y joint axes.
    Chain { links: usize, link_size: Vec3, joint_limit: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadmapSpec {
    pub nodes: usize,
    pub neighbors: usize,
    pub eps: f64,
    pub seed: u64,
    pub segment_cap: usize,
    pub sphere_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveSpec {
    pub iterations: usize,
    pub seed: u64,
    /// Half-range of the translation draw per axis; `None` keeps obstacles
    /// inside the environment.
    pub bounds: Option<Vec3>,
    pub rotate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Full size of the environment box, centered at the origin.
    pub environment: Vec3,
    pub robot: RobotSpec,
    pub roadmap: RoadmapSpec,
    pub obstacle_count: usize,
    /// Full size of every obstacle box.
    pub obstacle_size: Vec3,
    pub moves: MoveSpec,
    pub engine: EngineChoice,
    pub mode: Mode,
    pub under_phase: bool,
    pub cell_capacity: usize,
    pub sat_cells: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    environment: RawEnvironment,
    robot: RawRobot,
    roadmap: RawRoadmap,
    obstacles: RawObstacles,
    moves: RawMoves,
    #[serde(default)]
    run: RawRun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    size: Spanned<[f64; 3]>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
enum RobotKind {
    FreeBox,
    Chain,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRobot {
    kind: Spanned<RobotKind>,
    size: Option<Spanned<[f64; 3]>>,
    rotation_limit: Option<Spanned<f64>>,
    links: Option<Spanned<usize>>,
    link_size: Option<Spanned<[f64; 3]>>,
    joint_limit: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoadmap {
    nodes: Spanned<usize>,
    neighbors: Spanned<usize>,
    eps: Spanned<f64>,
    seed: u64,
    segment_cap: Option<Spanned<usize>>,
    sphere_count: Option<Spanned<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacles {
    count: usize,
    size: Spanned<[f64; 3]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMoves {
    iterations: Spanned<usize>,
    seed: u64,
    bounds: Option<Spanned<[f64; 3]>>,
    #[serde(default)]
    rotate: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default = "default_engine")]
    engine: EngineChoice,
    #[serde(default = "default_mode")]
    mode: Mode,
    #[serde(default = "yes")]
    under_phase: bool,
    cell_capacity: Option<Spanned<usize>>,
    #[serde(default)]
    sat_cells: bool,
}

impl Default for RawRun {
    fn default() -> Self {
        Self {
            engine: default_engine(),
            mode: default_mode(),
            under_phase: true,
            cell_capacity: None,
            sat_cells: false,
        }
    }
}

fn default_engine() -> EngineChoice {
    EngineChoice::Both
}

fn default_mode() -> Mode {
    Mode::Lazy
}

fn yes() -> bool {
    true
}

/// 1-based line and column of byte offset `at`.
fn line_col(src: &str, at: usize) -> (usize, usize) {
    let before = &src[..at.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

struct Checker<'a> {
    src: &'a str,
}

impl Checker<'_> {
    fn fail(&self, field: &str, span: Range<usize>, message: String) -> BenchError {
        let (line, column) = line_col(self.src, span.start);
        BenchError::Scenario {
            line,
            column,
            field: field.to_string(),
            message,
        }
    }

    fn positive_vec(&self, field: &str, v: &Spanned<[f64; 3]>) -> Result<Vec3> {
        let a = *v.get_ref();
        if a.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(self.fail(field, v.span(), format!("all components must be positive, got {a:?}")));
        }
        Ok(Vec3::from_array(a))
    }

    fn positive_f64(&self, field: &str, v: &Spanned<f64>) -> Result<f64> {
        let x = *v.get_ref();
        if !(x.is_finite() && x > 0.0) {
            return Err(self.fail(field, v.span(), format!("must be positive, got {x}")));
        }
        Ok(x)
    }

    fn nonzero(&self, field: &str, v: &Spanned<usize>) -> Result<usize> {
        if *v.get_ref() == 0 {
            return Err(self.fail(field, v.span(), "must be at least 1".into()));
        }
        Ok(*v.get_ref())
    }
}

impl Scenario {
    /// Parses a scenario. Errors carry the line, column and field.
    pub fn parse(src: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(src, s.start));
            BenchError::Scenario {
                line,
                column,
                field: String::new(),
                message: e.message().to_string(),
            }
        })?;
        let ck = Checker { src };
        let environment = ck.positive_vec("environment.size", &raw.environment.size)?;
        let rb = &raw.robot;
        let required = |name: &str, present: bool| -> Result<()> {
            if present {
                Ok(())
            } else {
                Err(ck.fail(&format!("robot.{name}"), rb.kind.span(), format!("this robot kind needs `{name}`")))
            }
        };
        let limit = |field: &str, v: &Option<Spanned<f64>>| match v {
            Some(r) => ck.positive_f64(field, r),
            None => Ok(std::f64::consts::PI),
        };
        let robot = match *rb.kind.get_ref() {
            RobotKind::FreeBox => {
                required("size", rb.size.is_some())?;
                RobotSpec::FreeBox {
                    size: ck.positive_vec("robot.size", rb.size.as_ref().unwrap())?,
                    rotation_limit: limit("robot.rotation_limit", &rb.rotation_limit)?,
                }
            }
            RobotKind::Chain => {
                required("links", rb.links.is_some())?;
                required("link_size", rb.link_size.is_some())?;
                RobotSpec::Chain {
                    links: ck.nonzero("robot.links", rb.links.as_ref().unwrap())?,
                    link_size: ck.positive_vec("robot.link_size", rb.link_size.as_ref().unwrap())?,
                    joint_limit: limit("robot.joint_limit", &rb.joint_limit)?,
                }
            }
        };
        let r = &raw.roadmap;
        let roadmap = RoadmapSpec {
            nodes: ck.nonzero("roadmap.nodes", &r.nodes)?,
            neighbors: ck.nonzero("roadmap.neighbors", &r.neighbors)?,
            eps: ck.positive_f64("roadmap.eps", &r.eps)?,
            seed: r.seed,
            segment_cap: match &r.segment_cap {
                Some(v) => ck.nonzero("roadmap.segment_cap", v)?,
                None => DEFAULT_SEGMENT_CAP,
            },
            sphere_count: r.sphere_count.as_ref().map(|v| ck.nonzero("roadmap.sphere_count", v)).transpose()?,
        };
        let obstacle_size = ck.positive_vec("obstacles.size", &raw.obstacles.size)?;
        let m = &raw.moves;
        if raw.obstacles.count == 0 && *m.iterations.get_ref() > 0 {
            return Err(ck.fail(
                "moves.iterations",
                m.iterations.span(),
                "moves need at least one obstacle".into(),
            ));
        }
        let bounds = match &m.bounds {
            Some(b) => {
                let a = *b.get_ref();
                if a.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(ck.fail("moves.bounds", b.span(), format!("must be nonnegative, got {a:?}")));
                }
                Some(Vec3::from_array(a))
            }
            None => None,
        };
        let cell_capacity = match &raw.run.cell_capacity {
            Some(v) => ck.nonzero("run.cell_capacity", v)?,
            None => rgg_core::batch::DEFAULT_CELL_CAPACITY,
        };
        Ok(Self {
            name: raw.name,
            environment,
            robot,
            roadmap,
            obstacle_count: raw.obstacles.count,
            obstacle_size,
            moves: MoveSpec {
                iterations: *m.iterations.get_ref(),
                seed: m.seed,
                bounds,
                rotate: m.rotate,
            },
            engine: raw.run.engine,
            mode: raw.run.mode,
            under_phase: raw.run.under_phase,
            cell_capacity,
            sat_cells: raw.run.sat_cells,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::parse(&src).map_err(|e| e.in_file(path))
    }

    pub fn bounds(&self) -> Aabb {
        let h = self.environment * 0.5;
        Aabb::new(-h, h)
    }

    pub fn robot_model(&self) -> Result<RobotModel> {
        Ok(match &self.robot {
            RobotSpec::FreeBox { size, rotation_limit } => RobotModel::free_box(*size * 0.5, *rotation_limit)?,
            RobotSpec::Chain {
                links,
                link_size,
                joint_limit,
            } => {
                let h = *link_size * 0.5;
                let bodies = (0..*links)
                    .map(|_| BodyBox::with_local(h, Transform::from_translation(Vec3::new(h.x, 0.0, 0.0))))
                    .collect();
                let joints = (0..*links)
                    .map(|i| Joint {
                        axis: if i % 2 == 0 { Vec3::Z } else { Vec3::Y },
                        origin: if i == 0 { Vec3::ZERO } else { Vec3::new(link_size.x, 0.0, 0.0) },
                        limits: (-joint_limit, *joint_limit),
                    })
                    .collect();
                RobotModel::new(
                    bodies,
                    Kinematics::SerialChain {
                        base: Transform::IDENTITY,
                        joints,
                    },
                )?
            }
        })
    }

    pub fn obstacles(&self) -> Result<Vec<ObstacleModel>> {
        (0..self.obstacle_count)
            .map(|_| Ok(ObstacleModel::new(self.obstacle_size * 0.5, None)?))
            .collect()
    }

    /// The move script: iteration `i` moves obstacle `i mod count` to a
    /// uniformly drawn absolute pose.
    pub fn move_script(&self) -> Vec<(u32, Transform)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.moves.seed);
        let reach = match self.moves.bounds {
            Some(b) => b,
            None => (self.environment - self.obstacle_size).max(Vec3::ZERO) * 0.5,
        };
        (0..self.moves.iterations)
            .map(|i| {
                let mut t = [0.0; 3];
                for (k, v) in t.iter_mut().enumerate() {
                    if reach[k] > 0.0 {
                        *v = rng.gen_range(-reach[k]..=reach[k]);
                    }
                }
                let rotation = if self.moves.rotate {
                    let a = std::f64::consts::PI;
                    Mat3::from_euler_xyz(rng.gen_range(-a..a), rng.gen_range(-a..a), rng.gen_range(-a..a))
                } else {
                    Mat3::IDENTITY
                };
                ((i % self.obstacle_count) as u32, Transform::new(rotation, Vec3::from_array(t)))
            })
            .collect()
    }
}
