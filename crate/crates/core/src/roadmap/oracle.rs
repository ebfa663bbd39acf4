//! Ground-truth collision checking: body box polytopes against obstacle box
//! polytopes at every discretized configuration.

use super::graph::{ComponentId, Roadmap, Scene};
use crate::error::Result;
use crate::geometry::{polytopes_intersect, Aabb, ConvexPolytope, Rigid, BROADPHASE_PAD};
use crate::swept::{discretize_edge, Configuration, ObstacleModel, RobotModel};

/// An obstacle's posed box as a polytope, with a padded bounding box used as
/// a prefilter.
#[derive(Debug, Clone)]
pub struct ObstacleSolid {
    polytope: ConvexPolytope,
    aabb: Aabb,
}

impl ObstacleSolid {
    pub fn new(o: &ObstacleModel) -> Self {
        Self {
            polytope: o.polytope(),
            aabb: o.outer_aabb().padded(BROADPHASE_PAD),
        }
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }
}

#[derive(Debug, Clone)]
pub struct ExactOracle {
    robot: RobotModel,
    eps: f64,
    local: Vec<ConvexPolytope>,
}

impl ExactOracle {
    pub fn new(robot: &RobotModel, eps: f64) -> Result<Self> {
        let local = robot
            .bodies()
            .iter()
            .map(|b| ConvexPolytope::from_obb(&b.local_obb()))
            .collect::<Result<Vec<_>>>()?;
        if !(eps > 0.0) {
            return Err(crate::Error::InvalidStep(eps));
        }
        Ok(Self {
            robot: robot.clone(),
            eps,
            local,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn robot(&self) -> &RobotModel {
        &self.robot
    }

    /// True when some body at some discretized configuration of `a → b`
    /// intersects some obstacle in `obstacles`.
    pub fn motion_collides(&self, a: &Configuration, b: &Configuration, obstacles: &[ObstacleSolid]) -> bool {
        if obstacles.is_empty() {
            return false;
        }
        let cfgs = discretize_edge(a, b, self.eps).expect("oracle step validated at construction");
        cfgs.iter().any(|q| self.configuration_collides(q, obstacles))
    }

    pub fn configuration_collides(&self, q: &Configuration, obstacles: &[ObstacleSolid]) -> bool {
        let poses = self.robot.fk_unchecked(q.dofs());
        poses.iter().zip(&self.local).any(|(pose, local)| {
            let body = local.transformed(pose);
            let aabb = Aabb::from_points(body.vertices());
            obstacles.iter().any(|o| {
                aabb.overlaps(&o.aabb) && polytopes_intersect(&body, &o.polytope).expect("boxes have volume")
            })
        })
    }

    pub fn component_valid(&self, roadmap: &Roadmap, c: ComponentId, obstacles: &[ObstacleSolid]) -> bool {
        let (a, b) = roadmap.endpoints(c);
        !self.motion_collides(a, b, obstacles)
    }
}

/// Exact validity of component `c` against every obstacle of `scene`.
pub fn exact_component_valid(roadmap: &Roadmap, c: ComponentId, scene: &Scene, eps: f64) -> Result<bool> {
    let oracle = ExactOracle::new(&scene.robot, eps)?;
    let solids: Vec<ObstacleSolid> = scene.obstacles.iter().map(ObstacleSolid::new).collect();
    Ok(oracle.component_valid(roadmap, c, &solids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Transform, Vec3};
    use crate::roadmap::{build_prm, PrmParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn env() -> Aabb {
        Aabb::new(Vec3::splat(-10.0), Vec3::splat(10.0))
    }

    #[test]
    fn empty_scene_is_valid() {
        let robot = RobotModel::free_box(Vec3::splat(0.5), 3.0).unwrap();
        let scene = Scene::new(env(), robot);
        let r = build_prm(&scene, &PrmParams::new(10, 4, 0.2, 1)).unwrap();
        for c in 0..r.component_count() as u32 {
            assert!(exact_component_valid(&r, c, &scene, 0.2).unwrap());
        }
    }

    #[test]
    fn coincident_obstacle_hits_node() {
        let robot = RobotModel::free_box(Vec3::splat(0.5), 3.0).unwrap();
        let q = Configuration::new(vec![1.0, 2.0, 3.0, 0.3, 0.2, 0.1]);
        let r = Roadmap::new(vec![q.clone()], vec![]).unwrap();
        let mut scene = Scene::new(env(), robot.clone());
        let pose = robot.forward_kinematics(&q).unwrap()[0];
        scene
            .obstacles
            .push(ObstacleModel::new(Vec3::splat(0.5), None).unwrap().with_pose(pose).unwrap());
        assert!(!exact_component_valid(&r, 0, &scene, 0.1).unwrap());
        scene.obstacles[0].set_pose(Transform::from_translation(Vec3::splat(5.0))).unwrap();
        assert!(exact_component_valid(&r, 0, &scene, 0.1).unwrap());
    }

    #[test]
    fn agrees_with_quarter_step() {
        let robot = RobotModel::free_box(Vec3::splat(0.5), 3.0).unwrap();
        let eps = 0.05;
        let mut scene = Scene::new(env(), robot.clone());
        let r = build_prm(&scene, &PrmParams::new(60, 6, eps, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fine = ExactOracle::new(&robot, eps / 4.0).unwrap();
        let coarse = ExactOracle::new(&robot, eps).unwrap();
        let mut colliding = 0;
        for round in 0..100 {
            scene.obstacles = (0..3)
                .map(|_| {
                    let h = Vec3::new(rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
                    let t = Vec3::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
                    ObstacleModel::new(h, None).unwrap().with_pose(Transform::from_translation(t)).unwrap()
                })
                .collect();
            let solids: Vec<_> = scene.obstacles.iter().map(ObstacleSolid::new).collect();
            let c = (round * 7 % r.component_count()) as u32;
            let a = coarse.component_valid(&r, c, &solids);
            let b = fine.component_valid(&r, c, &solids);
            colliding += usize::from(!a);
            assert_eq!(a, b, "component {c}");
        }
        assert!(colliding > 0);
    }
}
