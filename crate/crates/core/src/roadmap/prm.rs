use super::graph::{Roadmap, Scene};
use super::oracle::{ExactOracle, ObstacleSolid};
use crate::error::{Error, Result};
use crate::swept::Configuration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct PrmParams {
    pub n_nodes: usize,
    pub k_neighbors: usize,
    /// Discretization step used when discarding colliding components.
    pub eps: f64,
    pub seed: u64,
}

impl PrmParams {
    pub fn new(n_nodes: usize, k_neighbors: usize, eps: f64, seed: u64) -> Self {
        Self {
            n_nodes,
            k_neighbors,
            eps,
            seed,
        }
    }
}

/// Indices of the `k` nearest other nodes, ties broken by index.
fn nearest(nodes: &[Configuration], i: usize, k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = nodes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, c)| (nodes[i].distance(c), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if d.len() > k {
        d.select_nth_unstable_by(k - 1, cmp);
        d.truncate(k);
    }
    d.sort_unstable_by(cmp);
    d.into_iter().map(|(_, j)| j).collect()
}

/// Samples `n_nodes` configurations uniformly within the robot's DOF bounds
/// and joins each to its `k_neighbors` nearest neighbors with straight edges.
/// With obstacles in `scene`, colliding nodes and edges are dropped.
pub fn build_prm(scene: &Scene, p: &PrmParams) -> Result<Roadmap> {
    if p.n_nodes == 0 {
        return Err(Error::InvalidParameter("n_nodes must be at least 1".into()));
    }
    if p.k_neighbors == 0 {
        return Err(Error::InvalidParameter("k_neighbors must be at least 1".into()));
    }
    let bounds = scene.robot.dof_bounds(&scene.bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut nodes: Vec<Configuration> = (0..p.n_nodes)
        .map(|_| Configuration::new(bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()))
        .collect();

    let solids: Vec<ObstacleSolid> = scene.obstacles.iter().map(ObstacleSolid::new).collect();
    let oracle = ExactOracle::new(&scene.robot, p.eps)?;
    if !solids.is_empty() {
        nodes.retain(|q| !oracle.motion_collides(q, q, &solids));
    }

    let mut pairs: Vec<(u32, u32)> = (0..nodes.len())
        .flat_map(|i| {
            nearest(&nodes, i, p.k_neighbors)
                .into_iter()
                .map(move |j| (i.min(j) as u32, i.max(j) as u32))
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    if !solids.is_empty() {
        pairs.retain(|&(a, b)| !oracle.motion_collides(&nodes[a as usize], &nodes[b as usize], &solids));
    }
    Roadmap::new(nodes, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Transform, Vec3};
    use crate::swept::{ObstacleModel, RobotModel};

    fn scene() -> Scene {
        Scene::new(
            Aabb::new(Vec3::splat(-10.0), Vec3::splat(10.0)),
            RobotModel::free_box(Vec3::splat(0.5), std::f64::consts::PI).unwrap(),
        )
    }

    #[test]
    fn ten_nodes() {
        let r = build_prm(&scene(), &PrmParams::new(10, 16, 0.05, 1)).unwrap();
        assert_eq!(r.node_count(), 10);
        assert!((40..=120).contains(&r.edge_count()), "{}", r.edge_count());
    }

    #[test]
    fn single_node_has_no_edges() {
        for k in [1, 5, 100] {
            let r = build_prm(&scene(), &PrmParams::new(1, k, 0.05, 9)).unwrap();
            assert_eq!(r.edge_count(), 0);
        }
        assert!(build_prm(&scene(), &PrmParams::new(0, 5, 0.05, 9)).is_err());
    }

    #[test]
    fn seeded_builds_repeat() {
        let p = PrmParams::new(200, 8, 0.05, 42);
        let a = build_prm(&scene(), &p).unwrap();
        let b = build_prm(&scene(), &p).unwrap();
        assert_eq!(a, b);
        let bits = |r: &Roadmap| r.nodes().iter().flat_map(|c| c.0.iter().map(|v| v.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(a, build_prm(&scene(), &PrmParams { seed: 43, ..p }).unwrap());
    }

    #[test]
    fn knn_degree_and_bounds() {
        let s = scene();
        let r = build_prm(&s, &PrmParams::new(300, 6, 0.05, 5)).unwrap();
        for i in 0..r.node_count() as u32 {
            assert!(r.adjacency(i).len() >= 6);
        }
        for q in r.nodes() {
            for (v, (lo, hi)) in q.0.iter().zip(s.robot.dof_bounds(&s.bounds)) {
                assert!(*v >= lo && *v <= hi);
            }
        }
    }

    #[test]
    fn obstacles_prune_components() {
        let mut s = scene();
        s.obstacles.push(
            ObstacleModel::new(Vec3::new(4.0, 4.0, 10.0), None)
                .unwrap()
                .with_pose(Transform::IDENTITY)
                .unwrap(),
        );
        let p = PrmParams::new(80, 5, 0.1, 2);
        let free = build_prm(&scene(), &p).unwrap();
        let pruned = build_prm(&s, &p).unwrap();
        assert!(pruned.node_count() < free.node_count());
        let oracle = ExactOracle::new(&s.robot, 0.1).unwrap();
        let solids = vec![ObstacleSolid::new(&s.obstacles[0])];
        for c in 0..pruned.component_count() as u32 {
            assert!(oracle.component_valid(&pruned, c, &solids));
        }
    }
}
