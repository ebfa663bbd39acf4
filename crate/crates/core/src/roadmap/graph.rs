use crate::error::{Error, Result};
use crate::geometry::Aabb;
use crate::swept::{Configuration, EdgeGeometry, ObstacleModel, RobotModel};

/// Component id. Nodes come first (`0..node_count`), then edges.
pub type ComponentId = u32;
pub type ObstacleId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ValidityState {
    /// Green: guaranteed collision free.
    Valid = 0,
    /// Red: guaranteed colliding.
    Invalid = 1,
    /// Gray: not decided by the approximations.
    Unknown = 2,
}

impl ValidityState {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Self::Valid),
            1 => Some(Self::Invalid),
            2 => Some(Self::Unknown),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Valid => "green",
            Self::Invalid => "red",
            Self::Unknown => "gray",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    Node,
    Edge,
}

/// An undirected roadmap graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Roadmap {
    nodes: Vec<Configuration>,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
}

impl Roadmap {
    /// Builds a roadmap from nodes and edges. Each edge is stored with its
    /// smaller endpoint first; duplicates and self-loops are rejected.
    pub fn new(nodes: Vec<Configuration>, edges: Vec<(u32, u32)>) -> Result<Self> {
        let dofs = nodes.first().map_or(0, Configuration::len);
        if let Some(c) = nodes.iter().find(|c| c.len() != dofs) {
            return Err(Error::DofMismatch {
                expected: dofs,
                got: c.len(),
            });
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut stored = Vec::with_capacity(edges.len());
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a as usize >= nodes.len() || b as usize >= nodes.len() {
                return Err(Error::InvalidParameter(format!("edge {e} references a missing node")));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("edge {e} is a self-loop")));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::InvalidParameter(format!("edge {e} duplicates ({}, {})", key.0, key.1)));
            }
            adjacency[a as usize].push(e as u32);
            adjacency[b as usize].push(e as u32);
            stored.push(key);
        }
        Ok(Self {
            nodes,
            edges: stored,
            adjacency,
        })
    }

    pub fn nodes(&self) -> &[Configuration] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Edge ids incident to `node`.
    pub fn adjacency(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn component_count(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    pub fn kind(&self, c: ComponentId) -> ComponentKind {
        if (c as usize) < self.nodes.len() {
            ComponentKind::Node
        } else {
            ComponentKind::Edge
        }
    }

    pub fn edge_component(&self, edge: u32) -> ComponentId {
        (self.nodes.len() + edge as usize) as ComponentId
    }

    /// Start and end configuration of a component; a node is the motion
    /// from its configuration to itself.
    pub fn endpoints(&self, c: ComponentId) -> (&Configuration, &Configuration) {
        let c = c as usize;
        if c < self.nodes.len() {
            (&self.nodes[c], &self.nodes[c])
        } else {
            let (a, b) = self.edges[c - self.nodes.len()];
            (&self.nodes[a as usize], &self.nodes[b as usize])
        }
    }
}

/// Approximations of every component of a roadmap, in component order.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadmapGeometry {
    /// Discretization step used for every component.
    pub eps: f64,
    /// Segment cap applied when the splines were split.
    pub segment_cap: usize,
    /// Robot inner spheres, body-local.
    pub spheres: crate::swept::BodySpheres,
    pub components: Vec<EdgeGeometry>,
}

impl RoadmapGeometry {
    /// Builds the approximations of every component in parallel. The result
    /// does not depend on the thread count.
    pub fn build(
        roadmap: &Roadmap,
        robot: &RobotModel,
        eps: f64,
        sphere_count: Option<usize>,
        segment_cap: usize,
    ) -> Result<Self> {
        use rayon::prelude::*;
        let spheres = crate::swept::BodySpheres::for_robot(robot, sphere_count, eps)?;
        let components = (0..roadmap.component_count() as ComponentId)
            .into_par_iter()
            .map(|c| {
                let (a, b) = roadmap.endpoints(c);
                EdgeGeometry::for_motion(robot, &spheres, a, b, eps, segment_cap)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            eps,
            segment_cap,
            spheres,
            components,
        })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// A roadmap with the robot it was built for and its approximations, shared
/// read-only by the update engines.
#[derive(Debug, Clone)]
pub struct RoadmapBundle {
    pub robot: RobotModel,
    pub roadmap: Roadmap,
    pub geometry: RoadmapGeometry,
}

impl RoadmapBundle {
    pub fn new(robot: RobotModel, roadmap: Roadmap, geometry: RoadmapGeometry) -> Result<Self> {
        if geometry.components.len() != roadmap.component_count() {
            return Err(Error::InvalidParameter(format!(
                "{} geometry blocks for {} components",
                geometry.components.len(),
                roadmap.component_count()
            )));
        }
        if geometry.spheres.per_body.len() != robot.body_count()
            || geometry.components.iter().any(|g| g.over.len() != robot.body_count())
        {
            return Err(Error::InvalidParameter("geometry does not match the robot's bodies".into()));
        }
        Ok(Self {
            robot,
            roadmap,
            geometry,
        })
    }

    pub fn component_count(&self) -> usize {
        self.roadmap.component_count()
    }
}

/// The workspace: bounds, obstacles by id and the robot.
#[derive(Debug, Clone)]
pub struct Scene {
    pub bounds: Aabb,
    pub obstacles: Vec<ObstacleModel>,
    pub robot: RobotModel,
}

impl Scene {
    pub fn new(bounds: Aabb, robot: RobotModel) -> Self {
        Self {
            bounds,
            obstacles: Vec::new(),
            robot,
        }
    }

    pub fn obstacle(&self, id: ObstacleId) -> Result<&ObstacleModel> {
        self.obstacles.get(id as usize).ok_or(Error::UnknownObstacle(id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(x: f64) -> Configuration {
        Configuration::new(vec![x])
    }

    #[test]
    fn edges_are_normalized() {
        let r = Roadmap::new(vec![cfg(0.0), cfg(1.0), cfg(2.0)], vec![(2, 0), (1, 2)]).unwrap();
        assert_eq!(r.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(r.adjacency(2), &[0, 1]);
        assert_eq!(r.component_count(), 5);
        assert_eq!(r.kind(2), ComponentKind::Node);
        assert_eq!(r.kind(3), ComponentKind::Edge);
        assert_eq!(r.endpoints(3), (&cfg(0.0), &cfg(2.0)));
        assert_eq!(r.endpoints(1), (&cfg(1.0), &cfg(1.0)));
    }

    #[test]
    fn bad_edges_rejected() {
        let n = vec![cfg(0.0), cfg(1.0)];
        assert!(Roadmap::new(n.clone(), vec![(0, 0)]).is_err());
        assert!(Roadmap::new(n.clone(), vec![(0, 1), (1, 0)]).is_err());
        assert!(Roadmap::new(n, vec![(0, 5)]).is_err());
    }
}
