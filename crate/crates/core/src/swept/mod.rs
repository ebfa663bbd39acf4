//! Robot models, edge discretization and the swept-volume approximations.

mod approx;
mod obstacle;
mod robot;
mod spheres;
mod spline;

pub use approx::{
    build_inner_approx, build_outer_approx, default_epsilon, discretize_edge, EdgeGeometry, DEFAULT_SEGMENT_CAP,
};
pub use obstacle::{posed_corners, posed_spheres, ObstacleModel};
pub use robot::{BodyBox, Configuration, Joint, Kinematics, RobotModel};
pub use spheres::{default_sphere_count, obstacle_inner_spheres, sphere_in_box, BodySpheres};
pub use spline::{shortcut_deviations, simplify_spline, split_spline, Spline};
