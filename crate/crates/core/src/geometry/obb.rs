//! Oriented bounding boxes: corner layout, the 15-axis separating axis test,
//! and fitting a box around a point cloud.

use nalgebra::{Matrix3, SymmetricEigen};

use super::primitives::Aabb;
use super::transform::{Rigid, Transform};
use super::vec::{Mat3, Vec3};
use crate::error::{Error, Result};

/// Cross-product axes with a squared norm below this are skipped.
pub const DEGENERATE_AXIS_EPS: f64 = 1e-12;

/// Eight box corners. Corner `i` takes the `+` side of axis `k` when bit `k`
/// of `i` is set.
pub type Corners = [Vec3; 8];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obb {
    pub center: Vec3,
    pub axes: [Vec3; 3],
    pub half_extents: Vec3,
}

impl Obb {
    pub fn new(center: Vec3, axes: [Vec3; 3], half_extents: Vec3) -> Self {
        Self {
            center,
            axes,
            half_extents,
        }
    }

    /// World-aligned box centered at `center`.
    pub fn aligned(center: Vec3, half_extents: Vec3) -> Self {
        Self::new(center, [Vec3::X, Vec3::Y, Vec3::Z], half_extents)
    }

    pub fn from_aabb(b: &Aabb) -> Self {
        Self::aligned(b.center(), b.extent() * 0.5)
    }

    pub fn corners(&self) -> Corners {
        let h = self.half_extents;
        let e = [self.axes[0] * h.x, self.axes[1] * h.y, self.axes[2] * h.z];
        std::array::from_fn(|i| {
            let mut c = self.center;
            for (k, ek) in e.iter().enumerate() {
                if i & (1 << k) != 0 {
                    c += *ek;
                } else {
                    c -= *ek;
                }
            }
            c
        })
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }

    /// Containment with an absolute `slack` on every face.
    pub fn contains_point(&self, p: Vec3, slack: f64) -> bool {
        let d = p - self.center;
        (0..3).all(|k| d.dot(self.axes[k]).abs() <= self.half_extents[k] + slack)
    }

    /// Axes pairwise orthogonal and unit within `tol`, extents nonnegative.
    pub fn is_valid(&self, tol: f64) -> bool {
        let m = Mat3::from_cols(self.axes[0], self.axes[1], self.axes[2]);
        m.orthonormality_error() <= tol
            && self.half_extents.min_element() >= 0.0
            && self.center.is_finite()
            && self.half_extents.is_finite()
    }
}

impl Rigid for Obb {
    fn transformed(&self, t: &Transform) -> Self {
        Obb::new(
            t.apply_point(self.center),
            self.axes.map(|a| t.apply_vector(a)),
            self.half_extents,
        )
    }
}

/// Tightest axis-aligned box of the eight corners, computed as their exact
/// componentwise min and max.
pub fn aabb_of_obb(o: &Obb) -> Aabb {
    aabb_of_corners(&o.corners())
}

pub fn aabb_of_corners(c: &Corners) -> Aabb {
    Aabb::from_points(c.iter())
}

/// Unit face normals recovered from a corner array. Zero-length box edges
/// (flat, needle or point boxes) are completed to an orthonormal frame so the
/// test stays complete for degenerate boxes.
#[inline]
pub fn corner_axes(c: &Corners) -> [Vec3; 3] {
    let raw = [
        (c[1] - c[0]).normalized(),
        (c[2] - c[0]).normalized(),
        (c[4] - c[0]).normalized(),
    ];
    match raw {
        [Some(a), Some(b), Some(d)] => [a, b, d],
        [Some(a), Some(b), None] => [a, b, a.cross(b).normalized().unwrap_or(a.any_orthogonal())],
        [Some(a), None, Some(d)] => [a, d.cross(a).normalized().unwrap_or(a.any_orthogonal()), d],
        [None, Some(b), Some(d)] => [b.cross(d).normalized().unwrap_or(b.any_orthogonal()), b, d],
        [Some(a), None, None] | [None, Some(a), None] | [None, None, Some(a)] => {
            let u = a.any_orthogonal();
            [a, u, a.cross(u)]
        }
        [None, None, None] => [Vec3::X, Vec3::Y, Vec3::Z],
    }
}

#[inline]
fn project(c: &Corners, axis: Vec3) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in c {
        let d = p.dot(axis);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (lo, hi)
}

/// True when `axis` strictly separates the two corner sets. Touching
/// projections do not separate.
#[inline]
pub fn axis_separates(a: &Corners, b: &Corners, axis: Vec3) -> bool {
    let (alo, ahi) = project(a, axis);
    let (blo, bhi) = project(b, axis);
    ahi < blo || bhi < alo
}

/// The candidate separating axes for two boxes: three face normals of each
/// followed by the nine pairwise cross products. Cross products with squared
/// norm below [`DEGENERATE_AXIS_EPS`] are reported as masked (`None`).
#[inline]
pub fn sat_axes(fa: &[Vec3; 3], fb: &[Vec3; 3]) -> [Option<Vec3>; 15] {
    let mut out = [None; 15];
    for k in 0..3 {
        out[k] = Some(fa[k]);
        out[3 + k] = Some(fb[k]);
    }
    for i in 0..3 {
        for j in 0..3 {
            let c = fa[i].cross(fb[j]);
            if c.norm_squared() >= DEGENERATE_AXIS_EPS {
                out[6 + 3 * i + j] = Some(c);
            }
        }
    }
    out
}

/// 15-axis separating axis test on two corner arrays. Returns `true` when no
/// candidate axis separates them (touching counts as intersecting).
#[inline]
pub fn sat_corners(a: &Corners, b: &Corners) -> bool {
    let axes = sat_axes(&corner_axes(a), &corner_axes(b));
    !axes
        .iter()
        .flatten()
        .any(|axis| axis_separates(a, b, *axis))
}

pub fn obb_intersects_obb(a: &Obb, b: &Obb) -> bool {
    sat_corners(&a.corners(), &b.corners())
}

/// Largest projected gap over the 15 (unit) SAT axes. Positive values are a
/// separation distance along the best axis, negative values a penetration
/// depth along the least-overlapping one.
pub fn sat_margin(a: &Obb, b: &Obb) -> f64 {
    let (ca, cb) = (a.corners(), b.corners());
    sat_axes(&corner_axes(&ca), &corner_axes(&cb))
        .iter()
        .flatten()
        .filter_map(|axis| axis.normalized())
        .map(|axis| {
            let (alo, ahi) = project(&ca, axis);
            let (blo, bhi) = project(&cb, axis);
            (blo - ahi).max(alo - bhi)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn box_in_frame(axes: &[Vec3; 3], points: &[Vec3]) -> Obb {
    let mut lo = Vec3::splat(f64::INFINITY);
    let mut hi = Vec3::splat(f64::NEG_INFINITY);
    for p in points {
        let q = Vec3::new(p.dot(axes[0]), p.dot(axes[1]), p.dot(axes[2]));
        lo = lo.min(q);
        hi = hi.max(q);
    }
    let mid = (lo + hi) * 0.5;
    let center = axes[0] * mid.x + axes[1] * mid.y + axes[2] * mid.z;
    Obb::new(center, *axes, (hi - lo) * 0.5)
}

fn frame_volume(axes: &[Vec3; 3], points: &[Vec3]) -> f64 {
    let mut v = 1.0;
    for a in axes {
        let (lo, hi) = points
            .iter()
            .map(|p| p.dot(*a))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), d| (l.min(d), h.max(d)));
        v *= hi - lo;
    }
    v
}

fn pca_frame(points: &[Vec3]) -> [Vec3; 3] {
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec3::ZERO, |s, p| s + *p) * (1.0 / n);
    let mut cov = Matrix3::<f64>::zeros();
    for p in points {
        let d = *p - mean;
        let d = [d.x, d.y, d.z];
        for i in 0..3 {
            for j in 0..3 {
                cov[(i, j)] += d[i] * d[j];
            }
        }
    }
    let eig = SymmetricEigen::new(cov / n);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let col = |k: usize| {
        let c = eig.eigenvectors.column(order[k]);
        Vec3::new(c[0], c[1], c[2])
    };
    let e0 = col(0).normalized().unwrap_or(Vec3::X);
    // Re-orthogonalize to absorb eigensolver round-off.
    let e1 = (col(1) - e0 * col(1).dot(e0))
        .normalized()
        .unwrap_or_else(|| e0.any_orthogonal());
    let e2 = e0.cross(e1);
    [e0, e1, e2]
}

/// Points extreme along the 26 lattice directions of `frame` and along a
/// fan of directions tilted up to 24° around each signed frame axis. These
/// pin the box extents for every orientation the refinement grid visits.
fn extreme_subset(frame: &[Vec3; 3], points: &[Vec3]) -> Vec<Vec3> {
    let mut dirs = Vec::with_capacity(26 + 6 * 25);
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for k in -1i32..=1 {
                if (i, j, k) != (0, 0, 0) {
                    dirs.push(frame[0] * i as f64 + frame[1] * j as f64 + frame[2] * k as f64);
                }
            }
        }
    }
    let tilts = [-24.0f64, -12.0, 0.0, 12.0, 24.0].map(|d| d.to_radians().tan());
    for k in 0..3 {
        let (u, v) = (frame[(k + 1) % 3], frame[(k + 2) % 3]);
        for sign in [1.0, -1.0] {
            for tu in tilts {
                for tv in tilts {
                    dirs.push(frame[k] * sign + u * tu + v * tv);
                }
            }
        }
    }
    let mut picked: Vec<usize> = dirs
        .iter()
        .map(|d| {
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for (idx, p) in points.iter().enumerate() {
                let v = p.dot(*d);
                if v > best_v {
                    best_v = v;
                    best = idx;
                }
            }
            best
        })
        .collect();
    picked.sort_unstable();
    picked.dedup();
    picked.into_iter().map(|i| points[i]).collect()
}

/// Orientation refinement passes as (half range, step) in degrees. Each pass
/// is centered on the previous winner; together they reach about ±24° from the
/// principal frame at a final resolution of 0.25°.
const REFINE_PASSES: [(f64, f64); 5] = [(15.0, 7.5), (6.0, 3.0), (2.0, 1.0), (1.0, 0.5), (0.5, 0.25)];

fn refine_pass(base: &[Vec3; 3], subset: &[Vec3], half_range: f64, step: f64) -> ([Vec3; 3], f64) {
    let base_mat = Mat3::from_cols(base[0], base[1], base[2]);
    let n = (half_range / step).round() as i32;
    let angle = |i: i32| (i as f64 * step).to_radians();
    let rx: Vec<Mat3> = (-n..=n).map(|i| Mat3::rot_x(angle(i))).collect();
    let ry: Vec<Mat3> = (-n..=n).map(|i| Mat3::rot_y(angle(i))).collect();
    let rz: Vec<Mat3> = (-n..=n).map(|i| base_mat.mul_mat(&Mat3::rot_z(angle(i)))).collect();
    let mut best_axes = *base;
    let mut best_vol = frame_volume(base, subset);
    for (c, zc) in rz.iter().enumerate() {
        for (b, yb) in ry.iter().enumerate() {
            let zy = zc.mul_mat(yb);
            for (a, xa) in rx.iter().enumerate() {
                if a as i32 == n && b as i32 == n && c as i32 == n {
                    continue;
                }
                let axes = zy.mul_mat(xa).cols;
                let v = frame_volume(&axes, subset);
                if v < best_vol {
                    best_vol = v;
                    best_axes = axes;
                }
            }
        }
    }
    (best_axes, best_vol)
}

/// Fits an oriented box around `points`.
///
/// The orientation starts from the principal axes of the point covariance and
/// is refined by grid searches over small rotations of that frame, scored on
/// the points that are extreme in the principal frame. The chosen orientation
/// is then sized against every point, and the result is never larger than the
/// principal-axis box. Extents are padded by a relative 1e-10 so that
/// round-off cannot leave an input point outside.
pub fn obb_from_points(points: &[Vec3]) -> Result<Obb> {
    if points.is_empty() {
        return Err(Error::EmptyPointCloud);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    if points.iter().all(|p| *p == points[0]) {
        return Ok(Obb::aligned(points[0], Vec3::ZERO));
    }

    let frame = pca_frame(points);
    let pca_box = box_in_frame(&frame, points);

    let subset = extreme_subset(&frame, points);
    let mut best_axes = frame;
    for (half_range, step) in REFINE_PASSES {
        best_axes = refine_pass(&best_axes, &subset, half_range, step).0;
    }

    let refined = box_in_frame(&best_axes, points);
    let mut chosen = if refined.volume() < pca_box.volume() {
        refined
    } else {
        pca_box
    };
    let pad = 1e-10 * chosen.half_extents.max_element() + 1e-12;
    chosen.half_extents = chosen.half_extents + Vec3::splat(pad);
    Ok(chosen)
}
