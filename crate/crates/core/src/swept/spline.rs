//! Sphere-center polylines and their shortcut simplification.

use crate::geometry::{segment_point_distance, Aabb, Segment, Vec3};

/// A polyline traced by a sphere center, with the sphere's radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    pub points: Vec<Vec3>,
    pub radius: f64,
}

impl Spline {
    pub fn new(points: Vec<Vec3>, radius: f64) -> Self {
        debug_assert!(!points.is_empty());
        Self { points, radius }
    }

    /// Number of segments; a single-point spline has one degenerate segment.
    pub fn segment_count(&self) -> usize {
        self.points.len().saturating_sub(1).max(1)
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        let single = (self.points.len() == 1).then(|| Segment::new(self.points[0], self.points[0]));
        single
            .into_iter()
            .chain(self.points.windows(2).map(|w| Segment::new(w[0], w[1])))
    }

    /// Box around the swept sphere.
    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.points.iter()).padded(self.radius)
    }
}

fn shortcut_ok(points: &[Vec3], j: usize, p: usize, radius: f64) -> bool {
    let seg = Segment::new(points[j], points[p]);
    points[j + 1..p]
        .iter()
        .all(|c| segment_point_distance(&seg, *c) < radius)
}

/// Greedy forward shortcutting. From the current index `j`, the shortcut end
/// `p` is pushed forward while every skipped center lies strictly within
/// `radius` of the segment `points[j]..points[p]`. First and last points are
/// always kept; repeated consecutive points are collapsed.
pub fn simplify_spline(points: &[Vec3], radius: f64) -> Vec<Vec3> {
    assert!(!points.is_empty(), "simplify_spline needs at least one point");
    let n = points.len();
    let mut out = vec![points[0]];
    let mut j = 0;
    while j + 1 < n {
        let mut p = j + 1;
        while p + 1 < n && shortcut_ok(points, j, p + 1, radius) {
            p += 1;
        }
        if points[p] != *out.last().unwrap() {
            out.push(points[p]);
        }
        j = p;
    }
    out
}

/// Splits a spline into pieces of at most `cap` segments. Consecutive pieces
/// share their boundary point, so the union of pieces covers the original.
pub fn split_spline(spline: &Spline, cap: usize) -> Vec<Spline> {
    assert!(cap >= 1);
    if spline.segment_count() <= cap {
        return vec![spline.clone()];
    }
    let last = spline.points.len() - 1;
    (0..last)
        .step_by(cap)
        .map(|start| {
            let end = (start + cap).min(last);
            Spline::new(spline.points[start..=end].to_vec(), spline.radius)
        })
        .collect()
}

/// For each point removed by [`simplify_spline`], the distance to the segment
/// that replaced it. Used to recheck the shortcut criterion independently.
pub fn shortcut_deviations(raw: &[Vec3], simplified: &[Vec3]) -> Vec<f64> {
    let mut devs = Vec::new();
    let mut k = 0;
    for w in simplified.windows(2) {
        let start = raw[k..].iter().position(|p| *p == w[0]).map(|i| i + k).unwrap();
        let end = raw[start + 1..]
            .iter()
            .position(|p| *p == w[1])
            .map(|i| i + start + 1)
            .unwrap();
        let seg = Segment::new(w[0], w[1]);
        devs.extend(
            raw[start + 1..end]
                .iter()
                .filter(|c| **c != w[0] && **c != w[1])
                .map(|c| segment_point_distance(&seg, *c)),
        );
        k = end;
    }
    devs
}
