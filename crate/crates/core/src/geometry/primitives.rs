use super::transform::{Rigid, Transform};
use super::vec::Vec3;

/// Axis-aligned box, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    /// An inverted box that is the identity for [`Aabb::union`].
    pub const EMPTY: Aabb = Aabb {
        min: Vec3::splat(f64::INFINITY),
        max: Vec3::splat(f64::NEG_INFINITY),
    };

    pub fn new(min: Vec3, max: Vec3) -> Self {
        debug_assert!(min.x <= max.x && min.y <= max.y && min.z <= max.z);
        Self { min, max }
    }

    pub fn from_points<'a, I: IntoIterator<Item = &'a Vec3>>(points: I) -> Aabb {
        points.into_iter().fold(Aabb::EMPTY, |b, p| b.including(*p))
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y || self.min.z > self.max.z
    }

    pub fn including(&self, p: Vec3) -> Aabb {
        Aabb {
            min: self.min.min(p),
            max: self.max.max(p),
        }
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
        }
    }

    /// Grows every side by `pad`.
    pub fn padded(&self, pad: f64) -> Aabb {
        Aabb {
            min: self.min - Vec3::splat(pad),
            max: self.max + Vec3::splat(pad),
        }
    }

    /// Closed overlap test: touching boxes overlap.
    #[inline]
    pub fn overlaps(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x
            && o.min.x <= self.max.x
            && self.min.y <= o.max.y
            && o.min.y <= self.max.y
            && self.min.z <= o.max.z
            && o.min.z <= self.max.z
    }

    pub fn contains_point(&self, p: Vec3) -> bool {
        (0..3).all(|k| self.min[k] <= p[k] && p[k] <= self.max[k])
    }

    pub fn contains(&self, o: &Aabb) -> bool {
        self.contains_point(o.min) && self.contains_point(o.max)
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb {
            min: self.center - Vec3::splat(self.radius),
            max: self.center + Vec3::splat(self.radius),
        }
    }
}

impl Rigid for Sphere {
    fn transformed(&self, t: &Transform) -> Self {
        Sphere::new(t.apply_point(self.center), self.radius)
    }
}

/// Closed segment between two points; `a == b` is a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Vec3,
    pub b: Vec3,
}

impl Segment {
    pub fn new(a: Vec3, b: Vec3) -> Self {
        Self { a, b }
    }
}

/// Euclidean distance from `p` to the closest point of `s`.
#[inline]
pub fn segment_point_distance(s: &Segment, p: Vec3) -> f64 {
    let d = s.b - s.a;
    let len2 = d.norm_squared();
    let ap = p - s.a;
    if len2 == 0.0 {
        return ap.norm();
    }
    let t = (ap.dot(d) / len2).clamp(0.0, 1.0);
    (s.a + d * t - p).norm()
}

/// Closed test of a segment inflated by `inflate` (the spline radius) against
/// a sphere.
#[inline]
pub fn segment_sphere_intersects(s: &Segment, sp: &Sphere, inflate: f64) -> bool {
    segment_point_distance(s, sp.center) <= sp.radius + inflate
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distance_examples() {
        let s = Segment::new(Vec3::ZERO, Vec3::X);
        assert_eq!(segment_point_distance(&s, Vec3::new(0.5, 1.0, 0.0)), 1.0);
        assert_eq!(segment_point_distance(&s, Vec3::new(2.0, 0.0, 0.0)), 1.0);
        let point = Segment::new(Vec3::Y, Vec3::Y);
        assert_eq!(segment_point_distance(&point, Vec3::new(0.0, 4.0, 0.0)), 3.0);
    }

    #[test]
    fn distance_matches_dense_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut r = || Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let s = Segment::new(r(), r());
            let p = r();
            let n = 1_000_000;
            let brute = (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    (s.a + (s.b - s.a) * t - p).norm()
                })
                .fold(f64::INFINITY, f64::min);
            assert!((segment_point_distance(&s, p) - brute).abs() < 1e-4);
        }
    }

    #[test]
    fn sphere_predicate_is_closed() {
        let s = Segment::new(Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0));
        let through = Sphere::new(Vec3::ZERO, 0.1);
        assert!(segment_sphere_intersects(&s, &through, 0.0));
        let touching = Sphere::new(Vec3::new(0.0, 1.5, 0.0), 1.0);
        assert!(segment_sphere_intersects(&s, &touching, 0.5));
        assert!(!segment_sphere_intersects(&s, &touching, 0.49));
    }

    #[test]
    fn sphere_predicate_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let mut r = || Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let s = Segment::new(r(), r());
            let c = r();
            let radius = rng.gen_range(0.0..1.5);
            let inflate = rng.gen_range(0.0..1.0);
            // Independent closest-point route: minimize the quadratic over t.
            let d = s.b - s.a;
            let t = if d.norm_squared() == 0.0 {
                0.0
            } else {
                ((c - s.a).dot(d) / d.dot(d)).max(0.0).min(1.0)
            };
            let closest = s.a + d * t;
            let expected = (closest - c).norm() <= radius + inflate;
            assert_eq!(segment_sphere_intersects(&s, &Sphere::new(c, radius), inflate), expected);
        }
    }

    #[test]
    fn aabb_overlap_is_closed() {
        let a = Aabb::new(Vec3::ZERO, Vec3::splat(1.0));
        let b = Aabb::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 1.0, 1.0));
        let c = Aabb::new(Vec3::new(1.0 + 1e-12, 0.0, 0.0), Vec3::new(2.0, 1.0, 1.0));
        assert!(a.overlaps(&b));
        assert!(!a.overlaps(&c));
        assert!(Aabb::EMPTY.is_empty());
        assert_eq!(Aabb::EMPTY.union(&a), a);
    }
}
