use super::vec::{Mat3, Vec3};
use crate::error::{Error, Result};

/// Rigid transform `p ↦ rotation·p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Default for Transform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        rotation: Mat3::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self::new(Mat3::IDENTITY, t)
    }

    pub fn from_rotation(r: Mat3) -> Self {
        Self::new(r, Vec3::ZERO)
    }

    /// Checks the rigid-motion invariants: orthonormal columns and det = +1
    /// (both within 1e-9), finite entries.
    pub fn validate(&self) -> Result<()> {
        if !self.rotation.is_finite() || !self.translation.is_finite() {
            return Err(Error::InvalidTransform("non-finite entry".into()));
        }
        if self.rotation.orthonormality_error() > 1e-9 {
            return Err(Error::InvalidTransform("rotation is not orthonormal".into()));
        }
        if (self.rotation.determinant() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTransform("rotation determinant is not +1".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn apply_point(&self, p: Vec3) -> Vec3 {
        self.rotation.mul_vec(p) + self.translation
    }

    #[inline]
    pub fn apply_vector(&self, v: Vec3) -> Vec3 {
        self.rotation.mul_vec(v)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Transform) -> Transform {
        Transform::new(
            self.rotation.mul_mat(&other.rotation),
            self.apply_point(other.translation),
        )
    }

    pub fn inverse(&self) -> Transform {
        let rt = self.rotation.transpose();
        Transform::new(rt, -rt.mul_vec(self.translation))
    }

    pub fn is_identity(&self) -> bool {
        *self == Transform::IDENTITY
    }
}

/// Geometry that can be moved rigidly.
pub trait Rigid: Sized {
    fn transformed(&self, t: &Transform) -> Self;
}

/// Applies `t` to any rigid geometry. The identity transform returns the
/// input bitwise unchanged.
pub fn apply_transform<G: Rigid + Clone>(t: &Transform, g: &G) -> G {
    if t.is_identity() {
        return g.clone();
    }
    g.transformed(t)
}

impl Rigid for Vec3 {
    fn transformed(&self, t: &Transform) -> Self {
        t.apply_point(*self)
    }
}
