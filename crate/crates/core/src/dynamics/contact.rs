//! Penalty ground contact with regularized Coulomb friction.
//!
//! The ground is the infinite plane z = 0. Normal force is a unilateral
//! spring-damper on penetration depth; the damper only acts while
//! approaching, so the contact never pulls down. Friction opposes the
//! tangential slip velocity with magnitude capped at μ·N, ramping linearly
//! to zero below a small regularization speed to avoid chatter at rest.

use crate::math::Vec3;
use crate::model::LandParams;
use crate::real::{lit, Real};

/// Slip speed below which friction ramps linearly to zero [m/s].
pub const FRICTION_REG_SPEED: f64 = 1e-3;

/// A force application point: a blade station or a hull corner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactNode<T> {
    /// World position [m].
    pub position: Vec3<T>,
    /// World velocity [m/s].
    pub velocity: Vec3<T>,
    /// Unit normal of the blade face at this node (hydro drag projection).
    pub face_normal: Vec3<T>,
    /// Effective area [m²]; blade node areas sum to the blade planform.
    pub area: T,
    /// 1-based id of the attached leg, 0 for hull nodes.
    pub leg: usize,
    /// Blade station index from the root, 0 for hull nodes.
    pub station: usize,
}

/// Contact force on a node, zero at or above the ground plane.
pub fn ground_contact_force<T: Real>(node: &ContactNode<T>, land: &LandParams<T>) -> Vec3<T> {
    let z = node.position.z;
    if z >= T::zero() {
        return Vec3::zero();
    }
    let depth = -z;
    let approach = (-node.velocity.z).max(T::zero());
    let normal = land.contact_stiffness * depth + land.contact_damping * approach;

    let mut force = Vec3::new(T::zero(), T::zero(), normal);
    let slip = Vec3::new(node.velocity.x, node.velocity.y, T::zero());
    let speed = slip.norm();
    let cap = land.friction_mu * normal;
    if speed > T::zero() && cap > T::zero() {
        let reg = lit::<T>(FRICTION_REG_SPEED);
        let scale = if speed > reg { cap / speed } else { cap / reg };
        force -= slip * scale;
    }
    force
}
