//! Pseudo-rigid-body blade kinematics.
//!
//! A leg blade is a planar chain of `blade_nodes` rigid links joined by
//! torsional hinges, rotating in the segment's sagittal (y-z) plane about
//! the motor shaft. Hinge 0 sits between the shaft and the first link, so a
//! single-node blade is one link on one hinge; with the hinge held rigid the
//! load torque on the shaft reduces to the plain lever arm `r × F`.
//!
//! The links are massless: environment forces on the nodes transmit fully
//! to the carrying segment, and their generalized torques on the shaft and
//! hinge coordinates drive the motor load and the hinge deflections. Hinges
//! relax under a first-order spring-damper law integrated with the spring
//! term implicit, which stays stable for arbitrarily stiff (even effectively
//! rigid) blades.

use crate::math::{UnitQuat, Vec3};
use crate::real::Real;

/// Kinematics of one blade at one instant, with the partial derivatives
/// needed to project node forces onto the joint coordinates.
pub struct BladeFrame<T> {
    /// World position of each node (link end), root link first.
    pub node_positions: Vec<Vec3<T>>,
    /// World velocity of each node.
    pub node_velocities: Vec<Vec3<T>>,
    /// World unit normal of the blade face at each node.
    pub node_normals: Vec<Vec3<T>>,
    /// World position of the shaft.
    pub hip_position: Vec3<T>,
    /// Segment-frame prefix sums of the angle-derivative basis, scaled by
    /// the link length: `∂p_j/∂θ_shaft` in the segment frame.
    basis_prefix: Vec<Vec3<T>>,
    segment_rotation: UnitQuat<T>,
}

impl<T: Real> BladeFrame<T> {
    /// Builds the blade frame from the carrying segment's state and the
    /// joint coordinates. `hip_local` is the shaft position in the segment
    /// frame; `link_len` the length of one link.
    #[allow(clippy::too_many_arguments)]
    pub fn compute(
        seg_position: Vec3<T>,
        seg_rotation: UnitQuat<T>,
        seg_velocity: Vec3<T>,
        seg_ang_velocity: Vec3<T>,
        hip_local: Vec3<T>,
        link_len: T,
        shaft_angle: T,
        shaft_speed: T,
        hinge_angles: &[T],
        hinge_rates: &[T],
    ) -> Self {
        let n = hinge_angles.len();
        let mut node_positions = Vec::with_capacity(n);
        let mut node_velocities = Vec::with_capacity(n);
        let mut node_normals = Vec::with_capacity(n);
        let mut basis_prefix = Vec::with_capacity(n);

        let hip_arm = seg_rotation.rotate(hip_local);
        let hip_position = seg_position + hip_arm;

        let mut angle = shaft_angle;
        let mut rate = shaft_speed;
        let mut pos_local = hip_local;
        let mut vel_local = Vec3::zero();
        let mut basis = Vec3::zero();
        for j in 0..n {
            angle += hinge_angles[j];
            rate += hinge_rates[j];
            let (s, c) = angle.sin_cos();
            // Link direction: angle 0 points straight down; increasing angle
            // sweeps the tip rearward (−y).
            let dir = Vec3::new(T::zero(), -s, -c);
            let tangent = Vec3::new(T::zero(), -c, s);
            pos_local += dir * link_len;
            vel_local += tangent * (link_len * rate);
            basis += tangent * link_len;

            let arm = seg_rotation.rotate(pos_local);
            node_positions.push(seg_position + arm);
            node_velocities
                .push(seg_velocity + seg_ang_velocity.cross(arm) + seg_rotation.rotate(vel_local));
            node_normals.push(seg_rotation.rotate(tangent));
            basis_prefix.push(basis);
        }

        Self {
            node_positions,
            node_velocities,
            node_normals,
            hip_position,
            basis_prefix,
            segment_rotation: seg_rotation,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_positions.len()
    }

    /// Generalized torque of a world-frame force at node `j` on the shaft
    /// coordinate: `F · ∂p_j/∂θ_shaft`.
    pub fn shaft_torque_of(&self, j: usize, force_world: Vec3<T>) -> T {
        let f_local = self.segment_rotation.rotate_inv(force_world);
        f_local.dot(self.basis_prefix[j])
    }

    /// Generalized torque of a world-frame force at node `j` on hinge `h`
    /// (zero for nodes proximal to the hinge).
    pub fn hinge_torque_of(&self, h: usize, j: usize, force_world: Vec3<T>) -> T {
        if j < h {
            return T::zero();
        }
        let f_local = self.segment_rotation.rotate_inv(force_world);
        let basis = if h == 0 {
            self.basis_prefix[j]
        } else {
            self.basis_prefix[j] - self.basis_prefix[h - 1]
        };
        f_local.dot(basis)
    }
}

/// Spring-damper torque carried by each hinge at its current deflection:
/// `τ_h = −k_h·θ_h − c_h·θ̇_h`, root hinge first.
pub fn hinge_spring_torques<T: Real>(
    hinge_angles: &[T],
    hinge_rates: &[T],
    stiffness: &[T],
    damping: &[T],
) -> Vec<T> {
    hinge_angles
        .iter()
        .zip(hinge_rates)
        .zip(stiffness.iter().zip(damping))
        .map(|((&a, &r), (&k, &c))| -(k * a) - c * r)
        .collect()
}

/// Advances one hinge by `dt` under the external generalized torque
/// `env_torque`, with the spring implicit:
///
/// `c·θ̇ = τ_env − k·θ'  ⇒  θ' = (θ + dt·τ_env/c) / (1 + dt·k/c)`
///
/// Degenerate cases: with `c = 0` the hinge balances quasi-statically
/// (`θ' = τ_env/k`); with both zero it holds its angle.
pub fn hinge_step<T: Real>(angle: T, env_torque: T, stiffness: T, damping: T, dt: T) -> T {
    if damping > T::zero() {
        (angle + dt * env_torque / damping) / (T::one() + dt * stiffness / damping)
    } else if stiffness > T::zero() {
        env_torque / stiffness
    } else {
        angle
    }
}
