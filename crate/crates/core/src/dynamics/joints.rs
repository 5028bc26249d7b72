//! Compliant inter-segment couplings.
//!
//! Each printed coupling is modelled as a stiff translational spring-damper
//! holding the facing anchor points together plus an independent rotational
//! spring-damper per axis. All forces are computed once and applied
//! equal-and-opposite, so internal couplings conserve linear momentum to
//! rounding error.

use crate::math::{UnitQuat, Vec3};
use crate::model::JointSpec;
use crate::real::Real;

/// Per-axis rotational spring-damper torque, in the parent segment frame
/// `[pitch (x), roll (y), yaw (z)]`:
///
/// `τ = −k·(θ − rest) − c·θ̇`
pub fn joint_torques<T: Real>(
    relative_angles: [T; 3],
    relative_rates: [T; 3],
    rest_angles: [T; 3],
    spec: &JointSpec<T>,
) -> [T; 3] {
    let k = spec.stiffness();
    let c = spec.damping();
    let mut tau = [T::zero(); 3];
    for axis in 0..3 {
        tau[axis] = -(k[axis] * (relative_angles[axis] - rest_angles[axis]))
            - c[axis] * relative_rates[axis];
    }
    tau
}

/// Force/torque pair exchanged by two coupled segments.
pub struct CouplingWrench<T> {
    /// Force on the parent at its anchor; the child gets the negative.
    pub force_on_parent: Vec3<T>,
    /// World torque on the parent; the child gets the negative.
    pub torque_on_parent: Vec3<T>,
    /// World-frame anchor on the parent.
    pub parent_anchor: Vec3<T>,
    /// World-frame anchor on the child.
    pub child_anchor: Vec3<T>,
}

/// Evaluates the full coupling between a parent segment and the one behind
/// it. `rest_angles` are per-axis rest deflections (zero unless perturbed).
#[allow(clippy::too_many_arguments)]
pub fn coupling_wrench<T: Real>(
    parent_pos: Vec3<T>,
    parent_rot: UnitQuat<T>,
    parent_vel: Vec3<T>,
    parent_ang: Vec3<T>,
    child_pos: Vec3<T>,
    child_rot: UnitQuat<T>,
    child_vel: Vec3<T>,
    child_ang: Vec3<T>,
    rear_anchor_local: Vec3<T>,
    front_anchor_local: Vec3<T>,
    rest_angles: [T; 3],
    spec: &JointSpec<T>,
) -> CouplingWrench<T> {
    // Translational spring-damper between the facing anchor points.
    let pa_arm = parent_rot.rotate(rear_anchor_local);
    let ca_arm = child_rot.rotate(front_anchor_local);
    let pa = parent_pos + pa_arm;
    let ca = child_pos + ca_arm;
    let pv = parent_vel + parent_ang.cross(pa_arm);
    let cv = child_vel + child_ang.cross(ca_arm);
    let stretch_force =
        (ca - pa) * spec.link_stiffness + (cv - pv) * spec.link_damping;

    // Rotational spring-damper on the relative orientation, decomposed as a
    // scaled-axis vector in the parent frame.
    let rel = parent_rot.conjugate().mul_quat(child_rot).to_scaled_axis();
    let rel_rate = parent_rot.rotate_inv(child_ang - parent_ang);
    let tau_local = joint_torques(
        [rel.x, rel.y, rel.z],
        [rel_rate.x, rel_rate.y, rel_rate.z],
        rest_angles,
        spec,
    );
    // τ acts on the child; the parent receives the reaction.
    let tau_on_child = parent_rot.rotate(Vec3::new(tau_local[0], tau_local[1], tau_local[2]));

    CouplingWrench {
        force_on_parent: stretch_force,
        torque_on_parent: -tau_on_child,
        parent_anchor: pa,
        child_anchor: ca,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rest_state_is_torque_free() {
        let spec = JointSpec::<f64>::defaults();
        let tau = joint_torques([0.0; 3], [0.0; 3], [0.0; 3], &spec);
        assert_eq!(tau, [0.0; 3]);
    }

    #[test]
    fn spring_torque_is_linear_in_deflection() {
        // θ − rest = 0.1 rad, k = 2 N·m/rad → τ = −0.2 N·m.
        let spec = JointSpec::<f64>::defaults();
        let tau = joint_torques([0.1, 0.0, 0.0], [0.0; 3], [0.0; 3], &spec);
        assert_relative_eq!(tau[0], -0.2, epsilon = 1e-12);
        assert_eq!(tau[1], 0.0);
    }

    #[test]
    fn damping_torque_is_linear_in_rate() {
        // θ = rest, θ̇ = 1 rad/s, c = 0.1 → τ = −0.1 N·m.
        let spec = JointSpec::<f64>::defaults();
        let tau = joint_torques([0.0; 3], [0.0, 0.0, 1.0], [0.0; 3], &spec);
        assert_relative_eq!(tau[2], -0.1, epsilon = 1e-12);
    }

    #[test]
    fn rest_angle_shifts_the_neutral_point() {
        let spec = JointSpec::<f64>::defaults();
        let tau = joint_torques([0.05, 0.0, 0.0], [0.0; 3], [0.05, 0.0, 0.0], &spec);
        assert_eq!(tau[0], 0.0);
    }

    #[test]
    fn aligned_chain_at_rest_exchanges_nothing() {
        let spec = JointSpec::<f64>::defaults();
        let w = coupling_wrench(
            Vec3::new(0.0, 0.0, 0.0),
            UnitQuat::identity(),
            Vec3::zero(),
            Vec3::zero(),
            Vec3::new(0.0, -0.2, 0.0),
            UnitQuat::identity(),
            Vec3::zero(),
            Vec3::zero(),
            Vec3::new(0.0, -0.1, 0.0),
            Vec3::new(0.0, 0.1, 0.0),
            [0.0; 3],
            &spec,
        );
        assert_relative_eq!(w.force_on_parent.norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(w.torque_on_parent.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn separation_pulls_anchors_together() {
        let spec = JointSpec::<f64>::defaults();
        // Child 1 mm too far back: parent gets pulled rearward (−y).
        let w = coupling_wrench(
            Vec3::new(0.0, 0.0, 0.0),
            UnitQuat::identity(),
            Vec3::zero(),
            Vec3::zero(),
            Vec3::new(0.0, -0.201, 0.0),
            UnitQuat::identity(),
            Vec3::zero(),
            Vec3::zero(),
            Vec3::new(0.0, -0.1, 0.0),
            Vec3::new(0.0, 0.1, 0.0),
            [0.0; 3],
            &spec,
        );
        assert!(w.force_on_parent.y < 0.0);
        assert_relative_eq!(
            w.force_on_parent.y,
            -spec.link_stiffness * 1e-3,
            epsilon = 1e-9
        );
    }
}
