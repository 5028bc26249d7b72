//! Water forces: blade-element quadratic drag and hull buoyancy.
//!
//! The water is a half-space below `water_level`; anything above it sees no
//! fluid force (no air drag, no added mass, no waves). Blade nodes get flat
//! plate drag on the area they project normal to their motion; the hull gets
//! buoyancy from a box-slab volume split into four columns so that tilting
//! shifts the centroid and rights the body.

use crate::dynamics::contact::ContactNode;
use crate::dynamics::state::SegmentState;
use crate::math::Vec3;
use crate::model::{RobotModel, WaterParams, WorldKind, WorldModel};
use crate::real::{lit, Real};

/// Quadratic drag on a node relative to still water; zero above the surface.
///
/// `F = −½·ρ·C_d·A_eff·|v|·v` with `A_eff` the node area projected normal to
/// the motion direction (`A·|v̂·n̂|`, blade face normal n̂).
pub fn hydro_force<T: Real>(node: &ContactNode<T>, water: &WaterParams<T>) -> Vec3<T> {
    if node.position.z >= water.water_level {
        return Vec3::zero();
    }
    let v = node.velocity;
    let speed2 = v.norm_squared();
    if speed2 == T::zero() {
        return Vec3::zero();
    }
    let speed = speed2.sqrt();
    let projected = node.area * (v.dot(node.face_normal) / speed).abs();
    let half = lit::<T>(0.5);
    v * -(half * water.fluid_density * water.drag_coeff * projected * speed)
}

/// Buoyant force and torque (about the segment center of mass) from the
/// segment's share of the hull volume.
///
/// The volume is split into four vertical columns at the quarter points of
/// the segment footprint; each column is filled from its own bottom corner
/// depth, and its force is applied at its submerged centroid.
pub fn buoyancy_force_torque<T: Real>(
    seg: &SegmentState<T>,
    world: &WorldModel<T>,
    robot: &RobotModel<T>,
) -> (Vec3<T>, Vec3<T>) {
    debug_assert_eq!(world.kind, WorldKind::Water);
    let water = &world.water;
    let h = robot.segment_height;
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    let col_volume = robot.segment_float_volume() * quarter;
    let wq = robot.segment_width * quarter;
    let lq = robot.segment_length * quarter;

    let mut force = Vec3::zero();
    let mut torque = Vec3::zero();
    for (sx, sy) in [(true, true), (true, false), (false, true), (false, false)] {
        let local = Vec3::new(
            if sx { wq } else { -wq },
            if sy { lq } else { -lq },
            -h * half,
        );
        let bottom = seg.position + seg.orientation.rotate(local);
        let fraction = ((water.water_level - bottom.z) / h)
            .max(T::zero())
            .min(T::one());
        if fraction == T::zero() {
            continue;
        }
        let magnitude = water.fluid_density * world.gravity * col_volume * fraction;
        let f = Vec3::new(T::zero(), T::zero(), magnitude);
        let centroid = Vec3::new(bottom.x, bottom.y, bottom.z + fraction * h * half);
        force += f;
        torque += (centroid - seg.position).cross(f);
    }
    (force, torque)
}

/// Total buoyant force on one segment.
pub fn buoyancy_force<T: Real>(
    seg: &SegmentState<T>,
    world: &WorldModel<T>,
    robot: &RobotModel<T>,
) -> Vec3<T> {
    buoyancy_force_torque(seg, world, robot).0
}

/// Mean submerged fraction of the segment's four buoyancy columns, 0..1.
pub fn submerged_fraction<T: Real>(
    seg: &SegmentState<T>,
    water: &WaterParams<T>,
    robot: &RobotModel<T>,
) -> T {
    let h = robot.segment_height;
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    let wq = robot.segment_width * quarter;
    let lq = robot.segment_length * quarter;
    let mut sum = T::zero();
    for (sx, sy) in [(true, true), (true, false), (false, true), (false, false)] {
        let local = Vec3::new(
            if sx { wq } else { -wq },
            if sy { lq } else { -lq },
            -h * half,
        );
        let bottom = seg.position + seg.orientation.rotate(local);
        sum += ((water.water_level - bottom.z) / h)
            .max(T::zero())
            .min(T::one());
    }
    sum * quarter
}

/// Hull drag: quadratic in the segment velocity, scaled by the submerged
/// fraction, plus rotational damping. Crude by intent; the blades dominate.
pub fn hull_drag<T: Real>(
    seg: &SegmentState<T>,
    water: &WaterParams<T>,
    robot: &RobotModel<T>,
) -> (Vec3<T>, Vec3<T>) {
    let fraction = submerged_fraction(seg, water, robot);
    if fraction == T::zero() {
        return (Vec3::zero(), Vec3::zero());
    }
    let half = lit::<T>(0.5);
    let area = robot.segment_width * robot.segment_height * fraction;
    let v = seg.linear_velocity;
    let speed = v.norm();
    let force = v * -(half * water.fluid_density * water.body_drag_coeff * area * speed);
    let torque = seg.angular_velocity * -(water.body_angular_damping * fraction);
    (force, torque)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::UnitQuat;
    use approx::assert_relative_eq;

    fn node(vel: Vec3<f64>, area: f64, normal: Vec3<f64>) -> ContactNode<f64> {
        ContactNode {
            position: Vec3::new(0.0, 0.0, -0.05),
            velocity: vel,
            face_normal: normal,
            area,
            leg: 1,
            station: 0,
        }
    }

    fn water() -> WaterParams<f64> {
        WaterParams {
            fluid_density: 1000.0,
            drag_coeff: 1.2,
            body_drag_coeff: 0.35,
            body_angular_damping: 0.05,
            water_level: 0.0,
        }
    }

    #[test]
    fn still_fluid_no_force() {
        let f = hydro_force(&node(Vec3::zero(), 1e-3, Vec3::new(0.0, 1.0, 0.0)), &water());
        assert_eq!(f, Vec3::zero());
    }

    #[test]
    fn above_surface_no_force() {
        let mut n = node(Vec3::new(1.0, 0.0, 0.0), 1e-3, Vec3::new(1.0, 0.0, 0.0));
        n.position.z = 0.01;
        assert_eq!(hydro_force(&n, &water()), Vec3::zero());
    }

    #[test]
    fn broadside_drag_magnitude() {
        // ρ=1000, C_d=1.2, A=10 cm², v=0.2 m/s head-on → |F| = 0.024 N.
        let v = Vec3::new(0.0, 0.2, 0.0);
        let f = hydro_force(&node(v, 10e-4, Vec3::new(0.0, 1.0, 0.0)), &water());
        assert_relative_eq!(f.norm(), 0.024, epsilon = 1e-12);
        assert!(f.y < 0.0);
    }

    #[test]
    fn doubling_speed_quadruples_force() {
        let v = Vec3::new(0.13, -0.07, 0.02);
        let n1 = node(v, 3e-4, Vec3::new(0.0, 0.8, 0.6));
        let n2 = node(v * 2.0, 3e-4, Vec3::new(0.0, 0.8, 0.6));
        let f1 = hydro_force(&n1, &water());
        let f2 = hydro_force(&n2, &water());
        assert_eq!(f2.norm(), 4.0 * f1.norm());
    }

    #[test]
    fn odd_in_velocity() {
        let v = Vec3::new(0.1, 0.2, -0.3);
        let f_pos = hydro_force(&node(v, 3e-4, Vec3::new(0.0, 1.0, 0.0)), &water());
        let f_neg = hydro_force(&node(-v, 3e-4, Vec3::new(0.0, 1.0, 0.0)), &water());
        assert_eq!(f_neg, -f_pos);
    }

    #[test]
    fn edgewise_motion_sees_no_projected_area() {
        // Velocity perpendicular to the face normal → zero drag.
        let f = hydro_force(
            &node(Vec3::new(1.0, 0.0, 0.0), 1e-3, Vec3::new(0.0, 1.0, 0.0)),
            &water(),
        );
        assert_relative_eq!(f.norm(), 0.0, epsilon = 1e-15);
    }

    fn world_water() -> WorldModel<f64> {
        let mut w = WorldModel::defaults();
        w.kind = WorldKind::Water;
        w
    }

    #[test]
    fn fully_submerged_liter_displaces_one_kilogram() {
        // 1 L fully submerged → ρ·g·V = 9.81 N up.
        let mut robot = RobotModel::<f64>::defaults();
        robot.n_segments = 1;
        robot.n_legs = 2;
        robot.float_volume = 1e-3;
        let seg = SegmentState::at_rest(Vec3::new(0.0, 0.0, -1.0), UnitQuat::identity());
        let f = buoyancy_force(&seg, &world_water(), &robot);
        assert_relative_eq!(f.z, 9.81, epsilon = 1e-12);
        assert_eq!((f.x, f.y), (0.0, 0.0));
    }

    #[test]
    fn above_water_no_buoyancy() {
        let robot = RobotModel::<f64>::defaults();
        let seg = SegmentState::at_rest(Vec3::new(0.0, 0.0, 1.0), UnitQuat::identity());
        assert_eq!(buoyancy_force(&seg, &world_water(), &robot), Vec3::zero());
    }

    #[test]
    fn equilibrium_fraction_balances_weight() {
        // Static balance: submerged fraction = m·g / (ρ·g·V_float).
        let robot = RobotModel::<f64>::defaults();
        let world = world_water();
        let expect = robot.total_mass / (world.water.fluid_density * robot.float_volume);
        assert!(expect < 1.0);
        // Place one segment at the draft implied by that fraction.
        let h = robot.segment_height;
        let z = h / 2.0 - expect * h;
        let seg = SegmentState::at_rest(Vec3::new(0.0, 0.0, z), UnitQuat::identity());
        let f = buoyancy_force(&seg, &world, &robot);
        let weight = robot.segment_mass() * world.gravity;
        assert_relative_eq!(f.z, weight, epsilon = 1e-9);
    }

    #[test]
    fn tilt_produces_righting_torque() {
        let robot = RobotModel::<f64>::defaults();
        let world = world_water();
        // Roll the segment about the travel axis while half submerged.
        let seg = SegmentState::at_rest(
            Vec3::new(0.0, 0.0, 0.0),
            UnitQuat::from_scaled_axis(Vec3::new(0.0, 0.3, 0.0)),
        );
        let (_, torque) = buoyancy_force_torque(&seg, &world, &robot);
        // The deeper side gains buoyancy; torque must oppose the roll.
        assert!(torque.y < 0.0, "torque = {torque:?}");
    }
}
