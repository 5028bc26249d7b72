//! Mutable simulation state.

use crate::math::{UnitQuat, Vec3};
use crate::real::Real;

/// Rigid-body state of one segment, world frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentState<T> {
    pub position: Vec3<T>,
    pub orientation: UnitQuat<T>,
    pub linear_velocity: Vec3<T>,
    pub angular_velocity: Vec3<T>,
}

impl<T: Real> SegmentState<T> {
    pub fn at_rest(position: Vec3<T>, orientation: UnitQuat<T>) -> Self {
        Self {
            position,
            orientation,
            linear_velocity: Vec3::zero(),
            angular_velocity: Vec3::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.orientation.is_finite()
            && self.linear_velocity.is_finite()
            && self.angular_velocity.is_finite()
    }
}

/// Electrical and mechanical state of one velocity-controlled servo.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotorState<T> {
    /// Accumulated shaft angle [rad] (not wrapped).
    pub angle: T,
    /// Shaft speed [rad/s].
    pub speed: T,
    /// Torque currently applied by the controller [N·m].
    pub applied_torque: T,
    /// Estimated current draw [A].
    pub current: T,
    /// Supply voltage [V].
    pub voltage: T,
    /// Integral term of the speed loop [N·m].
    pub integral: T,
}

/// One leg: servo plus the blade hinge coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LegState<T> {
    pub motor: MotorState<T>,
    /// Hinge deflections, root first [rad].
    pub hinge_angles: Vec<T>,
    /// Hinge deflection rates [rad/s].
    pub hinge_rates: Vec<T>,
    /// True while any blade node engages the environment (ground contact on
    /// land, submersion on water). Observation only.
    pub engaged: bool,
}

/// Full robot state.
#[derive(Clone, Debug, PartialEq)]
pub struct RobotState<T> {
    pub time: T,
    pub segments: Vec<SegmentState<T>>,
    pub legs: Vec<LegState<T>>,
}

impl<T: Real> RobotState<T> {
    pub fn is_finite(&self) -> bool {
        self.segments.iter().all(SegmentState::is_finite)
            && self.legs.iter().all(|l| {
                l.motor.angle.is_finite()
                    && l.motor.speed.is_finite()
                    && l.hinge_angles.iter().all(|a| a.is_finite())
            })
    }

    /// Center of mass, assuming uniform segment masses.
    pub fn center_of_mass(&self) -> Vec3<T> {
        let sum = self
            .segments
            .iter()
            .fold(Vec3::zero(), |acc, s| acc + s.position);
        sum / T::from_usize(self.segments.len()).unwrap()
    }
}
