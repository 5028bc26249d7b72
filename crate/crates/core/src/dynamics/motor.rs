//! Velocity-controlled servo model.
//!
//! Each motor regulates shaft speed toward the commanded gait rate with a
//! saturated PI loop. Resistance from the environment shows up as load
//! torque; holding speed against it raises the applied torque and with it
//! the estimated current, which is how stance phases become visible in the
//! motor telemetry.

use crate::dynamics::state::MotorState;
use crate::model::MotorParams;
use crate::real::Real;

impl<T: Real> MotorState<T> {
    /// Motor at rest at `angle`, drawing idle current.
    pub fn at_rest(angle: T, params: &MotorParams<T>) -> Self {
        Self {
            angle,
            speed: T::zero(),
            applied_torque: T::zero(),
            current: params.idle_current,
            voltage: params.voltage,
            integral: T::zero(),
        }
    }

    /// Motor already spinning at `speed`.
    pub fn spinning(angle: T, speed: T, params: &MotorParams<T>) -> Self {
        Self {
            speed,
            ..Self::at_rest(angle, params)
        }
    }
}

/// Advances one motor by `dt`.
///
/// `load_torque` is the torque the environment exerts against the shaft
/// (positive = resisting positive rotation). The applied torque saturates at
/// `torque_limit` with integral anti-windup; current is estimated as
/// `i0 + |τ|/k_t`; the angle integrates the updated speed.
pub fn motor_step<T: Real>(
    motor: &MotorState<T>,
    params: &MotorParams<T>,
    load_torque: T,
    target_speed: T,
    dt: T,
) -> MotorState<T> {
    let mut next = *motor;
    let lim = params.torque_limit;
    if params.enabled {
        let err = target_speed - motor.speed;
        next.integral = clamp(motor.integral + params.ki * err * dt, -lim, lim);
        next.applied_torque = clamp(params.kp * err + next.integral, -lim, lim);
    } else {
        next.integral = T::zero();
        next.applied_torque = T::zero();
    }
    next.speed = motor.speed + (next.applied_torque - load_torque) / params.rotor_inertia * dt;
    next.angle = motor.angle + next.speed * dt;
    next.current = params.idle_current + next.applied_torque.abs() / params.k_t;
    next.voltage = params.voltage;
    next
}

#[inline]
fn clamp<T: Real>(x: T, lo: T, hi: T) -> T {
    x.max(lo).min(hi)
}
