//! Desk-scale physics simulator and locomotion-metrics pipeline for a
//! segmented, 16-leg amphibious robot.
//!
//! The robot is an eight-segment chain with compliant joints and two
//! rotating flexible-blade legs per segment, driven open-loop: every motor
//! turns at the same constant angular velocity with fixed phase offsets, on
//! land and on water alike. The crate provides
//!
//! - [`model`]: configuration, geometry and the measured hardware baselines,
//! - [`gait`]: phase assignment and commanded angles,
//! - [`dynamics`]: the rigid-body simulation (penalty ground contact,
//!   buoyancy and quadratic drag, spring-damper joints, blade flexion,
//!   velocity-controlled motors),
//! - [`telemetry`]: marker/motor capture and the CSV interchange schemas,
//! - [`metrics`]: slip ratio, actuator energy and body-wave analysis,
//! - [`harness`]: the seeded batch experiment runner, phase sweeps, report
//!   rendering and trajectory plots.
//!
//! All numeric code is generic over the [`Real`] scalar; the aliases below
//! fix `f64`, which is what the CLI and the acceptance suite use.

pub mod gait;
pub mod harness;
pub mod math;
pub mod metrics;
pub mod model;
pub mod real;
pub mod telemetry;

pub mod dynamics;

pub use real::Real;

/// `f64` instantiations of the core types.
pub type Vec3 = math::Vec3<f64>;
pub type UnitQuat = math::UnitQuat<f64>;
pub type ExperimentConfig = model::ExperimentConfig<f64>;
pub type RobotModel = model::RobotModel<f64>;
pub type LegSpec = model::LegSpec<f64>;
pub type JointSpec = model::JointSpec<f64>;
pub type GaitProgram = model::GaitProgram<f64>;
pub type WorldModel = model::WorldModel<f64>;
pub type PhaseAssignment = gait::PhaseAssignment<f64>;
pub type RobotState = dynamics::RobotState<f64>;
pub type Simulator = dynamics::Simulator<f64>;
pub type MarkerTrajectory = telemetry::MarkerTrajectory<f64>;
pub type MotorLog = telemetry::MotorLog<f64>;
pub type TelemetrySet = telemetry::TelemetrySet<f64>;
pub type MetricsReport = metrics::MetricsReport<f64>;
pub type AggregateRow = metrics::AggregateRow<f64>;
