//! Configuration and geometry types for the robot, gait, environment and
//! experiment protocol, plus the TOML loader that validates them.
//!
//! Everything internal is SI (m, s, kg, rad). Reports convert to mm/s and %
//! where that matches the conventions of the measurement pipeline.
//!
//! The config document is TOML with the sections `[robot]`, `[robot.joint]`,
//! `[robot.leg]`, `[gait]`, `[world]`, `[world.land]`, `[world.water]`,
//! `[motor]`, `[telemetry]` and `[experiment]`. Every key is optional; an
//! empty document yields the full default configuration. Leg fields left
//! unset take the preset of the selected `shape`.

pub mod reference;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::{lit, tau, Real};

/// Environment selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorldKind {
    Land,
    Water,
}

impl WorldKind {
    pub const ALL: [WorldKind; 2] = [WorldKind::Land, WorldKind::Water];

    pub fn name(self) -> &'static str {
        match self {
            WorldKind::Land => "land",
            WorldKind::Water => "water",
        }
    }
}

/// The three manufactured leg geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegShape {
    #[serde(alias = "Normal")]
    Normal,
    #[serde(alias = "Fin")]
    Fin,
    #[serde(alias = "Web")]
    Web,
}

impl LegShape {
    pub const ALL: [LegShape; 3] = [LegShape::Normal, LegShape::Fin, LegShape::Web];

    pub fn name(self) -> &'static str {
        match self {
            LegShape::Normal => "normal",
            LegShape::Fin => "fin",
            LegShape::Web => "web",
        }
    }
}

/// Left/right phase relation within one segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrMode {
    Antiphase,
    InPhase,
}

impl LrMode {
    pub const ALL: [LrMode; 2] = [LrMode::Antiphase, LrMode::InPhase];

    pub fn name(self) -> &'static str {
        match self {
            LrMode::Antiphase => "antiphase",
            LrMode::InPhase => "in_phase",
        }
    }
}

/// One cell of the experiment grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionLabel {
    pub env: WorldKind,
    pub leg: LegShape,
    pub mode: LrMode,
}

impl ConditionLabel {
    pub fn new(env: WorldKind, leg: LegShape, mode: LrMode) -> Self {
        Self { env, leg, mode }
    }
}

impl std::fmt::Display for ConditionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}_{}_{}",
            self.env.name(),
            self.leg.name(),
            self.mode.name()
        )
    }
}

/// Inter-segment joint compliance. The printed rubber couplings behave as a
/// stiff translational spring holding the chain together plus a soft
/// rotational spring-damper per axis.
///
/// Axis mapping in the body frame (x right, y forward, z up):
/// pitch about x, roll about y, yaw about z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
#[serde(default = "JointSpec::defaults")]
pub struct JointSpec<T> {
    /// Rotational stiffness about the vertical axis [N·m/rad].
    pub stiffness_yaw: T,
    /// Rotational stiffness about the lateral axis [N·m/rad].
    pub stiffness_pitch: T,
    /// Rotational stiffness about the longitudinal axis [N·m/rad].
    pub stiffness_roll: T,
    /// Rotational damping about the vertical axis [N·m·s/rad].
    pub damping_yaw: T,
    pub damping_pitch: T,
    pub damping_roll: T,
    /// Rest angle of every rotational axis [rad].
    pub rest_angle: T,
    /// Translational stiffness of the coupling [N/m].
    pub link_stiffness: T,
    /// Translational damping of the coupling [N·s/m].
    pub link_damping: T,
}

impl<T: Real> JointSpec<T> {
    pub fn defaults() -> Self {
        Self {
            stiffness_yaw: lit(2.0),
            stiffness_pitch: lit(2.0),
            stiffness_roll: lit(2.0),
            damping_yaw: lit(0.1),
            damping_pitch: lit(0.1),
            damping_roll: lit(0.1),
            rest_angle: T::zero(),
            link_stiffness: lit(2.0e4),
            link_damping: lit(80.0),
        }
    }

    pub fn stiffness(&self) -> [T; 3] {
        [self.stiffness_pitch, self.stiffness_roll, self.stiffness_yaw]
    }

    pub fn damping(&self) -> [T; 3] {
        [self.damping_pitch, self.damping_roll, self.damping_yaw]
    }
}

impl<T: Real> Default for JointSpec<T> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// One leg: a flexible blade approximated as `blade_nodes` rigid links
/// joined by torsional spring-damper hinges, rotating about the segment's
/// lateral axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct LegSpec<T> {
    pub shape: LegShape,
    /// Effective rotation radius on land: height of the rotation center
    /// above ground in stance [m].
    pub r_land: T,
    /// Effective rotation radius on water: maximum unloaded radius from the
    /// rotation axis [m].
    pub r_water: T,
    /// Unloaded blade length from shaft to tip [m].
    pub blade_length: T,
    /// Blade planform width [m].
    pub blade_width: T,
    /// Number of rigid links in the blade discretization.
    pub blade_nodes: usize,
    /// Root hinge stiffness [N·m/rad]; distal hinges scale by `flex_taper`.
    pub flex_stiffness: T,
    /// Root hinge damping [N·m·s/rad]; distal hinges scale by `flex_taper`.
    pub flex_damping: T,
    /// Geometric stiffness falloff per hinge toward the tip, in (0, 1].
    pub flex_taper: T,
}

impl<T: Real> LegSpec<T> {
    /// Preset for a shape. Radii are the measured values for the physical
    /// legs; blade planform and hinge compliance are modelling assumptions
    /// (the real blades were never characterized) chosen so that the shapes
    /// keep their relative ordering: Fin widest and softest, Web stiff and
    /// near-rigid, Normal narrow in between.
    pub fn preset(shape: LegShape) -> Self {
        match shape {
            LegShape::Normal => Self {
                shape,
                r_land: lit(0.050),
                r_water: lit(0.067),
                blade_length: lit(0.067),
                blade_width: lit(0.020),
                blade_nodes: 3,
                flex_stiffness: lit(5.0),
                flex_damping: lit(0.05),
                flex_taper: lit(0.5),
            },
            LegShape::Fin => Self {
                shape,
                r_land: lit(0.053),
                r_water: lit(0.086),
                blade_length: lit(0.086),
                blade_width: lit(0.060),
                blade_nodes: 3,
                flex_stiffness: lit(3.0),
                flex_damping: lit(0.05),
                flex_taper: lit(0.5),
            },
            LegShape::Web => Self {
                shape,
                r_land: lit(0.083),
                r_water: lit(0.086),
                blade_length: lit(0.086),
                blade_width: lit(0.050),
                blade_nodes: 3,
                flex_stiffness: lit(6.0),
                flex_damping: lit(0.06),
                flex_taper: lit(1.0),
            },
        }
    }

    /// Effective rotation radius for the metrics pipeline [m].
    pub fn radius(&self, kind: WorldKind) -> T {
        match kind {
            WorldKind::Land => self.r_land,
            WorldKind::Water => self.r_water,
        }
    }

    /// Per-hinge stiffness, root first.
    pub fn hinge_stiffness(&self) -> Vec<T> {
        let mut k = self.flex_stiffness;
        (0..self.blade_nodes)
            .map(|i| {
                if i > 0 {
                    k = k * self.flex_taper;
                }
                k
            })
            .collect()
    }

    /// Per-hinge damping, root first.
    pub fn hinge_damping(&self) -> Vec<T> {
        let mut c = self.flex_damping;
        (0..self.blade_nodes)
            .map(|i| {
                if i > 0 {
                    c = c * self.flex_taper;
                }
                c
            })
            .collect()
    }
}

/// Effective rotation radius of a leg in the given environment [m].
pub fn leg_radius<T: Real>(spec: &LegSpec<T>, kind: WorldKind) -> T {
    spec.radius(kind)
}

/// Whole-robot geometry and mass properties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct RobotModel<T> {
    pub n_segments: usize,
    pub n_legs: usize,
    /// Length of one segment along the travel axis [m].
    pub segment_length: T,
    /// Overall body width [m].
    pub segment_width: T,
    /// Overall body height [m].
    pub segment_height: T,
    /// Total robot mass, spread uniformly over segments [kg].
    pub total_mass: T,
    /// Total displaced volume of the sealed hull at full submersion [m³].
    pub float_volume: T,
    /// Lateral offset of the motor shafts from the segment centerline [m].
    pub hip_lateral_offset: T,
    /// Vertical offset of the motor shafts from the segment center [m]
    /// (negative = below center).
    pub hip_vertical_offset: T,
    pub joint: JointSpec<T>,
    pub leg: LegSpec<T>,
}

impl<T: Real> RobotModel<T> {
    pub fn defaults() -> Self {
        // 1.01 m x 0.42 m x 0.15 m, 5.2 kg, eight segments, two legs each.
        // The hull displaces ~60 % of its bounding box; the shafts sit low on
        // the segment sides so the short legs can carry the hull on land.
        Self {
            n_segments: 8,
            n_legs: 16,
            segment_length: lit(1.01 / 8.0),
            segment_width: lit(0.42),
            segment_height: lit(0.15),
            total_mass: lit(5.2),
            float_volume: lit(0.6 * 1.01 * 0.42 * 0.15),
            hip_lateral_offset: lit(0.147),
            hip_vertical_offset: lit(-0.045),
            joint: JointSpec::defaults(),
            leg: LegSpec::preset(LegShape::Normal),
        }
    }

    /// Mass of one segment [kg].
    pub fn segment_mass(&self) -> T {
        self.total_mass / lit(self.n_segments as f64)
    }

    /// Displaced volume of one segment's share of the hull [m³].
    pub fn segment_float_volume(&self) -> T {
        self.float_volume / lit(self.n_segments as f64)
    }

    /// Diagonal inertia of a uniform box with the segment's bounding
    /// dimensions, in the body frame (x right, y forward, z up) [kg·m²].
    pub fn segment_inertia(&self) -> [T; 3] {
        let m = self.segment_mass();
        let twelfth = lit::<T>(1.0 / 12.0);
        let lx = self.segment_width;
        let ly = self.segment_length;
        let lz = self.segment_height;
        [
            m * twelfth * (ly * ly + lz * lz),
            m * twelfth * (lx * lx + lz * lz),
            m * twelfth * (lx * lx + ly * ly),
        ]
    }
}

/// The open-loop control program: every leg turns at the same constant
/// angular velocity; only the phase offsets differ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct GaitProgram<T> {
    /// Commanded angular velocity of every leg [rad/s].
    pub omega: T,
    pub lr_mode: LrMode,
    /// Phase lag of each segment behind the one in front [rad].
    pub axial_offset: T,
    /// Measured duration of a trial [s].
    pub duration: T,
}

impl<T: Real> GaitProgram<T> {
    pub fn defaults() -> Self {
        Self {
            omega: reference::default_omega(),
            lr_mode: LrMode::Antiphase,
            axial_offset: lit(std::f64::consts::FRAC_PI_4),
            duration: lit(7.0),
        }
    }

    /// Leg rotation frequency [rev/s].
    pub fn rotation_frequency(&self) -> T {
        self.omega / tau()
    }
}

/// Ground model: penalty contact with regularized Coulomb friction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
#[serde(default = "LandParams::defaults")]
pub struct LandParams<T> {
    /// Contact normal stiffness [N/m].
    pub contact_stiffness: T,
    /// Contact normal damping [N·s/m].
    pub contact_damping: T,
    /// Coulomb friction coefficient.
    pub friction_mu: T,
}

impl<T: Real> LandParams<T> {
    pub fn defaults() -> Self {
        // Foam mat: stiff enough that the 5.2 kg robot on ~8 stance legs
        // penetrates well under 3 mm, high friction.
        Self {
            contact_stiffness: lit(2.0e4),
            contact_damping: lit(50.0),
            friction_mu: lit(0.8),
        }
    }
}

impl<T: Real> Default for LandParams<T> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Water model: buoyancy plus quadratic drag. The surface is a half-space at
/// `water_level`; anything above it sees no fluid force.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
#[serde(default = "WaterParams::defaults")]
pub struct WaterParams<T> {
    /// Fluid density [kg/m³].
    pub fluid_density: T,
    /// Drag coefficient of the blade elements (flat plate).
    pub drag_coeff: T,
    /// Drag coefficient of the hull.
    pub body_drag_coeff: T,
    /// Rotational damping of a fully submerged segment [N·m·s/rad].
    pub body_angular_damping: T,
    /// Height of the free surface [m].
    pub water_level: T,
}

impl<T: Real> WaterParams<T> {
    pub fn defaults() -> Self {
        Self {
            fluid_density: lit(1000.0),
            drag_coeff: lit(1.8),
            body_drag_coeff: lit(0.35),
            body_angular_damping: lit(0.05),
            water_level: T::zero(),
        }
    }
}

impl<T: Real> Default for WaterParams<T> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Force environment: the active kind plus the parameter sets for both
/// environments, so a grid run can switch kind without reloading.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct WorldModel<T> {
    pub kind: WorldKind,
    /// Gravitational acceleration magnitude [m/s²].
    pub gravity: T,
    pub land: LandParams<T>,
    pub water: WaterParams<T>,
}

impl<T: Real> WorldModel<T> {
    pub fn defaults() -> Self {
        Self {
            kind: WorldKind::Land,
            gravity: lit(9.81),
            land: LandParams::defaults(),
            water: WaterParams::defaults(),
        }
    }
}

/// Velocity-controlled servo parameters shared by all sixteen motors.
/// Electrical constants approximate a 7.4 V bus servo rated ~1.86 N·m at
/// ~2 A; the control gains and rotor inertia are modelling assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
#[serde(default = "MotorParams::defaults")]
pub struct MotorParams<T> {
    /// Torque saturation [N·m].
    pub torque_limit: T,
    /// Torque constant [N·m/A].
    pub k_t: T,
    /// Idle current draw [A].
    pub idle_current: T,
    /// Supply voltage, constant [V].
    pub voltage: T,
    /// Speed-loop proportional gain [N·m·s/rad].
    pub kp: T,
    /// Speed-loop integral gain [N·m/rad].
    pub ki: T,
    /// Reflected rotor inertia at the output shaft [kg·m²].
    pub rotor_inertia: T,
    /// When false the motors apply no torque (used by conservation tests).
    pub enabled: bool,
}

impl<T: Real> MotorParams<T> {
    pub fn defaults() -> Self {
        Self {
            torque_limit: lit(1.86),
            k_t: lit(1.0),
            idle_current: lit(0.15),
            voltage: lit(7.4),
            kp: lit(0.05),
            ki: lit(0.5),
            rotor_inertia: lit(2.0e-4),
            enabled: true,
        }
    }
}

impl<T: Real> Default for MotorParams<T> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Recording settings: marker mounts and the optional measurement noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
#[serde(default = "TelemetrySettings::defaults")]
pub struct TelemetrySettings<T> {
    /// Lateral offset of each marker from the segment centerline [m];
    /// markers sit on top of each segment half.
    pub marker_lateral_offset: T,
    /// Gaussian noise added to recorded marker coordinates [mm], 0 = off.
    pub noise_std_mm: T,
}

impl<T: Real> TelemetrySettings<T> {
    pub fn defaults() -> Self {
        Self {
            marker_lateral_offset: lit(0.105),
            noise_std_mm: T::zero(),
        }
    }
}

impl<T: Real> Default for TelemetrySettings<T> {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Everything one trial needs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct ExperimentConfig<T> {
    pub robot: RobotModel<T>,
    pub gait: GaitProgram<T>,
    pub world: WorldModel<T>,
    pub motor: MotorParams<T>,
    pub telemetry: TelemetrySettings<T>,
    /// Trials per condition.
    pub trials: u32,
    /// Base seed for the deterministic trial randomization.
    pub seed: u64,
    /// Marker/motor capture rate [Hz].
    pub capture_rate: T,
    /// Integration step [s]; must divide the capture interval.
    pub dt: T,
    /// Unrecorded settling time before measurement starts [s].
    pub settle_time: T,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn defaults() -> Self {
        Self {
            robot: RobotModel::defaults(),
            gait: GaitProgram::defaults(),
            world: WorldModel::defaults(),
            motor: MotorParams::defaults(),
            telemetry: TelemetrySettings::defaults(),
            trials: 5,
            seed: 42,
            capture_rate: lit(120.0),
            dt: lit(1.0 / 1200.0),
            settle_time: lit(2.0),
        }
    }

    /// Checks every documented invariant; returns the first violation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let r = &self.robot;
        ensure(r.n_segments >= 1, "n_segments must be >= 1")?;
        ensure(
            r.n_legs == 2 * r.n_segments,
            "n_legs must equal 2 * n_segments",
        )?;
        ensure(r.total_mass > T::zero(), "total_mass must be > 0")?;
        ensure(
            r.segment_length > T::zero()
                && r.segment_width > T::zero()
                && r.segment_height > T::zero(),
            "segment dimensions must be > 0",
        )?;
        ensure(r.float_volume > T::zero(), "float_volume must be > 0")?;
        ensure(
            r.hip_lateral_offset > T::zero(),
            "hip_lateral_offset must be > 0",
        )?;

        let j = &r.joint;
        ensure(
            j.stiffness().iter().all(|k| *k >= T::zero()),
            "joint stiffness must be >= 0",
        )?;
        ensure(
            j.damping().iter().all(|c| *c >= T::zero()),
            "joint damping must be >= 0",
        )?;
        ensure(
            j.link_stiffness >= T::zero() && j.link_damping >= T::zero(),
            "joint link stiffness/damping must be >= 0",
        )?;

        let l = &r.leg;
        ensure(
            l.r_land > T::zero() && l.r_water > T::zero(),
            "leg radii must be > 0",
        )?;
        ensure(l.r_land <= l.r_water, "r_land must be <= r_water")?;
        ensure(l.blade_nodes >= 1, "blade_nodes must be >= 1")?;
        ensure(
            l.blade_length > T::zero() && l.blade_width > T::zero(),
            "blade dimensions must be > 0",
        )?;
        ensure(
            l.flex_stiffness >= T::zero() && l.flex_damping >= T::zero(),
            "blade hinge stiffness/damping must be >= 0",
        )?;
        ensure(
            l.flex_taper > T::zero() && l.flex_taper <= T::one(),
            "flex_taper must be in (0, 1]",
        )?;

        let g = &self.gait;
        ensure(g.omega > T::zero(), "omega must be > 0")?;
        ensure(
            g.axial_offset >= T::zero() && g.axial_offset < tau(),
            "axial_offset must be in [0, 2*pi)",
        )?;
        ensure(g.duration > T::zero(), "duration must be > 0")?;

        let w = &self.world;
        ensure(w.gravity >= T::zero(), "gravity must be >= 0")?;
        ensure(
            w.land.contact_stiffness >= T::zero() && w.land.contact_damping >= T::zero(),
            "contact stiffness/damping must be >= 0",
        )?;
        ensure(
            w.land.friction_mu >= T::zero() && w.land.friction_mu <= lit(2.0),
            "friction_mu out of range [0, 2]",
        )?;
        ensure(
            w.water.fluid_density >= T::zero()
                && w.water.drag_coeff >= T::zero()
                && w.water.body_drag_coeff >= T::zero()
                && w.water.body_angular_damping >= T::zero(),
            "water parameters must be >= 0",
        )?;

        let m = &self.motor;
        ensure(m.torque_limit > T::zero(), "torque_limit must be > 0")?;
        ensure(m.k_t > T::zero(), "k_t must be > 0")?;
        ensure(m.idle_current >= T::zero(), "idle_current must be >= 0")?;
        ensure(m.voltage > T::zero(), "voltage must be > 0")?;
        ensure(
            m.kp >= T::zero() && m.ki >= T::zero(),
            "motor gains must be >= 0",
        )?;
        ensure(m.rotor_inertia > T::zero(), "rotor_inertia must be > 0")?;

        ensure(
            self.telemetry.noise_std_mm >= T::zero(),
            "noise_std_mm must be >= 0",
        )?;
        ensure(self.trials >= 1, "trials must be >= 1")?;
        ensure(self.capture_rate > T::zero(), "capture_rate must be > 0")?;
        ensure(
            self.dt > T::zero() && self.dt <= lit(0.005),
            "dt must be in (0, 5 ms]",
        )?;
        ensure(
            self.capture_rate <= T::one() / self.dt,
            "capture_rate must be <= 1/dt",
        )?;
        ensure(self.settle_time >= T::zero(), "settle_time must be >= 0")?;
        ensure(
            self.seed <= i64::MAX as u64,
            "seed must fit in 63 bits (config file limitation)",
        )?;
        Ok(())
    }
}

fn ensure(cond: bool, what: &str) -> Result<(), ConfigError> {
    if cond {
        Ok(())
    } else {
        Err(ConfigError::Validation(what.to_string()))
    }
}

/// Errors from loading or validating a configuration document.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error: {0}")]
    Validation(String),
}

/// Parses, resolves and validates a configuration document.
///
/// Unset keys take the documented defaults; unset leg fields take the preset
/// of the selected shape.
pub fn load_config<T>(text: &str) -> Result<ExperimentConfig<T>, ConfigError>
where
    T: Real + Serialize + serde::de::DeserializeOwned,
{
    let doc: ConfigDoc<T> =
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let cfg = doc.resolve();
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a resolved config with every field explicit. Feeding the
/// output back through [`load_config`] reproduces the config exactly.
pub fn serialize_config<T>(cfg: &ExperimentConfig<T>) -> String
where
    T: Real + Serialize + serde::de::DeserializeOwned,
{
    let flat = ConfigFile {
        robot: RobotSection {
            n_segments: cfg.robot.n_segments,
            n_legs: cfg.robot.n_legs,
            segment_length: cfg.robot.segment_length,
            segment_width: cfg.robot.segment_width,
            segment_height: cfg.robot.segment_height,
            total_mass: cfg.robot.total_mass,
            float_volume: cfg.robot.float_volume,
            hip_lateral_offset: cfg.robot.hip_lateral_offset,
            hip_vertical_offset: cfg.robot.hip_vertical_offset,
            joint: cfg.robot.joint,
            leg: cfg.robot.leg,
        },
        gait: cfg.gait,
        world: cfg.world,
        motor: cfg.motor,
        telemetry: cfg.telemetry,
        experiment: ExperimentSection {
            trials: cfg.trials,
            seed: cfg.seed,
            capture_rate: cfg.capture_rate,
            dt: cfg.dt,
            settle_time: cfg.settle_time,
        },
    };
    toml::to_string_pretty(&flat).expect("config serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Document layer: every key optional, shape presets fill leg fields.
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
struct ConfigFile<T> {
    robot: RobotSection<T>,
    gait: GaitProgram<T>,
    world: WorldModel<T>,
    motor: MotorParams<T>,
    telemetry: TelemetrySettings<T>,
    experiment: ExperimentSection<T>,
}

#[derive(Serialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
struct RobotSection<T> {
    n_segments: usize,
    n_legs: usize,
    segment_length: T,
    segment_width: T,
    segment_height: T,
    total_mass: T,
    float_volume: T,
    hip_lateral_offset: T,
    hip_vertical_offset: T,
    joint: JointSpec<T>,
    leg: LegSpec<T>,
}

#[derive(Serialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
struct ExperimentSection<T> {
    trials: u32,
    seed: u64,
    capture_rate: T,
    dt: T,
    settle_time: T,
}

#[derive(Deserialize, Default)]
#[serde(bound = "T: Real + serde::de::DeserializeOwned", deny_unknown_fields)]
struct ConfigDoc<T> {
    #[serde(default)]
    robot: RobotDoc<T>,
    #[serde(default)]
    gait: GaitDoc<T>,
    #[serde(default)]
    world: WorldDoc<T>,
    #[serde(default)]
    motor: Option<MotorParams<T>>,
    #[serde(default)]
    telemetry: Option<TelemetrySettings<T>>,
    #[serde(default)]
    experiment: ExperimentDoc<T>,
}

#[derive(Deserialize, Default)]
#[serde(bound = "T: Real + serde::de::DeserializeOwned", deny_unknown_fields)]
struct RobotDoc<T> {
    n_segments: Option<usize>,
    n_legs: Option<usize>,
    segment_length: Option<T>,
    segment_width: Option<T>,
    segment_height: Option<T>,
    total_mass: Option<T>,
    float_volume: Option<T>,
    hip_lateral_offset: Option<T>,
    hip_vertical_offset: Option<T>,
    joint: Option<JointSpec<T>>,
    #[serde(default)]
    leg: LegDoc<T>,
}

#[derive(Deserialize, Default)]
#[serde(bound = "T: Real + serde::de::DeserializeOwned", deny_unknown_fields)]
struct LegDoc<T> {
    shape: Option<LegShape>,
    r_land: Option<T>,
    r_water: Option<T>,
    blade_length: Option<T>,
    blade_width: Option<T>,
    blade_nodes: Option<usize>,
    flex_stiffness: Option<T>,
    flex_damping: Option<T>,
    flex_taper: Option<T>,
}

#[derive(Deserialize, Default)]
#[serde(bound = "T: Real + serde::de::DeserializeOwned", deny_unknown_fields)]
struct GaitDoc<T> {
    omega: Option<T>,
    lr_mode: Option<LrMode>,
    axial_offset: Option<T>,
    duration: Option<T>,
}

#[derive(Deserialize, Default)]
#[serde(bound = "T: Real + serde::de::DeserializeOwned", deny_unknown_fields)]
struct WorldDoc<T> {
    kind: Option<WorldKind>,
    gravity: Option<T>,
    land: Option<LandParams<T>>,
    water: Option<WaterParams<T>>,
}

#[derive(Deserialize, Default)]
#[serde(bound = "T: Real + serde::de::DeserializeOwned", deny_unknown_fields)]
struct ExperimentDoc<T> {
    trials: Option<u32>,
    seed: Option<u64>,
    capture_rate: Option<T>,
    dt: Option<T>,
    settle_time: Option<T>,
}

impl<T: Real + serde::de::DeserializeOwned> ConfigDoc<T> {
    fn resolve(self) -> ExperimentConfig<T> {
        let dr = RobotModel::<T>::defaults();
        let shape = self.robot.leg.shape.unwrap_or(LegShape::Normal);
        let lp = LegSpec::<T>::preset(shape);
        let leg = LegSpec {
            shape,
            r_land: self.robot.leg.r_land.unwrap_or(lp.r_land),
            r_water: self.robot.leg.r_water.unwrap_or(lp.r_water),
            blade_length: self.robot.leg.blade_length.unwrap_or(lp.blade_length),
            blade_width: self.robot.leg.blade_width.unwrap_or(lp.blade_width),
            blade_nodes: self.robot.leg.blade_nodes.unwrap_or(lp.blade_nodes),
            flex_stiffness: self.robot.leg.flex_stiffness.unwrap_or(lp.flex_stiffness),
            flex_damping: self.robot.leg.flex_damping.unwrap_or(lp.flex_damping),
            flex_taper: self.robot.leg.flex_taper.unwrap_or(lp.flex_taper),
        };
        let n_segments = self.robot.n_segments.unwrap_or(dr.n_segments);
        let robot = RobotModel {
            n_segments,
            n_legs: self.robot.n_legs.unwrap_or(2 * n_segments),
            segment_length: self.robot.segment_length.unwrap_or(dr.segment_length),
            segment_width: self.robot.segment_width.unwrap_or(dr.segment_width),
            segment_height: self.robot.segment_height.unwrap_or(dr.segment_height),
            total_mass: self.robot.total_mass.unwrap_or(dr.total_mass),
            float_volume: self.robot.float_volume.unwrap_or(dr.float_volume),
            hip_lateral_offset: self
                .robot
                .hip_lateral_offset
                .unwrap_or(dr.hip_lateral_offset),
            hip_vertical_offset: self
                .robot
                .hip_vertical_offset
                .unwrap_or(dr.hip_vertical_offset),
            joint: self.robot.joint.unwrap_or_else(JointSpec::defaults),
            leg,
        };
        let dg = GaitProgram::<T>::defaults();
        let gait = GaitProgram {
            omega: self.gait.omega.unwrap_or(dg.omega),
            lr_mode: self.gait.lr_mode.unwrap_or(dg.lr_mode),
            axial_offset: self.gait.axial_offset.unwrap_or(dg.axial_offset),
            duration: self.gait.duration.unwrap_or(dg.duration),
        };
        let dw = WorldModel::<T>::defaults();
        let world = WorldModel {
            kind: self.world.kind.unwrap_or(dw.kind),
            gravity: self.world.gravity.unwrap_or(dw.gravity),
            land: self.world.land.unwrap_or_else(LandParams::defaults),
            water: self.world.water.unwrap_or_else(WaterParams::defaults),
        };
        let de = ExperimentConfig::<T>::defaults();
        ExperimentConfig {
            robot,
            gait,
            world,
            motor: self.motor.unwrap_or_else(MotorParams::defaults),
            telemetry: self.telemetry.unwrap_or_else(TelemetrySettings::defaults),
            trials: self.experiment.trials.unwrap_or(de.trials),
            seed: self.experiment.seed.unwrap_or(de.seed),
            capture_rate: self.experiment.capture_rate.unwrap_or(de.capture_rate),
            dt: self.experiment.dt.unwrap_or(de.dt),
            settle_time: self.experiment.settle_time.unwrap_or(de.settle_time),
        }
    }
}
