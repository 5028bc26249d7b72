//! Rigid-body simulation of the segmented robot.
//!
//! Eight box segments form a chain coupled by compliant joints; each segment
//! carries two rotating blade legs. The integrator is semi-implicit
//! (symplectic) Euler at a fixed step: velocities first from the force sum,
//! then positions from the updated velocities. Everything is deterministic —
//! identical config and seed give bitwise-identical trajectories.
//!
//! Gyroscopic coupling (ω×Iω) is deliberately omitted from the rotational
//! update; the segments turn slowly and the explicit form of that term can
//! feed energy into an otherwise dissipative step.

pub mod blade;
pub mod contact;
pub mod hydro;
pub mod joints;
pub mod motor;
pub mod state;

pub use blade::{hinge_spring_torques, hinge_step, BladeFrame};
pub use contact::{ground_contact_force, ContactNode, FRICTION_REG_SPEED};
pub use hydro::{buoyancy_force, buoyancy_force_torque, hull_drag, hydro_force};
pub use joints::{coupling_wrench, joint_torques};
pub use motor::motor_step;
pub use state::{LegState, MotorState, RobotState, SegmentState};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gait::{initial_phases, LegIndex, PhaseAssignment, Side};
use crate::math::{UnitQuat, Vec3};
use crate::model::{ExperimentConfig, WorldKind};
use crate::real::{lit, Real};

/// Divergence bounds; exceeding any of them aborts the run.
pub const MAX_POSITION: f64 = 1e3;
pub const MAX_SPEED: f64 = 1e3;
pub const MAX_ANGULAR_SPEED: f64 = 1e4;
pub const MAX_MOTOR_SPEED: f64 = 1e4;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation diverged at t = {time:.4} s: {what}")]
    Divergence { time: f64, what: String },
}

/// One configured simulation. Immutable once built; a run owns its
/// [`RobotState`] and mutates it sequentially. Distinct trials build
/// distinct simulators and are safe to run concurrently.
#[derive(Clone, Debug)]
pub struct Simulator<T> {
    config: ExperimentConfig<T>,
    phases: PhaseAssignment<T>,
    /// Per-joint rest deflections [pitch, roll, yaw]; zero unless perturbed.
    joint_rest: Vec<[T; 3]>,
    /// Initial heading applied by [`Simulator::initial_state`].
    initial_yaw: T,
    seg_mass: T,
    inertia: [T; 3],
    hinge_k: Vec<T>,
    hinge_c: Vec<T>,
    link_len: T,
    node_area: T,
    rear_anchor: Vec3<T>,
    front_anchor: Vec3<T>,
}

impl<T: Real> Simulator<T> {
    /// Simulator without trial randomization (zero yaw, nominal rest angles).
    pub fn new(config: ExperimentConfig<T>) -> Self {
        Self::build(config, T::zero(), None)
    }

    /// Simulator for one seeded trial: initial yaw perturbed within ±2° and
    /// each joint's rest angles within ±1°, emulating run-to-run spread.
    pub fn for_trial(config: ExperimentConfig<T>, trial_seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let deg = std::f64::consts::PI / 180.0;
        let yaw = lit::<T>((rng.gen::<f64>() * 2.0 - 1.0) * 2.0 * deg);
        let n_joints = config.robot.n_segments.saturating_sub(1);
        let mut rest = Vec::with_capacity(n_joints);
        for _ in 0..n_joints {
            let mut axes = [T::zero(); 3];
            for a in &mut axes {
                *a = config.robot.joint.rest_angle
                    + lit::<T>((rng.gen::<f64>() * 2.0 - 1.0) * deg);
            }
            rest.push(axes);
        }
        Self::build(config, yaw, Some(rest))
    }

    fn build(config: ExperimentConfig<T>, initial_yaw: T, rest: Option<Vec<[T; 3]>>) -> Self {
        let robot = &config.robot;
        let n_joints = robot.n_segments.saturating_sub(1);
        let joint_rest = rest.unwrap_or_else(|| {
            vec![[robot.joint.rest_angle; 3]; n_joints]
        });
        let half = lit::<T>(0.5);
        let leg = &robot.leg;
        let nodes = T::from_usize(leg.blade_nodes).unwrap();
        Self {
            phases: initial_phases(config.gait.lr_mode, config.gait.axial_offset, robot.n_segments),
            joint_rest,
            initial_yaw,
            seg_mass: robot.segment_mass(),
            inertia: robot.segment_inertia(),
            hinge_k: leg.hinge_stiffness(),
            hinge_c: leg.hinge_damping(),
            link_len: leg.blade_length / nodes,
            node_area: leg.blade_length * leg.blade_width / nodes,
            rear_anchor: Vec3::new(T::zero(), -robot.segment_length * half, T::zero()),
            front_anchor: Vec3::new(T::zero(), robot.segment_length * half, T::zero()),
            config,
        }
    }

    pub fn config(&self) -> &ExperimentConfig<T> {
        &self.config
    }

    pub fn phases(&self) -> &PhaseAssignment<T> {
        &self.phases
    }

    fn hip_local(&self, leg: LegIndex) -> Vec3<T> {
        let r = &self.config.robot;
        let x = match leg.side {
            Side::Left => -r.hip_lateral_offset,
            Side::Right => r.hip_lateral_offset,
        };
        Vec3::new(x, T::zero(), r.hip_vertical_offset)
    }

    /// Marker mount point in the segment frame (top of each segment half).
    pub fn marker_local(&self, marker: LegIndex) -> Vec3<T> {
        let r = &self.config.robot;
        let x = match marker.side {
            Side::Left => -self.config.telemetry.marker_lateral_offset,
            Side::Right => self.config.telemetry.marker_lateral_offset,
        };
        Vec3::new(x, T::zero(), r.segment_height * lit(0.5))
    }

    /// Starting state: chain level along −y from the origin, at stance
    /// height on land or at the analytic floating draft on water, legs at
    /// their assigned phases, motors already at speed when enabled.
    pub fn initial_state(&self) -> RobotState<T> {
        let cfg = &self.config;
        let robot = &cfg.robot;
        let n = robot.n_segments;
        let half = lit::<T>(0.5);
        let z0 = match cfg.world.kind {
            WorldKind::Land => robot.leg.blade_length - robot.hip_vertical_offset,
            WorldKind::Water => {
                let frac = (robot.total_mass
                    / (cfg.world.water.fluid_density * robot.float_volume))
                    .min(T::one());
                cfg.world.water.water_level + robot.segment_height * (half - frac)
            }
        };

        let centroid_y = -robot.segment_length * lit::<T>((n as f64 - 1.0) / 2.0);
        let yaw_rot = UnitQuat::from_yaw(self.initial_yaw);
        let centroid = Vec3::new(T::zero(), centroid_y, z0);
        let segments = (0..n)
            .map(|i| {
                let nominal = Vec3::new(
                    T::zero(),
                    -robot.segment_length * T::from_usize(i).unwrap(),
                    z0,
                );
                let position = centroid + yaw_rot.rotate(nominal - centroid);
                SegmentState::at_rest(position, yaw_rot)
            })
            .collect();

        let omega0 = if cfg.motor.enabled {
            cfg.gait.omega
        } else {
            T::zero()
        };
        let legs = LegIndex::all(n)
            .map(|leg| LegState {
                motor: MotorState::spinning(self.phases.get(leg), omega0, &cfg.motor),
                hinge_angles: vec![T::zero(); robot.leg.blade_nodes],
                hinge_rates: vec![T::zero(); robot.leg.blade_nodes],
                engaged: false,
            })
            .collect();

        RobotState {
            time: T::zero(),
            segments,
            legs,
        }
    }

    /// Advances the state by one fixed step.
    pub fn step(&self, st: &mut RobotState<T>) -> Result<(), SimError> {
        let cfg = &self.config;
        let n = cfg.robot.n_segments;
        let dt = cfg.dt;
        let mut forces = vec![Vec3::<T>::zero(); n];
        let mut torques = vec![Vec3::<T>::zero(); n];

        // Gravity.
        if cfg.world.gravity > T::zero() {
            let fg = -(self.seg_mass * cfg.world.gravity);
            for f in &mut forces {
                f.z += fg;
            }
        }

        // Compliant couplings, applied equal-and-opposite.
        for i in 0..n.saturating_sub(1) {
            let p = st.segments[i];
            let c = st.segments[i + 1];
            let w = joints::coupling_wrench(
                p.position,
                p.orientation,
                p.linear_velocity,
                p.angular_velocity,
                c.position,
                c.orientation,
                c.linear_velocity,
                c.angular_velocity,
                self.rear_anchor,
                self.front_anchor,
                self.joint_rest[i],
                &cfg.robot.joint,
            );
            forces[i] += w.force_on_parent;
            torques[i] += (w.parent_anchor - p.position).cross(w.force_on_parent);
            torques[i] += w.torque_on_parent;
            forces[i + 1] -= w.force_on_parent;
            torques[i + 1] += (w.child_anchor - c.position).cross(-w.force_on_parent);
            torques[i + 1] -= w.torque_on_parent;
        }

        // Hull environment.
        match cfg.world.kind {
            WorldKind::Land => {
                let half = lit::<T>(0.5);
                let hw = cfg.robot.segment_width * half;
                let hl = cfg.robot.segment_length * half;
                let hh = cfg.robot.segment_height * half;
                for (i, seg) in st.segments.iter().enumerate() {
                    for (sx, sy) in [(true, true), (true, false), (false, true), (false, false)] {
                        let local = Vec3::new(
                            if sx { hw } else { -hw },
                            if sy { hl } else { -hl },
                            -hh,
                        );
                        let arm = seg.orientation.rotate(local);
                        let node = ContactNode {
                            position: seg.position + arm,
                            velocity: seg.linear_velocity + seg.angular_velocity.cross(arm),
                            face_normal: Vec3::new(T::zero(), T::zero(), T::one()),
                            area: T::zero(),
                            leg: 0,
                            station: 0,
                        };
                        let f = ground_contact_force(&node, &cfg.world.land);
                        if f != Vec3::zero() {
                            forces[i] += f;
                            torques[i] += arm.cross(f);
                        }
                    }
                }
            }
            WorldKind::Water => {
                for (i, seg) in st.segments.iter().enumerate() {
                    let (bf, bt) = hydro::buoyancy_force_torque(seg, &cfg.world, &cfg.robot);
                    forces[i] += bf;
                    torques[i] += bt;
                    let (df, dtq) = hydro::hull_drag(seg, &cfg.world.water, &cfg.robot);
                    forces[i] += df;
                    torques[i] += dtq;
                }
            }
        }

        // Legs: environment forces transmit fully to the carrying segment
        // (massless blades); their generalized torques load the motor shaft
        // and the blade hinges.
        let n_hinges = cfg.robot.leg.blade_nodes;
        let mut hinge_env = vec![T::zero(); n_hinges];
        for flat0 in 0..st.legs.len() {
            let leg_index = LegIndex::from_flat(flat0 + 1);
            let seg_i = leg_index.segment;
            let seg = st.segments[seg_i];
            let hip_local = self.hip_local(leg_index);
            let leg = &mut st.legs[flat0];

            let frame = BladeFrame::compute(
                seg.position,
                seg.orientation,
                seg.linear_velocity,
                seg.angular_velocity,
                hip_local,
                self.link_len,
                leg.motor.angle,
                leg.motor.speed,
                &leg.hinge_angles,
                &leg.hinge_rates,
            );

            hinge_env.iter_mut().for_each(|h| *h = T::zero());
            let mut shaft_env = T::zero();
            let mut engaged = false;
            for j in 0..frame.node_count() {
                let node = ContactNode {
                    position: frame.node_positions[j],
                    velocity: frame.node_velocities[j],
                    face_normal: frame.node_normals[j],
                    area: self.node_area,
                    leg: flat0 + 1,
                    station: j,
                };
                let f = match cfg.world.kind {
                    WorldKind::Land => {
                        engaged |= node.position.z < T::zero();
                        ground_contact_force(&node, &cfg.world.land)
                    }
                    WorldKind::Water => {
                        engaged |= node.position.z < cfg.world.water.water_level;
                        hydro_force(&node, &cfg.world.water)
                    }
                };
                if f != Vec3::zero() {
                    forces[seg_i] += f;
                    torques[seg_i] += (node.position - seg.position).cross(f);
                    shaft_env += frame.shaft_torque_of(j, f);
                    for (h, acc) in hinge_env.iter_mut().enumerate().take(j + 1) {
                        *acc += frame.hinge_torque_of(h, j, f);
                    }
                }
            }
            leg.engaged = engaged;

            leg.motor = motor_step(&leg.motor, &cfg.motor, -shaft_env, cfg.gait.omega, dt);

            for h in 0..n_hinges {
                let prev = leg.hinge_angles[h];
                let next = hinge_step(prev, hinge_env[h], self.hinge_k[h], self.hinge_c[h], dt);
                leg.hinge_rates[h] = (next - prev) / dt;
                leg.hinge_angles[h] = next;
            }
        }

        // Semi-implicit Euler: velocities first, positions from the new
        // velocities.
        let lin_scale = dt / self.seg_mass;
        for (i, seg) in st.segments.iter_mut().enumerate() {
            seg.linear_velocity += forces[i] * lin_scale;
            let q = seg.orientation;
            let tau_b = q.rotate_inv(torques[i]);
            let mut w_b = q.rotate_inv(seg.angular_velocity);
            w_b.x += tau_b.x / self.inertia[0] * dt;
            w_b.y += tau_b.y / self.inertia[1] * dt;
            w_b.z += tau_b.z / self.inertia[2] * dt;
            let w_w = q.rotate(w_b);
            seg.angular_velocity = w_w;
            seg.position += seg.linear_velocity * dt;
            seg.orientation = UnitQuat::from_scaled_axis(w_w * dt)
                .mul_quat(q)
                .renormalized();
        }

        st.time += dt;
        self.check_divergence(st)
    }

    /// Runs for `duration` seconds (rounded to whole steps).
    pub fn run(&self, st: &mut RobotState<T>, duration: T) -> Result<(), SimError> {
        for _ in 0..self.steps_for(duration) {
            self.step(st)?;
        }
        Ok(())
    }

    /// Number of fixed steps covering `duration`.
    pub fn steps_for(&self, duration: T) -> usize {
        (duration / self.config.dt)
            .to_f64()
            .map(|s| s.round() as usize)
            .unwrap_or(0)
    }

    fn check_divergence(&self, st: &RobotState<T>) -> Result<(), SimError> {
        let fail = |what: String, time: T| {
            Err(SimError::Divergence {
                time: time.to_f64().unwrap_or(f64::NAN),
                what,
            })
        };
        if !st.is_finite() {
            return fail("non-finite state".into(), st.time);
        }
        let pos = lit::<T>(MAX_POSITION);
        let vel = lit::<T>(MAX_SPEED);
        let ang = lit::<T>(MAX_ANGULAR_SPEED);
        for (i, seg) in st.segments.iter().enumerate() {
            if seg.position.norm_squared() > pos * pos {
                return fail(format!("segment {i} position out of bounds"), st.time);
            }
            if seg.linear_velocity.norm_squared() > vel * vel {
                return fail(format!("segment {i} velocity out of bounds"), st.time);
            }
            if seg.angular_velocity.norm_squared() > ang * ang {
                return fail(format!("segment {i} spin out of bounds"), st.time);
            }
        }
        let motor_max = lit::<T>(MAX_MOTOR_SPEED);
        for (i, leg) in st.legs.iter().enumerate() {
            if leg.motor.speed.abs() > motor_max {
                return fail(format!("leg {} motor speed out of bounds", i + 1), st.time);
            }
        }
        Ok(())
    }

    /// Total linear momentum [kg·m/s].
    pub fn linear_momentum(&self, st: &RobotState<T>) -> Vec3<T> {
        st.segments
            .iter()
            .fold(Vec3::zero(), |acc, s| acc + s.linear_velocity * self.seg_mass)
    }

    /// Kinetic energy of the segment bodies [J].
    pub fn kinetic_energy(&self, st: &RobotState<T>) -> T {
        let half = lit::<T>(0.5);
        st.segments
            .iter()
            .map(|s| {
                let lin = half * self.seg_mass * s.linear_velocity.norm_squared();
                let w_b = s.orientation.rotate_inv(s.angular_velocity);
                let rot = half
                    * (self.inertia[0] * w_b.x * w_b.x
                        + self.inertia[1] * w_b.y * w_b.y
                        + self.inertia[2] * w_b.z * w_b.z);
                lin + rot
            })
            .sum()
    }

    /// Gravitational potential energy relative to z = 0 [J].
    pub fn gravity_potential(&self, st: &RobotState<T>) -> T {
        st.segments
            .iter()
            .map(|s| self.seg_mass * self.config.world.gravity * s.position.z)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExperimentConfig, LegShape, LegSpec};
    use approx::assert_relative_eq;

    fn airborne_config() -> ExperimentConfig<f64> {
        let mut cfg = ExperimentConfig::defaults();
        cfg.motor.enabled = false;
        cfg
    }

    fn raise(state: &mut RobotState<f64>, dz: f64) {
        for s in &mut state.segments {
            s.position.z += dz;
        }
    }

    #[test]
    fn single_segment_equilibrium_is_bitwise_static() {
        let mut cfg = airborne_config();
        cfg.robot.n_segments = 1;
        cfg.robot.n_legs = 2;
        cfg.world.gravity = 0.0;
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        raise(&mut st, 5.0);
        let before = st.clone();
        for _ in 0..100 {
            sim.step(&mut st).unwrap();
        }
        assert_eq!(st.segments, before.segments);
        assert_eq!(st.legs, before.legs);
        assert_relative_eq!(st.time, 100.0 * cfg.dt, epsilon = 1e-12);
    }

    #[test]
    fn chain_equilibrium_is_static_to_rounding() {
        let mut cfg = airborne_config();
        cfg.world.gravity = 0.0;
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        raise(&mut st, 5.0);
        sim.run(&mut st, 0.5).unwrap();
        for s in &st.segments {
            assert!(s.linear_velocity.norm() < 1e-10);
            assert!(s.angular_velocity.norm() < 1e-10);
        }
    }

    #[test]
    fn free_fall_matches_ballistics() {
        let mut cfg = airborne_config();
        cfg.dt = 1e-3;
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        raise(&mut st, 8.0);
        let z0 = st.center_of_mass().z;
        sim.run(&mut st, 1.0).unwrap();
        let drop = z0 - st.center_of_mass().z;
        let expect = 0.5 * 9.81 * 1.0;
        assert!((drop - expect).abs() / expect < 1.0e-3, "drop = {drop}");
    }

    #[test]
    fn default_land_run_moves_forward() {
        let cfg = ExperimentConfig::defaults();
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        let y0 = st.center_of_mass().y;
        sim.run(&mut st, 7.0).unwrap();
        let dy = st.center_of_mass().y - y0;
        assert!(dy > 0.0, "forward displacement {dy} not positive");
    }

    #[test]
    fn momentum_is_conserved_without_external_forces() {
        let mut cfg = airborne_config();
        cfg.world.gravity = 0.0;
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        raise(&mut st, 50.0);
        // Stir the chain so the couplings carry real forces.
        for (i, s) in st.segments.iter_mut().enumerate() {
            let k = i as f64;
            s.linear_velocity = Vec3::new(0.1 * (k * 1.7).sin(), 0.05 * k, -0.08 * (k * 0.9).cos());
            s.angular_velocity = Vec3::new(0.2 * (k * 0.3).cos(), 0.1, 0.15 * (k * 1.1).sin());
        }
        let p0 = sim.linear_momentum(&st);
        sim.run(&mut st, 10.0).unwrap();
        let p1 = sim.linear_momentum(&st);
        assert!((p1 - p0).norm() < 1e-9, "drift = {}", (p1 - p0).norm());
    }

    #[test]
    fn pure_damping_never_increases_kinetic_energy() {
        let mut cfg = airborne_config();
        cfg.world.gravity = 0.0;
        let j = &mut cfg.robot.joint;
        j.stiffness_yaw = 0.0;
        j.stiffness_pitch = 0.0;
        j.stiffness_roll = 0.0;
        j.link_stiffness = 0.0;
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        raise(&mut st, 50.0);
        for (i, s) in st.segments.iter_mut().enumerate() {
            let k = i as f64;
            s.linear_velocity = Vec3::new((k * 0.7).sin(), 0.3, (k * 1.3).cos());
            s.angular_velocity = Vec3::new(0.5, (k * 0.4).sin(), 0.2);
        }
        let mut prev = sim.kinetic_energy(&st);
        for _ in 0..sim.steps_for(2.0) {
            sim.step(&mut st).unwrap();
            let e = sim.kinetic_energy(&st);
            assert!(e <= prev * (1.0 + 1e-12), "energy rose {prev} -> {e}");
            prev = e;
        }
    }

    #[test]
    fn determinism_bitwise() {
        let cfg = ExperimentConfig::defaults();
        let run = || {
            let sim = Simulator::for_trial(cfg, 0xfeed);
            let mut st = sim.initial_state();
            sim.run(&mut st, 1.0).unwrap();
            st
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
    }

    #[test]
    fn trial_perturbations_depend_on_seed() {
        let cfg = ExperimentConfig::defaults();
        let a = Simulator::for_trial(cfg, 1).initial_state();
        let b = Simulator::for_trial(cfg, 2).initial_state();
        assert_ne!(a.segments, b.segments);
    }

    #[test]
    fn divergence_is_reported_not_propagated_as_nan() {
        let mut cfg = ExperimentConfig::defaults();
        // Absurd contact stiffness at a coarse step blows the chain up.
        cfg.world.land.contact_stiffness = 1e12;
        cfg.dt = 5e-3;
        cfg.capture_rate = 100.0;
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        let result = sim.run(&mut st, 5.0);
        assert!(matches!(result, Err(SimError::Divergence { .. })));
    }

    #[test]
    fn stance_legs_report_engagement_and_current_peaks() {
        let cfg = ExperimentConfig::defaults();
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        sim.run(&mut st, 2.0).unwrap();
        let mut engaged_current = Vec::new();
        let mut swing_current = Vec::new();
        for _ in 0..sim.steps_for(4.0) {
            sim.step(&mut st).unwrap();
            for leg in &st.legs {
                if leg.engaged {
                    engaged_current.push(leg.motor.current);
                } else {
                    swing_current.push(leg.motor.current);
                }
            }
        }
        assert!(!engaged_current.is_empty());
        assert!(!swing_current.is_empty());
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(
            mean(&engaged_current) > mean(&swing_current),
            "stance current {} should exceed swing current {}",
            mean(&engaged_current),
            mean(&swing_current)
        );
    }

    #[test]
    fn water_run_floats_and_moves() {
        let mut cfg = ExperimentConfig::defaults();
        cfg.world.kind = WorldKind::Water;
        cfg.robot.leg = LegSpec::preset(LegShape::Fin);
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        let y0 = st.center_of_mass().y;
        sim.run(&mut st, 7.0).unwrap();
        let com = st.center_of_mass();
        assert!(com.y > y0, "no forward drift on water");
        // Still afloat near the surface.
        assert!(com.z > -cfg.robot.segment_height && com.z < cfg.robot.segment_height);
    }

    #[test]
    fn f32_smoke() {
        let cfg: ExperimentConfig<f32> = crate::model::load_config("").unwrap();
        let sim = Simulator::new(cfg);
        let mut st = sim.initial_state();
        for _ in 0..200 {
            sim.step(&mut st).unwrap();
        }
        assert!(st.is_finite());
    }
}
