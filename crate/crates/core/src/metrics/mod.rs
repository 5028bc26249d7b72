//! The evaluation pipeline: mean translational velocity `V`, mean
//! circumferential velocity `V_f`, slip ratio `α`, actuator energy `E`,
//! body-wave analysis, and trial aggregation.
//!
//! All operations are pure functions over immutable logs and run identically
//! on simulated or externally captured telemetry. Units follow the
//! measurement conventions: velocities in mm/s, `α` in percent.

pub mod wave;

pub use wave::{body_wave_metrics, BodyWave};

use thiserror::Error;

use crate::model::{ConditionLabel, LegSpec, WorldKind};
use crate::real::{lit, tau, Real};
use crate::telemetry::{MarkerTrajectory, MotorLog};

/// Channel count the pipeline is defined over.
pub const CHANNELS: usize = 16;

/// Timestamp uniformity tolerance [s].
pub const TIMESTAMP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("expected {expected} channels, found {got}")]
    ChannelCount { expected: usize, got: usize },
    #[error("missing channel ids: {0:?}")]
    MissingIds(Vec<usize>),
    #[error("channel {id} needs at least {needed} samples, has {got}")]
    TooFewSamples { id: usize, needed: usize, got: usize },
    #[error("sample count {got} does not match duration x rate = {expected}")]
    SampleCountMismatch { expected: usize, got: usize },
    #[error("non-uniform timestamps at sample {index}: interval {interval} s, expected {expected} s")]
    NonUniformTimestamps {
        index: usize,
        interval: f64,
        expected: f64,
    },
    #[error("slip ratio undefined: V_f = 0")]
    UndefinedSlip,
    #[error("empty motor log for leg {0}")]
    EmptyLog(usize),
    #[error("record too short: {cycles:.2} cycles of the dominant frequency, need >= 2")]
    TooShortForWave { cycles: f64 },
}

/// Per-trial evaluation results.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport<T> {
    pub condition: ConditionLabel,
    pub trial: u32,
    /// Trial seed, recorded for the reproducibility audit trail.
    pub seed: u64,
    /// Mean translational velocity [mm/s].
    pub v: T,
    /// Mean circumferential velocity [mm/s].
    pub v_f: T,
    /// Slip ratio [%].
    pub alpha: T,
    /// Actuator energy in the datasheet's literal form: the 16-leg mean of
    /// the per-leg time-averaged electrical power (numerically A·V).
    pub e_literal: T,
    /// Physically dimensioned energy: ΣᵢΣⱼ AᵢVᵢ·Δt [J].
    pub e_phys: T,
    /// Roll amplitude of the front segment [rad].
    pub roll_amp: T,
    /// Heave amplitude of the front segment [mm].
    pub heave_amp: T,
    /// Dominant oscillation frequency [Hz].
    pub dominant_freq: T,
}

/// Mean and sample standard deviation over the trials of one condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateRow<T> {
    pub condition: ConditionLabel,
    pub trials: u32,
    pub alpha_mean: T,
    pub alpha_std: T,
    pub e_mean: T,
    pub e_std: T,
    pub v_mean: T,
    pub vf_mean: T,
    pub e_phys_mean: T,
}

/// Sorts channels by id and verifies exactly ids 1..=16 are present.
fn by_id<'a, M>(
    items: &'a [M],
    id: impl Fn(&M) -> usize,
) -> Result<Vec<&'a M>, MetricsError> {
    if items.len() != CHANNELS {
        return Err(MetricsError::ChannelCount {
            expected: CHANNELS,
            got: items.len(),
        });
    }
    let mut slots: Vec<Option<&M>> = vec![None; CHANNELS];
    for item in items {
        let i = id(item);
        if (1..=CHANNELS).contains(&i) {
            slots[i - 1] = Some(item);
        }
    }
    let missing: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_none())
        .map(|(i, _)| i + 1)
        .collect();
    if missing.is_empty() {
        Ok(slots.into_iter().map(Option::unwrap).collect())
    } else {
        Err(MetricsError::MissingIds(missing))
    }
}

fn check_uniform<T: Real>(times: &[T], rate: T) -> Result<(), MetricsError> {
    let expected = 1.0 / rate.to_f64().unwrap_or(f64::NAN);
    for (i, pair) in times.windows(2).enumerate() {
        let interval = (pair[1] - pair[0]).to_f64().unwrap_or(f64::NAN);
        if !(interval - expected).abs().is_finite()
            || (interval - expected).abs() > TIMESTAMP_TOLERANCE
        {
            return Err(MetricsError::NonUniformTimestamps {
                index: i + 1,
                interval,
                expected,
            });
        }
    }
    Ok(())
}

/// Mean translational velocity [mm/s]: per marker, the average
/// finite-difference velocity over the `T·f − 1` intervals, averaged over
/// the sixteen markers, separately in x and y; the result is the planar norm
/// `√(V_x² + V_y²)`. The z coordinate is deliberately ignored.
///
/// Because the inner average telescopes, each marker contributes only its
/// endpoint displacement: oscillation with zero net drift yields V ≈ 0.
pub fn mean_velocity<T: Real>(
    markers: &[MarkerTrajectory<T>],
    duration: T,
    rate: T,
) -> Result<T, MetricsError> {
    let markers = by_id(markers, |m| m.id)?;
    let n_expected = (duration * rate)
        .to_f64()
        .map(|x| x.round() as usize)
        .unwrap_or(0);
    let n = markers[0].samples.len();
    if n < 2 {
        return Err(MetricsError::TooFewSamples {
            id: markers[0].id,
            needed: 2,
            got: n,
        });
    }
    if n != n_expected {
        return Err(MetricsError::SampleCountMismatch {
            expected: n_expected,
            got: n,
        });
    }
    for m in &markers {
        if m.samples.len() != n {
            return Err(MetricsError::TooFewSamples {
                id: m.id,
                needed: n,
                got: m.samples.len(),
            });
        }
        let times: Vec<T> = m.samples.iter().map(|s| s.t).collect();
        check_uniform(&times, rate)?;
    }

    let intervals = T::from_usize(n - 1).unwrap();
    let channels = lit::<T>(CHANNELS as f64);
    let mut vx_sum = T::zero();
    let mut vy_sum = T::zero();
    for m in &markers {
        let mut vx = T::zero();
        let mut vy = T::zero();
        for pair in m.samples.windows(2) {
            let dt = pair[1].t - pair[0].t;
            vx += (pair[1].x - pair[0].x) / dt;
            vy += (pair[1].y - pair[0].y) / dt;
        }
        vx_sum += vx / intervals;
        vy_sum += vy / intervals;
    }
    let vx = vx_sum / channels;
    let vy = vy_sum / channels;
    Ok((vx * vx + vy * vy).sqrt())
}

/// Mean circumferential velocity [mm/s]: `(1/16)·Σᵢ 2π·r·Nᵢ` with `r` the
/// leg radius for the environment and `Nᵢ` the time-averaged rev/s of leg i.
pub fn mean_circumferential_velocity<T: Real>(
    motors: &[MotorLog<T>],
    spec: &LegSpec<T>,
    kind: WorldKind,
) -> Result<T, MetricsError> {
    let motors = by_id(motors, |m| m.id)?;
    let r_mm = spec.radius(kind) * lit(1000.0);
    let channels = lit::<T>(CHANNELS as f64);
    let mut sum = T::zero();
    for m in &motors {
        if m.samples.is_empty() {
            return Err(MetricsError::EmptyLog(m.id));
        }
        let mean_rps = m.samples.iter().map(|s| s.speed).sum::<T>()
            / T::from_usize(m.samples.len()).unwrap();
        sum += tau::<T>() * r_mm * mean_rps;
    }
    Ok(sum / channels)
}

/// Slip ratio [%]: `α = 100·V/V_f`. Undefined (an error, distinct from
/// α = 0) when `V_f = 0`.
pub fn slip_ratio<T: Real>(v: T, v_f: T) -> Result<T, MetricsError> {
    if v_f <= T::zero() {
        return Err(MetricsError::UndefinedSlip);
    }
    Ok(v / v_f * lit(100.0))
}

/// Actuator energy, in both published forms:
///
/// - literal: the 16-leg mean of each leg's time-averaged `A·V` product
///   (for constant signals this is exactly `A·V`);
/// - physical: `ΣᵢΣⱼ Aᵢ(tⱼ)·Vᵢ(tⱼ)·Δt` joules with `Δt = duration / samples`.
///
/// Legs are summed in id order, so the result is exactly invariant under
/// permutations of the input.
pub fn energy<T: Real>(motors: &[MotorLog<T>], duration: T) -> Result<(T, T), MetricsError> {
    let motors = by_id(motors, |m| m.id)?;
    let channels = lit::<T>(CHANNELS as f64);
    let mut literal = T::zero();
    let mut phys = T::zero();
    for m in &motors {
        if m.samples.is_empty() {
            return Err(MetricsError::EmptyLog(m.id));
        }
        let mean_power = m
            .samples
            .iter()
            .map(|s| s.current * s.voltage)
            .sum::<T>()
            / T::from_usize(m.samples.len()).unwrap();
        literal += mean_power;
        phys += mean_power * duration;
    }
    Ok((literal / channels, phys))
}

/// Mean and sample (n−1) standard deviation of α and E over trials.
pub fn aggregate<T: Real>(reports: &[MetricsReport<T>]) -> AggregateRow<T> {
    assert!(!reports.is_empty(), "aggregate needs at least one trial");
    let n = T::from_usize(reports.len()).unwrap();
    let mean = |f: &dyn Fn(&MetricsReport<T>) -> T| {
        reports.iter().map(|r| f(r)).sum::<T>() / n
    };
    let std = |f: &dyn Fn(&MetricsReport<T>) -> T, mu: T| {
        if reports.len() < 2 {
            return T::zero();
        }
        let ss = reports
            .iter()
            .map(|r| {
                let d = f(r) - mu;
                d * d
            })
            .sum::<T>();
        (ss / (n - T::one())).sqrt()
    };
    let alpha_mean = mean(&|r| r.alpha);
    let e_mean = mean(&|r| r.e_literal);
    AggregateRow {
        condition: reports[0].condition,
        trials: reports.len() as u32,
        alpha_mean,
        alpha_std: std(&|r| r.alpha, alpha_mean),
        e_mean,
        e_std: std(&|r| r.e_literal, e_mean),
        v_mean: mean(&|r| r.v),
        vf_mean: mean(&|r| r.v_f),
        e_phys_mean: mean(&|r| r.e_phys),
    }
}

/// Formats a mean±std pair to one decimal, e.g. `52.6±5.4`.
pub fn format_mean_std<T: Real>(mean: T, std: T) -> String {
    format!(
        "{:.1}±{:.1}",
        mean.to_f64().unwrap_or(f64::NAN),
        std.to_f64().unwrap_or(f64::NAN)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LegShape, LrMode};
    use crate::telemetry::{MarkerSample, MotorSample};
    use approx::assert_relative_eq;

    pub(crate) fn synthetic_markers(
        f: impl Fn(usize, f64) -> (f64, f64, f64),
        n: usize,
        rate: f64,
    ) -> Vec<MarkerTrajectory<f64>> {
        (1..=CHANNELS)
            .map(|id| MarkerTrajectory {
                id,
                samples: (0..n)
                    .map(|j| {
                        let t = j as f64 / rate;
                        let (x, y, z) = f(id, t);
                        MarkerSample { t, x, y, z }
                    })
                    .collect(),
            })
            .collect()
    }

    pub(crate) fn constant_motors(speed_rps: f64, volts: f64, amps: f64, n: usize) -> Vec<MotorLog<f64>> {
        (1..=CHANNELS)
            .map(|id| MotorLog {
                id,
                samples: (0..n)
                    .map(|j| MotorSample {
                        t: j as f64 / 120.0,
                        phase: 0.0,
                        speed: speed_rps,
                        voltage: volts,
                        current: amps,
                    })
                    .collect(),
            })
            .collect()
    }

    fn label() -> ConditionLabel {
        ConditionLabel::new(WorldKind::Land, LegShape::Normal, LrMode::Antiphase)
    }

    fn report(alpha: f64, e: f64) -> MetricsReport<f64> {
        MetricsReport {
            condition: label(),
            trial: 0,
            seed: 0,
            v: 0.0,
            v_f: 0.0,
            alpha,
            e_literal: e,
            e_phys: 0.0,
            roll_amp: 0.0,
            heave_amp: 0.0,
            dominant_freq: 0.0,
        }
    }

    #[test]
    fn static_markers_have_zero_velocity() {
        let markers = synthetic_markers(|id, _| (id as f64, 2.0 * id as f64, 0.0), 840, 120.0);
        let v = mean_velocity(&markers, 7.0, 120.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn uniform_translation_is_a_3_4_5_triangle() {
        // Every marker translates at (60, 80) mm/s → V = 100 mm/s.
        let markers = synthetic_markers(|_, t| (60.0 * t, 80.0 * t, 5.0), 840, 120.0);
        let v = mean_velocity(&markers, 7.0, 120.0).unwrap();
        assert_relative_eq!(v, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn oscillation_without_drift_telescopes_to_endpoints() {
        let rate = 120.0;
        let n = 840;
        let markers = synthetic_markers(
            |id, t| {
                let phase = id as f64;
                (
                    10.0 * (2.0 * std::f64::consts::PI * 0.5 * t + phase).sin(),
                    -7.0 * (2.0 * std::f64::consts::PI * 0.8 * t + phase).cos(),
                    3.0,
                )
            },
            n,
            rate,
        );
        let v = mean_velocity(&markers, 7.0, rate).unwrap();
        // Independent oracle: only the endpoints contribute.
        let duration_covered = (n - 1) as f64 / rate;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for m in &markers {
            vx += (m.samples[n - 1].x - m.samples[0].x) / duration_covered;
            vy += (m.samples[n - 1].y - m.samples[0].y) / duration_covered;
        }
        vx /= 16.0;
        vy /= 16.0;
        let expect = (vx * vx + vy * vy).sqrt();
        assert_relative_eq!(v, expect, epsilon = 1e-9);
        assert!(v < 1.0, "near-zero drift expected, got {v}");
    }

    #[test]
    fn z_motion_does_not_affect_velocity() {
        let markers = synthetic_markers(|_, t| (60.0 * t, 80.0 * t, 50.0 * (3.0 * t).sin()), 840, 120.0);
        let v = mean_velocity(&markers, 7.0, 120.0).unwrap();
        assert_relative_eq!(v, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn missing_marker_is_detected() {
        let mut markers = synthetic_markers(|_, _| (0.0, 0.0, 0.0), 10, 120.0);
        markers.remove(4);
        match mean_velocity(&markers, 10.0 / 120.0, 120.0) {
            Err(MetricsError::ChannelCount { got, .. }) => assert_eq!(got, 15),
            other => panic!("{other:?}"),
        }
        let mut markers = synthetic_markers(|_, _| (0.0, 0.0, 0.0), 10, 120.0);
        markers[4].id = 4; // duplicate id 4, id 5 missing
        match mean_velocity(&markers, 10.0 / 120.0, 120.0) {
            Err(MetricsError::MissingIds(ids)) => assert_eq!(ids, vec![5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nonuniform_timestamps_are_rejected() {
        let mut markers = synthetic_markers(|_, t| (t, t, 0.0), 10, 120.0);
        markers[3].samples[5].t += 0.002;
        assert!(matches!(
            mean_velocity(&markers, 10.0 / 120.0, 120.0),
            Err(MetricsError::NonUniformTimestamps { .. })
        ));
    }

    #[test]
    fn circumferential_velocity_on_the_measured_rate() {
        // All legs at 0.4877 rev/s, r = 50 mm → V_f ≈ 153.2 mm/s.
        let motors = constant_motors(0.4877, 7.4, 0.2, 64);
        let spec = LegSpec::<f64>::preset(LegShape::Normal);
        let v_f = mean_circumferential_velocity(&motors, &spec, WorldKind::Land).unwrap();
        assert_relative_eq!(v_f, 153.2, epsilon = 0.05);
    }

    #[test]
    fn circumferential_velocity_zero_and_single_leg() {
        let spec = LegSpec::<f64>::preset(LegShape::Normal);
        let motors = constant_motors(0.0, 7.4, 0.0, 8);
        assert_eq!(
            mean_circumferential_velocity(&motors, &spec, WorldKind::Land).unwrap(),
            0.0
        );
        // One leg at 1 rev/s, rest stopped: V_f = 2π·50/16.
        let mut motors = constant_motors(0.0, 7.4, 0.0, 8);
        for s in &mut motors[6].samples {
            s.speed = 1.0;
        }
        let v_f = mean_circumferential_velocity(&motors, &spec, WorldKind::Land).unwrap();
        assert_relative_eq!(v_f, std::f64::consts::TAU * 50.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn slip_ratio_cases() {
        assert_relative_eq!(slip_ratio(63.4, 153.2).unwrap(), 41.4, epsilon = 0.05);
        assert_relative_eq!(slip_ratio(120.0, 263.3).unwrap(), 45.6, epsilon = 0.05);
        assert_eq!(slip_ratio(100.0, 100.0).unwrap(), 100.0);
        assert_eq!(slip_ratio(0.0, 153.2).unwrap(), 0.0);
        assert!(matches!(slip_ratio(10.0, 0.0), Err(MetricsError::UndefinedSlip)));
    }

    #[test]
    fn energy_of_constant_signals_is_the_power_product() {
        let motors = constant_motors(0.5, 7.4, 0.5, 840);
        let (lit_e, phys) = energy(&motors, 7.0).unwrap();
        assert_relative_eq!(lit_e, 3.7, epsilon = 1e-12);
        // 16 legs × 3.7 W × 7 s.
        assert_relative_eq!(phys, 16.0 * 3.7 * 7.0, epsilon = 1e-9);
    }

    #[test]
    fn energy_of_zero_current_is_zero() {
        let motors = constant_motors(0.5, 7.4, 0.0, 100);
        let (lit_e, phys) = energy(&motors, 7.0).unwrap();
        assert_eq!(lit_e, 0.0);
        assert_eq!(phys, 0.0);
    }

    #[test]
    fn energy_two_active_legs() {
        // e̅₁ = 2, e̅₂ = 4, rest 0 → E = 6/16.
        let mut motors = constant_motors(0.0, 1.0, 0.0, 50);
        for s in &mut motors[0].samples {
            s.current = 2.0;
        }
        for s in &mut motors[1].samples {
            s.current = 4.0;
        }
        let (lit_e, _) = energy(&motors, 7.0).unwrap();
        assert_relative_eq!(lit_e, 6.0 / 16.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_is_exactly_permutation_invariant() {
        let mut motors = constant_motors(0.5, 7.4, 0.3, 64);
        for (i, m) in motors.iter_mut().enumerate() {
            for s in &mut m.samples {
                s.current = 0.1 + 0.037 * i as f64;
            }
        }
        let (a, ap) = energy(&motors, 7.0).unwrap();
        motors.reverse();
        motors.swap(3, 11);
        let (b, bp) = energy(&motors, 7.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(ap, bp);
    }

    #[test]
    fn empty_log_is_an_error() {
        let mut motors = constant_motors(0.5, 7.4, 0.3, 10);
        motors[7].samples.clear();
        assert!(matches!(energy(&motors, 7.0), Err(MetricsError::EmptyLog(8))));
    }

    #[test]
    fn aggregate_hand_case() {
        let reports: Vec<_> = [40.0, 42.0, 44.0].iter().map(|&a| report(a, 10.0)).collect();
        let row = aggregate(&reports);
        assert_relative_eq!(row.alpha_mean, 42.0, epsilon = 1e-12);
        assert_relative_eq!(row.alpha_std, 2.0, epsilon = 1e-12);
        assert_eq!(row.e_std, 0.0);
    }

    #[test]
    fn aggregate_identical_trials_have_zero_std() {
        let reports = vec![report(41.4, 71.0); 5];
        let row = aggregate(&reports);
        assert_eq!(row.alpha_std, 0.0);
        assert_eq!(row.e_std, 0.0);
        assert_eq!(row.trials, 5);
    }

    #[test]
    fn aggregate_formats_like_the_datasheet() {
        // Per-trial α with mean 52.6 and sample std 5.4 renders "52.6±5.4".
        let samples = [52.6, 58.0, 47.2, 55.9, 49.3];
        let mean = samples.iter().sum::<f64>() / 5.0;
        let scale = 5.4 / {
            let ss: f64 = samples.iter().map(|a| (a - mean) * (a - mean)).sum();
            (ss / 4.0).sqrt()
        };
        let adjusted: Vec<_> = samples
            .iter()
            .map(|a| report(mean + (a - mean) * scale, 0.0))
            .collect();
        let row = aggregate(&adjusted);
        assert_eq!(format_mean_std(row.alpha_mean, row.alpha_std), "52.6±5.4");
    }

    #[test]
    fn scale_covariance() {
        let markers = synthetic_markers(|_, t| (31.0 * t, 17.0 * t, 0.0), 840, 120.0);
        let v1 = mean_velocity(&markers, 7.0, 120.0).unwrap();
        let scaled: Vec<_> = markers
            .iter()
            .map(|m| MarkerTrajectory {
                id: m.id,
                samples: m
                    .samples
                    .iter()
                    .map(|s| MarkerSample {
                        t: s.t,
                        x: s.x * 2.5,
                        y: s.y * 2.5,
                        z: s.z,
                    })
                    .collect(),
            })
            .collect();
        let v2 = mean_velocity(&scaled, 7.0, 120.0).unwrap();
        assert_relative_eq!(v2, 2.5 * v1, epsilon = 1e-9);
        // α scales with V for fixed V_f.
        let a1 = slip_ratio(v1, 200.0).unwrap();
        let a2 = slip_ratio(v2, 200.0).unwrap();
        assert_relative_eq!(a2, 2.5 * a1, epsilon = 1e-9);
    }

    #[test]
    fn rotation_invariance_about_z() {
        let markers = synthetic_markers(
            |id, t| (40.0 * t + id as f64, 25.0 * t, 9.0 * t),
            840,
            120.0,
        );
        let v1 = mean_velocity(&markers, 7.0, 120.0).unwrap();
        let (s, c) = 0.7f64.sin_cos();
        let rotated: Vec<_> = markers
            .iter()
            .map(|m| MarkerTrajectory {
                id: m.id,
                samples: m
                    .samples
                    .iter()
                    .map(|p| MarkerSample {
                        t: p.t,
                        x: c * p.x - s * p.y,
                        y: s * p.x + c * p.y,
                        z: p.z,
                    })
                    .collect(),
            })
            .collect();
        let v2 = mean_velocity(&rotated, 7.0, 120.0).unwrap();
        assert_relative_eq!(v2, v1, epsilon = 1e-9);
    }
}
