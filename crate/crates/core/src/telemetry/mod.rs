//! Measurement capture in the instrumentation format of the physical robot:
//! sixteen reflective markers sampled at a fixed capture rate, and per-motor
//! phase/speed/voltage/current channels.
//!
//! Marker coordinates are stored in millimeters and timestamps in seconds
//! (`t_j = j / f`), which is the convention the metrics formulas expect.
//! Recording is observation-only: with noise disabled, a run produces
//! bitwise-identical trajectories whether or not it is being recorded.

pub mod csv_io;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dynamics::{RobotState, SimError, Simulator};
use crate::gait::LegIndex;
use crate::real::{lit, tau, wrap_angle, Real};

/// One marker sample: seconds and millimeters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarkerSample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

/// Trajectory of one marker (ids 1..=16, left marker of segment k is 2k+1).
#[derive(Clone, Debug, PartialEq)]
pub struct MarkerTrajectory<T> {
    pub id: usize,
    pub samples: Vec<MarkerSample<T>>,
}

/// One motor sample: phase in rad (wrapped), speed in rev/s, volts, amps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotorSample<T> {
    pub t: T,
    pub phase: T,
    pub speed: T,
    pub voltage: T,
    pub current: T,
}

/// Channel log of one motor (leg ids 1..=16).
#[derive(Clone, Debug, PartialEq)]
pub struct MotorLog<T> {
    pub id: usize,
    pub samples: Vec<MotorSample<T>>,
}

/// Everything one trial records.
#[derive(Clone, Debug, PartialEq)]
pub struct TelemetrySet<T> {
    /// Capture rate [Hz].
    pub capture_rate: T,
    pub markers: Vec<MarkerTrajectory<T>>,
    pub motors: Vec<MotorLog<T>>,
}

#[derive(Debug, Error)]
pub enum TelemetryError {
    #[error(
        "capture rate mismatch: dt = {dt} s does not divide the capture interval {interval} s \
         within 1 µs"
    )]
    RateMismatch { dt: f64, interval: f64 },
    #[error("missing marker ids: {0:?}")]
    MissingMarkers(Vec<usize>),
    #[error("missing leg ids: {0:?}")]
    MissingLegs(Vec<usize>),
    #[error("malformed telemetry file at row {row}: {what}")]
    Malformed { row: usize, what: String },
    #[error("unrecognized telemetry header: {0}")]
    Header(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Number of whole integration steps per capture interval, or an error when
/// the step does not divide the interval within 1 µs.
pub fn capture_stride<T: Real>(dt: T, capture_rate: T) -> Result<usize, TelemetryError> {
    let dt_s = dt.to_f64().unwrap_or(f64::NAN);
    let interval = 1.0 / capture_rate.to_f64().unwrap_or(f64::NAN);
    let stride = (interval / dt_s).round();
    if stride < 1.0 || !((stride * dt_s) - interval).abs().is_finite() {
        return Err(TelemetryError::RateMismatch { dt: dt_s, interval });
    }
    if ((stride * dt_s) - interval).abs() > 1e-6 {
        return Err(TelemetryError::RateMismatch { dt: dt_s, interval });
    }
    Ok(stride as usize)
}

/// Runs `duration` seconds of simulation, sampling markers and motor
/// channels at the configured capture rate.
///
/// The first sample is taken from the incoming state (t = 0 of the record),
/// giving `round(duration·f)` samples per channel. Marker noise, when
/// enabled, draws from its own generator seeded by `noise_seed` and never
/// touches the simulation.
pub fn record<T: Real>(
    sim: &Simulator<T>,
    state: &mut RobotState<T>,
    duration: T,
    noise_seed: u64,
) -> Result<TelemetrySet<T>, TelemetryError> {
    let cfg = sim.config();
    let stride = capture_stride(cfg.dt, cfg.capture_rate)?;
    let n_samples = (duration * cfg.capture_rate)
        .to_f64()
        .map(|x| x.round() as usize)
        .unwrap_or(0);
    let n_channels = cfg.robot.n_legs;

    let noise_std = cfg.telemetry.noise_std_mm;
    let mut noise = if noise_std > T::zero() {
        Some(GaussianSource::new(noise_seed))
    } else {
        None
    };

    let mut markers: Vec<MarkerTrajectory<T>> = (1..=n_channels)
        .map(|id| MarkerTrajectory {
            id,
            samples: Vec::with_capacity(n_samples),
        })
        .collect();
    let mut motors: Vec<MotorLog<T>> = (1..=n_channels)
        .map(|id| MotorLog {
            id,
            samples: Vec::with_capacity(n_samples),
        })
        .collect();

    let mm = lit::<T>(1000.0);
    for j in 0..n_samples {
        let t = T::from_usize(j).unwrap() / cfg.capture_rate;
        for (slot, index) in LegIndex::all(cfg.robot.n_segments).enumerate() {
            let seg = &state.segments[index.segment];
            let world = seg.position + seg.orientation.rotate(sim.marker_local(index));
            let mut sample = MarkerSample {
                t,
                x: world.x * mm,
                y: world.y * mm,
                z: world.z * mm,
            };
            if let Some(src) = noise.as_mut() {
                sample.x += noise_std * src.next();
                sample.y += noise_std * src.next();
                sample.z += noise_std * src.next();
            }
            markers[slot].samples.push(sample);

            let motor = &state.legs[slot].motor;
            motors[slot].samples.push(MotorSample {
                t,
                phase: wrap_angle(motor.angle),
                speed: motor.speed / tau(),
                voltage: motor.voltage,
                current: motor.current,
            });
        }
        if j + 1 < n_samples {
            for _ in 0..stride {
                sim.step(state)?;
            }
        }
    }

    Ok(TelemetrySet {
        capture_rate: cfg.capture_rate,
        markers,
        motors,
    })
}

/// Deterministic standard-normal source (Box-Muller over ChaCha8).
struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn next<T: Real>(&mut self) -> T {
        if let Some(s) = self.spare.take() {
            return lit(s);
        }
        let u1: f64 = self.rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        lit(r * c)
    }
}
