//! Measured performance baselines of the physical robot.
//!
//! These are the hardware measurements the metrics pipeline is checked
//! against: per-condition mean translational velocity `V`, mean
//! circumferential velocity `V_f` (both mm/s) and slip ratio `alpha` (%),
//! for the twelve environment x leg-shape x left/right-phase conditions.
//!
//! The hardware never reports its motor speed directly, but the six
//! antiphase `V_f` cells together with the leg radii imply one consistent
//! rotation rate (spread under 0.5 %); the default gait `omega` is derived
//! here as the mean of those six implied rates.

use crate::model::{LegShape, LegSpec, LrMode, WorldKind};
use crate::real::{lit, tau, Real};

/// One measured condition: mean velocities in mm/s, slip ratio in %.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineRow {
    pub leg: LegShape,
    pub env: WorldKind,
    pub lr_mode: LrMode,
    /// Mean translational velocity [mm/s].
    pub v: f64,
    /// Mean circumferential velocity [mm/s].
    pub v_f: f64,
    /// Slip ratio [%], rounded to 0.1 as published on the datasheet.
    pub alpha: f64,
}

/// The twelve measured conditions.
pub const BASELINE: [BaselineRow; 12] = {
    use LegShape::*;
    use LrMode::*;
    use WorldKind::*;
    [
        BaselineRow { leg: Normal, env: Land, lr_mode: Antiphase, v: 63.4, v_f: 153.2, alpha: 41.4 },
        BaselineRow { leg: Fin, env: Land, lr_mode: Antiphase, v: 85.4, v_f: 162.3, alpha: 52.6 },
        BaselineRow { leg: Web, env: Land, lr_mode: Antiphase, v: 78.1, v_f: 254.4, alpha: 30.7 },
        BaselineRow { leg: Normal, env: Water, lr_mode: Antiphase, v: 90.8, v_f: 205.4, alpha: 44.2 },
        BaselineRow { leg: Fin, env: Water, lr_mode: Antiphase, v: 120.0, v_f: 263.3, alpha: 45.6 },
        BaselineRow { leg: Web, env: Water, lr_mode: Antiphase, v: 88.4, v_f: 264.4, alpha: 33.4 },
        BaselineRow { leg: Normal, env: Land, lr_mode: InPhase, v: 54.0, v_f: 153.4, alpha: 35.2 },
        BaselineRow { leg: Fin, env: Land, lr_mode: InPhase, v: 65.8, v_f: 162.5, alpha: 40.5 },
        BaselineRow { leg: Web, env: Land, lr_mode: InPhase, v: 82.8, v_f: 252.4, alpha: 32.8 },
        BaselineRow { leg: Normal, env: Water, lr_mode: InPhase, v: 91.4, v_f: 205.2, alpha: 44.5 },
        BaselineRow { leg: Fin, env: Water, lr_mode: InPhase, v: 112.2, v_f: 263.3, alpha: 42.6 },
        BaselineRow { leg: Web, env: Water, lr_mode: InPhase, v: 103.9, v_f: 263.3, alpha: 39.5 },
    ]
};

/// Rotation rates implied by the six antiphase `V_f` cells: `V_f / (2πr)`
/// with `r` the leg radius for that environment, in rev/s.
pub fn implied_rotation_rates() -> Vec<f64> {
    BASELINE
        .iter()
        .filter(|row| row.lr_mode == LrMode::Antiphase)
        .map(|row| {
            let r_mm = LegSpec::<f64>::preset(row.leg).radius(row.env) * 1000.0;
            row.v_f / (std::f64::consts::TAU * r_mm)
        })
        .collect()
}

/// Default commanded angular velocity [rad/s]: the mean implied rotation
/// rate, ~0.48789 rev/s = ~3.0655 rad/s.
pub fn default_omega<T: Real>() -> T {
    let rates = implied_rotation_rates();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    lit::<T>(mean) * tau()
}
