//! Leg phase assignment and commanded angles.
//!
//! This is the entire explicit control surface of the robot: every leg
//! rotates at the same constant angular velocity in every environment, and
//! the only structure is the fixed phase offsets. Nothing here reads the
//! world model, on purpose — environment adaptation comes from the body,
//! not the controller.
//!
//! Angle convention: 0 rad is the leg pointing straight down (touchdown for
//! a rigid leg on flat ground); increasing angle sweeps the tip rearward
//! through stance. Phase lag accumulates toward the rear, so touchdown
//! propagates front-to-rear with one `axial_offset` of rotation between
//! consecutive segments.

use crate::model::{GaitProgram, LrMode};
use crate::real::{pi, wrap_angle, Real};

/// Which side of a segment a leg is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Identifies one leg by segment (0 = front) and side. Flat ids run 1..=2n
/// with the left leg of segment k at `2k + 1` and the right at `2k + 2`,
/// matching the marker numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LegIndex {
    pub segment: usize,
    pub side: Side,
}

impl LegIndex {
    pub fn new(segment: usize, side: Side) -> Self {
        Self { segment, side }
    }

    /// 1-based flat id.
    pub fn flat(self) -> usize {
        2 * self.segment + if self.side == Side::Left { 1 } else { 2 }
    }

    /// Inverse of [`LegIndex::flat`]. `flat` must be >= 1.
    pub fn from_flat(flat: usize) -> Self {
        assert!(flat >= 1, "flat leg ids are 1-based");
        Self {
            segment: (flat - 1) / 2,
            side: if flat % 2 == 1 { Side::Left } else { Side::Right },
        }
    }

    /// All legs of a robot with `n_segments` segments, in flat-id order.
    pub fn all(n_segments: usize) -> impl Iterator<Item = LegIndex> {
        (1..=2 * n_segments).map(LegIndex::from_flat)
    }
}

/// Initial phase of every leg, in flat-id order, each in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAssignment<T> {
    phases: Vec<T>,
}

impl<T: Real> PhaseAssignment<T> {
    pub fn get(&self, leg: LegIndex) -> T {
        self.phases[leg.flat() - 1]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.phases
    }
}

/// Assigns phases so that segment k+1 lags segment k by `axial_offset` and
/// the right leg of a segment is offset by π (antiphase) or 0 (in-phase)
/// from its left partner.
///
/// With the angle convention above, a lagging leg reaches the touchdown
/// angle later, so the touchdown wave travels front-to-rear.
pub fn initial_phases<T: Real>(
    lr_mode: LrMode,
    axial_offset: T,
    n_segments: usize,
) -> PhaseAssignment<T> {
    let lr_shift = match lr_mode {
        LrMode::Antiphase => pi::<T>(),
        LrMode::InPhase => T::zero(),
    };
    let phases = LegIndex::all(n_segments)
        .map(|leg| {
            let seg = T::from_usize(leg.segment).expect("segment count fits scalar");
            let axial = wrap_angle(-(seg * axial_offset));
            match leg.side {
                Side::Left => axial,
                Side::Right => wrap_angle(axial + lr_shift),
            }
        })
        .collect();
    PhaseAssignment { phases }
}

/// Commanded angle of a leg at time `t`: `(ω·t + φ) mod 2π`. The commanded
/// angular velocity is the constant `ω` for every leg and both environments.
pub fn commanded_angle<T: Real>(t: T, leg: LegIndex, gait: &GaitProgram<T>, n_segments: usize) -> T {
    let phases = initial_phases(gait.lr_mode, gait.axial_offset, n_segments);
    wrap_angle(gait.omega * t + phases.get(leg))
}
