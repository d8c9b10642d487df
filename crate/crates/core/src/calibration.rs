//! Pinned calibration constants for the desk-scale experiments, together
//! with the manifest they are recorded in.
//!
//! The values were fixed by dedicated calibration runs against the exact
//! oracles and are asserted by the acceptance suite; they are defaults, not
//! tunables.

use serde::{Deserialize, Serialize};

/// kappa(1/8) from calibrate_kappa(1/8, 2^16, 1e5): smallest kappa whose
/// success fraction clears 7/8 for both adversarial strategies with the 99%
/// CI above the target.
pub const KAPPA_EIGHTH: u32 = 6;

/// Distance-fraction threshold certifying a No-ensemble LTF as far from
/// monotone (the exact oracle certifies sampled n=16 instances well above
/// this; ensemble mean measured at 0.099).
pub const FAR_LTF_EPSILON0: f64 = 0.01;

/// Scaled-mode parameters for the far-LTF rejection experiment at n = 16.
pub const FAR_LTF_EPSILON: f64 = 0.25;
pub const FAR_LTF_SCALED_K: u32 = 2;

/// Rejection-rate thresholds for that experiment (measured 0.362 single,
/// 0.74 amplified at r = 3).
pub const FAR_LTF_REJECTION_MIN: f64 = 0.25;
pub const FAR_LTF_AMPLIFIED_MIN: f64 = 0.5;
pub const FAR_LTF_AMPLIFY_REPS: u32 = 3;

/// Scaled-mode k for the middle-layer audit at n = 2^12 and the floor on
/// the fraction of runs whose queries all stay within 4 sqrt(n) of n/2
/// (measured 1.0).
pub const AUDIT_SCALED_K: u32 = 10;
pub const AUDIT_PASS_MIN: f64 = 0.25;
pub const AUDIT_DELTA_BAND: f64 = 4.0;

/// Floor on the mean shift-disagreement farness lower bound (rate/2) of the
/// shifted-Talagrand ensemble at n in {16, 36, 64, 100} (measured
/// 0.139..0.166, decreasing in n).
pub const TALPM_FARNESS_FLOOR: f64 = 0.05;

/// Calibration record persisted alongside experiment outputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CalibrationManifest {
    pub delta: f64,
    pub size: u64,
    pub trials: u64,
    pub kappa: u32,
}

impl CalibrationManifest {
    /// The pinned kappa(1/8) record.
    pub fn default_kappa() -> CalibrationManifest {
        CalibrationManifest {
            delta: 0.125,
            size: 1 << 16,
            trials: 100_000,
            kappa: KAPPA_EIGHTH,
        }
    }
}
