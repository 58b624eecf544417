//! Solver configuration with the grid adjustments applied.

use serde::{Deserialize, Serialize};

use crate::eme::DEFAULT_FRAC_CAP;
use crate::error::{invalid, Result};

pub const DEFAULT_EPSILON: f64 = 0.5;
pub const DEFAULT_TS: f64 = 0.372;
pub const DEFAULT_ENUM_CAP: usize = 2;

/// Arithmetic equality tolerance.
pub const TOLERANCE: f64 = 1e-9;

/// Tolerance for the proved inequalities, absorbing summation error over `2^frac` terms.
pub const INEQUALITY_TOLERANCE: f64 = 1e-7;

/// Smallest ε accepted at the default `frac_cap`.
pub const MIN_DEFAULT_EPSILON: f64 = 0.25;

/// Parameters as the solvers use them.
///
/// `epsilon` is snapped to `1/ell`; `delta = 1/steps` with `steps = ceil(1/ε³)`
/// so that `δ ≤ ε³` and `1/δ` is integral; `ts = ts_steps·δ` with `ts_steps`
/// rounded down.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub epsilon: f64,
    pub requested_epsilon: f64,
    pub delta: f64,
    pub steps: usize,
    pub ts: f64,
    pub requested_ts: f64,
    pub ts_steps: usize,
    pub ell: usize,
    pub tolerance: f64,
    pub frac_cap: usize,
    pub enum_cap: usize,
}

impl AlgoConfig {
    pub fn new(epsilon: f64, ts: f64) -> Result<AlgoConfig> {
        AlgoConfig::with_caps(epsilon, ts, DEFAULT_FRAC_CAP, DEFAULT_ENUM_CAP)
    }

    pub fn with_caps(epsilon: f64, ts: f64, frac_cap: usize, enum_cap: usize) -> Result<AlgoConfig> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if !(0.0..=1.0).contains(&ts) {
            return Err(invalid(format!("t_s must lie in [0, 1], got {ts}")));
        }
        if epsilon < MIN_DEFAULT_EPSILON && frac_cap <= DEFAULT_FRAC_CAP {
            return Err(invalid(format!(
                "epsilon {epsilon} needs up to {} fractional coordinates; the default frac cap is {DEFAULT_FRAC_CAP}. \
                 Pass a larger --frac-cap to run it anyway",
                (1.0 / epsilon.powi(4)).ceil()
            )));
        }
        let ell = ((1.0 / epsilon).round() as usize).max(1);
        let eps = 1.0 / ell as f64;
        let steps = (1.0 / (eps * eps * eps) - 1e-9).ceil() as usize;
        let delta = 1.0 / steps as f64;
        let ts_steps = (ts * steps as f64 + 1e-9).floor() as usize;
        Ok(AlgoConfig {
            epsilon: eps,
            requested_epsilon: epsilon,
            delta,
            steps,
            ts: ts_steps as f64 * delta,
            requested_ts: ts,
            ts_steps,
            ell,
            tolerance: TOLERANCE,
            frac_cap,
            enum_cap,
        })
    }
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig::new(DEFAULT_EPSILON, DEFAULT_TS).expect("default config is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let c = AlgoConfig::default();
        assert_eq!((c.ell, c.steps, c.ts_steps), (2, 8, 2));
        assert_eq!(c.delta, 0.125);
        assert_eq!(c.ts, 0.25);
        assert_eq!(c.epsilon, 0.5);
    }

    #[test]
    fn snapping() {
        let c = AlgoConfig::new(0.3, 0.372).unwrap();
        assert_eq!(c.ell, 3);
        assert_eq!(c.steps, 27);
        assert_eq!(c.ts_steps, 10);
        assert!(c.delta <= c.epsilon.powi(3) + 1e-15);
    }

    #[test]
    fn refuses_small_epsilon_at_default_cap() {
        let err = AlgoConfig::new(0.1, 0.372).unwrap_err().to_string();
        assert!(err.contains("frac-cap"), "{err}");
        assert!(AlgoConfig::with_caps(0.1, 0.372, 40, 2).is_ok());
        assert!(AlgoConfig::new(0.0, 0.3).is_err());
        assert!(AlgoConfig::new(0.5, 1.5).is_err());
    }
}
