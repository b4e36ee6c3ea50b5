use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Free,
    ReadyToPull,
    Repositioning,
    Pulling,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Free => "free",
            Mode::ReadyToPull => "ready_to_pull",
            Mode::Repositioning => "repositioning",
            Mode::Pulling => "pulling",
        }
    }
}

/// Side of the buoy the UAV flies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Configuration {
    #[default]
    Front,
    Rear,
}

impl Configuration {
    pub fn from_alpha(alpha: f64) -> Self {
        if alpha <= FRAC_PI_2 {
            Configuration::Front
        } else {
            Configuration::Rear
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Configuration::Front => Configuration::Rear,
            Configuration::Rear => Configuration::Front,
        }
    }

    /// +1 in front, −1 at the rear: the direction a pull accelerates the buoy.
    pub fn sign(self) -> f64 {
        match self {
            Configuration::Front => 1.0,
            Configuration::Rear => -1.0,
        }
    }
}

/// Velocity-error thresholds (m/s) of the supervisory ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub first_mps: f64,
    pub second_mps: f64,
    /// Extra overshoot tolerated before pulling gives way to ready-to-pull.
    /// Zero reproduces the bare ladder.
    pub hysteresis_mps: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            first_mps: 0.2,
            second_mps: 0.6,
            hysteresis_mps: 0.0,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.hysteresis_mps >= 0.0 && self.first_mps + self.hysteresis_mps < self.second_mps) {
            return Err(Error::Config(format!(
                "hysteresis must be non-negative and keep first + hysteresis below second, got {}",
                self.hysteresis_mps
            )));
        }
        if !(self.first_mps > 0.0 && self.second_mps > self.first_mps) {
            return Err(Error::Config(format!(
                "thresholds need 0 < first < second, got {} and {}",
                self.first_mps, self.second_mps
            )));
        }
        Ok(())
    }
}

/// One pass of the supervisory ladder. The wider threshold is tested first
/// so that repositioning is reachable; if no rung fires the mode is held.
pub fn state_machine_step(v: f64, v_ref: f64, configuration: Configuration, mode: Mode, th: &Thresholds) -> Mode {
    use Configuration::*;
    let (e1, e2) = (th.first_mps, th.second_mps);
    let release = if mode == Mode::Pulling { e1 + th.hysteresis_mps } else { e1 };
    match configuration {
        Front if v > v_ref + e2 => Mode::Repositioning,
        Front if v < v_ref - e1 => Mode::Pulling,
        Front if v > v_ref + release => Mode::ReadyToPull,
        Rear if v < v_ref - e2 => Mode::Repositioning,
        Rear if v > v_ref + e1 => Mode::Pulling,
        Rear if v < v_ref - release => Mode::ReadyToPull,
        _ => mode,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ladder_examples() {
        let th = Thresholds::default();
        let f = Configuration::Front;
        let r = Configuration::Rear;
        assert_eq!(state_machine_step(4.5, 5.0, f, Mode::Free, &th), Mode::Pulling);
        assert_eq!(state_machine_step(5.3, 5.0, f, Mode::Pulling, &th), Mode::ReadyToPull);
        assert_eq!(state_machine_step(5.7, 5.0, f, Mode::Pulling, &th), Mode::Repositioning);
        assert_eq!(state_machine_step(-3.5, -4.0, r, Mode::ReadyToPull, &th), Mode::Pulling);
        assert_eq!(state_machine_step(-4.3, -4.0, r, Mode::Pulling, &th), Mode::ReadyToPull);
        assert_eq!(state_machine_step(-4.7, -4.0, r, Mode::Pulling, &th), Mode::Repositioning);
        assert_eq!(state_machine_step(5.1, 5.0, f, Mode::Pulling, &th), Mode::Pulling);
        assert_eq!(state_machine_step(4.9, 5.0, f, Mode::ReadyToPull, &th), Mode::ReadyToPull);
    }

    #[test]
    fn configuration_helpers() {
        assert_eq!(Configuration::from_alpha(0.7), Configuration::Front);
        assert_eq!(Configuration::from_alpha(2.4), Configuration::Rear);
        assert_eq!(Configuration::Front.flipped(), Configuration::Rear);
        assert!(Thresholds { first_mps: 0.5, second_mps: 0.4, hysteresis_mps: 0.0 }.validate().is_err());
        assert!(Thresholds { hysteresis_mps: 0.4, ..Thresholds::default() }.validate().is_err());
        assert!(Thresholds { hysteresis_mps: -0.1, ..Thresholds::default() }.validate().is_err());
    }

    #[test]
    fn hysteresis_only_delays_release() {
        let th = Thresholds { hysteresis_mps: 0.2, ..Thresholds::default() };
        let f = Configuration::Front;
        let r = Configuration::Rear;
        assert_eq!(state_machine_step(5.3, 5.0, f, Mode::Pulling, &th), Mode::Pulling);
        assert_eq!(state_machine_step(5.45, 5.0, f, Mode::Pulling, &th), Mode::ReadyToPull);
        assert_eq!(state_machine_step(5.3, 5.0, f, Mode::Free, &th), Mode::ReadyToPull);
        assert_eq!(state_machine_step(-4.3, -4.0, r, Mode::Pulling, &th), Mode::Pulling);
        assert_eq!(state_machine_step(-4.7, -4.0, r, Mode::Pulling, &th), Mode::Repositioning);
        assert_eq!(state_machine_step(4.7, 5.0, f, Mode::ReadyToPull, &th), Mode::Pulling);
    }

    proptest! {
        #[test]
        fn never_pulls_against_configuration(v in -20.0f64..20.0, v_ref in -20.0f64..20.0, rear in any::<bool>()) {
            let cfg = if rear { Configuration::Rear } else { Configuration::Front };
            let th = Thresholds::default();
            for prev in [Mode::Free, Mode::ReadyToPull, Mode::Repositioning] {
                let m = state_machine_step(v, v_ref, cfg, prev, &th);
                if m == Mode::Pulling {
                    // a pull is only requested when it accelerates the buoy the right way
                    prop_assert!(cfg.sign() * (v_ref - v) > th.first_mps);
                }
            }
        }
    }
}
