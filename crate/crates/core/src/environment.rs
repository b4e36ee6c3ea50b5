//! Sea and wind environment: deep-water linear waves, surface current with
//! Stokes drift, and a constant horizontal wind.
//!
//! Every query is a pure function of position and time. Depth factors are
//! evaluated with `z` clamped to the mean surface (`z <= 0`), since linear
//! wave kinematics are not defined above it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAVITY: f64 = 9.81;
pub const WATER_DENSITY: f64 = 1000.0;
pub const AIR_DENSITY: f64 = 1.22;
pub const WATER_VISCOSITY: f64 = 1.78e-6;

/// Deep-water dispersion relation `k = ω² / g`.
pub fn dispersion(omega: f64, gravity: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "wave frequency must be non-negative, got {omega}"
        )));
    }
    Ok(omega * omega / gravity)
}

/// One regular wave component. Frequency and wave number are derived once at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveComponent {
    amplitude: f64,
    period: f64,
    direction: f64,
    phase: f64,
    omega: f64,
    wave_number: f64,
}

impl WaveComponent {
    /// `direction` is +1 for waves travelling towards +x and -1 towards -x.
    pub fn new(amplitude: f64, period: f64, direction: i8, phase: f64, gravity: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::Domain(format!("wave amplitude must be >= 0, got {amplitude}")));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Domain(format!("wave period must be > 0, got {period}")));
        }
        if direction != 1 && direction != -1 {
            return Err(Error::Domain(format!("wave direction must be +1 or -1, got {direction}")));
        }
        if !(phase > -PI && phase <= PI) {
            return Err(Error::Domain(format!("wave phase must lie in (-pi, pi], got {phase}")));
        }
        let omega = 2.0 * PI / period;
        Ok(Self {
            amplitude,
            period,
            direction: f64::from(direction),
            phase,
            omega,
            wave_number: dispersion(omega, gravity)?,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn wave_number(&self) -> f64 {
        self.wave_number
    }

    /// Phase argument `d ω t − k x + σ`.
    pub fn argument(&self, x: f64, t: f64) -> f64 {
        self.direction * self.omega * t - self.wave_number * x + self.phase
    }
}

/// Serializable description of a wave component, as written in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub amplitude_m: f64,
    pub period_s: f64,
    pub direction: i8,
    #[serde(default)]
    pub phase_rad: f64,
}

impl WaveSpec {
    pub fn build(&self, gravity: f64) -> Result<WaveComponent> {
        WaveComponent::new(self.amplitude_m, self.period_s, self.direction, self.phase_rad, gravity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub waves: Vec<WaveComponent>,
    /// Lumped current `U_l`, m/s.
    pub current: f64,
    /// Horizontal wind, m/s.
    pub wind: f64,
    pub gravity: f64,
    pub water_density: f64,
    pub air_density: f64,
    pub water_viscosity: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self::calm()
    }
}

impl Environment {
    /// Flat, still water and no wind.
    pub fn calm() -> Self {
        Self {
            waves: Vec::new(),
            current: 0.0,
            wind: 0.0,
            gravity: GRAVITY,
            water_density: WATER_DENSITY,
            air_density: AIR_DENSITY,
            water_viscosity: WATER_VISCOSITY,
        }
    }

    pub fn with_waves(mut self, waves: Vec<WaveComponent>) -> Self {
        self.waves = waves;
        self
    }

    pub fn with_current(mut self, current: f64) -> Self {
        self.current = current;
        self
    }

    pub fn with_wind(mut self, wind: f64) -> Self {
        self.wind = wind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gravity", self.gravity),
            ("water density", self.water_density),
            ("air density", self.air_density),
            ("water viscosity", self.water_viscosity),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.current.is_finite() || !self.wind.is_finite() {
            return Err(Error::Config("current and wind must be finite".into()));
        }
        Ok(())
    }

    /// Surface elevation ζ(x, t).
    pub fn elevation(&self, x: f64, t: f64) -> f64 {
        self.waves
            .iter()
            .map(|w| w.amplitude * w.argument(x, t).sin())
            .sum()
    }

    /// Analytic ∂ζ/∂t.
    pub fn elevation_rate(&self, x: f64, t: f64) -> f64 {
        self.waves
            .iter()
            .map(|w| w.amplitude * w.direction * w.omega * w.argument(x, t).cos())
            .sum()
    }

    /// Wave-induced particle velocity `(v_x, v_z)` at depth `z`.
    pub fn particle_velocity(&self, x: f64, z: f64, t: f64) -> (f64, f64) {
        let z = z.min(0.0);
        self.waves.iter().fold((0.0, 0.0), |(vx, vz), w| {
            let scale = w.direction * w.omega * w.amplitude * (w.wave_number * z).exp();
            let arg = w.argument(x, t);
            (vx + scale * arg.sin(), vz + scale * arg.cos())
        })
    }

    /// Stokes drift velocity `U_s(z)`.
    pub fn stokes_drift(&self, z: f64) -> f64 {
        let z = z.min(0.0);
        self.waves
            .iter()
            .map(|w| {
                w.direction * w.amplitude * w.amplitude * w.omega * w.wave_number
                    * (2.0 * w.wave_number * z).exp()
            })
            .sum()
    }

    /// Surface current `U_c = U_l + U_s(z)`.
    pub fn surface_current(&self, z: f64) -> f64 {
        self.current + self.stokes_drift(z)
    }

    /// Total water velocity seen by a body at `(x, z)`: current plus wave
    /// particle velocity.
    pub fn water_velocity(&self, x: f64, z: f64, t: f64) -> (f64, f64) {
        let (vx, vz) = self.particle_velocity(x, z, t);
        (self.surface_current(z) + vx, vz)
    }

    fn slope(&self, x: f64, t: f64) -> f64 {
        self.waves
            .iter()
            .map(|w| w.amplitude * w.wave_number * w.argument(x, t).cos())
            .sum()
    }

    /// Buoy pitch when it stays tangent to the surface: `atan(∂ζ/∂x)` up to
    /// the sign convention of a clockwise-positive pitch.
    pub fn buoy_pitch_kinematic(&self, x_b: f64, t: f64) -> f64 {
        self.slope(x_b, t).atan()
    }

    /// Time derivative of [`Self::buoy_pitch_kinematic`] along a buoy moving
    /// with horizontal speed `vx_b`.
    pub fn buoy_pitch_rate_kinematic(&self, x_b: f64, vx_b: f64, t: f64) -> f64 {
        let s = self.slope(x_b, t);
        let ds: f64 = self
            .waves
            .iter()
            .map(|w| {
                let darg = w.direction * w.omega - w.wave_number * vx_b;
                -w.amplitude * w.wave_number * w.argument(x_b, t).sin() * darg
            })
            .sum();
        ds / (1.0 + s * s)
    }
}
