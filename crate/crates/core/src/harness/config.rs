use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::buoy::BuoyParams;
use crate::controller::{ControllerConfig, ControllerKind};
use crate::coupled::{CableParams, PitchModel, System};
use crate::environment::{self, Environment, WaveSpec};
use crate::error::{Error, Result};
use crate::uav::UavParams;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentSpec {
    pub current_mps: f64,
    pub wind_mps: f64,
    pub gravity_mps2: f64,
    pub water_density_kg_m3: f64,
    pub air_density_kg_m3: f64,
    pub water_viscosity_m2_s: f64,
    pub waves: Vec<WaveSpec>,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        Self {
            current_mps: 0.0,
            wind_mps: 0.0,
            gravity_mps2: environment::GRAVITY,
            water_density_kg_m3: environment::WATER_DENSITY,
            air_density_kg_m3: environment::AIR_DENSITY,
            water_viscosity_m2_s: environment::WATER_VISCOSITY,
            waves: Vec::new(),
        }
    }
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<Environment> {
        let waves = self
            .waves
            .iter()
            .map(|w| w.build(self.gravity_mps2))
            .collect::<Result<Vec<_>>>()?;
        let env = Environment {
            waves,
            current: self.current_mps,
            wind: self.wind_mps,
            gravity: self.gravity_mps2,
            water_density: self.water_density_kg_m3,
            air_density: self.air_density_kg_m3,
            water_viscosity: self.water_viscosity_m2_s,
        };
        env.validate()?;
        Ok(env)
    }
}

/// Raw speed setpoint as `(time_s, speed_mps)` breakpoints, linearly
/// interpolated and held beyond the ends, plus the UAV altitude setpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SetpointSpec {
    pub elevation_m: f64,
    pub speed_schedule: Vec<[f64; 2]>,
}

impl Default for SetpointSpec {
    fn default() -> Self {
        Self {
            elevation_m: 5.0,
            speed_schedule: vec![[0.0, 0.0]],
        }
    }
}

impl SetpointSpec {
    pub fn validate(&self) -> Result<()> {
        if self.speed_schedule.is_empty() {
            return Err(Error::Config("speed_schedule needs at least one breakpoint".into()));
        }
        if self.speed_schedule.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("speed_schedule entries must be finite".into()));
        }
        if self.speed_schedule.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(Error::Config("speed_schedule times must be strictly increasing".into()));
        }
        if !self.elevation_m.is_finite() {
            return Err(Error::Config("elevation_m must be finite".into()));
        }
        Ok(())
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        let s = &self.speed_schedule;
        if t <= s[0][0] {
            return s[0][1];
        }
        for w in s.windows(2) {
            let ([t0, v0], [t1, v1]) = (w[0], w[1]);
            if t <= t1 {
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
            }
        }
        s[s.len() - 1][1]
    }
}

/// Mean absolute error targets of the simulated sensors and the feedback
/// filter settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSpec {
    pub noise_enabled: bool,
    pub noise_cutoff_hz: f64,
    pub x_u_m: f64,
    pub z_u_m: f64,
    pub theta_u_deg: f64,
    pub alpha_deg: f64,
    pub r_m: f64,
    pub vx_u_mps: f64,
    pub vz_u_mps: f64,
    pub omega_u_dps: f64,
    pub alpha_dot_dps: f64,
    pub r_dot_mps: f64,
    /// Low-pass applied to the accelerations handed to the controller.
    pub accel_filter_hz: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            noise_enabled: true,
            noise_cutoff_hz: 10.0,
            x_u_m: 0.02,
            z_u_m: 0.02,
            theta_u_deg: 0.5,
            alpha_deg: 0.16,
            r_m: 0.02,
            vx_u_mps: 0.02,
            vz_u_mps: 0.02,
            omega_u_dps: 0.5,
            alpha_dot_dps: 0.16,
            r_dot_mps: 0.02,
            accel_filter_hz: 20.0,
        }
    }
}

impl SensorSpec {
    pub fn noiseless() -> Self {
        Self {
            noise_enabled: false,
            ..Self::default()
        }
    }

    /// Per-channel targets in SI units (m, rad, m/s, rad/s) in the order
    /// `x_u, z_u, θ_u, α, r, ẋ_u, ż_u, θ̇_u, α̇, ṙ`.
    pub fn targets(&self) -> [f64; 10] {
        let d = PI / 180.0;
        [
            self.x_u_m,
            self.z_u_m,
            self.theta_u_deg * d,
            self.alpha_deg * d,
            self.r_m,
            self.vx_u_mps,
            self.vz_u_mps,
            self.omega_u_dps * d,
            self.alpha_dot_dps * d,
            self.r_dot_mps,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets().iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Config("sensor noise targets must be >= 0".into()));
        }
        if !(self.noise_cutoff_hz > 0.0 && self.accel_filter_hz > 0.0) {
            return Err(Error::Config("sensor filter cutoffs must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintPolicy {
    #[default]
    Warn,
    Halt,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub trace_csv: Option<PathBuf>,
    pub plot_svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub duration_s: f64,
    pub dt_s: f64,
    pub control_period_s: f64,
    /// Trace rows are written every this many integration steps.
    pub log_every: usize,
    pub seed: u64,
    pub pitch_model: PitchModel,
    pub on_constraint: ConstraintPolicy,
    /// Cable elevation at which the UAV starts, hovering at the standby
    /// radius.
    pub initial_elevation_deg: f64,
    /// Thrust-gate margin `ε_m` of the constraint monitor.
    pub thrust_margin: f64,
    /// Disk area of the momentum-theory power model.
    pub rotor_disk_area_m2: f64,
    pub environment: EnvironmentSpec,
    pub setpoint: SetpointSpec,
    pub buoy: BuoyParams,
    pub uav: UavParams,
    pub cable: CableParams,
    pub controller: ControllerConfig,
    pub sensors: SensorSpec,
    pub output: OutputSpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: "custom".into(),
            duration_s: 10.0,
            dt_s: 1e-3,
            control_period_s: 4e-3,
            log_every: 10,
            seed: 1,
            pitch_model: PitchModel::Kinematic,
            on_constraint: ConstraintPolicy::Warn,
            initial_elevation_deg: 45.0,
            thrust_margin: 0.1,
            rotor_disk_area_m2: 0.5,
            environment: EnvironmentSpec::default(),
            setpoint: SetpointSpec::default(),
            buoy: BuoyParams::default(),
            uav: UavParams::default(),
            cable: CableParams::default(),
            controller: ControllerConfig::default(),
            sensors: SensorSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

fn wave(amplitude_m: f64, period_s: f64, direction: i8, phase_rad: f64) -> WaveSpec {
    WaveSpec {
        amplitude_m,
        period_s,
        direction,
        phase_rad,
    }
}

impl ScenarioConfig {
    /// Built-in scenarios `c1`–`c4`.
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self {
            name: name.to_string(),
            environment: EnvironmentSpec {
                current_mps: -0.5,
                wind_mps: -3.0,
                ..EnvironmentSpec::default()
            },
            ..Self::default()
        };
        // accelerate, cruise, then one continuous deceleration through zero;
        // every speed change at 0.25 m/s², the slope of the C3/C4 ramp
        let tow = vec![[0.0, 0.0], [20.0, 5.0], [50.0, 5.0], [86.0, -4.0], [120.0, -4.0]];
        let ramp = |end: f64| vec![[0.0, 0.0], [end, 0.25 * end]];
        let mut cfg = base;
        match name {
            "c1" => {
                cfg.duration_s = 120.0;
                cfg.controller.svcs.thresholds.hysteresis_mps = 0.2;
                cfg.setpoint.speed_schedule = tow;
            }
            "c2" => {
                cfg.duration_s = 120.0;
                cfg.controller.svcs.thresholds.hysteresis_mps = 0.2;
                cfg.setpoint.speed_schedule = tow;
                cfg.environment.waves = vec![wave(0.135, 3.0, 1, PI), wave(0.75, 5.7, 1, 0.0)];
            }
            "c3" => {
                cfg.duration_s = 40.0;
                cfg.setpoint.speed_schedule = ramp(40.0);
                cfg.environment.waves = vec![wave(0.135, 3.0, -1, 0.0)];
            }
            "c4" => {
                cfg.duration_s = 60.0;
                cfg.setpoint.speed_schedule = ramp(60.0);
                cfg.environment.waves = vec![wave(1.65, 7.0, -1, 0.0)];
            }
            other => return Err(Error::Config(format!("unknown preset {other:?}; expected c1, c2, c3 or c4"))),
        }
        Ok(cfg)
    }

    pub fn with_controller(mut self, kind: ControllerKind) -> Self {
        self.controller.kind = kind;
        self
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.dt_s > 0.0) || !(self.duration_s > 0.0) {
            return Err(Error::Config("dt_s and duration_s must be positive".into()));
        }
        if !(self.control_period_s >= self.dt_s) {
            return Err(Error::Config("control_period_s must be at least dt_s".into()));
        }
        let ratio = self.control_period_s / self.dt_s;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::Config("control_period_s must be an integer multiple of dt_s".into()));
        }
        if !(self.initial_elevation_deg > 0.0 && self.initial_elevation_deg < 180.0) {
            return Err(Error::Config("initial_elevation_deg must lie in (0, 180)".into()));
        }
        if self.log_every == 0 {
            return Err(Error::Config("log_every must be at least 1".into()));
        }
        if !(self.rotor_disk_area_m2 > 0.0) || !(0.0..1.0).contains(&self.thrust_margin) {
            return Err(Error::Config("rotor_disk_area_m2 must be positive and thrust_margin in [0, 1)".into()));
        }
        self.setpoint.validate()?;
        self.sensors.validate()?;
        self.controller.validate()?;
        self.system()?.validate()
    }

    pub fn system(&self) -> Result<System> {
        Ok(System {
            env: self.environment.build()?,
            buoy: self.buoy,
            uav: self.uav,
            cable: self.cable,
            pitch: self.pitch_model,
        })
    }

    pub fn control_every(&self) -> usize {
        (self.control_period_s / self.dt_s).round() as usize
    }

    pub fn steps(&self) -> usize {
        (self.duration_s / self.dt_s).round() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for name in ["c1", "c2", "c3", "c4"] {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            let text = cfg.to_toml_string().unwrap();
            assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
        }
        assert!(ScenarioConfig::preset("c9").is_err());
    }

    #[test]
    fn scenario_waves() {
        let c2 = ScenarioConfig::preset("c2").unwrap();
        assert_eq!(c2.environment.waves[0], wave(0.135, 3.0, 1, PI));
        assert_eq!(c2.environment.waves[1], wave(0.75, 5.7, 1, 0.0));
        let c4 = ScenarioConfig::preset("c4").unwrap();
        assert_eq!(c4.environment.waves, vec![wave(1.65, 7.0, -1, 0.0)]);
        assert_eq!(c4.environment.current_mps, -0.5);
        assert_eq!(c4.environment.wind_mps, -3.0);
        assert_eq!(c4.setpoint.speed_at(20.0), 5.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ScenarioConfig::from_toml_str("schema_version = 1\nbogus = 3\n").is_err());
        assert!(ScenarioConfig::from_toml_str("schema_version = 2\n").is_err());
        assert!(ScenarioConfig::from_toml_str("schema_version = 1\ndt_s = 0.0\n").is_err());
        assert!(ScenarioConfig::from_toml_str("schema_version = 1\n[uav]\nmass = 2.0\n").is_err());
        let bad = "schema_version = 1\n[setpoint]\nspeed_schedule = [[0.0, 0.0], [0.0, 1.0]]\n";
        assert!(ScenarioConfig::from_toml_str(bad).is_err());
        let ok = "schema_version = 1\n[controller]\nkind = \"cbnc\"\n[environment]\ncurrent_mps = -0.5\n";
        let cfg = ScenarioConfig::from_toml_str(ok).unwrap();
        assert_eq!(cfg.controller.kind, ControllerKind::Cbnc);
    }

    #[test]
    fn schedule_interpolation() {
        let s = SetpointSpec {
            elevation_m: 5.0,
            speed_schedule: vec![[0.0, 0.0], [10.0, 5.0], [30.0, 5.0], [50.0, 0.0]],
        };
        assert_eq!(s.speed_at(-1.0), 0.0);
        assert_eq!(s.speed_at(5.0), 2.5);
        assert_eq!(s.speed_at(20.0), 5.0);
        assert_eq!(s.speed_at(40.0), 2.5);
        assert_eq!(s.speed_at(99.0), 0.0);
    }
}
