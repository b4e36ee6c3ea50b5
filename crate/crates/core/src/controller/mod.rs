//! Surge-velocity control: a supervisory state machine over four operating
//! modes, polar backstepping laws for the UAV position relative to the buoy
//! and for the buoy surge speed, thrust/attitude decomposition and an inner
//! pitch loop. A Cartesian PID baseline shares the inner loop.

mod filters;
mod laws;
mod machine;

pub use filters::{FirstOrder, FourthOrder, SecondOrder};
pub use laws::*;
pub use machine::{state_machine_step, Configuration, Mode, Thresholds};

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::buoy::{self, BuoyParams};
use crate::coupled::{self, PolarKinematics, System};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::uav::{ControlCommand, UavParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    #[default]
    Svcs,
    Cbnc,
}

/// Tuning shared by both controllers plus the per-controller sections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    /// Backstepping gains; the third channel is the pitch loop of both
    /// controllers.
    pub gains: BacksteppingGains,
    pub speed_filter_hz: f64,
    /// Bandwidth of the filter that differentiates the pitch command.
    pub pitch_filter_hz: f64,
    pub svcs: SvcsConfig,
    pub cbnc: CbncGains,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: ControllerKind::Svcs,
            gains: BacksteppingGains::default(),
            speed_filter_hz: 0.5,
            pitch_filter_hz: 5.0,
            svcs: SvcsConfig::default(),
            cbnc: CbncGains::default(),
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        self.gains.validate()?;
        self.svcs.validate()?;
        self.cbnc.validate()?;
        for (name, v) in [("speed_filter_hz", self.speed_filter_hz), ("pitch_filter_hz", self.pitch_filter_hz)] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("controller {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvcsConfig {
    pub velocity_kp: f64,
    pub velocity_ki: f64,
    pub thresholds: Thresholds,
    /// Standby radius as a fraction of the cable length.
    pub standby_radius_fraction: f64,
    pub reposition_rate_rad_s: f64,
    pub radius_filter_hz: f64,
    pub blend_time_constant_s: f64,
    pub position_integral_limit: f64,
    pub velocity_integral_limit: f64,
    /// The surge law engages once the measured span is within this margin of
    /// the cable length and lets go at twice the margin.
    pub slack_margin_m: f64,
}

impl Default for SvcsConfig {
    fn default() -> Self {
        Self {
            velocity_kp: 25.0,
            velocity_ki: 12.0,
            thresholds: Thresholds::default(),
            standby_radius_fraction: 0.98,
            reposition_rate_rad_s: 0.5,
            radius_filter_hz: 0.5,
            blend_time_constant_s: 0.5,
            position_integral_limit: 10.0,
            velocity_integral_limit: 5.0,
            slack_margin_m: 0.05,
        }
    }
}

impl SvcsConfig {
    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        for (name, v) in [
            ("velocity_kp", self.velocity_kp),
            ("velocity_ki", self.velocity_ki),
            ("reposition_rate_rad_s", self.reposition_rate_rad_s),
            ("radius_filter_hz", self.radius_filter_hz),
            ("blend_time_constant_s", self.blend_time_constant_s),
            ("position_integral_limit", self.position_integral_limit),
            ("velocity_integral_limit", self.velocity_integral_limit),
            ("slack_margin_m", self.slack_margin_m),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("svcs {name} must be positive, got {v}")));
            }
        }
        if !(self.standby_radius_fraction > 0.0 && self.standby_radius_fraction < 1.0) {
            return Err(Error::Config("svcs standby_radius_fraction must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// What the controller measures. Positions, angles and their rates carry
/// sensor noise; accelerations are low-passed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Feedback {
    pub x_u: f64,
    pub z_u: f64,
    pub theta_u: f64,
    pub vx_u: f64,
    pub vz_u: f64,
    pub omega_u: f64,
    pub r: f64,
    pub alpha: f64,
    pub r_dot: f64,
    pub alpha_dot: f64,
    pub ax_u: f64,
    pub az_u: f64,
    pub ax_b: f64,
    pub az_b: f64,
}

impl Feedback {
    /// Buoy position recovered from the UAV pose and the relative polar
    /// measurement.
    pub fn buoy_position(&self) -> (f64, f64) {
        let (s, c) = self.alpha.sin_cos();
        (self.x_u - self.r * c, self.z_u - self.r * s)
    }

    pub fn buoy_velocity(&self) -> (f64, f64) {
        let (s, c) = self.alpha.sin_cos();
        (
            self.vx_u - (self.r_dot * c - self.r * s * self.alpha_dot),
            self.vz_u - (self.r_dot * s + self.r * c * self.alpha_dot),
        )
    }

    pub fn r_ddot(&self) -> f64 {
        let p = PolarKinematics {
            r: self.r,
            alpha: self.alpha,
            r_dot: self.r_dot,
            alpha_dot: self.alpha_dot,
        };
        coupled::polar_accel(&p, Vector2::new(self.ax_u - self.ax_b, self.az_u - self.az_b)).0
    }

    fn polar(&self) -> PolarSignals {
        PolarSignals {
            r: self.r,
            alpha: self.alpha,
            r_dot: self.r_dot,
            alpha_dot: self.alpha_dot,
            ax_b: self.ax_b,
            az_b: self.az_b,
        }
    }
}

/// Raw (unsmoothed) setpoint.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Setpoint {
    pub speed_mps: f64,
    pub elevation_m: f64,
}

/// Controller internals exposed for logging.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControllerLog {
    pub mode: Option<Mode>,
    pub configuration: Option<Configuration>,
    pub alpha_ref: f64,
    pub r_ref: f64,
    pub speed_ref: f64,
    pub tension_ff: f64,
    pub theta_c: f64,
    pub delta_hat: [f64; 3],
    pub velocity_integral: f64,
    pub alpha_clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub command: ControlCommand,
    pub log: ControllerLog,
}

/// Model constants the controller is allowed to know: no sea state.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerModel {
    pub uav: UavParams,
    pub buoy: BuoyParams,
    pub cable_length: f64,
    pub eps_alpha: f64,
    pub gravity: f64,
    /// Calm-water environment carrying only fluid constants.
    pub fluid: Environment,
    /// Wetted area of the freely floating buoy.
    pub wetted_area_free: f64,
}

impl ControllerModel {
    pub fn from_system(sys: &System) -> Self {
        let mut fluid = Environment::calm();
        fluid.gravity = sys.env.gravity;
        fluid.water_density = sys.env.water_density;
        fluid.air_density = sys.env.air_density;
        fluid.water_viscosity = sys.env.water_viscosity;
        let dh = sys.buoy.free_floating_delta_h(sys.env.water_density);
        Self {
            uav: sys.uav,
            buoy: sys.buoy,
            cable_length: sys.cable.length_m,
            eps_alpha: sys.cable.eps_alpha_rad,
            gravity: sys.env.gravity,
            wetted_area_free: buoy::wetted_area(dh, &sys.buoy),
            fluid,
        }
    }
}

/// Pitch loop with a filtered double differentiator on the command.
#[derive(Debug, Clone, Copy, PartialEq)]
struct AttitudeLoop {
    command: SecondOrder,
    integral: f64,
    limit: f64,
}

impl AttitudeLoop {
    fn new(cutoff_hz: f64, initial: f64, limit: f64) -> Self {
        Self {
            command: SecondOrder::critically_damped(cutoff_hz, initial),
            integral: 0.0,
            limit,
        }
    }

    fn step(&mut self, theta_c: f64, theta: f64, omega: f64, dt: f64, inertia: f64, gains: &BacksteppingGains) -> f64 {
        let rate_before = self.command.rate();
        self.command.step(theta_c, dt);
        // mean acceleration over the hold interval; the end-of-interval value
        // is a sawtooth when the filter is fast relative to the control rate
        let accel = (self.command.rate() - rate_before) / dt;
        let e = theta - self.command.value();
        let e_dot = omega - self.command.rate();
        let u2 = inner_loop_pitch(e, e_dot, self.integral, accel, inertia, gains);
        self.integral = (self.integral + dt * (e + e_dot / gains.k1[2])).clamp(-self.limit, self.limit);
        u2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Arc {
    from: f64,
    started: f64,
    towards: Configuration,
}

/// State-machine supervised surge-velocity controller.
#[derive(Debug, Clone)]
pub struct Svcs {
    cfg: ControllerConfig,
    model: ControllerModel,
    mode: Mode,
    configuration: Configuration,
    speed: SecondOrder,
    /// Decaying offset that starts the pulling reference at the measured speed.
    entry: SecondOrder,
    engaged: bool,
    radius: FourthOrder,
    fade: FirstOrder,
    attitude: AttitudeLoop,
    position_integral: Vector2<f64>,
    velocity_integral: f64,
    theta_held: f64,
    alpha_ref: f64,
    arc: Option<Arc>,
    t: f64,
    started: bool,
}

impl Svcs {
    pub fn new(cfg: ControllerConfig, model: ControllerModel) -> Self {
        let r_sb = cfg.svcs.standby_radius_fraction * model.cable_length;
        Self {
            mode: Mode::Free,
            configuration: Configuration::Front,
            speed: SecondOrder::critically_damped(cfg.speed_filter_hz, 0.0),
            entry: SecondOrder::critically_damped(cfg.speed_filter_hz, 0.0),
            engaged: false,
            radius: FourthOrder::butterworth(cfg.svcs.radius_filter_hz, r_sb),
            fade: FirstOrder::new(cfg.svcs.blend_time_constant_s, 0.0),
            attitude: AttitudeLoop::new(cfg.pitch_filter_hz, 0.0, cfg.svcs.position_integral_limit),
            position_integral: Vector2::zeros(),
            velocity_integral: 0.0,
            theta_held: 0.0,
            alpha_ref: FRAC_PI_2,
            arc: None,
            t: 0.0,
            started: false,
            cfg,
            model,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn configuration(&self) -> Configuration {
        self.configuration
    }

    pub fn standby_radius(&self) -> f64 {
        self.cfg.svcs.standby_radius_fraction * self.model.cable_length
    }

    pub fn step(&mut self, sp: Setpoint, fb: &Feedback, dt: f64) -> ControlOutput {
        let m = &self.model;
        let g = m.gravity;
        let sc = &self.cfg.svcs;
        let (_, z_b) = fb.buoy_position();
        let (v, vz_b) = fb.buoy_velocity();
        if !self.started {
            self.started = true;
            self.configuration = Configuration::from_alpha(fb.alpha);
            self.speed.reset(sp.speed_mps);
            self.alpha_ref = fb.alpha;
            self.theta_held = fb.theta_u;
            self.attitude.command.reset(fb.theta_u);
        }
        self.t += dt;
        self.speed.step(sp.speed_mps, dt);
        let (v_bar, v_bar_dot) = (self.speed.value(), self.speed.rate());

        if self.mode != Mode::Repositioning {
            let next = state_machine_step(v, v_bar, self.configuration, self.mode, &sc.thresholds);
            if next == Mode::Repositioning {
                self.arc = Some(Arc {
                    from: self.alpha_ref,
                    started: self.t,
                    towards: self.configuration.flipped(),
                });
            }
            self.mode = next;
        }

        let r_sb = sc.standby_radius_fraction * m.cable_length;
        let r_target = if self.mode == Mode::Pulling { m.cable_length } else { r_sb };
        self.radius.step(r_target, dt);
        let (r_bar, r_bar_dot, r_bar_ddot) = (self.radius.value(), self.radius.rate(), self.radius.accel());

        let elev = |cfg| elevation_reference(sp.elevation_m, z_b, vz_b, fb.az_b, r_bar, r_bar_dot, r_bar_ddot, cfg);
        let mut reference = elev(self.configuration);
        if let Some(arc) = self.arc {
            let target = elev(arc.towards);
            let dir = -arc.towards.sign();
            let along = arc.from + dir * sc.reposition_rate_rad_s * (self.t - arc.started);
            if dir * (along - target.alpha) >= 0.0 {
                self.configuration = arc.towards;
                self.mode = Mode::ReadyToPull;
                // the integral was learned with the opposite cable direction
                self.velocity_integral = 0.0;
                self.arc = None;
                reference = target;
            } else {
                reference = ElevationReference {
                    alpha: along,
                    alpha_dot: dir * sc.reposition_rate_rad_s,
                    alpha_ddot: 0.0,
                    clamped: false,
                };
            }
        }
        self.alpha_ref = reference.alpha;

        let pol = fb.polar();
        let h = nonlinear_terms(&pol, g);
        let e = Vector3::new(fb.r - r_bar, fb.alpha - reference.alpha, 0.0);
        let e_dot = Vector3::new(fb.r_dot - r_bar_dot, fb.alpha_dot - reference.alpha_dot, 0.0);
        let e_int = Vector3::new(self.position_integral[0], self.position_integral[1], 0.0);
        let u_pos = position_law(
            &ChannelErrors { e, e_dot, e_int },
            &Vector3::new(r_bar_ddot, reference.alpha_ddot, 0.0),
            &h,
            &Vector3::zeros(),
            &input_scale(fb.r, m.uav.mass_kg, m.uav.inertia_pitch_kgm2),
            &self.cfg.gains,
        );

        let pulling = self.mode == Mode::Pulling && (fb.alpha - FRAC_PI_2).abs() > m.eps_alpha;
        // the surge law assumes a taut cable; until the span reaches the
        // cable length the position law closes the gap and the velocity
        // reference is parked at the measured speed
        let l = m.cable_length;
        if !pulling || fb.r < l - 2.0 * sc.slack_margin_m {
            self.engaged = false;
        } else if fb.r > l - sc.slack_margin_m {
            self.engaged = true;
        }
        if !self.engaged {
            self.entry.reset(v - v_bar);
        }
        self.entry.step(0.0, dt);
        let (v_ref, v_ref_dot) = (v_bar + self.entry.value(), v_bar_dot + self.entry.rate());
        let (e_v, tension_ff, u_vel) = if pulling {
            let e_v = v - v_ref;
            let t_ff = tension_feedforward(v_ref, reference.alpha, m.wetted_area_free, &m.buoy, &m.fluid);
            let h_v = velocity_model_term(fb.r, fb.alpha, fb.alpha_dot, fb.r_ddot(), fb.az_b, g);
            let u = surge_velocity_law(
                h_v,
                fb.alpha,
                e_v,
                self.velocity_integral,
                v_ref_dot,
                t_ff,
                m.uav.mass_kg,
                sc.velocity_kp,
                sc.velocity_ki,
            );
            (e_v, t_ff, u)
        } else {
            (0.0, 0.0, 0.0)
        };
        self.fade.step(if self.engaged { 1.0 } else { 0.0 }, dt);
        let mut u_r = blend(u_pos[0], u_vel, pulling, self.fade.value());
        if pulling {
            // the cable cannot push: never ask for less than the zero-tension hold
            u_r = u_r.max(u_pos[0]);
        }

        let d = decompose(u_r, u_pos[1], fb.alpha, m.uav.pitch_max_rad, self.theta_held);
        self.theta_held = d.theta_raw;
        let u2 = self
            .attitude
            .step(d.theta_c, fb.theta_u, fb.omega_u, dt, m.uav.inertia_pitch_kgm2, &self.cfg.gains);

        let rate = self.cfg.gains.integral_rate(&e, &e_dot);
        let lim = sc.position_integral_limit;
        if !self.engaged {
            self.position_integral[0] = (self.position_integral[0] + dt * rate[0]).clamp(-lim, lim);
        }
        self.position_integral[1] = (self.position_integral[1] + dt * rate[1]).clamp(-lim, lim);
        if self.engaged {
            let vl = sc.velocity_integral_limit;
            self.velocity_integral = (self.velocity_integral + dt * e_v).clamp(-vl, vl);
        }

        let ki = self.cfg.gains.ki();
        ControlOutput {
            command: ControlCommand::new(d.u1, u2),
            log: ControllerLog {
                mode: Some(self.mode),
                configuration: Some(self.configuration),
                alpha_ref: reference.alpha,
                r_ref: r_bar,
                speed_ref: if pulling { v_ref } else { v_bar },
                tension_ff,
                theta_c: d.theta_c,
                delta_hat: [
                    ki[0] * self.position_integral[0],
                    ki[1] * self.position_integral[1],
                    ki[2] * self.attitude.integral,
                ],
                velocity_integral: self.velocity_integral,
                alpha_clamped: reference.clamped,
            },
        }
    }
}

/// Cartesian PID baseline: UAV horizontal speed and altitude loops, no
/// supervision.
#[derive(Debug, Clone)]
pub struct Cbnc {
    cfg: ControllerConfig,
    model: ControllerModel,
    speed: SecondOrder,
    attitude: AttitudeLoop,
    integral: [f64; 2],
    started: bool,
}

impl Cbnc {
    pub fn new(cfg: ControllerConfig, model: ControllerModel) -> Self {
        Self {
            speed: SecondOrder::critically_damped(cfg.speed_filter_hz, 0.0),
            attitude: AttitudeLoop::new(cfg.pitch_filter_hz, 0.0, cfg.cbnc.integral_limit),
            integral: [0.0; 2],
            started: false,
            cfg,
            model,
        }
    }

    pub fn step(&mut self, sp: Setpoint, fb: &Feedback, dt: f64) -> ControlOutput {
        let m = &self.model;
        if !self.started {
            self.started = true;
            self.speed.reset(sp.speed_mps);
            self.attitude.command.reset(fb.theta_u);
        }
        self.speed.step(sp.speed_mps, dt);
        let e = [self.speed.value() - fb.vx_u, sp.elevation_m - fb.z_u];
        let e_dot = [self.speed.rate() - fb.ax_u, -fb.vz_u];
        let (fx, fz) = cbnc_forces(e, e_dot, self.integral, &self.cfg.cbnc);
        let (u1, theta_raw) = cbnc_decompose(fx, fz, m.uav.mass_kg * m.gravity);
        let theta_c = limit_pitch(theta_raw, m.uav.pitch_max_rad);
        let u2 = self
            .attitude
            .step(theta_c, fb.theta_u, fb.omega_u, dt, m.uav.inertia_pitch_kgm2, &self.cfg.gains);
        let lim = self.cfg.cbnc.integral_limit;
        for (i, acc) in self.integral.iter_mut().enumerate() {
            *acc = (*acc + dt * e[i]).clamp(-lim, lim);
        }
        ControlOutput {
            command: ControlCommand::new(u1, u2),
            log: ControllerLog {
                speed_ref: self.speed.value(),
                theta_c,
                delta_hat: [0.0, 0.0, self.cfg.gains.ki()[2] * self.attitude.integral],
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
pub enum Controller {
    Svcs(Box<Svcs>),
    Cbnc(Box<Cbnc>),
}

impl Controller {
    pub fn new(cfg: &ControllerConfig, sys: &System) -> Result<Self> {
        cfg.validate()?;
        let model = ControllerModel::from_system(sys);
        Ok(match cfg.kind {
            ControllerKind::Svcs => Controller::Svcs(Box::new(Svcs::new(*cfg, model))),
            ControllerKind::Cbnc => Controller::Cbnc(Box::new(Cbnc::new(*cfg, model))),
        })
    }

    pub fn step(&mut self, sp: Setpoint, fb: &Feedback, dt: f64) -> ControlOutput {
        match self {
            Controller::Svcs(c) => c.step(sp, fb, dt),
            Controller::Cbnc(c) => c.step(sp, fb, dt),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn model() -> ControllerModel {
        ControllerModel::from_system(&System::new(Environment::calm()))
    }

    fn standby_feedback(alpha: f64, r: f64) -> Feedback {
        let z_b = 0.0625;
        Feedback {
            r,
            alpha,
            x_u: r * alpha.cos(),
            z_u: z_b + r * alpha.sin(),
            ..Default::default()
        }
    }

    #[test]
    fn free_floating_wetted_area() {
        assert_abs_diff_eq!(model().wetted_area_free, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn feedback_recovers_buoy_motion() {
        let fb = Feedback {
            x_u: 4.0,
            z_u: 5.0,
            vx_u: 1.0,
            vz_u: 0.2,
            r: 7.0,
            alpha: 0.8,
            r_dot: 0.1,
            alpha_dot: -0.05,
            ..Default::default()
        };
        let (xb, zb) = fb.buoy_position();
        let (vx, vz) = fb.buoy_velocity();
        let back = coupled::to_polar(
            &crate::buoy::BuoyState { x: xb, z: zb, vx, vz, ..Default::default() },
            &crate::uav::UavState { x: 4.0, z: 5.0, vx: 1.0, vz: 0.2, ..Default::default() },
        )
        .unwrap();
        assert_abs_diff_eq!(back.r, 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(back.alpha, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(back.r_dot, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(back.alpha_dot, -0.05, epsilon = 1e-12);
    }

    #[test]
    fn standby_hover_is_quiet() {
        // On station with the setpoint equal to the drift speed: no pull,
        // thrust balances weight.
        let mut c = Svcs::new(ControllerConfig::default(), model());
        let r_sb = c.standby_radius();
        let alpha = ((5.0 - 0.0625) / r_sb).asin();
        let fb = standby_feedback(alpha, r_sb);
        let mut out = None;
        for _ in 0..500 {
            out = Some(c.step(Setpoint { speed_mps: 0.0, elevation_m: 5.0 }, &fb, 4e-3));
        }
        let out = out.unwrap();
        assert_eq!(c.mode(), Mode::Free);
        assert_abs_diff_eq!(out.command.u1, 1.8 * 9.81, epsilon = 1e-6);
        assert_abs_diff_eq!(out.command.u2, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(out.log.alpha_ref, alpha, epsilon = 1e-12);
    }

    #[test]
    fn repositioning_sweeps_over_the_top() {
        let mut c = Svcs::new(ControllerConfig::default(), model());
        let r_sb = c.standby_radius();
        let alpha0 = ((5.0 - 0.0625) / r_sb).asin();
        let fb = standby_feedback(alpha0, r_sb);
        let sp = Setpoint { speed_mps: -3.0, elevation_m: 5.0 };
        let dt = 4e-3;
        let mut refs = Vec::new();
        for _ in 0..2000 {
            let out = c.step(sp, &fb, dt);
            refs.push((out.log.mode.unwrap(), out.log.alpha_ref));
        }
        assert_eq!(c.configuration(), Configuration::Rear);
        let sweep: Vec<f64> = refs.iter().filter(|(m, _)| *m == Mode::Repositioning).map(|r| r.1).collect();
        assert!(sweep.windows(2).all(|w| w[1] > w[0]));
        let duration = sweep.len() as f64 * dt;
        let expected = (std::f64::consts::PI - 2.0 * alpha0) / 0.5;
        assert!((duration - expected).abs() < 0.05, "{duration} vs {expected}");
        let first_after = refs.iter().skip_while(|(m, _)| *m != Mode::Repositioning).find(|(m, _)| *m != Mode::Repositioning);
        assert_abs_diff_eq!(first_after.unwrap().1, std::f64::consts::PI - alpha0, epsilon = 1e-9);
    }

    #[test]
    fn integrals_stay_bounded_under_saturation() {
        let mut c = Svcs::new(ControllerConfig::default(), model());
        let fb = standby_feedback(0.3, model().cable_length);
        // Setpoint far out of reach and a stuck plant for 10 s.
        for _ in 0..2500 {
            let out = c.step(Setpoint { speed_mps: 8.0, elevation_m: 5.0 }, &fb, 4e-3);
            for d in out.log.delta_hat.iter().zip(c.cfg.gains.ki().iter()) {
                assert!(d.0.abs() <= 10.0 * d.1 + 1e-9);
            }
            assert!(out.log.velocity_integral.abs() <= 5.0);
        }
        assert!(c.velocity_integral.abs() > 4.99);
    }

    #[test]
    fn slack_cable_does_not_wind_up_velocity_integral() {
        let mut c = Svcs::new(ControllerConfig::default(), model());
        let fb = standby_feedback(0.3, model().cable_length - 0.5);
        for _ in 0..500 {
            let out = c.step(Setpoint { speed_mps: 8.0, elevation_m: 5.0 }, &fb, 4e-3);
            assert_eq!(out.log.velocity_integral, 0.0);
        }
        assert_eq!(c.mode(), Mode::Pulling);
    }

    #[test]
    fn pitch_loop_recovers_constant_disturbance() {
        // θ̈ = u2/J + δ with the command held at zero.
        let gains = BacksteppingGains::default();
        let j = 0.03;
        let delta = 3.0;
        let mut lp = AttitudeLoop::new(20.0, 0.0, 10.0);
        let (mut th, mut om) = (0.0, 0.0);
        let dt = 1e-3;
        for _ in 0..60_000 {
            let u2 = lp.step(0.0, th, om, dt, j, &gains);
            om += dt * (u2 / j + delta);
            th += dt * om;
        }
        let estimate = gains.ki()[2] * lp.integral;
        assert!((estimate - delta).abs() < 0.05 * delta, "{estimate}");
        // slowest closed-loop pole is near 0.11 rad/s
        assert!(th.abs() < 1e-3, "{th}");
    }

    #[test]
    fn radial_channel_recovers_constant_disturbance() {
        // Decoupled UAV above a still buoy; inject a constant radial
        // acceleration and close the loop on r only.
        let gains = BacksteppingGains::default();
        let (m, r_ref) = (1.8, 6.86);
        let delta = -2.0;
        let (mut r, mut rd) = (6.5, 0.0);
        let mut e_int = Vector3::zeros();
        let dt = 1e-3;
        for _ in 0..60_000 {
            let s = PolarSignals { r, alpha: FRAC_PI_2, ..Default::default() };
            let h = nonlinear_terms(&s, 9.81);
            let err = ChannelErrors {
                e: Vector3::new(r - r_ref, 0.0, 0.0),
                e_dot: Vector3::new(rd, 0.0, 0.0),
                e_int,
            };
            let u = position_law(&err, &Vector3::zeros(), &h, &Vector3::zeros(), &input_scale(r, m, 0.03), &gains);
            e_int += dt * gains.integral_rate(&err.e, &err.e_dot);
            let rdd = h[0] + u[0] / m + delta;
            rd += dt * rdd;
            r += dt * rd;
        }
        let estimate = gains.disturbance_estimate(&e_int)[0];
        assert!((estimate - delta).abs() < 0.05 * delta.abs(), "{estimate}");
    }

    #[test]
    fn cbnc_hover_and_forward_tilt() {
        let mut c = Cbnc::new(ControllerConfig::default(), model());
        let fb = Feedback { z_u: 5.0, ..Default::default() };
        let out = c.step(Setpoint { speed_mps: 0.0, elevation_m: 5.0 }, &fb, 4e-3);
        assert_abs_diff_eq!(out.command.u1, 1.8 * 9.81, epsilon = 1e-9);
        let mut c = Cbnc::new(ControllerConfig::default(), model());
        let out = c.step(Setpoint { speed_mps: 1.0, elevation_m: 5.0 }, &fb, 4e-3);
        assert!(out.log.theta_c > 0.0);
    }
}
