//! Scenario runner: fixed-step RK4 over the active hybrid dynamics, a
//! zero-order-hold controller loop with simulated sensors, trace export and
//! tracking/energy metrics.

pub mod config;
pub mod metrics;
pub mod noise;
pub mod plot;
pub mod trace;

pub use config::{ConstraintPolicy, EnvironmentSpec, OutputSpec, ScenarioConfig, SensorSpec, SetpointSpec};
pub use metrics::{AirborneEvent, MetricsReport};
pub use noise::SensorNoise;
pub use trace::{Trace, TraceRow, COLUMNS};

use nalgebra::{SVector, Vector2};

use crate::buoy::{self, BuoyState};
use crate::controller::{Controller, ControllerLog, Feedback, FirstOrder, SecondOrder, Setpoint};
use crate::coupled::{self, CoupledState, Coupling, PitchModel, System, Vector5};
use crate::error::{Error, Result};
use crate::uav::{self, ControlCommand, UavState};

/// Plant state: either one taut system or two free bodies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plant {
    Coupled(CoupledState),
    Decoupled { buoy: BuoyState, uav: UavState },
}

impl Plant {
    pub fn coupling(&self) -> Coupling {
        match self {
            Plant::Coupled(_) => Coupling::Coupled,
            Plant::Decoupled { .. } => Coupling::Decoupled,
        }
    }

    /// Both bodies in Cartesian form, with the buoy pitch actually in effect.
    pub fn bodies(&self, sys: &System, t: f64) -> (BuoyState, UavState) {
        match self {
            Plant::Coupled(s) => coupled::decouple(s, sys, t),
            Plant::Decoupled { buoy, uav } => {
                let mut b = *buoy;
                (b.theta, b.omega) = sys.buoy_pitch(&b, t);
                (b, *uav)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct World {
    pub t: f64,
    pub plant: Plant,
    /// Thrust and torque the rotors currently deliver.
    pub actuator: ControlCommand,
}

/// Instantaneous quantities at a world state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub tension: f64,
    pub immersed_volume: f64,
    pub buoy_accel: Vector2<f64>,
    pub uav_accel: Vector2<f64>,
}

/// Transition that happened at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Transitions {
    pub decoupled: bool,
    pub coupled: bool,
}

fn rk4<const N: usize>(
    y: &SVector<f64, N>,
    t: f64,
    dt: f64,
    f: impl Fn(f64, &SVector<f64, N>) -> Result<SVector<f64, N>>,
) -> Result<SVector<f64, N>> {
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * dt, &(y + k1 * (0.5 * dt)))?;
    let k3 = f(t + 0.5 * dt, &(y + k2 * (0.5 * dt)))?;
    let k4 = f(t + dt, &(y + k3 * dt))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

fn pack_coupled(s: &CoupledState, a: ControlCommand) -> SVector<f64, 12> {
    let mut y = SVector::<f64, 12>::zeros();
    y.fixed_rows_mut::<5>(0).copy_from(&s.q);
    y.fixed_rows_mut::<5>(5).copy_from(&s.qd);
    y[10] = a.u1;
    y[11] = a.u2;
    y
}

fn unpack_coupled(y: &SVector<f64, 12>) -> (CoupledState, ControlCommand) {
    (
        CoupledState {
            q: Vector5::from_iterator(y.fixed_rows::<5>(0).iter().copied()),
            qd: Vector5::from_iterator(y.fixed_rows::<5>(5).iter().copied()),
        },
        ControlCommand::new(y[10], y[11]),
    )
}

fn pack_free(b: &BuoyState, u: &UavState, a: ControlCommand) -> SVector<f64, 14> {
    SVector::<f64, 14>::from_column_slice(&[
        b.x, b.z, b.theta, b.vx, b.vz, b.omega, u.x, u.z, u.theta, u.vx, u.vz, u.omega, a.u1, a.u2,
    ])
}

fn unpack_free(y: &SVector<f64, 14>) -> (BuoyState, UavState, ControlCommand) {
    (
        BuoyState { x: y[0], z: y[1], theta: y[2], vx: y[3], vz: y[4], omega: y[5] },
        UavState { x: y[6], z: y[7], theta: y[8], vx: y[9], vz: y[10], omega: y[11] },
        ControlCommand::new(y[12], y[13]),
    )
}

fn free_accels(b: &BuoyState, u: &UavState, sys: &System, t: f64, a: ControlCommand) -> Result<(nalgebra::Vector3<f64>, nalgebra::Vector3<f64>)> {
    let mut b = *b;
    (b.theta, b.omega) = sys.buoy_pitch(&b, t);
    let mut ab = buoy::buoy_accel_decoupled(&b, &sys.env, t, 0.0, 0.0, &sys.buoy)?;
    if sys.pitch == PitchModel::Kinematic {
        ab[2] = sys.kinematic_pitch_accel(b.x, b.vx, t);
    }
    let au = uav::uav_accel_decoupled(u, &sys.env, 0.0, 0.0, a, &sys.uav)?;
    Ok((ab, au))
}

/// Tension, immersed volume and body accelerations at the current state.
pub fn diagnose(world: &World, sys: &System) -> Result<Diagnostics> {
    let t = world.t;
    match &world.plant {
        Plant::Coupled(s) => {
            let d = coupled::coupled_accel(s, sys, t, world.actuator)?;
            Ok(Diagnostics {
                tension: d.tension,
                immersed_volume: d.hydro.immersed_volume,
                buoy_accel: Vector2::new(d.qdd[0], d.qdd[1]),
                uav_accel: coupled::uav_accel_from_coupled(s, &d.qdd, sys.cable.length_m),
            })
        }
        Plant::Decoupled { buoy, uav } => {
            let (ab, au) = free_accels(buoy, uav, sys, t, world.actuator)?;
            Ok(Diagnostics {
                tension: 0.0,
                immersed_volume: buoy::immersed_volume(buoy::delta_h(buoy, &sys.env, t), &sys.buoy),
                buoy_accel: Vector2::new(ab[0], ab[1]),
                uav_accel: Vector2::new(au[0], au[1]),
            })
        }
    }
}

fn check_finite(world: &World) -> Result<()> {
    let ok = match &world.plant {
        Plant::Coupled(s) => s.q.iter().chain(s.qd.iter()).all(|v| v.is_finite()),
        Plant::Decoupled { buoy: b, uav: u } => [b.x, b.z, b.theta, b.vx, b.vz, b.omega, u.x, u.z, u.theta, u.vx, u.vz, u.omega]
            .iter()
            .all(|v| v.is_finite()),
    } && world.actuator.u1.is_finite()
        && world.actuator.u2.is_finite();
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite { t: world.t, detail: format!("{:?}", world.plant) })
    }
}

/// Integrates one step of length `dt` with the command held, then applies
/// any slack/taut transition at the step boundary.
pub fn advance(world: &World, sys: &System, cmd: ControlCommand, dt: f64) -> Result<(World, Transitions)> {
    let t0 = world.t;
    let t1 = t0 + dt;
    let plant = match &world.plant {
        Plant::Coupled(s) => {
            let y = rk4(&pack_coupled(s, world.actuator), t0, dt, |t, y| {
                let (s, a) = unpack_coupled(y);
                let d = coupled::coupled_accel(&s, sys, t, a)?;
                let ad = uav::actuator_rate(cmd, a, &sys.uav);
                let mut dy = SVector::<f64, 12>::zeros();
                dy.fixed_rows_mut::<5>(0).copy_from(&s.qd);
                dy.fixed_rows_mut::<5>(5).copy_from(&d.qdd);
                dy[10] = ad.u1;
                dy[11] = ad.u2;
                Ok(dy)
            })?;
            let (mut s, a) = unpack_coupled(&y);
            if sys.pitch == PitchModel::Kinematic {
                let b = s.buoy();
                (s.q[4], s.qd[4]) = sys.buoy_pitch(&b, t1);
            }
            (Plant::Coupled(s), a)
        }
        Plant::Decoupled { buoy, uav } => {
            let y = rk4(&pack_free(buoy, uav, world.actuator), t0, dt, |t, y| {
                let (b, u, a) = unpack_free(y);
                let (ab, au) = free_accels(&b, &u, sys, t, a)?;
                let ad = uav::actuator_rate(cmd, a, &sys.uav);
                Ok(SVector::<f64, 14>::from_column_slice(&[
                    b.vx, b.vz, b.omega, ab[0], ab[1], ab[2], u.vx, u.vz, u.omega, au[0], au[1], au[2], ad.u1, ad.u2,
                ]))
            })?;
            let (mut b, u, a) = unpack_free(&y);
            if sys.pitch == PitchModel::Kinematic {
                (b.theta, b.omega) = sys.buoy_pitch(&b, t1);
            }
            (Plant::Decoupled { buoy: b, uav: u }, a)
        }
    };
    let mut next = World { t: t1, plant: plant.0, actuator: plant.1 };
    check_finite(&next)?;

    let mut tr = Transitions::default();
    if let Plant::Decoupled { buoy, uav } = &next.plant {
        let polar = coupled::to_polar(buoy, uav)?;
        let cable = &sys.cable;
        let taut = coupled::detect_transition(Coupling::Decoupled, &polar, 0.0, cable) == Coupling::Coupled
            || polar.r > cable.length_m + cable.slack_tolerance_m;
        if taut {
            next.plant = Plant::Coupled(coupled::couple(buoy, uav, sys, t1)?);
            tr.coupled = true;
        }
    }
    if let Plant::Coupled(s) = &next.plant {
        let d = coupled::coupled_accel(s, sys, t1, next.actuator)?;
        if coupled::detect_transition(Coupling::Coupled, &coupled::to_polar(&s.buoy(), &s.uav(sys.cable.length_m))?, d.tension, &sys.cable)
            == Coupling::Decoupled
        {
            let (b, u) = coupled::decouple(s, sys, t1);
            next.plant = Plant::Decoupled { buoy: b, uav: u };
            tr.decoupled = true;
        }
    }
    Ok((next, tr))
}

/// Decoupled start: buoy floating freely and drifting with the water, UAV
/// hovering at the standby radius and the configured elevation angle.
pub fn initial_world(cfg: &ScenarioConfig, sys: &System) -> World {
    let env = &sys.env;
    let mut b = BuoyState {
        z: env.elevation(0.0, 0.0) - sys.buoy.free_floating_delta_h(env.water_density),
        ..Default::default()
    };
    (b.vx, b.vz) = env.water_velocity(b.x, b.z, 0.0);
    (b.theta, b.omega) = (env.buoy_pitch_kinematic(b.x, 0.0), env.buoy_pitch_rate_kinematic(b.x, b.vx, 0.0));
    let r = cfg.controller.svcs.standby_radius_fraction * sys.cable.length_m;
    let (s, c) = cfg.initial_elevation_deg.to_radians().sin_cos();
    let u = UavState {
        x: b.x + r * c,
        z: b.z + r * s,
        vx: b.vx,
        ..Default::default()
    };
    World {
        t: 0.0,
        plant: Plant::Decoupled { buoy: b, uav: u },
        actuator: ControlCommand::new(sys.uav.mass_kg * env.gravity, 0.0),
    }
}

/// Number of slack/taut switches during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TransitionCounts {
    pub decouple: usize,
    pub couple: usize,
}

#[derive(Debug)]
pub struct RunReport {
    pub trace: Trace,
    pub metrics: MetricsReport,
    pub transitions: TransitionCounts,
    /// Numeric failure or constraint abort that stopped the run early.
    pub failure: Option<Error>,
}

/// Sensor front end: noisy primaries, low-passed accelerations.
struct Sensors {
    noise: SensorNoise<10>,
    accel: [FirstOrder; 4],
}

impl Sensors {
    fn new(cfg: &ScenarioConfig, d: &Diagnostics) -> Self {
        let s = &cfg.sensors;
        let targets = if s.noise_enabled { s.targets() } else { [0.0; 10] };
        let init = [d.uav_accel[0], d.uav_accel[1], d.buoy_accel[0], d.buoy_accel[1]];
        Self {
            noise: SensorNoise::new(cfg.seed, targets, s.noise_cutoff_hz, cfg.control_period_s),
            accel: init.map(|a| FirstOrder::from_cutoff(s.accel_filter_hz, a)),
        }
    }

    fn filter(&mut self, d: &Diagnostics, dt: f64) {
        let a = [d.uav_accel[0], d.uav_accel[1], d.buoy_accel[0], d.buoy_accel[1]];
        for (f, v) in self.accel.iter_mut().zip(a) {
            f.step(v, dt);
        }
    }

    fn measure(&mut self, b: &BuoyState, u: &UavState) -> Result<Feedback> {
        let p = coupled::to_polar(b, u)?;
        let n = self.noise.sample();
        let a = self.accel.map(|f| f.value());
        Ok(Feedback {
            x_u: u.x + n[0],
            z_u: u.z + n[1],
            theta_u: u.theta + n[2],
            alpha: p.alpha + n[3],
            r: p.r + n[4],
            vx_u: u.vx + n[5],
            vz_u: u.vz + n[6],
            omega_u: u.omega + n[7],
            alpha_dot: p.alpha_dot + n[8],
            r_dot: p.r_dot + n[9],
            ax_u: a[0],
            az_u: a[1],
            ax_b: a[2],
            az_b: a[3],
        })
    }
}

struct Sample<'a> {
    world: &'a World,
    diag: &'a Diagnostics,
    cmd: ControlCommand,
    log: &'a ControllerLog,
    feedback: &'a Feedback,
    setpoint: Setpoint,
    speed_target: f64,
    flags: coupled::ConstraintReport,
}

fn trace_row(s: &Sample, sys: &System) -> TraceRow {
    let (b, u) = s.world.plant.bodies(sys, s.world.t);
    let polar = coupled::to_polar(&b, &u).ok();
    TraceRow {
        t_s: s.world.t,
        coupled: s.world.plant.coupling() == Coupling::Coupled,
        mode: s.log.mode,
        configuration: s.log.configuration,
        x_b_m: b.x,
        z_b_m: b.z,
        theta_b_rad: b.theta,
        vx_b_mps: b.vx,
        vz_b_mps: b.vz,
        omega_b_rps: b.omega,
        x_u_m: u.x,
        z_u_m: u.z,
        theta_u_rad: u.theta,
        vx_u_mps: u.vx,
        vz_u_mps: u.vz,
        omega_u_rps: u.omega,
        r_m: polar.map_or(0.0, |p| p.r),
        alpha_rad: polar.map_or(0.0, |p| p.alpha),
        tension_n: s.diag.tension,
        immersed_fraction: s.diag.immersed_volume / sys.buoy.volume_m3,
        u1_cmd_n: s.cmd.u1,
        u2_cmd_nm: s.cmd.u2,
        u1_n: s.world.actuator.u1,
        u2_nm: s.world.actuator.u2,
        speed_setpoint_mps: s.setpoint.speed_mps,
        speed_target_mps: s.speed_target,
        speed_ref_mps: s.log.speed_ref,
        elevation_ref_m: s.setpoint.elevation_m,
        alpha_ref_rad: s.log.alpha_ref,
        r_ref_m: s.log.r_ref,
        theta_c_rad: s.log.theta_c,
        tension_ff_n: s.log.tension_ff,
        delta_hat_r: s.log.delta_hat[0],
        delta_hat_alpha: s.log.delta_hat[1],
        delta_hat_theta: s.log.delta_hat[2],
        hanging_risk: s.flags.hanging_risk,
        airborne: s.flags.airborne,
        thrust_gate: s.flags.thrust_gate,
        fb_x_u_m: s.feedback.x_u,
        fb_z_u_m: s.feedback.z_u,
        fb_theta_u_rad: s.feedback.theta_u,
        fb_r_m: s.feedback.r,
        fb_alpha_rad: s.feedback.alpha,
    }
}

/// Runs a scenario to completion or to the first failure. Configuration
/// errors are returned as `Err`; failures during the run are reported in
/// [`RunReport::failure`] together with the trace up to that point.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let sys = cfg.system()?;
    let mut controller = Controller::new(&cfg.controller, &sys)?;
    let mut world = initial_world(cfg, &sys);
    let dt = cfg.dt_s;
    let control_every = cfg.control_every();
    let mut diag = diagnose(&world, &sys)?;
    let mut sensors = Sensors::new(cfg, &diag);
    let mut target = SecondOrder::critically_damped(cfg.controller.speed_filter_hz, cfg.setpoint.speed_at(0.0));
    let mut trace = Trace::default();
    let mut counts = TransitionCounts::default();
    let mut cmd = world.actuator;
    let mut log = ControllerLog::default();
    let mut feedback = Feedback::default();
    let mut failure = None;

    for k in 0..cfg.steps() {
        let t = world.t;
        let setpoint = Setpoint {
            speed_mps: cfg.setpoint.speed_at(t),
            elevation_m: cfg.setpoint.elevation_m,
        };
        if k % control_every == 0 {
            let (b, u) = world.plant.bodies(&sys, t);
            feedback = match sensors.measure(&b, &u) {
                Ok(f) => f,
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            };
            let out = controller.step(setpoint, &feedback, cfg.control_period_s);
            cmd = out.command;
            log = out.log;
        }
        let (b, u) = world.plant.bodies(&sys, t);
        let alpha = coupled::to_polar(&b, &u).map_or(std::f64::consts::FRAC_PI_2, |p| p.alpha);
        let flags = coupled::check_constraints(
            diag.tension,
            alpha,
            diag.immersed_volume,
            world.actuator.u1,
            u.theta,
            &sys.buoy,
            sys.env.gravity,
            cfg.thrust_margin,
        );
        if k % cfg.log_every == 0 {
            let sample = Sample {
                world: &world,
                diag: &diag,
                cmd,
                log: &log,
                feedback: &feedback,
                setpoint,
                speed_target: target.value(),
                flags,
            };
            trace.rows.push(trace_row(&sample, &sys));
        }
        if cfg.on_constraint == ConstraintPolicy::Halt && (flags.hanging_risk || flags.airborne) {
            let what = if flags.airborne { "buoy left the water" } else { "cable tension can lift the buoy" };
            failure = Some(Error::ConstraintAbort { t, detail: what.into() });
            break;
        }

        let step = advance(&world, &sys, cmd, dt).and_then(|(w, tr)| Ok((w, tr, diagnose(&w, &sys)?)));
        match step {
            Ok((w, tr, d)) => {
                world = w;
                diag = d;
                counts.decouple += tr.decoupled as usize;
                counts.couple += tr.coupled as usize;
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
        sensors.filter(&diag, dt);
        target.step(cfg.setpoint.speed_at(t), dt);
    }

    let metrics = MetricsReport::from_trace(&trace, cfg.dt_s * cfg.log_every as f64, cfg.rotor_disk_area_m2, sys.env.air_density);
    Ok(RunReport { trace, metrics, transitions: counts, failure })
}
