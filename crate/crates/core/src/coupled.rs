//! Tethered UAV–buoy system: polar kinematics, the taut-cable Euler–Lagrange
//! model in `q = [x_b, z_b, α, θ_u, θ_b]`, Lemma-style tension recovery,
//! slack/taut transitions and constraint monitors.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, SMatrix, SVector, Vector2};
use serde::{Deserialize, Serialize};

use crate::buoy::{self, BuoyParams, BuoyState, Hydrodynamics};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::uav::{self, ControlCommand, UavParams, UavState};

pub type Vector5 = SVector<f64, 5>;
pub type Matrix5 = SMatrix<f64, 5, 5>;

const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CableParams {
    pub length_m: f64,
    /// Half-width of the near-vertical band where tension is taken from the
    /// UAV side.
    pub eps_alpha_rad: f64,
    pub slack_tolerance_m: f64,
}

impl Default for CableParams {
    fn default() -> Self {
        Self {
            length_m: 7.0,
            eps_alpha_rad: 0.05,
            slack_tolerance_m: 1e-9,
        }
    }
}

/// How the buoy pitch evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchModel {
    /// Tangent to the wave surface.
    #[default]
    Kinematic,
    /// Integrated from the damped restoring pitch equation.
    Dynamic,
}

/// Everything the plant equations depend on besides the state.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    pub env: Environment,
    pub buoy: BuoyParams,
    pub uav: UavParams,
    pub cable: CableParams,
    pub pitch: PitchModel,
}

impl System {
    pub fn new(env: Environment) -> Self {
        Self {
            env,
            buoy: BuoyParams::default(),
            uav: UavParams::default(),
            cable: CableParams::default(),
            pitch: PitchModel::Kinematic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.buoy.validate(self.env.water_density)?;
        self.uav.validate()?;
        if !(self.cable.length_m > 0.0) {
            return Err(Error::Config(format!("cable length must be positive, got {}", self.cable.length_m)));
        }
        if !(self.cable.eps_alpha_rad > 0.0 && self.cable.eps_alpha_rad < FRAC_PI_2) {
            return Err(Error::Config("eps_alpha_rad must lie in (0, pi/2)".into()));
        }
        Ok(())
    }

    /// Buoy pitch and pitch rate in effect for the given buoy state.
    pub fn buoy_pitch(&self, b: &BuoyState, t: f64) -> (f64, f64) {
        match self.pitch {
            PitchModel::Kinematic => (
                self.env.buoy_pitch_kinematic(b.x, t),
                self.env.buoy_pitch_rate_kinematic(b.x, b.vx, t),
            ),
            PitchModel::Dynamic => (b.theta, b.omega),
        }
    }

    /// Kinematic pitch acceleration along the buoy track, by central
    /// difference of the analytic rate.
    pub fn kinematic_pitch_accel(&self, x: f64, vx: f64, t: f64) -> f64 {
        let h = 1e-5;
        (self.env.buoy_pitch_rate_kinematic(x + vx * h, vx, t + h)
            - self.env.buoy_pitch_rate_kinematic(x - vx * h, vx, t - h))
            / (2.0 * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarKinematics {
    pub r: f64,
    pub alpha: f64,
    pub r_dot: f64,
    pub alpha_dot: f64,
}

/// Polar position and rates of the UAV relative to the buoy.
pub fn to_polar(b: &BuoyState, u: &UavState) -> Result<PolarKinematics> {
    let (dx, dz) = (u.x - b.x, u.z - b.z);
    let r = dx.hypot(dz);
    if !(r > 0.0) {
        return Err(Error::Domain("UAV and buoy coincide; elevation angle undefined".into()));
    }
    let alpha = dz.atan2(dx);
    let (s, c) = alpha.sin_cos();
    let (dvx, dvz) = (u.vx - b.vx, u.vz - b.vz);
    Ok(PolarKinematics {
        r,
        alpha,
        r_dot: c * dvx + s * dvz,
        alpha_dot: (-s * dvx + c * dvz) / r,
    })
}

/// Radial and angular accelerations `(r̈, α̈)` from the Cartesian relative
/// acceleration.
pub fn polar_accel(p: &PolarKinematics, rel_accel: Vector2<f64>) -> (f64, f64) {
    let (s, c) = p.alpha.sin_cos();
    let radial = c * rel_accel[0] + s * rel_accel[1];
    let tangential = -s * rel_accel[0] + c * rel_accel[1];
    (
        radial + p.r * p.alpha_dot * p.alpha_dot,
        (tangential - 2.0 * p.r_dot * p.alpha_dot) / p.r,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Coupled,
    Decoupled,
}

/// Generalized coordinates and rates of the taut system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledState {
    pub q: Vector5,
    pub qd: Vector5,
}

impl CoupledState {
    pub fn buoy(&self) -> BuoyState {
        BuoyState {
            x: self.q[0],
            z: self.q[1],
            theta: self.q[4],
            vx: self.qd[0],
            vz: self.qd[1],
            omega: self.qd[4],
        }
    }

    /// UAV pose reconstructed on the sphere `r = l`.
    pub fn uav(&self, l: f64) -> UavState {
        let (s, c) = self.q[2].sin_cos();
        UavState {
            x: self.q[0] + l * c,
            z: self.q[1] + l * s,
            theta: self.q[3],
            vx: self.qd[0] - l * s * self.qd[2],
            vz: self.qd[1] + l * c * self.qd[2],
            omega: self.qd[3],
        }
    }

    pub fn alpha(&self) -> f64 {
        self.q[2]
    }
}

/// Result of evaluating the coupled model at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledDynamics {
    pub qdd: Vector5,
    pub tension: f64,
    pub hydro: Hydrodynamics,
    pub v_rel: Vector2<f64>,
    /// Pitch and pitch rate actually used for the buoy.
    pub buoy_pitch: (f64, f64),
}

/// Global inertia matrix of the coupled system.
pub fn mass_matrix(alpha: f64, hydro: &Hydrodynamics, uav_p: &UavParams, l: f64) -> Matrix5 {
    let (s, c) = alpha.sin_cos();
    let mu = uav_p.mass_kg;
    let mb = &hydro.mass;
    let mut m = Matrix5::zeros();
    m[(0, 0)] = mb[(0, 0)] + mu;
    m[(0, 1)] = mb[(0, 1)];
    m[(1, 0)] = mb[(1, 0)];
    m[(1, 1)] = mb[(1, 1)] + mu;
    m[(0, 2)] = -mu * l * s;
    m[(2, 0)] = -mu * l * s;
    m[(1, 2)] = mu * l * c;
    m[(2, 1)] = mu * l * c;
    m[(2, 2)] = mu * l * l;
    m[(3, 3)] = uav_p.inertia_pitch_kgm2;
    m[(4, 4)] = mb[(2, 2)];
    m
}

/// Coupled accelerations `q̈` plus the cable tension.
///
/// UAV air drag enters as a generalized force through the UAV position
/// Jacobian. With the kinematic pitch model the pitch row is replaced by the
/// wave-slope prescription.
pub fn coupled_accel(state: &CoupledState, sys: &System, t: f64, u: ControlCommand) -> Result<CoupledDynamics> {
    let l = sys.cable.length_m;
    let g = sys.env.gravity;
    let mu = sys.uav.mass_kg;
    let mut b = state.buoy();
    let (theta_b, omega_b) = sys.buoy_pitch(&b, t);
    b.theta = theta_b;
    b.omega = omega_b;

    let hydro = buoy::hydrodynamics_at(&b, &sys.env, t, &sys.buoy);
    let v_rel = buoy::relative_velocity(&b, &sys.env, t);
    let alpha = state.q[2];
    let alpha_dot = state.qd[2];
    let (s, c) = alpha.sin_cos();
    let theta_u = state.q[3];

    let m = mass_matrix(alpha, &hydro, &sys.uav, l);
    let ua = state.uav(l);
    let (fdx, fdz) = uav::drag_force(ua.vx, ua.vz, &sys.env, &sys.uav);
    let d = &hydro.damping;
    let eta_dot = Vector2::new(b.vx, b.vz);
    let cb = hydro.coriolis.fixed_view::<2, 2>(0, 0) * eta_dot;

    let mut rhs = Vector5::zeros();
    rhs[0] = u.u1 * theta_u.sin() + fdx - d[(0, 0)] * v_rel[0] - d[(0, 1)] * v_rel[1] - cb[0]
        + mu * l * c * alpha_dot * alpha_dot;
    rhs[1] = u.u1 * theta_u.cos() + sys.env.water_density * g * hydro.immersed_volume
        - (sys.buoy.mass_kg + mu) * g
        + fdz
        - d[(1, 0)] * v_rel[0]
        - d[(1, 1)] * v_rel[1]
        - cb[1]
        + mu * l * s * alpha_dot * alpha_dot;
    rhs[2] = u.u1 * l * (alpha + theta_u).cos() - mu * g * l * c + l * (-s * fdx + c * fdz);
    rhs[3] = u.u2 - sys.uav.drag_pitch_nms * state.qd[3];
    rhs[4] = hydro.restoring * theta_b.sin() - d[(2, 2)] * omega_b;

    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("coupled mass matrix not positive definite at t = {t}: q = {:?}", state.q.as_slice())))?;
    let diag = chol.l_dirty().diagonal();
    let cond = (diag.max() / diag.min()).powi(2);
    if cond > CONDITION_LIMIT {
        return Err(Error::Singular(format!(
            "coupled mass matrix condition {cond:.3e} at t = {t}: q = {:?}",
            state.q.as_slice()
        )));
    }
    let mut qdd = chol.solve(&rhs);
    if sys.pitch == PitchModel::Kinematic {
        qdd[4] = sys.kinematic_pitch_accel(b.x, b.vx, t);
    }
    let tension = cable_tension(state, sys, u, &qdd, &hydro, v_rel);
    Ok(CoupledDynamics {
        qdd,
        tension,
        hydro,
        v_rel,
        buoy_pitch: (theta_b, omega_b),
    })
}

/// Cable tension from the buoy surge balance, or from the UAV heave balance
/// inside the near-vertical band `|α − π/2| ≤ ε_α`.
pub fn cable_tension(
    state: &CoupledState,
    sys: &System,
    u: ControlCommand,
    qdd: &Vector5,
    hydro: &Hydrodynamics,
    v_rel: Vector2<f64>,
) -> f64 {
    let alpha = state.q[2];
    if (alpha - FRAC_PI_2).abs() > sys.cable.eps_alpha_rad {
        tension_buoy_side(state, qdd, hydro, v_rel)
    } else {
        tension_uav_side(state, sys, u, qdd)
    }
}

pub fn tension_buoy_side(state: &CoupledState, qdd: &Vector5, hydro: &Hydrodynamics, v_rel: Vector2<f64>) -> f64 {
    let m = &hydro.mass;
    let d = &hydro.damping;
    let cm = &hydro.coriolis;
    (m[(0, 0)] * qdd[0]
        + m[(0, 1)] * qdd[1]
        + d[(0, 0)] * v_rel[0]
        + d[(0, 1)] * v_rel[1]
        + cm[(0, 0)] * state.qd[0]
        + cm[(0, 1)] * state.qd[1])
        / state.q[2].cos()
}

pub fn tension_uav_side(state: &CoupledState, sys: &System, u: ControlCommand, qdd: &Vector5) -> f64 {
    let l = sys.cable.length_m;
    let (s, c) = state.q[2].sin_cos();
    let ad = state.qd[2];
    let zdd_u = qdd[1] + l * (c * qdd[2] - s * ad * ad);
    let ua = state.uav(l);
    let (_, fdz) = uav::drag_force(ua.vx, ua.vz, &sys.env, &sys.uav);
    let mu = sys.uav.mass_kg;
    (u.u1 * state.q[3].cos() - mu * sys.env.gravity - mu * zdd_u + fdz) / s
}

/// Cartesian UAV acceleration implied by `q̈` through the rigid constraint.
pub fn uav_accel_from_coupled(state: &CoupledState, qdd: &Vector5, l: f64) -> Vector2<f64> {
    let (s, c) = state.q[2].sin_cos();
    let ad = state.qd[2];
    Vector2::new(
        qdd[0] - l * (c * ad * ad + s * qdd[2]),
        qdd[1] + l * (-s * ad * ad + c * qdd[2]),
    )
}

/// Next coupling flag. Taut → slack when tension is not positive; slack →
/// taut once the cable reaches full length while still extending.
pub fn detect_transition(current: Coupling, polar: &PolarKinematics, tension: f64, cable: &CableParams) -> Coupling {
    match current {
        Coupling::Coupled if tension <= 0.0 => Coupling::Decoupled,
        Coupling::Coupled => Coupling::Coupled,
        Coupling::Decoupled if polar.r >= cable.length_m - cable.slack_tolerance_m && polar.r_dot > 0.0 => {
            Coupling::Coupled
        }
        Coupling::Decoupled => Coupling::Decoupled,
    }
}

/// Splits a taut state into the two free bodies.
pub fn decouple(state: &CoupledState, sys: &System, t: f64) -> (BuoyState, UavState) {
    let mut b = state.buoy();
    let (th, om) = sys.buoy_pitch(&b, t);
    b.theta = th;
    b.omega = om;
    (b, state.uav(sys.cable.length_m))
}

/// Slack → taut: places the UAV at `r = l` along the current direction and
/// applies a perfectly inelastic impulse along the cable. Momentum along the
/// cable line is conserved with the buoy's effective (added-mass) inertia;
/// tangential motion is untouched.
pub fn couple(b: &BuoyState, u: &UavState, sys: &System, t: f64) -> Result<CoupledState> {
    let polar = to_polar(b, u)?;
    let (s, c) = polar.alpha.sin_cos();
    let e = Vector2::new(c, s);
    let hydro = buoy::hydrodynamics_at(b, &sys.env, t, &sys.buoy);
    let mb: Matrix2<f64> = hydro.translational_mass();
    let mb_inv = mb
        .try_inverse()
        .ok_or_else(|| Error::Singular("buoy translational mass not invertible".into()))?;
    let mu = sys.uav.mass_kg;
    let mut vb = Vector2::new(b.vx, b.vz);
    let mut vu = Vector2::new(u.vx, u.vz);
    if polar.r_dot > 0.0 {
        let w = 1.0 / mu + e.dot(&(mb_inv * e));
        let j = polar.r_dot / w;
        vu -= e * (j / mu);
        vb += mb_inv * e * j;
    }
    let rel = vu - vb;
    let l = sys.cable.length_m;
    Ok(CoupledState {
        q: Vector5::new(b.x, b.z, polar.alpha, u.theta, b.theta),
        qd: Vector5::new(vb[0], vb[1], (-s * rel[0] + c * rel[1]) / l, u.omega, b.omega),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub hanging_risk: bool,
    pub airborne: bool,
    pub thrust_gate: bool,
}

/// Constraint monitors: buoy lifted by the cable, buoy out of the water, and
/// the thrust gate that keeps the UAV from out-pulling the buoy weight.
pub fn check_constraints(
    tension: f64,
    alpha: f64,
    immersed_volume: f64,
    u1: f64,
    theta_u: f64,
    buoy_p: &BuoyParams,
    gravity: f64,
    eps_m: f64,
) -> ConstraintReport {
    let weight = buoy_p.mass_kg * gravity;
    let sa = alpha.sin();
    let hanging_risk = tension > 0.0 && sa > 0.0 && tension >= weight / sa;
    let gate = alpha.tan() * theta_u.sin();
    let thrust_gate = gate > 0.0 && u1 >= weight * (1.0 - eps_m) / gate;
    ConstraintReport {
        hanging_risk,
        airborne: immersed_volume <= 0.0,
        thrust_gate,
    }
}

/// Mechanical energy of the taut system on flat, still water: kinetic plus
/// gravity plus buoyancy potential. Conserved when damping and thrust are
/// zero.
pub fn mechanical_energy(state: &CoupledState, sys: &System) -> f64 {
    let b = state.buoy();
    let hydro = buoy::hydrodynamic_matrices(b.theta, -b.z, Vector2::zeros(), &sys.buoy, &sys.env);
    let m = mass_matrix(state.q[2], &hydro, &sys.uav, sys.cable.length_m);
    let kinetic = 0.5 * state.qd.dot(&(m * state.qd));
    let g = sys.env.gravity;
    let gravity = (sys.buoy.mass_kg + sys.uav.mass_kg) * g * b.z
        + sys.uav.mass_kg * g * sys.cable.length_m * state.q[2].sin();
    let buoyancy = sys.env.water_density * g * buoy::immersed_volume_integral(-b.z, &sys.buoy);
    kinetic + gravity + buoyancy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::WaveComponent;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn sys() -> System {
        System::new(Environment::calm())
    }

    #[test]
    fn polar_examples() {
        let b = BuoyState::default();
        let l = 7.0;
        let u = UavState { x: l / SQRT_2, z: l / SQRT_2, ..Default::default() };
        let p = to_polar(&b, &u).unwrap();
        assert_abs_diff_eq!(p.r, l, epsilon = 1e-12);
        assert_abs_diff_eq!(p.alpha, FRAC_PI_4, epsilon = 1e-12);

        let u = UavState { z: 3.0, vx: -2.0, ..Default::default() };
        let p = to_polar(&b, &u).unwrap();
        assert_abs_diff_eq!(p.alpha, FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.r_dot, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.alpha_dot, 2.0 / 3.0, epsilon = 1e-15);

        assert!(to_polar(&b, &UavState::default()).is_err());
    }

    #[test]
    fn polar_accel_matches_finite_difference() {
        // r(t) and α(t) along a known Cartesian trajectory
        let pos = |t: f64| (2.0 + 0.3 * t * t, 5.0 + t - 0.2 * t * t * t);
        let (t0, h) = (0.7, 1e-4);
        let polar_at = |t: f64| {
            let (x, z) = pos(t);
            (x.hypot(z), z.atan2(x))
        };
        let (x, z) = pos(t0);
        let (vx, vz) = (0.6 * t0, 1.0 - 0.6 * t0 * t0);
        let (ax, az) = (0.6, -1.2 * t0);
        let p = to_polar(&BuoyState::default(), &UavState { x, z, vx, vz, ..Default::default() }).unwrap();
        let (rdd, add) = polar_accel(&p, Vector2::new(ax, az));
        let (rm, am) = polar_at(t0 - h);
        let (r0, a0) = polar_at(t0);
        let (rp, ap) = polar_at(t0 + h);
        assert_abs_diff_eq!(rdd, (rp - 2.0 * r0 + rm) / (h * h), epsilon = 1e-5);
        assert_abs_diff_eq!(add, (ap - 2.0 * a0 + am) / (h * h), epsilon = 1e-5);
    }

    #[test]
    fn hover_tow_is_static() {
        let s = sys();
        let dh = s.buoy.free_floating_delta_h(1000.0);
        let st = CoupledState {
            q: Vector5::new(0.0, -dh, FRAC_PI_2, 0.0, 0.0),
            qd: Vector5::zeros(),
        };
        let u = ControlCommand::new(s.uav.mass_kg * 9.81, 0.0);
        let dynm = coupled_accel(&st, &s, 0.0, u).unwrap();
        assert_abs_diff_eq!(dynm.qdd.norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(dynm.tension, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn branches_agree_off_vertical() {
        let s = System::new(
            Environment::calm()
                .with_current(-0.5)
                .with_wind(-3.0)
                .with_waves(vec![WaveComponent::new(0.3, 4.0, 1, 0.4, 9.81).unwrap()]),
        );
        let st = CoupledState {
            q: Vector5::new(1.0, -0.04, FRAC_PI_2 - 0.1, 0.35, 0.0),
            qd: Vector5::new(3.0, 0.2, 0.05, 0.1, 0.0),
        };
        let u = ControlCommand::new(40.0, 0.1);
        let d = coupled_accel(&st, &s, 2.0, u).unwrap();
        let t1 = tension_buoy_side(&st, &d.qdd, &d.hydro, d.v_rel);
        let t2 = tension_uav_side(&st, &s, u, &d.qdd);
        assert!((t1 - t2).abs() <= 1e-9 * t1.abs().max(1.0), "{t1} vs {t2}");
    }

    #[test]
    fn transitions() {
        let cable = CableParams::default();
        let polar = PolarKinematics { r: 7.0, alpha: 1.0, r_dot: 0.0, alpha_dot: 0.0 };
        assert_eq!(detect_transition(Coupling::Coupled, &polar, -1.0, &cable), Coupling::Decoupled);
        assert_eq!(detect_transition(Coupling::Coupled, &polar, 3.0, &cable), Coupling::Coupled);
        let slack = PolarKinematics { r: 0.9 * 7.0, ..polar };
        assert_eq!(detect_transition(Coupling::Decoupled, &slack, 0.0, &cable), Coupling::Decoupled);
        let taut = PolarKinematics { r: 7.0 + 1e-4, r_dot: 0.5, ..polar };
        assert_eq!(detect_transition(Coupling::Decoupled, &taut, 0.0, &cable), Coupling::Coupled);
    }

    #[test]
    fn coupling_impulse_zeroes_radial_rate() {
        let s = sys();
        let dh = s.buoy.free_floating_delta_h(1000.0);
        let b = BuoyState { z: -dh, vx: 0.3, vz: 0.0, ..Default::default() };
        let alpha: f64 = 0.9;
        let (sa, ca) = alpha.sin_cos();
        let l = s.cable.length_m;
        // radial +0.5 relative to the buoy, tangential 0.8
        let (vr, vt) = (0.5, 0.8);
        let u = UavState {
            x: l * ca,
            z: -dh + l * sa,
            vx: b.vx + vr * ca - vt * sa,
            vz: b.vz + vr * sa + vt * ca,
            ..Default::default()
        };
        let st = couple(&b, &u, &s, 0.0).unwrap();
        let nb = st.buoy();
        let nu = st.uav(l);
        let p = to_polar(&nb, &nu).unwrap();
        assert_abs_diff_eq!(p.r_dot, 0.0, epsilon = 1e-12);
        // the impulse acts along the cable only: UAV tangential velocity is kept
        let tangential = |vx: f64, vz: f64| -sa * vx + ca * vz;
        assert_abs_diff_eq!(tangential(nu.vx, nu.vz), tangential(u.vx, u.vz), epsilon = 1e-12);

        // independent oracle: momentum on the cable line with effective masses
        let hydro = buoy::hydrodynamics_at(&b, &s.env, 0.0, &s.buoy);
        let mbx = hydro.mass[(0, 0)];
        let mbz = hydro.mass[(1, 1)];
        let before = s.uav.mass_kg * (u.vx * ca + u.vz * sa) + mbx * b.vx * ca + mbz * b.vz * sa;
        let after = s.uav.mass_kg * (nu.vx * ca + nu.vz * sa) + mbx * nb.vx * ca + mbz * nb.vz * sa;
        assert_abs_diff_eq!(before, after, epsilon = 1e-12);
        // UAV-to-buoy tangential relative motion preserved, impulse removes energy
        let ke = |bb: &BuoyState, uu: &UavState| {
            0.5 * (mbx * bb.vx * bb.vx + mbz * bb.vz * bb.vz) + 0.5 * s.uav.mass_kg * (uu.vx * uu.vx + uu.vz * uu.vz)
        };
        assert!(ke(&nb, &nu) < ke(&b, &u));
    }

    #[test]
    fn constraint_flags() {
        let p = BuoyParams::default();
        for a in [0.2, 0.8, 1.5, 2.5] {
            assert!(!check_constraints(0.0, a, 0.01, 0.0, 0.0, &p, 9.81, 0.1).hanging_risk);
        }
        assert!(check_constraints(122.625, FRAC_PI_2, 0.01, 0.0, 0.0, &p, 9.81, 0.1).hanging_risk);
        assert!(!check_constraints(122.0, FRAC_PI_2, 0.01, 0.0, 0.0, &p, 9.81, 0.1).hanging_risk);
        let r = check_constraints(0.0, 1.0, 0.0, 0.0, 0.0, &p, 9.81, 0.1);
        assert!(r.airborne);
        let limit = 12.5 * 9.81 * 0.9 / (FRAC_PI_4.tan() * 0.3f64.sin());
        assert!(check_constraints(0.0, FRAC_PI_4, 0.01, limit + 1e-9, 0.3, &p, 9.81, 0.1).thrust_gate);
        assert!(!check_constraints(0.0, FRAC_PI_4, 0.01, limit - 1e-6, 0.3, &p, 9.81, 0.1).thrust_gate);
    }
}
