//! Stateless pieces of the control laws. Channel order is `(r, α, θ_u)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::buoy::{self, BuoyParams};
use crate::environment::Environment;
use crate::error::{Error, Result};

use super::machine::Configuration;

/// Backstepping design gains; the PID gains follow from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BacksteppingGains {
    pub k1: [f64; 3],
    pub k2: [f64; 3],
    pub gamma: [f64; 3],
}

impl Default for BacksteppingGains {
    fn default() -> Self {
        Self {
            k1: [16.9, 4.6, 7.5],
            k2: [2.6, 2.4, 2.5],
            gamma: [0.5, 0.3, 0.3],
        }
    }
}

impl BacksteppingGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k1", self.k1), ("k2", self.k2), ("gamma", self.gamma)] {
            if v.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
                return Err(Error::Config(format!("gain {name} entries must be positive, got {v:?}")));
            }
        }
        Ok(())
    }

    pub fn kp(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| 1.0 + self.k1[i] * self.k2[i])
    }

    pub fn kd(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| self.k1[i] + self.k2[i])
    }

    pub fn ki(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| self.gamma[i] * self.k1[i])
    }

    /// Integral state rate `ė^I = e + k₁⁻¹ ė`.
    pub fn integral_rate(&self, e: &Vector3<f64>, e_dot: &Vector3<f64>) -> Vector3<f64> {
        Vector3::from_fn(|i, _| e[i] + e_dot[i] / self.k1[i])
    }

    /// Disturbance estimate implied by the integral state, `δ̂ = γ k₁ e^I`.
    pub fn disturbance_estimate(&self, e_int: &Vector3<f64>) -> Vector3<f64> {
        self.ki().component_mul(e_int)
    }
}

/// Relative polar state with the buoy acceleration seen by the controller.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PolarSignals {
    pub r: f64,
    pub alpha: f64,
    pub r_dot: f64,
    pub alpha_dot: f64,
    pub ax_b: f64,
    pub az_b: f64,
}

/// Drift vector `H` of the relative polar dynamics.
pub fn nonlinear_terms(s: &PolarSignals, gravity: f64) -> Vector3<f64> {
    let (sa, ca) = s.alpha.sin_cos();
    Vector3::new(
        s.r * s.alpha_dot * s.alpha_dot - s.ax_b * ca - s.az_b * sa - gravity * sa,
        (-2.0 * s.r_dot * s.alpha_dot + s.ax_b * sa - s.az_b * ca - gravity * ca) / s.r,
        0.0,
    )
}

/// `b⁻¹ = diag(m_u, m_u r, J_u)`.
pub fn input_scale(r: f64, mass: f64, inertia: f64) -> Vector3<f64> {
    Vector3::new(mass, mass * r, inertia)
}

/// Regressor of a cable-tension estimate: the cable pulls the UAV back along
/// the radial direction.
pub fn tension_regressor(mass: f64) -> Vector3<f64> {
    Vector3::new(-1.0 / mass, 0.0, 0.0)
}

/// Tracking errors per channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelErrors {
    pub e: Vector3<f64>,
    pub e_dot: Vector3<f64>,
    pub e_int: Vector3<f64>,
}

/// PID-like backstepping law `U = b⁻¹[−k_P e − k_D ė − k_I e^I + Ẍ̄ − H − ΦΘ]`.
pub fn position_law(
    err: &ChannelErrors,
    ref_accel: &Vector3<f64>,
    h: &Vector3<f64>,
    phi_theta: &Vector3<f64>,
    scale: &Vector3<f64>,
    gains: &BacksteppingGains,
) -> Vector3<f64> {
    let demand = -gains.kp().component_mul(&err.e) - gains.kd().component_mul(&err.e_dot)
        - gains.ki().component_mul(&err.e_int)
        + ref_accel
        - h
        - phi_theta;
    scale.component_mul(&demand)
}

/// Third channel of the backstepping law: pitch torque `u2`.
pub fn inner_loop_pitch(e: f64, e_dot: f64, e_int: f64, ref_accel: f64, inertia: f64, gains: &BacksteppingGains) -> f64 {
    let (kp, kd, ki) = (gains.kp()[2], gains.kd()[2], gains.ki()[2]);
    inertia * (-kp * e - kd * e_dot - ki * e_int + ref_accel)
}

/// `H_V = (r α̇² − r̈ − z̈_b sin α − g sin α)/cos α`.
pub fn velocity_model_term(r: f64, alpha: f64, alpha_dot: f64, r_ddot: f64, az_b: f64, gravity: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    (r * alpha_dot * alpha_dot - r_ddot - az_b * sa - gravity * sa) / ca
}

/// Radial force for surge-velocity tracking.
#[allow(clippy::too_many_arguments)]
pub fn surge_velocity_law(
    h_v: f64,
    alpha: f64,
    e_v: f64,
    e_v_int: f64,
    v_ref_dot: f64,
    tension_ff: f64,
    mass: f64,
    kp: f64,
    ki: f64,
) -> f64 {
    tension_ff + mass * alpha.cos() * (-h_v + v_ref_dot - kp * e_v - ki * e_v_int)
}

/// Feed-forward tension needed to hold the buoy at `v_ref` against skin
/// friction on the given wetted area.
pub fn tension_feedforward(v_ref: f64, alpha_ref: f64, wetted_area: f64, p: &BuoyParams, env: &Environment) -> f64 {
    buoy::skin_friction_damping(v_ref, wetted_area, p, env) * v_ref / alpha_ref.cos()
}

/// Mixes the radial position and velocity laws. `fade` is the low-passed
/// pulling flag; leaving the pulling mode hands back to the position law at
/// once.
pub fn blend(u_position: f64, u_velocity: f64, pulling: bool, fade: f64) -> f64 {
    if pulling {
        (1.0 - fade) * u_position + fade * u_velocity
    } else {
        u_position
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub u1: f64,
    /// Unlimited pitch demand `θ′_u,c`.
    pub theta_raw: f64,
    /// Smoothly limited pitch command `θ_u,c`.
    pub theta_c: f64,
}

pub fn limit_pitch(theta: f64, theta_max: f64) -> f64 {
    theta_max * (theta / theta_max).tanh()
}

/// Total thrust and pitch command from the polar force components. With no
/// force demanded the previous raw pitch is kept.
pub fn decompose(u_r: f64, u_alpha: f64, alpha: f64, theta_max: f64, held: f64) -> Decomposition {
    let u1 = u_alpha.hypot(u_r);
    let theta_raw = if u1 > 0.0 { FRAC_PI_2 - alpha - u_alpha.atan2(u_r) } else { held };
    Decomposition {
        u1,
        theta_raw,
        theta_c: limit_pitch(theta_raw, theta_max),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElevationReference {
    pub alpha: f64,
    pub alpha_dot: f64,
    pub alpha_ddot: f64,
    pub clamped: bool,
}

/// Elevation-angle reference holding the UAV at `z_ref` on radius `r_ref`,
/// with its first two time derivatives. Flags a clamp when the target
/// elevation is out of reach.
#[allow(clippy::too_many_arguments)]
pub fn elevation_reference(
    z_ref: f64,
    z_b: f64,
    vz_b: f64,
    az_b: f64,
    r_ref: f64,
    r_ref_dot: f64,
    r_ref_ddot: f64,
    configuration: Configuration,
) -> ElevationReference {
    let y = (z_ref - z_b) / r_ref;
    let (alpha, alpha_dot, alpha_ddot, clamped) = if y.abs() >= 1.0 {
        (FRAC_PI_2.copysign(y), 0.0, 0.0, true)
    } else {
        let yd = (-vz_b - y * r_ref_dot) / r_ref;
        let ydd = (-az_b - 2.0 * yd * r_ref_dot - y * r_ref_ddot) / r_ref;
        let c2 = 1.0 - y * y;
        let c = c2.sqrt();
        (y.asin(), yd / c, ydd / c + y * yd * yd / (c2 * c), false)
    };
    match configuration {
        Configuration::Front => ElevationReference {
            alpha,
            alpha_dot,
            alpha_ddot,
            clamped,
        },
        Configuration::Rear => ElevationReference {
            alpha: std::f64::consts::PI - alpha,
            alpha_dot: -alpha_dot,
            alpha_ddot: -alpha_ddot,
            clamped,
        },
    }
}

/// Gains of the Cartesian PID baseline, `(ẋ, z)` channel order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CbncGains {
    pub kp: [f64; 2],
    pub ki: [f64; 2],
    pub kd: [f64; 2],
    pub integral_limit: f64,
}

impl Default for CbncGains {
    fn default() -> Self {
        Self {
            kp: [7.0, 3.0],
            ki: [1.2, 1.0],
            kd: [5.0, 2.0],
            integral_limit: 50.0,
        }
    }
}

impl CbncGains {
    pub fn validate(&self) -> Result<()> {
        let all = self.kp.iter().chain(&self.ki).chain(&self.kd);
        if all.into_iter().any(|g| !(*g >= 0.0)) || !(self.integral_limit > 0.0) {
            return Err(Error::Config("cbnc gains must be >= 0 and the integral limit positive".into()));
        }
        Ok(())
    }
}

/// Horizontal and vertical force demands; errors are reference minus measurement.
pub fn cbnc_forces(e: [f64; 2], e_dot: [f64; 2], e_int: [f64; 2], g: &CbncGains) -> (f64, f64) {
    let ch = |i: usize| g.kp[i] * e[i] + g.ki[i] * e_int[i] + g.kd[i] * e_dot[i];
    (ch(0), ch(1))
}

/// Planar thrust-vector decomposition with gravity feed-forward; returns
/// `(u1, θ′_u,c)`.
pub fn cbnc_decompose(fx: f64, fz: f64, weight: f64) -> (f64, f64) {
    let vertical = fz + weight;
    (fx.hypot(vertical), fx.atan2(vertical))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    const G: f64 = 9.81;

    #[test]
    fn gain_map() {
        let g = BacksteppingGains::default();
        let kp = g.kp();
        assert_abs_diff_eq!(kp[0], 44.94, epsilon = 1e-12);
        assert_abs_diff_eq!(kp[1], 12.04, epsilon = 1e-12);
        assert_abs_diff_eq!(kp[2], 19.75, epsilon = 1e-12);
        assert_abs_diff_eq!(g.kd()[2], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.ki()[0], 8.45, epsilon = 1e-12);
        assert!(BacksteppingGains { k2: [1.0, 0.0, 1.0], ..g }.validate().is_err());
    }

    #[test]
    fn hover_gravity_compensation() {
        let s = PolarSignals {
            r: 7.0,
            alpha: FRAC_PI_2,
            ..Default::default()
        };
        let h = nonlinear_terms(&s, G);
        let u = position_law(
            &ChannelErrors::default(),
            &Vector3::zeros(),
            &h,
            &Vector3::zeros(),
            &input_scale(7.0, 1.8, 0.03),
            &BacksteppingGains::default(),
        );
        assert_abs_diff_eq!(u[0], 1.8 * G, epsilon = 1e-12);
        assert_abs_diff_eq!(u[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_feedforward() {
        let scale = input_scale(5.0, 1.8, 0.03);
        let acc = Vector3::new(0.3, -0.2, 4.0);
        let u = position_law(
            &ChannelErrors::default(),
            &acc,
            &Vector3::zeros(),
            &Vector3::zeros(),
            &scale,
            &BacksteppingGains::default(),
        );
        assert_abs_diff_eq!((u - scale.component_mul(&acc)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tension_estimate_adds_radial_pull() {
        let s = PolarSignals { r: 7.0, alpha: FRAC_PI_4, ..Default::default() };
        let h = nonlinear_terms(&s, G);
        let scale = input_scale(7.0, 1.8, 0.03);
        let g = BacksteppingGains::default();
        let e = ChannelErrors::default();
        let base = position_law(&e, &Vector3::zeros(), &h, &Vector3::zeros(), &scale, &g);
        let with_t = position_law(&e, &Vector3::zeros(), &h, &(tension_regressor(1.8) * 20.0), &scale, &g);
        assert_abs_diff_eq!(with_t[0] - base[0], 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(with_t[1], base[1], epsilon = 1e-12);
    }

    #[test]
    fn inner_loop_examples() {
        let g = BacksteppingGains::default();
        assert_eq!(inner_loop_pitch(0.0, 0.0, 0.0, 0.0, 0.03, &g), 0.0);
        assert_abs_diff_eq!(inner_loop_pitch(0.1, 0.0, 0.0, 0.0, 0.03, &g), -0.05925, epsilon = 1e-12);
    }

    #[test]
    fn surge_law_examples() {
        let alpha = 0.9;
        let h_v = velocity_model_term(7.0, alpha, 0.0, 0.0, 0.0, G);
        let u = surge_velocity_law(h_v, alpha, 0.0, 0.0, 0.0, 12.0, 1.8, 25.0, 12.0);
        assert_abs_diff_eq!(u, 12.0 + 1.8 * G * alpha.sin(), epsilon = 1e-12);

        let slower = surge_velocity_law(h_v, alpha, 0.3, 0.0, 0.0, 12.0, 1.8, 25.0, 12.0);
        assert!(slower < u);
        // at the rear the pull direction flips, so being too slow (e_V > 0) pulls harder
        let rear = PI - alpha;
        let h_r = velocity_model_term(7.0, rear, 0.0, 0.0, 0.0, G);
        let a = surge_velocity_law(h_r, rear, 0.0, 0.0, 0.0, 12.0, 1.8, 25.0, 12.0);
        let b = surge_velocity_law(h_r, rear, 0.3, 0.0, 0.0, 12.0, 1.8, 25.0, 12.0);
        assert!(b > a);
    }

    #[test]
    fn tension_feedforward_example() {
        // 5 m/s on a 0.4 m² wetted area at 45°
        let env = Environment::calm();
        let p = BuoyParams::default();
        let re = 5.0 * p.length_m / env.water_viscosity;
        assert_abs_diff_eq!(re, 2.247e6, epsilon = 1e3);
        let cs = 0.075 / (re.log10() - 2.0).powi(2);
        assert_abs_diff_eq!(cs, 0.003961, epsilon = 1e-6);
        let t = tension_feedforward(5.0, FRAC_PI_4, 0.4, &p, &env);
        assert_abs_diff_eq!(t, cs * 0.4 * 500.0 * 25.0 * SQRT_2, epsilon = 1e-9);
        assert_abs_diff_eq!(t, 28.01, epsilon = 0.01);
        // symmetric at the rear: negative speed, obtuse angle
        let tr = tension_feedforward(-5.0, PI - FRAC_PI_4, 0.4, &p, &env);
        assert_abs_diff_eq!(tr, t, epsilon = 1e-9);
    }

    #[test]
    fn blend_examples() {
        assert_eq!(blend(3.0, 9.0, false, 0.7), 3.0);
        assert_eq!(blend(3.0, 9.0, true, 1.0), 9.0);
        let mut prev = 3.0;
        for k in 1..=10 {
            let fade = 1.0 - (-(k as f64) / 3.0).exp();
            let u = blend(3.0, 9.0, true, fade);
            assert!(u > prev && u < 9.0);
            prev = u;
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose(20.0, 0.0, FRAC_PI_2, FRAC_PI_4, 0.0);
        assert_abs_diff_eq!(d.u1, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.theta_c, 0.0, epsilon = 1e-12);
        let d = decompose(5.0, 5.0, FRAC_PI_4, FRAC_PI_4, 0.0);
        assert_abs_diff_eq!(d.theta_raw, 0.0, epsilon = 1e-12);
        let d = decompose(0.0, 0.0, 1.0, FRAC_PI_4, 0.2);
        assert_eq!(d.theta_raw, 0.2);
        assert!(limit_pitch(10.0, FRAC_PI_4) < FRAC_PI_4);
        assert!(limit_pitch(-10.0, FRAC_PI_4) > -FRAC_PI_4);
    }

    #[test]
    fn elevation_reference_examples() {
        let r = 7.0;
        let front = elevation_reference(r / SQRT_2, 0.0, 0.0, 0.0, r, 0.0, 0.0, Configuration::Front);
        assert_abs_diff_eq!(front.alpha, FRAC_PI_4, epsilon = 1e-12);
        assert!(!front.clamped);
        let rear = elevation_reference(r / SQRT_2, 0.0, 0.0, 0.0, r, 0.0, 0.0, Configuration::Rear);
        assert_abs_diff_eq!(rear.alpha, 3.0 * FRAC_PI_4, epsilon = 1e-12);
        let high = elevation_reference(10.0, 0.0, 0.0, 0.0, r, 0.0, 0.0, Configuration::Front);
        assert!(high.clamped);
        assert_abs_diff_eq!(high.alpha, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn elevation_reference_rates_match_finite_differences() {
        // z_b(t) = 0.3 sin(2t), r̄(t) = 6.8 + 0.1 t²
        let zb = |t: f64| 0.3 * (2.0 * t).sin();
        let rr = |t: f64| 6.8 + 0.1 * t * t;
        let at = |t: f64| {
            elevation_reference(
                5.0,
                zb(t),
                0.6 * (2.0 * t).cos(),
                -1.2 * (2.0 * t).sin(),
                rr(t),
                0.2 * t,
                0.2,
                Configuration::Rear,
            )
        };
        let (t, h) = (0.7, 1e-4);
        let e = at(t);
        let fd1 = (at(t + h).alpha - at(t - h).alpha) / (2.0 * h);
        let fd2 = (at(t + h).alpha - 2.0 * e.alpha + at(t - h).alpha) / (h * h);
        assert_abs_diff_eq!(e.alpha_dot, fd1, epsilon = 1e-7);
        assert_abs_diff_eq!(e.alpha_ddot, fd2, epsilon = 1e-5);
    }

    #[test]
    fn cbnc_examples() {
        let g = CbncGains::default();
        let w = 1.8 * G;
        let (fx, fz) = cbnc_forces([0.0; 2], [0.0; 2], [0.0; 2], &g);
        let (u1, th) = cbnc_decompose(fx, fz, w);
        assert_abs_diff_eq!(u1, w, epsilon = 1e-12);
        assert_eq!(th, 0.0);
        let (fx, fz) = cbnc_forces([1.0, 0.0], [0.0; 2], [0.0; 2], &g);
        assert_eq!(fx, 7.0);
        let (_, th) = cbnc_decompose(fx, fz, w);
        assert_abs_diff_eq!(th, (7.0f64 / w).atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(th, 0.37742, epsilon = 1e-5);
    }

    proptest! {
        #[test]
        fn decomposition_round_trip(u_r in -50.0f64..50.0, u_a in -50.0f64..50.0, alpha in 0.1f64..3.0) {
            prop_assume!(u_r.hypot(u_a) > 1e-3);
            let d = decompose(u_r, u_a, alpha, FRAC_PI_4, 0.0);
            prop_assume!(d.theta_raw.abs() < FRAC_PI_4);
            let phi = alpha + d.theta_raw;
            prop_assert!((d.u1 * phi.sin() - u_r).abs() < 1e-10);
            prop_assert!((d.u1 * phi.cos() - u_a).abs() < 1e-10);
        }

        #[test]
        fn channels_are_decoupled_at_the_interface(
            e in prop::array::uniform3(-1.0f64..1.0),
            ed in prop::array::uniform3(-1.0f64..1.0),
            kick in -5.0f64..5.0,
        ) {
            let s = PolarSignals { r: 6.9, alpha: 0.8, r_dot: 0.1, alpha_dot: -0.05, ax_b: 0.3, az_b: -0.2 };
            let h = nonlinear_terms(&s, G);
            let scale = input_scale(s.r, 1.8, 0.03);
            let g = BacksteppingGains::default();
            let mut err = ChannelErrors { e: e.into(), e_dot: ed.into(), e_int: Vector3::zeros() };
            let a = position_law(&err, &Vector3::zeros(), &h, &Vector3::zeros(), &scale, &g);
            err.e[1] += kick;
            let b = position_law(&err, &Vector3::zeros(), &h, &Vector3::zeros(), &scale, &g);
            prop_assert_eq!(a[0], b[0]);
        }
    }
}
