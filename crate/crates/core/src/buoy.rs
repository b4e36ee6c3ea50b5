//! Cuboid buoy: hydrostatics, skin friction and the inertial-frame mass and
//! damping matrices.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::environment::Environment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuoyParams {
    pub length_m: f64,
    pub height_m: f64,
    pub width_m: f64,
    pub mass_kg: f64,
    pub volume_m3: f64,
    pub added_mass_surge_kg: f64,
    pub added_mass_heave_kg: f64,
    pub added_inertia_pitch_kgm2: f64,
    pub damping_surge_ns_per_m: f64,
    pub damping_heave_ns_per_m: f64,
    pub damping_pitch_nms: f64,
    /// Skin-friction pitch damping `D_S3`.
    pub friction_pitch_nms: f64,
    /// Pitch restoring coefficient `f_p` (negative for a stable buoy).
    pub restoring_pitch_nm: f64,
    pub inertia_pitch_kgm2: f64,
    /// Disables the skin-friction contribution, leaving only potential damping.
    pub skin_friction: bool,
}

impl Default for BuoyParams {
    fn default() -> Self {
        let (l, h, m) = (0.8, 0.25, 12.5);
        let volume = 4.0 * m / crate::environment::WATER_DENSITY;
        Self {
            length_m: l,
            height_m: h,
            width_m: volume / (l * h),
            mass_kg: m,
            volume_m3: volume,
            added_mass_surge_kg: 0.05 * m,
            added_mass_heave_kg: m,
            added_inertia_pitch_kgm2: 0.0,
            damping_surge_ns_per_m: 0.0,
            damping_heave_ns_per_m: 27.5,
            damping_pitch_nms: 0.0,
            friction_pitch_nms: 5.0,
            restoring_pitch_nm: -50.0,
            inertia_pitch_kgm2: m * (l * l + h * h) / 12.0,
            skin_friction: true,
        }
    }
}

impl BuoyParams {
    pub fn validate(&self, water_density: f64) -> Result<()> {
        let positive = [
            ("length_m", self.length_m),
            ("height_m", self.height_m),
            ("width_m", self.width_m),
            ("mass_kg", self.mass_kg),
            ("volume_m3", self.volume_m3),
            ("inertia_pitch_kgm2", self.inertia_pitch_kgm2),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("buoy {name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("added_mass_surge_kg", self.added_mass_surge_kg),
            ("added_mass_heave_kg", self.added_mass_heave_kg),
            ("added_inertia_pitch_kgm2", self.added_inertia_pitch_kgm2),
            ("damping_surge_ns_per_m", self.damping_surge_ns_per_m),
            ("damping_heave_ns_per_m", self.damping_heave_ns_per_m),
            ("damping_pitch_nms", self.damping_pitch_nms),
            ("friction_pitch_nms", self.friction_pitch_nms),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("buoy {name} must be >= 0, got {v}")));
            }
        }
        if self.mass_kg >= water_density * self.volume_m3 {
            return Err(Error::Config(format!(
                "buoy must float: m_b = {} kg is not below rho_w * V_b = {} kg",
                self.mass_kg,
                water_density * self.volume_m3
            )));
        }
        Ok(())
    }

    /// Waterplane area `l_b * w_b`.
    pub fn waterplane_area(&self) -> f64 {
        self.length_m * self.width_m
    }

    /// Body-frame inertia `diag(m_b + a11, m_b + a33, J_b + a55)`.
    pub fn body_inertia(&self) -> Vector3<f64> {
        Vector3::new(
            self.mass_kg + self.added_mass_surge_kg,
            self.mass_kg + self.added_mass_heave_kg,
            self.inertia_pitch_kgm2 + self.added_inertia_pitch_kgm2,
        )
    }

    /// Immersion `Δh` at which buoyancy balances the buoy weight alone.
    pub fn free_floating_delta_h(&self, water_density: f64) -> f64 {
        (self.mass_kg / water_density - 0.5 * self.volume_m3) / self.waterplane_area()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BuoyState {
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub vx: f64,
    pub vz: f64,
    pub omega: f64,
}

/// Immersed volume as a function of the surface height above the buoy
/// centre, `Δh = ζ − z_b`.
pub fn immersed_volume(delta_h: f64, p: &BuoyParams) -> f64 {
    let half = 0.5 * p.height_m;
    if delta_h > half {
        p.volume_m3
    } else if delta_h < -half {
        0.0
    } else {
        0.5 * p.volume_m3 + p.waterplane_area() * delta_h
    }
}

/// `∫ immersed_volume(s) ds` from fully airborne up to `delta_h`. Used as the
/// buoyancy potential in energy bookkeeping.
pub fn immersed_volume_integral(delta_h: f64, p: &BuoyParams) -> f64 {
    let half = 0.5 * p.height_m;
    let aw = p.waterplane_area();
    let partial = |d: f64| 0.5 * p.volume_m3 * (d + half) + 0.5 * aw * (d * d - half * half);
    if delta_h < -half {
        0.0
    } else if delta_h <= half {
        partial(delta_h)
    } else {
        partial(half) + p.volume_m3 * (delta_h - half)
    }
}

/// Wetted area. Discontinuous at both ends: the bottom face wets on first
/// contact and the top face only on full submersion.
pub fn wetted_area(delta_h: f64, p: &BuoyParams) -> f64 {
    let half = 0.5 * p.height_m;
    if delta_h > half {
        4.0 * p.length_m * p.height_m
    } else if delta_h < -half {
        0.0
    } else {
        p.length_m * p.height_m + 2.0 * p.length_m * (half + delta_h)
    }
}

/// ITTC-57 friction line with the Reynolds number floored at 1e5.
pub fn skin_friction_coeff(v_rel: f64, p: &BuoyParams, viscosity: f64) -> f64 {
    let re = (v_rel.abs() * p.length_m / viscosity).max(1e5);
    let d = re.log10() - 2.0;
    0.075 / (d * d)
}

/// Skin-friction damping coefficient `C_S A_wt ½ ρ_w |ṽ|` for one axis.
pub fn skin_friction_damping(v_rel: f64, area: f64, p: &BuoyParams, env: &Environment) -> f64 {
    skin_friction_coeff(v_rel, p, env.water_viscosity) * area * 0.5 * env.water_density * v_rel.abs()
}

/// Inertial-frame matrices acting on `η_b = [x_b, z_b, θ_b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hydrodynamics {
    pub mass: Matrix3<f64>,
    pub damping: Matrix3<f64>,
    /// Coriolis matrix from `½ Ṁ_b`; zero because `θ̇_b` is neglected there.
    pub coriolis: Matrix3<f64>,
    pub immersed_volume: f64,
    /// Restoring coefficient in effect (zero when airborne).
    pub restoring: f64,
    pub airborne: bool,
}

impl Hydrodynamics {
    pub fn translational_mass(&self) -> Matrix2<f64> {
        self.mass.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn translational_damping(&self) -> Matrix2<f64> {
        self.damping.fixed_view::<2, 2>(0, 0).into_owned()
    }
}

/// Rotates a diagonal body-frame matrix into the inertial frame by `θ_b`.
pub fn rotate_diagonal(body: Vector3<f64>, theta: f64) -> Matrix3<f64> {
    let (s, c) = theta.sin_cos();
    let s2 = (2.0 * theta).sin();
    let off = 0.5 * s2 * (body[1] - body[0]);
    Matrix3::new(
        body[0] * c * c + body[1] * s * s,
        off,
        0.0,
        off,
        body[0] * s * s + body[1] * c * c,
        0.0,
        0.0,
        0.0,
        body[2],
    )
}

/// Assembles `M_b`, `D_b` and `C_b` for a buoy at pitch `theta` with
/// immersion `delta_h` and water-relative translational velocity `v_rel`.
pub fn hydrodynamic_matrices(
    theta: f64,
    delta_h: f64,
    v_rel: Vector2<f64>,
    p: &BuoyParams,
    env: &Environment,
) -> Hydrodynamics {
    let volume = immersed_volume(delta_h, p);
    if delta_h < -0.5 * p.height_m {
        return Hydrodynamics {
            mass: Matrix3::from_diagonal(&Vector3::new(p.mass_kg, p.mass_kg, p.inertia_pitch_kgm2)),
            damping: Matrix3::zeros(),
            coriolis: Matrix3::zeros(),
            immersed_volume: volume,
            restoring: 0.0,
            airborne: true,
        };
    }
    let friction = if p.skin_friction {
        skin_friction_damping(v_rel.norm(), wetted_area(delta_h, p), p, env)
    } else {
        0.0
    };
    let body_damping = Vector3::new(
        p.damping_surge_ns_per_m + friction,
        p.damping_heave_ns_per_m + friction,
        p.damping_pitch_nms + p.friction_pitch_nms,
    );
    Hydrodynamics {
        mass: rotate_diagonal(p.body_inertia(), theta),
        damping: rotate_diagonal(body_damping, theta),
        coriolis: Matrix3::zeros(),
        immersed_volume: volume,
        restoring: p.restoring_pitch_nm,
        airborne: false,
    }
}

/// Water-relative buoy velocity `η̃̇_b` (translational part), sampled at the
/// buoy centre with the surface clamp.
pub fn relative_velocity(state: &BuoyState, env: &Environment, t: f64) -> Vector2<f64> {
    let (wx, wz) = env.water_velocity(state.x, state.z, t);
    Vector2::new(state.vx - wx, state.vz - wz)
}

/// Surface height above the buoy centre.
pub fn delta_h(state: &BuoyState, env: &Environment, t: f64) -> f64 {
    env.elevation(state.x, t) - state.z
}

/// Hydrodynamics evaluated at a buoy state.
pub fn hydrodynamics_at(state: &BuoyState, env: &Environment, t: f64, p: &BuoyParams) -> Hydrodynamics {
    hydrodynamic_matrices(
        state.theta,
        delta_h(state, env, t),
        relative_velocity(state, env, t),
        p,
        env,
    )
}

/// Free buoy acceleration `[ẍ_b, z̈_b, θ̈_b]` under cable tension `tension`
/// pulling along `alpha`.
pub fn buoy_accel_decoupled(
    state: &BuoyState,
    env: &Environment,
    t: f64,
    tension: f64,
    alpha: f64,
    p: &BuoyParams,
) -> Result<Vector3<f64>> {
    if !(tension >= 0.0) {
        return Err(Error::Domain(format!("tension must be >= 0, got {tension}")));
    }
    let hydro = hydrodynamics_at(state, env, t, p);
    let v_rel = relative_velocity(state, env, t);
    let eta_rel = Vector3::new(v_rel[0], v_rel[1], state.omega);
    let eta_dot = Vector3::new(state.vx, state.vz, state.omega);
    let g = env.gravity;
    let tau = Vector3::new(
        tension * alpha.cos(),
        env.water_density * g * hydro.immersed_volume + tension * alpha.sin(),
        hydro.restoring * state.theta.sin(),
    );
    let gravity = Vector3::new(0.0, p.mass_kg * g, 0.0);
    let rhs = tau - hydro.coriolis * eta_dot - hydro.damping * eta_rel - gravity;
    hydro
        .mass
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .ok_or_else(|| Error::Singular("buoy mass matrix is not positive definite".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params() -> BuoyParams {
        BuoyParams::default()
    }

    #[test]
    fn defaults_match_design_values() {
        let p = params();
        assert_abs_diff_eq!(p.volume_m3, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(p.width_m, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.inertia_pitch_kgm2, 0.7317708333, epsilon = 1e-9);
        assert_abs_diff_eq!(p.added_mass_surge_kg, 0.625, epsilon = 1e-15);
        p.validate(1000.0).unwrap();
        let mut sinker = p;
        sinker.mass_kg = 60.0;
        assert!(sinker.validate(1000.0).is_err());
    }

    #[test]
    fn immersed_volume_cases() {
        let p = params();
        assert_abs_diff_eq!(immersed_volume(0.0, &p), 0.025, epsilon = 1e-15);
        assert_eq!(immersed_volume(p.height_m, &p), 0.05);
        assert_eq!(immersed_volume(-p.height_m, &p), 0.0);
        let d = p.free_floating_delta_h(1000.0);
        assert_abs_diff_eq!(immersed_volume(d, &p), 0.0125, epsilon = 1e-15);
    }

    #[test]
    fn wetted_area_cases() {
        let p = params();
        assert_abs_diff_eq!(wetted_area(0.0, &p), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(wetted_area(0.2, &p), 0.8, epsilon = 1e-15);
        assert_eq!(wetted_area(-0.2, &p), 0.0);
        assert_abs_diff_eq!(wetted_area(p.free_floating_delta_h(1000.0), &p), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn skin_friction_cases() {
        let p = params();
        let nu = 1.78e-6;
        let v_at = |re: f64| re * nu / p.length_m;
        assert_abs_diff_eq!(skin_friction_coeff(v_at(1e5), &p, nu), 0.075 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(skin_friction_coeff(v_at(1e6), &p, nu), 0.0046875, epsilon = 1e-12);
        assert_abs_diff_eq!(skin_friction_coeff(0.0, &p, nu), 0.075 / 9.0, epsilon = 1e-15);
        assert_eq!(skin_friction_coeff(-3.0, &p, nu), skin_friction_coeff(3.0, &p, nu));
    }

    #[test]
    fn matrices_at_zero_and_quarter_turn() {
        let p = params();
        let env = Environment::calm();
        let h = hydrodynamic_matrices(0.0, 0.0, Vector2::new(1.0, 0.0), &p, &env);
        assert_eq!(h.mass, Matrix3::from_diagonal(&p.body_inertia()));
        let h = hydrodynamic_matrices(std::f64::consts::FRAC_PI_2, 0.0, Vector2::zeros(), &p, &env);
        assert_abs_diff_eq!(h.mass[(0, 0)], 25.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.mass[(1, 1)], 13.125, epsilon = 1e-12);
        assert_abs_diff_eq!(h.mass[(0, 1)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn airborne_matrices() {
        let p = params();
        let env = Environment::calm();
        let h = hydrodynamic_matrices(0.3, -0.2, Vector2::new(4.0, 1.0), &p, &env);
        assert!(h.airborne);
        assert_eq!(h.damping, Matrix3::zeros());
        assert_eq!(h.mass, Matrix3::from_diagonal(&Vector3::new(12.5, 12.5, p.inertia_pitch_kgm2)));
        assert_eq!(h.restoring, 0.0);
        assert_eq!(h.immersed_volume, 0.0);
    }

    #[test]
    fn still_water_half_immersed_rises() {
        let p = params();
        let env = Environment::calm();
        let s = BuoyState { z: 0.0, ..Default::default() };
        let a = buoy_accel_decoupled(&s, &env, 0.0, 0.0, 0.0, &p).unwrap();
        assert_abs_diff_eq!(a[1], 4.905, epsilon = 1e-12);
        assert_abs_diff_eq!(a[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn still_water_free_floating_is_balanced() {
        let p = params();
        let env = Environment::calm();
        let s = BuoyState { z: -p.free_floating_delta_h(1000.0), ..Default::default() };
        let a = buoy_accel_decoupled(&s, &env, 0.0, 0.0, 0.0, &p).unwrap();
        assert_abs_diff_eq!(a.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hanging_threshold_balances_weight() {
        let p = params();
        let env = Environment::calm();
        let alpha: f64 = 1.1;
        let s = BuoyState { z: 0.3, ..Default::default() };
        let tension = p.mass_kg * env.gravity / alpha.sin();
        let a = buoy_accel_decoupled(&s, &env, 0.0, tension, alpha, &p).unwrap();
        assert_abs_diff_eq!(a[1], 0.0, epsilon = 1e-12);
        assert!(buoy_accel_decoupled(&s, &env, 0.0, -1.0, alpha, &p).is_err());
    }

    #[test]
    fn volume_integral_matches_quadrature() {
        let p = params();
        let n = 20_000;
        let (a, b) = (-0.2, 0.19);
        let h = (b - a) / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let x = a + (i as f64 + 0.5) * h;
            sum += immersed_volume(x, &p) * h;
        }
        assert_abs_diff_eq!(immersed_volume_integral(b, &p), sum, epsilon = 1e-8);
    }

    proptest! {
        #[test]
        fn rotation_round_trip(theta in -3.14f64..3.14) {
            let p = params();
            let m = rotate_diagonal(p.body_inertia(), theta);
            let (s, c) = theta.sin_cos();
            let r = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
            let body = r * m * r.transpose();
            let expected = Matrix3::from_diagonal(&p.body_inertia());
            prop_assert!((body - expected).abs().max() < 1e-12);
        }

        #[test]
        fn mass_spd_and_damping_psd(theta in -3.14f64..3.14, dh in -0.12f64..0.3,
                                    vx in -20.0f64..20.0, vz in -3.0f64..3.0) {
            let p = params();
            let env = Environment::calm();
            let h = hydrodynamic_matrices(theta, dh, Vector2::new(vx, vz), &p, &env);
            prop_assert!((h.mass - h.mass.transpose()).abs().max() < 1e-12);
            prop_assert!((h.damping - h.damping.transpose()).abs().max() < 1e-12);
            let em = h.mass.symmetric_eigenvalues();
            prop_assert!(em.min() > 0.0);
            let ed = h.damping.symmetric_eigenvalues();
            prop_assert!(ed.min() > -1e-9);
        }

        #[test]
        fn volume_monotone(a in -0.3f64..0.3, b in -0.3f64..0.3) {
            let p = params();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(immersed_volume(lo, &p) <= immersed_volume(hi, &p));
        }

        #[test]
        fn volume_continuous_at_edges(eps in 1e-12f64..1e-6) {
            let p = params();
            let half = 0.5 * p.height_m;
            for edge in [-half, half] {
                let jump = (immersed_volume(edge + eps, &p) - immersed_volume(edge - eps, &p)).abs();
                prop_assert!(jump <= p.waterplane_area() * 2.0 * eps + 1e-15);
            }
        }

        #[test]
        fn free_accel_matches_force_balance(x in -5.0f64..5.0, z in -0.2f64..0.2,
                                            theta in -0.3f64..0.3, vx in -6.0f64..6.0,
                                            vz in -2.0f64..2.0, t in 0.0f64..20.0) {
            // Independent force sum in the body frame, rotated back.
            let p = params();
            let env = Environment::calm()
                .with_current(-0.5)
                .with_waves(vec![crate::environment::WaveComponent::new(0.3, 4.0, 1, 0.2, 9.81).unwrap()]);
            let s = BuoyState { x, z, theta, vx, vz, omega: 0.0 };
            let a = buoy_accel_decoupled(&s, &env, t, 0.0, 0.0, &p).unwrap();

            let dh = env.elevation(x, t) - z;
            let (wx, wz) = env.water_velocity(x, z, t);
            let (rx, rz) = (vx - wx, vz - wz);
            let (sn, cs) = theta.sin_cos();
            let half = p.height_m / 2.0;
            let (fx, fz, mx, mz) = if dh < -half {
                (0.0, -p.mass_kg * 9.81, p.mass_kg, p.mass_kg)
            } else {
                let fric = if p.skin_friction {
                    let speed = (rx * rx + rz * rz).sqrt();
                    let re = (speed * p.length_m / 1.78e-6).max(1e5);
                    0.075 / (re.log10() - 2.0).powi(2) * wetted_area(dh, &p) * 500.0 * speed
                } else {
                    0.0
                };
                // body-frame relative velocity and drag
                let (ub, wb) = (cs * rx - sn * rz, sn * rx + cs * rz);
                let (du, dw) = (-(p.damping_surge_ns_per_m + fric) * ub, -(p.damping_heave_ns_per_m + fric) * wb);
                let fx = cs * du + sn * dw;
                let fz = -sn * du + cs * dw + 1000.0 * 9.81 * immersed_volume(dh, &p) - p.mass_kg * 9.81;
                (fx, fz, p.mass_kg + p.added_mass_surge_kg, p.mass_kg + p.added_mass_heave_kg)
            };
            // body-frame acceleration, mass diagonal there
            let (fu, fw) = (cs * fx - sn * fz, sn * fx + cs * fz);
            let (au, aw) = (fu / mx, fw / mz);
            let (ax, az) = (cs * au + sn * aw, -sn * au + cs * aw);
            prop_assert!((a[0] - ax).abs() < 1e-9);
            prop_assert!((a[1] - az).abs() < 1e-9);
        }
    }
}
