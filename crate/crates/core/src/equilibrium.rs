//! Steady towing analysis: attainable equilibria, admissible velocity sets and
//! the heave dynamic-amplification (fly-over) map.
//!
//! All steady-state quantities assume flat water; the current is the lumped
//! `U_l` (Stokes drift excluded). Air drag on the UAV is neglected here, as in
//! the closed-form equilibrium.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::buoy::{self, BuoyParams};
use crate::coupled::System;
use crate::environment::{Environment, WaveComponent};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Margins {
    /// Minimum steady cable tension `ε_T`.
    pub tension_n: f64,
    /// Minimum immersed volume as a fraction of the buoy volume `ε_∀`.
    pub volume_fraction: f64,
    /// Thrust-gate margin `ε_m`.
    pub thrust_fraction: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Self {
            tension_n: 5.0,
            volume_fraction: 0.05,
            thrust_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub v: f64,
    pub v_rel: f64,
    pub alpha: f64,
    pub theta_u: f64,
    pub u1: f64,
    pub volume: f64,
    pub tension: f64,
    pub d11: f64,
    pub d21: f64,
    /// Surface height above the buoy centre.
    pub delta_h: f64,
}

impl EquilibriumPoint {
    /// Buoy centre height on flat water.
    pub fn z_b(&self) -> f64 {
        -self.delta_h
    }

    pub fn is_admissible(&self, margins: &Margins, p: &BuoyParams) -> bool {
        self.tension > margins.tension_n && self.volume > margins.volume_fraction * p.volume_m3
    }
}

/// Surge damping `D̄_b,11` at relative speed `v_rel` and immersion `delta_h`
/// (buoy level, `θ_b = 0`).
pub fn surge_damping(v_rel: f64, delta_h: f64, p: &BuoyParams, env: &Environment) -> f64 {
    let friction = if p.skin_friction {
        buoy::skin_friction_damping(v_rel, buoy::wetted_area(delta_h, p), p, env)
    } else {
        0.0
    };
    p.damping_surge_ns_per_m + friction
}

/// Immersion at which the steady vertical balance holds with cable lift
/// `v_rel · D11 · tan α`, with the wetted area of that same immersion.
fn steady_immersion(v_rel: f64, alpha: f64, sys: &System) -> (f64, f64, f64) {
    let p = &sys.buoy;
    let env = &sys.env;
    let rho = env.water_density;
    let g = env.gravity;
    let half = 0.5 * p.height_m;
    let aw = p.waterplane_area();
    // Inside the partially immersed band everything is affine in Δh, so the
    // self-consistent immersion has a closed form.
    let cs = if p.skin_friction {
        buoy::skin_friction_coeff(v_rel, p, env.water_viscosity) * 0.5 * rho * v_rel.abs()
    } else {
        0.0
    };
    let k = v_rel * alpha.tan() / (rho * g);
    // Vol = m/ρ − k (b11 + cs (2 l h_half + 2 l Δh)), Vol = V/2 + aw Δh
    let a0 = p.length_m * p.height_m + 2.0 * p.length_m * half;
    let slope = 2.0 * p.length_m;
    let dh = (p.mass_kg / rho - k * (p.damping_surge_ns_per_m + cs * a0) - 0.5 * p.volume_m3)
        / (aw + k * cs * slope);
    let dh = dh.clamp(-half, half);
    let d11 = surge_damping(v_rel, dh, p, env);
    let volume = p.mass_kg / rho - k * d11;
    (dh, d11, volume)
}

/// Closed-form equilibrium for mean buoy velocity `v` and elevation angle
/// `alpha`. At `alpha = π/2` the relative velocity must vanish and the thrust
/// is free; `u1_vertical` picks it (default `m_u g`).
pub fn equilibrium_point(v: f64, alpha: f64, sys: &System, u1_vertical: Option<f64>) -> Result<EquilibriumPoint> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(Error::Domain(format!("elevation angle must lie in (0, pi), got {alpha}")));
    }
    let env = &sys.env;
    let p = &sys.buoy;
    let g = env.gravity;
    let rho = env.water_density;
    let mu = sys.uav.mass_kg;
    let v_rel = v - env.current;
    let aw = p.waterplane_area();

    if (alpha - FRAC_PI_2).abs() < 1e-12 {
        if v_rel.abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "vertical cable admits no equilibrium with relative velocity {v_rel} m/s"
            )));
        }
        let u1 = u1_vertical.unwrap_or(mu * g);
        let volume = (p.mass_kg + mu) / rho - u1 / (rho * g);
        let delta_h = (volume - 0.5 * p.volume_m3) / aw;
        return Ok(EquilibriumPoint {
            v,
            v_rel,
            alpha,
            theta_u: 0.0,
            u1,
            volume,
            tension: u1 - mu * g,
            d11: surge_damping(0.0, delta_h, p, env),
            d21: 0.0,
            delta_h,
        });
    }

    let (delta_h, d11, volume) = steady_immersion(v_rel, alpha, sys);
    let (s, c) = alpha.sin_cos();
    let drag = d11 * v_rel;
    let theta_u = (drag * c / (mu * g * c + drag * s)).atan();
    let u1 = if v_rel == 0.0 {
        mu * g
    } else {
        drag / theta_u.sin()
    };
    Ok(EquilibriumPoint {
        v,
        v_rel,
        alpha,
        theta_u,
        u1,
        volume,
        tension: drag / c,
        d11,
        d21: 0.0,
        delta_h,
    })
}

/// Residuals of the three steady-state equations (surge, heave, cable
/// angle) for a candidate equilibrium.
pub fn steady_state_residuals(e: &EquilibriumPoint, sys: &System) -> [f64; 3] {
    let g = sys.env.gravity;
    let mu = sys.uav.mass_kg;
    let mb = sys.buoy.mass_kg;
    [
        e.d11 * e.v_rel - e.u1 * e.theta_u.sin(),
        e.d21 * e.v_rel + (mb + mu) * g - e.u1 * e.theta_u.cos() - sys.env.water_density * e.volume * g,
        mu * g * e.alpha.cos() - e.u1 * (e.alpha + e.theta_u).cos(),
    ]
}

/// Damped fixed-point settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub relaxation: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for FixedPoint {
    fn default() -> Self {
        Self {
            relaxation: 0.5,
            tolerance: 1e-6,
            max_iterations: 100,
        }
    }
}

fn iterate(start: f64, fp: &FixedPoint, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut x = start;
    let mut step = f64::INFINITY;
    for _ in 0..fp.max_iterations {
        let next = (1.0 - fp.relaxation) * x + fp.relaxation * f(x);
        step = (next - x).abs();
        x = next;
        if !x.is_finite() {
            break;
        }
        if step < fp.tolerance {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: fp.max_iterations,
        last_step: step,
        value: x,
    })
}

/// Open interval of admissible steady velocities for one towing side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityInterval {
    pub lower: f64,
    pub upper: f64,
}

/// Admissible steady velocities at elevation angle `alpha`: the positive set
/// for `alpha < π/2`, the negative set for `alpha > π/2`.
///
/// The slow endpoint solves `T̄ = ε_T`; the fast endpoint solves
/// `∀̄_im = ε_∀ ∀_b` in the form `V̄_r = (m_b + m_u − ε_∀ ρ_w ∀_b) g tan θ̄_u / D̄_b,11`,
/// with `θ̄_u` and `D̄_b,11` re-evaluated inside the same damped fixed point.
pub fn velocity_bounds(alpha: f64, sys: &System, margins: &Margins, fp: &FixedPoint) -> Result<VelocityInterval> {
    if !(alpha > 0.0 && alpha < PI) || (alpha - FRAC_PI_2).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "velocity bounds need a non-vertical elevation angle in (0, pi), got {alpha}"
        )));
    }
    let env = &sys.env;
    let p = &sys.buoy;
    let g = env.gravity;
    let rho = env.water_density;
    let mu = sys.uav.mass_kg;
    let sign = if alpha < FRAC_PI_2 { 1.0 } else { -1.0 };
    let ca = alpha.cos().abs();
    let ta = alpha.tan().abs();

    let slow = if margins.tension_n <= 0.0 {
        0.0
    } else {
        iterate(1.0, fp, |s| {
            let (dh, _, _) = steady_immersion(sign * s, alpha, sys);
            margins.tension_n * ca / surge_damping(s, dh, p, env)
        })?
    };

    let dh_fast = (margins.volume_fraction * p.volume_m3 - 0.5 * p.volume_m3) / p.waterplane_area();
    let excess = (p.mass_kg + mu - margins.volume_fraction * rho * p.volume_m3) * g;
    let fast = iterate(10.0, fp, |s| {
        let d11 = surge_damping(s, dh_fast, p, env);
        let drag = d11 * s;
        let tan_theta = drag / (mu * g + drag * ta);
        excess * tan_theta / d11
    })?;

    let uc = env.current;
    Ok(if sign > 0.0 {
        VelocityInterval { lower: slow + uc, upper: fast + uc }
    } else {
        VelocityInterval { lower: -fast + uc, upper: -slow + uc }
    })
}

/// Heave natural frequency `ω_b` (rad/s) and damping ratio `μ_b` of the
/// buoy on its waterplane.
pub fn natural_frequency(p: &BuoyParams, env: &Environment) -> (f64, f64) {
    let stiffness = env.water_density * env.gravity * p.waterplane_area();
    let mass = p.mass_kg + p.added_mass_heave_kg;
    ((stiffness / mass).sqrt(), p.damping_heave_ns_per_m / (2.0 * (mass * stiffness).sqrt()))
}

/// Frequency at which a body moving at `v` meets wave component `w`.
pub fn encounter_frequency(w: &WaveComponent, v: f64, gravity: f64) -> f64 {
    w.omega() - w.direction() * w.omega() * w.omega() * v / gravity
}

/// Dynamic magnification minus one for a unit-amplitude forcing at frequency
/// ratio `ratio`.
pub fn magnification_excess(ratio: f64, mu: f64) -> f64 {
    let r2 = ratio * ratio;
    1.0 / ((1.0 - r2).powi(2) + (2.0 * mu * ratio).powi(2)).sqrt() - 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationPoint {
    pub v: f64,
    /// Encounter frequency per wave component.
    pub encounter: Vec<f64>,
    pub omega_b: f64,
    pub mu_b: f64,
    pub dh_amp: f64,
    /// Mean immersed depth `∀̄_im / (l_b w_b)`.
    pub h_im: f64,
    pub flyover: bool,
}

/// Elevation angle used at velocity `v`: `alpha` when towing forward of the
/// current, its supplement otherwise.
pub fn towing_angle(v: f64, alpha: f64, current: f64) -> f64 {
    if v >= current {
        alpha
    } else {
        PI - alpha
    }
}

/// Fly-over map over a velocity grid for one set of waves towed at
/// elevation `alpha` (front configuration; mirrored for reverse towing).
pub fn amplification_map(waves: &[WaveComponent], v_grid: &[f64], alpha: f64, sys: &System) -> Result<Vec<AmplificationPoint>> {
    let (omega_b, mu_b) = natural_frequency(&sys.buoy, &sys.env);
    let g = sys.env.gravity;
    let aw = sys.buoy.waterplane_area();
    v_grid
        .iter()
        .map(|&v| {
            let a = towing_angle(v, alpha, sys.env.current);
            let eq = equilibrium_point(v, a, sys, None)?;
            let encounter: Vec<f64> = waves.iter().map(|w| encounter_frequency(w, v, g)).collect();
            let dh_amp = waves
                .iter()
                .zip(&encounter)
                .map(|(w, we)| w.amplitude() * magnification_excess(we / omega_b, mu_b))
                .sum::<f64>();
            let h_im = eq.volume.max(0.0) / aw;
            Ok(AmplificationPoint {
                v,
                encounter,
                omega_b,
                mu_b,
                dh_amp,
                h_im,
                flyover: dh_amp > h_im,
            })
        })
        .collect()
}

/// Uniform grid `start, start + step, …` up to and including `end`.
pub fn velocity_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// Smallest speed along the towing direction (sign of `direction`) at which
/// the map flags fly-over.
pub fn flyover_onset(map: &[AmplificationPoint], direction: f64) -> Option<f64> {
    let mut pts: Vec<&AmplificationPoint> = map.iter().filter(|p| p.v * direction > 0.0).collect();
    pts.sort_by(|a, b| a.v.abs().total_cmp(&b.v.abs()));
    pts.into_iter().find(|p| p.flyover).map(|p| p.v)
}

/// Time-domain check of one map point: the buoy heave channel alone,
/// towed at constant surge speed `v` under the steady cable lift, with the
/// piecewise (nonlinear) buoyancy. Returns the first time the buoy leaves
/// the water after `settle` seconds, if it does.
pub fn heave_channel_flyover(
    waves: &[WaveComponent],
    v: f64,
    alpha: f64,
    sys: &System,
    duration: f64,
    settle: f64,
    dt: f64,
) -> Result<Option<f64>> {
    let a = towing_angle(v, alpha, sys.env.current);
    let eq = equilibrium_point(v, a, sys, None)?;
    let p = &sys.buoy;
    let env = Environment { waves: waves.to_vec(), ..sys.env.clone() };
    let g = env.gravity;
    let rho = env.water_density;
    let mass = p.mass_kg + p.added_mass_heave_kg;
    let lift = eq.tension * a.sin();
    let accel = |t: f64, z: f64, zd: f64| {
        let x = v * t;
        let dh = env.elevation(x, t) - z;
        let vol = buoy::immersed_volume(dh, p);
        if dh < -0.5 * p.height_m {
            (lift - p.mass_kg * g) / p.mass_kg
        } else {
            let zeta_rate = env.elevation_rate(x, t) - v * wave_slope(&env, x, t);
            (rho * g * vol + lift - p.mass_kg * g - p.damping_heave_ns_per_m * (zd - zeta_rate)) / mass
        }
    };
    let mut t = 0.0;
    let mut z = eq.z_b() + env.elevation(0.0, 0.0);
    let mut zd = 0.0;
    let steps = (duration / dt).round() as usize;
    for _ in 0..steps {
        let k1 = (zd, accel(t, z, zd));
        let k2 = (zd + 0.5 * dt * k1.1, accel(t + 0.5 * dt, z + 0.5 * dt * k1.0, zd + 0.5 * dt * k1.1));
        let k3 = (zd + 0.5 * dt * k2.1, accel(t + 0.5 * dt, z + 0.5 * dt * k2.0, zd + 0.5 * dt * k2.1));
        let k4 = (zd + dt * k3.1, accel(t + dt, z + dt * k3.0, zd + dt * k3.1));
        z += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        zd += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        t += dt;
        if !z.is_finite() {
            return Err(Error::NonFinite { t, detail: "heave channel diverged".into() });
        }
        if t > settle && env.elevation(v * t, t) - z < -0.5 * p.height_m {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn wave_slope(env: &Environment, x: f64, t: f64) -> f64 {
    env.waves
        .iter()
        .map(|w| -w.amplitude() * w.wave_number() * w.argument(x, t).cos())
        .sum()
}
