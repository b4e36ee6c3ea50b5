//! Planar quadrotor: rigid-body dynamics, horizontal air drag and a
//! saturating first-order actuator.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::environment::Environment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UavParams {
    pub mass_kg: f64,
    pub inertia_pitch_kgm2: f64,
    pub drag_coeff: f64,
    pub frontal_area_m2: f64,
    pub drag_vertical_ns_per_m: f64,
    pub drag_pitch_nms: f64,
    pub motor_time_constant_s: f64,
    pub thrust_max_n: f64,
    pub torque_max_nm: f64,
    pub pitch_max_rad: f64,
}

impl Default for UavParams {
    fn default() -> Self {
        Self {
            mass_kg: 1.8,
            inertia_pitch_kgm2: 0.03,
            drag_coeff: 1.0,
            frontal_area_m2: 0.05,
            drag_vertical_ns_per_m: 0.1,
            drag_pitch_nms: 0.0,
            motor_time_constant_s: 0.05,
            thrust_max_n: 160.0,
            torque_max_nm: 11.2,
            pitch_max_rad: std::f64::consts::FRAC_PI_4,
        }
    }
}

impl UavParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass_kg", self.mass_kg),
            ("inertia_pitch_kgm2", self.inertia_pitch_kgm2),
            ("motor_time_constant_s", self.motor_time_constant_s),
            ("thrust_max_n", self.thrust_max_n),
            ("torque_max_nm", self.torque_max_nm),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("uav {name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("drag_coeff", self.drag_coeff),
            ("frontal_area_m2", self.frontal_area_m2),
            ("drag_vertical_ns_per_m", self.drag_vertical_ns_per_m),
            ("drag_pitch_nms", self.drag_pitch_nms),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("uav {name} must be >= 0, got {v}")));
            }
        }
        if !(self.pitch_max_rad > 0.0 && self.pitch_max_rad < FRAC_PI_2) {
            return Err(Error::Config(format!(
                "uav pitch_max_rad must lie in (0, pi/2), got {}",
                self.pitch_max_rad
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UavState {
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub vx: f64,
    pub vz: f64,
    pub omega: f64,
}

/// Total thrust `u1` (N) and pitch torque `u2` (N·m).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    pub u1: f64,
    pub u2: f64,
}

impl ControlCommand {
    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    pub fn saturate(self, p: &UavParams) -> Self {
        Self {
            u1: self.u1.clamp(0.0, p.thrust_max_n),
            u2: self.u2.clamp(-p.torque_max_nm, p.torque_max_nm),
        }
    }
}

/// Continuous-time actuator derivative: saturate, then first-order lag.
pub fn actuator_rate(cmd: ControlCommand, realized: ControlCommand, p: &UavParams) -> ControlCommand {
    let target = cmd.saturate(p);
    let k = 1.0 / p.motor_time_constant_s;
    ControlCommand {
        u1: k * (target.u1 - realized.u1),
        u2: k * (target.u2 - realized.u2),
    }
}

/// One explicit Euler step of the actuator filter.
pub fn actuator_update(cmd: ControlCommand, realized: ControlCommand, dt: f64, p: &UavParams) -> Result<ControlCommand> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let rate = actuator_rate(cmd, realized, p);
    Ok(ControlCommand {
        u1: realized.u1 + dt * rate.u1,
        u2: realized.u2 + dt * rate.u2,
    })
}

/// Aerodynamic force on the UAV `(F_x, F_z)`: quadratic horizontal drag
/// against the wind, linear vertical drag.
pub fn drag_force(vx: f64, vz: f64, env: &Environment, p: &UavParams) -> (f64, f64) {
    let rel = vx - env.wind;
    let d1 = p.drag_coeff * p.frontal_area_m2 * 0.5 * env.air_density * rel.abs();
    (-d1 * rel, -p.drag_vertical_ns_per_m * vz)
}

/// Free UAV acceleration `[ẍ_u, z̈_u, θ̈_u]` with the cable pulling back
/// along `alpha` with `tension`.
pub fn uav_accel_decoupled(
    state: &UavState,
    env: &Environment,
    tension: f64,
    alpha: f64,
    u: ControlCommand,
    p: &UavParams,
) -> Result<Vector3<f64>> {
    if !(tension >= 0.0) {
        return Err(Error::Domain(format!("tension must be >= 0, got {tension}")));
    }
    let (fx, fz) = drag_force(state.vx, state.vz, env, p);
    let (s, c) = state.theta.sin_cos();
    let m = p.mass_kg;
    Ok(Vector3::new(
        (u.u1 * s - tension * alpha.cos() + fx) / m,
        (u.u1 * c - tension * alpha.sin() + fz) / m - env.gravity,
        (u.u2 - p.drag_pitch_nms * state.omega) / p.inertia_pitch_kgm2,
    ))
}
