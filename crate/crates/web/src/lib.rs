use std::f64::consts::PI;

use wasm_bindgen::prelude::*;

use buoytow::controller::ControllerKind;
use buoytow::coupled::System;
use buoytow::environment::Environment;
use buoytow::equilibrium::{self, FixedPoint, Margins};
use buoytow::harness::{self, plot, ScenarioConfig};

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Admissible steady speeds `[rear_lo, rear_hi, front_lo, front_hi]` in m/s
/// for a cable elevation in degrees and a surface current in m/s.
#[wasm_bindgen]
pub fn velocity_bounds(alpha_deg: f64, current_mps: f64) -> Result<Vec<f64>, JsError> {
    let sys = System::new(Environment::calm().with_current(current_mps));
    let a = alpha_deg.to_radians();
    let (m, fp) = (Margins::default(), FixedPoint::default());
    let front = equilibrium::velocity_bounds(a, &sys, &m, &fp).map_err(js_err)?;
    let rear = equilibrium::velocity_bounds(PI - a, &sys, &m, &fp).map_err(js_err)?;
    Ok(vec![rear.lower, rear.upper, front.lower, front.upper])
}

/// Heave amplification over a speed grid for a preset's waves, flattened as
/// `[v, Δh_amp, h_im, flyover]` per grid point.
#[wasm_bindgen]
pub fn flyover_map(preset: &str, alpha_deg: f64, v_max: f64) -> Result<Vec<f64>, JsError> {
    let cfg = ScenarioConfig::preset(preset).map_err(js_err)?;
    let sys = cfg.system().map_err(js_err)?;
    let grid = equilibrium::velocity_grid(-v_max, v_max, 0.05);
    let map = equilibrium::amplification_map(&sys.env.waves, &grid, alpha_deg.to_radians(), &sys).map_err(js_err)?;
    Ok(map
        .iter()
        .flat_map(|p| [p.v, p.dh_amp, p.h_im, if p.flyover { 1.0 } else { 0.0 }])
        .collect())
}

#[wasm_bindgen]
pub struct RunSummary {
    speed_error_cms: f64,
    altitude_error_cm: f64,
    energy_kj: f64,
    svg: String,
}

#[wasm_bindgen]
impl RunSummary {
    #[wasm_bindgen(getter)]
    pub fn speed_error_cms(&self) -> f64 {
        self.speed_error_cms
    }

    #[wasm_bindgen(getter)]
    pub fn altitude_error_cm(&self) -> f64 {
        self.altitude_error_cm
    }

    #[wasm_bindgen(getter)]
    pub fn energy_kj(&self) -> f64 {
        self.energy_kj
    }

    #[wasm_bindgen(getter)]
    pub fn svg(&self) -> String {
        self.svg.clone()
    }
}

/// Runs a preset with `"svcs"` or `"cbnc"` and returns its metrics and
/// trace plot.
#[wasm_bindgen]
pub fn run_preset(preset: &str, controller: &str, seed: u64) -> Result<RunSummary, JsError> {
    let kind = match controller {
        "svcs" => ControllerKind::Svcs,
        "cbnc" => ControllerKind::Cbnc,
        other => return Err(JsError::new(&format!("unknown controller {other:?}"))),
    };
    let mut cfg = ScenarioConfig::preset(preset).map_err(js_err)?.with_controller(kind);
    cfg.seed = seed;
    let report = harness::run_scenario(&cfg).map_err(js_err)?;
    if let Some(e) = report.failure {
        return Err(js_err(e));
    }
    let m = report.metrics;
    Ok(RunSummary {
        speed_error_cms: m.speed_error_cms,
        altitude_error_cm: m.altitude_error_cm,
        energy_kj: m.energy_kj,
        svg: plot::render_svg(&report.trace),
    })
}
