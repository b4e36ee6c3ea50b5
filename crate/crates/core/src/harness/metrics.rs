use serde::{Deserialize, Serialize};

use super::trace::Trace;

/// First sample at which the buoy has no immersed volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirborneEvent {
    pub t_s: f64,
    pub speed_mps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub samples: usize,
    /// Mean absolute buoy speed error against the smoothed speed target.
    pub speed_error_cms: f64,
    /// Mean absolute UAV altitude error.
    pub altitude_error_cm: f64,
    pub max_speed_error_cms: f64,
    pub max_altitude_error_cm: f64,
    /// Rotor energy from momentum theory, `∫ u1^{3/2} / sqrt(2 ρ_a A) dt`.
    pub energy_kj: f64,
    pub first_airborne: Option<AirborneEvent>,
    pub hanging_risk_samples: usize,
    pub thrust_gate_samples: usize,
    pub min_immersed_fraction: f64,
}

/// Momentum-theory rotor power for total thrust `u1`.
pub fn rotor_power(u1: f64, air_density: f64, disk_area: f64) -> f64 {
    u1.max(0.0).powf(1.5) / (2.0 * air_density * disk_area).sqrt()
}

impl MetricsReport {
    /// Summarises a trace sampled every `sample_dt` seconds.
    pub fn from_trace(trace: &Trace, sample_dt: f64, disk_area: f64, air_density: f64) -> Self {
        let rows = &trace.rows;
        if rows.is_empty() {
            return Self::default();
        }
        let n = rows.len() as f64;
        let mut m = Self {
            samples: rows.len(),
            min_immersed_fraction: f64::INFINITY,
            ..Self::default()
        };
        let (mut sv, mut sz, mut e) = (0.0, 0.0, 0.0);
        for r in rows {
            let ev = (r.vx_b_mps - r.speed_target_mps).abs() * 100.0;
            let ez = (r.z_u_m - r.elevation_ref_m).abs() * 100.0;
            sv += ev;
            sz += ez;
            m.max_speed_error_cms = m.max_speed_error_cms.max(ev);
            m.max_altitude_error_cm = m.max_altitude_error_cm.max(ez);
            e += rotor_power(r.u1_n, air_density, disk_area) * sample_dt;
            if r.airborne && m.first_airborne.is_none() {
                m.first_airborne = Some(AirborneEvent { t_s: r.t_s, speed_mps: r.vx_b_mps });
            }
            m.hanging_risk_samples += r.hanging_risk as usize;
            m.thrust_gate_samples += r.thrust_gate as usize;
            m.min_immersed_fraction = m.min_immersed_fraction.min(r.immersed_fraction);
        }
        m.speed_error_cms = sv / n;
        m.altitude_error_cm = sz / n;
        m.energy_kj = e / 1000.0;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::trace::TraceRow;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfect_tracking_is_zero_error() {
        let rows = (0..100)
            .map(|i| TraceRow {
                t_s: i as f64 * 0.01,
                vx_b_mps: 2.0,
                speed_target_mps: 2.0,
                z_u_m: 5.0,
                elevation_ref_m: 5.0,
                immersed_fraction: 0.25,
                ..Default::default()
            })
            .collect();
        let m = MetricsReport::from_trace(&Trace { rows }, 0.01, 0.5, 1.22);
        assert_eq!(m.speed_error_cms, 0.0);
        assert_eq!(m.altitude_error_cm, 0.0);
        assert_eq!(m.first_airborne, None);
        assert_eq!(m.min_immersed_fraction, 0.25);
    }

    #[test]
    fn hover_energy_over_ten_seconds() {
        let hover = 1.8 * 9.81;
        let rows = (0..1000)
            .map(|i| TraceRow { t_s: i as f64 * 0.01, u1_n: hover, ..Default::default() })
            .collect();
        let m = MetricsReport::from_trace(&Trace { rows }, 0.01, 0.5, 1.22);
        let expected = 17.658f64.powf(1.5) / (2.0f64 * 1.22 * 0.5).sqrt() * 10.0;
        assert_abs_diff_eq!(expected, 672.0, epsilon = 0.5);
        assert_abs_diff_eq!(m.energy_kj * 1000.0, expected, epsilon = 1e-9);
    }

    #[test]
    fn errors_and_airborne_event() {
        let rows = vec![
            TraceRow { t_s: 0.0, vx_b_mps: 1.1, speed_target_mps: 1.0, z_u_m: 5.2, elevation_ref_m: 5.0, ..Default::default() },
            TraceRow { t_s: 0.01, vx_b_mps: 0.7, speed_target_mps: 1.0, z_u_m: 5.0, elevation_ref_m: 5.0, airborne: true, ..Default::default() },
            TraceRow { t_s: 0.02, vx_b_mps: 0.5, airborne: true, ..Default::default() },
        ];
        let m = MetricsReport::from_trace(&Trace { rows }, 0.01, 0.5, 1.22);
        assert_abs_diff_eq!(m.speed_error_cms, (10.0 + 30.0 + 50.0) / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.max_altitude_error_cm, 20.0, epsilon = 1e-9);
        assert_eq!(m.first_airborne, Some(AirborneEvent { t_s: 0.01, speed_mps: 0.7 }));
    }
}
