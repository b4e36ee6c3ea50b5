use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controller::{Configuration, Mode};
use crate::error::{Error, Result};

/// One logged sample. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TraceRow {
    pub t_s: f64,
    pub coupled: bool,
    pub mode: Option<Mode>,
    pub configuration: Option<Configuration>,
    pub x_b_m: f64,
    pub z_b_m: f64,
    pub theta_b_rad: f64,
    pub vx_b_mps: f64,
    pub vz_b_mps: f64,
    pub omega_b_rps: f64,
    pub x_u_m: f64,
    pub z_u_m: f64,
    pub theta_u_rad: f64,
    pub vx_u_mps: f64,
    pub vz_u_mps: f64,
    pub omega_u_rps: f64,
    pub r_m: f64,
    pub alpha_rad: f64,
    pub tension_n: f64,
    pub immersed_fraction: f64,
    pub u1_cmd_n: f64,
    pub u2_cmd_nm: f64,
    pub u1_n: f64,
    pub u2_nm: f64,
    pub speed_setpoint_mps: f64,
    pub speed_target_mps: f64,
    pub speed_ref_mps: f64,
    pub elevation_ref_m: f64,
    pub alpha_ref_rad: f64,
    pub r_ref_m: f64,
    pub theta_c_rad: f64,
    pub tension_ff_n: f64,
    pub delta_hat_r: f64,
    pub delta_hat_alpha: f64,
    pub delta_hat_theta: f64,
    pub hanging_risk: bool,
    pub airborne: bool,
    pub thrust_gate: bool,
    pub fb_x_u_m: f64,
    pub fb_z_u_m: f64,
    pub fb_theta_u_rad: f64,
    pub fb_r_m: f64,
    pub fb_alpha_rad: f64,
}

pub const COLUMNS: [&str; 43] = [
    "t_s",
    "coupled",
    "mode",
    "configuration",
    "x_b_m",
    "z_b_m",
    "theta_b_rad",
    "vx_b_mps",
    "vz_b_mps",
    "omega_b_rps",
    "x_u_m",
    "z_u_m",
    "theta_u_rad",
    "vx_u_mps",
    "vz_u_mps",
    "omega_u_rps",
    "r_m",
    "alpha_rad",
    "tension_n",
    "immersed_fraction",
    "u1_cmd_n",
    "u2_cmd_nm",
    "u1_n",
    "u2_nm",
    "speed_setpoint_mps",
    "speed_target_mps",
    "speed_ref_mps",
    "elevation_ref_m",
    "alpha_ref_rad",
    "r_ref_m",
    "theta_c_rad",
    "tension_ff_n",
    "delta_hat_r",
    "delta_hat_alpha",
    "delta_hat_theta",
    "hanging_risk",
    "airborne",
    "thrust_gate",
    "fb_x_u_m",
    "fb_z_u_m",
    "fb_theta_u_rad",
    "fb_r_m",
    "fb_alpha_rad",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn write_to<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: R) -> std::result::Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(input);
        let rows = r.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(std::io::BufWriter::new(file)).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_from(std::io::BufReader::new(file)).map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        let mut a = TraceRow {
            t_s: 0.01,
            coupled: true,
            mode: Some(Mode::Pulling),
            configuration: Some(Configuration::Rear),
            x_b_m: -1.0 / 3.0,
            tension_n: 12.345678901234567,
            hanging_risk: true,
            ..Default::default()
        };
        a.fb_alpha_rad = std::f64::consts::PI * 1e-17;
        let b = TraceRow { t_s: 0.02, u1_n: 17.658, ..Default::default() };
        Trace { rows: vec![a, b] }
    }

    #[test]
    fn empty_trace_is_header_only() {
        let text = Trace::default().to_csv_string();
        assert_eq!(text, format!("{}\n", COLUMNS.join(",")));
        assert_eq!(Trace::read_from(text.as_bytes()).unwrap(), Trace::default());
    }

    #[test]
    fn header_matches_field_order() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(TraceRow::default()).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let t = sample();
        let text = t.to_csv_string();
        assert_eq!(Trace::read_from(text.as_bytes()).unwrap(), t);
        assert!(text.contains("pulling,rear"));
    }

    #[test]
    fn file_round_trip_and_path_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        sample().save(&path).unwrap();
        assert_eq!(Trace::load(&path).unwrap(), sample());
        let missing = dir.path().join("nope/trace.csv");
        let err = Trace::load(&missing).unwrap_err().to_string();
        assert!(err.contains("nope"), "{err}");
    }
}
