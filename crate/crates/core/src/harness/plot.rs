use std::fmt::Write as _;
use std::path::Path;

use super::trace::{Trace, TraceRow};
use crate::error::{Error, Result};

type Series = (&'static str, fn(&TraceRow) -> f64);

struct Panel {
    title: &'static str,
    series: &'static [Series],
}

const PANELS: &[Panel] = &[
    Panel {
        title: "buoy speed V (m/s)",
        series: &[("V", |r| r.vx_b_mps), ("target", |r| r.speed_target_mps)],
    },
    Panel {
        title: "cable span r (m)",
        series: &[("r", |r| r.r_m), ("r ref", |r| r.r_ref_m)],
    },
    Panel {
        title: "UAV altitude z_u (m)",
        series: &[("z_u", |r| r.z_u_m), ("ref", |r| r.elevation_ref_m)],
    },
    Panel {
        title: "elevation α (deg)",
        series: &[("α", |r| r.alpha_rad.to_degrees()), ("α ref", |r| r.alpha_ref_rad.to_degrees())],
    },
    Panel {
        title: "UAV pitch θ_u (deg)",
        series: &[("θ_u", |r| r.theta_u_rad.to_degrees()), ("θ_c", |r| r.theta_c_rad.to_degrees())],
    },
    Panel {
        title: "tension T (N)",
        series: &[("T", |r| r.tension_n)],
    },
    Panel {
        title: "immersed fraction",
        series: &[("∀_im/∀_b", |r| r.immersed_fraction)],
    },
    Panel {
        title: "thrust u1 (N)",
        series: &[("realized", |r| r.u1_n), ("command", |r| r.u1_cmd_n)],
    },
    Panel {
        title: "torque u2 (N·m)",
        series: &[("realized", |r| r.u2_nm), ("command", |r| r.u2_cmd_nm)],
    },
];

const COLORS: [&str; 2] = ["#1f5fa8", "#d2691e"];
const W: f64 = 900.0;
const H: f64 = 150.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 24.0;

fn bounds(rows: &[TraceRow], series: &[Series]) -> (f64, f64) {
    let (lo, hi) = rows
        .iter()
        .flat_map(|r| series.iter().map(move |(_, f)| f(r)))
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-6);
    (lo - pad, hi + pad)
}

/// Stacked time-series panels of a trace as a standalone SVG document.
pub fn render_svg(trace: &Trace) -> String {
    let rows = &trace.rows;
    let (t0, t1) = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if b.t_s > a.t_s => (a.t_s, b.t_s),
        _ => (0.0, 1.0),
    };
    let plot_w = W - LEFT - 20.0;
    let plot_h = H - TOP - 20.0;
    let total_h = H * PANELS.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{total_h}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in PANELS.iter().enumerate() {
        let y0 = i as f64 * H + TOP;
        let (lo, hi) = bounds(rows, panel.series);
        let px = |t: f64| LEFT + (t - t0) / (t1 - t0) * plot_w;
        let py = |v: f64| y0 + plot_h - (v - lo) / (hi - lo) * plot_h;
        let _ = writeln!(s, r#"<text x="{LEFT}" y="{:.1}" font-weight="bold">{}</text>"#, y0 - 8.0, panel.title);
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#999"/>"##
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{hi:.3}</text>"#, LEFT - 4.0, y0 + 10.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{lo:.3}</text>"#, LEFT - 4.0, y0 + plot_h);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">t = {t1:.1} s</text>"#,
            LEFT + plot_w,
            y0 + plot_h + 14.0
        );
        for (j, (name, f)) in panel.series.iter().enumerate() {
            let color = COLORS[j % COLORS.len()];
            let mut pts = String::new();
            for r in rows.iter().filter(|r| f(r).is_finite()) {
                let _ = write!(pts, "{:.2},{:.2} ", px(r.t_s), py(f(r)));
            }
            let dash = if j > 0 { r#" stroke-dasharray="5,3""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash} points="{}"/>"#,
                pts.trim_end()
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" fill="{color}">{name}</text>"#,
                LEFT + plot_w - 140.0 + 70.0 * j as f64,
                y0 - 8.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn save_svg(trace: &Trace, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(trace)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
