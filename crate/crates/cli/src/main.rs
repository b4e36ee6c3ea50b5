use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use buoytow::controller::ControllerKind;
use buoytow::equilibrium::{self, FixedPoint, Margins};
use buoytow::harness::{self, plot, ScenarioConfig, Trace};
use buoytow::Error;

#[derive(Parser)]
#[command(name = "buoytow", version, about = "Tethered UAV buoy-towing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Svcs,
    Cbnc,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a built-in preset (c1, c2, c3, c4).
    Run {
        scenario: String,
        #[arg(long, value_enum)]
        controller: Option<Kind>,
        #[arg(long)]
        seed: Option<u64>,
        /// Integration step in seconds.
        #[arg(long)]
        dt: Option<f64>,
        /// Simulated time in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Directory for trace.csv, metrics.toml and trace.svg.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Abort on the first constraint violation.
        #[arg(long)]
        halt: bool,
    },
    /// Steady-state analysis: natural frequency, admissible velocities and
    /// the fly-over map for the scenario's waves.
    Analyze {
        #[arg(default_value = "c1")]
        scenario: String,
        #[arg(long, default_value_t = 45.0)]
        alpha_deg: f64,
        #[arg(long, default_value_t = -15.0)]
        v_min: f64,
        #[arg(long, default_value_t = 15.0)]
        v_max: f64,
        #[arg(long, default_value_t = 0.05)]
        v_step: f64,
        /// Write the amplification map as CSV.
        #[arg(long)]
        map_csv: Option<PathBuf>,
    },
    /// Render a trace CSV as stacked SVG panels.
    Plot {
        trace: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print a scenario (preset or file) as TOML.
    Show { scenario: String },
}

fn load_scenario(arg: &str) -> anyhow::Result<ScenarioConfig> {
    let path = Path::new(arg);
    if path.exists() {
        Ok(ScenarioConfig::load(path)?)
    } else {
        ScenarioConfig::preset(arg).with_context(|| format!("{arg} is neither a file nor a preset"))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConstraintAbort { .. } => 2,
        Error::NonFinite { .. } | Error::Singular(_) | Error::NoConvergence { .. } => 3,
        _ => 1,
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn run(
    scenario: &str,
    controller: Option<Kind>,
    seed: Option<u64>,
    dt: Option<f64>,
    duration: Option<f64>,
    out: Option<PathBuf>,
    halt: bool,
) -> anyhow::Result<u8> {
    let mut cfg = load_scenario(scenario)?;
    if let Some(k) = controller {
        cfg.controller.kind = match k {
            Kind::Svcs => ControllerKind::Svcs,
            Kind::Cbnc => ControllerKind::Cbnc,
        };
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(dt) = dt {
        cfg.dt_s = dt;
        cfg.control_period_s = cfg.control_period_s.max(dt);
        cfg.control_period_s = (cfg.control_period_s / dt).round() * dt;
    }
    if let Some(d) = duration {
        cfg.duration_s = d;
    }
    if halt {
        cfg.on_constraint = harness::ConstraintPolicy::Halt;
    }
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        cfg.output.trace_csv = Some(dir.join("trace.csv"));
        cfg.output.plot_svg = Some(dir.join("trace.svg"));
    }

    let report = harness::run_scenario(&cfg)?;
    if let Some(p) = &cfg.output.trace_csv {
        report.trace.save(p)?;
    }
    if let Some(p) = &cfg.output.plot_svg {
        plot::save_svg(&report.trace, p)?;
    }
    if let Some(dir) = &out {
        let text = toml::to_string(&report.metrics).context("serializing metrics")?;
        write_file(&dir.join("metrics.toml"), &text)?;
    }

    let m = &report.metrics;
    println!("scenario            {} ({:?})", cfg.name, cfg.controller.kind);
    println!("samples             {}", m.samples);
    println!("speed error         {:.2} cm/s (max {:.1})", m.speed_error_cms, m.max_speed_error_cms);
    println!("altitude error      {:.2} cm (max {:.1})", m.altitude_error_cm, m.max_altitude_error_cm);
    println!("energy              {:.2} kJ", m.energy_kj);
    println!("decouple / couple   {} / {}", report.transitions.decouple, report.transitions.couple);
    println!("min immersed frac   {:.4}", m.min_immersed_fraction);
    println!("hanging-risk rows   {}", m.hanging_risk_samples);
    println!("thrust-gate rows    {}", m.thrust_gate_samples);
    match m.first_airborne {
        Some(a) => println!("first airborne      t = {:.2} s at V = {:.3} m/s", a.t_s, a.speed_mps),
        None => println!("first airborne      none"),
    }
    Ok(match &report.failure {
        Some(e) => {
            eprintln!("run stopped: {e}");
            exit_code(e)
        }
        None => 0,
    })
}

fn analyze(scenario: &str, alpha_deg: f64, v_min: f64, v_max: f64, v_step: f64, map_csv: Option<PathBuf>) -> anyhow::Result<u8> {
    let cfg = load_scenario(scenario)?;
    let sys = cfg.system()?;
    let alpha = alpha_deg.to_radians();
    let (w, mu) = equilibrium::natural_frequency(&sys.buoy, &sys.env);
    println!("heave natural frequency  {w:.4} rad/s (damping ratio {mu:.4})");

    let margins = Margins { thrust_fraction: cfg.thrust_margin, ..Margins::default() };
    let fp = FixedPoint::default();
    let front = equilibrium::velocity_bounds(alpha, &sys, &margins, &fp)?;
    let rear = equilibrium::velocity_bounds(std::f64::consts::PI - alpha, &sys, &margins, &fp)?;
    println!(
        "admissible velocities    ({:.3}, {:.3}) U ({:.3}, {:.3}) m/s at alpha = {alpha_deg} deg, U_c = {}",
        rear.lower, rear.upper, front.lower, front.upper, sys.env.current
    );

    if sys.env.waves.is_empty() {
        println!("no waves in scenario; fly-over map skipped");
        return Ok(0);
    }
    let grid = equilibrium::velocity_grid(v_min, v_max, v_step);
    let map = equilibrium::amplification_map(&sys.env.waves, &grid, alpha, &sys)?;
    for (label, dir) in [("forward", 1.0), ("reverse", -1.0)] {
        match equilibrium::flyover_onset(&map, dir) {
            Some(v) => println!("fly-over onset {label:8}  {v:.3} m/s"),
            None => println!("fly-over onset {label:8}  none in grid"),
        }
    }
    if let Some(path) = map_csv {
        let mut text = String::from("v_mps,dh_amp_m,h_im_m,flyover\n");
        for p in &map {
            text.push_str(&format!("{},{},{},{}\n", p.v, p.dh_amp, p.h_im, p.flyover));
        }
        write_file(&path, &text)?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { scenario, controller, seed, dt, duration, out, halt } => {
            run(&scenario, controller, seed, dt, duration, out, halt)
        }
        Command::Analyze { scenario, alpha_deg, v_min, v_max, v_step, map_csv } => {
            analyze(&scenario, alpha_deg, v_min, v_max, v_step, map_csv)
        }
        Command::Plot { trace, out } => (|| {
            let t = Trace::load(&trace)?;
            let out = out.unwrap_or_else(|| trace.with_extension("svg"));
            plot::save_svg(&t, &out)?;
            println!("wrote {}", out.display());
            Ok(0)
        })(),
        Command::Show { scenario } => (|| {
            print!("{}", load_scenario(&scenario)?.to_toml_string()?);
            Ok(0)
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Error>().map_or(1, exit_code);
            ExitCode::from(code)
        }
    }
}
