//! Command-line surface. Every subcommand validates its configuration,
//! computes through the library, and writes one deterministic CSV/JSON table
//! (plus optional SVG). Exit codes: 0 success, 1 failed validation or I/O,
//! 2 configuration/domain error, 3 infeasible protocol.

use crate::bloch::{flux_field, BlochVector, FluxGridSpec, Trajectory};
use crate::error::Error;
use crate::maps::{
    cp_audit, propagate_fixed_dissipator, simulate, ControlProtocol, Mode, Pulse,
};
use crate::optimizer::{self, DEFAULT_CBAR_STEPS};
use crate::oracle::DiscretizedEnv;
use crate::report::{write_atomic, Cell, Format, Table};
use crate::spectral::SpectralParams;
use crate::svg;
use crate::{bloch::Axis, numerics::wrap_angle};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable naming the directory for default output paths.
pub const OUT_DIR_ENV: &str = "DEPHASE_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "dephase",
    version,
    about = "Non-Markovian dephasing qubit under instantaneous control: kernels, flux fields, trajectories, CP audits, pulse optimization and a discretized-bath cross-check",
    after_help = "Times are in units of the inverse bath cutoff frequency, angles in radians.\n\
                  When --out is omitted, files land in $DEPHASE_OUT_DIR (or the working directory)."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the decay rate, decoherence function and phase generator.
    /// Rows for the exact rate zero crossings are merged into the grid.
    Rate(RateArgs),
    /// Snapshot of the purity flux over the x-z disc at one time.
    FluxField(FluxFieldArgs),
    /// Bloch trajectory under the chosen propagation picture(s).
    Trajectory(TrajectoryArgs),
    /// Complete-positivity audit of the controlled dynamics over a horizon.
    CpAudit(CpAuditArgs),
    /// Per-s sweep of the single-pulse protocol (controlled vs uncontrolled
    /// average coherence).
    Sweep(SweepArgs),
    /// Cross-validate closed-form kernels and the controlled propagator
    /// against the discretized-bath oracle.
    OracleValidate(OracleValidateArgs),
    /// Report how the protocol responds to the dephasing interval T.
    TScan(TScanArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl FormatArg {
    fn to_format(self) -> Format {
        match self {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            FormatArg::Csv => "csv",
            FormatArg::Json => "json",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Uncontrolled,
    Fixed,
    Microscopic,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Y,
    Z,
}

impl AxisArg {
    fn to_axis(self) -> Axis {
        match self {
            AxisArg::Y => Axis::Y,
            AxisArg::Z => Axis::Z,
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file (default: <subcommand>.<format> in $DEPHASE_OUT_DIR or cwd)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

impl OutArgs {
    fn resolve(&self, default_stem: &str) -> PathBuf {
        match &self.out {
            Some(p) => p.clone(),
            None => {
                let name = format!("{default_stem}.{}", self.format.extension());
                match std::env::var_os(OUT_DIR_ENV) {
                    Some(dir) => PathBuf::from(dir).join(name),
                    None => PathBuf::from(name),
                }
            }
        }
    }
}

#[derive(Args)]
struct RateArgs {
    /// Ohmicity exponent, 1 < s <= 8
    #[arg(long)]
    s: f64,
    #[arg(long = "t-max", default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct FluxFieldArgs {
    #[arg(long)]
    s: f64,
    /// Snapshot time
    #[arg(long)]
    t: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 41)]
    resolution: usize,
    /// Half-width of the grid, in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    extent: f64,
    /// Also write an SVG rendering here
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long)]
    s: f64,
    #[arg(long, value_enum, default_value = "fixed")]
    mode: ModeArg,
    /// Initial polar angle: the state starts at (sin phi, 0, cos phi)
    #[arg(long = "phi-in", default_value_t = std::f64::consts::FRAC_PI_2)]
    phi_in: f64,
    /// Pulse instant; omit for pulse-free evolution
    #[arg(long = "pulse-time")]
    pulse_time: Option<f64>,
    /// Pulse angle in radians; omitted = rotate the state onto the equator
    #[arg(long = "pulse-angle")]
    pulse_angle: Option<f64>,
    #[arg(long = "pulse-axis", value_enum, default_value = "y")]
    pulse_axis: AxisArg,
    #[arg(long = "t-max", default_value_t = 30.0)]
    t_max: f64,
    #[arg(long, default_value_t = 3000)]
    steps: usize,
    /// Also write an SVG of the x-z projection here
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CpAuditArgs {
    #[arg(long)]
    s: f64,
    /// Pulse instant; omit to audit the uncontrolled map
    #[arg(long = "pulse-time")]
    pulse_time: Option<f64>,
    /// Pulse angle; omitted = rotate-to-equator for the phi-in state
    #[arg(long = "pulse-angle")]
    pulse_angle: Option<f64>,
    /// Initial polar angle used when deriving the rotate-to-equator angle
    #[arg(long = "phi-in", default_value_t = 0.2 * std::f64::consts::PI)]
    phi_in: f64,
    #[arg(long = "t-max", default_value_t = 30.0)]
    t_max: f64,
    #[arg(long, default_value_t = 300)]
    steps: usize,
    /// Initial pure states sampled on a deterministic sphere lattice
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long = "s-min", default_value_t = 2.5)]
    s_min: f64,
    #[arg(long = "s-max", default_value_t = 6.0)]
    s_max: f64,
    #[arg(long = "s-steps", default_value_t = 8)]
    s_steps: usize,
    /// Horizon used when the decay rate has no second zero crossing
    #[arg(long = "default-T", alias = "default-t", default_value_t = 30.0)]
    default_t: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OracleValidateArgs {
    #[arg(long)]
    s: f64,
    #[arg(long = "n-modes", default_value_t = 2000)]
    n_modes: usize,
    #[arg(long = "omega-max", default_value_t = 50.0)]
    omega_max: f64,
    /// Pulse instant (default: the first rate zero crossing)
    #[arg(long = "pulse-time")]
    pulse_time: Option<f64>,
    /// Pulse angle in radians (default 0.3 pi)
    #[arg(long = "pulse-angle", default_value_t = 0.3 * std::f64::consts::PI)]
    pulse_angle: f64,
    /// Initial polar angle of the compared state
    #[arg(long = "phi-in", default_value_t = std::f64::consts::FRAC_PI_3)]
    phi_in: f64,
    #[arg(long = "t-max", default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 40)]
    steps: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct TScanArgs {
    #[arg(long)]
    s: f64,
    #[arg(long = "t-min", default_value_t = 5.0)]
    t_min: f64,
    #[arg(long = "t-max", default_value_t = 50.0)]
    t_max: f64,
    #[arg(long = "t-steps", default_value_t = 10)]
    t_steps: usize,
    #[command(flatten)]
    out: OutArgs,
}

/// Parse arguments and run; the binary's whole body.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Rate(a) => cmd_rate(a),
        Cmd::FluxField(a) => cmd_flux_field(a),
        Cmd::Trajectory(a) => cmd_trajectory(a),
        Cmd::CpAudit(a) => cmd_cp_audit(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::OracleValidate(a) => cmd_oracle_validate(a),
        Cmd::TScan(a) => cmd_t_scan(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dephase: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_)
        | Error::Config(_)
        | Error::Input(_)
        | Error::UnsupportedProtocol(_)
        | Error::SingularState { .. } => 2,
        Error::NoCrossing { .. } | Error::HorizonTooShort { .. } | Error::Infeasible(_) => 3,
        Error::Io(_) => 1,
    }
}

fn cmd_rate(a: RateArgs) -> crate::error::Result<ExitCode> {
    if a.steps == 0 || !(a.t_max > 0.0) {
        return Err(Error::Config("rate table needs steps >= 1 and t-max > 0".into()));
    }
    let params = SpectralParams::new(a.s)?;
    let mut times: Vec<f64> = (0..=a.steps)
        .map(|i| i as f64 * a.t_max / a.steps as f64)
        .collect();
    // merge the exact roots so the table shows the sign changes themselves
    for root in params.rate_zero_crossings() {
        if root < a.t_max && times.iter().all(|&t| (t - root).abs() > 1e-12) {
            times.push(root);
        }
    }
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut table = Table::new(vec!["t", "gamma", "big_gamma", "tilde_gamma"]);
    for &t in &times {
        let k = params.kernel_sample(t)?;
        table.push(vec![
            Cell::Float(k.t),
            Cell::Float(k.gamma),
            Cell::Float(k.big_gamma),
            Cell::Float(k.tilde_gamma),
        ]);
    }
    let path = a.out.resolve("rate");
    table.write(&path, a.out.format.to_format())?;
    println!("wrote {} rows to {}", table.n_rows(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_flux_field(a: FluxFieldArgs) -> crate::error::Result<ExitCode> {
    let params = SpectralParams::new(a.s)?;
    let grid = FluxGridSpec { extent: a.extent, resolution: a.resolution };
    let samples = flux_field(&grid, a.t, &params)?;
    let mut table = Table::new(vec!["rx", "rz", "flux"]);
    for s in &samples {
        table.push(vec![Cell::Float(s.rx), Cell::Float(s.rz), Cell::Float(s.flux)]);
    }
    let path = a.out.resolve("flux_field");
    table.write(&path, a.out.format.to_format())?;
    if let Some(svg_path) = &a.svg {
        write_atomic(svg_path, svg::flux_field_svg(&samples, a.extent, a.resolution).as_bytes())?;
    }
    println!(
        "wrote {} grid points to {} (gamma({}) = {})",
        table.n_rows(),
        path.display(),
        a.t,
        params.decay_rate(a.t)?
    );
    Ok(ExitCode::SUCCESS)
}

/// Build the protocol for trajectory-like commands. An omitted angle means
/// "rotate the fixed-dissipator state at the pulse instant onto the equator".
fn build_protocol(
    params: &SpectralParams,
    phi_in: f64,
    pulse_time: Option<f64>,
    pulse_angle: Option<f64>,
    axis: Axis,
) -> crate::error::Result<ControlProtocol> {
    let Some(tp) = pulse_time else {
        return Ok(ControlProtocol::uncontrolled());
    };
    let angle = match pulse_angle {
        Some(a) => a,
        None => {
            if axis != Axis::Y {
                return Err(Error::Config(
                    "rotate-to-equator needs a y pulse; give --pulse-angle explicitly".into(),
                ));
            }
            let pre = propagate_fixed_dissipator(
                BlochVector::from_polar(phi_in),
                &ControlProtocol::uncontrolled(),
                tp,
                params,
            );
            pre.rz.atan2(pre.rx)
        }
    };
    ControlProtocol::new(vec![Pulse { time: tp, axis, angle }])
}

fn trajectory_table(traj: &Trajectory) -> Table {
    let mut table = Table::new(vec!["t", "rx", "ry", "rz", "purity", "coherence", "inside_ball"]);
    for &(t, r) in traj.samples() {
        table.push(vec![
            Cell::Float(t),
            Cell::Float(r.rx),
            Cell::Float(r.ry),
            Cell::Float(r.rz),
            Cell::Float(r.purity()),
            Cell::Float(r.coherence()),
            Cell::Bool(r.is_physical(1e-9)),
        ]);
    }
    table
}

fn with_suffix(path: &PathBuf, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn cmd_trajectory(a: TrajectoryArgs) -> crate::error::Result<ExitCode> {
    let params = SpectralParams::new(a.s)?;
    let protocol = build_protocol(
        &params,
        a.phi_in,
        a.pulse_time,
        a.pulse_angle,
        a.pulse_axis.to_axis(),
    )?;
    let r0 = BlochVector::from_polar(a.phi_in);
    let modes: Vec<(Mode, &str)> = match a.mode {
        ModeArg::Uncontrolled => vec![(Mode::Uncontrolled, "uncontrolled")],
        ModeArg::Fixed => vec![(Mode::Fixed, "fixed")],
        ModeArg::Microscopic => vec![(Mode::Microscopic, "microscopic")],
        ModeArg::Both => vec![(Mode::Fixed, "fixed"), (Mode::Microscopic, "microscopic")],
    };
    let base = a.out.resolve("trajectory");
    let both = modes.len() > 1;
    for (mode, label) in &modes {
        let traj = simulate(r0, &protocol, a.t_max, a.steps, &params, *mode)?;
        let table = trajectory_table(&traj);
        let path = if both { with_suffix(&base, label) } else { base.clone() };
        table.write(&path, a.out.format.to_format())?;
        let excursions = traj
            .samples()
            .iter()
            .filter(|(_, r)| !r.is_physical(1e-9))
            .count();
        println!(
            "{label}: wrote {} rows to {} ({excursions} samples outside the ball)",
            table.n_rows(),
            path.display()
        );
        if let Some(svg_path) = &a.svg {
            let sp = if both { with_suffix(svg_path, label) } else { svg_path.clone() };
            write_atomic(&sp, svg::trajectory_svg(&traj).as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cp_audit(a: CpAuditArgs) -> crate::error::Result<ExitCode> {
    let params = SpectralParams::new(a.s)?;
    let protocol = build_protocol(&params, a.phi_in, a.pulse_time, a.pulse_angle, Axis::Y)?;
    let (rows, report) = cp_audit(&protocol, &params, a.t_max, a.steps, a.samples, Mode::Fixed)?;
    let mut table = Table::new(vec!["t", "min_choi_eig", "max_bloch_norm"]);
    for r in &rows {
        table.push(vec![
            Cell::Float(r.t),
            Cell::Float(r.min_choi_eig),
            Cell::Float(r.max_bloch_norm),
        ]);
    }
    let path = a.out.resolve("cp_audit");
    table.write(&path, a.out.format.to_format())?;
    if report.cp_violating {
        println!(
            "verdict: CP-violating (min Choi eigenvalue {:.6} at t = {:.4}, max |r| = {:.6} at t = {:.4}); {} rows -> {}",
            report.min_choi_eigenvalue,
            report.worst_choi_time,
            report.max_bloch_norm,
            report.worst_norm_time,
            table.n_rows(),
            path.display()
        );
    } else {
        println!(
            "verdict: CP (min Choi eigenvalue {:.6}, max |r| = {:.6}); {} rows -> {}",
            report.min_choi_eigenvalue,
            report.max_bloch_norm,
            table.n_rows(),
            path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn optimization_row(r: &optimizer::OptimizationResult) -> Vec<Cell> {
    vec![
        Cell::Float(r.s),
        Cell::Float(r.t_horizon),
        Cell::from(r.t_tilde),
        Cell::from(r.phi_in),
        Cell::from(r.pulse_angle),
        Cell::Float(r.cbar_uncontrolled),
        Cell::from(r.cbar_controlled),
        Cell::from(r.cbar_controlled_microscopic),
        Cell::Bool(r.feasible),
    ]
}

const SWEEP_HEADERS: [&str; 9] = [
    "s",
    "T",
    "t_tilde",
    "phi_in",
    "pulse_angle",
    "cbar_uncontrolled",
    "cbar_controlled",
    "cbar_controlled_microscopic",
    "feasible",
];

fn cmd_sweep(a: SweepArgs) -> crate::error::Result<ExitCode> {
    if a.s_steps == 0 {
        return Err(Error::Config("sweep needs s-steps >= 1".into()));
    }
    let mut grid = Vec::new();
    let mut trimmed = 0usize;
    for i in 0..=a.s_steps {
        let s = if a.s_steps == 0 {
            a.s_min
        } else {
            a.s_min + (a.s_max - a.s_min) * i as f64 / a.s_steps as f64
        };
        if s > 2.0 && s <= 6.0 {
            grid.push(s);
        } else {
            trimmed += 1;
        }
    }
    if trimmed > 0 {
        eprintln!("warning: trimmed {trimmed} grid point(s) outside the Ohmicity range (2, 6]");
    }
    if grid.is_empty() {
        return Err(Error::Infeasible("no sweep points remain inside (2, 6]".into()));
    }
    let rows = optimizer::sweep(&grid, a.default_t, DEFAULT_CBAR_STEPS)?;
    let mut table = Table::new(SWEEP_HEADERS.to_vec());
    for r in &rows {
        table.push(optimization_row(r));
    }
    let path = a.out.resolve("sweep");
    table.write(&path, a.out.format.to_format())?;
    let feasible = rows.iter().filter(|r| r.feasible).count();
    println!(
        "wrote {} sweep points to {} ({feasible} feasible)",
        table.n_rows(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle_validate(a: OracleValidateArgs) -> crate::error::Result<ExitCode> {
    if a.steps == 0 || !(a.t_max > 0.0) {
        return Err(Error::Config("oracle validation needs steps >= 1 and t-max > 0".into()));
    }
    let params = SpectralParams::new(a.s)?;
    let env = DiscretizedEnv::new(&params, a.n_modes, a.omega_max)?;
    let t_pulse = match a.pulse_time {
        Some(tp) => tp,
        None => params
            .rate_zero_crossings()
            .first()
            .copied()
            .ok_or(Error::NoCrossing { s: a.s })?,
    };
    if t_pulse >= a.t_max {
        return Err(Error::Config(format!(
            "pulse time {t_pulse} must lie inside the scanned interval (0, {})",
            a.t_max
        )));
    }
    let protocol = ControlProtocol::single_y(t_pulse, a.pulse_angle)?;
    let (c_e, c_g) = crate::oracle::amplitudes_from_angles(a.phi_in, 0.0);
    let r0 = BlochVector::from_polar(a.phi_in);

    let mut table = Table::new(vec![
        "t",
        "gamma_closed",
        "gamma_oracle",
        "abs_err",
        "phase_closed",
        "phase_oracle",
        "phase_err",
    ]);
    let mut max_gamma_err = 0.0_f64;
    let mut max_phase_err = 0.0_f64;
    let mut max_bloch_err = 0.0_f64;
    for i in 0..=a.steps {
        let t = i as f64 * a.t_max / a.steps as f64;
        let g_closed = params.decoherence(t)?;
        let g_oracle = env.gamma_oracle(t)?;
        let g_err = (g_closed - g_oracle).abs();
        max_gamma_err = max_gamma_err.max(g_err);
        let mut row = vec![
            Cell::Float(t),
            Cell::Float(g_closed),
            Cell::Float(g_oracle),
            Cell::Float(g_err),
        ];
        if t >= t_pulse {
            let p_closed = params.control_phase(t, t_pulse)?;
            let p_oracle = env.control_phase_oracle(t, t_pulse)?;
            let p_err = wrap_angle(p_closed - p_oracle).abs();
            max_phase_err = max_phase_err.max(p_err);
            row.extend([Cell::Float(p_closed), Cell::Float(p_oracle), Cell::Float(p_err)]);

            let closed = crate::maps::propagate_microscopic(r0, &protocol, t, &params)?;
            let orac = env.bloch(c_e, c_g, a.pulse_angle, t, t_pulse)?;
            let b_err = (closed.rx - orac.rx)
                .abs()
                .max((closed.ry - orac.ry).abs())
                .max((closed.rz - orac.rz).abs());
            max_bloch_err = max_bloch_err.max(b_err);
        } else {
            row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
        }
        table.push(row);
    }
    let path = a.out.resolve("oracle_validate");
    table.write(&path, a.out.format.to_format())?;

    let defaults = a.n_modes >= 2000 && a.omega_max >= 50.0;
    let ok = max_bloch_err < 1e-2;
    println!(
        "max_gamma_err={max_gamma_err:.3e} max_phase_err={max_phase_err:.3e} max_bloch_err={max_bloch_err:.3e} \
         (n_modes={}, omega_max={}) -> {}",
        a.n_modes,
        a.omega_max,
        path.display()
    );
    if defaults && !ok {
        eprintln!(
            "dephase: oracle disagreement {max_bloch_err:.3e} exceeds 1e-2 at full oracle size"
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_t_scan(a: TScanArgs) -> crate::error::Result<ExitCode> {
    if a.t_steps == 0 || !(a.t_min > 0.0) || !(a.t_max > a.t_min) {
        return Err(Error::Config("t-scan needs t-steps >= 1 and 0 < t-min < t-max".into()));
    }
    let params = SpectralParams::new(a.s)?;
    let mut table = Table::new(SWEEP_HEADERS.to_vec());
    let mut feasible = 0usize;
    for i in 0..=a.t_steps {
        let t_horizon = a.t_min + (a.t_max - a.t_min) * i as f64 / a.t_steps as f64;
        let r = optimizer::controlled_average_coherence(&params, t_horizon, DEFAULT_CBAR_STEPS)?;
        feasible += usize::from(r.feasible);
        table.push(optimization_row(&r));
    }
    let path = a.out.resolve("t_scan");
    table.write(&path, a.out.format.to_format())?;
    println!(
        "wrote {} horizon points to {} ({feasible} feasible)",
        table.n_rows(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}
