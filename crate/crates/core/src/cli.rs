//! Command-line front end.
//!
//! Every subcommand accepts `--config FILE` with `key = value` lines; the
//! file's entries are applied first so that flags on the command line win.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dqpt::{
    critical_momenta, critical_times, delta_scan_with, fisher_zero_line, rate_function,
    FisherZeroLine, RateOptions, RateSign, DEFAULT_PROMINENCE, DEFAULT_RESOLUTION,
};
use crate::error::{Error, Result};
use crate::model::{MomentumGrid, XYParams};
use crate::numeric::linspace;
use crate::observables::{entropy_profile, phase_series, winding_series};
use crate::oracle::{fock_oracle_max_error, spin_ed_run, SqueezeKernel};
use crate::quench::{QuenchCache, QuenchSpec};
use crate::squeeze::{pairing_amplitude, SqueezeSpec};

/// Fallback time window when no critical time is available.
const FALLBACK_T_MAX: f64 = 10.0;

#[derive(Parser, Debug)]
#[command(
    name = "squeezed-dqpt",
    version,
    about = "Loschmidt echoes, Fisher zeros and DQPT diagnostics of the XY chain after a squeezed quench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate function λ(t) (columns t,lambda)
    #[command(args_override_self = true)]
    Rate(RateArgs),
    /// Fisher-zero lines z_n(k) (columns n,k,tau,t,flag)
    #[command(args_override_self = true)]
    Zeros(ZerosArgs),
    /// DQPT criterion Δ(r, φ) = min_k |Δ_k| on a grid (columns r,phi,delta)
    #[command(args_override_self = true)]
    Scan(ScanArgs),
    /// Phases of one mode and the winding number ν(t) (columns t,phi_total,phi_dyn,phi_geo,nu)
    #[command(args_override_self = true)]
    Phase(PhaseArgs),
    /// Double-mode entropy S_k over the momentum grid (columns k,entropy)
    #[command(args_override_self = true)]
    Entropy(EntropyArgs),
    /// Real-space pairing amplitude J(d) of the pre-quench chain (columns d,J)
    #[command(args_override_self = true)]
    Pairing(PairingArgs),
    /// Compare against the brute-force oracles and print a JSON report
    #[command(args_override_self = true)]
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Pre-quench transverse field
    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    h0: f64,
    /// Pre-quench anisotropy
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma0: f64,
    /// Post-quench transverse field
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    h1: f64,
    /// Post-quench anisotropy
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma1: f64,
}

#[derive(Args, Debug, Clone)]
struct SqueezeArgs {
    /// Squeezing strength
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    r: f64,
    /// Squeezing direction
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
}

#[derive(Args, Debug, Clone)]
struct TimeArgs {
    /// End of the time window [default: 1.1 × the third critical time]
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<f64>,
    /// Number of time samples, including t = 0 and t = tmax
    #[arg(long, default_value_t = 2000)]
    steps: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write to this file instead of standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// File of `key = value` lines applied before the command-line flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    #[arg(long, default_value_t = 2000)]
    sites: usize,
    #[command(flatten)]
    time: TimeArgs,
    /// Report λ = +(2/N) Σ ln|G_k| instead of the nonnegative convention
    #[arg(long)]
    paper_sign: bool,
    /// Minimum prominence of reported peaks (written to standard error)
    #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
    prominence: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    /// Highest branch index n
    #[arg(long, default_value_t = 0)]
    n_max: u32,
    /// Number of momenta sampled in (0, π)
    #[arg(long, default_value_t = 512)]
    k_samples: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 128)]
    r_steps: usize,
    #[arg(long, default_value_t = 128)]
    phi_steps: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    r_min: f64,
    #[arg(long, default_value_t = FRAC_PI_2, allow_hyphen_values = true)]
    r_max: f64,
    #[arg(long, default_value_t = -PI, allow_hyphen_values = true)]
    phi_min: f64,
    #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
    phi_max: f64,
    /// Momentum samples used to bracket roots of Δ_k
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct PhaseArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    /// Momentum of the tracked mode [default: first critical momentum, else π/2]
    #[arg(long)]
    k: Option<f64>,
    /// Sites of the momentum grid used for the winding number
    #[arg(long, default_value_t = 2000)]
    sites: usize,
    #[command(flatten)]
    time: TimeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    #[arg(long, default_value_t = 2000)]
    sites: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct PairingArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Largest separation d
    #[arg(long, default_value_t = 10)]
    d_max: i64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KernelArg {
    MomentumSum,
    PairingIntegral,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    squeeze: SqueezeArgs,
    /// Sites of the exactly diagonalized chain (even, 4..=12)
    #[arg(long, default_value_t = 8)]
    sites: usize,
    #[arg(long, default_value_t = 3.0)]
    tmax: f64,
    #[arg(long, default_value_t = 61)]
    steps: usize,
    /// Random samples for the per-mode oracle
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = KernelArg::MomentumSum)]
    kernel: KernelArg,
    #[command(flatten)]
    out: OutputArgs,
}

/// Settings shared by all subcommands after parsing.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub quench: QuenchSpec,
    pub squeeze: SqueezeSpec,
    pub n_sites: usize,
    pub t_max: f64,
    pub n_steps: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tmax must be positive, got {}",
                self.t_max
            )));
        }
        if self.n_steps < 2 {
            return Err(Error::InvalidArgument(format!(
                "steps must be at least 2, got {}",
                self.n_steps
            )));
        }
        if self.n_sites < 2 || !self.n_sites.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "sites must be even and at least 2, got {}",
                self.n_sites
            )));
        }
        Ok(())
    }

    fn times(&self) -> Vec<f64> {
        linspace(0.0, self.t_max, self.n_steps)
    }
}

fn quench(m: &ModelArgs) -> Result<QuenchSpec> {
    Ok(QuenchSpec::new(
        XYParams::new(m.h0, m.gamma0)?,
        XYParams::new(m.h1, m.gamma1)?,
    ))
}

fn squeeze(s: &SqueezeArgs) -> Result<SqueezeSpec> {
    SqueezeSpec::new(s.r, s.phi)
}

/// 1.1 × the third critical time (window edges count individually).
pub fn default_t_max(q: &QuenchSpec, s: &SqueezeSpec) -> f64 {
    let cs = critical_momenta(q, s);
    match critical_times(&cs, q, 2) {
        Ok(cs) => cs
            .time_list()
            .get(2)
            .copied()
            .filter(|t| t.is_finite())
            .map_or(FALLBACK_T_MAX, |t| 1.1 * t),
        Err(_) => FALLBACK_T_MAX,
    }
}

fn config(
    command: &str,
    q: QuenchSpec,
    s: SqueezeSpec,
    sites: usize,
    time: Option<&TimeArgs>,
    out: &OutputArgs,
) -> Result<RunConfig> {
    let (t_max, n_steps) = match time {
        Some(t) => (t.tmax.unwrap_or_else(|| default_t_max(&q, &s)), t.steps),
        None => (1.0, 2),
    };
    let cfg = RunConfig {
        command: command.to_string(),
        quench: q,
        squeeze: s,
        n_sites: sites,
        t_max,
        n_steps,
        output: out.output.clone(),
        format: out.format,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Round-trip float formatting: 17 significant digits.
fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

struct Output {
    text: String,
    /// Diagnostics for standard error.
    notes: Vec<String>,
    /// A failed check that should turn into exit code 2.
    failed: bool,
}

impl Output {
    fn data(text: String) -> Self {
        Self {
            text,
            notes: Vec::new(),
            failed: false,
        }
    }
}

fn run_rate(a: &RateArgs) -> Result<(RunConfig, Output)> {
    let cfg = config(
        "rate",
        quench(&a.model)?,
        squeeze(&a.squeeze)?,
        a.sites,
        Some(&a.time),
        &a.out,
    )?;
    let grid = MomentumGrid::new(cfg.n_sites)?;
    let opts = RateOptions {
        sign: if a.paper_sign {
            RateSign::Literal
        } else {
            RateSign::Conventional
        },
        prominence: a.prominence,
    };
    let series = rate_function(&cfg.quench, &cfg.squeeze, &grid, &cfg.times(), &opts)?;
    let text = match cfg.format {
        OutputFormat::Json => json_text(&series),
        OutputFormat::Csv => {
            let mut s = String::from("t,lambda\n");
            for (t, v) in series.times.iter().zip(&series.values) {
                writeln!(s, "{},{}", fmt_f(*t), fmt_f(*v)).unwrap();
            }
            s
        }
    };
    let mut out = Output::data(text);
    out.notes = series
        .peaks
        .iter()
        .map(|p| {
            format!(
                "peak t = {:.6} lambda = {:.6} prominence = {:.3e}",
                p.time, p.value, p.prominence
            )
        })
        .collect();
    Ok((cfg, out))
}

fn run_zeros(a: &ZerosArgs) -> Result<(RunConfig, Output)> {
    let cfg = config(
        "zeros",
        quench(&a.model)?,
        squeeze(&a.squeeze)?,
        2,
        None,
        &a.out,
    )?;
    if a.k_samples == 0 {
        return Err(Error::InvalidArgument("k-samples must be positive".into()));
    }
    let ks: Vec<f64> = (0..a.k_samples)
        .map(|j| PI * (j as f64 + 0.5) / a.k_samples as f64)
        .collect();
    let lines: Vec<FisherZeroLine> = (0..=a.n_max as i64)
        .map(|n| fisher_zero_line(n, &cfg.quench, &cfg.squeeze, &ks))
        .collect::<Result<_>>()?;
    let text = match cfg.format {
        OutputFormat::Json => json_text(&lines),
        OutputFormat::Csv => {
            let mut s = String::from("n,k,tau,t,flag\n");
            for line in &lines {
                for z in &line.samples {
                    writeln!(
                        s,
                        "{},{},{},{},{}",
                        line.n,
                        fmt_f(z.k),
                        fmt_f(z.tau),
                        fmt_f(z.t),
                        z.flag.as_str()
                    )
                    .unwrap();
                }
            }
            s
        }
    };
    Ok((cfg, Output::data(text)))
}

fn run_scan(a: &ScanArgs) -> Result<(RunConfig, Output)> {
    let cfg = config(
        "scan",
        quench(&a.model)?,
        SqueezeSpec::none(),
        2,
        None,
        &a.out,
    )?;
    if a.r_steps == 0 || a.phi_steps == 0 {
        return Err(Error::InvalidArgument(
            "scan grids need at least one point".into(),
        ));
    }
    if a.resolution < 2 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 2".into(),
        ));
    }
    let rs = linspace(a.r_min, a.r_max, a.r_steps);
    let ps = linspace(a.phi_min, a.phi_max, a.phi_steps);
    let map = delta_scan_with(&cfg.quench, &rs, &ps, a.resolution)?;
    let text = match cfg.format {
        OutputFormat::Json => json_text(&map),
        OutputFormat::Csv => {
            let mut s = String::from("r,phi,delta\n");
            for (i, r) in map.r_values.iter().enumerate() {
                for (j, p) in map.phi_values.iter().enumerate() {
                    writeln!(s, "{},{},{}", fmt_f(*r), fmt_f(*p), fmt_f(map.get(i, j))).unwrap();
                }
            }
            s
        }
    };
    Ok((cfg, Output::data(text)))
}

fn run_phase(a: &PhaseArgs) -> Result<(RunConfig, Output)> {
    let cfg = config(
        "phase",
        quench(&a.model)?,
        squeeze(&a.squeeze)?,
        a.sites,
        Some(&a.time),
        &a.out,
    )?;
    let k = match a.k {
        Some(k) if k > 0.0 && k < PI => k,
        Some(k) => {
            return Err(Error::InvalidArgument(format!(
                "k must lie in (0, π), got {k}"
            )))
        }
        None => critical_momenta(&cfg.quench, &cfg.squeeze)
            .momenta
            .first()
            .copied()
            .unwrap_or(FRAC_PI_2),
    };
    let times = cfg.times();
    let phases = phase_series(k, &cfg.quench, &cfg.squeeze, &times)?;
    let grid = MomentumGrid::new(cfg.n_sites)?;
    let winding = winding_series(&cfg.quench, &cfg.squeeze, &grid, &times)?;
    let text = match cfg.format {
        OutputFormat::Json => json_text(&json!({ "phase": phases, "winding": winding })),
        OutputFormat::Csv => {
            let mut s = String::from("t,phi_total,phi_dyn,phi_geo,nu\n");
            for i in 0..times.len() {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    fmt_f(times[i]),
                    fmt_f(phases.phi_total[i]),
                    fmt_f(phases.phi_dyn[i]),
                    fmt_f(phases.phi_geo[i]),
                    winding.nu[i]
                )
                .unwrap();
            }
            s
        }
    };
    let mut out = Output::data(text);
    out.notes.push(format!("mode k = {k:.16e}"));
    let flagged = phases.flagged.iter().filter(|f| **f).count();
    if flagged > 0 {
        out.notes.push(format!(
            "{flagged} samples with |G_k| < 1e-12 were interpolated"
        ));
    }
    Ok((cfg, out))
}

fn run_entropy(a: &EntropyArgs) -> Result<(RunConfig, Output)> {
    let cfg = config(
        "entropy",
        quench(&a.model)?,
        squeeze(&a.squeeze)?,
        a.sites,
        None,
        &a.out,
    )?;
    let prof = entropy_profile(&cfg.quench, &cfg.squeeze, &MomentumGrid::new(cfg.n_sites)?);
    let text = match cfg.format {
        OutputFormat::Json => json_text(&prof),
        OutputFormat::Csv => {
            let mut s = String::from("k,entropy\n");
            for (k, e) in prof.momenta.iter().zip(&prof.entropy) {
                writeln!(s, "{},{}", fmt_f(*k), fmt_f(*e)).unwrap();
            }
            s
        }
    };
    Ok((cfg, Output::data(text)))
}

fn run_pairing(a: &PairingArgs) -> Result<(RunConfig, Output)> {
    let cfg = config(
        "pairing",
        quench(&a.model)?,
        SqueezeSpec::none(),
        2,
        None,
        &a.out,
    )?;
    if a.d_max < 1 {
        return Err(Error::InvalidArgument(format!(
            "d-max must be at least 1, got {}",
            a.d_max
        )));
    }
    let table: Vec<(i64, f64)> = (1..=a.d_max)
        .map(|d| pairing_amplitude(d, &cfg.quench.pre).map(|j| (d, j)))
        .collect::<Result<_>>()?;
    let text = match cfg.format {
        OutputFormat::Json => {
            let (d, j): (Vec<i64>, Vec<f64>) = table.into_iter().unzip();
            json_text(&json!({ "d": d, "J": j }))
        }
        OutputFormat::Csv => {
            let mut s = String::from("d,J\n");
            for (d, j) in table {
                writeln!(s, "{},{}", d, fmt_f(j)).unwrap();
            }
            s
        }
    };
    Ok((cfg, Output::data(text)))
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    max_abs_error: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn new(name: &str, max_abs_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_abs_error,
            tolerance,
            pass: max_abs_error < tolerance,
        }
    }
}

/// `|G_k| ≥ 1e-3` for every grid mode: away from the logarithmic singularities.
fn regular_time(cache: &QuenchCache, t: f64) -> bool {
    cache.modes().iter().all(|m| m.loschmidt(t).norm() >= 1e-3)
}

fn run_validate(a: &ValidateArgs) -> Result<(RunConfig, Output)> {
    let time = TimeArgs {
        tmax: Some(a.tmax),
        steps: a.steps,
    };
    let mut out_args = a.out.clone();
    out_args.format = OutputFormat::Json;
    let cfg = config(
        "validate",
        quench(&a.model)?,
        squeeze(&a.squeeze)?,
        a.sites,
        Some(&time),
        &out_args,
    )?;
    let kernel = match a.kernel {
        KernelArg::MomentumSum => SqueezeKernel::MomentumSum,
        KernelArg::PairingIntegral => SqueezeKernel::PairingIntegral,
    };
    let times = cfg.times();
    let grid = MomentumGrid::new(cfg.n_sites)?;
    let ed = spin_ed_run(&cfg.quench, &cfg.squeeze, &times, cfg.n_sites, kernel)?;
    let momentum = rate_function(
        &cfg.quench,
        &cfg.squeeze,
        &grid,
        &times,
        &RateOptions::default(),
    )?;
    let cache = QuenchCache::new(&cfg.quench, &cfg.squeeze, &grid);
    let rate_error = times
        .iter()
        .enumerate()
        .filter(|(_, t)| regular_time(&cache, **t))
        .map(|(i, _)| (ed.rate.values[i] - momentum.values[i]).abs())
        .fold(0.0, f64::max);
    let frame_checks =
        crate::oracle::SpinChainFrame::new(&cfg.quench, &cfg.squeeze, cfg.n_sites, kernel)?;
    let checks = vec![
        Check::new(
            "fock_mode_oracle_vs_mode_loschmidt",
            fock_oracle_max_error(a.samples, a.seed),
            1e-10,
        ),
        Check::new("spin_ed_rate_vs_momentum_rate", rate_error, 1e-8),
        Check::new("squeeze_unitarity", ed.unitarity_error, 1e-10),
        Check::new("hermiticity", frame_checks.hermiticity_error(), 1e-12),
        Check::new(
            "generator_parity_commutator",
            ed.parity.generator_parity_commutator,
            1e-10,
        ),
        Check::new(
            "ground_state_parity",
            (ed.parity.ground_parity - 1.0).abs(),
            1e-10,
        ),
    ];
    let overall_pass = checks.iter().all(|c| c.pass);
    let report = json!({
        "config": {
            "run": cfg,
            "kernel": kernel.as_str(),
            "samples": a.samples,
            "seed": a.seed,
        },
        "per_check": checks,
        "overall_pass": overall_pass,
    });
    let mut out = Output::data(json_text(&report));
    out.failed = !overall_pass;
    if !overall_pass {
        out.notes
            .push("validation failed; see per_check in the report".into());
    }
    Ok((cfg, out))
}

/// Arguments from a `key = value` file, as `--key value` pairs. A value of
/// `true` becomes a bare flag and `false` drops the key.
pub fn config_file_args(text: &str) -> std::result::Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", no + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            continue;
        }
        match value {
            "true" => args.push(format!("--{key}")),
            "false" => {}
            _ => {
                args.push(format!("--{key}"));
                args.push(value.to_string());
            }
        }
    }
    Ok(args)
}

/// The `--config` path, if given after the subcommand.
fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(2);
    while let Some(arg) = it.next() {
        if arg == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = arg.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 on invalid arguments, 2 when a numerical guard or
/// validation check fails.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    if let Some(path) = config_path(&argv) {
        let extra = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config file {path}: {e}"))
            .and_then(|text| config_file_args(&text));
        match extra {
            Ok(extra) => {
                argv.splice(2..2, extra);
            }
            Err(msg) => {
                let _ = writeln!(stderr, "error: {msg}");
                return 1;
            }
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Rate(a) => run_rate(a),
        Command::Zeros(a) => run_zeros(a),
        Command::Scan(a) => run_scan(a),
        Command::Phase(a) => run_phase(a),
        Command::Entropy(a) => run_entropy(a),
        Command::Pairing(a) => run_pairing(a),
        Command::Validate(a) => run_validate(a),
    };
    let (cfg, out) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return if e.is_numerical_guard() { 2 } else { 1 };
        }
    };
    for note in &out.notes {
        let _ = writeln!(stderr, "{note}");
    }
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout
            .write_all(out.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return 1;
    }
    if out.failed {
        2
    } else {
        0
    }
}

pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("squeezed-dqpt").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn config_file_parsing() {
        let args = config_file_args(
            "# comment\nh0 = 0.8\n\nr_steps = 4 # trailing\npaper-sign = true\nx = false\n",
        )
        .unwrap();
        assert_eq!(args, ["--h0", "0.8", "--r-steps", "4", "--paper-sign"]);
        assert!(config_file_args("oops").is_err());
    }

    #[test]
    fn default_window_covers_three_critical_times() {
        let q = QuenchSpec::ising(1.5, 0.5);
        let t = default_t_max(&q, &SqueezeSpec::none());
        let tc = critical_times(&critical_momenta(&q, &SqueezeSpec::none()), &q, 2)
            .unwrap()
            .time_list();
        assert!((t - 1.1 * tc[2]).abs() < 1e-12);
        assert_eq!(
            default_t_max(&QuenchSpec::ising(0.8, 0.2), &SqueezeSpec::none()),
            FALLBACK_T_MAX
        );
        let t = default_t_max(&QuenchSpec::ising(0.8, 0.2), &SqueezeSpec::universal());
        assert!((t - 1.1 * 3.0 * PI / 2.4).abs() < 1e-12);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["--help"]).0, 0);
        assert_eq!(run_capture(&["bogus"]).0, 1);
        assert_eq!(run_capture(&["rate", "--nope"]).0, 1);
        assert_eq!(run_capture(&["rate", "--sites", "7", "--steps", "3"]).0, 1);
        assert_eq!(run_capture(&["rate", "--steps", "1"]).0, 1);
        let (code, _, err) = run_capture(&[
            "phase", "--k", "1.0", "--r", "0.2", "--phi", "0.4", "--tmax", "20", "--steps", "3",
            "--sites", "8",
        ]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn pairing_table() {
        let (code, out, _) = run_capture(&["pairing", "--h0", "0", "--d-max", "2"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().collect();
        assert_eq!(rows[0], "d,J");
        let j1: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
        assert!((j1 - 0.25).abs() < 1e-10);
    }
}
