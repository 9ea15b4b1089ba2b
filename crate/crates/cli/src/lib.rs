//! Command-line front end: argument parsing, the subcommands, and output.

pub mod output;
mod verify;

use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner_core::bs_pde::{closed_form_residuals, disk_grid, series_coefficients};
use loewner_core::closed_forms::{
    expected_an, expected_b2n1, quad_moment_small, truncated_series_sn, truncated_series_sn_closed, QuadKind,
};
use loewner_core::mc::{estimate_moments, Driver, McConfig, Statistic, DEFAULT_DT};
use loewner_core::scalars::FactoredRatFunc;
use loewner_core::spectra::{transition_points, whole_plane_spectrum, SpectrumQuery};
use loewner_core::words::{level_dp, mean_from_words, second_moment, second_moment_exact, CoeffFamily};
use loewner_core::{FamilyKind, LevySymbol};
use serde::Serialize;
use serde_json::json;

use output::{Cell, PlotSpec, Report};

#[derive(Parser, Debug, Serialize)]
#[command(name = "loewner-lab", version, about = "Coefficient moments, spectra and PDE checks for whole-plane SLE and Lévy-Loewner maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write `<command>.<format>` into this directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for simulations (default: $LOEWNER_LAB_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Second moments E|a_n|² or E|b_{2n+1}|².
    Moments(MomentsArgs),
    /// Closed-form moments against the word engine.
    Oracle(OracleArgs),
    /// Average integral means spectrum on a grid of p.
    Spectra(SpectraArgs),
    /// Finite-difference residual of the explicit PDE solution.
    PdeCheck(PdeCheckArgs),
    /// Exact second moments on the p = 2 families.
    Series(SeriesArgs),
    /// Monte Carlo coefficient moments.
    Simulate(SimulateArgs),
    /// Run the cross-check suite.
    VerifyAll(VerifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moments(_) => "moments",
            Command::Oracle(_) => "oracle",
            Command::Spectra(_) => "spectra",
            Command::PdeCheck(_) => "pde-check",
            Command::Series(_) => "series",
            Command::Simulate(_) => "simulate",
            Command::VerifyAll(_) => "verify-all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Whole-plane coefficients a_n.
    A,
    /// Odd coefficients b_{2n+1}.
    B,
}

impl Family {
    fn kind(self) -> FamilyKind {
        match self {
            Family::A => FamilyKind::WholePlane,
            Family::B => FamilyKind::Oddified,
        }
    }

    fn first(self) -> usize {
        match self {
            Family::A => 2,
            Family::B => 1,
        }
    }

    /// Coefficient index: `n` for `a_n`, `2n+1` for `b_{2n+1}`.
    fn index(self, n: usize) -> usize {
        match self {
            Family::A => n,
            Family::B => 2 * n + 1,
        }
    }

    fn coeff(self, n: usize) -> CoeffFamily {
        match self {
            Family::A => CoeffFamily::a(n),
            Family::B => CoeffFamily::b(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMode {
    /// Exact rational functions from word pairs.
    Symbolic,
    /// Floating point from word pairs.
    Float,
    /// Level recursion (exact for the symbolic symbol).
    Dp,
}

fn parse_symbol(s: &str) -> std::result::Result<LevySymbol, String> {
    s.parse().map_err(|e: loewner_core::Error| e.to_string())
}

fn parse_driver(s: &str) -> std::result::Result<Driver, String> {
    s.parse().map_err(|e: loewner_core::Error| e.to_string())
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long, value_enum, default_value_t = Family::A)]
    pub family: Family,
    /// Level: a_n, or b_{2n+1} for family b.
    #[arg(long)]
    pub n: usize,
    /// Lévy symbol, e.g. `sle:sym`, `sle:6`, `stable:1.5:2`, `bp:4:0.5`, `table:0,1,4`.
    #[arg(long, default_value = "sle:sym", value_parser = parse_symbol)]
    #[serde(serialize_with = "as_display")]
    pub symbol: LevySymbol,
    #[arg(long, value_enum, default_value_t = MomentMode::Symbolic)]
    pub mode: MomentMode,
    /// List every level from the first up to n.
    #[arg(long)]
    pub all: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[arg(long, default_value = "sle:6", value_parser = parse_symbol)]
    #[serde(serialize_with = "as_display")]
    pub symbol: LevySymbol,
    /// Highest level for the mean and truncated-series checks.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectraArgs {
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub p_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub p_max: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PdeCheckArgs {
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Number of sample points in the disk.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.9)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SeriesArgs {
    #[arg(long)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// `brownian:κ`, `stable:α:κ`, `poisson:λ[:jump]`, `composite:κ:λ[:jump]`.
    #[arg(long, value_parser = parse_driver)]
    #[serde(serialize_with = "as_display")]
    pub driver: Driver,
    /// Highest level: a_n, or b_{2n+1} for family b.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Family::A)]
    pub family: Family,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// Time horizon (default n + 12).
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Smaller Monte Carlo smoke test.
    #[arg(long)]
    pub quick: bool,
}

fn as_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Result of one command: the report and whether its checks passed.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

/// Parses `args`, runs the command, writes output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    if let Err(e) = emit(&cli, &outcome.report) {
        eprintln!("error: {e:#}");
        return 2;
    }
    if outcome.ok {
        0
    } else {
        1
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let text = match cli.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
        Format::Svg => report.to_svg()?,
    };
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("{}.{}", report.command, cli.format.ext()));
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn config(cli: &Cli) -> serde_json::Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command,
        "threads": loewner_core::mc::resolve_threads(cli.threads),
    })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = config(cli);
    let name = cli.command.name();
    match &cli.command {
        Command::Moments(a) => moments(name, cfg, a),
        Command::Oracle(a) => oracle(name, cfg, a),
        Command::Spectra(a) => spectra(name, cfg, a),
        Command::PdeCheck(a) => pde_check(name, cfg, a),
        Command::Series(a) => series(name, cfg, a),
        Command::Simulate(a) => simulate(name, cfg, a, cli.threads),
        Command::VerifyAll(a) => verify::verify_all(name, cfg, a, cli.threads),
    }
}

fn moments(name: &str, cfg: serde_json::Value, a: &MomentsArgs) -> Result<Outcome> {
    if a.n < a.family.first() {
        bail!("n must be at least {} for family {:?}", a.family.first(), a.family);
    }
    let mut report = Report::new(name, cfg, &["n", "index", "value"]);
    let levels: Vec<usize> = if a.all { (a.family.first()..=a.n).collect() } else { vec![a.n] };
    let kind = a.family.kind();
    match a.mode {
        MomentMode::Symbolic => {
            for &n in &levels {
                let v = second_moment_exact(a.family.coeff(n), &a.symbol)?;
                report.push(vec![n.into(), a.family.index(n).into(), v.to_string().into()]);
            }
        }
        MomentMode::Float => {
            for &n in &levels {
                let v = second_moment::<f64>(a.family.coeff(n), &a.symbol)?;
                report.push(vec![n.into(), a.family.index(n).into(), v.into()]);
            }
        }
        MomentMode::Dp if a.symbol.is_symbolic() => {
            let all = level_dp::<FactoredRatFunc>(kind, &a.symbol, a.n)?;
            for &n in &levels {
                report.push(vec![n.into(), a.family.index(n).into(), all[n].to_ratfunc().to_string().into()]);
            }
        }
        MomentMode::Dp => {
            let all = level_dp::<f64>(kind, &a.symbol, a.n)?;
            for &n in &levels {
                report.push(vec![n.into(), a.family.index(n).into(), all[n].into()]);
            }
        }
    }
    report.plot = Some(PlotSpec { title: format!("second moments, {}", a.symbol), x: "index".into(), y: vec!["value".into()] });
    Ok(Outcome { report, ok: true })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn oracle(name: &str, cfg: serde_json::Value, a: &OracleArgs) -> Result<Outcome> {
    if a.symbol.is_symbolic() {
        bail!("oracle compares numeric values; give a numeric symbol such as sle:6");
    }
    let mut report = Report::new(name, cfg, &["quantity", "closed_form", "engine", "abs_diff", "ok"]);
    let mut ok = true;
    let mut push = |q: String, closed: f64, engine: f64| {
        let pass = close(closed, engine, a.tol);
        ok &= pass;
        report.push(vec![q.into(), closed.into(), engine.into(), (closed - engine).abs().into(), pass.to_string().into()]);
    };
    let sym = &a.symbol;
    for n in 2..=a.n.min(12) {
        push(format!("E(a_{n})"), expected_an::<f64>(n, sym)?.value, mean_from_words::<f64>(CoeffFamily::a(n), sym)?);
    }
    for n in 1..=(a.n / 2).clamp(1, 6) {
        let label = format!("E(b_{})", 2 * n + 1);
        push(label, expected_b2n1::<f64>(n, sym)?.value, mean_from_words::<f64>(CoeffFamily::b(n), sym)?);
    }
    for (kind, fam, label) in [
        (QuadKind::A2, CoeffFamily::a(2), "E|a_2|^2"),
        (QuadKind::A3, CoeffFamily::a(3), "E|a_3|^2"),
        (QuadKind::A4, CoeffFamily::a(4), "E|a_4|^2"),
        (QuadKind::A5, CoeffFamily::a(5), "E|a_5|^2"),
        (QuadKind::B5, CoeffFamily::b(2), "E|b_5|^2"),
    ] {
        push(label.to_string(), quad_moment_small::<f64>(kind, sym)?.value, second_moment::<f64>(fam, sym)?);
    }
    for n in 1..=a.n.min(12) {
        push(format!("S_{n}"), truncated_series_sn_closed::<f64>(n, sym)?, truncated_series_sn::<f64>(n, sym)?.value);
    }
    report.summary = json!({ "pass": ok });
    Ok(Outcome { report, ok })
}

fn spectra(name: &str, cfg: serde_json::Value, a: &SpectraArgs) -> Result<Outcome> {
    if a.points < 2 || !(a.p_max > a.p_min) {
        bail!("need at least two points and p_max > p_min");
    }
    let t = transition_points(a.kappa, a.m)?;
    let mut report = Report::new(name, cfg, &["p", "beta", "regime", "status"]);
    for i in 0..a.points {
        let p = a.p_min + (a.p_max - a.p_min) * i as f64 / (a.points - 1) as f64;
        let v = whole_plane_spectrum(SpectrumQuery::new(p, a.kappa, a.m)?)?;
        report.push(vec![p.into(), v.value.into(), v.label().into(), serde_json::to_value(v.status)?.as_str().unwrap_or_default().into()]);
    }
    report.summary = serde_json::to_value(t)?;
    report.plot = Some(PlotSpec {
        title: format!("average integral means spectrum, kappa = {}, m = {}", a.kappa, a.m),
        x: "p".into(),
        y: vec!["beta".into()],
    });
    Ok(Outcome { report, ok: true })
}

fn pde_check(name: &str, cfg: serde_json::Value, a: &PdeCheckArgs) -> Result<Outcome> {
    if !(a.r_max > 0.0 && a.r_max < 1.0) || a.grid == 0 {
        bail!("need 0 < r_max < 1 and a nonempty grid");
    }
    let res = closed_form_residuals(a.kappa, a.m, &disk_grid(a.grid, a.r_max))?;
    let mut report = Report::new(name, cfg, &["i", "re", "im", "residual"]);
    let mut worst = 0.0f64;
    for (i, (z, r)) in res.iter().enumerate() {
        worst = worst.max(*r);
        report.push(vec![i.into(), z.re.into(), z.im.into(), (*r).into()]);
    }
    let ok = worst < a.tol;
    report.summary = json!({ "max_residual": worst, "tol": a.tol, "pass": ok });
    report.plot = Some(PlotSpec { title: format!("relative residual, kappa = {}, m = {}", a.kappa, a.m), x: "i".into(), y: vec!["residual".into()] });
    Ok(Outcome { report, ok })
}

fn series(name: &str, cfg: serde_json::Value, a: &SeriesArgs) -> Result<Outcome> {
    let (family, entries) = series_coefficients(a.kappa, a.m, a.count)?;
    let symbol = LevySymbol::sle(a.kappa);
    let last = entries.last().map_or(0, |e| e.k);
    // The level recursion covers the whole-plane and odd maps.
    let dp = match a.m {
        1 => Some(level_dp::<f64>(FamilyKind::WholePlane, &symbol, last + 1)?),
        2 => Some(level_dp::<f64>(FamilyKind::Oddified, &symbol, last)?),
        _ => None,
    };
    let mut report = Report::new(name, cfg, &["k", "n", "exact", "value", "level_recursion"]);
    for e in &entries {
        let check: Cell = match (&dp, a.m) {
            (Some(v), 1) => v[e.k + 1].into(),
            (Some(v), _) => v[e.k].into(),
            (None, _) => "".into(),
        };
        report.push(vec![e.k.into(), e.n.into(), e.exact.to_string().into(), e.value.into(), check]);
    }
    report.summary = json!({ "family": family });
    report.plot = Some(PlotSpec { title: format!("second moments, kappa = {}, m = {}", a.kappa, a.m), x: "n".into(), y: vec!["value".into()] });
    Ok(Outcome { report, ok: true })
}

fn simulate(name: &str, mut cfg: serde_json::Value, a: &SimulateArgs, threads: Option<usize>) -> Result<Outcome> {
    let mut mc = McConfig::new(a.driver, a.n, a.samples, a.seed, a.family.kind());
    mc.dt = a.dt;
    mc.horizon = a.horizon;
    mc.threads = threads;
    cfg["mc"] = serde_json::to_value(&mc)?;
    cfg["mc"]["horizon"] = json!(mc.horizon());
    let table = estimate_moments(&mc)?;
    let symbol = a.driver.symbol(2 * a.n + 2);
    let dp = level_dp::<f64>(a.family.kind(), &symbol, a.n).ok();
    let mut report = Report::new(
        name,
        cfg,
        &["level", "index", "mean_re", "mean_im", "mean_stderr", "mean_exact", "m2", "m2_stderr", "m2_exact"],
    );
    for level in a.family.first()..=a.n {
        let index = a.family.index(level);
        let mean = table.get(index, Statistic::Mean).context("missing mean")?;
        let m2 = table.get(index, Statistic::SecondMoment).context("missing second moment")?;
        let mean_exact = match a.family {
            Family::A => expected_an::<f64>(level, &symbol).map(|r| r.value),
            Family::B => expected_b2n1::<f64>(level, &symbol).map(|r| r.value),
        }
        .unwrap_or(f64::NAN);
        let m2_exact = dp.as_ref().map_or(f64::NAN, |v| v[level]);
        report.push(vec![
            level.into(),
            index.into(),
            mean.mean.re.into(),
            mean.mean.im.into(),
            mean.stderr.into(),
            mean_exact.into(),
            m2.mean.re.into(),
            m2.stderr.into(),
            m2_exact.into(),
        ]);
    }
    report.plot = Some(PlotSpec {
        title: format!("Monte Carlo second moments, {}", a.driver),
        x: "index".into(),
        y: vec!["m2".into(), "m2_exact".into()],
    });
    Ok(Outcome { report, ok: true })
}
