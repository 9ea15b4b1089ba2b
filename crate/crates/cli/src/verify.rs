//! The cross-check suite behind `verify-all`.

use std::time::Instant;

use anyhow::Result;
use loewner_core::bs_pde::{
    closed_form_residuals, disk_grid, series_coefficients, sign_regions_check, transition_from_b0, PowerBranch,
};
use loewner_core::closed_forms::{quad_moment_small, sle_reference, truncated_series_sn, truncated_series_sn_closed, QuadKind};
use loewner_core::mc::{coefficients_one_path, estimate_moments, sample_path, Driver, McConfig, Statistic};
use loewner_core::spectra::{p_m_special, p_m_star};
use loewner_core::words::{level_dp, second_moment, second_moment_exact, CoeffFamily};
use loewner_core::{FamilyKind, LevySymbol};
use serde_json::json;

use crate::output::Report;
use crate::{Outcome, VerifyArgs};

fn stored_tables() -> Result<(bool, String)> {
    let sym = LevySymbol::sle_symbolic();
    let mut bad = Vec::new();
    for n in 2..=8 {
        if second_moment_exact(CoeffFamily::a(n), &sym)? != sle_reference(n)? {
            bad.push(n);
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "n = 2..8 equal".into() } else { format!("differ at n = {bad:?}") }))
}

fn closed_forms_vs_words() -> Result<(bool, String)> {
    let symbols = ["sle:6", "sle:2", "sle:0.7", "stable:1.5:2", "dendritic", "bp:4:0.5"];
    let mut worst = 0.0f64;
    for s in symbols {
        let sym: LevySymbol = s.parse()?;
        for (kind, fam) in [
            (QuadKind::A2, CoeffFamily::a(2)),
            (QuadKind::A3, CoeffFamily::a(3)),
            (QuadKind::A4, CoeffFamily::a(4)),
            (QuadKind::A5, CoeffFamily::a(5)),
            (QuadKind::B5, CoeffFamily::b(2)),
        ] {
            let (c, w) = (quad_moment_small::<f64>(kind, &sym)?.value, second_moment::<f64>(fam, &sym)?);
            worst = worst.max((c - w).abs() / c.abs().max(1.0));
        }
        for n in 1..=8 {
            let (c, w) = (truncated_series_sn_closed::<f64>(n, &sym)?, truncated_series_sn::<f64>(n, &sym)?.value);
            worst = worst.max((c - w).abs() / c.abs().max(1.0));
        }
    }
    Ok((worst < 1e-12, format!("max relative difference {worst:.2e}")))
}

fn level_recursion() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let a6 = level_dp::<f64>(FamilyKind::WholePlane, &LevySymbol::sle(6.0), 19)?;
    let a2 = level_dp::<f64>(FamilyKind::WholePlane, &LevySymbol::sle(2.0), 19)?;
    for n in 2..=19 {
        worst = worst.max((a6[n] - 1.0).abs()).max((a2[n] - n as f64).abs() / n as f64);
    }
    let b4 = level_dp::<f64>(FamilyKind::Oddified, &LevySymbol::sle(4.0), 9)?;
    for (n, v) in b4.iter().enumerate().skip(1) {
        worst = worst.max((v * (2 * n + 1) as f64 - 1.0).abs());
    }
    Ok((worst < 1e-9, format!("max deviation {worst:.2e}")))
}

fn series_vs_recursion() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (kappa, m) in [(6.0, 1u32), (2.0, 1), (4.0, 2)] {
        let (_, entries) = series_coefficients(kappa, m, 15)?;
        let sym = LevySymbol::sle(kappa);
        let dp = if m == 1 {
            level_dp::<f64>(FamilyKind::WholePlane, &sym, 16)?
        } else {
            level_dp::<f64>(FamilyKind::Oddified, &sym, 15)?
        };
        for e in entries {
            let v = if m == 1 { dp[e.k + 1] } else { dp[e.k] };
            worst = worst.max((e.value - v).abs() / v.abs().max(1.0));
        }
    }
    Ok((worst < 1e-10, format!("max relative difference {worst:.2e}")))
}

fn pde_residuals() -> Result<(bool, String)> {
    let grid = disk_grid(100, 0.9);
    let mut worst = 0.0f64;
    for (m, kappa) in [(1, 6.0), (1, 2.0), (2, 4.0), (3, 6.0), (3, 10.0 / 3.0), (4, 8.0), (4, 3.0)] {
        for (_, r) in closed_form_residuals(kappa, m, &grid)? {
            worst = worst.max(r);
        }
    }
    Ok((worst < 1e-8, format!("max relative residual {worst:.2e}")))
}

fn transitions() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for kappa in [1.0, 2.0, 4.0, 6.0, 8.0, 16.0] {
        worst = worst.max((transition_from_b0(kappa)? - p_m_star(kappa, 1)).abs());
    }
    Ok((worst < 1e-10, format!("max difference {worst:.2e}")))
}

fn sign_regions() -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let special = p_m_special(6.0, 1);
    for (branch, p) in [
        (PowerBranch::Minus, 1.0),
        (PowerBranch::Minus, 3.0),
        (PowerBranch::Plus, 1.0),
        (PowerBranch::Plus, 3.0),
        (PowerBranch::Plus, special),
    ] {
        let r = sign_regions_check(branch, p, 6.0, None)?;
        if !r.holds {
            failures.push(format!("{branch:?} at p = {p}: {} points", r.failures.len()));
        }
    }
    Ok((failures.is_empty(), if failures.is_empty() { "all sampled points".into() } else { failures.join("; ") }))
}

fn koebe() -> Result<(bool, String)> {
    let p = sample_path(&Driver::brownian(0.0), 20.0, 1.0 / 16384.0, 0, 0)?;
    let a = coefficients_one_path(&p, 8, FamilyKind::WholePlane);
    let worst = a
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let n = (j + 2) as f64;
            (c.re - if j % 2 == 0 { -n } else { n }).abs() + c.im.abs()
        })
        .fold(0.0, f64::max);
    Ok((worst < 1e-6, format!("max deviation {worst:.2e}")))
}

fn mc_smoke(samples: usize, threads: Option<usize>) -> Result<(bool, String)> {
    let mut cfg = McConfig::new(Driver::brownian(6.0), 4, samples, 2024, FamilyKind::WholePlane);
    cfg.threads = threads;
    let table = estimate_moments(&cfg)?;
    let mut worst = 0.0f64;
    for n in 2..=4 {
        let e = table.get(n, Statistic::SecondMoment).expect("estimated");
        worst = worst.max((e.mean.re - 1.0).abs() / e.stderr);
    }
    Ok((worst < 4.0, format!("max |z| = {worst:.2} over E|a_n|^2, n <= 4, {samples} samples")))
}

pub fn verify_all(name: &str, cfg: serde_json::Value, a: &VerifyArgs, threads: Option<usize>) -> Result<Outcome> {
    let samples = if a.quick { 2_000 } else { 20_000 };
    let suite: Vec<(&str, Box<dyn Fn() -> Result<(bool, String)>>)> = vec![
        ("symbolic moments vs stored SLE tables", Box::new(stored_tables)),
        ("closed forms vs word engine", Box::new(closed_forms_vs_words)),
        ("level recursion exact moments", Box::new(level_recursion)),
        ("series formulas vs level recursion", Box::new(series_vs_recursion)),
        ("explicit PDE solutions", Box::new(pde_residuals)),
        ("transition root", Box::new(transitions)),
        ("sign regions", Box::new(sign_regions)),
        ("Koebe limit of the simulator", Box::new(koebe)),
        ("Monte Carlo smoke test", Box::new(move || mc_smoke(samples, threads))),
    ];
    let mut report = Report::new(name, cfg, &["check", "pass", "detail", "seconds"]);
    let mut ok = true;
    for (label, f) in suite {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e:#}")),
        };
        let secs = start.elapsed().as_secs_f64();
        if !pass {
            eprintln!("FAIL {label}: {detail}");
        }
        ok &= pass;
        report.push(vec![label.into(), pass.to_string().into(), detail.into(), secs.into()]);
    }
    report.summary = json!({ "pass": ok });
    Ok(Outcome { report, ok })
}
