//! The Beliaev–Smirnov operator for whole-plane SLE and its m-fold
//! variants: explicit solutions, power-law actions, the boundary
//! hypergeometric solutions and the transition they signal.

mod hyper;
mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scalars::Scalar;
use crate::spectra;
use crate::{Error, Result};

pub use hyper::{boundary_g, g0_at_four, hyp2f1, rgamma, BoundaryG};
pub use series::{
    brownian_generator, closed_form_modes, default_radii, exact_integral_mean, fit_integral_means,
    integral_means_estimate, levy_generator, lle_transfer_check, series_coefficients, taylor_diagonal,
    IntegralMeans, MeanFit, MeanRational, Modes, SeriesEntry, SeriesFamily,
};

/// Default finite-difference step in the angle; the radial step is a tenth of it.
pub const FD_STEP: f64 = 2e-3;

/// Parameters of `P_m(D)`: moment order, diffusivity, interior (`σ = −1`)
/// or exterior (`σ = +1`) problem, and fold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeParams {
    pub p: f64,
    pub kappa: f64,
    pub sigma: i8,
    pub m: u32,
}

impl PdeParams {
    pub fn new(p: f64, kappa: f64, sigma: i8, m: u32) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::OutOfRange(format!("kappa = {kappa} must be positive")));
        }
        if sigma != 1 && sigma != -1 {
            return Err(Error::OutOfRange(format!("sigma = {sigma} must be +1 or -1")));
        }
        if m == 0 {
            return Err(Error::OutOfRange("fold m must be at least 1".into()));
        }
        if !p.is_finite() {
            return Err(Error::OutOfRange(format!("p = {p} must be finite")));
        }
        Ok(PdeParams { p, kappa, sigma, m })
    }

    /// Interior whole-plane problem.
    pub fn interior(p: f64, kappa: f64, m: u32) -> Result<Self> {
        Self::new(p, kappa, -1, m)
    }

    fn sig(&self) -> f64 {
        self.sigma as f64
    }

    fn mf(&self) -> f64 {
        self.m as f64
    }

    /// Zeroth-order part of the operator at `ζ`.
    pub fn potential(&self, zeta: Complex64) -> f64 {
        let w = (Complex64::new(1.0, 0.0) - zeta).inv();
        let m = self.mf();
        self.p / m * ((m - 1.0) * 2.0 * w.re - m * 2.0 * (w * w).re + 1.0 - self.sig())
    }
}

/// `ψ = (1 − ζζ̄)^{−β} |1 − ζ|^{2γ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawAnsatz {
    pub gamma: f64,
    pub beta: f64,
}

impl PowerLawAnsatz {
    /// The ansatz on the curve `β = β(γ)`.
    pub fn on_curve(gamma: f64, params: &PdeParams) -> Self {
        PowerLawAnsatz { gamma, beta: beta_of_gamma(gamma, params.p, params.kappa) }
    }

    pub fn eval(&self, zeta: Complex64) -> f64 {
        self.eval_polar(zeta.norm(), zeta.arg())
    }

    /// Polar evaluation; `x = (1 − ρ)² + 4ρ sin²(φ/2)` avoids cancellation near 1.
    pub fn eval_polar(&self, rho: f64, phi: f64) -> f64 {
        let x = (1.0 - rho).powi(2) + 4.0 * rho * (phi / 2.0).sin().powi(2);
        ((1.0 - rho) * (1.0 + rho)).powf(-self.beta) * x.powf(self.gamma)
    }
}

/// `A_m(γ)`, `B_m(γ)`, `C(γ)` in any scalar field; they sum to zero.
pub fn abc<S: Scalar>(gamma: &S, p: &S, kappa: &S, m: u32) -> Result<(S, S, S)> {
    let two = S::from_i64(2);
    let half_k = kappa.div(&two)?;
    let inv_m = S::one().div(&S::from_i64(m as i64))?;
    let g2 = gamma.clone() * gamma.clone();
    let a = -(half_k.clone() * g2) + gamma.clone() + p.clone() * inv_m.clone();
    let b = half_k.clone() * gamma.clone() * (two.clone() * gamma.clone() - S::one()) - S::from_i64(3) * gamma.clone()
        + (S::one() - inv_m) * p.clone();
    let c = -(half_k * gamma.clone() * (gamma.clone() - S::one())) + two * gamma.clone() - p.clone();
    Ok((a, b, c))
}

/// `β(γ) = κγ²/2 − C(γ)`.
pub fn beta_of_gamma(gamma: f64, p: f64, kappa: f64) -> f64 {
    kappa * gamma * gamma - (kappa / 2.0 + 2.0) * gamma + p
}

/// `C(γ)`; vanishes at `γ0±`.
pub fn c_of_gamma(gamma: f64, p: f64, kappa: f64) -> f64 {
    -kappa / 2.0 * gamma * (gamma - 1.0) + 2.0 * gamma - p
}

/// `A_m(γ)`.
pub fn a_of_gamma(gamma: f64, p: f64, kappa: f64, m: u32) -> f64 {
    -kappa / 2.0 * gamma * gamma + gamma + p / m as f64
}

/// `A^σ_m(γ) = A_m(γ) − (1 + σ)p/m`.
pub fn a_sigma(gamma: f64, params: &PdeParams) -> f64 {
    a_of_gamma(gamma, params.p, params.kappa, params.m) - (1.0 + params.sig()) * params.p / params.mf()
}

/// Roots `γ^σ±` of `A^σ_m`.
pub fn gamma_sigma(params: &PdeParams) -> Result<(f64, f64)> {
    let d = 1.0 - 2.0 * params.sig() * params.kappa * params.p / params.mf();
    if d < 0.0 {
        return Err(Error::ComplexBranch(format!("1 - 2 sigma kappa p / m = {d:e} < 0")));
    }
    let s = d.sqrt();
    Ok(((1.0 + s) / params.kappa, (1.0 - s) / params.kappa))
}

/// Roots `γ0±` of `C`; the minus root is computed without cancellation.
pub fn gamma0_pm(p: f64, kappa: f64) -> Result<(f64, f64)> {
    let d = (4.0 + kappa).powi(2) - 8.0 * kappa * p;
    if d < 0.0 {
        return Err(Error::ComplexBranch(format!("(4 + kappa)^2 - 8 kappa p = {d:e} < 0")));
    }
    let s = d.sqrt();
    Ok(((4.0 + kappa + s) / (2.0 * kappa), 4.0 * p / (4.0 + kappa + s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a_m: f64,
    pub b_m: f64,
    pub c: f64,
    pub beta_of_gamma: f64,
    pub a_sigma: f64,
    pub gamma_plus: Option<f64>,
    pub gamma_minus: Option<f64>,
    pub beta_plus: Option<f64>,
    pub beta_minus: Option<f64>,
    pub gamma0_plus: Option<f64>,
    pub gamma0_minus: Option<f64>,
}

/// Coefficients at `γ`, with the real branches that exist.
pub fn coefficients_abc(gamma: f64, params: &PdeParams) -> Result<Coefficients> {
    let (a_m, b_m, c) = abc::<f64>(&gamma, &params.p, &params.kappa, params.m)?;
    let (p, k) = (params.p, params.kappa);
    let roots = gamma_sigma(params).ok();
    let roots0 = gamma0_pm(p, k).ok();
    Ok(Coefficients {
        a_m,
        b_m,
        c,
        beta_of_gamma: beta_of_gamma(gamma, p, k),
        a_sigma: a_sigma(gamma, params),
        gamma_plus: roots.map(|r| r.0),
        gamma_minus: roots.map(|r| r.1),
        beta_plus: roots.map(|r| beta_of_gamma(r.0, p, k)),
        beta_minus: roots.map(|r| beta_of_gamma(r.1, p, k)),
        gamma0_plus: roots0.map(|r| r.0),
        gamma0_minus: roots0.map(|r| r.1),
    })
}

/// The explicit m-fold solution: `α`, `β` and the forced order `p_m(κ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormParams {
    pub kappa: f64,
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
}

impl ClosedFormParams {
    pub fn new(kappa: f64, m: u32) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() || m == 0 {
            return Err(Error::OutOfRange(format!("kappa = {kappa}, m = {m}")));
        }
        let mf = m as f64;
        let alpha = (2.0 * mf + 4.0 + kappa) / ((mf + 1.0) * kappa);
        Ok(ClosedFormParams { kappa, m, alpha, beta: kappa * alpha * alpha / 2.0, p: spectra::p_m_special(kappa, m) })
    }

    /// `E|h'|^p` as a function of `ζ = z^m`.
    pub fn eval_zeta(&self, zeta: Complex64) -> f64 {
        self.ansatz().eval(zeta)
    }

    pub fn ansatz(&self) -> PowerLawAnsatz {
        PowerLawAnsatz { gamma: self.alpha, beta: self.beta }
    }

    pub fn pde_params(&self) -> PdeParams {
        PdeParams { p: self.p, kappa: self.kappa, sigma: -1, m: self.m }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    /// `E[(h')^{p/2}] = (1 − z^m)^α`.
    pub holomorphic: Complex64,
    /// `E|h'|^p`.
    pub modulus: f64,
    pub params: ClosedFormParams,
}

/// Derivative moments of the m-fold map at `z`, at `p = p_m(κ)`.
pub fn closed_form_f(z: Complex64, kappa: f64, m: u32) -> Result<ClosedForm> {
    if z.norm() >= 1.0 {
        return Err(Error::OutOfRange(format!("|z| = {} is not inside the disk", z.norm())));
    }
    let params = ClosedFormParams::new(kappa, m)?;
    let zeta = z.powu(m);
    let one = Complex64::new(1.0, 0.0);
    Ok(ClosedForm { holomorphic: (one - zeta).powf(params.alpha), modulus: params.eval_zeta(zeta), params })
}

/// Finite-difference value of `P_m(D)[F]` and its size relative to `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub f: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.f.abs().max(f64::MIN_POSITIVE)
    }
}

fn polar_operator<F: Fn(f64, f64) -> f64>(f: &F, rho: f64, phi: f64, h: f64, params: &PdeParams) -> (f64, f64) {
    let f0 = f(rho, phi);
    let zeta = Complex64::from_polar(rho, phi);
    let v = params.potential(zeta);
    if rho < 1e-12 {
        return (v * f0, f0);
    }
    let hr = (h / 10.0).min(rho / 2.0);
    let fr = (f(rho + hr, phi) - f(rho - hr, phi)) / (2.0 * hr);
    let (fp, fm) = (f(rho, phi + h), f(rho, phi - h));
    let ft = (fp - fm) / (2.0 * h);
    let ftt = (fp - 2.0 * f0 + fm) / (h * h);
    let d = (1.0 - rho).powi(2) + 4.0 * rho * (phi / 2.0).sin().powi(2);
    let value = params.kappa / 2.0 * ftt + (rho * rho - 1.0) * rho / d * fr - 2.0 * rho * phi.sin() / d * ft + v * f0;
    (value, f0)
}

/// `P_m(D)[F]` at `ζ = z^m` by central differences in `(ρ, φ)` with one
/// Richardson step. `F` is a function of `ζ`.
pub fn apply_operator<F: Fn(Complex64) -> f64>(f: F, z: Complex64, params: &PdeParams, h: f64) -> Result<Residual> {
    let zeta = z.powu(params.m);
    apply_operator_polar(|r, t| f(Complex64::from_polar(r, t)), zeta.norm(), zeta.arg(), params, h)
}

/// As [`apply_operator`], with `F` given in polar coordinates of `ζ`.
pub fn apply_operator_polar<F: Fn(f64, f64) -> f64>(
    f: F,
    rho: f64,
    phi: f64,
    params: &PdeParams,
    h: f64,
) -> Result<Residual> {
    let margin = 10.0 * h;
    if 1.0 - rho < margin {
        return Err(Error::TooClose(format!("|zeta| = {rho} is within {margin} of the unit circle")));
    }
    if (Complex64::new(1.0, 0.0) - Complex64::from_polar(rho, phi)).norm() < margin {
        return Err(Error::TooClose(format!("|1 - zeta| < {margin}")));
    }
    let (coarse, f0) = polar_operator(&f, rho, phi, h, params);
    let (fine, _) = polar_operator(&f, rho, phi, h / 2.0, params);
    Ok(Residual { value: (4.0 * fine - coarse) / 3.0, f: f0 })
}

/// `count` points with `0 < |z| ≤ r_max`: rings of equal angular count,
/// rotated a quarter step off the real axis.
pub fn disk_grid(count: usize, r_max: f64) -> Vec<Complex64> {
    let rings = ((count as f64).sqrt().floor() as usize).max(1);
    let per_ring = count.div_ceil(rings);
    let mut out = Vec::with_capacity(count);
    'outer: for i in 1..=rings {
        for j in 0..per_ring {
            if out.len() == count {
                break 'outer;
            }
            let r = r_max * i as f64 / rings as f64;
            out.push(Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / per_ring as f64));
        }
    }
    out
}

/// Relative finite-difference residual of the explicit solution for `(κ, m)`
/// at each point of `grid`.
pub fn closed_form_residuals(kappa: f64, m: u32, grid: &[Complex64]) -> Result<Vec<(Complex64, f64)>> {
    let cf = ClosedFormParams::new(kappa, m)?;
    let params = cf.pde_params();
    let ansatz = cf.ansatz();
    grid.iter()
        .map(|&z| {
            let zeta = z.powu(m);
            let r = apply_operator_polar(|rho, phi| ansatz.eval_polar(rho, phi), zeta.norm(), zeta.arg(), &params, FD_STEP)?;
            Ok((z, r.relative()))
        })
        .collect()
}

/// `P_m(D)[ψ]/ψ` split as `t1·(2/x) + t2·((1−ζζ̄)/x)² + t3·(1−ζζ̄)/x + t4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawAction {
    pub terms: [f64; 4],
    pub value: f64,
}

/// Closed-form action of the operator on a power-law ansatz at `ζ = z^m`.
pub fn action_on_power_law(ansatz: PowerLawAnsatz, z: Complex64, params: &PdeParams) -> Result<PowerLawAction> {
    let zeta = z.powu(params.m);
    if zeta.norm() >= 1.0 {
        return Err(Error::OutOfRange(format!("|zeta| = {} is not inside the disk", zeta.norm())));
    }
    let x = (Complex64::new(1.0, 0.0) - zeta).norm_sqr();
    if x == 0.0 {
        return Err(Error::TooClose("zeta = 1".into()));
    }
    let (g, b) = (ansatz.gamma, ansatz.beta);
    let (p, k) = (params.p, params.kappa);
    let bg = beta_of_gamma(g, p, k);
    let c = c_of_gamma(g, p, k);
    let a = a_of_gamma(g, p, k, params.m);
    let terms = [bg - b, c, 2.0 * b - 2.0 * bg - a - c, a_sigma(g, params)];
    let w = (1.0 - zeta.norm_sqr()) / x;
    let value = terms[0] * 2.0 / x + terms[1] * w * w + terms[2] * w + terms[3];
    Ok(PowerLawAction { terms, value })
}

/// `P(D)[ψ ℓ_δ]/(ψ ℓ_δ)` with `ℓ_δ = [−log(1 − ζζ̄)]^δ`.
pub fn action_with_log(ansatz: PowerLawAnsatz, delta: f64, z: Complex64, params: &PdeParams) -> Result<f64> {
    let base = action_on_power_law(ansatz, z, params)?.value;
    let zeta = z.powu(params.m);
    let r2 = zeta.norm_sqr();
    if r2 == 0.0 {
        return Ok(base - 2.0 * delta / (Complex64::new(1.0, 0.0) - zeta).norm_sqr());
    }
    let x = (Complex64::new(1.0, 0.0) - zeta).norm_sqr();
    Ok(base - 2.0 * r2 * delta / (x * -(-r2).ln_1p()))
}

/// `1/2 − b0(p) = 1/2 + 2/κ − γ+(p) − γ0(p)` for the interior problem.
pub fn half_minus_b0(p: f64, kappa: f64) -> Result<f64> {
    let gp = (1.0 + (1.0 + 2.0 * kappa * p).sqrt()) / kappa;
    Ok(0.5 + 2.0 / kappa - gp - spectra::gamma0(p, kappa)?)
}

/// The order at which the positive boundary solution stops existing, by
/// bisection on `1/2 − b0`.
pub fn transition_from_b0(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 200.0) {
        return Err(Error::OutOfRange(format!("kappa = {kappa} outside (0, 200]")));
    }
    let (mut lo, mut hi) = (0.0, (4.0 + kappa).powi(2) / (8.0 * kappa));
    if !(half_minus_b0(lo, kappa)? > 0.0 && half_minus_b0(hi, kappa)? < 0.0) {
        return Err(Error::Bracket(format!("1/2 - b0 keeps its sign on [{lo}, {hi}]")));
    }
    while hi - lo > 1e-13 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if half_minus_b0(mid, kappa)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerBranch {
    Minus,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    /// `P[ψℓ] < 0` throughout.
    Subsolution,
    /// `P[ψℓ] > 0` throughout.
    Supersolution,
    /// `P[ψ] = 0`.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub branch: PowerBranch,
    pub p: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub beta: f64,
    /// `C(γ) = κγ²/2 − β`.
    pub c: f64,
    pub delta: f64,
    pub expected: SignPattern,
    pub lens_samples: usize,
    /// Inner radius of the sampled annulus.
    pub annulus_inner: f64,
    pub annulus_samples: usize,
    /// Offending points `(z, P[ψℓ]/(ψℓ))`.
    pub failures: Vec<(Complex64, f64)>,
    pub holds: bool,
}

/// Smallest `r ≥ 0.95` beyond which the logarithmic term `2r²/(−log(1−r²))`
/// outweighs the bound `|C|(1 − r²)` on the power-law term outside the lens.
fn annulus_inner(c: f64) -> f64 {
    let dominated = |r: f64| {
        let u = 1.0 - r * r;
        c.abs() * u * -u.ln() < 2.0 * r * r
    };
    if dominated(0.95) {
        return 0.95;
    }
    let (mut lo, mut hi) = (0.95f64, 1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dominated(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Samples `P(D)[ψ± ℓ_δ]` inside `{1 − zz̄ − x > 0}` and on the annulus
/// `r_in ≤ |z| ≤ 1 − (1 − r_in)/50`, `r_in` from [`annulus_inner`] (0.95
/// unless `|C|` is large), and checks the uniform sign. `δ = None` picks
/// `|δ| = 1` with the sign matching the lens.
pub fn sign_regions_check(branch: PowerBranch, p: f64, kappa: f64, delta: Option<f64>) -> Result<SignReport> {
    let params = PdeParams::interior(p, kappa, 1)?;
    let (gp, gm) = gamma_sigma(&params)?;
    let gamma = match branch {
        PowerBranch::Plus => gp,
        PowerBranch::Minus => gm,
    };
    let ansatz = PowerLawAnsatz::on_curve(gamma, &params);
    let c = c_of_gamma(gamma, p, kappa);
    let exact = c.abs() < 1e-12;
    let expected = if exact {
        SignPattern::Exact
    } else if c > 0.0 {
        SignPattern::Supersolution
    } else {
        SignPattern::Subsolution
    };
    let delta = delta.unwrap_or(if exact { 0.0 } else { -c.signum() });

    let mut lens = Vec::new();
    for i in 1..=19 {
        let s = 0.05 * i as f64;
        for j in 0..36 {
            let t = 2.0 * PI * (j as f64 + 0.5) / 36.0;
            lens.push(Complex64::new(0.5, 0.0) + Complex64::from_polar(0.5 * s, t));
        }
    }
    let inner = if exact { 0.95 } else { annulus_inner(c) };
    let mut annulus = Vec::new();
    for i in 0..25 {
        let r = 1.0 - (1.0 - inner) * (0.02f64).powf(i as f64 / 24.0);
        for j in 0..180 {
            annulus.push(Complex64::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / 180.0));
        }
    }
    let mut failures = Vec::new();
    for &z in lens.iter().chain(annulus.iter()) {
        let v = action_with_log(ansatz, delta, z, &params)?;
        let ok = match expected {
            SignPattern::Subsolution => v < 0.0,
            SignPattern::Supersolution => v > 0.0,
            SignPattern::Exact => v.abs() < 1e-10,
        };
        if !ok {
            failures.push((z, v));
        }
    }
    Ok(SignReport {
        branch,
        p,
        kappa,
        gamma,
        beta: ansatz.beta,
        c,
        delta,
        expected,
        lens_samples: lens.len(),
        annulus_inner: inner,
        annulus_samples: annulus.len(),
        holds: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::RatFunc;

    #[test]
    fn abc_sum_cancels_exactly() {
        for (g, p, k, m) in [(0.75, 2.0, 6.0, 1), (-1.25, 0.5, 3.0, 3), (3.5, -2.0, 0.125, 7)] {
            let s = |x: f64| RatFunc::from_f64(x).unwrap();
            let (a, b, c) = abc::<RatFunc>(&s(g), &s(p), &s(k), m).unwrap();
            assert!((a + b + c).is_zero());
        }
    }

    #[test]
    fn percolation_branch() {
        let params = PdeParams::interior(2.0, 6.0, 1).unwrap();
        let c = coefficients_abc(1.0, &params).unwrap();
        assert_eq!(c.gamma_plus, Some(1.0));
        assert!((c.beta_plus.unwrap() - 3.0).abs() < 1e-15);
        assert!(c.a_m.abs() < 1e-15 && c.c.abs() < 1e-15);
    }

    #[test]
    fn closed_form_values() {
        let f = closed_form_f(Complex64::new(0.5, 0.0), 6.0, 1).unwrap();
        assert!((f.holomorphic.re - 0.5).abs() < 1e-15);
        assert!((f.modulus - 0.25 / 0.75f64.powi(3)).abs() < 1e-14);
        let f = closed_form_f(Complex64::new(0.0, 0.0), 4.0, 2).unwrap();
        assert_eq!((f.holomorphic.re, f.modulus), (1.0, 1.0));
        let f = closed_form_f(Complex64::new(0.3, 0.0), 8.0, 4).unwrap();
        assert_eq!((f.params.alpha, f.params.beta), (0.5, 1.0));
        assert!((f.modulus - 1.0 / (1.0 + 0.3f64.powi(4))).abs() < 1e-15);
    }

    #[test]
    fn operator_kills_constants_at_p_zero() {
        let params = PdeParams::interior(0.0, 3.0, 2).unwrap();
        let r = apply_operator(|_| 1.0, Complex64::new(0.3, -0.4), &params, FD_STEP).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn operator_refuses_boundary_points() {
        let params = PdeParams::interior(1.0, 3.0, 1).unwrap();
        assert!(matches!(apply_operator(|_| 1.0, Complex64::new(0.995, 0.0), &params, FD_STEP), Err(Error::TooClose(_))));
    }

    #[test]
    fn transition_matches_closed_form() {
        let p = transition_from_b0(6.0).unwrap();
        assert!((p - spectra::p_m_star(6.0, 1)).abs() < 1e-12, "{p}");
        assert!(half_minus_b0(p - 0.1, 6.0).unwrap() > 0.0 && half_minus_b0(p + 0.1, 6.0).unwrap() < 0.0);
    }
}
