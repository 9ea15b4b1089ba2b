//! Gauss hypergeometric functions on `[0, 1]` and the boundary solutions
//! of the restricted equation on the unit circle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::{a_sigma, beta_of_gamma, gamma_sigma, PdeParams};
use crate::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

fn nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && (x - x.round()).abs() < 1e-12
}

/// `1/Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

fn gamma_checked(x: f64) -> Result<f64> {
    if nonpositive_integer(x) {
        Err(Error::Degenerate(x))
    } else {
        Ok(gamma(x))
    }
}

fn series(a: f64, b: f64, c: f64, u: f64) -> Result<f64> {
    let (mut term, mut sum) = (1.0, 1.0);
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * u;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        let ratio = ((a + nf + 1.0) * (b + nf + 1.0) / ((c + nf + 1.0) * (nf + 2.0)) * u).abs();
        if nf > a.abs() + b.abs() + c.abs() && ratio < 1.0 && term.abs() * ratio / (1.0 - ratio) < 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Unsupported(format!("2F1({a}, {b}; {c}; {u}) series did not converge")))
}

/// `₂F₁(a, b; c; u)` for `0 ≤ u ≤ 1`: the Gauss series, switching to the
/// `1 − u` connection formula above `u = 3/4` when `c − a − b` is not an
/// integer.
pub fn hyp2f1(a: f64, b: f64, c: f64, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange(format!("2F1 argument {u} outside [0, 1]")));
    }
    if nonpositive_integer(c) {
        return Err(Error::Degenerate(c));
    }
    let s = c - a - b;
    if u <= 0.75 || (s - s.round()).abs() < 1e-9 {
        if u == 1.0 && s <= 0.0 {
            return Err(Error::OutOfRange(format!("2F1 diverges at 1 with c - a - b = {s}")));
        }
        return series(a, b, c, u);
    }
    let v = 1.0 - u;
    let gc = gamma(c);
    let first = gc * gamma(s) * rgamma(c - a) * rgamma(c - b);
    let second = gc * gamma(-s) * rgamma(a) * rgamma(b);
    let mut total = 0.0;
    if first != 0.0 {
        total += first * series(a, b, 1.0 - s, v)?;
    }
    if second != 0.0 {
        if v == 0.0 && s < 0.0 {
            return Err(Error::OutOfRange(format!("2F1 diverges at 1 with c - a - b = {s}")));
        }
        total += second * v.powf(s) * series(c - a, c - b, 1.0 + s, v)?;
    }
    Ok(total)
}

/// `g(x) = (x/4)^γ g0(x/4)` with
/// `g0(u) = F(a, b; c; u) − C0 u^{1/2−a−b} F(a', b'; c'; u)`, the
/// combination regular at `x = 4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryG {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub c0: f64,
    /// `β(γ)`, the exponent paired with `γ`.
    pub beta: f64,
    pub params: PdeParams,
}

/// Builds the boundary solution for exponent `γ` (fold 1 only).
pub fn boundary_g(gamma: f64, params: &PdeParams) -> Result<BoundaryG> {
    if params.m != 1 {
        return Err(Error::Unsupported("boundary solutions are built for m = 1".into()));
    }
    let (gp, gm) = gamma_sigma(params)?;
    let (a, b) = (gamma - gp, gamma - gm);
    let c = 0.5 + a + b;
    let (a1, b1, c1) = (0.5 - b, 0.5 - a, 1.5 - a - b);
    let c0 = gamma_checked(c)? * gamma_checked(a1)? * gamma_checked(b1)? * rgamma(a) * rgamma(b) * rgamma(c1);
    Ok(BoundaryG { gamma, a, b, c, a1, b1, c1, c0, beta: beta_of_gamma(gamma, params.p, params.kappa), params: *params })
}

impl BoundaryG {
    fn s(&self) -> f64 {
        0.5 - self.a - self.b
    }

    /// `g0` and its first two derivatives in `u`.
    pub fn g0_derivs(&self, u: f64) -> Result<[f64; 3]> {
        let (a, b, c) = (self.a, self.b, self.c);
        let f = hyp2f1(a, b, c, u)?;
        let f1 = a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, u)?;
        let f2 = a * b / c * (a + 1.0) * (b + 1.0) / (c + 1.0) * hyp2f1(a + 2.0, b + 2.0, c + 2.0, u)?;
        if self.c0 == 0.0 {
            return Ok([f, f1, f2]);
        }
        let (a1, b1, c1, s) = (self.a1, self.b1, self.c1, self.s());
        let h = hyp2f1(a1, b1, c1, u)?;
        let h1 = a1 * b1 / c1 * hyp2f1(a1 + 1.0, b1 + 1.0, c1 + 1.0, u)?;
        let h2 = a1 * b1 / c1 * (a1 + 1.0) * (b1 + 1.0) / (c1 + 1.0) * hyp2f1(a1 + 2.0, b1 + 2.0, c1 + 2.0, u)?;
        let us = u.powf(s);
        let q = us * h;
        let q1 = us * (s / u * h + h1);
        let q2 = us * (s * (s - 1.0) / (u * u) * h + 2.0 * s / u * h1 + h2);
        Ok([f - self.c0 * q, f1 - self.c0 * q1, f2 - self.c0 * q2])
    }

    pub fn g0(&self, u: f64) -> Result<f64> {
        let f = hyp2f1(self.a, self.b, self.c, u)?;
        if self.c0 == 0.0 {
            return Ok(f);
        }
        if u == 0.0 {
            return if self.s() > 0.0 { Ok(f) } else { Err(Error::OutOfRange("g0 is singular at 0".into())) };
        }
        Ok(f - self.c0 * u.powf(self.s()) * hyp2f1(self.a1, self.b1, self.c1, u)?)
    }

    /// `g(x)` for `0 ≤ x ≤ 4`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=4.0).contains(&x) {
            return Err(Error::OutOfRange(format!("x = {x} outside [0, 4]")));
        }
        let u = x / 4.0;
        Ok(u.powf(self.gamma) * self.g0(u)?)
    }

    /// `g, g', g''` in `x`.
    pub fn derivs(&self, x: f64) -> Result<[f64; 3]> {
        let u = x / 4.0;
        let [g0, g1, g2] = self.g0_derivs(u)?;
        let gm = self.gamma;
        let ug = u.powf(gm);
        let v = ug * g0;
        let v1 = ug * (gm / u * g0 + g1);
        let v2 = ug * (gm * (gm - 1.0) / (u * u) * g0 + 2.0 * gm / u * g1 + g2);
        Ok([v, v1 / 4.0, v2 / 16.0])
    }

    /// Left side of the restricted equation on the unit circle at `x`,
    /// divided by the sum of the magnitudes of its three terms.
    pub fn ode_residual(&self, x: f64) -> Result<f64> {
        let [g, g1, g2] = self.derivs(x)?;
        let (p, k, s) = (self.params.p, self.params.kappa, self.params.sigma as f64);
        let t0 = (p * (2.0 - s * x) - 2.0 * self.beta) * g;
        let t1 = (k / 2.0 * (2.0 - x) - (4.0 - x)) * x * g1;
        let t2 = k / 2.0 * (4.0 - x) * x * x * g2;
        Ok((t0 + t1 + t2) / (t0.abs() + t1.abs() + t2.abs()).max(f64::MIN_POSITIVE))
    }

    /// `g0'(1)/g0(1)` in `u`, forced by regularity at `x = 4`.
    pub fn log_slope_at_four(&self) -> f64 {
        4.0 * a_sigma(self.gamma, &self.params) / self.params.kappa
    }
}

/// `g0(1) = Γ(1/2)Γ(c)/(Γ(1/2+a)Γ(1/2+b)) · (1 − tan πa tan πb)`.
pub fn g0_at_four(a: f64, b: f64) -> Result<f64> {
    let c = 0.5 + a + b;
    Ok(PI.sqrt() * gamma_checked(c)? * rgamma(0.5 + a) * rgamma(0.5 + b) * (1.0 - (PI * a).tan() * (PI * b).tan()))
}
