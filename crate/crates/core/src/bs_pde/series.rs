//! Coefficient moments read off the explicit solutions: exact series,
//! Taylor extraction on a torus, integral means and the Lévy generator
//! check on the finitely many chiral modes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ClosedFormParams;
use crate::scalars::RatFunc;
use crate::words::{level_dp, FamilyKind};
use crate::{Error, LevySymbol, Result};

/// Which `p = 2` family a `(κ, m)` pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesFamily {
    /// `κ = 2m`.
    Convolution,
    /// `κ = 2(m+2)/m`.
    Product,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesEntry {
    pub k: usize,
    /// Coefficient index `mk + 1`.
    pub n: usize,
    pub exact: BigRational,
    pub value: f64,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `λ_0(α), …, λ_len(α)` with `(1 − x)^α = Σ λ_k(α) x^k`.
fn binomial_series(alpha: &BigRational, len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for k in 0..len {
        let kq = BigRational::from_integer(k.into());
        let next = out[k].clone() * (kq.clone() - alpha) / (kq + BigRational::one());
        out.push(next);
    }
    out
}

fn family_of(kappa: f64, m: u32) -> Option<SeriesFamily> {
    let mf = m as f64;
    if (kappa - 2.0 * (mf + 2.0) / mf).abs() < 1e-12 {
        Some(SeriesFamily::Product)
    } else if (kappa - 2.0 * mf).abs() < 1e-12 {
        Some(SeriesFamily::Convolution)
    } else {
        None
    }
}

/// Exact `E|a_{mk+1}|²` for `k = 0..count` on the two `p = 2` families of
/// the m-fold map.
pub fn series_coefficients(kappa: f64, m: u32, count: usize) -> Result<(SeriesFamily, Vec<SeriesEntry>)> {
    if m == 0 {
        return Err(Error::OutOfRange("fold m must be at least 1".into()));
    }
    if count > 200 {
        return Err(Error::OutOfRange(format!("count = {count} exceeds 200")));
    }
    let family = family_of(kappa, m).ok_or_else(|| {
        Error::Unsupported(format!(
            "no exact series at kappa = {kappa}, m = {m} (needs kappa = {} or {}); use the Monte Carlo estimator",
            2 * m,
            2.0 * (m as f64 + 2.0) / m as f64
        ))
    })?;
    let mi = m as i64;
    let mut out = Vec::with_capacity(count);
    match family {
        SeriesFamily::Convolution => {
            let l2 = binomial_series(&rat(2, mi), count);
            let l4 = binomial_series(&rat(-4, mi), count);
            for k in 0..count {
                let mut s = BigRational::zero();
                for j in 0..=k {
                    s += l2[j].clone() * l2[j].clone() * l4[k - j].abs();
                }
                let n = mi * k as i64 + 1;
                out.push((k, s / BigRational::from_integer((n * n).into())));
            }
        }
        SeriesFamily::Product => {
            let mut prod = BigRational::one();
            for k in 0..count {
                let n = mi * k as i64 + 1;
                out.push((k, prod.clone() / BigRational::from_integer(n.into())));
                prod = prod * rat(mi * k as i64 + 2, mi * (k as i64 + 1));
            }
        }
    }
    let entries = out
        .into_iter()
        .map(|(k, exact)| SeriesEntry { k, n: m as usize * k + 1, value: exact.to_f64().unwrap_or(f64::NAN), exact })
        .collect();
    Ok((family, entries))
}

/// Diagonal Taylor coefficients `c_jj` of the explicit solution in
/// `z^j z̄^j`, `j = 0..=j_max`, from a discrete Fourier transform on the
/// torus `|z| = |w| = radius` with `z̄` replaced by an independent `w`.
/// For the whole-plane map `c_{n−1,n−1} = n² E|a_n|²`.
pub fn taylor_diagonal(kappa: f64, m: u32, j_max: usize, radius: f64, grid: usize) -> Result<Vec<f64>> {
    if !(radius > 0.0 && radius < 1.0) || grid < 2 * (j_max + 1) {
        return Err(Error::OutOfRange(format!("radius {radius}, grid {grid}")));
    }
    let cf = ClosedFormParams::new(kappa, m)?;
    let one = Complex64::new(1.0, 0.0);
    let theta = |a: usize| 2.0 * PI * a as f64 / grid as f64;
    // G(z, w) = E(z) E(w) Q(zw): the cross factor depends on the angle sum only.
    let e: Vec<Complex64> =
        (0..grid).map(|a| (cf.alpha * (one - Complex64::from_polar(radius, theta(a)).powu(m)).ln()).exp()).collect();
    let r2m = radius.powi(2 * m as i32);
    let mut h = vec![Complex64::new(0.0, 0.0); grid];
    for (s, hs) in h.iter_mut().enumerate() {
        let q = (-cf.beta * (one - Complex64::from_polar(r2m, m as f64 * theta(s))).ln()).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..grid {
            acc += e[a] * e[(s + grid - a) % grid];
        }
        *hs = q * acc;
    }
    let norm = (grid * grid) as f64;
    Ok((0..=j_max)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, hs) in h.iter().enumerate() {
                acc += hs * Complex64::from_polar(1.0, -(j as f64) * theta(s));
            }
            acc.re / norm / radius.powi(2 * j as i32)
        })
        .collect())
}

/// `1 − r` log-spaced from 0.1 to 0.001, 40 radii.
pub fn default_radii() -> Vec<f64> {
    (0..40).map(|i| 1.0 - 0.1 * (0.01f64).powf(i as f64 / 39.0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFit {
    pub slope: f64,
    pub intercept: f64,
    /// 2-norm condition number of the least-squares design matrix.
    pub condition_number: f64,
    pub radii: Vec<f64>,
    pub means: Vec<f64>,
}

/// Circle means of `f` by the trapezoid rule and a least-squares fit of
/// `log mean` against `−log(1 − r)`.
pub fn fit_integral_means<F: Fn(Complex64) -> f64>(f: F, radii: &[f64], nodes: usize) -> Result<MeanFit> {
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::OutOfRange("need at least two radii in (0, 1)".into()));
    }
    let means: Vec<f64> = radii
        .iter()
        .map(|&r| (0..nodes).map(|j| f(Complex64::from_polar(r, 2.0 * PI * j as f64 / nodes as f64))).sum::<f64>() / nodes as f64)
        .collect();
    let t: Vec<f64> = radii.iter().map(|r| -(1.0 - r).ln()).collect();
    let y: Vec<f64> = means.iter().map(|v| v.ln()).collect();
    let n = t.len() as f64;
    let (st, sy) = (t.iter().sum::<f64>(), y.iter().sum::<f64>());
    let stt = t.iter().map(|v| v * v).sum::<f64>();
    let sty = t.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    let det = n * stt - st * st;
    let slope = (n * sty - st * sy) / det;
    let intercept = (sy - slope * st) / n;
    // Eigenvalues of the 2×2 normal matrix; cond(X) is the root of their ratio.
    let (tr, half_gap) = (n + stt, (((n - stt) / 2.0).powi(2) + st * st).sqrt());
    let condition_number = ((tr / 2.0 + half_gap) / (tr / 2.0 - half_gap)).sqrt();
    Ok(MeanFit { slope, intercept, condition_number, radii: radii.to_vec(), means })
}

/// Rational integral mean `Σ_k numer_k r^{2k} / (1 − r^{2q})^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanRational {
    pub numer: Vec<BigInt>,
    pub q: u32,
    pub exponent: u32,
}

impl MeanRational {
    pub fn eval(&self, r: f64) -> f64 {
        let t = r * r;
        let num = self.numer.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64().unwrap_or(f64::NAN));
        num / (1.0 - t.powi(self.q as i32)).powi(self.exponent as i32)
    }
}

impl fmt::Display for MeanRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.numer.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            let coef = if mag.is_one() && k > 0 { String::new() } else { format!("{mag} ") };
            let mono = match k {
                0 => String::new(),
                1 => "r^2".to_string(),
                _ => format!("r^{}", 2 * k),
            };
            parts.push((sign, format!("{coef}{mono}").trim().to_string()));
        }
        let mut num = String::new();
        for (i, (sign, body)) in parts.iter().enumerate() {
            match (i, *sign) {
                (0, "-") => num.push_str(&format!("-{body}")),
                (0, _) => num.push_str(body),
                _ => num.push_str(&format!(" {sign} {body}")),
            }
        }
        write!(f, "({num})/(1 - r^{})^{}", 2 * self.q, self.exponent)
    }
}

/// Exact `E (1/2π)∫|f'(re^{iθ})|² dθ` for the whole-plane map (`m = 1`)
/// or the oddified map (`m = 2`), found by multiplying the coefficient
/// series by powers of `1 − r^{2m}` until it terminates.
pub fn exact_integral_mean(kappa: f64, m: u32) -> Result<MeanRational> {
    const LEVELS: usize = 24;
    let symbol = LevySymbol::sle(kappa);
    let to_q = |v: &RatFunc| v.eval_at_int(0);
    // Coefficients s_j of t^j, t = r².
    let mut s = vec![BigRational::zero(); LEVELS];
    match m {
        1 => {
            let v = level_dp::<RatFunc>(FamilyKind::WholePlane, &symbol, LEVELS)?;
            for n in 1..=LEVELS {
                s[n - 1] = to_q(&v[n])? * BigRational::from_integer(((n * n) as i64).into());
            }
        }
        2 => {
            let v = level_dp::<RatFunc>(FamilyKind::Oddified, &symbol, LEVELS / 2)?;
            for k in 0..LEVELS / 2 {
                let n = (2 * k + 1) as i64;
                s[2 * k] = to_q(&v[k])? * BigRational::from_integer((n * n).into());
            }
        }
        _ => return Err(Error::Unsupported(format!("exact integral means for m = {m}"))),
    }
    let q = m as usize;
    let mut cur = s;
    for e in 1..=8u32 {
        // Multiply by (1 − t^q).
        let mut next = cur.clone();
        for j in q..next.len() {
            next[j] = cur[j].clone() - cur[j - q].clone();
        }
        cur = next;
        let last = cur.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        if last + 8 <= LEVELS {
            if cur[..=last].iter().any(|c| !c.denom().is_one()) {
                return Err(Error::Unsupported("non-integral numerator".into()));
            }
            let numer = cur[..=last].iter().map(|c| c.numer().clone()).collect();
            return Ok(MeanRational { numer, q: m, exponent: e });
        }
    }
    Err(Error::Unsupported(format!("integral mean at kappa = {kappa}, m = {m} is not rational of low order")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralMeans {
    pub kappa: f64,
    pub m: u32,
    pub p: f64,
    /// Exponent of the explicit solution, the spectrum at `p`.
    pub beta: f64,
    pub fit: MeanFit,
    /// Rational closed form, when one exists.
    pub exact: Option<String>,
}

/// Fitted integral-means exponent of the explicit solution at `p = p_m(κ)`.
pub fn integral_means_estimate(kappa: f64, m: u32, radii: &[f64]) -> Result<IntegralMeans> {
    let cf = ClosedFormParams::new(kappa, m)?;
    let fit = fit_integral_means(|z| cf.eval_zeta(z.powu(m)), radii, 1 << 16)?;
    let exact = match (m, cf.p) {
        (1 | 2, p) if (p - 2.0).abs() < 1e-12 => exact_integral_mean(kappa, m).ok().map(|r| r.to_string()),
        _ => None,
    };
    Ok(IntegralMeans { kappa, m, p: cf.p, beta: cf.beta, fit, exact })
}

/// Chiral modes `z^k z̄^l` with exact coefficients.
pub type Modes = BTreeMap<(u32, u32), BigRational>;

fn binom(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Modes of `(1 − z^m)^α (1 − z̄^m)^α` for integral `α`; the remaining
/// factor depends on `zz̄` only and every generator leaves it alone.
pub fn closed_form_modes(kappa: f64, m: u32) -> Result<Modes> {
    let cf = ClosedFormParams::new(kappa, m)?;
    let a = cf.alpha.round();
    if (cf.alpha - a).abs() > 1e-12 || a < 0.0 {
        return Err(Error::Unsupported(format!("alpha = {} is not a nonnegative integer", cf.alpha)));
    }
    let a = a as u32;
    let mut out = Modes::new();
    for i in 0..=a {
        for j in 0..=a {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let c = BigRational::from_integer(binom(a, i) * binom(a, j) * sign);
            out.insert((m * i, m * j), c);
        }
    }
    Ok(out)
}

fn mode_frequency(k: u32, l: u32, m: u32) -> Result<i64> {
    let d = k as i64 - l as i64;
    if d % m as i64 != 0 {
        return Err(Error::Unsupported(format!("mode ({k}, {l}) is not {m}-fold symmetric")));
    }
    Ok(d / m as i64)
}

fn prune(mut modes: Modes) -> Modes {
    modes.retain(|_, c| !c.is_zero());
    modes
}

/// `Λ[z^k z̄^l] = −η((k − l)/m) z^k z̄^l`, exactly.
pub fn levy_generator(symbol: &LevySymbol, modes: &Modes, m: u32) -> Result<Modes> {
    let mut out = Modes::new();
    for (&(k, l), c) in modes {
        let eta = symbol.eta(mode_frequency(k, l, m)?)?;
        let eta = BigRational::from_float(eta).ok_or_else(|| Error::Unsupported(format!("eta = {eta}")))?;
        out.insert((k, l), -(c.clone() * eta));
    }
    Ok(prune(out))
}

/// Brownian generator `(κ/2)∂²_θ` in the m-fold angle, exactly.
pub fn brownian_generator(kappa: f64, modes: &Modes, m: u32) -> Result<Modes> {
    let half = BigRational::from_float(kappa / 2.0).ok_or_else(|| Error::OutOfRange(format!("kappa = {kappa}")))?;
    let mut out = Modes::new();
    for (&(k, l), c) in modes {
        let d = BigRational::from_integer(mode_frequency(k, l, m)?.into());
        out.insert((k, l), -(c.clone() * half.clone() * d.clone() * d));
    }
    Ok(prune(out))
}

/// Whether the Lévy generator acts on the explicit SLE_κ solution exactly as
/// the Brownian one does, so the two processes share these moments.
pub fn lle_transfer_check(symbol: &LevySymbol, kappa: f64, m: u32) -> Result<bool> {
    let modes = closed_form_modes(kappa, m)?;
    Ok(levy_generator(symbol, &modes, m)? == brownian_generator(kappa, &modes, m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_series_of_square() {
        let l = binomial_series(&rat(2, 1), 4);
        assert_eq!(l, vec![rat(1, 1), rat(-2, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn mean_rational_display() {
        let r = MeanRational { numer: vec![1.into(), 4.into(), 1.into()], q: 1, exponent: 4 };
        assert_eq!(r.to_string(), "(1 + 4 r^2 + r^4)/(1 - r^2)^4");
    }
}
