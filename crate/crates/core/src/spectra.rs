//! Average integral means spectra of whole-plane SLE and its m-fold
//! transforms, with their transition points, packing spectra and the
//! universal bounds they must respect.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumQuery {
    pub p: f64,
    pub kappa: f64,
    pub m: u32,
}

impl SpectrumQuery {
    pub fn new(p: f64, kappa: f64, m: u32) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::OutOfRange(format!("kappa = {kappa} must be finite and nonnegative")));
        }
        if m == 0 {
            return Err(Error::OutOfRange("fold m must be at least 1".into()));
        }
        if !p.is_finite() {
            return Err(Error::OutOfRange(format!("p = {p} must be finite")));
        }
        Ok(SpectrumQuery { p, kappa, m })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Tip,
    BulkBeta0,
    LinearBeta0Hat,
    UnboundedBm,
}

/// How firmly the returned value is established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Equal to the spectrum by theorem (or at a special point where both bounds meet).
    Exact,
    /// Only a one-sided bound is proven here; the value is the predicted spectrum.
    ConjecturedExact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumValue {
    pub value: f64,
    pub regime: Regime,
    pub m: u32,
    pub status: Status,
    /// Where the piece containing `p` starts (`-inf` for the tip piece).
    pub from: f64,
}

impl SpectrumValue {
    /// Text label such as `bulk_beta0` or `unbounded_B2`.
    pub fn label(&self) -> String {
        match self.regime {
            Regime::Tip => "tip".into(),
            Regime::BulkBeta0 => "bulk_beta0".into(),
            Regime::LinearBeta0Hat => "linear_beta0hat".into(),
            Regime::UnboundedBm => format!("unbounded_B{}", self.m),
        }
    }
}

impl fmt::Display for SpectrumValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.label())
    }
}

/// Bulk spectrum pieces at one `(p, κ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bulk {
    pub gamma0: f64,
    pub beta0: f64,
    pub beta0_hat: f64,
    pub beta0_bar: f64,
    pub p0_star: f64,
}

/// `γ_0(p, κ)` in the rationalized form `4p / (4 + κ + √D)`, which has the
/// right limit `p/2` as `κ → 0`.
pub fn gamma0(p: f64, kappa: f64) -> Result<f64> {
    let a = 4.0 + kappa;
    let disc = a * a - 8.0 * kappa * p;
    if disc < 0.0 {
        return Err(Error::BeyondBulk(p));
    }
    Ok(4.0 * p / (a + disc.sqrt()))
}

pub fn beta0(p: f64, kappa: f64) -> Result<f64> {
    let g = gamma0(p, kappa)?;
    Ok(kappa / 2.0 * g * g)
}

pub fn beta0_hat(p: f64, kappa: f64) -> f64 {
    let a = 4.0 + kappa;
    p - a * a / (16.0 * kappa)
}

pub fn p0_star(kappa: f64) -> f64 {
    let a = 4.0 + kappa;
    3.0 * a * a / (32.0 * kappa)
}

pub fn bulk_spectrum(p: f64, kappa: f64) -> Result<Bulk> {
    let gamma0 = gamma0(p, kappa)?;
    let beta0 = kappa / 2.0 * gamma0 * gamma0;
    let beta0_hat = beta0_hat(p, kappa);
    let p0_star = p0_star(kappa);
    let beta0_bar = if p >= p0_star { beta0_hat } else { beta0 };
    Ok(Bulk { gamma0, beta0, beta0_hat, beta0_bar, p0_star })
}

/// Tip spectrum `−p − 1 + κγ_0/2`, valid for `p ≤ −1 − 3κ/8`.
pub fn beta_tip(p: f64, kappa: f64) -> Result<f64> {
    Ok(-p - 1.0 + kappa / 2.0 * gamma0(p, kappa)?)
}

/// Unbounded-part spectrum `B_m(p, κ) = (1 + 2/m)p − 1/2 − √(1 + 2κp/m)/2`.
pub fn b_m(p: f64, kappa: f64, m: u32) -> Result<f64> {
    let m = m as f64;
    let arg = 1.0 + 2.0 * kappa * p / m;
    if arg < 0.0 {
        return Err(Error::ComplexBranch(format!("1 + 2 kappa p / m = {arg} < 0")));
    }
    Ok((1.0 + 2.0 / m) * p - 0.5 - 0.5 * arg.sqrt())
}

/// Where the tip spectrum takes over from the bulk one.
pub fn tip_transition(kappa: f64) -> f64 {
    -1.0 - 3.0 * kappa / 8.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transitions {
    pub kappa: f64,
    pub m: u32,
    /// `p_1^*(κ)`, where `B_1` overtakes `β_0`.
    pub p_star: f64,
    /// `p_m^*(κ)`, where `B_m` overtakes `β_0`.
    pub p_m_star: f64,
    /// `m(κ² − 16)/(32κ)`, where `B_m` overtakes `β̂_0`.
    pub p_m_double_star: f64,
    /// Whether `p_m^{**}` is the active transition (`m ≥ 4` and `κ ≥ κ_m`).
    pub double_star_active: bool,
    /// `4(m + 3)/(m − 3)`, defined for `m ≥ 4`.
    pub kappa_m: Option<f64>,
    /// Special point `p(κ) = (6 + κ)(2 + κ)/(8κ)`.
    pub p_special: f64,
    /// Special point `p_m(κ)` of the m-fold map.
    pub p_m_special: f64,
    pub p0_star: f64,
    pub tip: f64,
}

/// `p_m^*(κ)` in the factored form; at κ = 0 the limit `m/(m + 2)` (Koebe kink).
pub fn p_m_star(kappa: f64, m: u32) -> f64 {
    let mf = m as f64;
    if kappa == 0.0 {
        return mf / (mf + 2.0);
    }
    let a = 4.0 + kappa;
    let r = ((mf + 1.0) * a * a + 4.0 * mf * mf).sqrt();
    mf / (8.0 * kappa * (mf + 1.0).powi(2)) * (r - 2.0 * mf - 4.0) * (r + 2.0 * mf)
}

pub fn kappa_m(m: u32) -> Option<f64> {
    (m >= 4).then(|| 4.0 * (m as f64 + 3.0) / (m as f64 - 3.0))
}

pub fn p_m_special(kappa: f64, m: u32) -> f64 {
    let mf = m as f64;
    mf * (2.0 * mf + 4.0 + kappa) * (2.0 + kappa) / (2.0 * (mf + 1.0).powi(2) * kappa)
}

/// All transition and special points; points that run off to infinity as
/// κ → 0 are reported as `+inf` there.
pub fn transition_points(kappa: f64, m: u32) -> Result<Transitions> {
    SpectrumQuery::new(0.0, kappa, m)?;
    let km = kappa_m(m);
    let p_m_double_star = m as f64 * (kappa * kappa - 16.0) / (32.0 * kappa);
    Ok(Transitions {
        kappa,
        m,
        p_star: p_m_star(kappa, 1),
        p_m_star: p_m_star(kappa, m),
        p_m_double_star,
        double_star_active: km.is_some_and(|k| kappa >= k),
        kappa_m: km,
        p_special: p_m_special(kappa, 1),
        p_m_special: p_m_special(kappa, m),
        p0_star: p0_star(kappa),
        tip: tip_transition(kappa),
    })
}

/// Piecewise average integral means spectrum `β_m(p, κ)`.
///
/// Ties at a transition point take the regime on the right.
pub fn whole_plane_spectrum(q: SpectrumQuery) -> Result<SpectrumValue> {
    let SpectrumQuery { p, kappa, m } = SpectrumQuery::new(q.p, q.kappa, q.m)?;
    let t = transition_points(kappa, m)?;
    let make = |value, regime, status, from| SpectrumValue { value, regime, m, status, from };
    if kappa == 0.0 {
        // Koebe spectra.
        let mf = m as f64;
        return Ok(if p < -1.0 {
            make(-p - 1.0, Regime::Tip, Status::Exact, f64::NEG_INFINITY)
        } else if p < t.p_m_star {
            make(0.0, Regime::BulkBeta0, Status::Exact, -1.0)
        } else {
            make((1.0 + 2.0 / mf) * p - 1.0, Regime::UnboundedBm, Status::Exact, t.p_m_star)
        });
    }
    if p < t.tip {
        return Ok(make(beta_tip(p, kappa)?, Regime::Tip, Status::Exact, f64::NEG_INFINITY));
    }
    let unbounded = |from: f64| -> Result<SpectrumValue> {
        let status = if p == t.p_m_special { Status::Exact } else { Status::ConjecturedExact };
        Ok(make(b_m(p, kappa, m)?, Regime::UnboundedBm, status, from))
    };
    if t.double_star_active {
        if p < t.p0_star {
            Ok(make(beta0(p, kappa)?, Regime::BulkBeta0, Status::Exact, t.tip))
        } else if p < t.p_m_double_star {
            Ok(make(beta0_hat(p, kappa), Regime::LinearBeta0Hat, Status::Exact, t.p0_star))
        } else {
            unbounded(t.p_m_double_star)
        }
    } else if p < t.p_m_star {
        Ok(make(beta0(p, kappa)?, Regime::BulkBeta0, Status::Exact, t.tip))
    } else {
        unbounded(t.p_m_star)
    }
}

/// Packing spectrum `s(p, κ) = 2p + 1/2 − √(1 + 2κp)/2` of the unbounded piece.
pub fn packing(p: f64, kappa: f64) -> Result<f64> {
    let arg = 1.0 + 2.0 * kappa * p;
    if arg < 0.0 {
        return Err(Error::ComplexBranch(format!("1 + 2 kappa p = {arg} < 0")));
    }
    Ok(2.0 * p + 0.5 - 0.5 * arg.sqrt())
}

/// m-fold packing spectrum `s(p/m, κ)`.
pub fn packing_m(p: f64, kappa: f64, m: u32) -> Result<f64> {
    packing(p / m as f64, kappa)
}

pub fn s_min(kappa: f64) -> f64 {
    -(4.0 - kappa).powi(2) / (16.0 * kappa)
}

pub fn p_min(kappa: f64) -> f64 {
    (kappa - 4.0) * (kappa + 4.0) / (32.0 * kappa)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `p ≥ p_min`, containing the physical range `p ≥ p^*`.
    Plus,
    Minus,
}

fn inverse_root(s: f64, kappa: f64) -> Result<f64> {
    if s < s_min(kappa) {
        return Err(Error::BelowBranchPoint(s));
    }
    // At the branch point itself the discriminant can round below zero.
    Ok(((4.0 - kappa).powi(2) + 16.0 * kappa * s).max(0.0).sqrt())
}

/// `U_κ^{-1}(s) = (κ − 4 + √((4 − κ)² + 16κs))/(2κ)`.
pub fn u_inverse(s: f64, kappa: f64) -> Result<f64> {
    Ok((kappa - 4.0 + inverse_root(s, kappa)?) / (2.0 * kappa))
}

/// Inverse of the packing spectrum on the chosen branch.
pub fn packing_inverse(s: f64, kappa: f64, branch: Branch) -> Result<f64> {
    let r = inverse_root(s, kappa)?;
    let sign = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    Ok(s / 2.0 + (kappa - 4.0 + sign * r) / 16.0)
}

/// Physical-branch inverse `p(s, κ) = s/2 + (κ/8) U_κ^{-1}(s)`.
pub fn p_of_s(s: f64, kappa: f64) -> Result<f64> {
    Ok(s / 2.0 + kappa / 8.0 * u_inverse(s, kappa)?)
}

/// m-fold inverse `m · p(s, κ)`.
pub fn p_m_of_s(s: f64, kappa: f64, m: u32) -> Result<f64> {
    Ok(m as f64 * p_of_s(s, kappa)?)
}

/// Radial derivative exponent `ν(s, κ)`.
pub fn nu(s: f64, kappa: f64) -> Result<f64> {
    packing_inverse(s, kappa, Branch::Plus)
}

/// Exponent of `sin(θ/2)` in the derivative-moment asymptotics; equals `U_κ^{-1}(s)`.
pub fn q_exponent(s: f64, kappa: f64) -> Result<f64> {
    u_inverse(s, kappa)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingSummary {
    pub s_m: f64,
    pub p_m: f64,
    pub u_inverse: f64,
    pub nu: f64,
    pub q: f64,
    pub s_min: f64,
    pub p_min: f64,
}

/// Packing spectrum at `p` together with the inverse quantities at `s`.
pub fn packing_and_inverse(p: f64, s: f64, kappa: f64, m: u32) -> Result<PackingSummary> {
    SpectrumQuery::new(p, kappa, m)?;
    if kappa == 0.0 {
        return Err(Error::OutOfRange("the inverse packing spectrum needs kappa > 0".into()));
    }
    Ok(PackingSummary {
        s_m: packing_m(p, kappa, m)?,
        p_m: p_m_of_s(s, kappa, m)?,
        u_inverse: u_inverse(s, kappa)?,
        nu: nu(s, kappa)?,
        q: q_exponent(s, kappa)?,
        s_min: s_min(kappa),
        p_min: p_min(kappa),
    })
}

/// Threshold `2m/(m + 4)` above which the universal bound is asserted.
pub fn universal_threshold(m: u32) -> f64 {
    2.0 * m as f64 / (m as f64 + 4.0)
}

/// Universal spectrum bound `(1 + 2/m)p − 1` for m-fold symmetric maps.
pub fn universal_bound(p: f64, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::OutOfRange("fold m must be at least 1".into()));
    }
    if p < universal_threshold(m) {
        return Err(Error::BoundNotAsserted(p));
    }
    Ok((1.0 + 2.0 / m as f64) * p - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn beta(p: f64, kappa: f64, m: u32) -> SpectrumValue {
        whole_plane_spectrum(SpectrumQuery::new(p, kappa, m).unwrap()).unwrap()
    }

    #[test]
    fn bulk_at_kappa_six() {
        let b = bulk_spectrum(1.0, 6.0).unwrap();
        assert_relative_eq!(b.gamma0, (10.0 - 52f64.sqrt()) / 12.0, epsilon = 1e-15);
        assert_relative_eq!(b.beta0, -1.0 + 5.0 * b.gamma0, epsilon = 1e-14);
        let b = bulk_spectrum(2.0, 6.0).unwrap();
        assert_relative_eq!(b.gamma0, 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(b.beta0, 4.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(p0_star(6.0), 75.0 / 48.0, epsilon = 1e-15);
        let at = bulk_spectrum(75.0 / 48.0, 6.0).unwrap();
        assert!((at.beta0 - at.beta0_hat).abs() < 1e-12);
        assert!(matches!(bulk_spectrum(3.0, 6.0), Err(Error::BeyondBulk(_))));
    }

    #[test]
    fn second_moment_exponents() {
        let v = beta(2.0, 6.0, 1);
        assert_relative_eq!(v.value, 3.0, epsilon = 1e-14);
        assert_eq!(v.label(), "unbounded_B1");
        assert_relative_eq!(beta(2.0, 2.0, 1).value, 4.0, epsilon = 1e-14);
        assert_relative_eq!(beta(2.0, 0.0, 1).value, 5.0, epsilon = 1e-14);
        assert_relative_eq!(beta(2.0, 4.0, 2).value, 2.0, epsilon = 1e-14);
        assert_relative_eq!(beta(1.0, 0.0, 1).value, 2.0);
        assert_relative_eq!(beta(1.0, 1e-9, 1).value, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn transition_values() {
        let t = transition_points(6.0, 1).unwrap();
        assert_relative_eq!(t.p_star, (96.0 - 2.0 * 204f64.sqrt()) / 96.0, epsilon = 1e-14);
        assert_relative_eq!(t.p_special, 2.0, epsilon = 1e-15);
        assert_relative_eq!(transition_points(4.0, 2).unwrap().p_m_special, 2.0, epsilon = 1e-15);
        // The unfactored expression for p_1^*.
        let a = 10.0f64;
        let unf = (a * a - 4.0 - 2.0 * (2.0 * a * a + 4.0).sqrt()) / 96.0;
        assert_relative_eq!(t.p_star, unf, epsilon = 1e-14);
        assert_eq!(t.kappa_m, None);
        assert_eq!(kappa_m(5), Some(16.0));
    }

    #[test]
    fn koebe_limit_of_first_transition() {
        for m in 1..8 {
            let t = p_m_star(1e-7, m);
            assert_relative_eq!(t, m as f64 / (m as f64 + 2.0), epsilon = 1e-6);
        }
    }

    #[test]
    fn regimes_and_ties() {
        let k = 6.0;
        assert_eq!(beta(-5.0, k, 1).regime, Regime::Tip);
        assert_eq!(beta(tip_transition(k), k, 1).regime, Regime::BulkBeta0);
        let t = transition_points(k, 1).unwrap();
        assert_eq!(beta(t.p_star, k, 1).regime, Regime::UnboundedBm);
        assert_eq!(beta(t.p_star, k, 1).status, Status::ConjecturedExact);
        assert_eq!(beta(t.p_special, k, 1).status, Status::Exact);
        // m = 5, κ = 20 ≥ κ_5 = 16 passes through the linear piece.
        let t = transition_points(20.0, 5).unwrap();
        assert!(t.double_star_active);
        let mid = 0.5 * (t.p0_star + t.p_m_double_star);
        assert_eq!(beta(mid, 20.0, 5).regime, Regime::LinearBeta0Hat);
        assert_eq!(beta(t.p_m_double_star + 0.1, 20.0, 5).regime, Regime::UnboundedBm);
    }

    #[test]
    fn packing_examples() {
        assert_relative_eq!(u_inverse(1.0, 6.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(p_of_s(1.0, 6.0).unwrap(), 1.25, epsilon = 1e-15);
        assert_relative_eq!(nu(1.0, 6.0).unwrap(), 1.25, epsilon = 1e-15);
        assert!(matches!(p_of_s(-10.0, 6.0), Err(Error::BelowBranchPoint(_))));
        let sm = s_min(6.0);
        assert_relative_eq!(packing_inverse(sm, 6.0, Branch::Plus).unwrap(), p_min(6.0), epsilon = 1e-14);
        assert_relative_eq!(packing_inverse(sm, 6.0, Branch::Minus).unwrap(), p_min(6.0), epsilon = 1e-14);
        // The branch point is accepted even when the discriminant rounds negative.
        for kappa in [0.25, 0.5, 1.75, 2.75, 11.0, 37.5] {
            assert_relative_eq!(u_inverse(s_min(kappa), kappa).unwrap(), (kappa - 4.0) / (2.0 * kappa), epsilon = 1e-7);
        }
    }

    #[test]
    fn universal_examples() {
        assert_eq!(universal_bound(1.0, 1).unwrap(), 2.0);
        assert_eq!(universal_bound(2.0, 2).unwrap(), 3.0);
        assert!(matches!(universal_bound(0.1, 1), Err(Error::BoundNotAsserted(_))));
    }
}
