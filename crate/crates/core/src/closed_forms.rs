//! Exact formulas for coefficient means and quadratic moments, used as
//! oracles for the word engine and the Monte Carlo simulator.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::levy::{EtaScalar, LevySymbol};
use crate::scalars::{Poly, RatFunc, Scalar};
use crate::words::FamilyKind;
use crate::{Error, Result};

/// Which formula produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    MeanProduct,
    OddMeanProduct,
    SecondCoefficient,
    ThirdCoefficientMu,
    ThirdCoefficient,
    FourthCoefficient,
    FifthCoefficient,
    OddFifthCoefficient,
    SchwarzianAtOrigin,
    SleTable,
    TruncatedSeries,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentFormulaResult<S> {
    pub value: S,
    pub provenance: Provenance,
}

impl<S> MomentFormulaResult<S> {
    fn new(value: S, provenance: Provenance) -> Self {
        MomentFormulaResult { value, provenance }
    }
}

fn eta<S: EtaScalar>(symbol: &LevySymbol, k: i64) -> Result<S> {
    symbol.eta_scalar::<S>(k)
}

fn int<S: Scalar>(n: i64) -> S {
    S::from_i64(n)
}

/// `E(a_n) = ∏_{k=0}^{n−2} (η_k − k − 2)/(η_{k+1} + k + 1)`.
pub fn expected_an<S: EtaScalar>(n: usize, symbol: &LevySymbol) -> Result<MomentFormulaResult<S>> {
    if n < 2 {
        return Err(Error::InvalidFamily(format!("a_{n}")));
    }
    let mut acc = S::one();
    for k in 0..=(n as i64 - 2) {
        let num = eta::<S>(symbol, k)? - int(k + 2);
        let den = eta::<S>(symbol, k + 1)? + int(k + 1);
        acc = acc * num * den.recip()?;
    }
    Ok(MomentFormulaResult::new(acc, Provenance::MeanProduct))
}

/// `E(b_{2n+1}) = ∏_{k=0}^{n−1} (η_k − k − 1)/(η_{k+1} + k + 1)`.
pub fn expected_b2n1<S: EtaScalar>(n: usize, symbol: &LevySymbol) -> Result<MomentFormulaResult<S>> {
    if n < 1 {
        return Err(Error::InvalidFamily(format!("b_{}", 2 * n + 1)));
    }
    let mut acc = S::one();
    for k in 0..n as i64 {
        let num = eta::<S>(symbol, k)? - int(k + 1);
        let den = eta::<S>(symbol, k + 1)? + int(k + 1);
        acc = acc * num * den.recip()?;
    }
    Ok(MomentFormulaResult::new(acc, Provenance::OddMeanProduct))
}

/// Low-order quadratic moments available in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum QuadKind {
    A2,
    /// `E|a_3 − μ a_2²|²` for real μ.
    A3Mu(f64),
    A3,
    A4,
    A5,
    B5,
    /// `E|S(0)|²` for the Schwarzian derivative `S(0) = 6(a_3 − a_2²)`.
    Schwarzian0,
}

pub fn quad_moment_small<S: EtaScalar>(kind: QuadKind, symbol: &LevySymbol) -> Result<MomentFormulaResult<S>> {
    let e = |k: i64| eta::<S>(symbol, k);
    let c = |n: i64| int::<S>(n);
    let inv = |x: S| x.recip();
    Ok(match kind {
        QuadKind::A2 => MomentFormulaResult::new(c(4) * inv(c(1) + e(1)?)?, Provenance::SecondCoefficient),
        QuadKind::A3Mu(mu) => {
            let (e1, e2) = (e(1)?, e(2)?);
            let om = c(1) - S::from_f64(mu)?;
            let num = c(32) * om.clone() * om.clone() * (c(3) + e2.clone())
                - c(8) * om * (c(6) + c(2) * e1.clone() + e2.clone())
                + c(2) * (c(1) + e1.clone()) * (c(3) + e1.clone());
            let den = (c(1) + e1.clone()) * (c(2) + e2) * (c(3) + e1);
            MomentFormulaResult::new(num * inv(den)?, Provenance::ThirdCoefficientMu)
        }
        QuadKind::A3 => {
            let (e1, e2) = (e(1)?, e(2)?);
            let inner = c(24) + c(2) * (e1.clone() - c(1)) * (e1.clone() - c(3)) * inv(c(2) + e2)?;
            let den = (c(1) + e1.clone()) * (c(3) + e1);
            MomentFormulaResult::new(inner * inv(den)?, Provenance::ThirdCoefficient)
        }
        QuadKind::A4 => {
            let (e1, e2, e3) = (e(1)?, e(2)?, e(3)?);
            let d1 = (e1.clone() + c(1)) * (e1.clone() + c(3)) * (e1.clone() + c(5));
            let first = c(192) * inv(d1.clone())?;
            let bracket = e2.clone() * (e2.clone() - c(4)) * (e1.clone() + c(3))
                + c(24) * (e2.clone() + c(4)) * (e3.clone() + c(3));
            let num = c(4) * (e1.clone() - c(1)) * (e1 - c(3)) * bracket;
            let den = c(3) * d1 * (e2.clone() + c(2)) * (e2 + c(4)) * (e3 + c(3));
            MomentFormulaResult::new(first + num * inv(den)?, Provenance::FourthCoefficient)
        }
        QuadKind::A5 => {
            let (e1, e2, e3, e4) = (e(1)?, e(2)?, e(3)?, e(4)?);
            let d1 = (e1.clone() + c(1)) * (e1.clone() + c(3)) * (e1.clone() + c(5)) * (e1.clone() + c(7));
            let first = c(1920) * inv(d1.clone())?;
            let lead = (e1.clone() - c(1)) * (e1.clone() - c(3))
                * inv(
                    d1 * (e2.clone() + c(2))
                        * (e2.clone() + c(4))
                        * (e2.clone() + c(6))
                        * (e3.clone() + c(3))
                        * (e3.clone() + c(5)),
                )?;
            let bracket_first = e2.clone()
                * (e2.clone() - c(4))
                * (e2.clone() + c(4))
                * (e1.clone() + c(3))
                * (e1.clone() + c(5))
                * (e3.clone() + c(1))
                * (e3.clone() - c(5))
                * inv(e4 + c(4))?;
            let q = fifth_coefficient_q(&e1, &e2, &e3);
            MomentFormulaResult::new(first + lead * (bracket_first + q), Provenance::FifthCoefficient)
        }
        QuadKind::B5 => {
            let (e1, e2) = (e(1)?, e(2)?);
            // 6 + 3η_2 − η_1 + η_1²/2, kept over a common factor 2.
            let num = c(12) + c(6) * e2.clone() - c(2) * e1.clone() + e1.clone() * e1.clone();
            let den = c(2) * (c(1) + e1.clone()) * (c(3) + e1) * (c(2) + e2);
            MomentFormulaResult::new(num * inv(den)?, Provenance::OddFifthCoefficient)
        }
        QuadKind::Schwarzian0 => MomentFormulaResult::new(c(72) * inv(c(2) + e(2)?)?, Provenance::SchwarzianAtOrigin),
    })
}

fn fifth_coefficient_q<S: Scalar>(e1: &S, e2: &S, e3: &S) -> S {
    // (coefficient, power of η_1, power of η_2, power of η_3)
    const TERMS: [(i64, u32, u32, u32); 28] = [
        (24, 2, 2, 0),
        (9, 2, 1, 2),
        (72, 2, 1, 1),
        (39, 2, 1, 0),
        (36, 2, 0, 2),
        (288, 2, 0, 1),
        (540, 2, 0, 0),
        (19, 1, 3, 1),
        (77, 1, 3, 0),
        (56, 1, 2, 1),
        (472, 1, 2, 0),
        (-36, 1, 1, 2),
        (-816, 1, 1, 1),
        (-3660, 1, 1, 0),
        (-144, 1, 0, 2),
        (-1152, 1, 0, 1),
        (-2160, 1, 0, 0),
        (75, 0, 3, 1),
        (285, 0, 3, 0),
        (348, 0, 2, 2),
        (2952, 0, 2, 1),
        (6420, 0, 2, 0),
        (3507, 0, 1, 2),
        (26184, 0, 1, 1),
        (43245, 0, 1, 0),
        (8460, 0, 0, 2),
        (67680, 0, 0, 1),
        (126900, 0, 0, 0),
    ];
    let pow = |x: &S, k: u32| (0..k).fold(S::one(), |acc, _| acc * x.clone());
    let mut sum = S::zero();
    for &(coef, i, j, k) in TERMS.iter() {
        sum = sum + S::from_i64(coef) * pow(e1, i) * pow(e2, j) * pow(e3, k);
    }
    // Overall factor 4/3.
    sum * S::from_i64(4) * S::from_i64(3).recip().expect("nonzero")
}

struct SleTable {
    scale: (i64, i64),
    numerator: &'static [&'static str],
    /// `(a, b, multiplicity)` for each factor `(aκ + b)^multiplicity`.
    denominator: &'static [(i64, i64, u32)],
}

const SLE_TABLES: [SleTable; 7] = [
    SleTable { scale: (8, 1), numerator: &["1"], denominator: &[(1, 2, 1)] },
    SleTable { scale: (1, 1), numerator: &["1", "88", "108"], denominator: &[(1, 1, 1), (1, 2, 1), (1, 6, 1)] },
    SleTable {
        scale: (8, 9),
        numerator: &["1", "104", "4576", "18288", "22896", "8640"],
        denominator: &[(1, 10, 1), (3, 2, 1), (1, 6, 1), (1, 1, 1), (1, 2, 2)],
    },
    SleTable {
        scale: (1, 36),
        numerator: &["27", "3242", "194336", "6142312", "42644896", "119492832", "153156096", "87882624", "18144000"],
        denominator: &[(1, 14, 1), (3, 2, 1), (1, 10, 1), (2, 1, 1), (1, 6, 1), (1, 3, 1), (1, 1, 1), (1, 2, 2)],
    },
    SleTable {
        scale: (2, 225),
        numerator: &[
            "216",
            "29563",
            "2062556",
            "90749820",
            "2277912280",
            "16419864848",
            "50825787744",
            "76716664128",
            "58263304320",
            "21233664000",
            "2939328000",
        ],
        denominator: &[
            (1, 18, 1),
            (3, 2, 1),
            (1, 14, 1),
            (2, 1, 1),
            (1, 10, 1),
            (1, 6, 1),
            (5, 2, 1),
            (1, 3, 1),
            (1, 1, 1),
            (1, 2, 2),
        ],
    },
    SleTable {
        scale: (1, 8100),
        numerator: &[
            "27000",
            "4479353",
            "373838334",
            "20594712527",
            "787796136854",
            "19121503739240",
            "221861771218136",
            "1386550697705712",
            "5130607642056896",
            "11854768997862912",
            "17547915006086400",
            "16725481436226816",
            "10110569026936320",
            "3711483045734400",
            "749049576192000",
            "63371911680000",
        ],
        denominator: &[
            (1, 22, 1),
            (3, 1, 1),
            (5, 2, 1),
            (1, 18, 1),
            (2, 1, 1),
            (1, 14, 1),
            (3, 2, 1),
            (1, 10, 1),
            (1, 6, 1),
            (1, 5, 1),
            (1, 3, 1),
            (1, 1, 2),
            (1, 2, 3),
        ],
    },
    SleTable {
        scale: (2, 99225),
        numerator: &[
            "729000",
            "143757261",
            "14031668642",
            "906444920407",
            "42715714646750",
            "1476227672190480",
            "34674813906653712",
            "471116720002819536",
            "3802657434377773600",
            "19218418658636100992",
            "63191729416067875840",
            "138392538501661946112",
            "204258207932541043200",
            "203508494170475323392",
            "135640094878259859456",
            "59063686024095313920",
            "16005106174366310400",
            "2435069931098112000",
            "158176291553280000",
        ],
        denominator: &[
            (7, 2, 1),
            (5, 2, 1),
            (1, 26, 1),
            (3, 1, 1),
            (1, 22, 1),
            (2, 1, 1),
            (1, 18, 1),
            (1, 14, 1),
            (3, 2, 1),
            (1, 10, 1),
            (1, 5, 1),
            (1, 3, 1),
            (1, 6, 2),
            (1, 1, 2),
            (1, 2, 3),
        ],
    },
];

/// Stored SLE rational functions `E(|a_n|²)(κ)` for `2 ≤ n ≤ 8`.
pub fn sle_reference(n: usize) -> Result<RatFunc> {
    if !(2..=8).contains(&n) {
        return Err(Error::OutOfRange(format!("stored SLE moments cover 2 <= n <= 8, got {n}")));
    }
    let t = &SLE_TABLES[n - 2];
    let coeffs: Vec<BigInt> = t
        .numerator
        .iter()
        .rev()
        .map(|s| s.parse::<BigInt>().expect("valid integer literal"))
        .collect();
    let num = Poly::from_coeffs(coeffs).scale(&BigInt::from(t.scale.0));
    let den = t
        .denominator
        .iter()
        .fold(Poly::from_i64s(&[t.scale.1]), |acc, &(a, b, m)| acc * Poly::linear(a, b).pow(m));
    RatFunc::new(num, den)
}

/// `S_n = 1 + Σ_{j=2}^{n} j·E(a_j)`, the truncated series of `E f'` at `z = 1`.
pub fn truncated_series_sn<S: EtaScalar>(n: usize, symbol: &LevySymbol) -> Result<MomentFormulaResult<S>> {
    if n < 1 {
        return Err(Error::OutOfRange("S_n needs n >= 1".into()));
    }
    let mut acc = S::one();
    for j in 2..=n {
        acc = acc + S::from_i64(j as i64) * expected_an::<S>(j, symbol)?.value;
    }
    Ok(MomentFormulaResult::new(acc, Provenance::TruncatedSeries))
}

/// The one-term form `−(η_n + n)·E(a_{n+1})/2` of `S_n`.
pub fn truncated_series_sn_closed<S: EtaScalar>(n: usize, symbol: &LevySymbol) -> Result<S> {
    let factor = eta::<S>(symbol, n as i64)? + S::from_i64(n as i64);
    let half = S::from_i64(2).recip()?;
    Ok(-(factor * half * expected_an::<S>(n + 1, symbol)?.value))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyDegree {
    Finite(usize),
    Infinite,
}

pub const DEGREE_SCAN_CAP: usize = 64;

/// Degree of `E f_0` (whole-plane) or `E h_0` (oddified) when it is a polynomial.
pub fn expected_map_poly_degree(symbol: &LevySymbol, family: FamilyKind, cap: usize) -> PolyDegree {
    for k in 1..=cap {
        let Ok(e) = symbol.eta(k as i64) else { break };
        let target = match family {
            FamilyKind::WholePlane => k as f64 + 2.0,
            FamilyKind::Oddified => k as f64 + 1.0,
        };
        if (e - target).abs() <= 1e-12 * target {
            return PolyDegree::Finite(match family {
                FamilyKind::WholePlane => k + 1,
                FamilyKind::Oddified => 2 * k + 1,
            });
        }
    }
    PolyDegree::Infinite
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> LevySymbol {
        LevySymbol::sle_symbolic()
    }

    fn rf(num: &[i64], den: Poly) -> RatFunc {
        RatFunc::new(Poly::from_i64s(num), den).unwrap()
    }

    #[test]
    fn mean_products_sle() {
        let a2 = expected_an::<RatFunc>(2, &sym()).unwrap().value;
        assert_eq!(a2, rf(&[-4], Poly::linear(1, 2)));
        let a3 = expected_an::<RatFunc>(3, &sym()).unwrap().value;
        assert_eq!(a3, rf(&[6, -1], Poly::linear(1, 1) * Poly::linear(1, 2)));
        let b3 = expected_b2n1::<RatFunc>(1, &sym()).unwrap().value;
        assert_eq!(b3, rf(&[-2], Poly::linear(1, 2)));
        let b5 = expected_b2n1::<RatFunc>(2, &sym()).unwrap().value;
        assert_eq!(b5, rf(&[4, -1], Poly::linear(2, 2) * Poly::linear(1, 2)));
    }

    #[test]
    fn mean_vanishes_at_resonant_levels() {
        let t = LevySymbol::table(vec![0.0, 1.2, 3.4, 5.0, 7.0]).unwrap();
        assert_eq!(expected_an::<f64>(5, &t).unwrap().value, 0.0);
        let t = LevySymbol::table(vec![0.0, 2.0, 3.4, 5.0]).unwrap();
        assert_eq!(expected_b2n1::<f64>(3, &t).unwrap().value, 0.0);
    }

    #[test]
    fn quadratic_examples() {
        let mu1 = quad_moment_small::<RatFunc>(QuadKind::A3Mu(1.0), &sym()).unwrap().value;
        assert_eq!(mu1, rf(&[1], Poly::linear(1, 1)));
        let s0 = quad_moment_small::<RatFunc>(QuadKind::Schwarzian0, &sym()).unwrap().value;
        assert_eq!(s0, rf(&[36], Poly::linear(1, 1)));
        let b5 = quad_moment_small::<RatFunc>(QuadKind::B5, &sym()).unwrap().value;
        let den = Poly::from_i64s(&[4]) * Poly::linear(1, 1) * Poly::linear(1, 2) * Poly::linear(1, 6);
        assert_eq!(b5, rf(&[48, 44, 1], den));
        let a4 = quad_moment_small::<f64>(QuadKind::A4, &LevySymbol::sle(2.0)).unwrap().value;
        assert!((a4 - 4.0).abs() < 1e-13);
    }

    #[test]
    fn third_coefficient_forms_agree() {
        for eta in [[0.0, 0.3, 2.2], [0.0, 5.0, 1.0], [0.0, 1.7, 9.3]] {
            let t = LevySymbol::table(eta.to_vec()).unwrap();
            let a = quad_moment_small::<f64>(QuadKind::A3, &t).unwrap().value;
            let b = quad_moment_small::<f64>(QuadKind::A3Mu(0.0), &t).unwrap().value;
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn stored_tables_at_special_kappas() {
        use num_rational::BigRational;
        for n in 2..=8 {
            let f = sle_reference(n).unwrap();
            assert_eq!(f.eval_at_int(6).unwrap(), BigRational::from_integer(1.into()), "n = {n} at 6");
            assert_eq!(f.eval_at_int(2).unwrap(), BigRational::from_integer((n as i64).into()), "n = {n} at 2");
        }
        assert!(sle_reference(9).is_err());
    }

    #[test]
    fn truncated_series_values() {
        let s1 = truncated_series_sn::<RatFunc>(1, &sym()).unwrap().value;
        assert_eq!(s1, RatFunc::one());
        let s2 = truncated_series_sn::<f64>(2, &LevySymbol::sle(6.0)).unwrap().value;
        assert!(s2.abs() < 1e-15);
        for n in 1..8 {
            let lhs = truncated_series_sn::<RatFunc>(n, &sym()).unwrap().value;
            assert_eq!(lhs, truncated_series_sn_closed::<RatFunc>(n, &sym()).unwrap());
        }
    }

    #[test]
    fn polynomial_degrees() {
        assert_eq!(expected_map_poly_degree(&LevySymbol::sle(6.0), FamilyKind::WholePlane, 64), PolyDegree::Finite(2));
        assert_eq!(expected_map_poly_degree(&LevySymbol::sle(2.0), FamilyKind::WholePlane, 64), PolyDegree::Finite(3));
        assert_eq!(expected_map_poly_degree(&LevySymbol::sle(4.0), FamilyKind::Oddified, 64), PolyDegree::Finite(3));
        assert_eq!(expected_map_poly_degree(&LevySymbol::sle(7.3), FamilyKind::WholePlane, 64), PolyDegree::Infinite);
    }
}
