//! Lévy symbols η evaluated at integer frequencies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalars::{FactoredRatFunc, Poly, RatFunc, Scalar};
use crate::{Error, Result};

/// SLE diffusivity: a numeric value or the formal variable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kappa {
    Value(f64),
    Symbolic,
}

/// Real, even Lévy symbol. Only integer arguments are ever needed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LevySymbol {
    /// `η(ξ) = κξ²/2`.
    Sle(Kappa),
    /// `η(ξ) = κ|ξ|^α/2`.
    Stable { alpha: f64, kappa: f64 },
    /// `η(ξ) = 1 − sin(πξ)/(πξ)`.
    Dendritic,
    /// Brownian motion plus symmetric ±2π jumps at rate λ:
    /// `η(ξ) = κξ²/2 + 2λ sin²(πξ)`.
    BrownianPlusPoisson { kappa: f64, lambda: f64 },
    /// Explicit values `η_0, η_1, …` (η_0 must be 0).
    Table(Vec<f64>),
}

impl LevySymbol {
    pub fn sle(kappa: f64) -> Self {
        LevySymbol::Sle(Kappa::Value(kappa))
    }

    pub fn sle_symbolic() -> Self {
        LevySymbol::Sle(Kappa::Symbolic)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        match values.first() {
            Some(&v) if v == 0.0 => Ok(LevySymbol::Table(values)),
            _ => Err(Error::BadSymbolSpec {
                spec: format!("{values:?}"),
                reason: "a table must start with eta_0 = 0".into(),
            }),
        }
    }

    /// Symbol value at integer `k`; even in `k` and exactly 0 at `k = 0`.
    pub fn eta(&self, k: i64) -> Result<f64> {
        let k = k.unsigned_abs();
        if k == 0 {
            return Ok(0.0);
        }
        let kf = k as f64;
        Ok(match self {
            LevySymbol::Sle(Kappa::Value(kappa)) => kappa * kf * kf / 2.0,
            LevySymbol::Sle(Kappa::Symbolic) => {
                return Err(Error::SymbolicUnsupported("numeric evaluation of symbolic kappa".into()))
            }
            LevySymbol::Stable { alpha, kappa } => kappa * kf.powf(*alpha) / 2.0,
            LevySymbol::Dendritic => 1.0,
            // The jump part 2λ sin²(πk) vanishes at every integer.
            LevySymbol::BrownianPlusPoisson { kappa, .. } => kappa * kf * kf / 2.0,
            LevySymbol::Table(v) => *v.get(k as usize).ok_or(Error::SymbolUndefined(k as i64))?,
        })
    }

    /// Exact `κk²/2` for the symbolic SLE symbol.
    pub fn eta_symbolic(&self, k: i64) -> Result<RatFunc> {
        match self {
            LevySymbol::Sle(Kappa::Symbolic) => {
                let k2 = k * k;
                Ok(if k2 % 2 == 0 {
                    RatFunc::kappa() * RatFunc::from_int(k2 / 2)
                } else {
                    RatFunc::kappa() * RatFunc::from_ratio(k2, 2)?
                })
            }
            other => Err(Error::SymbolicUnsupported(other.to_string())),
        }
    }

    /// Symbol value in either scalar field, selected by the caller's type.
    pub fn eta_scalar<S: EtaScalar>(&self, k: i64) -> Result<S> {
        S::eta_of(self, k)
    }

    /// Largest `|k|` at which the symbol is defined, if bounded.
    pub fn max_k(&self) -> Option<usize> {
        match self {
            LevySymbol::Table(v) => Some(v.len() - 1),
            _ => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, LevySymbol::Sle(Kappa::Symbolic))
    }
}

/// Scalars in which a symbol can be evaluated.
pub trait EtaScalar: Scalar {
    fn eta_of(symbol: &LevySymbol, k: i64) -> Result<Self>;
}

impl EtaScalar for f64 {
    fn eta_of(symbol: &LevySymbol, k: i64) -> Result<Self> {
        symbol.eta(k)
    }
}

impl EtaScalar for RatFunc {
    /// Symbolic κ gives κk²/2; numeric symbols embed their float value exactly.
    fn eta_of(symbol: &LevySymbol, k: i64) -> Result<Self> {
        if symbol.is_symbolic() {
            symbol.eta_symbolic(k)
        } else {
            RatFunc::from_f64(symbol.eta(k)?)
        }
    }
}

impl EtaScalar for FactoredRatFunc {
    fn eta_of(symbol: &LevySymbol, k: i64) -> Result<Self> {
        if symbol.is_symbolic() {
            let half = FactoredRatFunc::from_i64(2).recip()?;
            Ok(FactoredRatFunc::from_poly(Poly::from_i64s(&[0, k * k])) * half)
        } else {
            FactoredRatFunc::from_f64(symbol.eta(k)?)
        }
    }
}

impl fmt::Display for LevySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevySymbol::Sle(Kappa::Value(k)) => write!(f, "sle:{k}"),
            LevySymbol::Sle(Kappa::Symbolic) => write!(f, "sle:sym"),
            LevySymbol::Stable { alpha, kappa } => write!(f, "stable:{alpha}:{kappa}"),
            LevySymbol::Dendritic => write!(f, "dendritic"),
            LevySymbol::BrownianPlusPoisson { kappa, lambda } => write!(f, "bp:{kappa}:{lambda}"),
            LevySymbol::Table(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for LevySymbol {
    type Err = Error;

    /// Grammar: `sle:6`, `sle:sym`, `stable:1.5:2`, `dendritic`, `bp:4:0.5`, `table:0,1,4,9`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadSymbolSpec { spec: s.to_string(), reason: reason.to_string() };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["sle", "sym"] | ["sle", "symbolic"] => Ok(LevySymbol::sle_symbolic()),
            ["sle", k] => {
                let k = num(k)?;
                if k < 0.0 {
                    return Err(bad("kappa must be nonnegative"));
                }
                Ok(LevySymbol::sle(k))
            }
            ["stable", a, k] => {
                let (alpha, kappa) = (num(a)?, num(k)?);
                if !(alpha > 0.0 && alpha <= 2.0) || kappa <= 0.0 {
                    return Err(bad("need 0 < alpha <= 2 and kappa > 0"));
                }
                Ok(LevySymbol::Stable { alpha, kappa })
            }
            ["dendritic"] => Ok(LevySymbol::Dendritic),
            ["bp", k, l] => {
                let (kappa, lambda) = (num(k)?, num(l)?);
                if kappa < 0.0 || lambda < 0.0 {
                    return Err(bad("need kappa >= 0 and lambda >= 0"));
                }
                Ok(LevySymbol::BrownianPlusPoisson { kappa, lambda })
            }
            ["table", vals] => {
                let v = vals.split(',').map(num).collect::<Result<Vec<f64>>>()?;
                LevySymbol::table(v).map_err(|_| bad("a table must start with eta_0 = 0"))
            }
            _ => Err(bad("unknown symbol")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        assert_eq!(LevySymbol::sle(6.0).eta(1).unwrap(), 3.0);
        let cauchy = LevySymbol::Stable { alpha: 1.0, kappa: 2.0 };
        for n in 1..20 {
            assert_eq!(cauchy.eta(n).unwrap(), n as f64);
        }
        assert_eq!(LevySymbol::Dendritic.eta(3).unwrap(), 1.0);
        assert_eq!(LevySymbol::Dendritic.eta(0).unwrap(), 0.0);
    }

    #[test]
    fn table_out_of_range() {
        let t: LevySymbol = "table:0,1,4,9".parse().unwrap();
        assert_eq!(t.eta(-3).unwrap(), 9.0);
        assert_eq!(t.eta(4), Err(Error::SymbolUndefined(4)));
    }

    #[test]
    fn symbolic_values() {
        let s = LevySymbol::sle_symbolic();
        assert_eq!(s.eta_symbolic(2).unwrap(), RatFunc::kappa() * RatFunc::from_int(2));
        assert_eq!(s.eta_symbolic(0).unwrap(), RatFunc::zero());
        assert_eq!(s.eta_symbolic(-3).unwrap(), RatFunc::kappa() * RatFunc::from_ratio(9, 2).unwrap());
        assert!(matches!(LevySymbol::Dendritic.eta_symbolic(1), Err(Error::SymbolicUnsupported(_))));
    }

    #[test]
    fn spec_round_trip() {
        for spec in ["sle:6", "sle:sym", "stable:1.5:2", "dendritic", "bp:4:0.5", "table:0,1,4,9"] {
            let s: LevySymbol = spec.parse().unwrap();
            assert_eq!(s.to_string(), spec);
        }
        assert!("sle".parse::<LevySymbol>().is_err());
        assert!("table:1,2".parse::<LevySymbol>().is_err());
    }

    fn any_symbol() -> impl Strategy<Value = LevySymbol> {
        prop_oneof![
            (0.0f64..20.0).prop_map(LevySymbol::sle),
            (0.1f64..=2.0, 0.1f64..10.0).prop_map(|(alpha, kappa)| LevySymbol::Stable { alpha, kappa }),
            Just(LevySymbol::Dendritic),
            (0.0f64..10.0, 0.0f64..5.0).prop_map(|(kappa, lambda)| LevySymbol::BrownianPlusPoisson { kappa, lambda }),
            prop::collection::vec(0.0f64..50.0, 51).prop_map(|mut v| {
                v[0] = 0.0;
                LevySymbol::Table(v)
            }),
        ]
    }

    proptest! {
        #[test]
        fn symbols_are_even(sym in any_symbol(), k in 0i64..=50) {
            prop_assert_eq!(sym.eta(k).unwrap(), sym.eta(-k).unwrap());
            prop_assert_eq!(sym.eta(0).unwrap(), 0.0);
        }

        #[test]
        fn symbolic_matches_numeric(n in 0i64..200, d in 0u32..6, k in -30i64..30) {
            // Dyadic κ so the float symbol is itself an exact rational.
            let k0 = BigRational::new(n.into(), (1i64 << d).into());
            let exact = LevySymbol::sle_symbolic().eta_symbolic(k).unwrap().eval_at(&k0).unwrap();
            let num = LevySymbol::sle(n as f64 / (1u64 << d) as f64).eta(k).unwrap();
            prop_assert_eq!(exact, BigRational::from_float(num).unwrap());
        }
    }
}
