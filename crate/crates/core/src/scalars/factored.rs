use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Poly, RatFunc, Scalar};
use crate::{Error, Result};

/// Rational function of κ held as `num / (d · ∏ f^e)` with the denominator
/// kept as a product of the factors it was built from.
///
/// Sums only take a common multiple of the factor lists, so no polynomial gcd
/// is computed until [`FactoredRatFunc::to_ratfunc`]. This is the fast path
/// for long symbolic recursions whose denominators are products of small
/// polynomials.
#[derive(Clone, Debug)]
pub struct FactoredRatFunc {
    num: Poly,
    d: BigInt,
    factors: BTreeMap<Poly, u32>,
}

impl FactoredRatFunc {
    pub fn from_poly(num: Poly) -> Self {
        FactoredRatFunc { num, d: BigInt::one(), factors: BTreeMap::new() }
    }

    pub fn kappa() -> Self {
        Self::from_poly(Poly::var())
    }

    fn from_rational(r: &BigRational) -> Self {
        FactoredRatFunc { num: Poly::constant(r.numer().clone()), d: r.denom().clone(), factors: BTreeMap::new() }
    }

    fn reduce_content(mut self) -> Self {
        let g = self.num.content().gcd(&self.d);
        if !g.is_zero() && !g.is_one() {
            self.num = self.num.div_scalar_exact(&g);
            self.d /= &g;
        }
        self
    }

    pub fn to_ratfunc(&self) -> RatFunc {
        let den = self
            .factors
            .iter()
            .fold(Poly::constant(self.d.clone()), |acc, (f, &e)| acc * f.pow(e));
        RatFunc::new(self.num.clone(), den).expect("denominator factors are nonzero")
    }
}

impl Add for FactoredRatFunc {
    type Output = FactoredRatFunc;
    fn add(self, rhs: FactoredRatFunc) -> FactoredRatFunc {
        if self.num.is_zero() {
            return rhs;
        }
        if rhs.num.is_zero() {
            return self;
        }
        let mut factors = self.factors.clone();
        for (f, &e) in &rhs.factors {
            let slot = factors.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |x: &FactoredRatFunc, l: &BigInt| {
            let mut p = x.num.scale(&(l / &x.d));
            for (f, &e) in &factors {
                let have = x.factors.get(f).copied().unwrap_or(0);
                if e > have {
                    p = &p * &f.pow(e - have);
                }
            }
            p
        };
        let l = self.d.lcm(&rhs.d);
        let num = lift(&self, &l) + lift(&rhs, &l);
        FactoredRatFunc { num, d: l, factors }.reduce_content()
    }
}

impl Neg for FactoredRatFunc {
    type Output = FactoredRatFunc;
    fn neg(mut self) -> FactoredRatFunc {
        self.num = -self.num;
        self
    }
}

impl Sub for FactoredRatFunc {
    type Output = FactoredRatFunc;
    fn sub(self, rhs: FactoredRatFunc) -> FactoredRatFunc {
        self + (-rhs)
    }
}

impl Mul for FactoredRatFunc {
    type Output = FactoredRatFunc;
    fn mul(self, rhs: FactoredRatFunc) -> FactoredRatFunc {
        if self.num.is_zero() || rhs.num.is_zero() {
            return FactoredRatFunc::zero();
        }
        let mut factors = self.factors;
        for (f, e) in rhs.factors {
            *factors.entry(f).or_insert(0) += e;
        }
        FactoredRatFunc { num: &self.num * &rhs.num, d: self.d * rhs.d, factors }.reduce_content()
    }
}

impl Scalar for FactoredRatFunc {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn from_i64(n: i64) -> Self {
        Self::from_poly(Poly::from_i64s(&[n]))
    }
    fn from_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(|r| Self::from_rational(&r))
            .ok_or_else(|| Error::Unsupported(format!("non-finite value {x}")))
    }
    fn recip(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::Resonance("zero rational function".into()));
        }
        // 1 / (num / (d ∏ f^e)) = d ∏ f^e / (c · p) with p primitive, lc(p) > 0.
        let mut c = self.num.content();
        if self.num.lc().is_negative() {
            c = -c;
        }
        let p = self.num.div_scalar_exact(&c);
        let top = self.factors.iter().fold(Poly::constant(self.d.clone()), |acc, (f, &e)| acc * f.pow(e));
        let (top, d) = if c.is_negative() { (-top, -c) } else { (top, c) };
        let mut out = FactoredRatFunc { num: top, d, factors: BTreeMap::new() };
        if p.is_constant() {
            out.d *= p.lc();
        } else {
            out.factors.insert(p, 1);
        }
        Ok(out.reduce_content())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_reduced_arithmetic() {
        let k = FactoredRatFunc::kappa();
        let a = (k.clone() + FactoredRatFunc::from_i64(1)).recip().unwrap();
        let b = (k.clone() * FactoredRatFunc::from_i64(3) + FactoredRatFunc::from_i64(2)).recip().unwrap();
        let c = (a.clone() + b.clone()) * (k.clone() + FactoredRatFunc::from_i64(1)) - a * FactoredRatFunc::from_i64(7);
        let rk = RatFunc::kappa();
        let ra = (rk.clone() + RatFunc::one()).recip().unwrap();
        let rb = (rk.clone() * RatFunc::from_int(3) + RatFunc::from_int(2)).recip().unwrap();
        let rc = (ra.clone() + rb) * (rk + RatFunc::one()) - ra * RatFunc::from_int(7);
        assert_eq!(c.to_ratfunc(), rc);
        assert_eq!(c.recip().unwrap().to_ratfunc(), rc.recip().unwrap());
    }
}
