use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use crate::{Error, Result};

/// Exact rational function of the formal variable κ, kept in canonical form:
/// coprime numerator and denominator, no common integer content, and a
/// denominator with positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Builds and canonicalizes `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let (mut num, mut den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g), den.div_exact(&g))
            }
        };
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        if den.lc().is_negative() {
            num = -num;
            den = -den;
        }
        RatFunc { num, den }
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    /// The formal variable κ.
    pub fn kappa() -> Self {
        RatFunc { num: Poly::var(), den: Poly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc { num: Poly::from_i64s(&[n]), den: Poly::one() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        RatFunc::new(Poly::from_i64s(&[n]), Poly::from_i64s(&[d]))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::canonical(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<RatFunc> {
        RatFunc::one().checked_div(self)
    }

    /// Exact value at a rational κ0.
    pub fn eval_at(&self, k0: &BigRational) -> Result<BigRational> {
        let d = self.den.eval_rational(k0);
        if d.is_zero() {
            return Err(Error::Pole(k0.to_string()));
        }
        Ok(self.num.eval_rational(k0) / d)
    }

    pub fn eval_at_int(&self, k0: i64) -> Result<BigRational> {
        self.eval_at(&BigRational::from_integer(BigInt::from(k0)))
    }

    pub fn eval_f64(&self, k0: f64) -> f64 {
        self.num.eval_f64(k0) / self.den.eval_f64(k0)
    }

    /// Constant value, if the function does not depend on κ.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(BigRational::new(self.num.lc(), self.den.lc()))
        } else {
            None
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RatFunc::canonical(self.num.clone() + rhs.num.clone(), self.den.clone());
        }
        // Cancel the shared denominator factor before cross-multiplying.
        let g = Poly::gcd(&self.den, &rhs.den);
        let (d1, d2) = if g.is_one() {
            (self.den.clone(), rhs.den.clone())
        } else {
            (self.den.div_exact(&g), rhs.den.div_exact(&g))
        };
        let num = &self.num * &d2 + &rhs.num * &d1;
        let den = &self.den * &d2;
        RatFunc::canonical(num, den)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -self.num, den: self.den }
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self + &(-rhs)
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        // Cross-cancel so the products stay reduced.
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1) };
        let d2 = if g1.is_one() { rhs.den.clone() } else { rhs.den.div_exact(&g1) };
        let n2 = if g2.is_one() { rhs.num.clone() } else { rhs.num.div_exact(&g2) };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2) };
        let mut num = &n1 * &n2;
        let mut den = &d1 * &d2;
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        if den.lc().is_negative() {
            num = -num;
            den = -den;
        }
        RatFunc { num, den }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for RatFunc {
    type Err = Error;

    /// Accepts `poly`, `(poly)` or `(poly)/(poly)` in the variable `k`
    /// (`kappa` and `κ` are also accepted).
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .replace("kappa", "k")
            .replace('κ', "k")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let (num, den) = split_fraction(&cleaned)?;
        let num = parse_poly(strip_parens(num))?;
        let den = match den {
            Some(d) => parse_poly(strip_parens(d))?,
            None => Poly::one(),
        };
        RatFunc::new(num, den).map_err(|_| Error::Parse("zero denominator".into()))
    }
}

fn strip_parens(s: &str) -> &str {
    if s.starts_with('(') && s.ends_with(')') {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

fn split_fraction(s: &str) -> Result<(&str, Option<&str>)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Ok((&s[..i], Some(&s[i + 1..]))),
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    Ok((s, None))
}

fn parse_poly(s: &str) -> Result<Poly> {
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut coeffs: Vec<BigInt> = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        }
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            i += 1;
        }
        let term = &s[start..i];
        let (c, e) = parse_term(term)?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, BigInt::zero());
        }
        coeffs[e] += sign * c;
    }
    Ok(Poly::from_coeffs(coeffs))
}

fn parse_term(t: &str) -> Result<(BigInt, usize)> {
    let bad = || Error::Parse(format!("bad term `{t}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let (coef, mono) = match t.find('k') {
        None => (t, ""),
        Some(pos) => (t[..pos].trim_end_matches('*'), &t[pos..]),
    };
    let c = if coef.is_empty() { BigInt::one() } else { coef.parse::<BigInt>().map_err(|_| bad())? };
    let e = if mono.is_empty() {
        0
    } else if mono == "k" {
        1
    } else if let Some(exp) = mono.strip_prefix("k^") {
        exp.parse::<usize>().map_err(|_| bad())?
    } else {
        return Err(bad());
    };
    Ok((c, e))
}
