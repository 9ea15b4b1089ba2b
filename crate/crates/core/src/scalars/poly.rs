use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense univariate polynomial with arbitrary-precision integer coefficients,
/// stored lowest degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    c: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    /// The formal variable itself.
    pub fn var() -> Self {
        Poly::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn constant(v: BigInt) -> Self {
        Poly::from_coeffs(vec![v])
    }

    pub fn from_coeffs(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Poly::from_coeffs(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `a*x + b`.
    pub fn linear(a: i64, b: i64) -> Self {
        Poly::from_i64s(&[b, a])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn lc(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_default()
    }

    /// Nonnegative gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for x in &self.c {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|x| x * k).collect() }
    }

    /// Divide every coefficient by `k`, which must divide each one.
    pub fn div_scalar_exact(&self, k: &BigInt) -> Poly {
        Poly { c: self.c.iter().map(|x| x / k).collect() }
    }

    pub fn primitive_part(&self) -> Poly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            self.clone()
        } else {
            self.div_scalar_exact(&g)
        }
    }

    fn shift_scale(&self, shift: usize, k: &BigInt) -> Poly {
        let mut c = vec![BigInt::zero(); shift];
        c.extend(self.c.iter().map(|x| x * k));
        Poly::from_coeffs(c)
    }

    /// Pseudo-remainder of `self` by `b`, reduced to its primitive part along the way.
    fn prem_primitive(&self, b: &Poly) -> Poly {
        let db = b.degree();
        let lb = b.lc();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= db {
            let lr = r.lc();
            let shift = r.degree() - db;
            let g = lr.gcd(&lb);
            let mr = &lb / &g;
            let mb = &lr / &g;
            r = r.scale(&mr) - b.shift_scale(shift, &mb);
            r = r.primitive_part();
        }
        r
    }

    /// Primitive gcd with positive leading coefficient. `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.primitive_part(), b.primitive_part());
        if a.degree() < b.degree() || a.is_zero() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.is_constant() {
                return Poly::one();
            }
            let r = a.prem_primitive(&b);
            a = b;
            b = r;
        }
        if a.lc().is_negative() {
            -a
        } else {
            a
        }
    }

    /// Exact quotient `self / b`, assuming `b` divides `self` in Z[x] and `b` is primitive.
    pub fn div_exact(&self, b: &Poly) -> Poly {
        assert!(!b.is_zero(), "exact division by zero polynomial");
        if self.is_zero() {
            return Poly::zero();
        }
        let db = b.degree();
        let lb = b.lc();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.degree().saturating_sub(db) + 1];
        while !r.is_zero() && r.degree() >= db {
            let shift = r.degree() - db;
            let (qc, rem) = r.lc().div_rem(&lb);
            debug_assert!(rem.is_zero(), "inexact polynomial division");
            r = r - b.shift_scale(shift, &qc);
            q[shift] = qc;
        }
        debug_assert!(r.is_zero(), "inexact polynomial division");
        Poly::from_coeffs(q)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for coef in self.c.iter().rev() {
            acc = acc * x + BigRational::from_integer(coef.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.c
            .iter()
            .rev()
            .fold(0.0, |acc, coef| acc * x + coef.to_f64().unwrap_or(f64::NAN))
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::one(), |acc, _| acc * self.clone())
    }

    /// Renders in descending powers of `var`, e.g. `27*k^8 - 5*k + 1`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, coef) in self.c.iter().enumerate().rev() {
            if coef.is_zero() {
                continue;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if i == 0 {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("k"))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        let (mut long, short) = if self.c.len() >= rhs.c.len() { (self, rhs) } else { (rhs, self) };
        for (a, b) in long.c.iter_mut().zip(short.c) {
            *a += b;
        }
        Poly::from_coeffs(long.c)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { c: self.c.into_iter().map(|x| -x).collect() }
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![BigInt::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::from_coeffs(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_products() {
        let a = Poly::linear(1, 1) * Poly::linear(3, 2);
        let b = Poly::linear(3, 2) * Poly::linear(1, 6);
        assert_eq!(Poly::gcd(&a, &b), Poly::linear(3, 2));
        assert_eq!(Poly::gcd(&a, &Poly::linear(1, 5)), Poly::one());
    }

    #[test]
    fn exact_division() {
        let a = Poly::linear(2, 1) * Poly::linear(5, -3) * Poly::linear(1, 1);
        assert_eq!(a.div_exact(&Poly::linear(5, -3)), Poly::linear(2, 1) * Poly::linear(1, 1));
    }

    #[test]
    fn render_signs() {
        assert_eq!(Poly::from_i64s(&[1, -5, 0, 27]).to_string(), "27*k^3 - 5*k + 1");
        assert_eq!(Poly::from_i64s(&[0, -1]).to_string(), "-k");
    }
}
