//! Iterated-integral ("word") representation of the Loewner coefficients and
//! expectations of single words and word pairs.
//!
//! A word `(α_1,β_1)…(α_k,β_k)` encodes
//! `∫_{0<s_1<…<s_k} ∏ e^{−β_j s_j − iα_j L_{s_j}} ds`, outermost (smallest
//! time) first. Its expectation is a product of resolvent factors over the
//! suffixes of the word.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::levy::{EtaScalar, LevySymbol};
use crate::scalars::{FactoredRatFunc, RatFunc, Scalar};
use crate::{Error, Result};

/// One `(α, β)` letter.
pub type Letter = (i64, i64);

/// Default cap on `k + ℓ` for the shuffle enumeration oracle.
pub const SHUFFLE_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct Word<S> {
    pub coeff: S,
    pub pairs: Vec<Letter>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    /// Coefficients `a_n` of the whole-plane map `f`.
    WholePlane,
    /// Coefficients `b_{2n+1}` of the odd map `h(z) = z√(f(z²)/z²)`.
    Oddified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoeffFamily {
    pub kind: FamilyKind,
    pub n: usize,
}

impl CoeffFamily {
    pub fn a(n: usize) -> Self {
        CoeffFamily { kind: FamilyKind::WholePlane, n }
    }

    pub fn b(n: usize) -> Self {
        CoeffFamily { kind: FamilyKind::Oddified, n }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            FamilyKind::WholePlane => self.n >= 2,
            FamilyKind::Oddified => self.n >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFamily(format!("{:?} with n = {}", self.kind, self.n)))
        }
    }

    /// Level at which every chain stops, and the weight of stepping down to level `k`.
    fn base_level(&self) -> usize {
        match self.kind {
            FamilyKind::WholePlane => 1,
            FamilyKind::Oddified => 0,
        }
    }

    fn weight(&self, k: usize) -> i64 {
        match self.kind {
            FamilyKind::WholePlane => -2 * k as i64,
            FamilyKind::Oddified => -(2 * k as i64 + 1),
        }
    }

    /// Largest index accepted by the word-pair path for the given scalar field.
    fn word_cap(&self, exact: bool) -> usize {
        match (self.kind, exact) {
            (FamilyKind::WholePlane, true) => 8,
            (FamilyKind::WholePlane, false) => 10,
            (FamilyKind::Oddified, true) => 7,
            (FamilyKind::Oddified, false) => 9,
        }
    }
}

/// One word per strictly decreasing chain of levels from `n` down to the base level.
pub fn generate_words<S: Scalar>(family: CoeffFamily) -> Result<Vec<Word<S>>> {
    family.validate()?;
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    chains(&family, family.n, 1, &mut pairs, &mut out);
    Ok(out)
}

fn chains<S: Scalar>(family: &CoeffFamily, level: usize, coeff: i64, pairs: &mut Vec<Letter>, out: &mut Vec<Word<S>>) {
    let base = family.base_level();
    if level == base {
        out.push(Word { coeff: S::from_i64(coeff), pairs: pairs.clone() });
        return;
    }
    for next in (base..level).rev() {
        let step = (level - next) as i64;
        pairs.push((step, step));
        chains(family, next, coeff * family.weight(next), pairs, out);
        pairs.pop();
    }
}

/// Caches `[B + η(A)]^{-1}` for one symbol.
struct Resolvent<'a, S> {
    symbol: &'a LevySymbol,
    cache: HashMap<(i64, i64), S>,
}

impl<'a, S: EtaScalar> Resolvent<'a, S> {
    fn new(symbol: &'a LevySymbol) -> Self {
        Resolvent { symbol, cache: HashMap::new() }
    }

    fn get(&mut self, b: i64, a: i64) -> Result<S> {
        let key = (b, a.abs());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let factor = S::from_i64(b) + self.symbol.eta_scalar::<S>(a)?;
        let inv = factor
            .recip()
            .map_err(|_| Error::Resonance(format!("beta sum {b} + eta({a}) vanishes")))?;
        self.cache.insert(key, inv.clone());
        Ok(inv)
    }
}

fn suffix_product<S: EtaScalar>(letters: &[Letter], res: &mut Resolvent<'_, S>) -> Result<S> {
    let (mut a, mut b) = (0i64, 0i64);
    let mut acc = S::one();
    for &(alpha, beta) in letters.iter().rev() {
        a += alpha;
        b += beta;
        acc = acc * res.get(b, a)?;
    }
    Ok(acc)
}

/// `coeff × ∏_suffixes [Σβ + η(Σα)]^{-1}`.
pub fn word_expectation<S: EtaScalar>(w: &Word<S>, symbol: &LevySymbol) -> Result<S> {
    let mut res = Resolvent::new(symbol);
    Ok(w.coeff.clone() * suffix_product(&w.pairs, &mut res)?)
}

fn conjugated(w: &[Letter]) -> Vec<Letter> {
    w.iter().map(|&(a, b)| (-a, b)).collect()
}

/// `E[left · conj(right)]` by enumerating every interleaving of the two words.
pub fn pair_expectation_shuffle<S: EtaScalar>(
    left: &Word<S>,
    right: &Word<S>,
    symbol: &LevySymbol,
    cap: usize,
) -> Result<S> {
    let size = left.pairs.len() + right.pairs.len();
    if size > cap {
        return Err(Error::OracleCap { size, cap });
    }
    let r = conjugated(&right.pairs);
    let mut res = Resolvent::new(symbol);
    let mut merged = Vec::with_capacity(size);
    let mut total = S::zero();
    shuffle(&left.pairs, &r, &mut merged, &mut res, &mut total)?;
    Ok(left.coeff.clone() * right.coeff.clone() * total)
}

fn shuffle<S: EtaScalar>(
    l: &[Letter],
    r: &[Letter],
    merged: &mut Vec<Letter>,
    res: &mut Resolvent<'_, S>,
    total: &mut S,
) -> Result<()> {
    if l.is_empty() && r.is_empty() {
        *total = total.clone() + suffix_product(merged, res)?;
        return Ok(());
    }
    if let Some((&head, rest)) = l.split_first() {
        merged.push(head);
        shuffle(rest, r, merged, res, total)?;
        merged.pop();
    }
    if let Some((&head, rest)) = r.split_first() {
        merged.push(head);
        shuffle(l, rest, merged, res, total)?;
        merged.pop();
    }
    Ok(())
}

/// Memoized suffix-pair recursion shared across many word pairs.
struct PairDp<'a, S> {
    res: Resolvent<'a, S>,
    memo: HashMap<(Vec<Letter>, Vec<Letter>), S>,
}

impl<'a, S: EtaScalar> PairDp<'a, S> {
    fn new(symbol: &'a LevySymbol) -> Self {
        PairDp { res: Resolvent::new(symbol), memo: HashMap::new() }
    }

    /// `V(l, r)` where `r` is already conjugated.
    fn value(&mut self, l: &[Letter], r: &[Letter]) -> Result<S> {
        if l.is_empty() && r.is_empty() {
            return Ok(S::one());
        }
        let key = (l.to_vec(), r.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let (a, b) = l.iter().chain(r).fold((0, 0), |(a, b), &(x, y)| (a + x, b + y));
        let mut sum = S::zero();
        if !l.is_empty() {
            sum = sum + self.value(&l[1..], r)?;
        }
        if !r.is_empty() {
            sum = sum + self.value(l, &r[1..])?;
        }
        let v = self.res.get(b, a)? * sum;
        self.memo.insert(key, v.clone());
        Ok(v)
    }
}

/// `E[left · conj(right)]` by the memoized recursion over remaining suffixes.
pub fn pair_expectation_dp<S: EtaScalar>(left: &Word<S>, right: &Word<S>, symbol: &LevySymbol) -> Result<S> {
    let mut dp = PairDp::new(symbol);
    let v = dp.value(&left.pairs, &conjugated(&right.pairs))?;
    Ok(left.coeff.clone() * right.coeff.clone() * v)
}

/// `E(a_n)` (or `E(b_{2n+1})`) as the sum of word expectations.
pub fn mean_from_words<S: EtaScalar>(family: CoeffFamily, symbol: &LevySymbol) -> Result<S> {
    let mut res = Resolvent::new(symbol);
    let mut total = S::zero();
    for w in generate_words::<S>(family)? {
        total = total + w.coeff.clone() * suffix_product(&w.pairs, &mut res)?;
    }
    Ok(total)
}

/// `E(|a_n|²)` (or `E(|b_{2n+1}|²)`) summed over all word pairs.
///
/// With `S = RatFunc` and the symbolic SLE symbol the result is the exact
/// rational function of κ.
pub fn second_moment<S: EtaScalar>(family: CoeffFamily, symbol: &LevySymbol) -> Result<S> {
    family.validate()?;
    let cap = family.word_cap(S::EXACT);
    if family.n > cap {
        return Err(Error::SizeCap(format!("word-pair path supports n <= {cap} here")));
    }
    let words = generate_words::<S>(family)?;
    let conj: Vec<Vec<Letter>> = words.iter().map(|w| conjugated(&w.pairs)).collect();
    let mut dp = PairDp::new(symbol);
    let mut total = S::zero();
    for l in &words {
        for (r, rc) in words.iter().zip(&conj) {
            let v = dp.value(&l.pairs, rc)?;
            total = total + l.coeff.clone() * r.coeff.clone() * v;
        }
    }
    Ok(total)
}

/// Exact `E(|a_n|²)` as a canonical rational function (κ formal for the
/// symbolic SLE symbol). Denominators stay factored until the end.
pub fn second_moment_exact(family: CoeffFamily, symbol: &LevySymbol) -> Result<RatFunc> {
    Ok(second_moment::<FactoredRatFunc>(family, symbol)?.to_ratfunc())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Symbolic,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(RatFunc),
    Float(f64),
}

/// Word-pair second moment in the requested arithmetic.
pub fn second_moment_mode(family: CoeffFamily, symbol: &LevySymbol, mode: Mode) -> Result<MomentValue> {
    match mode {
        Mode::Symbolic => second_moment_exact(family, symbol).map(MomentValue::Exact),
        Mode::Float => second_moment::<f64>(family, symbol).map(MomentValue::Float),
    }
}

/// Collapsed recursion over pairs of levels; returns `V(n, n)` for every
/// level `0..=n_max`, i.e. `E(|a_n|²)` (whole-plane, index from 1) or
/// `E(|b_{2n+1}|²)` (oddified, index from 0).
pub fn level_dp<S: EtaScalar>(kind: FamilyKind, symbol: &LevySymbol, n_max: usize) -> Result<Vec<S>> {
    let fam = CoeffFamily { kind, n: n_max };
    let base = fam.base_level();
    let size = n_max + 1;
    let mut res = Resolvent::<S>::new(symbol);
    let mut v: Vec<Vec<Option<S>>> = vec![vec![None; size]; size];
    v[base][base] = Some(S::one());
    // Each state depends only on states with a smaller level sum.
    for total in (2 * base + 1)..=(2 * n_max) {
        for kl in base..=n_max {
            if total < kl + base || total - kl > n_max {
                continue;
            }
            let kr = total - kl;
            let mut sum = S::zero();
            for k in base..kl {
                let w = S::from_i64(fam.weight(k));
                sum = sum + w * v[k][kr].clone().expect("filled in order");
            }
            for k in base..kr {
                let w = S::from_i64(fam.weight(k));
                sum = sum + w * v[kl][k].clone().expect("filled in order");
            }
            let b = (kl + kr - 2 * base) as i64;
            let a = kl as i64 - kr as i64;
            v[kl][kr] = Some(res.get(b, a)? * sum);
        }
    }
    Ok((0..size).map(|n| v[n][n].clone().unwrap_or_else(S::zero)).collect())
}

/// Numeric second moments for the family's valid indices up to `n_max`.
pub fn level_dp_second_moment(kind: FamilyKind, symbol: &LevySymbol, n_max: usize) -> Result<Vec<(usize, f64)>> {
    if n_max > 64 {
        return Err(Error::OutOfRange(format!("n_max = {n_max} exceeds 64")));
    }
    let first = match kind {
        FamilyKind::WholePlane => 2,
        FamilyKind::Oddified => 1,
    };
    let vals = level_dp::<f64>(kind, symbol, n_max.max(first))?;
    Ok((first..=n_max).map(|n| (n, vals[n])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Poly, RatFunc};

    fn sle_sym() -> LevySymbol {
        LevySymbol::sle_symbolic()
    }

    fn rf(num: &[i64], den: Poly) -> RatFunc {
        RatFunc::new(Poly::from_i64s(num), den).unwrap()
    }

    #[test]
    fn low_order_words() {
        let a2 = generate_words::<f64>(CoeffFamily::a(2)).unwrap();
        assert_eq!(a2, vec![Word { coeff: -2.0, pairs: vec![(1, 1)] }]);
        let a3 = generate_words::<f64>(CoeffFamily::a(3)).unwrap();
        assert_eq!(a3.len(), 2);
        assert!(a3.contains(&Word { coeff: -2.0, pairs: vec![(2, 2)] }));
        assert!(a3.contains(&Word { coeff: 8.0, pairs: vec![(1, 1), (1, 1)] }));
        let b3 = generate_words::<f64>(CoeffFamily::b(1)).unwrap();
        assert_eq!(b3, vec![Word { coeff: -1.0, pairs: vec![(1, 1)] }]);
        for n in 2..12 {
            let ws = generate_words::<f64>(CoeffFamily::a(n)).unwrap();
            assert_eq!(ws.len(), 1 << (n - 2));
            for w in ws {
                assert_eq!(w.pairs.iter().map(|p| p.0).sum::<i64>(), n as i64 - 1);
                assert!(w.pairs.iter().all(|&(a, b)| a == b && a > 0));
            }
        }
        assert!(generate_words::<f64>(CoeffFamily::a(1)).is_err());
    }

    #[test]
    fn single_word_expectations() {
        let w = Word { coeff: RatFunc::from_int(-2), pairs: vec![(1, 1)] };
        assert_eq!(word_expectation(&w, &sle_sym()).unwrap(), rf(&[-4], Poly::linear(1, 2)));
        let t = LevySymbol::table(vec![0.0, 1.0, 4.0]).unwrap();
        let w = Word { coeff: 1.0, pairs: vec![(2, 2)] };
        assert_eq!(word_expectation(&w, &t).unwrap(), 1.0 / 6.0);
    }

    #[test]
    fn mean_of_third_coefficient() {
        let t = LevySymbol::table(vec![0.0, 0.7, 2.9]).unwrap();
        let got = mean_from_words::<f64>(CoeffFamily::a(3), &t).unwrap();
        let expect = -2.0 * (0.7 - 3.0) / (1.7 * 4.9);
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn pair_examples() {
        let w = Word { coeff: -2.0, pairs: vec![(1, 1)] };
        let t = LevySymbol::table(vec![0.0, 2.5]).unwrap();
        let s = pair_expectation_shuffle(&w, &w, &t, SHUFFLE_CAP).unwrap();
        assert!((s - 4.0 / 3.5).abs() < 1e-15);
        assert!((pair_expectation_dp(&w, &w, &t).unwrap() - s).abs() < 1e-15);

        let u = Word { coeff: 1.0, pairs: vec![(1, 1)] };
        let zero = LevySymbol::table(vec![0.0, 0.0]).unwrap();
        assert_eq!(pair_expectation_shuffle(&u, &u, &zero, SHUFFLE_CAP).unwrap(), 1.0);

        let big = Word { coeff: 1.0, pairs: vec![(1, 1); 9] };
        assert!(matches!(
            pair_expectation_shuffle(&big, &big, &zero, SHUFFLE_CAP),
            Err(Error::OracleCap { size: 18, cap: 16 })
        ));
    }

    #[test]
    fn symbolic_low_moments() {
        let a2: RatFunc = second_moment(CoeffFamily::a(2), &sle_sym()).unwrap();
        assert_eq!(a2, rf(&[8], Poly::linear(1, 2)));
        let a3: RatFunc = second_moment(CoeffFamily::a(3), &sle_sym()).unwrap();
        let den = Poly::linear(1, 1) * Poly::linear(1, 2) * Poly::linear(1, 6);
        assert_eq!(a3, rf(&[108, 88, 1], den));
    }

    #[test]
    fn level_recursion_base_cases() {
        let t = LevySymbol::table(vec![0.0, 1.3, 4.1, 7.0]).unwrap();
        let v = level_dp::<f64>(FamilyKind::WholePlane, &t, 2).unwrap();
        assert!((v[2] - 4.0 / 2.3).abs() < 1e-15);
        let b = level_dp::<f64>(FamilyKind::Oddified, &LevySymbol::sle(4.0), 1).unwrap();
        assert!((b[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn resonance_is_reported() {
        // η_1 = −1 makes the factor 1 + η_1 vanish.
        let t = LevySymbol::Table(vec![0.0, -1.0, 3.0]);
        assert!(matches!(mean_from_words::<f64>(CoeffFamily::a(2), &t), Err(Error::Resonance(_))));
    }
}
