//! Monte Carlo coefficient moments: simulate the driving process on a grid
//! and integrate the coefficient recursion backward from the horizon.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::levy::LevySymbol;
use crate::words::FamilyKind;
use crate::{Error, Result};

/// Default grid step.
pub const DEFAULT_DT: f64 = 1.0 / 512.0;
/// Samples per unit of work; partial sums are combined in this order.
const CHUNK: usize = 256;
/// Environment override for the worker count.
pub const THREADS_ENV: &str = "LOEWNER_LAB_THREADS";

/// Driving Lévy process `L_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Driver {
    /// `√κ B_t`.
    Brownian { kappa: f64 },
    /// Symmetric α-stable with `η(ξ) = κ|ξ|^α/2`.
    Stable { alpha: f64, kappa: f64 },
    /// Symmetric jumps `±jump` at the times of a rate-λ Poisson process.
    PoissonBernoulli { lambda: f64, jump: f64 },
    /// `√κ B_t` plus independent Poisson–Bernoulli jumps.
    Composite { kappa: f64, lambda: f64, jump: f64 },
}

impl Driver {
    pub fn brownian(kappa: f64) -> Self {
        Driver::Brownian { kappa }
    }

    /// Full-turn jumps `±2π`, invisible in `e^{iL_t}`.
    pub fn poisson_bernoulli(lambda: f64) -> Self {
        Driver::PoissonBernoulli { lambda, jump: TAU }
    }

    pub fn composite(kappa: f64, lambda: f64) -> Self {
        Driver::Composite { kappa, lambda, jump: TAU }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Driver::Brownian { kappa } => kappa >= 0.0 && kappa.is_finite(),
            Driver::Stable { alpha, kappa } => alpha > 0.0 && alpha <= 2.0 && kappa >= 0.0 && kappa.is_finite(),
            Driver::PoissonBernoulli { lambda, jump } => lambda >= 0.0 && lambda.is_finite() && jump.is_finite(),
            Driver::Composite { kappa, lambda, jump } => {
                kappa >= 0.0 && kappa.is_finite() && lambda >= 0.0 && lambda.is_finite() && jump.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDriver(self.to_string()))
        }
    }

    /// `η(k)` for integer `k`.
    pub fn eta(&self, k: i64) -> f64 {
        let kf = k.unsigned_abs() as f64;
        let jumps = |lambda: f64, jump: f64| lambda * (1.0 - (kf * jump).cos());
        match *self {
            Driver::Brownian { kappa } => kappa * kf * kf / 2.0,
            Driver::Stable { alpha, kappa } => {
                if kf == 0.0 {
                    0.0
                } else {
                    kappa * kf.powf(alpha) / 2.0
                }
            }
            Driver::PoissonBernoulli { lambda, jump } => jumps(lambda, jump),
            Driver::Composite { kappa, lambda, jump } => kappa * kf * kf / 2.0 + jumps(lambda, jump),
        }
    }

    /// The Lévy symbol of this driver, exact where a named symbol exists and
    /// tabulated up to `k_max` otherwise.
    pub fn symbol(&self, k_max: usize) -> LevySymbol {
        match *self {
            Driver::Brownian { kappa } => LevySymbol::sle(kappa),
            Driver::Stable { alpha, kappa } => LevySymbol::Stable { alpha, kappa },
            Driver::Composite { kappa, lambda, jump } if jump == TAU => {
                LevySymbol::BrownianPlusPoisson { kappa, lambda }
            }
            _ => LevySymbol::Table((0..=k_max as i64).map(|k| self.eta(k)).collect()),
        }
    }

    fn increment<R: Rng>(&self, rng: &mut R, dt: f64, clock: &mut JumpClock) -> f64 {
        match *self {
            Driver::Brownian { kappa } => (kappa * dt).sqrt() * rng.sample::<f64, _>(StandardNormal),
            Driver::Stable { alpha, kappa } => (kappa * dt / 2.0).powf(1.0 / alpha) * symmetric_stable(rng, alpha),
            Driver::PoissonBernoulli { jump, .. } => clock.advance(rng, dt) * jump,
            Driver::Composite { kappa, jump, .. } => {
                (kappa * dt).sqrt() * rng.sample::<f64, _>(StandardNormal) + clock.advance(rng, dt) * jump
            }
        }
    }

    fn jump_rate(&self) -> f64 {
        match *self {
            Driver::PoissonBernoulli { lambda, .. } | Driver::Composite { lambda, .. } => lambda,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Driver::Brownian { kappa } => write!(f, "brownian:{kappa}"),
            Driver::Stable { alpha, kappa } => write!(f, "stable:{alpha}:{kappa}"),
            Driver::PoissonBernoulli { lambda, jump } if jump == TAU => write!(f, "poisson:{lambda}"),
            Driver::PoissonBernoulli { lambda, jump } => write!(f, "poisson:{lambda}:{jump}"),
            Driver::Composite { kappa, lambda, jump } if jump == TAU => write!(f, "composite:{kappa}:{lambda}"),
            Driver::Composite { kappa, lambda, jump } => write!(f, "composite:{kappa}:{lambda}:{jump}"),
        }
    }
}

impl FromStr for Driver {
    type Err = Error;

    /// Grammar: `brownian:6`, `stable:1.5:2`, `poisson:0.5[:jump]`,
    /// `composite:6:0.5[:jump]`; the jump size defaults to `2π`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDriver(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let nums: Vec<f64> =
            parts[1..].iter().map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
        let driver = match (parts[0], nums.as_slice()) {
            ("brownian" | "sle", [k]) => Driver::Brownian { kappa: *k },
            ("stable", [a, k]) => Driver::Stable { alpha: *a, kappa: *k },
            ("poisson", [l]) => Driver::poisson_bernoulli(*l),
            ("poisson", [l, j]) => Driver::PoissonBernoulli { lambda: *l, jump: *j },
            ("composite", [k, l]) => Driver::composite(*k, *l),
            ("composite", [k, l, j]) => Driver::Composite { kappa: *k, lambda: *l, jump: *j },
            _ => return Err(bad()),
        };
        driver.validate()?;
        Ok(driver)
    }
}

/// Chambers–Mallows–Stuck sampler for `exp(−|ξ|^α)`.
fn symmetric_stable<R: Rng>(rng: &mut R, alpha: f64) -> f64 {
    let v = PI * (rng.gen::<f64>() - 0.5);
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Poisson arrival times, each carrying a fair sign; arrivals are snapped to
/// the end of the grid step containing them.
struct JumpClock {
    rate: f64,
    until_next: f64,
}

impl JumpClock {
    fn new<R: Rng>(rng: &mut R, rate: f64) -> Self {
        let until_next = if rate > 0.0 { rng.sample::<f64, _>(Exp1) / rate } else { f64::INFINITY };
        JumpClock { rate, until_next }
    }

    /// Net signed jump count over the next `dt`.
    fn advance<R: Rng>(&mut self, rng: &mut R, dt: f64) -> f64 {
        let mut net = 0.0;
        let mut left = dt;
        while self.until_next <= left {
            left -= self.until_next;
            net += if rng.gen::<bool>() { 1.0 } else { -1.0 };
            self.until_next = rng.sample::<f64, _>(Exp1) / self.rate;
        }
        self.until_next -= left;
        net
    }
}

/// Per-sample generator: stream `index` of the ChaCha8 generator keyed by
/// `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Values of `L` on a uniform grid `t_i = i·dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    /// `X_{t_i} = e^{−t_i − iL_{t_i}}`.
    pub fn x(&self, i: usize) -> Complex64 {
        Complex64::from_polar((-self.time(i)).exp(), -self.values[i])
    }
}

fn grid_steps(horizon: f64, dt: f64) -> Result<usize> {
    if !(horizon > 0.0 && dt > 0.0 && horizon.is_finite()) {
        return Err(Error::OutOfRange(format!("need T > 0 and dt > 0, got T = {horizon}, dt = {dt}")));
    }
    Ok((horizon / dt).round().max(1.0) as usize)
}

fn fill_path<R: Rng>(driver: &Driver, rng: &mut R, dt: f64, steps: usize, out: &mut Vec<f64>) {
    out.clear();
    out.reserve(steps + 1);
    let mut clock = JumpClock::new(rng, driver.jump_rate());
    let mut l = 0.0;
    out.push(l);
    for _ in 0..steps {
        l += driver.increment(rng, dt, &mut clock);
        out.push(l);
    }
}

/// One path on `[0, T]` with step `dt` (rounded so the grid ends at a
/// multiple of `dt`), deterministic in `(seed, index)`.
pub fn sample_path(driver: &Driver, horizon: f64, dt: f64, seed: u64, index: u64) -> Result<SamplePath> {
    driver.validate()?;
    let steps = grid_steps(horizon, dt)?;
    let mut values = Vec::new();
    fill_path(driver, &mut sample_rng(seed, index), dt, steps, &mut values);
    Ok(SamplePath { dt, values })
}

/// Reusable buffers for the backward recursion.
#[derive(Default)]
struct Workspace {
    weight: Vec<f64>,
    u: Vec<Complex64>,
    du: Vec<Complex64>,
    du_next: Vec<Complex64>,
}

/// Backward trapezoid recursion on precomputed `X_{t_i}`.
///
/// Whole-plane: `u_n' = X(u_{n−1}' + 2(n−1)u_{n−1})`, `u_1 = 1`, and
/// `a_n(0) = u_n(0)`. Odd: `w_n' = X(w_{n−1}' + (2n−1)w_{n−1})`, `w_0 = 1`,
/// and `b_{2n+1}(0) = w_n(0)`. All start from zero at the horizon.
fn backward(x: &[Complex64], dt: f64, family: FamilyKind, ws: &mut Workspace, out: &mut [Complex64]) {
    // Slot 0 is the constant seed: u_1 for f, w_0 for h.
    let count = out.len();
    ws.weight.clear();
    ws.weight.extend((0..=count).map(|j| match family {
        FamilyKind::WholePlane => 2.0 * j as f64,
        FamilyKind::Oddified => 2.0 * j as f64 - 1.0,
    }));
    for v in [&mut ws.u, &mut ws.du, &mut ws.du_next] {
        v.clear();
        v.resize(count + 1, Complex64::new(0.0, 0.0));
    }
    ws.u[0] = Complex64::new(1.0, 0.0);
    let half = dt / 2.0;
    let (last, rest) = x.split_last().expect("path has at least one point");
    // At the horizon every u_j (j ≥ 1) vanishes, so u_j' = X·u_{j−1}' there
    // except for the seed term.
    let mut prev = Complex64::new(0.0, 0.0);
    for j in 1..=count {
        let w = if j == 1 { ws.weight[1] } else { 0.0 };
        prev = last * (prev + w);
        ws.du_next[j] = prev;
    }
    let (u, du, du_next, weight) = (&mut ws.u[..], &mut ws.du[..], &mut ws.du_next[..], &ws.weight[..]);
    let mut cur = du;
    let mut next = du_next;
    for &xi in rest.iter().rev() {
        // Level j needs u_{j−1}(t_i), already updated in this sweep.
        let mut d = Complex64::new(0.0, 0.0);
        let mut below = u[0];
        for j in 1..=count {
            d = xi * (d + below * weight[j]);
            cur[j] = d;
            let uj = u[j] - (d + next[j]) * half;
            u[j] = uj;
            below = uj;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    out.copy_from_slice(&u[1..=count]);
}

fn n_max_slots(n_max: usize, family: FamilyKind) -> usize {
    match family {
        FamilyKind::WholePlane => n_max.saturating_sub(1),
        FamilyKind::Oddified => n_max,
    }
}

fn decay_table(dt: f64, len: usize) -> Vec<f64> {
    (0..len).map(|i| (-(i as f64) * dt).exp()).collect()
}

fn fill_x(path: &[f64], decay: &[f64], x: &mut Vec<Complex64>) {
    x.clear();
    x.extend(path.iter().zip(decay).map(|(&l, &r)| {
        let (s, c) = l.sin_cos();
        Complex64::new(r * c, -r * s)
    }));
}

/// Coefficients at time 0 for one path: `a_2..a_{n_max}` for the whole-plane
/// family, `b_3..b_{2n_max+1}` for the odd family.
pub fn coefficients_one_path(path: &SamplePath, n_max: usize, family: FamilyKind) -> Vec<Complex64> {
    let mut ws = Workspace::default();
    let mut out = vec![Complex64::new(0.0, 0.0); n_max_slots(n_max, family)];
    if out.is_empty() || path.len() < 2 {
        return out;
    }
    let mut x = Vec::new();
    fill_x(&path.values, &decay_table(path.dt, path.len()), &mut x);
    backward(&x, path.dt, family, &mut ws, &mut out);
    out
}

/// Worker count: explicit value, else `LOEWNER_LAB_THREADS`, else rayon's
/// default.
pub fn resolve_threads(explicit: Option<usize>) -> Option<usize> {
    explicit.or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok()).filter(|&n| n > 0)
}

/// Simulation settings, echoed with every estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub driver: Driver,
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub family: FamilyKind,
    /// Horizon `T`; `n_max + 12` when absent.
    pub horizon: Option<f64>,
    pub dt: f64,
    /// Worker count; resolved through [`resolve_threads`].
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(driver: Driver, n_max: usize, samples: usize, seed: u64, family: FamilyKind) -> Self {
        McConfig { driver, n_max, samples, seed, family, horizon: None, dt: DEFAULT_DT, threads: None }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(self.n_max as f64 + 12.0)
    }

    /// Coefficient index of output slot `j`.
    pub fn index_of(&self, slot: usize) -> usize {
        match self.family {
            FamilyKind::WholePlane => slot + 2,
            FamilyKind::Oddified => 2 * slot + 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `E(c_n)`.
    Mean,
    /// `E|c_n|²`.
    SecondMoment,
}

/// One estimated moment. `stderr` is the sample standard deviation over
/// `√samples` (for complex means, of the modulus of the deviation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Coefficient index: `n` for `a_n`, `2n+1` for `b_{2n+1}`.
    pub n: usize,
    pub statistic: Statistic,
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Estimates together with the configuration that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McTable {
    pub config: McConfig,
    pub estimates: Vec<McEstimate>,
}

impl McTable {
    pub fn get(&self, n: usize, statistic: Statistic) -> Option<&McEstimate> {
        self.estimates.iter().find(|e| e.n == n && e.statistic == statistic)
    }
}

#[derive(Clone)]
struct Partial {
    sum: Vec<Complex64>,
    sum_abs2: Vec<f64>,
    sum_abs4: Vec<f64>,
}

impl Partial {
    fn zero(k: usize) -> Self {
        Partial { sum: vec![Complex64::new(0.0, 0.0); k], sum_abs2: vec![0.0; k], sum_abs4: vec![0.0; k] }
    }

    fn add(&mut self, c: &[Complex64]) {
        for (j, &z) in c.iter().enumerate() {
            let a2 = z.norm_sqr();
            self.sum[j] += z;
            self.sum_abs2[j] += a2;
            self.sum_abs4[j] += a2 * a2;
        }
    }

    fn merge(&mut self, other: &Partial) {
        for j in 0..self.sum.len() {
            self.sum[j] += other.sum[j];
            self.sum_abs2[j] += other.sum_abs2[j];
            self.sum_abs4[j] += other.sum_abs4[j];
        }
    }
}

fn run_chunk(config: &McConfig, steps: usize, range: std::ops::Range<usize>) -> Partial {
    let slots = n_max_slots(config.n_max, config.family);
    let mut part = Partial::zero(slots);
    let mut ws = Workspace::default();
    let mut path = Vec::with_capacity(steps + 1);
    let mut out = vec![Complex64::new(0.0, 0.0); slots];
    let mut x = Vec::with_capacity(steps + 1);
    let decay = decay_table(config.dt, steps + 1);
    for index in range {
        let mut rng = sample_rng(config.seed, index as u64);
        fill_path(&config.driver, &mut rng, config.dt, steps, &mut path);
        fill_x(&path, &decay, &mut x);
        backward(&x, config.dt, config.family, &mut ws, &mut out);
        part.add(&out);
    }
    part
}

/// `E(c_n)` and `E|c_n|²` over `samples` independent paths. The result is
/// bit-identical for any worker count.
pub fn estimate_moments(config: &McConfig) -> Result<McTable> {
    config.driver.validate()?;
    if config.samples < 100 {
        return Err(Error::OutOfRange(format!("need at least 100 samples, got {}", config.samples)));
    }
    let min_n = match config.family {
        FamilyKind::WholePlane => 2,
        FamilyKind::Oddified => 1,
    };
    if config.n_max < min_n {
        return Err(Error::OutOfRange(format!("n_max = {} too small", config.n_max)));
    }
    let steps = grid_steps(config.horizon(), config.dt)?;
    let chunks: Vec<std::ops::Range<usize>> =
        (0..config.samples).step_by(CHUNK).map(|s| s..(s + CHUNK).min(config.samples)).collect();
    let work = || chunks.par_iter().map(|r| run_chunk(config, steps, r.clone())).collect::<Vec<_>>();
    let partials = match resolve_threads(config.threads) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let slots = n_max_slots(config.n_max, config.family);
    let mut total = Partial::zero(slots);
    for p in &partials {
        total.merge(p);
    }
    let n = config.samples as f64;
    let mut estimates = Vec::with_capacity(2 * slots);
    for j in 0..slots {
        let index = config.index_of(j);
        let mean = total.sum[j] / n;
        let m2 = total.sum_abs2[j] / n;
        let var_mean = ((total.sum_abs2[j] - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
        let var_abs2 = ((total.sum_abs4[j] - n * m2 * m2) / (n - 1.0)).max(0.0);
        let entry = |statistic, mean, var: f64| McEstimate {
            n: index,
            statistic,
            mean,
            stderr: (var / n).sqrt(),
            samples: config.samples,
            seed: config.seed,
        };
        estimates.push(entry(Statistic::Mean, mean, var_mean));
        estimates.push(entry(Statistic::SecondMoment, Complex64::new(m2, 0.0), var_abs2));
    }
    Ok(McTable { config: config.clone(), estimates })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn driver_strings_round_trip() {
        for s in ["brownian:6", "stable:1.5:2", "poisson:0.5", "poisson:0.5:3.14", "composite:6:0.5", "composite:1:0.25:3"] {
            let d: Driver = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("stable:2.5:1".parse::<Driver>().is_err());
        assert!("brownian:-1".parse::<Driver>().is_err());
        assert!("brownian".parse::<Driver>().is_err());
    }

    #[test]
    fn path_is_reproducible() {
        let d = Driver::brownian(3.0);
        let a = sample_path(&d, 2.0, 0.01, 9, 4).unwrap();
        let b = sample_path(&d, 2.0, 0.01, 9, 4).unwrap();
        let c = sample_path(&d, 2.0, 0.01, 9, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.values[0], 0.0);
        assert_eq!(a.len(), 201);
    }

    #[test]
    fn modulus_of_x() {
        let p = sample_path(&Driver::brownian(6.0), 3.0, 0.01, 1, 0).unwrap();
        for i in [0, 17, 300] {
            assert!((p.x(i).norm() - (-p.time(i)).exp()).abs() < 1e-15);
        }
    }
}
