//! Monte Carlo estimates of the lower bound of expected improvement (LBEI)
//! for SEP crossover, standard crossover, and mutation.
//!
//! Each estimator is the mean of `max(t - B, 0)` for a deterministic term `t`
//! and binomial noise `B`. Binomials are drawn by inverse CDF from uniforms,
//! so [`lbei_grid`] can feed the same uniforms to all three estimators of a
//! cell (common random numbers) and keep the difference grids smooth.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::substream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LbeiError {
    #[error("{name} = {value} outside [0, {max}]")]
    OutOfRange {
        name: &'static str,
        value: usize,
        max: usize,
    },
    #[error("graph order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("mutation rate {0} not in (0, 1]")]
    Rate(f64),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("empty range {start}..={end} for {name}")]
    EmptyRange {
        name: &'static str,
        start: usize,
        end: usize,
    },
}

/// Graph order and the off-diagonal ones counts of the optimum and the two
/// parents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub n: usize,
    pub n_opt_1: usize,
    pub n_1_1: usize,
    pub n_2_1: usize,
}

impl SpaceParams {
    pub fn new(n: usize, n_opt_1: usize, n_1_1: usize, n_2_1: usize) -> Result<Self, LbeiError> {
        if n < 2 {
            return Err(LbeiError::OrderTooSmall(n));
        }
        let sp = Self {
            n,
            n_opt_1,
            n_1_1,
            n_2_1,
        };
        let max = sp.slots();
        for (name, value) in [("n_opt_1", n_opt_1), ("n_1_1", n_1_1), ("n_2_1", n_2_1)] {
            if value > max {
                return Err(LbeiError::OutOfRange { name, value, max });
            }
        }
        Ok(sp)
    }

    /// Seven-vertex cell space with nine edges in every graph.
    pub fn nas101() -> Self {
        Self {
            n: 7,
            n_opt_1: 9,
            n_1_1: 9,
            n_2_1: 9,
        }
    }

    /// Twelve-vertex recurrent cell space.
    pub fn nasnlp() -> Self {
        Self {
            n: 12,
            n_opt_1: 14,
            n_1_1: 11,
            n_2_1: 11,
        }
    }

    /// Number of off-diagonal entries, `n (n - 1)`.
    pub fn slots(&self) -> usize {
        self.n * (self.n - 1)
    }

    pub fn n_opt_0(&self) -> usize {
        self.slots() - self.n_opt_1
    }

    pub fn n_1_0(&self) -> usize {
        self.slots() - self.n_1_1
    }

    pub fn n_2_0(&self) -> usize {
        self.slots() - self.n_2_1
    }

    /// Default grid axes: `d1` up to `n_opt_1 + n_1_1` and `d2` up to
    /// `n_1_1 + n_2_1`, the largest off-diagonal distances the ones counts
    /// allow, both capped at `n (n - 1)`.
    pub fn default_ranges(&self) -> (RangeSpec, RangeSpec) {
        let max = self.slots();
        (
            RangeSpec::new(0, (self.n_opt_1 + self.n_1_1).min(max)),
            RangeSpec::new(0, (self.n_1_1 + self.n_2_1).min(max)),
        )
    }

    /// Default mutation rate `1 / (n (n - 1))`.
    pub fn default_mutation_rate(&self) -> f64 {
        1.0 / self.slots() as f64
    }

    fn check_d(&self, name: &'static str, value: usize) -> Result<(), LbeiError> {
        let max = self.slots();
        if value > max {
            return Err(LbeiError::OutOfRange { name, value, max });
        }
        Ok(())
    }
}

/// Convention for the count of shared entries in the SEP crossover bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NseMode {
    /// `n_se = max(n (n - 1) - d1 - d2, 0)`, so the denominator is
    /// `min(d1 + d2, n (n - 1))`.
    #[default]
    Consistent,
    /// `n_se = max(n^2 - d1 - d2, 0)`. Cells whose denominator is not
    /// positive give NaN.
    AsStated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub se: f64,
}

impl Estimate {
    fn nan() -> Self {
        Self {
            mean: f64::NAN,
            se: f64::NAN,
        }
    }
}

/// Inclusive index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub start: usize,
    pub end: usize,
}

impl RangeSpec {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// Cumulative distribution of Binomial(k, p), sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    cdf: Vec<f64>,
}

impl BinomialTable {
    pub fn new(k: usize, p: f64) -> Self {
        Self {
            cdf: accumulate(&binomial_pmf(k, p)),
        }
    }

    /// Smallest `b` with `P(B <= b) > u`.
    pub fn sample(&self, u: f64) -> usize {
        let idx = self.cdf.partition_point(|&c| c <= u);
        idx.min(self.cdf.len() - 1)
    }
}

/// Probability mass function of Binomial(k, p) as a vector of length `k + 1`.
pub fn binomial_pmf(k: usize, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut v = vec![0.0; k + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; k + 1];
        v[k] = 1.0;
        return v;
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut ln_choose = 0.0;
    let mut pmf = Vec::with_capacity(k + 1);
    for b in 0..=k {
        if b > 0 {
            ln_choose += ((k - b + 1) as f64).ln() - (b as f64).ln();
        }
        pmf.push((ln_choose + b as f64 * ln_p + (k - b) as f64 * ln_q).exp());
    }
    pmf
}

fn accumulate(pmf: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    pmf.iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect()
}

#[derive(Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn estimate(&self) -> Estimate {
        let se = if self.count > 1 {
            (self.m2 / (self.count - 1) as f64).sqrt() / (self.count as f64).sqrt()
        } else {
            0.0
        };
        Estimate {
            mean: self.mean,
            se,
        }
    }
}

/// Deterministic term of the SEP crossover bound, or `None` when the
/// denominator is not positive.
pub fn sepx_term(d1: usize, d2: usize, sp: &SpaceParams, mode: NseMode) -> Option<f64> {
    if d1 == 0 || d2 == 0 {
        return Some(0.0);
    }
    let slots = sp.slots() as i64;
    let sum = (d1 + d2) as i64;
    let nse = match mode {
        NseMode::Consistent => (slots - sum).max(0),
        NseMode::AsStated => ((sp.n * sp.n) as i64 - sum).max(0),
    };
    let denom = slots - nse;
    (denom > 0).then(|| (d1 * d2) as f64 / denom as f64)
}

/// Deterministic term of the standard crossover bound.
pub fn stdx_term(d1: usize, sp: &SpaceParams) -> f64 {
    let d1 = d1 as f64;
    let ones = (d1 + sp.n_1_1 as f64 - sp.n_opt_1 as f64) * sp.n_2_1 as f64;
    let zeros = (d1 + sp.n_1_0() as f64 - sp.n_opt_0() as f64) * sp.n_2_0() as f64;
    d1 - (ones + zeros) / (2.0 * sp.slots() as f64)
}

/// Number of coin flips in the standard crossover bound, rounded to the
/// nearest integer.
pub fn stdx_trials(sp: &SpaceParams) -> usize {
    let raw = (sp.n_1_1 * sp.n_2_0() + sp.n_1_0() * sp.n_2_1) as f64 / sp.slots() as f64;
    raw.round() as usize
}

struct SepxSampler {
    term: Option<f64>,
    coins: BinomialTable,
}

impl SepxSampler {
    fn new(d1: usize, d2: usize, sp: &SpaceParams, mode: NseMode) -> Self {
        Self {
            term: sepx_term(d1, d2, sp, mode),
            coins: BinomialTable::new(d2, 0.5),
        }
    }

    fn draw(&self, u: f64) -> f64 {
        match self.term {
            Some(t) => (t - self.coins.sample(u) as f64).max(0.0),
            None => f64::NAN,
        }
    }
}

struct StdxSampler {
    term: f64,
    coins: BinomialTable,
}

impl StdxSampler {
    fn new(d1: usize, sp: &SpaceParams) -> Self {
        Self {
            term: stdx_term(d1, sp),
            coins: BinomialTable::new(stdx_trials(sp), 0.5),
        }
    }

    fn draw(&self, u: f64) -> f64 {
        (self.term - self.coins.sample(u) as f64).max(0.0)
    }
}

struct MutaSampler {
    d1: usize,
    broken: BinomialTable,
    unfixed: BinomialTable,
}

impl MutaSampler {
    fn new(d1: usize, sp: &SpaceParams, p_m: f64) -> Self {
        Self {
            d1,
            broken: BinomialTable::new(sp.slots() - d1, p_m),
            unfixed: BinomialTable::new(d1, 1.0 - p_m),
        }
    }

    fn draw(&self, u1: f64, u2: f64) -> f64 {
        let b1 = self.broken.sample(u1);
        let b2 = self.unfixed.sample(u2);
        self.d1.saturating_sub(b1 + b2) as f64
    }
}

fn check_rate(p_m: f64) -> Result<(), LbeiError> {
    if p_m > 0.0 && p_m <= 1.0 {
        Ok(())
    } else {
        Err(LbeiError::Rate(p_m))
    }
}

fn check_trials(trials: usize) -> Result<(), LbeiError> {
    if trials == 0 {
        Err(LbeiError::NoTrials)
    } else {
        Ok(())
    }
}

pub fn lbei_sepx<R: Rng + ?Sized>(
    d1: usize,
    d2: usize,
    sp: &SpaceParams,
    trials: usize,
    rng: &mut R,
    mode: NseMode,
) -> Result<Estimate, LbeiError> {
    sp.check_d("d1", d1)?;
    sp.check_d("d2", d2)?;
    check_trials(trials)?;
    let sampler = SepxSampler::new(d1, d2, sp, mode);
    if sampler.term.is_none() {
        return Ok(Estimate::nan());
    }
    let mut acc = Moments::default();
    for _ in 0..trials {
        acc.push(sampler.draw(rng.random()));
    }
    Ok(acc.estimate())
}

pub fn lbei_stdx<R: Rng + ?Sized>(
    d1: usize,
    sp: &SpaceParams,
    trials: usize,
    rng: &mut R,
) -> Result<Estimate, LbeiError> {
    sp.check_d("d1", d1)?;
    check_trials(trials)?;
    let sampler = StdxSampler::new(d1, sp);
    let mut acc = Moments::default();
    for _ in 0..trials {
        acc.push(sampler.draw(rng.random()));
    }
    Ok(acc.estimate())
}

pub fn lbei_muta<R: Rng + ?Sized>(
    d1: usize,
    sp: &SpaceParams,
    p_m: f64,
    trials: usize,
    rng: &mut R,
) -> Result<Estimate, LbeiError> {
    sp.check_d("d1", d1)?;
    check_rate(p_m)?;
    check_trials(trials)?;
    let sampler = MutaSampler::new(d1, sp, p_m);
    let mut acc = Moments::default();
    for _ in 0..trials {
        acc.push(sampler.draw(rng.random(), rng.random()));
    }
    Ok(acc.estimate())
}

/// One grid cell, serialized with the published CSV column names.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LbeiCell {
    pub d1: usize,
    pub d2: usize,
    pub lbei_sepx: f64,
    pub se_sepx: f64,
    pub lbei_stdx: f64,
    pub se_stdx: f64,
    pub lbei_muta: f64,
    pub se_muta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LbeiGrid {
    pub params: SpaceParams,
    pub mutation_rate: f64,
    pub trials: usize,
    pub mode: NseMode,
    /// Row-major over `d1`, then `d2`.
    pub cells: Vec<LbeiCell>,
}

impl LbeiGrid {
    pub fn get(&self, d1: usize, d2: usize) -> Option<&LbeiCell> {
        self.cells.iter().find(|c| c.d1 == d1 && c.d2 == d2)
    }

    /// Cells with `d1 >= 1` and `d2 >= 1`.
    pub fn interior(&self) -> impl Iterator<Item = &LbeiCell> {
        self.cells.iter().filter(|c| c.d1 >= 1 && c.d2 >= 1)
    }
}

/// Grid settings. `mutation_rate: None` uses `1 / (n (n - 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub params: SpaceParams,
    pub d1: RangeSpec,
    pub d2: RangeSpec,
    pub trials: usize,
    pub mode: NseMode,
    pub mutation_rate: Option<f64>,
}

impl GridConfig {
    pub fn new(params: SpaceParams, trials: usize) -> Self {
        let (d1, d2) = params.default_ranges();
        Self {
            params,
            d1,
            d2,
            trials,
            mode: NseMode::default(),
            mutation_rate: None,
        }
    }
}

/// Fills every cell of the grid. Each cell draws from its own substream of
/// `seed`, keyed by `(d1, d2)`, and each trial draws two uniforms shared by
/// the three estimators, so the grid does not depend on thread scheduling.
pub fn lbei_grid(cfg: &GridConfig, seed: u64) -> Result<LbeiGrid, LbeiError> {
    let sp = &cfg.params;
    for (name, r) in [("d1", cfg.d1), ("d2", cfg.d2)] {
        if r.start > r.end {
            return Err(LbeiError::EmptyRange {
                name,
                start: r.start,
                end: r.end,
            });
        }
        sp.check_d(name, r.end)?;
    }
    check_trials(cfg.trials)?;
    let p_m = cfg
        .mutation_rate
        .unwrap_or_else(|| sp.default_mutation_rate());
    check_rate(p_m)?;

    let coords: Vec<(usize, usize)> = cfg
        .d1
        .iter()
        .flat_map(|d1| cfg.d2.iter().map(move |d2| (d1, d2)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(d1, d2)| {
            let mut rng = substream(seed, &[d1 as u64, d2 as u64]);
            simulate_cell(d1, d2, sp, p_m, cfg.trials, cfg.mode, &mut rng)
        })
        .collect();
    Ok(LbeiGrid {
        params: *sp,
        mutation_rate: p_m,
        trials: cfg.trials,
        mode: cfg.mode,
        cells,
    })
}

fn simulate_cell<R: Rng>(
    d1: usize,
    d2: usize,
    sp: &SpaceParams,
    p_m: f64,
    trials: usize,
    mode: NseMode,
    rng: &mut R,
) -> LbeiCell {
    let sepx = SepxSampler::new(d1, d2, sp, mode);
    let stdx = StdxSampler::new(d1, sp);
    let muta = MutaSampler::new(d1, sp, p_m);
    let (mut s, mut t, mut m) = (Moments::default(), Moments::default(), Moments::default());
    for _ in 0..trials {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        s.push(sepx.draw(u1));
        t.push(stdx.draw(u1));
        m.push(muta.draw(u1, u2));
    }
    let s = if sepx.term.is_some() {
        s.estimate()
    } else {
        Estimate::nan()
    };
    let (t, m) = (t.estimate(), m.estimate());
    LbeiCell {
        d1,
        d2,
        lbei_sepx: s.mean,
        se_sepx: s.se,
        lbei_stdx: t.mean,
        se_stdx: t.se,
        lbei_muta: m.mean,
        se_muta: m.se,
    }
}

/// Exact SEP crossover bound by summing over the binomial pmf.
pub fn exact_sepx(d1: usize, d2: usize, sp: &SpaceParams, mode: NseMode) -> Option<f64> {
    let t = sepx_term(d1, d2, sp, mode)?;
    Some(expect_positive_part(t, &binomial_pmf(d2, 0.5)))
}

pub fn exact_stdx(d1: usize, sp: &SpaceParams) -> f64 {
    expect_positive_part(stdx_term(d1, sp), &binomial_pmf(stdx_trials(sp), 0.5))
}

pub fn exact_muta(d1: usize, sp: &SpaceParams, p_m: f64) -> f64 {
    let broken = binomial_pmf(sp.slots() - d1, p_m);
    let unfixed = binomial_pmf(d1, 1.0 - p_m);
    let mut total = 0.0;
    for (b2, &q2) in unfixed.iter().enumerate() {
        for (b1, &q1) in broken.iter().enumerate().take(d1.saturating_sub(b2)) {
            total += q1 * q2 * (d1 - b1 - b2) as f64;
        }
    }
    total
}

fn expect_positive_part(t: f64, pmf: &[f64]) -> f64 {
    pmf.iter()
        .enumerate()
        .map(|(b, &q)| q * (t - b as f64).max(0.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn presets_are_valid() {
        for sp in [SpaceParams::nas101(), SpaceParams::nasnlp()] {
            assert_eq!(
                SpaceParams::new(sp.n, sp.n_opt_1, sp.n_1_1, sp.n_2_1).unwrap(),
                sp
            );
        }
        assert_eq!(SpaceParams::nas101().slots(), 42);
        assert!(SpaceParams::new(7, 43, 0, 0).is_err());
        assert!(SpaceParams::new(1, 0, 0, 0).is_err());
    }

    #[test]
    fn zero_distance_cells_are_zero() {
        let sp = SpaceParams::nas101();
        let mut r = rng();
        for mode in [NseMode::Consistent, NseMode::AsStated] {
            assert_eq!(lbei_sepx(0, 7, &sp, 100, &mut r, mode).unwrap().mean, 0.0);
            assert_eq!(lbei_sepx(7, 0, &sp, 100, &mut r, mode).unwrap().mean, 0.0);
        }
        assert_eq!(
            lbei_muta(0, &sp, 1.0 / 42.0, 100, &mut r).unwrap().mean,
            0.0
        );
        assert_eq!(lbei_stdx(0, &sp, 100, &mut r).unwrap().mean, 0.0);
    }

    #[test]
    fn stdx_coin_count() {
        assert_eq!(stdx_trials(&SpaceParams::nas101()), 14);
    }

    #[test]
    fn full_rate_mutation_never_improves_small_defects() {
        let sp = SpaceParams::nas101();
        let e = lbei_muta(5, &sp, 1.0, 1000, &mut rng()).unwrap();
        assert_eq!((e.mean, e.se), (0.0, 0.0));
    }

    #[test]
    fn consistent_sepx_term() {
        let sp = SpaceParams::nas101();
        let t = sepx_term(10, 4, &sp, NseMode::Consistent).unwrap();
        assert!((t - 40.0 / 14.0).abs() < 1e-12);
        assert_eq!(
            sepx_term(40, 40, &sp, NseMode::Consistent),
            Some(1600.0 / 42.0)
        );
    }

    #[test]
    fn as_stated_gives_nan_on_nonpositive_denominator() {
        let sp = SpaceParams::nas101();
        // n^2 - n(n-1) = 7, so d1 + d2 <= 7 leaves no room.
        assert_eq!(sepx_term(3, 4, &sp, NseMode::AsStated), None);
        assert!(lbei_sepx(3, 4, &sp, 10, &mut rng(), NseMode::AsStated)
            .unwrap()
            .mean
            .is_nan());
        assert_eq!(sepx_term(4, 4, &sp, NseMode::AsStated), Some(16.0));
    }

    #[test]
    fn argument_errors() {
        let sp = SpaceParams::nas101();
        let mut r = rng();
        assert!(matches!(
            lbei_sepx(43, 0, &sp, 1, &mut r, NseMode::Consistent),
            Err(LbeiError::OutOfRange { name: "d1", .. })
        ));
        assert_eq!(lbei_muta(1, &sp, 0.0, 1, &mut r), Err(LbeiError::Rate(0.0)));
        assert_eq!(lbei_stdx(1, &sp, 0, &mut r), Err(LbeiError::NoTrials));
        let mut cfg = GridConfig::new(sp, 1);
        cfg.d2 = RangeSpec::new(3, 2);
        assert!(matches!(
            lbei_grid(&cfg, 0),
            Err(LbeiError::EmptyRange { .. })
        ));
    }

    #[test]
    fn binomial_table_inverts_cdf() {
        let t = BinomialTable::new(2, 0.5);
        assert_eq!(t.sample(0.0), 0);
        assert_eq!(t.sample(0.2499), 0);
        assert_eq!(t.sample(0.25), 1);
        assert_eq!(t.sample(0.7499), 1);
        assert_eq!(t.sample(0.75), 2);
        assert_eq!(t.sample(0.999999), 2);
        assert_eq!(BinomialTable::new(3, 1.0).sample(0.0), 3);
        assert_eq!(BinomialTable::new(3, 0.0).sample(0.99), 0);
        let pmf = binomial_pmf(40, 0.3);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trial_one_grid_is_finite() {
        let grid = lbei_grid(&GridConfig::new(SpaceParams::nas101(), 1), 5).unwrap();
        assert_eq!(grid.cells.len(), 19 * 19);
        for c in &grid.cells {
            for v in [
                c.lbei_sepx,
                c.se_sepx,
                c.lbei_stdx,
                c.se_stdx,
                c.lbei_muta,
                c.se_muta,
            ] {
                assert!(v.is_finite() && v >= 0.0);
            }
        }
    }

    #[test]
    fn grid_is_seed_deterministic() {
        let mut cfg = GridConfig::new(SpaceParams::nasnlp(), 200);
        cfg.d1 = RangeSpec::new(0, 6);
        cfg.d2 = RangeSpec::new(2, 5);
        assert_eq!(lbei_grid(&cfg, 9).unwrap(), lbei_grid(&cfg, 9).unwrap());
        assert_ne!(lbei_grid(&cfg, 9).unwrap(), lbei_grid(&cfg, 10).unwrap());
    }
}
