//! Variational-energy estimation and relative-error curves.

use alloc::vec::Vec;

use crate::autocorr::{detect_stuck, StuckReason, DEFAULT_MAX_RUN_FRACTION};
use crate::error::{Error, Result};
use crate::lattice::{local_energy_cached, SquareLattice};
use crate::math::{exp, ln, log10, mean_variance, powf, round, sqrt};
use crate::rbm::{RbmModel, ThetaCache};
use crate::sampler::{run_chain, ChainConfig, SamplerKind, SpinChain};

/// Mean local energy with its sample variance and standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEstimate {
    pub mean: f64,
    /// Population variance of `E_loc` over the samples.
    pub variance: f64,
    pub n_samples: usize,
    /// Autocorrelation time in sweeps, if known.
    pub tau: Option<f64>,
    /// Sweeps per sample.
    pub interval: f64,
    /// `sqrt(2 tau / (N dt) * Var)`; `sqrt(Var / N)` when `tau` is unknown.
    pub stderr: f64,
}

impl EnergyEstimate {
    pub fn from_values(values: &[f64], interval: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyChain);
        }
        let (mean, variance) = mean_variance(values);
        Ok(Self {
            mean,
            variance,
            n_samples: values.len(),
            tau: None,
            interval,
            stderr: sqrt(variance / values.len() as f64),
        })
    }

    /// Attaches an autocorrelation time (in sweeps) and recomputes the error.
    pub fn with_tau(mut self, tau_sweeps: f64) -> Self {
        self.tau = Some(tau_sweeps);
        self.stderr = sqrt(2.0 * tau_sweeps / (self.n_samples as f64 * self.interval) * self.variance);
        self
    }
}

/// Local energy of every stored sample, paired with the sweep it was taken at.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub sweeps: Vec<u64>,
    pub values: Vec<f64>,
    pub total_sweeps: u64,
}

impl EnergySeries {
    pub fn from_chain(chain: &SpinChain, lattice: &SquareLattice, model: &RbmModel, exchange: f64) -> Result<Self> {
        let mut values = Vec::with_capacity(chain.len());
        for config in &chain.samples {
            let cache = ThetaCache::new(model, config)?;
            values.push(local_energy_cached(lattice.bonds(), model, &cache, config, exchange)?);
        }
        Ok(Self { sweeps: chain.sweep_indices.clone(), values, total_sweeps: chain.total_sweeps })
    }

    /// Mean over samples taken within the first `n_sweeps` sweeps.
    pub fn prefix_mean(&self, n_sweeps: u64) -> Option<f64> {
        let end = self.sweeps.partition_point(|&s| s <= n_sweeps);
        (end > 0).then(|| self.values[..end].iter().sum::<f64>() / end as f64)
    }
}

/// Sample mean and variance of `E_loc` over a (filtered) chain.
pub fn variational_energy(
    chain: &SpinChain,
    lattice: &SquareLattice,
    model: &RbmModel,
    exchange: f64,
) -> Result<EnergyEstimate> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let series = EnergySeries::from_chain(chain, lattice, model, exchange)?;
    EnergyEstimate::from_values(&series.values, chain.mean_spacing())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub chains: usize,
    pub sweeps: u64,
    pub thermalization: u64,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { chains: 32, sweeps: 10_000, thermalization: crate::sampler::DEFAULT_THERMALIZATION, seed: 0 }
    }
}

/// High-statistics MH reference energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    /// Grand mean over retained chains.
    pub energy: f64,
    /// Standard error from the spread of chain means.
    pub stderr: f64,
    pub chain_means: Vec<f64>,
    pub excluded: Vec<(usize, StuckReason)>,
}

/// Combines per-chain energy series into a baseline, excluding stuck chains.
/// Fails when more than half of the chains are stuck.
pub fn baseline_from_series(series: &[EnergySeries]) -> Result<Baseline> {
    if series.is_empty() {
        return Err(Error::EmptyChain);
    }
    let mut excluded = Vec::new();
    let mut chain_means = Vec::new();
    for (k, s) in series.iter().enumerate() {
        if s.values.is_empty() {
            return Err(Error::EmptyChain);
        }
        match detect_stuck(&s.values, DEFAULT_MAX_RUN_FRACTION) {
            Some(reason) => excluded.push((k, reason)),
            None => chain_means.push(mean_variance(&s.values).0),
        }
    }
    if 2 * excluded.len() > series.len() || chain_means.is_empty() {
        return Err(Error::ExclusionThreshold { excluded: excluded.len(), total: series.len() });
    }
    let (energy, var) = mean_variance(&chain_means);
    let k = chain_means.len() as f64;
    let stderr = if chain_means.len() > 1 { sqrt(var / (k - 1.0)) } else { f64::NAN };
    Ok(Baseline { energy, stderr, chain_means, excluded })
}

/// Runs `cfg.chains` independent MH chains and averages them.
pub fn baseline_energy(
    lattice: &SquareLattice,
    model: &RbmModel,
    exchange: f64,
    cfg: &BaselineConfig,
) -> Result<Baseline> {
    let mut series = Vec::with_capacity(cfg.chains);
    for k in 0..cfg.chains {
        let mut chain_cfg = ChainConfig::new(cfg.sweeps, 1, crate::rng::derive_seed(cfg.seed, k as u64));
        chain_cfg.thermalization_sweeps = cfg.thermalization;
        let chain = run_chain(SamplerKind::Mh, model, lattice, &chain_cfg)?;
        series.push(EnergySeries::from_chain(&chain, lattice, model, exchange)?);
    }
    baseline_from_series(&series)
}

/// `(N, eps_rel)` points against a baseline energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub points: Vec<CurvePoint>,
    pub baseline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u64,
    pub eps_rel: f64,
    /// Standard error of the mean over runs (0 for analytic curves).
    pub stderr: f64,
}

/// Relative error `|E - E_b| / |E_b|`.
pub fn relative_error(energy: f64, baseline: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    Ok(((energy - baseline) / baseline).abs())
}

/// Logarithmic grid with `per_decade` points per decade between `lo` and
/// `hi`, rounded to integers and deduplicated.
pub fn log_grid(lo: u64, hi: u64, per_decade: usize) -> Vec<u64> {
    let lo = lo.max(1);
    if hi < lo {
        return Vec::new();
    }
    let (a, b) = (log10(lo as f64), log10(hi as f64));
    let steps = round((b - a) * per_decade as f64) as usize;
    let mut grid: Vec<u64> = (0..=steps)
        .map(|k| {
            let x = if steps == 0 { a } else { a + (b - a) * k as f64 / steps as f64 };
            round(powf(10.0, x)) as u64
        })
        .collect();
    grid.dedup();
    grid
}

/// Default grid density.
pub const GRID_PER_DECADE: usize = 20;

/// For every `N` in `grid`, the prefix-mean energy of each run over its first
/// `N` sweeps, converted to a relative error and averaged over runs. Grid
/// points where no run has a sample yet are skipped.
pub fn relative_error_curve(runs: &[EnergySeries], baseline: f64, grid: &[u64]) -> Result<ErrorCurve> {
    if baseline == 0.0 {
        return Err(Error::ZeroBaseline);
    }
    let mut points = Vec::with_capacity(grid.len());
    for &n in grid {
        let errs: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.prefix_mean(n))
            .map(|e| ((e - baseline) / baseline).abs())
            .collect();
        if errs.is_empty() {
            continue;
        }
        let (mean, var) = mean_variance(&errs);
        let stderr = if errs.len() > 1 { sqrt(var / (errs.len() as f64 - 1.0)) } else { 0.0 };
        points.push(CurvePoint { n, eps_rel: mean, stderr });
    }
    Ok(ErrorCurve { points, baseline })
}

/// Least-squares fit of `eps = a / sqrt(N)` in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSqrtFit {
    pub a: f64,
    /// RMS residual of `log eps` against the fixed-slope model.
    pub residual_rms: f64,
    /// Slope of an unconstrained log-log line through the same points.
    pub free_slope: f64,
    pub points_used: usize,
    /// Set when the data are inconsistent with a `-1/2` slope.
    pub poor_fit: bool,
}

/// Points whose `eps_rel` does not exceed `floor` are excluded from the fit.
pub fn fit_inverse_sqrt(curve: &ErrorCurve, floor: f64) -> Result<InverseSqrtFit> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.eps_rel > floor && p.eps_rel > 0.0)
        .map(|p| (ln(p.n as f64), ln(p.eps_rel)))
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, have: pts.len() });
    }
    let k = pts.len() as f64;
    let intercept = pts.iter().map(|(x, y)| y + 0.5 * x).sum::<f64>() / k;
    let residual_rms = sqrt(
        pts.iter()
            .map(|(x, y)| {
                let r = y - intercept + 0.5 * x;
                r * r
            })
            .sum::<f64>()
            / k,
    );
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let free_slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    let poor_fit = !(free_slope + 0.5).abs().le(&POOR_FIT_SLOPE) || residual_rms > POOR_FIT_RMS;
    Ok(InverseSqrtFit { a: exp(intercept), residual_rms, free_slope, points_used: pts.len(), poor_fit })
}

/// Largest tolerated deviation of the free slope from `-1/2`.
pub const POOR_FIT_SLOPE: f64 = 0.25;
/// Largest tolerated RMS log residual.
pub const POOR_FIT_RMS: f64 = 0.3;

/// Default factor between the fit floor and the baseline's relative error.
pub const DEFAULT_FIT_WINDOW_MULT: f64 = 5.0;

/// Fit floor `mult * stderr_b / |E_b|`.
pub fn fit_floor(baseline: &Baseline, mult: f64) -> f64 {
    mult * baseline.stderr / baseline.energy.abs()
}

/// sIM curve predicted from the MH fit: `sqrt(tau_sim / tau_mh) * a / sqrt(N)`.
pub fn predicted_sim_curve(a: f64, tau_sim: f64, tau_mh: f64, grid: &[u64], baseline: f64) -> Result<ErrorCurve> {
    if !(tau_sim > 0.0 && tau_mh > 0.0) {
        return Err(Error::InvalidParameter("autocorrelation times must be positive"));
    }
    let scale = sqrt(tau_sim / tau_mh) * a;
    let points = grid
        .iter()
        .map(|&n| CurvePoint { n, eps_rel: scale / sqrt(n as f64), stderr: 0.0 })
        .collect();
    Ok(ErrorCurve { points, baseline })
}
