//! Chain-level analysis shared by the `analyze` command and the test suites:
//! stuck-chain exclusion, autocorrelation times, relative-error curves and
//! the predicted sIM curve.

use nqs_ising_core::autocorr::{detect_stuck, integrated_autocorr_time, multi_chain_tau, Exclusion, MultiChainTau, DEFAULT_MAX_RUN_FRACTION};
use nqs_ising_core::estimate::{
    baseline_from_series, fit_floor, fit_inverse_sqrt, log_grid, predicted_sim_curve, relative_error_curve, Baseline,
    EnergySeries, ErrorCurve, InverseSqrtFit, GRID_PER_DECADE,
};
use nqs_ising_core::rng::derive_seed;
use nqs_ising_core::sampler::{filter_magnetization_zero, run_chain, ChainConfig, SamplerKind, SpinChain};
use nqs_ising_core::{Error, RbmModel, SquareLattice};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Worker count: explicit value, then `ISING_NQS_THREADS`, then all cores.
pub fn thread_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("ISING_NQS_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0)
}

/// Order-preserving parallel map on a pool of `threads` workers.
pub fn par_map<T, R, F>(threads: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSettings {
    pub chains: usize,
    pub sweeps: u64,
    pub thermalization: u64,
    pub seed: u64,
}

/// High-statistics MH reference, one chain per worker task.
pub fn compute_baseline(
    lattice: &SquareLattice,
    model: &RbmModel,
    exchange: f64,
    cfg: &BaselineSettings,
    threads: usize,
) -> CliResult<Baseline> {
    let series = par_map(threads, (0..cfg.chains).collect(), |k| -> CliResult<EnergySeries> {
        let mut chain_cfg = ChainConfig::new(cfg.sweeps, 1, derive_seed(cfg.seed, k as u64));
        chain_cfg.thermalization_sweeps = cfg.thermalization;
        let chain = run_chain(SamplerKind::Mh, model, lattice, &chain_cfg)?;
        Ok(EnergySeries::from_chain(&chain, lattice, model, exchange)?)
    });
    let series: Vec<EnergySeries> = series.into_iter().collect::<CliResult<_>>()?;
    Ok(baseline_from_series(&series)?)
}

/// Energy series of every chain (sIM chains filtered to zero magnetisation)
/// with the mean sweeps per retained sample.
pub fn chain_series(
    chains: &[SpinChain],
    lattice: &SquareLattice,
    model: &RbmModel,
    exchange: f64,
    threads: usize,
) -> CliResult<Vec<(EnergySeries, f64)>> {
    let out = par_map(threads, chains.iter().collect(), |chain| -> CliResult<(EnergySeries, f64)> {
        let filtered = match chain.kind {
            SamplerKind::Mh => chain.clone(),
            SamplerKind::Sim => match filter_magnetization_zero(chain) {
                Ok((f, _)) => f,
                // never visited the physical sector: an empty, unusable series
                Err(Error::EmptySector) => {
                    let empty = EnergySeries { sweeps: Vec::new(), values: Vec::new(), total_sweeps: chain.total_sweeps };
                    return Ok((empty, f64::INFINITY));
                }
                Err(e) => return Err(e.into()),
            },
        };
        let series = EnergySeries::from_chain(&filtered, lattice, model, exchange)?;
        Ok((series, filtered.mean_spacing()))
    });
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionRecord {
    pub kind: &'static str,
    pub chain: usize,
    pub reason: String,
}

/// Autocorrelation summary and usable series of one sampler.
#[derive(Debug, Clone)]
pub struct SamplerSummary {
    pub tau: MultiChainTau,
    pub usable: Vec<EnergySeries>,
    pub exclusions: Vec<ExclusionRecord>,
}

/// Human-readable reason for excluding a chain.
pub fn exclusion_reason(series: &EnergySeries, why: &Exclusion) -> String {
    match why {
        _ if series.values.is_empty() => "no zero-magnetization sample".into(),
        Exclusion::Stuck(r) => format!("stuck: {r:?}"),
        Exclusion::Failed(e) => e.to_string(),
    }
}

/// Excludes stuck chains and computes the multi-chain autocorrelation time.
/// More than half the chains excluded is an error.
pub fn summarize(kind: &'static str, series: &[(EnergySeries, f64)]) -> CliResult<SamplerSummary> {
    let inputs: Vec<(&[f64], f64)> = series.iter().map(|(s, dt)| (s.values.as_slice(), *dt)).collect();
    let exclusions_of = |excluded: &[(usize, Exclusion)]| -> Vec<ExclusionRecord> {
        excluded
            .iter()
            .map(|(k, why)| ExclusionRecord { kind, chain: *k, reason: exclusion_reason(&series[*k].0, why) })
            .collect()
    };
    let tau = match multi_chain_tau(&inputs) {
        Ok(t) => t,
        Err(e @ Error::TooFewChains { .. }) => {
            let excluded: Vec<String> = series
                .iter()
                .enumerate()
                .filter_map(|(k, (s, _))| {
                    let why = match detect_stuck(&s.values, DEFAULT_MAX_RUN_FRACTION) {
                        Some(r) => Exclusion::Stuck(r),
                        None => Exclusion::Failed(integrated_autocorr_time(&s.values, 1.0).err()?),
                    };
                    Some(format!("chain {k}: {}", exclusion_reason(s, &why)))
                })
                .collect();
            return Err(CliError::Exclusion { message: format!("{kind}: {e}; excluded [{}]", excluded.join(", ")) });
        }
        Err(e) => return Err(e.into()),
    };
    let exclusions = exclusions_of(&tau.excluded);
    if 2 * exclusions.len() > series.len() {
        return Err(CliError::Exclusion {
            message: format!("{kind}: {} of {} chains excluded: {exclusions:?}", exclusions.len(), series.len()),
        });
    }
    let usable = series
        .iter()
        .zip(&tau.per_chain)
        .filter(|(_, stats)| stats.is_some())
        .map(|((s, _), _)| s.clone())
        .collect();
    Ok(SamplerSummary { tau, usable, exclusions })
}

/// Everything the `analyze` command reports.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub baseline: Baseline,
    pub floor: f64,
    pub mh: SamplerSummary,
    pub sim: SamplerSummary,
    pub mh_curve: ErrorCurve,
    pub sim_curve: ErrorCurve,
    pub fit: InverseSqrtFit,
    pub predicted: ErrorCurve,
    pub ratio: f64,
    pub comparison: CurveComparison,
}

/// Agreement between the measured and predicted sIM curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComparison {
    /// Grid points compared: `N >= MIN_TAU_MULTIPLE * tau_sim` and both
    /// curves above the fit floor.
    pub n_lo: u64,
    pub n_hi: u64,
    pub points: usize,
    /// Decades of `N` spanned by the compared points.
    pub decades: f64,
    /// Largest of `measured/predicted` and `predicted/measured`.
    pub max_factor: f64,
}

/// Curves are compared only beyond this many sIM autocorrelation times.
pub const MIN_TAU_MULTIPLE: f64 = 10.0;

pub fn compare_curves(measured: &ErrorCurve, predicted: &ErrorCurve, tau_sim: f64, floor: f64) -> CurveComparison {
    let mut n_lo = u64::MAX;
    let mut n_hi = 0;
    let mut points = 0;
    let mut max_factor: f64 = 1.0;
    for p in &measured.points {
        let Some(q) = predicted.points.iter().find(|q| q.n == p.n) else { continue };
        if (p.n as f64) < MIN_TAU_MULTIPLE * tau_sim || q.eps_rel <= floor || p.eps_rel <= floor {
            continue;
        }
        n_lo = n_lo.min(p.n);
        n_hi = n_hi.max(p.n);
        points += 1;
        max_factor = max_factor.max(p.eps_rel / q.eps_rel).max(q.eps_rel / p.eps_rel);
    }
    let decades = if points > 0 { (n_hi as f64 / n_lo as f64).log10() } else { 0.0 };
    CurveComparison { n_lo: if points > 0 { n_lo } else { 0 }, n_hi, points, decades, max_factor }
}

/// Full comparison from per-chain energy series of both samplers.
pub fn analyze_series(
    baseline: Baseline,
    mh_series: &[(EnergySeries, f64)],
    sim_series: &[(EnergySeries, f64)],
    fit_window_mult: f64,
) -> CliResult<AnalysisReport> {
    let mh = summarize("mh", mh_series)?;
    let sim = summarize("sim", sim_series)?;
    let floor = fit_floor(&baseline, fit_window_mult);
    let max_n = |s: &[EnergySeries]| s.iter().map(|x| x.total_sweeps).max().unwrap_or(1);
    let mh_grid = log_grid(1, max_n(&mh.usable), GRID_PER_DECADE);
    let sim_grid = log_grid(1, max_n(&sim.usable), GRID_PER_DECADE);
    let mh_curve = relative_error_curve(&mh.usable, baseline.energy, &mh_grid)?;
    let sim_curve = relative_error_curve(&sim.usable, baseline.energy, &sim_grid)?;
    let fit = fit_inverse_sqrt(&mh_curve, floor)?;
    let ratio = nqs_ising_core::advantage::iso_accuracy_ratio(sim.tau.mean_sweeps, mh.tau.mean_sweeps)?;
    let predicted = predicted_sim_curve(fit.a, sim.tau.mean_sweeps, mh.tau.mean_sweeps, &sim_grid, baseline.energy)?;
    let comparison = compare_curves(&sim_curve, &predicted, sim.tau.mean_sweeps, floor);
    Ok(AnalysisReport { baseline, floor, mh, sim, mh_curve, sim_curve, fit, predicted, ratio, comparison })
}
