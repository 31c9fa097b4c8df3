//! Autocorrelation analysis of Markov-chain observables.
//!
//! The integrated autocorrelation time uses a self-consistent window: the
//! sum `tau(M) = 1/2 + sum_{c=1..M} rho_c` is extended until the first `M`
//! with `M >= 4 tau(M) + 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ceil, mean_variance, sqrt};

/// Window factor in `M >= WINDOW * tau + 1`.
pub const WINDOW: f64 = 4.0;

/// Autocorrelation summary of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainStatistics {
    pub n_samples: usize,
    /// `Gamma_0`, the population variance.
    pub variance: f64,
    /// `rho_0 ..= rho_M`.
    pub rho: Vec<f64>,
    /// Integrated time in sample units.
    pub tau_int: f64,
    pub cutoff: usize,
    /// Sweeps per sample used to convert to sweep units.
    pub interval: f64,
    /// `tau_int * interval`.
    pub tau_sweeps: f64,
}

/// `Gamma_c = 1/(N-c) sum_{i<N-c} (O_i - mean)(O_{i+c} - mean)`, with the
/// mean taken over the whole series.
pub fn autocovariance(series: &[f64], lag: usize) -> Result<f64> {
    if lag >= series.len() {
        return Err(Error::LagOutOfRange { lag, len: series.len() });
    }
    let (mean, _) = mean_variance(series);
    Ok(autocovariance_centered(series, mean, lag))
}

fn autocovariance_centered(series: &[f64], mean: f64, lag: usize) -> f64 {
    let n = series.len() - lag;
    let mut acc = 0.0;
    for (a, b) in series[..n].iter().zip(&series[lag..]) {
        acc += (a - mean) * (b - mean);
    }
    acc / n as f64
}

/// Relative variance below which a series counts as constant.
const ZERO_VARIANCE: f64 = 1e-24;

fn is_constant(mean: f64, variance: f64) -> bool {
    variance <= ZERO_VARIANCE * mean * mean
}

/// Integrated autocorrelation time with the self-consistent window, in
/// sample units. `interval` converts it to sweeps.
pub fn integrated_autocorr_time(series: &[f64], interval: f64) -> Result<ChainStatistics> {
    if series.len() < 2 {
        return Err(Error::ChainTooShort(series.len()));
    }
    let (mean, variance) = mean_variance(series);
    if is_constant(mean, variance) {
        return Err(Error::StuckChain);
    }
    let gamma0 = autocovariance_centered(series, mean, 0);
    let max_lag = series.len() / 2;
    let mut rho = alloc::vec![1.0];
    let mut tau = 0.5;
    let mut cutoff = 1;
    loop {
        if cutoff > max_lag {
            return Err(Error::ChainTooShort(series.len()));
        }
        let r = autocovariance_centered(series, mean, cutoff) / gamma0;
        rho.push(r);
        tau += r;
        if cutoff as f64 >= WINDOW * tau + 1.0 {
            break;
        }
        cutoff += 1;
    }
    Ok(ChainStatistics {
        n_samples: series.len(),
        variance: gamma0,
        rho,
        tau_int: tau,
        cutoff,
        interval,
        tau_sweeps: tau * interval,
    })
}

/// Why a chain was flagged as stuck.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StuckReason {
    ZeroVariance,
    /// Longest run of identical values, in samples.
    LongConstantRun(usize),
}

/// Stuck-chain heuristic: zero variance, or a run of identical values
/// longer than `max_run_fraction` of the chain (0.5 by default).
pub fn detect_stuck(series: &[f64], max_run_fraction: f64) -> Option<StuckReason> {
    if series.is_empty() {
        return None;
    }
    let (mean, variance) = mean_variance(series);
    if is_constant(mean, variance) {
        return Some(StuckReason::ZeroVariance);
    }
    let mut longest = 1;
    let mut run = 1;
    for w in series.windows(2) {
        if w[0] == w[1] {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 1;
        }
    }
    (longest as f64 > max_run_fraction * series.len() as f64).then_some(StuckReason::LongConstantRun(longest))
}

/// Default fraction used by [`detect_stuck`].
pub const DEFAULT_MAX_RUN_FRACTION: f64 = 0.5;

/// MH sampling interval in sweeps: `ceil(max(0.01 n, 1))`.
pub fn select_mh_interval(n_spins: usize) -> u64 {
    ceil((0.01 * n_spins as f64).max(1.0)) as u64
}

/// Minimum number of autocorrelation times a chain must contain.
pub const MIN_AUTOCORR_TIMES: f64 = 1500.0;

/// Lower bound on `tau_int` (sample units) for an sIM interval to be accepted.
pub fn min_sample_tau(alpha: usize) -> f64 {
    if alpha <= 2 {
        1.5
    } else {
        2.0
    }
}

/// Pilot measurement at one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotStats {
    /// `tau_int` of the filtered energy series, in sample units.
    pub tau_int: f64,
    /// Retained (zero-magnetization) samples.
    pub n_retained: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalStep {
    Accept,
    /// Samples too far apart: tau in sample units is below the bound.
    Halve,
    /// Too few autocorrelation times in the chain.
    Double,
}

/// Decides how to adjust an sIM sampling interval from a pilot run.
pub fn next_interval_step(stats: &PilotStats, alpha: usize) -> IntervalStep {
    let enough_times = stats.n_retained as f64 / stats.tau_int >= MIN_AUTOCORR_TIMES;
    let resolved = stats.tau_int > min_sample_tau(alpha);
    match (resolved, enough_times) {
        (true, true) => IntervalStep::Accept,
        (false, _) => IntervalStep::Halve,
        (true, false) => IntervalStep::Double,
    }
}

/// Result of [`select_sim_interval`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalChoice {
    pub interval: u64,
    pub rounds: usize,
    pub stats: PilotStats,
    /// False when the interval bottomed out at 1 sweep with tau still below
    /// the bound; the finest possible interval is returned.
    pub tau_condition_met: bool,
}

/// Iteratively adjusts the sIM interval until a pilot chain holds at least
/// [`MIN_AUTOCORR_TIMES`] autocorrelation times and resolves tau above
/// [`min_sample_tau`]. `pilot` runs a chain at the given interval.
pub fn select_sim_interval<F>(alpha: usize, initial: u64, max_rounds: usize, mut pilot: F) -> Result<IntervalChoice>
where
    F: FnMut(u64) -> Result<PilotStats>,
{
    let mut interval = initial.max(1);
    let mut tried: Vec<u64> = Vec::new();
    for round in 1..=max_rounds {
        let stats = pilot(interval)?;
        tried.push(interval);
        let next = match next_interval_step(&stats, alpha) {
            IntervalStep::Accept => {
                return Ok(IntervalChoice { interval, rounds: round, stats, tau_condition_met: true })
            }
            IntervalStep::Halve if interval == 1 => {
                let enough = stats.n_retained as f64 / stats.tau_int >= MIN_AUTOCORR_TIMES;
                if !enough {
                    return Err(Error::IntervalSearch("pilot chain too short at interval 1"));
                }
                return Ok(IntervalChoice { interval, rounds: round, stats, tau_condition_met: false });
            }
            IntervalStep::Halve => interval / 2,
            IntervalStep::Double => interval * 2,
        };
        if tried.contains(&next) {
            return Err(Error::IntervalSearch("conditions conflict at the pilot chain length"));
        }
        interval = next;
    }
    Err(Error::IntervalSearch("no admissible interval within the round budget"))
}

/// Mean autocorrelation time over several chains, in sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChainTau {
    pub mean_sweeps: f64,
    /// Standard error of the mean over chains.
    pub spread: f64,
    pub per_chain: Vec<Option<ChainStatistics>>,
    /// `(chain index, reason)` for every excluded chain.
    pub excluded: Vec<(usize, Exclusion)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Exclusion {
    Stuck(StuckReason),
    Failed(Error),
}

/// Per-chain `tau_int * interval`, averaged over unstuck chains. Each entry
/// of `chains` is an observable series and its sweeps-per-sample spacing.
pub fn multi_chain_tau(chains: &[(&[f64], f64)]) -> Result<MultiChainTau> {
    let mut per_chain = Vec::with_capacity(chains.len());
    let mut excluded = Vec::new();
    for (k, &(series, interval)) in chains.iter().enumerate() {
        if let Some(reason) = detect_stuck(series, DEFAULT_MAX_RUN_FRACTION) {
            excluded.push((k, Exclusion::Stuck(reason)));
            per_chain.push(None);
            continue;
        }
        match integrated_autocorr_time(series, interval) {
            Ok(stats) => per_chain.push(Some(stats)),
            Err(e) => {
                excluded.push((k, Exclusion::Failed(e)));
                per_chain.push(None);
            }
        }
    }
    let taus: Vec<f64> = per_chain.iter().flatten().map(|s| s.tau_sweeps).collect();
    if taus.len() < 2 {
        return Err(Error::TooFewChains { needed: 2, have: taus.len() });
    }
    let (mean, var) = mean_variance(&taus);
    // standard error with the unbiased (k-1) variance
    let spread = sqrt(var / (taus.len() as f64 - 1.0));
    Ok(MultiChainTau { mean_sweeps: mean, spread, per_chain, excluded })
}
