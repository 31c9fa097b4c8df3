//! Single-spin energy barriers of the mapped Ising model.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::rbm::RbmModel;
use crate::sampler::SpinChain;

/// `H(m with m_i flipped) - H(m) = 2 m_i (sum_j J_ij m_j + h_i)`.
pub fn energy_barrier(ising: &IsingModel, m: &[i8], i: usize) -> Result<f64> {
    let field = ising.local_field(m, i)?;
    Ok(2.0 * f64::from(m[i]) * field)
}

/// Average visible-spin barrier `2 s_i sum_j W_ij x_j` over all samples
/// and visible sites of a chain with recorded hidden spins.
pub fn mean_visible_barrier(ising: &IsingModel, chain: &SpinChain) -> Result<f64> {
    let hidden = chain.hidden.as_ref().ok_or(Error::InvalidParameter("chain has no hidden snapshots"))?;
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let n = ising.n_visible();
    let mut total = 0.0;
    for (config, x) in chain.samples.iter().zip(hidden) {
        for (i, &s) in config.spins().iter().enumerate() {
            total += 2.0 * f64::from(s) * ising.visible_field(x, i);
        }
    }
    Ok(total / (n * chain.len()) as f64)
}

/// `(1/n) sum_ij |W_ij|`.
pub fn approx_barrier(model: &RbmModel) -> f64 {
    abs_sum(model.weights()) / model.n_visible() as f64
}

/// `(1/(alpha n^2)) sum_ij |W_ij|`.
pub fn mean_connection_strength(model: &RbmModel) -> f64 {
    let n = model.n_visible() as f64;
    abs_sum(model.weights()) / (model.alpha() as f64 * n * n)
}

fn abs_sum(w: &[f64]) -> f64 {
    w.iter().map(|x| x.abs()).sum()
}

/// Fraction of spins that changed between consecutive snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipRates {
    pub visible: f64,
    pub hidden: f64,
}

/// Per-block flip rates of a joint chain stored every sweep.
pub fn flip_rate(chain: &SpinChain) -> Result<FlipRates> {
    if chain.interval != 1 {
        return Err(Error::InvalidParameter("flip rates need snapshots at every sweep"));
    }
    let hidden = chain.hidden.as_ref().ok_or(Error::InvalidParameter("chain has no hidden snapshots"))?;
    if chain.len() < 2 {
        return Err(Error::ChainTooShort(chain.len()));
    }
    let changed = |a: &[i8], b: &[i8]| a.iter().zip(b).filter(|(x, y)| x != y).count();
    let (mut nv, mut nh) = (0usize, 0usize);
    for k in 1..chain.len() {
        nv += changed(chain.samples[k - 1].spins(), chain.samples[k].spins());
        nh += changed(&hidden[k - 1], &hidden[k]);
    }
    let steps = (chain.len() - 1) as f64;
    Ok(FlipRates {
        visible: nv as f64 / (steps * chain.samples[0].len() as f64),
        hidden: nh as f64 / (steps * hidden[0].len().max(1) as f64),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierReport {
    pub mean_visible_barrier: f64,
    pub approx_barrier: f64,
    pub mean_connection_strength: f64,
    pub flip_rates: FlipRates,
    /// Per-site visible barrier averaged over samples.
    pub per_site: Vec<f64>,
}

/// Full report from a model and a joint chain sampled at interval 1.
pub fn barrier_report(model: &RbmModel, chain: &SpinChain) -> Result<BarrierReport> {
    let ising = IsingModel::from_rbm(model);
    let hidden = chain.hidden.as_ref().ok_or(Error::InvalidParameter("chain has no hidden snapshots"))?;
    let mut per_site = alloc::vec![0.0; model.n_visible()];
    for (config, x) in chain.samples.iter().zip(hidden) {
        for (i, &s) in config.spins().iter().enumerate() {
            per_site[i] += 2.0 * f64::from(s) * ising.visible_field(x, i);
        }
    }
    let k = chain.len().max(1) as f64;
    for v in &mut per_site {
        *v /= k;
    }
    Ok(BarrierReport {
        mean_visible_barrier: mean_visible_barrier(&ising, chain)?,
        approx_barrier: approx_barrier(model),
        mean_connection_strength: mean_connection_strength(model),
        flip_rates: flip_rate(chain)?,
        per_site,
    })
}
