//! Markov-chain generators.
//!
//! * Metropolis-Hastings on the visible spins with antiparallel pair
//!   exchanges, which conserve magnetization. One sweep is `n` proposals.
//! * Chromatic Gibbs sampling of the joint Ising model, emulating a
//!   stochastic Ising machine (sIM). One sweep resamples every hidden spin
//!   from the current visible spins, then every visible spin from the fresh
//!   hidden spins.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::lattice::{Bond, SpinConfig, SquareLattice};
use crate::math::tanh;
use crate::rbm::{RbmModel, ThetaCache};
use crate::rng::chain_rng;

/// Default thermalization length in sweeps.
pub const DEFAULT_THERMALIZATION: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    /// Metropolis-Hastings pair exchange on the visible spins.
    Mh,
    /// Chromatic Gibbs sampling of the joint Ising model.
    Sim,
}

/// How Metropolis-Hastings pairs are proposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairProposal {
    /// Uniform site `i`, then a uniform site among all sites antiparallel to `i`.
    #[default]
    Global,
    /// Uniform bond; parallel bonds count as rejected proposals.
    NearestNeighbor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    /// Sweeps after thermalization.
    pub n_sweeps: u64,
    pub thermalization_sweeps: u64,
    /// Sweeps between stored samples.
    pub sample_interval: u64,
    pub seed: u64,
    pub proposal: PairProposal,
    /// Store hidden spins alongside visible ones (sIM only).
    pub record_hidden: bool,
}

impl ChainConfig {
    pub fn new(n_sweeps: u64, sample_interval: u64, seed: u64) -> Self {
        Self {
            n_sweeps,
            thermalization_sweeps: DEFAULT_THERMALIZATION,
            sample_interval,
            seed,
            proposal: PairProposal::Global,
            record_hidden: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sweeps == 0 {
            return Err(Error::InvalidParameter("n_sweeps must be positive"));
        }
        if self.sample_interval == 0 {
            return Err(Error::InvalidParameter("sample interval must be at least 1"));
        }
        Ok(())
    }
}

/// Stored visible snapshots of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinChain {
    pub kind: SamplerKind,
    /// Sweeps per stored sample.
    pub interval: u64,
    pub samples: Vec<SpinConfig>,
    /// Post-thermalization sweep count at which each sample was taken (1-based).
    pub sweep_indices: Vec<u64>,
    pub magnetizations: Vec<i64>,
    /// Hidden snapshots when recorded.
    pub hidden: Option<Vec<Vec<i8>>>,
    /// Post-thermalization sweeps run, independent of any filtering.
    pub total_sweeps: u64,
    /// MH acceptance rate, or the sIM per-sweep visible flip fraction.
    pub rate: f64,
}

impl SpinChain {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Joint configuration `[x, s]` of sample `k`, if hidden spins were recorded.
    pub fn joint(&self, k: usize) -> Option<Vec<i8>> {
        let hidden = self.hidden.as_ref()?;
        let mut m = hidden[k].clone();
        m.extend_from_slice(self.samples[k].spins());
        Some(m)
    }

    /// Average sweeps between consecutive retained samples.
    pub fn mean_spacing(&self) -> f64 {
        if self.samples.is_empty() {
            f64::INFINITY
        } else {
            self.total_sweeps as f64 / self.samples.len() as f64
        }
    }
}

/// Visible configuration plus its theta cache.
#[derive(Debug, Clone)]
pub struct MhState {
    pub config: SpinConfig,
    pub cache: ThetaCache,
}

impl MhState {
    pub fn new(model: &RbmModel, config: SpinConfig) -> Result<Self> {
        let cache = ThetaCache::new(model, &config)?;
        Ok(Self { config, cache })
    }
}

/// One Metropolis-Hastings sweep: exactly `n` pair-exchange proposals, each
/// accepted with probability `min(1, |psi'/psi|^2)`. Returns the number of
/// accepted proposals.
pub fn mh_sweep<R: Rng + ?Sized>(
    model: &RbmModel,
    state: &mut MhState,
    proposal: PairProposal,
    bonds: &[Bond],
    rng: &mut R,
) -> Result<u64> {
    let n = state.config.len();
    let ups = state.config.spins().iter().filter(|&&s| s > 0).count();
    if ups == 0 || ups == n {
        return Err(Error::NoAntiparallelPair);
    }
    if proposal == PairProposal::NearestNeighbor && bonds.is_empty() {
        return Err(Error::InvalidParameter("nearest-neighbour proposals need a bond list"));
    }
    let mut accepted = 0;
    for _ in 0..n {
        let (a, b) = match proposal {
            PairProposal::Global => {
                let a = rng.gen_range(0..n);
                let sa = state.config[a];
                let b = loop {
                    let b = rng.gen_range(0..n);
                    if state.config[b] != sa {
                        break b;
                    }
                };
                (a, b)
            }
            PairProposal::NearestNeighbor => {
                let (a, b) = bonds[rng.gen_range(0..bonds.len())];
                if state.config[a] == state.config[b] {
                    continue;
                }
                (a, b)
            }
        };
        let log_accept = 2.0 * model.log_psi_ratio(&state.cache, &state.config, &[a, b]);
        if log_accept >= 0.0 || rng.gen::<f64>() < crate::math::exp(log_accept) {
            state.cache.apply_flips(model, &mut state.config, &[a, b]);
            accepted += 1;
        }
    }
    Ok(accepted)
}

/// `P(m_i = +1) = 1 / (1 + exp(-2 I))` for local field `I`.
#[inline]
pub fn prob_up(field: f64) -> f64 {
    0.5 * (1.0 + tanh(field))
}

/// Joint sIM state with scratch space for the hidden fields.
#[derive(Debug, Clone)]
pub struct SimState {
    /// `[x_1..x_M, s_1..s_n]`.
    pub spins: Vec<i8>,
    fields: Vec<f64>,
}

impl SimState {
    pub fn new(ising: &IsingModel, spins: Vec<i8>) -> Result<Self> {
        if spins.len() != ising.n_spins() {
            return Err(Error::DimensionMismatch { expected: ising.n_spins(), got: spins.len() });
        }
        Ok(Self { spins, fields: alloc::vec![0.0; ising.n_hidden()] })
    }

    /// Uniformly random joint configuration.
    pub fn random<R: Rng + ?Sized>(ising: &IsingModel, rng: &mut R) -> Self {
        let spins = (0..ising.n_spins()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        Self { spins, fields: alloc::vec![0.0; ising.n_hidden()] }
    }

    pub fn hidden(&self) -> &[i8] {
        &self.spins[..self.fields.len()]
    }

    pub fn visible(&self) -> &[i8] {
        &self.spins[self.fields.len()..]
    }
}

/// Flip counts of one sIM sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepFlips {
    pub hidden: u64,
    pub visible: u64,
}

/// One chromatic Gibbs sweep: all hidden spins given the visible block,
/// then all visible spins given the fresh hidden block.
pub fn sim_sweep<R: Rng + ?Sized>(ising: &IsingModel, state: &mut SimState, rng: &mut R) -> SweepFlips {
    let m = ising.n_hidden();
    let mut flips = SweepFlips::default();
    let (hidden, visible) = state.spins.split_at_mut(m);
    ising.hidden_fields_into(visible, &mut state.fields);
    for (x, &field) in hidden.iter_mut().zip(&state.fields) {
        let new = if rng.gen::<f64>() < prob_up(field) { 1 } else { -1 };
        flips.hidden += u64::from(new != *x);
        *x = new;
    }
    for (i, s) in visible.iter_mut().enumerate() {
        let field = ising.visible_field(hidden, i);
        let new = if rng.gen::<f64>() < prob_up(field) { 1 } else { -1 };
        flips.visible += u64::from(new != *s);
        *s = new;
    }
    flips
}

/// Runs a Metropolis-Hastings chain from `initial`.
pub fn run_mh_chain(
    model: &RbmModel,
    initial: SpinConfig,
    bonds: &[Bond],
    cfg: &ChainConfig,
) -> Result<SpinChain> {
    cfg.validate()?;
    let mut rng = chain_rng(cfg.seed);
    let mut state = MhState::new(model, initial)?;
    for _ in 0..cfg.thermalization_sweeps {
        mh_sweep(model, &mut state, cfg.proposal, bonds, &mut rng)?;
    }
    let capacity = (cfg.n_sweeps / cfg.sample_interval) as usize;
    let mut chain = SpinChain {
        kind: SamplerKind::Mh,
        interval: cfg.sample_interval,
        samples: Vec::with_capacity(capacity),
        sweep_indices: Vec::with_capacity(capacity),
        magnetizations: Vec::with_capacity(capacity),
        hidden: None,
        total_sweeps: cfg.n_sweeps,
        rate: 0.0,
    };
    let mut accepted = 0;
    for sweep in 1..=cfg.n_sweeps {
        accepted += mh_sweep(model, &mut state, cfg.proposal, bonds, &mut rng)?;
        if sweep % cfg.sample_interval == 0 {
            chain.magnetizations.push(state.config.magnetization());
            chain.samples.push(state.config.clone());
            chain.sweep_indices.push(sweep);
        }
    }
    chain.rate = accepted as f64 / (cfg.n_sweeps as f64 * model.n_visible() as f64);
    Ok(chain)
}

/// Runs an sIM chain from a uniformly random joint state.
pub fn run_sim_chain(ising: &IsingModel, cfg: &ChainConfig) -> Result<SpinChain> {
    cfg.validate()?;
    let mut rng = chain_rng(cfg.seed);
    let mut state = SimState::random(ising, &mut rng);
    for _ in 0..cfg.thermalization_sweeps {
        sim_sweep(ising, &mut state, &mut rng);
    }
    let capacity = (cfg.n_sweeps / cfg.sample_interval) as usize;
    let mut chain = SpinChain {
        kind: SamplerKind::Sim,
        interval: cfg.sample_interval,
        samples: Vec::with_capacity(capacity),
        sweep_indices: Vec::with_capacity(capacity),
        magnetizations: Vec::with_capacity(capacity),
        hidden: cfg.record_hidden.then(|| Vec::with_capacity(capacity)),
        total_sweeps: cfg.n_sweeps,
        rate: 0.0,
    };
    let mut visible_flips = 0;
    for sweep in 1..=cfg.n_sweeps {
        visible_flips += sim_sweep(ising, &mut state, &mut rng).visible;
        if sweep % cfg.sample_interval == 0 {
            let config = SpinConfig::new(state.visible().to_vec())?;
            chain.magnetizations.push(config.magnetization());
            chain.samples.push(config);
            chain.sweep_indices.push(sweep);
            if let Some(hidden) = chain.hidden.as_mut() {
                hidden.push(state.hidden().to_vec());
            }
        }
    }
    chain.rate = visible_flips as f64 / (cfg.n_sweeps as f64 * ising.n_visible() as f64);
    Ok(chain)
}

/// Runs either sampler on a lattice model: MH starts from the Néel state,
/// sIM from a random joint state.
pub fn run_chain(
    kind: SamplerKind,
    model: &RbmModel,
    lattice: &SquareLattice,
    cfg: &ChainConfig,
) -> Result<SpinChain> {
    if model.n_visible() != lattice.n_sites() {
        return Err(Error::DimensionMismatch { expected: lattice.n_sites(), got: model.n_visible() });
    }
    match kind {
        SamplerKind::Mh => run_mh_chain(model, lattice.neel_state(), lattice.bonds(), cfg),
        SamplerKind::Sim => run_sim_chain(&IsingModel::from_rbm(model), cfg),
    }
}

/// Keeps only zero-magnetization samples. Returns the filtered chain and the
/// retained fraction; `total_sweeps` is left untouched.
pub fn filter_magnetization_zero(chain: &SpinChain) -> Result<(SpinChain, f64)> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let keep: Vec<usize> = (0..chain.len()).filter(|&k| chain.magnetizations[k] == 0).collect();
    if keep.is_empty() {
        return Err(Error::EmptySector);
    }
    let fraction = keep.len() as f64 / chain.len() as f64;
    let filtered = SpinChain {
        kind: chain.kind,
        interval: chain.interval,
        samples: keep.iter().map(|&k| chain.samples[k].clone()).collect(),
        sweep_indices: keep.iter().map(|&k| chain.sweep_indices[k]).collect(),
        magnetizations: alloc::vec![0; keep.len()],
        hidden: chain.hidden.as_ref().map(|h| keep.iter().map(|&k| h[k].clone()).collect()),
        total_sweeps: chain.total_sweeps,
        rate: chain.rate,
    };
    Ok((filtered, fraction))
}

/// Seeds one generator stream per chain from a master seed.
pub fn chain_seed(master: u64, chain_index: u64) -> u64 {
    crate::rng::derive_seed(master, chain_index)
}
