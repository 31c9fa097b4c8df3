//! Stochastic-reconfiguration ground-state optimisation.
//!
//! Each iteration samples the current state with Metropolis-Hastings,
//! builds the covariance `S` of the log-derivatives and the force `F`,
//! shifts the diagonal of `S` by a decaying regularisation, and applies
//! `p <- p - eta * S^{-1} F`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{local_energy_cached, SquareLattice};
use crate::linalg::{cholesky_solve, covariance, norm};
use crate::math::{mean_variance, powi};
use crate::rbm::RbmModel;
use crate::rng::chain_rng;
use crate::sampler::{mh_sweep, MhState, PairProposal, DEFAULT_THERMALIZATION};

/// Sampling and regularisation presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 2000 samples, `eps = max(1e-4, 100 * 0.9^p)`.
    Low,
    /// 10000 samples, `eps = max(1e-3, 10 * 0.85^p)`.
    High,
}

impl Preset {
    /// Preset used for a given system size and hidden density.
    pub fn for_system(n_spins: usize, alpha: usize) -> Self {
        if n_spins >= 256 || (n_spins >= 144 && alpha >= 8) {
            Preset::High
        } else {
            Preset::Low
        }
    }

    pub fn n_samples(self) -> usize {
        match self {
            Preset::Low => 2000,
            Preset::High => 10_000,
        }
    }

    pub fn schedule(self) -> Regularization {
        match self {
            Preset::Low => Regularization { floor: 1e-4, initial: 100.0, decay: 0.9 },
            Preset::High => Regularization { floor: 1e-3, initial: 10.0, decay: 0.85 },
        }
    }
}

/// Diagonal shift `eps(p) = max(floor, initial * decay^p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularization {
    pub floor: f64,
    pub initial: f64,
    pub decay: f64,
}

impl Regularization {
    pub fn at(&self, iteration: usize) -> f64 {
        let exp = i32::try_from(iteration).unwrap_or(i32::MAX);
        self.floor.max(self.initial * powi(self.decay, exp))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub eta: f64,
    pub iterations: usize,
    pub n_samples: usize,
    pub regularization: Regularization,
    pub thermalization: u64,
    pub seed: u64,
    /// Initial parameters are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub proposal: PairProposal,
}

impl TrainConfig {
    pub fn from_preset(preset: Preset, iterations: usize, seed: u64) -> Self {
        Self {
            eta: 0.005,
            iterations,
            n_samples: preset.n_samples(),
            regularization: preset.schedule(),
            thermalization: DEFAULT_THERMALIZATION,
            seed,
            init_scale: 0.01,
            proposal: PairProposal::Global,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter("learning rate must be finite and non-negative"));
        }
        if self.n_samples < 2 {
            return Err(Error::InvalidParameter("at least two samples per iteration are required"));
        }
        Ok(())
    }
}

/// Statistics of one optimisation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub energy: f64,
    pub variance: f64,
    /// Regularisation shift used at this step.
    pub eps: f64,
    /// Euclidean norm of the force vector.
    pub grad_norm: f64,
    pub acceptance: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<IterationRecord>,
}

/// Everything an observer sees after an iteration's estimates, before the update.
pub struct IterationView<'a> {
    pub iteration: usize,
    pub model: &'a RbmModel,
    /// Unregularised `S`, row-major `n_params x n_params`.
    pub s_matrix: &'a [f64],
    pub force: &'a [f64],
    pub record: &'a IterationRecord,
}

/// `S_kk' = <O_k O_k'> - <O_k><O_k'>` from a row-major
/// `n_samples x n_params` matrix of log-derivatives.
pub fn sr_matrix(o: &[f64], n_samples: usize, n_params: usize) -> Vec<f64> {
    covariance(o, n_samples, n_params).1
}

/// `F_k = <E O_k> - <E><O_k>`.
pub fn force_vector(o: &[f64], e_loc: &[f64], n_params: usize) -> Vec<f64> {
    let n = e_loc.len();
    assert_eq!(o.len(), n * n_params);
    let (mean_e, _) = mean_variance(e_loc);
    let mut f = alloc::vec![0.0; n_params];
    for (row, &e) in o.chunks_exact(n_params).zip(e_loc) {
        let de = e - mean_e;
        for (fk, ok) in f.iter_mut().zip(row) {
            *fk += de * ok;
        }
    }
    let inv = 1.0 / n as f64;
    for fk in &mut f {
        *fk *= inv;
    }
    f
}

/// `S + eps I`, in place.
pub fn regularize(s: &mut [f64], n_params: usize, eps: f64) {
    for k in 0..n_params {
        s[k * n_params + k] += eps;
    }
}

/// Solves `S' delta = F` and applies `p <- p - eta * delta`. Returns `delta`.
pub fn sr_step(model: &mut RbmModel, s_regularized: &[f64], force: &[f64], eta: f64) -> Result<Vec<f64>> {
    let k = model.n_params();
    if force.len() != k || s_regularized.len() != k * k {
        return Err(Error::DimensionMismatch { expected: k, got: force.len() });
    }
    let delta = cholesky_solve(s_regularized, k, force)?;
    let params: Vec<f64> = model.params().iter().zip(&delta).map(|(p, d)| p - eta * d).collect();
    model.set_params(&params)?;
    Ok(delta)
}

/// Trains an RBM with `alpha * L^2` hidden units from small random parameters.
pub fn train(
    lattice: &SquareLattice,
    alpha: usize,
    exchange: f64,
    cfg: &TrainConfig,
) -> Result<(RbmModel, TrainHistory)> {
    train_with_observer(lattice, alpha, exchange, cfg, |_| {})
}

/// [`train`] with a callback invoked once per iteration.
pub fn train_with_observer<F>(
    lattice: &SquareLattice,
    alpha: usize,
    exchange: f64,
    cfg: &TrainConfig,
    mut observer: F,
) -> Result<(RbmModel, TrainHistory)>
where
    F: FnMut(&IterationView<'_>),
{
    cfg.validate()?;
    let n = lattice.n_sites();
    let mut rng = chain_rng(cfg.seed);
    let mut model = RbmModel::random(n, alpha, cfg.init_scale, &mut rng)?;
    let k = model.n_params();
    let mut history = TrainHistory { records: Vec::with_capacity(cfg.iterations) };
    let mut config = lattice.neel_state();
    let mut o = alloc::vec![0.0; cfg.n_samples * k];
    let mut e_loc = alloc::vec![0.0; cfg.n_samples];

    for iteration in 0..cfg.iterations {
        let mut state = MhState::new(&model, config)?;
        for _ in 0..cfg.thermalization {
            mh_sweep(&model, &mut state, cfg.proposal, lattice.bonds(), &mut rng)?;
        }
        let mut accepted = 0;
        for (row, e) in o.chunks_exact_mut(k).zip(e_loc.iter_mut()) {
            accepted += mh_sweep(&model, &mut state, cfg.proposal, lattice.bonds(), &mut rng)?;
            *e = local_energy_cached(lattice.bonds(), &model, &state.cache, &state.config, exchange)?;
            model.log_derivatives_into(&state.cache, &state.config, row);
        }
        config = state.config;

        let (energy, variance) = mean_variance(&e_loc);
        if !energy.is_finite() || !variance.is_finite() {
            return Err(Error::NonFinite("variational energy"));
        }
        let mut s = sr_matrix(&o, cfg.n_samples, k);
        let force = force_vector(&o, &e_loc, k);
        let eps = cfg.regularization.at(iteration);
        let record = IterationRecord {
            energy,
            variance,
            eps,
            grad_norm: norm(&force),
            acceptance: accepted as f64 / (cfg.n_samples * n) as f64,
        };
        observer(&IterationView { iteration, model: &model, s_matrix: &s, force: &force, record: &record });
        history.records.push(record);
        regularize(&mut s, k, eps);
        sr_step(&mut model, &s, &force, cfg.eta)?;
    }
    Ok((model, history))
}
