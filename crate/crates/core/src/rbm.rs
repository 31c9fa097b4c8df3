//! Restricted Boltzmann machine wavefunction with traced-out hidden units.
//!
//! `psi(s) = exp[ 1/2 * sum_j log(2 cosh theta_j) ]` with
//! `theta_j = b_j + sum_i W_ij s_i`, so that `psi(s)^2` is the visible
//! marginal of the RBM Boltzmann distribution. There are no visible biases.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::SpinConfig;
use crate::math::{log_2cosh, tanh};

/// Real-parameter RBM.
///
/// Parameters are stored contiguously as `[b_0..b_{M-1}, W_00, W_01, ..]`
/// with `W` in row-major order (visible index outer, hidden index inner).
/// This is also the ordering of [`RbmModel::log_derivatives`].
#[derive(Debug, Clone, PartialEq)]
pub struct RbmModel {
    n_visible: usize,
    alpha: usize,
    params: Vec<f64>,
}

impl RbmModel {
    /// Builds a model from a row-major `n x M` weight matrix and `M` hidden biases.
    pub fn new(n_visible: usize, alpha: usize, weights: &[f64], hidden_bias: &[f64]) -> Result<Self> {
        if n_visible == 0 || alpha == 0 {
            return Err(Error::InvalidParameter("visible count and alpha must be positive"));
        }
        let m = alpha * n_visible;
        if hidden_bias.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: hidden_bias.len() });
        }
        if weights.len() != n_visible * m {
            return Err(Error::DimensionMismatch { expected: n_visible * m, got: weights.len() });
        }
        if weights.iter().chain(hidden_bias).any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        let mut params = Vec::with_capacity(m + n_visible * m);
        params.extend_from_slice(hidden_bias);
        params.extend_from_slice(weights);
        Ok(Self { n_visible, alpha, params })
    }

    /// Model with all parameters zero; `psi` is constant.
    pub fn zeros(n_visible: usize, alpha: usize) -> Result<Self> {
        let m = alpha * n_visible;
        Self::new(n_visible, alpha, &alloc::vec![0.0; n_visible * m], &alloc::vec![0.0; m])
    }

    /// Independent uniform parameters in `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(n_visible: usize, alpha: usize, scale: f64, rng: &mut R) -> Result<Self> {
        let mut model = Self::zeros(n_visible, alpha)?;
        for p in &mut model.params {
            *p = rng.gen_range(-scale..=scale);
        }
        Ok(model)
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.alpha * self.n_visible
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Number of variational parameters, `M + n*M`.
    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.params[..self.n_hidden()]
    }

    /// Row-major `n x M` weights.
    pub fn weights(&self) -> &[f64] {
        &self.params[self.n_hidden()..]
    }

    /// Weights coupling visible spin `i` to every hidden unit.
    pub fn weight_row(&self, visible: usize) -> &[f64] {
        let m = self.n_hidden();
        &self.weights()[visible * m..(visible + 1) * m]
    }

    pub fn weight(&self, visible: usize, hidden: usize) -> f64 {
        self.weights()[visible * self.n_hidden() + hidden]
    }

    /// All parameters in derivative order.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Replaces all parameters; rejects wrong length or non-finite values.
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(Error::DimensionMismatch { expected: self.params.len(), got: params.len() });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    fn check_config(&self, config: &SpinConfig) -> Result<()> {
        if config.len() != self.n_visible {
            return Err(Error::DimensionMismatch { expected: self.n_visible, got: config.len() });
        }
        Ok(())
    }

    /// `theta_j = b_j + sum_i W_ij s_i` for every hidden unit.
    pub fn theta(&self, config: &SpinConfig) -> Result<Vec<f64>> {
        self.check_config(config)?;
        let m = self.n_hidden();
        let mut theta = self.hidden_bias().to_vec();
        for (i, &s) in config.spins().iter().enumerate() {
            let row = &self.weights()[i * m..(i + 1) * m];
            let s = f64::from(s);
            for (t, w) in theta.iter_mut().zip(row) {
                *t += s * w;
            }
        }
        Ok(theta)
    }

    /// `log psi(s)`.
    pub fn log_psi(&self, config: &SpinConfig) -> Result<f64> {
        Ok(0.5 * self.theta(config)?.iter().map(|&t| log_2cosh(t)).sum::<f64>())
    }

    /// `log psi(s') - log psi(s)` where `s'` is `config` with `flips` negated.
    ///
    /// `flips` must hold distinct sites.
    pub fn log_psi_ratio(&self, cache: &ThetaCache, config: &SpinConfig, flips: &[usize]) -> f64 {
        let m = self.n_hidden();
        let w = self.weights();
        let spins = config.spins();
        let mut acc = 0.0;
        match *flips {
            [] => return 0.0,
            [a] => {
                let ra = &w[a * m..(a + 1) * m];
                let sa = 2.0 * f64::from(spins[a]);
                for j in 0..m {
                    let t = cache.theta[j] - sa * ra[j];
                    acc += log_2cosh(t) - cache.log_cosh[j];
                }
            }
            [a, b] => {
                let ra = &w[a * m..(a + 1) * m];
                let rb = &w[b * m..(b + 1) * m];
                let sa = 2.0 * f64::from(spins[a]);
                let sb = 2.0 * f64::from(spins[b]);
                for j in 0..m {
                    let t = cache.theta[j] - sa * ra[j] - sb * rb[j];
                    acc += log_2cosh(t) - cache.log_cosh[j];
                }
            }
            _ => {
                for j in 0..m {
                    let t = flips
                        .iter()
                        .fold(cache.theta[j], |t, &i| t - 2.0 * f64::from(spins[i]) * w[i * m + j]);
                    acc += log_2cosh(t) - cache.log_cosh[j];
                }
            }
        }
        0.5 * acc
    }

    /// `psi(s') / psi(s)`, computed from theta deltas.
    pub fn psi_ratio(&self, cache: &ThetaCache, config: &SpinConfig, flips: &[usize]) -> f64 {
        crate::math::exp(self.log_psi_ratio(cache, config, flips))
    }

    /// `O_k = d log psi / d p_k`: `tanh(theta_j)/2` for biases, then
    /// `s_i tanh(theta_j)/2` for weights in row-major order.
    pub fn log_derivatives(&self, config: &SpinConfig) -> Result<Vec<f64>> {
        let cache = ThetaCache::new(self, config)?;
        let mut out = alloc::vec![0.0; self.n_params()];
        self.log_derivatives_into(&cache, config, &mut out);
        Ok(out)
    }

    /// Writes the log-derivatives into `out` (length [`RbmModel::n_params`]).
    pub fn log_derivatives_into(&self, cache: &ThetaCache, config: &SpinConfig, out: &mut [f64]) {
        let m = self.n_hidden();
        let (bias_part, weight_part) = out.split_at_mut(m);
        for (o, &t) in bias_part.iter_mut().zip(&cache.theta) {
            *o = 0.5 * tanh(t);
        }
        for (row, &s) in weight_part.chunks_exact_mut(m).zip(config.spins()) {
            let s = f64::from(s);
            for (o, &ob) in row.iter_mut().zip(bias_part.iter()) {
                *o = s * ob;
            }
        }
    }
}

/// Hidden pre-activations bound to one spin configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaCache {
    theta: Vec<f64>,
    log_cosh: Vec<f64>,
}

impl ThetaCache {
    pub fn new(model: &RbmModel, config: &SpinConfig) -> Result<Self> {
        let theta = model.theta(config)?;
        let log_cosh = theta.iter().map(|&t| log_2cosh(t)).collect();
        Ok(Self { theta, log_cosh })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `log psi` of the bound configuration.
    pub fn log_psi(&self) -> f64 {
        0.5 * self.log_cosh.iter().sum::<f64>()
    }

    /// Negates `flips` in `config` and updates theta incrementally:
    /// `theta_j -= 2 * sum_{i in flips} W_ij s_i(old)`.
    pub fn apply_flips(&mut self, model: &RbmModel, config: &mut SpinConfig, flips: &[usize]) {
        let m = model.n_hidden();
        for &i in flips {
            let s = 2.0 * f64::from(config[i]);
            let row = model.weight_row(i);
            for (t, w) in self.theta.iter_mut().zip(row) {
                *t -= s * w;
            }
            config.flip(i);
        }
        debug_assert_eq!(self.theta.len(), m);
        for (lc, &t) in self.log_cosh.iter_mut().zip(&self.theta) {
            *lc = log_2cosh(t);
        }
    }
}
