//! Brute-force references for small systems: exhaustive enumeration of the
//! RBM and Ising distributions, and Lanczos diagonalisation of the
//! Heisenberg Hamiltonian in the zero-magnetisation sector.
//!
//! Configurations are encoded as integers with bit `i` set when spin `i`
//! points up. Joint Ising states put the hidden spins in the low bits.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::lattice::{local_energy_cached, Bond, SpinConfig, SquareLattice};
use crate::linalg::{dot, norm, symmetric_eigen};
use crate::math::exp;
use crate::rbm::{RbmModel, ThetaCache};

/// Largest number of spins any oracle will enumerate.
pub const MAX_ENUMERATED_SPINS: usize = 20;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::SizeGuard(n))
    } else {
        Ok(())
    }
}

fn spins_from_bits(bits: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect()
}

fn normalize_log_weights(log_w: &[f64]) -> Vec<f64> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = log_w.iter().map(|&l| exp(l - max)).collect();
    let z: f64 = p.iter().sum();
    for x in &mut p {
        *x /= z;
    }
    p
}

/// Normalised `psi(s)^2` over all `2^n` visible configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibleDistribution {
    pub n_visible: usize,
    pub probabilities: Vec<f64>,
}

impl VisibleDistribution {
    /// `(state, probability)` over the zero-magnetisation sector, renormalised.
    pub fn sector(&self) -> Vec<(u64, f64)> {
        let half = (self.n_visible / 2) as u32;
        let mut out: Vec<(u64, f64)> = self
            .probabilities
            .iter()
            .enumerate()
            .filter(|(s, _)| (*s as u64).count_ones() == half && self.n_visible % 2 == 0)
            .map(|(s, &p)| (s as u64, p))
            .collect();
        let z: f64 = out.iter().map(|x| x.1).sum();
        for x in &mut out {
            x.1 /= z;
        }
        out
    }
}

pub fn enumerate_visible_distribution(model: &RbmModel) -> Result<VisibleDistribution> {
    let n = model.n_visible();
    guard(n, MAX_ENUMERATED_SPINS)?;
    let mut log_w = Vec::with_capacity(1 << n);
    for bits in 0..1u64 << n {
        log_w.push(2.0 * model.log_psi(&SpinConfig::from_bits(bits, n))?);
    }
    Ok(VisibleDistribution { n_visible: n, probabilities: normalize_log_weights(&log_w) })
}

/// Normalised `exp(-H(m))` over all joint configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub n_hidden: usize,
    pub n_visible: usize,
    pub probabilities: Vec<f64>,
}

impl JointDistribution {
    /// Sum over hidden configurations, indexed by the visible bits.
    pub fn visible_marginal(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; 1 << self.n_visible];
        for (state, &p) in self.probabilities.iter().enumerate() {
            out[state >> self.n_hidden] += p;
        }
        out
    }
}

pub fn enumerate_joint_boltzmann(ising: &IsingModel) -> Result<JointDistribution> {
    let total = ising.n_spins();
    guard(total, MAX_ENUMERATED_SPINS)?;
    let mut log_w = Vec::with_capacity(1 << total);
    for bits in 0..1u64 << total {
        log_w.push(-ising.energy(&spins_from_bits(bits, total))?);
    }
    Ok(JointDistribution {
        n_hidden: ising.n_hidden(),
        n_visible: ising.n_visible(),
        probabilities: normalize_log_weights(&log_w),
    })
}

/// Sorted list of `n`-spin states with a fixed number of up spins.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub n_spins: usize,
    pub states: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n_spins: usize, n_up: usize) -> Result<Self> {
        guard(n_spins, MAX_ENUMERATED_SPINS)?;
        let states: Vec<u64> = (0..1u64 << n_spins).filter(|s| s.count_ones() as usize == n_up).collect();
        if states.is_empty() {
            return Err(Error::EmptySector);
        }
        Ok(Self { n_spins, states })
    }

    /// Zero-magnetisation sector.
    pub fn balanced(n_spins: usize) -> Result<Self> {
        if n_spins % 2 != 0 {
            return Err(Error::EmptySector);
        }
        Self::new(n_spins, n_spins / 2)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// `out = H v` for the sublattice-rotated Heisenberg Hamiltonian
/// `J sum_bonds [S^z_i S^z_j - (S^+_i S^-_j + h.c.) / 2]`.
pub fn apply_sector_hamiltonian(basis: &SectorBasis, bonds: &[Bond], exchange: f64, v: &[f64], out: &mut [f64]) {
    for (k, &state) in basis.states.iter().enumerate() {
        let mut diag = 0.0;
        let mut acc = 0.0;
        for &(a, b) in bonds {
            let (sa, sb) = (state >> a & 1, state >> b & 1);
            if sa == sb {
                diag += 0.25;
            } else {
                diag -= 0.25;
                let flipped = state ^ (1 << a | 1 << b);
                let idx = basis.index(flipped).expect("exchange stays in the sector");
                acc -= 0.5 * v[idx];
            }
        }
        out[k] = exchange * (diag * v[k] + acc);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpectrumResult {
    pub ground_energy: f64,
    pub dimension: usize,
    /// `||H x - E x||` for the normalised Ritz vector.
    pub residual: f64,
    pub iterations: usize,
}

const LANCZOS_MAX_STEPS: usize = 300;
const LANCZOS_TOL: f64 = 1e-10;
const RESIDUAL_LIMIT: f64 = 1e-8;

/// Ground-state energy of the Heisenberg model on `lattice`.
pub fn exact_ground_energy(lattice: &SquareLattice, exchange: f64) -> Result<ExactSpectrumResult> {
    exact_ground_energy_bonds(lattice.n_sites(), lattice.bonds(), exchange)
}

/// Ground-state energy in the zero-magnetisation sector for an arbitrary
/// bond list, by Lanczos with full reorthogonalisation.
pub fn exact_ground_energy_bonds(n_spins: usize, bonds: &[Bond], exchange: f64) -> Result<ExactSpectrumResult> {
    let basis = SectorBasis::balanced(n_spins)?;
    let dim = basis.dim();
    let h = |v: &[f64], out: &mut [f64]| apply_sector_hamiltonian(&basis, bonds, exchange, v, out);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let mut basis_vecs: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = alloc::vec![0.0; dim];
    let max_steps = LANCZOS_MAX_STEPS.min(dim);
    let mut ritz = (0.0, Vec::new());

    for _ in 0..max_steps {
        h(&v, &mut w);
        let a = dot(&v, &w);
        alphas.push(a);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= a * vi;
        }
        if let (Some(prev), Some(&b)) = (basis_vecs.last(), betas.last()) {
            for (wi, pi) in w.iter_mut().zip(prev.iter()) {
                *wi -= b * pi;
            }
        }
        basis_vecs.push(core::mem::take(&mut v));
        for _ in 0..2 {
            for q in &basis_vecs {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        let m = alphas.len();
        let exhausted = b <= 1e-12 * (1.0 + a.abs()) || m == max_steps;
        if exhausted || (m >= 8 && m % 4 == 0) {
            let mut t = alloc::vec![0.0; m * m];
            for i in 0..m {
                t[i * m + i] = alphas[i];
                if i + 1 < m {
                    t[i * m + i + 1] = betas[i];
                    t[(i + 1) * m + i] = betas[i];
                }
            }
            let (vals, vecs) = symmetric_eigen(&t, m);
            let y: Vec<f64> = (0..m).map(|i| vecs[i * m]).collect();
            let estimate = (b * y[m - 1]).abs();
            ritz = (vals[0], y);
            if exhausted || estimate < LANCZOS_TOL * (1.0 + vals[0].abs()) {
                break;
            }
        }
        betas.push(b);
        v = w.iter().map(|x| x / b).collect();
    }

    let (energy, y) = ritz;
    let mut x = alloc::vec![0.0; dim];
    for (q, &c) in basis_vecs.iter().zip(&y) {
        for (xi, qi) in x.iter_mut().zip(q) {
            *xi += c * qi;
        }
    }
    let nx = norm(&x);
    x.iter_mut().for_each(|xi| *xi /= nx);
    h(&x, &mut w);
    let residual = norm(&w.iter().zip(&x).map(|(hx, xi)| hx - energy * xi).collect::<Vec<f64>>());
    if !(residual < RESIDUAL_LIMIT) {
        return Err(Error::NoConvergence(residual));
    }
    Ok(ExactSpectrumResult { ground_energy: energy, dimension: dim, residual, iterations: alphas.len() })
}

/// Largest lattice for exact variational energies.
pub const MAX_VARIATIONAL_SPINS: usize = 16;

/// `sum_s P(s) E_loc(s)` over the zero-magnetisation sector with `P`
/// proportional to `psi(s)^2`.
pub fn exact_variational_energy(model: &RbmModel, lattice: &SquareLattice, exchange: f64) -> Result<f64> {
    exact_variational_energy_bonds(model, lattice.bonds(), exchange)
}

pub fn exact_variational_energy_bonds(model: &RbmModel, bonds: &[Bond], exchange: f64) -> Result<f64> {
    let n = model.n_visible();
    guard(n, MAX_VARIATIONAL_SPINS)?;
    let basis = SectorBasis::balanced(n)?;
    let mut log_w = Vec::with_capacity(basis.dim());
    let mut e_loc = Vec::with_capacity(basis.dim());
    for &state in &basis.states {
        let config = SpinConfig::from_bits(state, n);
        let cache = ThetaCache::new(model, &config)?;
        log_w.push(2.0 * cache.log_psi());
        e_loc.push(local_energy_cached(bonds, model, &cache, &config, exchange)?);
    }
    let p = normalize_log_weights(&log_w);
    Ok(p.iter().zip(&e_loc).map(|(p, e)| p * e).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Vec<Bond> {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    }

    /// Dense matrix of the sector Hamiltonian, built column by column.
    fn dense(basis: &SectorBasis, bonds: &[Bond], exchange: f64) -> Vec<f64> {
        let d = basis.dim();
        let mut out = alloc::vec![0.0; d * d];
        let mut e = alloc::vec![0.0; d];
        let mut col = alloc::vec![0.0; d];
        for j in 0..d {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            apply_sector_hamiltonian(basis, bonds, exchange, &e, &mut col);
            for i in 0..d {
                out[i * d + j] = col[i];
            }
        }
        out
    }

    #[test]
    fn ring_of_four() {
        let r = exact_ground_energy_bonds(4, &ring(4), 1.0).unwrap();
        assert!((r.ground_energy + 2.0).abs() < 1e-10);
        assert_eq!(r.dimension, 6);
        let basis = SectorBasis::balanced(4).unwrap();
        let (vals, _) = symmetric_eigen(&dense(&basis, &ring(4), 1.0), 6);
        assert!((vals[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling() {
        let lattice = SquareLattice::new(4).unwrap();
        let r = exact_ground_energy(&lattice, 0.0).unwrap();
        assert_eq!(r.ground_energy, 0.0);
    }

    #[test]
    fn lanczos_matches_dense_on_small_graph() {
        let bonds: Vec<Bond> = ring(8).into_iter().chain([(0, 4), (2, 6), (1, 5)]).collect();
        let r = exact_ground_energy_bonds(8, &bonds, 1.3).unwrap();
        let basis = SectorBasis::balanced(8).unwrap();
        let (vals, _) = symmetric_eigen(&dense(&basis, &bonds, 1.3), basis.dim());
        assert!((r.ground_energy - vals[0]).abs() < 1e-9);
    }

    #[test]
    fn sector_basis() {
        let b = SectorBasis::balanced(16).unwrap();
        assert_eq!(b.dim(), 12_870);
        assert!(b.states.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(b.index(b.states[100]), Some(100));
        assert_eq!(b.index(0), None);
        assert_eq!(SectorBasis::balanced(5), Err(Error::EmptySector));
    }

    #[test]
    fn size_guards() {
        let model = RbmModel::zeros(22, 1).unwrap();
        assert_eq!(enumerate_visible_distribution(&model), Err(Error::SizeGuard(22)));
        let ising = IsingModel::from_rbm(&RbmModel::zeros(8, 2).unwrap());
        assert_eq!(enumerate_joint_boltzmann(&ising), Err(Error::SizeGuard(24)));
    }

    #[test]
    fn zero_model_is_uniform() {
        let d = enumerate_visible_distribution(&RbmModel::zeros(6, 2).unwrap()).unwrap();
        assert!(d.probabilities.iter().all(|&p| (p - 1.0 / 64.0).abs() < 1e-15));
        assert_eq!(d.sector().len(), 20);
        let j = enumerate_joint_boltzmann(&IsingModel::from_rbm(&RbmModel::zeros(3, 2).unwrap())).unwrap();
        assert!(j.probabilities.iter().all(|&p| (p - 1.0 / 512.0).abs() < 1e-15));
    }

    #[test]
    fn strong_coupling_aligns() {
        let model = RbmModel::new(1, 1, &[5.0], &[0.0]).unwrap();
        let j = enumerate_joint_boltzmann(&IsingModel::from_rbm(&model)).unwrap();
        // index = hidden bit | visible bit << 1
        assert!(j.probabilities[0] > 0.49 && j.probabilities[3] > 0.49);
        assert!((j.probabilities[0] - j.probabilities[3]).abs() < 1e-15);
    }

    #[test]
    fn variational_energy_of_zero_model() {
        let lattice = SquareLattice::new(4).unwrap();
        let model = RbmModel::zeros(16, 1).unwrap();
        let basis = SectorBasis::balanced(16).unwrap();
        let mut total = 0.0;
        for &s in &basis.states {
            total += crate::lattice::local_energy(&lattice, &model, &SpinConfig::from_bits(s, 16), 1.0).unwrap();
        }
        let e = exact_variational_energy(&model, &lattice, 1.0).unwrap();
        assert!((e - total / basis.dim() as f64).abs() < 1e-12);
    }
}
