//! Periodic square lattice and the Heisenberg local energy.
//!
//! Spins are stored as `±1` z-projections in row-major site order. The
//! local energy works in the sublattice-rotated basis, where the exchange
//! term carries a negative sign and the ground state amplitudes are all
//! non-negative.

use alloc::vec::Vec;
use core::ops::Index;

use crate::error::{Error, Result};
use crate::rbm::{RbmModel, ThetaCache};

/// Unordered nearest-neighbour pair of sites.
pub type Bond = (usize, usize);

/// An `L x L` square lattice with periodic boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareLattice {
    side: usize,
    bonds: Vec<Bond>,
}

impl SquareLattice {
    /// Builds the lattice. `side` must be even and at least 4.
    pub fn new(side: usize) -> Result<Self> {
        if side < 4 || side % 2 != 0 {
            return Err(Error::InvalidLattice(side));
        }
        let mut bonds = Vec::with_capacity(2 * side * side);
        for row in 0..side {
            for col in 0..side {
                let site = row * side + col;
                let right = row * side + (col + 1) % side;
                let down = ((row + 1) % side) * side + col;
                bonds.push((site, right));
                bonds.push((site, down));
            }
        }
        Ok(Self { side, bonds })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of sites, `L²`.
    pub fn n_sites(&self) -> usize {
        self.side * self.side
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    /// Sublattice colour of a site: `true` when `row + col` is even.
    pub fn sublattice(&self, site: usize) -> bool {
        (site / self.side + site % self.side) % 2 == 0
    }

    /// The four neighbours of `site`: left, right, up, down.
    pub fn neighbors(&self, site: usize) -> [usize; 4] {
        let l = self.side;
        let (row, col) = (site / l, site % l);
        [
            row * l + (col + l - 1) % l,
            row * l + (col + 1) % l,
            ((row + l - 1) % l) * l + col,
            ((row + 1) % l) * l + col,
        ]
    }

    /// Néel state: `+1` on the even sublattice, `-1` on the odd one.
    pub fn neel_state(&self) -> SpinConfig {
        SpinConfig(
            (0..self.n_sites())
                .map(|site| if self.sublattice(site) { 1 } else { -1 })
                .collect(),
        )
    }
}

/// A configuration of `±1` spin z-projections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig(Vec<i8>);

impl SpinConfig {
    /// Wraps raw spins, rejecting anything other than `±1`.
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter("spins must be +1 or -1"));
        }
        Ok(Self(spins))
    }

    pub fn all_up(n: usize) -> Self {
        Self(alloc::vec![1; n])
    }

    /// `+1, -1, +1, ...`; zero magnetization for even `n`.
    pub fn alternating(n: usize) -> Self {
        Self((0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect())
    }

    /// Decodes the low `n` bits of `bits`; bit `i` set means spin `i` is up.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Self((0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    /// Inverse of [`SpinConfig::from_bits`]; `n` must be at most 64.
    pub fn to_bits(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &s)| if s > 0 { acc | 1 << i } else { acc })
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    /// Sum of all spins.
    pub fn magnetization(&self) -> i64 {
        self.0.iter().map(|&s| i64::from(s)).sum()
    }

    pub fn flip(&mut self, site: usize) {
        self.0[site] = -self.0[site];
    }

    /// Global spin inversion.
    pub fn inverted(&self) -> Self {
        Self(self.0.iter().map(|&s| -s).collect())
    }
}

impl Index<usize> for SpinConfig {
    type Output = i8;

    fn index(&self, site: usize) -> &i8 {
        &self.0[site]
    }
}

/// Heisenberg local energy `<s|H|psi> / <s|psi>` for the lattice.
pub fn local_energy(
    lattice: &SquareLattice,
    model: &RbmModel,
    config: &SpinConfig,
    exchange: f64,
) -> Result<f64> {
    let cache = ThetaCache::new(model, config)?;
    local_energy_cached(lattice.bonds(), model, &cache, config, exchange)
}

/// Local energy over an arbitrary bond list with a precomputed cache.
///
/// `E_loc = J * sum_bonds [ s_i s_j / 4 - 1/2 * [s_i != s_j] * psi(s^ij)/psi(s) ]`.
pub fn local_energy_cached(
    bonds: &[Bond],
    model: &RbmModel,
    cache: &ThetaCache,
    config: &SpinConfig,
    exchange: f64,
) -> Result<f64> {
    let spins = config.spins();
    let mut diagonal = 0.0;
    let mut off_diagonal = 0.0;
    for &(a, b) in bonds {
        if spins[a] == spins[b] {
            diagonal += 0.25;
        } else {
            diagonal -= 0.25;
            off_diagonal += model.psi_ratio(cache, config, &[a, b]);
        }
    }
    if !off_diagonal.is_finite() {
        return Err(Error::NonFinite("local energy amplitude ratio"));
    }
    Ok(exchange * (diagonal - 0.5 * off_diagonal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bond_counts() {
        for side in [4, 6, 8] {
            let lattice = SquareLattice::new(side).unwrap();
            let n = lattice.n_sites();
            assert_eq!(lattice.bonds().len(), 2 * n);
            let mut degree = alloc::vec![0; n];
            for &(a, b) in lattice.bonds() {
                assert_ne!(a, b);
                degree[a] += 1;
                degree[b] += 1;
                assert_ne!(lattice.sublattice(a), lattice.sublattice(b));
            }
            assert!(degree.iter().all(|&d| d == 4));
        }
    }

    #[test]
    fn rejects_small_or_odd_sides() {
        for side in [0, 2, 3, 5, 7] {
            assert_eq!(SquareLattice::new(side), Err(Error::InvalidLattice(side)));
        }
    }

    #[test]
    fn site_zero_neighbours() {
        let lattice = SquareLattice::new(4).unwrap();
        let mut nb = lattice.neighbors(0);
        nb.sort_unstable();
        assert_eq!(nb, [1, 3, 4, 12]);
        let mut from_bonds: Vec<usize> = lattice
            .bonds()
            .iter()
            .filter_map(|&(a, b)| match (a, b) {
                (0, o) | (o, 0) => Some(o),
                _ => None,
            })
            .collect();
        from_bonds.sort_unstable();
        assert_eq!(from_bonds, [1, 3, 4, 12]);
    }

    #[test]
    fn neel_is_antiparallel_and_balanced() {
        let l4 = SquareLattice::new(4).unwrap();
        let neel = l4.neel_state();
        assert_eq!(neel.magnetization(), 0);
        assert!(l4.bonds().iter().all(|&(a, b)| neel[a] != neel[b]));
        let l6 = SquareLattice::new(6).unwrap();
        let neel6 = l6.neel_state();
        assert_eq!(neel6.spins().iter().filter(|&&s| s == 1).count(), 18);
        assert_eq!(neel6.spins().iter().filter(|&&s| s == -1).count(), 18);
    }

    #[test]
    fn zero_model_energies() {
        let lattice = SquareLattice::new(4).unwrap();
        let model = RbmModel::zeros(16, 2).unwrap();
        let neel = lattice.neel_state();
        assert_eq!(local_energy(&lattice, &model, &neel, 1.0).unwrap(), -24.0);
        let up = SpinConfig::all_up(16);
        assert_eq!(local_energy(&lattice, &model, &up, 1.0).unwrap(), 8.0);
    }

    #[test]
    fn bits_round_trip() {
        let c = SpinConfig::from_bits(0b1011, 4);
        assert_eq!(c.spins(), &[1, 1, -1, 1]);
        assert_eq!(c.to_bits(), 0b1011);
    }

    #[test]
    fn rejects_non_unit_spins() {
        assert!(SpinConfig::new(alloc::vec![1, 0, -1]).is_err());
    }
}
