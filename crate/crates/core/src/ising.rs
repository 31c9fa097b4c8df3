//! Classical Ising model whose Boltzmann distribution has `psi^2` as its
//! visible marginal.
//!
//! Joint spins are laid out as `m = [x_1 .. x_M, s_1 .. s_n]` (hidden first).
//! Couplings only connect the hidden block to the visible block, so the
//! model keeps the `n x M` weight matrix rather than the dense square one.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rbm::RbmModel;

/// Bipartite Ising model `H(m) = -sum_i h_i m_i - sum_{i<j} J_ij m_i m_j`
/// at unit temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    n_visible: usize,
    n_hidden: usize,
    /// Row-major `n x M`; `J[hidden j, visible i] = weights[i*M + j]`.
    weights: Vec<f64>,
    /// Biases of the hidden block; visible biases are zero.
    hidden_bias: Vec<f64>,
}

impl IsingModel {
    /// Maps an RBM onto its Ising model: `J` couples hidden `j` and visible
    /// `i` with `W_ij`, `h = [b, 0]`.
    pub fn from_rbm(model: &RbmModel) -> Self {
        Self {
            n_visible: model.n_visible(),
            n_hidden: model.n_hidden(),
            weights: model.weights().to_vec(),
            hidden_bias: model.hidden_bias().to_vec(),
        }
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    /// Total spin count `M + n`.
    pub fn n_spins(&self) -> usize {
        self.n_visible + self.n_hidden
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    /// Bias of joint spin `i`.
    pub fn bias(&self, i: usize) -> f64 {
        if i < self.n_hidden {
            self.hidden_bias[i]
        } else {
            0.0
        }
    }

    /// Entry `J_ij` of the logical dense coupling matrix.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let m = self.n_hidden;
        match (i < m, j < m) {
            (true, false) => self.weights[(j - m) * m + i],
            (false, true) => self.weights[(i - m) * m + j],
            _ => 0.0,
        }
    }

    /// Materializes the dense `(M+n)^2` coupling matrix, row-major.
    pub fn dense_couplings(&self) -> Vec<f64> {
        let n = self.n_spins();
        let mut dense = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dense[i * n + j] = self.coupling(i, j);
            }
        }
        dense
    }

    /// Bias vector over the joint layout.
    pub fn dense_bias(&self) -> Vec<f64> {
        (0..self.n_spins()).map(|i| self.bias(i)).collect()
    }

    fn check(&self, m: &[i8]) -> Result<()> {
        if m.len() != self.n_spins() {
            return Err(Error::DimensionMismatch { expected: self.n_spins(), got: m.len() });
        }
        Ok(())
    }

    /// `H(m)` for a joint configuration.
    pub fn energy(&self, m: &[i8]) -> Result<f64> {
        self.check(m)?;
        let (hidden, visible) = m.split_at(self.n_hidden);
        let mut e = 0.0;
        for (b, &x) in self.hidden_bias.iter().zip(hidden) {
            e -= b * f64::from(x);
        }
        for (row, &s) in self.weights.chunks_exact(self.n_hidden).zip(visible) {
            let mut acc = 0.0;
            for (w, &x) in row.iter().zip(hidden) {
                acc += w * f64::from(x);
            }
            e -= f64::from(s) * acc;
        }
        Ok(e)
    }

    /// Local field `I_i = h_i + sum_j J_ij m_j`, so that
    /// `H(m | m_i = -1) - H(m | m_i = +1) = 2 I_i`.
    pub fn local_field(&self, m: &[i8], i: usize) -> Result<f64> {
        self.check(m)?;
        if i >= self.n_spins() {
            return Err(Error::DimensionMismatch { expected: self.n_spins(), got: i });
        }
        let (hidden, visible) = m.split_at(self.n_hidden);
        Ok(if i < self.n_hidden {
            self.hidden_field(visible, i)
        } else {
            self.visible_field(hidden, i - self.n_hidden)
        })
    }

    /// `b_j + sum_i W_ij s_i`.
    #[inline]
    pub fn hidden_field(&self, visible: &[i8], j: usize) -> f64 {
        let m = self.n_hidden;
        let mut acc = self.hidden_bias[j];
        for (i, &s) in visible.iter().enumerate() {
            acc += self.weights[i * m + j] * f64::from(s);
        }
        acc
    }

    /// `sum_j W_ij x_j`.
    #[inline]
    pub fn visible_field(&self, hidden: &[i8], i: usize) -> f64 {
        let m = self.n_hidden;
        let row = &self.weights[i * m..(i + 1) * m];
        let mut acc = 0.0;
        for (w, &x) in row.iter().zip(hidden) {
            acc += w * f64::from(x);
        }
        acc
    }

    /// All hidden fields at once, written into `out`.
    pub fn hidden_fields_into(&self, visible: &[i8], out: &mut [f64]) {
        out.copy_from_slice(&self.hidden_bias);
        for (row, &s) in self.weights.chunks_exact(self.n_hidden).zip(visible) {
            let s = f64::from(s);
            for (o, w) in out.iter_mut().zip(row) {
                *o += s * w;
            }
        }
    }

    /// Export as text: header `N M n`, then `h i value` lines, then
    /// `i j value` coupling lines (0-based, `i < j`, non-zero only).
    pub fn write_text<W: core::fmt::Write>(&self, out: &mut W) -> core::fmt::Result {
        writeln!(out, "{} {} {}", self.n_spins(), self.n_hidden, self.n_visible)?;
        for i in 0..self.n_spins() {
            writeln!(out, "h {} {:e}", i, self.bias(i))?;
        }
        let m = self.n_hidden;
        for j in 0..m {
            for i in 0..self.n_visible {
                let w = self.weights[i * m + j];
                if w != 0.0 {
                    writeln!(out, "{} {} {:e}", j, m + i, w)?;
                }
            }
        }
        Ok(())
    }
}
