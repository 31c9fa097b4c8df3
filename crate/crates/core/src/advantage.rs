//! Iso-accuracy step ratios and hardware runtime/energy projections.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Latency of one sweep on a given platform.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareProfile {
    pub name: String,
    /// Seconds per sweep.
    pub t_sweep: f64,
    pub source: String,
}

impl HardwareProfile {
    pub fn new(name: impl Into<String>, t_sweep: f64, source: impl Into<String>) -> Result<Self> {
        if !(t_sweep > 0.0) || !t_sweep.is_finite() {
            return Err(Error::InvalidParameter("sweep time must be positive"));
        }
        Ok(Self { name: name.into(), t_sweep, source: source.into() })
    }

    /// FPGA emulator at 70 MHz.
    pub fn fpga() -> Self {
        Self { name: "fpga".into(), t_sweep: 14.3e-9, source: "FPGA emulation at 70 MHz".into() }
    }

    /// Conservative analog in-memory estimate.
    pub fn conservative() -> Self {
        Self { name: "conservative".into(), t_sweep: 400e-9, source: "conservative analog estimate".into() }
    }

    /// Optimistic MTJ-based estimate.
    pub fn optimistic() -> Self {
        Self { name: "optimistic".into(), t_sweep: 4e-9, source: "optimistic p-bit estimate".into() }
    }

    pub fn builtin() -> Vec<Self> {
        alloc::vec![Self::fpga(), Self::conservative(), Self::optimistic()]
    }
}

/// `N_sIM / N_MH = tau_sIM / tau_MH`.
pub fn iso_accuracy_ratio(tau_sim: f64, tau_mh: f64) -> Result<f64> {
    if !(tau_sim > 0.0 && tau_mh > 0.0) || !tau_sim.is_finite() || !tau_mh.is_finite() {
        return Err(Error::InvalidParameter("autocorrelation times must be positive"));
    }
    Ok(tau_sim / tau_mh)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    /// Seconds for the sIM to produce one MH sweep's worth of independent samples.
    pub time: f64,
    /// `t_MH / time`.
    pub speedup: f64,
}

pub fn project_runtime(ratio: f64, profile: &HardwareProfile, mh_profile: &HardwareProfile) -> Projection {
    let time = ratio * profile.t_sweep;
    Projection { time, speedup: mh_profile.t_sweep / time }
}

/// Energy per independent sample of MH over that of the sIM.
pub fn energy_comparison(ratio: f64, sim_power: f64, sim_t_sweep: f64, mh_power: f64, mh_t_sweep: f64) -> f64 {
    (mh_power * mh_t_sweep) / (sim_power * ratio * sim_t_sweep)
}

/// `N_sIM t_sIM < N_MH t_MH`.
pub fn check_advantage(n_sim: f64, t_sim: f64, n_mh: f64, t_mh: f64) -> bool {
    n_sim * t_sim < n_mh * t_mh
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageReport {
    pub tau_sim: f64,
    pub tau_mh: f64,
    pub ratio: f64,
    pub projections: Vec<(HardwareProfile, Projection)>,
    pub energy_factor: Option<f64>,
}

impl AdvantageReport {
    pub fn new(tau_sim: f64, tau_mh: f64, profiles: &[HardwareProfile], mh_profile: &HardwareProfile) -> Result<Self> {
        let ratio = iso_accuracy_ratio(tau_sim, tau_mh)?;
        let projections = profiles.iter().map(|p| (p.clone(), project_runtime(ratio, p, mh_profile))).collect();
        Ok(Self { tau_sim, tau_mh, ratio, projections, energy_factor: None })
    }
}
