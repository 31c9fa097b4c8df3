//! Experiment manifests. Every field is optional; command-line flags take
//! precedence and unset values fall back to the defaults below.

use std::path::{Path, PathBuf};

use nqs_ising_core::sampler::{PairProposal, DEFAULT_THERMALIZATION};
use nqs_ising_core::train::Preset;
use nqs_ising_core::SquareLattice;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::formats::{read_json, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Low,
    High,
}

impl From<PresetName> for Preset {
    fn from(p: PresetName) -> Self {
        match p {
            PresetName::Low => Preset::Low,
            PresetName::High => Preset::High,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Mh,
    Sim,
    Both,
}

/// MH pair proposal: any antiparallel pair, or nearest neighbours only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProposalName {
    Global,
    Neighbor,
}

impl From<ProposalName> for PairProposal {
    fn from(p: ProposalName) -> Self {
        match p {
            ProposalName::Global => PairProposal::Global,
            ProposalName::Neighbor => PairProposal::NearestNeighbor,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "L")]
    pub side: Option<usize>,
    pub alpha: Option<usize>,
    #[serde(rename = "J")]
    pub exchange: Option<f64>,
    pub seed: Option<u64>,
    pub preset: Option<PresetName>,
    pub iterations: Option<usize>,
    pub eta: Option<f64>,
    pub replicas: Option<usize>,
    pub sr_samples: Option<usize>,
    pub proposal: Option<ProposalName>,
    pub kind: Option<KindName>,
    pub chains: Option<usize>,
    pub samples: Option<u64>,
    pub interval: Option<u64>,
    pub thermalization: Option<u64>,
    pub record_hidden: Option<bool>,
    pub baseline_chains: Option<usize>,
    pub baseline_sweeps: Option<u64>,
    pub fit_window_mult: Option<f64>,
    pub profiles: Option<Vec<String>>,
    pub measure_cpu: Option<bool>,
    pub sizes: Option<Vec<usize>>,
    pub ratios: Option<Vec<String>>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub model: Option<PathBuf>,
    pub models: Option<Vec<PathBuf>>,
    pub chains_dir: Option<PathBuf>,
    pub reports: Option<Vec<PathBuf>>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl Manifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: &Manifest) -> Self {
        overlay!(self, flags;
            side, alpha, exchange, seed, preset, iterations, eta, replicas, sr_samples, proposal, kind, chains,
            samples, interval, thermalization, record_hidden, baseline_chains, baseline_sweeps,
            fit_window_mult, profiles, measure_cpu, sizes, ratios, output_dir, threads, model, models, chains_dir,
            reports);
        self
    }
}

/// Fully resolved configuration. Output location and worker count do not
/// affect results and are left out of the hash; input files enter it by
/// content, not by path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: String,
    #[serde(rename = "L")]
    pub side: usize,
    pub alpha: usize,
    #[serde(rename = "J")]
    pub exchange: f64,
    pub seed: u64,
    pub preset: Option<PresetName>,
    pub iterations: usize,
    pub eta: f64,
    pub replicas: usize,
    pub sr_samples: Option<usize>,
    pub proposal: ProposalName,
    pub kind: KindName,
    pub chains: Option<usize>,
    pub samples: u64,
    pub interval: Option<u64>,
    pub thermalization: u64,
    pub record_hidden: bool,
    pub baseline_chains: usize,
    pub baseline_sweeps: u64,
    pub fit_window_mult: f64,
    pub profiles: Vec<String>,
    pub measure_cpu: bool,
    pub sizes: Vec<usize>,
    pub ratios: Vec<String>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub model: Option<PathBuf>,
    #[serde(skip)]
    pub models: Vec<PathBuf>,
    #[serde(skip)]
    pub chains_dir: Option<PathBuf>,
    #[serde(skip)]
    pub reports: Vec<PathBuf>,
    /// SHA-256 of every input file, in a fixed order.
    pub input_sha256: Vec<String>,
}

pub const DEFAULT_REPLICAS: usize = 5;
pub const DEFAULT_ITERATIONS: usize = 600;
pub const DEFAULT_SAMPLES: u64 = 32_768;
pub const DEFAULT_MH_CHAINS: usize = 10;
pub const DEFAULT_SIM_CHAINS: usize = 5;

impl Settings {
    pub fn resolve(command: &str, m: &Manifest) -> CliResult<Self> {
        let s = Settings {
            command: command.to_string(),
            side: m.side.unwrap_or(4),
            alpha: m.alpha.unwrap_or(2),
            exchange: m.exchange.unwrap_or(1.0),
            seed: m.seed.unwrap_or(0),
            preset: m.preset,
            iterations: m.iterations.unwrap_or(DEFAULT_ITERATIONS),
            eta: m.eta.unwrap_or(0.005),
            replicas: m.replicas.unwrap_or(DEFAULT_REPLICAS),
            sr_samples: m.sr_samples,
            proposal: m.proposal.unwrap_or(ProposalName::Global),
            kind: m.kind.unwrap_or(KindName::Both),
            chains: m.chains,
            samples: m.samples.unwrap_or(DEFAULT_SAMPLES),
            interval: m.interval,
            thermalization: m.thermalization.unwrap_or(DEFAULT_THERMALIZATION),
            record_hidden: m.record_hidden.unwrap_or(false),
            baseline_chains: m.baseline_chains.unwrap_or(32),
            baseline_sweeps: m.baseline_sweeps.unwrap_or(10_000),
            fit_window_mult: m.fit_window_mult.unwrap_or(nqs_ising_core::estimate::DEFAULT_FIT_WINDOW_MULT),
            profiles: m.profiles.clone().unwrap_or_default(),
            measure_cpu: m.measure_cpu.unwrap_or(false),
            sizes: m.sizes.clone().unwrap_or_default(),
            ratios: m.ratios.clone().unwrap_or_default(),
            output_dir: m.output_dir.clone().unwrap_or_else(|| PathBuf::from("out")),
            threads: m.threads,
            model: m.model.clone(),
            models: m.models.clone().unwrap_or_default(),
            chains_dir: m.chains_dir.clone(),
            reports: m.reports.clone().unwrap_or_default(),
            input_sha256: Vec::new(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Records the content hash of every input file so that the manifest
    /// hash identifies the data an output was derived from.
    pub fn bind_inputs(&mut self) -> CliResult<()> {
        let mut paths: Vec<PathBuf> = self.model.iter().chain(&self.models).cloned().collect();
        if let Some(dir) = &self.chains_dir {
            paths.extend(chain_files(dir)?);
        }
        paths.extend(self.reports.iter().cloned());
        self.input_sha256 = paths
            .iter()
            .map(|p| std::fs::read(p).map(|b| hex::encode(Sha256::digest(b))).map_err(|e| CliError::io(p, e)))
            .collect::<CliResult<_>>()?;
        Ok(())
    }

    fn validate(&self) -> CliResult<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        SquareLattice::new(self.side).map_err(|e| CliError::Usage(e.to_string()))?;
        if self.alpha == 0 {
            return usage("alpha must be at least 1".into());
        }
        if !self.exchange.is_finite() {
            return usage("J must be finite".into());
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return usage("eta must be finite and non-negative".into());
        }
        if self.replicas == 0 {
            return usage("replicas must be at least 1".into());
        }
        if self.samples == 0 {
            return usage("samples must be at least 1".into());
        }
        if self.interval == Some(0) {
            return usage("interval must be at least 1".into());
        }
        if self.chains == Some(0) || self.baseline_chains == 0 || self.baseline_sweeps == 0 {
            return usage("chain counts and lengths must be positive".into());
        }
        if !(self.fit_window_mult > 0.0) {
            return usage("fit window multiplier must be positive".into());
        }
        if self.sr_samples.is_some_and(|n| n < 2) {
            return usage("at least two SR samples are required".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the settings.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("settings serialize");
        hex::encode(Sha256::digest(bytes))
    }

    /// The `model` path, required by most commands.
    pub fn model_path(&self) -> CliResult<&Path> {
        self.model.as_deref().ok_or_else(|| CliError::Usage(format!("{} needs --model", self.command)))
    }

    pub fn provenance(&self) -> Provenance {
        Provenance { manifest_sha256: self.hash(), seed: self.seed }
    }

    pub fn lattice(&self) -> SquareLattice {
        SquareLattice::new(self.side).expect("validated")
    }

    pub fn preset(&self) -> Preset {
        self.preset.map(Preset::from).unwrap_or_else(|| Preset::for_system(self.side * self.side, self.alpha))
    }
}

/// `mh_*.csv` and `sim_*.csv` files of a chain directory, sorted by name.
pub fn chain_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            (name.starts_with("mh_") || name.starts_with("sim_")) && name.ends_with(".csv")
        })
        .collect();
    files.sort();
    Ok(files)
}
