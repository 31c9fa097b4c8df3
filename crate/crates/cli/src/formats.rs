//! On-disk formats. CSV files start with a `# manifest_sha256=... seed=...`
//! comment line; JSON files carry the same two fields at top level.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nqs_ising_core::estimate::{ErrorCurve, EnergyEstimate};
use nqs_ising_core::sampler::{SamplerKind, SpinChain};
use nqs_ising_core::train::TrainHistory;
use nqs_ising_core::{RbmModel, SpinConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Identifies the run that produced a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub manifest_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn csv_header(&self) -> String {
        format!("# manifest_sha256={} seed={}\n", self.manifest_sha256, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub manifest_sha256: String,
    pub preset: String,
    pub iterations: usize,
    pub eta: f64,
    pub n_samples: usize,
    pub final_energy: f64,
    pub final_variance: f64,
}

/// Serialized RBM. `W` is stored as `n` rows of `alpha * n` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    #[serde(rename = "L")]
    pub side: usize,
    pub alpha: usize,
    #[serde(rename = "J")]
    pub exchange: f64,
    #[serde(rename = "W")]
    pub weights: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub rng_seed: u64,
    pub training_meta: Option<TrainingMeta>,
}

impl ModelFile {
    pub fn from_model(model: &RbmModel, side: usize, exchange: f64, rng_seed: u64, meta: Option<TrainingMeta>) -> Self {
        let m = model.n_hidden();
        Self {
            schema_version: MODEL_SCHEMA_VERSION,
            side,
            alpha: model.alpha(),
            exchange,
            weights: model.weights().chunks_exact(m).map(<[f64]>::to_vec).collect(),
            b: model.hidden_bias().to_vec(),
            rng_seed,
            training_meta: meta,
        }
    }

    pub fn to_model(&self) -> Result<RbmModel, String> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {}", self.schema_version));
        }
        let n = self.side * self.side;
        let m = self.alpha * n;
        if self.weights.len() != n {
            return Err(format!("W has {} rows, expected {n}", self.weights.len()));
        }
        if let Some(row) = self.weights.iter().find(|r| r.len() != m) {
            return Err(format!("W row has {} entries, expected {m}", row.len()));
        }
        if self.b.len() != m {
            return Err(format!("b has {} entries, expected {m}", self.b.len()));
        }
        let flat: Vec<f64> = self.weights.concat();
        RbmModel::new(n, self.alpha, &flat, &self.b).map_err(|e| e.to_string())
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    write_file(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn read_model(path: &Path) -> CliResult<(ModelFile, RbmModel)> {
    let file: ModelFile = read_json(path)?;
    let model = file.to_model().map_err(|e| CliError::format(path, e))?;
    Ok((file, model))
}

/// Spins packed as bits (bit `i % 8` of byte `i / 8` set when spin `i` is up),
/// hex encoded.
pub fn pack_spins(spins: &[i8]) -> String {
    let mut bytes = vec![0u8; spins.len().div_ceil(8)];
    for (i, &s) in spins.iter().enumerate() {
        if s > 0 {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    hex::encode(bytes)
}

pub fn unpack_spins(text: &str, n: usize) -> Result<Vec<i8>, String> {
    let bytes = hex::decode(text).map_err(|e| e.to_string())?;
    if bytes.len() != n.div_ceil(8) {
        return Err(format!("packed field has {} bytes, expected {}", bytes.len(), n.div_ceil(8)));
    }
    Ok((0..n).map(|i| if bytes[i / 8] >> (i % 8) & 1 == 1 { 1 } else { -1 }).collect())
}

/// Chain CSV: `sweep_index,magnetization,packed_spins[,packed_hidden]`.
pub fn chain_to_csv(chain: &SpinChain, prov: &Provenance) -> String {
    let mut out = prov.csv_header();
    let _ = writeln!(
        out,
        "# kind={} interval={} total_sweeps={} rate={}",
        kind_name(chain.kind),
        chain.interval,
        chain.total_sweeps,
        chain.rate
    );
    out.push_str("sweep_index,magnetization,packed_spins");
    if chain.hidden.is_some() {
        out.push_str(",packed_hidden");
    }
    out.push('\n');
    for (k, config) in chain.samples.iter().enumerate() {
        let _ = write!(out, "{},{},{}", chain.sweep_indices[k], chain.magnetizations[k], pack_spins(config.spins()));
        if let Some(h) = &chain.hidden {
            let _ = write!(out, ",{}", pack_spins(&h[k]));
        }
        out.push('\n');
    }
    out
}

pub fn kind_name(kind: SamplerKind) -> &'static str {
    match kind {
        SamplerKind::Mh => "mh",
        SamplerKind::Sim => "sim",
    }
}

fn parse_kind(s: &str) -> Option<SamplerKind> {
    match s {
        "mh" => Some(SamplerKind::Mh),
        "sim" => Some(SamplerKind::Sim),
        _ => None,
    }
}

/// Parses a chain CSV for a model with `n_visible` visible and `n_hidden` hidden spins.
pub fn chain_from_csv(text: &str, n_visible: usize, n_hidden: usize, path: &Path) -> CliResult<SpinChain> {
    let bad = |msg: String| CliError::format(path, msg);
    let mut kind = None;
    let mut interval = None;
    let mut total_sweeps = None;
    let mut header_seen = false;
    let mut with_hidden = false;
    let mut chain = SpinChain {
        kind: SamplerKind::Mh,
        interval: 1,
        samples: Vec::new(),
        sweep_indices: Vec::new(),
        magnetizations: Vec::new(),
        hidden: None,
        total_sweeps: 0,
        rate: f64::NAN,
    };
    let mut hidden = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if let Some(meta) = line.strip_prefix("# ") {
            for field in meta.split_whitespace() {
                match field.split_once('=') {
                    Some(("kind", v)) => kind = parse_kind(v),
                    Some(("interval", v)) => interval = v.parse::<u64>().ok(),
                    Some(("total_sweeps", v)) => total_sweeps = v.parse::<u64>().ok(),
                    Some(("rate", v)) => chain.rate = v.parse::<f64>().unwrap_or(f64::NAN),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            match line {
                "sweep_index,magnetization,packed_spins" => {}
                "sweep_index,magnetization,packed_spins,packed_hidden" => with_hidden = true,
                _ => return Err(bad(format!("line {}: unexpected header {line:?}", lineno + 1))),
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 + usize::from(with_hidden) {
            return Err(bad(format!("line {}: wrong field count", lineno + 1)));
        }
        let sweep: u64 = fields[0].parse().map_err(|_| bad(format!("line {}: bad sweep index", lineno + 1)))?;
        let mag: i64 = fields[1].parse().map_err(|_| bad(format!("line {}: bad magnetization", lineno + 1)))?;
        let spins = unpack_spins(fields[2], n_visible).map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?;
        let config = SpinConfig::new(spins).map_err(|e| bad(e.to_string()))?;
        if config.magnetization() != mag {
            return Err(bad(format!("line {}: magnetization does not match spins", lineno + 1)));
        }
        if with_hidden {
            hidden.push(unpack_spins(fields[3], n_hidden).map_err(|e| bad(format!("line {}: {e}", lineno + 1)))?);
        }
        chain.sweep_indices.push(sweep);
        chain.magnetizations.push(mag);
        chain.samples.push(config);
    }
    chain.kind = kind.ok_or_else(|| bad("missing kind".into()))?;
    chain.interval = interval.ok_or_else(|| bad("missing interval".into()))?;
    chain.total_sweeps = total_sweeps.ok_or_else(|| bad("missing total_sweeps".into()))?;
    if with_hidden {
        chain.hidden = Some(hidden);
    }
    Ok(chain)
}

/// `N,eps_rel,eps_rel_stderr`.
pub fn curve_to_csv(curve: &ErrorCurve, prov: &Provenance) -> String {
    let mut out = prov.csv_header();
    out.push_str("N,eps_rel,eps_rel_stderr\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{:e},{:e}", p.n, p.eps_rel, p.stderr);
    }
    out
}

/// `iter,energy,variance,eps_p,grad_norm`.
pub fn history_to_csv(history: &TrainHistory, prov: &Provenance) -> String {
    let mut out = prov.csv_header();
    out.push_str("iter,energy,variance,eps_p,grad_norm\n");
    for (i, r) in history.records.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{:e},{:e}", i, r.energy, r.variance, r.eps, r.grad_norm);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateJson {
    pub mean: f64,
    pub variance: f64,
    pub n_samples: usize,
    pub tau: Option<f64>,
    pub interval: f64,
    pub stderr: f64,
}

impl From<&EnergyEstimate> for EstimateJson {
    fn from(e: &EnergyEstimate) -> Self {
        Self { mean: e.mean, variance: e.variance, n_samples: e.n_samples, tau: e.tau, interval: e.interval, stderr: e.stderr }
    }
}

/// One row of the barrier table.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierRow {
    pub n_spins: usize,
    pub alpha: usize,
    pub model_id: String,
    pub mean_barrier: f64,
    pub approx_barrier: f64,
    pub mean_connection: f64,
    pub visible_flip_rate: f64,
    pub hidden_flip_rate: f64,
    pub log_tau_sim: f64,
}

pub fn barrier_to_csv(rows: &[BarrierRow], prov: &Provenance) -> String {
    let mut out = prov.csv_header();
    out.push_str(
        "n_spins,alpha,model_id,mean_barrier,approx_barrier,mean_connection,visible_flip_rate,hidden_flip_rate,log_tau_sim\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n_spins,
            r.alpha,
            r.model_id,
            r.mean_barrier,
            r.approx_barrier,
            r.mean_connection,
            r.visible_flip_rate,
            r.hidden_flip_rate,
            r.log_tau_sim
        );
    }
    out
}

/// Projection table: rows are profiles, columns system sizes, values seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionTable {
    pub sizes: Vec<usize>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl ProjectionTable {
    pub fn to_csv(&self, prov: &Provenance) -> String {
        let mut out = prov.csv_header();
        out.push_str("profile");
        for n in &self.sizes {
            let _ = write!(out, ",{n}");
        }
        out.push('\n');
        for (name, values) in &self.rows {
            out.push_str(name);
            for v in values {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_markdown(&self, prov: &Provenance) -> String {
        let mut out = format!("<!-- manifest_sha256={} seed={} -->\n\n", prov.manifest_sha256, prov.seed);
        out.push_str("| profile |");
        for n in &self.sizes {
            let _ = write!(out, " n={n} |");
        }
        out.push_str("\n|---|");
        for _ in &self.sizes {
            out.push_str("---|");
        }
        out.push('\n');
        for (name, values) in &self.rows {
            let _ = write!(out, "| {name} |");
            for v in values {
                let _ = write!(out, " {} |", format_seconds(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Seconds with an SI prefix, three significant digits.
pub fn format_seconds(t: f64) -> String {
    let (scale, unit) = match t.abs() {
        x if x >= 1.0 => (1.0, "s"),
        x if x >= 1e-3 => (1e3, "ms"),
        x if x >= 1e-6 => (1e6, "us"),
        _ => (1e9, "ns"),
    };
    format!("{:.3} {unit}", t * scale)
}
