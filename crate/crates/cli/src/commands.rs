//! Subcommand implementations. Each returns the paths it wrote.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use nqs_ising_core::advantage::{check_advantage, iso_accuracy_ratio, project_runtime, HardwareProfile};
use nqs_ising_core::autocorr::{detect_stuck, integrated_autocorr_time, Exclusion, DEFAULT_MAX_RUN_FRACTION, select_mh_interval, select_sim_interval, PilotStats};
use nqs_ising_core::barrier::barrier_report;
use nqs_ising_core::estimate::EnergySeries;
use nqs_ising_core::oracle::{exact_ground_energy, exact_variational_energy};
use nqs_ising_core::rng::{chain_rng, derive_seed};
use nqs_ising_core::sampler::{filter_magnetization_zero, run_chain, ChainConfig, SamplerKind, SpinChain};
use nqs_ising_core::train::{train, TrainConfig};
use nqs_ising_core::{Error, IsingModel, RbmModel, SquareLattice};
use serde::{Deserialize, Serialize};

use crate::analysis::{analyze_series, chain_series, exclusion_reason, compute_baseline, par_map, thread_count, BaselineSettings};
use crate::bench::measure_sweep_times;
use crate::error::{CliError, CliResult};
use crate::formats::*;
use crate::manifest::{chain_files, KindName, Manifest, Settings, DEFAULT_MH_CHAINS, DEFAULT_SIM_CHAINS};

/// Seed streams for the different consumers of the master seed.
mod stream {
    pub const MH: u64 = 0x1000;
    pub const SIM: u64 = 0x2000;
    pub const PILOT: u64 = 0x3000;
    pub const BASELINE: u64 = 0x4000;
    pub const BARRIER: u64 = 0x5000;
    pub const BENCH: u64 = 0x6000;
}

fn lattice_of(file: &ModelFile, path: &Path) -> CliResult<SquareLattice> {
    SquareLattice::new(file.side).map_err(|e| CliError::format(path, e.to_string()))
}

/// Resolves a manifest, binds its input files and runs `command`.
pub fn run(command: &str, manifest: &Manifest) -> CliResult<Vec<PathBuf>> {
    let mut s = Settings::resolve(command, manifest)?;
    s.bind_inputs()?;
    match command {
        "train" => cmd_train(&s),
        "sample" => cmd_sample(&s),
        "analyze" => cmd_analyze(&s),
        "project" => cmd_project(&s),
        "barrier" => cmd_barrier(&s),
        "oracle" => cmd_oracle(&s),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

pub fn cmd_train(s: &Settings) -> CliResult<Vec<PathBuf>> {
    let lattice = s.lattice();
    let preset = s.preset();
    let prov = s.provenance();
    let results = par_map(thread_count(s.threads), (0..s.replicas).collect(), |r| {
        let mut cfg = TrainConfig::from_preset(preset, s.iterations, derive_seed(s.seed, r as u64));
        cfg.eta = s.eta;
        cfg.proposal = s.proposal.into();
        cfg.thermalization = s.thermalization;
        if let Some(n) = s.sr_samples {
            cfg.n_samples = n;
        }
        train(&lattice, s.alpha, s.exchange, &cfg).map(|(m, h)| (cfg, m, h))
    });
    let mut written = Vec::new();
    for (r, result) in results.into_iter().enumerate() {
        let (cfg, model, history) = result?;
        let last = history.records.last().copied();
        let meta = TrainingMeta {
            manifest_sha256: prov.manifest_sha256.clone(),
            preset: format!("{preset:?}").to_lowercase(),
            iterations: s.iterations,
            eta: cfg.eta,
            n_samples: cfg.n_samples,
            final_energy: last.map_or(f64::NAN, |r| r.energy),
            final_variance: last.map_or(f64::NAN, |r| r.variance),
        };
        let file = ModelFile::from_model(&model, s.side, s.exchange, cfg.seed, Some(meta));
        let model_path = s.output_dir.join(format!("model_r{r}.json"));
        write_json(&model_path, &file)?;
        let history_path = s.output_dir.join(format!("history_r{r}.csv"));
        write_file(&history_path, &history_to_csv(&history, &prov))?;
        written.extend([model_path, history_path]);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub manifest_sha256: String,
    pub seed: u64,
    pub mh_interval: Option<u64>,
    pub sim_interval: Option<u64>,
    pub sim_search_rounds: Option<usize>,
    pub sim_tau_condition_met: Option<bool>,
}

fn sim_pilot(model: &RbmModel, lattice: &SquareLattice, exchange: f64, s: &Settings, interval: u64, round: u64) -> CliResult<PilotStats> {
    let mut cfg = ChainConfig::new(s.samples * interval, interval, derive_seed(s.seed, stream::PILOT + round));
    cfg.thermalization_sweeps = s.thermalization;
    let chain = run_chain(SamplerKind::Sim, model, lattice, &cfg)?;
    let (filtered, _) = filter_magnetization_zero(&chain)?;
    let series = EnergySeries::from_chain(&filtered, lattice, model, exchange)?;
    let tau_int = match integrated_autocorr_time(&series.values, 1.0) {
        Ok(stats) => stats.tau_int,
        Err(Error::ChainTooShort(_)) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    Ok(PilotStats { tau_int, n_retained: filtered.len() })
}

pub fn cmd_sample(s: &Settings) -> CliResult<Vec<PathBuf>> {
    let model_path = s.model_path()?;
    let (file, model) = read_model(model_path)?;
    let lattice = lattice_of(&file, model_path)?;
    let prov = s.provenance();
    let threads = thread_count(s.threads);
    let mut report = IntervalReport {
        manifest_sha256: prov.manifest_sha256.clone(),
        seed: s.seed,
        mh_interval: None,
        sim_interval: None,
        sim_search_rounds: None,
        sim_tau_condition_met: None,
    };
    let mut jobs: Vec<(SamplerKind, usize, u64)> = Vec::new();
    if matches!(s.kind, KindName::Mh | KindName::Both) {
        let interval = s.interval.unwrap_or_else(|| select_mh_interval(lattice.n_sites()));
        report.mh_interval = Some(interval);
        jobs.extend((0..s.chains.unwrap_or(DEFAULT_MH_CHAINS)).map(|k| (SamplerKind::Mh, k, interval)));
    }
    if matches!(s.kind, KindName::Sim | KindName::Both) {
        let interval = match s.interval {
            Some(iv) => iv,
            None => {
                let mut round = 0;
                let choice = select_sim_interval(model.alpha(), 1, 12, |iv| {
                    round += 1;
                    sim_pilot(&model, &lattice, file.exchange, s, iv, round).map_err(|e| match e {
                        CliError::Numerical(e) => e,
                        _ => Error::IntervalSearch("pilot chain failed"),
                    })
                })?;
                report.sim_search_rounds = Some(choice.rounds);
                report.sim_tau_condition_met = Some(choice.tau_condition_met);
                choice.interval
            }
        };
        report.sim_interval = Some(interval);
        jobs.extend((0..s.chains.unwrap_or(DEFAULT_SIM_CHAINS)).map(|k| (SamplerKind::Sim, k, interval)));
    }

    let chains = par_map(threads, jobs.clone(), |(kind, k, interval)| -> CliResult<SpinChain> {
        let offset = if kind == SamplerKind::Mh { stream::MH } else { stream::SIM };
        let mut cfg = ChainConfig::new(s.samples * interval, interval, derive_seed(s.seed, offset + k as u64));
        cfg.thermalization_sweeps = s.thermalization;
        cfg.record_hidden = s.record_hidden && kind == SamplerKind::Sim;
        cfg.proposal = s.proposal.into();
        Ok(run_chain(kind, &model, &lattice, &cfg)?)
    });
    let chains: Vec<SpinChain> = chains.into_iter().collect::<CliResult<_>>()?;

    // stuck chains are logged, not dropped; analysis applies the exclusion rule
    let series = chain_series(&chains, &lattice, &model, file.exchange, threads)?;
    let mut exclusions = prov.csv_header();
    exclusions.push_str("kind,chain,reason\n");
    let mut written = Vec::new();
    for ((kind, k, _), (chain, (s_e, _))) in jobs.iter().zip(chains.iter().zip(&series)) {
        if let Some(reason) = detect_stuck(&s_e.values, DEFAULT_MAX_RUN_FRACTION) {
            let _ = writeln!(exclusions, "{},{k},{}", kind_name(*kind), exclusion_reason(s_e, &Exclusion::Stuck(reason)));
        } else if s_e.values.is_empty() {
            let _ = writeln!(exclusions, "{},{k},no zero-magnetization sample", kind_name(*kind));
        }
        let path = s.output_dir.join(format!("{}_{k:03}.csv", kind_name(*kind)));
        write_file(&path, &chain_to_csv(chain, &prov))?;
        written.push(path);
    }
    let excl_path = s.output_dir.join("exclusions.csv");
    write_file(&excl_path, &exclusions)?;
    let report_path = s.output_dir.join("intervals.json");
    write_json(&report_path, &report)?;
    written.extend([excl_path, report_path]);
    Ok(written)
}

/// Loads every `mh_*.csv` and `sim_*.csv` in `dir`, sorted by name.
pub fn load_chains(dir: &Path, model: &RbmModel) -> CliResult<(Vec<SpinChain>, Vec<SpinChain>)> {
    let (mut mh, mut sim) = (Vec::new(), Vec::new());
    for path in chain_files(dir)? {
        let chain = chain_from_csv(&read_file(&path)?, model.n_visible(), model.n_hidden(), &path)?;
        match chain.kind {
            SamplerKind::Mh => mh.push(chain),
            SamplerKind::Sim => sim.push(chain),
        }
    }
    Ok((mh, sim))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct TauJson {
    mean_sweeps: f64,
    spread: f64,
    per_chain_sweeps: Vec<Option<f64>>,
    excluded: Vec<crate::analysis::ExclusionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct TauReportJson {
    manifest_sha256: String,
    seed: u64,
    tau_mh: TauJson,
    tau_sim: TauJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct BaselineJson {
    manifest_sha256: String,
    seed: u64,
    energy: f64,
    stderr: f64,
    chains: usize,
    sweeps: u64,
    excluded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageJson {
    pub manifest_sha256: String,
    pub seed: u64,
    pub n_spins: usize,
    pub alpha: usize,
    pub tau_sim: f64,
    pub tau_mh: f64,
    pub ratio: f64,
    pub fit_a: f64,
    pub fit_free_slope: f64,
    pub fit_poor: bool,
    pub fit_floor: f64,
    pub projected_seconds: BTreeMap<String, f64>,
    pub curve_comparison: crate::analysis::CurveComparison,
}

pub fn cmd_analyze(s: &Settings) -> CliResult<Vec<PathBuf>> {
    let model_path = s.model_path()?;
    let chains_dir = s.chains_dir.as_deref().ok_or_else(|| CliError::Usage("analyze needs --chains-dir".into()))?;
    let (file, model) = read_model(model_path)?;
    let lattice = lattice_of(&file, model_path)?;
    let prov = s.provenance();
    let threads = thread_count(s.threads);
    let (mh_chains, sim_chains) = load_chains(chains_dir, &model)?;
    if mh_chains.len() < 2 || sim_chains.len() < 2 {
        return Err(CliError::Exclusion {
            message: format!("need at least 2 chains per sampler, found {} mh and {} sim", mh_chains.len(), sim_chains.len()),
        });
    }
    let baseline_cfg = BaselineSettings {
        chains: s.baseline_chains,
        sweeps: s.baseline_sweeps,
        thermalization: s.thermalization,
        seed: derive_seed(s.seed, stream::BASELINE),
    };
    let baseline = compute_baseline(&lattice, &model, file.exchange, &baseline_cfg, threads)?;
    let mh_series = chain_series(&mh_chains, &lattice, &model, file.exchange, threads)?;
    let sim_series = chain_series(&sim_chains, &lattice, &model, file.exchange, threads)?;
    let report = analyze_series(baseline, &mh_series, &sim_series, s.fit_window_mult)?;

    let dir = &s.output_dir;
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> CliResult<()> {
        let path = dir.join(name);
        write_file(&path, &text)?;
        written.push(path);
        Ok(())
    };
    put("curve_mh.csv", curve_to_csv(&report.mh_curve, &prov))?;
    put("curve_sim.csv", curve_to_csv(&report.sim_curve, &prov))?;
    put("curve_sim_predicted.csv", curve_to_csv(&report.predicted, &prov))?;
    let mut excl = prov.csv_header();
    excl.push_str("kind,chain,reason\n");
    for e in report.mh.exclusions.iter().chain(&report.sim.exclusions) {
        let _ = writeln!(excl, "{},{},{}", e.kind, e.chain, e.reason.replace(',', ";"));
    }
    put("exclusions.csv", excl)?;

    let tau_json = |t: &crate::analysis::SamplerSummary| TauJson {
        mean_sweeps: t.tau.mean_sweeps,
        spread: t.tau.spread,
        per_chain_sweeps: t.tau.per_chain.iter().map(|c| c.as_ref().map(|c| c.tau_sweeps)).collect(),
        excluded: t.exclusions.clone(),
    };
    let json_outputs: Vec<(&str, serde_json::Value)> = vec![
        (
            "baseline.json",
            serde_json::to_value(BaselineJson {
                manifest_sha256: prov.manifest_sha256.clone(),
                seed: s.seed,
                energy: report.baseline.energy,
                stderr: report.baseline.stderr,
                chains: s.baseline_chains,
                sweeps: s.baseline_sweeps,
                excluded: report.baseline.excluded.iter().map(|e| e.0).collect(),
            })
            .expect("serializable"),
        ),
        (
            "tau_report.json",
            serde_json::to_value(TauReportJson {
                manifest_sha256: prov.manifest_sha256.clone(),
                seed: s.seed,
                tau_mh: tau_json(&report.mh),
                tau_sim: tau_json(&report.sim),
            })
            .expect("serializable"),
        ),
        (
            "advantage.json",
            serde_json::to_value(AdvantageJson {
                manifest_sha256: prov.manifest_sha256.clone(),
                seed: s.seed,
                n_spins: lattice.n_sites(),
                alpha: model.alpha(),
                tau_sim: report.sim.tau.mean_sweeps,
                tau_mh: report.mh.tau.mean_sweeps,
                ratio: report.ratio,
                fit_a: report.fit.a,
                fit_free_slope: report.fit.free_slope,
                fit_poor: report.fit.poor_fit,
                fit_floor: report.floor,
                projected_seconds: HardwareProfile::builtin()
                    .into_iter()
                    .map(|p| (p.name.clone(), report.ratio * p.t_sweep))
                    .collect(),
                curve_comparison: report.comparison.clone(),
            })
            .expect("serializable"),
        ),
    ];
    for (name, value) in json_outputs {
        let path = dir.join(name);
        write_json(&path, &value)?;
        written.push(path);
    }
    if report.fit.poor_fit {
        eprintln!("warning: MH error curve deviates from the 1/sqrt(N) law (free slope {:.3})", report.fit.free_slope);
    }
    Ok(written)
}

/// `name:seconds` custom profile.
pub fn parse_profile(arg: &str) -> CliResult<HardwareProfile> {
    let (name, secs) = arg.split_once(':').ok_or_else(|| CliError::Usage(format!("profile {arg:?}: expected name:seconds")))?;
    let t: f64 = secs.parse().map_err(|_| CliError::Usage(format!("profile {arg:?}: bad seconds")))?;
    HardwareProfile::new(name, t, "user supplied").map_err(|e| CliError::Usage(e.to_string()))
}

/// `n_spins:ratio` pair.
pub fn parse_ratio(arg: &str) -> CliResult<(usize, f64)> {
    let bad = || CliError::Usage(format!("ratio {arg:?}: expected n_spins:ratio"));
    let (n, r) = arg.split_once(':').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    let r: f64 = r.parse().map_err(|_| bad())?;
    if !(r > 0.0) {
        return Err(CliError::Usage(format!("ratio {arg:?}: must be positive")));
    }
    Ok((n, r))
}

fn side_for(n_spins: usize) -> CliResult<SquareLattice> {
    let side = (n_spins as f64).sqrt().round() as usize;
    if side * side != n_spins {
        return Err(CliError::Usage(format!("{n_spins} spins is not a square lattice")));
    }
    SquareLattice::new(side).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ProjectionJson {
    manifest_sha256: String,
    seed: u64,
    sizes: Vec<usize>,
    ratios: Vec<f64>,
    rows: BTreeMap<String, Vec<f64>>,
    /// `cpu_mh` seconds over profile seconds, when measured.
    speedup_vs_cpu_mh: BTreeMap<String, Vec<f64>>,
    advantage_vs_cpu_mh: BTreeMap<String, Vec<bool>>,
}

pub fn cmd_project(s: &Settings) -> CliResult<Vec<PathBuf>> {
    let prov = s.provenance();
    let mut ratios: BTreeMap<usize, f64> = BTreeMap::new();
    let from_reports: Vec<String> = s.reports.iter().map(|p| ratio_from_report(p)).collect::<CliResult<_>>()?;
    for r in s.ratios.iter().chain(&from_reports) {
        let (n, ratio) = parse_ratio(r)?;
        ratios.insert(n, ratio);
    }
    let sizes: Vec<usize> = if s.sizes.is_empty() { ratios.keys().copied().collect() } else { s.sizes.clone() };
    if sizes.is_empty() {
        return Err(CliError::Usage("no system sizes: pass --ratio n_spins:ratio or --report".into()));
    }
    let ratio_row: Vec<f64> = sizes
        .iter()
        .map(|n| ratios.get(n).copied().ok_or_else(|| CliError::Usage(format!("no ratio for {n} spins"))))
        .collect::<CliResult<_>>()?;

    let mut profiles = HardwareProfile::builtin();
    for p in &s.profiles {
        profiles.push(parse_profile(p)?);
    }
    let mut table = ProjectionTable { sizes: sizes.clone(), rows: Vec::new() };
    for p in &profiles {
        table.rows.push((p.name.clone(), ratio_row.iter().map(|r| r * p.t_sweep).collect()));
    }
    let mut speedups = BTreeMap::new();
    let mut advantages = BTreeMap::new();
    if s.measure_cpu {
        let mut mh_row = Vec::new();
        let mut sim_row = Vec::new();
        for (&n, &ratio) in sizes.iter().zip(&ratio_row) {
            let lattice = side_for(n)?;
            let mut rng = chain_rng(derive_seed(s.seed, stream::BENCH));
            let model = RbmModel::random(n, s.alpha, 0.1, &mut rng)?;
            let t = measure_sweep_times(&lattice, &model, s.seed, Duration::from_millis(200))?;
            mh_row.push(t.mh);
            sim_row.push(ratio * t.sim);
        }
        table.rows.push(("cpu_sim".into(), sim_row));
        table.rows.push(("cpu_mh".into(), mh_row.clone()));
        for (name, times) in &table.rows {
            let mh = HardwareProfile::new("cpu_mh", 1.0, "measured")?;
            let per_size: Vec<f64> = times
                .iter()
                .zip(&mh_row)
                .zip(&ratio_row)
                .map(|((&t, &t_mh), &ratio)| {
                    let profile = HardwareProfile { t_sweep: t / ratio, ..mh.clone() };
                    let mh = HardwareProfile { t_sweep: t_mh, ..mh.clone() };
                    project_runtime(ratio, &profile, &mh).speedup
                })
                .collect();
            let wins: Vec<bool> = times
                .iter()
                .zip(&mh_row)
                .zip(&ratio_row)
                .map(|((&t, &t_mh), &ratio)| check_advantage(ratio, t / ratio, 1.0, t_mh))
                .collect();
            speedups.insert(name.clone(), per_size);
            advantages.insert(name.clone(), wins);
        }
    }
    let dir = &s.output_dir;
    let md = dir.join("projection.md");
    write_file(&md, &table.to_markdown(&prov))?;
    let csv = dir.join("projection.csv");
    write_file(&csv, &table.to_csv(&prov))?;
    let json = dir.join("projection.json");
    write_json(
        &json,
        &ProjectionJson {
            manifest_sha256: prov.manifest_sha256.clone(),
            seed: s.seed,
            sizes,
            ratios: ratio_row,
            rows: table.rows.iter().cloned().collect(),
            speedup_vs_cpu_mh: speedups,
            advantage_vs_cpu_mh: advantages,
        },
    )?;
    Ok(vec![md, csv, json])
}

/// Reads the ratio of an `advantage.json` as an `n_spins:ratio` argument.
pub fn ratio_from_report(path: &Path) -> CliResult<String> {
    let report: AdvantageJson = read_json(path)?;
    iso_accuracy_ratio(report.tau_sim, report.tau_mh).map_err(|e| CliError::format(path, e.to_string()))?;
    Ok(format!("{}:{}", report.n_spins, report.ratio))
}

pub fn cmd_barrier(s: &Settings) -> CliResult<Vec<PathBuf>> {
    let models = &s.models;
    if models.is_empty() {
        return Err(CliError::Usage("barrier needs at least one --model".into()));
    }
    let prov = s.provenance();
    let loaded: Vec<(PathBuf, ModelFile, RbmModel)> = models
        .iter()
        .map(|p| read_model(p).map(|(f, m)| (p.clone(), f, m)))
        .collect::<CliResult<_>>()?;
    let rows = par_map(thread_count(s.threads), loaded.into_iter().enumerate().collect(), |(idx, (path, file, model))| {
        let lattice = lattice_of(&file, &path)?;
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("model").replace(',', "_");
        let seed = derive_seed(s.seed, stream::BARRIER + idx as u64);
        barrier_row(&model, &lattice, file.exchange, s.samples, s.thermalization, seed, id)
    });
    let rows: Vec<BarrierRow> = rows.into_iter().collect::<CliResult<_>>()?;
    let path = s.output_dir.join("barrier.csv");
    write_file(&path, &barrier_to_csv(&rows, &prov))?;
    Ok(vec![path])
}

/// Barrier statistics and `ln tau_sim` from one sIM chain sampled every sweep.
pub fn barrier_row(
    model: &RbmModel,
    lattice: &SquareLattice,
    exchange: f64,
    sweeps: u64,
    thermalization: u64,
    seed: u64,
    model_id: String,
) -> CliResult<BarrierRow> {
    let mut cfg = ChainConfig::new(sweeps, 1, seed);
    cfg.thermalization_sweeps = thermalization;
    cfg.record_hidden = true;
    let chain = run_chain(SamplerKind::Sim, model, lattice, &cfg)?;
    let report = barrier_report(model, &chain)?;
    let (filtered, _) = filter_magnetization_zero(&chain)?;
    let series = EnergySeries::from_chain(&filtered, lattice, model, exchange)?;
    let tau = integrated_autocorr_time(&series.values, filtered.mean_spacing())?;
    Ok(BarrierRow {
        n_spins: lattice.n_sites(),
        alpha: model.alpha(),
        model_id,
        mean_barrier: report.mean_visible_barrier,
        approx_barrier: report.approx_barrier,
        mean_connection: report.mean_connection_strength,
        visible_flip_rate: report.flip_rates.visible,
        hidden_flip_rate: report.flip_rates.hidden,
        log_tau_sim: tau.tau_sweeps.ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct OracleJson {
    manifest_sha256: String,
    seed: u64,
    #[serde(rename = "L")]
    side: usize,
    #[serde(rename = "J")]
    exchange: f64,
    ground_energy: f64,
    energy_per_site: f64,
    sector_dimension: usize,
    residual: f64,
    iterations: usize,
    variational_energy: Option<f64>,
    relative_error: Option<f64>,
}

pub fn cmd_oracle(s: &Settings) -> CliResult<Vec<PathBuf>> {
    let lattice = s.lattice();
    let exact = exact_ground_energy(&lattice, s.exchange)?;
    let variational = match s.model.as_deref() {
        Some(p) => {
            let (file, model) = read_model(p)?;
            if file.side != s.side {
                return Err(CliError::Usage(format!("model is {0}x{0}, oracle lattice is {1}x{1}", file.side, s.side)));
            }
            Some(exact_variational_energy(&model, &lattice, s.exchange)?)
        }
        None => None,
    };
    let out = OracleJson {
        manifest_sha256: s.hash(),
        seed: s.seed,
        side: s.side,
        exchange: s.exchange,
        ground_energy: exact.ground_energy,
        energy_per_site: exact.ground_energy / lattice.n_sites() as f64,
        sector_dimension: exact.dimension,
        residual: exact.residual,
        iterations: exact.iterations,
        variational_energy: variational,
        relative_error: variational.map(|v| ((v - exact.ground_energy) / exact.ground_energy).abs()),
    };
    let path = s.output_dir.join("oracle.json");
    write_json(&path, &out)?;
    Ok(vec![path])
}

/// Writes the Ising couplings of a model in the text export format.
pub fn export_ising(model: &RbmModel, path: &Path) -> CliResult<()> {
    let mut text = String::new();
    IsingModel::from_rbm(model).write_text(&mut text).expect("string write");
    write_file(path, &text)
}
