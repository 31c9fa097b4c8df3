use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nqs_ising::commands;
use nqs_ising::error::{CliError, CliResult};
use nqs_ising::manifest::{KindName, Manifest, PresetName, ProposalName};

#[derive(Parser)]
#[command(name = "nqs-ising", version, about = "RBM quantum states sampled by Metropolis-Hastings and an emulated Ising machine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Default)]
struct Common {
    /// JSON manifest; explicit flags override its fields.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: ISING_NQS_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Lattice side length (even, at least 4).
    #[arg(long = "L")]
    side: Option<usize>,
    /// Hidden-unit density.
    #[arg(long)]
    alpha: Option<usize>,
    /// Exchange coupling.
    #[arg(long = "J", allow_negative_numbers = true)]
    exchange: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Train RBM replicas with stochastic reconfiguration.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        preset: Option<PresetName>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        /// Override the preset's samples per iteration.
        #[arg(long)]
        sr_samples: Option<usize>,
        /// MH pair proposal.
        #[arg(long, value_enum)]
        proposal: Option<ProposalName>,
    },
    /// Draw MH and/or sIM chains from a trained model.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<KindName>,
        /// Chains per sampler.
        #[arg(long)]
        chains: Option<usize>,
        /// Stored samples per chain.
        #[arg(long)]
        samples: Option<u64>,
        /// Sweeps between stored samples (default: automatic).
        #[arg(long)]
        interval: Option<u64>,
        #[arg(long)]
        thermalization: Option<u64>,
        /// Store hidden spins of sIM chains.
        #[arg(long)]
        record_hidden: bool,
        #[arg(long, value_enum)]
        proposal: Option<ProposalName>,
    },
    /// Autocorrelation times, error curves and the iso-accuracy ratio.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Directory holding `mh_*.csv` and `sim_*.csv`.
        #[arg(long)]
        chains_dir: Option<PathBuf>,
        #[arg(long)]
        baseline_chains: Option<usize>,
        #[arg(long)]
        baseline_sweeps: Option<u64>,
        #[arg(long)]
        fit_window_mult: Option<f64>,
        #[arg(long)]
        thermalization: Option<u64>,
    },
    /// Projected wall-clock time per hardware profile.
    Project {
        #[command(flatten)]
        common: Common,
        /// `n_spins:ratio`, repeatable.
        #[arg(long = "ratio")]
        ratios: Vec<String>,
        /// `advantage.json` written by `analyze`, repeatable.
        #[arg(long = "report")]
        reports: Vec<PathBuf>,
        /// Extra profile `name:seconds_per_sweep`, repeatable.
        #[arg(long = "profile")]
        profiles: Vec<String>,
        /// Column order; defaults to every size with a ratio.
        #[arg(long = "size")]
        sizes: Vec<usize>,
        /// Time MH and sIM sweeps on this machine.
        #[arg(long)]
        measure_cpu: bool,
    },
    /// Energy barriers, flip rates and sIM autocorrelation per model.
    Barrier {
        #[command(flatten)]
        common: Common,
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        /// Sweeps per chain.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        thermalization: Option<u64>,
    },
    /// Exact ground-state energy, and a model's exact variational energy.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn flag_manifest(c: &Common) -> Manifest {
    Manifest {
        side: c.side,
        alpha: c.alpha,
        exchange: c.exchange,
        seed: c.seed,
        output_dir: c.out.clone(),
        threads: c.threads,
        ..Default::default()
    }
}

fn some_if(flag: bool) -> Option<bool> {
    flag.then_some(true)
}

fn some_vec<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

/// Subcommand name, shared flags and the manifest fields its own flags set.
fn flags(command: Command) -> (&'static str, Common, Manifest) {
    match command {
        Command::Train { common, preset, iterations, eta, replicas, sr_samples, proposal } => {
            let m = Manifest { preset, iterations, eta, replicas, sr_samples, proposal, ..flag_manifest(&common) };
            ("train", common, m)
        }
        Command::Sample { common, model, kind, chains, samples, interval, thermalization, record_hidden, proposal } => {
            let m = Manifest {
                model,
                proposal,
                kind,
                chains,
                samples,
                interval,
                thermalization,
                record_hidden: some_if(record_hidden),
                ..flag_manifest(&common)
            };
            ("sample", common, m)
        }
        Command::Analyze { common, model, chains_dir, baseline_chains, baseline_sweeps, fit_window_mult, thermalization } => {
            let m = Manifest {
                model,
                chains_dir,
                baseline_chains,
                baseline_sweeps,
                fit_window_mult,
                thermalization,
                ..flag_manifest(&common)
            };
            ("analyze", common, m)
        }
        Command::Project { common, ratios, reports, profiles, sizes, measure_cpu } => {
            let m = Manifest {
                ratios: some_vec(ratios),
                reports: some_vec(reports),
                profiles: some_vec(profiles),
                sizes: some_vec(sizes),
                measure_cpu: some_if(measure_cpu),
                ..flag_manifest(&common)
            };
            ("project", common, m)
        }
        Command::Barrier { common, models, samples, thermalization } => {
            let m = Manifest { models: some_vec(models), samples, thermalization, ..flag_manifest(&common) };
            ("barrier", common, m)
        }
        Command::Oracle { common, model } => {
            let m = Manifest { model, ..flag_manifest(&common) };
            ("oracle", common, m)
        }
    }
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    let (name, common, flags) = flags(cli.command);
    let base = match &common.manifest {
        Some(p) => Manifest::load(p)?,
        None => Manifest::default(),
    };
    commands::run(name, &base.overlay(&flags))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            let mut out = std::io::stdout().lock();
            for p in paths {
                // a closed pipe is not a failure of the command
                let _ = writeln!(out, "{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
