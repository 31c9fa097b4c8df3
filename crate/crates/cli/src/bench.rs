//! Wall-clock cost of one MH sweep and one emulated sIM sweep on this CPU.

use std::hint::black_box;
use std::time::{Duration, Instant};

use nqs_ising_core::rng::chain_rng;
use nqs_ising_core::sampler::{mh_sweep, sim_sweep, MhState, PairProposal, SimState};
use nqs_ising_core::{IsingModel, RbmModel, SquareLattice};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTimes {
    pub mh: f64,
    pub sim: f64,
}

/// Runs each sweep kind for at least `budget` and returns seconds per sweep.
pub fn measure_sweep_times(lattice: &SquareLattice, model: &RbmModel, seed: u64, budget: Duration) -> CliResult<SweepTimes> {
    let mut rng = chain_rng(seed);
    let mut state = MhState::new(model, lattice.neel_state())?;
    let mh = time_per_call(budget, || {
        black_box(mh_sweep(model, &mut state, PairProposal::Global, lattice.bonds(), &mut rng).expect("valid state"));
    });
    let ising = IsingModel::from_rbm(model);
    let mut sim = SimState::random(&ising, &mut rng);
    let sim = time_per_call(budget, || {
        black_box(sim_sweep(&ising, &mut sim, &mut rng));
    });
    Ok(SweepTimes { mh, sim })
}

fn time_per_call(budget: Duration, mut f: impl FnMut()) -> f64 {
    for _ in 0..16 {
        f();
    }
    let mut calls = 0u64;
    let mut batch = 16u64;
    let start = Instant::now();
    loop {
        for _ in 0..batch {
            f();
        }
        calls += batch;
        let elapsed = start.elapsed();
        if elapsed >= budget {
            return elapsed.as_secs_f64() / calls as f64;
        }
        batch *= 2;
    }
}
