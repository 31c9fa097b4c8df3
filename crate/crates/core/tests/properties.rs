use nqs_ising_core::estimate::log_grid;
use nqs_ising_core::ising::IsingModel;
use nqs_ising_core::lattice::local_energy;
use nqs_ising_core::rng::chain_rng;
use nqs_ising_core::sampler::{mh_sweep, sim_sweep, MhState, PairProposal, SimState};
use nqs_ising_core::{RbmModel, SpinConfig, SquareLattice, ThetaCache};
use proptest::prelude::*;

fn spins(n: usize) -> impl Strategy<Value = Vec<i8>> {
    proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n)
}

fn model(n: usize, alpha: usize, seed: u64) -> RbmModel {
    RbmModel::random(n, alpha, 0.5, &mut chain_rng(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn bits_round_trip(bits in 0u64..1 << 16) {
        prop_assert_eq!(SpinConfig::from_bits(bits, 16).to_bits(), bits);
    }

    #[test]
    fn cached_ratio_matches_direct(s in spins(8), seed in any::<u64>(), a in 0usize..8, b in 0usize..8) {
        let m = model(8, 2, seed);
        let config = SpinConfig::new(s).unwrap();
        let cache = ThetaCache::new(&m, &config).unwrap();
        let flips: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
        let mut flipped = config.clone();
        for &i in &flips {
            flipped.flip(i);
        }
        let direct = m.log_psi(&flipped).unwrap() - m.log_psi(&config).unwrap();
        prop_assert!((m.log_psi_ratio(&cache, &config, &flips) - direct).abs() < 1e-10);
    }

    #[test]
    fn psi_is_invariant_under_global_flip_without_bias(s in spins(6), seed in any::<u64>()) {
        let mut m = model(6, 1, seed);
        let mut p = m.params().to_vec();
        p[..m.n_hidden()].iter_mut().for_each(|b| *b = 0.0);
        m.set_params(&p).unwrap();
        let config = SpinConfig::new(s).unwrap();
        prop_assert!((m.log_psi(&config).unwrap() - m.log_psi(&config.inverted()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn local_field_gives_flip_energy(m in spins(12), seed in any::<u64>(), i in 0usize..12) {
        let ising = IsingModel::from_rbm(&model(4, 2, seed));
        let mut flipped = m.clone();
        flipped[i] = -flipped[i];
        let delta = ising.energy(&flipped).unwrap() - ising.energy(&m).unwrap();
        let field = ising.local_field(&m, i).unwrap();
        prop_assert!((delta - 2.0 * f64::from(m[i]) * field).abs() < 1e-10);
    }

    #[test]
    fn mh_keeps_magnetization(seed in any::<u64>()) {
        let lattice = SquareLattice::new(4).unwrap();
        let m = model(16, 1, seed);
        let mut state = MhState::new(&m, lattice.neel_state()).unwrap();
        let mut rng = chain_rng(seed);
        for _ in 0..5 {
            mh_sweep(&m, &mut state, PairProposal::Global, lattice.bonds(), &mut rng).unwrap();
            prop_assert_eq!(state.config.magnetization(), 0);
        }
    }

    #[test]
    fn gibbs_keeps_spins_binary(seed in any::<u64>()) {
        let ising = IsingModel::from_rbm(&model(6, 2, seed));
        let mut rng = chain_rng(seed);
        let mut state = SimState::random(&ising, &mut rng);
        for _ in 0..5 {
            sim_sweep(&ising, &mut state, &mut rng);
        }
        prop_assert!(state.hidden().iter().chain(state.visible()).all(|&s| s == 1 || s == -1));
        prop_assert_eq!(state.hidden().len(), 12);
    }

    #[test]
    fn neel_local_energy_of_zero_model(side in prop_oneof![Just(4usize), Just(6)]) {
        // uniform amplitudes: diagonal -1/4 per bond, off-diagonal -1/2 per bond
        let lattice = SquareLattice::new(side).unwrap();
        let m = RbmModel::zeros(side * side, 1).unwrap();
        let e = local_energy(&lattice, &m, &lattice.neel_state(), 1.0).unwrap();
        prop_assert!((e + 0.75 * lattice.bonds().len() as f64).abs() < 1e-12);
    }

    #[test]
    fn grid_is_strictly_increasing(hi in 2u64..1_000_000) {
        let g = log_grid(1, hi, 20);
        prop_assert_eq!(g[0], 1);
        prop_assert_eq!(*g.last().unwrap(), hi);
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
