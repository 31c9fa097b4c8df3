use nqs_ising_core::estimate::variational_energy;
use nqs_ising_core::oracle::{
    enumerate_joint_boltzmann, enumerate_visible_distribution, exact_ground_energy, exact_variational_energy,
};
use nqs_ising_core::rng::{chain_rng, derive_seed};
use nqs_ising_core::sampler::{filter_magnetization_zero, run_chain, ChainConfig};
use nqs_ising_core::{IsingModel, RbmModel, SamplerKind, SquareLattice};

#[test]
fn heisenberg_4x4_ground_energy() {
    let lattice = SquareLattice::new(4).unwrap();
    let r = exact_ground_energy(&lattice, 1.0).unwrap();
    assert!((r.ground_energy + 11.228483208).abs() < 1e-8, "{}", r.ground_energy);
    assert!((r.ground_energy / 16.0 + 0.70178).abs() < 1e-5);
    assert_eq!(r.dimension, 12870);
    assert!(r.residual < 1e-8);
}

#[test]
fn ground_energy_scales_with_coupling() {
    let lattice = SquareLattice::new(4).unwrap();
    let e1 = exact_ground_energy(&lattice, 1.0).unwrap().ground_energy;
    let e2 = exact_ground_energy(&lattice, 2.5).unwrap().ground_energy;
    assert!((e2 - 2.5 * e1).abs() < 1e-8);
}

#[test]
fn marginal_of_joint_is_psi_squared() {
    for k in 0..6 {
        let model = RbmModel::random(3 + k % 3, 1 + k % 2, 0.7, &mut chain_rng(derive_seed(11, k as u64))).unwrap();
        let joint = enumerate_joint_boltzmann(&IsingModel::from_rbm(&model)).unwrap();
        let visible = enumerate_visible_distribution(&model).unwrap();
        for (a, b) in joint.visible_marginal().iter().zip(&visible.probabilities) {
            assert!((a - b).abs() <= 1e-12 * b.max(1e-300) + 1e-15);
        }
    }
}

#[test]
fn variational_principle_holds_for_random_models() {
    let lattice = SquareLattice::new(4).unwrap();
    let e0 = exact_ground_energy(&lattice, 1.0).unwrap().ground_energy;
    for k in 0..3 {
        let model = RbmModel::random(16, 1, 0.3, &mut chain_rng(k)).unwrap();
        let ev = exact_variational_energy(&model, &lattice, 1.0).unwrap();
        assert!(ev >= e0 - 1e-9, "{ev} < {e0}");
    }
}

#[test]
fn sampled_energy_matches_exact_variational_energy() {
    let lattice = SquareLattice::new(4).unwrap();
    let model = RbmModel::random(16, 1, 0.3, &mut chain_rng(5)).unwrap();
    let exact = exact_variational_energy(&model, &lattice, 1.0).unwrap();
    for kind in [SamplerKind::Mh, SamplerKind::Sim] {
        let chain = run_chain(kind, &model, &lattice, &ChainConfig::new(40_000, 1, 9)).unwrap();
        let chain = if kind == SamplerKind::Sim { filter_magnetization_zero(&chain).unwrap().0 } else { chain };
        let est = variational_energy(&chain, &lattice, &model, 1.0).unwrap();
        // generous: 6 naive standard errors inflated for correlation
        let tol = 6.0 * (est.variance / chain.len() as f64).sqrt() * 4.0;
        assert!((est.mean - exact).abs() < tol, "{kind:?}: {} vs {exact} (tol {tol})", est.mean);
    }
}
