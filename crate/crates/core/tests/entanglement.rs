mod common;

use glme::bosonic::GaussianState;
use glme::entanglement::{
    bosonic_eta, duan_bosonic, duan_fermionic, log_negativity_bosonic, log_negativity_fermionic, sigma_cross,
};
use glme::error::GlmeError;
use glme::fermionic::FermionicGaussianState;
use glme::linalg::{c64, RMat, RVec};
use glme::model::{symplectic_form, Flavor, GeneralizedLindbladModel};
use glme::oracle::checks::{dense_negativity_bosonic, dense_negativity_fermionic};
use glme::oracle::fermionic::{gibbs_state, DenseFermionicEngine};
use glme::oracle::DenseOperator;
use glme::oracle::bosonic::two_mode_squeezed_vacuum;
use rand::Rng;

fn thermal_pair(n1: f64, n2: f64) -> GaussianState {
    let mut v = RMat::identity(4, 4);
    for i in 0..2 {
        v[(i, i)] = 2.0 * n1 + 1.0;
        v[(i + 2, i + 2)] = 2.0 * n2 + 1.0;
    }
    GaussianState::new(RVec::zeros(4), v).unwrap()
}

#[test]
fn bosonic_duan_examples() {
    let vac = GaussianState::vacuum(2);
    let d = duan_bosonic(&vac, 1.0, 1.0).unwrap();
    assert!((d.quantity - 2.0).abs() < 1e-15 && d.bound == 2.0 && !d.entangled);
    for r in [0.1, 0.5, 1.2] {
        let d = duan_bosonic(&GaussianState::two_mode_squeezed(r), 1.0, -1.0).unwrap();
        assert!((d.quantity - 2.0 * (-2.0 * r).exp()).abs() < 1e-12);
        assert!(d.entangled);
    }
    let nbar = 0.7;
    let d = duan_bosonic(&thermal_pair(nbar, nbar), 0.6, 1.3).unwrap();
    assert!((d.quantity - (0.36 + 1.69) * (2.0 * nbar + 1.0)).abs() < 1e-12);
    assert!(!d.entangled);
}

#[test]
fn bosonic_negativity_examples() {
    assert!((bosonic_eta(&RMat::identity(4, 4)).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(log_negativity_bosonic(&RMat::identity(4, 4), false).unwrap().value, 0.0);
    for r in [0.05, 0.3, 0.5, 1.5] {
        let v = GaussianState::two_mode_squeezed(r).v;
        assert!((bosonic_eta(&v).unwrap() - (-2.0 * r).exp()).abs() < 1e-12);
        assert!((log_negativity_bosonic(&v, false).unwrap().value - 2.0 * r).abs() < 1e-9);
        let strict = log_negativity_bosonic(&v, true).unwrap().value;
        assert!((strict - (2.0 * r - 2f64.ln()).max(0.0)).abs() < 1e-9);
    }
    assert_eq!(log_negativity_bosonic(&thermal_pair(0.3, 1.1).v, false).unwrap().value, 0.0);
    assert!(matches!(
        log_negativity_bosonic(&RMat::identity(2, 2), false),
        Err(GlmeError::Structural { .. })
    ));
}

#[test]
fn bosonic_negativity_matches_dense_partial_transpose() {
    for r in [0.1, 0.3, 0.5] {
        let dense = dense_negativity_bosonic(&two_mode_squeezed_vacuum(16, r), 16).unwrap();
        assert!((dense - 2.0 * r).abs() < 1e-3, "r = {r}: {dense}");
        let analytic = log_negativity_bosonic(&GaussianState::two_mode_squeezed(r).v, false).unwrap().value;
        assert!((dense - analytic).abs() < 1e-3);
    }
}

fn engine2() -> DenseFermionicEngine {
    DenseFermionicEngine::new(&GeneralizedLindbladModel::closed(Flavor::Fermionic, RMat::zeros(4, 4)).unwrap()).unwrap()
}

fn bell() -> DenseOperator {
    let mut psi = vec![c64(0.0, 0.0); 4];
    psi[0] = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[3] = psi[0];
    DenseOperator::from_ket(&psi)
}

#[test]
fn fermionic_negativity_examples() {
    assert!(sigma_cross(&RMat::zeros(4, 4)).unwrap().iter().all(|l| *l == 0.0));
    assert!(log_negativity_fermionic(&RMat::zeros(4, 4)).unwrap().value.abs() < 1e-14);

    let sigma = engine2().sigma(&bell());
    let e = log_negativity_fermionic(&sigma).unwrap().value;
    assert!((e - 2f64.ln()).abs() < 1e-8);
    assert!((dense_negativity_fermionic(&bell()).unwrap() - e).abs() < 1e-8);

    // pure product: |1⟩ ⊗ |0⟩
    let mut psi = vec![c64(0.0, 0.0); 4];
    psi[2] = c64(1.0, 0.0);
    let prod = engine2().sigma(&DenseOperator::from_ket(&psi));
    assert!(log_negativity_fermionic(&prod).unwrap().value.abs() < 1e-12);

    // mixed product σ₁ ⊕ σ₂ keeps the block structure
    let (l1, l2) = (0.6, -0.3);
    let mut s = RMat::zeros(4, 4);
    s[(0, 1)] = l1;
    s[(1, 0)] = -l1;
    s[(2, 3)] = l2;
    s[(3, 2)] = -l2;
    let mut spec = sigma_cross(&s).unwrap();
    spec.sort_by(|a, b| b.total_cmp(a));
    let mut expected = vec![2.0 * l1.abs() / (1.0 + l1 * l1), 2.0 * l2.abs() / (1.0 + l2 * l2)];
    expected.sort_by(|a, b| b.total_cmp(a));
    for (a, b) in spec.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12, "{spec:?} vs {expected:?}");
    }

    let bad = symplectic_form(2).unwrap() * 1.5;
    assert!(matches!(log_negativity_fermionic(&bad), Err(GlmeError::Unphysical { .. })));
}

#[test]
fn fermionic_negativity_matches_dense_time_reversal() {
    let mut rng = common::rng(606);
    let eng = engine2();
    for _ in 0..60 {
        // Gibbs states of random kernels cover mixed, entangled and near-pure cases
        let scale = rng.gen_range(0.1..4.0);
        let k = {
            let r = common::real_matrix(&mut rng, 4, 4) * scale;
            (&r - r.transpose()) * 0.5
        };
        let rho = gibbs_state(&k).unwrap();
        let sigma = eng.sigma(&rho);
        let analytic = log_negativity_fermionic(&sigma).unwrap().value;
        let dense = dense_negativity_fermionic(&rho).unwrap().max(0.0);
        assert!((analytic - dense).abs() < 1e-6, "{analytic} vs {dense}");
    }
}

#[test]
fn fermionic_duan_is_state_independent() {
    let mut rng = common::rng(707);
    for _ in 0..50 {
        let sigma = common::random_fermionic_covariance(&mut rng, 2, 1.0);
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let d = duan_fermionic(&sigma, a, b).unwrap();
        assert!((d.quantity - (a * a + b * b)).abs() < 1e-12);
        assert!(!d.entangled);
    }
    let vac = FermionicGaussianState::vacuum(2).sigma;
    assert!((duan_fermionic(&vac, 1.0, 1.0).unwrap().quantity - 2.0).abs() < 1e-15);
    assert!((duan_fermionic(&vac, 2.0, 0.0).unwrap().quantity - 4.0).abs() < 1e-15);

    // same variances straight from the dense operators
    let eng = engine2();
    let rho = bell();
    let w: Vec<_> = (0..4).map(|j| DenseOperator::from_cmat(&eng.majorana(j).to_dense())).collect();
    let var = |c: [f64; 4]| {
        let mut op = DenseOperator::zeros(4);
        for (j, x) in c.iter().enumerate() {
            op.axpy(c64(*x, 0.0), &w[j]);
        }
        let m = op.to_cmat();
        let sq = DenseOperator::from_cmat(&(&m * &m));
        let mean = op.trace_mul(&rho).re;
        sq.trace_mul(&rho).re - mean * mean
    };
    let dense = var([1.0, 0.0, 1.0, 0.0]) + var([0.0, 1.0, 0.0, -1.0]);
    let sigma = eng.sigma(&rho);
    assert!((dense - duan_fermionic(&sigma, 1.0, 1.0).unwrap().quantity).abs() < 1e-12);
}
