//! Random model and state generators shared by the integration tests.
#![allow(dead_code)]

use glme::linalg::{c64, expm, CMat, RMat};
use glme::model::{
    ladder_quadratic_to_canonical, ladder_to_canonical, symplectic_form, CouplingCoefficients,
    DecoherenceMatrix, Flavor, GeneralizedLindbladModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c64(normal(rng), normal(rng)))
}

pub fn real_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| normal(rng))
}

/// `B B† · scale / cols` with `B` of shape `m × rank`.
pub fn random_psd(rng: &mut impl Rng, m: usize, rank: usize, scale: f64) -> CMat {
    let b = complex_matrix(rng, m, rank.max(1));
    let g = &b * b.adjoint() * c64(scale / rank.max(1) as f64, 0.0);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

pub fn random_hamiltonian(rng: &mut impl Rng, flavor: Flavor, n: usize, scale: f64) -> RMat {
    let r = real_matrix(rng, 2 * n, 2 * n) * scale;
    match flavor {
        Flavor::Bosonic => (&r + r.transpose()) * 0.5,
        Flavor::Fermionic => (&r - r.transpose()) * 0.5,
    }
}

/// Arbitrary valid model: random `H`, random `F` (M × 2N), random PSD `Γ`.
pub fn random_model(rng: &mut impl Rng, flavor: Flavor, n: usize, m: usize) -> GeneralizedLindbladModel {
    let rank = rng.gen_range(1..=m);
    GeneralizedLindbladModel::new(
        flavor,
        n,
        random_hamiltonian(rng, flavor, n, 1.0),
        DecoherenceMatrix::new(random_psd(rng, m, rank, 1.0)).unwrap(),
        CouplingCoefficients::new(complex_matrix(rng, m, 2 * n) * c64(0.7, 0.0)).unwrap(),
    )
    .unwrap()
}

/// Loss-dominated bosonic model over `(a, a†)` channels with weak gain,
/// weak cross damping and mild mode coupling; keeps Fock populations low.
pub fn gentle_bosonic_model(rng: &mut impl Rng, n: usize) -> GeneralizedLindbladModel {
    let d = 2 * n;
    let mut q = CMat::zeros(d, d);
    for j in 0..n {
        q[(j, j)] = c64(rng.gen_range(0.2..1.0), 0.0);
    }
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let z = c64(0.1 * normal(rng), 0.1 * normal(rng));
                q[(j, k)] += z;
                q[(k, j)] += z.conj();
            }
        }
    }
    // symmetric squeezing block a†a† and its conjugate
    for j in 0..n {
        for k in j..n {
            let z = c64(0.015 * normal(rng), 0.015 * normal(rng));
            q[(n + j, k)] += z;
            q[(n + k, j)] += if j == k { c64(0.0, 0.0) } else { z };
            q[(j, n + k)] += z.conj();
            q[(k, n + j)] += if j == k { c64(0.0, 0.0) } else { z.conj() };
        }
    }
    let h = ladder_quadratic_to_canonical(&q, Flavor::Bosonic).unwrap();
    let loss_scale = rng.gen_range(0.4..0.8);
    let loss = random_psd(rng, n, n, loss_scale);
    let gain = random_psd(rng, n, n, 0.01);
    let mut gamma = CMat::zeros(d, d);
    gamma.view_mut((0, 0), (n, n)).copy_from(&loss);
    gamma.view_mut((n, n), (n, n)).copy_from(&gain);
    // small off-diagonal blocks, shrunk until Γ stays PSD
    let mut cross = complex_matrix(rng, n, n) * c64(0.03, 0.0);
    loop {
        let mut g = gamma.clone();
        g.view_mut((0, n), (n, n)).copy_from(&cross);
        g.view_mut((n, 0), (n, n)).copy_from(&cross.adjoint());
        if glme::linalg::hermitian_eigenvalues(&g)[0] >= 0.0 {
            gamma = g;
            break;
        }
        cross *= c64(0.5, 0.0);
    }
    GeneralizedLindbladModel::new(
        Flavor::Bosonic,
        n,
        h,
        DecoherenceMatrix::new(gamma).unwrap(),
        ladder_to_canonical(&CMat::identity(d, d), Flavor::Bosonic).unwrap(),
    )
    .unwrap()
}

/// `S diag(ν) Sᵀ` with `S = e^{ΩK}` symplectic and `ν_j ≥ 1`.
pub fn random_bosonic_covariance(rng: &mut impl Rng, n: usize, squeeze: f64, max_nu: f64) -> RMat {
    let omega = symplectic_form(n).unwrap();
    let k = random_hamiltonian(rng, Flavor::Bosonic, n, squeeze);
    let s = expm(&(&omega * k));
    let mut diag = RMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        let nu = rng.gen_range(1.0..max_nu);
        diag[(2 * j, 2 * j)] = nu;
        diag[(2 * j + 1, 2 * j + 1)] = nu;
    }
    let v = &s * diag * s.transpose();
    (&v + v.transpose()) * 0.5
}

/// `O (⊕ λ_j J) Oᵀ` with `O` random orthogonal and `|λ_j| ≤ max_lambda`.
pub fn random_fermionic_covariance(rng: &mut impl Rng, n: usize, max_lambda: f64) -> RMat {
    let a = random_hamiltonian(rng, Flavor::Fermionic, n, 1.5);
    let o = expm(&a);
    let mut blocks = RMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        let l = rng.gen_range(-max_lambda..=max_lambda);
        blocks[(2 * j, 2 * j + 1)] = l;
        blocks[(2 * j + 1, 2 * j)] = -l;
    }
    let s = &o * blocks * o.transpose();
    (&s - s.transpose()) * 0.5
}
