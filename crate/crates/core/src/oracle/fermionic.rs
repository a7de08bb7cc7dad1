//! Dense Fock-space reference for fermionic models via Jordan–Wigner.
//!
//! `c_j = Z ⊗ … ⊗ Z ⊗ a ⊗ I ⊗ … ⊗ I` with `a = |0⟩⟨1|`; the basis index of
//! `|n_1 … n_N⟩` is `Σ_j n_j 2^{N−1−j}`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SymmetricEigen;

use super::dense::{DenseIntegrator, DenseLiouvillian, DenseOperator};
use super::sparse::Sparse;
use crate::error::{GlmeError, Result};
use crate::linalg::{c64, CMat, RMat};
use crate::model::{Flavor, GeneralizedLindbladModel};

pub const MAX_FERMION_MODES: usize = 5;

pub fn annihilators(n_modes: usize) -> Vec<Sparse> {
    let a = Sparse::from_triplets(2, [(0, 1, c64(1.0, 0.0))]);
    let z = Sparse::from_triplets(2, [(0, 0, c64(1.0, 0.0)), (1, 1, c64(-1.0, 0.0))]);
    let id = Sparse::identity(2);
    (0..n_modes)
        .map(|j| {
            (0..n_modes).fold(Sparse::identity(1), |acc, k| {
                acc.kron(match k.cmp(&j) {
                    std::cmp::Ordering::Less => &z,
                    std::cmp::Ordering::Equal => &a,
                    std::cmp::Ordering::Greater => &id,
                })
            })
        })
        .collect()
}

/// `w_{2j} = (c_j† + c_j)/√2`, `w_{2j+1} = −i(c_j† − c_j)/√2`.
pub fn majoranas(n_modes: usize) -> Vec<Sparse> {
    annihilators(n_modes)
        .into_iter()
        .flat_map(|c| {
            let cd = c.adjoint();
            let x = cd.add(&c).scale(c64(FRAC_1_SQRT_2, 0.0));
            let p = cd.add(&c.scale(c64(-1.0, 0.0))).scale(c64(0.0, -FRAC_1_SQRT_2));
            [x, p]
        })
        .collect()
}

/// `max_jk ‖{w_j, w_k} − δ_jk‖`.
pub fn anticommutator_defect(w: &[Sparse]) -> f64 {
    let dim = w.first().map_or(1, |s| s.dim);
    let mut worst: f64 = 0.0;
    for (j, wj) in w.iter().enumerate() {
        for (k, wk) in w.iter().enumerate() {
            let mut m = wj.mul(wk).add(&wk.mul(wj)).to_dense();
            if j == k {
                m -= CMat::identity(dim, dim);
            }
            worst = worst.max(m.iter().fold(0.0, |a, z| a.max(z.norm())));
        }
    }
    worst
}

/// `(−1)^{Σ n_j}` as a diagonal sparse operator.
pub fn parity(n_modes: usize) -> Sparse {
    let dim = 1usize << n_modes;
    Sparse::from_triplets(
        dim,
        (0..dim).map(|i| (i, i, c64(if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0))),
    )
}

#[derive(Debug, Clone)]
pub struct DenseFermionicEngine {
    pub n_modes: usize,
    pub liouvillian: DenseLiouvillian,
    w: Vec<Sparse>,
    // i[w_j, w_k]
    commutators: Vec<Vec<Sparse>>,
}

impl DenseFermionicEngine {
    pub fn new(model: &GeneralizedLindbladModel) -> Result<Self> {
        if model.flavor != Flavor::Fermionic {
            return Err(GlmeError::structural("dense fermionic engine", "model is not fermionic"));
        }
        model.check_dimensions()?;
        let n = model.n_modes;
        if n > MAX_FERMION_MODES {
            return Err(GlmeError::structural(
                "n_modes",
                format!("dense fermionic engine supports at most {MAX_FERMION_MODES} modes"),
            ));
        }
        let w = majoranas(n);
        let defect = anticommutator_defect(&w);
        if defect > 1e-14 {
            return Err(GlmeError::numerical(
                "Jordan-Wigner",
                format!("Majorana anticommutator defect {defect:e}"),
            ));
        }
        let dim = 1usize << n;
        let d = 2 * n;
        let products: Vec<Vec<Sparse>> =
            (0..d).map(|j| (0..d).map(|k| w[j].mul(&w[k])).collect()).collect();
        let i = c64(0.0, 1.0);
        // H = (i/2) Σ G_jk w_j w_k
        let h = Sparse::linear_combination(
            dim,
            (0..d).flat_map(|j| {
                let products = &products;
                (0..d).map(move |k| (i * 0.5 * model.hamiltonian[(j, k)], &products[j][k]))
            }),
        );
        let f = model.f();
        let ops = (0..f.nrows())
            .map(|r| Sparse::linear_combination(dim, (0..d).map(|c| (f[(r, c)], &w[c]))))
            .collect();
        let liouvillian = DenseLiouvillian::new(h, ops, model.gamma().clone())?;
        let commutators = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| products[j][k].add(&products[k][j].scale(c64(-1.0, 0.0))).scale(i))
                    .collect()
            })
            .collect();
        Ok(Self {
            n_modes: n,
            liouvillian,
            w,
            commutators,
        })
    }

    pub fn majorana(&self, j: usize) -> &Sparse {
        &self.w[j]
    }

    /// `σ_jk = i⟨[w_j, w_k]⟩`.
    pub fn sigma(&self, rho: &DenseOperator) -> RMat {
        let d = 2 * self.n_modes;
        RMat::from_fn(d, d, |j, k| self.commutators[j][k].trace_mul(&rho.data).re)
    }

    pub fn sigma_derivative(&self, rho: &DenseOperator) -> RMat {
        self.sigma(&self.liouvillian.apply(rho))
    }

    pub fn evolve(
        &self,
        rho0: &DenseOperator,
        times: &[f64],
        integrator: DenseIntegrator,
    ) -> Result<Vec<DenseOperator>> {
        self.liouvillian.evolve(rho0, times, integrator)
    }

    pub fn sigma_trajectory(
        &self,
        rho0: &DenseOperator,
        times: &[f64],
        integrator: DenseIntegrator,
    ) -> Result<Vec<RMat>> {
        Ok(self.evolve(rho0, times, integrator)?.iter().map(|r| self.sigma(r)).collect())
    }
}

pub fn vacuum_state(n_modes: usize) -> DenseOperator {
    let mut psi = vec![c64(0.0, 0.0); 1 << n_modes];
    psi[0] = c64(1.0, 0.0);
    DenseOperator::from_ket(&psi)
}

/// `ρ ∝ exp(−(i/2) wᵀ K w)` for real antisymmetric `K`.
pub fn gibbs_state(k: &RMat) -> Result<DenseOperator> {
    let d = k.nrows();
    if !d.is_multiple_of(2) || k.ncols() != d {
        return Err(GlmeError::structural("K", "must be square with even dimension"));
    }
    let n = d / 2;
    let w = majoranas(n);
    let dim = 1usize << n;
    let mut q = CMat::zeros(dim, dim);
    for a in 0..d {
        for b in 0..d {
            if k[(a, b)] != 0.0 {
                q += w[a].mul(&w[b]).to_dense() * c64(0.0, -0.5 * k[(a, b)]);
            }
        }
    }
    let q = (&q + q.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(q);
    let shift = eig.eigenvalues.max();
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|&e| (e - shift).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut rho = CMat::zeros(dim, dim);
    for (i, &p) in weights.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        rho += v * v.adjoint() * c64(p / z, 0.0);
    }
    let mut out = DenseOperator::from_cmat(&rho);
    out.hermitize();
    Ok(out)
}
