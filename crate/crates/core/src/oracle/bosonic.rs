//! Truncated Fock-space reference for bosonic models.
//!
//! Basis index of `|n_1 … n_N⟩` is `Σ_j n_j d^{N−1−j}` (first mode most
//! significant), with `d` the per-mode Fock dimension.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::dense::{DenseIntegrator, DenseLiouvillian, DenseOperator};
use super::sparse::Sparse;
use crate::error::{GlmeError, Result};
use crate::linalg::{c64, RMat, RVec};
use crate::model::{Flavor, GeneralizedLindbladModel};

/// Largest accepted population in the top two Fock levels of any mode.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;
pub const MAX_DENSE_DIM: usize = 4096;

pub fn annihilation(fock_dim: usize) -> Sparse {
    Sparse::from_triplets(
        fock_dim,
        (1..fock_dim).map(|n| (n - 1, n, c64((n as f64).sqrt(), 0.0))),
    )
}

/// Embeds a single-mode operator on `mode` of an `n_modes` register.
pub fn embed(op: &Sparse, mode: usize, n_modes: usize) -> Sparse {
    let id = Sparse::identity(op.dim);
    (0..n_modes).fold(Sparse::identity(1), |acc, j| {
        acc.kron(if j == mode { op } else { &id })
    })
}

/// `(q_1, p_1, …, q_N, p_N)` with `q = (a + a†)/√2`, `p = −i(a − a†)/√2`.
pub fn quadratures(n_modes: usize, fock_dim: usize) -> Vec<Sparse> {
    let a = annihilation(fock_dim);
    let ad = a.adjoint();
    let q = a.add(&ad).scale(c64(FRAC_1_SQRT_2, 0.0));
    let p = a.add(&ad.scale(c64(-1.0, 0.0))).scale(c64(0.0, -FRAC_1_SQRT_2));
    (0..n_modes)
        .flat_map(|j| [embed(&q, j, n_modes), embed(&p, j, n_modes)])
        .collect()
}

#[derive(Debug, Clone)]
pub struct DenseBosonicEngine {
    pub n_modes: usize,
    pub fock_dim: usize,
    pub liouvillian: DenseLiouvillian,
    x: Vec<Sparse>,
    // {x_j, x_k} for j ≤ k
    anti: Vec<Vec<Sparse>>,
}

impl DenseBosonicEngine {
    pub fn new(model: &GeneralizedLindbladModel, fock_dim: usize) -> Result<Self> {
        if model.flavor != Flavor::Bosonic {
            return Err(GlmeError::structural("dense bosonic engine", "model is not bosonic"));
        }
        model.check_dimensions()?;
        let n = model.n_modes;
        if fock_dim < 2 {
            return Err(GlmeError::structural("fock_dim", "must be at least 2"));
        }
        let dim = fock_dim
            .checked_pow(n as u32)
            .filter(|&d| d <= MAX_DENSE_DIM)
            .ok_or_else(|| {
                GlmeError::structural("fock_dim", format!("fock_dim^N exceeds {MAX_DENSE_DIM}"))
            })?;
        let x = quadratures(n, fock_dim);
        let d = 2 * n;
        let mut h_terms = Vec::new();
        let mut products = vec![vec![Sparse::zeros(dim); d]; d];
        for j in 0..d {
            for k in 0..d {
                products[j][k] = x[j].mul(&x[k]);
            }
        }
        for j in 0..d {
            for k in 0..d {
                h_terms.push((c64(0.5 * model.hamiltonian[(j, k)], 0.0), &products[j][k]));
            }
        }
        let h = Sparse::linear_combination(dim, h_terms);
        let f = model.f();
        let ops = (0..f.nrows())
            .map(|r| Sparse::linear_combination(dim, (0..d).map(|c| (f[(r, c)], &x[c]))))
            .collect();
        let liouvillian = DenseLiouvillian::new(h, ops, model.gamma().clone())?;
        let anti = (0..d)
            .map(|j| (0..d).map(|k| products[j][k].add(&products[k][j])).collect())
            .collect();
        Ok(Self {
            n_modes: n,
            fock_dim,
            liouvillian,
            x,
            anti,
        })
    }

    pub fn dim(&self) -> usize {
        self.liouvillian.dim
    }

    pub fn quadrature(&self, j: usize) -> &Sparse {
        &self.x[j]
    }

    /// `⟨x⟩` and `V_jk = ⟨{x_j, x_k}⟩ − 2⟨x_j⟩⟨x_k⟩`.
    pub fn moments(&self, rho: &DenseOperator) -> (RVec, RMat) {
        let d = 2 * self.n_modes;
        let mean = RVec::from_fn(d, |j, _| self.x[j].trace_mul(&rho.data).re);
        let v = RMat::from_fn(d, d, |j, k| {
            self.anti[j][k].trace_mul(&rho.data).re - 2.0 * mean[j] * mean[k]
        });
        (mean, v)
    }

    /// `d⟨x⟩/dt` and `dV/dt` evaluated from `Lρ`.
    pub fn moment_derivatives(&self, rho: &DenseOperator) -> (RVec, RMat) {
        let d = 2 * self.n_modes;
        let l_rho = self.liouvillian.apply(rho);
        let (mean, _) = self.moments(rho);
        let dmean = RVec::from_fn(d, |j, _| self.x[j].trace_mul(&l_rho.data).re);
        let dv = RMat::from_fn(d, d, |j, k| {
            self.anti[j][k].trace_mul(&l_rho.data).re
                - 2.0 * (dmean[j] * mean[k] + mean[j] * dmean[k])
        });
        (dmean, dv)
    }

    /// Largest population in Fock levels `≥ fock_dim − 2` over all modes.
    pub fn truncation_population(&self, rho: &DenseOperator) -> f64 {
        top_population(rho, self.n_modes, self.fock_dim)
    }

    pub fn check_truncation(&self, rho: &DenseOperator) -> Result<f64> {
        let pop = self.truncation_population(rho);
        if pop > TRUNCATION_THRESHOLD {
            return Err(GlmeError::Truncation {
                population: pop,
                threshold: TRUNCATION_THRESHOLD,
            });
        }
        Ok(pop)
    }

    /// States at `times`, failing if truncation is ever too coarse.
    pub fn evolve(
        &self,
        rho0: &DenseOperator,
        times: &[f64],
        integrator: DenseIntegrator,
    ) -> Result<Vec<DenseOperator>> {
        self.check_truncation(rho0)?;
        let states = self.liouvillian.evolve(rho0, times, integrator)?;
        for s in &states {
            self.check_truncation(s)?;
        }
        Ok(states)
    }

    pub fn moment_trajectory(
        &self,
        rho0: &DenseOperator,
        times: &[f64],
        integrator: DenseIntegrator,
    ) -> Result<Vec<(RVec, RMat)>> {
        Ok(self
            .evolve(rho0, times, integrator)?
            .iter()
            .map(|r| self.moments(r))
            .collect())
    }
}

pub(crate) fn top_population(rho: &DenseOperator, n_modes: usize, fock_dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for mode in 0..n_modes {
        let stride = fock_dim.pow((n_modes - 1 - mode) as u32);
        let mut pop = 0.0;
        for i in 0..rho.dim {
            if (i / stride) % fock_dim + 2 >= fock_dim {
                pop += rho.get(i, i).re;
            }
        }
        worst = worst.max(pop);
    }
    worst
}

/// `e^{G} v` by Taylor series with substeps keeping `‖G‖_∞ h ≤ 1`.
fn exp_apply(g: &Sparse, v: &[Complex64]) -> Vec<Complex64> {
    let steps = g.inf_norm().ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        for n in 1..200 {
            term = g.mul_vec(&term).into_iter().map(|z| z * (h / n as f64)).collect();
            let size = term.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
            if size < 1e-18 {
                break;
            }
        }
    }
    out
}

/// `D(α) S(r e^{iφ}) ρ_th(n̄) S† D†`, built in a padded space and truncated to
/// `fock_dim` levels (renormalized).
pub fn single_mode_gaussian(fock_dim: usize, nbar: f64, r: f64, phi: f64, alpha: Complex64) -> DenseOperator {
    let pad = fock_dim + 60;
    let a = annihilation(pad);
    let ad = a.adjoint();
    let a2 = a.mul(&a);
    let ad2 = ad.mul(&ad);
    let xi = Complex64::from_polar(r, phi);
    // S(ξ) = exp(½(ξ* a² − ξ a†²)), D(α) = exp(α a† − α* a)
    let gs = a2.scale(xi.conj() * 0.5).add(&ad2.scale(-xi * 0.5));
    let gd = ad.scale(alpha).add(&a.scale(-alpha.conj()));

    let mut rho = DenseOperator::zeros(fock_dim);
    let ratio = if nbar > 0.0 { nbar / (nbar + 1.0) } else { 0.0 };
    let mut p = 1.0 / (nbar + 1.0);
    for n in 0..pad {
        if p < 1e-20 {
            break;
        }
        let mut ket = vec![c64(0.0, 0.0); pad];
        ket[n] = c64(1.0, 0.0);
        let ket = exp_apply(&gd, &exp_apply(&gs, &ket));
        for i in 0..fock_dim {
            for j in 0..fock_dim {
                rho.data[i * fock_dim + j] += ket[i] * ket[j].conj() * p;
            }
        }
        p *= ratio;
    }
    let tr = rho.trace().re;
    rho.scale(c64(1.0 / tr, 0.0));
    rho.hermitize();
    rho
}

pub fn thermal_state(fock_dim: usize, nbar: f64) -> DenseOperator {
    single_mode_gaussian(fock_dim, nbar, 0.0, 0.0, c64(0.0, 0.0))
}

/// `Σ_n tanh(r)^n / cosh(r) |n, n⟩`, truncated and renormalized.
pub fn two_mode_squeezed_vacuum(fock_dim: usize, r: f64) -> DenseOperator {
    let mut psi = vec![c64(0.0, 0.0); fock_dim * fock_dim];
    let t = r.tanh();
    for n in 0..fock_dim {
        psi[n * fock_dim + n] = c64(t.powi(n as i32) / r.cosh(), 0.0);
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    DenseOperator::from_ket(&psi)
}
