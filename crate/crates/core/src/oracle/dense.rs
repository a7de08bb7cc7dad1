//! Dense density matrices and the generalized Lindblad Liouvillian acting on
//! them, with time integration.

use num_complex::Complex64;

use super::sparse::Sparse;
use crate::error::{GlmeError, Result};
use crate::linalg::{c64, hermitian_eigenvalues, CMat};
use crate::propagate::check_times;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Row-major complex `dim × dim` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn from_cmat(m: &CMat) -> Self {
        let dim = m.nrows();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(m[(r, c)]);
            }
        }
        Self { dim, data }
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_row_slice(self.dim, self.dim, &self.data)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_ket(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        Self { dim, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut d: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                d = d.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        d
    }

    pub fn hermitize(&mut self) {
        let n = self.dim;
        for r in 0..n {
            for c in r..n {
                let avg = 0.5 * (self.data[r * n + c] + self.data[c * n + r].conj());
                self.data[r * n + c] = avg;
                self.data[c * n + r] = avg.conj();
            }
        }
    }

    pub fn scale(&mut self, s: Complex64) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: Complex64, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `Tr(self · other)`.
    pub fn trace_mul(&self, other: &Self) -> Complex64 {
        let n = self.dim;
        let mut acc = ZERO;
        for r in 0..n {
            for k in 0..n {
                acc += self.data[r * n + k] * other.data[k * n + r];
            }
        }
        acc
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.trace_mul(self).re
    }

    /// Hermitian, unit trace and PSD within `tol`.
    pub fn check_density(&self, tol: f64) -> Result<()> {
        let herm = self.hermitian_defect();
        if herm > tol {
            return Err(GlmeError::Domain(format!("density matrix not Hermitian (defect {herm:e})")));
        }
        let tr = self.trace();
        if (tr - c64(1.0, 0.0)).norm() > tol {
            return Err(GlmeError::Domain(format!("density matrix trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&self.to_cmat())[0];
        if min < -tol {
            return Err(GlmeError::Domain(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `A ⊗ B`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Self::zeros(dim);
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.get(r1, c1);
                if a == ZERO {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        out.data[(r1 * m + r2) * dim + c1 * m + c2] = a * other.get(r2, c2);
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenseIntegrator {
    /// Taylor series of `e^{hL}` with `h‖L‖ ≤ 6`, summed to machine precision.
    Taylor,
    /// Classical rk4 with `h ≤ 1/(50‖L‖)`.
    Rk4,
}

/// `Lρ = −i[H, ρ] + Σ_jk Γ_jk (F_j ρ F_k† − ½{F_k†F_j, ρ})`.
#[derive(Debug, Clone)]
pub struct DenseLiouvillian {
    pub dim: usize,
    pub hamiltonian: Sparse,
    pub operators: Vec<Sparse>,
    pub gamma: CMat,
    k: Sparse,
    k_adj: Sparse,
    // (F_j, G_j†) with G_j = Σ_k conj(Γ_jk) F_k
    jumps: Vec<(Sparse, Sparse)>,
}

impl DenseLiouvillian {
    pub fn new(hamiltonian: Sparse, operators: Vec<Sparse>, gamma: CMat) -> Result<Self> {
        let dim = hamiltonian.dim;
        let m = operators.len();
        if gamma.shape() != (m, m) {
            return Err(GlmeError::structural(
                "dense Liouvillian",
                format!("Gamma {:?} for {m} operators", gamma.shape()),
            ));
        }
        if operators.iter().any(|f| f.dim != dim) {
            return Err(GlmeError::structural("dense Liouvillian", "operator dimensions differ"));
        }
        let adjoints: Vec<Sparse> = operators.iter().map(Sparse::adjoint).collect();
        let mut k = hamiltonian.scale(c64(0.0, -1.0));
        let mut decay_terms = Vec::new();
        for j in 0..m {
            for kk in 0..m {
                if gamma[(j, kk)] != c64(0.0, 0.0) {
                    decay_terms.push((gamma[(j, kk)] * -0.5, adjoints[kk].mul(&operators[j])));
                }
            }
        }
        k = k.add(&Sparse::linear_combination(dim, decay_terms.iter().map(|(c, s)| (*c, s))));
        let jumps = (0..m)
            .map(|j| {
                let g = Sparse::linear_combination(
                    dim,
                    (0..m).map(|kk| (gamma[(j, kk)].conj(), &operators[kk])),
                );
                (operators[j].clone(), g.adjoint())
            })
            .filter(|(_, g)| g.nnz() > 0)
            .collect();
        let k_adj = k.adjoint();
        Ok(Self {
            dim,
            hamiltonian,
            operators,
            gamma,
            k,
            k_adj,
            jumps,
        })
    }

    /// `out = L x`, using `scratch` as workspace.
    pub fn apply_into(&self, x: &DenseOperator, out: &mut DenseOperator, scratch: &mut DenseOperator) {
        let one = c64(1.0, 0.0);
        out.data.iter_mut().for_each(|z| *z = ZERO);
        self.k.left_mul_acc(&x.data, &mut out.data, one);
        self.k_adj.right_mul_acc(&x.data, &mut out.data, one);
        for (f, g_adj) in &self.jumps {
            scratch.data.iter_mut().for_each(|z| *z = ZERO);
            f.left_mul_acc(&x.data, &mut scratch.data, one);
            g_adj.right_mul_acc(&scratch.data, &mut out.data, one);
        }
    }

    pub fn apply(&self, x: &DenseOperator) -> DenseOperator {
        let mut out = DenseOperator::zeros(self.dim);
        let mut scratch = DenseOperator::zeros(self.dim);
        self.apply_into(x, &mut out, &mut scratch);
        out
    }

    /// Heisenberg-picture generator
    /// `L†O = i[H, O] + Σ_jk Γ_jk (F_k† O F_j − ½{F_k†F_j, O})`, assembled
    /// independently of [`Self::apply`].
    pub fn apply_adjoint(&self, o: &DenseOperator) -> DenseOperator {
        let n = self.dim;
        let mut out = DenseOperator::zeros(n);
        let i = c64(0.0, 1.0);
        self.hamiltonian.left_mul_acc(&o.data, &mut out.data, -i);
        self.hamiltonian.right_mul_acc(&o.data, &mut out.data, i);
        // i[H, O] = iHO − iOH
        out.scale(c64(-1.0, 0.0));
        let m = self.operators.len();
        let mut tmp = DenseOperator::zeros(n);
        for j in 0..m {
            for k in 0..m {
                let g = self.gamma[(j, k)];
                if g == c64(0.0, 0.0) {
                    continue;
                }
                let fk_adj = self.operators[k].adjoint();
                tmp.data.iter_mut().for_each(|z| *z = ZERO);
                fk_adj.left_mul_acc(&o.data, &mut tmp.data, c64(1.0, 0.0));
                self.operators[j].right_mul_acc(&tmp.data, &mut out.data, g);
                let prod = fk_adj.mul(&self.operators[j]);
                prod.left_mul_acc(&o.data, &mut out.data, g * -0.5);
                prod.right_mul_acc(&o.data, &mut out.data, g * -0.5);
            }
        }
        out
    }

    /// Estimate of `‖L‖` (Frobenius-induced) by power iteration from a fixed
    /// pseudo-random Hermitian start.
    pub fn norm_estimate(&self) -> f64 {
        let n = self.dim;
        let mut x = DenseOperator::zeros(n);
        let mut s: u64 = 0x9e37_79b9_7f4a_7c15;
        for r in 0..n {
            for c in r..n {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                let re = (s % 2001) as f64 / 1000.0 - 1.0;
                let im = if r == c { 0.0 } else { ((s >> 20) % 2001) as f64 / 1000.0 - 1.0 };
                x.data[r * n + c] = c64(re, im);
                x.data[c * n + r] = c64(re, -im);
            }
        }
        let frob = |m: &DenseOperator| m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut est: f64 = 0.0;
        let mut out = DenseOperator::zeros(n);
        let mut scratch = DenseOperator::zeros(n);
        for _ in 0..30 {
            let nx = frob(&x);
            if nx == 0.0 {
                break;
            }
            self.apply_into(&x, &mut out, &mut scratch);
            let ny = frob(&out);
            est = est.max(ny / nx);
            std::mem::swap(&mut x, &mut out);
            x.scale(c64(1.0 / ny.max(f64::MIN_POSITIVE), 0.0));
        }
        est
    }

    /// `ρ(t)` at each of `times`, with `rho0` at `times[0]`.
    pub fn evolve(
        &self,
        rho0: &DenseOperator,
        times: &[f64],
        integrator: DenseIntegrator,
    ) -> Result<Vec<DenseOperator>> {
        check_times(times)?;
        if rho0.dim != self.dim {
            return Err(GlmeError::structural(
                "dense evolve",
                format!("state dim {} vs Liouvillian dim {}", rho0.dim, self.dim),
            ));
        }
        let norm = self.norm_estimate().max(1e-12);
        let mut out = Vec::with_capacity(times.len());
        let mut rho = rho0.clone();
        out.push(rho.clone());
        let mut work = Workspace::new(self.dim);
        for w in times.windows(2) {
            let dt = w[1] - w[0];
            match integrator {
                DenseIntegrator::Taylor => {
                    let steps = ((dt * norm / TAYLOR_THETA).ceil() as usize).max(1);
                    let h = dt / steps as f64;
                    for _ in 0..steps {
                        self.taylor_step(&mut rho, h, &mut work)?;
                    }
                }
                DenseIntegrator::Rk4 => {
                    let steps = ((dt * norm * 50.0).ceil() as usize).max(1);
                    let h = dt / steps as f64;
                    for _ in 0..steps {
                        self.rk4_step(&mut rho, h, &mut work);
                    }
                }
            }
            rho.hermitize();
            out.push(rho.clone());
        }
        Ok(out)
    }

    fn taylor_step(&self, rho: &mut DenseOperator, h: f64, w: &mut Workspace) -> Result<()> {
        w.term.data.copy_from_slice(&rho.data);
        let scale = rho.max_abs().max(f64::MIN_POSITIVE);
        let mut small = 0;
        for n in 1..=TAYLOR_MAX_TERMS {
            self.apply_into(&w.term, &mut w.next, &mut w.scratch);
            w.next.scale(c64(h / n as f64, 0.0));
            std::mem::swap(&mut w.term, &mut w.next);
            rho.axpy(c64(1.0, 0.0), &w.term);
            if w.term.max_abs() <= 1e-17 * scale {
                small += 1;
                if small == 2 {
                    return Ok(());
                }
            } else {
                small = 0;
            }
        }
        Err(GlmeError::numerical(
            "dense Taylor step",
            format!("series did not converge in {TAYLOR_MAX_TERMS} terms"),
        ))
    }

    fn rk4_step(&self, rho: &mut DenseOperator, h: f64, w: &mut Workspace) {
        self.apply_into(rho, &mut w.k1, &mut w.scratch);
        w.term.data.copy_from_slice(&rho.data);
        w.term.axpy(c64(0.5 * h, 0.0), &w.k1);
        self.apply_into(&w.term, &mut w.k2, &mut w.scratch);
        w.term.data.copy_from_slice(&rho.data);
        w.term.axpy(c64(0.5 * h, 0.0), &w.k2);
        self.apply_into(&w.term, &mut w.k3, &mut w.scratch);
        w.term.data.copy_from_slice(&rho.data);
        w.term.axpy(c64(h, 0.0), &w.k3);
        self.apply_into(&w.term, &mut w.next, &mut w.scratch);
        rho.axpy(c64(h / 6.0, 0.0), &w.k1);
        rho.axpy(c64(h / 3.0, 0.0), &w.k2);
        rho.axpy(c64(h / 3.0, 0.0), &w.k3);
        rho.axpy(c64(h / 6.0, 0.0), &w.next);
    }
}

const TAYLOR_THETA: f64 = 6.0;
const TAYLOR_MAX_TERMS: usize = 120;

struct Workspace {
    term: DenseOperator,
    next: DenseOperator,
    scratch: DenseOperator,
    k1: DenseOperator,
    k2: DenseOperator,
    k3: DenseOperator,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Self {
            term: DenseOperator::zeros(dim),
            next: DenseOperator::zeros(dim),
            scratch: DenseOperator::zeros(dim),
            k1: DenseOperator::zeros(dim),
            k2: DenseOperator::zeros(dim),
            k3: DenseOperator::zeros(dim),
        }
    }
}

/// `ln ‖M‖₁` via singular values.
pub fn log_trace_norm(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum::<f64>().ln()
}
