//! Bosonic Gaussian dynamics: drift and diffusion matrices, mean and
//! covariance propagation, steady states and state diagnostics.
//!
//! Quadratures are ordered `x = (q₁, p₁, …, q_N, p_N)` and the covariance is
//! `V_jk = ⟨{Δx_j, Δx_k}⟩`, so the vacuum has `V = I`.

use std::f64::consts::PI;

use crate::error::{GlmeError, Result};
use crate::linalg::{
    c64, eigenvalues, hermitian_eigenvalues, im_part, lyapunov_residual, max_abs, re_part,
    solve_lyapunov, spectral_abscissa, symmetrize, to_complex, CMat, RMat, RVec,
};
use crate::model::{
    require_dynamics_ready, symplectic_form, to_standard_form, Flavor, GeneralizedLindbladModel,
    DEFAULT_TOL,
};
use crate::propagate::{self, Method, Symmetry, HURWITZ_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: RVec,
    pub v: RMat,
}

impl GaussianState {
    pub fn new(mean: RVec, v: RMat) -> Result<Self> {
        let d = v.nrows();
        if v.ncols() != d || d == 0 || !d.is_multiple_of(2) || mean.len() != d {
            return Err(GlmeError::structural(
                "GaussianState",
                format!("mean length {} and V {:?} must both be 2N", mean.len(), v.shape()),
            ));
        }
        let defect = max_abs(&(&v - v.transpose()));
        if defect > DEFAULT_TOL * max_abs(&v).max(1.0) {
            return Err(GlmeError::structural(
                "GaussianState",
                format!("V not symmetric (defect {defect:e})"),
            ));
        }
        Ok(Self { mean, v })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::thermal(n_modes, 0.0)
    }

    /// `V = (2n̄ + 1) I`.
    pub fn thermal(n_modes: usize, nbar: f64) -> Self {
        let d = 2 * n_modes;
        Self {
            mean: RVec::zeros(d),
            v: RMat::identity(d, d) * (2.0 * nbar + 1.0),
        }
    }

    /// Single-mode vacuum squeezed along `q`: `V = diag(e^{-2r}, e^{2r})`.
    pub fn squeezed_vacuum(r: f64) -> Self {
        Self {
            mean: RVec::zeros(2),
            v: RMat::from_diagonal(&RVec::from_vec(vec![(-2.0 * r).exp(), (2.0 * r).exp()])),
        }
    }

    /// Two-mode squeezed vacuum, correlated in `q₁ − q₂` and `p₁ + p₂`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        let v = RMat::from_row_slice(
            4,
            4,
            &[
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ],
        );
        Self {
            mean: RVec::zeros(4),
            v,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.v.nrows() / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BosonicDriftDiffusion {
    pub a: RMat,
    pub d: RMat,
}

impl BosonicDriftDiffusion {
    pub fn new(a: RMat, d: RMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || d.shape() != (n, n) || n == 0 || !n.is_multiple_of(2) {
            return Err(GlmeError::structural(
                "BosonicDriftDiffusion",
                format!("A {:?} and D {:?} must be 2N x 2N", a.shape(), d.shape()),
            ));
        }
        let defect = max_abs(&(&d - d.transpose()));
        if defect > 1e-12 * max_abs(&d).max(1.0) {
            return Err(GlmeError::structural(
                "BosonicDriftDiffusion",
                format!("D not symmetric (defect {defect:e})"),
            ));
        }
        Ok(Self { a, d: symmetrize(&d) })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GaussianState>,
}

fn drift_diffusion_from(h: &RMat, m: &CMat) -> Result<BosonicDriftDiffusion> {
    let omega = symplectic_form(h.nrows() / 2)?;
    let a = &omega * (h + im_part(m));
    let d = &omega * re_part(m) * omega.transpose() * 2.0;
    BosonicDriftDiffusion::new(a, symmetrize(&d))
}

/// `A = Ω[H + Im(F†ΓᵀF)]`, `D = 2Ω Re(F†ΓᵀF) Ωᵀ`.
pub fn build_drift_diffusion(model: &GeneralizedLindbladModel) -> Result<BosonicDriftDiffusion> {
    require_dynamics_ready(model, Flavor::Bosonic)?;
    let f = model.f();
    let m = f.adjoint() * model.gamma().transpose() * f;
    drift_diffusion_from(&model.hamiltonian, &m)
}

/// Same matrices computed through the diagonal form, `C = √γ L`:
/// `A = Ω[H + Im(C†C)]`, `D = 2Ω Re(C†C) Ωᵀ`.
pub fn build_drift_diffusion_standard(model: &GeneralizedLindbladModel) -> Result<BosonicDriftDiffusion> {
    require_dynamics_ready(model, Flavor::Bosonic)?;
    let sf = to_standard_form(&model.decoherence, &model.couplings, DEFAULT_TOL)?;
    let c = sf.weighted_rows();
    drift_diffusion_from(&model.hamiltonian, &(c.adjoint() * &c))
}

fn check_vector(dd: &BosonicDriftDiffusion, v: &RVec) -> Result<()> {
    if v.len() != dd.dim() {
        return Err(GlmeError::structural(
            "mean",
            format!("expected length {}, got {}", dd.dim(), v.len()),
        ));
    }
    Ok(())
}

/// `⟨x⟩(t) = e^{At} ⟨x⟩(0)`.
pub fn evolve_mean(dd: &BosonicDriftDiffusion, mean0: &RVec, t: f64) -> Result<RVec> {
    check_vector(dd, mean0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(GlmeError::structural("t", format!("time must be finite and >= 0, got {t}")));
    }
    Ok(crate::linalg::expm(&(&dd.a * t)) * mean0)
}

/// Covariance trajectory with zero mean.
pub fn propagate_covariance(
    dd: &BosonicDriftDiffusion,
    v0: &RMat,
    times: &[f64],
    method: Method,
) -> Result<Trajectory> {
    let state = GaussianState::new(RVec::zeros(v0.nrows()), v0.clone())?;
    propagate_state(dd, &state, times, method)
}

/// Mean and covariance trajectory; `state0` is taken at `times[0]`.
pub fn propagate_state(
    dd: &BosonicDriftDiffusion,
    state0: &GaussianState,
    times: &[f64],
    method: Method,
) -> Result<Trajectory> {
    check_vector(dd, &state0.mean)?;
    let vs = propagate::propagate_lyapunov(&dd.a, &dd.d, &state0.v, times, method, Symmetry::Symmetric)?;
    let means = propagate::propagate_linear(&dd.a, &state0.mean, times, method);
    Ok(Trajectory {
        times: times.to_vec(),
        states: means
            .into_iter()
            .zip(vs)
            .map(|(mean, v)| GaussianState { mean, v })
            .collect(),
    })
}

/// `(abscissa < -tol, abscissa)`.
pub fn is_hurwitz(dd: &BosonicDriftDiffusion, tol: f64) -> (bool, f64) {
    let abscissa = spectral_abscissa(&dd.a);
    (abscissa < -tol, abscissa)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateReport {
    pub state: GaussianState,
    pub residual: f64,
    pub spectral_abscissa: f64,
}

/// Solution of `A V + V Aᵀ + D = 0` with zero mean.
pub fn steady_state(dd: &BosonicDriftDiffusion) -> Result<GaussianState> {
    steady_state_report(dd).map(|r| r.state)
}

pub fn steady_state_report(dd: &BosonicDriftDiffusion) -> Result<SteadyStateReport> {
    let (stable, abscissa) = is_hurwitz(dd, HURWITZ_TOL);
    if !stable {
        return Err(GlmeError::Stability {
            abscissa,
            tol: HURWITZ_TOL,
        });
    }
    let v = symmetrize(&solve_lyapunov(&dd.a, &dd.d)?);
    let residual = lyapunov_residual(&dd.a, &v, &dd.d);
    Ok(SteadyStateReport {
        state: GaussianState {
            mean: RVec::zeros(dd.dim()),
            v,
        },
        residual,
        spectral_abscissa: abscissa,
    })
}

fn check_square_even(v: &RMat, what: &str) -> Result<usize> {
    let d = v.nrows();
    if v.ncols() != d || d == 0 || !d.is_multiple_of(2) {
        return Err(GlmeError::structural(what, format!("expected 2N x 2N, got {:?}", v.shape())));
    }
    Ok(d / 2)
}

/// Smallest eigenvalue of `V + iΩ`; physical iff it is `≥ -tol`.
pub fn check_physicality(v: &RMat, tol: f64) -> Result<(bool, f64)> {
    let n = check_square_even(v, "V")?;
    let omega = symplectic_form(n)?;
    let m = to_complex(&symmetrize(v)) + omega.map(|x| c64(0.0, x));
    let min = hermitian_eigenvalues(&m)[0];
    Ok((min >= -tol, min))
}

/// `μ = 1/√det V`.
pub fn purity(v: &RMat) -> Result<f64> {
    let n = check_square_even(v, "V")?;
    let det = v.determinant();
    if !(det >= 1.0 - DEFAULT_TOL * (2 * n) as f64) {
        return Err(GlmeError::Unphysical {
            detail: format!("det V = {det} is below 1"),
        });
    }
    Ok(1.0 / det.sqrt())
}

/// Symplectic eigenvalues `ν_j ≥ 0`, ascending, from the spectrum `±ν_j` of `iΩV`.
pub fn symplectic_eigenvalues(v: &RMat) -> Result<Vec<f64>> {
    let n = check_square_even(v, "V")?;
    let omega = symplectic_form(n)?;
    // ΩV has spectrum ±iν_j
    let mut nu: Vec<f64> = eigenvalues(&(&omega * v))
        .into_iter()
        .map(|z| z.im.abs())
        .collect();
    nu.sort_by(f64::total_cmp);
    Ok(nu.into_iter().step_by(2).collect())
}

/// Pure-state diagnostic `max_j |ν_j² − 1|`; zero for pure states.
pub fn purity_diagnostic(v: &RMat) -> Result<f64> {
    Ok(symplectic_eigenvalues(v)?
        .into_iter()
        .map(|nu| (nu * nu - 1.0).abs())
        .fold(0.0, f64::max))
}

/// Normalized Wigner density `exp(−δᵀV⁻¹δ) / (π^N √det V)`.
pub fn wigner(state: &GaussianState, point: &RVec) -> Result<f64> {
    let n = check_square_even(&state.v, "V")?;
    if point.len() != 2 * n {
        return Err(GlmeError::structural(
            "point",
            format!("expected length {}, got {}", 2 * n, point.len()),
        ));
    }
    let chol = nalgebra::Cholesky::new(symmetrize(&state.v))
        .ok_or_else(|| GlmeError::numerical("wigner", "V is singular or not positive definite"))?;
    let delta = point - &state.mean;
    let quad = delta.dot(&chol.solve(&delta));
    let det = chol.determinant();
    Ok((-quad).exp() / (PI.powi(n as i32) * det.sqrt()))
}
