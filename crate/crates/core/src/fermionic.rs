//! Fermionic Gaussian dynamics in the Majorana representation.
//!
//! Majoranas are `w_{2j-1} = (c_j† + c_j)/√2`, `w_{2j} = −i(c_j† − c_j)/√2`
//! with `{w_j, w_k} = δ_jk`, and `σ_jk = i⟨[w_j, w_k]⟩`. The vacuum has
//! `σ = ⊕ [[0, 1], [−1, 0]]`.

use nalgebra::Schur;

use crate::error::{GlmeError, Result};
use crate::linalg::{
    antisymmetrize, im_part, lyapunov_residual, max_abs, re_part, schur_blocks, solve_lyapunov,
    spectral_abscissa, symmetric_eigenvalues, CMat, RMat,
};
use crate::model::{
    require_dynamics_ready, symplectic_form, to_standard_form, Flavor, GeneralizedLindbladModel,
    DEFAULT_TOL,
};
use crate::propagate::{self, Method, Symmetry, HURWITZ_TOL};

/// Tolerance for matching the `±iλ` pairs of an antisymmetric spectrum.
pub const PAIRING_TOL: f64 = 1e-9;

fn check_antisymmetric(what: &str, m: &RMat, tol: f64) -> Result<usize> {
    let d = m.nrows();
    if m.ncols() != d || d == 0 || !d.is_multiple_of(2) {
        return Err(GlmeError::structural(what, format!("expected 2N x 2N, got {:?}", m.shape())));
    }
    let defect = max_abs(&(m + m.transpose()));
    if defect > tol * max_abs(m).max(1.0) {
        return Err(GlmeError::structural(what, format!("not antisymmetric (defect {defect:e})")));
    }
    Ok(d / 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionicGaussianState {
    pub sigma: RMat,
}

impl FermionicGaussianState {
    pub fn new(sigma: RMat) -> Result<Self> {
        check_antisymmetric("sigma", &sigma, DEFAULT_TOL)?;
        Ok(Self {
            sigma: antisymmetrize(&sigma),
        })
    }

    /// All modes empty.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            sigma: symplectic_form(n_modes.max(1)).expect("n_modes >= 1"),
        }
    }

    /// `σ = 0`, the infinite-temperature state.
    pub fn maximally_mixed(n_modes: usize) -> Self {
        Self {
            sigma: RMat::zeros(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.sigma.nrows() / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionicDriftDiffusion {
    pub x: RMat,
    pub y: RMat,
}

impl FermionicDriftDiffusion {
    pub fn new(x: RMat, y: RMat) -> Result<Self> {
        let d = x.nrows();
        if x.ncols() != d || y.shape() != (d, d) {
            return Err(GlmeError::structural(
                "FermionicDriftDiffusion",
                format!("X {:?} and Y {:?} must be 2N x 2N", x.shape(), y.shape()),
            ));
        }
        check_antisymmetric("Y", &y, 1e-12)?;
        Ok(Self {
            x,
            y: antisymmetrize(&y),
        })
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsKernel {
    pub k: RMat,
}

impl GibbsKernel {
    pub fn new(k: RMat) -> Result<Self> {
        check_antisymmetric("K", &k, DEFAULT_TOL)?;
        Ok(Self {
            k: antisymmetrize(&k),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionicTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FermionicGaussianState>,
}

fn drift_diffusion_from(g: &RMat, m: &CMat) -> Result<FermionicDriftDiffusion> {
    let x = g - re_part(m);
    let y = im_part(m) * -2.0;
    FermionicDriftDiffusion::new(x, y)
}

/// `X = G − Re(F†ΓᵀF)`, `Y = −2 Im(F†ΓᵀF)`.
pub fn build_drift_diffusion_f(model: &GeneralizedLindbladModel) -> Result<FermionicDriftDiffusion> {
    require_dynamics_ready(model, Flavor::Fermionic)?;
    let f = model.f();
    let m = f.adjoint() * model.gamma().transpose() * f;
    drift_diffusion_from(&model.hamiltonian, &m)
}

/// `X = G − Re(C†C)`, `Y = −2 Im(C†C)` from the diagonal form.
pub fn build_drift_diffusion_f_standard(model: &GeneralizedLindbladModel) -> Result<FermionicDriftDiffusion> {
    require_dynamics_ready(model, Flavor::Fermionic)?;
    let sf = to_standard_form(&model.decoherence, &model.couplings, DEFAULT_TOL)?;
    let c = sf.weighted_rows();
    drift_diffusion_from(&model.hamiltonian, &(c.adjoint() * &c))
}

/// Solves `σ̇ = Xσ + σXᵀ + Y` on `times`, with `sigma0` at `times[0]`.
pub fn propagate_covariance_f(
    dd: &FermionicDriftDiffusion,
    sigma0: &RMat,
    times: &[f64],
    method: Method,
) -> Result<FermionicTrajectory> {
    check_antisymmetric("sigma0", sigma0, DEFAULT_TOL)?;
    let out = propagate::propagate_lyapunov(&dd.x, &dd.y, sigma0, times, method, Symmetry::Antisymmetric)?;
    Ok(FermionicTrajectory {
        times: times.to_vec(),
        states: out
            .into_iter()
            .map(|sigma| FermionicGaussianState { sigma })
            .collect(),
    })
}

pub fn is_hurwitz_f(dd: &FermionicDriftDiffusion, tol: f64) -> (bool, f64) {
    let abscissa = spectral_abscissa(&dd.x);
    (abscissa < -tol, abscissa)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionicSteadyStateReport {
    pub state: FermionicGaussianState,
    pub residual: f64,
    pub spectral_abscissa: f64,
}

pub fn steady_state_f(dd: &FermionicDriftDiffusion) -> Result<FermionicGaussianState> {
    steady_state_f_report(dd).map(|r| r.state)
}

pub fn steady_state_f_report(dd: &FermionicDriftDiffusion) -> Result<FermionicSteadyStateReport> {
    let (stable, abscissa) = is_hurwitz_f(dd, HURWITZ_TOL);
    if !stable {
        return Err(GlmeError::Stability {
            abscissa,
            tol: HURWITZ_TOL,
        });
    }
    let sigma = antisymmetrize(&solve_lyapunov(&dd.x, &dd.y)?);
    let residual = lyapunov_residual(&dd.x, &sigma, &dd.y);
    Ok(FermionicSteadyStateReport {
        state: FermionicGaussianState { sigma },
        residual,
        spectral_abscissa: abscissa,
    })
}

/// Magnitudes `λ_j ≥ 0` of the `±iλ_j` eigenvalue pairs, descending, together
/// with the pairing defect (largest mismatch inside a pair).
pub fn paired_eigenvalues(sigma: &RMat) -> Result<(Vec<f64>, f64)> {
    check_antisymmetric("sigma", sigma, DEFAULT_TOL)?;
    // σᵀσ = −σ² has each λ² twice
    let mut mags: Vec<f64> = symmetric_eigenvalues(&(sigma.transpose() * sigma))
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut lambdas = Vec::with_capacity(mags.len() / 2);
    let mut defect: f64 = 0.0;
    for pair in mags.chunks(2) {
        defect = defect.max((pair[0] - pair[1]).abs());
        lambdas.push(0.5 * (pair[0] + pair[1]));
    }
    if defect > PAIRING_TOL * mags[0].max(1.0) {
        return Err(GlmeError::numerical(
            "eigenvalue pairing",
            format!("pairs differ by {defect:e}"),
        ));
    }
    Ok((lambdas, defect))
}

/// `(max_j |λ_j| ≤ 1 + tol, max_j |λ_j|)`.
pub fn check_physicality_f(sigma: &RMat, tol: f64) -> Result<(bool, f64)> {
    let (lambdas, _) = paired_eigenvalues(sigma)?;
    let max = lambdas.first().copied().unwrap_or(0.0);
    Ok((max <= 1.0 + tol, max))
}

/// `Tr ρ² = Π_j (1 + λ_j²)/2`.
pub fn purity_f(sigma: &RMat) -> Result<f64> {
    let (lambdas, _) = paired_eigenvalues(sigma)?;
    Ok(lambdas.iter().map(|l| 0.5 * (1.0 + l * l)).product())
}

/// Applies an odd scalar function to the `2×2` blocks `[[0, b], [−b, 0]]` of
/// the real Schur form of an antisymmetric matrix.
fn map_antisymmetric(m: &RMat, mut f: impl FnMut(f64) -> Result<f64>) -> Result<RMat> {
    let n = m.nrows();
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| GlmeError::numerical("real Schur", "iteration did not converge"))?;
    let (q, t) = schur.unpack();
    let mut ft = RMat::zeros(n, n);
    for (i, size) in schur_blocks(&t) {
        if size == 2 {
            let b = 0.5 * (t[(i, i + 1)] - t[(i + 1, i)]);
            let fb = f(b)?;
            ft[(i, i + 1)] = fb;
            ft[(i + 1, i)] = -fb;
        }
    }
    Ok(antisymmetrize(&(&q * ft * q.transpose())))
}

/// Kernel `K` with `ρ ∝ exp(−(i/2) wᵀKw)` for a strictly mixed state.
pub fn covariance_to_gibbs(sigma: &RMat) -> Result<GibbsKernel> {
    let (lambdas, _) = paired_eigenvalues(sigma)?;
    if let Some(&max) = lambdas.first() {
        if max >= 1.0 - DEFAULT_TOL {
            return Err(GlmeError::Boundary {
                lambda: max,
                tol: DEFAULT_TOL,
            });
        }
    }
    let k = map_antisymmetric(&antisymmetrize(sigma), |s| Ok(2.0 * s.atanh()))?;
    Ok(GibbsKernel { k })
}

/// Block-wise `σ = tanh(K/2)`, so `K₁₂ = κ` gives `σ₁₂ = tanh(κ/2)`.
pub fn gibbs_to_covariance(kernel: &GibbsKernel) -> Result<FermionicGaussianState> {
    check_antisymmetric("K", &kernel.k, DEFAULT_TOL)?;
    let sigma = map_antisymmetric(&antisymmetrize(&kernel.k), |b| Ok((0.5 * b).tanh()))?;
    Ok(FermionicGaussianState { sigma })
}
