//! Two-mode entanglement measures from covariance data.

use crate::bosonic::{check_physicality, GaussianState};
use crate::error::{GlmeError, Result};
use crate::fermionic::{check_physicality_f, purity_f};
use crate::linalg::{c64, eigenvalues, max_abs, CMat, RMat, RVec};

/// Tolerance applied to the discriminant and spectra checks below.
const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DuanResult {
    pub quantity: f64,
    pub bound: f64,
    pub entangled: bool,
}

impl DuanResult {
    fn new(quantity: f64, alpha: f64, beta: f64) -> Self {
        let bound = alpha * alpha + beta * beta;
        Self {
            quantity,
            bound,
            entangled: quantity < bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativityResult {
    pub value: f64,
    /// `[η]` for bosons, the `λ×` magnitudes for fermions.
    pub auxiliary_spectrum: Vec<f64>,
}

fn require_two_modes(m: &RMat, what: &str) -> Result<()> {
    if m.shape() != (4, 4) {
        return Err(GlmeError::structural(
            what,
            format!("two-mode measure needs a 4x4 matrix, got {:?}", m.shape()),
        ));
    }
    Ok(())
}

/// `Var(αq₁ + βq₂) + Var(αp₁ − βp₂)` with `Cov(x_j, x_k) = V_jk / 2`.
pub fn duan_bosonic(state: &GaussianState, alpha: f64, beta: f64) -> Result<DuanResult> {
    require_two_modes(&state.v, "V")?;
    let u = RVec::from_vec(vec![alpha, 0.0, beta, 0.0]);
    let v = RVec::from_vec(vec![0.0, alpha, 0.0, -beta]);
    let var = |c: &RVec| 0.5 * c.dot(&(&state.v * c));
    Ok(DuanResult::new(var(&u) + var(&v), alpha, beta))
}

fn det2(m: &RMat, r: usize, c: usize) -> f64 {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

/// Smallest partially transposed symplectic eigenvalue `η` of a two-mode `V`.
pub fn bosonic_eta(v: &RMat) -> Result<f64> {
    require_two_modes(v, "V")?;
    let sigma = det2(v, 0, 0) + det2(v, 2, 2) - 2.0 * det2(v, 0, 2);
    let det = v.determinant();
    let disc = sigma * sigma - 4.0 * det;
    let scale = (sigma * sigma).abs().max(1.0);
    if disc < -TOL * scale {
        return Err(GlmeError::numerical(
            "log_negativity_bosonic",
            format!("Σ² − 4 det V = {disc:e} is negative; invalid covariance"),
        ));
    }
    let inner = sigma - disc.max(0.0).sqrt();
    Ok((inner.max(0.0) / 2.0).sqrt())
}

/// `E_b = max{0, −ln η}`; with `doubled_eta` the variant `max{0, −ln 2η}`.
pub fn log_negativity_bosonic(v: &RMat, doubled_eta: bool) -> Result<NegativityResult> {
    let eta = bosonic_eta(v)?;
    let arg = if doubled_eta { 2.0 * eta } else { eta };
    Ok(NegativityResult {
        value: (-arg.ln()).max(0.0),
        auxiliary_spectrum: vec![eta],
    })
}

/// Magnitudes of the `±iλ×` pairs of `((1 − σ²)/2)⁻¹ · (σ₁ ⊕ −σ₂)`, descending.
pub fn sigma_cross(sigma: &RMat) -> Result<Vec<f64>> {
    require_two_modes(sigma, "sigma")?;
    let (physical, max) = check_physicality_f(sigma, 1e-8)?;
    if !physical {
        return Err(GlmeError::Unphysical {
            detail: format!("max |λ| = {max} exceeds 1"),
        });
    }
    let mut b = RMat::zeros(4, 4);
    b.view_mut((0, 0), (2, 2)).copy_from(&sigma.view((0, 0), (2, 2)));
    b.view_mut((2, 2), (2, 2)).copy_from(&(-sigma.view((2, 2), (2, 2))));
    // 1 − σ² has eigenvalues 1 + λ² ≥ 1, so the solve is always well posed
    let denom = (RMat::identity(4, 4) - sigma * sigma) * 0.5;
    let cross = denom
        .lu()
        .solve(&b)
        .ok_or_else(|| GlmeError::numerical("sigma_cross", "(1 − σ²)/2 is singular"))?;
    let mut mags: Vec<f64> = eigenvalues(&cross).into_iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    Ok(mags.into_iter().step_by(2).collect())
}

/// `E_f = ln Tr ρ×^{1/2} + ½ ln Tr ρ²`, clamped at zero.
pub fn log_negativity_fermionic(sigma: &RMat) -> Result<NegativityResult> {
    let lambdas = sigma_cross(sigma)?;
    if let Some(&max) = lambdas.first() {
        if max > 1.0 + 1e-8 {
            return Err(GlmeError::numerical(
                "log_negativity_fermionic",
                format!("|λ×| = {max} exceeds 1"),
            ));
        }
    }
    let tr_half: f64 = lambdas
        .iter()
        .map(|&l| {
            let l = l.min(1.0);
            (0.5 * (1.0 + l)).sqrt() + (0.5 * (1.0 - l)).sqrt()
        })
        .product();
    let tr_sq = purity_f(sigma)?;
    let value = tr_half.ln() + 0.5 * tr_sq.ln();
    Ok(NegativityResult {
        value: value.max(0.0),
        auxiliary_spectrum: lambdas,
    })
}

/// `Var(αw₁ + βw₃) + Var(αw₂ − βw₄)` from `⟨w_j w_k⟩ = δ_jk/2 − (i/2)σ_jk`.
pub fn duan_fermionic(sigma: &RMat, alpha: f64, beta: f64) -> Result<DuanResult> {
    require_two_modes(sigma, "sigma")?;
    let moments = CMat::from_fn(4, 4, |j, k| {
        c64(if j == k { 0.5 } else { 0.0 }, -0.5 * sigma[(j, k)])
    });
    let var = |c: [f64; 4]| {
        let mut acc = c64(0.0, 0.0);
        for j in 0..4 {
            for k in 0..4 {
                acc += moments[(j, k)] * (c[j] * c[k]);
            }
        }
        acc.re
    };
    let quantity = var([alpha, 0.0, beta, 0.0]) + var([0.0, alpha, 0.0, -beta]);
    Ok(DuanResult::new(quantity, alpha, beta))
}

/// Guard used by callers that want the bosonic negativity only for physical input.
pub fn require_physical_bosonic(v: &RMat) -> Result<()> {
    let (ok, min) = check_physicality(v, 1e-8 * max_abs(v).max(1.0))?;
    if ok {
        Ok(())
    } else {
        Err(GlmeError::Unphysical {
            detail: format!("min eigenvalue of V + iΩ is {min:e}"),
        })
    }
}
