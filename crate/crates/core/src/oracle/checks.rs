//! Cross-checks between the dense reference and covariance-level results.

use num_complex::Complex64;

use super::bosonic::{top_population, DenseBosonicEngine, TRUNCATION_THRESHOLD};
use super::dense::{DenseLiouvillian, DenseOperator};
use super::fermionic::DenseFermionicEngine;
use crate::bosonic::build_drift_diffusion;
use crate::error::{GlmeError, Result};
use crate::fermionic::build_drift_diffusion_f;
use crate::linalg::{c64, hermitian_eigenvalues, max_abs_diff, CMat};
use crate::model::GeneralizedLindbladModel;

/// `D_s[A, B]ρ = AρB† − ½{B†A, ρ}`.
pub fn generalized_dissipator(a: &CMat, b: &CMat, rho: &CMat) -> CMat {
    let bd = b.adjoint();
    let bda = &bd * a;
    a * rho * &bd - (&bda * rho + rho * &bda) * c64(0.5, 0.0)
}

/// Deviations of the two candidate expansions of `D[αL_j + βL_k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorCheck {
    /// Cross terms `αβ* D_s[L_j, L_k] + α*β D_s[L_k, L_j]`.
    pub consistent: f64,
    /// Cross terms with a dagger on the second operator, `D_s[L_j, L_k†]`.
    pub daggered: f64,
}

/// Evaluates both sides on every matrix unit `|a⟩⟨b|`.
pub fn dissipator_linearity_check(
    lj: &CMat,
    lk: &CMat,
    alpha: Complex64,
    beta: Complex64,
) -> Result<DissipatorCheck> {
    let dim = lj.nrows();
    if lj.shape() != (dim, dim) || lk.shape() != (dim, dim) {
        return Err(GlmeError::structural("dissipator check", "operators must be square of equal size"));
    }
    let l = lj * alpha + lk * beta;
    let (ljd, lkd) = (lj.adjoint(), lk.adjoint());
    let mut out = DissipatorCheck {
        consistent: 0.0,
        daggered: 0.0,
    };
    let dev = |a: &CMat, b: &CMat| {
        a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
    };
    for a in 0..dim {
        for b in 0..dim {
            let mut rho = CMat::zeros(dim, dim);
            rho[(a, b)] = c64(1.0, 0.0);
            let lhs = generalized_dissipator(&l, &l, &rho);
            let diag = generalized_dissipator(lj, lj, &rho) * c64(alpha.norm_sqr(), 0.0)
                + generalized_dissipator(lk, lk, &rho) * c64(beta.norm_sqr(), 0.0);
            let consistent = &diag
                + generalized_dissipator(lj, lk, &rho) * (alpha * beta.conj())
                + generalized_dissipator(lk, lj, &rho) * (alpha.conj() * beta);
            let daggered = &diag
                + generalized_dissipator(lj, &lkd, &rho) * (alpha * beta.conj())
                + generalized_dissipator(lk, &ljd, &rho) * (alpha.conj() * beta);
            out.consistent = out.consistent.max(dev(&lhs, &consistent));
            out.daggered = out.daggered.max(dev(&lhs, &daggered));
        }
    }
    Ok(out)
}

/// `|Tr[O·Lρ] − Tr[(L†O)·ρ]|`.
pub fn adjoint_consistency_check(
    liouvillian: &DenseLiouvillian,
    observable: &DenseOperator,
    state: &DenseOperator,
) -> Result<f64> {
    if observable.dim != liouvillian.dim || state.dim != liouvillian.dim {
        return Err(GlmeError::structural("adjoint check", "operator dimensions differ"));
    }
    let lhs = observable.trace_mul(&liouvillian.apply(state));
    let rhs = liouvillian.apply_adjoint(observable).trace_mul(state);
    Ok((lhs - rhs).norm())
}

/// Largest deviation of the dense `d⟨x⟩/dt`, `dV/dt` from `A⟨x⟩` and
/// `AV + VAᵀ + D` at the given state.
pub fn bosonic_moment_closure(
    model: &GeneralizedLindbladModel,
    engine: &DenseBosonicEngine,
    rho: &DenseOperator,
) -> Result<f64> {
    let dd = build_drift_diffusion(model)?;
    let (mean, v) = engine.moments(rho);
    let (dmean, dv) = engine.moment_derivatives(rho);
    let expected_v = &dd.a * &v + &v * dd.a.transpose() + &dd.d;
    let expected_mean = &dd.a * &mean;
    let mean_dev = (dmean - expected_mean).amax();
    Ok(mean_dev.max(max_abs_diff(&dv, &expected_v)))
}

/// Same for `σ̇ = Xσ + σXᵀ + Y`.
pub fn fermionic_moment_closure(
    model: &GeneralizedLindbladModel,
    engine: &DenseFermionicEngine,
    rho: &DenseOperator,
) -> Result<f64> {
    let dd = build_drift_diffusion_f(model)?;
    let s = engine.sigma(rho);
    let expected = &dd.x * &s + &s * dd.x.transpose() + &dd.y;
    Ok(max_abs_diff(&engine.sigma_derivative(rho), &expected))
}

fn require_dim(rho: &DenseOperator, dim: usize, what: &str) -> Result<()> {
    if rho.dim != dim {
        return Err(GlmeError::structural(what, format!("expected dimension {dim}, got {}", rho.dim)));
    }
    Ok(())
}

/// `ln ‖ρ^{T₂}‖₁` with the partial transpose on the second mode.
pub fn dense_negativity_bosonic(rho: &DenseOperator, fock_dim: usize) -> Result<f64> {
    let d = fock_dim;
    require_dim(rho, d * d, "two-mode state")?;
    let pop = top_population(rho, 2, d);
    if pop > TRUNCATION_THRESHOLD {
        return Err(GlmeError::Truncation {
            population: pop,
            threshold: TRUNCATION_THRESHOLD,
        });
    }
    let n = d * d;
    let pt = CMat::from_fn(n, n, |r, c| {
        let (i1, i2, j1, j2) = (r / d, r % d, c / d, c % d);
        rho.get(i1 * d + j2, j1 * d + i2)
    });
    let pt = (&pt + pt.adjoint()) * c64(0.5, 0.0);
    let norm: f64 = hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    Ok(norm.ln())
}

/// Partial time reversal on the second mode in the occupation basis,
/// `|n₁n₂⟩⟨m₁m₂| → i^{τ₂ mod 2} (−1)^{τ₁τ₂} |n₁m₂⟩⟨m₁n₂|` with `τ_a = n_a + m_a`.
pub fn partial_time_reversal(rho: &DenseOperator) -> Result<CMat> {
    require_dim(rho, 4, "two-mode fermionic state")?;
    let mut out = CMat::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let (n1, n2, m1, m2) = (i >> 1, i & 1, j >> 1, j & 1);
            let (t1, t2) = (n1 + m1, n2 + m2);
            let mut phase = if t2 % 2 == 1 { c64(0.0, 1.0) } else { c64(1.0, 0.0) };
            if (t1 * t2) % 2 == 1 {
                phase = -phase;
            }
            out[((n1 << 1) | m2, (m1 << 1) | n2)] += phase * rho.get(i, j);
        }
    }
    Ok(out)
}

/// `ln ‖ρ^{R₂}‖₁` for a parity-even two-mode state.
pub fn dense_negativity_fermionic(rho: &DenseOperator) -> Result<f64> {
    require_dim(rho, 4, "two-mode fermionic state")?;
    let mut odd: f64 = 0.0;
    for i in 0..4usize {
        for j in 0..4usize {
            if (i.count_ones() + j.count_ones()) % 2 == 1 {
                odd = odd.max(rho.get(i, j).norm());
            }
        }
    }
    if odd > 1e-12 {
        return Err(GlmeError::Domain(format!(
            "state mixes parity sectors (coherence {odd:e})"
        )));
    }
    let r = partial_time_reversal(rho)?;
    Ok(r.singular_values().sum().ln())
}
