//! Time propagation of the differential Lyapunov equation
//! `Ẋ = A X + X Aᵀ + D`, shared by the bosonic and fermionic engines.

use serde::{Deserialize, Serialize};

use crate::error::{GlmeError, Result};
use crate::linalg::{
    antisymmetrize, expm, gauss_legendre, inf_norm, lyapunov_residual, max_abs, solve_lyapunov,
    spectral_abscissa, symmetrize, RMat, RVec,
};

/// Spectral abscissa threshold below which a drift matrix counts as Hurwitz.
pub const HURWITZ_TOL: f64 = 1e-10;

/// Largest `|λ| h` used by the rk4 integrator for the Lyapunov operator.
const RK4_STEP_FACTOR: f64 = 0.01;

/// Quadrature acceptance: `‖A W + W Aᵀ + D − e^{AΔ} D e^{AᵀΔ}‖_max`.
const QUADRATURE_RESIDUAL: f64 = 1e-9;
const QUADRATURE_MAX_PANELS: usize = 4096;
const GL_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Rk4,
}

impl std::str::FromStr for Method {
    type Err = GlmeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "rk4" => Ok(Method::Rk4),
            other => Err(GlmeError::Parse(format!("unknown method '{other}' (exact|rk4)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Symmetry {
    Symmetric,
    Antisymmetric,
}

impl Symmetry {
    fn project(self, m: &RMat) -> RMat {
        match self {
            Symmetry::Symmetric => symmetrize(m),
            Symmetry::Antisymmetric => antisymmetrize(m),
        }
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(GlmeError::structural("times", "empty time grid"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(GlmeError::structural("times", "non-finite time"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GlmeError::structural("times", "times must be strictly increasing"));
    }
    Ok(())
}

/// `W(Δ) = ∫₀^Δ e^{As} D e^{Aᵀs} ds` by composite Gauss–Legendre, doubling the
/// panel count until `A W + W Aᵀ + D = e^{AΔ} D e^{AᵀΔ}` holds.
pub fn integral_term(a: &RMat, d: &RMat, dt: f64) -> Result<RMat> {
    let n = a.nrows();
    if dt == 0.0 {
        return Ok(RMat::zeros(n, n));
    }
    let e = expm(&(a * dt));
    let target = &e * d * e.transpose() - d;
    let scale = max_abs(d).max(1.0);
    let (nodes, weights) = gauss_legendre(GL_ORDER);

    let mut panels = 1usize.max((inf_norm(a) * dt).ceil() as usize);
    let mut residual = f64::INFINITY;
    while panels <= QUADRATURE_MAX_PANELS {
        let h = dt / panels as f64;
        let mut w = RMat::zeros(n, n);
        for p in 0..panels {
            let left = p as f64 * h;
            for (x, wt) in nodes.iter().zip(&weights) {
                let s = left + 0.5 * h * (x + 1.0);
                let es = expm(&(a * s));
                w += (&es * d * es.transpose()) * (0.5 * h * wt);
            }
        }
        residual = max_abs(&(a * &w + &w * a.transpose() - &target));
        if residual <= QUADRATURE_RESIDUAL * scale {
            return Ok(w);
        }
        panels *= 2;
    }
    Err(GlmeError::numerical(
        "integral_term",
        format!("Gauss-Legendre quadrature did not converge within {QUADRATURE_MAX_PANELS} panels (residual {residual:e})"),
    ))
}

/// Covariance-like matrix at each time in `times`, starting from `x0` at
/// `times[0]`.
pub(crate) fn propagate_lyapunov(
    a: &RMat,
    d: &RMat,
    x0: &RMat,
    times: &[f64],
    method: Method,
    symmetry: Symmetry,
) -> Result<Vec<RMat>> {
    check_times(times)?;
    let n = a.nrows();
    if a.shape() != (n, n) || d.shape() != (n, n) || x0.shape() != (n, n) {
        return Err(GlmeError::structural(
            "propagate",
            format!("A {:?}, D {:?}, X0 {:?}", a.shape(), d.shape(), x0.shape()),
        ));
    }
    match method {
        Method::Exact => propagate_exact(a, d, x0, times, symmetry),
        Method::Rk4 => Ok(propagate_rk4(a, d, x0, times, symmetry)),
    }
}

fn propagate_exact(
    a: &RMat,
    d: &RMat,
    x0: &RMat,
    times: &[f64],
    symmetry: Symmetry,
) -> Result<Vec<RMat>> {
    let t0 = times[0];
    if spectral_abscissa(a) < -HURWITZ_TOL {
        if let Ok(ss) = solve_lyapunov(a, d) {
            if lyapunov_residual(a, &ss, d) <= 1e-10 * max_abs(d).max(1.0) {
                let ss = symmetry.project(&ss);
                let delta = x0 - &ss;
                return Ok(times
                    .iter()
                    .map(|&t| {
                        let e = expm(&(a * (t - t0)));
                        symmetry.project(&(&e * &delta * e.transpose() + &ss))
                    })
                    .collect());
            }
        }
    }

    // general case: step the closed-form solution interval by interval
    let mut out = Vec::with_capacity(times.len());
    let mut x = symmetry.project(x0);
    out.push(x.clone());
    let mut cache: Option<(f64, RMat, RMat)> = None;
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let reuse = matches!(&cache, Some((h, _, _)) if ((h - dt) / dt).abs() < 1e-12);
        if !reuse {
            let e = expm(&(a * dt));
            let integral = integral_term(a, d, dt)?;
            cache = Some((dt, e, integral));
        }
        let (_, e, integral) = cache.as_ref().expect("cache populated above");
        x = symmetry.project(&(e * &x * e.transpose() + integral));
        out.push(x.clone());
    }
    Ok(out)
}

fn lyapunov_rhs(a: &RMat, d: &RMat, x: &RMat) -> RMat {
    a * x + x * a.transpose() + d
}

/// Internal rk4 step bound: `h · 2‖A‖_∞ ≤ 0.01`.
pub(crate) fn rk4_substeps(a: &RMat, dt: f64) -> usize {
    let rate = 2.0 * inf_norm(a);
    if rate == 0.0 {
        1
    } else {
        ((dt * rate / RK4_STEP_FACTOR).ceil() as usize).max(1)
    }
}

fn propagate_rk4(a: &RMat, d: &RMat, x0: &RMat, times: &[f64], symmetry: Symmetry) -> Vec<RMat> {
    let mut out = Vec::with_capacity(times.len());
    let mut x = symmetry.project(x0);
    out.push(x.clone());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let steps = rk4_substeps(a, dt);
        let h = dt / steps as f64;
        for _ in 0..steps {
            let k1 = lyapunov_rhs(a, d, &x);
            let k2 = lyapunov_rhs(a, d, &(&x + &k1 * (0.5 * h)));
            let k3 = lyapunov_rhs(a, d, &(&x + &k2 * (0.5 * h)));
            let k4 = lyapunov_rhs(a, d, &(&x + &k3 * h));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            x = symmetry.project(&x);
        }
        out.push(x.clone());
    }
    out
}

/// `ẏ = A y` on the same grid.
pub(crate) fn propagate_linear(a: &RMat, y0: &RVec, times: &[f64], method: Method) -> Vec<RVec> {
    let t0 = times[0];
    match method {
        Method::Exact => times.iter().map(|&t| expm(&(a * (t - t0))) * y0).collect(),
        Method::Rk4 => {
            let mut out = Vec::with_capacity(times.len());
            let mut y = y0.clone();
            out.push(y.clone());
            for w in times.windows(2) {
                let dt = w[1] - w[0];
                let steps = rk4_substeps(a, dt);
                let h = dt / steps as f64;
                for _ in 0..steps {
                    let k1 = a * &y;
                    let k2 = a * (&y + &k1 * (0.5 * h));
                    let k3 = a * (&y + &k2 * (0.5 * h));
                    let k4 = a * (&y + &k3 * h);
                    y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
                }
                out.push(y.clone());
            }
            out
        }
    }
}
