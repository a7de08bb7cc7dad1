//! Generalized Lindblad models: domain types, validation, conversion to the
//! diagonal (standard) form and basis changes between ladder and canonical
//! operators.

use std::cmp::Ordering;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GlmeError, Result};
use crate::linalg::{c64, hermitian_eigenvalues, max_abs, max_abs_c, CMat, RMat};

/// Default relative tolerance for Hermiticity, positivity and symmetry checks.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Bosonic,
    Fermionic,
}

impl Flavor {
    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Bosonic => "bosonic",
            Flavor::Fermionic => "fermionic",
        }
    }
}

fn check_finite(what: &str, m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(GlmeError::structural(what, "non-finite entry"))
    }
}

/// Square matrix of decoherence rates Γ (1/time).
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix(CMat);

impl DecoherenceMatrix {
    pub fn new(gamma: CMat) -> Result<Self> {
        if gamma.nrows() != gamma.ncols() {
            return Err(GlmeError::structural(
                "Gamma",
                format!("must be square, got {}x{}", gamma.nrows(), gamma.ncols()),
            ));
        }
        check_finite("Gamma", &gamma)?;
        Ok(Self(gamma))
    }

    pub fn from_real_diagonal(rates: &[f64]) -> Self {
        let n = rates.len();
        Self(CMat::from_fn(n, n, |i, j| {
            if i == j {
                c64(rates[i], 0.0)
            } else {
                c64(0.0, 0.0)
            }
        }))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Coefficients of the decoherence operators in the canonical basis, `M × 2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCoefficients(CMat);

impl CouplingCoefficients {
    pub fn new(f: CMat) -> Result<Self> {
        check_finite("F", &f)?;
        Ok(Self(f))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }
}

/// A linear open system: quadratic Hamiltonian matrix plus linear
/// decoherence operators coupled through Γ.
///
/// For bosons `hamiltonian` is the symmetric matrix of `½ xᵀ H x`; for
/// fermions it is the antisymmetric `G` of `(i/2) wᵀ G w`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedLindbladModel {
    pub flavor: Flavor,
    pub n_modes: usize,
    pub hamiltonian: RMat,
    pub decoherence: DecoherenceMatrix,
    pub couplings: CouplingCoefficients,
}

impl GeneralizedLindbladModel {
    pub fn new(
        flavor: Flavor,
        n_modes: usize,
        hamiltonian: RMat,
        decoherence: DecoherenceMatrix,
        couplings: CouplingCoefficients,
    ) -> Result<Self> {
        let model = Self {
            flavor,
            n_modes,
            hamiltonian,
            decoherence,
            couplings,
        };
        model.check_dimensions()?;
        Ok(model)
    }

    /// Γ = 0 with no decoherence channels.
    pub fn closed(flavor: Flavor, hamiltonian: RMat) -> Result<Self> {
        let n = hamiltonian.nrows();
        if !n.is_multiple_of(2) || n == 0 {
            return Err(GlmeError::structural("hamiltonian", "dimension must be 2N, N >= 1"));
        }
        Self::new(
            flavor,
            n / 2,
            hamiltonian,
            DecoherenceMatrix::new(CMat::zeros(0, 0))?,
            CouplingCoefficients::new(CMat::zeros(0, n))?,
        )
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn gamma(&self) -> &CMat {
        self.decoherence.matrix()
    }

    pub fn f(&self) -> &CMat {
        self.couplings.matrix()
    }

    pub fn check_dimensions(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(GlmeError::structural("n_modes", "must be at least 1"));
        }
        let d = self.dim();
        if self.hamiltonian.shape() != (d, d) {
            return Err(GlmeError::structural(
                "hamiltonian",
                format!("expected {d}x{d}, got {:?}", self.hamiltonian.shape()),
            ));
        }
        if self.hamiltonian.iter().any(|x| !x.is_finite()) {
            return Err(GlmeError::structural("hamiltonian", "non-finite entry"));
        }
        let m = self.decoherence.dim();
        if self.f().shape() != (m, d) {
            return Err(GlmeError::structural(
                "F",
                format!("expected {m}x{d} (M x 2N), got {:?}", self.f().shape()),
            ));
        }
        Ok(())
    }
}

/// Validation thresholds, each relative to the max-norm of the checked matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub psd: f64,
    pub hamiltonian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::uniform(DEFAULT_TOL)
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            hermitian: tol,
            psd: tol,
            hamiltonian: tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub hermitian_defect: f64,
    pub min_gamma_eigenvalue: f64,
    pub hamiltonian_symmetry_defect: f64,
    pub is_valid: bool,
}

fn relative(tol: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        tol * scale
    } else {
        tol
    }
}

/// Check Hermiticity and positivity of Γ and the (anti)symmetry of the
/// Hamiltonian matrix.
pub fn validate_model(model: &GeneralizedLindbladModel, tol: &Tolerances) -> Result<ValidationReport> {
    model.check_dimensions()?;
    let gamma = model.gamma();
    let scale = max_abs_c(gamma);
    let hermitian_defect = max_abs_c(&(gamma - gamma.adjoint()));
    let min_gamma_eigenvalue = if gamma.nrows() == 0 {
        0.0
    } else {
        let herm = (gamma + gamma.adjoint()) * c64(0.5, 0.0);
        hermitian_eigenvalues(&herm)[0]
    };

    let h = &model.hamiltonian;
    let hamiltonian_symmetry_defect = match model.flavor {
        Flavor::Bosonic => max_abs(&(h - h.transpose())),
        Flavor::Fermionic => max_abs(&(h + h.transpose())),
    };

    let is_valid = hermitian_defect <= relative(tol.hermitian, scale)
        && min_gamma_eigenvalue >= -relative(tol.psd, scale)
        && hamiltonian_symmetry_defect <= relative(tol.hamiltonian, max_abs(h));

    Ok(ValidationReport {
        hermitian_defect,
        min_gamma_eigenvalue,
        hamiltonian_symmetry_defect,
        is_valid,
    })
}

/// Gate used by the dynamics builders: correct flavor, Hermitian PSD Γ and a
/// Hamiltonian of the right symmetry.
pub(crate) fn require_dynamics_ready(model: &GeneralizedLindbladModel, flavor: Flavor) -> Result<()> {
    if model.flavor != flavor {
        return Err(GlmeError::structural(
            "model",
            format!("expected a {} model, got {}", flavor.as_str(), model.flavor.as_str()),
        ));
    }
    let tol = Tolerances::default();
    let report = validate_model(model, &tol)?;
    let scale = max_abs_c(model.gamma());
    if report.hermitian_defect > relative(tol.hermitian, scale) {
        return Err(GlmeError::NonHermitian {
            defect: report.hermitian_defect,
        });
    }
    if report.min_gamma_eigenvalue < -relative(tol.psd, scale) {
        return Err(GlmeError::Positivity {
            min_eigenvalue: report.min_gamma_eigenvalue,
            tol: relative(tol.psd, scale),
            detail: "decoherence matrix".into(),
        });
    }
    if report.hamiltonian_symmetry_defect > relative(tol.hamiltonian, max_abs(&model.hamiltonian)) {
        let what = match flavor {
            Flavor::Bosonic => "symmetric",
            Flavor::Fermionic => "antisymmetric",
        };
        return Err(GlmeError::structural(
            "hamiltonian",
            format!("not {what} (defect {:e})", report.hamiltonian_symmetry_defect),
        ));
    }
    Ok(())
}

/// Returns `((Γ+Γ†)/2, (Γ−Γ†)/2)`.
pub fn split_non_hermitian(gamma: &CMat) -> Result<(CMat, CMat)> {
    if gamma.nrows() != gamma.ncols() {
        return Err(GlmeError::structural("Gamma", "split_non_hermitian needs a square matrix"));
    }
    let adj = gamma.adjoint();
    let half = c64(0.5, 0.0);
    Ok(((gamma + &adj) * half, (gamma - &adj) * half))
}

/// Diagonal form: `Σ_l rates[l] D[L_l]` with `L_l` given by `operator_rows[l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub rates: Vec<f64>,
    pub operator_rows: CMat,
}

impl StandardForm {
    /// The equivalent model with diagonal Γ.
    pub fn to_model(&self, template: &GeneralizedLindbladModel) -> Result<GeneralizedLindbladModel> {
        GeneralizedLindbladModel::new(
            template.flavor,
            template.n_modes,
            template.hamiltonian.clone(),
            DecoherenceMatrix::from_real_diagonal(&self.rates),
            CouplingCoefficients::new(self.operator_rows.clone())?,
        )
    }

    /// `C = √Γ F` with one row per diagonal channel.
    pub fn weighted_rows(&self) -> CMat {
        let mut c = self.operator_rows.clone();
        for (l, rate) in self.rates.iter().enumerate() {
            let s = rate.sqrt();
            c.row_mut(l).iter_mut().for_each(|z| *z *= s);
        }
        c
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Diagonalize Γ = U Λ U† and rotate the decoherence operators, `L = Uᵀ F`.
///
/// Eigenvalues in `[-tol‖Γ‖, 0)` are clamped to zero. Rows come out ordered by
/// descending rate, ties by lexicographic order of the operator row.
pub fn to_standard_form(
    gamma: &DecoherenceMatrix,
    f: &CouplingCoefficients,
    tol: f64,
) -> Result<StandardForm> {
    let g = gamma.matrix();
    let m = g.nrows();
    if f.matrix().nrows() != m {
        return Err(GlmeError::structural(
            "F",
            format!("has {} rows but Gamma is {m}x{m}", f.matrix().nrows()),
        ));
    }
    let scale = max_abs_c(g);
    let herm_defect = max_abs_c(&(g - g.adjoint()));
    if herm_defect > relative(tol, scale) {
        return Err(GlmeError::NonHermitian { defect: herm_defect });
    }
    let herm = (g + g.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let bound = relative(tol, scale);

    let mut entries: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(m);
    for l in 0..m {
        let mut rate = eig.eigenvalues[l];
        if rate < -bound {
            return Err(GlmeError::Positivity {
                min_eigenvalue: rate,
                tol: bound,
                detail: "Gamma has a negative eigenvalue".into(),
            });
        }
        if rate < 0.0 {
            rate = 0.0;
        }
        // fix the eigenvector phase: largest component real positive
        let col = eig.eigenvectors.column(l);
        let mut pivot = 0;
        for j in 0..m {
            if col[j].norm() > col[pivot].norm() + 1e-12 {
                pivot = j;
            }
        }
        let phase = if col[pivot].norm() > 0.0 {
            col[pivot].conj() / col[pivot].norm()
        } else {
            c64(1.0, 0.0)
        };
        let u: Vec<Complex64> = col.iter().map(|z| z * phase).collect();
        let row: Vec<Complex64> = (0..f.matrix().ncols())
            .map(|c| (0..m).map(|j| u[j] * f.matrix()[(j, c)]).sum())
            .collect();
        entries.push((rate, row));
    }
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| lexicographic(&a.1, &b.1)));

    let cols = f.matrix().ncols();
    let mut operator_rows = CMat::zeros(m, cols);
    let mut rates = Vec::with_capacity(m);
    for (l, (rate, row)) in entries.into_iter().enumerate() {
        rates.push(rate);
        for (c, z) in row.into_iter().enumerate() {
            operator_rows[(l, c)] = z;
        }
    }
    Ok(StandardForm {
        rates,
        operator_rows,
    })
}

/// Re-express rows given over `(a₁…a_N, a₁†…a_N†)` (or `c, c†`) in the
/// canonical basis `(q₁, p₁, …)` (or Majoranas `(w₁, w₂, …)`).
pub fn ladder_to_canonical(rows: &CMat, flavor: Flavor) -> Result<CouplingCoefficients> {
    let cols = rows.ncols();
    if !cols.is_multiple_of(2) {
        return Err(GlmeError::structural(
            "ladder rows",
            format!("column count {cols} is odd"),
        ));
    }
    let n = cols / 2;
    let s = FRAC_1_SQRT_2;
    let i = c64(0.0, 1.0);
    let mut out = CMat::zeros(rows.nrows(), cols);
    for r in 0..rows.nrows() {
        for j in 0..n {
            let alpha = rows[(r, j)];
            let beta = rows[(r, n + j)];
            out[(r, 2 * j)] = (alpha + beta) * s;
            out[(r, 2 * j + 1)] = match flavor {
                // a = (q + i p)/√2, a† = (q − i p)/√2
                Flavor::Bosonic => i * (alpha - beta) * s,
                // c = (w₁ − i w₂)/√2, c† = (w₁ + i w₂)/√2
                Flavor::Fermionic => -i * (alpha - beta) * s,
            };
        }
    }
    CouplingCoefficients::new(out)
}

/// Inverse of [`ladder_to_canonical`].
pub fn canonical_to_ladder(rows: &CMat, flavor: Flavor) -> Result<CMat> {
    let cols = rows.ncols();
    if !cols.is_multiple_of(2) {
        return Err(GlmeError::structural(
            "canonical rows",
            format!("column count {cols} is odd"),
        ));
    }
    let n = cols / 2;
    let s = FRAC_1_SQRT_2;
    let i = c64(0.0, 1.0);
    let mut out = CMat::zeros(rows.nrows(), cols);
    for r in 0..rows.nrows() {
        for j in 0..n {
            let x = rows[(r, 2 * j)];
            let y = rows[(r, 2 * j + 1)];
            let (alpha, beta) = match flavor {
                Flavor::Bosonic => ((x - i * y) * s, (x + i * y) * s),
                Flavor::Fermionic => ((x + i * y) * s, (x - i * y) * s),
            };
            out[(r, j)] = alpha;
            out[(r, n + j)] = beta;
        }
    }
    Ok(out)
}

/// Convert a quadratic operator `ξ† M ξ` over `ξ = (a₁…a_N, a₁†…a_N†)` into the
/// canonical Hamiltonian matrix: symmetric `H` with `½ xᵀ H x` for bosons,
/// antisymmetric `G` with `(i/2) wᵀ G w` for fermions (constants dropped).
pub fn ladder_quadratic_to_canonical(m: &CMat, flavor: Flavor) -> Result<RMat> {
    let d = m.nrows();
    if m.ncols() != d || !d.is_multiple_of(2) {
        return Err(GlmeError::structural("quadratic form", "must be 2N x 2N"));
    }
    // ξ = T x with rows of T the ladder operators expressed canonically
    let t = ladder_to_canonical(&CMat::identity(d, d), flavor)?;
    let s = t.matrix().adjoint() * m * t.matrix();
    Ok(match flavor {
        Flavor::Bosonic => {
            let re = s.map(|z| z.re);
            &re + re.transpose()
        }
        Flavor::Fermionic => {
            let im = s.map(|z| z.im);
            &im - im.transpose()
        }
    })
}

/// Block-diagonal symplectic form with blocks `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> Result<RMat> {
    if n_modes == 0 {
        return Err(GlmeError::structural("symplectic_form", "N must be at least 1"));
    }
    let d = 2 * n_modes;
    let mut omega = RMat::zeros(d, d);
    for j in 0..n_modes {
        omega[(2 * j, 2 * j + 1)] = 1.0;
        omega[(2 * j + 1, 2 * j)] = -1.0;
    }
    Ok(omega)
}
