//! From time-dependent system–reservoir couplings and reservoir spectra to a
//! generalized Lindblad model, under Born–Markov and secular approximations.
//!
//! Each coupling term `c e^{−iΩt}` attaches to mode `j` through `a_j` (sign
//! `−`) or `a_j†` (sign `+`). In the interaction picture it oscillates at
//! `ν = Ω + ω_j` or `ν = Ω − ω_j`; two terms interfere (survive the secular
//! approximation) when their `ν` agree within `tol_freq`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{GlmeError, Result};
use crate::linalg::{c64, hermitian_eigenvalues, max_abs_c, CMat};
use crate::model::{
    ladder_quadratic_to_canonical, ladder_to_canonical, validate_model, DecoherenceMatrix, Flavor,
    GeneralizedLindbladModel, Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    /// Term multiplying `a_j`.
    Minus,
    /// Term multiplying `a_j†`.
    Plus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTerm {
    pub mode: usize,
    pub channel: usize,
    pub sign: Sign,
    pub c: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    pub mode_frequencies: Vec<f64>,
    pub terms: Vec<CouplingTerm>,
}

impl CouplingTable {
    pub fn new(mode_frequencies: Vec<f64>, terms: Vec<CouplingTerm>) -> Result<Self> {
        if mode_frequencies.is_empty() {
            return Err(GlmeError::structural("coupling table", "no modes"));
        }
        if mode_frequencies.iter().any(|w| !w.is_finite()) {
            return Err(GlmeError::structural("coupling table", "non-finite mode frequency"));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.mode >= mode_frequencies.len() {
                return Err(GlmeError::structural(
                    "coupling table",
                    format!("term {i} refers to mode {} of {}", t.mode, mode_frequencies.len()),
                ));
            }
            if !t.c.is_finite() || !t.omega.is_finite() {
                return Err(GlmeError::structural("coupling table", format!("term {i} is not finite")));
            }
        }
        Ok(Self {
            mode_frequencies,
            terms,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.mode_frequencies.len()
    }

    /// `1e−9 · max_j |ω_j|`, or `1e−9` when all frequencies vanish.
    pub fn default_tol_freq(&self) -> f64 {
        let w = self.mode_frequencies.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        1e-9 * if w > 0.0 { w } else { 1.0 }
    }

    fn resonance_frequency(&self, t: &CouplingTerm) -> f64 {
        match t.sign {
            Sign::Minus => t.omega + self.mode_frequencies[t.mode],
            Sign::Plus => t.omega - self.mode_frequencies[t.mode],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub j: usize,
    pub k: usize,
    pub channel: usize,
    pub amplitude_product: f64,
    pub eval_frequency: f64,
    /// 1 for `⟨b(s)b†(0)⟩`, 2 for `⟨b†(s)b(0)⟩`.
    pub correlation_index: u8,
}

/// `(sign of the j term, sign of the k term)` feeding `γ^{(m)}` with
/// correlation function `n`.
fn sign_pattern(m: u8, n: u8) -> (Sign, Sign) {
    use Sign::*;
    match (m, n) {
        (1, 1) => (Minus, Minus),
        (1, 2) => (Plus, Plus),
        (2, 1) => (Minus, Plus),
        (2, 2) => (Plus, Minus),
        (3, 1) => (Plus, Minus),
        (3, 2) => (Minus, Plus),
        (4, 1) => (Plus, Plus),
        (4, 2) => (Minus, Minus),
        _ => unreachable!("m in 1..=4, n in 1..=2"),
    }
}

/// All term pairs that survive the secular approximation for block `m`.
///
/// The evaluation frequency is the mean of the two matched `ν`, which keeps
/// the rate symmetry relations exact for a nonzero `tol_freq`.
pub fn resonant_contributions(table: &CouplingTable, m: u8, tol_freq: f64) -> Result<Vec<Contribution>> {
    if !(1..=4).contains(&m) {
        return Err(GlmeError::structural("resonant_contributions", format!("m = {m} not in 1..4")));
    }
    if !(tol_freq >= 0.0) {
        return Err(GlmeError::structural("tol_freq", format!("must be >= 0, got {tol_freq}")));
    }
    let mut out = Vec::new();
    for n in [1u8, 2] {
        let (sj, sk) = sign_pattern(m, n);
        for tj in table.terms.iter().filter(|t| t.sign == sj) {
            for tk in table.terms.iter().filter(|t| t.sign == sk && t.channel == tj.channel) {
                let nu_j = table.resonance_frequency(tj);
                let nu_k = table.resonance_frequency(tk);
                if (nu_j - nu_k).abs() <= tol_freq {
                    out.push(Contribution {
                        j: tj.mode,
                        k: tk.mode,
                        channel: tj.channel,
                        amplitude_product: tj.c * tk.c,
                        eval_frequency: 0.5 * (nu_j + nu_k),
                        correlation_index: n,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A reservoir spectrum: the half-sided transforms `s1(ν)` of `⟨b(s)b†(0)⟩`
/// and `s2(ν)` of `⟨b†(s)b(0)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `s1 = (κ/2)(n̄ + 1)`, `s2 = (κ/2) n̄` at every frequency.
    Flat { kappa: f64, nbar: f64 },
    /// Linear interpolation of `(frequency, value)` samples, sorted by frequency.
    Tabulated {
        s1: Vec<(f64, Complex64)>,
        s2: Vec<(f64, Complex64)>,
    },
}

fn interpolate(table: &[(f64, Complex64)], nu: f64) -> Option<Complex64> {
    let first = table.first()?;
    let last = table.last()?;
    if nu < first.0 || nu > last.0 {
        return None;
    }
    let i = table.partition_point(|(f, _)| *f < nu);
    if i < table.len() && table[i].0 == nu {
        return Some(table[i].1);
    }
    let (f0, v0) = table[i - 1];
    let (f1, v1) = table[i];
    let t = (nu - f0) / (f1 - f0);
    Some(v0 + (v1 - v0) * t)
}

impl Spectrum {
    pub fn tabulated(mut s1: Vec<(f64, Complex64)>, mut s2: Vec<(f64, Complex64)>) -> Result<Self> {
        for t in [&mut s1, &mut s2] {
            if t.iter().any(|(f, v)| !f.is_finite() || !v.re.is_finite() || !v.im.is_finite()) {
                return Err(GlmeError::Parse("non-finite spectral sample".into()));
            }
            t.sort_by(|a, b| a.0.total_cmp(&b.0));
            if t.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(GlmeError::Parse("duplicate frequency in spectral table".into()));
            }
        }
        Ok(Spectrum::Tabulated { s1, s2 })
    }

    /// `s_n(ν)`; `None` outside the tabulated range.
    pub fn eval(&self, n: u8, nu: f64) -> Option<Complex64> {
        match self {
            Spectrum::Flat { kappa, nbar } => Some(c64(
                0.5 * kappa * if n == 1 { nbar + 1.0 } else { *nbar },
                0.0,
            )),
            Spectrum::Tabulated { s1, s2 } => {
                let table = if n == 1 { s1 } else { s2 };
                if table.is_empty() {
                    // an absent table means that correlation function vanishes
                    return Some(c64(0.0, 0.0));
                }
                interpolate(table, nu)
            }
        }
    }
}

/// Spectra per reservoir channel, with an optional fallback shared by all
/// channels not listed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralFunctions {
    pub per_channel: BTreeMap<usize, Spectrum>,
    pub shared: Option<Spectrum>,
}

impl SpectralFunctions {
    pub fn shared(spectrum: Spectrum) -> Self {
        Self {
            per_channel: BTreeMap::new(),
            shared: Some(spectrum),
        }
    }

    pub fn for_channel(&self, channel: usize) -> Option<&Spectrum> {
        self.per_channel.get(&channel).or(self.shared.as_ref())
    }

    pub fn eval(&self, channel: usize, n: u8, nu: f64) -> Result<Complex64> {
        self.for_channel(channel)
            .and_then(|s| s.eval(n, nu))
            .ok_or(GlmeError::SpectralEvaluation {
                channel,
                frequency: nu,
            })
    }
}

/// The four complex rate blocks `γ^{(m)}`, `m = 1..4`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSet {
    pub gamma_m: [CMat; 4],
}

impl RateSet {
    pub fn n_modes(&self) -> usize {
        self.gamma_m[0].nrows()
    }

    /// `Γ^{(m)} = 2 Re γ^{(m)}`.
    pub fn big_gamma(&self, m: usize) -> CMat {
        self.gamma_m[m - 1].map(|z| c64(2.0 * z.re, 0.0))
    }

    /// `Υ^{(m)} = Im γ^{(m)}`.
    pub fn upsilon(&self, m: usize) -> CMat {
        self.gamma_m[m - 1].map(|z| c64(z.im, 0.0))
    }

    /// Largest violation of `γ²_jk = γ³_kj`, `γ¹ = γ¹ᵀ`, `γ⁴ = γ⁴ᵀ`.
    pub fn symmetry_defect(&self) -> f64 {
        let [g1, g2, g3, g4] = &self.gamma_m;
        max_abs_c(&(g2 - g3.transpose()))
            .max(max_abs_c(&(g1 - g1.transpose())))
            .max(max_abs_c(&(g4 - g4.transpose())))
    }
}

/// `γ^{(m)}_jk = Σ amplitude · s_n(ν)` over the resonant contributions.
pub fn assemble_rates(table: &CouplingTable, spectral: &SpectralFunctions, tol_freq: f64) -> Result<RateSet> {
    let n = table.n_modes();
    let mut blocks: [CMat; 4] = std::array::from_fn(|_| CMat::zeros(n, n));
    for m in 1..=4u8 {
        for c in resonant_contributions(table, m, tol_freq)? {
            let s = spectral.eval(c.channel, c.correlation_index, c.eval_frequency)?;
            if s.re < 0.0 {
                return Err(GlmeError::Positivity {
                    min_eigenvalue: s.re,
                    tol: 0.0,
                    detail: format!(
                        "Re s{}({}) on channel {} is negative",
                        c.correlation_index, c.eval_frequency, c.channel
                    ),
                });
            }
            blocks[(m - 1) as usize][(c.j, c.k)] += s * c.amplitude_product;
        }
    }
    Ok(RateSet { gamma_m: blocks })
}

/// Generalized Lindblad model over `F = (a₁…a_N, a₁†…a_N†)` with
/// `H = Σ ω_j a_j†a_j + H_LS`.
pub fn build_model(rates: &RateSet, table: &CouplingTable, flavor: Flavor) -> Result<GeneralizedLindbladModel> {
    let n = table.n_modes();
    if rates.n_modes() != n {
        return Err(GlmeError::structural(
            "build_model",
            format!("rate blocks are {}x{} for {n} modes", rates.n_modes(), rates.n_modes()),
        ));
    }
    let defect = rates.symmetry_defect();
    let scale = rates.gamma_m.iter().map(max_abs_c).fold(0.0, f64::max).max(1.0);
    if defect > 1e-12 * scale {
        return Err(GlmeError::structural(
            "rates",
            format!("symmetry relations violated by {defect:e}"),
        ));
    }

    let d = 2 * n;
    let mut gamma = CMat::zeros(d, d);
    let mut quad = CMat::zeros(d, d);
    for m in 1..=4usize {
        let (r, c) = (((m - 1) / 2) * n, ((m - 1) % 2) * n);
        gamma.view_mut((r, c), (n, n)).copy_from(&rates.big_gamma(m));
        quad.view_mut((r, c), (n, n)).copy_from(&rates.upsilon(m));
    }
    for (j, w) in table.mode_frequencies.iter().enumerate() {
        quad[(j, j)] += c64(*w, 0.0);
    }
    let hamiltonian = ladder_quadratic_to_canonical(&quad, flavor)?;
    let f = ladder_to_canonical(&CMat::identity(d, d), flavor)?;
    let model = GeneralizedLindbladModel::new(flavor, n, hamiltonian, DecoherenceMatrix::new(gamma)?, f)?;

    let tol = Tolerances::default();
    let report = validate_model(&model, &tol)?;
    if !report.is_valid {
        // name the first diagonal block that already fails, else the coupling blocks
        let block = [1usize, 4]
            .into_iter()
            .find(|&m| {
                let g = rates.big_gamma(m);
                let scale = max_abs_c(&g);
                n > 0 && hermitian_eigenvalues(&g)[0] < -tol.psd * scale.max(f64::MIN_POSITIVE)
            })
            .map_or("cross blocks Gamma(2)/Gamma(3)".to_string(), |m| format!("block Gamma({m})"));
        return Err(GlmeError::Positivity {
            min_eigenvalue: report.min_gamma_eigenvalue,
            tol: tol.psd,
            detail: format!("assembled decoherence matrix is not PSD; offending {block}"),
        });
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bosonic::{build_drift_diffusion, is_hurwitz};
    use crate::linalg::{max_abs_diff, RMat};

    fn term(mode: usize, channel: usize, sign: Sign, c: f64, omega: f64) -> CouplingTerm {
        CouplingTerm {
            mode,
            channel,
            sign,
            c,
            omega,
        }
    }

    #[test]
    fn single_term_contributions() {
        let table = CouplingTable::new(vec![1.7], vec![term(0, 0, Sign::Minus, 0.8, 0.0)]).unwrap();
        let c1 = resonant_contributions(&table, 1, 0.0).unwrap();
        assert_eq!(c1.len(), 1);
        assert_eq!(c1[0].correlation_index, 1);
        assert!((c1[0].eval_frequency - 1.7).abs() < 1e-15);
        assert!((c1[0].amplitude_product - 0.64).abs() < 1e-15);
        assert!(resonant_contributions(&table, 2, 0.0).unwrap().is_empty());
        assert!(resonant_contributions(&table, 3, 0.0).unwrap().is_empty());
        assert!(resonant_contributions(&table, 1, -1.0).is_err());
    }

    #[test]
    fn shared_channel_resonance() {
        let table = CouplingTable::new(
            vec![1.0, 1.0],
            vec![term(0, 0, Sign::Minus, 1.0, 0.0), term(1, 0, Sign::Minus, 1.0, 0.0)],
        )
        .unwrap();
        let c = resonant_contributions(&table, 1, 0.0).unwrap();
        assert!(c.iter().any(|x| x.j == 0 && x.k == 1));
        let detuned = CouplingTable::new(vec![1.0, 1.3], table.terms.clone()).unwrap();
        let c = resonant_contributions(&detuned, 1, 1e-6).unwrap();
        assert!(c.iter().all(|x| x.j == x.k));
        let wide = resonant_contributions(&detuned, 1, 1.0).unwrap();
        assert_eq!(wide.len(), 4);
    }

    #[test]
    fn single_mode_rates() {
        let table = CouplingTable::new(vec![2.0], vec![term(0, 0, Sign::Minus, 1.0, 0.0)]).unwrap();
        let tab = |v: f64| vec![(0.0, c64(v, 0.0)), (4.0, c64(v, 0.0))];
        let spec = SpectralFunctions::shared(Spectrum::tabulated(tab(0.5), vec![]).unwrap());
        let r = assemble_rates(&table, &spec, 0.0).unwrap();
        assert_eq!(r.gamma_m[0][(0, 0)], c64(0.5, 0.0));
        assert_eq!(r.big_gamma(1)[(0, 0)], c64(1.0, 0.0));
        for m in 2..=4 {
            assert_eq!(r.gamma_m[m - 1][(0, 0)], c64(0.0, 0.0));
        }

        let spec = SpectralFunctions::shared(Spectrum::tabulated(tab(0.5), tab(0.25)).unwrap());
        let r = assemble_rates(&table, &spec, 0.0).unwrap();
        assert_eq!(r.gamma_m[3][(0, 0)], c64(0.25, 0.0));
        assert_eq!(r.big_gamma(4)[(0, 0)], c64(0.5, 0.0));

        let narrow = SpectralFunctions::shared(
            Spectrum::tabulated(vec![(0.0, c64(1.0, 0.0)), (1.0, c64(1.0, 0.0))], vec![]).unwrap(),
        );
        assert!(matches!(
            assemble_rates(&table, &narrow, 0.0),
            Err(GlmeError::SpectralEvaluation { channel: 0, .. })
        ));
    }

    #[test]
    fn flat_pipeline_matches_damped_oscillator() {
        let (kappa, nbar, w) = (0.5, 0.3, 2.0);
        let table = CouplingTable::new(vec![w], vec![term(0, 0, Sign::Minus, 1.0, 0.0)]).unwrap();
        let spec = SpectralFunctions::shared(Spectrum::Flat { kappa, nbar });
        let rates = assemble_rates(&table, &spec, table.default_tol_freq()).unwrap();
        let model = build_model(&rates, &table, Flavor::Bosonic).unwrap();
        let dd = build_drift_diffusion(&model).unwrap();
        let a = RMat::from_row_slice(2, 2, &[-kappa / 2.0, w, -w, -kappa / 2.0]);
        assert!(max_abs_diff(&dd.a, &a) < 1e-12);
        assert!(max_abs_diff(&dd.d, &(RMat::identity(2, 2) * (kappa * (2.0 * nbar + 1.0)))) < 1e-12);
    }

    #[test]
    fn lamb_shift_free_hamiltonian() {
        let table = CouplingTable::new(vec![1.5, 0.5], vec![]).unwrap();
        let rates = assemble_rates(&table, &SpectralFunctions::default(), 0.0).unwrap();
        let model = build_model(&rates, &table, Flavor::Bosonic).unwrap();
        let h = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.5, 1.5, 0.5, 0.5]));
        assert!(max_abs_diff(&model.hamiltonian, &h) < 1e-15);
    }

    #[test]
    fn collective_decay_is_rank_one_with_dark_mode() {
        let table = CouplingTable::new(
            vec![1.0, 1.0],
            vec![term(0, 0, Sign::Minus, 1.0, 0.0), term(1, 0, Sign::Minus, 1.0, 0.0)],
        )
        .unwrap();
        let spec = SpectralFunctions::shared(Spectrum::Flat { kappa: 0.6, nbar: 0.0 });
        let rates = assemble_rates(&table, &spec, table.default_tol_freq()).unwrap();
        let g1 = rates.big_gamma(1);
        assert!(g1.iter().all(|z| (z.re - 0.6).abs() < 1e-15));
        assert!(rates.symmetry_defect() < 1e-12);
        let dd = build_drift_diffusion(&build_model(&rates, &table, Flavor::Bosonic).unwrap()).unwrap();
        let (stable, abscissa) = is_hurwitz(&dd, 1e-10);
        assert!(!stable && abscissa.abs() <= 1e-10);
    }
}
