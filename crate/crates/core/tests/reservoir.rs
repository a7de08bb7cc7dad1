use glme::bosonic::{build_drift_diffusion, is_hurwitz};
use glme::error::GlmeError;
use glme::linalg::{c64, hermitian_eigenvalues, max_abs_c, max_abs_diff, CMat, RMat};
use glme::model::Flavor;
use glme::reservoir::{
    assemble_rates, build_model, resonant_contributions, CouplingTable, CouplingTerm, Sign, SpectralFunctions,
    Spectrum,
};

fn term(mode: usize, channel: usize, sign: Sign, c: f64, omega: f64) -> CouplingTerm {
    CouplingTerm {
        mode,
        channel,
        sign,
        c,
        omega,
    }
}

fn flat_table(s1: f64, s2: Option<f64>) -> Spectrum {
    let row = |v: f64| vec![(0.0, c64(v, 0.0)), (10.0, c64(v, 0.0))];
    Spectrum::tabulated(row(s1), s2.map(row).unwrap_or_default()).unwrap()
}

#[test]
fn resonance_selection() {
    let w = 1.7;
    let single = CouplingTable::new(vec![w], vec![term(0, 0, Sign::Minus, 1.3, 0.0)]).unwrap();
    let c = resonant_contributions(&single, 1, 1e-9).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!((c[0].j, c[0].k, c[0].channel, c[0].correlation_index), (0, 0, 0, 1));
    assert!((c[0].amplitude_product - 1.69).abs() < 1e-15);
    assert!((c[0].eval_frequency - w).abs() < 1e-15);
    assert!(resonant_contributions(&single, 2, 1e-9).unwrap().is_empty());

    let pair = |w2: f64| {
        CouplingTable::new(
            vec![1.0, w2],
            vec![term(0, 0, Sign::Minus, 1.0, 0.0), term(1, 0, Sign::Minus, 1.0, 0.0)],
        )
        .unwrap()
    };
    let c = resonant_contributions(&pair(1.0), 1, 1e-6).unwrap();
    assert!(c.iter().any(|x| x.j != x.k));
    let c = resonant_contributions(&pair(1.01), 1, 1e-6).unwrap();
    assert!(c.iter().all(|x| x.j == x.k));
    assert_eq!(c.len(), 2);
}

#[test]
fn rate_blocks() {
    let w = 1.0;
    let table = CouplingTable::new(vec![w], vec![term(0, 0, Sign::Minus, 1.0, 0.0)]).unwrap();
    let rates = assemble_rates(&table, &SpectralFunctions::shared(flat_table(0.5, None)), 1e-9).unwrap();
    assert!((rates.gamma_m[0][(0, 0)] - c64(0.5, 0.0)).norm() < 1e-15);
    assert!((rates.big_gamma(1)[(0, 0)].re - 1.0).abs() < 1e-15);
    for m in 2..=4 {
        assert_eq!(max_abs_c(&rates.big_gamma(m)), 0.0);
    }
    let model = build_model(&rates, &table, Flavor::Bosonic).unwrap();
    let dd = build_drift_diffusion(&model).unwrap();
    let a = RMat::from_row_slice(2, 2, &[-0.5, w, -w, -0.5]);
    assert!(max_abs_diff(&dd.a, &a) < 1e-14);
    assert!(max_abs_diff(&dd.d, &RMat::identity(2, 2)) < 1e-14);
    assert!(max_abs_diff(&model.hamiltonian, &(RMat::identity(2, 2) * w)) < 1e-15);

    let rates = assemble_rates(&table, &SpectralFunctions::shared(flat_table(0.5, Some(0.25))), 1e-9).unwrap();
    assert!((rates.gamma_m[3][(0, 0)] - c64(0.25, 0.0)).norm() < 1e-15);
    assert!((rates.big_gamma(4)[(0, 0)].re - 0.5).abs() < 1e-15);

    let shared = CouplingTable::new(
        vec![1.0, 1.0],
        vec![term(0, 0, Sign::Minus, 1.0, 0.0), term(1, 0, Sign::Minus, 1.0, 0.0)],
    )
    .unwrap();
    let rates = assemble_rates(&shared, &SpectralFunctions::shared(flat_table(0.5, None)), 1e-9).unwrap();
    let g1 = rates.big_gamma(1);
    assert!(max_abs_c(&(g1 - CMat::from_element(2, 2, c64(1.0, 0.0)))) < 1e-15);
    let model = build_model(&rates, &shared, Flavor::Bosonic).unwrap();
    let eig = hermitian_eigenvalues(model.gamma());
    assert_eq!(eig.iter().filter(|l| l.abs() > 1e-12).count(), 1);
    let (stable, abscissa) = is_hurwitz(&build_drift_diffusion(&model).unwrap(), 1e-10);
    assert!(!stable && abscissa.abs() <= 1e-10);
}

#[test]
fn lamb_shift_enters_the_hamiltonian() {
    let table = CouplingTable::new(vec![2.0], vec![term(0, 0, Sign::Minus, 1.0, 0.0)]).unwrap();
    let s1 = vec![(0.0, c64(0.5, 0.1)), (4.0, c64(0.5, 0.1))];
    let spec = Spectrum::tabulated(s1, vec![]).unwrap();
    let rates = assemble_rates(&table, &SpectralFunctions::shared(spec), 1e-9).unwrap();
    let model = build_model(&rates, &table, Flavor::Bosonic).unwrap();
    let free = RMat::identity(2, 2) * 2.0;
    assert!(max_abs_diff(&model.hamiltonian, &free) > 0.05);
    assert!(max_abs_diff(&model.hamiltonian, &free) < 0.2);
}

#[test]
fn spectral_evaluation_failures() {
    let table = CouplingTable::new(vec![20.0], vec![term(0, 3, Sign::Minus, 1.0, 0.0)]).unwrap();
    let spec = SpectralFunctions::shared(flat_table(0.5, None));
    assert!(matches!(
        assemble_rates(&table, &spec, 1e-9),
        Err(GlmeError::SpectralEvaluation { channel: 3, .. })
    ));
    let neg = Spectrum::tabulated(vec![(0.0, c64(-0.2, 0.0)), (40.0, c64(-0.2, 0.0))], vec![]).unwrap();
    assert!(matches!(
        assemble_rates(&table, &SpectralFunctions::shared(neg), 1e-9),
        Err(GlmeError::Positivity { .. })
    ));
}
