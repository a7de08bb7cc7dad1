//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or physics failure, 2 input or parse
//! failure. Errors are reported on stderr as `{"error", "code", "detail"}`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bosonic::{self, GaussianState};
use crate::entanglement::{
    duan_bosonic, duan_fermionic, log_negativity_bosonic, log_negativity_fermionic, DuanResult,
    NegativityResult,
};
use crate::error::{GlmeError, Result};
use crate::fermionic::{self, FermionicGaussianState};
use crate::io::{self, StateFile};
use crate::linalg::{c64, max_abs_diff, RMat};
use crate::model::{validate_model, Flavor, GeneralizedLindbladModel, Tolerances, DEFAULT_TOL};
use crate::oracle::checks::{adjoint_consistency_check, bosonic_moment_closure, fermionic_moment_closure};
use crate::oracle::{self as dense, DenseBosonicEngine, DenseFermionicEngine, DenseIntegrator, DenseOperator};
use crate::propagate::Method;
use crate::reservoir::{assemble_rates, build_model};

/// Slack on the uncertainty bound for state files.
pub const PHYSICALITY_TOL: f64 = 1e-8;

pub const ENV_DEFAULT_TOL: &str = "GLME_DEFAULT_TOL";

/// Names accepted by `--tol NAME=VALUE`.
pub const TOLERANCE_NAMES: [&str; 6] = ["hermitian", "psd", "hamiltonian", "freq", "oracle", "oracle_trajectory"];

#[derive(Debug, Parser)]
#[command(name = "glme", version, about = "Gaussian dynamics of linear open quantum systems")]
pub struct Cli {
    /// Override a tolerance, e.g. `--tol psd=1e-9` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    pub tol: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Duan,
    Logneg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bosonic,
    Fermionic,
}

impl From<KindArg> for Flavor {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Bosonic => Flavor::Bosonic,
            KindArg::Fermionic => Flavor::Fermionic,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check Hermiticity, positivity and Hamiltonian symmetry of a model file.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Propagate the covariance (and mean) on a time grid.
    Evolve {
        #[arg(long)]
        model: PathBuf,
        /// Initial state file; defaults to the vacuum.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// File of explicit sample times; overrides `--t-final`/`--steps`.
        #[arg(long)]
        times: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Trajectory destination; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Solve for the stationary covariance.
    SteadyState {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two-mode entanglement of a state file, or of a model's steady state.
    Entanglement {
        #[arg(long, conflicts_with = "state", required_unless_present = "state")]
        model: Option<PathBuf>,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, value_enum)]
        measure: Measure,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        beta: f64,
        /// Use `max(0, −ln 2η)` for the bosonic log-negativity.
        #[arg(long)]
        doubled_eta: bool,
    },
    /// Build a model file from a coupling table and reservoir spectra.
    Assemble {
        #[arg(long)]
        couplings: PathBuf,
        #[arg(long)]
        spectral: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Bosonic)]
        kind: KindArg,
    },
    /// Compare the covariance engine with dense density-matrix evolution.
    OracleCheck {
        #[arg(long)]
        model: PathBuf,
        /// Per-mode Fock dimension (bosonic); default 30 for one mode, 16 for two.
        #[arg(long)]
        fock_dim: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

/// Resolved tolerance set.
#[derive(Debug, Clone, PartialEq)]
pub struct CliTolerances {
    pub validation: Tolerances,
    pub freq: Option<f64>,
    pub oracle: f64,
    pub oracle_trajectory: f64,
}

fn parse_positive(name: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|e| GlmeError::Parse(format!("{name}: {s:?}: {e}")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(GlmeError::Parse(format!("{name}: tolerance must be positive, got {v}")));
    }
    Ok(v)
}

/// Applies `GLME_DEFAULT_TOL` (if set) and then each `NAME=VALUE` override.
pub fn resolve_tolerances(env_default: Option<&str>, overrides: &[String]) -> Result<CliTolerances> {
    let base = match env_default {
        Some(s) => parse_positive(ENV_DEFAULT_TOL, s)?,
        None => DEFAULT_TOL,
    };
    let mut out = CliTolerances {
        validation: Tolerances::uniform(base),
        freq: None,
        oracle: 1e-8,
        oracle_trajectory: 1e-6,
    };
    for o in overrides {
        let (name, value) = o
            .split_once('=')
            .ok_or_else(|| GlmeError::Parse(format!("--tol expects NAME=VALUE, got {o:?}")))?;
        let v = parse_positive(name, value)?;
        match name {
            "hermitian" => out.validation.hermitian = v,
            "psd" => out.validation.psd = v,
            "hamiltonian" => out.validation.hamiltonian = v,
            "freq" => out.freq = Some(v),
            "oracle" => out.oracle = v,
            "oracle_trajectory" => out.oracle_trajectory = v,
            _ => {
                return Err(GlmeError::Parse(format!(
                    "unknown tolerance {name:?}; expected one of {}",
                    TOLERANCE_NAMES.join(", ")
                )))
            }
        }
    }
    Ok(out)
}

/// Outcome of a subcommand: stdout text and exit code.
struct Report {
    stdout: String,
    code: i32,
}

impl Report {
    fn ok(v: &Value) -> Self {
        Self {
            stdout: io::to_json_string(v),
            code: 0,
        }
    }
}

fn exit_code(e: &GlmeError) -> i32 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}

pub fn error_json(e: &GlmeError) -> Value {
    json!({ "error": e.kind(), "code": exit_code(e), "detail": e.to_string() })
}

/// Parses `args`, runs the command and writes to the given streams.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let err = GlmeError::Parse(e.to_string().trim().to_string());
            let _ = write!(stderr, "{}", io::to_json_string(&error_json(&err)));
            return 2;
        }
    };
    let env = std::env::var(ENV_DEFAULT_TOL).ok();
    let result = resolve_tolerances(env.as_deref(), &cli.tol).and_then(|tol| execute(&cli.command, &tol));
    match result {
        Ok(r) => {
            let _ = write!(stdout, "{}", r.stdout);
            r.code
        }
        Err(e) => {
            let _ = write!(stderr, "{}", io::to_json_string(&error_json(&e)));
            exit_code(&e)
        }
    }
}

fn execute(cmd: &Command, tol: &CliTolerances) -> Result<Report> {
    match cmd {
        Command::Validate { model } => cmd_validate(model, tol),
        Command::Evolve {
            model,
            state,
            t_final,
            steps,
            times,
            method,
            output,
            format,
        } => {
            let grid = match times {
                Some(p) => io::parse_times(&io::read_text(p)?)?,
                None => uniform_grid(*t_final, *steps)?,
            };
            cmd_evolve(model, state.as_deref(), &grid, (*method).into(), output.as_deref(), *format, tol)
        }
        Command::SteadyState { model, output } => cmd_steady_state(model, output.as_deref(), tol),
        Command::Entanglement {
            model,
            state,
            measure,
            alpha,
            beta,
            doubled_eta,
        } => cmd_entanglement(model.as_deref(), state.as_deref(), *measure, *alpha, *beta, *doubled_eta, tol),
        Command::Assemble {
            couplings,
            spectral,
            output,
            kind,
        } => cmd_assemble(couplings, spectral, output, (*kind).into(), tol),
        Command::OracleCheck {
            model,
            fock_dim,
            t_final,
            steps,
        } => cmd_oracle_check(model, *fock_dim, uniform_grid(*t_final, *steps)?, tol),
    }
}

/// `steps + 1` points on `[0, t_final]`.
pub fn uniform_grid(t_final: f64, steps: usize) -> Result<Vec<f64>> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(GlmeError::structural("t_final", format!("must be finite and > 0, got {t_final}")));
    }
    if steps == 0 {
        return Err(GlmeError::structural("steps", "must be at least 1"));
    }
    Ok((0..=steps).map(|k| t_final * k as f64 / steps as f64).collect())
}

/// Loads a model and refuses it (exit 1, with the report) if validation fails.
fn load_valid_model(path: &Path, tol: &CliTolerances) -> Result<GeneralizedLindbladModel> {
    let model = io::load_model(path)?;
    let report = validate_model(&model, &tol.validation)?;
    if !report.is_valid {
        return Err(GlmeError::Domain(format!(
            "model failed validation: hermitian_defect {:e}, min_gamma_eigenvalue {:e}, hamiltonian_symmetry_defect {:e}",
            report.hermitian_defect, report.min_gamma_eigenvalue, report.hamiltonian_symmetry_defect
        )));
    }
    Ok(model)
}

fn cmd_validate(path: &Path, tol: &CliTolerances) -> Result<Report> {
    let model = io::load_model(path)?;
    let report = validate_model(&model, &tol.validation)?;
    let v = json!({
        "kind": model.flavor.as_str(),
        "n_modes": model.n_modes,
        "hermitian_defect": report.hermitian_defect,
        "min_gamma_eigenvalue": report.min_gamma_eigenvalue,
        "hamiltonian_symmetry_defect": report.hamiltonian_symmetry_defect,
        "is_valid": report.is_valid,
    });
    Ok(Report {
        stdout: io::to_json_string(&v),
        code: if report.is_valid { 0 } else { 1 },
    })
}

fn load_state(path: &Path) -> Result<StateFile> {
    let state = io::parse_state(&io::read_text(path)?)?;
    io::require_physical_state(&state, PHYSICALITY_TOL)?;
    Ok(state)
}

fn write_or_stdout(output: Option<&Path>, text: String, summary: Value) -> Result<Report> {
    match output {
        Some(p) => {
            io::write_atomic(p, &text)?;
            Ok(Report::ok(&summary))
        }
        None => Ok(Report { stdout: text, code: 0 }),
    }
}

fn cmd_evolve(
    model_path: &Path,
    state: Option<&Path>,
    times: &[f64],
    method: Method,
    output: Option<&Path>,
    format: OutputFormat,
    tol: &CliTolerances,
) -> Result<Report> {
    let model = load_valid_model(model_path, tol)?;
    let initial = match state {
        Some(p) => Some(load_state(p)?),
        None => None,
    };
    let n = model.n_modes;
    match model.flavor {
        Flavor::Bosonic => {
            let state0 = match initial {
                None => GaussianState::vacuum(n),
                Some(StateFile::Bosonic(s)) => s,
                Some(StateFile::Fermionic(_)) => {
                    return Err(GlmeError::structural("state", "fermionic state for a bosonic model"))
                }
            };
            let dd = bosonic::build_drift_diffusion(&model)?;
            let traj = bosonic::propagate_state(&dd, &state0, times, method)?;
            let mut phys = f64::INFINITY;
            for s in &traj.states {
                phys = phys.min(bosonic::check_physicality(&s.v, 0.0)?.1);
            }
            let last = traj.states.last().expect("non-empty grid");
            let purity = bosonic::purity(&last.v).ok();
            let summary = json!({
                "kind": "bosonic",
                "points": traj.times.len(),
                "t_final": traj.times.last(),
                "final_purity": purity,
                "physicality_min": phys,
            });
            let text = match format {
                OutputFormat::Csv => io::bosonic_csv(&traj),
                OutputFormat::Json => io::to_json_string(&io::bosonic_trajectory_json(&traj)),
            };
            write_or_stdout(output, text, summary)
        }
        Flavor::Fermionic => {
            let sigma0 = match initial {
                None => FermionicGaussianState::vacuum(n).sigma,
                Some(StateFile::Fermionic(s)) => s.sigma,
                Some(StateFile::Bosonic(_)) => {
                    return Err(GlmeError::structural("state", "bosonic state for a fermionic model"))
                }
            };
            let dd = fermionic::build_drift_diffusion_f(&model)?;
            let traj = fermionic::propagate_covariance_f(&dd, &sigma0, times, method)?;
            // margin 1 − max|λ(σ)|, non-negative for physical states
            let mut phys = f64::INFINITY;
            for s in &traj.states {
                phys = phys.min(1.0 - fermionic::check_physicality_f(&s.sigma, 0.0)?.1);
            }
            let last = traj.states.last().expect("non-empty grid");
            let summary = json!({
                "kind": "fermionic",
                "points": traj.times.len(),
                "t_final": traj.times.last(),
                "final_purity": fermionic::purity_f(&last.sigma).ok(),
                "physicality_min": phys,
            });
            let text = match format {
                OutputFormat::Csv => io::fermionic_csv(&traj),
                OutputFormat::Json => io::to_json_string(&io::fermionic_trajectory_json(&traj)),
            };
            write_or_stdout(output, text, summary)
        }
    }
}

fn rows(m: &RMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

fn steady_json(model: &GeneralizedLindbladModel) -> Result<(Value, StateFile)> {
    Ok(match model.flavor {
        Flavor::Bosonic => {
            let r = bosonic::steady_state_report(&bosonic::build_drift_diffusion(model)?)?;
            (
                json!({
                    "kind": "bosonic",
                    "V_ss": rows(&r.state.v),
                    "residual": r.residual,
                    "spectral_abscissa": r.spectral_abscissa,
                }),
                StateFile::Bosonic(r.state),
            )
        }
        Flavor::Fermionic => {
            let r = fermionic::steady_state_f_report(&fermionic::build_drift_diffusion_f(model)?)?;
            (
                json!({
                    "kind": "fermionic",
                    "sigma_ss": rows(&r.state.sigma),
                    "residual": r.residual,
                    "spectral_abscissa": r.spectral_abscissa,
                }),
                StateFile::Fermionic(r.state),
            )
        }
    })
}

fn cmd_steady_state(path: &Path, output: Option<&Path>, tol: &CliTolerances) -> Result<Report> {
    let model = load_valid_model(path, tol)?;
    let (v, _) = steady_json(&model)?;
    if let Some(p) = output {
        io::write_atomic(p, &io::to_json_string(&v))?;
    }
    Ok(Report::ok(&v))
}

fn duan_json(d: &DuanResult) -> Value {
    json!({ "measure": "duan", "value": d.quantity, "bound": d.bound, "entangled": d.entangled })
}

fn negativity_json(r: &NegativityResult) -> Value {
    json!({ "measure": "logneg", "value": r.value, "spectrum": r.auxiliary_spectrum })
}

fn cmd_entanglement(
    model: Option<&Path>,
    state: Option<&Path>,
    measure: Measure,
    alpha: f64,
    beta: f64,
    doubled_eta: bool,
    tol: &CliTolerances,
) -> Result<Report> {
    let state = match (model, state) {
        (_, Some(p)) => load_state(p)?,
        (Some(p), None) => steady_json(&load_valid_model(p, tol)?)?.1,
        (None, None) => return Err(GlmeError::Parse("entanglement needs --model or --state".into())),
    };
    let v = match (&state, measure) {
        (StateFile::Bosonic(s), Measure::Duan) => duan_json(&duan_bosonic(s, alpha, beta)?),
        (StateFile::Bosonic(s), Measure::Logneg) => negativity_json(&log_negativity_bosonic(&s.v, doubled_eta)?),
        (StateFile::Fermionic(s), Measure::Duan) => duan_json(&duan_fermionic(&s.sigma, alpha, beta)?),
        (StateFile::Fermionic(s), Measure::Logneg) => negativity_json(&log_negativity_fermionic(&s.sigma)?),
    };
    Ok(Report::ok(&v))
}

fn cmd_assemble(
    couplings: &Path,
    spectral: &Path,
    output: &Path,
    flavor: Flavor,
    tol: &CliTolerances,
) -> Result<Report> {
    let table = io::parse_coupling_table(&io::read_text(couplings)?)?;
    let spectra = io::parse_spectral(&io::read_text(spectral)?)?;
    let tol_freq = tol.freq.unwrap_or_else(|| table.default_tol_freq());
    let rates = assemble_rates(&table, &spectra, tol_freq)?;
    let model = build_model(&rates, &table, flavor)?;
    io::write_atomic(output, &io::to_json_string(&io::model_to_json(&model)))?;
    Ok(Report::ok(&json!({
        "kind": flavor.as_str(),
        "n_modes": model.n_modes,
        "tol_freq": tol_freq,
        "rate_symmetry_defect": rates.symmetry_defect(),
        "output": output.display().to_string(),
    })))
}

/// Deterministic mildly mixed, displaced and squeezed product state.
fn bosonic_probe_state(n_modes: usize, fock_dim: usize) -> DenseOperator {
    let mut rho = DenseOperator::from_ket(&[c64(1.0, 0.0)]);
    for j in 0..n_modes {
        let s = 0.1 + 0.05 * j as f64;
        let one = dense::bosonic::single_mode_gaussian(fock_dim, 0.05, s, 0.7 * j as f64, c64(0.3, -0.2 + 0.1 * j as f64));
        rho = rho.kron(&one);
    }
    rho
}

/// Gibbs state of a fixed, generic kernel.
fn fermionic_probe_state(n_modes: usize) -> Result<DenseOperator> {
    let d = 2 * n_modes;
    let k = RMat::from_fn(d, d, |a, b| {
        if a == b {
            0.0
        } else {
            let x = 0.4 * ((a + 2 * b) as f64).sin();
            let y = 0.4 * ((b + 2 * a) as f64).sin();
            x - y
        }
    });
    dense::fermionic::gibbs_state(&k)
}

fn hermitian_part_defect(l: &dense::DenseLiouvillian, rho: &DenseOperator) -> (f64, f64) {
    let out = l.apply(rho);
    (out.trace().norm(), out.hermitian_defect())
}

fn cmd_oracle_check(path: &Path, fock_dim: Option<usize>, times: Vec<f64>, tol: &CliTolerances) -> Result<Report> {
    let model = load_valid_model(path, tol)?;
    let n = model.n_modes;
    let mut checks = BTreeMap::new();
    let dim;
    let trajectory;
    match model.flavor {
        Flavor::Bosonic => {
            if n > 2 {
                return Err(GlmeError::structural(
                    "oracle-check",
                    format!("bosonic dense engine supports at most 2 modes, model has {n}"),
                ));
            }
            let fock = fock_dim.unwrap_or(if n == 1 { 30 } else { 16 });
            let engine = DenseBosonicEngine::new(&model, fock)?;
            dim = engine.dim();
            let rho = bosonic_probe_state(n, fock);
            checks.insert("moment_closure", bosonic_moment_closure(&model, &engine, &rho)?);
            let (tr, herm) = hermitian_part_defect(&engine.liouvillian, &rho);
            checks.insert("trace_preservation", tr);
            checks.insert("hermiticity_preservation", herm);
            let mut adj: f64 = 0.0;
            for j in 0..2 * n {
                let o = DenseOperator::from_cmat(&engine.quadrature(j).to_dense());
                adj = adj.max(adjoint_consistency_check(&engine.liouvillian, &o, &rho)?);
            }
            checks.insert("adjoint_consistency", adj);
            let dense_traj = engine.moment_trajectory(&rho, &times, DenseIntegrator::Taylor)?;
            let (m0, v0) = dense_traj[0].clone();
            let dd = bosonic::build_drift_diffusion(&model)?;
            let lib = bosonic::propagate_state(&dd, &GaussianState::new(m0, v0)?, &times, Method::Exact)?;
            let mut worst: f64 = 0.0;
            for ((m, v), s) in dense_traj.iter().zip(&lib.states) {
                worst = worst.max(max_abs_diff(v, &s.v)).max((m - &s.mean).amax());
            }
            trajectory = worst;
        }
        Flavor::Fermionic => {
            let engine = DenseFermionicEngine::new(&model)?;
            dim = engine.liouvillian.dim;
            let rho = fermionic_probe_state(n)?;
            checks.insert("moment_closure", fermionic_moment_closure(&model, &engine, &rho)?);
            let (tr, herm) = hermitian_part_defect(&engine.liouvillian, &rho);
            checks.insert("trace_preservation", tr);
            checks.insert("hermiticity_preservation", herm);
            let mut adj: f64 = 0.0;
            for j in 0..2 * n {
                let o = DenseOperator::from_cmat(&engine.majorana(j).to_dense());
                adj = adj.max(adjoint_consistency_check(&engine.liouvillian, &o, &rho)?);
            }
            checks.insert("adjoint_consistency", adj);
            let dense_traj = engine.sigma_trajectory(&rho, &times, DenseIntegrator::Taylor)?;
            let dd = fermionic::build_drift_diffusion_f(&model)?;
            let lib = fermionic::propagate_covariance_f(&dd, &dense_traj[0], &times, Method::Exact)?;
            trajectory = dense_traj
                .iter()
                .zip(&lib.states)
                .map(|(a, b)| max_abs_diff(a, &b.sigma))
                .fold(0.0, f64::max);
        }
    }
    let passed = checks.values().all(|&d| d <= tol.oracle) && trajectory <= tol.oracle_trajectory;
    let mut deviations: serde_json::Map<String, Value> =
        checks.into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    deviations.insert("trajectory".into(), json!(trajectory));
    let v = json!({
        "kind": model.flavor.as_str(),
        "dense_dim": dim,
        "deviations": deviations,
        "thresholds": { "checks": tol.oracle, "trajectory": tol.oracle_trajectory },
        "passed": passed,
    });
    Ok(Report {
        stdout: io::to_json_string(&v),
        code: if passed { 0 } else { 1 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let t = resolve_tolerances(Some("1e-8"), &["psd=1e-6".into(), "freq=0.01".into()]).unwrap();
        assert_eq!(t.validation.hermitian, 1e-8);
        assert_eq!(t.validation.psd, 1e-6);
        assert_eq!(t.freq, Some(0.01));
        assert!(matches!(resolve_tolerances(None, &["bogus=1".into()]), Err(GlmeError::Parse(_))));
        assert!(resolve_tolerances(Some("-1"), &[]).is_err());
        assert!(resolve_tolerances(None, &["psd".into()]).is_err());
    }

    #[test]
    fn grid_invariants() {
        assert_eq!(uniform_grid(1.0, 4).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(matches!(uniform_grid(0.0, 1), Err(GlmeError::Structural { .. })));
        assert!(uniform_grid(1.0, 0).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["glme", "evolve"], &mut out, &mut err), 2);
        let v: Value = serde_json::from_slice(&err).unwrap();
        assert_eq!(v["code"], json!(2));
        assert_eq!(v["error"], json!("parse"));
    }
}
