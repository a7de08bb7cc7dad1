//! JSON/CSV file formats and deterministic number formatting.
//!
//! Every float written by this module uses 17 significant digits with a
//! lowercase exponent, so output is byte-for-byte reproducible.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bosonic::{GaussianState, Trajectory};
use crate::error::{GlmeError, Result};
use crate::fermionic::{FermionicGaussianState, FermionicTrajectory};
use crate::linalg::{c64, CMat, RMat, RVec};
use crate::model::{
    ladder_to_canonical, CouplingCoefficients, DecoherenceMatrix, Flavor, GeneralizedLindbladModel,
};
use crate::reservoir::{CouplingTable, CouplingTerm, Sign, SpectralFunctions, Spectrum};

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes `v` with two-space indentation and [`format_f64`] floats.
/// Non-finite floats become `null`.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if x.is_finite() {
                    out.push_str(&format_f64(x));
                } else {
                    out.push_str("null");
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // numeric rows stay on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| GlmeError::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(|e| GlmeError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        GlmeError::Io(format!("{}: {e}", path.display()))
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| GlmeError::Io(format!("{}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        GlmeError::Parse(format!("{what}: {e} (line {}, column {})", e.line(), e.column()))
    })
}

fn real_matrix(rows: &[Vec<f64>], what: &str) -> Result<RMat> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(GlmeError::Parse(format!("{what}: rows have different lengths")));
    }
    Ok(RMat::from_fn(r, c, |i, j| rows[i][j]))
}

fn complex_matrix(rows: &[Vec<[f64; 2]>], cols: usize, what: &str) -> Result<CMat> {
    if rows.iter().any(|row| row.len() != cols) {
        return Err(GlmeError::Parse(format!("{what}: every row must have {cols} entries")));
    }
    Ok(CMat::from_fn(rows.len(), cols, |i, j| c64(rows[i][j][0], rows[i][j][1])))
}

fn real_rows(m: &RMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

fn complex_rows(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    kind: Flavor,
    n_modes: usize,
    hamiltonian: Vec<Vec<f64>>,
    #[serde(rename = "F", default)]
    f: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "Gamma", default)]
    gamma: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    ladder_basis: bool,
}

/// Parses a model file. Shapes and finiteness are enforced here; Hermiticity
/// and positivity are left to [`crate::model::validate_model`].
pub fn parse_model(text: &str) -> Result<GeneralizedLindbladModel> {
    let file: ModelFile = parse_json(text, "model")?;
    let d = 2 * file.n_modes;
    if file.n_modes == 0 {
        return Err(GlmeError::Parse("model: n_modes must be at least 1".into()));
    }
    let h = real_matrix(&file.hamiltonian, "hamiltonian")?;
    if h.shape() != (d, d) {
        return Err(GlmeError::Parse(format!("model: hamiltonian must be {d}x{d}, got {:?}", h.shape())));
    }
    let f = complex_matrix(&file.f, d, "F")?;
    let m = f.nrows();
    let gamma = complex_matrix(&file.gamma, m, "Gamma")?;
    if gamma.nrows() != m {
        return Err(GlmeError::Parse(format!("model: Gamma must be {m}x{m} to match F")));
    }
    let couplings = if file.ladder_basis {
        ladder_to_canonical(&f, file.kind)?
    } else {
        CouplingCoefficients::new(f)?
    };
    GeneralizedLindbladModel::new(file.kind, file.n_modes, h, DecoherenceMatrix::new(gamma)?, couplings)
}

pub fn load_model(path: &Path) -> Result<GeneralizedLindbladModel> {
    parse_model(&read_text(path)?)
}

/// Model file in the canonical basis.
pub fn model_to_json(model: &GeneralizedLindbladModel) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), json!(model.flavor.as_str()));
    map.insert("n_modes".into(), json!(model.n_modes));
    map.insert("hamiltonian".into(), real_rows(&model.hamiltonian));
    map.insert("F".into(), complex_rows(model.f()));
    map.insert("Gamma".into(), complex_rows(model.gamma()));
    Value::Object(map)
}

/// A covariance-level state read from a state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Bosonic(GaussianState),
    Fermionic(FermionicGaussianState),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFileRaw {
    kind: Flavor,
    #[serde(default)]
    mean: Option<Vec<f64>>,
    #[serde(rename = "V", default)]
    v: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    sigma: Option<Vec<Vec<f64>>>,
}

/// `{"kind": "bosonic", "mean"?: [...], "V": [[...]]}` or
/// `{"kind": "fermionic", "sigma": [[...]]}`.
pub fn parse_state(text: &str) -> Result<StateFile> {
    let raw: StateFileRaw = parse_json(text, "state")?;
    match raw.kind {
        Flavor::Bosonic => {
            let v = real_matrix(
                raw.v.as_deref().ok_or_else(|| GlmeError::Parse("state: bosonic state needs V".into()))?,
                "V",
            )?;
            let mean = match raw.mean {
                Some(m) => RVec::from_vec(m),
                None => RVec::zeros(v.nrows()),
            };
            Ok(StateFile::Bosonic(GaussianState::new(mean, v)?))
        }
        Flavor::Fermionic => {
            let s = real_matrix(
                raw.sigma
                    .as_deref()
                    .ok_or_else(|| GlmeError::Parse("state: fermionic state needs sigma".into()))?,
                "sigma",
            )?;
            Ok(StateFile::Fermionic(FermionicGaussianState::new(s)?))
        }
    }
}

/// Rejects states violating `V + iΩ ≥ 0` or `|λ(σ)| ≤ 1` by more than `tol`.
pub fn require_physical_state(state: &StateFile, tol: f64) -> Result<()> {
    match state {
        StateFile::Bosonic(g) => {
            let (ok, margin) = crate::bosonic::check_physicality(&g.v, tol)?;
            if !ok {
                return Err(GlmeError::Unphysical {
                    detail: format!("min eig(V + iΩ) = {margin:e}"),
                });
            }
        }
        StateFile::Fermionic(f) => {
            let (ok, top) = crate::fermionic::check_physicality_f(&f.sigma, tol)?;
            if !ok {
                return Err(GlmeError::Unphysical {
                    detail: format!("max |λ(σ)| = {top}"),
                });
            }
        }
    }
    Ok(())
}

pub fn bosonic_state_to_json(state: &GaussianState) -> Value {
    json!({
        "kind": "bosonic",
        "mean": state.mean.iter().copied().collect::<Vec<f64>>(),
        "V": real_rows(&state.v),
    })
}

pub fn fermionic_state_to_json(state: &FermionicGaussianState) -> Value {
    json!({ "kind": "fermionic", "sigma": real_rows(&state.sigma) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingFile {
    mode_frequencies: Vec<f64>,
    #[serde(default)]
    couplings: Vec<CouplingEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingEntry {
    mode: usize,
    channel: usize,
    sign: String,
    c: f64,
    #[serde(rename = "Omega")]
    omega: f64,
}

fn parse_sign(s: &str) -> Result<Sign> {
    match s {
        "-" | "minus" => Ok(Sign::Minus),
        "+" | "plus" => Ok(Sign::Plus),
        other => Err(GlmeError::Parse(format!("couplings: unknown sign {other:?} (use \"-\" or \"+\")"))),
    }
}

/// `{"mode_frequencies": [...], "couplings": [{mode, channel, sign, c, Omega}]}`
/// with 0-based `mode` and `channel`; `sign` is `"-"` for `a_j`, `"+"` for `a_j†`.
pub fn parse_coupling_table(text: &str) -> Result<CouplingTable> {
    let file: CouplingFile = parse_json(text, "couplings")?;
    let terms = file
        .couplings
        .into_iter()
        .map(|e| {
            Ok(CouplingTerm {
                mode: e.mode,
                channel: e.channel,
                sign: parse_sign(&e.sign)?,
                c: e.c,
                omega: e.omega,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CouplingTable::new(file.mode_frequencies, terms)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralEntry {
    #[serde(default)]
    channel: Option<usize>,
    #[serde(default)]
    builtin: Option<String>,
    #[serde(default)]
    kappa: Option<f64>,
    #[serde(default)]
    nbar: Option<f64>,
    #[serde(default)]
    table: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    table2: Option<Vec<[f64; 3]>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpectralFile {
    One(SpectralEntry),
    Many(Vec<SpectralEntry>),
}

fn samples(rows: Option<Vec<[f64; 3]>>) -> Vec<(f64, Complex64)> {
    rows.unwrap_or_default()
        .into_iter()
        .map(|[f, re, im]| (f, c64(re, im)))
        .collect()
}

/// One spectrum object or an array of them. Each is either
/// `{"builtin": "flat", "kappa", "nbar"}` or `{"table": [[ν, re, im]], "table2"?: ...}`
/// where `table` samples `s1` and the optional `table2` samples `s2`.
/// Entries without `channel` apply to every channel not listed.
pub fn parse_spectral(text: &str) -> Result<SpectralFunctions> {
    let entries = match parse_json::<SpectralFile>(text, "spectral")? {
        SpectralFile::One(e) => vec![e],
        SpectralFile::Many(v) => v,
    };
    let mut out = SpectralFunctions::default();
    for e in entries {
        let spectrum = match e.builtin.as_deref() {
            Some("flat") => {
                if e.table.is_some() || e.table2.is_some() {
                    return Err(GlmeError::Parse("spectral: builtin and table are exclusive".into()));
                }
                let kappa = e.kappa.ok_or_else(|| GlmeError::Parse("spectral: flat needs kappa".into()))?;
                let nbar = e.nbar.unwrap_or(0.0);
                if !(kappa >= 0.0 && nbar >= 0.0 && kappa.is_finite() && nbar.is_finite()) {
                    return Err(GlmeError::Parse("spectral: kappa and nbar must be finite and >= 0".into()));
                }
                Spectrum::Flat { kappa, nbar }
            }
            Some(other) => return Err(GlmeError::Parse(format!("spectral: unknown builtin {other:?}"))),
            None => {
                if e.table.is_none() {
                    return Err(GlmeError::Parse("spectral: entry needs builtin or table".into()));
                }
                Spectrum::tabulated(samples(e.table), samples(e.table2))?
            }
        };
        let slot = match e.channel {
            Some(c) => out.per_channel.insert(c, spectrum).is_some(),
            None => out.shared.replace(spectrum).is_some(),
        };
        if slot {
            return Err(GlmeError::Parse("spectral: duplicate entry for a channel".into()));
        }
    }
    Ok(out)
}

/// Whitespace- or comma-separated times, or a JSON array.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return parse_json(trimmed, "times");
    }
    trimmed
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| GlmeError::Parse(format!("times: {s:?}: {e}"))))
        .collect()
}

pub fn bosonic_csv(traj: &Trajectory) -> String {
    let d = traj.states.first().map_or(0, |s| s.mean.len());
    let mut out = String::from("t");
    for j in 1..=d {
        let _ = write!(out, ",mean_{j}");
    }
    for j in 1..=d {
        for k in 1..=d {
            let _ = write!(out, ",V_{j}_{k}");
        }
    }
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        out.push_str(&format_f64(*t));
        for x in s.mean.iter() {
            out.push(',');
            out.push_str(&format_f64(*x));
        }
        for j in 0..d {
            for k in 0..d {
                out.push(',');
                out.push_str(&format_f64(s.v[(j, k)]));
            }
        }
        out.push('\n');
    }
    out
}

pub fn fermionic_csv(traj: &FermionicTrajectory) -> String {
    let d = traj.states.first().map_or(0, |s| s.sigma.nrows());
    let mut out = String::from("t");
    for j in 1..=d {
        for k in j + 1..=d {
            let _ = write!(out, ",sigma_{j}_{k}");
        }
    }
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        out.push_str(&format_f64(*t));
        for j in 0..d {
            for k in j + 1..d {
                out.push(',');
                out.push_str(&format_f64(s.sigma[(j, k)]));
            }
        }
        out.push('\n');
    }
    out
}

pub fn bosonic_trajectory_json(traj: &Trajectory) -> Value {
    let states: Vec<Value> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| {
            let mut v = bosonic_state_to_json(s);
            v.as_object_mut().map(|m| m.insert("t".into(), json!(t)));
            v
        })
        .collect();
    json!({ "kind": "bosonic", "states": states })
}

pub fn fermionic_trajectory_json(traj: &FermionicTrajectory) -> Value {
    let states: Vec<Value> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| {
            let mut v = fermionic_state_to_json(s);
            v.as_object_mut().map(|m| m.insert("t".into(), json!(t)));
            v
        })
        .collect();
    json!({ "kind": "fermionic", "states": states })
}
