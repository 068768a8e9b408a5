//! Config-file schema of the command-line front end, plus the structured
//! text record for filament states.
//!
//! Configs are TOML with one block per concern. Unknown fields anywhere are
//! rejected at parse time; value errors are collected in full before any
//! computation starts.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::filament::FilamentState;
use crate::laplace::{DomainSpec, GridMask};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub constants: PhysicalConstants,
    pub domain: Option<DomainBlock>,
    pub filament: Option<FilamentBlock>,
    pub simulate: Option<SimulateBlock>,
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    /// One of "disk", "rectangle", "mask", "polygon".
    pub shape: String,
    pub radius: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Mask file path, relative to the config file.
    pub file: Option<PathBuf>,
    /// Cell size for mask and polygon shapes, units of R0.
    pub h: Option<f64>,
    pub vertices: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FilamentBlock {
    /// Ring radius, units of R0.
    pub r: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub q: [f64; 3],
    /// Mode triples (n, Re j_n, Im j_n); the conjugate partner of each
    /// listed n is implied by the coupling and must not be listed itself.
    #[serde(default)]
    pub modes: Vec<(f64, f64, f64)>,
    /// Truncation of the mode ladder: entries with |n| above this are
    /// rejected.
    #[serde(default = "default_max_mode")]
    pub max_mode: u32,
}

fn default_max_mode() -> u32 {
    32
}

fn default_gamma() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    /// "nonlinear" or "linearized".
    pub mode: String,
    pub tau: f64,
    pub dt: Option<f64>,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_output_every")]
    pub output_every: usize,
    #[serde(default = "default_resample_every")]
    pub resample_every: usize,
    #[serde(default)]
    pub track_modes: Vec<i32>,
}

fn default_grid_n() -> usize {
    256
}
fn default_output_every() -> usize {
    16
}
fn default_resample_every() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub n_max: u32,
    pub k_max: Option<u32>,
    /// Number of cross-section eigenvalues to compute (M).
    pub eigenvalues: usize,
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
    #[serde(default)]
    pub include_n_zero: bool,
}

fn default_bin_width() -> f64 {
    0.05
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// Also emit gnuplot-ready .dat files next to the CSVs.
    #[serde(default = "default_true")]
    pub gnuplot: bool,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_true() -> bool {
    true
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: default_out_dir(),
            gnuplot: true,
        }
    }
}

/// Which blocks a command requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Needs {
    Domain,
    Filament,
    Simulate,
    Sweep,
}

/// Parses a config file. Unknown fields are rejected here.
pub fn load_config(path: &Path) -> Result<(RunConfig, PathBuf)> {
    let text = std::fs::read_to_string(path)?;
    let config: RunConfig =
        toml::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((config, base))
}

/// Full validation pass. Collects every bad field before failing; returns
/// advisory warnings on success.
pub fn validate(config: &RunConfig, needs: &[Needs]) -> Result<Vec<String>> {
    let mut errors: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    if let Err(e) = config.constants.validate() {
        errors.push(format!("constants: {e}"));
    }

    for need in needs {
        match need {
            Needs::Domain => match &config.domain {
                None => errors.push("domain: block required by this command".into()),
                Some(d) => validate_domain(d, &mut errors),
            },
            Needs::Filament => match &config.filament {
                None => errors.push("filament: block required by this command".into()),
                Some(f) => validate_filament(f, &config.constants, &mut errors, &mut warnings),
            },
            Needs::Simulate => match &config.simulate {
                None => errors.push("simulate: block required by this command".into()),
                Some(s) => validate_simulate(s, &mut errors),
            },
            Needs::Sweep => match &config.sweep {
                None => errors.push("sweep: block required by this command".into()),
                Some(s) => validate_sweep(s, &mut errors),
            },
        }
    }

    if errors.is_empty() {
        Ok(warnings)
    } else {
        Err(Error::ConfigInvalid(errors))
    }
}

fn validate_domain(d: &DomainBlock, errors: &mut Vec<String>) {
    let require = |field: &str, ok: bool, errors: &mut Vec<String>| {
        if !ok {
            errors.push(format!("domain.{field}: required for shape {:?}", d.shape));
        }
    };
    match d.shape.as_str() {
        "disk" => {
            require("radius", d.radius.is_some(), errors);
            if let Some(r) = d.radius {
                if !(r > 0.0) || !r.is_finite() {
                    errors.push(format!("domain.radius: must be positive, got {r}"));
                }
            }
        }
        "rectangle" => {
            require("a", d.a.is_some(), errors);
            require("b", d.b.is_some(), errors);
            for (name, v) in [("a", d.a), ("b", d.b)].into_iter() {
                if let Some(v) = v {
                    if !(v > 0.0) || !v.is_finite() {
                        errors.push(format!("domain.{name}: must be positive, got {v}"));
                    }
                }
            }
        }
        "mask" => {
            require("file", d.file.is_some(), errors);
            require("h", d.h.is_some(), errors);
        }
        "polygon" => {
            require("vertices", d.vertices.is_some(), errors);
            require("h", d.h.is_some(), errors);
            if let Some(v) = &d.vertices {
                if v.len() < 3 {
                    errors.push(format!(
                        "domain.vertices: need at least 3 vertices, got {}",
                        v.len()
                    ));
                }
            }
        }
        other => errors.push(format!(
            "domain.shape: unknown shape {other:?} (expected disk, rectangle, mask or polygon)"
        )),
    }
    if let Some(h) = d.h {
        if !(h > 0.0) || !h.is_finite() {
            errors.push(format!("domain.h: must be positive, got {h}"));
        }
    }
}

fn validate_filament(
    f: &FilamentBlock,
    c: &PhysicalConstants,
    errors: &mut Vec<String>,
    warnings: &mut Vec<String>,
) {
    if !(f.r > 0.0) || !f.r.is_finite() {
        errors.push(format!("filament.r: must be positive, got {}", f.r));
    } else if c.r0.is_finite() && f.r > 0.5 * c.r0 {
        warnings.push(format!(
            "filament.r = {} is not small against R0 = {}; the thin-ring \
             expansion degrades above R = 0.5 R0",
            f.r, c.r0
        ));
    }
    if !f.gamma.is_finite() {
        errors.push("filament.gamma: must be finite".into());
    }
    let mut seen: BTreeSet<i32> = BTreeSet::new();
    for (idx, (n, re, im)) in f.modes.iter().enumerate() {
        if n.fract() != 0.0 || n.abs() > 1024.0 {
            errors.push(format!(
                "filament.modes[{idx}]: mode index must be a small integer, got {n}"
            ));
            continue;
        }
        let ni = *n as i32;
        if ni.unsigned_abs() > f.max_mode {
            errors.push(format!(
                "filament.modes[{idx}]: |n| = {} exceeds the truncation max_mode = {}",
                ni.abs(),
                f.max_mode
            ));
        }
        if !seen.insert(ni.abs()) {
            errors.push(format!(
                "filament.modes[{idx}]: pair |n| = {} listed more than once \
                 (each entry already implies its conjugate partner)",
                ni.abs()
            ));
        }
        if !re.is_finite() || !im.is_finite() {
            errors.push(format!("filament.modes[{idx}]: amplitude must be finite"));
        }
        if ni == 0 && *im != 0.0 {
            errors.push(format!(
                "filament.modes[{idx}]: the n = 0 amplitude must be real"
            ));
        }
    }
}

fn validate_simulate(s: &SimulateBlock, errors: &mut Vec<String>) {
    match s.mode.as_str() {
        "nonlinear" | "linearized" => {}
        other => errors.push(format!(
            "simulate.mode: expected \"nonlinear\" or \"linearized\", got {other:?}"
        )),
    }
    if !(s.tau > 0.0) || !s.tau.is_finite() {
        errors.push(format!("simulate.tau: must be positive, got {}", s.tau));
    }
    if let Some(dt) = s.dt {
        if !(dt > 0.0) || !dt.is_finite() {
            errors.push(format!("simulate.dt: must be positive, got {dt}"));
        }
    }
    let min_n = if s.mode == "nonlinear" { 64 } else { 8 };
    if s.grid_n < min_n {
        errors.push(format!(
            "simulate.grid_n: need at least {min_n} for mode {:?}, got {}",
            s.mode, s.grid_n
        ));
    }
}

fn validate_sweep(s: &SweepBlock, errors: &mut Vec<String>) {
    if s.n_max == 0 {
        errors.push("sweep.n_max: must be at least 1".into());
    }
    if s.eigenvalues == 0 {
        errors.push("sweep.eigenvalues: must be at least 1".into());
    }
    if !(s.bin_width > 0.0) || !s.bin_width.is_finite() {
        errors.push(format!(
            "sweep.bin_width: must be positive, got {}",
            s.bin_width
        ));
    }
}

/// Builds the domain described by the block; mask files resolve relative to
/// `base_dir`.
pub fn build_domain(d: &DomainBlock, base_dir: &Path) -> Result<DomainSpec> {
    match d.shape.as_str() {
        "disk" => DomainSpec::disk(d.radius.unwrap_or(f64::NAN)),
        "rectangle" => DomainSpec::rectangle(d.a.unwrap_or(f64::NAN), d.b.unwrap_or(f64::NAN)),
        "mask" => {
            let file = d
                .file
                .as_ref()
                .ok_or_else(|| Error::validation("domain.file", "missing mask path"))?;
            let h = d
                .h
                .ok_or_else(|| Error::validation("domain.h", "missing cell size"))?;
            let path = if file.is_absolute() {
                file.clone()
            } else {
                base_dir.join(file)
            };
            let text = std::fs::read_to_string(&path)?;
            DomainSpec::mask(GridMask::from_text(&text, h)?)
        }
        "polygon" => {
            let vertices = d
                .vertices
                .as_ref()
                .ok_or_else(|| Error::validation("domain.vertices", "missing vertex list"))?;
            let h = d
                .h
                .ok_or_else(|| Error::validation("domain.h", "missing cell size"))?;
            DomainSpec::mask(GridMask::rasterize_polygon(vertices, h)?)
        }
        other => Err(Error::validation(
            "domain.shape",
            format!("unknown shape {other:?}"),
        )),
    }
}

/// Builds the filament state described by the block. Each mode triple
/// excites its conjugate pair.
pub fn build_filament(f: &FilamentBlock, c: &PhysicalConstants) -> Result<FilamentState> {
    let mut state = FilamentState::base_ring(Vector3::new(f.q[0], f.q[1], f.q[2]), f.r, f.gamma)?
        .with_epsilon(c.epsilon)?;
    for &(n, re, im) in &f.modes {
        state = state.excite(n as i32, Complex64::new(re, im))?;
    }
    Ok(state)
}

/// Structured text record for a filament state (TOML, mode list as
/// index/re/im triples).
pub fn filament_to_record(state: &FilamentState) -> String {
    let block = FilamentBlock {
        r: state.radius(),
        gamma: state.gamma(),
        q: [state.q().x, state.q().y, state.q().z],
        modes: state
            .modes()
            .iter()
            .map(|(&n, c)| (n as f64, c.re, c.im))
            .collect(),
        max_mode: (state.max_mode() as u32).max(32),
    };
    let mut doc = toml::map::Map::new();
    doc.insert(
        "filament".into(),
        toml::Value::try_from(&block).expect("serializable"),
    );
    doc.insert(
        "epsilon".into(),
        toml::Value::Float(state.epsilon()),
    );
    toml::to_string_pretty(&toml::Value::Table(doc)).expect("serializable")
}

/// Inverse of [`filament_to_record`].
pub fn filament_from_record(text: &str) -> Result<FilamentState> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Record {
        filament: FilamentBlock,
        #[serde(default)]
        epsilon: f64,
    }
    let record: Record = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    let f = &record.filament;
    let mut modes = std::collections::BTreeMap::new();
    for &(n, re, im) in &f.modes {
        if n.fract() != 0.0 {
            return Err(Error::validation(
                "filament.modes",
                format!("mode index must be an integer, got {n}"),
            ));
        }
        modes.insert(n as i32, Complex64::new(re, im));
    }
    FilamentState::new(
        Vector3::new(f.q[0], f.q[1], f.q[2]),
        f.r,
        f.gamma,
        record.epsilon,
        modes,
    )
}
