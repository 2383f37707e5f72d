//! Run configuration: defaults mirroring the reference experiment, TOML
//! config files (fail-closed on unknown keys) and flag overrides.

use crate::error::{Error, Result};
use crate::scheme::Method;
use serde::Deserialize;
use std::path::PathBuf;

/// Driver workflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Single forced run on one mesh with error reporting.
    Run,
    /// Convergence sweep over a mesh list.
    Converge,
    /// Homogeneous (no forcing) energy/mass study.
    Stability,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "run" => Ok(Mode::Run),
            "converge" => Ok(Mode::Converge),
            "stability" => Ok(Mode::Stability),
            other => Err(Error::Config(format!(
                "mode: expected run|converge|stability, got '{other}'"
            ))),
        }
    }
}

pub fn parse_method(s: &str) -> Result<Method> {
    match s {
        "picard" => Ok(Method::Picard),
        "newton" => Ok(Method::Newton),
        other => Err(Error::Config(format!(
            "method: expected picard|newton, got '{other}'"
        ))),
    }
}

/// Fully-defaulted, validated driver configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    /// Mesh subdivisions; one entry for run/stability, strictly increasing
    /// list for converge.
    pub meshes: Vec<usize>,
    pub k: f64,
    pub t_final: f64,
    pub method: Method,
    /// Nonlinear stopping tolerance.
    pub tol: f64,
    pub max_nl_iter: Option<usize>,
    pub linear_tol: f64,
    pub linear_max_iter: usize,
    pub out_dir: PathBuf,
    /// Snapshot stride; 0 keeps only the final state.
    pub snapshots: usize,
    /// Include the n = 0 record in l-infinity aggregates.
    pub include_step0_linf: bool,
    /// Include the n = 0 record in l2 aggregates.
    pub include_step0_l2: bool,
    pub uniqueness_warn_threshold: f64,
    /// The stability study verifies identities near machine precision, so
    /// it runs with its own, tighter tolerances.
    pub stability_tol: f64,
    pub stability_linear_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Run,
            meshes: vec![40],
            k: 1e-5,
            t_final: 1e-3,
            method: Method::Newton,
            tol: 1e-6,
            max_nl_iter: None,
            linear_tol: 1e-10,
            linear_max_iter: 100_000,
            out_dir: PathBuf::from("out"),
            snapshots: 0,
            include_step0_linf: true,
            include_step0_l2: false,
            uniqueness_warn_threshold: 1e3,
            stability_tol: 1e-10,
            stability_linear_tol: 1e-13,
        }
    }
}

/// The TOML file schema; every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mode: Option<String>,
    m: Option<MeshSpec>,
    k: Option<f64>,
    #[serde(rename = "T")]
    t_final: Option<f64>,
    method: Option<String>,
    tol: Option<f64>,
    max_nl_iter: Option<usize>,
    linear_tol: Option<f64>,
    linear_max_iter: Option<usize>,
    out: Option<String>,
    snapshots: Option<usize>,
    include_step0_linf: Option<bool>,
    include_step0_l2: Option<bool>,
    uniqueness_warn_threshold: Option<f64>,
    stability_tol: Option<f64>,
    stability_linear_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MeshSpec {
    One(usize),
    Many(Vec<usize>),
}

/// Flag-level overrides; `None` keeps the file/default value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub meshes: Option<Vec<usize>>,
    pub k: Option<f64>,
    pub t_final: Option<f64>,
    pub method: Option<Method>,
    pub tol: Option<f64>,
    pub max_nl_iter: Option<usize>,
    pub linear_tol: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub snapshots: Option<usize>,
    pub include_step0_linf: Option<bool>,
    pub include_step0_l2: Option<bool>,
}

/// Builds the final configuration: defaults, then the optional config
/// file, then flag overrides; validates the result.
pub fn parse_config(file_text: Option<&str>, overrides: &Overrides) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(text) = file_text {
        let file: FileConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        if let Some(mode) = &file.mode {
            config.mode = Mode::parse(mode)?;
        }
        if let Some(m) = file.m {
            config.meshes = match m {
                MeshSpec::One(m) => vec![m],
                MeshSpec::Many(ms) => ms,
            };
        }
        if let Some(k) = file.k {
            config.k = k;
        }
        if let Some(t) = file.t_final {
            config.t_final = t;
        }
        if let Some(method) = &file.method {
            config.method = parse_method(method)?;
        }
        if let Some(tol) = file.tol {
            config.tol = tol;
        }
        if file.max_nl_iter.is_some() {
            config.max_nl_iter = file.max_nl_iter;
        }
        if let Some(lt) = file.linear_tol {
            config.linear_tol = lt;
        }
        if let Some(li) = file.linear_max_iter {
            config.linear_max_iter = li;
        }
        if let Some(out) = file.out {
            config.out_dir = PathBuf::from(out);
        }
        if let Some(s) = file.snapshots {
            config.snapshots = s;
        }
        if let Some(b) = file.include_step0_linf {
            config.include_step0_linf = b;
        }
        if let Some(b) = file.include_step0_l2 {
            config.include_step0_l2 = b;
        }
        if let Some(u) = file.uniqueness_warn_threshold {
            config.uniqueness_warn_threshold = u;
        }
        if let Some(t) = file.stability_tol {
            config.stability_tol = t;
        }
        if let Some(t) = file.stability_linear_tol {
            config.stability_linear_tol = t;
        }
    }
    let o = overrides.clone();
    if let Some(mode) = o.mode {
        config.mode = mode;
    }
    if let Some(meshes) = o.meshes {
        config.meshes = meshes;
    }
    if let Some(k) = o.k {
        config.k = k;
    }
    if let Some(t) = o.t_final {
        config.t_final = t;
    }
    if let Some(method) = o.method {
        config.method = method;
    }
    if let Some(tol) = o.tol {
        config.tol = tol;
    }
    if o.max_nl_iter.is_some() {
        config.max_nl_iter = o.max_nl_iter;
    }
    if let Some(lt) = o.linear_tol {
        config.linear_tol = lt;
    }
    if let Some(out) = o.out_dir {
        config.out_dir = out;
    }
    if let Some(s) = o.snapshots {
        config.snapshots = s;
    }
    if let Some(b) = o.include_step0_linf {
        config.include_step0_linf = b;
    }
    if let Some(b) = o.include_step0_l2 {
        config.include_step0_l2 = b;
    }
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    if config.meshes.is_empty() {
        return Err(Error::Config("m: at least one mesh is required".into()));
    }
    for &m in &config.meshes {
        if m == 0 {
            return Err(Error::Config("m: mesh subdivisions must be >= 1".into()));
        }
    }
    if config.mode == Mode::Converge {
        if config.meshes.len() < 2 {
            return Err(Error::Config(
                "m: converge mode needs at least two meshes".into(),
            ));
        }
        if !config.meshes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "m: converge mode needs a strictly increasing mesh list".into(),
            ));
        }
    } else if config.meshes.len() != 1 {
        return Err(Error::Config(
            "m: run/stability modes take a single mesh".into(),
        ));
    }
    if !(config.k > 0.0) {
        return Err(Error::Config(format!(
            "k: must be positive, got {}",
            config.k
        )));
    }
    if config.t_final < config.k {
        return Err(Error::Config(format!(
            "T: must be at least k, got T = {} < k = {}",
            config.t_final, config.k
        )));
    }
    let ratio = config.t_final / config.k;
    if (ratio - ratio.round()).abs() > 1e-9 * ratio.round().max(1.0) {
        return Err(Error::Config(format!(
            "T: T/k = {ratio} must be an integer step count (to 1e-9 relative)"
        )));
    }
    if !(config.tol > 0.0) {
        return Err(Error::Config(format!(
            "tol: must be positive, got {}",
            config.tol
        )));
    }
    if !(config.linear_tol > 0.0) {
        return Err(Error::Config(format!(
            "linear_tol: must be positive, got {}",
            config.linear_tol
        )));
    }
    Ok(())
}

/// Parses a comma-separated mesh list flag value.
pub fn parse_mesh_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("m: invalid mesh size '{p}'")))
        })
        .collect()
}
