//! Scenario files: evolve one state under one force and write CSV outputs.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "force": { "kind": "constant", "f0": 0.7 },
//!   "state": { "kind": "fock", "n": 2 },
//!   "times": [0.0, 1.0],
//!   "representations": ["wavefunction", "wigner", "symplectic", "optical"],
//!   "frames": { "symplectic": [[1.0, 0.0], [0.3, -1.2]], "optical": [0.0, 0.785] },
//!   "grids": { "x": { "min": -10.0, "max": 10.0, "n_points": 1001 } },
//!   "output": "out"
//! }
//! ```
//!
//! Every output file is written to a temporary name and renamed into place,
//! and `manifest.sha256` lists all of them in `sha256sum` format.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::ForceModel;
use crate::error::Error;
use crate::grid::{PlaneGrid, UniformGrid};
use crate::phasespace::{wigner_evolve, AnalyticWigner, WignerGrid};
use crate::propagator::propagate;
use crate::states::{default_grid, InitialState};
use crate::tomography::{closed_form_tomogram, default_x_grid, Frame, OpticalAngle, SymplecticFrame, TomogramSlice};

pub const MANIFEST_NAME: &str = "manifest.sha256";
pub const DEFAULT_OUTPUT: &str = "drivosc-out";

/// Slices whose integral misses 1 by more than this produce a warning.
const NORMALIZATION_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Wavefunction,
    Wigner,
    Symplectic,
    Optical,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frames {
    #[serde(default)]
    pub symplectic: Vec<[f64; 2]>,
    #[serde(default)]
    pub optical: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default)]
    pub wavefunction: Option<UniformGrid>,
    #[serde(default)]
    pub wigner: Option<PlaneGrid>,
    #[serde(default)]
    pub x: Option<UniformGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub force: ForceModel,
    pub state: InitialState,
    pub times: Vec<f64>,
    pub representations: Vec<Representation>,
    #[serde(default)]
    pub frames: Frames,
    #[serde(default)]
    pub grids: GridOverrides,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ScenarioError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn config(key: &str, err: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Config(format!("{key}: {err}"))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path).map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.force.validate().map_err(|e| config("force", e))?;
        self.state.validate().map_err(|e| config("state", e))?;
        if self.times.is_empty() {
            return Err(config("times", "at least one time is required"));
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(config("times", "times must be finite and nonnegative"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config("times", "times must be strictly ascending"));
        }
        if let Some(t_max) = self.force.t_max() {
            let last = self.times[self.times.len() - 1];
            if last > t_max {
                return Err(config("times", format!("{last} exceeds the tabulated force range {t_max}")));
            }
        }
        if self.representations.is_empty() {
            return Err(config("representations", "at least one representation is required"));
        }
        if self.wants(Representation::Symplectic) && self.frames.symplectic.is_empty() {
            return Err(config("frames.symplectic", "symplectic output needs at least one (mu, nu) pair"));
        }
        if self.wants(Representation::Optical) && self.frames.optical.is_empty() {
            return Err(config("frames.optical", "optical output needs at least one angle"));
        }
        for &[mu, nu] in &self.frames.symplectic {
            SymplecticFrame::new(mu, nu).map_err(|e| config("frames.symplectic", e))?;
        }
        for &theta in &self.frames.optical {
            OpticalAngle::new(theta).map_err(|e| config("frames.optical", e))?;
        }
        if let Some(g) = &self.grids.wavefunction {
            g.validate().map_err(|e| config("grids.wavefunction", e))?;
        }
        if let Some(g) = &self.grids.wigner {
            g.q.validate().map_err(|e| config("grids.wigner.q", e))?;
            g.p.validate().map_err(|e| config("grids.wigner.p", e))?;
        }
        if let Some(g) = &self.grids.x {
            g.validate().map_err(|e| config("grids.x", e))?;
        }
        Ok(())
    }

    fn wants(&self, rep: Representation) -> bool {
        self.representations.contains(&rep)
    }

    fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::new();
        for &t in &self.times {
            if self.wants(Representation::Wavefunction) {
                jobs.push(Job::Wavefunction(t));
            }
            if self.wants(Representation::Wigner) {
                jobs.push(Job::Wigner(t));
            }
            if self.wants(Representation::Symplectic) {
                for &[mu, nu] in &self.frames.symplectic {
                    jobs.push(Job::Tomogram(t, Frame::Symplectic(SymplecticFrame::new(mu, nu).expect("validated"))));
                }
            }
            if self.wants(Representation::Optical) {
                for &theta in &self.frames.optical {
                    jobs.push(Job::Tomogram(t, Frame::Optical(OpticalAngle::new(theta).expect("validated"))));
                }
            }
        }
        jobs
    }
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Wavefunction(f64),
    Wigner(f64),
    Tomogram(f64, Frame),
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub output_dir: PathBuf,
    /// File names relative to `output_dir`, sorted.
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

/// File name of one output, e.g. `symplectic_t1_mu0.3_nu-1.2.csv`.
pub fn output_name(rep: Representation, t: f64, frame: Option<Frame>) -> String {
    match (rep, frame) {
        (Representation::Symplectic, Some(f)) => {
            let f = f.symplectic();
            format!("symplectic_t{t}_mu{}_nu{}.csv", f.mu(), f.nu())
        }
        (Representation::Optical, Some(Frame::Optical(a))) => format!("optical_t{t}_theta{}.csv", a.theta()),
        (Representation::Wavefunction, _) => format!("wavefunction_t{t}.csv"),
        (Representation::Wigner, _) => format!("wigner_t{t}.csv"),
        (rep, frame) => panic!("no file name for {rep:?} with {frame:?}"),
    }
}

struct Rendered {
    name: String,
    bytes: Vec<u8>,
    warning: Option<String>,
}

fn metadata(scenario: &Scenario, t: f64) -> Vec<(String, String)> {
    vec![
        ("t".into(), crate::fmt_num(t)),
        ("state".into(), scenario.state.to_string()),
        ("force".into(), scenario.force.to_string()),
    ]
}

fn render(scenario: &Scenario, job: Job) -> Result<Rendered, ScenarioError> {
    let mut bytes = Vec::new();
    let io = |e: std::io::Error| ScenarioError::Io(e.to_string());
    match job {
        Job::Wavefunction(t) => {
            let grid = scenario.grids.wavefunction.unwrap_or_else(default_grid);
            let psi0 = scenario.state.wavefunction(grid)?;
            let psi = if t == 0.0 { psi0 } else { propagate(&psi0, &scenario.force, t)? };
            psi.write_csv(&mut bytes, &metadata(scenario, t)).map_err(io)?;
            Ok(Rendered {
                name: output_name(Representation::Wavefunction, t, None),
                bytes,
                warning: None,
            })
        }
        Job::Wigner(t) => {
            let grid = scenario.grids.wigner.unwrap_or_default();
            let evolved = wigner_evolve(AnalyticWigner(scenario.state), &scenario.force, t)?;
            let w = WignerGrid::from_function(grid, &evolved);
            w.write_csv(&mut bytes, &metadata(scenario, t)).map_err(io)?;
            Ok(Rendered {
                name: output_name(Representation::Wigner, t, None),
                bytes,
                warning: None,
            })
        }
        Job::Tomogram(t, frame) => {
            let x_grid = scenario.grids.x.unwrap_or_else(default_x_grid);
            let slice = closed_form_tomogram(&scenario.state, &scenario.force, t, frame, x_grid)?;
            slice.write_csv(&mut bytes, &metadata(scenario, t)).map_err(io)?;
            let rep = match frame {
                Frame::Symplectic(_) => Representation::Symplectic,
                Frame::Optical(_) => Representation::Optical,
            };
            let name = output_name(rep, t, Some(frame));
            let warning = normalization_warning(&name, &slice);
            Ok(Rendered { name, bytes, warning })
        }
    }
}

fn normalization_warning(name: &str, slice: &TomogramSlice) -> Option<String> {
    let integral = slice.integral();
    ((integral - 1.0).abs() > NORMALIZATION_WARNING)
        .then(|| format!("{name}: slice integrates to {integral:.9}; widen grids.x to capture the distribution"))
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), ScenarioError> {
    let io = |e: std::io::Error| ScenarioError::Io(format!("{name}: {e}"));
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, dir.join(name)).map_err(io)
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Runs `scenario`, writing into `out` if given, else its `output` entry.
pub fn run_scenario(scenario: &Scenario, out: Option<&Path>) -> Result<RunReport, ScenarioError> {
    scenario.validate()?;
    let output_dir = out
        .map(Path::to_path_buf)
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let rendered: Vec<Rendered> = scenario
        .jobs()
        .into_par_iter()
        .map(|job| render(scenario, job))
        .collect::<Result<_, _>>()?;

    fs::create_dir_all(&output_dir).map_err(|e| ScenarioError::Io(format!("{}: {e}", output_dir.display())))?;
    let mut manifest = String::new();
    let mut files = Vec::with_capacity(rendered.len());
    let mut warnings = Vec::new();
    let mut sorted = rendered;
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    for item in sorted {
        write_atomic(&output_dir, &item.name, &item.bytes)?;
        let _ = writeln!(manifest, "{}  {}", sha256_hex(&item.bytes), item.name);
        files.push(item.name);
        warnings.extend(item.warning);
    }
    write_atomic(&output_dir, MANIFEST_NAME, manifest.as_bytes())?;
    Ok(RunReport {
        output_dir,
        files,
        warnings,
    })
}

/// Loads and runs a scenario file.
pub fn run_scenario_file(path: &Path, out: Option<&Path>) -> Result<RunReport, ScenarioError> {
    run_scenario(&Scenario::load(path)?, out)
}
