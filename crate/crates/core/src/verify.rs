//! Self-check suite behind `drivosc verify`.
//!
//! Each check measures a worst-case error against an independent route and
//! compares it with a bound. `Level::Fast` uses smaller grids and fewer
//! samples and loosens every upper bound tenfold.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    classical_trajectory, drive_integrals, invariants_q0p0, liouville_evolve, ClassicalDensity, ForceModel, PhasePoint,
};
use crate::error::Result;
use crate::grid::{PlaneGrid, UniformGrid};
use crate::phasespace::{
    moyal_residual, wigner_evolve, wigner_from_wavefunction, AnalyticWigner, PhaseSpaceFunction, Sample,
};
use crate::propagator::{
    constant_force_green, fock_evolution_closed, green_free_limit, green_function, green_function_in_units, propagate,
    GreenKernelParams, UnitsConfig, DEFAULT_CAUSTIC_TOLERANCE,
};
use crate::states::{fock_wavefunction, overlap, FockIndex, InitialState, WaveFunctionGrid};
use crate::tomography::{
    classical_tomogram_evolve, closed_form_tomogram, evolution_map, optical_evolve, optical_residual, radon_from_wigner,
    sample_slice, symplectic_from_wavefunction, symplectic_residual, tomogram_evolve_with_map, AsOptical,
    CoherentTomogram, FockTomogram, Frame, OpticalAngle, OpticalTomogram, StateTomogram, SymplecticFrame,
    SymplecticTomogram, TomogramMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

impl Bound {
    fn admits(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    /// Error message if the check could not run.
    pub error: Option<String>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<CheckResult>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let _ = writeln!(out, "{:<width$}  {:>12}  {:>14}  {:>8}  result", "check", "measured", "bound", "seconds");
        for c in &self.checks {
            let bound = match c.bound {
                Bound::AtMost(b) => format!("<= {b:.1e}"),
                Bound::AtLeast(b) => format!(">= {b:.1e}"),
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.3e}  {:>14}  {:>8.2}  {}",
                c.name,
                c.measured,
                bound,
                c.elapsed.as_secs_f64(),
                if c.passed { "PASS" } else { "FAIL" }
            );
            if let Some(e) = &c.error {
                let _ = writeln!(out, "    error: {e}");
            }
        }
        let failed = self.failures().count();
        let _ = writeln!(
            out,
            "{} checks, {} failed, {:.1} s ({:?})",
            self.checks.len(),
            failed,
            self.elapsed.as_secs_f64(),
            self.level
        );
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub level: Level,
    /// Tomogram composition map under test.
    pub tomogram_map: TomogramMap,
}

impl VerifyOptions {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            tomogram_map: evolution_map,
        }
    }
}

pub fn verify(level: Level) -> Report {
    verify_with(VerifyOptions::new(level))
}

struct Settings {
    opts: VerifyOptions,
    loosen: f64,
    samples: usize,
    max_fock: usize,
    spectral_max: usize,
    wave_grid: UniformGrid,
    wide_grid: UniformGrid,
    wigner_grid: PlaneGrid,
    x_grid: UniformGrid,
    triple_times: Vec<f64>,
}

impl Settings {
    fn new(opts: VerifyOptions) -> Self {
        match opts.level {
            Level::Fast => Self {
                opts,
                loosen: 10.0,
                samples: 200,
                max_fock: 5,
                spectral_max: 10,
                wave_grid: UniformGrid { min: -12.0, max: 12.0, n_points: 1024 },
                wide_grid: UniformGrid { min: -12.0, max: 12.0, n_points: 1024 },
                wigner_grid: PlaneGrid::default(),
                x_grid: UniformGrid { min: -10.0, max: 10.0, n_points: 401 },
                triple_times: vec![1.0],
            },
            Level::Full => Self {
                opts,
                loosen: 1.0,
                samples: 1000,
                max_fock: 10,
                spectral_max: 40,
                wave_grid: crate::states::default_grid(),
                wide_grid: UniformGrid { min: -16.0, max: 16.0, n_points: 4096 },
                wigner_grid: PlaneGrid::square(8.0, 512).expect("valid grid"),
                x_grid: crate::tomography::default_x_grid(),
                triple_times: vec![0.4, 1.0, 2.5],
            },
        }
    }

    fn at_most(&self, tol: f64) -> Bound {
        Bound::AtMost(tol * self.loosen)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed)
    }
}

type CheckFn = fn(&Settings) -> Result<(f64, Bound)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("classical trajectory vs RK4", check_trajectories),
    ("phase-space invariants round trip", check_invariants),
    ("fock orthonormality", check_orthonormality),
    ("green function eigen-expansion", check_spectral),
    ("caustic sub-step composition", check_caustics),
    ("fock closed form fidelity", check_fock_fidelity),
    ("fock closed form phase", check_fock_phase),
    ("constant-force green modulus", check_constant_modulus),
    ("constant-force green phase", check_constant_phase),
    ("free-particle limit", check_free_limit),
    ("wigner normalization", check_wigner_norm),
    ("wigner marginals", check_wigner_marginals),
    ("wigner bound", check_wigner_bound),
    ("wigner evolution vs propagation", check_wigner_evolution),
    ("moyal residual", check_moyal),
    ("moyal negative control", check_moyal_negative),
    ("tomogram from wavefunction", check_tomogram_quadrature),
    ("tomographic residual (symplectic)", check_symplectic_residual),
    ("tomographic residual (optical)", check_optical_residual),
    ("tomographic negative controls", check_tomographic_negative),
    ("triple consistency", check_triple),
    ("classical-quantum coincidence", check_coincidence),
    ("tomogram normalization", check_normalization),
    ("tomogram nonnegativity", check_nonnegativity),
    ("tomogram homogeneity", check_homogeneity),
];

pub fn verify_with(opts: VerifyOptions) -> Report {
    let settings = Settings::new(opts);
    let start = Instant::now();
    let checks = CHECKS
        .iter()
        .map(|(name, check)| {
            let begun = Instant::now();
            let outcome = check(&settings);
            let elapsed = begun.elapsed();
            match outcome {
                Ok((measured, bound)) => CheckResult {
                    name,
                    measured,
                    bound,
                    passed: measured.is_finite() && bound.admits(measured),
                    error: None,
                    elapsed,
                },
                Err(e) => CheckResult {
                    name,
                    measured: f64::NAN,
                    bound: Bound::AtMost(0.0),
                    passed: false,
                    error: Some(e.to_string()),
                    elapsed,
                },
            }
        })
        .collect();
    Report {
        level: opts.level,
        checks,
        elapsed: start.elapsed(),
    }
}

/// Reference computations that share no code with the routes under test.
pub mod oracle {
    use crate::dynamics::{ForceModel, PhasePoint};

    /// Hamilton's equations `q' = p`, `p' = f(t) − q` by classical RK4.
    pub fn rk4(start: PhasePoint, force: &ForceModel, t: f64, steps: usize) -> PhasePoint {
        let h = t / steps as f64;
        let (mut q, mut p) = (start.q, start.p);
        let rhs = |s: f64, q: f64, p: f64| (p, force.value(s) - q);
        for k in 0..steps {
            let s = k as f64 * h;
            let (k1q, k1p) = rhs(s, q, p);
            let (k2q, k2p) = rhs(s + 0.5 * h, q + 0.5 * h * k1q, p + 0.5 * h * k1p);
            let (k3q, k3p) = rhs(s + 0.5 * h, q + 0.5 * h * k2q, p + 0.5 * h * k2p);
            let (k4q, k4p) = rhs(s + h, q + h * k3q, p + h * k3p);
            q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        }
        PhasePoint::new(q, p)
    }

    /// Wrapped difference of two angles, in `(−π, π]`.
    pub fn angle_diff(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(std::f64::consts::TAU);
        if d > std::f64::consts::PI {
            d - std::f64::consts::TAU
        } else {
            d
        }
    }
}

fn sample_forces() -> Vec<ForceModel> {
    vec![
        ForceModel::Zero,
        ForceModel::Constant { f0: 0.7 },
        ForceModel::Sinusoidal {
            amplitude: 0.9,
            frequency: 1.3,
            phase: 0.4,
        },
        ForceModel::tabulated(
            (0..=64).map(|i| i as f64 * 0.25).collect(),
            (0..=64).map(|i| (0.3 * i as f64).cos() * 0.5 + 0.1).collect(),
        )
        .expect("valid table"),
    ]
}

fn check_trajectories(s: &Settings) -> Result<(f64, Bound)> {
    let mut worst: f64 = 0.0;
    let steps = if s.opts.level == Level::Fast { 4000 } else { 40000 };
    for force in sample_forces() {
        for &t in &[0.5, 2.0, 4.0 * PI] {
            for &(q0, p0) in &[(0.0, 0.0), (1.0, -0.5), (-2.0, 1.5)] {
                let exact = classical_trajectory(q0, p0, &force, t)?;
                let reference = oracle::rk4(PhasePoint::new(q0, p0), &force, t, steps);
                worst = worst.max((exact.q - reference.q).abs()).max((exact.p - reference.p).abs());
            }
        }
    }
    Ok((worst, s.at_most(1e-6)))
}

fn check_invariants(s: &Settings) -> Result<(f64, Bound)> {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for force in sample_forces() {
        for _ in 0..s.samples / 4 {
            let start = PhasePoint::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let t = rng.random_range(0.0..15.0);
            let end = classical_trajectory(start.q, start.p, &force, t)?;
            let back = invariants_q0p0(end, &force, t)?;
            worst = worst.max((back.q - start.q).abs()).max((back.p - start.p).abs());
        }
    }
    Ok((worst, s.at_most(1e-12)))
}

fn fock_on(n: usize, grid: UniformGrid) -> Result<WaveFunctionGrid> {
    fock_wavefunction(FockIndex::new(n)?, grid)
}

fn check_orthonormality(s: &Settings) -> Result<(f64, Bound)> {
    let states: Vec<_> = (0..=s.max_fock).map(|n| fock_on(n, s.wave_grid)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (m, a) in states.iter().enumerate() {
        for (n, b) in states.iter().enumerate() {
            let want = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((overlap(a, b)? - want).norm());
        }
    }
    Ok((worst, s.at_most(1e-7)))
}

/// `∫ G(x, x', t) ψₘ(x') dx' = e^{−i(m+½)t} ψₘ(x)` on `|x| ≤ 3`.
fn check_spectral(s: &Settings) -> Result<(f64, Bound)> {
    let t = 1.3;
    let mut worst: f64 = 0.0;
    for m in 0..=s.spectral_max {
        let psi = fock_on(m, s.wide_grid)?;
        let evolved = propagate(&psi, &ForceModel::Zero, t)?;
        let phase = Complex64::from_polar(1.0, -(m as f64 + 0.5) * t);
        for (i, (a, b)) in evolved.amplitudes().iter().zip(psi.amplitudes()).enumerate() {
            if psi.x(i).abs() <= 3.0 {
                worst = worst.max((a - phase * b).norm());
            }
        }
    }
    Ok((worst, s.at_most(1e-4)))
}

fn check_caustics(s: &Settings) -> Result<(f64, Bound)> {
    let psi = fock_on(1, s.wave_grid)?;
    let mut worst: f64 = 0.0;
    for &t in &[PI, 4.0, 2.0 * PI + 0.3] {
        let evolved = propagate(&psi, &ForceModel::Zero, t)?;
        let want = Complex64::from_polar(1.0, -1.5 * t);
        worst = worst.max((overlap(&psi, &evolved)? - want).norm());
    }
    Ok((worst, s.at_most(1e-6)))
}

fn fock_overlaps(s: &Settings) -> Result<Vec<Complex64>> {
    let force = ForceModel::Constant { f0: 0.7 };
    (0..=2)
        .map(|n| {
            let closed = fock_evolution_closed(FockIndex::new(n)?, &force, 1.0, s.wave_grid)?;
            let numeric = propagate(&fock_on(n, s.wave_grid)?, &force, 1.0)?;
            overlap(&closed, &numeric)
        })
        .collect()
}

fn check_fock_fidelity(s: &Settings) -> Result<(f64, Bound)> {
    let worst = fock_overlaps(s)?.iter().map(|o| 1.0 - o.norm()).fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-5)))
}

fn check_fock_phase(s: &Settings) -> Result<(f64, Bound)> {
    let worst = fock_overlaps(s)?.iter().map(|o| o.arg().abs()).fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-4)))
}

fn constant_pairs(s: &Settings) -> Result<Vec<(Complex64, Complex64)>> {
    let mut rng = s.rng();
    (0..100)
        .map(|_| {
            let t = rng.random_range(0.1..3.0);
            let f0 = rng.random_range(-1.5..1.5);
            let (x, y) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let general = green_function(x, y, &GreenKernelParams::new(ForceModel::Constant { f0 }, t))?;
            let dedicated = constant_force_green(x, y, f0, t, DEFAULT_CAUSTIC_TOLERANCE)?;
            Ok((general, dedicated))
        })
        .collect()
}

fn check_constant_modulus(s: &Settings) -> Result<(f64, Bound)> {
    let worst = constant_pairs(s)?
        .iter()
        .map(|(g, d)| (g.norm() - d.norm()).abs() / d.norm())
        .fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-10)))
}

fn check_constant_phase(s: &Settings) -> Result<(f64, Bound)> {
    let diffs: Vec<f64> = constant_pairs(s)?.iter().map(|(g, d)| (g / d).arg()).collect();
    // best constant offset on the circle
    let mean = diffs.iter().map(|d| Complex64::from_polar(1.0, *d)).sum::<Complex64>().arg();
    let worst = diffs.iter().map(|d| oracle::angle_diff(*d, mean).abs()).fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-8)))
}

fn check_free_limit(s: &Settings) -> Result<(f64, Bound)> {
    let units = UnitsConfig::new(1.0, 1e-3, 1.0)?;
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for f0 in [0.0, 0.5] {
        for _ in 0..50 {
            let (x, y) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let g = green_function_in_units(x, y, 1.0, &ForceModel::Constant { f0 }, units, DEFAULT_CAUSTIC_TOLERANCE)?;
            let free = green_free_limit(x, y, 1.0, f0, units);
            worst = worst.max((g - free).norm() / free.norm());
        }
    }
    Ok((worst, s.at_most(1e-4)))
}

fn sample_states() -> Vec<InitialState> {
    vec![
        InitialState::Coherent { x0: 1.0, p0: -0.5 },
        InitialState::Fock { n: 0 },
        InitialState::Fock { n: 1 },
        InitialState::Fock { n: 2 },
        InitialState::Fock { n: 3 },
    ]
}

fn wigner_grids(s: &Settings) -> Result<Vec<(WaveFunctionGrid, crate::phasespace::WignerGrid)>> {
    sample_states()
        .into_iter()
        .map(|state| {
            let psi = state.wavefunction(s.wave_grid)?;
            let w = wigner_from_wavefunction(&psi, PlaneGrid::default())?;
            Ok((psi, w))
        })
        .collect()
}

fn check_wigner_norm(s: &Settings) -> Result<(f64, Bound)> {
    let worst = wigner_grids(s)?
        .iter()
        .map(|(_, w)| {
            let d = w.diagnostics();
            (d.integral - 1.0).abs().max(d.imag_residue)
        })
        .fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-4)))
}

fn check_wigner_marginals(s: &Settings) -> Result<(f64, Bound)> {
    let mut worst: f64 = 0.0;
    for (psi, w) in wigner_grids(s)? {
        let g = *w.grid();
        for iq in 0..g.q.n_points {
            worst = worst.max((w.position_marginal(iq) - psi.interpolate(g.q.point(iq)).norm_sqr()).abs());
        }
        for ip in 0..g.p.n_points {
            let p = g.p.point(ip);
            let amp: Complex64 = psi
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| a * Complex64::from_polar(psi.step(), -p * psi.x(i)))
                .sum();
            worst = worst.max((w.momentum_marginal(ip) - amp.norm_sqr() / (2.0 * PI)).abs());
        }
    }
    Ok((worst, s.at_most(1e-4)))
}

fn check_wigner_bound(s: &Settings) -> Result<(f64, Bound)> {
    let worst = wigner_grids(s)?
        .iter()
        .map(|(_, w)| w.diagnostics().max_abs - 1.0 / PI)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((worst.max(0.0), s.at_most(1e-6)))
}

fn check_wigner_evolution(s: &Settings) -> Result<(f64, Bound)> {
    let state = InitialState::Coherent { x0: 0.5, p0: -0.3 };
    let force = ForceModel::Constant { f0: 0.5 };
    let psi = state.wavefunction(s.wave_grid)?;
    let numeric = wigner_from_wavefunction(&propagate(&psi, &force, 1.0)?, PlaneGrid::default())?;
    let evolved = wigner_evolve(AnalyticWigner(state), &force, 1.0)?;
    let worst = numeric
        .grid()
        .nodes()
        .zip(numeric.values())
        .map(|((q, p), v)| (v - evolved.value(q, p)).abs())
        .fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-3)))
}

fn residual_grid() -> PlaneGrid {
    PlaneGrid::square(3.0, 9).expect("valid grid")
}

fn check_moyal(s: &Settings) -> Result<(f64, Bound)> {
    let force = ForceModel::Constant { f0: 1.0 };
    let w0 = AnalyticWigner(InitialState::Fock { n: 2 });
    let field = |q: f64, p: f64, t: f64| wigner_evolve(w0, &force, t).map_or(f64::NAN, |w| w.value(q, p));
    Ok((moyal_residual(field, &force, 0.7, &residual_grid()), s.at_most(1e-3)))
}

fn check_moyal_negative(_: &Settings) -> Result<(f64, Bound)> {
    let force = ForceModel::Constant { f0: 1.0 };
    let w0 = AnalyticWigner(InitialState::Fock { n: 2 });
    let reversed = |q: f64, p: f64, t: f64| {
        drive_integrals(&force, t).map_or(f64::NAN, |d| {
            let (sn, c) = t.sin_cos();
            w0.value(q * c + p * sn - d.sin_moment, -q * sn + p * c + d.cos_moment)
        })
    };
    Ok((moyal_residual(reversed, &force, 0.7, &residual_grid()), Bound::AtLeast(0.1)))
}

fn check_tomogram_quadrature(s: &Settings) -> Result<(f64, Bound)> {
    let mut worst: f64 = 0.0;
    for n in 0..=3 {
        let psi = fock_on(n, s.wave_grid)?;
        let w = FockTomogram { n: FockIndex::new(n)? };
        for (mu, nu) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.3, -1.2)] {
            let frame = Frame::Symplectic(SymplecticFrame::new(mu, nu)?);
            let quad = symplectic_from_wavefunction(&psi, frame, s.x_grid)?;
            worst = worst.max(quad.sup_distance(&sample_slice(&w, frame, s.x_grid)?)?);
        }
    }
    Ok((worst, s.at_most(1e-6)))
}

fn tomogram_points() -> Vec<(f64, f64, f64)> {
    (0..27)
        .map(|i| (-2.0 + 0.15 * i as f64, 0.5 + 0.05 * i as f64, 1.0 - 0.07 * i as f64))
        .collect()
}

fn optical_points() -> Vec<(f64, f64)> {
    (0..30).map(|i| (-2.5 + 0.17 * i as f64, 0.21 * i as f64)).collect()
}

fn check_symplectic_residual(s: &Settings) -> Result<(f64, Bound)> {
    let force = ForceModel::Constant { f0: 1.0 };
    let w0 = CoherentTomogram { x0: 0.5, p0: 0.2 };
    let map = s.opts.tomogram_map;
    let field = |x: f64, mu: f64, nu: f64, t: f64| {
        tomogram_evolve_with_map(w0, &force, t, map).map_or(f64::NAN, |w| w.density(x, mu, nu))
    };
    Ok((symplectic_residual(field, &force, 1.1, &tomogram_points()), s.at_most(1e-3)))
}

fn check_optical_residual(s: &Settings) -> Result<(f64, Bound)> {
    let force = ForceModel::Constant { f0: 0.8 };
    let w0 = AsOptical(StateTomogram::Fock(FockTomogram { n: FockIndex::new(2)? }));
    let field = |x: f64, th: f64, t: f64| optical_evolve(w0, &force, t).map_or(f64::NAN, |w| w.density(x, th));
    Ok((optical_residual(field, &force, 0.9, &optical_points()), s.at_most(1e-3)))
}

fn check_tomographic_negative(_: &Settings) -> Result<(f64, Bound)> {
    let force = ForceModel::Constant { f0: 1.0 };
    let w0 = CoherentTomogram { x0: 0.5, p0: 0.2 };
    fn backwards(d: &crate::dynamics::DriveIntegrals, x: f64, mu: f64, nu: f64) -> (f64, f64, f64) {
        let (s, c) = d.t.sin_cos();
        (x + mu * d.x_rest + nu * d.p_rest, mu * c + nu * s, nu * c - mu * s)
    }
    let field = |x: f64, mu: f64, nu: f64, t: f64| {
        tomogram_evolve_with_map(w0, &force, t, backwards).map_or(f64::NAN, |w| w.density(x, mu, nu))
    };
    let symplectic = symplectic_residual(field, &force, 1.1, &tomogram_points());
    let o0 = AsOptical(w0);
    let reversed = |x: f64, th: f64, t: f64| {
        drive_integrals(&force, t).map_or(f64::NAN, |d| o0.density(x + d.x_rest * th.cos() + d.p_rest * th.sin(), th - t))
    };
    let optical = optical_residual(reversed, &force, 1.1, &optical_points());
    Ok((symplectic.min(optical), Bound::AtLeast(0.1)))
}

fn check_triple(s: &Settings) -> Result<(f64, Bound)> {
    let force = ForceModel::Constant { f0: 0.7 };
    let states = [
        InitialState::Coherent { x0: 1.0, p0: 0.5 },
        InitialState::Fock { n: 0 },
        InitialState::Fock { n: 1 },
        InitialState::Fock { n: 2 },
    ];
    let frames = [(1.0, 0.0), (0.6, 0.8), (0.3, -1.2)];
    let mut worst: f64 = 0.0;
    for state in states {
        let psi0 = state.wavefunction(s.wave_grid)?;
        let w0 = wigner_from_wavefunction(&psi0, s.wigner_grid)?;
        let t0 = StateTomogram::of(&state)?;
        for &t in &s.triple_times {
            let psi = propagate(&psi0, &force, t)?;
            let wt = wigner_evolve(&w0, &force, t)?;
            let lazy = tomogram_evolve_with_map(t0, &force, t, s.opts.tomogram_map)?;
            for (mu, nu) in frames {
                let frame = Frame::Symplectic(SymplecticFrame::new(mu, nu)?);
                let closed = closed_form_tomogram(&state, &force, t, frame, s.x_grid)?;
                let routes = [
                    sample_slice(&lazy, frame, s.x_grid)?,
                    radon_from_wigner(&wt, frame, s.x_grid)?.slice,
                    symplectic_from_wavefunction(&psi, frame, s.x_grid)?,
                ];
                for (i, a) in routes.iter().enumerate() {
                    worst = worst.max(a.sup_distance(&closed)?);
                    for b in &routes[i + 1..] {
                        worst = worst.max(a.sup_distance(b)?);
                    }
                }
            }
        }
    }
    Ok((worst, s.at_most(1e-3)))
}

struct Density(ClassicalDensity);

impl PhaseSpaceFunction for Density {
    fn sample(&self, q: f64, p: f64) -> Sample {
        Sample::inside(self.0.value(q, p))
    }
}

fn check_coincidence(s: &Settings) -> Result<(f64, Bound)> {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    let rho0 = ClassicalDensity::gaussian(0.4, -0.7, 0.8);
    for force in sample_forces() {
        let t = 2.2;
        let classical = liouville_evolve(&rho0, &force, t)?;
        let quantum = wigner_evolve(Density(rho0.clone()), &force, t)?;
        let w0 = CoherentTomogram { x0: 0.4, p0: -0.7 };
        let tomo_q = tomogram_evolve_with_map(w0, &force, t, s.opts.tomogram_map)?;
        let tomo_c = classical_tomogram_evolve(w0, &force, t)?;
        for _ in 0..s.samples / 4 {
            let (q, p) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            worst = worst.max((classical.value(q, p) - quantum.value(q, p)).abs());
            let (x, mu, nu) = (rng.random_range(-4.0..4.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            worst = worst.max((tomo_q.density(x, mu, nu) - tomo_c.density(x, mu, nu)).abs());
        }
    }
    Ok((worst, s.at_most(1e-12)))
}

fn emitted_slices(s: &Settings) -> Result<Vec<crate::tomography::TomogramSlice>> {
    let force = ForceModel::Sinusoidal {
        amplitude: 0.6,
        frequency: 0.8,
        phase: 0.1,
    };
    let mut slices = Vec::new();
    for state in sample_states() {
        for t in [0.0, 1.0, 2.5] {
            for (mu, nu) in [(1.0, 0.0), (0.0, 1.0), (0.6, 0.8), (0.3, -1.2)] {
                let frame = Frame::Symplectic(SymplecticFrame::new(mu, nu)?);
                slices.push(closed_form_tomogram(&state, &force, t, frame, s.x_grid)?);
            }
            for theta in [0.0, 1.0, 4.0] {
                let frame = Frame::Optical(OpticalAngle::new(theta)?);
                slices.push(closed_form_tomogram(&state, &force, t, frame, s.x_grid)?);
            }
        }
        let psi = state.wavefunction(s.wave_grid)?;
        for (mu, nu) in [(1.0, 0.0), (0.6, 0.8), (0.3, -1.2)] {
            let frame = Frame::Symplectic(SymplecticFrame::new(mu, nu)?);
            slices.push(symplectic_from_wavefunction(&psi, frame, s.x_grid)?);
        }
    }
    Ok(slices)
}

fn check_normalization(s: &Settings) -> Result<(f64, Bound)> {
    let worst = emitted_slices(s)?.iter().map(|sl| (sl.integral() - 1.0).abs()).fold(0.0, f64::max);
    Ok((worst, s.at_most(1e-6)))
}

fn check_nonnegativity(s: &Settings) -> Result<(f64, Bound)> {
    let lowest = emitted_slices(s)?.iter().map(|sl| sl.min_density()).fold(f64::INFINITY, f64::min);
    Ok(((-lowest).max(0.0), s.at_most(1e-9)))
}

fn check_homogeneity(s: &Settings) -> Result<(f64, Bound)> {
    let base = UniformGrid::new(-5.0, 5.0, 101)?;
    let mut worst: f64 = 0.0;
    for state in sample_states() {
        let psi = state.wavefunction(s.wave_grid)?;
        let closed = StateTomogram::of(&state)?;
        for (mu, nu) in [(0.7, 0.4), (1.0, 0.0), (-0.2, 1.1)] {
            let frame = SymplecticFrame::new(mu, nu)?;
            let a = symplectic_from_wavefunction(&psi, Frame::Symplectic(frame), base)?;
            for lambda in [0.5, 2.0, 3.0] {
                let scaled = UniformGrid::new(-5.0 * lambda, 5.0 * lambda, 101)?;
                let b = symplectic_from_wavefunction(&psi, Frame::Symplectic(frame.scaled(lambda)?), scaled)?;
                for (i, (wa, wb)) in a.densities().iter().zip(b.densities()).enumerate() {
                    if *wa > 1e-12 {
                        worst = worst.max((wb * lambda - wa).abs() / wa);
                    }
                    let x = base.point(i);
                    let c = closed.density(x, mu, nu);
                    if c > 1e-12 {
                        let cs = closed.density(lambda * x, lambda * mu, lambda * nu);
                        worst = worst.max((cs * lambda - c).abs() / c);
                    }
                }
            }
        }
    }
    Ok((worst, s.at_most(1e-8)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_oracle_is_accurate() {
        let force = ForceModel::Constant { f0: 1.0 };
        let end = oracle::rk4(PhasePoint::new(0.0, 0.0), &force, PI / 2.0, 2000);
        assert!((end.q - 1.0).abs() < 1e-12 && (end.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angle_difference_wraps() {
        assert!((oracle::angle_diff(3.1, -3.1) - (6.2 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn bounds() {
        assert!(Bound::AtMost(1.0).admits(1.0));
        assert!(!Bound::AtLeast(0.1).admits(0.05));
    }
}
