//! Symplectic and optical tomograms.
//!
//! The symplectic tomogram `w(X, μ, ν)` is the probability density of the
//! rotated and scaled quadrature `X = μq + νp`; the optical tomogram is its
//! restriction to `(μ, ν) = (cos θ, sin θ)`. Both are genuine probability
//! densities in `X`, and both evolve under the driven oscillator by a
//! composition with the classical flow.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{classical_trajectory, drive_integrals, DriveIntegrals, ForceModel, PhasePoint, RESIDUAL_STEP};
use crate::error::{Error, Result};
use crate::fmt_num;
use crate::grid::UniformGrid;
use crate::phasespace::PhaseSpaceFunction;
use crate::quadrature::{trapezoid, trapezoid_weight};
use crate::states::{hermite_function, FockIndex, InitialState, WaveFunctionGrid};

/// Relative threshold below which `ν` is treated as zero.
pub const NU_FLOOR: f64 = 1e-6;

/// Endpoint Wigner magnitude above which a Radon line counts as truncated.
pub const UNABSORBED_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticFrame {
    mu: f64,
    nu: f64,
}

impl SymplecticFrame {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !mu.is_finite() || !nu.is_finite() {
            return Err(Error::InvalidFrame(format!("non-finite frame ({mu}, {nu})")));
        }
        if mu == 0.0 && nu == 0.0 {
            return Err(Error::InvalidFrame("(mu, nu) = (0, 0)".into()));
        }
        Ok(Self { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn norm(&self) -> f64 {
        self.mu.hypot(self.nu)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda * self.mu, lambda * self.nu)
    }
}

/// Local-oscillator phase, kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalAngle(f64);

impl OpticalAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidFrame(format!("non-finite angle {theta}")));
        }
        let canonical = theta.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π
        Ok(Self(if canonical >= TAU { 0.0 } else { canonical }))
    }

    pub fn theta(&self) -> f64 {
        self.0
    }

    pub fn frame(&self) -> SymplecticFrame {
        let (s, c) = self.0.sin_cos();
        SymplecticFrame { mu: c, nu: s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame {
    Symplectic(SymplecticFrame),
    Optical(OpticalAngle),
}

impl Frame {
    pub fn symplectic(&self) -> SymplecticFrame {
        match self {
            Frame::Symplectic(f) => *f,
            Frame::Optical(a) => a.frame(),
        }
    }
}

impl From<SymplecticFrame> for Frame {
    fn from(f: SymplecticFrame) -> Self {
        Frame::Symplectic(f)
    }
}

impl From<OpticalAngle> for Frame {
    fn from(a: OpticalAngle) -> Self {
        Frame::Optical(a)
    }
}

pub fn default_x_grid() -> UniformGrid {
    UniformGrid {
        min: -10.0,
        max: 10.0,
        n_points: 1001,
    }
}

/// Tomogram values along one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TomogramSlice {
    frame: Frame,
    x_grid: UniformGrid,
    densities: Vec<f64>,
}

impl TomogramSlice {
    pub fn new(frame: Frame, x_grid: UniformGrid, densities: Vec<f64>) -> Result<Self> {
        x_grid.validate()?;
        if densities.len() != x_grid.n_points {
            return Err(Error::InvalidGrid(format!(
                "{} densities for {} X values",
                densities.len(),
                x_grid.n_points
            )));
        }
        Ok(Self {
            frame,
            x_grid,
            densities,
        })
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn x_grid(&self) -> &UniformGrid {
        &self.x_grid
    }

    pub fn x_values(&self) -> Vec<f64> {
        self.x_grid.points()
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.densities, self.x_grid.step())
    }

    pub fn min_density(&self) -> f64 {
        self.densities.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest pointwise difference from `other`, which must share the X grid.
    pub fn sup_distance(&self, other: &TomogramSlice) -> Result<f64> {
        if self.x_grid != other.x_grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `X,density` rows after `#` lines for the frame and `metadata`.
    pub fn write_csv<W: Write>(&self, out: &mut W, metadata: &[(String, String)]) -> io::Result<()> {
        match self.frame {
            Frame::Symplectic(f) => {
                writeln!(out, "# mu: {}", fmt_num(f.mu))?;
                writeln!(out, "# nu: {}", fmt_num(f.nu))?;
            }
            Frame::Optical(a) => writeln!(out, "# theta: {}", fmt_num(a.0))?,
        }
        for (key, value) in metadata {
            writeln!(out, "# {key}: {value}")?;
        }
        writeln!(out, "X,density")?;
        for (i, w) in self.densities.iter().enumerate() {
            writeln!(out, "{},{}", fmt_num(self.x_grid.point(i)), fmt_num(*w))?;
        }
        Ok(())
    }
}

/// Evaluator `(X, μ, ν) → w`.
pub trait SymplecticTomogram: Sync {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64;
}

impl<T: SymplecticTomogram + ?Sized> SymplecticTomogram for &T {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        (**self).density(x, mu, nu)
    }
}

/// Adapts a closure to [`SymplecticTomogram`].
pub struct FnTomogram<F>(pub F);

impl<F: Fn(f64, f64, f64) -> f64 + Sync> SymplecticTomogram for FnTomogram<F> {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        (self.0)(x, mu, nu)
    }
}

/// Coherent-state tomogram at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentTomogram {
    pub x0: f64,
    pub p0: f64,
}

impl SymplecticTomogram for CoherentTomogram {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        let r2 = mu * mu + nu * nu;
        let shift = x - mu * self.x0 - nu * self.p0;
        (-shift * shift / r2).exp() / (PI * r2).sqrt()
    }
}

/// Fock-state tomogram `(2ⁿn!√π)⁻¹ r⁻¹ e^{−Y²} Hₙ²(Y)`, `Y = X/r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTomogram {
    pub n: FockIndex,
}

impl SymplecticTomogram for FockTomogram {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        let r = mu.hypot(nu);
        // hermite_function is finite for every n ≤ N_MAX
        let h = hermite_function(self.n, x / r).unwrap_or(0.0);
        h * h / r
    }
}

/// Closed-form tomogram of either initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateTomogram {
    Coherent(CoherentTomogram),
    Fock(FockTomogram),
}

impl StateTomogram {
    pub fn of(state: &InitialState) -> Result<Self> {
        state.validate()?;
        Ok(match *state {
            InitialState::Coherent { x0, p0 } => StateTomogram::Coherent(CoherentTomogram { x0, p0 }),
            InitialState::Fock { n } => StateTomogram::Fock(FockTomogram { n: FockIndex::new(n)? }),
        })
    }
}

impl SymplecticTomogram for StateTomogram {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        match self {
            StateTomogram::Coherent(c) => c.density(x, mu, nu),
            StateTomogram::Fock(f) => f.density(x, mu, nu),
        }
    }
}

/// Maps `(X, μ, ν)` at time `t` to the arguments of the initial tomogram.
pub type TomogramMap = fn(&DriveIntegrals, f64, f64, f64) -> (f64, f64, f64);

/// `(X − μx̃ − νp̃, μ cos t − ν sin t, ν cos t + μ sin t)`.
pub fn evolution_map(drive: &DriveIntegrals, x: f64, mu: f64, nu: f64) -> (f64, f64, f64) {
    let (s, c) = drive.t.sin_cos();
    (
        x - mu * drive.x_rest - nu * drive.p_rest,
        mu * c - nu * s,
        nu * c + mu * s,
    )
}

/// `w(X, μ, ν, t)` as a lazy composition with the initial tomogram.
#[derive(Debug, Clone)]
pub struct EvolvedTomogram<W> {
    initial: W,
    drive: DriveIntegrals,
    map: TomogramMap,
}

impl<W> EvolvedTomogram<W> {
    pub fn drive(&self) -> &DriveIntegrals {
        &self.drive
    }
}

impl<W: SymplecticTomogram> SymplecticTomogram for EvolvedTomogram<W> {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        let (x0, mu0, nu0) = (self.map)(&self.drive, x, mu, nu);
        self.initial.density(x0, mu0, nu0)
    }
}

pub fn tomogram_evolve<W: SymplecticTomogram>(w0: W, force: &ForceModel, t: f64) -> Result<EvolvedTomogram<W>> {
    tomogram_evolve_with_map(w0, force, t, evolution_map)
}

/// Like [`tomogram_evolve`] with a caller-supplied composition map.
pub fn tomogram_evolve_with_map<W: SymplecticTomogram>(
    w0: W,
    force: &ForceModel,
    t: f64,
    map: TomogramMap,
) -> Result<EvolvedTomogram<W>> {
    Ok(EvolvedTomogram {
        initial: w0,
        drive: drive_integrals(force, t)?,
        map,
    })
}

/// Tomogram carried by the classical flow: the line `X = μq + νp` at time `t`
/// is pulled back through the affine trajectory map `(q₀, p₀) → (q, p)`.
#[derive(Debug, Clone)]
pub struct ClassicalTomogramFlow<W> {
    initial: W,
    offset: PhasePoint,
    column_q: PhasePoint,
    column_p: PhasePoint,
}

impl<W: SymplecticTomogram> SymplecticTomogram for ClassicalTomogramFlow<W> {
    fn density(&self, x: f64, mu: f64, nu: f64) -> f64 {
        let x0 = x - (mu * self.offset.q + nu * self.offset.p);
        let mu0 = mu * self.column_q.q + nu * self.column_q.p;
        let nu0 = mu * self.column_p.q + nu * self.column_p.p;
        self.initial.density(x0, mu0, nu0)
    }
}

pub fn classical_tomogram_evolve<W: SymplecticTomogram>(
    w0: W,
    force: &ForceModel,
    t: f64,
) -> Result<ClassicalTomogramFlow<W>> {
    let offset = classical_trajectory(0.0, 0.0, force, t)?;
    let from_q = classical_trajectory(1.0, 0.0, force, t)?;
    let from_p = classical_trajectory(0.0, 1.0, force, t)?;
    Ok(ClassicalTomogramFlow {
        initial: w0,
        offset,
        column_q: PhasePoint::new(from_q.q - offset.q, from_q.p - offset.p),
        column_p: PhasePoint::new(from_p.q - offset.q, from_p.p - offset.p),
    })
}

/// Evaluates `w` along `frame` on `x_grid`.
pub fn sample_slice<W: SymplecticTomogram>(w: &W, frame: Frame, x_grid: UniformGrid) -> Result<TomogramSlice> {
    x_grid.validate()?;
    let f = frame.symplectic();
    let densities = x_grid.points().par_iter().map(|&x| w.density(x, f.mu, f.nu)).collect();
    TomogramSlice::new(frame, x_grid, densities)
}

/// Closed-form tomogram of `state` after evolving for `t` under `force`.
pub fn closed_form_tomogram(
    state: &InitialState,
    force: &ForceModel,
    t: f64,
    frame: Frame,
    x_grid: UniformGrid,
) -> Result<TomogramSlice> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be nonnegative, got {t}")));
    }
    state.validate()?;
    let f = frame.symplectic();
    let r2 = f.mu * f.mu + f.nu * f.nu;
    let r = r2.sqrt();
    let evaluator: Box<dyn Fn(f64) -> f64 + Sync> = match *state {
        InitialState::Coherent { x0, p0 } => {
            let cl = classical_trajectory(x0, p0, force, t)?;
            let centre = f.mu * cl.q + f.nu * cl.p;
            Box::new(move |x| (-(x - centre).powi(2) / r2).exp() / (PI * r2).sqrt())
        }
        InitialState::Fock { n } => {
            let d = drive_integrals(force, t)?;
            let n = FockIndex::new(n)?;
            let centre = f.mu * d.x_rest + f.nu * d.p_rest;
            Box::new(move |x| {
                let h = hermite_function(n, (x - centre) / r).unwrap_or(0.0);
                h * h / r
            })
        }
    };
    x_grid.validate()?;
    let densities = x_grid.points().iter().map(|&x| evaluator(x)).collect();
    TomogramSlice::new(frame, x_grid, densities)
}

/// Tomogram of a wavefunction by chirped quadrature over its grid.
///
/// For `|ν|` at or below `NU_FLOOR·|(μ, ν)|` the limit `|ψ(X/μ)|²/|μ|` is used.
pub fn symplectic_from_wavefunction(psi: &WaveFunctionGrid, frame: Frame, x_grid: UniformGrid) -> Result<TomogramSlice> {
    x_grid.validate()?;
    let f = frame.symplectic();
    let (mu, nu) = (f.mu, f.nu);
    let xs = x_grid.points();
    if nu.abs() <= NU_FLOOR * f.norm() {
        let densities = xs.iter().map(|&x| psi.interpolate(x / mu).norm_sqr() / mu.abs()).collect();
        return TomogramSlice::new(frame, x_grid, densities);
    }

    let amps = psi.amplitudes();
    let peak = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let first = amps.iter().position(|a| a.norm() > 1e-12 * peak).unwrap_or(0);
    let last = amps.iter().rposition(|a| a.norm() > 1e-12 * peak).unwrap_or(amps.len() - 1);
    let dy = psi.step();
    let (y_lo, y_hi) = (psi.x(first), psi.x(last));

    // Local frequency of the kernel phase μy²/2ν − Xy/ν.
    let max_freq = [y_lo, y_hi]
        .iter()
        .flat_map(|&y| [x_grid.min, x_grid.max].map(|x| ((mu * y - x) / nu).abs()))
        .fold(0.0, f64::max);
    let required = PI / (2.0 * max_freq);
    if dy > required {
        return Err(Error::UnresolvedChirp {
            what: "symplectic tomogram",
            step: dy,
            required,
        });
    }

    let count = last - first + 1;
    let weighted: Vec<Complex64> = (first..=last)
        .map(|i| {
            let y = psi.x(i);
            amps[i] * Complex64::from_polar(trapezoid_weight(i - first, count) * dy, mu * y * y / (2.0 * nu))
        })
        .collect();
    let densities = xs
        .par_iter()
        .map(|&x| {
            let k = -x / nu;
            let ratio = Complex64::from_polar(1.0, k * dy);
            let mut phasor = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, u) in weighted.iter().enumerate() {
                if j % 32 == 0 {
                    phasor = Complex64::from_polar(1.0, k * psi.x(first + j));
                }
                acc += u * phasor;
                phasor *= ratio;
            }
            acc.norm_sqr() / (2.0 * PI * nu.abs())
        })
        .collect();
    TomogramSlice::new(frame, x_grid, densities)
}

/// Evaluator `(X, θ) → w`.
pub trait OpticalTomogram: Sync {
    fn density(&self, x: f64, theta: f64) -> f64;
}

/// Optical view `w(X, cos θ, sin θ)` of a symplectic tomogram.
#[derive(Debug, Clone, Copy)]
pub struct AsOptical<W>(pub W);

impl<W: SymplecticTomogram> OpticalTomogram for AsOptical<W> {
    fn density(&self, x: f64, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.0.density(x, c, s)
    }
}

/// `w(X, θ, t) = w₀(X − x̃ cos θ − p̃ sin θ, θ + t)`.
#[derive(Debug, Clone)]
pub struct EvolvedOptical<W> {
    initial: W,
    drive: DriveIntegrals,
}

impl<W: OpticalTomogram> OpticalTomogram for EvolvedOptical<W> {
    fn density(&self, x: f64, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let d = &self.drive;
        self.initial.density(x - d.x_rest * c - d.p_rest * s, theta + d.t)
    }
}

pub fn optical_evolve<W: OpticalTomogram>(w0: W, force: &ForceModel, t: f64) -> Result<EvolvedOptical<W>> {
    Ok(EvolvedOptical {
        initial: w0,
        drive: drive_integrals(force, t)?,
    })
}

/// Evaluates an optical tomogram at `angle` on `x_grid`.
pub fn optical_tomogram<W: OpticalTomogram>(w: &W, angle: OpticalAngle, x_grid: UniformGrid) -> Result<TomogramSlice> {
    x_grid.validate()?;
    let densities = x_grid.points().par_iter().map(|&x| w.density(x, angle.0)).collect();
    TomogramSlice::new(Frame::Optical(angle), x_grid, densities)
}

/// A Radon slice and whether any line left the Wigner domain carrying mass.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonSlice {
    pub slice: TomogramSlice,
    pub unabsorbed_mass: bool,
}

/// Fallback line step for phase-space functions without a native grid.
const RADON_STEP: f64 = 1.0 / 64.0;

/// `w(X, μ, ν) = ∬ W δ(X − μq − νp) dq dp` as line integrals through `w`.
///
/// Lines are clipped to `w`'s support and sampled at half its resolution.
pub fn radon_from_wigner<W: PhaseSpaceFunction>(w: &W, frame: Frame, x_grid: UniformGrid) -> Result<RadonSlice> {
    x_grid.validate()?;
    let support = w.support().ok_or_else(|| {
        Error::InvalidParameter("Radon transform needs a phase-space function with bounded support".into())
    })?;
    let step = w.resolution().map_or(RADON_STEP, |r| 0.5 * r);
    let f = frame.symplectic();
    let r = f.norm();
    let (nq, np) = (f.mu / r, f.nu / r);
    let (tq, tp) = (-np, nq);

    let lines: Vec<(f64, bool)> = x_grid
        .points()
        .par_iter()
        .map(|&x| {
            let (bq, bp) = (x / r * nq, x / r * np);
            // Clip s in b + s·(tq, tp) to the support box.
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for (origin, dir, min, max) in [
                (bq, tq, support.q_min, support.q_max),
                (bp, tp, support.p_min, support.p_max),
            ] {
                if dir.abs() < 1e-15 {
                    if origin < min || origin > max {
                        return (0.0, false);
                    }
                } else {
                    let (a, b) = ((min - origin) / dir, (max - origin) / dir);
                    lo = lo.max(a.min(b));
                    hi = hi.min(a.max(b));
                }
            }
            if !(hi > lo) {
                return (0.0, false);
            }
            let m = ((hi - lo) / step).ceil().max(1.0) as usize;
            let h = (hi - lo) / m as f64;
            let values: Vec<f64> = (0..=m)
                .map(|k| {
                    let s = lo + k as f64 * h;
                    w.value(bq + s * tq, bp + s * tp)
                })
                .collect();
            let truncated = values[0].abs() > UNABSORBED_THRESHOLD || values[m].abs() > UNABSORBED_THRESHOLD;
            (trapezoid(&values, h) / r, truncated)
        })
        .collect();
    let unabsorbed_mass = lines.iter().any(|l| l.1);
    let slice = TomogramSlice::new(frame, x_grid, lines.into_iter().map(|l| l.0).collect())?;
    Ok(RadonSlice { slice, unabsorbed_mass })
}

fn central<F: Fn(f64) -> f64>(g: F, x: f64) -> f64 {
    (g(x + RESIDUAL_STEP) - g(x - RESIDUAL_STEP)) / (2.0 * RESIDUAL_STEP)
}

/// Residual of `∂w/∂t − μ ∂w/∂ν + ν ∂w/∂μ + ν f(t) ∂w/∂X = 0` over `points`,
/// normalized by `max |∂w/∂X|`.
pub fn symplectic_residual<R>(field: R, force: &ForceModel, t: f64, points: &[(f64, f64, f64)]) -> f64
where
    R: Fn(f64, f64, f64, f64) -> f64,
{
    let f = force.value(t);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &(x, mu, nu) in points {
        let dt = crate::dynamics::time_derivative(|s| field(x, mu, nu, s), t, RESIDUAL_STEP);
        let dx = central(|v| field(v, mu, nu, t), x);
        let dmu = central(|v| field(x, v, nu, t), mu);
        let dnu = central(|v| field(x, mu, v, t), nu);
        worst = worst.max((dt - mu * dnu + nu * dmu + nu * f * dx).abs());
        scale = scale.max(dx.abs());
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// Residual of `∂w/∂t − ∂w/∂θ + f(t) sin θ ∂w/∂X = 0` over `points`,
/// normalized by `max |∂w/∂X|`.
pub fn optical_residual<R>(field: R, force: &ForceModel, t: f64, points: &[(f64, f64)]) -> f64
where
    R: Fn(f64, f64, f64) -> f64,
{
    let f = force.value(t);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &(x, theta) in points {
        let dt = crate::dynamics::time_derivative(|s| field(x, theta, s), t, RESIDUAL_STEP);
        let dx = central(|v| field(v, theta, t), x);
        let dtheta = central(|v| field(x, v, t), theta);
        worst = worst.max((dt - dtheta + f * theta.sin() * dx).abs());
        scale = scale.max(dx.abs());
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}
