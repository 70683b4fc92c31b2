//! Oscillator eigenstates and coherent states on a position grid.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt_num;
use crate::grid::UniformGrid;
use crate::quadrature::trapezoid_weight;

/// Largest supported Fock index.
pub const N_MAX: usize = 50;

/// Endpoint amplitudes must stay below this fraction of the peak.
pub const FIT_RATIO: f64 = 1e-8;

/// Default normalization tolerance of a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// [−12, 12] with 2048 points.
pub fn default_grid() -> UniformGrid {
    UniformGrid {
        min: -12.0,
        max: 12.0,
        n_points: 2048,
    }
}

/// Oscillator level `n ≤ N_MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockIndex(usize);

impl FockIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n > N_MAX {
            return Err(Error::FockIndexTooLarge { n, n_max: N_MAX });
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CoherentParams {
    pub x0: f64,
    pub p0: f64,
}

/// Initial states with closed forms in every representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    Coherent { x0: f64, p0: f64 },
    Fock { n: usize },
}

impl InitialState {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialState::Coherent { x0, p0 } if !(x0.is_finite() && p0.is_finite()) => {
                Err(Error::InvalidParameter("coherent parameters must be finite".into()))
            }
            InitialState::Fock { n } => FockIndex::new(n).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn wavefunction(&self, grid: UniformGrid) -> Result<WaveFunctionGrid> {
        match *self {
            InitialState::Coherent { x0, p0 } => coherent_wavefunction(CoherentParams { x0, p0 }, grid),
            InitialState::Fock { n } => fock_wavefunction(FockIndex::new(n)?, grid),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Coherent { x0, p0 } => write!(f, "coherent(x0={x0}, p0={p0})"),
            InitialState::Fock { n } => write!(f, "fock(n={n})"),
        }
    }
}

/// Physicists' Hermite polynomial by upward recurrence.
pub fn hermite(n: FockIndex, x: f64) -> Result<f64> {
    let n = n.get();
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            break;
        }
    }
    if cur.is_finite() {
        Ok(cur)
    } else {
        Err(Error::HermiteOverflow { n, x })
    }
}

/// Hermite polynomial of a complex argument, same recurrence.
pub fn hermite_complex(n: usize, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * z;
    for k in 1..n {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln √(2ⁿ n! √π)`.
pub fn log_fock_norm(n: usize) -> f64 {
    let log_factorial: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    0.5 * (n as f64 * std::f64::consts::LN_2 + log_factorial + 0.5 * PI.ln())
}

/// Normalized `ψₙ(x) = e^{−x²/2} Hₙ(x) / √(2ⁿ n! √π)`.
pub fn hermite_function(n: FockIndex, x: f64) -> Result<f64> {
    let h = hermite(n, x)?;
    if h == 0.0 {
        return Ok(0.0);
    }
    // Combine the Gaussian and the norm in log space before touching H.
    let log_env = -0.5 * x * x - log_fock_norm(n.get());
    Ok(h.signum() * (h.abs().ln() + log_env).exp())
}

/// Complex amplitudes on a uniform position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunctionGrid {
    grid: UniformGrid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunctionGrid {
    pub fn new(grid: UniformGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if amplitudes.len() != grid.n_points {
            return Err(Error::InvalidGrid(format!(
                "{} amplitudes for {} grid points",
                amplitudes.len(),
                grid.n_points
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        grid.validate()?;
        let amplitudes = grid.points().into_iter().map(f).collect();
        Ok(Self { grid, amplitudes })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn step(&self) -> f64 {
        self.grid.step()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.point(i)
    }

    pub fn norm_sq(&self) -> f64 {
        let n = self.amplitudes.len();
        self.step()
            * self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| trapezoid_weight(i, n) * a.norm_sqr())
                .sum::<f64>()
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<()> {
        let norm = self.norm_sq();
        if (norm - 1.0).abs() > tolerance {
            return Err(Error::InvalidParameter(format!(
                "state norm² = {norm} deviates from 1 by more than {tolerance:e}"
            )));
        }
        Ok(())
    }

    /// Checks that both endpoint amplitudes are below [`FIT_RATIO`] of the peak.
    pub fn check_fits(&self) -> Result<()> {
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let n = self.amplitudes.len();
        for (endpoint, i) in [("lower", 0), ("upper", n - 1)] {
            let ratio = if peak > 0.0 { self.amplitudes[i].norm() / peak } else { 0.0 };
            if ratio >= FIT_RATIO {
                return Err(Error::StateDoesNotFit {
                    endpoint,
                    x: self.x(i),
                    ratio,
                });
            }
        }
        Ok(())
    }

    /// `⟨x⟩ = Δx Σ x |ψ|²`.
    pub fn mean_position(&self) -> f64 {
        let n = self.amplitudes.len();
        self.step()
            * self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| trapezoid_weight(i, n) * self.x(i) * a.norm_sqr())
                .sum::<f64>()
    }

    /// Amplitude at an arbitrary position by six-point interpolation.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        crate::quadrature::lagrange_uniform(&self.amplitudes, self.grid.min, self.step(), x)
    }

    /// Writes `x,re,im` rows after `#`-prefixed metadata lines.
    pub fn write_csv<W: Write>(&self, out: &mut W, metadata: &[(String, String)]) -> io::Result<()> {
        for (key, value) in metadata {
            writeln!(out, "# {key}: {value}")?;
        }
        writeln!(out, "x,re,im")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{},{},{}", fmt_num(self.x(i)), fmt_num(a.re), fmt_num(a.im))?;
        }
        Ok(())
    }
}

/// `π^{−1/4} exp(−(x−x0)²/2 + i p0 x)` on `grid`.
pub fn coherent_wavefunction(params: CoherentParams, grid: UniformGrid) -> Result<WaveFunctionGrid> {
    let norm = PI.powf(-0.25);
    let psi = WaveFunctionGrid::from_fn(grid, |x| {
        norm * Complex64::new(-0.5 * (x - params.x0).powi(2), params.p0 * x).exp()
    })?;
    psi.check_fits()?;
    Ok(psi)
}

/// The `n`-th oscillator eigenstate on `grid`.
pub fn fock_wavefunction(n: FockIndex, grid: UniformGrid) -> Result<WaveFunctionGrid> {
    grid.validate()?;
    let needed = (2.0 * n.get() as f64 + 1.0).sqrt() + 5.0;
    if grid.min > -needed || grid.max < needed {
        return Err(Error::GridTooSmall(format!(
            "fock({}) needs the grid to cover [−{needed:.3}, {needed:.3}], got [{}, {}]",
            n.get(),
            grid.min,
            grid.max
        )));
    }
    let amplitudes = grid
        .points()
        .into_iter()
        .map(|x| hermite_function(n, x).map(|v| Complex64::new(v, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    WaveFunctionGrid::new(grid, amplitudes)
}

/// `⟨a|b⟩` by the trapezoidal rule.
pub fn overlap(a: &WaveFunctionGrid, b: &WaveFunctionGrid) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let n = a.amplitudes.len();
    let sum: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .enumerate()
        .map(|(i, (x, y))| x.conj() * y * trapezoid_weight(i, n))
        .sum();
    Ok(sum * a.step())
}
