//! Classical mechanics of the driven oscillator.
//!
//! Everything here follows from the trajectory of `q̇ = p`, `ṗ = −q + f(t)`:
//! the drive integrals
//!
//! ```text
//! F(t) = ∫₀ᵗ sin τ f(τ) dτ        J(t) = ∫₀ᵗ cos τ f(τ) dτ
//! x̃(t) = ∫₀ᵗ sin(t−τ) f(τ) dτ    p̃(t) = ∫₀ᵗ cos(t−τ) f(τ) dτ
//! ```
//!
//! fix both the forward flow and its integrals of motion `(q₀, p₀)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PlaneGrid;
use crate::quadrature::{adaptive_simpson, DEFAULT_TOLERANCE};

/// The external force `f(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForceModel {
    Zero,
    Constant {
        f0: f64,
    },
    /// `amplitude · sin(frequency · t + phase)`.
    Sinusoidal {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Linear interpolation between samples.
    Tabulated(TabulatedForce),
}

/// Samples of `f` on strictly increasing times starting at 0.
///
/// Cumulative moments `∫ sin τ f`, `∫ cos τ f` at every knot are computed once
/// at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct TabulatedForce {
    times: Vec<f64>,
    values: Vec<f64>,
    sin_moment: Vec<f64>,
    cos_moment: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawTable> for TabulatedForce {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        TabulatedForce::new(raw.times, raw.values)
    }
}

impl From<TabulatedForce> for RawTable {
    fn from(t: TabulatedForce) -> Self {
        RawTable {
            times: t.times,
            values: t.values,
        }
    }
}

impl TabulatedForce {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidForce(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidForce("a table needs at least two samples".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidForce(format!("table must start at t = 0, starts at {}", times[0])));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidForce("times must be strictly increasing".into()));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidForce("table entries must be finite".into()));
        }
        let mut table = Self {
            times,
            values,
            sin_moment: Vec::new(),
            cos_moment: Vec::new(),
        };
        let total = table.t_max();
        let mut sin_acc = vec![0.0];
        let mut cos_acc = vec![0.0];
        for k in 0..table.times.len() - 1 {
            let (a, b) = (table.times[k], table.times[k + 1]);
            let tol = DEFAULT_TOLERANCE * (b - a) / total;
            let s = adaptive_simpson(|tau| tau.sin() * table.value(tau), a, b, tol)?;
            let c = adaptive_simpson(|tau| tau.cos() * table.value(tau), a, b, tol)?;
            sin_acc.push(sin_acc[k] + s);
            cos_acc.push(cos_acc[k] + c);
        }
        table.sin_moment = sin_acc;
        table.cos_moment = cos_acc;
        Ok(table)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("validated non-empty")
    }

    /// Linear interpolation; held constant beyond the last sample.
    pub fn value(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let k = self.segment(t);
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let w = (t - t0) / (t1 - t0);
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }

    /// Index `k` with `times[k] ≤ t < times[k+1]`.
    fn segment(&self, t: f64) -> usize {
        match self.times.binary_search_by(|probe| probe.partial_cmp(&t).expect("finite")) {
            Ok(k) => k.min(self.times.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.times.len() - 2),
        }
    }

    /// `(F(t), J(t))` from the cached knots plus one partial segment.
    fn moments(&self, t: f64) -> Result<(f64, f64)> {
        let t_max = self.t_max();
        if t > t_max {
            return Err(Error::TimeOutOfRange { t, t_max });
        }
        let k = self.segment(t);
        let a = self.times[k];
        let tol = DEFAULT_TOLERANCE * (t - a).max(0.0) / t_max;
        let s = adaptive_simpson(|tau| tau.sin() * self.value(tau), a, t, tol.max(1e-16))?;
        let c = adaptive_simpson(|tau| tau.cos() * self.value(tau), a, t, tol.max(1e-16))?;
        Ok((self.sin_moment[k] + s, self.cos_moment[k] + c))
    }

    fn shifted(&self, t0: f64) -> Result<Self> {
        let t_max = self.t_max();
        if t0 >= t_max {
            return Err(Error::TimeOutOfRange { t: t0, t_max });
        }
        let mut times = vec![0.0];
        let mut values = vec![self.value(t0)];
        for (&t, &v) in self.times.iter().zip(&self.values) {
            if t > t0 {
                times.push(t - t0);
                values.push(v);
            }
        }
        Self::new(times, values)
    }
}

impl ForceModel {
    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self::Tabulated(TabulatedForce::new(times, values)?))
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            ForceModel::Zero | ForceModel::Tabulated(_) => true,
            ForceModel::Constant { f0 } => f0.is_finite(),
            ForceModel::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => amplitude.is_finite() && frequency.is_finite() && phase.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidForce(format!("non-finite parameter in {self}")))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            ForceModel::Zero => 0.0,
            ForceModel::Constant { f0 } => *f0,
            ForceModel::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => amplitude * (frequency * t + phase).sin(),
            ForceModel::Tabulated(table) => table.value(t),
        }
    }

    /// Largest time at which the force is defined, if bounded.
    pub fn t_max(&self) -> Option<f64> {
        match self {
            ForceModel::Tabulated(table) => Some(table.t_max()),
            _ => None,
        }
    }

    /// The force seen from `t0` onwards: `τ ↦ f(t0 + τ)`.
    pub fn shifted(&self, t0: f64) -> Result<Self> {
        Ok(match self {
            ForceModel::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => ForceModel::Sinusoidal {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: phase + frequency * t0,
            },
            ForceModel::Tabulated(table) => ForceModel::Tabulated(table.shifted(t0)?),
            other => other.clone(),
        })
    }

    /// `τ ↦ amplitude_factor · f(τ / time_factor)`.
    pub fn rescaled(&self, time_factor: f64, amplitude_factor: f64) -> Result<Self> {
        Ok(match self {
            ForceModel::Zero => ForceModel::Zero,
            ForceModel::Constant { f0 } => ForceModel::Constant {
                f0: f0 * amplitude_factor,
            },
            ForceModel::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => ForceModel::Sinusoidal {
                amplitude: amplitude * amplitude_factor,
                frequency: frequency / time_factor,
                phase: *phase,
            },
            ForceModel::Tabulated(table) => ForceModel::tabulated(
                table.times.iter().map(|t| t * time_factor).collect(),
                table.values.iter().map(|v| v * amplitude_factor).collect(),
            )?,
        })
    }
}

impl fmt::Display for ForceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForceModel::Zero => write!(f, "zero"),
            ForceModel::Constant { f0 } => write!(f, "constant(f0={f0})"),
            ForceModel::Sinusoidal {
                amplitude,
                frequency,
                phase,
            } => write!(f, "sinusoidal(amplitude={amplitude}, frequency={frequency}, phase={phase})"),
            ForceModel::Tabulated(table) => write!(f, "tabulated({} samples, t_max={})", table.times.len(), table.t_max()),
        }
    }
}

/// `F`, `J`, `x̃`, `p̃` at time `t`. `x̃`, `p̃` are the trajectory started at rest
/// from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveIntegrals {
    /// `F(t) = ∫₀ᵗ sin τ f(τ) dτ`
    pub sin_moment: f64,
    /// `J(t) = ∫₀ᵗ cos τ f(τ) dτ`
    pub cos_moment: f64,
    /// `x̃(t)`
    pub x_rest: f64,
    /// `p̃(t)`
    pub p_rest: f64,
    pub t: f64,
}

impl DriveIntegrals {
    /// Forward flow of an initial point.
    pub fn trajectory(&self, start: PhasePoint) -> PhasePoint {
        let (s, c) = self.t.sin_cos();
        PhasePoint {
            q: start.q * c + start.p * s + self.x_rest,
            p: start.p * c - start.q * s + self.p_rest,
        }
    }

    /// Integrals of motion: the initial point whose trajectory reaches `point`.
    pub fn initial_point(&self, point: PhasePoint) -> PhasePoint {
        let (s, c) = self.t.sin_cos();
        PhasePoint {
            q: point.q * c - point.p * s + self.sin_moment,
            p: point.p * c + point.q * s - self.cos_moment,
        }
    }
}

/// Computes the drive integrals; closed forms except for tabulated forces.
pub fn drive_integrals(force: &ForceModel, t: f64) -> Result<DriveIntegrals> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be finite and ≥ 0, got {t}")));
    }
    force.validate()?;
    let (s, c) = t.sin_cos();
    let (sin_moment, cos_moment, x_rest, p_rest) = match force {
        ForceModel::Zero => (0.0, 0.0, 0.0, 0.0),
        ForceModel::Constant { f0 } => {
            let one_minus_cos = 2.0 * (0.5 * t).sin().powi(2);
            (f0 * one_minus_cos, f0 * s, f0 * one_minus_cos, f0 * s)
        }
        &ForceModel::Sinusoidal {
            amplitude,
            frequency,
            phase,
        } => {
            let a = 0.5 * amplitude;
            let (kp, km) = (frequency + 1.0, frequency - 1.0);
            // sin τ sin(Ωτ+φ) = ½[cos((Ω−1)τ+φ) − cos((Ω+1)τ+φ)]
            let big_f = a * (int_cos(km, phase, t) - int_cos(kp, phase, t));
            // cos τ sin(Ωτ+φ) = ½[sin((Ω+1)τ+φ) + sin((Ω−1)τ+φ)]
            let big_j = a * (int_sin(kp, phase, t) + int_sin(km, phase, t));
            // sin(t−τ) sin(Ωτ+φ) = ½[cos(−(Ω+1)τ + t−φ) − cos((Ω−1)τ + t+φ)]
            let x_rest = a * (int_cos(-kp, t - phase, t) - int_cos(km, t + phase, t));
            // cos(t−τ) sin(Ωτ+φ) = ½[sin((Ω−1)τ + φ+t) + sin((Ω+1)τ + φ−t)]
            let p_rest = a * (int_sin(km, phase + t, t) + int_sin(kp, phase - t, t));
            (big_f, big_j, x_rest, p_rest)
        }
        ForceModel::Tabulated(table) => {
            let (big_f, big_j) = table.moments(t)?;
            (big_f, big_j, big_j * s - big_f * c, big_j * c + big_f * s)
        }
    };
    Ok(DriveIntegrals {
        sin_moment,
        cos_moment,
        x_rest,
        p_rest,
        t,
    })
}

/// `∫₀ᵗ cos(kτ + φ) dτ`, continuous through `k = 0`.
fn int_cos(k: f64, phi: f64, t: f64) -> f64 {
    let kt = k * t;
    if kt.abs() < 1e-4 {
        let (s, c) = phi.sin_cos();
        t * (c - kt / 2.0 * s - kt * kt / 6.0 * c + kt.powi(3) / 24.0 * s)
    } else {
        ((kt + phi).sin() - phi.sin()) / k
    }
}

/// `∫₀ᵗ sin(kτ + φ) dτ`, continuous through `k = 0`.
fn int_sin(k: f64, phi: f64, t: f64) -> f64 {
    let kt = k * t;
    if kt.abs() < 1e-4 {
        let (s, c) = phi.sin_cos();
        t * (s + kt / 2.0 * c - kt * kt / 6.0 * s - kt.powi(3) / 24.0 * c)
    } else {
        (phi.cos() - (kt + phi).cos()) / k
    }
}

/// A point `(q, p)` of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }
}

pub fn classical_trajectory(q0: f64, p0: f64, force: &ForceModel, t: f64) -> Result<PhasePoint> {
    Ok(drive_integrals(force, t)?.trajectory(PhasePoint::new(q0, p0)))
}

/// `(q₀, p₀)` as functions of the current point; inverse of [`classical_trajectory`].
pub fn invariants_q0p0(point: PhasePoint, force: &ForceModel, t: f64) -> Result<PhasePoint> {
    Ok(drive_integrals(force, t)?.initial_point(point))
}

type DensityFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A classical phase-space density `ρ(q, p)`.
#[derive(Clone)]
pub struct ClassicalDensity {
    evaluator: Arc<DensityFn>,
    label: String,
}

impl ClassicalDensity {
    pub fn new(label: impl Into<String>, evaluator: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Arc::new(evaluator),
            label: label.into(),
        }
    }

    /// Normal distribution centred on `(q0, p0)` with standard deviation `width`
    /// in both directions.
    pub fn gaussian(q0: f64, p0: f64, width: f64) -> Self {
        let norm = 1.0 / (2.0 * std::f64::consts::PI * width * width);
        Self::new(format!("gaussian(q0={q0}, p0={p0}, width={width})"), move |q, p| {
            norm * (-((q - q0).powi(2) + (p - p0).powi(2)) / (2.0 * width * width)).exp()
        })
    }

    pub fn value(&self, q: f64, p: f64) -> f64 {
        (self.evaluator)(q, p)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for ClassicalDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassicalDensity").field("label", &self.label).finish()
    }
}

/// `ρ(q, p, t) = ρ₀(q₀(q, p, t), p₀(q, p, t))`.
pub fn liouville_evolve(rho0: &ClassicalDensity, force: &ForceModel, t: f64) -> Result<ClassicalDensity> {
    let drive = drive_integrals(force, t)?;
    let initial = rho0.clone();
    Ok(ClassicalDensity::new(format!("{} evolved to t={t}", rho0.label), move |q, p| {
        let start = drive.initial_point(PhasePoint::new(q, p));
        initial.value(start.q, start.p)
    }))
}

/// Central finite-difference step used by the transport residuals.
pub const RESIDUAL_STEP: f64 = 1e-4;

/// Residual of `∂ρ/∂t + p ∂ρ/∂q + (f(t) − q) ∂ρ/∂p = 0` for a time-dependent
/// phase-space field, maximised over `grid` and divided by `max |∂ρ/∂q|`.
///
/// Time derivatives use a one-sided stencil when `t` is closer to zero than the
/// step.
pub fn phase_flow_residual<R>(field: R, force: &ForceModel, t: f64, grid: &PlaneGrid) -> f64
where
    R: Fn(f64, f64, f64) -> f64,
{
    let h = RESIDUAL_STEP;
    let f_t = force.value(t);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (q, p) in grid.nodes() {
        let d_t = time_derivative(|tt| field(q, p, tt), t, h);
        let d_q = (field(q + h, p, t) - field(q - h, p, t)) / (2.0 * h);
        let d_p = (field(q, p + h, t) - field(q, p - h, t)) / (2.0 * h);
        worst = worst.max((d_t + p * d_q + (f_t - q) * d_p).abs());
        scale = scale.max(d_q.abs());
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

/// Second-order time derivative, one-sided near `t = 0`.
pub(crate) fn time_derivative<G: Fn(f64) -> f64>(g: G, t: f64, h: f64) -> f64 {
    if t >= h {
        (g(t + h) - g(t - h)) / (2.0 * h)
    } else {
        (-3.0 * g(t) + 4.0 * g(t + h) - g(t + 2.0 * h)) / (2.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Direct quadrature of the four defining integrals.
    fn quadrature_oracle(force: &ForceModel, t: f64) -> [f64; 4] {
        let q = |g: &dyn Fn(f64) -> f64| adaptive_simpson(g, 0.0, t, 1e-13).unwrap();
        [
            q(&|tau| tau.sin() * force.value(tau)),
            q(&|tau| tau.cos() * force.value(tau)),
            q(&|tau| (t - tau).sin() * force.value(tau)),
            q(&|tau| (t - tau).cos() * force.value(tau)),
        ]
    }

    /// RK4 integration of q̇ = p, ṗ = −q + f(t).
    fn rk4(q0: f64, p0: f64, force: &ForceModel, t: f64, step: f64) -> (f64, f64) {
        let n = (t / step).ceil() as usize;
        let h = t / n as f64;
        let rhs = |tt: f64, q: f64, p: f64| (p, -q + force.value(tt));
        let (mut q, mut p) = (q0, p0);
        for i in 0..n {
            let tt = i as f64 * h;
            let k1 = rhs(tt, q, p);
            let k2 = rhs(tt + h / 2.0, q + h / 2.0 * k1.0, p + h / 2.0 * k1.1);
            let k3 = rhs(tt + h / 2.0, q + h / 2.0 * k2.0, p + h / 2.0 * k2.1);
            let k4 = rhs(tt + h, q + h * k3.0, p + h * k3.1);
            q += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
        (q, p)
    }

    fn as_array(d: &DriveIntegrals) -> [f64; 4] {
        [d.sin_moment, d.cos_moment, d.x_rest, d.p_rest]
    }

    #[test]
    fn zero_force_has_zero_integrals() {
        let d = drive_integrals(&ForceModel::Zero, 1.7).unwrap();
        assert_eq!(as_array(&d), [0.0; 4]);
    }

    #[test]
    fn constant_force_quarter_period() {
        let force = ForceModel::Constant { f0: 1.0 };
        let oracle = quadrature_oracle(&force, PI / 2.0);
        for v in oracle {
            assert!((v - 1.0).abs() < 1e-12);
        }
        let d = drive_integrals(&force, PI / 2.0).unwrap();
        for (got, want) in as_array(&d).iter().zip(oracle) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_force_half_period() {
        let force = ForceModel::Constant { f0: 2.0 };
        let oracle = quadrature_oracle(&force, PI);
        assert!((oracle[2] - 4.0).abs() < 1e-12);
        let d = drive_integrals(&force, PI).unwrap();
        assert!((d.x_rest - oracle[2]).abs() < 1e-12);
    }

    #[test]
    fn all_kinds_match_quadrature() {
        let forces = [
            ForceModel::Constant { f0: -0.8 },
            ForceModel::Sinusoidal {
                amplitude: 0.7,
                frequency: 2.3,
                phase: 0.4,
            },
            // resonant drive goes through the k = 0 branch
            ForceModel::Sinusoidal {
                amplitude: 1.1,
                frequency: 1.0,
                phase: -0.3,
            },
            ForceModel::tabulated(vec![0.0, 0.5, 1.3, 2.0, 4.0, 7.0], vec![0.2, -0.4, 1.0, 0.3, 0.0, 0.5]).unwrap(),
        ];
        for force in &forces {
            for &t in &[0.0, 0.3, 1.0, 2.9, 6.5] {
                let d = drive_integrals(force, t).unwrap();
                let oracle = quadrature_oracle(force, t);
                for (got, want) in as_array(&d).iter().zip(oracle) {
                    // The oracle crosses table kinks inside panels, so allow for that.
                    assert!((got - want).abs() < 1e-9, "{force} t={t}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn tabulated_rejects_bad_tables() {
        assert!(ForceModel::tabulated(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(ForceModel::tabulated(vec![0.0, 1.0, 1.0], vec![1.0; 3]).is_err());
        assert!(ForceModel::tabulated(vec![0.5, 1.0], vec![1.0; 2]).is_err());
        assert!(ForceModel::tabulated(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
        let f = ForceModel::tabulated(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(drive_integrals(&f, 1.5), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn trajectory_examples() {
        let p = classical_trajectory(1.0, 0.0, &ForceModel::Zero, PI / 2.0).unwrap();
        assert!(p.q.abs() < 1e-15 && (p.p + 1.0).abs() < 1e-15);

        let force = ForceModel::Constant { f0: 1.0 };
        let (q_rk, p_rk) = rk4(0.0, 0.0, &force, PI, 1e-4);
        assert!((q_rk - 2.0).abs() < 1e-10 && p_rk.abs() < 1e-10);
        let p = classical_trajectory(0.0, 0.0, &force, PI).unwrap();
        assert!((p.q - q_rk).abs() < 1e-10 && (p.p - p_rk).abs() < 1e-10);

        let p = classical_trajectory(0.3, -0.7, &ForceModel::Zero, 2.0 * PI).unwrap();
        assert!((p.q - 0.3).abs() < 1e-14 && (p.p + 0.7).abs() < 1e-14);
    }

    #[test]
    fn trajectory_matches_rk4_up_to_two_periods() {
        let forces = [
            ForceModel::Constant { f0: 0.7 },
            ForceModel::Sinusoidal {
                amplitude: 0.5,
                frequency: 0.6,
                phase: 1.0,
            },
        ];
        for force in &forces {
            for &t in &[0.5, PI, 2.5 * PI, 4.0 * PI] {
                let (q, p) = rk4(0.4, -1.1, force, t, 1e-3);
                let got = classical_trajectory(0.4, -1.1, force, t).unwrap();
                assert!((got.q - q).abs() < 1e-6 && (got.p - p).abs() < 1e-6, "{force} t={t}");
            }
        }
    }

    #[test]
    fn invariants_examples() {
        let force = ForceModel::Constant { f0: 1.0 };
        let start = invariants_q0p0(PhasePoint::new(2.0, 0.0), &force, PI).unwrap();
        assert!(start.q.abs() < 1e-15 && start.p.abs() < 1e-15);
        let same = invariants_q0p0(PhasePoint::new(0.25, -3.0), &ForceModel::Zero, 0.0).unwrap();
        assert_eq!(same, PhasePoint::new(0.25, -3.0));
    }

    #[test]
    fn flow_preserves_phase_area() {
        let force = ForceModel::Sinusoidal {
            amplitude: 0.9,
            frequency: 1.7,
            phase: 0.2,
        };
        let d = drive_integrals(&force, 2.2).unwrap();
        let h = 1e-5;
        let at = |q: f64, p: f64| d.trajectory(PhasePoint::new(q, p));
        let (q0, p0) = (0.3, -0.5);
        let dq = (at(q0 + h, p0).q - at(q0 - h, p0).q) / (2.0 * h);
        let dp = (at(q0 + h, p0).p - at(q0 - h, p0).p) / (2.0 * h);
        let eq = (at(q0, p0 + h).q - at(q0, p0 - h).q) / (2.0 * h);
        let ep = (at(q0, p0 + h).p - at(q0, p0 - h).p) / (2.0 * h);
        assert!((dq * ep - dp * eq - 1.0).abs() < 1e-8);
    }

    #[test]
    fn liouville_examples() {
        let rho0 = ClassicalDensity::gaussian(0.0, 0.0, 1.0);
        let force = ForceModel::Constant { f0: 0.6 };
        let same = liouville_evolve(&rho0, &force, 0.0).unwrap();
        let rotated = liouville_evolve(&rho0, &ForceModel::Zero, 1.234).unwrap();
        for &(q, p) in &[(0.0, 0.0), (0.4, -1.2), (2.0, 1.0)] {
            assert_eq!(same.value(q, p), rho0.value(q, p));
            assert!((rotated.value(q, p) - rho0.value(q, p)).abs() < 1e-15);
        }
    }

    #[test]
    fn liouville_solution_satisfies_the_pde() {
        let rho0 = ClassicalDensity::gaussian(1.0, -0.5, 0.8);
        let force = ForceModel::Sinusoidal {
            amplitude: 0.8,
            frequency: 0.9,
            phase: 0.0,
        };
        let field = |q: f64, p: f64, t: f64| liouville_evolve(&rho0, &force, t).unwrap().value(q, p);
        let grid = PlaneGrid::square(3.0, 13).unwrap();
        let r = phase_flow_residual(field, &force, 1.1, &grid);
        assert!(r < 1e-4, "residual {r}");
        // The initial time uses the one-sided stencil.
        let r0 = phase_flow_residual(field, &force, 0.0, &grid);
        assert!(r0 < 1e-4, "residual {r0}");
    }

    #[test]
    fn shifted_force_continues_the_drive() {
        let forces = [
            ForceModel::Sinusoidal {
                amplitude: 0.4,
                frequency: 1.3,
                phase: 0.1,
            },
            ForceModel::tabulated(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, -1.0, 0.5]).unwrap(),
        ];
        for force in &forces {
            let shifted = force.shifted(1.4).unwrap();
            for &tau in &[0.0, 0.3, 1.5] {
                assert!((shifted.value(tau) - force.value(1.4 + tau)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn force_config_round_trips() {
        let json = r#"{"kind":"tabulated","times":[0,1,2],"values":[0,1,0]}"#;
        let f: ForceModel = serde_json::from_str(json).unwrap();
        assert!((f.value(0.5) - 0.5).abs() < 1e-15);
        let bad = r#"{"kind":"tabulated","times":[0,2,1],"values":[0,1,0]}"#;
        assert!(serde_json::from_str::<ForceModel>(bad).is_err());
        let c: ForceModel = serde_json::from_str(r#"{"kind":"constant","f0":1.5}"#).unwrap();
        assert_eq!(c, ForceModel::Constant { f0: 1.5 });
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn force_strategy() -> impl Strategy<Value = ForceModel> {
            prop_oneof![
                Just(ForceModel::Zero),
                (-3.0..3.0f64).prop_map(|f0| ForceModel::Constant { f0 }),
                (-2.0..2.0f64, 0.0..3.0f64, -3.0..3.0f64).prop_map(|(amplitude, frequency, phase)| {
                    ForceModel::Sinusoidal {
                        amplitude,
                        frequency,
                        phase,
                    }
                }),
            ]
        }

        proptest! {
            #[test]
            fn invariants_invert_the_trajectory(
                force in force_strategy(),
                q0 in -5.0..5.0f64,
                p0 in -5.0..5.0f64,
                t in 0.0..20.0f64,
            ) {
                let end = classical_trajectory(q0, p0, &force, t).unwrap();
                let back = invariants_q0p0(end, &force, t).unwrap();
                prop_assert!((back.q - q0).abs() < 1e-12 && (back.p - p0).abs() < 1e-12);
            }

            #[test]
            fn rest_trajectory_identity(force in force_strategy(), t in 0.0..20.0f64) {
                let d = drive_integrals(&force, t).unwrap();
                let (s, c) = t.sin_cos();
                prop_assert!((d.x_rest - (d.cos_moment * s - d.sin_moment * c)).abs() < 1e-12);
                prop_assert!((d.p_rest - (d.cos_moment * c + d.sin_moment * s)).abs() < 1e-12);
            }

            #[test]
            fn p_rest_is_the_velocity(force in force_strategy(), t in 0.01..15.0f64) {
                let h = 1e-5;
                let x = |tt| drive_integrals(&force, tt).unwrap().x_rest;
                let d = drive_integrals(&force, t).unwrap();
                prop_assert!(((x(t + h) - x(t - h)) / (2.0 * h) - d.p_rest).abs() < 1e-7);
            }
        }
    }
}
