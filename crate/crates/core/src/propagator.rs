//! Green function of the driven oscillator and wavefunction propagation.
//!
//! For `0 < t < π` the kernel is
//!
//! ```text
//! G(x, x', t) = (2πi sin t)^{-1/2} · exp(−(i/2) Φ(t))
//!             · exp(i[(x² + x'²) cos t − 2xx'] / (2 sin t) + i[x F(t) + x' x̃(t)] / sin t)
//! ```
//!
//! with `Φ(t) = ∫₀ᵗ F²(τ)/sin²τ dτ`. Longer evolutions are composed from
//! sub-steps inside `(0, π)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{drive_integrals, ForceModel};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quadrature::{adaptive_simpson, trapezoid_weight, DEFAULT_TOLERANCE};
use crate::states::{hermite_complex, hermite_function, FockIndex, WaveFunctionGrid};

/// Direct kernel evaluation requires `|sin t|` above this.
pub const DEFAULT_CAUSTIC_TOLERANCE: f64 = 1e-6;

/// Physical mass, frequency and ℏ for undoing the dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsConfig {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl UnitsConfig {
    pub fn new(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        if [mass, omega, hbar].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "mass, omega and hbar must be positive, got ({mass}, {omega}, {hbar})"
            )));
        }
        Ok(Self { mass, omega, hbar })
    }

    /// ℏ = m = ω = 1.
    pub fn natural() -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenKernelParams {
    pub force: ForceModel,
    pub t: f64,
    pub caustic_tolerance: f64,
}

impl GreenKernelParams {
    pub fn new(force: ForceModel, t: f64) -> Self {
        Self {
            force,
            t,
            caustic_tolerance: DEFAULT_CAUSTIC_TOLERANCE,
        }
    }
}

/// Fails unless `0 < t < π` with `|sin t|` above the caustic guard.
fn check_principal_domain(t: f64, caustic_tolerance: f64) -> Result<()> {
    let sin_t = t.sin();
    if sin_t.abs() <= caustic_tolerance {
        return Err(Error::CausticSingularity {
            t,
            sin_t,
            tolerance: caustic_tolerance,
        });
    }
    if !(t > 0.0 && t < PI) {
        return Err(Error::InvalidParameter(format!(
            "direct kernel evaluation needs 0 < t < π, got t = {t}"
        )));
    }
    Ok(())
}

/// `Φ(t) = ∫₀ᵗ F²(τ)/sin²τ dτ` for `0 < t < π`.
///
/// The integrand vanishes like τ² at the origin and is taken as 0 there.
pub fn phase_integral(force: &ForceModel, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < PI) {
        return Err(Error::InvalidParameter(format!("phase integral needs 0 < t < π, got t = {t}")));
    }
    // Validates the force and the tabulated range in one go.
    drive_integrals(force, t)?;
    if matches!(force, ForceModel::Zero) {
        return Ok(0.0);
    }
    let integrand = |tau: f64| {
        if tau == 0.0 {
            return 0.0;
        }
        match drive_integrals(force, tau) {
            Ok(d) => (d.sin_moment / tau.sin()).powi(2),
            Err(_) => f64::NAN,
        }
    };
    adaptive_simpson(integrand, 0.0, t, DEFAULT_TOLERANCE)
}

/// Kernel with all time-dependent pieces evaluated once.
#[derive(Debug, Clone, Copy)]
pub struct GreenKernel {
    t: f64,
    sin_t: f64,
    cos_t: f64,
    sin_moment: f64,
    x_rest: f64,
    prefactor: Complex64,
}

impl GreenKernel {
    pub fn new(params: &GreenKernelParams) -> Result<Self> {
        let t = params.t;
        check_principal_domain(t, params.caustic_tolerance)?;
        let drive = drive_integrals(&params.force, t)?;
        let phase = phase_integral(&params.force, t)?;
        let (sin_t, cos_t) = t.sin_cos();
        let prefactor = Complex64::new(0.0, 2.0 * PI * sin_t).sqrt().inv() * Complex64::from_polar(1.0, -0.5 * phase);
        Ok(Self {
            t,
            sin_t,
            cos_t,
            sin_moment: drive.sin_moment,
            x_rest: drive.x_rest,
            prefactor,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, x: f64, x_prime: f64) -> Complex64 {
        let quad = ((x * x + x_prime * x_prime) * self.cos_t - 2.0 * x * x_prime) / (2.0 * self.sin_t);
        let lin = (x * self.sin_moment + x_prime * self.x_rest) / self.sin_t;
        self.prefactor * Complex64::from_polar(1.0, quad + lin)
    }

    /// `Δx Σⱼ wⱼ G(xᵢ, xⱼ) ψⱼ` for every grid point.
    fn apply(&self, psi: &WaveFunctionGrid) -> Result<WaveFunctionGrid> {
        let grid = *psi.grid();
        let n = grid.n_points;
        let dx = grid.step();
        let a = self.cos_t / (2.0 * self.sin_t);
        let b = 1.0 / self.sin_t;
        let c = self.sin_moment / self.sin_t;
        let d = self.x_rest / self.sin_t;
        let xs = grid.points();
        let weighted: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .zip(&xs)
            .enumerate()
            .map(|(j, (amp, &x))| amp * (trapezoid_weight(j, n) * dx) * Complex64::from_polar(1.0, a * x * x + d * x))
            .collect();
        const ANCHOR: usize = 32;
        let out: Vec<Complex64> = xs
            .par_iter()
            .map(|&x| {
                // exp(−i b x xⱼ) advanced by a fixed ratio, re-anchored every ANCHOR terms
                let ratio = Complex64::from_polar(1.0, -b * x * dx);
                let mut acc = Complex64::new(0.0, 0.0);
                let mut phasor = Complex64::new(1.0, 0.0);
                for (j, u) in weighted.iter().enumerate() {
                    if j % ANCHOR == 0 {
                        phasor = Complex64::from_polar(1.0, -b * x * xs[j]);
                    }
                    acc += u * phasor;
                    phasor *= ratio;
                }
                self.prefactor * Complex64::from_polar(1.0, a * x * x + c * x) * acc
            })
            .collect();
        WaveFunctionGrid::new(grid, out)
    }
}

/// Eq.-level evaluation of the kernel at a single pair of points.
pub fn green_function(x: f64, x_prime: f64, params: &GreenKernelParams) -> Result<Complex64> {
    Ok(GreenKernel::new(params)?.eval(x, x_prime))
}

/// Kernel for a constant force written around the shifted equilibrium `x = f0`.
pub fn constant_force_green(x: f64, x_prime: f64, f0: f64, t: f64, caustic_tolerance: f64) -> Result<Complex64> {
    check_principal_domain(t, caustic_tolerance)?;
    let (sin_t, cos_t) = t.sin_cos();
    let (u, v) = (x - f0, x_prime - f0);
    let phase = 0.5 * f0 * f0 * t + ((u * u + v * v) * cos_t - 2.0 * u * v) / (2.0 * sin_t);
    Ok(Complex64::new(0.0, 2.0 * PI * sin_t).sqrt().inv() * Complex64::from_polar(1.0, phase))
}

/// Driven free particle (ω → 0) in physical units.
pub fn green_free_limit(x: f64, x_prime: f64, t: f64, f0: f64, units: UnitsConfig) -> Complex64 {
    let UnitsConfig { mass: m, hbar, .. } = units;
    let action = -f0 * f0 * t.powi(3) / (24.0 * m) + 0.5 * f0 * t * (x + x_prime) + m * (x - x_prime).powi(2) / (2.0 * t);
    let amplitude = Complex64::new(0.0, -m / (2.0 * PI * hbar * t)).sqrt();
    amplitude * Complex64::from_polar(1.0, action / hbar)
}

/// The dimensionless kernel evaluated for physical `x`, `x'`, `t` and force:
/// `t → ωt`, `x → √(mω/ℏ) x`, `f → f / (ω √(mℏω))`, times the Jacobian `√(mω/ℏ)`.
pub fn green_function_in_units(
    x: f64,
    x_prime: f64,
    t: f64,
    force: &ForceModel,
    units: UnitsConfig,
    caustic_tolerance: f64,
) -> Result<Complex64> {
    let UnitsConfig { mass: m, omega: w, hbar } = units;
    let length = (m * w / hbar).sqrt();
    let force = force.rescaled(w, 1.0 / (w * (m * hbar * w).sqrt()))?;
    let kernel = GreenKernel::new(&GreenKernelParams {
        force,
        t: w * t,
        caustic_tolerance,
    })?;
    Ok(kernel.eval(length * x, length * x_prime) * length)
}

/// Largest grid step that resolves the kernel chirp for a step of length `t`.
pub fn required_step(t: f64, grid: &UniformGrid) -> f64 {
    PI * t.sin().abs() / (2.0 * grid.half_width())
}

fn check_step(t: f64, grid: &UniformGrid, caustic_tolerance: f64) -> Result<()> {
    check_principal_domain(t, caustic_tolerance)?;
    let required = required_step(t, grid);
    if grid.step() > required {
        return Err(Error::UnresolvedChirp {
            what: "propagation kernel",
            step: grid.step(),
            required,
        });
    }
    Ok(())
}

/// Number of equal sub-steps used to reach `t`.
pub fn substep_count(t: f64, grid: &UniformGrid, caustic_tolerance: f64) -> Result<usize> {
    let k_min = (t / PI).floor() as usize + 1;
    let mut first_err = None;
    for k in k_min..k_min + 8 {
        match check_step(t / k as f64, grid, caustic_tolerance) {
            Ok(()) => return Ok(k),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("loop ran"))
}

/// `ψ(x, t) = ∫ G(x, x', t) ψ(x', 0) dx'` on the input grid.
///
/// Times outside `(0, π)` or too close to a caustic are split into equal
/// sub-steps; the force is shifted in time for each leg. The result is not
/// renormalized.
pub fn propagate(psi0: &WaveFunctionGrid, force: &ForceModel, t: f64) -> Result<WaveFunctionGrid> {
    propagate_with_tolerance(psi0, force, t, DEFAULT_CAUSTIC_TOLERANCE)
}

pub fn propagate_with_tolerance(
    psi0: &WaveFunctionGrid,
    force: &ForceModel,
    t: f64,
    caustic_tolerance: f64,
) -> Result<WaveFunctionGrid> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("propagation time must be positive, got {t}")));
    }
    let steps = substep_count(t, psi0.grid(), caustic_tolerance)?;
    let tau = t / steps as f64;
    let mut current = psi0.clone();
    for k in 0..steps {
        let leg_force = if k == 0 { force.clone() } else { force.shifted(k as f64 * tau)? };
        let kernel = GreenKernel::new(&GreenKernelParams {
            force: leg_force,
            t: tau,
            caustic_tolerance,
        })?;
        current = kernel.apply(&current)?;
    }
    Ok(current)
}

/// Closed-form evolution of the `n`-th eigenstate:
///
/// ```text
/// ψ(x, t) = e^{−i(n+½)t} e^{−(i/2)(Φ + x̃² cot t)} e^{i p̃ x} ψₙ(x − x̃)
/// ```
pub fn fock_evolution_closed(n: FockIndex, force: &ForceModel, t: f64, grid: UniformGrid) -> Result<WaveFunctionGrid> {
    check_principal_domain(t, DEFAULT_CAUSTIC_TOLERANCE)?;
    let drive = drive_integrals(force, t)?;
    let phase = phase_integral(force, t)?;
    let global = -(n.get() as f64 + 0.5) * t - 0.5 * (phase + drive.x_rest.powi(2) / t.tan());
    let amplitudes = grid
        .points()
        .into_iter()
        .map(|x| {
            hermite_function(n, x - drive.x_rest).map(|h| Complex64::from_polar(h, global + drive.p_rest * x))
        })
        .collect::<Result<Vec<_>>>()?;
    let psi = WaveFunctionGrid::new(grid, amplitudes)?;
    psi.check_fits()?;
    Ok(psi)
}

/// Coefficients of `exp[(−½ + α)x² + βx]`; `α` must be purely imaginary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianExponentParams {
    alpha: Complex64,
    beta: Complex64,
}

impl GaussianExponentParams {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if alpha.re != 0.0 {
            return Err(Error::InvalidParameter(format!("alpha must be purely imaginary, got {alpha}")));
        }
        if !(alpha.im.is_finite() && beta.re.is_finite() && beta.im.is_finite()) {
            return Err(Error::InvalidParameter("alpha and beta must be finite".into()));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// `Iₙ = ∫ exp[(−½ + α)x² + βx] Hₙ(x) dx` in closed form.
pub fn hermite_gauss_integral(params: &GaussianExponentParams, n: FockIndex) -> Complex64 {
    let (alpha, beta) = (params.alpha, params.beta);
    let one = Complex64::new(1.0, 0.0);
    let denom = one - 2.0 * alpha;
    let root = (one - 4.0 * alpha * alpha).sqrt();
    let n = n.get();
    (2.0 * PI / denom).sqrt()
        * (beta * beta / (2.0 * denom)).exp()
        * Complex64::i().powu(n as u32)
        * ((one + 2.0 * alpha) / root).powu(n as u32)
        * hermite_complex(n, -Complex64::i() * beta / root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent_wavefunction, default_grid, fock_wavefunction, overlap, CoherentParams};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn phase_integral_examples() {
        assert_eq!(phase_integral(&ForceModel::Zero, 2.0).unwrap(), 0.0);
        let one = ForceModel::Constant { f0: 1.0 };
        let v = phase_integral(&one, PI / 2.0).unwrap();
        // F²/sin² = tan²(τ/2); brute quadrature of the raw ratio as oracle
        let raw = adaptive_simpson(
            |tau: f64| if tau == 0.0 { 0.0 } else { ((1.0 - tau.cos()) / tau.sin()).powi(2) },
            0.0,
            PI / 2.0,
            1e-13,
        )
        .unwrap();
        assert!((raw - (2.0 - PI / 2.0)).abs() < 1e-11);
        assert!((v - raw).abs() < 1e-9);
        assert!((v - 0.429204).abs() < 1e-6);
        let two = ForceModel::Constant { f0: 2.0 };
        let v = phase_integral(&two, 1.0).unwrap();
        assert!((v - 4.0 * (2.0 * 0.5f64.tan() - 1.0)).abs() < 1e-9);
        assert!(phase_integral(&one, 3.5).is_err());
    }

    #[test]
    fn kernel_at_quarter_period() {
        let g = green_function(0.0, 0.0, &GreenKernelParams::new(ForceModel::Zero, PI / 2.0)).unwrap();
        assert!((g.norm() - (2.0 * PI).powf(-0.5)).abs() < 1e-12);
        assert!((g.arg() + FRAC_PI_4).abs() < 1e-12);
        assert!((g.norm() - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn kernel_is_unimodular_up_to_prefactor() {
        for force in [ForceModel::Zero, ForceModel::Constant { f0: 1.3 }] {
            for &t in &[0.2, 1.0, 2.0, 3.0] {
                let k = GreenKernel::new(&GreenKernelParams::new(force.clone(), t)).unwrap();
                for &(x, y) in &[(0.0, 0.0), (1.5, -2.0), (-4.0, 3.3)] {
                    let scaled = k.eval(x, y).norm() * (2.0 * PI * t.sin().abs()).sqrt();
                    assert!((scaled - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn caustic_is_rejected() {
        let r = green_function(0.0, 0.0, &GreenKernelParams::new(ForceModel::Zero, PI));
        assert!(matches!(r, Err(Error::CausticSingularity { .. })));
        let r = green_function(0.0, 0.0, &GreenKernelParams::new(ForceModel::Zero, 1e-8));
        assert!(matches!(r, Err(Error::CausticSingularity { .. })));
    }

    #[test]
    fn free_limit_at_coincidence() {
        let g = green_free_limit(0.0, 0.0, 1.0, 0.0, UnitsConfig::natural());
        assert!((g.norm() - (2.0 * PI).powf(-0.5)).abs() < 1e-14);
        assert!((g.arg() + FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn ground_state_picks_up_half_phase() {
        let psi0 = fock_wavefunction(FockIndex::new(0).unwrap(), default_grid()).unwrap();
        let t = 1.3;
        let psi = propagate(&psi0, &ForceModel::Zero, t).unwrap();
        let ov = overlap(&psi0, &psi).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-6);
        assert!((ov.arg() + t / 2.0).abs() < 1e-5);
    }

    #[test]
    fn propagation_through_caustics_composes() {
        let psi0 = fock_wavefunction(FockIndex::new(1).unwrap(), default_grid()).unwrap();
        for &t in &[PI, 4.0, 2.0 * PI + 0.3] {
            let psi = propagate(&psi0, &ForceModel::Zero, t).unwrap();
            let ov = overlap(&psi0, &psi).unwrap();
            let want = Complex64::from_polar(1.0, -1.5 * t);
            assert!((ov - want).norm() < 1e-6, "t={t}: {ov}");
        }
    }

    #[test]
    fn propagation_rejects_unresolved_chirp() {
        let coarse = UniformGrid::new(-12.0, 12.0, 200).unwrap();
        let psi0 = coherent_wavefunction(CoherentParams::default(), coarse).unwrap();
        let r = propagate(&psi0, &ForceModel::Zero, 0.05);
        assert!(matches!(r, Err(Error::UnresolvedChirp { .. })), "{r:?}");
    }

    #[test]
    fn closed_fock_evolution_is_stationary_without_force() {
        let n = FockIndex::new(0).unwrap();
        let psi = fock_evolution_closed(n, &ForceModel::Zero, 0.3, default_grid()).unwrap();
        let f0 = fock_wavefunction(n, default_grid()).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(f0.amplitudes()) {
            assert!((a - b * Complex64::from_polar(1.0, -0.15)).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_fock_evolution_peak_follows_drive() {
        let n = FockIndex::new(0).unwrap();
        let force = ForceModel::Constant { f0: 1.0 };
        let psi = fock_evolution_closed(n, &force, PI / 2.0, default_grid()).unwrap();
        let (i_peak, _) = psi
            .amplitudes()
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (i, a)| if a.norm() > best.1 { (i, a.norm()) } else { best });
        assert!((psi.x(i_peak) - 1.0).abs() <= psi.step());
    }

    #[test]
    fn hermite_gauss_trivial_values() {
        let zero = Complex64::new(0.0, 0.0);
        let p = GaussianExponentParams::new(zero, zero).unwrap();
        assert!((hermite_gauss_integral(&p, FockIndex::new(0).unwrap()) - (2.0 * PI).sqrt()).norm() < 1e-14);
        assert!(hermite_gauss_integral(&p, FockIndex::new(1).unwrap()).norm() < 1e-14);
        assert!(GaussianExponentParams::new(Complex64::new(0.1, 0.5), zero).is_err());
    }

    #[test]
    fn hermite_gauss_matches_quadrature() {
        let cases = [
            (Complex64::new(0.0, 0.5), Complex64::new(1.0, 0.0), 2),
            (Complex64::new(0.0, 0.3), Complex64::new(0.7, -0.2), 3),
            (Complex64::new(0.0, -0.2), Complex64::new(0.5, 0.1), 4),
        ];
        for (alpha, beta, n) in cases {
            let p = GaussianExponentParams::new(alpha, beta).unwrap();
            let closed = hermite_gauss_integral(&p, FockIndex::new(n).unwrap());
            let integrand = |x: f64| {
                ((Complex64::new(-0.5, 0.0) + alpha) * x * x + beta * x).exp() * hermite_complex(n, Complex64::new(x, 0.0))
            };
            // unit panels keep the adaptive rule from skipping the bulk
            let mut brute = Complex64::new(0.0, 0.0);
            for k in -14..14 {
                let (a, b) = (k as f64, k as f64 + 1.0);
                brute += Complex64::new(
                    adaptive_simpson(|x| integrand(x).re, a, b, 1e-13).unwrap(),
                    adaptive_simpson(|x| integrand(x).im, a, b, 1e-13).unwrap(),
                );
            }
            assert!((closed - brute).norm() < 1e-8 * brute.norm().max(1.0), "{closed} vs {brute}");
        }
    }
}
