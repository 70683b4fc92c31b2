//! Wigner functions on phase-space grids and their evolution.
//!
//! The transform is `W(q, p) = (1/π) ∫ ψ*(q + y) ψ(q − y) e^{2ipy} dy`
//! (ℏ = 1, `∬ W = 1`). For a potential at most quadratic in `q` the Moyal
//! equation reduces to the Liouville equation, so `W` is transported along
//! classical trajectories exactly like a classical density.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{drive_integrals, phase_flow_residual, DriveIntegrals, ForceModel, PhasePoint};
use crate::error::{Error, Result};
use crate::fmt_num;
use crate::grid::PlaneGrid;
use crate::quadrature::{lagrange_uniform, trapezoid_weight};
use crate::states::{InitialState, WaveFunctionGrid};

/// A value together with whether it came from inside the function's domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub in_domain: bool,
}

impl Sample {
    pub fn inside(value: f64) -> Self {
        Self { value, in_domain: true }
    }

    pub fn outside() -> Self {
        Self {
            value: 0.0,
            in_domain: false,
        }
    }
}

/// Axis-aligned rectangle of phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBox {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl PhaseBox {
    fn around(points: &[PhasePoint]) -> Self {
        let mut b = PhaseBox {
            q_min: f64::INFINITY,
            q_max: f64::NEG_INFINITY,
            p_min: f64::INFINITY,
            p_max: f64::NEG_INFINITY,
        };
        for pt in points {
            b.q_min = b.q_min.min(pt.q);
            b.q_max = b.q_max.max(pt.q);
            b.p_min = b.p_min.min(pt.p);
            b.p_max = b.p_max.max(pt.p);
        }
        b
    }

    fn corners(&self) -> [PhasePoint; 4] {
        [
            PhasePoint::new(self.q_min, self.p_min),
            PhasePoint::new(self.q_min, self.p_max),
            PhasePoint::new(self.q_max, self.p_min),
            PhasePoint::new(self.q_max, self.p_max),
        ]
    }
}

/// Real function on phase space: a Wigner function or a classical density.
pub trait PhaseSpaceFunction: Sync {
    fn sample(&self, q: f64, p: f64) -> Sample;

    fn value(&self, q: f64, p: f64) -> f64 {
        self.sample(q, p).value
    }

    /// Region outside of which the function is zero or negligible.
    fn support(&self) -> Option<PhaseBox> {
        None
    }

    /// Native sampling step, if grid-backed.
    fn resolution(&self) -> Option<f64> {
        None
    }
}

impl<T: PhaseSpaceFunction + ?Sized> PhaseSpaceFunction for &T {
    fn sample(&self, q: f64, p: f64) -> Sample {
        (**self).sample(q, p)
    }

    fn support(&self) -> Option<PhaseBox> {
        (**self).support()
    }

    fn resolution(&self) -> Option<f64> {
        (**self).resolution()
    }
}

/// Laguerre polynomial `Lₙ(x)` by recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * cur / (k + 1) as f64 - k as f64 * prev / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed-form Wigner functions of the initial states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticWigner(pub InitialState);

impl PhaseSpaceFunction for AnalyticWigner {
    fn sample(&self, q: f64, p: f64) -> Sample {
        let value = match self.0 {
            InitialState::Coherent { x0, p0 } => (-(q - x0).powi(2) - (p - p0).powi(2)).exp() / PI,
            InitialState::Fock { n } => {
                let r2 = q * q + p * p;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign / PI * (-r2).exp() * laguerre(n, 2.0 * r2)
            }
        };
        Sample::inside(value)
    }

    fn support(&self) -> Option<PhaseBox> {
        let (q0, p0, radius) = match self.0 {
            InitialState::Coherent { x0, p0 } => (x0, p0, 7.0),
            InitialState::Fock { n } => (0.0, 0.0, (2.0 * n as f64 + 1.0).sqrt() + 7.0),
        };
        Some(PhaseBox {
            q_min: q0 - radius,
            q_max: q0 + radius,
            p_min: p0 - radius,
            p_max: p0 + radius,
        })
    }
}

/// Real values on a uniform (q, p) grid, bilinearly interpolated between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    grid: PlaneGrid,
    values: Vec<f64>,
    imag_residue: f64,
}

/// Measured WignerGrid invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerDiagnostics {
    pub integral: f64,
    pub imag_residue: f64,
    pub max_abs: f64,
    pub min: f64,
}

impl WignerGrid {
    pub fn new(grid: PlaneGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        Ok(Self {
            grid,
            values,
            imag_residue: 0.0,
        })
    }

    /// Samples any phase-space function at the grid nodes.
    pub fn from_function<F: PhaseSpaceFunction>(grid: PlaneGrid, f: &F) -> Self {
        let values = grid.nodes().map(|(q, p)| f.value(q, p)).collect();
        Self {
            grid,
            values,
            imag_residue: 0.0,
        }
    }

    pub fn grid(&self) -> &PlaneGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, iq: usize, ip: usize) -> f64 {
        self.values[self.grid.index(iq, ip)]
    }

    /// Largest imaginary part met while building the grid from a wavefunction.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// `∫ W dp` at the `iq`-th position node.
    pub fn position_marginal(&self, iq: usize) -> f64 {
        let n = self.grid.p.n_points;
        self.grid.p.step() * (0..n).map(|ip| trapezoid_weight(ip, n) * self.at(iq, ip)).sum::<f64>()
    }

    /// `∫ W dq` at the `ip`-th momentum node.
    pub fn momentum_marginal(&self, ip: usize) -> f64 {
        let n = self.grid.q.n_points;
        self.grid.q.step() * (0..n).map(|iq| trapezoid_weight(iq, n) * self.at(iq, ip)).sum::<f64>()
    }

    pub fn integral(&self) -> f64 {
        let n = self.grid.q.n_points;
        self.grid.q.step() * (0..n).map(|iq| trapezoid_weight(iq, n) * self.position_marginal(iq)).sum::<f64>()
    }

    pub fn diagnostics(&self) -> WignerDiagnostics {
        WignerDiagnostics {
            integral: self.integral(),
            imag_residue: self.imag_residue,
            max_abs: self.values.iter().fold(0.0, |m, v| m.max(v.abs())),
            min: self.values.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// Writes `q,p,w` rows (row-major over q then p) after `#` metadata lines.
    pub fn write_csv<W: Write>(&self, out: &mut W, metadata: &[(String, String)]) -> io::Result<()> {
        let g = &self.grid;
        writeln!(out, "# q_grid: {} {} {}", fmt_num(g.q.min), fmt_num(g.q.max), g.q.n_points)?;
        writeln!(out, "# p_grid: {} {} {}", fmt_num(g.p.min), fmt_num(g.p.max), g.p.n_points)?;
        for (key, value) in metadata {
            writeln!(out, "# {key}: {value}")?;
        }
        writeln!(out, "q,p,w")?;
        for ((q, p), w) in g.nodes().zip(&self.values) {
            writeln!(out, "{},{},{}", fmt_num(q), fmt_num(p), fmt_num(*w))?;
        }
        Ok(())
    }
}

impl PhaseSpaceFunction for WignerGrid {
    fn sample(&self, q: f64, p: f64) -> Sample {
        let (gq, gp) = (&self.grid.q, &self.grid.p);
        if !(gq.contains(q) && gp.contains(p)) {
            return Sample::outside();
        }
        let sq = ((q - gq.min) / gq.step()).min((gq.n_points - 1) as f64);
        let sp = ((p - gp.min) / gp.step()).min((gp.n_points - 1) as f64);
        let iq = (sq.floor() as usize).min(gq.n_points - 2);
        let ip = (sp.floor() as usize).min(gp.n_points - 2);
        let (fq, fp) = (sq - iq as f64, sp - ip as f64);
        let value = self.at(iq, ip) * (1.0 - fq) * (1.0 - fp)
            + self.at(iq + 1, ip) * fq * (1.0 - fp)
            + self.at(iq, ip + 1) * (1.0 - fq) * fp
            + self.at(iq + 1, ip + 1) * fq * fp;
        Sample::inside(value)
    }

    fn support(&self) -> Option<PhaseBox> {
        Some(PhaseBox {
            q_min: self.grid.q.min,
            q_max: self.grid.q.max,
            p_min: self.grid.p.min,
            p_max: self.grid.p.max,
        })
    }

    fn resolution(&self) -> Option<f64> {
        Some(self.grid.q.step().min(self.grid.p.step()))
    }
}

/// Samples of |ψ|² below this fraction of the peak count as outside the support.
const SUPPORT_RATIO: f64 = 1e-12;

/// Builds the Wigner function of `psi` on `grid`.
///
/// Each row integrates over `y` on the wavefunction's own step, sampling
/// `ψ(q ± y)` by six-point interpolation; the symmetric sampling keeps the
/// result real up to rounding.
pub fn wigner_from_wavefunction(psi: &WaveFunctionGrid, grid: PlaneGrid) -> Result<WignerGrid> {
    let amps = psi.amplitudes();
    let peak = amps.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let first = amps.iter().position(|a| a.norm_sqr() > SUPPORT_RATIO * peak);
    let last = amps.iter().rposition(|a| a.norm_sqr() > SUPPORT_RATIO * peak);
    let (Some(first), Some(last)) = (first, last) else {
        return Err(Error::InvalidParameter("wavefunction vanishes identically".into()));
    };
    let (lo, hi) = (psi.x(first), psi.x(last));
    if lo < grid.q.min || hi > grid.q.max {
        return Err(Error::InvalidGrid(format!(
            "wavefunction support [{lo:.3}, {hi:.3}] exceeds the Wigner q-range [{}, {}]",
            grid.q.min, grid.q.max
        )));
    }
    let dy = psi.step();
    let required = PI / (2.0 * grid.p.half_width());
    if dy > required {
        return Err(Error::UnresolvedChirp {
            what: "Wigner transform",
            step: dy,
            required,
        });
    }
    let x_min = psi.grid().min;
    let x_max = psi.grid().max;
    let ps = grid.p.points();

    let rows: Vec<(Vec<f64>, f64)> = grid
        .q
        .points()
        .par_iter()
        .map(|&q| {
            let mut row = vec![0.0; ps.len()];
            let reach = (q - x_min).min(x_max - q);
            if reach < 0.0 {
                return (row, 0.0);
            }
            let k_max = (reach / dy).floor() as usize;
            // v[k_max + j] = ψ(q + j·dy)
            let v: Vec<Complex64> = (0..=2 * k_max)
                .map(|i| lagrange_uniform(amps, x_min, dy, q + (i as f64 - k_max as f64) * dy))
                .collect();
            let products: Vec<Complex64> = (0..=2 * k_max).map(|i| v[i].conj() * v[2 * k_max - i]).collect();
            let scale = products.iter().map(|a| a.norm()).fold(0.0, f64::max);
            if scale == 0.0 {
                return (row, 0.0);
            }
            // Trim the negligible tails symmetrically.
            let k_eff = (0..=k_max)
                .rev()
                .find(|&k| products[k_max + k].norm() > 1e-17 * scale)
                .unwrap_or(0);
            let (start, end) = (k_max - k_eff, k_max + k_eff);
            let count = end - start + 1;
            let mut worst_imag: f64 = 0.0;
            for (slot, &p) in row.iter_mut().zip(&ps) {
                let ratio = Complex64::from_polar(1.0, 2.0 * p * dy);
                let mut acc = Complex64::new(0.0, 0.0);
                let mut phasor = Complex64::new(1.0, 0.0);
                for (j, a) in products[start..=end].iter().enumerate() {
                    if j % 32 == 0 {
                        let y = (start + j) as f64 * dy - k_max as f64 * dy;
                        phasor = Complex64::from_polar(1.0, 2.0 * p * y);
                    }
                    acc += a * phasor * trapezoid_weight(j, count);
                    phasor *= ratio;
                }
                let w = acc * (dy / PI);
                *slot = w.re;
                worst_imag = worst_imag.max(w.im.abs());
            }
            (row, worst_imag)
        })
        .collect();

    let imag_residue = rows.iter().fold(0.0, |m: f64, r| m.max(r.1));
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(WignerGrid {
        grid,
        values,
        imag_residue,
    })
}

/// `W(q, p, t) = W₀(q cos t − p sin t + F(t), q sin t + p cos t − J(t))`.
#[derive(Debug, Clone)]
pub struct EvolvedWigner<W> {
    initial: W,
    drive: DriveIntegrals,
    sin_t: f64,
    cos_t: f64,
}

impl<W> EvolvedWigner<W> {
    pub fn drive(&self) -> &DriveIntegrals {
        &self.drive
    }

    pub fn initial(&self) -> &W {
        &self.initial
    }
}

impl<W: PhaseSpaceFunction> PhaseSpaceFunction for EvolvedWigner<W> {
    fn sample(&self, q: f64, p: f64) -> Sample {
        let d = &self.drive;
        let q0 = q * self.cos_t - p * self.sin_t + d.sin_moment;
        let p0 = q * self.sin_t + p * self.cos_t - d.cos_moment;
        self.initial.sample(q0, p0)
    }

    fn support(&self) -> Option<PhaseBox> {
        let initial = self.initial.support()?;
        let mapped: Vec<PhasePoint> = initial.corners().iter().map(|c| self.drive.trajectory(*c)).collect();
        Some(PhaseBox::around(&mapped))
    }

    fn resolution(&self) -> Option<f64> {
        self.initial.resolution()
    }
}

pub fn wigner_evolve<W: PhaseSpaceFunction>(w0: W, force: &ForceModel, t: f64) -> Result<EvolvedWigner<W>> {
    let drive = drive_integrals(force, t)?;
    let (sin_t, cos_t) = t.sin_cos();
    Ok(EvolvedWigner {
        initial: w0,
        drive,
        sin_t,
        cos_t,
    })
}

/// Residual of the reduced Moyal equation
/// `∂W/∂t + p ∂W/∂q + (f(t) − q) ∂W/∂p = 0` over `grid`, normalized by
/// `max |∂W/∂q|`.
pub fn moyal_residual<R>(field: R, force: &ForceModel, t: f64, grid: &PlaneGrid) -> f64
where
    R: Fn(f64, f64, f64) -> f64,
{
    phase_flow_residual(field, force, t, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{liouville_evolve, ClassicalDensity};
    use crate::states::{coherent_wavefunction, default_grid, fock_wavefunction, CoherentParams, FockIndex};

    fn fock_psi(n: usize) -> WaveFunctionGrid {
        fock_wavefunction(FockIndex::new(n).unwrap(), default_grid()).unwrap()
    }

    fn small_grid() -> PlaneGrid {
        PlaneGrid::square(8.0, 129).unwrap()
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.7;
        assert_eq!(laguerre(0, x), 1.0);
        assert!((laguerre(1, x) - (1.0 - x)).abs() < 1e-15);
        assert!((laguerre(2, x) - (x * x - 4.0 * x + 2.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ground_state_wigner() {
        let w = wigner_from_wavefunction(&fock_psi(0), small_grid()).unwrap();
        // node 64 is (0, 0)
        assert!((w.at(64, 64) - 1.0 / PI).abs() < 1e-10);
        let analytic = AnalyticWigner(InitialState::Fock { n: 0 });
        for (i, (q, p)) in w.grid().nodes().enumerate() {
            assert!((w.values()[i] - analytic.value(q, p)).abs() < 1e-10);
        }
        assert!(w.imag_residue() < 1e-10);
    }

    #[test]
    fn first_excited_state_is_negative_at_origin() {
        let w = wigner_from_wavefunction(&fock_psi(1), small_grid()).unwrap();
        assert!((w.at(64, 64) + 1.0 / PI).abs() < 1e-10);
        assert!((AnalyticWigner(InitialState::Fock { n: 1 }).value(0.0, 0.0) + 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn coherent_wigner_is_displaced() {
        let psi = coherent_wavefunction(CoherentParams { x0: 1.0, p0: -2.0 }, default_grid()).unwrap();
        let w = wigner_from_wavefunction(&psi, small_grid()).unwrap();
        let analytic = AnalyticWigner(InitialState::Coherent { x0: 1.0, p0: -2.0 });
        let worst = w
            .grid()
            .nodes()
            .zip(w.values())
            .map(|((q, p), v)| (v - analytic.value(q, p)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn invariants_and_marginals() {
        for n in 0..=3 {
            let psi = fock_psi(n);
            let w = wigner_from_wavefunction(&psi, PlaneGrid::default()).unwrap();
            let diag = w.diagnostics();
            assert!((diag.integral - 1.0).abs() < 1e-4);
            assert!(diag.imag_residue < 1e-10);
            assert!(diag.max_abs <= 1.0 / PI + 1e-6);
            for iq in (0..256).step_by(17) {
                let q = w.grid().q.point(iq);
                let density = psi.interpolate(q).norm_sqr();
                assert!((w.position_marginal(iq) - density).abs() < 1e-4, "n={n} q={q}");
            }
        }
    }

    #[test]
    fn support_outside_grid_is_rejected() {
        let psi = coherent_wavefunction(CoherentParams { x0: 5.0, p0: 0.0 }, default_grid()).unwrap();
        let narrow = PlaneGrid::square(4.0, 65).unwrap();
        assert!(matches!(wigner_from_wavefunction(&psi, narrow), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn evolution_examples() {
        let w0 = AnalyticWigner(InitialState::Fock { n: 0 });
        let force = ForceModel::Constant { f0: 1.0 };
        let still = wigner_evolve(w0, &force, 0.0).unwrap();
        assert_eq!(still.value(0.3, -0.2), w0.value(0.3, -0.2));
        let moved = wigner_evolve(w0, &force, PI / 2.0).unwrap();
        assert!((moved.value(1.0, 1.0) - 1.0 / PI).abs() < 1e-14);
        assert!((moved.value(0.0, 0.0) - (-2.0f64).exp() / PI).abs() < 1e-14);
    }

    #[test]
    fn out_of_domain_lookups_are_flagged() {
        let w = wigner_from_wavefunction(&fock_psi(0), small_grid()).unwrap();
        assert_eq!(w.sample(9.0, 0.0), Sample::outside());
        let moved = wigner_evolve(&w, &ForceModel::Constant { f0: 3.0 }, PI).unwrap();
        // (q, p) = (14, 0) maps back to (−8, 0)... inside; (20, 0) falls outside
        assert!(moved.sample(14.0, 0.0).in_domain);
        assert!(!moved.sample(20.0, 0.0).in_domain);
    }

    #[test]
    fn wigner_and_liouville_share_the_flow() {
        let rho0 = ClassicalDensity::gaussian(0.5, -0.3, 0.9);
        struct Wrap(ClassicalDensity);
        impl PhaseSpaceFunction for Wrap {
            fn sample(&self, q: f64, p: f64) -> Sample {
                Sample::inside(self.0.value(q, p))
            }
        }
        let force = ForceModel::Sinusoidal {
            amplitude: 0.6,
            frequency: 1.4,
            phase: 0.3,
        };
        let classical = liouville_evolve(&rho0, &force, 2.1).unwrap();
        let quantum = wigner_evolve(Wrap(rho0.clone()), &force, 2.1).unwrap();
        for i in 0..50 {
            let (q, p) = (-3.0 + 0.12 * i as f64, 2.0 - 0.08 * i as f64);
            assert!((classical.value(q, p) - quantum.value(q, p)).abs() < 1e-12);
        }
    }

    #[test]
    fn moyal_residual_examples() {
        let grid = PlaneGrid::square(3.0, 9).unwrap();
        let ground = AnalyticWigner(InitialState::Fock { n: 0 });
        let zero = ForceModel::Zero;
        let r = moyal_residual(|q, p, t| wigner_evolve(ground, &zero, t).unwrap().value(q, p), &zero, 0.8, &grid);
        assert!(r < 1e-4, "{r}");

        let fock2 = AnalyticWigner(InitialState::Fock { n: 2 });
        let force = ForceModel::Constant { f0: 1.0 };
        let evolved = |q: f64, p: f64, t: f64| wigner_evolve(fock2, &force, t).unwrap().value(q, p);
        let r = moyal_residual(evolved, &force, 0.7, &grid);
        assert!(r < 1e-3, "{r}");

        // run the map backwards in time
        let reversed = |q: f64, p: f64, t: f64| {
            let d = drive_integrals(&force, t).unwrap();
            let (s, c) = t.sin_cos();
            fock2.value(q * c + p * s - d.sin_moment, -q * s + p * c + d.cos_moment)
        };
        let r = moyal_residual(reversed, &force, 0.7, &grid);
        assert!(r > 0.1, "{r}");
    }
}
