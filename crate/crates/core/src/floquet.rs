//! Two-level collisional model with a periodically modulated level:
//!
//! ```text
//! H(t)/ħ = [[ω_α,  Ω/2           ],
//!           [Ω/2,  ω_β + A cos ωt]]
//! ```
//!
//! In the frame co-moving with the drive the off-diagonal coupling splits into
//! sidebands `(Ω/2)(−1)^m J_m(A/ω) e^{i(ω_b + mω)t}`, `ω_b = ω_α − ω_β`, and the
//! term with `mω ≈ −ω_b` dominates. [`floquet_spectrum`] diagonalises the
//! truncated Floquet matrix to check this without the rotating-wave step.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::specfun::{bessel_j, SpecFunError, MAX_ORDER};

/// Eigenvalue drift allowed between truncations `N` and `N + 5`, in units of ω.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;
/// Largest photon-number cutoff tried by automatic truncation.
pub const MAX_TRUNCATION: usize = 100;
const TRUNCATION_STEP: usize = 5;
const COARSE_POINTS: usize = 41;
const GOLDEN_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FloquetError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("truncation order {given} is below the minimum {required} for A/ω = {ratio:.3}")]
    TruncationTooSmall { given: usize, required: usize, ratio: f64 },
    #[error("quasi-energies drift by {drift:.3e}·ω between N = {truncation} and N + 5 (tolerance {tolerance:.1e}·ω)")]
    NotConverged { truncation: usize, drift: f64, tolerance: f64 },
    #[error("no gap minimum inside [{lo}, {hi}] rad/s; the smallest sampled gap lies on the window edge")]
    NoMinimum { lo: f64, hi: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenTwoLevel {
    /// rad/s.
    pub omega_alpha: f64,
    /// rad/s.
    pub omega_beta: f64,
    /// Bare coupling Ω (off-diagonal ħΩ/2), rad/s.
    pub omega_rabi: f64,
    /// Modulation amplitude A of the β level, rad/s.
    pub amplitude: f64,
    /// Modulation angular frequency ω, rad/s.
    pub omega_mod: f64,
}

impl DrivenTwoLevel {
    /// Level α at `ω_b`, β at zero.
    pub fn from_detuning(omega_b: f64, omega_rabi: f64, amplitude: f64, omega_mod: f64) -> Self {
        DrivenTwoLevel { omega_alpha: omega_b, omega_beta: 0.0, omega_rabi, amplitude, omega_mod }
    }

    /// `ω_b = ω_α − ω_β`.
    pub fn omega_b(&self) -> f64 {
        self.omega_alpha - self.omega_beta
    }

    pub fn with_omega_mod(mut self, omega_mod: f64) -> Self {
        self.omega_mod = omega_mod;
        self
    }

    fn validate(&self) -> Result<(), FloquetError> {
        let finite = [self.omega_alpha, self.omega_beta, self.omega_rabi, self.amplitude, self.omega_mod]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(FloquetError::InvalidModel("non-finite parameter".into()));
        }
        if self.omega_rabi < 0.0 {
            return Err(FloquetError::InvalidModel(format!("Ω = {} must be >= 0", self.omega_rabi)));
        }
        if !(self.omega_mod > 0.0) {
            return Err(FloquetError::InvalidModel(format!("ω = {} must be > 0", self.omega_mod)));
        }
        Ok(())
    }

    /// `N_min = 3⌈|A|/ω⌉ + 5`.
    pub fn minimum_truncation(&self) -> usize {
        3 * (self.amplitude.abs() / self.omega_mod).ceil() as usize + 5
    }
}

/// Sideband coupling `Ω (−1)^m J_m(A/ω)`, rad/s. Half of it is the
/// off-diagonal element; its magnitude is the resonant gap.
pub fn effective_coupling(model: &DrivenTwoLevel, m: i32) -> Result<f64, FloquetError> {
    model.validate()?;
    let j = bessel_j(m, model.amplitude / model.omega_mod)?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(model.omega_rabi * sign * j)
}

/// `|Ω J_m(A/ω)|`.
pub fn rwa_gap(model: &DrivenTwoLevel, m: i32) -> Result<f64, FloquetError> {
    Ok(effective_coupling(model, m)?.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub m: i32,
    /// rad/s.
    pub omega: f64,
}

/// Modulation frequencies `ω = −ω_b/m` for `|m| = 1..=m_max`. A bound level
/// (`ω_b > 0`) resonates for negative `m`, a quasi-bound one for positive `m`.
pub fn resonance_frequencies(omega_b: f64, m_max: u32) -> Result<Vec<Resonance>, FloquetError> {
    if omega_b == 0.0 || !omega_b.is_finite() {
        return Err(FloquetError::InvalidModel(format!("ω_b = {omega_b} must be finite and nonzero")));
    }
    if m_max == 0 || m_max > MAX_ORDER as u32 {
        return Err(FloquetError::InvalidModel(format!("m_max = {m_max} outside 1..={MAX_ORDER}")));
    }
    let sign = -omega_b.signum() as i32;
    Ok((1..=m_max as i32).map(|k| Resonance { m: sign * k, omega: omega_b.abs() / k as f64 }).collect())
}

/// Fourier amplitudes of one Floquet mode at photon index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierComponent {
    pub n: i32,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMode {
    /// Quasi-energy in (−ω/2, ω/2], rad/s.
    pub quasi_energy: f64,
    /// Unit-norm eigenvector.
    pub components: Vec<FourierComponent>,
}

impl FloquetMode {
    /// Total weight on level α.
    pub fn alpha_weight(&self) -> f64 {
        self.components.iter().map(|c| c.alpha * c.alpha).sum()
    }

    /// Mean photon index `Σ n |c_n|²`.
    pub fn centroid(&self) -> f64 {
        self.components.iter().map(|c| c.n as f64 * (c.alpha * c.alpha + c.beta * c.beta)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSolution {
    /// Both quasi-energies, ascending within (−ω/2, ω/2], rad/s.
    pub quasi_energies: [f64; 2],
    pub modes: [FloquetMode; 2],
    pub truncation_order: usize,
    pub omega_mod: f64,
}

impl FloquetSolution {
    /// Splitting between the two quasi-energies measured around the circle of circumference ω.
    pub fn gap(&self) -> f64 {
        circular_distance(self.quasi_energies[0], self.quasi_energies[1], self.omega_mod)
    }
}

/// Folds `x` into (−ω/2, ω/2].
pub fn fold(x: f64, omega: f64) -> f64 {
    let mut y = x - omega * (x / omega).round();
    if y <= -0.5 * omega {
        y += omega;
    } else if y > 0.5 * omega {
        y -= omega;
    }
    y
}

fn circular_distance(a: f64, b: f64, omega: f64) -> f64 {
    fold(a - b, omega).abs()
}

/// Truncated Floquet matrix, diagonal shifted by `−(ω_α + ω_β)/2`.
/// Basis ordering `(α, n), (β, n)` for `n = −N..=N`.
fn floquet_matrix(model: &DrivenTwoLevel, n_max: usize) -> DMatrix<f64> {
    let size = 2 * (2 * n_max + 1);
    let half_b = 0.5 * model.omega_b();
    let mut h = DMatrix::zeros(size, size);
    for (k, n) in (-(n_max as i64)..=n_max as i64).enumerate() {
        let (a, b) = (2 * k, 2 * k + 1);
        let photon = n as f64 * model.omega_mod;
        h[(a, a)] = half_b + photon;
        h[(b, b)] = -half_b + photon;
        h[(a, b)] = 0.5 * model.omega_rabi;
        h[(b, a)] = 0.5 * model.omega_rabi;
        if k + 1 < 2 * n_max + 1 {
            let b_next = 2 * (k + 1) + 1;
            h[(b, b_next)] = 0.5 * model.amplitude;
            h[(b_next, b)] = 0.5 * model.amplitude;
        }
    }
    h
}

/// Indices of the two eigenvalues closest to the centre of the spectrum;
/// their eigenvectors sit furthest from the truncation edges.
fn central_pair(eigenvalues: &DVector<f64>) -> [usize; 2] {
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eigenvalues[i].abs().total_cmp(&eigenvalues[j].abs()));
    [order[0], order[1]]
}

/// Quasi-energies only, ascending.
fn quasi_pair(model: &DrivenTwoLevel, n_max: usize) -> [f64; 2] {
    let values = floquet_matrix(model, n_max).symmetric_eigenvalues();
    let shift = 0.5 * (model.omega_alpha + model.omega_beta);
    let [i, j] = central_pair(&values);
    let (a, b) = (fold(values[i] + shift, model.omega_mod), fold(values[j] + shift, model.omega_mod));
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

fn solve(model: &DrivenTwoLevel, n_max: usize) -> FloquetSolution {
    let eig = SymmetricEigen::new(floquet_matrix(model, n_max));
    let order = central_pair(&eig.eigenvalues);
    let shift = 0.5 * (model.omega_alpha + model.omega_beta);
    let omega = model.omega_mod;
    let mut modes: Vec<FloquetMode> = order
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i);
            let components = (0..2 * n_max + 1)
                .map(|k| FourierComponent { n: k as i32 - n_max as i32, alpha: v[2 * k], beta: v[2 * k + 1] })
                .collect();
            FloquetMode { quasi_energy: fold(eig.eigenvalues[i] + shift, omega), components }
        })
        .collect();
    modes.sort_by(|a, b| a.quasi_energy.total_cmp(&b.quasi_energy));
    let second = modes.pop().unwrap();
    let first = modes.pop().unwrap();
    FloquetSolution {
        quasi_energies: [first.quasi_energy, second.quasi_energy],
        modes: [first, second],
        truncation_order: n_max,
        omega_mod: omega,
    }
}

/// Largest circular mismatch between two quasi-energy pairs, in units of ω.
fn drift(p: [f64; 2], q: [f64; 2], w: f64) -> f64 {
    let d = |x: f64, y: f64| circular_distance(x, y, w);
    let straight = d(p[0], q[0]).max(d(p[1], q[1]));
    let crossed = d(p[0], q[1]).max(d(p[1], q[0]));
    straight.min(crossed) / w
}

/// Quasi-energies at photon cutoff `truncation_order`, checked against `N + 5`.
pub fn floquet_spectrum(model: &DrivenTwoLevel, truncation_order: usize) -> Result<FloquetSolution, FloquetError> {
    model.validate()?;
    let required = model.minimum_truncation();
    if truncation_order < required {
        return Err(FloquetError::TruncationTooSmall {
            given: truncation_order,
            required,
            ratio: model.amplitude.abs() / model.omega_mod,
        });
    }
    let sol = solve(model, truncation_order);
    check_converged(model, sol.quasi_energies, truncation_order)?;
    Ok(sol)
}

fn check_converged(model: &DrivenTwoLevel, pair: [f64; 2], truncation: usize) -> Result<(), FloquetError> {
    let check = quasi_pair(model, truncation + TRUNCATION_STEP);
    let d = drift(pair, check, model.omega_mod);
    if d > CONVERGENCE_TOLERANCE {
        return Err(FloquetError::NotConverged { truncation, drift: d, tolerance: CONVERGENCE_TOLERANCE });
    }
    Ok(())
}

fn starting_truncation(model: &DrivenTwoLevel) -> usize {
    let detuning_orders = (0.5 * model.omega_b().abs() / model.omega_mod).ceil() as usize + TRUNCATION_STEP;
    model.minimum_truncation().max(detuning_orders)
}

/// Converged quasi-energy splitting without eigenvectors.
fn converged_gap(model: &DrivenTwoLevel) -> Result<f64, FloquetError> {
    model.validate()?;
    let mut n = starting_truncation(model);
    let mut last = None;
    while n <= MAX_TRUNCATION {
        let pair = quasi_pair(model, n);
        match check_converged(model, pair, n) {
            Ok(()) => return Ok(circular_distance(pair[0], pair[1], model.omega_mod)),
            Err(e) => last = Some(e),
        }
        n *= 2;
    }
    Err(last.unwrap())
}

/// Starts from the minimum cutoff (raised so the bare splitting fits) and
/// doubles it until consecutive truncations agree.
pub fn floquet_spectrum_auto(model: &DrivenTwoLevel) -> Result<FloquetSolution, FloquetError> {
    model.validate()?;
    let mut n = starting_truncation(model);
    let mut last = None;
    while n <= MAX_TRUNCATION {
        match floquet_spectrum(model, n) {
            Ok(sol) => return Ok(sol),
            Err(e @ FloquetError::NotConverged { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        n *= 2;
    }
    Err(last.unwrap_or(FloquetError::NotConverged { truncation: n, drift: f64::NAN, tolerance: CONVERGENCE_TOLERANCE }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingGap {
    /// Minimum quasi-energy splitting, rad/s.
    pub gap: f64,
    /// Modulation frequency at the minimum, rad/s.
    pub center: f64,
    /// `|Ω J_m(A/ω)|` evaluated at `center`.
    pub rwa_gap: f64,
}

/// Locates the `m`-th order avoided crossing by scanning ω over
/// `−ω_b/m ± scan_window/2` and refining the smallest gap by golden section.
pub fn avoided_crossing_gap(model: &DrivenTwoLevel, m: i32, scan_window: f64) -> Result<CrossingGap, FloquetError> {
    model.validate()?;
    if m == 0 {
        return Err(FloquetError::InvalidModel("order m = 0 has no modulation resonance".into()));
    }
    let expected = -model.omega_b() / m as f64;
    if !(expected > 0.0) {
        return Err(FloquetError::InvalidModel(format!(
            "order m = {m} does not resonate for ω_b = {}",
            model.omega_b()
        )));
    }
    let lo = expected - 0.5 * scan_window;
    let hi = expected + 0.5 * scan_window;
    if !(scan_window > 0.0) || !(lo > 0.0) || !hi.is_finite() {
        return Err(FloquetError::InvalidModel(format!(
            "scan window {scan_window} must be positive and keep ω > 0 around {expected}"
        )));
    }

    let gap_at = |w: f64| converged_gap(&model.with_omega_mod(w));
    let step = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_POINTS).map(|i| lo + step * i as f64).collect();
    let gaps = grid.par_iter().map(|&w| gap_at(w)).collect::<Result<Vec<_>, _>>()?;
    let best = (0..gaps.len()).min_by(|&i, &j| gaps[i].total_cmp(&gaps[j])).unwrap();
    if best == 0 || best == gaps.len() - 1 {
        return Err(FloquetError::NoMinimum { lo, hi });
    }

    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = gap_at(c)?;
    let mut fd = gap_at(d)?;
    for _ in 0..GOLDEN_ITERATIONS {
        // near the minimum the gap is quadratic in ω; a bracket of 1e-4 gap/|m|
        // pins it to ~1e-8 relative
        if b - a <= (1e-4 * fc.min(fd) / m.unsigned_abs() as f64).max(1e-13 * expected) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap_at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap_at(d)?;
        }
    }
    let (center, gap) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(CrossingGap { gap, center, rwa_gap: rwa_gap(&model.with_omega_mod(center), m)? })
}
