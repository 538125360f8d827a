use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SpectraError;
use crate::lsq::{levenberg_marquardt, LsqOptions, LsqSolution, Problem};

const MIN_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzSample {
    pub b_g: f64,
    pub energy_hz: f64,
    pub branch: Branch,
}

/// Starting point: bare states `E_i = E_c + s_i (B − B_c)` and
/// `E_j = E_c + s_j (B − B_c)` coupled by `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauZenerInit {
    pub crossing_field: f64,
    pub crossing_energy: f64,
    pub slope_i: f64,
    pub slope_j: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandauZenerFit {
    /// `V_ij`, Hz; minimum branch separation.
    pub coupling: f64,
    pub coupling_stderr: f64,
    pub crossing_field: f64,
    pub crossing_energy: f64,
    /// Hz/G.
    pub slope_i: f64,
    pub slope_j: f64,
    /// Parameter order `crossing_energy, slope_i, slope_j, crossing_field, coupling`.
    pub covariance: Vec<Vec<f64>>,
    pub chi2: f64,
    pub iterations: usize,
    /// Set when the data cannot pin the gap: one branch only and not spanning
    /// the crossing, or a singular normal matrix.
    pub ill_conditioned: bool,
}

/// `E±(B) = (E_i + E_j)/2 ± ½√((E_i − E_j)² + V²)`.
pub fn lz_energy(p: &[f64], b: f64, branch: Branch) -> f64 {
    let u = b - p[3];
    let mean = p[0] + 0.5 * (p[1] + p[2]) * u;
    let d = (p[1] - p[2]) * u;
    mean + branch.sign() * 0.5 * (d * d + p[4] * p[4]).sqrt()
}

fn line_slope(pts: &[&LzSample]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.b_g).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.energy_hz).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.b_g - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.b_g - xm) * (p.energy_hz - ym)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn auto_init(data: &[LzSample]) -> LandauZenerInit {
    let upper: Vec<&LzSample> = data.iter().filter(|s| s.branch == Branch::Upper).collect();
    let lower: Vec<&LzSample> = data.iter().filter(|s| s.branch == Branch::Lower).collect();

    // crossing guess: field of the smallest separation between the branches,
    // falling back to the middle of the data
    let mut b_c = {
        let (lo, hi) = data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.b_g), b.max(s.b_g)));
        0.5 * (lo + hi)
    };
    let mut gap = f64::INFINITY;
    for u in &upper {
        if let Some(l) = lower.iter().min_by(|a, b| (a.b_g - u.b_g).abs().total_cmp(&(b.b_g - u.b_g).abs())) {
            let sep = u.energy_hz - l.energy_hz;
            if sep.abs() < gap {
                gap = sep.abs();
                b_c = 0.5 * (u.b_g + l.b_g);
            }
        }
    }
    let near = data.iter().min_by(|a, b| (a.b_g - b_c).abs().total_cmp(&(b.b_g - b_c).abs())).expect("nonempty data");
    let e_c = if gap.is_finite() {
        let l = lower.iter().min_by(|a, b| (a.b_g - b_c).abs().total_cmp(&(b.b_g - b_c).abs())).unwrap();
        l.energy_hz + 0.5 * gap
    } else {
        near.energy_hz
    };

    // lower branch follows state i left of the crossing and j right of it;
    // the upper branch does the opposite
    let side = |pts: &[&LzSample], left: bool| -> Option<f64> {
        let part: Vec<&LzSample> = pts.iter().copied().filter(|s| (s.b_g < b_c) == left).collect();
        line_slope(&part)
    };
    let avg = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(x), Some(y)) => Some(0.5 * (x + y)),
        (x, y) => x.or(y),
    };
    let overall = line_slope(&data.iter().collect::<Vec<_>>()).unwrap_or(0.0);
    let s_i = avg(side(&lower, true), side(&upper, false)).unwrap_or(overall);
    let mut s_j = avg(side(&lower, false), side(&upper, true)).unwrap_or(overall);
    if s_i == s_j {
        s_j = s_i + 1e-3 * s_i.abs().max(1.0);
    }
    let coupling = if gap.is_finite() && gap > 0.0 {
        gap
    } else {
        let scale = data.iter().map(|s| s.energy_hz.abs()).fold(0.0, f64::max);
        1e-3 * scale.max(1.0)
    };
    LandauZenerInit { crossing_field: b_c, crossing_energy: e_c, slope_i: s_i, slope_j: s_j, coupling }
}

fn run(data: &[LzSample], init: &LandauZenerInit) -> Result<LsqSolution, SpectraError> {
    let residuals = |p: &[f64], out: &mut [f64]| {
        for (o, s) in out.iter_mut().zip(data) {
            *o = s.energy_hz - lz_energy(p, s.b_g, s.branch);
        }
    };
    let jacobian = |p: &[f64], jac: &mut DMatrix<f64>| {
        for (i, s) in data.iter().enumerate() {
            let u = s.b_g - p[3];
            let ds = p[1] - p[2];
            let d = ds * u;
            let r = (d * d + p[4] * p[4]).sqrt();
            let sg = s.branch.sign();
            // d/R and V/R are bounded; at R = 0 both limits are taken as zero
            let (dr, vr) = if r > 0.0 { (d / r, p[4] / r) } else { (0.0, 0.0) };
            jac[(i, 0)] = -1.0;
            jac[(i, 1)] = -(0.5 * u + sg * 0.5 * dr * u);
            jac[(i, 2)] = -(0.5 * u - sg * 0.5 * dr * u);
            jac[(i, 3)] = -(-0.5 * (p[1] + p[2]) - sg * 0.5 * dr * ds);
            jac[(i, 4)] = -(sg * 0.5 * vr);
        }
    };
    let problem = Problem { n_residuals: data.len(), residuals: &residuals, jacobian: Some(&jacobian) };
    let p0 = [init.crossing_energy, init.slope_i, init.slope_j, init.crossing_field, init.coupling];
    let opts = LsqOptions { max_iterations: 500, ..LsqOptions::default() };
    Ok(levenberg_marquardt(&problem, &p0, &opts)?)
}

/// Damped least-squares fit of avoided-crossing branch energies.
///
/// Without `init` a guess is built from the data and refined from several
/// starting couplings; the lowest χ² wins.
pub fn fit_landau_zener(data: &[LzSample], init: Option<&LandauZenerInit>) -> Result<LandauZenerFit, SpectraError> {
    if data.len() < MIN_POINTS {
        return Err(SpectraError::InvalidInput(format!(
            "need at least {MIN_POINTS} branch points, got {}",
            data.len()
        )));
    }
    if data.iter().any(|s| !s.b_g.is_finite() || !s.energy_hz.is_finite()) {
        return Err(SpectraError::InvalidInput("non-finite branch point".into()));
    }

    let sol = match init {
        Some(i) => run(data, i)?,
        None => {
            let base = auto_init(data);
            let mut best: Option<LsqSolution> = None;
            let mut last_err = None;
            for scale in [1.0, 0.3, 3.0] {
                let start = LandauZenerInit { coupling: base.coupling * scale, ..base };
                match run(data, &start) {
                    Ok(s) if best.as_ref().is_none_or(|b| s.chi2 < b.chi2) => best = Some(s),
                    Ok(_) => {}
                    Err(e) => last_err = Some(e),
                }
            }
            match best {
                Some(s) => s,
                None => return Err(last_err.unwrap()),
            }
        }
    };

    let p = &sol.params;
    let cov = sol.covariance(false);
    let has_upper = data.iter().any(|s| s.branch == Branch::Upper);
    let has_lower = data.iter().any(|s| s.branch == Branch::Lower);
    let spans = data.iter().any(|s| s.b_g < p[3]) && data.iter().any(|s| s.b_g > p[3]);
    let v_err = cov[(4, 4)].max(0.0).sqrt();
    let ill_conditioned = sol.singular || (!(has_upper && has_lower) && (!spans || !(v_err < p[4].abs())));

    Ok(LandauZenerFit {
        coupling: p[4].abs(),
        coupling_stderr: v_err,
        crossing_field: p[3],
        crossing_energy: p[0],
        slope_i: p[1],
        slope_j: p[2],
        covariance: (0..5).map(|i| (0..5).map(|j| cov[(i, j)]).collect()).collect(),
        chi2: sol.chi2,
        iterations: sol.iterations,
        ill_conditioned,
    })
}
