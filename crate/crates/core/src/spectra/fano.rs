use nalgebra::DMatrix;
use serde::Serialize;

use super::{SpectraError, Spectrum};
use crate::lsq::{levenberg_marquardt, LsqOptions, LsqSolution, Problem};

const MIN_POINTS: usize = 8;

/// Fano dip on a baseline:
///
/// ```text
/// y = offset − amplitude · (1 + rε)² / ((1 + r²)(1 + ε²)),   ε = 2(x − center)/width
/// ```
///
/// `r = 1/q`; `r = 0` is a symmetric Lorentzian dip and the dip depth equals
/// `amplitude` for every `r`.
pub fn fano_profile(x: f64, center: f64, width: f64, asymmetry: f64, amplitude: f64, offset: f64) -> f64 {
    let e = 2.0 * (x - center) / width;
    let r = asymmetry;
    offset - amplitude * (1.0 + r * e).powi(2) / ((1.0 + r * r) * (1.0 + e * e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanoFit {
    pub center: f64,
    /// Always positive.
    pub width: f64,
    /// Fano `q`; infinite for a symmetric dip.
    pub q: f64,
    /// `1/q`, the fitted parameter.
    pub asymmetry: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Parameter order `center, width, asymmetry, amplitude, offset`.
    pub covariance: Vec<Vec<f64>>,
    pub chi2: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub n_points: usize,
}

impl FanoFit {
    pub fn center_stderr(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn params(&self) -> [f64; 5] {
        [self.center, self.width, self.asymmetry, self.amplitude, self.offset]
    }

    pub fn eval(&self, x: f64) -> f64 {
        fano_profile(x, self.center, self.width, self.asymmetry, self.amplitude, self.offset)
    }
}

struct Window {
    x: Vec<f64>,
    y: Vec<f64>,
    w: Vec<f64>,
}

fn initial_guess(win: &Window) -> [f64; 5] {
    let n = win.x.len();
    let mut sorted = win.y.clone();
    sorted.sort_by(f64::total_cmp);
    let top = &sorted[n - (n / 4).max(1)..];
    let offset = top.iter().sum::<f64>() / top.len() as f64;
    let i_min = (0..n).min_by(|&a, &b| win.y[a].total_cmp(&win.y[b])).unwrap();
    let amplitude = (offset - win.y[i_min]).max(1e-6);
    let half = offset - 0.5 * amplitude;
    let mut lo = i_min;
    while lo > 0 && win.y[lo] < half {
        lo -= 1;
    }
    let mut hi = i_min;
    while hi + 1 < n && win.y[hi] < half {
        hi += 1;
    }
    let span = win.x[n - 1] - win.x[0];
    let step = span / (n - 1) as f64;
    let width = (win.x[hi] - win.x[lo]).max(2.0 * step).min(span);
    [win.x[i_min], width, 0.0, amplitude, offset]
}

fn run(win: &Window, p0: &[f64; 5]) -> Result<LsqSolution, SpectraError> {
    let residuals = |p: &[f64], out: &mut [f64]| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (win.y[i] - fano_profile(win.x[i], p[0], p[1], p[2], p[3], p[4])) * win.w[i];
        }
    };
    let jacobian = |p: &[f64], jac: &mut DMatrix<f64>| {
        let (c, w, r, amp) = (p[0], p[1], p[2], p[3]);
        for i in 0..win.x.len() {
            let e = 2.0 * (win.x[i] - c) / w;
            let one_re = 1.0 + r * e;
            let opr = 1.0 + r * r;
            let ope = 1.0 + e * e;
            let f = one_re * one_re / (opr * ope);
            let df_de = 2.0 * one_re * (r - e) / (opr * ope * ope);
            let df_dr = 2.0 * one_re * (e - r) / (opr * opr * ope);
            let s = -win.w[i];
            // r_i = w_i (y_i − model); model = offset − amp·F
            jac[(i, 0)] = s * (-amp * df_de * (-2.0 / w));
            jac[(i, 1)] = s * (-amp * df_de * (-e / w));
            jac[(i, 2)] = s * (-amp * df_dr);
            jac[(i, 3)] = s * (-f);
            jac[(i, 4)] = s;
        }
    };
    let problem = Problem { n_residuals: win.x.len(), residuals: &residuals, jacobian: Some(&jacobian) };
    Ok(levenberg_marquardt(&problem, p0, &LsqOptions::default())?)
}

/// Damped least-squares Fano fit of the points with `x` in `window`.
pub fn fit_fano(spec: &Spectrum, window: (f64, f64), init: Option<&FanoFit>) -> Result<FanoFit, SpectraError> {
    let (lo, hi) = window;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(SpectraError::InvalidInput(format!("degenerate fit window [{lo}, {hi}]")));
    }
    let pts: Vec<_> = spec.points().iter().filter(|p| p.x >= lo && p.x <= hi).collect();
    if pts.len() < MIN_POINTS {
        return Err(SpectraError::InvalidInput(format!(
            "fit window holds {} points, need at least {MIN_POINTS}",
            pts.len()
        )));
    }
    let weighted = pts.iter().all(|p| p.sigma > 0.0);
    let win = Window {
        x: pts.iter().map(|p| p.x).collect(),
        y: pts.iter().map(|p| p.relative_atoms).collect(),
        w: pts.iter().map(|p| if weighted { 1.0 / p.sigma } else { 1.0 }).collect(),
    };

    let sol = match init {
        Some(f) => run(&win, &f.params())?,
        None => {
            let base = initial_guess(&win);
            let mut best: Option<LsqSolution> = None;
            let mut last_err = None;
            for r0 in [0.0, 0.5, -0.5] {
                let mut p0 = base;
                p0[2] = r0;
                match run(&win, &p0) {
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

    let mut p = sol.params.clone();
    let mut cov = sol.covariance(false);
    if p[1] < 0.0 {
        p[1] = -p[1];
        p[2] = -p[2];
        for k in [1, 2] {
            for j in 0..5 {
                cov[(k, j)] = -cov[(k, j)];
                cov[(j, k)] = -cov[(j, k)];
            }
        }
    }
    if p[1] == 0.0 || !p.iter().all(|v| v.is_finite()) {
        return Err(SpectraError::InvalidInput("fit collapsed to zero width".into()));
    }
    Ok(FanoFit {
        center: p[0],
        width: p[1],
        q: if p[2] == 0.0 { f64::INFINITY } else { 1.0 / p[2] },
        asymmetry: p[2],
        amplitude: p[3],
        offset: p[4],
        covariance: (0..5).map(|i| (0..5).map(|j| cov[(i, j)]).collect()).collect(),
        chi2: sol.chi2,
        residual_norm: sol.chi2.sqrt(),
        iterations: sol.iterations,
        n_points: win.x.len(),
    })
}
