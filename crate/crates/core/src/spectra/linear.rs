use serde::{Deserialize, Serialize};

use super::SpectraError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSample {
    /// W/cm².
    pub intensity: f64,
    /// Fitted peak center, Hz.
    pub center: f64,
    /// Uncertainty of `center`; all samples need one to enable weighting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearShiftFit {
    /// Compensated (zero-intensity) resonance frequency, Hz.
    pub intercept: f64,
    /// Hz per W/cm².
    pub slope: f64,
    pub intercept_stderr: f64,
    pub slope_stderr: f64,
    pub residuals: Vec<f64>,
    pub weighted: bool,
}

/// Straight-line fit of peak position against beam intensity.
///
/// Weighted by `1/σ²` when every sample carries a positive `sigma`, ordinary
/// least squares otherwise. Standard errors come from the residual variance;
/// in the weighted case they never drop below the propagated sigmas.
pub fn fit_linear_shift(samples: &[ShiftSample]) -> Result<LinearShiftFit, SpectraError> {
    if samples.iter().any(|s| !s.intensity.is_finite() || !s.center.is_finite()) {
        return Err(SpectraError::InvalidInput("non-finite shift sample".into()));
    }
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.intensity).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(SpectraError::InvalidInput(format!(
            "linear shift needs at least 3 distinct intensities, got {}",
            distinct.len()
        )));
    }
    let weighted = samples.iter().all(|s| s.sigma.is_some_and(|v| v > 0.0 && v.is_finite()));
    let w: Vec<f64> = samples.iter().map(|s| if weighted { s.sigma.unwrap().powi(-2) } else { 1.0 }).collect();

    let sw: f64 = w.iter().sum();
    let xm = samples.iter().zip(&w).map(|(s, w)| w * s.intensity).sum::<f64>() / sw;
    let ym = samples.iter().zip(&w).map(|(s, w)| w * s.center).sum::<f64>() / sw;
    let sxx: f64 = samples.iter().zip(&w).map(|(s, w)| w * (s.intensity - xm).powi(2)).sum();
    let sxy: f64 = samples.iter().zip(&w).map(|(s, w)| w * (s.intensity - xm) * (s.center - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;

    let residuals: Vec<f64> = samples.iter().map(|s| s.center - (intercept + slope * s.intensity)).collect();
    let dof = (samples.len() - 2) as f64;
    let reduced = residuals.iter().zip(&w).map(|(r, w)| w * r * r).sum::<f64>() / dof;
    // With stated sigmas the propagated error is a floor: a scatter smaller
    // than the sigmas promise (likely with one or two degrees of freedom)
    // must not shrink it.
    let s2 = if weighted { reduced.max(1.0) } else { reduced };
    let slope_var = s2 / sxx;
    let intercept_var = s2 * (1.0 / sw + xm * xm / sxx);

    Ok(LinearShiftFit {
        intercept,
        slope,
        intercept_stderr: intercept_var.sqrt(),
        slope_stderr: slope_var.sqrt(),
        residuals,
        weighted,
    })
}
