use rayon::prelude::*;
use serde::Serialize;

use super::{find_peaks, fit_fano, fit_linear_shift, Axis, ShiftSample, SpectraError, Spectrum};
use crate::atomdata::MolecularRegistry;

/// A peak is order `k` of a state when `k·f` lies within this fraction of
/// the predicted `|E|`.
pub const ORDER_RATIO_TOLERANCE: f64 = 0.03;

/// Fields closer than this (G) are treated as the same scan field.
const SAME_FIELD_G: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakProcessing {
    /// Minimum dip depth `1 − N_m/N_0` for a candidate.
    pub min_depth: f64,
    /// Minimum distance between candidates, Hz.
    pub min_separation: f64,
    /// Half width of the Fano fit window around a candidate, Hz.
    pub fit_half_window: f64,
    /// Fitted centers from different intensities closer than this (Hz) are
    /// treated as the same resonance.
    pub match_window: f64,
}

/// Zero-intensity resonance frequency from the linear shift fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompensatedPeak {
    pub freq_hz: f64,
    pub stderr_hz: f64,
    /// Hz per W/cm².
    pub shift_slope: f64,
    pub n_intensities: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPeaks {
    pub b_g: f64,
    /// Highest frequency first.
    pub peaks: Vec<CompensatedPeak>,
}

struct Fitted {
    intensity: f64,
    center: f64,
    stderr: f64,
    depth: f64,
}

fn fit_spectrum(spec: &Spectrum, intensity: f64, opts: &PeakProcessing) -> Vec<Fitted> {
    find_peaks(spec, opts.min_depth, opts.min_separation)
        .into_iter()
        .filter_map(|p| {
            let fit = fit_fano(spec, (p.x - opts.fit_half_window, p.x + opts.fit_half_window), None).ok()?;
            let stderr = fit.center_stderr();
            // a center that wandered out of its own window is not this peak
            ((fit.center - p.x).abs() < opts.fit_half_window && stderr.is_finite()).then_some(Fitted {
                intensity,
                center: fit.center,
                stderr,
                depth: p.depth,
            })
        })
        .collect()
}

/// Clusters fitted centers of one field across intensities and extrapolates
/// each cluster to zero intensity. Clusters seen at fewer than three distinct
/// intensities are dropped.
fn compensate(mut fitted: Vec<Fitted>, match_window: f64) -> Vec<CompensatedPeak> {
    fitted.sort_by(|a, b| a.center.total_cmp(&b.center));
    let mut clusters: Vec<Vec<Fitted>> = Vec::new();
    for f in fitted {
        match clusters.last_mut() {
            Some(c) if f.center - c.last().unwrap().center <= match_window => c.push(f),
            _ => clusters.push(vec![f]),
        }
    }
    let mut out: Vec<CompensatedPeak> = clusters
        .into_iter()
        .filter_map(|mut c| {
            // one center per intensity: keep the deepest
            c.sort_by(|a, b| a.intensity.total_cmp(&b.intensity).then(b.depth.total_cmp(&a.depth)));
            c.dedup_by(|later, kept| later.intensity == kept.intensity);
            let samples: Vec<ShiftSample> = c
                .iter()
                .map(|f| ShiftSample { intensity: f.intensity, center: f.center, sigma: Some(f.stderr) })
                .collect();
            let fit = fit_linear_shift(&samples).ok()?;
            Some(CompensatedPeak {
                freq_hz: fit.intercept,
                stderr_hz: fit.intercept_stderr,
                shift_slope: fit.slope,
                n_intensities: samples.len(),
            })
        })
        .collect();
    out.sort_by(|a, b| b.freq_hz.total_cmp(&a.freq_hz));
    out
}

/// Peak finding, Fano fitting and light-shift compensation for a batch of
/// frequency scans `(B, spectrum, intensity)`. Fields are processed in
/// parallel; output is ordered by field.
pub fn process_scans(scans: &[(f64, Spectrum, f64)], opts: &PeakProcessing) -> Result<Vec<ScanPeaks>, SpectraError> {
    for (b, s, i) in scans {
        if s.axis() != Axis::ModulationFreqHz {
            return Err(SpectraError::InvalidInput(format!("scan at {b} G is not a frequency scan")));
        }
        if !b.is_finite() || !i.is_finite() || *i < 0.0 {
            return Err(SpectraError::InvalidInput(format!("bad field {b} G or intensity {i}")));
        }
    }
    let mut order: Vec<usize> = (0..scans.len()).collect();
    order.sort_by(|&a, &b| scans[a].0.total_cmp(&scans[b].0));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if (scans[i].0 - scans[g[0]].0).abs() <= SAME_FIELD_G => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    Ok(groups
        .par_iter()
        .map(|g| {
            let fitted = g.iter().flat_map(|&i| fit_spectrum(&scans[i].1, scans[i].2, opts)).collect();
            ScanPeaks { b_g: scans[g[0]].0, peaks: compensate(fitted, opts.match_window) }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Association {
    Matched,
    /// Two or more states fit within tolerance; no label is assigned.
    Ambiguous,
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub state: String,
    pub order: u32,
    /// `|k·f − |E|| / |E|`.
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyMapPoint {
    pub b_g: f64,
    /// Measured compensated peak frequency, Hz.
    pub frequency_hz: f64,
    pub frequency_err_hz: f64,
    /// Inferred `|m|·f` with the sign of the state energy: negative for
    /// bound states, which are plotted on the inverted axis.
    pub omega_res_hz: Option<f64>,
    /// Negative for bound states.
    pub order_m: Option<i32>,
    pub state_label: Option<String>,
    pub bound: Option<bool>,
    pub association: Association,
    pub candidates: Vec<Candidate>,
}

/// Labels each compensated peak with the registry state and order whose
/// predicted energy it reproduces. States whose field window excludes the
/// scan field are not considered.
pub fn assemble_energy_map(
    scans: &[ScanPeaks],
    registry: &MolecularRegistry,
    max_order: u32,
) -> Result<Vec<EnergyMapPoint>, SpectraError> {
    if max_order == 0 {
        return Err(SpectraError::InvalidInput("max_order must be at least 1".into()));
    }
    registry.validate()?;
    let mut out = Vec::new();
    for scan in scans {
        let mut energies = Vec::new();
        for s in registry.states() {
            let (lo, hi) = s.window_g;
            if scan.b_g >= lo && scan.b_g <= hi {
                energies.push((s.label.as_str(), registry.energy(&s.label, scan.b_g)?));
            }
        }
        for peak in &scan.peaks {
            let f = peak.freq_hz;
            let mut candidates: Vec<Candidate> = Vec::new();
            for &(label, e) in &energies {
                if e == 0.0 {
                    continue;
                }
                for k in 1..=max_order {
                    let rel = (k as f64 * f - e.abs()).abs() / e.abs();
                    if rel <= ORDER_RATIO_TOLERANCE {
                        candidates.push(Candidate { state: label.to_string(), order: k, relative_error: rel });
                    }
                }
            }
            candidates.sort_by(|a, b| {
                a.relative_error.total_cmp(&b.relative_error).then(a.state.cmp(&b.state)).then(a.order.cmp(&b.order))
            });
            let distinct_states = {
                let mut v: Vec<&str> = candidates.iter().map(|c| c.state.as_str()).collect();
                v.sort_unstable();
                v.dedup();
                v.len()
            };
            let mut point = EnergyMapPoint {
                b_g: scan.b_g,
                frequency_hz: f,
                frequency_err_hz: peak.stderr_hz,
                omega_res_hz: None,
                order_m: None,
                state_label: None,
                bound: None,
                association: Association::Unmatched,
                candidates,
            };
            match distinct_states {
                0 => {}
                1 => {
                    let best = &point.candidates[0];
                    let e = energies.iter().find(|(l, _)| *l == best.state).unwrap().1;
                    let bound = e < 0.0;
                    let k = best.order as i32;
                    point.order_m = Some(if bound { -k } else { k });
                    point.omega_res_hz = Some(e.signum() * k as f64 * f);
                    point.state_label = Some(best.state.clone());
                    point.bound = Some(bound);
                    point.association = Association::Matched;
                }
                _ => point.association = Association::Ambiguous,
            }
            out.push(point);
        }
    }
    Ok(out)
}
