use super::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub index: usize,
    /// `1 − N_m/N_0` at the minimum.
    pub depth: f64,
}

/// Local minima deeper than `min_depth` below one, deepest first, keeping
/// only candidates at least `min_separation` from every deeper one.
pub fn find_peaks(spec: &Spectrum, min_depth: f64, min_separation: f64) -> Vec<Peak> {
    let pts = spec.points();
    let n = pts.len();
    let mut candidates: Vec<Peak> = Vec::new();
    let mut i = 0;
    while i < n {
        // treat runs of equal values as one plateau
        let mut j = i;
        while j + 1 < n && pts[j + 1].relative_atoms == pts[i].relative_atoms {
            j += 1;
        }
        let y = pts[i].relative_atoms;
        let left_higher = i == 0 || pts[i - 1].relative_atoms > y;
        let right_higher = j + 1 == n || pts[j + 1].relative_atoms > y;
        let interior = i > 0 || j + 1 < n;
        if left_higher && right_higher && interior && 1.0 - y > min_depth {
            let mid = (i + j) / 2;
            candidates.push(Peak { x: pts[mid].x, index: mid, depth: 1.0 - y });
        }
        i = j + 1;
    }
    candidates.sort_by(|a, b| b.depth.total_cmp(&a.depth).then(a.index.cmp(&b.index)));
    let mut kept: Vec<Peak> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| (k.x - c.x).abs() >= min_separation) {
            kept.push(c);
        }
    }
    kept
}
