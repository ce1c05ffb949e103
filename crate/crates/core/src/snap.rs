//! Tolerance-based coordinate clustering.

/// Cluster sorted values: a new cluster starts whenever a value is more than
/// `tol` above the first member of the current cluster. Returns the first
/// member of every cluster, ascending.
pub fn cluster(values: impl IntoIterator<Item = f64>, tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    let mut reps: Vec<f64> = Vec::new();
    for x in v {
        match reps.last() {
            Some(&r) if x - r <= tol => {}
            _ => reps.push(x),
        }
    }
    reps
}

/// Index of the representative within `tol` of `x`, if any.
pub fn lookup(reps: &[f64], x: f64, tol: f64) -> Option<usize> {
    let i = reps.partition_point(|&r| r < x - tol);
    // Clusters are anchored at their first member, so members can sit up to
    // `tol` above it; prefer the closest candidate.
    let mut best: Option<(usize, f64)> = None;
    for j in i.saturating_sub(1)..(i + 2).min(reps.len()) {
        let d = (reps[j] - x).abs();
        if d <= tol && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((j, d));
        }
    }
    best.map(|(j, _)| j)
}
