use super::TrackedPerson;

/// Closing speed between the observer and `person` (m/s, positive when the
/// distance shrinks).
///
/// Fits a least-squares line to the observer-to-person distances recorded in
/// the last `window` seconds of the track history and returns the negated
/// slope. `None` until at least two samples fall inside the window.
pub fn relative_closing_speed(person: &TrackedPerson, window: f64) -> Option<f64> {
    let last = person.history.last()?;
    let start = last.t - window - 1e-9;
    let samples: Vec<(f64, f64)> = person
        .history
        .iter()
        .filter(|s| s.t >= start)
        .map(|s| (s.t - last.t, (s.person - s.observer).norm()))
        .collect();
    if samples.len() < 2 {
        return None;
    }
    let n = samples.len() as f64;
    let mean_t = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_d = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, d) in &samples {
        sxy += (t - mean_t) * (d - mean_d);
        sxx += (t - mean_t) * (t - mean_t);
    }
    if sxx <= 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}
