//! Small helpers for sampled real series.

/// Linear interpolation of `(xs, ys)` at `x`, clamped to the ends.
/// `xs` must be increasing.
pub fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.is_empty() {
        return f64::NAN;
    }
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let w = (x - x0) / (x1 - x0);
    ys[k - 1] * (1.0 - w) + ys[k] * w
}

/// Running trapezoid integral on a uniform grid, starting at 0.
pub fn cumulative_trapezoid(ys: &[f64], dx: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(ys.len());
    if ys.is_empty() {
        return out;
    }
    out.push(0.0);
    for w in ys.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

pub fn argmax(ys: &[f64]) -> Option<usize> {
    ys.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &y)| match best {
            Some((_, b)) if b >= y => best,
            _ => Some((i, y)),
        })
        .map(|(i, _)| i)
}

/// Indices of strict interior local maxima.
pub fn local_maxima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .collect()
}

/// Indices of strict interior local minima.
pub fn local_minima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] < ys[i - 1] && ys[i] <= ys[i + 1])
        .collect()
}

/// Positions of the two highest local maxima, sorted by position.
pub fn two_highest_peaks(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let mut peaks = local_maxima(ys);
    if peaks.len() < 2 {
        return None;
    }
    peaks.sort_by(|&a, &b| ys[b].total_cmp(&ys[a]));
    let (a, b) = (peaks[0].min(peaks[1]), peaks[0].max(peaks[1]));
    Some((xs[a], xs[b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_of_line() {
        let ys: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let c = cumulative_trapezoid(&ys, 0.1);
        assert!((c[10] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn interp_clamps() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 10.0, 0.0];
        assert_eq!(interp(&xs, &ys, -1.0), 0.0);
        assert_eq!(interp(&xs, &ys, 0.5), 5.0);
        assert_eq!(interp(&xs, &ys, 1.5), 5.0);
        assert_eq!(interp(&xs, &ys, 3.0), 0.0);
    }

    #[test]
    fn peaks() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| (-(x - 2.0) * (x - 2.0)).exp() + 0.5 * (-(x - 7.0) * (x - 7.0)).exp())
            .collect();
        let (a, b) = two_highest_peaks(&xs, &ys).unwrap();
        assert!((a - 2.0).abs() < 1e-9 && (b - 7.0).abs() < 1e-9);
        assert_eq!(argmax(&ys), Some(20));
        assert_eq!(local_minima(&ys).len(), 1);
    }
}
