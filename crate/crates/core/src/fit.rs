//! Small numeric helpers shared by the analysis modules.

/// Least-squares slope of `ys` against `xs`. Returns `NaN` for fewer than two
/// points or a degenerate abscissa.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return f64::NAN;
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return f64::NAN;
    }
    sxy / sxx
}

/// Slope of `ln(values[k])` against `k` over the finite, strictly positive
/// entries with index `k >= start`. Requires at least `min_points` usable entries.
pub fn log_slope(values: &[f64], start: usize, min_points: usize) -> Option<f64> {
    let mut xs = alloc::vec::Vec::new();
    let mut ys = alloc::vec::Vec::new();
    for (k, &v) in values.iter().enumerate().skip(start) {
        if v.is_finite() && v > 0.0 {
            xs.push(k as f64);
            ys.push(libm::log(v));
        }
    }
    if xs.len() < min_points.max(2) {
        return None;
    }
    Some(least_squares_slope(&xs, &ys))
}

/// Sup-norm of `a - b`.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| libm::fabs(x - y))
        .fold(0.0, f64::max)
}

/// Euclidean norm of `a - b`.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
}

/// Mean and sample standard deviation. The deviation is zero for a single value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((least_squares_slope(&xs, &ys) - 2.0).abs() < 1e-15);
        assert!(least_squares_slope(&[1.0], &[1.0]).is_nan());
    }

    #[test]
    fn log_slope_of_geometric_sequence() {
        let v: alloc::vec::Vec<f64> = (0..30).map(|k| 1.5f64.powi(k)).collect();
        let s = log_slope(&v, 10, 10).unwrap();
        assert!((s - 1.5f64.ln()).abs() < 1e-12);
        assert!(log_slope(&v[..5], 0, 10).is_none());
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert!((m - 2.0).abs() < 1e-15 && (s - 1.0).abs() < 1e-15);
    }
}
