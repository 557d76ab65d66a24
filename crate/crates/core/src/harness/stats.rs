//! Order statistics and tail regressions used by the experiments.

use crate::error::{Error, Result};

/// Nearest-rank quantile: the `ceil(p N)`-th smallest value (rank at least 1).
pub fn nearest_rank(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("probability {p} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(nearest_rank_sorted(&sorted, p))
}

pub(crate) fn nearest_rank_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Interquartile range from nearest-rank quartiles.
pub fn iqr(values: &[f64]) -> Result<f64> {
    Ok(nearest_rank(values, 0.75)? - nearest_rank(values, 0.25)?)
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::param("regression needs two or more paired points"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("regression abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

/// Slope of `ln(1 - F_n(x))` against `ln x` over `points` log-spaced integer
/// abscissae in `[lo, hi]`; abscissae with an empty tail are skipped.
pub fn loglog_tail_slope(values: &[usize], lo: f64, hi: f64, points: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(lo >= 1.0 && hi > lo) || points < 2 {
        return Err(Error::param(format!(
            "bad regression window [{lo}, {hi}] with {points} points"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut last = None;
    for j in 0..points {
        let x = (llo + (lhi - llo) * j as f64 / (points - 1) as f64).exp().round() as usize;
        if last == Some(x) {
            continue;
        }
        last = Some(x);
        let above = sorted.len() - sorted.partition_point(|&d| d <= x);
        if above > 0 {
            xs.push((x as f64).ln());
            ys.push((above as f64 / n).ln());
        }
    }
    ols_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_definition() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 0.5).unwrap(), 50.0);
        assert_eq!(nearest_rank(&v, 0.0).unwrap(), 1.0);
        assert_eq!(nearest_rank(&v, 1.0).unwrap(), 100.0);
        assert_eq!(nearest_rank(&v, 0.951).unwrap(), 96.0);
        assert_eq!(nearest_rank(&[3.5], 0.3).unwrap(), 3.5);
        assert!(nearest_rank(&[], 0.5).is_err());
        assert_eq!(iqr(&v).unwrap(), 50.0);
    }

    #[test]
    fn exact_power_tail_slope() {
        // 1 - F(x) = 1000 / x for x in 1000..
        let values: Vec<usize> = (1..=1_000_000).map(|i| 1_000_000_000 / i).collect();
        let s = loglog_tail_slope(&values, 2000.0, 100_000.0, 30).unwrap();
        assert!((s + 1.0).abs() < 0.01, "{s}");
    }

    #[test]
    fn ols_on_a_line() {
        assert_eq!(ols_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap(), 2.0);
        assert!(ols_slope(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}
