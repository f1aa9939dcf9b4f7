use serde::{Deserialize, Serialize};

use super::CountSeries;
use crate::{Error, Result};

/// Range of bounds used by a fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl FitWindow {
    pub fn new(t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(t_lo > 0.0 && t_lo < t_hi) {
            return Err(Error::invalid(format!("fit window [{t_lo}, {t_hi}] is empty")));
        }
        Ok(FitWindow { t_lo, t_hi })
    }

    /// The series range with its smallest decade removed.
    pub fn default_for(series: &CountSeries) -> Option<Self> {
        let (&lo, &hi) = (series.t.first()?, series.t.last()?);
        Some(FitWindow {
            t_lo: (lo * 10.0).min(hi),
            t_hi: hi,
        })
    }
}

/// `log N ≈ exponent · log T + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    /// Standard error of the exponent.
    pub stderr: f64,
    pub window: [f64; 2],
}

/// Weighted least squares of `log N` on `log T` over the window, weights `√N`.
///
/// Needs at least four points in the window with `N > 0`. The reported window
/// is the requested one clipped to the bounds actually used.
pub fn fit_exponent(series: &CountSeries, window: Option<FitWindow>) -> Result<FitResult> {
    let window = match window {
        Some(w) => w,
        None => FitWindow::default_for(series).ok_or_else(|| Error::InsufficientData("empty series".into()))?,
    };
    let pts: Vec<(f64, f64, f64)> = series
        .t
        .iter()
        .zip(&series.n)
        .filter(|(t, n)| **t >= window.t_lo && **t <= window.t_hi && **n > 0)
        .map(|(t, n)| (t.ln(), (*n as f64).ln(), (*n as f64).sqrt()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} points with N > 0 in [{}, {}], need 4",
            pts.len(),
            window.t_lo,
            window.t_hi
        )));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let xm = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ym = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = pts.iter().map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2)).sum();
    // weights are relative, so the residual variance is rescaled to mean weight 1
    let n = pts.len() as f64;
    let sigma2 = rss / (n - 2.0) / (sw / n);
    let stderr = (sigma2 * (sw / n) / sxx).sqrt();
    let used_lo = pts[0].0.exp();
    let used_hi = pts[pts.len() - 1].0.exp();
    Ok(FitResult {
        exponent: slope,
        intercept,
        stderr: if stderr.is_finite() { stderr } else { 0.0 },
        window: [window.t_lo.max(series.t[0]).min(used_lo), window.t_hi.min(used_hi.max(window.t_lo))],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{log_grid, CountMode};

    fn series(t: Vec<f64>, f: impl Fn(f64) -> f64) -> CountSeries {
        let n = t.iter().map(|&x| f(x).round() as u64).collect();
        CountSeries::new(t, n, CountMode::Meets, None).unwrap()
    }

    #[test]
    fn recovers_synthetic_exponent() {
        let s = series(log_grid(10.0, 1e4, 8), |t| 2.0 * t.powf(1.5));
        let fit = fit_exponent(&s, Some(FitWindow::new(10.0, 1e4).unwrap())).unwrap();
        assert!((fit.exponent - 1.5).abs() < 0.02, "{fit:?}");
        assert!((fit.intercept - 2f64.ln()).abs() < 0.05);
        assert!(fit.stderr >= 0.0);
    }

    #[test]
    fn constant_series_has_zero_exponent() {
        let s = series(log_grid(10.0, 1e4, 4), |_| 37.0);
        let fit = fit_exponent(&s, None).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!(fit.stderr.abs() < 1e-12);
    }

    #[test]
    fn default_window_drops_first_decade() {
        let s = series(log_grid(10.0, 1e4, 4), |t| t * t);
        let fit = fit_exponent(&s, None).unwrap();
        assert!((fit.window[0] - 100.0).abs() < 1e-9);
        assert_eq!(fit.window[1], 1e4);
    }

    #[test]
    fn too_few_points() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0, 5.0], |t| t);
        assert!(matches!(
            fit_exponent(&s, Some(FitWindow::new(1.0, 3.5).unwrap())),
            Err(Error::InsufficientData(_))
        ));
        let zeros = series(vec![1.0, 2.0, 3.0, 4.0, 5.0], |_| 0.0);
        assert!(fit_exponent(&zeros, Some(FitWindow::new(1.0, 5.0).unwrap())).is_err());
    }

    #[test]
    fn noisy_fit_reports_error() {
        let s = series(log_grid(10.0, 1e5, 6), |t| 3.0 * t.powf(1.3) * (1.0 + 0.05 * (t.ln() * 7.0).sin()));
        let fit = fit_exponent(&s, None).unwrap();
        assert!(fit.stderr > 0.0);
        assert!((fit.exponent - 1.3).abs() < 5.0 * fit.stderr + 0.01);
    }
}
