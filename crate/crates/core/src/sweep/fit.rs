use serde::{Deserialize, Serialize};

/// Ordinary least-squares line through `(ln l, ln q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the residuals in log space.
    pub rms_residual: f64,
    pub points: usize,
}

/// Minimum number of points for a fit to be reported.
pub const MIN_FIT_POINTS: usize = 3;

/// Fits `ln |q| = slope · ln l + intercept`. `None` with fewer than
/// [`MIN_FIT_POINTS`] usable points (zero or non-finite values are dropped).
pub fn fit_loglog(ls: &[f64], qs: &[f64]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = ls
        .iter()
        .zip(qs)
        .filter(|(l, q)| **l > 0.0 && q.abs() > 0.0 && q.is_finite())
        .map(|(l, q)| (l.ln(), q.abs().ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    Some(LogLogFit { slope, intercept, rms_residual: (ss / n).sqrt(), points: pts.len() })
}
