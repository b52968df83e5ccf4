//! Least-squares line fits used by the convergence and asymptotics checks.

use crate::error::{Error, Result};

/// Result of a straight-line fit `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination of the fit.
    pub r_squared: f64,
    /// Standard error of the slope estimate.
    pub slope_stderr: f64,
}

/// Ordinary least squares on `(x, y)` pairs.
pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "line fit needs >= 2 paired samples, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("line fit: degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|yi| (yi - my) * (yi - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (intercept + slope * xi);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let slope_stderr = (ss_res / dof / sxx).sqrt();
    Ok(LineFit { slope, intercept, r_squared, slope_stderr })
}

/// Slope of `log(y)` against `log(x)`; `y` entries must be positive.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().any(|v| *v <= 0.0) || y.iter().any(|v| *v <= 0.0) {
        return Err(Error::InvalidArgument(
            "log-log fit needs strictly positive samples".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    line_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let x = [0.02, 0.01, 0.005, 0.0025];
        let y: Vec<f64> = x.iter().map(|h| 3.0 * h * h * h).collect();
        let fit = loglog_slope(&x, &y).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!(fit.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn rejects_nonpositive_data() {
        assert!(loglog_slope(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }
}
