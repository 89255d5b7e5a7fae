//! Least-squares slope fitting on logarithmic axes.
//!
//! Every decay-rate and scaling-exponent check in the crate reduces to the
//! same primitive: regress `ln y` against `ln x` (or against `ℓ · ln 2` for
//! dyadic ladders) and read off the slope.  Centralising it keeps the
//! residual reporting uniform.

use crate::{Error, Result};

/// Result of a straight-line least-squares fit.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    /// Fitted slope.
    pub slope: f64,
    /// Fitted intercept.
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual_rms: f64,
    /// Largest absolute residual of the fit.
    pub residual_max: f64,
}

/// Ordinary least squares for `y ≈ slope · x + intercept`.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::Domain {
            context: "fit_linear",
            message: format!("need at least 2 points, got {}", points.len()),
        });
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::Domain {
            context: "fit_linear",
            message: "all abscissae coincide".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut rss = 0.0;
    let mut rmax: f64 = 0.0;
    for &(x, y) in points {
        let r = y - slope * x - intercept;
        rss += r * r;
        rmax = rmax.max(r.abs());
    }
    Ok(SlopeFit {
        slope,
        intercept,
        residual_rms: (rss / n).sqrt(),
        residual_max: rmax,
    })
}

/// Least squares for `ln y ≈ slope · ln x + intercept`; all coordinates must
/// be positive.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let logged: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| {
            if x <= 0.0 || y <= 0.0 {
                Err(Error::Domain {
                    context: "fit_loglog_slope",
                    message: format!("non-positive point ({x}, {y}) cannot be logged"),
                })
            } else {
                Ok((x.ln(), y.ln()))
            }
        })
        .collect::<Result<_>>()?;
    fit_linear(&logged)
}
