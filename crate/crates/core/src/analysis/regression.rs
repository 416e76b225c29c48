use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Ordinary least squares line with its goodness of fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// Mean squared residual.
    pub mse: f64,
    /// Coefficient of determination, 1 - SS_res / SS_tot.
    pub variance_score: f64,
}

/// Fits y = slope * x + intercept. A constant y fits exactly and scores 1.
pub fn fit_line(points: &[(f64, f64)]) -> Result<RegressionFit, AnalysisError> {
    let Some(&(x0, y0)) = points.first() else {
        return Err(AnalysisError::DegenerateX);
    };
    if points.iter().all(|&(x, _)| x == x0) {
        return Err(AnalysisError::DegenerateX);
    }
    if points.iter().all(|&(_, y)| y == y0) {
        return Ok(RegressionFit {
            slope: 0.0,
            intercept: y0,
            mse: 0.0,
            variance_score: 1.0,
        });
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut ss_tot) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        ss_tot += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(RegressionFit {
        slope,
        intercept,
        mse: ss_res / n,
        variance_score: 1.0 - ss_res / ss_tot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_line() {
        let fit = fit_line(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(fit.slope, 1.0);
        assert_eq!(fit.intercept, 0.0);
        assert_eq!(fit.mse, 0.0);
        assert_eq!(fit.variance_score, 1.0);
    }

    #[test]
    fn constant_y() {
        let fit = fit_line(&[(1.0, 5.0), (2.0, 5.0), (3.0, 5.0)]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.intercept, 5.0);
        assert_eq!(fit.mse, 0.0);
        assert_eq!(fit.variance_score, 1.0);
    }

    #[test]
    fn degenerate_x() {
        assert!(matches!(fit_line(&[]), Err(AnalysisError::DegenerateX)));
        assert!(matches!(fit_line(&[(1.0, 2.0)]), Err(AnalysisError::DegenerateX)));
        assert!(matches!(
            fit_line(&[(2.0, 1.0), (2.0, 3.0)]),
            Err(AnalysisError::DegenerateX)
        ));
    }

    #[test]
    fn noisy_fit() {
        // two plateaus: slope 8/5, SS_tot 16
        let fit = fit_line(&[(0.0, 2.0), (1.0, 2.0), (2.0, 6.0), (3.0, 6.0)]).unwrap();
        assert!((fit.slope - 1.6).abs() < 1e-12);
        assert!((fit.intercept - 1.6).abs() < 1e-12);
        // residuals 0.4, -1.2, 1.2, -0.4
        assert!((fit.mse - 0.8).abs() < 1e-12);
        assert!((fit.variance_score - (1.0 - 3.2 / 16.0)).abs() < 1e-12);
    }
}
