use super::NumericsError;

/// Straight-line least-squares fit `y = intercept + slope·x`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_err: f64,
    pub intercept_err: f64,
    /// Weighted when weights are supplied.
    pub residual_sum_sq: f64,
}

impl LinFitResult {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Weighted (or, with `weights = None`, ordinary) linear least squares.
///
/// Parameter errors come from the covariance `(XᵀWX)⁻¹` scaled by the
/// reduced chi-square `RSS/(n − 2)`. With exactly two points the residual is
/// identically zero and the errors are reported as zero.
pub fn linfit(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Result<LinFitResult, NumericsError> {
    if xs.len() != ys.len() {
        return Err(NumericsError::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < 2 {
        return Err(NumericsError::TooFewPoints { needed: 2, got: xs.len() });
    }
    if let Some(w) = weights {
        if w.len() != xs.len() {
            return Err(NumericsError::LengthMismatch { expected: xs.len(), got: w.len() });
        }
        if let Some(&bad) = w.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(NumericsError::InvalidWeight(bad));
        }
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFiniteData);
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(NumericsError::DegenerateDesign);
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let n = xs.len();
    let sw: f64 = (0..n).map(w).sum();
    let xbar = (0..n).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let ybar = (0..n).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (xs[i] - xbar).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(NumericsError::DegenerateDesign);
    }
    let sxy: f64 = (0..n).map(|i| w(i) * (xs[i] - xbar) * (ys[i] - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual_sum_sq: f64 = (0..n)
        .map(|i| w(i) * (ys[i] - intercept - slope * xs[i]).powi(2))
        .sum();
    let s2 = if n > 2 { residual_sum_sq / (n - 2) as f64 } else { 0.0 };
    Ok(LinFitResult {
        slope,
        intercept,
        slope_err: (s2 / sxx).sqrt(),
        intercept_err: (s2 * (1.0 / sw + xbar * xbar / sxx)).sqrt(),
        residual_sum_sq,
    })
}
