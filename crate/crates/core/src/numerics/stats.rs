use super::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    /// Sample standard deviation (n − 1); zero for a single sample.
    pub std_dev: f64,
    pub std_err: f64,
    pub n: usize,
}

pub fn summary_stats(samples: &[f64]) -> Result<SampleStats, NumericsError> {
    let n = samples.len();
    if n == 0 {
        return Err(NumericsError::TooFewPoints { needed: 1, got: 0 });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFiniteData);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std_dev = if n > 1 {
        let ss: f64 = samples.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(SampleStats { mean, std_dev, std_err: std_dev / (n as f64).sqrt(), n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples() {
        let s = summary_stats(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!((s.mean, s.std_dev, s.std_err), (5.0, 0.0, 0.0));
    }

    #[test]
    fn two_samples() {
        let s = summary_stats(&[1.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert!((s.std_dev - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.std_err - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_and_empty() {
        let s = summary_stats(&[4.2]).unwrap();
        assert_eq!(s.std_dev, 0.0);
        assert!(summary_stats(&[]).is_err());
    }
}
