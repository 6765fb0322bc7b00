//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and semi-infinite
//! intervals.
//!
//! Semi-infinite ranges `[lo, ∞)` are mapped onto `[0, 1)` with
//! `x = lo + c·u/(1 − u)`, `dx = c/(1 − u)² du`. The scale `c` should be of
//! the order of the integrand's decay length; the radial averages in
//! [`crate::model`] pass the larger of the two Gaussian widths. The 15-point
//! rule never evaluates the endpoint `u = 1`, so the Jacobian stays finite.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::NumericsError;

/// Accuracy contract for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_subdivisions: 1000 }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        let spec = Self { rel_tol, abs_tol, max_subdivisions };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(NumericsError::InvalidTolerance(self.rel_tol));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(NumericsError::InvalidTolerance(self.abs_tol));
        }
        if self.max_subdivisions == 0 {
            return Err(NumericsError::InvalidSubdivisions);
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment, NumericsError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(NumericsError::NonFinite { x: center });
    }
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        if !f1.is_finite() {
            return Err(NumericsError::NonFinite { x: x1 });
        }
        if !f2.is_finite() {
            return Err(NumericsError::NonFinite { x: x2 });
        }
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { lo, hi, value, error })
}

fn adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Quadrature, NumericsError> {
    let first = gk15(&f, lo, hi)?;
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::with_capacity(spec.max_subdivisions.min(4096));
    heap.push(first);

    while error > spec.target(value) {
        if heap.len() >= spec.max_subdivisions {
            return Err(NumericsError::NotConverged { estimate: value, error_bound: error });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval exhausted at machine precision
            return Err(NumericsError::NotConverged { estimate: value, error_bound: error });
        }
        let left = gk15(&f, worst.lo, mid)?;
        let right = gk15(&f, mid, worst.hi)?;
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // re-sum to keep incremental drift out of the stopping test
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    Ok(Quadrature { value, error, subdivisions: heap.len(), evaluations })
}

/// Integrates `f` over `[lo, hi]`; `hi` may be `f64::INFINITY`, in which case
/// the semi-infinite map is used with unit scale.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64, NumericsError> {
    integrate_detailed(f, lo, hi, spec).map(|q| q.value)
}

pub fn integrate_detailed<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, NumericsError> {
    spec.validate()?;
    if !lo.is_finite() || hi.is_nan() || !(lo < hi) {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    if hi == f64::INFINITY {
        return semi_infinite_detailed(f, lo, 1.0, spec);
    }
    adaptive(f, lo, hi, spec)
}

/// Integrates `f` over `[lo, ∞)` using the map `x = lo + scale·u/(1 − u)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    spec.validate()?;
    if !lo.is_finite() {
        return Err(NumericsError::InvalidInterval { lo, hi: f64::INFINITY });
    }
    semi_infinite_detailed(f, lo, scale, spec).map(|q| q.value)
}

fn semi_infinite_detailed<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, NumericsError> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(NumericsError::InvalidScale(scale));
    }
    let mapped = |u: f64| {
        let w = 1.0 - u;
        let x = lo + scale * u / w;
        let fx = f(x);
        // the integrand must vanish faster than the Jacobian grows
        if fx == 0.0 {
            0.0
        } else {
            fx * scale / (w * w)
        }
    };
    adaptive(mapped, 0.0, 1.0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn linear_on_unit_interval() {
        let v = integrate(|x| x, 0.0, 1.0, &spec()).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gaussian_first_moment_semi_infinite() {
        let v = integrate(|r| r * (-r * r).exp(), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((v - 0.5).abs() < 1e-10 * 0.5);
    }

    #[test]
    fn product_of_gaussians_matches_closed_form() {
        let (sa, sp) = (1.7_f64, 2.75_f64);
        let a = 1.0 / (sa * sa) + 2.0 / (sp * sp);
        let exact = 0.5 / a;
        let v = integrate(
            |r| r * (-r * r / (sa * sa)).exp() * (-2.0 * r * r / (sp * sp)).exp(),
            0.0,
            f64::INFINITY,
            &spec(),
        )
        .unwrap();
        assert!(((v - exact) / exact).abs() < 1e-10, "{v} vs {exact}");
        assert!((exact - 0.819_02).abs() < 1e-5);
    }

    #[test]
    fn zero_integrand_is_exactly_zero() {
        assert_eq!(integrate(|_| 0.0, 0.0, f64::INFINITY, &spec()).unwrap(), 0.0);
        assert_eq!(integrate_semi_infinite(|_| 0.0, 2.0, 1e-6, &spec()).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_interval_and_spec() {
        assert!(matches!(integrate(|x| x, 1.0, 1.0, &spec()), Err(NumericsError::InvalidInterval { .. })));
        assert!(QuadratureSpec::new(0.0, 0.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, 0.0, 0).is_err());
    }

    #[test]
    fn non_convergence_carries_estimate() {
        let tight = QuadratureSpec { rel_tol: 1e-14, abs_tol: 0.0, max_subdivisions: 2 };
        match integrate(|x: f64| (1.0 / (x + 1e-3)).sin(), 0.0, 1.0, &tight) {
            Err(NumericsError::NotConverged { estimate, error_bound }) => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        assert!(matches!(
            integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, &spec()),
            Err(NumericsError::NonFinite { .. })
        ));
    }

    #[test]
    fn scaled_semi_infinite_map_handles_micron_widths() {
        let s = 1.7e-6;
        let v = integrate_semi_infinite(|r| r * (-r * r / (s * s)).exp(), 0.0, s, &spec()).unwrap();
        let exact = 0.5 * s * s;
        assert!(((v - exact) / exact).abs() < 1e-10);
    }
}
