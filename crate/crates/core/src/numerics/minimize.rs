//! Bounded one-dimensional minimization (golden section with parabolic
//! steps) and bracketed root finding.

use super::NumericsError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1; // (3 - sqrt 5) / 2

fn check_bracket(lo: f64, hi: f64) -> Result<(), NumericsError> {
    if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    Ok(())
}

/// Minimizes a unimodal `g` on `[lo, hi]` to within `tol` in the argument.
///
/// The returned point always lies inside the bracket. When an endpoint is at
/// least as good as the interior optimum the bracket does not enclose a
/// minimum and [`NumericsError::BoundaryMinimum`] is returned with that
/// endpoint, so callers that accept boundary solutions can still use it.
pub fn minimize_scalar<G: FnMut(f64) -> f64>(mut g: G, bracket: (f64, f64), tol: f64) -> Result<Minimum, NumericsError> {
    let (lo, hi) = bracket;
    check_bracket(lo, hi)?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    let mut eval = |x: f64, n: &mut usize| -> Result<f64, NumericsError> {
        *n += 1;
        let v = g(x);
        if v.is_nan() {
            Err(NumericsError::NonFinite { x })
        } else {
            Ok(v)
        }
    };
    let mut n = 0usize;
    let sqrt_eps = f64::EPSILON.sqrt();

    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = eval(x, &mut n)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);

    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = sqrt_eps * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if (u - a) < tol2 || (b - u) < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = eval(u, &mut n)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    let x = x.clamp(lo, hi);
    let f_lo = eval(lo, &mut n)?;
    let f_hi = eval(hi, &mut n)?;
    if f_lo <= fx || f_hi <= fx {
        let (xb, vb) = if f_lo <= f_hi { (lo, f_lo) } else { (hi, f_hi) };
        return Err(NumericsError::BoundaryMinimum { x: xb, value: vb });
    }
    Ok(Minimum { x, value: fx, evaluations: n })
}

/// Finds a root of `f` in `[lo, hi]` (Brent's method). The endpoint values
/// must have opposite signs or one of them must be zero.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: (f64, f64), xtol: f64) -> Result<f64, NumericsError> {
    let (lo, hi) = bracket;
    check_bracket(lo, hi)?;
    if !(xtol > 0.0) {
        return Err(NumericsError::InvalidTolerance(xtol));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() {
        return Err(NumericsError::NonFinite { x: a });
    }
    if fb.is_nan() {
        return Err(NumericsError::NonFinite { x: b });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NotBracketed { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(NumericsError::NonFinite { x: b });
        }
    }
    Ok(b)
}
