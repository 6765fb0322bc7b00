//! Double-double evaluation of the delay law, written without reference to
//! the model's implementation.

use std::f64::consts::PI;

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Dd { hi: s, lo: lo - (s - hi) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        Dd::renorm(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd::renorm(p, err + self.hi * o.lo + self.lo * o.hi)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from(-q1)));
        let q2 = r.hi / o.hi;
        Dd::renorm(q1, q2)
    }

    /// ln with one Newton step on exp, starting from the f64 logarithm.
    fn ln(self) -> Dd {
        let y = self.hi.ln();
        let e = y.exp();
        // y + (x − e^y)/e^y
        let corr = self.add(Dd::from(-e)).div(Dd::from(e));
        Dd::from(y).add(corr)
    }
}

/// t_D = (½·ln(2πN))² / (4·N_c·Γ_R) accumulated in double-double.
pub fn oracle_delay(n_prefactor: f64, rate: f64, n_atoms: f64) -> f64 {
    let two_pi = Dd { hi: 2.0 * PI, lo: 2.449_293_598_294_706_4e-16 };
    let half_log = two_pi.mul(Dd::from(n_atoms)).ln().mul(Dd::from(0.5));
    let num = half_log.mul(half_log);
    let den = Dd::from(4.0).mul(Dd::from(n_prefactor)).mul(Dd::from(rate));
    let q = num.div(den);
    q.hi + q.lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operating_point() {
        let t = oracle_delay(175.6, 2.0 * PI * 45e3, 8.3e4);
        assert!((t - 218.2e-9).abs() < 0.1e-9, "{t}");
    }

    #[test]
    fn double_double_log() {
        let l = Dd::from(10.0).ln();
        assert!((l.hi + l.lo - std::f64::consts::LN_10).abs() < 1e-16);
    }

    #[test]
    fn decreasing_in_rate() {
        let mut last = f64::INFINITY;
        for k in 1..50 {
            let t = oracle_delay(100.0, k as f64 * 1e4, 1e5);
            assert!(t < last);
            last = t;
        }
    }
}
