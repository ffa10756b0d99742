//! Minimal double-double arithmetic (~32 significant digits).
//!
//! Used only where plain f64 cannot reach the accuracy contract: the Gamma
//! finite-sum form of the pre-constant suffers catastrophic cancellation for
//! small `c/a` (the terms grow like `c^-(r+1)` while the result stays O(1)),
//! so its terms are assembled in double-double and rounded once at the end.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub(crate) const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
// (hi, lo) split of ln 2; the head is intentionally the nearest f64
#[allow(clippy::approx_constant)]
const LN2: Dd = Dd {
    hi: 0.6931471805599453,
    lo: 2.3190468138462996e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact double-double product of two f64 values.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    /// Exact double-double sum of two f64 values.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, mut n: u32) -> Dd {
        let mut base = self;
        let mut acc = ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }

    /// exp in double-double: range reduction by ln 2, then a Taylor series on
    /// the reduced argument.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -709.0 {
            return Dd::from_f64(0.0);
        }
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(k));
        let mut term = ONE;
        let mut sum = ONE;
        for j in 1..60 {
            term = term.mul(r).div(Dd::from_f64(j as f64));
            sum = sum.add(term);
            if term.hi.abs() < sum.hi.abs() * 1e-35 {
                break;
            }
        }
        let scale = f64::powi(2.0, k as i32);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    /// Natural log via one f64 seed and two Newton refinements.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            let e = y.exp();
            y = y.add(self.div(e)).sub(ONE);
        }
        y
    }

    /// x^p for x > 0 and real p.
    pub fn powr(self, p: Dd) -> Dd {
        self.ln().mul(p).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_dd_close(v: Dd, ref_hi: f64, ref_lo: f64, tol: f64) {
        // compare against a double-double reference (hi, lo) split
        let diff = v.sub(Dd { hi: ref_hi, lo: ref_lo });
        let scale = ref_hi.abs().max(1e-300);
        assert!(
            (diff.hi.abs() + diff.lo.abs()) / scale < tol,
            "dd value ({}, {}) vs reference ({}, {})",
            v.hi,
            v.lo,
            ref_hi,
            ref_lo
        );
    }

    #[test]
    fn mul_div_identities() {
        // note 3 * (1/3 as f64) is exactly 1 - 2^-54, i.e. (1.0, -2^-54) as a
        // double-double
        let x = Dd::from_prod(1.0 / 3.0, 7.0);
        let y = x.div(Dd::from_f64(7.0)).mul(Dd::from_f64(3.0));
        assert_dd_close(y, 1.0, -(2.0f64.powi(-54)), 1e-30);
        let z = Dd::from_f64(2.0).powi(10);
        assert_eq!(z.hi, 1024.0);
        assert_eq!(z.lo, 0.0);
    }

    #[test]
    fn exp_reference_values() {
        // (hi, lo) splits of exp at the exact f64 arguments, computed with
        // 60-digit arithmetic
        assert_dd_close(
            Dd::from_f64(0.3).exp(),
            1.3498588075760032,
            -9.447314673432387e-17,
            1e-30,
        );
        assert_dd_close(
            Dd::from_f64(-0.2).exp(),
            0.8187307530779818,
            2.859368976827291e-17,
            1e-30,
        );
        assert_dd_close(
            Dd::from_f64(12.345).exp(),
            229808.1248612461,
            1.0396403106203002e-11,
            1e-30,
        );
    }

    #[test]
    fn ln_reference_values() {
        assert_dd_close(
            Dd::from_f64(1.7).ln(),
            0.5306282510621704,
            -5.076541175216476e-18,
            1e-30,
        );
        assert_dd_close(
            Dd::from_f64(24.7).ln(),
            3.2068032436339315,
            -6.057687620515371e-17,
            1e-30,
        );
        assert_dd_close(
            Dd::from_f64(1e-6).ln(),
            -13.815510557964274,
            -5.191549935450145e-16,
            1e-30,
        );
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[1e-6, 0.037, 0.9, 1.0, 3.7, 245.0, 1.7e8] {
            let rt = Dd::from_f64(x).ln().exp();
            let diff = rt.sub(Dd::from_f64(x));
            assert!(
                (diff.hi.abs() + diff.lo.abs()) / x < 1e-29,
                "round trip failed at {x}: ({}, {})",
                rt.hi,
                rt.lo
            );
        }
    }

    #[test]
    fn powr_matches_integer_powers() {
        let v = Dd::from_f64(1.7).powr(Dd::from_f64(8.0));
        let w = Dd::from_f64(1.7).powi(8);
        let diff = v.sub(w);
        assert!((diff.hi.abs() + diff.lo.abs()) / w.hi < 1e-29);
    }
}
