//! Double-double complex helpers for the finite sums.

use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_complex::Complex64 as C64;
use twofloat::{consts::PI, TwoFloat};

use crate::numtheory::Q;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cdd {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

pub fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// `n / d` in double-double; `d` must be exact in `f64`.
pub fn dd_ratio(n: i128, d: i128) -> TwoFloat {
    dd_int(n) / d as f64
}

/// `1/x` by one Newton step; the crate's own quotient by a double-double
/// loses the low word.
pub fn dd_recip(x: TwoFloat) -> TwoFloat {
    let y = TwoFloat::from(1.0 / x.hi());
    y + y * (dd(1.0) - x * y)
}

/// `x^k` for any integer `k`, `x != 0`.
pub fn dd_powi(x: TwoFloat, k: i32) -> TwoFloat {
    match k {
        0 => dd(1.0),
        k if k > 0 => x.powi(k),
        k => dd_recip(x).powi(-k),
    }
}

pub fn dd_int(n: i128) -> TwoFloat {
    let hi = n as f64;
    let lo = (n - hi as i128) as f64;
    TwoFloat::new_add(hi, lo)
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: TwoFloat::from_f64(0.0), im: TwoFloat::from_f64(0.0) };
    pub const ONE: Cdd = Cdd { re: TwoFloat::from_f64(1.0), im: TwoFloat::from_f64(0.0) };

    pub fn new(re: TwoFloat, im: TwoFloat) -> Self {
        Cdd { re, im }
    }

    pub fn real(x: TwoFloat) -> Self {
        Cdd { re: x, im: dd(0.0) }
    }

    /// `i^k`.
    pub fn i_pow(k: i64) -> Self {
        let (re, im) = match k.rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
        Cdd { re: dd(re), im: dd(im) }
    }

    pub fn scale(self, s: TwoFloat) -> Self {
        Cdd { re: self.re * s, im: self.im * s }
    }

    pub fn powi_n(self, n: usize) -> Self {
        (0..n).fold(Cdd::ONE, |a, _| a * self)
    }

    pub fn from_c64(z: C64) -> Self {
        Cdd { re: dd(z.re), im: dd(z.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.hi() == 0.0 && self.im.hi() == 0.0
    }

    pub fn norm(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn inv(self) -> Self {
        let r = dd_recip(self.re * self.re + self.im * self.im);
        Cdd { re: self.re * r, im: -self.im * r }
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.hi() + self.re.lo(), self.im.hi() + self.im.lo())
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl AddAssign for Cdd {
    fn add_assign(&mut self, o: Cdd) {
        *self = *self + o;
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl MulAssign for Cdd {
    fn mul_assign(&mut self, o: Cdd) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Cdd {
    fn sum<I: Iterator<Item = Cdd>>(it: I) -> Cdd {
        it.fold(Cdd::ZERO, |a, b| a + b)
    }
}

/// `exp(2 pi i n / d)`, reduced to a quarter turn plus an angle of at most `pi/4`.
pub fn expi2pi_dd(n: i128, d: i128) -> Cdd {
    assert!(d > 0, "denominator must be positive");
    let m = n.rem_euclid(d);
    // nearest quarter turn k, remainder (4m - k d) / (4d) of a full turn
    let k = (8 * m + d).div_euclid(2 * d);
    let num = 4 * m - k * d;
    let x = PI * dd_ratio(num, 2 * d);
    let (s, c) = x.sin_cos();
    Cdd::new(c, s) * Cdd::i_pow(k as i64)
}

pub fn expi2pi_q_dd(t: &Q) -> Cdd {
    expi2pi_dd(*t.numer(), *t.denom())
}

/// `pi x` in double-double.
pub fn pi_q_dd(x: &Q) -> TwoFloat {
    PI * dd_ratio(*x.numer(), *x.denom())
}

/// `(sin(pi x), cos(pi x))` with exact reduction of `x`.
pub fn sincos_pi_dd(x: &Q) -> (TwoFloat, TwoFloat) {
    let e = expi2pi_q_dd(&(x / Q::from_integer(2)));
    (e.im, e.re)
}

/// `sin(pi n / d)`.
pub fn sin_pi_dd(n: i128, d: i128) -> TwoFloat {
    expi2pi_dd(n, 2 * d).im
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity() {
        for d in 1..40i128 {
            let mut acc = Cdd::ZERO;
            for n in 0..d {
                acc += expi2pi_dd(n, d);
            }
            let want = if d == 1 { 1.0 } else { 0.0 };
            assert!((acc.to_c64() - C64::new(want, 0.0)).norm() < 1e-20, "d={d}");
            let z = expi2pi_dd(-3, d);
            let w = crate::exact::expi2pi_frac(-3, d);
            assert!((z.to_c64() - w).norm() < 1e-15);
        }
        let s = sin_pi_dd(1, 6);
        assert!(((s - dd(0.5)).hi()).abs() < 1e-20);
        let t = dd_recip(dd(3.0).sqrt());
        assert!(((t * t * dd(3.0) - dd(1.0)).hi()).abs() < 1e-30);
        assert!(((dd_ratio(1, 6) * 6.0 - dd(1.0)).hi()).abs() < 1e-30);
    }
}
