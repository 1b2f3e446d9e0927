//! Truncated Laurent series in `z` whose coefficients are Laurent polynomials
//! in the level `r` with complex entries, held in double-double.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use twofloat::{consts::PI, TwoFloat};

use crate::error::{Error, Result};
use crate::hp::{dd, dd_powi, dd_ratio, dd_recip, pi_q_dd, sincos_pi_dd, Cdd};
use crate::numtheory::Q;

const PIVOT_EPS: f64 = 1e-13;

/// Finite sum `sum_p c_p r^p`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RCoeff {
    lo: i32,
    c: Vec<Cdd>,
}

impl RCoeff {
    pub fn zero() -> Self {
        RCoeff { lo: 0, c: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::mono(c, 0)
    }

    pub fn constant_dd(c: Cdd) -> Self {
        Self::mono_dd(c, 0)
    }

    pub fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    /// `c r^p`.
    pub fn mono(c: C64, p: i32) -> Self {
        Self::mono_dd(Cdd::from_c64(c), p)
    }

    pub fn mono_dd(c: Cdd, p: i32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            RCoeff { lo: p, c: vec![c] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Entries `(p, c_p)` with `c_p != 0`, ascending in `p`.
    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.terms_dd().map(|(p, c)| (p, c.to_c64()))
    }

    pub fn terms_dd(&self) -> impl Iterator<Item = (i32, Cdd)> + '_ {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.lo + i as i32, *c))
    }

    pub fn get(&self, p: i32) -> C64 {
        self.get_dd(p).to_c64()
    }

    pub fn get_dd(&self, p: i32) -> Cdd {
        let i = p - self.lo;
        if i < 0 || i as usize >= self.c.len() {
            Cdd::ZERO
        } else {
            self.c[i as usize]
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms_dd().map(|(p, _)| p).last()
    }

    pub fn low_degree(&self) -> Option<i32> {
        self.terms_dd().map(|(p, _)| p).next()
    }

    /// Single nonzero entry, if that is the shape.
    pub fn as_monomial(&self) -> Option<(C64, i32)> {
        self.as_monomial_dd().map(|(c, p)| (c.to_c64(), p))
    }

    fn as_monomial_dd(&self) -> Option<(Cdd, i32)> {
        let mut it = self.terms_dd();
        let first = it.next()?;
        if it.next().is_some() {
            None
        } else {
            Some((first.1, first.0))
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.scale_dd(Cdd::from_c64(s))
    }

    pub fn scale_dd(&self, s: Cdd) -> Self {
        RCoeff { lo: self.lo, c: self.c.iter().map(|x| *x * s).collect() }
    }

    /// Multiply by `r^p`.
    pub fn shift(&self, p: i32) -> Self {
        RCoeff { lo: self.lo + p, c: self.c.clone() }
    }

    pub fn eval(&self, r: f64) -> C64 {
        let rd = dd(r);
        self.terms_dd().map(|(p, c)| c.scale(dd_powi(rd, p))).sum::<Cdd>().to_c64()
    }

    fn trimmed(mut self) -> Self {
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|x| x.is_zero()).count();
        if lead > 0 {
            self.c.drain(..lead);
            self.lo += lead as i32;
        }
        if self.c.is_empty() {
            self.lo = 0;
        }
        self
    }
}

impl Add for &RCoeff {
    type Output = RCoeff;
    fn add(self, o: &RCoeff) -> RCoeff {
        if self.c.is_empty() {
            return o.clone();
        }
        if o.c.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(o.lo);
        let hi = (self.lo + self.c.len() as i32).max(o.lo + o.c.len() as i32);
        let mut c = vec![Cdd::ZERO; (hi - lo) as usize];
        for (i, x) in self.c.iter().enumerate() {
            c[(self.lo - lo) as usize + i] += *x;
        }
        for (i, x) in o.c.iter().enumerate() {
            c[(o.lo - lo) as usize + i] += *x;
        }
        RCoeff { lo, c }.trimmed()
    }
}

impl Neg for &RCoeff {
    type Output = RCoeff;
    fn neg(self) -> RCoeff {
        RCoeff { lo: self.lo, c: self.c.iter().map(|x| -*x).collect() }
    }
}

impl Sub for &RCoeff {
    type Output = RCoeff;
    fn sub(self, o: &RCoeff) -> RCoeff {
        self + &(-o)
    }
}

impl Mul for &RCoeff {
    type Output = RCoeff;
    fn mul(self, o: &RCoeff) -> RCoeff {
        if self.c.is_empty() || o.c.is_empty() {
            return RCoeff::zero();
        }
        let mut c = vec![Cdd::ZERO; self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                c[i + j] += *x * *y;
            }
        }
        RCoeff { lo: self.lo + o.lo, c }.trimmed()
    }
}

impl fmt::Display for RCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.terms().map(|(p, c)| format!("({:.6e}{:+.6e}i) r^{}", c.re, c.im, p)).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `sum_{j=val}^{order} a_j z^j + O(z^{order+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    val: i32,
    coeffs: Vec<RCoeff>,
}

/// Building blocks for the integrands. Angles are in units of `pi`.
#[derive(Clone, Debug)]
pub enum Primitive {
    /// `sin(pi (a + b z))`.
    SinAffine { a: Q, b: Q },
    /// `cos(pi (a + b z))`.
    CosAffine { a: Q, b: Q },
    /// `exp(c z^2)`.
    ExpQuadratic(RCoeff),
    /// `exp(c z)`.
    ExpLinear(RCoeff),
    /// `sin(c z)`.
    SinLinear(RCoeff),
    /// `cos(c z)`.
    CosLinear(RCoeff),
    /// `cot(pi r z)`.
    CotRz,
    /// `sin^{-k}(pi z)`.
    InvSinPow(i32),
    /// `(pi z / sin(pi z))^k`.
    PiZOverSinPow(i32),
    /// `f(pi (z0 + z))` for `f` in sin/cos.
    TaylorAtPoint { cosine: bool, z0: Q },
    /// `sin^{-k}(pi (z0 + z))`, `z0` not an integer.
    InvSinPowAt { k: i32, z0: Q },
}

fn real_dd(x: TwoFloat) -> RCoeff {
    RCoeff::constant_dd(Cdd::real(x))
}

impl LaurentSeries {
    pub fn zero(order: i32) -> Self {
        LaurentSeries { val: order + 1, coeffs: Vec::new() }
    }

    pub fn one(order: i32) -> Self {
        Self::from_coeffs(0, order, vec![RCoeff::real(1.0)])
    }

    pub fn constant(c: RCoeff, order: i32) -> Self {
        Self::from_coeffs(0, order, vec![c])
    }

    /// Coefficients from `z^val` upward, padded or cut to `order`.
    pub fn from_coeffs(val: i32, order: i32, mut coeffs: Vec<RCoeff>) -> Self {
        let len = (order - val + 1).max(0) as usize;
        coeffs.resize(len, RCoeff::zero());
        LaurentSeries { val, coeffs }
    }

    pub fn from_complex(val: i32, order: i32, cs: &[C64]) -> Self {
        Self::from_coeffs(val, order, cs.iter().map(|c| RCoeff::constant(*c)).collect())
    }

    pub fn valuation(&self) -> i32 {
        self.val
    }

    pub fn order(&self) -> i32 {
        self.val + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, j: i32) -> RCoeff {
        let i = j - self.val;
        if i < 0 || i as usize >= self.coeffs.len() {
            RCoeff::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    pub fn truncate(&self, order: i32) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let keep = (order - self.val + 1).max(0) as usize;
        LaurentSeries { val: self.val, coeffs: self.coeffs[..keep].to_vec() }
    }

    pub fn primitive(kind: &Primitive, order: i32) -> Result<Self> {
        let n = order.max(0);
        Ok(match kind {
            Primitive::SinAffine { a, b } | Primitive::CosAffine { a, b } => {
                let (s, c) = sincos_pi_dd(a);
                let cosine = matches!(kind, Primitive::CosAffine { .. });
                Self::trig_affine(s, c, pi_q_dd(b), cosine, n)
            }
            Primitive::ExpQuadratic(c) => {
                let mut out = vec![RCoeff::zero(); n as usize + 1];
                let mut p = RCoeff::real(1.0);
                let mut k = 0usize;
                while 2 * k <= n as usize {
                    out[2 * k] = p.clone();
                    k += 1;
                    p = (&p * c).scale_dd(Cdd::real(dd_ratio(1, k as i128)));
                }
                Self::from_coeffs(0, n, out)
            }
            Primitive::ExpLinear(c) => {
                let mut out = Vec::with_capacity(n as usize + 1);
                let mut p = RCoeff::real(1.0);
                for k in 0..=n as usize {
                    out.push(p.clone());
                    p = (&p * c).scale_dd(Cdd::real(dd_ratio(1, k as i128 + 1)));
                }
                Self::from_coeffs(0, n, out)
            }
            Primitive::SinLinear(c) | Primitive::CosLinear(c) => {
                let want_sin = matches!(kind, Primitive::SinLinear(_));
                let mut out = Vec::with_capacity(n as usize + 1);
                let mut p = RCoeff::real(1.0);
                for k in 0..=n as usize {
                    let keep = if want_sin { k % 2 == 1 } else { k % 2 == 0 };
                    // sin: (-1)^((k-1)/2), cos: (-1)^(k/2)
                    let neg = (k / 2) % 2 == 1;
                    out.push(match (keep, neg) {
                        (false, _) => RCoeff::zero(),
                        (true, false) => p.clone(),
                        (true, true) => -&p,
                    });
                    p = (&p * c).scale_dd(Cdd::real(dd_ratio(1, k as i128 + 1)));
                }
                Self::from_coeffs(0, n, out)
            }
            Primitive::CotRz => {
                // cot x = sum t_j x^{2j-1};  x = pi r z
                let t = x_cot_x(((n + 1) / 2 + 1) as usize);
                let mut out = vec![RCoeff::zero(); (n + 2) as usize];
                for (j, tj) in t.iter().enumerate() {
                    let e = 2 * j as i32 - 1;
                    if e > n {
                        break;
                    }
                    let c = *tj * dd_powi(PI, e);
                    out[(e + 1) as usize] = RCoeff::mono_dd(Cdd::real(c), e);
                }
                Self::from_coeffs(-1, n, out)
            }
            Primitive::PiZOverSinPow(k) => {
                let base: Vec<RCoeff> = pi_z_over_sin(n as usize).into_iter().map(real_dd).collect();
                Self::from_coeffs(0, n, base).pow_int(*k)?
            }
            Primitive::InvSinPow(k) => {
                let k = *k;
                let base = Self::primitive(&Primitive::PiZOverSinPow(k), n + k.max(0))?;
                let scale = Cdd::real(dd_powi(PI, -k));
                let coeffs = base.coeffs.iter().map(|c| c.scale_dd(scale)).collect();
                Self::from_coeffs(-k, n, coeffs)
            }
            Primitive::TaylorAtPoint { cosine, z0 } => {
                let (s, c) = sincos_pi_dd(z0);
                Self::trig_affine(s, c, PI, *cosine, n)
            }
            Primitive::InvSinPowAt { k, z0 } => {
                if z0.is_integer() {
                    return Err(Error::Series(format!(
                        "sin(pi z) vanishes at z0 = {}",
                        crate::numtheory::fmt_q(z0)
                    )));
                }
                let (s, c) = sincos_pi_dd(z0);
                let base = Self::trig_affine(s, c, PI, false, n);
                base.pow_int(-*k)?
            }
        })
    }

    fn trig_affine(sa: TwoFloat, ca: TwoFloat, b: TwoFloat, cosine: bool, n: i32) -> Self {
        // d^k/dz^k sin(a+bz) = b^k sin(a + k pi/2)
        let cyc_sin = [sa, ca, -sa, -ca];
        let cyc_cos = [ca, -sa, -ca, sa];
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut bk = dd(1.0);
        for k in 0..=n as usize {
            let v = if cosine { cyc_cos[k % 4] } else { cyc_sin[k % 4] };
            out.push(real_dd(v * bk));
            bk = bk * b * dd_ratio(1, k as i128 + 1);
        }
        Self::from_coeffs(0, n, out)
    }

    pub fn add(&self, o: &Self) -> Self {
        let val = self.val.min(o.val);
        let order = self.order().min(o.order());
        let mut out = Vec::with_capacity((order - val + 1).max(0) as usize);
        for j in val..=order {
            out.push(&self.coeff(j) + &o.coeff(j));
        }
        Self::from_coeffs(val, order, out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scalar_mul(&RCoeff::real(-1.0)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let val = self.val + o.val;
        let order = (self.order() + o.val).min(o.order() + self.val);
        let len = (order - val + 1).max(0) as usize;
        let mut out = vec![RCoeff::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(val, order, out)
    }

    pub fn scalar_mul(&self, c: &RCoeff) -> Self {
        LaurentSeries { val: self.val, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.scale_dd(Cdd::from_c64(c))
    }

    pub fn scale_dd(&self, c: Cdd) -> Self {
        LaurentSeries { val: self.val, coeffs: self.coeffs.iter().map(|x| x.scale_dd(c)).collect() }
    }

    /// Multiply by `z^p`.
    pub fn shift(&self, p: i32) -> Self {
        LaurentSeries { val: self.val + p, coeffs: self.coeffs.clone() }
    }

    /// Multiplicative inverse. The leading coefficient must be a monomial in `r`.
    pub fn invert(&self) -> Result<Self> {
        let skip = self.coeffs.iter().take_while(|c| c.max_abs() <= PIVOT_EPS).count();
        if skip == self.coeffs.len() {
            return Err(Error::Series("cannot invert a series with no nonzero coefficient".into()));
        }
        if skip > 0 {
            log::warn!("invert: dropped {skip} negligible leading coefficient(s)");
        }
        let a: Vec<RCoeff> = self.coeffs[skip..].to_vec();
        let val = self.val + skip as i32;
        let (c0, p0) = a[0].as_monomial_dd().ok_or_else(|| {
            Error::Series("leading coefficient is not a monomial in r".into())
        })?;
        let inv0 = RCoeff::mono_dd(c0.inv(), -p0);
        let len = a.len();
        let mut b: Vec<RCoeff> = Vec::with_capacity(len);
        b.push(inv0.clone());
        for k in 1..len {
            let mut s = RCoeff::zero();
            for j in 1..=k {
                if a[j].is_zero() || b[k - j].is_zero() {
                    continue;
                }
                s = &s + &(&a[j] * &b[k - j]);
            }
            b.push(-&(&s * &inv0));
        }
        // relative truncation is preserved: order - val stays the same
        let new_val = -val;
        Ok(Self::from_coeffs(new_val, new_val + len as i32 - 1, b))
    }

    pub fn pow_int(&self, k: i32) -> Result<Self> {
        if k < 0 {
            return self.invert()?.pow_int(-k);
        }
        let rel = self.order() - self.val;
        let mut result = Self::one(rel);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// Coefficient of `z^{-1}`.
    pub fn residue(&self) -> Result<RCoeff> {
        if self.val > -1 {
            return Ok(RCoeff::zero());
        }
        if self.order() < -1 {
            return Err(Error::Series(format!(
                "residue needs order >= -1, series known only to z^{}",
                self.order()
            )));
        }
        Ok(self.coeff(-1))
    }

    /// `k!` times the `z^k` coefficient of an r-free series.
    pub fn derivative_at(&self, k: i32) -> Result<C64> {
        if self.order() < k {
            return Err(Error::Series(format!("derivative of order {k} needs series to z^{k}")));
        }
        if self.val < 0 && (self.val..0).any(|j| self.coeff(j).max_abs() > PIVOT_EPS) {
            return Err(Error::Series("derivative_at on a series with a pole".into()));
        }
        let c = self.coeff(k);
        if c.terms_dd().any(|(p, _)| p != 0) {
            return Err(Error::Series("derivative_at needs r-free coefficients".into()));
        }
        let mut fact = dd(1.0);
        for i in 2..=k.max(0) {
            fact *= i as f64;
        }
        Ok(c.get_dd(0).scale(fact).to_c64())
    }

    /// Substitute a numeric level.
    pub fn eval_coeffs(&self, r: f64) -> Vec<C64> {
        self.coeffs.iter().map(|c| c.eval(r)).collect()
    }
}

/// Taylor coefficients of `x/sin x` at even powers, listed densely to `x^n`.
fn x_over_sin_x(n: usize) -> Vec<TwoFloat> {
    // invert sin(x)/x = sum (-1)^j x^{2j}/(2j+1)!
    let mut s = vec![dd(0.0); n + 1];
    let mut f = dd(1.0); // (k+1)!
    for k in 0..=n {
        if k > 0 {
            f *= (k + 1) as f64;
        }
        if k % 2 == 0 {
            let v = dd_recip(f);
            s[k] = if (k / 2) % 2 == 0 { v } else { -v };
        }
    }
    let mut inv = vec![dd(0.0); n + 1];
    inv[0] = dd(1.0);
    for k in 1..=n {
        let mut acc = dd(0.0);
        for j in 1..=k {
            acc += s[j] * inv[k - j];
        }
        inv[k] = -acc;
    }
    inv
}

/// `(pi z / sin(pi z))` coefficients in `z`.
fn pi_z_over_sin(n: usize) -> Vec<TwoFloat> {
    x_over_sin_x(n).iter().enumerate().map(|(k, c)| *c * dd_powi(PI, k as i32)).collect()
}

/// `t_j` with `cot x = sum_j t_j x^{2j-1}`.
fn x_cot_x(m: usize) -> Vec<TwoFloat> {
    let n = 2 * m;
    let xs = x_over_sin_x(n);
    let mut cosc = vec![dd(0.0); n + 1];
    let mut f = dd(1.0);
    for k in 0..=n {
        if k > 0 {
            f *= k as f64;
        }
        if k % 2 == 0 {
            let v = dd_recip(f);
            cosc[k] = if (k / 2) % 2 == 0 { v } else { -v };
        }
    }
    let mut out = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let k = 2 * j;
        let mut acc = dd(0.0);
        for i in 0..=k {
            acc += cosc[i] * xs[k - i];
        }
        out.push(acc);
    }
    out
}

/// `(sin(pi x), cos(pi x))` with exact reduction of the rational `x`.
pub fn sincos_pi_q(x: &Q) -> (f64, f64) {
    let (s, c) = sincos_pi_dd(x);
    (s.hi() + s.lo(), c.hi() + c.lo())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn cot_expansion() {
        let s = LaurentSeries::primitive(&Primitive::CotRz, 3).unwrap();
        assert_eq!(s.valuation(), -1);
        let m1 = s.coeff(-1);
        assert_relative_eq!(m1.get(-1).re, 1.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(s.coeff(1).get(1).re, -PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(s.coeff(3).get(3).re, -PI.powi(3) / 45.0, epsilon = 1e-13);
        assert_relative_eq!(s.residue().unwrap().get(-1).re, 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn pi_z_over_sin_expansion() {
        let s = LaurentSeries::primitive(&Primitive::PiZOverSinPow(1), 4).unwrap();
        assert_relative_eq!(s.coeff(0).get(0).re, 1.0);
        assert_relative_eq!(s.coeff(2).get(0).re, PI * PI / 6.0, epsilon = 1e-14);
        assert_relative_eq!(s.coeff(4).get(0).re, 7.0 * PI.powi(4) / 360.0, epsilon = 1e-13);
        assert_relative_eq!(s.derivative_at(2).unwrap().re, PI * PI / 3.0, epsilon = 1e-13);
        let inv = LaurentSeries::primitive(&Primitive::InvSinPow(1), 2).unwrap();
        assert_eq!(inv.valuation(), -1);
        assert_relative_eq!(inv.residue().unwrap().get(0).re, 1.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn identities() {
        let s = LaurentSeries::primitive(&Primitive::SinAffine { a: Q::new(3, 10), b: Q::new(17, 10) }, 8).unwrap();
        let co = LaurentSeries::primitive(&Primitive::CosAffine { a: Q::new(3, 10), b: Q::new(17, 10) }, 8).unwrap();
        let one = s.mul(&s).add(&co.mul(&co));
        assert_relative_eq!(one.coeff(0).get(0).re, 1.0, epsilon = 1e-14);
        for j in 1..=8 {
            assert!(one.coeff(j).max_abs() < 1e-13);
        }
        let sinc = LaurentSeries::primitive(&Primitive::SinAffine { a: Q::new(0, 1), b: Q::new(1, 1) }, 10)
            .unwrap()
            .coeffs[1..]
            .to_vec();
        let sinc = LaurentSeries::from_coeffs(0, 9, sinc);
        let prod = sinc.invert().unwrap().mul(&sinc);
        assert_relative_eq!(prod.coeff(0).get(0).re, 1.0, epsilon = 1e-14);
        for j in 1..=9 {
            assert!(prod.coeff(j).max_abs() < 1e-12);
        }
    }

    #[test]
    fn valuation_and_residue() {
        let cot = LaurentSeries::primitive(&Primitive::CotRz, 4).unwrap();
        let e = LaurentSeries::primitive(
            &Primitive::ExpQuadratic(RCoeff::mono(C64::new(0.0, PI / 2.0), 1)),
            4,
        )
        .unwrap();
        assert_eq!(cot.mul(&e).valuation(), -1);
        let d = LaurentSeries::from_complex(-3, 3, &[c(1.0), c(2.0), c(0.0), c(4.0), c(5.0), c(6.0), c(7.0)]);
        // derivative of d: coefficient j -> (j+1) at j
        let mut dc = Vec::new();
        for j in -4..=2 {
            dc.push(d.coeff(j + 1).scale(c((j + 1) as f64)));
        }
        let dd = LaurentSeries::from_coeffs(-4, 2, dc);
        assert!(dd.residue().unwrap().is_zero());
    }

    #[test]
    fn sin_taylor_at_point() {
        let s = LaurentSeries::primitive(
            &Primitive::TaylorAtPoint { cosine: false, z0: Q::new(1, 3) },
            3,
        )
        .unwrap();
        assert_relative_eq!(s.coeff(0).get(0).re, (PI / 3.0).sin(), epsilon = 1e-15);
        assert_relative_eq!(s.coeff(1).get(0).re, PI * (PI / 3.0).cos(), epsilon = 1e-14);
        assert!(LaurentSeries::primitive(&Primitive::InvSinPowAt { k: 1, z0: Q::new(2, 1) }, 3)
            .is_err());
    }
}
