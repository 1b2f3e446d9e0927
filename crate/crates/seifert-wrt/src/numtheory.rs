//! Integer and rational primitives: Bezout complements, Dedekind sums,
//! the Rademacher Phi function and rationals modulo one.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational used throughout.
pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn q_to_f64(x: &Q) -> f64 {
    // split to keep precision when numerator and denominator are large
    let (n, d) = (*x.numer(), *x.denom());
    let w = n.div_euclid(d);
    let f = n.rem_euclid(d);
    w as f64 + f as f64 / d as f64
}

pub fn sign_q(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Extended Euclid. Returns `(g, x, y)` with `g > 0` and `a*x + b*y = g`.
pub fn ext_gcd(a: i128, b: i128) -> Result<(i128, i128, i128)> {
    if a == 0 && b == 0 {
        return Err(Error::Domain("ext_gcd(0, 0) is undefined".into()));
    }
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (x0, x1) = (x1, x0 - t * x1);
        (y0, y1) = (y1, y0 - t * y1);
    }
    if r0 < 0 {
        Ok((-r0, -x0, -y0))
    } else {
        Ok((r0, x0, y0))
    }
}

/// Complements with `alpha*sigma - beta*rho = 1`, taking the smallest rho >= 0.
pub fn rho_sigma(alpha: i64, beta: i64) -> Result<(i64, i64)> {
    if alpha < 1 {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let (a, b) = (alpha as i128, beta as i128);
    let (g, _, y) = ext_gcd(a, b)?;
    if g != 1 {
        return Err(Error::Domain(format!("({alpha},{beta}) is not a coprime pair")));
    }
    // a*x + b*y = 1  =>  rho = -y works; reduce to [0, alpha)
    let rho = (-y).rem_euclid(a);
    let num = 1 + b * rho;
    debug_assert!(num % a == 0);
    Ok((rho as i64, (num / a) as i64))
}

/// Dedekind sum `s(d, c)` and symbol `S(d/c) = 12 sign(c) s(d, c)`.
pub fn dedekind(d: i64, c: i64) -> Result<(Q, Q)> {
    if c == 0 {
        return Err(Error::Domain("dedekind sum needs c != 0".into()));
    }
    if (d as i128).gcd(&(c as i128)) != 1 {
        return Err(Error::Domain(format!("dedekind({d},{c}): arguments not coprime")));
    }
    let s = dedekind_s(d as i128, (c as i128).abs());
    let big = s * qi(12 * c.signum() as i128);
    Ok((s, big))
}

/// `S(d/c)`.
pub fn dedekind_symbol(d: i64, c: i64) -> Result<Q> {
    dedekind(d, c).map(|x| x.1)
}

fn dedekind_s(d: i128, c: i128) -> Q {
    // s(d,c) for c > 0 by periodicity, oddness and reciprocity
    let mut acc = Q::zero();
    let mut sgn = 1i128;
    let (mut d, mut c) = (d.rem_euclid(c), c);
    while c > 1 && d != 0 {
        // 0 < d < c:  s(d,c) = -s(c,d) - 1/4 + (c/d + d/c + 1/(cd))/12
        let corr = (q(c, d) + q(d, c) + q(1, c * d)) / qi(12) - q(1, 4);
        acc += corr * qi(sgn);
        sgn = -sgn;
        (d, c) = (c.rem_euclid(d), d);
    }
    acc
}

/// A 2x2 integer matrix of determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SL2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Z {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if (a as i128) * (d as i128) - (b as i128) * (c as i128) != 1 {
            return Err(Error::Domain(format!("[[{a},{b}],[{c},{d}]] has det != 1")));
        }
        Ok(SL2Z { a, b, c, d })
    }

    pub fn neg(&self) -> Self {
        SL2Z { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn mul(&self, o: &SL2Z) -> SL2Z {
        SL2Z {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// Rademacher Phi on PSL(2,Z).
pub fn rademacher_phi(m: &SL2Z) -> Q {
    if m.c == 0 {
        q(m.b as i128, m.d as i128)
    } else {
        let s = dedekind_symbol(m.d, m.c).expect("det one implies coprime entries");
        q((m.a + m.d) as i128, m.c as i128) - s
    }
}

/// Rational reduced into `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalModZ(Q);

impl RationalModZ {
    pub fn new(x: Q) -> Self {
        let f = x - x.floor();
        RationalModZ(f)
    }

    pub fn zero() -> Self {
        RationalModZ(Q::zero())
    }

    pub fn value(&self) -> Q {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.0)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.0 + o.0)
    }

    pub fn scale(&self, k: i128) -> Self {
        Self::new(self.0 * qi(k))
    }

    /// `exp(2 pi i r q)` with exact argument reduction.
    pub fn phase(&self, r: i64) -> num_complex::Complex64 {
        let t = Self::new(self.0 * qi(r as i128));
        crate::exact::expi2pi_q(&t.0)
    }
}

impl fmt::Display for RationalModZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for RationalModZ {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_q(s).map(RationalModZ::new)
    }
}

impl Serialize for RationalModZ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalModZ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(q(n, d))
        }
        None => s.parse::<i128>().map(qi).map_err(|_| bad()),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn lcm_all(xs: impl IntoIterator<Item = i64>) -> i64 {
    xs.into_iter().fold(1i64, |acc, x| acc.lcm(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn egcd_examples() {
        assert_eq!(ext_gcd(6, 4).unwrap(), (2, 1, -1));
        assert_eq!(ext_gcd(1, 0).unwrap(), (1, 1, 0));
        assert_eq!(ext_gcd(7, 3).unwrap(), (1, 1, -2));
        assert!(ext_gcd(0, 0).is_err());
        let (g, x, y) = ext_gcd(-12, 18).unwrap();
        assert_eq!(g, 6);
        assert_eq!(-12 * x + 18 * y, 6);
    }

    #[test]
    fn complements() {
        assert_eq!(rho_sigma(1, 0).unwrap(), (0, 1));
        assert_eq!(rho_sigma(2, 1).unwrap(), (1, 1));
        assert_eq!(rho_sigma(7, 1).unwrap(), (6, 1));
        assert_eq!(rho_sigma(1, -1).unwrap(), (0, 1));
        let (r, s) = rho_sigma(5, -3).unwrap();
        assert_eq!(5 * s - (-3) * r, 1);
        assert!(rho_sigma(4, 2).is_err());
    }

    #[test]
    fn dedekind_golden() {
        assert_eq!(dedekind(1, 9).unwrap().0, q(14, 27));
        assert_eq!(dedekind(2, 9).unwrap().0, q(4, 27));
        assert_eq!(dedekind(5, 1).unwrap().0, Q::zero());
        assert_eq!(dedekind(1, 2).unwrap().0, Q::zero());
        assert_eq!(dedekind(1, 3).unwrap().0, q(1, 18));
        assert!(dedekind(1, 0).is_err());
        // S(d/-c) = -S(d/c)
        assert_eq!(dedekind(1, -9).unwrap().1, -dedekind(1, 9).unwrap().1);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(rademacher_phi(&SL2Z::new(1, 1, 0, 1).unwrap()), qi(1));
        assert_eq!(rademacher_phi(&SL2Z::new(0, -1, 1, 0).unwrap()), qi(0));
        let m = SL2Z::new(-1, -1, 2, 1).unwrap();
        assert_eq!(rademacher_phi(&m), -dedekind_symbol(1, 2).unwrap());
        assert_eq!(rademacher_phi(&m), rademacher_phi(&m.neg()));
    }

    #[test]
    fn modz() {
        let x = RationalModZ::new(q(-121, 168));
        assert_eq!(x.to_string(), "47/168");
        assert_eq!(x.neg().to_string(), "121/168");
        assert_eq!("5/4".parse::<RationalModZ>().unwrap().to_string(), "1/4");
    }
}
