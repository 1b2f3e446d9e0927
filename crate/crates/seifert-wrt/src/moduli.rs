//! Index sets, stationary points, q-values, Chern-Simons values and
//! genus-0 representation existence.

use std::fmt;

use itertools_free::product_ranges;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numtheory::{fmt_q, q, qi, RationalModZ, Q};
use crate::seifert::{Base, SeifertData, Working};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum I2Tag {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelKind {
    /// `(m, n)` with `n` in `S`.
    I1 { m: i64, n: Vec<i64> },
    /// `(l, n')`, with `n'` stored doubled.
    I2 { l: u8, n2: Vec<i64>, tag: I2Tag },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlatFamilyLabel {
    pub kind: LabelKind,
    pub q: RationalModZ,
}

impl LabelKind {
    pub fn n_prime(&self) -> Vec<Q> {
        match self {
            LabelKind::I2 { n2, .. } => n2.iter().map(|&t| q(t as i128, 2)).collect(),
            LabelKind::I1 { n, .. } => n.iter().map(|&t| qi(t as i128)).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, LabelKind::I2 { l: 0, n2, .. } if n2.iter().all(|&t| t == 0))
    }

    pub fn tag(&self) -> Option<I2Tag> {
        match self {
            LabelKind::I2 { tag, .. } => Some(*tag),
            LabelKind::I1 { .. } => None,
        }
    }
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelKind::I1 { m, n } => {
                let parts: Vec<String> = n.iter().map(|x| x.to_string()).collect();
                write!(f, "I1({m};{})", parts.join(","))
            }
            LabelKind::I2 { l, n2, tag } => {
                let parts: Vec<String> = n2.iter().map(|&t| fmt_q(&q(t as i128, 2))).collect();
                let t = if *tag == I2Tag::A { "a" } else { "b" };
                write!(f, "I2{t}({l};{})", parts.join(","))
            }
        }
    }
}

impl fmt::Display for FlatFamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Angular interval in units of `pi`, inside `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval01Pi {
    pub lo: Q,
    pub hi: Q,
}

impl Interval01Pi {
    pub fn point(x: Q) -> Self {
        Interval01Pi { lo: x, hi: x }
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn lo_radians(&self) -> f64 {
        crate::numtheory::q_to_f64(&self.lo) * std::f64::consts::PI
    }

    pub fn hi_radians(&self) -> f64 {
        crate::numtheory::q_to_f64(&self.hi) * std::f64::consts::PI
    }

    /// Angles of `x y` for `x` in this set and `y` in the class of angle `theta`.
    pub fn fold(&self, theta: &Q) -> Interval01Pi {
        let (a, b, t) = (self.lo, self.hi, *theta);
        let lo = if a <= t && t <= b {
            Q::zero()
        } else {
            (a - t).abs().min((b - t).abs())
        };
        let top = |p: Q| (p + t).min(qi(2) - p - t);
        let crit = Q::one() - t;
        let hi = if a <= crit && crit <= b { Q::one() } else { top(a).max(top(b)) };
        Interval01Pi { lo, hi }
    }
}

/// Reachable angles of `prod g_j exp(i pi x_j) g_j^{-1}`, angles `x_j` in units of `pi`.
pub fn reachable(angles: &[Q]) -> Interval01Pi {
    let mut it = angles.iter();
    let first = match it.next() {
        Some(x) => Interval01Pi::point(*x),
        None => return Interval01Pi::point(Q::zero()),
    };
    it.fold(first, |acc, t| acc.fold(t))
}

/// Whether the product of the classes can equal `exp(i pi target)`, `target` in `{0, 1}`.
pub fn product_can_hit(angles: &[Q], target: &Q) -> bool {
    reachable(angles).contains(target)
}

/// The three-fiber inequality on `x_j = n'_j / alpha_j`.
pub fn modulin_n3(x: [Q; 3]) -> bool {
    let lhs = (x[0] - x[1]).abs();
    let rhs = (x[0] + x[1]).min(Q::one() - x[0] - x[1]);
    lhs <= x[2] && x[2] <= rhs
}

mod itertools_free {
    /// All tuples `t` with `0 <= t_j < bounds_j`, last index fastest.
    pub fn product_ranges(bounds: &[i64]) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &b in bounds {
            let mut next = Vec::with_capacity(out.len() * b.max(0) as usize);
            for t in &out {
                for v in 0..b {
                    let mut u = t.clone();
                    u.push(v);
                    next.push(u);
                }
            }
            out = next;
        }
        out
    }
}

fn require_e(w: &Working) -> Result<()> {
    if w.e.is_zero() {
        return Err(Error::Domain("stationary points need E != 0".into()));
    }
    Ok(())
}

/// `-(2/E)(m - sum n_j / alpha_j)`.
pub fn z_st(x: &SeifertData, m: i64, n: &[i64]) -> Result<Q> {
    let w = x.working();
    require_e(&w)?;
    z_st_working(&w, m, n)
}

pub fn z_st_working(w: &Working, m: i64, n: &[i64]) -> Result<Q> {
    require_e(w)?;
    if n.len() != w.fibers.len() {
        return Err(Error::Domain(format!("expected {} entries, got {}", w.fibers.len(), n.len())));
    }
    let t = n_over_alpha(w, n);
    Ok(-(qi(2) / w.e) * (qi(m as i128) - t))
}

fn n_over_alpha(w: &Working, n: &[i64]) -> Q {
    w.fibers.iter().zip(n).fold(Q::zero(), |acc, (f, &x)| acc + q(x as i128, f.alpha as i128))
}

pub fn q_value(x: &SeifertData, kind: &LabelKind) -> Result<RationalModZ> {
    q_value_working(&x.working(), kind)
}

/// `q` of a label. Labels are always read against the working presentation.
pub fn q_value_working(w: &Working, kind: &LabelKind) -> Result<RationalModZ> {
    match kind {
        LabelKind::I1 { m, n } => {
            let z = z_st_working(w, *m, n)?;
            let mut s = Q::zero();
            for (f, &nj) in w.fibers.iter().zip(n) {
                s += q((f.rho as i128) * (nj as i128) * (nj as i128), f.alpha as i128);
            }
            Ok(RationalModZ::new(s - w.e * z * z / qi(4)))
        }
        LabelKind::I2 { l, n2, .. } => {
            if n2.len() != w.fibers.len() {
                return Err(Error::Domain("label length mismatch".into()));
            }
            let l2 = (*l as i128) * (*l as i128);
            let mut s = Q::zero();
            for (f, &t) in w.fibers.iter().zip(n2) {
                let np = q(t as i128, 2);
                s += q(f.rho as i128, f.alpha as i128) * np * np;
                s -= q((f.sigma as i128) * (f.beta as i128) * l2, 4);
            }
            Ok(RationalModZ::new(s))
        }
    }
}

/// `a(mu', n') = sum mu'_j n'_j / alpha_j`.
pub fn a_value(w: &Working, mu: &[i64], n2: &[i64]) -> Q {
    w.fibers
        .iter()
        .zip(mu.iter().zip(n2))
        .fold(Q::zero(), |acc, (f, (&m, &t))| acc + q((m * t) as i128, 2 * f.alpha as i128))
}

pub fn sign_vectors(n: usize) -> Vec<Vec<i64>> {
    (0..(1u32 << n))
        .map(|bits| (0..n).map(|j| if bits >> j & 1 == 0 { 1 } else { -1 }).collect())
        .collect()
}

fn is_tag_a(w: &Working, n2: &[i64]) -> bool {
    sign_vectors(n2.len()).iter().any(|mu| a_value(w, mu, n2).is_integer())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndexSets {
    pub i1: Vec<FlatFamilyLabel>,
    pub i2a: Vec<FlatFamilyLabel>,
    pub i2b: Vec<FlatFamilyLabel>,
}

impl IndexSets {
    pub fn i2(&self) -> impl Iterator<Item = &FlatFamilyLabel> {
        self.i2a.iter().chain(self.i2b.iter())
    }

    pub fn all(&self) -> impl Iterator<Item = &FlatFamilyLabel> {
        self.i1.iter().chain(self.i2())
    }

    pub fn len(&self) -> usize {
        self.i1.len() + self.i2a.len() + self.i2b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn index_sets(x: &SeifertData) -> IndexSets {
    index_sets_working(&x.working())
}

/// The I2 points: `l` in `{0,1}`, `n'` in `Z^n + l beta / 2`, `0 <= n' <= alpha / 2`.
pub fn i2_points(w: &Working) -> Vec<(u8, Vec<i64>)> {
    let mut out = Vec::new();
    for l in 0..2u8 {
        let choices: Vec<Vec<i64>> = w
            .fibers
            .iter()
            .map(|f| (0..=f.alpha).filter(|t| (t - l as i64 * f.beta).rem_euclid(2) == 0).collect())
            .collect();
        let bounds: Vec<i64> = choices.iter().map(|c| c.len() as i64).collect();
        for idx in product_ranges(&bounds) {
            out.push((l, idx.iter().zip(&choices).map(|(&i, c)| c[i as usize]).collect()));
        }
    }
    out
}

pub fn index_sets_working(w: &Working) -> IndexSets {
    let mut sets = IndexSets::default();
    if !w.e.is_zero() {
        let bounds: Vec<i64> = w.fibers.iter().map(|f| f.alpha).collect();
        let half = w.e.abs() / qi(2);
        for n in product_ranges(&bounds) {
            let t = n_over_alpha(w, &n);
            // 0 < z_st < 1 means m in (t - E/2, t) for E > 0 and (t, t + |E|/2) for E < 0
            let (lo, hi) = if w.e.is_positive() { (t - half, t) } else { (t, t + half) };
            let mut m = lo.floor().to_integer() as i64;
            while qi(m as i128) <= lo {
                m += 1;
            }
            while qi(m as i128) < hi {
                let kind = LabelKind::I1 { m, n: n.clone() };
                let qv = q_value_working(w, &kind).expect("valid label");
                sets.i1.push(FlatFamilyLabel { kind, q: qv });
                m += 1;
            }
        }
        sets.i1.sort();
    }
    for (l, n2) in i2_points(w) {
        let tag = if is_tag_a(w, &n2) { I2Tag::A } else { I2Tag::B };
        let kind = LabelKind::I2 { l, n2, tag };
        let qv = q_value_working(w, &kind).expect("valid label");
        let lab = FlatFamilyLabel { kind, q: qv };
        match tag {
            I2Tag::A => sets.i2a.push(lab),
            I2Tag::B => sets.i2b.push(lab),
        }
    }
    sets
}

/// Representations of Auckly's families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rep {
    /// `omega'(l, n')` or `nu'(l, n')`, `n'` doubled.
    OmegaNu { l: u8, n2: Vec<i64> },
    /// `rho(m, n)` or `sigma(m, n)`.
    RhoSigma { m: i64, n: Vec<i64> },
}

fn cross_caps(w: &Working) -> i64 {
    if w.a_eps == 1 {
        w.genus
    } else {
        0
    }
}

pub fn auckly_cs(x: &SeifertData, rep: &Rep) -> Result<RationalModZ> {
    auckly_cs_working(&x.working(), rep)
}

/// Chern-Simons value of a representation, in the working presentation.
pub fn auckly_cs_working(w: &Working, rep: &Rep) -> Result<RationalModZ> {
    let c = qi(cross_caps(w) as i128);
    match rep {
        Rep::OmegaNu { l, n2 } => {
            let eps = q(*l as i128, 2);
            let mut s = -eps * c - eps * eps * w.e;
            for (f, &t) in w.fibers.iter().zip(n2) {
                let nj = q(t as i128, 2) + eps * qi(f.beta as i128);
                s -= (qi(f.rho as i128) * nj * nj + qi(2) * nj * eps) / qi(f.alpha as i128);
            }
            Ok(RationalModZ::new(s))
        }
        Rep::RhoSigma { m, n } => {
            if w.e.is_zero() {
                return Err(Error::Domain("rho/sigma representations need E != 0".into()));
            }
            let u = qi(*m as i128) + c / qi(2);
            let v = u + n_over_alpha(w, n);
            let mut s = u * v / w.e;
            for (f, &nj) in w.fibers.iter().zip(n) {
                let nj = qi(nj as i128);
                s -= (qi(f.rho as i128) * nj * nj - nj / w.e * v) / qi(f.alpha as i128);
            }
            Ok(RationalModZ::new(s))
        }
    }
}

/// The representation matching a label, `m = -m' - c/2` for I1 points.
pub fn rep_of_label(w: &Working, kind: &LabelKind) -> Result<Rep> {
    match kind {
        LabelKind::I2 { l, n2, .. } => Ok(Rep::OmegaNu { l: *l, n2: n2.clone() }),
        LabelKind::I1 { m, n } => {
            let c = cross_caps(w);
            if c % 2 != 0 {
                return Err(Error::Unsupported("odd number of cross caps".into()));
            }
            Ok(Rep::RhoSigma { m: -m - c / 2, n: n.clone() })
        }
    }
}

/// `CS := -q`.
pub fn cs_of_label(label: &FlatFamilyLabel) -> RationalModZ {
    label.q.neg()
}

pub fn rep_exists(x: &SeifertData, kind: &LabelKind) -> bool {
    rep_exists_working(&x.working(), kind)
}

/// Whether an I2 point carries an SU(2) representation.
pub fn rep_exists_working(w: &Working, kind: &LabelKind) -> bool {
    let n2 = match kind {
        LabelKind::I1 { .. } => return true,
        LabelKind::I2 { n2, .. } => n2,
    };
    if w.a_eps == 1 || w.genus >= 1 {
        return true;
    }
    let angles: Vec<Q> =
        w.fibers.iter().zip(n2).map(|(f, &t)| q(t as i128, f.alpha as i128)).collect();
    // beta_0 = 0 in the working presentation, so the product must be the identity
    product_can_hit(&angles, &Q::zero())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsEntry {
    pub label: String,
    pub q: RationalModZ,
    pub cs: RationalModZ,
    pub rep_exists: bool,
}

pub fn cs_spectrum(x: &SeifertData) -> Vec<CsEntry> {
    let w = x.working();
    let sets = index_sets_working(&w);
    sets.all()
        .map(|lab| CsEntry {
            label: lab.to_string(),
            q: lab.q,
            cs: cs_of_label(lab),
            rep_exists: rep_exists_working(&w, &lab.kind),
        })
        .collect()
}

pub fn base_is_s2(x: &SeifertData) -> bool {
    x.base == Base::Orientable && x.genus == 0
}
