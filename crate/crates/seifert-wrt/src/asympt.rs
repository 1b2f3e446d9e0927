//! Large-r asymptotic expansions: polar Laurent polynomials, stationary-phase
//! coefficients, the E = 0 special term and prefactor assembly.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{expi2pi_q, prefactor_meta_working, rp2_f, PrefactorMeta};
use crate::hp::{dd, pi_q_dd, sincos_pi_dd, Cdd};
use crate::lseries::{sincos_pi_q, LaurentSeries as LS, Primitive, RCoeff};
use crate::moduli::{
    a_value, index_sets_working, sign_vectors, FlatFamilyLabel, I2Tag, IndexSets, LabelKind,
};
use crate::numtheory::{fmt_q, lcm_all, q, qi, sign_q, RationalModZ, Q};
use crate::par::*;
use crate::seifert::{SeifertData, Working};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    #[default]
    ExactPhase,
    Series,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarTerm {
    pub label: FlatFamilyLabel,
    pub b: C64,
    pub z0: RCoeff,
    pub z1: RCoeff,
}

impl PolarTerm {
    /// `b r (Z0 + Z1)` as a Laurent polynomial.
    pub fn contribution(&self) -> RCoeff {
        (&self.z0 + &self.z1).shift(1).scale(self.b)
    }
}

fn check_parity(w: &Working) -> Result<()> {
    if w.ag % 2 != 0 {
        return Err(Error::Unsupported(
            "asymptotics need a_eps g even; only (n;1|0) is special-cased".into(),
        ));
    }
    Ok(())
}

fn sym(x: &Q) -> f64 {
    if x.is_zero() {
        2.0
    } else {
        1.0
    }
}

/// `b_(l,n')`.
pub fn b_factor(w: &Working, l: u8, n2: &[i64]) -> C64 {
    let n = w.n() as i64;
    let sig: i64 = w.fibers.iter().map(|f| f.sigma).sum();
    let sign = if ((n + sig) * l as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mut den = 1.0;
    for (f, &t) in w.fibers.iter().zip(n2) {
        // n'/alpha in Z/2 iff alpha | 2n'
        if t.rem_euclid(f.alpha) == 0 {
            den *= 2.0;
        }
    }
    C64::new(2f64.powi(n as i32) * sign / den, 0.0)
}

fn order_for(w: &Working) -> i32 {
    w.k().max(0) as i32 + 2
}

fn prim(p: Primitive, ord: i32) -> LS {
    LS::primitive(&p, ord).expect("primitive with valid parameters")
}

fn exp_quadratic(w: &Working, ord: i32) -> LS {
    let c = Cdd::new(dd(0.0), pi_q_dd(&(w.e / qi(2))));
    prim(Primitive::ExpQuadratic(RCoeff::mono_dd(c, 1)), ord)
}

/// `Z0` of a label, a Laurent polynomial in `r`.
pub fn z0_label(w: &Working, n2: &[i64]) -> RCoeff {
    let k = w.k() as i32;
    let ord = order_for(w);
    let mut s = prim(Primitive::InvSinPow(k), ord).mul(&exp_quadratic(w, ord));
    s = s.mul(&prim(Primitive::CotRz, ord));
    for (f, &t) in w.fibers.iter().zip(n2) {
        let inv_al = q(1, f.alpha as i128);
        let (lam, kap) = sincos_pi_dd(&q((f.rho * t) as i128, f.alpha as i128));
        let c = RCoeff::mono_dd(Cdd::real(pi_q_dd(&q(t as i128, f.alpha as i128))), 1);
        let a = prim(Primitive::CosAffine { a: Q::zero(), b: inv_al }, ord)
            .mul(&prim(Primitive::SinLinear(c.clone()), ord))
            .scale_dd(Cdd::new(dd(0.0), lam));
        let b = prim(Primitive::SinAffine { a: Q::zero(), b: inv_al }, ord)
            .mul(&prim(Primitive::CosLinear(c), ord))
            .scale_dd(Cdd::real(kap));
        s = s.mul(&a.add(&b));
    }
    s.residue().expect("order covers the pole").scale_dd(Cdd::real(-pi_q_dd(&q(1, 2))))
}

fn sine_product(w: &Working, n2: &[i64], mu: &[i64], ord: i32) -> LS {
    let mut s = LS::one(ord);
    for ((f, &t), &m) in w.fibers.iter().zip(n2).zip(mu) {
        let a = q((f.rho * t) as i128, f.alpha as i128);
        let fac = prim(Primitive::SinAffine { a, b: q(-m as i128, f.alpha as i128) }, ord);
        s = s.mul(&fac.scale(C64::new(m as f64, 0.0)));
    }
    s
}

/// `Z1` of a label, a Laurent polynomial in `r`.
pub fn z1_label(w: &Working, n2: &[i64]) -> RCoeff {
    let n = w.n();
    let k = w.k() as i32;
    let ord = order_for(w);
    let base = prim(Primitive::InvSinPow(k), ord).mul(&exp_quadratic(w, ord));
    let mut total = RCoeff::zero();
    for mu in sign_vectors(n) {
        let a = a_value(w, &mu, n2);
        if a.is_zero() {
            continue;
        }
        let s = sign_q(&a) as f64;
        let aa = a.abs();
        let prod = base.mul(&sine_product(w, n2, &mu, ord));
        let top = aa.floor().to_integer() as i64;
        for m in 0..=top {
            let mq = qi(m as i128);
            let wt = s / (sym(&mq) * sym(&(mq - aa)));
            let c = Cdd::new(dd(0.0), pi_q_dd(&(qi(2 * sign_q(&a) as i128) * (mq - aa))));
            let lin = prim(Primitive::ExpLinear(RCoeff::mono_dd(c, 1)), ord);
            let res = prod.mul(&lin).residue().expect("order covers the pole");
            total = &total + &res.scale(C64::new(wt, 0.0));
        }
    }
    total.scale_dd(Cdd::new(dd(0.0), -pi_q_dd(&q(1, 1)) / (-2.0f64).powi(n as i32)))
}

/// The all-levels `E = 0` replacement of `Z1` at a concrete level.
pub fn z1_tilde(w: &Working, n2: &[i64], r: i64) -> C64 {
    let n = w.n();
    let k = w.k() as i32;
    let ord = order_for(w);
    let inv = prim(Primitive::InvSinPow(k), ord);
    let mut acc = C64::zero();
    let shift: Vec<Q> = sign_vectors(n)
        .iter()
        .map(|mu| {
            w.fibers.iter().zip(mu).fold(Q::zero(), |s, (f, &m)| s + q(m as i128, f.alpha as i128))
        })
        .collect();
    for (mu, sh) in sign_vectors(n).iter().zip(&shift) {
        let pmu: i64 = mu.iter().product();
        for mup in sign_vectors(n) {
            let a = a_value(w, &mup, n2) + *sh / qi(2 * r as i128);
            if a.is_zero() {
                continue;
            }
            let s = sign_q(&a);
            let aa = a.abs();
            let mut ph = Q::zero();
            for (((f, &t), &m), &mp) in w.fibers.iter().zip(n2).zip(mu).zip(&mup) {
                ph += q((m * mp * f.rho * t) as i128, 2 * f.alpha as i128);
            }
            let phase = expi2pi_q(&ph);
            for m in 0..=aa.floor().to_integer() as i64 {
                let mq = qi(m as i128);
                let wt = s as f64 / (sym(&mq) * sym(&(mq - aa)));
                let c = pi_q_dd(&(qi(2 * r as i128) * qi(s as i128) * (mq - aa)));
                let lin = prim(Primitive::ExpLinear(RCoeff::constant_dd(Cdd::new(dd(0.0), c))), ord);
                let res = inv.mul(&lin).residue().expect("order covers the pole").get(0);
                acc += phase * res * (pmu as f64 * wt);
            }
        }
    }
    acc * (-PI * I) * (I / 4.0).powi(n as i32)
}

pub fn polar_terms(x: &SeifertData) -> Result<Vec<PolarTerm>> {
    let w = x.working();
    check_parity(&w)?;
    Ok(polar_terms_working(&w, &index_sets_working(&w)))
}

/// One term per I2 label; empty when `n + a g - 2 <= 0`.
pub fn polar_terms_working(w: &Working, sets: &IndexSets) -> Vec<PolarTerm> {
    if w.k() <= 0 {
        return Vec::new();
    }
    let labels: Vec<&FlatFamilyLabel> = sets.i2().collect();
    labels
        .par_iter()
        .map(|lab| {
            let (l, n2) = match &lab.kind {
                LabelKind::I2 { l, n2, .. } => (*l, n2.clone()),
                LabelKind::I1 { .. } => unreachable!(),
            };
            PolarTerm {
                label: (*lab).clone(),
                b: b_factor(w, l, &n2),
                z0: z0_label(w, &n2),
                z1: z1_label(w, &n2),
            }
        })
        .collect()
}

/// `Z_polar(X; r)` from precomputed terms.
pub fn eval_polar(terms: &[PolarTerm], r: i64) -> C64 {
    crate::exact::comp_sum(terms.iter().map(|t| t.label.q.phase(r) * t.contribution().eval(r as f64)))
}

/// `Gamma(k + 1/2)`.
pub fn gamma_half(k: i64) -> f64 {
    let sp = PI.sqrt();
    if k >= 0 {
        (0..k).fold(sp, |g, j| g * (j as f64 + 0.5))
    } else {
        (k..0).fold(sp, |g, j| g / (j as f64 + 0.5))
    }
}

fn factorial(n: i64) -> f64 {
    (2..=n.max(0)).fold(1.0, |f, j| f * j as f64)
}

/// `k0`, `k1`, `k2` of the stationary-phase ladder.
pub fn ladder_start(w: &Working) -> (i64, i64, i64) {
    let n = w.n() as i64;
    let k0 = n.rem_euclid(2);
    let k1 = (k0 - n - w.ag + 2) / 2;
    (k0, k1, k1.min(0))
}

/// Coefficients `c_k` for one label, `k` from the ladder start to `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZintCoeffs {
    pub label: FlatFamilyLabel,
    pub coeffs: BTreeMap<i64, C64>,
}

pub fn zint_coeffs(x: &SeifertData, depth: i64) -> Result<Vec<ZintCoeffs>> {
    let w = x.working();
    check_parity(&w)?;
    if w.e.is_zero() {
        return Err(Error::Domain("stationary-phase coefficients need E != 0".into()));
    }
    Ok(zint_coeffs_working(&w, &index_sets_working(&w), depth))
}

pub fn zint_coeffs_working(w: &Working, sets: &IndexSets, depth: i64) -> Vec<ZintCoeffs> {
    let labels: Vec<&FlatFamilyLabel> = sets.i1.iter().chain(sets.i2a.iter()).collect();
    labels
        .par_iter()
        .map(|lab| {
            let coeffs = match &lab.kind {
                LabelKind::I1 { n, .. } => i1_coeffs(w, &lab.kind, n, depth),
                LabelKind::I2 { l, n2, .. } => i2a_coeffs(w, *l, n2, depth),
            };
            ZintCoeffs { label: (*lab).clone(), coeffs }
        })
        .collect()
}

fn i1_coeffs(w: &Working, kind: &LabelKind, n: &[i64], depth: i64) -> BTreeMap<i64, C64> {
    let m = match kind {
        LabelKind::I1 { m, .. } => *m,
        _ => unreachable!(),
    };
    let zst = crate::moduli::z_st_working(w, m, n).expect("E != 0");
    let k = w.k() as i32;
    let e = w.e_f64();
    let se = w.sign_e() as f64;
    let mut out = BTreeMap::new();
    if depth < 0 {
        return out;
    }
    let ord = 2 * depth as i32 + 1;
    let mut f = prim(Primitive::InvSinPowAt { k, z0: zst }, ord);
    for (fib, &nj) in w.fibers.iter().zip(n) {
        let x0 = (qi(2 * (fib.rho * nj) as i128) - zst) / qi(fib.alpha as i128);
        let fac = prim(Primitive::SinAffine { a: x0, b: q(-1, fib.alpha as i128) }, ord);
        f = f.mul(&fac);
    }
    let sgn_n = if w.n().is_multiple_of(2) { 1.0 } else { -1.0 };
    let pre = C64::from_polar(1.0, PI * se / 4.0) * sgn_n * (2.0 / e.abs()).sqrt();
    for kk in 0..=depth {
        let d = f.derivative_at(2 * kk as i32).expect("analytic at z_st");
        let c = pre * (I / (2.0 * PI * e)).powi(kk as i32) / factorial(kk) * d;
        out.insert(kk, c);
    }
    out
}

fn i2a_coeffs(w: &Working, l: u8, n2: &[i64], depth: i64) -> BTreeMap<i64, C64> {
    let (_, k1, _) = ladder_start(w);
    let kk = w.k();
    let n = w.n();
    let e = w.e_f64();
    let se = w.sign_e() as f64;
    let b = b_factor(w, l, n2);
    let mut out = BTreeMap::new();
    if depth < k1 {
        return out;
    }
    let kmax_prime = 2 * depth + kk;
    let ord = kmax_prime.max(0) as i32 + 1;
    let base = prim(Primitive::PiZOverSinPow(kk as i32), ord);
    let mut sum = LS::zero(ord);
    for mu in sign_vectors(n) {
        if !a_value(w, &mu, n2).is_integer() {
            continue;
        }
        let mut f = base.clone();
        for ((fib, &t), &m) in w.fibers.iter().zip(n2).zip(&mu) {
            let a = q((m * fib.rho * t) as i128, fib.alpha as i128);
            f = f.mul(&prim(Primitive::SinAffine { a, b: q(-1, fib.alpha as i128) }, ord));
        }
        sum = sum.add(&f);
    }
    let pre = b / ((-2.0f64).powi(n as i32) * PI.powi(kk as i32))
        * C64::from_polar(1.0, PI * se / 4.0)
        / (2.0 * PI * e.abs()).sqrt();
    for k in k1..=depth {
        let kp = 2 * k + kk;
        let d = sum.derivative_at(kp as i32).expect("analytic at 0");
        let c = pre * gamma_half(k) / factorial(kp) * (2.0 * I / (PI * e)).powi(k as i32) * d;
        out.insert(k, c);
    }
    out
}

/// `r0` of the special term.
pub fn r0_bound(w: &Working) -> i64 {
    if w.n() == 1 {
        return 2;
    }
    let inv: Q = w.fibers.iter().fold(Q::zero(), |s, f| s + q(1, f.alpha as i128));
    let l = lcm_all(w.fibers.iter().map(|f| f.alpha));
    let t = inv * qi(2 * l as i128);
    (t.ceil().to_integer() as i64 + 1).max(2)
}

/// Per-label constants of `Z_spec`; `Z_spec = sum e(r q) value`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecTerm {
    pub label: FlatFamilyLabel,
    pub value: C64,
}

pub fn zspec_term(x: &SeifertData) -> Result<(Vec<SpecTerm>, i64)> {
    let w = x.working();
    check_parity(&w)?;
    if !w.e.is_zero() {
        return Err(Error::Domain("the special term needs E = 0".into()));
    }
    Ok(zspec_working(&w, &index_sets_working(&w)))
}

pub fn zspec_working(w: &Working, sets: &IndexSets) -> (Vec<SpecTerm>, i64) {
    let n = w.n();
    let k = w.k() as i32;
    let ord = k.max(0) + 2;
    let inv = prim(Primitive::InvSinPow(k), ord);
    let mut out = Vec::new();
    for lab in &sets.i2a {
        let (l, n2) = match &lab.kind {
            LabelKind::I2 { l, n2, .. } => (*l, n2),
            _ => unreachable!(),
        };
        let mut inner = C64::zero();
        for mup in sign_vectors(n) {
            if !a_value(w, &mup, n2).is_integer() {
                continue;
            }
            for mu in sign_vectors(n) {
                let s: Q = w
                    .fibers
                    .iter()
                    .zip(&mu)
                    .fold(Q::zero(), |acc, (f, &m)| acc + q(m as i128, f.alpha as i128));
                if !s.is_negative() {
                    continue;
                }
                let pmu: i64 = mu.iter().product();
                let mut ph = Q::zero();
                for (((f, &t), &m), &mp) in w.fibers.iter().zip(n2).zip(&mu).zip(&mup) {
                    ph += q((m * mp * f.rho * t) as i128, 2 * f.alpha as i128);
                }
                let c = RCoeff::constant_dd(Cdd::real(pi_q_dd(&s)));
                let f = if n % 2 == 1 {
                    prim(Primitive::CosLinear(c), ord)
                } else {
                    prim(Primitive::SinLinear(c), ord).scale(-I)
                };
                let res = inv.mul(&f).residue().expect("order covers the pole").get(0);
                inner += expi2pi_q(&ph) * res * pmu as f64;
            }
        }
        let value = PI * I * (I / 4.0).powi(n as i32) * b_factor(w, l, n2) * inner;
        out.push(SpecTerm { label: lab.clone(), value });
    }
    (out, r0_bound(w))
}

/// Exponent bookkeeping: keys are `2 * lambda`.
pub type Ladder = BTreeMap<i32, C64>;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticExpansion {
    pub depth: i64,
    pub prefactor: PrefactorMeta,
    /// Branches of `Z(X;r)` keyed by `q`.
    pub z_branches: BTreeMap<RationalModZ, Ladder>,
    /// Exact polar Laurent polynomials per `q`, `Z`-level.
    pub polar: BTreeMap<RationalModZ, RCoeff>,
    /// Per-label stationary-phase data.
    pub labels: Vec<ZintCoeffs>,
    /// The expansion is an identity for `r >= valid_from`.
    pub exact_from: Option<i64>,
}

fn add_to(l: &mut Ladder, e2: i32, c: C64) {
    *l.entry(e2).or_insert(C64::zero()) += c;
}

impl AsymptoticExpansion {
    pub fn empty(prefactor: PrefactorMeta, depth: i64) -> Self {
        AsymptoticExpansion {
            depth,
            prefactor,
            z_branches: BTreeMap::new(),
            polar: BTreeMap::new(),
            labels: Vec::new(),
            exact_from: None,
        }
    }

    /// Drops branches whose coefficients are all negligible.
    pub fn to_minimal_form(mut self) -> Self {
        self.z_branches.retain(|_, l| l.values().any(|c| c.norm() >= MERGE_TOL));
        for l in self.z_branches.values_mut() {
            l.retain(|_, c| c.norm() > 0.0);
        }
        self.polar.retain(|_, p| p.max_abs() >= MERGE_TOL);
        self
    }

    pub fn q_keys(&self) -> Vec<RationalModZ> {
        self.z_branches.keys().copied().collect()
    }

    /// Branches of `tau_r` with the phase `e^{ic/r}` expanded to depth `N`.
    pub fn tau_branches(&self) -> BTreeMap<RationalModZ, Ladder> {
        let pm = &self.prefactor;
        let b = pm.b();
        let mut phase = Vec::new();
        let mut t = C64::new(1.0, 0.0);
        for m in 0..=self.depth.max(0) {
            phase.push(t);
            t = t * I * pm.phase_c / (m + 1) as f64;
        }
        let mut out = BTreeMap::new();
        for (qk, lad) in &self.z_branches {
            let mut l = Ladder::new();
            for (&e2, &c) in lad {
                for (m, p) in phase.iter().enumerate() {
                    add_to(&mut l, e2 + pm.power2 as i32 - 2 * m as i32, b * c * p);
                }
            }
            out.insert(*qk, l);
        }
        out
    }

    /// Leading `tau`-level coefficient per branch: `(2 lambda, c)`.
    pub fn leading(&self) -> BTreeMap<RationalModZ, (i32, C64)> {
        let mut out = BTreeMap::new();
        for (qk, lad) in self.tau_branches() {
            if let Some((&e2, &c)) = lad.iter().rev().find(|(_, c)| c.norm() >= MERGE_TOL) {
                out.insert(qk, (e2, c));
            }
        }
        out
    }

    /// `Z`-level sum at a concrete level.
    pub fn eval_z(&self, r: i64) -> C64 {
        let rf = r as f64;
        crate::exact::comp_sum(self.z_branches.iter().map(|(qk, lad)| {
            let s: C64 = lad.iter().map(|(&e2, &c)| c * rf.powf(e2 as f64 / 2.0)).sum();
            qk.phase(r) * s
        }))
    }

    pub fn evaluate(&self, r: i64, mode: EvalMode) -> C64 {
        match mode {
            EvalMode::ExactPhase => self.prefactor.eval(r as f64) * self.eval_z(r),
            EvalMode::Series => {
                let rf = r as f64;
                crate::exact::comp_sum(self.tau_branches().iter().map(|(qk, lad)| {
                    let s: C64 = lad.iter().map(|(&e2, &c)| c * rf.powf(e2 as f64 / 2.0)).sum();
                    qk.phase(r) * s
                }))
            }
        }
    }

    /// Exponent of the first omitted stationary-phase term, at `tau` level.
    pub fn truncation_exponent(&self) -> f64 {
        self.prefactor.power() + 0.5 - (self.depth + 1) as f64
    }

    pub fn to_json(&self) -> ExpansionJson {
        let branches = self
            .tau_branches()
            .into_iter()
            .map(|(qk, lad)| BranchJson {
                q: qk.to_string(),
                terms: lad
                    .iter()
                    .rev()
                    .filter(|(_, c)| c.norm() > 0.0)
                    .map(|(&e2, c)| TermJson { exponent: fmt_q(&q(e2 as i128, 2)), re: c.re, im: c.im })
                    .collect(),
            })
            .collect();
        let polar = self
            .polar
            .iter()
            .map(|(qk, p)| PolarJson {
                q: qk.to_string(),
                terms: p.terms().map(|(e, c)| PolarTermJson { exponent: e, re: c.re, im: c.im }).collect(),
            })
            .collect();
        ExpansionJson {
            depth: self.depth,
            prefactor: PrefactorJson {
                power: fmt_q(&q(self.prefactor.power2 as i128, 2)),
                phase_c: self.prefactor.phase_c,
                b_re: self.prefactor.b_re,
                b_im: self.prefactor.b_im,
            },
            branches,
            polar,
            exact_from: self.exact_from,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TermJson {
    pub exponent: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchJson {
    pub q: String,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefactorJson {
    pub power: String,
    pub phase_c: f64,
    pub b_re: f64,
    pub b_im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarTermJson {
    pub exponent: i32,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarJson {
    pub q: String,
    pub terms: Vec<PolarTermJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionJson {
    pub depth: i64,
    pub prefactor: PrefactorJson,
    pub branches: Vec<BranchJson>,
    pub polar: Vec<PolarJson>,
    pub exact_from: Option<i64>,
}

/// `tan(x/2)/2 = sum_j t_j x^{2j-1}`, the odd coefficients of `f(x)`.
fn half_tan_half_coeffs(depth: usize) -> Vec<f64> {
    let ord = 2 * depth as i32 + 2;
    let c = RCoeff::real(0.5);
    let s = prim(Primitive::SinLinear(c.clone()), ord);
    let co = prim(Primitive::CosLinear(c), ord);
    let t = s.mul(&co.invert().expect("cos(0) = 1"));
    (0..=depth).map(|j| t.coeff(2 * j as i32 + 1).get(0).re * 0.5).collect()
}

fn rp2_expansion(x: &SeifertData, depth: i64) -> AsymptoticExpansion {
    let w = x.working();
    let mut exp = AsymptoticExpansion::empty(prefactor_meta_working(&w), depth);
    // Z = -f(pi/r)(1 + e^{i pi r}), f(x) = tan(x/2)/2
    let coeffs = half_tan_half_coeffs(depth.max(0) as usize + 1);
    let mut lad = Ladder::new();
    for (j, t) in coeffs.iter().enumerate() {
        let e = 2 * j as i32 + 1;
        add_to(&mut lad, -2 * e, C64::new(-t * PI.powi(e), 0.0));
    }
    exp.z_branches.insert(RationalModZ::zero(), lad.clone());
    exp.z_branches.insert(RationalModZ::new(q(1, 2)), lad);
    exp
}

pub fn full_expansion(x: &SeifertData, depth: i64) -> Result<AsymptoticExpansion> {
    if x.classify_special().is_rp2_closed_form {
        return Ok(rp2_expansion(x, depth));
    }
    let w = x.working();
    check_parity(&w)?;
    let sets = index_sets_working(&w);
    let mut exp = AsymptoticExpansion::empty(prefactor_meta_working(&w), depth);
    for t in polar_terms_working(&w, &sets) {
        let c = t.contribution();
        let e = exp.polar.entry(t.label.q).or_insert_with(RCoeff::zero);
        *e = &*e + &c;
    }
    for (qk, p) in &exp.polar {
        let lad = exp.z_branches.entry(*qk).or_default();
        for (e, c) in p.terms() {
            add_to(lad, 2 * e, c);
        }
    }
    if w.e.is_zero() {
        let inv: Q = w.fibers.iter().fold(Q::zero(), |s, f| s + q(1, f.alpha as i128));
        if w.k() <= 0 {
            // S^2 x S^1: Z = 1 up to the prefactor, which is 1
            let lad = exp.z_branches.entry(RationalModZ::zero()).or_default();
            add_to(lad, 0, C64::new(1.0, 0.0));
            exp.exact_from = Some(2);
        } else if inv < qi(w.k() as i128) {
            exp.exact_from = Some(2);
        } else {
            let (spec, r0) = zspec_working(&w, &sets);
            for s in spec {
                add_to(exp.z_branches.entry(s.label.q).or_default(), 2, s.value);
            }
            exp.exact_from = Some(r0);
        }
    } else {
        let labels = zint_coeffs_working(&w, &sets, depth);
        for zc in &labels {
            let lad = exp.z_branches.entry(zc.label.q).or_default();
            for (&k, &c) in &zc.coeffs {
                add_to(lad, 1 - 2 * k as i32, c);
            }
        }
        exp.labels = labels;
    }
    Ok(exp.to_minimal_form())
}

pub fn evaluate(exp: &AsymptoticExpansion, r: i64, mode: EvalMode) -> Result<C64> {
    if r < 2 {
        return Err(Error::Domain(format!("level r must be >= 2, got {r}")));
    }
    Ok(exp.evaluate(r, mode))
}

/// `Z1` for three fibers over the sphere, from the closed combinatorial formula.
pub fn z1_n3_closed(x: &SeifertData, kind: &LabelKind) -> Result<C64> {
    let w = x.working();
    z1_n3_closed_working(&w, kind)
}

pub fn z1_n3_closed_working(w: &Working, kind: &LabelKind) -> Result<C64> {
    if w.n() != 3 || w.ag != 0 {
        return Err(Error::Domain("closed Z1 formula needs n = 3 and genus 0".into()));
    }
    let n2 = match kind {
        LabelKind::I2 { n2, .. } => n2,
        LabelKind::I1 { .. } => return Err(Error::Domain("closed Z1 formula is for I2 labels".into())),
    };
    let mut prod = 1.0;
    for (f, &t) in w.fibers.iter().zip(n2) {
        prod *= sincos_pi_q(&q((f.rho * t) as i128, f.alpha as i128)).0;
    }
    let mut sum = 0.0;
    for mu in sign_vectors(3) {
        let a = a_value(w, &mu, n2);
        if !a.is_positive() {
            continue;
        }
        let pm: i64 = mu.iter().product();
        for m in 0..=a.floor().to_integer() as i64 {
            let mq = qi(m as i128);
            sum += pm as f64 / (sym(&mq) * sym(&(mq - a)));
        }
    }
    Ok(I / 4.0 * prod * sum)
}

/// `-(i/8) prod sin(2 pi rho_j n'_j / alpha_j)`.
pub fn z1_n3_ia(w: &Working, n2: &[i64]) -> C64 {
    let mut prod = 1.0;
    for (f, &t) in w.fibers.iter().zip(n2) {
        prod *= sincos_pi_q(&q((f.rho * t) as i128, f.alpha as i128)).0;
    }
    -I / 8.0 * prod
}

/// `Z1` magnitudes at the non-realizable I2b points.
#[derive(Clone, Debug, Serialize)]
pub struct VanishEntry {
    pub label: String,
    pub q: RationalModZ,
    pub max_abs_z1: f64,
    pub max_abs_z0: f64,
}

pub fn vanish_scan(x: &SeifertData) -> Result<Vec<VanishEntry>> {
    let w = x.working();
    check_parity(&w)?;
    let sets = index_sets_working(&w);
    let terms = polar_terms_working(&w, &sets);
    Ok(terms
        .iter()
        .filter(|t| {
            t.label.kind.tag() == Some(I2Tag::B)
                && !crate::moduli::rep_exists_working(&w, &t.label.kind)
        })
        .map(|t| VanishEntry {
            label: t.label.to_string(),
            q: t.label.q,
            max_abs_z1: t.z1.max_abs(),
            max_abs_z0: t.z0.max_abs(),
        })
        .collect())
}

/// `(n;1|0)` value from the closed form, for the special-cased path.
pub fn rp2_z(r: i64) -> C64 {
    let e = if r % 2 == 0 { 1.0 } else { -1.0 };
    C64::new(-rp2_f(PI / r as f64) * (1.0 + e), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{tau, z_sum};
    use crate::seifert::parse;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn e0_exact_cases() {
        for s in ["o;2|-1;(2,1),(2,1)", "o;2|-1;(3,1),(3,2)", "o;2|0", "o;3|0"] {
            let x = parse(s).unwrap();
            let exp = full_expansion(&x, 0).unwrap();
            for r in 3..=20 {
                let a = tau(&x, r).unwrap();
                let b = exp.evaluate(r, EvalMode::ExactPhase);
                assert!(close(a, b, 1e-9), "{s} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn e0_special_cases() {
        for s in [
            "o;0|-1;(2,1),(3,1),(6,1)",
            "o;0|-1;(3,1),(3,1),(3,1)",
            "o;1|0",
            "o;0|-1;(2,1),(4,1),(4,1)",
            "o;0|-2;(2,1),(2,1),(2,1),(2,1)",
        ] {
            let x = parse(s).unwrap();
            let exp = full_expansion(&x, 0).unwrap();
            let r0 = exp.exact_from.unwrap();
            for r in r0..r0 + 12 {
                let a = z_sum(&x, r).unwrap();
                let b = exp.eval_z(r);
                assert!(close(a, b, 1e-9), "{s} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn tilde_z1_all_levels() {
        let x = parse("o;0|-1;(2,1),(3,1),(6,1)").unwrap();
        let w = x.working();
        let sets = index_sets_working(&w);
        for r in 3..12 {
            let mut tot = C64::zero();
            for lab in sets.i2() {
                if let LabelKind::I2 { l, n2, .. } = &lab.kind {
                    let z = z0_label(&w, n2).eval(r as f64) + z1_tilde(&w, n2, r);
                    tot += b_factor(&w, *l, n2) * lab.q.phase(r) * z * r as f64;
                }
            }
            let ex = z_sum(&x, r).unwrap();
            assert!(close(tot, ex, 1e-9), "r={r}: {tot} vs {ex}");
        }
    }

    #[test]
    fn s1_special_term() {
        let (spec, r0) = zspec_term(&parse("o;1|0").unwrap()).unwrap();
        assert_eq!(r0, 2);
        let total: C64 = spec.iter().map(|s| s.value).sum();
        assert!(close(total, C64::new(1.0, 0.0), 1e-12), "{total}");
        let pt = polar_terms(&parse("o;1|0").unwrap()).unwrap();
        assert!(close(eval_polar(&pt, 7), C64::new(-1.0, 0.0), 1e-12));
    }

    #[test]
    fn m1_labels_and_closed_z1() {
        let x = parse("o;0|-1;(2,1),(3,1),(7,1)").unwrap();
        let w = x.working();
        let pts = polar_terms(&x).unwrap();
        for t in &pts {
            assert!(t.z0.is_zero() || t.z0.max_abs() < 1e-12);
            let c = z1_n3_closed(&x, &t.label.kind).unwrap();
            assert!((t.z1.get(0) - c).norm() < 1e-10, "{}: {} vs {c}", t.label, t.z1);
            assert!(t.z1.terms().all(|(p, _)| p == 0));
        }
        let exp = full_expansion(&x, 1).unwrap();
        let keys: Vec<String> = exp.q_keys().iter().map(|k| k.to_string()).collect();
        assert_eq!(keys, vec!["0", "25/168", "121/168"]);
        let _ = w;
    }

    #[test]
    fn trivial_branch_leading_term() {
        let x = parse("o;0|-1;(2,1),(3,1),(7,1)").unwrap();
        let exp = full_expansion(&x, 1).unwrap();
        let (e2, c) = exp.leading()[&RationalModZ::zero()];
        assert_eq!(e2, -3);
        let ea = 1.0; // |E| A = 1
        let want = PI / ea * (2.0 / ea).sqrt();
        assert!((c - C64::new(want, 0.0)).norm() < 1e-10, "{c}");
    }

    #[test]
    fn s3_expansion() {
        let x = parse("o;0|-1").unwrap();
        let exp = full_expansion(&x, 3).unwrap();
        for r in [50i64, 100, 200] {
            let a = tau(&x, r).unwrap();
            let b = exp.evaluate(r, EvalMode::ExactPhase);
            assert!((a - b).norm() < 100.0 * (r as f64).powf(-4.5), "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn rp2_branches() {
        let x = parse("n;1|0").unwrap();
        let exp = full_expansion(&x, 2).unwrap();
        assert_eq!(exp.q_keys().len(), 2);
        let lead = exp.leading();
        assert!(lead.values().all(|(e2, _)| *e2 == -3));
        for r in [40i64, 41] {
            let a = tau(&x, r).unwrap();
            let b = exp.evaluate(r, EvalMode::ExactPhase);
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_half(0) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(1) - PI.sqrt() / 2.0).abs() < 1e-15);
        assert!((gamma_half(-1) + 2.0 * PI.sqrt()).abs() < 1e-14);
    }
}
