//! Finite-sum evaluation of `Z(X;r)` and `tau_r(X)`, and closed-form oracles.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{dd, dd_int, dd_powi, dd_ratio, dd_recip, expi2pi_dd, expi2pi_q_dd, sin_pi_dd, Cdd};
use crate::numtheory::{dedekind_symbol, q, q_to_f64, rademacher_phi, Q, SL2Z};
use crate::par::*;
use crate::seifert::{Fiber, SeifertData, Working};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum HMode {
    Direct,
    #[default]
    Factored,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvariantValue {
    pub r: i64,
    pub re: f64,
    pub im: f64,
}

impl InvariantValue {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// `exp(2 pi i n / d)` with the integer reduction done first.
pub fn expi2pi_frac(n: i128, d: i128) -> C64 {
    let m = n.rem_euclid(d);
    let t = if 2 * m >= d { m - d } else { m };
    let ang = 2.0 * PI * (t as f64 / d as f64);
    let (s, c) = ang.sin_cos();
    C64::new(c, s)
}

/// `exp(2 pi i t)` for exact rational `t`.
pub fn expi2pi_q(t: &Q) -> C64 {
    expi2pi_frac(*t.numer(), *t.denom())
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = *acc;
    let t = s + x;
    let corr = if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
    *acc = (t, c + corr);
}

impl CompSum {
    pub fn add(&mut self, z: C64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> C64 {
        C64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Ordered compensated sum.
pub fn comp_sum<I: IntoIterator<Item = C64>>(it: I) -> C64 {
    let mut s = CompSum::default();
    for z in it {
        s.add(z);
    }
    s.value()
}

/// Direct `h(gamma)`: the `2^n * A`-term sum.
pub fn h_direct(w: &Working, r: i64, gamma: i64) -> C64 {
    h_direct_dd(w, r, gamma).to_c64()
}

fn h_direct_dd(w: &Working, r: i64, gamma: i64) -> Cdd {
    let n = w.n();
    let amul = w.amul as i128;
    let r128 = r as i128;
    let d = 4 * r128 * amul;
    let hint = w.h_int();
    let g = gamma as i128;
    let base = hint * g * g;
    let alphas: Vec<i128> = w.fibers.iter().map(|f| f.alpha as i128).collect();
    let rhos: Vec<i128> = w.fibers.iter().map(|f| f.rho as i128).collect();
    let mut acc = Cdd::ZERO;
    let total: i128 = alphas.iter().product();
    for mu_bits in 0..(1u32 << n) {
        let mu: Vec<i128> = (0..n).map(|j| if mu_bits >> j & 1 == 0 { 1 } else { -1 }).collect();
        let sgn: i128 = mu.iter().product();
        for idx in 0..total {
            let mut rem = idx;
            let mut num = base;
            for j in 0..n {
                let nj = rem % alphas[j];
                rem /= alphas[j];
                let c = amul / alphas[j];
                num += 4 * r128 * c * rhos[j] * (r128 * nj * nj + mu[j] * nj);
                num -= 2 * c * g * (2 * r128 * nj + mu[j]);
            }
            let e = expi2pi_dd(num, d);
            acc += if sgn > 0 { e } else { -e };
        }
    }
    acc
}

/// `M_i = [[-beta, -sigma], [alpha, rho]]`.
pub fn m_matrix(alpha: i64, beta: i64, rho: i64, sigma: i64) -> SL2Z {
    SL2Z::new(-beta, -sigma, alpha, rho).expect("alpha sigma - beta rho = 1")
}

/// `(M~)_{gamma,1}` of the unitary PSL(2,Z) representation.
pub fn m_tilde_gamma1(alpha: i64, beta: i64, rho: i64, sigma: i64, r: i64, gamma: i64) -> C64 {
    m_tilde_dd(alpha, beta, rho, sigma, r, gamma).to_c64()
}

fn m_tilde_dd(alpha: i64, beta: i64, rho: i64, sigma: i64, r: i64, gamma: i64) -> Cdd {
    FiberCtx::new(&Fiber { alpha, beta, rho, sigma }, r).m_tilde(gamma)
}

/// `exp(2 pi i j / d)` for all `j`, as a product of a coarse and a fine table.
struct RootTable {
    d: i128,
    step: i128,
    coarse: Vec<Cdd>,
    fine: Vec<Cdd>,
}

impl RootTable {
    fn new(d: i128) -> Self {
        let step = ((d as f64).sqrt().ceil() as i128).max(1);
        let fine = (0..step).map(|j| expi2pi_dd(j, d)).collect();
        let coarse = (0..d.div_euclid(step) + 1).map(|j| expi2pi_dd(j * step, d)).collect();
        RootTable { d, step, coarse, fine }
    }

    fn get(&self, n: i128) -> Cdd {
        let m = n.rem_euclid(self.d);
        self.coarse[(m / self.step) as usize] * self.fine[(m % self.step) as usize]
    }
}

/// The `gamma`-independent part of `(M~)_{gamma,1}` at one level.
struct FiberCtx {
    beta: i128,
    rho: i128,
    alpha: i128,
    r: i128,
    pre: Cdd,
    roots: RootTable,
}

impl FiberCtx {
    fn new(f: &Fiber, r: i64) -> Self {
        let phi = rademacher_phi(&m_matrix(f.alpha, f.beta, f.rho, f.sigma));
        let (a, r128) = (f.alpha as i128, r as i128);
        let norm = dd_int(2 * r128 * a).sqrt();
        let pre = (Cdd::i_pow(1) * expi2pi_q_dd(&(-phi / Q::from_integer(8)))).scale(dd_recip(norm));
        FiberCtx { beta: f.beta as i128, rho: f.rho as i128, alpha: a, r: r128, pre, roots: RootTable::new(4 * r128 * a) }
    }

    fn sum(&self, gamma: i64) -> Cdd {
        let g = gamma as i128;
        let mut acc = Cdd::ZERO;
        for mu in [1i128, -1] {
            for m in 0..self.alpha {
                let t = 2 * self.r * m + mu;
                let e = self.roots.get(-self.beta * g * g - 2 * g * t + self.rho * t * t);
                acc += if mu > 0 { e } else { -e };
            }
        }
        acc
    }

    fn m_tilde(&self, gamma: i64) -> Cdd {
        self.pre * self.sum(gamma)
    }
}

/// Factored `h(gamma) = kappa * prod (M~_i)_{gamma,1}`.
pub fn h_factored(w: &Working, r: i64, gamma: i64) -> C64 {
    HCtx::new(w, r).eval(gamma).to_c64()
}

/// Level data for repeated factored evaluation of `h`.
struct HCtx {
    fibers: Vec<FiberCtx>,
    /// `kappa` times the fiber constants.
    scale: Cdd,
}

impl HCtx {
    fn new(w: &Working, r: i64) -> Self {
        let n = w.n() as i64;
        let fibers: Vec<FiberCtx> = w.fibers.iter().map(|f| FiberCtx::new(f, r)).collect();
        let mut phi_sum = Q::zero();
        let mut rho_over_alpha = Q::zero();
        for f in &w.fibers {
            phi_sum += rademacher_phi(&m_matrix(f.alpha, f.beta, f.rho, f.sigma));
            rho_over_alpha += q(f.rho as i128, f.alpha as i128);
        }
        // sqrt(A) (2r)^{n/2}
        let mut mag = dd_int(w.amul as i128).sqrt() * dd_int(2 * r as i128).powi((n / 2) as i32);
        if n % 2 == 1 {
            mag *= dd_int(2 * r as i128).sqrt();
        }
        let kappa = (Cdd::i_pow(-n)
            * expi2pi_q_dd(&(phi_sum / Q::from_integer(8)))
            * expi2pi_q_dd(&(-rho_over_alpha / Q::from_integer(4 * r as i128))))
        .scale(mag);
        let scale = fibers.iter().fold(kappa, |acc, f| acc * f.pre);
        HCtx { fibers, scale }
    }

    fn eval(&self, gamma: i64) -> Cdd {
        self.fibers.iter().fold(self.scale, |acc, f| acc * f.sum(gamma))
    }
}

pub fn h_eval(x: &SeifertData, r: i64, gamma: i64, mode: HMode) -> C64 {
    let w = x.working();
    h_eval_working(&w, r, gamma, mode)
}

pub fn h_eval_working(w: &Working, r: i64, gamma: i64, mode: HMode) -> C64 {
    match mode {
        HMode::Direct => h_direct(w, r, gamma),
        HMode::Factored => h_factored(w, r, gamma),
    }
}

fn check_level(r: i64) -> Result<()> {
    if r < 2 {
        return Err(Error::Domain(format!("level r must be >= 2, got {r}")));
    }
    Ok(())
}

/// `Z(X;r)` in the default (factored) mode.
pub fn z_sum(x: &SeifertData, r: i64) -> Result<C64> {
    z_sum_mode(x, r, HMode::Factored)
}

pub fn z_sum_mode(x: &SeifertData, r: i64, mode: HMode) -> Result<C64> {
    check_level(r)?;
    Ok(z_sum_working(&x.working(), r, mode))
}

pub fn z_sum_working(w: &Working, r: i64, mode: HMode) -> C64 {
    z_sum_dd(w, r, mode).to_c64()
}

fn z_sum_dd(w: &Working, r: i64, mode: HMode) -> Cdd {
    let k = w.k() as i32;
    let ag = w.ag;
    let ctx = match mode {
        HMode::Factored => Some(HCtx::new(w, r)),
        HMode::Direct => None,
    };
    let terms: Vec<Cdd> = (1..r)
        .into_par_iter()
        .map(|g| {
            let s = sin_pi_dd(g as i128, r as i128);
            let sgn = if (g * ag) % 2 == 0 { 1.0 } else { -1.0 };
            let h = match &ctx {
                Some(c) => c.eval(g),
                None => h_direct_dd(w, r, g),
            };
            h.scale(dd_powi(s, -k) * sgn)
        })
        .collect();
    let total: Cdd = terms.into_iter().sum();
    total * Cdd::new(dd(0.0), dd(0.5)).powi_n(w.n())
}

/// Constants with `tau_r = b r^{power} exp(i c / r) Z(X;r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrefactorMeta {
    pub b_re: f64,
    pub b_im: f64,
    /// Exponent of `r`, i.e. `a g / 2 - 1`, stored doubled.
    pub power2: i64,
    pub phase_c: f64,
}

impl PrefactorMeta {
    pub fn b(&self) -> C64 {
        C64::new(self.b_re, self.b_im)
    }

    pub fn power(&self) -> f64 {
        self.power2 as f64 / 2.0
    }

    pub fn eval(&self, r: f64) -> C64 {
        self.b() * r.powf(self.power()) * C64::from_polar(1.0, self.phase_c / r)
    }
}

pub fn prefactor_meta(x: &SeifertData) -> PrefactorMeta {
    let w = x.working();
    prefactor_meta_working(&w)
}

pub fn prefactor_meta_working(w: &Working) -> PrefactorMeta {
    let a = w.a_eps;
    let ag = w.ag;
    let se = w.sign_e() as f64;
    let mut s_sum = Q::zero();
    for f in &w.fibers {
        s_sum += dedekind_symbol(f.beta, f.alpha).expect("coprime pair");
    }
    let sign = if ag % 2 == 0 { 1.0 } else { -1.0 };
    let mag = sign * 2f64.powf(1.0 - ag as f64 / 2.0) / (w.amul as f64).sqrt();
    let b = C64::from_polar(1.0, 0.75 * PI * (1 - a) as f64 * se) * mag;
    let c = PI / 2.0 * (3.0 * (a - 1) as f64 * se - w.e_f64() - q_to_f64(&s_sum));
    PrefactorMeta { b_re: b.re, b_im: b.im, power2: ag - 2, phase_c: c }
}

/// The prefactor at a level, with every phase reduced exactly.
fn prefactor_dd(w: &Working, r: i64) -> Cdd {
    let a = w.a_eps;
    let ag = w.ag;
    let se = w.sign_e() as i128;
    let mut s_sum = Q::zero();
    for f in &w.fibers {
        s_sum += dedekind_symbol(f.beta, f.alpha).expect("coprime pair");
    }
    // 2^{1 - ag/2} r^{ag/2 - 1} / sqrt(A) = (r/2)^{(ag-2)/2} / sqrt(A)
    let half = dd_ratio(r as i128, 2);
    let p2 = ag - 2;
    let mut mag = dd_powi(half, p2.div_euclid(2) as i32) * dd_recip(dd_int(w.amul as i128).sqrt());
    if p2.rem_euclid(2) == 1 {
        mag *= half.sqrt();
    }
    if ag % 2 != 0 {
        mag = -mag;
    }
    let c = Q::from_integer(3 * (a as i128 - 1) * se) - w.e - s_sum;
    let ph = Q::new(3 * (1 - a as i128) * se, 8) + c / Q::from_integer(4 * r as i128);
    expi2pi_q_dd(&ph).scale(mag)
}

pub fn prefactor(x: &SeifertData, r: i64) -> C64 {
    prefactor_meta(x).eval(r as f64)
}

/// `tau_r(X)`.
pub fn tau(x: &SeifertData, r: i64) -> Result<C64> {
    tau_mode(x, r, HMode::Factored)
}

pub fn tau_mode(x: &SeifertData, r: i64, mode: HMode) -> Result<C64> {
    check_level(r)?;
    let w = x.working();
    Ok((prefactor_dd(&w, r) * z_sum_dd(&w, r, mode)).to_c64())
}

pub fn tau_range(x: &SeifertData, rs: &[i64]) -> Result<Vec<InvariantValue>> {
    for &r in rs {
        check_level(r)?;
    }
    let w = x.working();
    Ok(rs
        .iter()
        .map(|&r| {
            let v = (prefactor_dd(&w, r) * z_sum_dd(&w, r, HMode::Factored)).to_c64();
            InvariantValue { r, re: v.re, im: v.im }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedForm {
    /// `L(p,q)`; `p = 1` is the three-sphere.
    Lens { p: i64, q: i64 },
    /// The fibration `(n;1|0)`.
    Rp2,
}

/// `f(x) = sin x / (2 (1 + cos x))`.
pub fn rp2_f(x: f64) -> f64 {
    x.sin() / (2.0 * (1.0 + x.cos()))
}

/// `Z((n;1|0); r) = -f(pi/r) (1 + e^{pi i r})`.
pub fn rp2_z_closed(r: i64) -> C64 {
    let e = if r % 2 == 0 { 1.0 } else { -1.0 };
    C64::new(-rp2_f(PI / r as f64) * (1.0 + e), 0.0)
}

pub fn tau_closed(kind: ClosedForm, r: i64) -> Result<C64> {
    check_level(r)?;
    match kind {
        ClosedForm::Rp2 => {
            // the prefactor for a g = 1 is -sqrt(2/r)
            let z = rp2_z_closed(r);
            Ok(z * -(2.0 / r as f64).sqrt())
        }
        ClosedForm::Lens { p, q: qq } => lens_tau(p, qq, r),
    }
}

fn lens_tau(p: i64, qq: i64, r: i64) -> Result<C64> {
    if p <= 0 {
        return Err(Error::Domain(format!("lens space needs p > 0, got {p}")));
    }
    let rf = r as f64;
    if p == 1 {
        return Ok(C64::new((2.0 / rf).sqrt() * (PI / rf).sin(), 0.0));
    }
    if !(qq.abs() > 0 && qq.abs() < p) {
        return Err(Error::Domain(format!("lens space needs p > |q| > 0, got ({p},{qq})")));
    }
    if p.gcd(&qq) != 1 {
        return Err(Error::Domain(format!("({p},{qq}) not coprime")));
    }
    let (_, x, _) = crate::numtheory::ext_gcd(qq as i128, p as i128)?;
    let qs = x.rem_euclid(p as i128) as i64;
    let s = dedekind_symbol(qq, p)?;
    let pf = p as f64;
    let (sa, ca) = (PI / (pf * rf)).sin_cos();
    let mut acc = CompSum::default();
    for n in 0..p {
        let (s1, c1) = crate::lseries::sincos_pi_q(&q(2 * (qs * n) as i128, p as i128));
        let (s2, c2) = crate::lseries::sincos_pi_q(&q(2 * n as i128, p as i128));
        let c = C64::new(sa * c1 * c2, ca * s1 * s2);
        let ph = expi2pi_frac((r as i128) * (qs as i128) * (n as i128) * (n as i128), p as i128);
        acc.add(c * ph);
    }
    let pre = (2.0 / (pf * rf)).sqrt() * C64::from_polar(1.0, PI * q_to_f64(&s) / (2.0 * rf));
    Ok(pre * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seifert::parse;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn s2xs1_and_t3() {
        for r in 3..12 {
            let t = tau(&parse("o;0|0").unwrap(), r).unwrap();
            assert!(close(t, C64::new(1.0, 0.0), 1e-12), "r={r} {t}");
            let z = z_sum(&parse("o;1|0").unwrap(), r).unwrap();
            assert!(close(z, C64::new((r - 1) as f64, 0.0), 1e-12));
        }
        let z = z_sum(&parse("o;2|0").unwrap(), 5).unwrap();
        assert!(close(z, C64::new(8.0, 0.0), 1e-12));
    }

    #[test]
    fn modes_agree() {
        let x = parse("o;0|-1;(2,1),(3,1),(7,1)").unwrap();
        let w = x.working();
        for g in 0..14 {
            let a = h_direct(&w, 7, g);
            let b = h_factored(&w, 7, g);
            assert!(close(a, b, 1e-11), "gamma={g}: {a} vs {b}");
        }
    }

    #[test]
    fn three_sphere() {
        let s3 = parse("o;0|-1").unwrap();
        for r in [3, 5, 9] {
            let a = tau(&s3, r).unwrap();
            let b = tau_closed(ClosedForm::Lens { p: 1, q: 0 }, r).unwrap();
            assert!(close(a, b, 1e-12));
        }
        let t3 = tau_closed(ClosedForm::Lens { p: 1, q: 0 }, 3).unwrap();
        assert!((t3.re - 1.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rp3_connected_sum() {
        // (n;1|0) is RP^3 # RP^3
        let x = parse("n;1|0").unwrap();
        for r in 3..30 {
            let l = tau_closed(ClosedForm::Lens { p: 2, q: 1 }, r).unwrap();
            let s = tau_closed(ClosedForm::Lens { p: 1, q: 0 }, r).unwrap();
            assert!(close(tau(&x, r).unwrap(), l * l / s, 1e-13), "r={r}");
        }
    }

    #[test]
    fn rp2_matches_engine() {
        let x = parse("n;1|0").unwrap();
        for r in 3..20 {
            let a = tau(&x, r).unwrap();
            let b = tau_closed(ClosedForm::Rp2, r).unwrap();
            assert!(close(a, b, 1e-12));
            assert!(close(z_sum(&x, r).unwrap(), rp2_z_closed(r), 1e-12));
        }
    }
}
