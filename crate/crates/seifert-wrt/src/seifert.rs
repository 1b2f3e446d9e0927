//! Seifert fibration presentations, global invariants and presentation moves.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{q, qi, rho_sigma, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    #[serde(rename = "o")]
    Orientable,
    #[serde(rename = "n")]
    Nonorientable,
}

impl Base {
    /// `a_o = 2`, `a_n = 1`.
    pub fn a(self) -> i64 {
        match self {
            Base::Orientable => 2,
            Base::Nonorientable => 1,
        }
    }

    fn letter(self) -> char {
        match self {
            Base::Orientable => 'o',
            Base::Nonorientable => 'n',
        }
    }
}

/// One `(alpha, beta)` pair with its complements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fiber {
    pub alpha: i64,
    pub beta: i64,
    pub rho: i64,
    pub sigma: i64,
}

impl Fiber {
    pub fn new(alpha: i64, beta: i64) -> Result<Self> {
        if alpha < 1 {
            return Err(Error::Domain(format!("alpha must be >= 1, got {alpha}")));
        }
        if alpha.gcd(&beta) != 1 {
            return Err(Error::Domain(format!("({alpha},{beta}) is not coprime")));
        }
        let (rho, sigma) = rho_sigma(alpha, beta)?;
        Ok(Fiber { alpha, beta, rho, sigma })
    }

    /// Replace the complements by `(rho + t alpha, sigma + t beta)`.
    pub fn shift_complement(&self, t: i64) -> Fiber {
        Fiber { rho: self.rho + t * self.alpha, sigma: self.sigma + t * self.beta, ..*self }
    }

    pub fn ratio(&self) -> Q {
        q(self.beta as i128, self.alpha as i128)
    }
}

/// A Seifert presentation, normalized when `b` is present.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeifertData {
    pub base: Base,
    pub genus: u32,
    pub b: Option<i64>,
    pub fibers: Vec<Fiber>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalInvariants {
    #[serde(serialize_with = "ser_q")]
    pub e: Q,
    pub a: i64,
    #[serde(serialize_with = "ser_q")]
    pub h: Q,
    pub n: usize,
    pub k: i64,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::numtheory::fmt_q(x))
}

/// The presentation every computation runs on: no `b`, at least one pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Working {
    pub a_eps: i64,
    pub genus: i64,
    pub ag: i64,
    pub fibers: Vec<Fiber>,
    pub e: Q,
    pub amul: i64,
}

impl Working {
    pub fn n(&self) -> usize {
        self.fibers.len()
    }

    /// `n + a g - 2` for this presentation.
    pub fn k(&self) -> i64 {
        self.fibers.len() as i64 + self.ag - 2
    }

    pub fn h_int(&self) -> i128 {
        let h = self.e * qi(self.amul as i128);
        debug_assert!(h.is_integer());
        h.to_integer()
    }

    pub fn sign_e(&self) -> i32 {
        crate::numtheory::sign_q(&self.e)
    }

    pub fn e_f64(&self) -> f64 {
        crate::numtheory::q_to_f64(&self.e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    AddTrivial,
    /// Removes the last `(1,0)` pair.
    DeleteTrivial,
    /// `beta_i += K_i alpha_i` with `sum K_i = 0`.
    ShiftBetas(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_s2xs1: bool,
    pub asympt_supported: bool,
    pub exact_supported: bool,
    pub is_special_e0: bool,
    pub is_rp2_closed_form: bool,
}

impl SeifertData {
    pub fn new(base: Base, genus: u32, b: Option<i64>, pairs: &[(i64, i64)]) -> Result<Self> {
        if base == Base::Nonorientable && genus == 0 {
            return Err(Error::Domain("nonorientable base needs genus >= 1".into()));
        }
        let mut fibers = Vec::with_capacity(pairs.len());
        for &(al, be) in pairs {
            if b.is_some() && !(0 < be && be < al) {
                return Err(Error::Domain(format!(
                    "normalized form needs 0 < beta < alpha, got ({al},{be})"
                )));
            }
            fibers.push(Fiber::new(al, be)?);
        }
        Ok(SeifertData { base, genus, b, fibers })
    }

    pub fn normalized(base: Base, genus: u32, b: i64, pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(base, genus, Some(b), pairs)
    }

    pub fn unnormalized(base: Base, genus: u32, pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(base, genus, None, pairs)
    }

    pub fn is_normalized(&self) -> bool {
        self.b.is_some()
    }

    pub fn a_eps(&self) -> i64 {
        self.base.a()
    }

    pub fn ag(&self) -> i64 {
        self.a_eps() * self.genus as i64
    }

    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.fibers.iter().map(|f| (f.alpha, f.beta)).collect()
    }

    /// `beta_0`.
    pub fn beta0(&self) -> i64 {
        self.b.unwrap_or(0)
    }

    pub fn euler(&self) -> Q {
        let mut e = -qi(self.beta0() as i128);
        for f in &self.fibers {
            e -= f.ratio();
        }
        e
    }

    pub fn global_invariants(&self) -> GlobalInvariants {
        let e = self.euler();
        let a: i64 = self.fibers.iter().map(|f| f.alpha).product();
        let n = self.fibers.iter().filter(|f| f.alpha > 1).count();
        GlobalInvariants { e, a, h: e * qi(a as i128), n, k: n as i64 + self.ag() - 2 }
    }

    /// Computational presentation. A normalized `b` is absorbed into the first
    /// pair (or becomes a `(1,b)` pair when there are none); an empty list gets `(1,0)`.
    pub fn working(&self) -> Working {
        let mut fibers = self.fibers.clone();
        let b = self.beta0();
        if fibers.is_empty() {
            fibers.push(Fiber::new(1, b).expect("(1,b) is coprime"));
        } else if b != 0 {
            let f0 = fibers[0];
            fibers[0] = Fiber::new(f0.alpha, f0.beta + b * f0.alpha).expect("coprime");
        }
        let amul = fibers.iter().map(|f| f.alpha).product();
        let w = Working {
            a_eps: self.a_eps(),
            genus: self.genus as i64,
            ag: self.ag(),
            e: self.euler(),
            amul,
            fibers,
        };
        debug_assert_eq!(w.e, -w.fibers.iter().map(|f| f.ratio()).fold(Q::zero(), |a, b| a + b));
        w
    }

    /// `{eps; g; (1,b), ...}` for normalized input, identity otherwise.
    pub fn to_unnormalized(&self) -> SeifertData {
        match self.b {
            None => self.clone(),
            Some(b) => {
                let mut fibers = vec![Fiber::new(1, b).expect("coprime")];
                fibers.extend(self.fibers.iter().copied());
                SeifertData { base: self.base, genus: self.genus, b: None, fibers }
            }
        }
    }

    /// The normalized presentation of the same fibration.
    pub fn to_normalized(&self) -> SeifertData {
        let mut b = self.beta0();
        let mut pairs = Vec::new();
        for f in &self.fibers {
            b += f.beta.div_euclid(f.alpha);
            if f.alpha > 1 {
                pairs.push((f.alpha, f.beta.rem_euclid(f.alpha)));
            }
        }
        SeifertData::new(self.base, self.genus, Some(b), &pairs).expect("reduced pairs are valid")
    }

    pub fn apply_move(&self, mv: &Move) -> Result<SeifertData> {
        let mut x = self.to_unnormalized();
        match mv {
            Move::AddTrivial => x.fibers.push(Fiber::new(1, 0)?),
            Move::DeleteTrivial => {
                let pos = x
                    .fibers
                    .iter()
                    .rposition(|f| f.alpha == 1 && f.beta == 0)
                    .ok_or_else(|| Error::Domain("no (1,0) pair to delete".into()))?;
                x.fibers.remove(pos);
            }
            Move::ShiftBetas(ks) => {
                if ks.len() != x.fibers.len() {
                    return Err(Error::Domain(format!(
                        "shift needs {} entries, got {}",
                        x.fibers.len(),
                        ks.len()
                    )));
                }
                if ks.iter().sum::<i64>() != 0 {
                    return Err(Error::Domain("shift entries must sum to zero".into()));
                }
                for (f, k) in x.fibers.iter_mut().zip(ks) {
                    *f = Fiber::new(f.alpha, f.beta + k * f.alpha)?;
                }
            }
        }
        debug_assert_eq!(x.euler(), self.euler());
        Ok(x)
    }

    pub fn classify_special(&self) -> Classification {
        let nf = self.to_normalized();
        let bn = nf.beta0();
        let is_s2xs1 = nf.base == Base::Orientable
            && nf.genus == 0
            && ((nf.fibers.is_empty() && bn == 0)
                || (bn == -1
                    && nf.fibers.len() == 2
                    && nf.fibers[0].alpha == nf.fibers[1].alpha
                    && nf.fibers[0].beta + nf.fibers[1].beta == nf.fibers[0].alpha));
        let gi = nf.global_invariants();
        let inv_sum: Q = nf.fibers.iter().map(|f| q(1, f.alpha as i128)).fold(Q::zero(), |a, b| a + b);
        let is_special_e0 = gi.e.is_zero() && inv_sum >= qi(gi.k as i128);
        let is_rp2_closed_form =
            nf.base == Base::Nonorientable && nf.genus == 1 && nf.fibers.is_empty() && bn == 0;
        Classification {
            is_s2xs1,
            asympt_supported: self.ag() % 2 == 0,
            exact_supported: true,
            is_special_e0,
            is_rp2_closed_form,
        }
    }
}

impl fmt::Display for SeifertData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{}", self.base.letter(), self.genus)?;
        match self.b {
            Some(b) => {
                write!(f, "|{b}")?;
                if !self.fibers.is_empty() {
                    write!(f, ";")?;
                }
            }
            None => write!(f, ";")?,
        }
        let parts: Vec<String> =
            self.fibers.iter().map(|x| format!("({},{})", x.alpha, x.beta)).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for SeifertData {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Parses `eps;g|b;(a,b),...` (normalized) or `eps;g;(a,b),...` (non-normalized).
pub fn parse(text: &str) -> Result<SeifertData> {
    let bad = |m: &str| Error::Parse(format!("{m} in {text:?}"));
    let mut s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if (s.starts_with('{') && s.ends_with('}')) || (s.starts_with('[') && s.ends_with(']')) {
        s = s[1..s.len() - 1].to_string();
    }
    let (eps, rest) = s.split_once(';').ok_or_else(|| bad("missing ';' after base"))?;
    let base = match eps {
        "o" => Base::Orientable,
        "n" => Base::Nonorientable,
        _ => return Err(bad("base must be 'o' or 'n'")),
    };
    let (head, tail, normalized) = match (rest.find('|'), rest.find(';')) {
        (Some(p), _) => (&rest[..p], &rest[p + 1..], true),
        (None, Some(p)) => (&rest[..p], &rest[p + 1..], false),
        (None, None) => (rest, "", false),
    };
    let genus: u32 = head.parse().map_err(|_| bad("bad genus"))?;
    let (b, list) = if normalized {
        let (bs, list) = match tail.split_once(';') {
            Some((bs, list)) => (bs, list),
            None => (tail, ""),
        };
        (Some(bs.parse::<i64>().map_err(|_| bad("bad b"))?), list)
    } else {
        (None, tail)
    };
    let pairs = parse_pairs(list).map_err(|m| bad(&m))?;
    SeifertData::new(base, genus, b, &pairs)
}

fn parse_pairs(list: &str) -> std::result::Result<Vec<(i64, i64)>, String> {
    let mut out = Vec::new();
    let mut rest = list;
    while !rest.is_empty() {
        rest = rest.strip_prefix(',').unwrap_or(rest);
        let inner = rest.strip_prefix('(').ok_or("expected '('")?;
        let close = inner.find(')').ok_or("missing ')'")?;
        let (a, b) = inner[..close].split_once(',').ok_or("pair needs two entries")?;
        let a: i64 = a.parse().map_err(|_| format!("bad alpha {a:?}"))?;
        let b: i64 = b.parse().map_err(|_| format!("bad beta {b:?}"))?;
        out.push((a, b));
        rest = &inner[close + 1..];
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct SeifertJson {
    base: Base,
    genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<i64>,
    fibers: Vec<(i64, i64)>,
}

impl Serialize for SeifertData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeifertJson { base: self.base, genus: self.genus, b: self.b, fibers: self.pairs() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeifertData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeifertJson::deserialize(d)?;
        SeifertData::new(j.base, j.genus, j.b, &j.fibers).map_err(serde::de::Error::custom)
    }
}

/// Text or JSON.
pub fn parse_any(input: &str) -> Result<SeifertData> {
    let t = input.trim();
    if t.starts_with('{') && t.contains('"') {
        serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))
    } else {
        parse(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let m = parse("o;0|-1;(2,1),(3,1),(7,1)").unwrap();
        assert_eq!(m.euler(), q(1, 42));
        let gi = m.global_invariants();
        assert_eq!(gi.h, qi(1));
        assert_eq!(gi.n, 3);
        let s = parse("o;0|0").unwrap();
        assert_eq!(s.working().fibers.len(), 1);
        assert_eq!(s.working().fibers[0], Fiber { alpha: 1, beta: 0, rho: 0, sigma: 1 });
        let u = parse("o;0;(2,1),(2,3)").unwrap();
        assert_eq!(u.euler(), qi(-2));
        assert!(parse("o;0|-1;(2,3)").is_err());
        assert!(parse("o;0;(2,4)").is_err());
        assert!(parse("n;0|0").is_err());
        assert!(parse("x;0|0").is_err());
    }

    #[test]
    fn round_trip() {
        for t in ["o;0|-1;(2,1),(3,1),(7,1)", "o;0|0", "n;1|0", "o;0;(2,1),(2,3)", "o;0;", "o;2|-1;(2,1),(2,1)"] {
            let x = parse(t).unwrap();
            assert_eq!(x.to_string(), t);
            let j = serde_json::to_string(&x).unwrap();
            assert_eq!(parse_any(&j).unwrap(), x);
        }
    }

    #[test]
    fn moves() {
        let x = parse("o;0;(2,1),(3,1)").unwrap();
        let y = x.apply_move(&Move::AddTrivial).unwrap();
        assert_eq!(y.to_string(), "o;0;(2,1),(3,1),(1,0)");
        let z = x.apply_move(&Move::ShiftBetas(vec![1, -1])).unwrap();
        assert_eq!(z.to_string(), "o;0;(2,3),(3,-2)");
        assert_eq!(z.euler(), x.euler());
        assert!(x.apply_move(&Move::DeleteTrivial).is_err());
        assert!(x.apply_move(&Move::ShiftBetas(vec![1, 1])).is_err());
        let n = parse("o;0|-1;(2,1)").unwrap();
        assert_eq!(n.to_unnormalized().to_string(), "o;0;(1,-1),(2,1)");
    }

    #[test]
    fn classify() {
        assert!(parse("o;0|-1;(3,2),(3,1)").unwrap().classify_special().is_s2xs1);
        assert!(parse("o;0|0").unwrap().classify_special().is_s2xs1);
        let c = parse("n;1|0").unwrap().classify_special();
        assert!(!c.asympt_supported && c.exact_supported && c.is_rp2_closed_form);
        assert!(parse("o;0|-1;(3,1),(3,1),(3,1)").unwrap().classify_special().is_special_e0);
        assert!(!parse("o;2|-1;(2,1),(2,1)").unwrap().classify_special().is_special_e0);
        assert_eq!(parse("o;0|-1;(2,1),(3,1),(6,1)").unwrap().euler(), qi(0));
    }
}
