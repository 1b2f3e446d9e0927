use std::collections::BTreeMap;

use num_integer::Integer;
use proptest::prelude::*;

use seifert_wrt::analysis::{expected_order, loglog_slope, ORDER_SLACK};
use seifert_wrt::asympt::{full_expansion, polar_terms_working, z1_n3_closed, EvalMode};
use seifert_wrt::exact::tau;
use seifert_wrt::lseries::RCoeff;
use seifert_wrt::moduli::{index_sets, index_sets_working, LabelKind};
use seifert_wrt::numtheory::RationalModZ;
use seifert_wrt::seifert::{parse, Base, Move, SeifertData, Working};

fn normalized_fiber(amax: i64) -> impl Strategy<Value = (i64, i64)> {
    (2..=amax, 1..amax).prop_filter("normalized", |(a, b)| b < a && a.gcd(b) == 1)
}

fn even_presentation() -> impl Strategy<Value = SeifertData> {
    (0usize..3, -3i64..=2, prop::collection::vec(normalized_fiber(6), 1..=4)).prop_map(|(kind, b, pairs)| {
        let (base, genus) = [(Base::Orientable, 0), (Base::Orientable, 1), (Base::Nonorientable, 2)][kind];
        SeifertData::new(base, genus, Some(b), &pairs).unwrap()
    })
}

fn n3_sphere() -> impl Strategy<Value = SeifertData> {
    (-3i64..=2, prop::collection::vec(normalized_fiber(7), 3))
        .prop_map(|(b, pairs)| SeifertData::new(Base::Orientable, 0, Some(b), &pairs).unwrap())
}

fn close(a: &RCoeff, b: &RCoeff, tol: f64) -> bool {
    (a - b).max_abs() <= tol * a.max_abs().max(1.0)
}

/// `b r (Z0 + Z1)` summed per frequency.
fn polar_by_q(w: &Working) -> BTreeMap<RationalModZ, RCoeff> {
    let mut m: BTreeMap<RationalModZ, RCoeff> = BTreeMap::new();
    for t in polar_terms_working(w, &index_sets_working(w)) {
        let e = m.entry(t.label.q).or_default();
        *e = &*e + &t.contribution();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn polar_degree_bound(x in even_presentation()) {
        let w = x.working();
        for t in polar_terms_working(&w, &index_sets_working(&w)) {
            let LabelKind::I2 { n2, .. } = &t.label.kind else { unreachable!() };
            let flat = w.fibers.iter().zip(n2).filter(|(f, &m)| (f.rho * m) % f.alpha == 0).count() as i64;
            if let Some(d) = t.contribution().degree() {
                prop_assert!(d as i64 <= w.k() - flat, "{}: degree {} > {} - {}", t.label, d, w.k(), flat);
            }
        }
    }

    #[test]
    fn polar_terms_ignore_complement_choice(x in even_presentation(), mask in any::<u8>(), s in -2i64..=2) {
        let w = x.working();
        let mut v = w.clone();
        for (i, f) in v.fibers.iter_mut().enumerate() {
            if mask >> (i % 8) & 1 == 1 {
                *f = f.shift_complement(s);
            }
        }
        let a = polar_terms_working(&w, &index_sets_working(&w));
        let b = polar_terms_working(&v, &index_sets_working(&v));
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert_eq!(&p.label, &q.label);
            prop_assert!(close(&p.contribution(), &q.contribution(), 1e-10), "{}", p.label);
        }
    }

    #[test]
    fn polar_branches_survive_moves(x in even_presentation(), k in -2i64..=2) {
        let n = x.to_unnormalized().fibers.len();
        let mut ks = vec![0; n];
        ks[0] = k;
        ks[n - 1] -= k;
        for mv in [Move::ShiftBetas(ks), Move::AddTrivial] {
            let y = x.apply_move(&mv).unwrap();
            let a = polar_by_q(&x.working());
            let b = polar_by_q(&y.working());
            let keys = |m: &BTreeMap<RationalModZ, RCoeff>| {
                m.iter().filter(|(_, c)| c.max_abs() > 1e-10).map(|(q, _)| *q).collect::<Vec<_>>()
            };
            prop_assert_eq!(keys(&a), keys(&b));
            for (q, c) in &a {
                let d = b.get(q).cloned().unwrap_or_default();
                prop_assert!(close(c, &d, 1e-10), "{:?} q={}", mv, q);
            }
        }
    }

    #[test]
    fn branch_keys_are_label_values(x in even_presentation()) {
        let exp = full_expansion(&x, 1).unwrap();
        let qs: Vec<RationalModZ> = index_sets(&x).all().map(|l| l.q).collect();
        for k in exp.q_keys() {
            prop_assert!(qs.contains(&k), "{} has no label", k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn closed_z1_matches_residues(x in n3_sphere()) {
        let w = x.working();
        for t in polar_terms_working(&w, &index_sets_working(&w)) {
            let c = z1_n3_closed(&x, &t.label.kind).unwrap();
            prop_assert!(t.z1.terms().all(|(p, v)| p == 0 || v.norm() < 1e-12), "{}", t.label);
            prop_assert!((t.z1.get(0) - c).norm() < 1e-10, "{}: {} vs {}", t.label, t.z1.get(0), c);
        }
    }
}

#[test]
fn residuals_shrink_with_depth() {
    let r = 211;
    for m in ["o;0|-1;(2,1),(3,1),(7,1)", "o;0|-1;(2,1),(3,1),(5,1)", "o;0|-1;(2,1),(3,2)", "o;1|-1;(2,1)"] {
        let x = parse(m).unwrap();
        let t = tau(&x, r).unwrap();
        let res: Vec<f64> = (0..=3)
            .map(|n| (full_expansion(&x, n).unwrap().evaluate(r, EvalMode::ExactPhase) - t).norm())
            .collect();
        for w in res.windows(2) {
            assert!(w[1] <= w[0], "{m}: {res:?}");
        }
    }
}

/// The random manifolds of the convergence criterion, past their pre-asymptotic
/// range. The second has stationary coefficients near 3e12 at k = 3.
#[test]
fn expected_order_reached_at_large_levels() {
    let cases = [("o;0|-2;(2,1),(3,2),(5,3)", 1600i64, 3200i64), ("o;0|2;(5,3),(7,3),(4,3)", 400_000, 800_000)];
    for (m, lo, hi) in cases {
        let x = parse(m).unwrap();
        let rs: Vec<i64> = (0..8).map(|i| lo + (hi - lo) * i / 7).collect();
        let taus: Vec<_> = rs.iter().map(|&r| tau(&x, r).unwrap()).collect();
        for n in 0..=2 {
            let exp = full_expansion(&x, n).unwrap();
            let res: Vec<f64> =
                rs.iter().zip(&taus).map(|(&r, t)| (exp.evaluate(r, EvalMode::ExactPhase) - t).norm()).collect();
            let xs: Vec<f64> = rs.iter().map(|&r| r as f64).collect();
            let f = -loglog_slope(&xs, &res);
            let e = expected_order(&x, &exp, EvalMode::ExactPhase).unwrap();
            assert!(f >= e - ORDER_SLACK, "{m} N={n}: fitted {f:.3}, expected {e:.3}");
        }
    }
}
