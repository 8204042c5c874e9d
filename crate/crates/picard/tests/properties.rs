use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;

use picard::analytic::{eisenstein, ResidueVector, UHPoint};
use picard::boundary::{
    coordinate_change, gamma_params, ledger_check, torsion_order, CoordBasis, CoordChange, DivisorLedger, LatticeE,
    UnipotentParam,
};
use picard::hecke::{eigenvalue_on_unramified_character, ramified_place, HeckeElement, TorusCharacter};
use picard::quadfield::{is_norm, rat, Discriminant, FieldElem};
use picard::symlaurent::{expand, reconstruct, x_var, LaurentPoly, Monomial, RatFunc};

fn disc() -> impl Strategy<Value = Discriminant> {
    prop::sample::select(vec![3u64, 4, 7, 11]).prop_map(|d| Discriminant::new(d).unwrap())
}

fn ratio() -> impl Strategy<Value = (i64, i64)> {
    (-30i64..=30, 1i64..=12)
}

fn elem(d: Discriminant) -> impl Strategy<Value = FieldElem> {
    (ratio(), ratio()).prop_map(move |((a, b), (c, e))| FieldElem::new(rat(a, b), rat(c, e), d))
}

fn elems<const K: usize>() -> impl Strategy<Value = (Discriminant, Vec<FieldElem>)> {
    disc().prop_flat_map(|d| (Just(d), prop::collection::vec(elem(d), K)))
}

/// c0 + c1 X + ... with an optional factor a^k on each coefficient.
fn poly_in_x(coeffs: &[(i64, i32)]) -> LaurentPoly {
    let x = x_var();
    let a = picard::symlaurent::Var::new("a");
    let mut p = LaurentPoly::zero();
    for (k, &(c, e)) in coeffs.iter().enumerate() {
        let m = Monomial::from_pairs(&[(x, k as i32), (a, e)]);
        p = &p + &LaurentPoly::term(rat(c, 1), m);
    }
    p
}

fn ratfunc(max_num: usize, max_den: usize) -> impl Strategy<Value = RatFunc> {
    (
        prop::collection::vec((-4i64..=4, -1i32..=1), 1..=max_num + 1),
        prop::collection::vec((-4i64..=4, -1i32..=1), 0..=max_den),
    )
        .prop_filter_map("zero numerator", |(num, den)| {
            let num = poly_in_x(&num);
            if num.is_zero() {
                return None;
            }
            let mut full = vec![(1, 0)];
            full.extend(den);
            RatFunc::new(num, poly_in_x(&full)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_ring_axioms((_, v) in elems::<3>()) {
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(&(x * y) * z, x * &(y * z));
        prop_assert_eq!(x * &(y + z), &(x * y) + &(x * z));
        prop_assert_eq!(x * y, y * x);
        prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj().conj(), x.clone());
        if let Some(inv) = x.inv() {
            prop_assert!((x * &inv) == FieldElem::one(x.disc()));
        } else {
            prop_assert!(x.is_zero());
        }
    }

    #[test]
    fn norms_are_norms((d, v) in elems::<1>()) {
        prop_assume!(!v[0].is_zero());
        prop_assert!(is_norm(&v[0].norm(), d).unwrap());
    }

    #[test]
    fn reconstruct_round_trip(rf in ratfunc(2, 2)) {
        let series = expand(&rf, 12).unwrap();
        prop_assert_eq!(reconstruct(&series, 2, 2).unwrap(), rf);
    }

    #[test]
    fn expand_is_multiplicative(f in ratfunc(2, 2), g in ratfunc(1, 2)) {
        let order = 10;
        let lhs = expand(&f.mul(&g), order).unwrap();
        let rhs = expand(&f, order).unwrap().mul(&expand(&g, order).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_params_round_trip_and_cocycle((d, v) in elems::<2>(), r1 in ratio(), r2 in ratio()) {
        let basis = CoordBasis::standard(d);
        let g1 = UnipotentParam { r: rat(r1.0, r1.1), s: v[0].clone() };
        let g2 = UnipotentParam { r: rat(r2.0, r2.1), s: v[1].clone() };
        prop_assert_eq!(gamma_params(&g1.matrix(), &basis).unwrap(), g1.clone());
        let prod = gamma_params(&(&g1.matrix() * &g2.matrix()), &basis).unwrap();
        prop_assert_eq!(prod.s, &g1.s + &g2.s);
        prop_assert_eq!(prod.r, &g1.r + &g2.r + UnipotentParam::cocycle(&g1, &g2));
    }

    #[test]
    fn torsion_invariant_under_rescale((d, v) in elems::<4>()) {
        let l = LatticeE::from_generators(&v[..2], d);
        prop_assume!(l.rank() == 2);
        prop_assume!(!v[3].is_zero());
        let u = &v[2];
        let order = torsion_order(u, &l).unwrap();
        let (u2, l2) = coordinate_change(u, &l, &CoordChange::Rescale(v[3].clone())).unwrap();
        prop_assert_eq!(torsion_order(&u2, &l2).unwrap(), order.clone());
        let (u3, l3) = coordinate_change(u, &l, &CoordChange::Translate(v[0].clone())).unwrap();
        prop_assert_eq!(torsion_order(&u3, &l3).unwrap(), order);
    }

    #[test]
    fn ledger_degrees_add(
        a in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..12),
        b in prop::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..12),
    ) {
        let build = |entries: &[(usize, usize, i64)]| {
            let mut l = DivisorLedger::new();
            for &(c, p, m) in entries {
                let (curve, cusp) = (format!("C{c}"), format!("P{p}"));
                l.add_entry(&curve, &cusp, m);
                l.map_cusp(&curve, &cusp, &format!("g{p}"));
            }
            l
        };
        let (la, lb) = (build(&a), build(&b));
        let (ra, rb, rs) = (ledger_check(&la), ledger_check(&lb), ledger_check(&la.add(&lb)));
        let sum = |x: &BTreeMap<String, i64>, y: &BTreeMap<String, i64>| {
            let mut out = x.clone();
            for (k, v) in y {
                *out.entry(k.clone()).or_insert(0) += v;
            }
            out.retain(|_, v| *v != 0);
            out
        };
        let nonzero = |x: &BTreeMap<String, i64>| x.iter().filter(|(_, v)| **v != 0).map(|(k, v)| (k.clone(), *v)).collect::<BTreeMap<_, _>>();
        prop_assert_eq!(nonzero(&rs.deg_per_curve), sum(&ra.deg_per_curve, &rb.deg_per_curve));
        prop_assert_eq!(nonzero(&rs.pushforward), sum(&ra.pushforward, &rb.pushforward));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hecke_eigenvalue_is_linear(k1 in -5i64..=5, k2 in -5i64..=5, p in prop::sample::select(vec![3u64, 7])) {
        let place = ramified_place(p, Discriminant::new(p).unwrap()).unwrap();
        let basic = HeckeElement::basic(place.clone()).unwrap();
        let id = HeckeElement::identity(place);
        let chi = TorusCharacter::symbolic();
        let ev = |h: &HeckeElement| eigenvalue_on_unramified_character(h, &chi).unwrap();
        let combo = basic.scale(k1).add(&id.scale(k2));
        let expected = &ev(&basic).scale(&rat(k1, 1)) + &ev(&id).scale(&rat(k2, 1));
        prop_assert_eq!(ev(&combo), expected);
    }

    #[test]
    fn eisenstein_symmetries(
        level in prop::sample::select(vec![3u64, 4, 5]),
        w1 in 0i64..5, w2 in 0i64..5,
        x in -0.5f64..0.5, y in 0.7f64..2.0,
        s in prop::sample::select(vec![Complex64::new(0.3, 0.0), Complex64::new(1.4, 0.0), Complex64::new(0.6, 0.4)]),
    ) {
        let rv = ResidueVector::new(level, w1, w2).unwrap();
        prop_assume!(!rv.is_zero());
        let z = UHPoint::new(x, y).unwrap();
        let e = eisenstein(&z, s, &rv).unwrap();
        // (m, n) -> (-m, -n)
        let neg = eisenstein(&z, s, &rv.neg()).unwrap();
        prop_assert!((e - neg).norm() < 1e-12 * e.norm().max(1.0));
        // |m(z+1) + n| = |mz + (m+n)|
        let shifted = ResidueVector::new(level, w1, w1 + w2).unwrap();
        let t = eisenstein(&z.translate(1.0), s, &rv).unwrap();
        let u = eisenstein(&z, s, &shifted).unwrap();
        prop_assert!((t - u).norm() < 1e-12 * t.norm().max(1.0));
    }
}
