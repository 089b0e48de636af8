use cusp_core::series_algebra::{pair, Series1, Series2, Var};
use cusp_core::{Coeff, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn unit_rat() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn series2(cap: usize) -> impl Strategy<Value = Series2<Rational>> {
    let n = (cap + 1) * (cap + 2) / 2;
    prop::collection::vec(rat(), n).prop_map(move |cs| {
        let mut terms = Vec::new();
        let mut it = cs.into_iter();
        for d in 0..=cap {
            for i in 0..=d {
                terms.push(((i, d - i), it.next().unwrap()));
            }
        }
        Series2::from_terms(pair("x", "y"), cap, terms)
    })
}

fn series1_vanishing(cap: usize) -> impl Strategy<Value = Series1<Rational>> {
    (prop::collection::vec(unit_rat(), cap), 1i64..=4, prop::bool::ANY).prop_map(move |(cs, s, neg)| {
        let slope = Rational::from_integer(if neg { -s } else { s }.into());
        let mut terms: Vec<(usize, Rational)> = cs.into_iter().enumerate().map(|(k, c)| (k + 1, c)).collect();
        terms[0].1 = slope;
        Series1::from_coeffs("x", cap, terms)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((a, b, c) in (1usize..=6).prop_flat_map(|n| (series2(n), series2(n), series2(n)))) {
        let cap = a.cap();
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert!((&a - &a).is_zero());
        let one = Series2::one(pair("x", "y"), cap);
        prop_assert_eq!(&a * &one, a.clone());
    }

    #[test]
    fn reversion_roundtrip(f in (2usize..=10).prop_flat_map(series1_vanishing)) {
        let g = f.reversion("w").unwrap();
        let id = f.compose(&g).unwrap();
        prop_assert_eq!(id, Series1::variable("w", f.cap()));
        let back = g.renamed("x").compose(&f).unwrap();
        prop_assert_eq!(back, Series1::variable("x", f.cap()));
    }

    #[test]
    fn implicit_solve_roundtrip(cap in 2usize..=6, slope in 1i64..=5, body in series2(6)) {
        // f(h, V) with f(0,0) = 0 and ∂f/∂h = slope at the origin
        let mut f = body.truncate(cap);
        let f00 = Series2::constant(f.vars().clone(), cap, f.coeff(0, 0));
        let f10 = Series2::from_terms(f.vars().clone(), cap, [((1, 0), f.coeff(1, 0) - Rational::from_integer(slope.into()))]);
        f = f.try_sub(&f00).unwrap().try_sub(&f10).unwrap();
        let h = f.implicit_solve("x", "t").unwrap();
        prop_assert_eq!(h.vars(), &pair("t", "y"));
        let back = f.substitute("x", &h).unwrap();
        prop_assert_eq!(back, Series2::variable(pair("t", "y"), cap, 0));
    }

    #[test]
    fn float_matches_exact(a in series2(5), b in series2(5)) {
        let exact = a.try_mul(&b).unwrap().try_mul(&a).unwrap().derivative_slot(1);
        let (af, bf) = (a.map(Coeff::to_f64), b.map(Coeff::to_f64));
        let float = af.try_mul(&bf).unwrap().try_mul(&af).unwrap().derivative_slot(1);
        for ((i, j), c) in exact.terms() {
            let c = Coeff::to_f64(c);
            if c.abs() >= 1e-6 {
                prop_assert!((float.coeff(i, j) - c).abs() <= 1e-12 * c.abs());
            }
        }
    }

    #[test]
    fn table_roundtrip(a in series2(5)) {
        let a = a.with_eff(3);
        let back = Series2::<Rational>::from_table(&a.to_table()).unwrap();
        prop_assert_eq!(back.eff(), 3);
        prop_assert_eq!(back, a);
    }

    #[test]
    fn product_rule(a in series2(5), b in series2(5)) {
        let lhs = a.try_mul(&b).unwrap().derivative_slot(0);
        let rhs = a.derivative_slot(0).try_mul(&b).unwrap()
            .try_add(&a.try_mul(&b.derivative_slot(0)).unwrap()).unwrap();
        prop_assert_eq!(lhs.truncate(4), rhs.truncate(4));
    }

    #[test]
    fn zero_coefficients_never_stored(a in series2(4)) {
        let d = a.try_sub(&a.scale(&Rational::from_integer(1.into()))).unwrap();
        prop_assert_eq!(d.len(), 0);
        prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
    }
}

#[test]
fn mismatched_variables_are_rejected() {
    let a = Series2::<Rational>::one(pair("x", "y"), 3);
    let b = Series2::<Rational>::one(pair("x", "z"), 3);
    assert!(a.try_add(&b).is_err());
    assert!(a.try_mul(&b).is_err());
    assert_eq!(Var::new("x").as_str(), "x");
}
