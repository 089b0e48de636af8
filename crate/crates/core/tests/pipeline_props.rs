mod common;

use cusp_core::hodograph::{hodograph_map, jacobian_from_map, linear_system_residual};
use cusp_core::normal_form::{exact_pack, float_pack, verify_miniversal};
use cusp_core::pde_series::{
    cross_check_b_g, extend_b, korobeinik_series, low_order_relations, ComplexQ, G1Spec, ProblemData,
};
use cusp_core::series_algebra::{pair, Series2};
use cusp_core::{Coeff, Radical, Rational};
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=9).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    rat().prop_filter("nonzero", |r| !r.is_zero())
}

fn problem(order: usize) -> impl Strategy<Value = ProblemData> {
    (
        prop::collection::vec(rat(), 0..5),
        prop::collection::vec(rat(), 2 * order + 3),
        nonzero_rat(),
        rat(),
    )
        .prop_map(|(alpha, mut b0, b03, v)| {
            b0[2] = Rational::zero();
            b0[3] = b03;
            ProblemData::new(alpha, b0, v)
        })
}

/// Coefficient of `h^k V^j` in `h B_hh + 2 B_h − α(h) B_VV`, from raw coefficients.
fn pde_coefficient(b: &Series2<Rational>, p: &ProblemData, k: usize, j: usize) -> Rational {
    let n = |x: usize| Rational::from_integer((x as i64).into());
    let mut acc = (n(k + 1) * n(k) + n(2) * n(k + 1)) * b.coeff(k + 1, j);
    for l in 0..=k {
        let a = if l == 0 { n(4) } else { p.alpha_coeff(l) };
        acc -= a * n(j + 2) * n(j + 1) * b.coeff(k - l, j + 2);
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn recurrence_solves_the_equation(p in problem(8)) {
        let b = extend_b::<Rational>(&p, 8).unwrap().series;
        for k in 0..8 {
            for j in 0..(8 - k - 1) {
                prop_assert!(pde_coefficient(&b, &p, k, j).is_zero(), "h^{} V^{}", k, j);
            }
        }
        for j in 0..=8 {
            prop_assert_eq!(b.coeff(0, j), p.b0j(j));
        }
    }

    #[test]
    fn first_two_rows_closed_form(p in problem(6)) {
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let n = |x: usize| Rational::from_integer((x as i64).into());
        for j in 0..=4 {
            prop_assert_eq!(b.coeff(1, j), n(2) * n(j + 1) * n(j + 2) * p.b0j(j + 2));
        }
        for j in 0..=3 {
            let want = n(j + 1) * n(j + 2)
                * (n(8) * n(j + 3) * n(j + 4) * p.b0j(j + 4) + p.alpha_coeff(1) * p.b0j(j + 2))
                / n(6);
            prop_assert_eq!(b.coeff(2, j), want);
        }
        for rel in low_order_relations(&b, &p) {
            prop_assert!(rel.holds(), "{}", rel.name);
        }
    }

    #[test]
    fn boundary_scaling_is_linear(p in problem(6), s in nonzero_rat()) {
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let mut scaled = p.clone();
        scaled.b0 = p.b0.iter().map(|c| c * &s).collect();
        let bs = extend_b::<Rational>(&scaled, 6).unwrap().series;
        prop_assert_eq!(bs, b.scale(&s));
    }

    #[test]
    fn hodograph_general_term(p in problem(6)) {
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let m = hodograph_map(&b, &p).unwrap();
        let n = |x: usize| Rational::from_integer((x as i64).into());
        for i in 0..=5 {
            for j in 0..=(5 - i) {
                let want = if i + j == 0 { Rational::zero() } else { n(j + 1) * b.coeff(i, j + 1) };
                prop_assert_eq!(m.tau.coeff(i, j), want);
            }
        }
        prop_assert_eq!(m.tau.coeff(1, 0), p.b11());
        prop_assert_eq!(p.b11(), n(12) * p.b0j(3));
        let (r1, r2) = linear_system_residual(&m, &p).unwrap();
        prop_assert!(r1.is_zero_to_eff() && r2.is_zero_to_eff());
        let dj = jacobian_from_map(&m).unwrap().try_sub(&m.jacobian).unwrap();
        prop_assert!(dj.is_zero_to_eff());
    }

    #[test]
    fn bridge_identity(coeffs in prop::collection::vec(rat(), 1..12), u in rat()) {
        let g1 = G1Spec::poly_real(&coeffs);
        let report = cross_check_b_g(&g1, &u, &[], 5).unwrap();
        prop_assert!(report.exact(), "{:?}", report.mismatches);
        // h-row at V = 0 through the lazily evaluated G
        let uc: ComplexQ = Complex::new(u.clone(), Rational::zero());
        let g = korobeinik_series(&g1, &uc, 6).unwrap();
        let mut b0 = Vec::new();
        let mut two = Rational::one();
        for j in 0..=12 {
            b0.push(g1.taylor_coeff(j, &uc).unwrap().re / &two);
            two *= Rational::from_integer(2.into());
        }
        let p = ProblemData::new(vec![], b0, &u * Rational::from_integer(2.into()));
        let b = extend_b::<Rational>(&p, 5).unwrap().series;
        for k in 0..=5 {
            prop_assert_eq!(Complex::new(b.coeff(k, 0), Rational::zero()), g.coeff(k + 1, &uc).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn normal_form_identities(p in problem(10)) {
        let (_, pack) = exact_pack(&p, 4).unwrap();
        prop_assert!(verify_miniversal(&pack).unwrap().is_zero_to_eff());

        let w_then_u = pack.u_of_tau_w.substitute("W", &pack.w_of_tau_u).unwrap();
        prop_assert!(w_then_u.try_sub(&Series2::variable(pair("tau", "U"), 4, 1)).unwrap().is_zero_to_eff());
        let u_then_w = pack.w_of_tau_u.substitute("U", &pack.u_of_tau_w).unwrap();
        prop_assert!(u_then_w.try_sub(&Series2::variable(pair("tau", "W"), 4, 1)).unwrap().is_zero_to_eff());

        let v_emb = Series2::embed(&pack.v_of_w, pair("tau", "W"), 1).unwrap();
        let composed = pack.xi_of_tau_v.substitute("V", &v_emb).unwrap();
        prop_assert!(composed.try_sub(&pack.xi_of_tau_w).unwrap().is_zero_to_eff());

        let l11 = Coeff::to_f64(&pack.lambda1.coeff(1));
        prop_assert_eq!(l11.signum(), -Coeff::to_f64(&p.b11()).signum());
        let x0 = pack.xi_of_tau_w.section_at_zero(0);
        prop_assert_eq!(x0.truncate(x0.eff()), cusp_core::Series1::from_coeffs("W", 4, [(3, Radical::one())]).truncate(x0.eff()));
    }

    #[test]
    fn float_pack_tracks_exact_pack(p in problem(10)) {
        let (_, exact) = exact_pack(&p, 4).unwrap();
        let (_, float) = float_pack(&p, 4).unwrap();
        let pairs = [
            (&exact.h_of_tau_v, &float.h_of_tau_v),
            (&exact.xi_of_tau_w, &float.xi_of_tau_w),
            (&exact.u_of_tau_w, &float.u_of_tau_w),
            (&exact.w_of_tau_u, &float.w_of_tau_u),
        ];
        for (e, f) in pairs {
            for ((i, j), c) in e.terms() {
                let c = Coeff::to_f64(c);
                if c.abs() >= 1e-6 {
                    let rel = (f.coeff(i, j) - c).abs() / c.abs();
                    prop_assert!(rel <= 1e-9, "({}, {}): {} vs {}", i, j, f.coeff(i, j), c);
                }
            }
        }
    }
}

#[test]
fn nonsingular_and_degenerate_data_are_rejected() {
    let mut p = ProblemData::canonical();
    p.b0[2] = Rational::one();
    let err = exact_pack(&p, 4).unwrap_err().to_string();
    assert!(err.contains("b02"), "{err}");
    let mut p = ProblemData::canonical();
    p.b0[3] = Rational::zero();
    let err = exact_pack(&p, 4).unwrap_err().to_string();
    assert!(err.contains("b03 must be nonzero"), "{err}");
}

#[test]
fn canonical_sign_of_lambda_slope() {
    let (_, pack) = exact_pack(&ProblemData::canonical(), 4).unwrap();
    assert!(Coeff::to_f64(&pack.lambda1.coeff(1)).is_sign_negative());
    assert!(ProblemData::canonical().b11().is_positive());
}
