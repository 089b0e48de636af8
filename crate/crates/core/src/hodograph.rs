//! The map `(h, v) → (t, x)` generated by a potential `B`, its shifted
//! coordinates `(τ, ξ)` and the Jacobian.

use crate::error::Result;
use crate::pde_series::ProblemData;
use crate::scalar::Coeff;
use crate::series_algebra::Series2;

/// `t = B_V`, `x = −B − h B_h + v B_V` with `v = v* + V`, and the shifted
/// pair `τ = t − t*`, `ξ = x − x* − v*·τ`, all in `(h, V)`.
#[derive(Clone, Debug)]
pub struct HodographMapSeries<C> {
    pub t: Series2<C>,
    pub x: Series2<C>,
    pub tau: Series2<C>,
    pub xi: Series2<C>,
    pub jacobian: Series2<C>,
    pub t_star: C,
    pub x_star: C,
    pub v_star: C,
}

impl<C: Coeff> HodographMapSeries<C> {
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> HodographMapSeries<D> {
        HodographMapSeries {
            t: self.t.map(f),
            x: self.x.map(f),
            tau: self.tau.map(f),
            xi: self.xi.map(f),
            jacobian: self.jacobian.map(f),
            t_star: f(&self.t_star),
            x_star: f(&self.x_star),
            v_star: f(&self.v_star),
        }
    }
}

fn velocity<C: Coeff>(b: &Series2<C>, v_star: &C) -> Series2<C> {
    let cap = b.cap();
    Series2::constant(b.vars().clone(), cap, v_star.clone())
        .try_add(&Series2::variable(b.vars().clone(), cap, 1))
        .expect("same variables")
}

pub fn hodograph_map<C: Coeff>(b: &Series2<C>, p: &ProblemData) -> Result<HodographMapSeries<C>> {
    let vars = b.vars().clone();
    let cap = b.cap();
    let v_star = C::from_rational(&p.v_star);
    let t_star = b.coeff(0, 1);
    let x_star = t_star.clone() * v_star.clone() - b.coeff(0, 0);
    let bh = b.derivative_slot(0);
    let bv = b.derivative_slot(1);
    let h = Series2::variable(vars.clone(), cap, 0);
    let v = velocity(b, &v_star);
    let t = bv.clone();
    let x = v.try_mul(&bv)?.try_sub(b)?.try_sub(&h.try_mul(&bh)?)?;
    let tau = t.try_sub(&Series2::constant(vars.clone(), cap, t_star.clone()))?;
    let xi = x
        .try_sub(&Series2::constant(vars.clone(), cap, x_star.clone()))?
        .try_sub(&tau.scale(&v_star))?;
    let jacobian = jacobian_closed(b, p)?;
    Ok(HodographMapSeries {
        t,
        x,
        tau,
        xi,
        jacobian,
        t_star,
        x_star,
        v_star,
    })
}

/// `J = h (B_hV)² − α(h) (B_VV)²`.
pub fn jacobian_closed<C: Coeff>(b: &Series2<C>, p: &ProblemData) -> Result<Series2<C>> {
    let bhv = b.derivative_slot(0).derivative_slot(1);
    let bvv = b.derivative_slot(1).derivative_slot(1);
    let h = Series2::variable(b.vars().clone(), b.cap(), 0);
    h.try_mul(&bhv.try_mul(&bhv)?)?
        .try_sub(&p.alpha_series::<C>(b.cap()).try_mul(&bvv.try_mul(&bvv)?)?)
}

/// `J = x_h t_V − t_h x_V`, from the map itself.
pub fn jacobian_from_map<C: Coeff>(m: &HodographMapSeries<C>) -> Result<Series2<C>> {
    let (th, tv) = (m.t.derivative_slot(0), m.t.derivative_slot(1));
    let (xh, xv) = (m.x.derivative_slot(0), m.x.derivative_slot(1));
    xh.try_mul(&tv)?.try_sub(&th.try_mul(&xv)?)
}

/// Residuals of the linear hodograph system
/// `x_h − v t_h + α(h) t_V` and `x_V − v t_V + h t_h`.
pub fn linear_system_residual<C: Coeff>(
    m: &HodographMapSeries<C>,
    p: &ProblemData,
) -> Result<(Series2<C>, Series2<C>)> {
    let vars = m.t.vars().clone();
    let cap = m.t.cap();
    let (th, tv) = (m.t.derivative_slot(0), m.t.derivative_slot(1));
    let (xh, xv) = (m.x.derivative_slot(0), m.x.derivative_slot(1));
    let v = velocity(&m.t, &m.v_star);
    let h = Series2::variable(vars, cap, 0);
    let alpha = p.alpha_series::<C>(cap);
    let r1 = xh.try_sub(&v.try_mul(&th)?)?.try_add(&alpha.try_mul(&tv)?)?;
    let r2 = xv.try_sub(&v.try_mul(&tv)?)?.try_add(&h.try_mul(&th)?)?;
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde_series::{extend_b, hv};
    use crate::scalar::{q, qi, Rational};

    fn singular() -> ProblemData {
        ProblemData::new(
            vec![q(1, 2), qi(-3)],
            vec![q(2, 3), qi(5), qi(0), q(1, 7), q(-1, 3), qi(2), q(1, 5)],
            q(3, 4),
        )
    }

    #[test]
    fn linear_potential_is_constant_map() {
        let p = ProblemData::new(vec![], vec![qi(3), qi(2)], q(1, 2));
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let m = hodograph_map(&b, &p).unwrap();
        assert_eq!(m.t, Series2::constant(hv(), 6, p.t_star()).with_eff(5));
        assert_eq!(m.x, Series2::constant(hv(), 6, p.x_star()));
        let (r1, r2) = linear_system_residual(&m, &p).unwrap();
        assert!(r1.is_zero() && r2.is_zero());
    }

    #[test]
    fn tau_leading_terms() {
        let p = singular();
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let m = hodograph_map(&b, &p).unwrap();
        let b11 = p.b11();
        assert_eq!(m.tau.coeff(1, 0), b11);
        assert_eq!(m.tau.coeff(0, 2), b11.clone() / qi(4));
        assert_eq!(m.tau.coeff(0, 1), qi(0));
        assert_eq!(m.tau.coeff(0, 0), qi(0));
        assert_eq!(m.xi.coeff(0, 0), qi(0));
        assert_eq!(m.t.coeff(0, 0), p.t_star());
        assert_eq!(m.x.coeff(0, 0), p.x_star());
    }

    #[test]
    fn xi_leading_terms() {
        let p = singular();
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let m = hodograph_map(&b, &p).unwrap();
        let b11 = p.b11();
        let x0 = m.xi.section_at_zero(0);
        // ξ − Vτ at (0,3) is −b03 = −b11/12; ξ itself gets +3b03 from Vτ
        let v = Series2::variable(hv(), 6, 1);
        let rest = m.xi.try_sub(&v.try_mul(&m.tau).unwrap()).unwrap();
        assert_eq!(rest.coeff(0, 3), -b11.clone() / qi(12));
        assert_eq!(rest.coeff(1, 1), -qi(2) * b11.clone());
        assert_eq!(x0.coeff(3), b11 / qi(6));
    }

    #[test]
    fn jacobian_forms_agree_and_vanish_at_cusp() {
        let p = singular();
        let b = extend_b::<Rational>(&p, 8).unwrap().series;
        let m = hodograph_map(&b, &p).unwrap();
        assert_eq!(m.jacobian.coeff(0, 0), qi(0));
        let d = jacobian_from_map(&m).unwrap().try_sub(&m.jacobian).unwrap();
        assert!(d.is_zero_to_eff());
    }

    #[test]
    fn jacobian_nonsingular_probe() {
        let p = ProblemData::new(vec![], vec![qi(0), qi(1), qi(1)], qi(0));
        let b = extend_b::<Rational>(&p, 4).unwrap().series;
        assert_eq!(jacobian_closed(&b, &p).unwrap().coeff(0, 0), qi(-16));
    }

    #[test]
    fn perturbed_potential_breaks_first_equation() {
        let p = singular();
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        let bumped = b.try_add(&Series2::from_terms(hv(), 6, [((2, 0), qi(1))])).unwrap();
        let m = hodograph_map(&bumped, &p).unwrap();
        let (r1, r2) = linear_system_residual(&m, &p).unwrap();
        assert_eq!(r1.truncate(r1.eff()), Series2::from_terms(hv(), 6, [((1, 0), qi(-6))]).truncate(r1.eff()));
        assert!(r2.is_zero_to_eff());
    }
}
