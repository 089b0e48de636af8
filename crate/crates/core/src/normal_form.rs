//! Reduction of the shifted hodograph map `(τ, ξ)` to the cusp form
//! `ξ = U³ + λ₁(τ) U + λ₂(τ)`.
//!
//! Chain: `h(τ, V)` by implicit inversion of `τ(h, V)`; `ξ(τ, V)` by
//! substitution; `V(W)` normalising `ξ(0, V)` to `W³`; `ξ(τ, W)`; then an
//! order-by-order fit of `λ₁, λ₂, U(τ, W)` and the inverse `W(τ, U)`.

use crate::error::{Error, Result};
use crate::hodograph::{hodograph_map, HodographMapSeries};
use crate::pde_series::{extend_b, ProblemData};
use crate::scalar::{Coeff, Radical};
use crate::series_algebra::{pair, Series1, Series2, TableCoeff};

/// Extra orders carried through the chain so that every stored component
/// is exact to the requested order.
pub const GUARD_ORDERS: usize = 5;

/// Default relative tolerance of the validity disc.
pub const DEFAULT_VALIDITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NormalFormPack<C> {
    pub h_of_tau_v: Series2<C>,
    pub xi_of_tau_v: Series2<C>,
    pub v_of_w: Series1<C>,
    pub xi_of_tau_w: Series2<C>,
    pub lambda1: Series1<C>,
    pub lambda2: Series1<C>,
    pub u_of_tau_w: Series2<C>,
    pub w_of_tau_u: Series2<C>,
    pub b11: C,
    /// Relative tolerance defining the validity disc of numeric evaluation.
    pub validity_tol: f64,
}

/// Builds the pack from a hodograph map. Requires `τ_h(0,0) = b11 ≠ 0` and
/// a nonzero cubic coefficient of `ξ(0, V)`.
pub fn build_normal_form<C: Coeff>(m: &HodographMapSeries<C>) -> Result<NormalFormPack<C>> {
    let b11 = m.tau.coeff(1, 0);
    if b11.is_zero() {
        return Err(Error::degenerate("b11 must be nonzero"));
    }
    if !m.tau.coeff(0, 1).is_zero() || !m.tau.coeff(0, 0).is_zero() {
        return Err(Error::usage(
            "Jacobian must vanish at base point: b02 must be 0",
        ));
    }
    let h_of_tau_v = m.tau.implicit_solve("h", "tau")?;
    let xi_of_tau_v = m.xi.substitute("h", &h_of_tau_v)?;

    let x0 = xi_of_tau_v.section_at_zero(0);
    if x0.coeff(3).is_zero() {
        return Err(Error::degenerate("b03 must be nonzero"));
    }
    let v_of_w = x0.real_cube_root_normalize("W")?;
    let tw = pair("tau", "W");
    let v_embedded = Series2::embed(&v_of_w, tw.clone(), 1)?;
    let xi_of_tau_w = xi_of_tau_v.substitute("V", &v_embedded)?;

    let (lambda1, lambda2, u_of_tau_w) = match_cusp(&xi_of_tau_w)?;
    let w_of_tau_u = u_of_tau_w.implicit_solve("W", "U")?;
    Ok(NormalFormPack {
        h_of_tau_v,
        xi_of_tau_v,
        v_of_w,
        xi_of_tau_w,
        lambda1,
        lambda2,
        u_of_tau_w,
        w_of_tau_u,
        b11,
        validity_tol: DEFAULT_VALIDITY_TOL,
    })
}

/// `U³ + λ₁ U + λ₂` as a series in `(τ, W)`.
fn cusp_model<C: Coeff>(
    u: &Series2<C>,
    lambda1: &Series1<C>,
    lambda2: &Series1<C>,
) -> Result<Series2<C>> {
    let vars = u.vars().clone();
    let l1 = Series2::embed(lambda1, vars.clone(), 0)?;
    let l2 = Series2::embed(lambda2, vars, 0)?;
    u.try_mul(u)?.try_mul(u)?.try_add(&l1.try_mul(u)?)?.try_add(&l2)
}

/// Solves `ξ(τ, W) = U³ + λ₁U + λ₂` order by order in `τ`. At order `m`
/// the `τ^m` row `D(W)` of the current mismatch equals
/// `3W²·U_m(W) + λ_{m1} W + λ_{m2}`.
fn match_cusp<C: Coeff>(xi: &Series2<C>) -> Result<(Series1<C>, Series1<C>, Series2<C>)> {
    let cap = xi.cap();
    let eff = xi.eff();
    let vars = xi.vars().clone();
    let mut l1 = Series1::zero(vars[0].clone(), cap);
    let mut l2 = Series1::zero(vars[0].clone(), cap);
    let mut u = Series2::variable(vars.clone(), cap, 1);
    let three = C::from_int(3);
    for order in 1..=cap {
        let mismatch = xi.try_sub(&cusp_model(&u, &l1, &l2)?)?;
        let row = mismatch.slice(0, order);
        l2 = l2.try_add(&Series1::from_coeffs(vars[0].clone(), cap, [(order, row.coeff(0))]))?;
        l1 = l1.try_add(&Series1::from_coeffs(vars[0].clone(), cap, [(order, row.coeff(1))]))?;
        let correction = row
            .terms()
            .filter(|(k, _)| *k >= 2)
            .map(|(k, c)| ((order, k - 2), c.clone() / three.clone()))
            .collect::<Vec<_>>();
        u = u.try_add(&Series2::from_terms(vars.clone(), cap, correction))?;
    }
    Ok((
        l1.with_eff(eff.saturating_sub(1)),
        l2.with_eff(eff),
        u.with_eff(eff.saturating_sub(2)),
    ))
}

/// `U³ + λ₁U + λ₂ − ξ(τ, W)`; vanishes to effective order for a consistent pack.
pub fn verify_miniversal<C: Coeff>(pack: &NormalFormPack<C>) -> Result<Series2<C>> {
    cusp_model(&pack.u_of_tau_w, &pack.lambda1, &pack.lambda2)?.try_sub(&pack.xi_of_tau_w)
}

impl<C: Coeff> NormalFormPack<C> {
    /// Every component truncated to `order`, with effective order at most `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let t2 = |s: &Series2<C>| s.truncate(order);
        let t1 = |s: &Series1<C>| s.truncate(order);
        NormalFormPack {
            h_of_tau_v: t2(&self.h_of_tau_v),
            xi_of_tau_v: t2(&self.xi_of_tau_v),
            v_of_w: t1(&self.v_of_w),
            xi_of_tau_w: t2(&self.xi_of_tau_w),
            lambda1: t1(&self.lambda1),
            lambda2: t1(&self.lambda2),
            u_of_tau_w: t2(&self.u_of_tau_w),
            w_of_tau_u: t2(&self.w_of_tau_u),
            b11: self.b11.clone(),
            validity_tol: self.validity_tol,
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> NormalFormPack<D> {
        NormalFormPack {
            h_of_tau_v: self.h_of_tau_v.map(f),
            xi_of_tau_v: self.xi_of_tau_v.map(f),
            v_of_w: self.v_of_w.map(f),
            xi_of_tau_w: self.xi_of_tau_w.map(f),
            lambda1: self.lambda1.map(f),
            lambda2: self.lambda2.map(f),
            u_of_tau_w: self.u_of_tau_w.map(f),
            w_of_tau_u: self.w_of_tau_u.map(f),
            b11: f(&self.b11),
            validity_tol: self.validity_tol,
        }
    }

    pub fn to_f64(&self) -> NormalFormPack<f64> {
        self.map(Coeff::to_f64)
    }

    /// Evaluates `h(τ, V)`; fails outside the validity disc of the series.
    pub fn h_of_physical(&self, tau: f64, v: f64) -> Result<f64> {
        eval_checked(&self.h_of_tau_v, tau, v, self.validity_tol)
    }
}

/// Evaluates a bivariate series after checking the polydisc validity bound.
pub fn eval_checked<C: Coeff>(s: &Series2<C>, x: f64, y: f64, tol: f64) -> Result<f64> {
    let radius = s.validity_radius(tol);
    let at = x.abs().max(y.abs());
    if !(at < radius) {
        return Err(Error::domain(format!(
            "({a}, {b}) = ({x:e}, {y:e}) lies outside the validity disc: max(|{a}|, |{b}|) = {at:e} ≥ {radius:e}",
            a = s.vars()[0],
            b = s.vars()[1]
        )));
    }
    Ok(s.eval_f64(x, y))
}

/// Evaluates a univariate series after checking its validity radius.
pub fn eval1_checked<C: Coeff>(s: &Series1<C>, x: f64, tol: f64) -> Result<f64> {
    let radius = s.validity_radius(tol);
    if !(x.abs() < radius) {
        return Err(Error::domain(format!(
            "|{}| = {:e} lies outside the validity radius {radius:e}",
            s.var(),
            x.abs()
        )));
    }
    Ok(s.eval_f64(x))
}

/// Builds `B` with guard orders, maps it and reduces it, in exact
/// arithmetic with the cube-root radical adjoined. Components are exact to
/// `order` and truncated there.
pub fn exact_pack(p: &ProblemData, order: usize) -> Result<(HodographMapSeries<Radical>, NormalFormPack<Radical>)> {
    p.check_singular()?;
    let work = order + GUARD_ORDERS;
    let b = extend_b::<Radical>(p, work)?.series;
    let m = hodograph_map(&b, p)?;
    let pack = build_normal_form(&m)?;
    Ok((truncate_map(&m, order), pack.truncated(order)))
}

/// As [`exact_pack`] but in double precision throughout.
pub fn float_pack(p: &ProblemData, order: usize) -> Result<(HodographMapSeries<f64>, NormalFormPack<f64>)> {
    p.check_singular()?;
    let work = order + GUARD_ORDERS;
    let b = extend_b::<f64>(p, work)?.series;
    let m = hodograph_map(&b, p)?;
    let pack = build_normal_form(&m)?;
    Ok((truncate_map(&m, order), pack.truncated(order)))
}

fn truncate_map<C: Coeff>(m: &HodographMapSeries<C>, order: usize) -> HodographMapSeries<C> {
    HodographMapSeries {
        t: m.t.truncate(order),
        x: m.x.truncate(order),
        tau: m.tau.truncate(order),
        xi: m.xi.truncate(order),
        jacobian: m.jacobian.truncate(order),
        t_star: m.t_star.clone(),
        x_star: m.x_star.clone(),
        v_star: m.v_star.clone(),
    }
}

/// Named series tables of a pack, in a stable order.
pub fn pack_tables<C: TableCoeff>(pack: &NormalFormPack<C>) -> Vec<(&'static str, String)> {
    vec![
        ("h_of_tau_v", pack.h_of_tau_v.to_table()),
        ("xi_of_tau_v", pack.xi_of_tau_v.to_table()),
        ("v_of_w", pack.v_of_w.to_table()),
        ("xi_of_tau_w", pack.xi_of_tau_w.to_table()),
        ("lambda1", pack.lambda1.to_table()),
        ("lambda2", pack.lambda2.to_table()),
        ("u_of_tau_w", pack.u_of_tau_w.to_table()),
        ("w_of_tau_u", pack.w_of_tau_u.to_table()),
    ]
}
