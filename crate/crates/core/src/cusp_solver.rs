//! Real roots of the cusp cubic, reconstruction of `(h, v)` at physical
//! points, and the fold and zero-level curves.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::hodograph::HodographMapSeries;
use crate::normal_form::{eval1_checked, eval_checked, exact_pack, float_pack, NormalFormPack};
use crate::pde_series::ProblemData;
use crate::scalar::{Coeff, ScalarKind};
use crate::series_algebra::Series2;

/// A real root of `U³ + λ₁U + q` with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicRoot {
    pub value: f64,
    pub multiplicity: u8,
}

fn cubic(l1: f64, q: f64, u: f64) -> f64 {
    (u * u + l1) * u + q
}

fn polish(l1: f64, q: f64, mut u: f64) -> f64 {
    for _ in 0..4 {
        let d = 3.0 * u * u + l1;
        if d == 0.0 {
            break;
        }
        let step = cubic(l1, q, u) / d;
        let next = u - step;
        if !next.is_finite() || cubic(l1, q, next).abs() > cubic(l1, q, u).abs() {
            break;
        }
        u = next;
        if step.abs() <= f64::EPSILON * u.abs() {
            break;
        }
    }
    u
}

/// All real roots of `U³ + λ₁U + q = 0`, ascending.
///
/// The discriminant `Δ = −4λ₁³ − 27q²` is compared with the relative
/// boundary tolerance `1e−12·(4|λ₁|³ + 27q²)`; inside it the roots are
/// reported as a double root plus a simple one.
pub fn cusp_roots(lambda1: f64, q: f64) -> Vec<CubicRoot> {
    let simple = |value| CubicRoot {
        value,
        multiplicity: 1,
    };
    if lambda1 == 0.0 && q == 0.0 {
        return vec![CubicRoot {
            value: 0.0,
            multiplicity: 3,
        }];
    }
    let disc = -4.0 * lambda1.powi(3) - 27.0 * q * q;
    let scale = 4.0 * lambda1.abs().powi(3) + 27.0 * q * q;
    if disc.abs() <= 1e-12 * scale && lambda1 < 0.0 {
        let single = 3.0 * q / lambda1;
        let double = -1.5 * q / lambda1;
        let mut roots = vec![
            simple(polish(lambda1, q, single)),
            CubicRoot {
                value: double,
                multiplicity: 2,
            },
        ];
        roots.sort_by(|a, b| a.value.total_cmp(&b.value));
        return roots;
    }
    if disc > 0.0 {
        let r = 2.0 * (-lambda1 / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * lambda1) * (-3.0 / lambda1).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut roots: Vec<CubicRoot> = (0..3)
            .map(|k| simple(polish(lambda1, q, r * (phi - 2.0 * PI * k as f64 / 3.0).cos())))
            .collect();
        roots.sort_by(|a, b| a.value.total_cmp(&b.value));
        return roots;
    }
    // one real root; Cardano with the cube root taken on the non-cancelling side
    let half = q / 2.0;
    let s = (half * half + lambda1.powi(3) / 27.0).max(0.0).sqrt();
    let a = -(half.abs() + s).cbrt() * half.signum();
    let root = if a == 0.0 { 0.0 } else { a - lambda1 / (3.0 * a) };
    vec![simple(polish(lambda1, q, root))]
}

/// One reconstructed sheet value at a physical point.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionBranch {
    pub t: f64,
    pub x: f64,
    pub tau: f64,
    pub xi: f64,
    /// Position in the ascending root list.
    pub index: usize,
    pub u_root: f64,
    pub multiplicity: u8,
    pub h: f64,
    pub v: f64,
    pub inside_wedge: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    FoldPlus,
    FoldMinus,
    ZeroPlus,
    ZeroMinus,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::FoldPlus => "fold-plus",
            CurveKind::FoldMinus => "fold-minus",
            CurveKind::ZeroPlus => "zero-plus",
            CurveKind::ZeroMinus => "zero-minus",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub tau: f64,
    pub xi: f64,
    pub kind: CurveKind,
}

/// Double-precision view of a singular solution near its cusp point.
#[derive(Clone, Debug)]
pub struct CuspModel {
    pub pack: NormalFormPack<f64>,
    pub map: HodographMapSeries<f64>,
    pub problem: ProblemData,
    h_v: Series2<f64>,
}

impl CuspModel {
    /// Builds the pack in the requested arithmetic and converts to floats.
    pub fn new(p: &ProblemData, order: usize, kind: ScalarKind) -> Result<Self> {
        let (map, pack) = match kind {
            ScalarKind::Float => float_pack(p, order)?,
            ScalarKind::Exact | ScalarKind::Radical => {
                let (m, pack) = exact_pack(p, order)?;
                (m.map(Coeff::to_f64), pack.to_f64())
            }
        };
        Ok(Self::from_parts(p, map, pack))
    }

    pub fn from_parts(
        p: &ProblemData,
        map: HodographMapSeries<f64>,
        pack: NormalFormPack<f64>,
    ) -> Self {
        let h_v = pack.h_of_tau_v.derivative_slot(1);
        CuspModel {
            pack,
            map,
            problem: p.clone(),
            h_v,
        }
    }

    pub fn with_validity_tol(mut self, tol: f64) -> Self {
        self.pack.validity_tol = tol;
        self
    }

    fn tol(&self) -> f64 {
        self.pack.validity_tol
    }

    pub fn t_star(&self) -> f64 {
        self.map.t_star
    }

    pub fn x_star(&self) -> f64 {
        self.map.x_star
    }

    pub fn v_star(&self) -> f64 {
        self.map.v_star
    }

    /// `(τ, ξ) = (t − t*, x − x* − v*(t − t*))`.
    pub fn to_cusp_coords(&self, t: f64, x: f64) -> (f64, f64) {
        let tau = t - self.t_star();
        (tau, x - self.x_star() - self.v_star() * tau)
    }

    pub fn to_physical(&self, tau: f64, xi: f64) -> (f64, f64) {
        (tau + self.t_star(), xi + self.x_star() + self.v_star() * tau)
    }

    pub fn lambdas(&self, tau: f64) -> Result<(f64, f64)> {
        Ok((
            eval1_checked(&self.pack.lambda1, tau, self.tol())?,
            eval1_checked(&self.pack.lambda2, tau, self.tol())?,
        ))
    }

    /// Sign of `τ` on the side where `λ₁ < 0` (three sheets, real zero curves).
    pub fn multivalued_side(&self) -> f64 {
        -self.pack.lambda1.coeff(1).signum()
    }

    /// Half-width `(−4λ₁³/27)^{1/2}` of the three-root wedge at `τ`; zero on the other side.
    pub fn wedge_half_width(&self, tau: f64) -> Result<f64> {
        let (l1, _) = self.lambdas(tau)?;
        Ok(if l1 < 0.0 {
            (-4.0 * l1.powi(3) / 27.0).sqrt()
        } else {
            0.0
        })
    }

    /// All sheets through the physical point `(t, x)`, ordered by ascending `U`.
    pub fn reconstruct(&self, t: f64, x: f64) -> Result<Vec<SolutionBranch>> {
        let (tau, xi) = self.to_cusp_coords(t, x);
        let (l1, l2) = self.lambdas(tau)?;
        let roots = cusp_roots(l1, l2 - xi);
        let inside_wedge = roots.len() == 3;
        roots
            .iter()
            .enumerate()
            .map(|(index, r)| {
                let w = eval_checked(&self.pack.w_of_tau_u, tau, r.value, self.tol())?;
                let big_v = eval1_checked(&self.pack.v_of_w, w, self.tol())?;
                let h = eval_checked(&self.pack.h_of_tau_v, tau, big_v, self.tol())?;
                Ok(SolutionBranch {
                    t,
                    x,
                    tau,
                    xi,
                    index,
                    u_root: r.value,
                    multiplicity: r.multiplicity,
                    h,
                    v: self.v_star() + big_v,
                    inside_wedge,
                })
            })
            .collect()
    }

    /// Evaluates `(t, x)` of the hodograph map at `(h, v)`.
    pub fn forward(&self, h: f64, v: f64) -> Result<(f64, f64)> {
        let big_v = v - self.v_star();
        Ok((
            eval_checked(&self.map.t, h, big_v, self.tol())?,
            eval_checked(&self.map.x, h, big_v, self.tol())?,
        ))
    }

    /// Fold (discriminant) curves `ξ = λ₂ ± (−4λ₁³/27)^{1/2}`.
    pub fn fold_curves(&self, taus: &[f64]) -> Result<Vec<CurveSample>> {
        let mut out = Vec::with_capacity(2 * taus.len());
        for &tau in taus {
            let (l1, l2) = self.lambdas(tau)?;
            if l1 >= 0.0 {
                return Err(Error::domain(format!(
                    "fold curves need λ1(τ) < 0; τ = {tau:e} is on the single-root side"
                )));
            }
            let half = (-4.0 * l1.powi(3) / 27.0).sqrt();
            out.push(CurveSample {
                tau,
                xi: l2 + half,
                kind: CurveKind::FoldPlus,
            });
            out.push(CurveSample {
                tau,
                xi: l2 - half,
                kind: CurveKind::FoldMinus,
            });
        }
        Ok(out)
    }

    fn newton_zero(&self, tau: f64, seed: f64) -> Result<f64> {
        let mut v = seed;
        for _ in 0..50 {
            let f = eval_checked(&self.pack.h_of_tau_v, tau, v, self.tol())?;
            if f.abs() <= 1e-13 * tau.abs().max(f64::MIN_POSITIVE) {
                return Ok(v);
            }
            let d = self.h_v.eval_f64(tau, v);
            if d == 0.0 {
                break;
            }
            v -= f / d;
        }
        let f = eval_checked(&self.pack.h_of_tau_v, tau, v, self.tol())?;
        if f.abs() <= 1e-13 {
            Ok(v)
        } else {
            Err(Error::domain(format!(
                "Newton for h(τ, V) = 0 did not converge at τ = {tau:e}"
            )))
        }
    }

    /// Zero-level curves of `h`: `ξ(τ, V±(τ))` with `h(τ, V±(τ)) = 0`.
    pub fn zero_curves(&self, taus: &[f64]) -> Result<Vec<CurveSample>> {
        let b11 = self.pack.b11;
        let mut out = Vec::with_capacity(2 * taus.len());
        for &tau in taus {
            if tau == 0.0 || tau / b11 <= 0.0 {
                return Err(Error::domain(format!(
                    "h(τ, V) = 0 has no real pair of roots at τ = {tau:e}"
                )));
            }
            let seed = 2.0 * (tau / b11).sqrt();
            let mut xi: Vec<f64> = [seed, -seed]
                .iter()
                .map(|s| {
                    let v = self.newton_zero(tau, *s)?;
                    eval_checked(&self.pack.xi_of_tau_v, tau, v, self.tol())
                })
                .collect::<Result<_>>()?;
            xi.sort_by(f64::total_cmp);
            out.push(CurveSample {
                tau,
                xi: xi[1],
                kind: CurveKind::ZeroPlus,
            });
            out.push(CurveSample {
                tau,
                xi: xi[0],
                kind: CurveKind::ZeroMinus,
            });
        }
        Ok(out)
    }
}

/// CSV with header `tau,xi,kind`.
pub fn curves_csv(samples: &[CurveSample]) -> String {
    let mut out = String::from("tau,xi,kind\n");
    for s in samples {
        out.push_str(&format!("{:e},{:e},{}\n", s.tau, s.xi, s.kind));
    }
    out
}

/// CSV with header `t,x,branch,h,v,mult,inside_wedge`.
pub fn branches_csv(branches: &[SolutionBranch]) -> String {
    let mut out = String::from("t,x,branch,h,v,mult,inside_wedge\n");
    for b in branches {
        out.push_str(&format!(
            "{:e},{:e},{},{:e},{:e},{},{}\n",
            b.t, b.x, b.index, b.h, b.v, b.multiplicity, b.inside_wedge
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(r: &[CubicRoot]) -> Vec<(f64, u8)> {
        r.iter().map(|c| (c.value, c.multiplicity)).collect()
    }

    #[test]
    fn pure_cube() {
        assert_eq!(values(&cusp_roots(0.0, -8.0)), vec![(2.0, 1)]);
        assert_eq!(values(&cusp_roots(0.0, 0.0)), vec![(0.0, 3)]);
    }

    #[test]
    fn boundary_double_root() {
        let r = values(&cusp_roots(-3.0, 2.0));
        assert_eq!(r.len(), 2);
        assert!((r[0].0 + 2.0).abs() < 1e-14 && r[0].1 == 1);
        assert!((r[1].0 - 1.0).abs() < 1e-14 && r[1].1 == 2);
    }

    #[test]
    fn three_roots_inside() {
        let r = values(&cusp_roots(-3.0, 0.0));
        let s3 = 3f64.sqrt();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-s3, 0.0, s3]) {
            assert!((got.0 - want).abs() < 1e-14);
        }
    }

    #[test]
    fn tiny_scale_classification() {
        // wedge at λ₁ = −3e−6: half-width 2e−9
        let l1 = -3e-6;
        assert_eq!(cusp_roots(l1, 1e-9).len(), 3);
        assert_eq!(cusp_roots(l1, 3e-9).len(), 1);
    }

    #[test]
    fn canonical_curves_exact_laws() {
        let m = CuspModel::new(&ProblemData::canonical(), 10, ScalarKind::Exact).unwrap();
        assert_eq!(m.multivalued_side(), 1.0);
        for tau in [1e-2, 1e-3, 1e-4] {
            let fold = m.fold_curves(&[tau]).unwrap();
            let zero = m.zero_curves(&[tau]).unwrap();
            let fold_law = 4.0 / 3.0 * (tau.powi(3) / 5.0).sqrt();
            let zero_law = 4.0 / 3.0 * tau.powi(3).sqrt();
            assert!((fold[0].xi / fold_law - 1.0).abs() < 1e-12);
            assert!((zero[0].xi / zero_law - 1.0).abs() < 1e-12);
            assert!((fold[1].xi + fold[0].xi).abs() < 1e-18);
        }
        assert!(matches!(m.fold_curves(&[-1e-3]), Err(Error::Domain(_))));
        assert!(matches!(m.zero_curves(&[-1e-3]), Err(Error::Domain(_))));
    }

    #[test]
    fn base_point_single_branch() {
        let m = CuspModel::new(&ProblemData::canonical(), 6, ScalarKind::Exact).unwrap();
        let b = m.reconstruct(m.t_star(), m.x_star()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].h, 0.0);
        assert_eq!(b[0].v, m.v_star());
    }

    #[test]
    fn three_branches_and_roundtrip() {
        let m = CuspModel::new(&ProblemData::canonical(), 6, ScalarKind::Exact).unwrap();
        let (t, x) = m.to_physical(1e-4, 0.0);
        let branches = m.reconstruct(t, x).unwrap();
        assert_eq!(branches.len(), 3);
        for b in &branches {
            let (tt, xx) = m.forward(b.h, b.v).unwrap();
            assert!((tt - t).abs() + (xx - x).abs() <= 1e-10);
        }
        let (t, x) = m.to_physical(1e-4, 1e-3);
        assert_eq!(m.reconstruct(t, x).unwrap().len(), 1);
    }

    #[test]
    fn csv_headers() {
        assert!(curves_csv(&[]).starts_with("tau,xi,kind\n"));
        assert!(branches_csv(&[]).starts_with("t,x,branch,h,v,mult,inside_wedge\n"));
    }
}
