//! Finite-difference checks that reconstructed fields solve the original
//! quasilinear system, and that partial sums of `G` solve `h G_hh = G_uu`.

use crate::cusp_solver::CuspModel;
use crate::error::{Error, Result};
use crate::pde_series::{ComplexF, GSeries};

/// Which sheet of the reconstruction the field is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sheet {
    /// The unique root outside the three-root wedge.
    Single,
    /// Root number `i` (ascending `U`) inside the wedge.
    Root(usize),
}

/// Axis-aligned `(t, x)` sample grid and the step levels of the stencil.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub center: (f64, f64),
    pub half_width: (f64, f64),
    pub nodes: usize,
    /// Central-difference steps, coarse to fine.
    pub steps: Vec<f64>,
    pub sheet: Sheet,
}

impl Grid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.nodes.max(1);
        let lin = |c: f64, w: f64, k: usize| {
            if n == 1 {
                c
            } else {
                c - w + 2.0 * w * k as f64 / (n - 1) as f64
            }
        };
        (0..n)
            .flat_map(|i| {
                (0..n).map(move |j| {
                    (
                        lin(self.center.0, self.half_width.0, i),
                        lin(self.center.1, self.half_width.1, j),
                    )
                })
            })
            .collect()
    }
}

/// Residual statistics at one stencil step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepLevel {
    pub step: f64,
    pub mass_max: f64,
    pub mass_rms: f64,
    pub momentum_max: f64,
    pub momentum_rms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub grid: Grid,
    pub levels: Vec<StepLevel>,
    /// Log–log slope of the mass residual rms against the step.
    pub mass_order: f64,
    pub momentum_order: f64,
}

impl ResidualReport {
    pub fn finest(&self) -> &StepLevel {
        self.levels.last().expect("at least one level")
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "grid center ({:e}, {:e}) half-width ({:e}, {:e}) nodes {}x{}\n",
            self.grid.center.0,
            self.grid.center.1,
            self.grid.half_width.0,
            self.grid.half_width.1,
            self.grid.nodes,
            self.grid.nodes
        );
        for l in &self.levels {
            out.push_str(&format!(
                "  step {:e}: mass max {:e} rms {:e}; momentum max {:e} rms {:e}\n",
                l.step, l.mass_max, l.mass_rms, l.momentum_max, l.momentum_rms
            ));
        }
        out.push_str(&format!(
            "  empirical order: mass {:.3}, momentum {:.3}\n",
            self.mass_order, self.momentum_order
        ));
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("step,mass_max,mass_rms,momentum_max,momentum_rms\n");
        for l in &self.levels {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e}\n",
                l.step, l.mass_max, l.mass_rms, l.momentum_max, l.momentum_rms
            ));
        }
        out
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |a, p| {
        (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx))
    });
    num / den
}

fn stats(values: &[f64]) -> (f64, f64) {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len().max(1) as f64).sqrt();
    (max, rms)
}

/// Central-difference residuals of `h_t + (hv)_x` and `v_t + v v_x + α(h) h_x`
/// for an arbitrary field `(t, x) ↦ (h, v)`.
pub fn fd_system_residual(
    field: impl Fn(f64, f64) -> Result<(f64, f64)>,
    alpha: impl Fn(f64) -> f64,
    grid: &Grid,
) -> Result<ResidualReport> {
    if grid.steps.len() < 2 {
        return Err(Error::usage("need at least two step levels"));
    }
    let points = grid.points();
    let mut levels = Vec::with_capacity(grid.steps.len());
    for &s in &grid.steps {
        let mut mass = Vec::with_capacity(points.len());
        let mut momentum = Vec::with_capacity(points.len());
        for &(t, x) in &points {
            let (h, v) = field(t, x)?;
            let (hp_t, vp_t) = field(t + s, x)?;
            let (hm_t, vm_t) = field(t - s, x)?;
            let (hp_x, vp_x) = field(t, x + s)?;
            let (hm_x, vm_x) = field(t, x - s)?;
            let h_t = (hp_t - hm_t) / (2.0 * s);
            let v_t = (vp_t - vm_t) / (2.0 * s);
            let h_x = (hp_x - hm_x) / (2.0 * s);
            let v_x = (vp_x - vm_x) / (2.0 * s);
            let hv_x = (hp_x * vp_x - hm_x * vm_x) / (2.0 * s);
            mass.push(h_t + hv_x);
            momentum.push(v_t + v * v_x + alpha(h) * h_x);
        }
        let (mass_max, mass_rms) = stats(&mass);
        let (momentum_max, momentum_rms) = stats(&momentum);
        levels.push(StepLevel {
            step: s,
            mass_max,
            mass_rms,
            momentum_max,
            momentum_rms,
        });
    }
    let steps: Vec<f64> = levels.iter().map(|l| l.step).collect();
    let mass: Vec<f64> = levels.iter().map(|l| l.mass_rms).collect();
    let momentum: Vec<f64> = levels.iter().map(|l| l.momentum_rms).collect();
    Ok(ResidualReport {
        grid: grid.clone(),
        mass_order: loglog_slope(&steps, &mass),
        momentum_order: loglog_slope(&steps, &momentum),
        levels,
    })
}

/// Reads `(h, v)` on a fixed sheet; fails where the root count changes.
pub fn sheet_field(model: &CuspModel, sheet: Sheet, t: f64, x: f64) -> Result<(f64, f64)> {
    let branches = model.reconstruct(t, x)?;
    let pick = match sheet {
        Sheet::Single if branches.len() == 1 => &branches[0],
        Sheet::Root(i) if branches.len() == 3 && i < 3 => &branches[i],
        _ => {
            return Err(Error::usage(format!(
                "stencil point ({t:e}, {x:e}) has {} sheet(s): the grid crosses a fold curve",
                branches.len()
            )))
        }
    };
    Ok((pick.h, pick.v))
}

/// Finite-difference residuals of the reconstructed single-valued field.
pub fn system_residual(model: &CuspModel, grid: &Grid) -> Result<ResidualReport> {
    fd_system_residual(
        |t, x| sheet_field(model, grid.sheet, t, x),
        |h| model.problem.alpha_at(h),
        grid,
    )
}

/// Max over points and sheets of `|t(h, v) − t| + |x(h, v) − x|`.
pub fn hodograph_roundtrip(model: &CuspModel, points: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(t, x) in points {
        for b in model.reconstruct(t, x)? {
            let (tt, xx) = model.forward(b.h, b.v)?;
            worst = worst.max((tt - t).abs() + (xx - x).abs());
        }
    }
    Ok(worst)
}

/// Real `(h, u)` grid for the `G` equation.
#[derive(Clone, Debug, PartialEq)]
pub struct GGrid {
    pub h_range: (f64, f64),
    pub u_range: (f64, f64),
    pub nodes: usize,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GResidual {
    pub max: f64,
    pub rms: f64,
}

/// Central-difference residual of `h G_hh − G_uu` on the partial sums of `g`.
pub fn pde_grid_residual_g(g: &GSeries, grid: &GGrid) -> Result<GResidual> {
    let n = grid.nodes.max(2);
    let s = grid.step;
    let lin = |(a, b): (f64, f64), k: usize| a + (b - a) * k as f64 / (n - 1) as f64;
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        let h = lin(grid.h_range, i);
        for j in 0..n {
            let u = lin(grid.u_range, j);
            let reach = (g.g1.pole_distance(ComplexF::new(u, 0.0)) - s) / 2.0;
            if h.abs() + s >= reach * reach {
                return Err(Error::usage(format!(
                    "grid point (h, u) = ({h:e}, {u:e}) is outside the predicted convergence region"
                )));
            }
            let at = |dh: f64, du: f64| g.eval_f64(ComplexF::new(h + dh, 0.0), ComplexF::new(u + du, 0.0));
            let c = at(0.0, 0.0)?;
            let g_hh = (at(s, 0.0)? - c * 2.0 + at(-s, 0.0)?) / (s * s);
            let g_uu = (at(0.0, s)? - c * 2.0 + at(0.0, -s)?) / (s * s);
            values.push((g_hh * h - g_uu).norm());
        }
    }
    let (max, rms) = stats(&values);
    Ok(GResidual { max, rms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde_series::{korobeinik_series, G1Spec, ProblemData};
    use crate::scalar::{qi, Rational, ScalarKind};
    use num_complex::Complex;
    use num_traits::Zero;

    fn grid(center: (f64, f64), sheet: Sheet) -> Grid {
        Grid {
            center,
            half_width: (1e-3, 1e-3),
            nodes: 5,
            steps: vec![4e-5, 2e-5, 1e-5, 5e-6],
            sheet,
        }
    }

    #[test]
    fn constant_field_has_no_residual() {
        let r = fd_system_residual(|_, _| Ok((0.3, 1.5)), |_| 4.0, &grid((1.0, 1.0), Sheet::Single)).unwrap();
        assert!(r.finest().mass_max <= 1e-13 && r.finest().momentum_max <= 1e-13);
    }

    #[test]
    fn rarefaction_has_small_residual() {
        // h ≡ 0, v = x/t is an exact rarefaction
        let r = fd_system_residual(|t, x| Ok((0.0, x / t)), |_| 4.0, &grid((1.0, 0.3), Sheet::Single)).unwrap();
        assert!(r.finest().momentum_rms < 1e-9);
    }

    #[test]
    fn one_root_sheet() {
        let m = CuspModel::new(&ProblemData::canonical(), 6, ScalarKind::Exact).unwrap();
        let c = m.to_physical(-0.05, 0.0);
        let r = system_residual(&m, &grid(c, Sheet::Single)).unwrap();
        assert!((r.mass_order - 2.0).abs() < 0.2, "{}", r.summary());
        assert!((r.momentum_order - 2.0).abs() < 0.2, "{}", r.summary());
    }

    #[test]
    fn crossing_fold_is_rejected() {
        let m = CuspModel::new(&ProblemData::canonical(), 6, ScalarKind::Exact).unwrap();
        let c = m.to_physical(0.01, 0.0);
        let mut g = grid(c, Sheet::Root(1));
        g.half_width = (1e-4, 5e-3);
        assert!(matches!(system_residual(&m, &g), Err(Error::Usage(_))));
    }

    #[test]
    fn g_residual_exact_for_quadratic() {
        let g = korobeinik_series(
            &G1Spec::poly_real(&[qi(0), qi(0), qi(1)]),
            &Complex::new(Rational::zero(), Rational::zero()),
            5,
        )
        .unwrap();
        let grid = GGrid {
            h_range: (0.0, 0.5),
            u_range: (-1.0, 1.0),
            nodes: 6,
            step: 1e-3,
        };
        assert!(pde_grid_residual_g(&g, &grid).unwrap().max < 1e-9);
    }
}
