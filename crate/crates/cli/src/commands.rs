use std::path::PathBuf;

use cusp_core::cusp_solver::{branches_csv, curves_csv, CuspModel};
use cusp_core::hodograph::{hodograph_map, jacobian_from_map, linear_system_residual, HodographMapSeries};
use cusp_core::korobeinik::{
    bidisc_check, cauchy_bound_check, conjecture_probe, radius_probe, reports_csv, BidiscReport,
    ConvergenceReport, TAIL,
};
use cusp_core::normal_form::{exact_pack, float_pack, pack_tables, verify_miniversal};
use cusp_core::pde_series::{extend_b, low_order_relations, ComplexQ, G1Spec, ProblemData};
use cusp_core::series_algebra::TableCoeff;
use cusp_core::verification::{hodograph_roundtrip, system_residual, Grid, Sheet};
use cusp_core::{Coeff, Error, Rational, ScalarKind, Series2};
use num_complex::Complex;
use num_traits::Zero;

use crate::config::{Config, ProblemSpec};
use crate::error::CliResult;
use crate::output::Output;

/// Settings shared by every command after flags and file are merged.
pub struct Run {
    pub cfg: Config,
    pub mode: ScalarKind,
    pub out: Output,
}

impl Run {
    pub fn new(cfg: Config, mode: Option<ScalarKind>, out: Option<PathBuf>) -> CliResult<Self> {
        let mode = cfg.mode(mode)?;
        let out = Output::new(&cfg.out_dir(out), &cfg.digest)?;
        Ok(Run { cfg, mode, out })
    }

    fn singular_problem(&self) -> CliResult<ProblemSpec> {
        let spec = self.cfg.problem()?;
        self.cfg.check_singular(&spec)?;
        Ok(spec)
    }

    fn model(&self) -> CliResult<CuspModel> {
        let spec = self.singular_problem()?;
        let order = self.cfg.order()?;
        let mut model = CuspModel::new(&spec.data, order, self.mode).map_err(|e| self.cfg.whole(e))?;
        if let Some(tol) = spec.validity_tol {
            model = model.with_validity_tol(tol);
        }
        Ok(model)
    }
}

fn map_tables<C: TableCoeff>(m: &HodographMapSeries<C>) -> [(&'static str, String); 5] {
    [
        ("t.txt", m.t.to_table()),
        ("x.txt", m.x.to_table()),
        ("tau.txt", m.tau.to_table()),
        ("xi.txt", m.xi.to_table()),
        ("jacobian.txt", m.jacobian.to_table()),
    ]
}

fn expand_in<C: TableCoeff>(run: &mut Run, p: &ProblemData, order: usize) -> CliResult<()> {
    let whole = |e| run.cfg.whole(e);
    let b = extend_b::<C>(p, order).map_err(whole)?.series;
    let m = hodograph_map(&b, p).map_err(whole)?;
    let dj = jacobian_from_map(&m).and_then(|j| j.try_sub(&m.jacobian)).map_err(whole)?;
    let (r1, r2) = linear_system_residual(&m, p).map_err(whole)?;
    run.out.write("b.txt", &b.to_table())?;
    for (name, table) in map_tables(&m) {
        run.out.write(name, &table)?;
    }
    println!("{}", check_line(dj.is_zero_to_eff(), "Jacobian: closed form equals x_h t_V − t_h x_V"));
    println!(
        "{}",
        check_line(
            r1.is_zero_to_eff() && r2.is_zero_to_eff(),
            "(t, x) solve the linear hodograph system"
        )
    );
    Ok(())
}

fn check_line(ok: bool, what: &str) -> String {
    format!("[{}] {what}", if ok { "pass" } else { "FAIL" })
}

/// Relations need the `h`-rows up to total degree 5.
const RELATION_ORDER: usize = 5;

pub fn expand(run: &mut Run) -> CliResult<()> {
    let spec = run.singular_problem()?;
    let order = run.cfg.order()?;
    let p = &spec.data;
    let b = extend_b::<Rational>(p, order.max(RELATION_ORDER)).map_err(|e| run.cfg.whole(e))?.series;
    let relations = low_order_relations(&b, p);
    for r in &relations {
        println!("{}", check_line(r.holds(), &format!("{}  ({} vs {})", r.name, r.lhs, r.rhs)));
    }
    match run.mode {
        ScalarKind::Float => expand_in::<f64>(run, p, order)?,
        _ => expand_in::<Rational>(run, p, order)?,
    }
    let failed = relations.iter().filter(|r| !r.holds()).count();
    if failed > 0 {
        return Err(run.cfg.whole(Error::usage(format!("{failed} relation(s) failed"))));
    }
    Ok(())
}

pub fn normalform(run: &mut Run) -> CliResult<()> {
    let spec = run.singular_problem()?;
    let order = run.cfg.order()?;
    let whole = |e| run.cfg.whole(e);
    let (tables, identity, l11) = match run.mode {
        ScalarKind::Float => {
            let (_, pack) = float_pack(&spec.data, order).map_err(whole)?;
            let res = verify_miniversal(&pack).map_err(whole)?;
            let worst = max_abs(&res);
            println!("miniversal residual: max |coefficient| {worst:e} through order {}", res.eff());
            (pack_tables(&pack), worst <= 1e-9, pack.lambda1.coeff(1))
        }
        _ => {
            let (_, pack) = exact_pack(&spec.data, order).map_err(whole)?;
            let res = verify_miniversal(&pack).map_err(whole)?;
            println!("miniversal residual: exactly zero through order {}: {}", res.eff(), res.is_zero_to_eff());
            (pack_tables(&pack), res.is_zero_to_eff(), Coeff::to_f64(&pack.lambda1.coeff(1)))
        }
    };
    for (name, table) in tables {
        run.out.write(&format!("{name}.txt"), &table)?;
    }
    println!("λ1 slope {l11:e}; three sheets for sign(τ) = {:+}", -l11.signum());
    if !identity {
        return Err(run.cfg.whole(Error::domain("miniversal identity does not hold")));
    }
    Ok(())
}

fn max_abs(s: &Series2<f64>) -> f64 {
    s.terms()
        .filter(|((i, j), _)| i + j <= s.eff())
        .fold(0.0, |m, (_, c)| m.max(c.abs()))
}

pub fn solve(run: &mut Run) -> CliResult<()> {
    let model = run.model()?;
    let section = run.cfg.section(&run.cfg.raw.solve, "solve")?;
    let mut rows = Vec::new();
    for pt in &section.get_ref().points {
        let at = |e| run.cfg.at(&pt.span(), e);
        let (t, x) = pt.get_ref();
        let (t, x) = (t.real().map_err(at)?, x.real().map_err(at)?);
        rows.extend(model.reconstruct(t, x).map_err(at)?);
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|b| (b.t, b.x)).collect();
    let roundtrip = hodograph_roundtrip(&model, &points).map_err(|e| run.cfg.whole(e))?;
    run.out.write("branches.csv", &branches_csv(&rows))?;
    println!("{} branch row(s); max roundtrip error {roundtrip:e}", rows.len());
    Ok(())
}

pub fn curves(run: &mut Run) -> CliResult<()> {
    let model = run.model()?;
    let section = run.cfg.section(&run.cfg.raw.curves, "curves")?;
    let mut samples = Vec::new();
    for tau in &section.get_ref().tau {
        let at = |e| run.cfg.at(&tau.span(), e);
        let t = tau.get_ref().real().map_err(at)?;
        samples.extend(model.fold_curves(&[t]).map_err(at)?);
        samples.extend(model.zero_curves(&[t]).map_err(at)?);
    }
    run.out.write("curves.csv", &curves_csv(&samples))?;
    println!("{} curve sample(s)", samples.len());
    Ok(())
}

fn parse_sheet(s: &str) -> cusp_core::Result<Sheet> {
    match s {
        "single" => Ok(Sheet::Single),
        "root0" => Ok(Sheet::Root(0)),
        "root1" => Ok(Sheet::Root(1)),
        "root2" => Ok(Sheet::Root(2)),
        other => Err(Error::usage(format!(
            "sheet must be one of single, root0, root1, root2; got {other:?}"
        ))),
    }
}

pub fn verify(run: &mut Run) -> CliResult<()> {
    let model = run.model()?;
    let cfg = &run.cfg;
    let v = cfg.section(&cfg.raw.verify, "verify")?.get_ref();
    let (tau, xi) = v.center.get_ref();
    let at_center = |e| cfg.at(&v.center.span(), e);
    let (tau, xi) = (tau.real().map_err(at_center)?, xi.real().map_err(at_center)?);
    let sheet = match &v.sheet {
        None => Sheet::Single,
        Some(s) => parse_sheet(s.get_ref()).map_err(|e| cfg.at(&s.span(), e))?,
    };
    let nodes = match &v.nodes {
        None => 5,
        Some(n) if *n.get_ref() >= 1 => *n.get_ref() as usize,
        Some(n) => return Err(cfg.at(&n.span(), Error::usage("nodes must be at least 1"))),
    };
    let steps = v.steps.get_ref().clone();
    if steps.len() < 3 || steps.iter().any(|s| !(*s > 0.0)) {
        return Err(cfg.at(
            &v.steps.span(),
            Error::usage("steps needs at least three positive values for an order estimate"),
        ));
    }
    let grid = Grid {
        center: model.to_physical(tau, xi),
        half_width: *v.half_width.get_ref(),
        nodes,
        steps,
        sheet,
    };
    let report = system_residual(&model, &grid).map_err(|e| cfg.at(&v.center.span(), e))?;
    let roundtrip = hodograph_roundtrip(&model, &grid.points()).map_err(|e| cfg.at(&v.center.span(), e))?;
    print!("{}", report.summary());
    println!("  max roundtrip error {roundtrip:e}");
    run.out.write("residual.csv", &report.csv())?;
    Ok(())
}

fn probe(
    g1: &G1Spec,
    alpha: Option<&[Rational]>,
    u: &ComplexQ,
    terms: usize,
) -> cusp_core::Result<ConvergenceReport> {
    match alpha {
        None => radius_probe(g1, u, terms),
        Some(a) => {
            if !u.im.is_zero() {
                return Err(Error::usage("the recurrence probe needs real u"));
            }
            Ok(conjecture_probe(a, g1, terms, std::slice::from_ref(&u.re))?.remove(0))
        }
    }
}

pub fn korobeinik(run: &mut Run) -> CliResult<()> {
    let cfg = &run.cfg;
    let k = cfg.section(&cfg.raw.korobeinik, "korobeinik")?.get_ref();
    let g1 = cfg.g1(k)?;
    let terms = match &k.terms {
        None => 60,
        Some(t) if *t.get_ref() >= 2 * TAIL as i64 => *t.get_ref() as usize,
        Some(t) => {
            return Err(cfg.at(
                &t.span(),
                Error::usage(format!("terms must be at least {}", 2 * TAIL)),
            ))
        }
    };
    let alpha = k.alpha.as_ref().map(|a| cfg.rationals(a)).transpose()?;
    let mut us = Vec::new();
    for u in &k.u {
        us.push((u.get_ref().complex().map_err(|e| cfg.at(&u.span(), e))?, u.span()));
    }
    if us.is_empty() {
        us.push((Complex::new(Rational::zero(), Rational::zero()), k.g1.span()));
    }
    let threads = cfg.threads()?.min(us.len());
    let chunk = us.len().div_ceil(threads);
    let results: Vec<cusp_core::Result<ConvergenceReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = us
            .chunks(chunk)
            .map(|part| {
                let (g1, alpha) = (&g1, alpha.as_deref());
                s.spawn(move || part.iter().map(|(u, _)| probe(g1, alpha, u, terms)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("probe thread panicked")).collect()
    });
    let mut reports = Vec::new();
    for ((_, span), r) in us.iter().zip(results) {
        reports.push(r.map_err(|e| cfg.at(span, e))?);
    }
    for r in &reports {
        println!(
            "u = {}{:+}i: estimated radius {:e}, predicted {:e}, {}",
            r.u.re, r.u.im, r.estimated_radius, r.predicted_radius, r.verdict
        );
    }
    let mut files = vec![("convergence.csv", reports_csv(&reports))];

    if let Some(b) = &k.bidisc {
        let at = |e| cfg.at(&b.span(), e);
        let raw = b.get_ref();
        let u_star = match &raw.u_star {
            None => Complex::new(Rational::zero(), Rational::zero()),
            Some(u) => u.complex().map_err(at)?,
        };
        let (r, r1) = (raw.r.rational().map_err(at)?, raw.r1.rational().map_err(at)?);
        let samples = raw.samples.unwrap_or(50).max(1) as usize;
        let rep = bidisc_check(&g1, &u_star, &r, &r1, samples, raw.seed.unwrap_or(0)).map_err(at)?;
        println!(
            "bidisc R = {r}, R1 = {r1}: analytic {}, consistent {}",
            rep.analytic,
            rep.consistent()
        );
        files.push(("bidisc.csv", bidisc_csv(&rep)));
    }
    if let Some(c) = &k.cauchy {
        let raw = c.get_ref();
        let n_max = raw.n_max.unwrap_or(20).max(0) as usize;
        let rep = cauchy_bound_check(&g1, raw.r, raw.r0, raw.eps, n_max).map_err(|e| cfg.at(&c.span(), e))?;
        println!("Cauchy bound: {} checks, worst ratio {:e}, holds {}", rep.checks, rep.worst_ratio, rep.holds);
        files.push((
            "cauchy.csv",
            format!(
                "c_eps,checks,worst_ratio,holds\n{:e},{},{:e},{}\n",
                rep.c_eps, rep.checks, rep.worst_ratio, rep.holds
            ),
        ));
    }
    for (name, body) in files {
        run.out.write(name, &body)?;
    }
    Ok(())
}

fn bidisc_csv(rep: &BidiscReport) -> String {
    let mut out = String::from(
        "analytic,required_radius,pole_distance,samples,samples_converged,witness_h_re,witness_h_im,witness_u_re,witness_u_im,predicted_ratio,confirmed,consistent\n",
    );
    let w = rep.witness.as_ref();
    let f = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:e}"));
    out.push_str(&format!(
        "{},{:e},{:e},{},{},{},{},{},{},{},{},{}\n",
        rep.analytic,
        rep.required_radius,
        rep.pole_distance,
        rep.samples,
        rep.samples_converged,
        f(w.map(|w| w.h.re)),
        f(w.map(|w| w.h.im)),
        f(w.map(|w| w.u.re)),
        f(w.map(|w| w.u.im)),
        f(w.map(|w| w.predicted_ratio)),
        w.is_some_and(|w| w.confirmed),
        rep.consistent()
    ));
    out
}
