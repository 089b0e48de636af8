//! Convergence domains of `G(h, u) = Σ g_n(u) hⁿ`: Cauchy estimates, term
//! ratio probes, bidisc analyticity checks with divergence witnesses, and the
//! variable-α experiment.

use std::fmt;

use num_complex::Complex;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pde_series::{
    catalan, extend_b, korobeinik_series, Boundary, ComplexF, ComplexQ, G1Spec, G1Term,
    ProblemData,
};
use crate::scalar::{Coeff, Rational};

/// Number of trailing ratios used in every limit estimate.
pub const TAIL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub u: ComplexF,
    /// `|c_{k+1} / c_k|` for consecutive `h`-coefficients.
    pub ratios: Vec<f64>,
    pub estimated_radius: f64,
    pub predicted_radius: f64,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn relative_error(&self) -> f64 {
        if self.predicted_radius.is_infinite() && self.estimated_radius.is_infinite() {
            return 0.0;
        }
        (self.estimated_radius / self.predicted_radius - 1.0).abs()
    }
}

/// CSV with header `u_re,u_im,estimated_radius,predicted_radius,verdict`.
pub fn reports_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = String::from("u_re,u_im,estimated_radius,predicted_radius,verdict\n");
    for r in reports {
        out.push_str(&format!(
            "{:e},{:e},{:e},{:e},{}\n",
            r.u.re, r.u.im, r.estimated_radius, r.predicted_radius, r.verdict
        ));
    }
    out
}

fn cq_to_f64(z: &ComplexQ) -> ComplexF {
    Complex::new(Coeff::to_f64(&z.re), Coeff::to_f64(&z.im))
}

/// Least-squares fit `r_k = L + M/k` over the given `(k, r_k)`; returns `L`.
fn limit_fit(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(k, r) in points {
        let x = 1.0 / k as f64;
        sx += x;
        sy += r;
        sxx += x * x;
        sxy += x * r;
    }
    let det = n * sxx - sx * sx;
    if det.abs() < f64::MIN_POSITIVE {
        return sy / n;
    }
    (sxx * sy - sx * sxy) / det
}

/// Radius estimate from exact coefficients `c_1, c_2, …` of a power series.
fn ratio_report(coeffs: &[ComplexQ], u: ComplexF, predicted: f64) -> ConvergenceReport {
    let last_nonzero = coeffs.iter().rposition(|c| !c.is_zero());
    let tail_start = coeffs.len().saturating_sub(TAIL + 1);
    if last_nonzero.is_none_or(|i| i < tail_start) {
        return ConvergenceReport {
            u,
            ratios: Vec::new(),
            estimated_radius: f64::INFINITY,
            predicted_radius: predicted,
            verdict: Verdict::Converges,
        };
    }
    let mut ratios = Vec::with_capacity(coeffs.len());
    let mut points = Vec::new();
    for (k, pair) in coeffs.windows(2).enumerate() {
        let (a, b) = (pair[0].norm_sqr(), pair[1].norm_sqr());
        let r = if a.is_zero() {
            f64::INFINITY
        } else {
            Coeff::to_f64(&(b / a)).sqrt()
        };
        ratios.push(r);
        if k + 1 >= coeffs.len().saturating_sub(TAIL) {
            points.push((k + 1, r));
        }
    }
    let finite = points.iter().all(|(_, r)| r.is_finite());
    let limit = if finite { limit_fit(&points) } else { f64::NAN };
    let (estimated, verdict) = if limit > 0.0 && limit.is_finite() {
        (1.0 / limit, Verdict::Converges)
    } else {
        (f64::NAN, Verdict::Inconclusive)
    };
    ConvergenceReport {
        u,
        ratios,
        estimated_radius: estimated,
        predicted_radius: predicted,
        verdict,
    }
}

/// Predicted `h`-radius `(d(u)/2)²`, `d` the distance to the nearest pole.
pub fn predicted_radius(g1: &G1Spec, u: &ComplexQ) -> f64 {
    match g1.pole_distance_sq(u) {
        None => f64::INFINITY,
        Some(d2) => Coeff::to_f64(&d2) / 4.0,
    }
}

/// Ratio-test estimate of the `h`-radius of convergence of `G(·, u)` from
/// the exact coefficients `g_1(u) … g_{K+1}(u)`.
pub fn radius_probe(g1: &G1Spec, u: &ComplexQ, cap: usize) -> Result<ConvergenceReport> {
    if cap < 2 * TAIL {
        return Err(Error::usage(format!(
            "radius probe needs at least {} terms, got {cap}",
            2 * TAIL
        )));
    }
    let g = korobeinik_series(g1, u, cap)?;
    let coeffs = g.coeffs_at_star()?;
    Ok(ratio_report(&coeffs, cq_to_f64(u), predicted_radius(g1, u)))
}

/// Term `g_n(u)·hⁿ`, arranged so that no intermediate over- or underflows
/// for `|h|/|a − u|²` of order one.
fn g_term(g1: &G1Spec, n: usize, h: ComplexF, u: ComplexF) -> ComplexF {
    let k = n - 1;
    let mut acc = ComplexF::zero();
    for t in &g1.terms {
        match t {
            G1Term::Poly(c) => {
                if 2 * k < c.len() {
                    let single = G1Spec::new(vec![t.clone()]);
                    let coeff = single.taylor_coeff_f64(2 * k, u).unwrap_or(ComplexF::zero());
                    let cat = catalan(k).to_f64().unwrap_or(f64::INFINITY);
                    acc += coeff * cat * h.powu(n as u32);
                }
            }
            G1Term::Pole { at, strength } => {
                let d = cq_to_f64(at) - u;
                let z = h / (d * d);
                acc += cq_to_f64(strength) / d * h * catalan_scaled(k, z);
            }
        }
    }
    acc
}

/// `Cat_k · z^k`, accumulated multiplicatively.
fn catalan_scaled(k: usize, z: ComplexF) -> ComplexF {
    let mut acc = ComplexF::new(1.0, 0.0);
    for j in 0..k {
        // Cat_{j+1}/Cat_j = 2(2j+1)/(j+2)
        acc = acc * z * (2.0 * (2 * j + 1) as f64 / (j + 2) as f64);
    }
    acc
}

/// Terms `g_n(u) hⁿ` for `n = 1..=count`.
pub fn g_terms(g1: &G1Spec, h: ComplexF, u: ComplexF, count: usize) -> Vec<ComplexF> {
    (1..=count).map(|n| g_term(g1, n, h, u)).collect()
}

fn term_ratios(terms: &[ComplexF]) -> Vec<f64> {
    terms
        .windows(2)
        .map(|w| {
            let a = w[0].norm();
            if a == 0.0 {
                if w[1].norm() == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                w[1].norm() / a
            }
        })
        .collect()
}

/// Convergence verdict from the tail of a term sequence.
fn classify_terms(terms: &[ComplexF]) -> (Verdict, Vec<f64>) {
    let ratios = term_ratios(terms);
    let tail = &ratios[ratios.len().saturating_sub(TAIL)..];
    let tail_terms = &terms[terms.len().saturating_sub(TAIL)..];
    if tail_terms.iter().all(|t| t.norm() == 0.0) {
        return (Verdict::Converges, ratios);
    }
    let rho = tail.iter().cloned().fold(0.0, f64::max);
    if rho < 1.0 - 1e-3 {
        let total: f64 = terms.iter().map(|t| t.norm()).sum();
        let bound = terms.last().map_or(0.0, |t| t.norm()) * rho / (1.0 - rho);
        if bound <= 1e-3 * total {
            return (Verdict::Converges, ratios);
        }
        return (Verdict::Inconclusive, ratios);
    }
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    if tail.iter().all(|r| *r > 1.0 + 1e-3) && increasing {
        return (Verdict::Diverges, ratios);
    }
    (Verdict::Inconclusive, ratios)
}

/// A point of the bidisc where the series is predicted, and observed, to diverge.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub h: ComplexF,
    pub u: ComplexF,
    /// `4|h| / d(u)²`, the limiting term ratio.
    pub predicted_ratio: f64,
    pub terms_used: usize,
    pub tail_ratios: Vec<f64>,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BidiscReport {
    /// `g1` analytic in `|u − u*| < R + 2√R1`, decided exactly.
    pub analytic: bool,
    pub required_radius: f64,
    pub pole_distance: f64,
    pub samples: usize,
    pub samples_converged: usize,
    pub witness: Option<Witness>,
}

impl BidiscReport {
    /// Both directions agree: every sample converges when analytic, and a
    /// confirmed witness exists when not.
    pub fn consistent(&self) -> bool {
        if self.analytic {
            self.samples_converged == self.samples
        } else {
            self.witness.as_ref().is_some_and(|w| w.confirmed)
        }
    }
}

/// Exact test of `d ≥ R + 2√R1` from `d²`.
fn covers(d_sq: &Rational, r: &Rational, r1: &Rational) -> bool {
    let four = Rational::from_integer(4.into());
    let sixteen = Rational::from_integer(16.into());
    let lhs = d_sq - r * r - &four * r1;
    lhs >= Rational::zero() && &lhs * &lhs >= sixteen * r * r * r1
}

fn sample_disc(rng: &mut ChaCha8Rng, center: ComplexF, radius: f64) -> ComplexF {
    let r = radius * rng.random::<f64>().sqrt();
    let th = std::f64::consts::TAU * rng.random::<f64>();
    center + ComplexF::from_polar(r, th)
}

/// Sample terms used for convergence checks inside the bidisc.
pub const BIDISC_TERMS: usize = 60;
/// Sampling stays within this fraction of each disc radius.
pub const BIDISC_FRACTION: f64 = 0.8;

/// Checks analyticity of `G` on the bidisc `|h| < R1, |u − u*| < R`
/// against the requirement that `g1` be analytic in `|u − u*| < R + 2√R1`.
pub fn bidisc_check(
    g1: &G1Spec,
    u_star: &ComplexQ,
    r: &Rational,
    r1: &Rational,
    samples: usize,
    seed: u64,
) -> Result<BidiscReport> {
    if *r <= Rational::zero() || *r1 <= Rational::zero() {
        return Err(Error::usage("bidisc radii must be positive"));
    }
    let rf = Coeff::to_f64(r);
    let r1f = Coeff::to_f64(r1);
    let required = rf + 2.0 * r1f.sqrt();
    let us = cq_to_f64(u_star);
    let (analytic, pole_distance) = match g1.pole_distance_sq(u_star) {
        None => (true, f64::INFINITY),
        Some(d2) => (covers(&d2, r, r1), Coeff::to_f64(&d2).sqrt()),
    };
    let mut report = BidiscReport {
        analytic,
        required_radius: required,
        pole_distance,
        samples,
        samples_converged: 0,
        witness: None,
    };
    if analytic {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let h = sample_disc(&mut rng, ComplexF::zero(), BIDISC_FRACTION * r1f);
            let u = sample_disc(&mut rng, us, BIDISC_FRACTION * rf);
            let terms = g_terms(g1, h, u, BIDISC_TERMS);
            if classify_terms(&terms).0 == Verdict::Converges {
                report.samples_converged += 1;
            }
        }
    } else {
        report.witness = Some(divergence_witness(g1, us, rf, r1f)?);
    }
    Ok(report)
}

fn divergence_witness(g1: &G1Spec, us: ComplexF, r: f64, r1: f64) -> Result<Witness> {
    let pole = g1
        .nearest_pole(us)
        .ok_or_else(|| Error::usage("an entire g1 has no divergence witness"))?;
    let d = (pole - us).norm();
    let dir = if d > 0.0 { (pole - us) / d } else { ComplexF::new(1.0, 0.0) };
    let delta = 1e-3 * r;
    let eta = 1e-2;
    // stop short of the pole so that d(u) ≈ √R1, but stay inside |u − u*| < R
    let s = (d - r1.sqrt()).clamp(0.0, r - delta);
    let u = us + dir * s;
    let du = g1.pole_distance(u);
    let a = pole - u;
    let h = ComplexF::from_polar(r1 * (1.0 - eta), 2.0 * a.arg());
    let predicted_ratio = 4.0 * h.norm() / (du * du);
    let mut count = 40;
    loop {
        let terms = g_terms(g1, h, u, count + 1);
        let (verdict, ratios) = classify_terms(&terms);
        if verdict == Verdict::Diverges || count >= 200 {
            return Ok(Witness {
                h,
                u,
                predicted_ratio,
                terms_used: count + 1,
                tail_ratios: ratios[ratios.len().saturating_sub(TAIL)..].to_vec(),
                confirmed: verdict == Verdict::Diverges && predicted_ratio > 1.0,
            });
        }
        count += 40;
    }
}

/// Membership in `P(R0) = {|u − u*| + 2√|h| < R0}`.
pub fn domain_p_membership(h: ComplexF, u: ComplexF, u_star: ComplexF, r0: f64) -> Result<bool> {
    if !(r0 > 0.0) {
        return Err(Error::usage("R0 must be positive"));
    }
    Ok((u - u_star).norm() + 2.0 * h.norm().sqrt() < r0)
}

/// Outcome of the Cauchy-estimate check.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyReport {
    /// Sampled `max |f|` on `|t| = r − ε`.
    pub c_eps: f64,
    pub checks: usize,
    /// Largest `|f^{(n)}(z)| / bound` seen.
    pub worst_ratio: f64,
    pub holds: bool,
}

/// Samples on the circle used for `C(ε)`.
pub const CAUCHY_CIRCLE_SAMPLES: usize = 4096;

/// Checks `|f^{(n)}(z)| ≤ C(ε)·n!·(r − ε)/(r − r0 − ε)^{n+1}` for `n ≤ n_max`
/// at `z = 0` and at points on `|z| = r0/2` and `|z| = r0`.
pub fn cauchy_bound_check(f: &G1Spec, r: f64, r0: f64, eps: f64, n_max: usize) -> Result<CauchyReport> {
    if !(0.0 <= r0 && r0 < r) {
        return Err(Error::usage("need 0 ≤ r0 < r"));
    }
    if !(0.0 < eps && eps < r - r0) {
        return Err(Error::usage("need 0 < ε < r − r0"));
    }
    if f.pole_distance(ComplexF::zero()) < r {
        return Err(Error::usage("f has a pole inside |z| < r"));
    }
    let rho = r - eps;
    let c_eps = (0..CAUCHY_CIRCLE_SAMPLES)
        .map(|k| {
            let t = ComplexF::from_polar(rho, std::f64::consts::TAU * k as f64 / CAUCHY_CIRCLE_SAMPLES as f64);
            f.eval_f64(t).map(|v| v.norm())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut zs = vec![ComplexF::zero()];
    for radius in [r0 / 2.0, r0] {
        if radius > 0.0 {
            zs.extend((0..16).map(|k| ComplexF::from_polar(radius, std::f64::consts::TAU * k as f64 / 16.0)));
        }
    }
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for z in &zs {
        for n in 0..=n_max {
            // both sides divided by n!
            let lhs = f.taylor_coeff_f64(n, *z)?.norm();
            let bound = c_eps * rho / (r - r0 - eps).powi(n as i32 + 1);
            worst = worst.max(lhs / bound);
            checks += 1;
        }
    }
    Ok(CauchyReport {
        c_eps,
        checks,
        worst_ratio: worst,
        holds: worst <= 1.0,
    })
}

/// Radius probes of `C(h, 2u) = h·B` for general `α`, with `B(0, v) = g1(v/2)`
/// and `v* = 2u`. The prediction is the constant-α law `(d(u)/2)²`.
pub fn conjecture_probe(
    alpha: &[Rational],
    g1: &G1Spec,
    order: usize,
    u_list: &[Rational],
) -> Result<Vec<ConvergenceReport>> {
    if order < 2 * TAIL {
        return Err(Error::usage(format!(
            "conjecture probe needs order ≥ {}",
            2 * TAIL
        )));
    }
    u_list
        .iter()
        .map(|u| {
            let uc = Complex::new(u.clone(), Rational::zero());
            let mut b0 = Vec::with_capacity(2 * order + 1);
            let mut scale = Rational::from_integer(1.into());
            for j in 0..=2 * order {
                let c = g1.taylor_coeff(j, &uc)?;
                if !c.im.is_zero() {
                    return Err(Error::usage("g1 must be real on the real axis"));
                }
                b0.push(c.re / &scale);
                scale *= Rational::from_integer(2.into());
            }
            let p = ProblemData {
                alpha: alpha.to_vec(),
                b0,
                boundary: Boundary::Truncated,
                v_star: u * Rational::from_integer(2.into()),
            };
            let b = extend_b::<Rational>(&p, order)?.series;
            let coeffs: Vec<ComplexQ> = (0..=order)
                .map(|k| Complex::new(b.coeff(k, 0), Rational::zero()))
                .collect();
            Ok(ratio_report(&coeffs, cq_to_f64(&uc), predicted_radius(g1, &uc)))
        })
        .collect()
}
