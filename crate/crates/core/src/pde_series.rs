//! Taylor solutions of `h B_hh + 2 B_h = α(h) B_VV` around `(0, v*)`, the
//! substitution `C = h B`, and the series `G(h, u)` of the constant-α case.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Rational};
use crate::series_algebra::{pair, Series2, Var};

/// Complex number with exact rational parts.
pub type ComplexQ = Complex<Rational>;
/// Complex number in double precision.
pub type ComplexF = Complex<f64>;

/// How the listed boundary coefficients `b0j` extend beyond the list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `B(0, v)` is a polynomial: unlisted coefficients are zero.
    Polynomial,
    /// Only the listed coefficients are known; asking for more is an error.
    Truncated,
}

/// Coefficients of `α(h) = 4 + Σ α_j h^j`, boundary data `B(0, v* + V) = Σ b0j V^j`
/// and the base velocity `v*`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemData {
    /// `α_1, α_2, …`; missing entries are zero.
    pub alpha: Vec<Rational>,
    /// `b00, b01, b02, …`
    pub b0: Vec<Rational>,
    pub boundary: Boundary,
    pub v_star: Rational,
}

impl ProblemData {
    pub fn new(alpha: Vec<Rational>, b0: Vec<Rational>, v_star: Rational) -> Self {
        ProblemData {
            alpha,
            b0,
            boundary: Boundary::Polynomial,
            v_star,
        }
    }

    /// Canonical cusp instance: `b03 = 1/12`, `α ≡ 4`, base point
    /// `v* = 1/2`, `t* = 1`, `x* = 1/4`.
    pub fn canonical() -> Self {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        ProblemData::new(
            Vec::new(),
            vec![q(1, 4), q(1, 1), q(0, 1), q(1, 12)],
            q(1, 2),
        )
    }

    /// `α_j` with `α_0 = 4`.
    pub fn alpha_coeff(&self, j: usize) -> Rational {
        if j == 0 {
            return Rational::from_integer(4.into());
        }
        self.alpha.get(j - 1).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn alpha_is_constant(&self) -> bool {
        self.alpha.iter().all(Zero::is_zero)
    }

    pub fn b0j(&self, j: usize) -> Rational {
        self.b0.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    /// `t* = b01`.
    pub fn t_star(&self) -> Rational {
        self.b0j(1)
    }

    /// `x* = t*·v* − b00`.
    pub fn x_star(&self) -> Rational {
        self.t_star() * &self.v_star - self.b0j(0)
    }

    /// `b11 = 12·b03`.
    pub fn b11(&self) -> Rational {
        self.b0j(3) * Rational::from_integer(12.into())
    }

    /// Preconditions for a cusp at the base point.
    pub fn check_singular(&self) -> Result<()> {
        if !self.b0j(2).is_zero() {
            return Err(Error::usage(
                "Jacobian must vanish at base point: b02 must be 0",
            ));
        }
        if self.b0j(3).is_zero() {
            return Err(Error::degenerate("b03 must be nonzero"));
        }
        Ok(())
    }

    /// `α(h)` truncated at degree `cap`, as a series in `(h, V)`.
    pub fn alpha_series<C: Coeff>(&self, cap: usize) -> Series2<C> {
        Series2::from_terms(
            hv(),
            cap,
            (0..=cap).map(|j| ((j, 0), C::from_rational(&self.alpha_coeff(j)))),
        )
    }

    pub fn alpha_at(&self, h: f64) -> f64 {
        let mut acc = 0.0;
        for j in (0..=self.alpha.len()).rev() {
            acc = acc * h + Coeff::to_f64(&self.alpha_coeff(j));
        }
        acc
    }
}

/// The standard `(h, V)` variable pair.
pub fn hv() -> [Var; 2] {
    pair("h", "V")
}

/// Taylor solution `B(h, v* + V) = Σ b_ij h^i V^j` of total degree `≤ N`.
#[derive(Clone, Debug)]
pub struct BSolution<C> {
    pub series: Series2<C>,
    pub problem: ProblemData,
}

/// Runs the row recurrence
/// `B_{k+1} = [4 B_k'' + Σ_{l=1}^{k} α_l B_{k−l}''] / ((k+1)(k+2))`
/// starting from `B_0 = B(0, ·)`.
pub fn extend_b<C: Coeff>(p: &ProblemData, order: usize) -> Result<BSolution<C>> {
    let need = 2 * order;
    if p.boundary == Boundary::Truncated && p.b0.len() <= need {
        return Err(Error::MissingBoundary((p.b0.len()..=need).collect()));
    }
    // rows[k][j] = b_{k j} for j ≤ 2(order − k)
    let mut rows: Vec<Vec<C>> = Vec::with_capacity(order + 1);
    rows.push((0..=need).map(|j| C::from_rational(&p.b0j(j))).collect());
    let alpha: Vec<C> = (0..=order).map(|l| C::from_rational(&p.alpha_coeff(l))).collect();
    for k in 0..order {
        let width = 2 * (order - k - 1);
        let denom = C::from_int(((k + 1) * (k + 2)) as i64);
        let row: Vec<C> = (0..=width)
            .map(|j| {
                let mut acc = C::zero();
                for l in 0..=k {
                    let b = &rows[k - l][j + 2];
                    if !b.is_zero() && !alpha[l].is_zero() {
                        acc = acc + alpha[l].clone() * b.clone();
                    }
                }
                acc * C::from_int(((j + 2) * (j + 1)) as i64) / denom.clone()
            })
            .collect();
        rows.push(row);
    }
    let terms = rows.into_iter().enumerate().flat_map(|(i, row)| {
        row.into_iter()
            .enumerate()
            .filter(move |(j, _)| i + j <= order)
            .map(move |(j, c)| ((i, j), c))
    });
    Ok(BSolution {
        series: Series2::from_terms(hv(), order, terms),
        problem: p.clone(),
    })
}

/// `h B_hh + 2 B_h − α(h) B_VV`.
pub fn pde_residual_b<C: Coeff>(b: &Series2<C>, p: &ProblemData) -> Result<Series2<C>> {
    let bh = b.derivative("h")?;
    let bhh = bh.derivative("h")?;
    let bvv = b.derivative("V")?.derivative("V")?;
    let alpha = p.alpha_series::<C>(b.cap());
    let h = Series2::variable(b.vars().clone(), b.cap(), 0);
    let two = C::from_int(2);
    h.try_mul(&bhh)?
        .try_add(&bh.scale(&two))?
        .try_sub(&alpha.try_mul(&bvv)?)
}

/// `C = h·B`. Cap and effective order grow by one.
pub fn b_to_c<C: Coeff>(b: &Series2<C>) -> Series2<C> {
    b.shift_up(0, 1)
}

/// `B = C/h`; fails if `C` has a nonzero `h⁰` row.
pub fn c_to_b<C: Coeff>(c: &Series2<C>) -> Result<Series2<C>> {
    c.shift_down(0, 1)
        .map_err(|_| Error::usage("C(h, V) must be divisible by h: its h⁰ row is nonzero"))
}

/// `h C_hh − α(h) C_VV`.
pub fn pde_residual_c<C: Coeff>(c: &Series2<C>, p: &ProblemData) -> Result<Series2<C>> {
    let chh = c.derivative("h")?.derivative("h")?;
    let cvv = c.derivative("V")?.derivative("V")?;
    let h = Series2::variable(c.vars().clone(), c.cap(), 0);
    h.try_mul(&chh)?
        .try_sub(&p.alpha_series::<C>(c.cap()).try_mul(&cvv)?)
}

/// Rewrites `C(h, V)` with `V = 2(u − u*)` as `G(h, u − u*)`, labelled `(h, u)`.
pub fn c_to_g<C: Coeff>(c: &Series2<C>) -> Series2<C> {
    c.rescale_var(1, &C::from_int(2), "u")
}

/// `h G_hh − G_uu` for a series in `(h, u)`.
pub fn pde_residual_g<C: Coeff>(g: &Series2<C>) -> Result<Series2<C>> {
    let ghh = g.derivative_slot(0).derivative_slot(0);
    let guu = g.derivative_slot(1).derivative_slot(1);
    let h = Series2::variable(g.vars().clone(), g.cap(), 0);
    h.try_mul(&ghh)?.try_sub(&guu)
}

/// The relation `b_ij = expected` of the low-order table, with its outcome.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: &'static str,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Relation {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The eight low-order closed forms of the recurrence, evaluated on `b`
/// (which must have order ≥ 4). `b14` is compared with `60·b06`.
pub fn low_order_relations(b: &Series2<Rational>, p: &ProblemData) -> Vec<Relation> {
    let q = |n: i64| Rational::from_integer(n.into());
    let b0 = |j| p.b0j(j);
    let a1 = p.alpha_coeff(1);
    let rel = |name, i, j, rhs| Relation {
        name,
        lhs: b.coeff(i, j),
        rhs,
    };
    vec![
        rel("b10 = 4 b02", 1, 0, q(4) * b0(2)),
        rel("b11 = 12 b03", 1, 1, q(12) * b0(3)),
        rel("b12 = 24 b04", 1, 2, q(24) * b0(4)),
        rel("b13 = 40 b05", 1, 3, q(40) * b0(5)),
        rel("b14 = 60 b06", 1, 4, q(60) * b0(6)),
        rel(
            "b20 = 32 b04 + α1 b02 / 3",
            2,
            0,
            q(32) * b0(4) + &a1 * b0(2) / q(3),
        ),
        rel("b21 = 160 b05 + α1 b03", 2, 1, q(160) * b0(5) + &a1 * b0(3)),
        rel(
            "b22 = 480 b06 + 2 α1 b04",
            2,
            2,
            q(480) * b0(6) + q(2) * &a1 * b0(4),
        ),
    ]
}

// ---------------------------------------------------------------------------
// G1 specifications and the series G(h, u)
// ---------------------------------------------------------------------------

/// One summand of `g1(u)`.
#[derive(Clone, Debug, PartialEq)]
pub enum G1Term {
    /// `Σ c_n u^n`.
    Poly(Vec<ComplexQ>),
    /// `strength / (at − u)`.
    Pole { at: ComplexQ, strength: ComplexQ },
}

/// `g1(u)` as a finite sum of polynomials and simple poles.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct G1Spec {
    pub terms: Vec<G1Term>,
}

fn cq(re: Rational) -> ComplexQ {
    Complex::new(re, Rational::zero())
}

fn cq_to_f64(z: &ComplexQ) -> ComplexF {
    Complex::new(
        Coeff::to_f64(&z.re),
        Coeff::to_f64(&z.im),
    )
}

fn falling(n: usize, m: usize) -> BigInt {
    (n - m + 1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn factorial(n: usize) -> BigInt {
    falling(n, n)
}

/// `(2k)! / (k! (k+1)!)`, the k-th Catalan number.
pub fn catalan(k: usize) -> BigInt {
    factorial(2 * k) / (factorial(k) * factorial(k + 1))
}

impl G1Spec {
    pub fn new(terms: Vec<G1Term>) -> Self {
        G1Spec { terms }
    }

    pub fn poly_real(coeffs: &[Rational]) -> Self {
        G1Spec::new(vec![G1Term::Poly(coeffs.iter().cloned().map(cq).collect())])
    }

    pub fn pole_real(at: Rational, strength: Rational) -> Self {
        G1Spec::new(vec![G1Term::Pole {
            at: cq(at),
            strength: cq(strength),
        }])
    }

    pub fn poles(&self) -> impl Iterator<Item = &ComplexQ> {
        self.terms.iter().filter_map(|t| match t {
            G1Term::Pole { at, strength } if !strength.is_zero() => Some(at),
            _ => None,
        })
    }

    pub fn is_entire(&self) -> bool {
        self.poles().next().is_none()
    }

    /// Squared distance from `u` to the nearest pole, exactly; `None` if entire.
    pub fn pole_distance_sq(&self, u: &ComplexQ) -> Option<Rational> {
        self.poles().map(|a| (a - u).norm_sqr()).min()
    }

    pub fn pole_distance(&self, u: ComplexF) -> f64 {
        self.poles()
            .map(|a| (cq_to_f64(a) - u).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn nearest_pole(&self, u: ComplexF) -> Option<ComplexF> {
        self.poles()
            .map(cq_to_f64)
            .min_by(|a, b| (a - u).norm().total_cmp(&(b - u).norm()))
    }

    fn check_regular(&self, u: &ComplexQ) -> Result<()> {
        if self.poles().any(|a| a == u) {
            return Err(Error::domain(format!(
                "g1 has a pole at u = {} + {}i",
                u.re, u.im
            )));
        }
        Ok(())
    }

    /// Taylor coefficient `g1^{(m)}(u) / m!`, exactly.
    pub fn taylor_coeff(&self, m: usize, u: &ComplexQ) -> Result<ComplexQ> {
        self.check_regular(u)?;
        let mut acc = cq(Rational::zero());
        for t in &self.terms {
            match t {
                G1Term::Poly(c) => {
                    // Σ_n binom(n, m) c_n u^{n−m}
                    let mut upow = cq(Rational::one());
                    for (n, cn) in c.iter().enumerate().skip(m) {
                        let binom = falling(n, n - m) / factorial(n - m);
                        acc = acc + cn * &upow * cq(Rational::from_integer(binom));
                        upow = upow * u;
                    }
                }
                G1Term::Pole { at, strength } => {
                    // c / (a − u)^{m+1}
                    let d = at - u;
                    let mut p = d.clone();
                    for _ in 0..m {
                        p = p * &d;
                    }
                    acc = acc + strength / p;
                }
            }
        }
        Ok(acc)
    }

    /// Taylor coefficient `g1^{(m)}(u) / m!` in double precision.
    pub fn taylor_coeff_f64(&self, m: usize, u: ComplexF) -> Result<ComplexF> {
        let mut acc = ComplexF::zero();
        for t in &self.terms {
            match t {
                G1Term::Poly(c) => {
                    let mut upow = ComplexF::one();
                    let mut binom = 1.0;
                    for (n, cn) in c.iter().enumerate().skip(m) {
                        if n > m {
                            binom = binom * n as f64 / (n - m) as f64;
                        }
                        acc += cq_to_f64(cn) * upow * binom;
                        upow *= u;
                    }
                }
                G1Term::Pole { at, strength } => {
                    let d = cq_to_f64(at) - u;
                    if d.norm() == 0.0 {
                        return Err(Error::domain("g1 evaluated at a pole"));
                    }
                    acc += cq_to_f64(strength) / d.powu(m as u32 + 1);
                }
            }
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, u: ComplexF) -> Result<ComplexF> {
        self.taylor_coeff_f64(0, u)
    }

    /// `g1^{(m)}(u)`, exactly.
    pub fn derivative(&self, m: usize, u: &ComplexQ) -> Result<ComplexQ> {
        Ok(self.taylor_coeff(m, u)? * cq(Rational::from_integer(factorial(m))))
    }
}

/// Partial sums of `G(h, u) = Σ_{n=1}^{K+1} g_n(u) h^n` with
/// `g_1 = g1` and `g_{k+1} = g1^{(2k)} / (k! (k+1)!)`.
#[derive(Clone, Debug)]
pub struct GSeries {
    pub g1: G1Spec,
    pub u_star: ComplexQ,
    /// Highest `k`; the sum stops at `h^{K+1}`.
    pub cap: usize,
}

/// Builds the `G` series; fails if `u*` sits on a pole of `g1`.
pub fn korobeinik_series(g1: &G1Spec, u_star: &ComplexQ, cap: usize) -> Result<GSeries> {
    g1.check_regular(u_star)?;
    Ok(GSeries {
        g1: g1.clone(),
        u_star: u_star.clone(),
        cap,
    })
}

impl GSeries {
    /// `g_n(u)` for `n ≥ 1`, exactly.
    pub fn coeff(&self, n: usize, u: &ComplexQ) -> Result<ComplexQ> {
        if n == 0 {
            return Ok(cq(Rational::zero()));
        }
        let k = n - 1;
        Ok(self.g1.taylor_coeff(2 * k, u)? * cq(Rational::from_integer(catalan(k))))
    }

    /// `g_n(u)` for `n ≥ 1`, in double precision.
    pub fn coeff_f64(&self, n: usize, u: ComplexF) -> Result<ComplexF> {
        if n == 0 {
            return Ok(ComplexF::zero());
        }
        let k = n - 1;
        let cat = catalan(k).to_f64().unwrap_or(f64::INFINITY);
        Ok(self.g1.taylor_coeff_f64(2 * k, u)? * cat)
    }

    /// Coefficients `g_1(u*), …, g_{K+1}(u*)` at the base point.
    pub fn coeffs_at_star(&self) -> Result<Vec<ComplexQ>> {
        (1..=self.cap + 1).map(|n| self.coeff(n, &self.u_star)).collect()
    }

    /// Partial sum through `h^{K+1}`.
    pub fn eval_f64(&self, h: ComplexF, u: ComplexF) -> Result<ComplexF> {
        let mut acc = ComplexF::zero();
        for n in (1..=self.cap + 1).rev() {
            acc = (acc + self.coeff_f64(n, u)?) * h;
        }
        Ok(acc)
    }
}

/// Outcome of comparing the recurrence with the closed-form `G` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BridgeReport {
    pub checked: usize,
    pub mismatches: Vec<(usize, usize)>,
}

impl BridgeReport {
    pub fn exact(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// With `α ≡ 4` and `B(0, v) = g1(v/2)` around `v* = 2u*`, checks that the
/// recurrence reproduces `B(h, v) = G(h, v/2)/h` coefficient by coefficient:
/// `b_kj = g1^{(2k+j)}(u*) / (j! k! (k+1)! 2^j)`.
pub fn cross_check_b_g(
    g1: &G1Spec,
    u_star: &Rational,
    alpha: &[Rational],
    order: usize,
) -> Result<BridgeReport> {
    if alpha.iter().any(|a| !a.is_zero()) {
        return Err(Error::usage(
            "the B–G bridge needs constant α ≡ 4 (all α_j = 0)",
        ));
    }
    let u = cq(u_star.clone());
    let real = |z: ComplexQ, what: &str| -> Result<Rational> {
        if z.im.is_zero() {
            Ok(z.re)
        } else {
            Err(Error::usage(format!("{what} is not real at u*")))
        }
    };
    let mut b0 = Vec::with_capacity(2 * order + 1);
    let mut two_pow = Rational::one();
    for j in 0..=2 * order {
        b0.push(real(g1.taylor_coeff(j, &u)?, "g1")? / &two_pow);
        two_pow *= Rational::from_integer(2.into());
    }
    let p = ProblemData {
        alpha: Vec::new(),
        b0,
        boundary: Boundary::Truncated,
        v_star: u_star * Rational::from_integer(2.into()),
    };
    let b = extend_b::<Rational>(&p, order)?.series;
    let mut report = BridgeReport {
        checked: 0,
        mismatches: Vec::new(),
    };
    for k in 0..=order {
        for j in 0..=order - k {
            // g1^{(2k+j)}/(2k+j)! · (2k+j)!/(j! k! (k+1)!) / 2^j
            let m = 2 * k + j;
            let scale = Rational::new(
                factorial(m),
                factorial(j) * factorial(k) * factorial(k + 1) * BigInt::from(2).pow(j as u32),
            );
            let expected = real(g1.taylor_coeff(m, &u)?, "g1")? * scale;
            report.checked += 1;
            if b.coeff(k, j) != expected {
                report.mismatches.push((k, j));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn data(alpha: &[Rational], b0: &[(usize, Rational)]) -> ProblemData {
        let mut list = vec![Rational::zero(); 13];
        for (j, c) in b0 {
            list[*j] = c.clone();
        }
        ProblemData::new(alpha.to_vec(), list, Rational::zero())
    }

    #[test]
    fn b11_from_b03() {
        let p = data(&[], &[(3, qi(1))]);
        let b = extend_b::<Rational>(&p, 4).unwrap().series;
        assert_eq!(b.coeff(1, 1), qi(12));
    }

    #[test]
    fn b20_from_b04() {
        let p = data(&[], &[(4, qi(1))]);
        let b = extend_b::<Rational>(&p, 4).unwrap().series;
        assert_eq!(b.coeff(2, 0), qi(32));
    }

    #[test]
    fn b14_and_b22_from_b06() {
        let a1 = q(3, 7);
        let p = data(&[a1.clone()], &[(6, qi(1)), (4, qi(2))]);
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        assert_eq!(b.coeff(1, 4), qi(60));
        assert_eq!(b.coeff(2, 2), qi(480) + qi(2) * a1 * qi(2));
    }

    #[test]
    fn b21_with_alpha1() {
        let p = data(&[qi(2)], &[(5, qi(1)), (3, qi(1))]);
        let b = extend_b::<Rational>(&p, 4).unwrap().series;
        assert_eq!(b.coeff(2, 1), qi(162));
    }

    #[test]
    fn missing_boundary_listed() {
        let mut p = ProblemData::new(vec![], vec![qi(0), qi(1), qi(0), qi(1)], qi(0));
        p.boundary = Boundary::Truncated;
        match extend_b::<Rational>(&p, 3) {
            Err(Error::MissingBoundary(idx)) => assert_eq!(idx, vec![4, 5, 6]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn residual_of_non_solutions() {
        let p = data(&[qi(1), q(-1, 2)], &[]);
        let h = Series2::<Rational>::variable(hv(), 6, 0);
        let r = pde_residual_b(&h, &p).unwrap();
        assert_eq!(r, Series2::constant(hv(), 6, qi(2)));
        let v2 = Series2::from_terms(hv(), 6, [((0, 2), qi(1))]);
        let r = pde_residual_b(&v2, &p).unwrap();
        let want = Series2::from_terms(hv(), 6, [((0, 0), qi(-8)), ((1, 0), qi(-2)), ((2, 0), qi(1))]);
        assert_eq!(r, want);
    }

    #[test]
    fn c_bridge_roundtrip() {
        let one = Series2::<Rational>::constant(hv(), 4, qi(1));
        assert_eq!(b_to_c(&one), Series2::variable(hv(), 5, 0));
        let p = data(&[qi(1)], &[(3, qi(1)), (5, q(2, 3))]);
        let b = extend_b::<Rational>(&p, 6).unwrap().series;
        assert_eq!(c_to_b(&b_to_c(&b)).unwrap(), b);
        assert!(pde_residual_c(&b_to_c(&b), &p).unwrap().is_zero_to_eff());
        assert!(matches!(c_to_b(&one), Err(Error::Usage(_))));
    }

    #[test]
    fn g_series_small_cases() {
        let u = cq(q(3, 5));
        let lin = korobeinik_series(&G1Spec::poly_real(&[qi(0), qi(1)]), &u, 6).unwrap();
        assert_eq!(lin.coeff(1, &u).unwrap(), u);
        for n in 2..=7 {
            assert!(lin.coeff(n, &u).unwrap().is_zero());
        }
        let sq = korobeinik_series(&G1Spec::poly_real(&[qi(0), qi(0), qi(1)]), &u, 6).unwrap();
        assert_eq!(sq.coeff(2, &u).unwrap(), cq(qi(1)));
        assert!(sq.coeff(3, &u).unwrap().is_zero());
    }

    #[test]
    fn g_series_pole_gives_catalan() {
        let g = korobeinik_series(&G1Spec::pole_real(qi(1), qi(1)), &cq(qi(0)), 5).unwrap();
        let got: Vec<_> = g.coeffs_at_star().unwrap();
        let want = [1, 1, 2, 5, 14, 42];
        for (c, w) in got.iter().zip(want) {
            assert_eq!(*c, cq(qi(w)));
        }
        assert!(matches!(
            korobeinik_series(&G1Spec::pole_real(qi(1), qi(1)), &cq(qi(1)), 5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bridge_rejects_variable_alpha() {
        let g = G1Spec::poly_real(&[qi(0), qi(0), qi(1)]);
        assert!(matches!(
            cross_check_b_g(&g, &qi(0), &[qi(1)], 4),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn bridge_quadratic_by_hand() {
        // g1 = u², B0 = (v/2)², B1 = 2·B0'' = 1 = g2
        let g = G1Spec::poly_real(&[qi(0), qi(0), qi(1)]);
        let r = cross_check_b_g(&g, &q(1, 3), &[], 4).unwrap();
        assert!(r.exact());
    }
}
