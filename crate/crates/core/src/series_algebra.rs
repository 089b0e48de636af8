//! Truncated power series in one and two variables.
//!
//! Every series carries a truncation cap `N` (no stored term exceeds total
//! degree `N`) and an effective order `eff ≤ N`, the highest total degree
//! whose coefficients are trustworthy. Differentiation lowers `eff` by one;
//! binary operations take the minimum of their operands. Zero coefficients
//! are never stored, so structural equality is equality of canonical forms.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Coeff, Radical, Rational};

/// Variable label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(String);

impl Var {
    pub fn new(label: impl Into<String>) -> Self {
        Var(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_owned())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn accumulate<K: Ord, C: Coeff>(map: &mut BTreeMap<K, C>, key: K, value: C) {
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(value);
        }
        Entry::Occupied(mut e) => {
            let slot = e.get_mut();
            *slot = std::mem::replace(slot, C::zero()) + value;
        }
    }
}

fn prune<K: Ord, C: Coeff>(map: &mut BTreeMap<K, C>) {
    map.retain(|_, c| !c.is_zero());
}

/// Generalised binomial coefficient `binom(p, n)` for rational `p`.
fn binom_rational(p: &Rational, n: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 0..n {
        acc = acc * (p - Rational::from_integer(k.into())) / Rational::from_integer((k + 1).into());
    }
    acc
}

// ---------------------------------------------------------------------------
// Series1
// ---------------------------------------------------------------------------

/// Truncated univariate series `Σ_{j ≤ N} c_j x^j`.
#[derive(Clone, Debug)]
pub struct Series1<C> {
    var: Var,
    cap: usize,
    eff: usize,
    terms: BTreeMap<usize, C>,
}

impl<C: Coeff> PartialEq for Series1<C> {
    fn eq(&self, other: &Self) -> bool {
        self.var == other.var && self.cap == other.cap && self.terms == other.terms
    }
}

impl<C: Coeff> Series1<C> {
    pub fn zero(var: impl Into<Var>, cap: usize) -> Self {
        Series1 {
            var: var.into(),
            cap,
            eff: cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(
        var: impl Into<Var>,
        cap: usize,
        coeffs: impl IntoIterator<Item = (usize, C)>,
    ) -> Self {
        let mut s = Series1::zero(var, cap);
        for (j, c) in coeffs {
            if j <= cap {
                accumulate(&mut s.terms, j, c);
            }
        }
        prune(&mut s.terms);
        s
    }

    /// The identity series `x`.
    pub fn variable(var: impl Into<Var>, cap: usize) -> Self {
        Series1::from_coeffs(var, cap, [(1, C::one())])
    }

    pub fn constant(var: impl Into<Var>, cap: usize, c: C) -> Self {
        Series1::from_coeffs(var, cap, [(0, c)])
    }

    pub fn var(&self) -> &Var {
        &self.var
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn eff(&self) -> usize {
        self.eff
    }

    pub fn with_eff(mut self, eff: usize) -> Self {
        self.eff = eff.min(self.cap);
        self
    }

    pub fn coeff(&self, j: usize) -> C {
        self.terms.get(&j).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &C)> {
        self.terms.iter().map(|(j, c)| (*j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.keys().next().copied()
    }

    pub fn renamed(mut self, var: impl Into<Var>) -> Self {
        self.var = var.into();
        self
    }

    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.cap);
        Series1 {
            var: self.var.clone(),
            cap,
            eff: self.eff.min(cap),
            terms: self
                .terms
                .range(..=cap)
                .map(|(j, c)| (*j, c.clone()))
                .collect(),
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series1<D> {
        let mut terms: BTreeMap<usize, D> =
            self.terms.iter().map(|(j, c)| (*j, f(c))).collect();
        prune(&mut terms);
        Series1 {
            var: self.var.clone(),
            cap: self.cap,
            eff: self.eff,
            terms,
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = self.map(|c| c.clone() * s.clone());
        out.eff = self.eff;
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::usage(format!(
                "series variables differ: {} vs {}",
                self.var, other.var
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = self.cap.min(other.cap);
        let mut terms = BTreeMap::new();
        for (j, c) in self.terms.range(..=cap).chain(other.terms.range(..=cap)) {
            accumulate(&mut terms, *j, c.clone());
        }
        prune(&mut terms);
        Ok(Series1 {
            var: self.var.clone(),
            cap,
            eff: self.eff.min(other.eff).min(cap),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = self.cap.min(other.cap);
        let mut terms = BTreeMap::new();
        for (i, a) in &self.terms {
            for (j, b) in other.terms.range(..=cap.saturating_sub(*i)) {
                if i + j <= cap {
                    accumulate(&mut terms, i + j, a.clone() * b.clone());
                }
            }
        }
        prune(&mut terms);
        Ok(Series1 {
            var: self.var.clone(),
            cap,
            eff: self.eff.min(other.eff).min(cap),
            terms,
        })
    }

    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(j, _)| **j > 0)
            .map(|(j, c)| (j - 1, c.clone() * C::from_int(*j as i64)))
            .collect();
        Series1 {
            var: self.var.clone(),
            cap: self.cap,
            eff: self.eff.saturating_sub(1),
            terms,
        }
    }

    /// `self(inner(y))`, result in `inner`'s variable. `inner(0)` must vanish.
    pub fn compose(&self, inner: &Series1<C>) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::usage(
                "inner series of a composition must have zero constant term",
            ));
        }
        let cap = self.cap.min(inner.cap);
        let top = self.terms.keys().next_back().copied().unwrap_or(0).min(cap);
        let mut acc = Series1::zero(inner.var.clone(), cap);
        for k in (0..=top).rev() {
            acc = acc.try_mul(inner)?;
            let c = self.coeff(k);
            if !c.is_zero() {
                acc = acc.try_add(&Series1::constant(inner.var.clone(), cap, c))?;
            }
        }
        acc.eff = self.eff.min(inner.eff).min(cap);
        Ok(acc)
    }

    /// Compositional inverse: `g` with `self(g(w)) = w + O(w^{N+1})`.
    pub fn reversion(&self, new_var: impl Into<Var>) -> Result<Self> {
        let new_var = new_var.into();
        if !self.coeff(0).is_zero() {
            return Err(Error::usage("reversion needs f(0) = 0"));
        }
        let slope = self.coeff(1);
        if slope.is_zero() {
            return Err(Error::degenerate(
                "reversion needs a nonzero linear coefficient",
            ));
        }
        let cap = self.cap;
        let inv = C::one() / slope.clone();
        let w = Series1::<C>::variable(new_var.clone(), cap);
        let nonlinear =
            self.try_sub(&Series1::from_coeffs(self.var.clone(), cap, [(1, slope)]))?;
        let mut g = w.scale(&inv);
        for _ in 0..=cap {
            let next = w.try_sub(&nonlinear.compose(&g)?)?.scale(&inv);
            if next == g {
                break;
            }
            g = next;
        }
        g.eff = self.eff;
        Ok(g)
    }

    /// Given `x0(V) = c3·V³ + O(V⁴)`, returns the diffeomorphism `V(W)` with
    /// `x0(V(W)) = W³` to the cap; its slope is the real cube root of `1/c3`.
    pub fn real_cube_root_normalize(&self, new_var: impl Into<Var>) -> Result<Self> {
        let new_var = new_var.into();
        for k in 0..3 {
            if !self.coeff(k).is_zero() {
                return Err(Error::usage(format!(
                    "cube normalisation needs vanishing degree-{k} coefficient"
                )));
            }
        }
        let c3 = self.coeff(3);
        if c3.is_zero() {
            return Err(Error::degenerate(
                "cube normalisation needs a nonzero cubic coefficient",
            ));
        }
        if self.cap < 3 {
            return Err(Error::usage("cube normalisation needs cap ≥ 3"));
        }
        let rho = (C::one() / c3.clone())
            .real_cbrt()
            .ok_or_else(|| Error::usage("cubic coefficient has no representable cube root"))?;
        let kappa = C::one() / rho;
        // x0 = c3·V³·(1 + d(V)); W = κ·V·(1 + d)^{1/3}
        let tail_cap = self.cap - 3;
        let d = Series1::from_coeffs(
            self.var.clone(),
            tail_cap,
            self.terms
                .iter()
                .filter(|(j, _)| **j > 3)
                .map(|(j, c)| (j - 3, c.clone() / c3.clone())),
        );
        let third = Rational::new(1.into(), 3.into());
        let mut binom = Series1::zero(new_var.clone(), tail_cap);
        for n in (0..=tail_cap).rev() {
            binom = binom.try_mul(&d.clone().renamed(new_var.clone()))?;
            binom = binom.try_add(&Series1::constant(
                new_var.clone(),
                tail_cap,
                C::from_rational(&binom_rational(&third, n)),
            ))?;
        }
        let root_factor = binom.renamed(self.var.clone());
        let w_of_v = Series1::variable(self.var.clone(), tail_cap + 1)
            .try_mul(&Series1 {
                cap: tail_cap + 1,
                ..root_factor
            })?
            .scale(&kappa);
        let v_of_w = w_of_v.reversion(new_var)?;
        Ok(Series1 {
            cap: self.cap,
            eff: self.eff.saturating_sub(2),
            ..v_of_w
        })
    }

    pub fn eval(&self, x: &C) -> C {
        let top = self.terms.keys().next_back().copied().unwrap_or(0).min(self.eff);
        let mut acc = C::zero();
        for k in (0..=top).rev() {
            acc = acc * x.clone() + self.coeff(k);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let top = self.terms.keys().next_back().copied().unwrap_or(0).min(self.eff);
        let mut acc = 0.0;
        for k in (0..=top).rev() {
            acc = acc * x + self.terms.get(&k).map_or(0.0, Coeff::to_f64);
        }
        acc
    }

    /// Radius inside which the last two retained degrees stay below
    /// `rel_tol` times the leading degree; infinite for a polynomial whose
    /// last two retained degrees vanish.
    pub fn validity_radius(&self, rel_tol: f64) -> f64 {
        let bands: Vec<(usize, f64)> = self
            .terms
            .range(..=self.eff)
            .map(|(j, c)| (*j, c.to_f64().abs()))
            .collect();
        validity_from_bands(&bands, self.eff, rel_tol)
    }
}

fn validity_from_bands(bands: &[(usize, f64)], eff: usize, rel_tol: f64) -> f64 {
    let Some(&(lead, lead_mag)) = bands.iter().find(|(_, m)| *m > 0.0) else {
        return f64::INFINITY;
    };
    let mut radius = f64::INFINITY;
    for top in [eff, eff.saturating_sub(1)] {
        if top <= lead {
            continue;
        }
        let mag: f64 = bands.iter().filter(|(n, _)| *n == top).map(|(_, m)| m).sum();
        if mag > 0.0 {
            let r = (rel_tol * lead_mag / mag).powf(1.0 / (top - lead) as f64);
            radius = radius.min(r);
        }
    }
    radius
}

impl<C: Coeff> Neg for &Series1<C> {
    type Output = Series1<C>;
    fn neg(self) -> Series1<C> {
        let mut out = self.map(|c| -c.clone());
        out.eff = self.eff;
        out
    }
}

impl<C: Coeff> Add for &Series1<C> {
    type Output = Series1<C>;
    fn add(self, o: &Series1<C>) -> Series1<C> {
        self.try_add(o).expect("incompatible series")
    }
}

impl<C: Coeff> Sub for &Series1<C> {
    type Output = Series1<C>;
    fn sub(self, o: &Series1<C>) -> Series1<C> {
        self.try_sub(o).expect("incompatible series")
    }
}

impl<C: Coeff> Mul for &Series1<C> {
    type Output = Series1<C>;
    fn mul(self, o: &Series1<C>) -> Series1<C> {
        self.try_mul(o).expect("incompatible series")
    }
}

// ---------------------------------------------------------------------------
// Series2
// ---------------------------------------------------------------------------

/// Truncated bivariate series `Σ_{i+j ≤ N} c_ij x^i y^j` in an ordered pair of variables.
#[derive(Clone, Debug)]
pub struct Series2<C> {
    vars: [Var; 2],
    cap: usize,
    eff: usize,
    terms: BTreeMap<(usize, usize), C>,
}

impl<C: Coeff> PartialEq for Series2<C> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.cap == other.cap && self.terms == other.terms
    }
}

impl<C: Coeff> Series2<C> {
    pub fn zero(vars: [Var; 2], cap: usize) -> Self {
        Series2 {
            vars,
            cap,
            eff: cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        vars: [Var; 2],
        cap: usize,
        terms: impl IntoIterator<Item = ((usize, usize), C)>,
    ) -> Self {
        let mut s = Series2::zero(vars, cap);
        for ((i, j), c) in terms {
            if i + j <= cap {
                accumulate(&mut s.terms, (i, j), c);
            }
        }
        prune(&mut s.terms);
        s
    }

    pub fn constant(vars: [Var; 2], cap: usize, c: C) -> Self {
        Series2::from_terms(vars, cap, [((0, 0), c)])
    }

    pub fn one(vars: [Var; 2], cap: usize) -> Self {
        Series2::constant(vars, cap, C::one())
    }

    /// The coordinate function of the variable in `slot`.
    pub fn variable(vars: [Var; 2], cap: usize, slot: usize) -> Self {
        let key = if slot == 0 { (1, 0) } else { (0, 1) };
        Series2::from_terms(vars, cap, [(key, C::one())])
    }

    pub fn vars(&self) -> &[Var; 2] {
        &self.vars
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn eff(&self) -> usize {
        self.eff
    }

    pub fn with_eff(mut self, eff: usize) -> Self {
        self.eff = eff.min(self.cap);
        self
    }

    pub fn coeff(&self, i: usize, j: usize) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &C)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient of total degree `≤ eff` vanishes.
    pub fn is_zero_to_eff(&self) -> bool {
        self.terms.keys().all(|(i, j)| i + j > self.eff)
    }

    pub fn slot_of(&self, label: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.as_str() == label)
            .ok_or_else(|| {
                Error::usage(format!(
                    "variable {label} is not one of ({}, {})",
                    self.vars[0], self.vars[1]
                ))
            })
    }

    pub fn renamed(mut self, vars: [Var; 2]) -> Self {
        self.vars = vars;
        self
    }

    pub fn truncate(&self, cap: usize) -> Self {
        let cap = cap.min(self.cap);
        Series2 {
            vars: self.vars.clone(),
            cap,
            eff: self.eff.min(cap),
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| i + j <= cap)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Changes the cap without touching stored terms beyond the new cap
    /// (they are dropped) and keeps the effective order.
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut out = self.truncate(cap);
        out.cap = cap;
        out.eff = self.eff.min(cap);
        out
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series2<D> {
        let mut terms: BTreeMap<(usize, usize), D> =
            self.terms.iter().map(|(k, c)| (*k, f(c))).collect();
        prune(&mut terms);
        Series2 {
            vars: self.vars.clone(),
            cap: self.cap,
            eff: self.eff,
            terms,
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::usage(format!(
                "series variables differ: ({}, {}) vs ({}, {})",
                self.vars[0], self.vars[1], other.vars[0], other.vars[1]
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = self.cap.min(other.cap);
        let mut terms = BTreeMap::new();
        for ((i, j), c) in self.terms.iter().chain(other.terms.iter()) {
            if i + j <= cap {
                accumulate(&mut terms, (*i, *j), c.clone());
            }
        }
        prune(&mut terms);
        Ok(Series2 {
            vars: self.vars.clone(),
            cap,
            eff: self.eff.min(other.eff).min(cap),
            terms,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = self.cap.min(other.cap);
        let mut terms = BTreeMap::new();
        for ((i1, j1), a) in &self.terms {
            let d1 = i1 + j1;
            if d1 > cap {
                continue;
            }
            for ((i2, j2), b) in &other.terms {
                if d1 + i2 + j2 <= cap {
                    accumulate(&mut terms, (i1 + i2, j1 + j2), a.clone() * b.clone());
                }
            }
        }
        prune(&mut terms);
        Ok(Series2 {
            vars: self.vars.clone(),
            cap,
            eff: self.eff.min(other.eff).min(cap),
            terms,
        })
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Series2::one(self.vars.clone(), self.cap).with_eff(self.eff);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the variable in `slot`.
    pub fn derivative_slot(&self, slot: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|((i, j), c)| {
                let (e, key) = if slot == 0 {
                    (*i, (i.checked_sub(1)?, *j))
                } else {
                    (*j, (*i, j.checked_sub(1)?))
                };
                Some((key, c.clone() * C::from_int(e as i64)))
            })
            .collect();
        Series2 {
            vars: self.vars.clone(),
            cap: self.cap,
            eff: self.eff.saturating_sub(1),
            terms,
        }
    }

    pub fn derivative(&self, label: &str) -> Result<Self> {
        Ok(self.derivative_slot(self.slot_of(label)?))
    }

    /// Multiplies by `var^k` for the variable in `slot`; cap and eff grow by `k`
    /// so no information is lost.
    pub fn shift_up(&self, slot: usize, k: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|((i, j), c)| {
                let key = if slot == 0 { (i + k, *j) } else { (*i, j + k) };
                (key, c.clone())
            })
            .collect();
        Series2 {
            vars: self.vars.clone(),
            cap: self.cap + k,
            eff: self.eff + k,
            terms,
        }
    }

    /// Divides by `var^k`; fails unless every term is divisible.
    pub fn shift_down(&self, slot: usize, k: usize) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let e = if slot == 0 { *i } else { *j };
            if e < k {
                return Err(Error::usage(format!(
                    "series is not divisible by {}^{k}: term ({i}, {j}) present",
                    self.vars[slot]
                )));
            }
            let key = if slot == 0 { (i - k, *j) } else { (*i, j - k) };
            terms.insert(key, c.clone());
        }
        Ok(Series2 {
            vars: self.vars.clone(),
            cap: self.cap.saturating_sub(k),
            eff: self.eff.saturating_sub(k),
            terms,
        })
    }

    /// Replaces the variable in `slot` by `factor·new`, renaming it.
    pub fn rescale_var(&self, slot: usize, factor: &C, new: impl Into<Var>) -> Self {
        let mut vars = self.vars.clone();
        vars[slot] = new.into();
        let mut terms = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            let e = if slot == 0 { *i } else { *j };
            let mut f = C::one();
            for _ in 0..e {
                f = f * factor.clone();
            }
            terms.insert((*i, *j), c.clone() * f);
        }
        prune(&mut terms);
        Series2 {
            vars,
            cap: self.cap,
            eff: self.eff,
            terms,
        }
    }

    /// Sets the variable in `slot` to zero, leaving a series in the other.
    pub fn section_at_zero(&self, slot: usize) -> Series1<C> {
        let other = 1 - slot;
        Series1 {
            var: self.vars[other].clone(),
            cap: self.cap,
            eff: self.eff,
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| if slot == 0 { *i == 0 } else { *j == 0 })
                .map(|((i, j), c)| (if slot == 0 { *j } else { *i }, c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `var[slot]^k` as a series in the other variable.
    pub fn slice(&self, slot: usize, k: usize) -> Series1<C> {
        let other = 1 - slot;
        Series1 {
            var: self.vars[other].clone(),
            cap: self.cap.saturating_sub(k),
            eff: self.eff.saturating_sub(k),
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| if slot == 0 { *i == k } else { *j == k })
                .map(|((i, j), c)| (if slot == 0 { *j } else { *i }, c.clone()))
                .collect(),
        }
    }

    /// Places a univariate series into `slot` of a bivariate pair.
    pub fn embed(s: &Series1<C>, vars: [Var; 2], slot: usize) -> Result<Self> {
        if vars[slot] != s.var {
            return Err(Error::usage(format!(
                "cannot embed a series in {} into slot {slot} of ({}, {})",
                s.var, vars[0], vars[1]
            )));
        }
        Ok(Series2 {
            vars,
            cap: s.cap,
            eff: s.eff,
            terms: s
                .terms
                .iter()
                .map(|(k, c)| (if slot == 0 { (*k, 0) } else { (0, *k) }, c.clone()))
                .collect(),
        })
    }

    /// Replaces the variable `label` by `s`. The other variable is carried
    /// through and must sit in the same slot of `s`'s variable pair; the
    /// result lives in `s`'s pair.
    pub fn substitute(&self, label: &str, s: &Series2<C>) -> Result<Self> {
        let slot = self.slot_of(label)?;
        let other = 1 - slot;
        if s.vars[other] != self.vars[other] {
            return Err(Error::usage(format!(
                "substitution must carry {} in slot {other}, target pair is ({}, {})",
                self.vars[other], s.vars[0], s.vars[1]
            )));
        }
        if !s.coeff(0, 0).is_zero() {
            return Err(Error::usage(
                "substituted series must have zero constant term",
            ));
        }
        let cap = self.cap.min(s.cap);
        let top = self
            .terms
            .keys()
            .map(|(i, j)| if slot == 0 { *i } else { *j })
            .max()
            .unwrap_or(0)
            .min(cap);
        // group by power of the substituted variable, Horner in s
        let mut groups: Vec<Series2<C>> = (0..=top)
            .map(|_| Series2::zero(s.vars.clone(), cap))
            .collect();
        for ((i, j), c) in &self.terms {
            let (k, carried) = if slot == 0 { (*i, *j) } else { (*j, *i) };
            if k > top || carried > cap {
                continue;
            }
            let key = if slot == 0 { (0, carried) } else { (carried, 0) };
            accumulate(&mut groups[k].terms, key, c.clone());
        }
        let mut acc = Series2::zero(s.vars.clone(), cap);
        for g in groups.into_iter().rev() {
            acc = acc.try_mul(s)?;
            acc = acc.try_add(&g)?;
        }
        acc.eff = self.eff.min(s.eff).min(cap);
        Ok(acc)
    }

    /// Treats `z = self(x, y)` as a new coordinate replacing the variable
    /// `label` and solves for that variable as a series in the new pair.
    /// Needs `self(0,0) = 0` and a nonzero linear coefficient in `label`.
    pub fn implicit_solve(&self, label: &str, new_label: impl Into<Var>) -> Result<Self> {
        let slot = self.slot_of(label)?;
        if !self.coeff(0, 0).is_zero() {
            return Err(Error::usage("implicit solve needs f(0,0) = 0"));
        }
        let key = if slot == 0 { (1, 0) } else { (0, 1) };
        let slope = self.coeff(key.0, key.1);
        if slope.is_zero() {
            return Err(Error::degenerate(format!(
                "∂f/∂{label} vanishes at the origin"
            )));
        }
        let mut new_vars = self.vars.clone();
        new_vars[slot] = new_label.into();
        let inv = C::one() / slope.clone();
        let nonlinear = self.try_sub(&Series2::from_terms(self.vars.clone(), self.cap, [(key, slope)]))?;
        let z = Series2::<C>::variable(new_vars.clone(), self.cap, slot);
        let mut x = z.scale(&inv);
        for _ in 0..=self.cap {
            let next = z.try_sub(&nonlinear.substitute(label, &x)?)?.scale(&inv);
            if next == x {
                break;
            }
            x = next;
        }
        x.eff = self.eff;
        Ok(x)
    }

    /// Evaluates band by band (homogeneous total degree), summing from the
    /// top band down, using only trustworthy bands.
    pub fn eval(&self, x: &C, y: &C) -> C {
        let mut bands: BTreeMap<usize, C> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if i + j > self.eff {
                continue;
            }
            let mut v = c.clone();
            for _ in 0..*i {
                v = v * x.clone();
            }
            for _ in 0..*j {
                v = v * y.clone();
            }
            accumulate(&mut bands, i + j, v);
        }
        bands
            .into_values()
            .rev()
            .fold(C::zero(), |acc, b| acc + b)
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let mut bands: BTreeMap<usize, f64> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if i + j > self.eff {
                continue;
            }
            *bands.entry(i + j).or_insert(0.0) += c.to_f64() * x.powi(*i as i32) * y.powi(*j as i32);
        }
        bands.into_values().rev().sum()
    }

    /// Polydisc radius (in `max(|x|, |y|)`) inside which the last two
    /// retained total-degree bands stay below `rel_tol` times the leading
    /// band. Infinite when both of those bands vanish.
    pub fn validity_radius(&self, rel_tol: f64) -> f64 {
        let mut bands: BTreeMap<usize, f64> = BTreeMap::new();
        for ((i, j), c) in &self.terms {
            if i + j <= self.eff {
                *bands.entry(i + j).or_insert(0.0) += c.to_f64().abs();
            }
        }
        let bands: Vec<(usize, f64)> = bands.into_iter().collect();
        validity_from_bands(&bands, self.eff, rel_tol)
    }
}

impl<C: Coeff> Neg for &Series2<C> {
    type Output = Series2<C>;
    fn neg(self) -> Series2<C> {
        self.map(|c| -c.clone())
    }
}

impl<C: Coeff> Add for &Series2<C> {
    type Output = Series2<C>;
    fn add(self, o: &Series2<C>) -> Series2<C> {
        self.try_add(o).expect("incompatible series")
    }
}

impl<C: Coeff> Sub for &Series2<C> {
    type Output = Series2<C>;
    fn sub(self, o: &Series2<C>) -> Series2<C> {
        self.try_sub(o).expect("incompatible series")
    }
}

impl<C: Coeff> Mul for &Series2<C> {
    type Output = Series2<C>;
    fn mul(self, o: &Series2<C>) -> Series2<C> {
        self.try_mul(o).expect("incompatible series")
    }
}

// ---------------------------------------------------------------------------
// Plain-text tables
// ---------------------------------------------------------------------------

/// Coefficient kinds that can be written to and read from series tables.
///
/// Table layout: a header line
/// `# series <kind> <vars...> cap <N> eff <E> [radicand <p/q>]`, then one
/// line per term: exponents followed by `numerator denominator` (exact),
/// a single float (float), or `k numerator denominator` for the `ρ^k`
/// component (radical).
pub trait TableCoeff: Coeff {
    const TAG: &'static str;

    fn table_radicand(&self) -> Option<Rational> {
        None
    }

    fn table_fields(&self) -> Vec<String>;

    fn parse_fields(fields: &[&str], radicand: Option<&Rational>) -> Result<Self>;
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::usage(format!("bad integer field {s:?}")))
}

impl TableCoeff for Rational {
    const TAG: &'static str = "exact";

    fn table_fields(&self) -> Vec<String> {
        vec![format!("{} {}", self.numer(), self.denom())]
    }

    fn parse_fields(fields: &[&str], _: Option<&Rational>) -> Result<Self> {
        match fields {
            [n, d] => parse_rational(&format!("{n}/{d}")),
            _ => Err(Error::usage("exact entry needs numerator and denominator")),
        }
    }
}

impl TableCoeff for f64 {
    const TAG: &'static str = "float";

    fn table_fields(&self) -> Vec<String> {
        vec![format!("{self:e}")]
    }

    fn parse_fields(fields: &[&str], _: Option<&Rational>) -> Result<Self> {
        match fields {
            [v] => v
                .parse()
                .map_err(|_| Error::usage(format!("bad float field {v:?}"))),
            _ => Err(Error::usage("float entry needs one value")),
        }
    }
}

impl TableCoeff for Radical {
    const TAG: &'static str = "radical";

    fn table_radicand(&self) -> Option<Rational> {
        if self.is_rational() {
            None
        } else {
            self.radicand().cloned()
        }
    }

    fn table_fields(&self) -> Vec<String> {
        self.parts()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{k} {} {}", c.numer(), c.denom()))
            .collect()
    }

    fn parse_fields(fields: &[&str], radicand: Option<&Rational>) -> Result<Self> {
        let [k, n, d] = fields else {
            return Err(Error::usage("radical entry needs power, numerator, denominator"));
        };
        let k: usize = parse_int(k)?;
        let value = parse_rational(&format!("{n}/{d}"))?;
        if k == 0 {
            return Ok(Radical::rational(value));
        }
        if k > 2 {
            return Err(Error::usage("radical power must be 0, 1 or 2"));
        }
        let mut c = [Rational::zero(), Rational::zero(), Rational::zero()];
        c[k] = value;
        Radical::from_parts(
            Some(
                radicand
                    .cloned()
                    .ok_or_else(|| Error::usage("radical entry without radicand header"))?,
            ),
            c,
        )
    }
}

struct TableHeader {
    vars: Vec<Var>,
    cap: usize,
    eff: usize,
    radicand: Option<Rational>,
}

fn write_header<C: TableCoeff>(
    out: &mut String,
    vars: &[&Var],
    cap: usize,
    eff: usize,
    coeffs: impl Iterator<Item = C>,
) {
    let radicand = coeffs.filter_map(|c| c.table_radicand()).next();
    out.push_str("# series ");
    out.push_str(C::TAG);
    for v in vars {
        out.push(' ');
        out.push_str(v.as_str());
    }
    out.push_str(&format!(" cap {cap} eff {eff}"));
    if let Some(r) = radicand {
        out.push_str(&format!(" radicand {r}"));
    }
    out.push('\n');
}

fn parse_header<C: TableCoeff>(text: &str, nvars: usize) -> Result<(TableHeader, Vec<&str>)> {
    let mut header = None;
    let mut body = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# series ") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.first() != Some(&C::TAG) {
                return Err(Error::usage(format!(
                    "table kind {:?} does not match {}",
                    fields.first(),
                    C::TAG
                )));
            }
            if fields.len() < 1 + nvars + 4 {
                return Err(Error::usage("truncated series header"));
            }
            let vars = fields[1..=nvars].iter().map(|s| Var::new(*s)).collect();
            let rest = &fields[1 + nvars..];
            if rest[0] != "cap" || rest[2] != "eff" {
                return Err(Error::usage("series header needs cap and eff"));
            }
            let radicand = match rest.get(4..6) {
                Some(["radicand", r]) => Some(parse_rational(r)?),
                _ => None,
            };
            header = Some(TableHeader {
                vars,
                cap: parse_int(rest[1])?,
                eff: parse_int(rest[3])?,
                radicand,
            });
        } else if line.starts_with('#') {
            continue;
        } else {
            body.push(line);
        }
    }
    let header = header.ok_or_else(|| Error::usage("missing series header"))?;
    Ok((header, body))
}

impl<C: TableCoeff> Series1<C> {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        write_header(&mut out, &[&self.var], self.cap, self.eff, self.terms.values().cloned());
        for (j, c) in &self.terms {
            for f in c.table_fields() {
                out.push_str(&format!("{j} {f}\n"));
            }
        }
        out
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let (h, body) = parse_header::<C>(text, 1)?;
        let mut s = Series1::zero(h.vars[0].clone(), h.cap);
        for line in body {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let j: usize = parse_int(fields[0])?;
            let c = C::parse_fields(&fields[1..], h.radicand.as_ref())?;
            if j > h.cap {
                return Err(Error::usage(format!("term {j} exceeds cap {}", h.cap)));
            }
            accumulate(&mut s.terms, j, c);
        }
        prune(&mut s.terms);
        Ok(s.with_eff(h.eff))
    }
}

impl<C: TableCoeff> Series2<C> {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        write_header(
            &mut out,
            &[&self.vars[0], &self.vars[1]],
            self.cap,
            self.eff,
            self.terms.values().cloned(),
        );
        for ((i, j), c) in &self.terms {
            for f in c.table_fields() {
                out.push_str(&format!("{i} {j} {f}\n"));
            }
        }
        out
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let (h, body) = parse_header::<C>(text, 2)?;
        let mut s = Series2::zero([h.vars[0].clone(), h.vars[1].clone()], h.cap);
        for line in body {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 3 {
                return Err(Error::usage(format!("short table line {line:?}")));
            }
            let i: usize = parse_int(fields[0])?;
            let j: usize = parse_int(fields[1])?;
            if i + j > h.cap {
                return Err(Error::usage(format!("term ({i}, {j}) exceeds cap {}", h.cap)));
            }
            let c = C::parse_fields(&fields[2..], h.radicand.as_ref())?;
            accumulate(&mut s.terms, (i, j), c);
        }
        prune(&mut s.terms);
        Ok(s.with_eff(h.eff))
    }
}

/// Convenience constructor for the common `(a, b)` variable pair.
pub fn pair(a: &str, b: &str) -> [Var; 2] {
    [Var::from(a), Var::from(b)]
}
