//! Coefficient scalars.
//!
//! Three kinds are supported: exact rationals ([`Rational`]), binary floats
//! (`f64`), and [`Radical`], the field `Q(ρ)` with `ρ³ = r` for a single
//! rational radicand `r`. The radical kind is what keeps the cusp
//! normalisation exact: the only irrational constant the pipeline ever needs
//! is the real cube root introduced when `ξ(0,V)` is brought to `W³`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Exact,
    Radical,
    Float,
}

/// Field operations needed by the series algebra.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    const KIND: ScalarKind;

    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn to_f64(&self) -> f64;

    /// Real cube root inside the same scalar kind, if one is representable.
    fn real_cbrt(&self) -> Option<Self>;
}

impl Coeff for Rational {
    const KIND: ScalarKind = ScalarKind::Exact;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn real_cbrt(&self) -> Option<Self> {
        rational_cbrt(self)
    }
}

impl Coeff for f64 {
    const KIND: ScalarKind = ScalarKind::Float;

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn real_cbrt(&self) -> Option<Self> {
        Some(self.cbrt())
    }
}

/// Exact real cube root of a rational, when it is a perfect cube.
pub fn rational_cbrt(q: &Rational) -> Option<Rational> {
    fn int_cbrt(n: &BigInt) -> Option<BigInt> {
        let r = n.abs().cbrt();
        if &(&r * &r * &r) == &n.abs() {
            Some(if n.is_negative() { -r } else { r })
        } else {
            None
        }
    }
    let n = int_cbrt(q.numer())?;
    let d = int_cbrt(q.denom())?;
    Some(Rational::new(n, d))
}

/// Parses `"3"`, `"-7/12"`, `"0.25"`, `"1e-3"` into an exact rational.
/// Decimal forms are read digit-for-digit, so `"0.1"` is exactly `1/10`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::usage(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::usage(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Shorthand for `n/d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Element `c0 + c1·ρ + c2·ρ²` of `Q(ρ)`, `ρ³ = r`, with `r` not a rational cube.
///
/// Values with no radicand attached are plain rationals (`c1 = c2 = 0`); they
/// combine freely with any radicand. Mixing two different radicands panics,
/// since no pipeline ever adjoins more than one.
#[derive(Clone)]
pub struct Radical {
    radicand: Option<Arc<Rational>>,
    c: [Rational; 3],
}

impl Radical {
    pub fn rational(q: Rational) -> Self {
        Radical {
            radicand: None,
            c: [q, Rational::zero(), Rational::zero()],
        }
    }

    /// The real cube root of `r`; rational when `r` is a perfect cube.
    pub fn cbrt_of(r: &Rational) -> Self {
        if let Some(root) = rational_cbrt(r) {
            return Radical::rational(root);
        }
        Radical {
            radicand: Some(Arc::new(r.clone())),
            c: [Rational::zero(), Rational::one(), Rational::zero()],
        }
    }

    pub fn radicand(&self) -> Option<&Rational> {
        self.radicand.as_deref()
    }

    /// Components `[c0, c1, c2]` in the basis `1, ρ, ρ²`.
    pub fn parts(&self) -> &[Rational; 3] {
        &self.c
    }

    pub fn from_parts(radicand: Option<Rational>, c: [Rational; 3]) -> Result<Self> {
        match radicand {
            None if !(c[1].is_zero() && c[2].is_zero()) => Err(Error::usage(
                "radical components given without a radicand",
            )),
            None => Ok(Radical { radicand: None, c }),
            Some(r) => {
                if rational_cbrt(&r).is_some() {
                    return Err(Error::usage(format!("radicand {r} is a perfect cube")));
                }
                Ok(Radical {
                    radicand: Some(Arc::new(r)),
                    c,
                })
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        self.c[1].is_zero() && self.c[2].is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.c[0])
    }

    fn join(a: &Option<Arc<Rational>>, b: &Option<Arc<Rational>>) -> Option<Arc<Rational>> {
        match (a, b) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.clone()),
            (Some(x), Some(y)) => {
                assert!(x == y, "mixed radicands {x} and {y}");
                Some(x.clone())
            }
        }
    }

    fn r(&self) -> Rational {
        self.radicand.as_deref().cloned().unwrap_or_else(Rational::zero)
    }

    /// Norm `N(a) = a·σ(a)·σ²(a)`, rational.
    pub fn norm(&self) -> Rational {
        let [a0, a1, a2] = &self.c;
        let r = self.r();
        a0 * a0 * a0 + &r * a1 * a1 * a1 + &r * &r * a2 * a2 * a2
            - Rational::from_integer(3.into()) * &r * a0 * a1 * a2
    }

    pub fn inv(&self) -> Self {
        if self.is_rational() {
            assert!(!self.c[0].is_zero(), "division by zero");
            return Radical {
                radicand: self.radicand.clone(),
                c: [self.c[0].recip(), Rational::zero(), Rational::zero()],
            };
        }
        let [a0, a1, a2] = &self.c;
        let r = self.r();
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero");
        let b0 = a0 * a0 - &r * a1 * a2;
        let b1 = &r * a2 * a2 - a0 * a1;
        let b2 = a1 * a1 - a0 * a2;
        Radical {
            radicand: self.radicand.clone(),
            c: [b0 / &n, b1 / &n, b2 / &n],
        }
    }
}

impl fmt::Debug for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Radical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.c[0]);
        }
        let r = self.r();
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·cbrt({r})")?,
                _ => write!(f, "({c})·cbrt({r})^2")?,
            }
        }
        Ok(())
    }
}

impl PartialEq for Radical {
    fn eq(&self, other: &Self) -> bool {
        if self.c != other.c {
            return false;
        }
        self.is_rational() || self.radicand == other.radicand
    }
}

impl Zero for Radical {
    fn zero() -> Self {
        Radical::rational(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl One for Radical {
    fn one() -> Self {
        Radical::rational(Rational::one())
    }
}

impl Neg for Radical {
    type Output = Radical;
    fn neg(self) -> Radical {
        let [a, b, c] = self.c;
        Radical {
            radicand: self.radicand,
            c: [-a, -b, -c],
        }
    }
}

impl Add for Radical {
    type Output = Radical;
    fn add(self, o: Radical) -> Radical {
        let radicand = Radical::join(&self.radicand, &o.radicand);
        let [a0, a1, a2] = self.c;
        let [b0, b1, b2] = o.c;
        Radical {
            radicand,
            c: [a0 + b0, a1 + b1, a2 + b2],
        }
    }
}

impl Sub for Radical {
    type Output = Radical;
    fn sub(self, o: Radical) -> Radical {
        self + (-o)
    }
}

impl Mul for Radical {
    type Output = Radical;
    fn mul(self, o: Radical) -> Radical {
        let radicand = Radical::join(&self.radicand, &o.radicand);
        if self.is_rational() {
            let s = &self.c[0];
            let [b0, b1, b2] = o.c;
            return Radical {
                radicand,
                c: [s * b0, s * b1, s * b2],
            };
        }
        if o.is_rational() {
            let s = &o.c[0];
            let [a0, a1, a2] = self.c;
            return Radical {
                radicand,
                c: [a0 * s, a1 * s, a2 * s],
            };
        }
        let r = radicand.as_deref().cloned().unwrap_or_else(Rational::zero);
        let [a0, a1, a2] = &self.c;
        let [b0, b1, b2] = &o.c;
        let c0 = a0 * b0 + &r * (a1 * b2 + a2 * b1);
        let c1 = a0 * b1 + a1 * b0 + &r * a2 * b2;
        let c2 = a0 * b2 + a1 * b1 + a2 * b0;
        Radical {
            radicand,
            c: [c0, c1, c2],
        }
    }
}

impl Div for Radical {
    type Output = Radical;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Radical) -> Radical {
        self * o.inv()
    }
}

impl Coeff for Radical {
    const KIND: ScalarKind = ScalarKind::Radical;

    fn from_rational(q: &Rational) -> Self {
        Radical::rational(q.clone())
    }

    fn to_f64(&self) -> f64 {
        let rho = ToPrimitive::to_f64(&self.r()).unwrap_or(f64::NAN).cbrt();
        let [a0, a1, a2] = &self.c;
        let f = |q: &Rational| ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        f(a0) + rho * (f(a1) + rho * f(a2))
    }

    fn real_cbrt(&self) -> Option<Self> {
        self.as_rational().map(Radical::cbrt_of)
    }
}
