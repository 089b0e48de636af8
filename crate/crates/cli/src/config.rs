//! Run configuration: a TOML file whose entries keep their source spans so
//! that every rejection can point at a line.

use std::ops::Range;
use std::path::{Path, PathBuf};

use cusp_core::pde_series::{Boundary, ComplexQ, G1Spec, G1Term, ProblemData};
use cusp_core::scalar::parse_rational;
use cusp_core::{Coeff, Error, Rational, ScalarKind};
use num_complex::Complex;
use num_traits::Zero;
use serde::Deserialize;
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::error::{CliError, CliResult};

/// Exact order limits: below 3 the cusp is invisible, above 16 exact
/// arithmetic becomes impractically slow.
pub const ORDER_RANGE: (usize, usize) = (3, 16);

/// A number written as an integer, a float or a string such as `"-7/12"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn rational(&self) -> cusp_core::Result<Rational> {
        match self {
            Number::Int(i) => Ok(Rational::from_integer((*i).into())),
            Number::Float(f) if f.is_finite() => parse_rational(&f.to_string()),
            Number::Float(f) => Err(Error::usage(format!("{f} is not a finite number"))),
            Number::Text(s) => parse_rational(s),
        }
    }

    pub fn real(&self) -> cusp_core::Result<f64> {
        match self {
            Number::Float(f) => Ok(*f),
            _ => Ok(Coeff::to_f64(&self.rational()?)),
        }
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(Number),
    Pair((Number, Number)),
}

impl Scalar {
    pub fn complex(&self) -> cusp_core::Result<ComplexQ> {
        match self {
            Scalar::Real(x) => Ok(Complex::new(x.rational()?, Rational::zero())),
            Scalar::Pair((re, im)) => Ok(Complex::new(re.rational()?, im.rational()?)),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub order: Option<Spanned<i64>>,
    pub mode: Option<Spanned<String>>,
    pub out: Option<String>,
    pub threads: Option<Spanned<i64>>,
    pub problem: Option<Spanned<RawProblem>>,
    pub solve: Option<Spanned<RawSolve>>,
    pub curves: Option<Spanned<RawCurves>>,
    pub verify: Option<Spanned<RawVerify>>,
    pub korobeinik: Option<Spanned<RawKorobeinik>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    /// `α_1, α_2, …` with `α_0 = 4` implied.
    #[serde(default)]
    pub alpha: Vec<Spanned<Number>>,
    pub b0: Spanned<Vec<Spanned<Number>>>,
    pub v_star: Spanned<Number>,
    pub boundary: Option<Spanned<String>>,
    pub validity_tol: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolve {
    pub points: Vec<Spanned<(Number, Number)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCurves {
    pub tau: Vec<Spanned<Number>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVerify {
    /// Grid centre in cusp coordinates `(τ, ξ)`.
    pub center: Spanned<(Number, Number)>,
    pub half_width: Spanned<(f64, f64)>,
    pub nodes: Option<Spanned<i64>>,
    pub steps: Spanned<Vec<f64>>,
    pub sheet: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RawG1Term {
    Poly(Vec<Scalar>),
    Pole { a: Scalar, c: Scalar },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawKorobeinik {
    pub g1: Spanned<Vec<Spanned<RawG1Term>>>,
    #[serde(default)]
    pub u: Vec<Spanned<Scalar>>,
    pub terms: Option<Spanned<i64>>,
    /// When present, probes use the recurrence with this `α` instead of
    /// the closed-form coefficients.
    pub alpha: Option<Vec<Spanned<Number>>>,
    pub bidisc: Option<Spanned<RawBidisc>>,
    pub cauchy: Option<Spanned<RawCauchy>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBidisc {
    pub u_star: Option<Scalar>,
    pub r: Number,
    pub r1: Number,
    pub samples: Option<i64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCauchy {
    pub r: f64,
    pub r0: f64,
    pub eps: f64,
    pub n_max: Option<i64>,
}

/// Resolved problem data with the source lines of the boundary entries.
pub struct ProblemSpec {
    pub data: ProblemData,
    pub validity_tol: Option<f64>,
    b0_lines: Vec<usize>,
    b0_line: usize,
}

pub struct Config {
    pub path: PathBuf,
    text: String,
    pub digest: String,
    pub raw: RawConfig,
}

impl Config {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(path, text)
    }

    pub fn parse(path: &Path, text: String) -> CliResult<Self> {
        let raw: RawConfig = toml::from_str(&text).map_err(|e| CliError::Parse {
            file: path.display().to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(Config {
            path: path.to_path_buf(),
            text,
            digest,
            raw,
        })
    }

    fn file(&self) -> String {
        self.path.display().to_string()
    }

    pub fn line_of(&self, span: &Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].bytes().filter(|b| *b == b'\n').count() + 1
    }

    /// Attaches the line of `span` to a core error.
    pub fn at(&self, span: &Range<usize>, err: Error) -> CliError {
        CliError::At {
            file: self.file(),
            line: self.line_of(span),
            err,
        }
    }

    pub fn whole(&self, err: Error) -> CliError {
        CliError::InFile {
            file: self.file(),
            err,
        }
    }

    fn missing(&self, section: &str) -> CliError {
        self.whole(Error::usage(format!("missing [{section}] section")))
    }

    pub fn order(&self) -> CliResult<usize> {
        let Some(o) = &self.raw.order else {
            return Err(self.whole(Error::usage("order is required")));
        };
        let (lo, hi) = ORDER_RANGE;
        let n = *o.get_ref();
        if n < lo as i64 || n > hi as i64 {
            return Err(self.at(
                &o.span(),
                Error::usage(format!("order must lie in [{lo}, {hi}], got {n}")),
            ));
        }
        Ok(n as usize)
    }

    /// The command-line override wins over the file.
    pub fn mode(&self, flag: Option<ScalarKind>) -> CliResult<ScalarKind> {
        if let Some(kind) = flag {
            return Ok(kind);
        }
        match &self.raw.mode {
            None => Ok(ScalarKind::Exact),
            Some(m) => parse_mode(m.get_ref()).map_err(|e| self.at(&m.span(), e)),
        }
    }

    pub fn out_dir(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| self.raw.out.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn threads(&self) -> CliResult<usize> {
        match &self.raw.threads {
            None => Ok(1),
            Some(t) if *t.get_ref() >= 1 => Ok(*t.get_ref() as usize),
            Some(t) => Err(self.at(&t.span(), Error::usage("threads must be at least 1"))),
        }
    }

    pub fn problem(&self) -> CliResult<ProblemSpec> {
        let raw = self.raw.problem.as_ref().ok_or_else(|| self.missing("problem"))?;
        let p = raw.get_ref();
        let alpha = self.rationals(&p.alpha)?;
        let b0 = self.rationals(p.b0.get_ref())?;
        if b0.len() < 4 {
            return Err(self.at(
                &p.b0.span(),
                Error::usage("b0 needs at least b00..b03"),
            ));
        }
        let v_star = p.v_star.get_ref().rational().map_err(|e| self.at(&p.v_star.span(), e))?;
        let boundary = match &p.boundary {
            None => Boundary::Polynomial,
            Some(b) => match b.get_ref().as_str() {
                "polynomial" => Boundary::Polynomial,
                "truncated" => Boundary::Truncated,
                other => {
                    return Err(self.at(
                        &b.span(),
                        Error::usage(format!(
                            "boundary must be \"polynomial\" or \"truncated\", got {other:?}"
                        )),
                    ))
                }
            },
        };
        let validity_tol = match &p.validity_tol {
            Some(t) if !(*t.get_ref() > 0.0 && *t.get_ref() < 1.0) => {
                return Err(self.at(&t.span(), Error::usage("validity_tol must lie in (0, 1)")))
            }
            t => t.as_ref().map(|t| *t.get_ref()),
        };
        let mut data = ProblemData::new(alpha, b0, v_star);
        data.boundary = boundary;
        Ok(ProblemSpec {
            data,
            validity_tol,
            b0_lines: p.b0.get_ref().iter().map(|s| self.line_of(&s.span())).collect(),
            b0_line: self.line_of(&p.b0.span()),
        })
    }

    /// Fails fast unless `b02 = 0` and `b03 ≠ 0`, pointing at the entry.
    pub fn check_singular(&self, spec: &ProblemSpec) -> CliResult<()> {
        spec.data.check_singular().map_err(|err| {
            let idx = if spec.data.b0j(2).is_zero() { 3 } else { 2 };
            CliError::At {
                file: self.file(),
                line: spec.b0_lines.get(idx).copied().unwrap_or(spec.b0_line),
                err,
            }
        })
    }

    pub fn rationals(&self, xs: &[Spanned<Number>]) -> CliResult<Vec<Rational>> {
        xs.iter()
            .map(|x| x.get_ref().rational().map_err(|e| self.at(&x.span(), e)))
            .collect()
    }

    pub fn section<'a, T>(&self, s: &'a Option<Spanned<T>>, name: &str) -> CliResult<&'a Spanned<T>> {
        s.as_ref().ok_or_else(|| self.missing(name))
    }

    pub fn g1(&self, k: &RawKorobeinik) -> CliResult<G1Spec> {
        let mut terms = Vec::new();
        for t in k.g1.get_ref() {
            let at = |e| self.at(&t.span(), e);
            terms.push(match t.get_ref() {
                RawG1Term::Poly(cs) => G1Term::Poly(
                    cs.iter().map(Scalar::complex).collect::<cusp_core::Result<_>>().map_err(at)?,
                ),
                RawG1Term::Pole { a, c } => {
                    let strength = c.complex().map_err(at)?;
                    if strength.re.is_zero() && strength.im.is_zero() {
                        return Err(self.at(&t.span(), Error::usage("pole strength must be nonzero")));
                    }
                    G1Term::Pole {
                        at: a.complex().map_err(at)?,
                        strength,
                    }
                }
            });
        }
        if terms.is_empty() {
            return Err(self.at(&k.g1.span(), Error::usage("g1 needs at least one term")));
        }
        Ok(G1Spec::new(terms))
    }
}

pub fn parse_mode(s: &str) -> cusp_core::Result<ScalarKind> {
    match s {
        "exact" => Ok(ScalarKind::Exact),
        "float" => Ok(ScalarKind::Float),
        other => Err(Error::usage(format!(
            "mode must be \"exact\" or \"float\", got {other:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> CliResult<Config> {
        Config::parse(Path::new("run.toml"), text.to_string())
    }

    #[test]
    fn numbers_parse_exactly() {
        let r = |n: Number| n.rational().unwrap();
        assert_eq!(r(Number::Float(0.1)), Rational::new(1.into(), 10.into()));
        assert_eq!(r(Number::Text("-7/12".into())), Rational::new((-7).into(), 12.into()));
        assert_eq!(r(Number::Int(3)), Rational::from_integer(3.into()));
    }

    #[test]
    fn errors_carry_lines() {
        let c = cfg("order = 6\n\n[problem]\nb0 = [0, 1,\n  1, \"1/12\"]\nv_star = 0\n").unwrap();
        let spec = c.problem().unwrap();
        let err = c.check_singular(&spec).unwrap_err().to_string();
        assert!(err.starts_with("run.toml:5: usage: Jacobian must vanish"), "{err}");
        let c = cfg("order = 40\n").unwrap();
        assert_eq!(c.order().unwrap_err().to_string(), "run.toml:1: usage: order must lie in [3, 16], got 40");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = cfg("order = 6\nbogus = 1\n").err().unwrap();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn g1_grammar() {
        let c = cfg("[korobeinik]\ng1 = [{ poly = [1, 0, \"1/2\"] }, { pole = { a = [1, 2], c = 3 } }]\n").unwrap();
        let g = c.g1(c.raw.korobeinik.as_ref().unwrap().get_ref()).unwrap();
        assert_eq!(g.terms.len(), 2);
        assert!(!g.is_entire());
    }

    #[test]
    fn digest_is_stable() {
        let a = cfg("order = 6\n").unwrap();
        let b = cfg("order = 6\n").unwrap();
        assert_eq!(a.digest, b.digest);
        assert_eq!(a.digest.len(), 64);
    }
}
