//! m-homogeneous polynomials P: ℓ∞ⁿ(K) → K over real or complex scalars,
//! with evaluation, coefficient ℓ_r norms, complexification, and a
//! line-oriented text format whose round trip preserves every bit.

use crate::error::{Error, Result};
use crate::multiindex::{count, enumerate, MultiIndex};
use crate::norm::{lr_norm, NormOrder};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Scalar field tag fixed at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarField {
    Real,
    Complex,
}

impl ScalarField {
    pub fn name(&self) -> &'static str {
        match self {
            ScalarField::Real => "real",
            ScalarField::Complex => "complex",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(ScalarField::Real),
            "complex" => Ok(ScalarField::Complex),
            other => Err(Error::parse(0, format!("unknown scalar field '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Sparse m-homogeneous polynomial: a map from multi-indices to scalar
/// coefficients. Real polynomials carry coefficients with zero imaginary
/// part and must be evaluated at real points.
///
/// Immutable after construction; evaluation is pure, so values can be
/// shared freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial {
    field: ScalarField,
    degree: u32,
    nvars: u32,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl HomogeneousPolynomial {
    /// Builds a polynomial from (multi-index, coefficient) pairs.
    ///
    /// Every index must have total degree `degree` and `nvars` variables;
    /// duplicate indices and non-finite coefficients are rejected, and real
    /// polynomials reject coefficients with nonzero imaginary part.
    pub fn new(
        field: ScalarField,
        degree: u32,
        nvars: u32,
        coeffs: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        if degree == 0 || nvars == 0 {
            return Err(Error::domain(format!(
                "polynomial requires m >= 1 and n >= 1 (got m={degree}, n={nvars})"
            )));
        }
        let mut map = BTreeMap::new();
        for (alpha, c) in coeffs {
            if alpha.degree() != degree {
                return Err(Error::domain(format!(
                    "index ({alpha}) has degree {}, polynomial has degree {degree}",
                    alpha.degree()
                )));
            }
            if alpha.nvars() != nvars as usize {
                return Err(Error::domain(format!(
                    "index ({alpha}) has {} variables, polynomial has {nvars}",
                    alpha.nvars()
                )));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::domain(format!("non-finite coefficient at ({alpha})")));
            }
            if field == ScalarField::Real && c.im != 0.0 {
                return Err(Error::domain(format!(
                    "real polynomial given complex coefficient at ({alpha})"
                )));
            }
            if map.insert(alpha.clone(), c).is_some() {
                return Err(Error::domain(format!("duplicate index ({alpha})")));
            }
        }
        Ok(Self {
            field,
            degree,
            nvars,
            coeffs: map,
        })
    }

    /// Dense fast path: one coefficient per multi-index, in canonical
    /// enumeration order.
    pub fn from_dense(
        field: ScalarField,
        degree: u32,
        nvars: u32,
        dense: Vec<Complex64>,
    ) -> Result<Self> {
        let indices = enumerate(degree, nvars)?;
        if dense.len() != indices.len() {
            return Err(Error::domain(format!(
                "dense coefficient vector has length {}, expected {}",
                dense.len(),
                indices.len()
            )));
        }
        Self::new(field, degree, nvars, indices.into_iter().zip(dense))
    }

    /// The zero polynomial (no terms). Constructible, but rejected by
    /// operations that divide by a norm.
    pub fn zero(field: ScalarField, degree: u32, nvars: u32) -> Result<Self> {
        Self::new(field, degree, nvars, std::iter::empty())
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// True when every monomial is multilinear (all exponents 0 or 1).
    pub fn is_multilinear(&self) -> bool {
        self.coeffs.keys().all(|a| a.is_multilinear())
    }

    /// Terms in canonical enumeration order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Coefficient at α, zero if absent.
    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Evaluates ∑ a_α z^α with compensated (Neumaier) accumulation.
    ///
    /// Real polynomials must be given real points.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.nvars as usize {
            return Err(Error::domain(format!(
                "point has {} components, polynomial has {} variables",
                z.len(),
                self.nvars
            )));
        }
        if self.field == ScalarField::Real && z.iter().any(|c| c.im != 0.0) {
            return Err(Error::domain(
                "real polynomial evaluated at a complex point",
            ));
        }
        // per-variable power tables up to the degree
        let m = self.degree as usize;
        let mut pow = vec![Complex64::new(1.0, 0.0); z.len() * (m + 1)];
        for (j, &zj) in z.iter().enumerate() {
            for k in 1..=m {
                pow[j * (m + 1) + k] = pow[j * (m + 1) + k - 1] * zj;
            }
        }
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for (alpha, &c) in &self.coeffs {
            let mut term = c;
            for (j, &e) in alpha.exponents().iter().enumerate() {
                if e > 0 {
                    term *= pow[j * (m + 1) + e as usize];
                }
            }
            re.add(term.re);
            im.add(term.im);
        }
        Ok(Complex64::new(re.value(), im.value()))
    }

    /// Coefficient ℓ_r norm (∑ |a_α|^r)^{1/r}; r = ∞ gives max |a_α|.
    pub fn coeff_norm(&self, r: NormOrder) -> f64 {
        let mags: Vec<f64> = self.coeffs.values().map(|c| c.norm()).collect();
        lr_norm(&mags, r)
    }

    /// Reinterprets a real polynomial over the complex scalars. The
    /// coefficient map is unchanged, so every coefficient norm is too.
    pub fn complexify(&self) -> Result<Self> {
        if self.field != ScalarField::Real {
            return Err(Error::domain("polynomial is already complex"));
        }
        Ok(Self {
            field: ScalarField::Complex,
            degree: self.degree,
            nvars: self.nvars,
            coeffs: self.coeffs.clone(),
        })
    }

    /// The polynomial with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        if self.field == ScalarField::Real && c.im != 0.0 {
            return Err(Error::domain("real polynomial scaled by a complex factor"));
        }
        Self::new(
            self.field,
            self.degree,
            self.nvars,
            self.coeffs.iter().map(|(a, v)| (a.clone(), v * c)),
        )
    }

    /// Expected coefficient count for a dense polynomial of this shape.
    pub fn full_count(&self) -> Result<u64> {
        count(self.degree, self.nvars)
    }

    /// Serializes to the text record format:
    ///
    /// ```text
    /// real 2 2
    /// 2 0 : 1
    /// 1 1 : -2.5
    /// ```
    ///
    /// Complex coefficients are written as `re,im`. Numbers use the
    /// shortest representation that parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.field, self.degree, self.nvars);
        for (alpha, c) in &self.coeffs {
            match self.field {
                ScalarField::Real => {
                    let _ = writeln!(out, "{alpha} : {}", c.re);
                }
                ScalarField::Complex => {
                    let _ = writeln!(out, "{alpha} : {},{}", c.re, c.im);
                }
            }
        }
        out
    }

    /// Parses the text record format. Blank lines and lines starting with
    /// '#' are ignored. Errors carry the 1-based line number.
    pub fn from_text(input: &str) -> Result<Self> {
        let mut header: Option<(ScalarField, u32, u32, usize)> = None;
        let mut pairs: Vec<(MultiIndex, Complex64)> = Vec::new();
        for (line_idx, raw) in input.lines().enumerate() {
            let line_no = line_idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match header {
                None => {
                    let tokens: Vec<&str> = line.split_whitespace().collect();
                    if tokens.len() != 3 {
                        return Err(Error::parse(
                            line_no,
                            "header must be '<field> <m> <n>'",
                        ));
                    }
                    let field = ScalarField::parse(tokens[0])
                        .map_err(|_| Error::parse(line_no, format!("unknown field '{}'", tokens[0])))?;
                    let m: u32 = tokens[1]
                        .parse()
                        .map_err(|_| Error::parse(line_no, "bad degree in header"))?;
                    let n: u32 = tokens[2]
                        .parse()
                        .map_err(|_| Error::parse(line_no, "bad variable count in header"))?;
                    if m == 0 || n == 0 {
                        return Err(Error::parse(line_no, "header requires m >= 1 and n >= 1"));
                    }
                    header = Some((field, m, n, line_no));
                }
                Some((field, m, n, _)) => {
                    let (alpha, coeff) =
                        parse_coeff_line(line, line_no, field, m, n)?;
                    if pairs.iter().any(|(a, _)| *a == alpha) {
                        return Err(Error::parse(line_no, format!("duplicate index ({alpha})")));
                    }
                    pairs.push((alpha, coeff));
                }
            }
        }
        let Some((field, m, n, _)) = header else {
            return Err(Error::parse(0, "empty polynomial file"));
        };
        if pairs.is_empty() {
            return Err(Error::parse(0, "polynomial file has no coefficient lines"));
        }
        Self::new(field, m, n, pairs).map_err(|e| match e {
            Error::Domain(msg) => Error::parse(0, msg),
            other => other,
        })
    }
}

fn parse_coeff_line(
    line: &str,
    line_no: usize,
    field: ScalarField,
    m: u32,
    n: u32,
) -> Result<(MultiIndex, Complex64)> {
    let Some((left, right)) = line.split_once(':') else {
        return Err(Error::parse(line_no, "missing ':' separator"));
    };
    let exps: Vec<u32> = left
        .split_whitespace()
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::parse(line_no, format!("bad exponent '{t}'")))
        })
        .collect::<Result<_>>()?;
    if exps.len() != n as usize {
        return Err(Error::parse(
            line_no,
            format!("expected {n} exponents, found {}", exps.len()),
        ));
    }
    let total: u32 = exps.iter().sum();
    if total != m {
        return Err(Error::parse(
            line_no,
            format!("index degree {total} does not match header degree {m}"),
        ));
    }
    let alpha = MultiIndex::new(exps).map_err(|e| Error::parse(line_no, e.to_string()))?;
    let value = right.trim();
    let coeff = match field {
        ScalarField::Real => {
            if value.contains(',') {
                return Err(Error::parse(
                    line_no,
                    "real polynomial has a complex coefficient",
                ));
            }
            let re: f64 = value
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad coefficient '{value}'")))?;
            Complex64::new(re, 0.0)
        }
        ScalarField::Complex => {
            let Some((a, b)) = value.split_once(',') else {
                return Err(Error::parse(
                    line_no,
                    "complex coefficient must be 're,im'",
                ));
            };
            let re: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad real part '{a}'")))?;
            let im: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad imaginary part '{b}'")))?;
            Complex64::new(re, im)
        }
    };
    if !coeff.re.is_finite() || !coeff.im.is_finite() {
        return Err(Error::parse(line_no, "non-finite coefficient"));
    }
    Ok((alpha, coeff))
}

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
