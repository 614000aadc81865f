//! Random Bernoulli polynomials: every coefficient an i.i.d. ±1 sign drawn
//! from a counter-based stream, so a sample is reconstructible bit-exactly
//! from (m, n, seed) on any platform and under any worker count.

use crate::error::{Error, Result};
use crate::multiindex::count;
use crate::norm::NormOrder;
use crate::parallel::par_map;
use crate::poly::{HomogeneousPolynomial, ScalarField};
use crate::rng::{derive_seed, CounterRng};
use crate::supnorm::{supnorm, Budget, SupNormEstimate};
use num_complex::Complex64;

/// Stream tag separating coefficient signs from other consumers of a seed.
const SIGN_STREAM: u64 = 0x4b53_5a31;

/// Default cap on the coefficient count of one sample.
pub const DEFAULT_COEFF_CAP: u64 = 10_000_000;

/// One Bernoulli polynomial together with the seed that reproduces it.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSample {
    pub polynomial: HomogeneousPolynomial,
    pub seed: u64,
    pub degree: u32,
    pub nvars: u32,
}

/// Draws the Bernoulli polynomial for (m, n, seed): signs are assigned in
/// canonical enumeration order, the i-th sign being a pure function of the
/// seed and i. The same (m, n, seed) gives the same sign pattern over both
/// scalar fields.
pub fn sample(m: u32, n: u32, seed: u64, field: ScalarField) -> Result<BernoulliSample> {
    sample_with_cap(m, n, seed, field, DEFAULT_COEFF_CAP)
}

pub fn sample_with_cap(
    m: u32,
    n: u32,
    seed: u64,
    field: ScalarField,
    cap: u64,
) -> Result<BernoulliSample> {
    let total = count(m, n)?;
    if total > cap {
        return Err(Error::Budget {
            estimated: total,
            cap,
        });
    }
    let stream = derive_seed(seed, &[SIGN_STREAM]);
    let dense: Vec<Complex64> = (0..total)
        .map(|i| {
            let sign = if CounterRng::at(stream, i) >> 63 == 0 {
                1.0
            } else {
                -1.0
            };
            Complex64::new(sign, 0.0)
        })
        .collect();
    let polynomial = HomogeneousPolynomial::from_dense(field, m, n, dense)?;
    Ok(BernoulliSample {
        polynomial,
        seed,
        degree: m,
        nvars: n,
    })
}

/// Coefficient ℓ_r norm of a Bernoulli sample in closed form: every
/// coefficient has modulus one, so the norm is count(m,n)^{1/r}.
///
/// Restricted to n > m, the regime the decomposition of the count lives in.
pub fn coeff_norm_closed_form(sample: &BernoulliSample, r: NormOrder) -> Result<f64> {
    if sample.nvars <= sample.degree {
        return Err(Error::domain(format!(
            "closed-form norm requires n > m (got m={}, n={})",
            sample.degree, sample.nvars
        )));
    }
    let total = count(sample.degree, sample.nvars)? as f64;
    Ok(match r {
        NormOrder::Infinity => 1.0,
        r => total.powf(1.0 / r.as_f64()),
    })
}

/// Five-number summary with Tukey-hinge quartiles (deterministic for any
/// worker count: values are sorted before summarizing).
#[derive(Debug, Clone, PartialEq)]
pub struct QuartileSummary {
    pub count: u32,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl QuartileSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("summary of an empty sample"));
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        let med = |s: &[f64]| -> f64 {
            let k = s.len();
            if k % 2 == 1 {
                s[k / 2]
            } else {
                0.5 * (s[k / 2 - 1] + s[k / 2])
            }
        };
        let len = v.len();
        let (q1, q3) = if len == 1 {
            (v[0], v[0])
        } else {
            // Tukey hinges: the median joins both halves when len is odd
            (med(&v[..len.div_ceil(2)]), med(&v[len / 2..]))
        };
        Ok(Self {
            count: len as u32,
            min: v[0],
            q1,
            median: med(&v),
            q3,
            max: v[len - 1],
        })
    }
}

/// Per-sample outcome of a statistic run.
#[derive(Debug, Clone, PartialEq)]
pub struct KszOutcome {
    pub sample_index: u32,
    pub seed: u64,
    pub estimate: SupNormEstimate,
    pub coeff_l1: f64,
}

/// A batch of Bernoulli samples with their sup-norm estimates and the
/// summary of the certified lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct KszRun {
    pub outcomes: Vec<KszOutcome>,
    pub summary: QuartileSummary,
}

/// Draws `sample_count` Bernoulli polynomials and summarizes the certified
/// sup-norm lower bounds. Sample i uses the derived seed (seed, i), so the
/// run is reproducible and order-independent.
pub fn ksz_supnorm_statistic(
    m: u32,
    n: u32,
    sample_count: u32,
    seed: u64,
    field: ScalarField,
    budget: &Budget,
) -> Result<KszRun> {
    if sample_count == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let results: Vec<Result<KszOutcome>> = par_map((0..sample_count).collect(), |i| {
        let sample_seed = derive_seed(seed, &[i as u64]);
        let s = sample(m, n, sample_seed, field)?;
        let est = supnorm(
            &s.polynomial,
            &Budget {
                seed: derive_seed(sample_seed, &[1]),
                ..budget.clone()
            },
        )?;
        Ok(KszOutcome {
            sample_index: i,
            seed: sample_seed,
            estimate: est,
            coeff_l1: s.polynomial.coeff_norm(NormOrder::one()),
        })
    });
    let outcomes: Vec<KszOutcome> = results.into_iter().collect::<Result<_>>()?;
    let lowers: Vec<f64> = outcomes.iter().map(|o| o.estimate.lower).collect();
    let summary = QuartileSummary::from_values(&lowers)?;
    Ok(KszRun { outcomes, summary })
}
