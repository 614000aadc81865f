//! Multi-indices α with |α| = m over n variables: enumeration, counting,
//! and the binomial decomposition of the count.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// Exponent vector of one monomial of an m-homogeneous polynomial.
///
/// Invariants enforced at construction: at least one variable, positive
/// total degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Box<[u32]>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::domain("multi-index needs at least one variable"));
        }
        let degree = exponents
            .iter()
            .try_fold(0u32, |acc, &e| acc.checked_add(e))
            .ok_or_else(|| Error::Overflow("multi-index degree".into()))?;
        if degree == 0 {
            return Err(Error::domain("multi-index degree must be positive"));
        }
        Ok(Self {
            exponents: exponents.into_boxed_slice(),
            degree,
        })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exponents.len()
    }

    /// True when every exponent is 0 or 1.
    pub fn is_multilinear(&self) -> bool {
        self.exponents.iter().all(|&e| e <= 1)
    }
}

/// Canonical order: lexicographically descending exponent vectors sort
/// ascending, so ordered containers iterate in the order [`enumerate`]
/// produces. (2,0) comes before (1,1) comes before (0,2).
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other.exponents.cmp(&self.exponents)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.exponents.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// All multi-indices with |α| = m over n variables, in canonical
/// (lexicographically descending) order. Length equals [`count`]`(m, n)`.
pub fn enumerate(m: u32, n: u32) -> Result<Vec<MultiIndex>> {
    if m == 0 || n == 0 {
        return Err(Error::domain(format!(
            "enumeration requires m >= 1 and n >= 1 (got m={m}, n={n})"
        )));
    }
    let expected = count(m, n)?;
    let expected: usize = expected
        .try_into()
        .map_err(|_| Error::Overflow(format!("enumeration of {expected} indices")))?;
    let mut out = Vec::with_capacity(expected);
    let mut scratch = vec![0u32; n as usize];
    fill(&mut out, &mut scratch, 0, m);
    debug_assert_eq!(out.len(), expected);
    Ok(out)
}

fn fill(out: &mut Vec<MultiIndex>, scratch: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(MultiIndex {
            exponents: scratch.clone().into_boxed_slice(),
            degree: scratch.iter().sum(),
        });
        scratch[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        scratch[pos] = e;
        fill(out, scratch, pos + 1, remaining - e);
    }
    scratch[pos] = 0;
}

/// Number of multi-indices with |α| = m over n variables: C(n+m-1, m),
/// computed in closed form with overflow checking.
pub fn count(m: u32, n: u32) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::domain(format!(
            "count requires m >= 1 and n >= 1 (got m={m}, n={n})"
        )));
    }
    binomial(n as u64 + m as u64 - 1, m as u64)
}

/// C(a, b) with exact integer arithmetic; errors instead of wrapping.
pub fn binomial(a: u64, b: u64) -> Result<u64> {
    if b > a {
        return Ok(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for k in 1..=b {
        // acc holds C(a-b+k-1, k-1); multiply then divide keeps it integral.
        acc = acc
            .checked_mul((a - b + k) as u128)
            .ok_or_else(|| Error::Overflow(format!("binomial({a}, {b})")))?;
        acc /= k as u128;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("binomial({a}, {b})")))
}

/// Splits `count(m, n)` as C(n, m) + remainder for n > m.
///
/// The first term is (1/m!)·∏_{k=0}^{m-1}(n-k); the remainder, viewed as a
/// function of n with m fixed, is a polynomial of degree m-1 (its m-th
/// forward difference vanishes). It is strictly positive for m >= 2 and
/// identically zero for m = 1.
pub fn count_decomposition(m: u32, n: u32) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::domain("count_decomposition requires m >= 1"));
    }
    if n <= m {
        return Err(Error::domain(format!(
            "count_decomposition requires n > m (got m={m}, n={n})"
        )));
    }
    let lower = binomial(n as u64, m as u64)?;
    let total = count(m, n)?;
    Ok((lower, total - lower))
}
