//! The order r of a coefficient ℓ_r norm.
//!
//! Orders are kept as exact rationals so endpoint arithmetic such as
//! m/r - (m+1)/2 at r = 1 or r = 2m/(m+1) incurs no rounding at all.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// A norm order r ∈ [1, ∞], stored exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormOrder {
    /// Reduced fraction num/den with num >= den >= 1.
    Finite { num: u64, den: u64 },
    Infinity,
}

impl NormOrder {
    /// Builds num/den, reducing it; rejects r < 1.
    pub fn finite(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("norm order has zero denominator"));
        }
        if num < den {
            return Err(Error::domain(format!(
                "norm order must be at least 1 (got {num}/{den})"
            )));
        }
        let g = gcd(num, den);
        Ok(NormOrder::Finite {
            num: num / g,
            den: den / g,
        })
    }

    pub fn one() -> Self {
        NormOrder::Finite { num: 1, den: 1 }
    }

    pub fn infinity() -> Self {
        NormOrder::Infinity
    }

    /// The critical order 2m/(m+1) at which the sharp exponent vanishes.
    pub fn critical(m: u32) -> Self {
        Self::finite(2 * m as u64, m as u64 + 1).expect("critical order is >= 1")
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, NormOrder::Finite { .. })
    }

    /// Numerator of the reduced fraction; errors on infinity.
    pub fn num(&self) -> Result<u64> {
        match self {
            NormOrder::Finite { num, .. } => Ok(*num),
            NormOrder::Infinity => Err(Error::domain("norm order is infinite")),
        }
    }

    pub fn den(&self) -> Result<u64> {
        match self {
            NormOrder::Finite { den, .. } => Ok(*den),
            NormOrder::Infinity => Err(Error::domain("norm order is infinite")),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            NormOrder::Finite { num, den } => *num as f64 / *den as f64,
            NormOrder::Infinity => f64::INFINITY,
        }
    }

    /// Parses "inf", an integer, a fraction "a/b", or a plain decimal such
    /// as "1.1" (converted exactly to 11/10).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::parse(0, format!("norm order '{s}': {msg}"));
        if s.is_empty() {
            return Err(bad("empty"));
        }
        if s == "inf" || s == "infinity" {
            return Ok(NormOrder::Infinity);
        }
        if let Some((a, b)) = s.split_once('/') {
            let num: u64 = a.trim().parse().map_err(|_| bad("bad numerator"))?;
            let den: u64 = b.trim().parse().map_err(|_| bad("bad denominator"))?;
            return Self::finite(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("bad decimal"));
            }
            let int: u64 = if int_part.is_empty() {
                0
            } else {
                int_part.parse().map_err(|_| bad("bad integer part"))?
            };
            let scale = 10u64
                .checked_pow(frac_part.len() as u32)
                .ok_or_else(|| bad("too many decimal digits"))?;
            let frac: u64 = frac_part.parse().map_err(|_| bad("bad fraction part"))?;
            let num = int
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(|| bad("value too large"))?;
            return Self::finite(num, scale);
        }
        let num: u64 = s.parse().map_err(|_| bad("not a number"))?;
        Self::finite(num, 1)
    }
}

impl PartialOrd for NormOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NormOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NormOrder::Infinity, NormOrder::Infinity) => Ordering::Equal,
            (NormOrder::Infinity, _) => Ordering::Greater,
            (_, NormOrder::Infinity) => Ordering::Less,
            (
                NormOrder::Finite { num: a, den: b },
                NormOrder::Finite { num: c, den: d },
            ) => (*a as u128 * *d as u128).cmp(&(*c as u128 * *b as u128)),
        }
    }
}

impl fmt::Display for NormOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormOrder::Finite { num, den: 1 } => write!(f, "{num}"),
            NormOrder::Finite { num, den } => write!(f, "{num}/{den}"),
            NormOrder::Infinity => write!(f, "inf"),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// ℓ_r norm of a vector of non-negative magnitudes.
pub fn lr_norm(values: &[f64], r: NormOrder) -> f64 {
    lr_norm_f64(values, r.as_f64())
}

/// ℓ_r norm for a plain floating-point order r >= 1 (∞ allowed), rescaled
/// by the maximum entry before powering so large r never overflows or
/// underflows.
pub fn lr_norm_f64(values: &[f64], r: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |a, &v| a.max(v));
    if max == 0.0 {
        return 0.0;
    }
    if r.is_infinite() {
        return max;
    }
    if r == 1.0 {
        return values.iter().sum();
    }
    let sum: f64 = values.iter().map(|&v| (v / max).powf(r)).sum();
    max * sum.powf(1.0 / r)
}
