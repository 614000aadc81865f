//! The inequality laboratory: the sharp exponent m/r - (m+1)/2, Hölder
//! interpolation of coefficient norms, the n-dependent theoretical lower
//! bound, and seeded sweeps fitting the log-log growth of the ratio
//! ‖P‖_r / ‖P‖_∞ over Bernoulli samples.

use crate::error::{Error, Result};
use crate::ksz;
use crate::multiindex::count;
use crate::norm::{lr_norm_f64, NormOrder};
use crate::parallel::par_map;
use crate::poly::{HomogeneousPolynomial, ScalarField};
use crate::rng::derive_seed;
use crate::supnorm::{supnorm, Budget};
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

/// Stream tag for the per-sample sup-norm budgets of a sweep.
const SUP_STREAM: u64 = 0x5355_5030;

/// The sharp exponent m/r - (m+1)/2, computed through exact integer
/// arithmetic so the endpoints r = 1 and r = 2m/(m+1) give exactly
/// (m-1)/2 and 0.
pub fn sharp_exponent(m: u32, r: NormOrder) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("sharp_exponent requires m >= 1"));
    }
    check_r_in_theorem_range(m, r)?;
    let num = r.num()? as i128;
    let den = r.den()? as i128;
    let m = m as i128;
    let top = 2 * m * den - num * (m + 1);
    let bot = 2 * num;
    Ok(top as f64 / bot as f64)
}

fn check_r_in_theorem_range(m: u32, r: NormOrder) -> Result<()> {
    if !r.is_finite() || r > NormOrder::critical(m) {
        return Err(Error::domain(format!(
            "r = {r} outside [1, 2m/(m+1)] = [1, {}] for m = {m}",
            NormOrder::critical(m)
        )));
    }
    Ok(())
}

/// One Hölder interpolation step for finite vectors: for 1 <= r <= s,
/// ‖x‖_r <= N^{1/r - 1/s}·‖x‖_s with N the support size, with equality
/// exactly when x is constant on its support.
#[derive(Debug, Clone, PartialEq)]
pub struct HoelderInterpolation {
    pub lhs: f64,
    pub rhs: f64,
    pub support: usize,
}

pub fn hoelder_interpolate(x: &[f64], r: f64, s: f64) -> Result<HoelderInterpolation> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::domain(format!("r must be finite and >= 1 (got {r})")));
    }
    if !(s >= r) {
        return Err(Error::domain(format!("need r <= s (got r={r}, s={s})")));
    }
    if x.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::domain(
            "vector entries must be finite and non-negative",
        ));
    }
    let support = x.iter().filter(|&&v| v > 0.0).count();
    let lhs = lr_norm_f64(x, r);
    let inv_s = if s.is_infinite() { 0.0 } else { 1.0 / s };
    let rhs = (support as f64).powf(1.0 / r - inv_s) * lr_norm_f64(x, s);
    Ok(HoelderInterpolation { lhs, rhs, support })
}

/// The pure-Hölder coefficient bound ‖P‖_r <= count(m,n)^{1/r-(m+1)/(2m)}
/// ·‖P‖_{2m/(m+1)}: no unknown constants, only the index-set size.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBound {
    /// ‖P‖_r.
    pub lhs: f64,
    /// count(m,n)^{1/r - (m+1)/(2m)}.
    pub bound_shape: f64,
    /// ‖P‖ at the critical order 2m/(m+1).
    pub bh_norm: f64,
}

impl ChainBound {
    pub fn rhs(&self) -> f64 {
        self.bound_shape * self.bh_norm
    }

    /// The inequality with a 1e-12 relative slack for rounding at equality
    /// cases (flat coefficient vectors attain it exactly).
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs() * (1.0 + 1e-12)
    }
}

pub fn upper_bound_chain(p: &HomogeneousPolynomial, r: NormOrder) -> Result<ChainBound> {
    let m = p.degree();
    check_r_in_theorem_range(m, r)?;
    if p.is_zero() {
        return Err(Error::domain("chain bound requires a nonzero polynomial"));
    }
    let total = count(m, p.nvars())?;
    // 1/r - (m+1)/(2m) = (2m·den - num·(m+1)) / (2m·num), exact in integers
    let num = r.num()? as i128;
    let den = r.den()? as i128;
    let mi = m as i128;
    let exponent = (2 * mi * den - num * (mi + 1)) as f64 / (2 * mi * num) as f64;
    Ok(ChainBound {
        lhs: p.coeff_norm(r),
        bound_shape: (total as f64).powf(exponent),
        bh_norm: p.coeff_norm(NormOrder::critical(m)),
    })
}

/// The n-dependent part of the lower bound any valid constant must beat:
/// count(m,n)^{1/r} / (n^{(m+1)/2}·sqrt(log m)). Grows like
/// n^{m/r-(m+1)/2} up to the log factor.
pub fn ratio_lower_bound_theoretical(m: u32, n: u32, r: NormOrder) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain(
            "theoretical ratio bound requires m >= 2 (log m vanishes at m = 1)",
        ));
    }
    if n <= m {
        return Err(Error::domain(format!(
            "theoretical ratio bound requires n > m (got m={m}, n={n})"
        )));
    }
    check_r_in_theorem_range(m, r)?;
    let total = count(m, n)? as f64;
    let numer = total.powf(1.0 / r.as_f64());
    let denom = (n as f64).powf((m as f64 + 1.0) / 2.0) * (m as f64).ln().sqrt();
    Ok(numer / denom)
}

/// Where a record's polynomial came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    KszSample,
    UserPolynomial,
}

impl Source {
    pub fn name(&self) -> &'static str {
        match self {
            Source::KszSample => "ksz-sample",
            Source::UserPolynomial => "user-polynomial",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ksz-sample" => Ok(Source::KszSample),
            "user-polynomial" => Ok(Source::UserPolynomial),
            other => Err(Error::parse(0, format!("unknown source '{other}'"))),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of a scaling sweep.
///
/// `ratio` divides by the certified lower bound of ‖P‖_∞ (an upper estimate
/// of the true ratio); `ratio_conservative` divides by the certified upper
/// bound (a lower estimate). The bracket sits in between.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub m: u32,
    pub n: u32,
    pub r: NormOrder,
    pub seed: u64,
    pub source: Source,
    pub coeff_norm_r: f64,
    pub sup_lower: f64,
    pub sup_upper: f64,
    pub ratio: f64,
    pub ratio_conservative: f64,
}

/// Least-squares line in log-log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

/// Fits log(y) = intercept + slope·log(x) by least squares.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::domain("log-log fit needs at least two points"));
    }
    for &(x, y) in points {
        if !(x > 0.0 && x.is_finite() && y > 0.0 && y.is_finite()) {
            return Err(Error::domain(format!(
                "log-log fit needs positive finite points (got ({x}, {y}))"
            )));
        }
    }
    let xs: Vec<f64> = points.iter().map(|&(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("log-log fit needs distinct x values"));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
    })
}

/// Fit of the per-n ratio statistic against n, with the sharp exponent the
/// slope is compared to.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub predicted_exponent: f64,
    pub n_values: Vec<u32>,
    /// Which order statistic of the per-sample ratios was fitted.
    pub statistic: &'static str,
}

/// Parameters of one scaling sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingConfig {
    pub m: u32,
    pub r: NormOrder,
    pub n_values: Vec<u32>,
    pub samples_per_n: u32,
    pub seed: u64,
    pub field: ScalarField,
}

/// Sweep output: every per-sample record plus the fitted line.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRun {
    pub records: Vec<ExperimentRecord>,
    pub fit: ScalingFit,
    /// (n, sample index) of records whose sup-norm search exceeded the grid
    /// budget and fell back to ascent-only bounds; their brackets carry the
    /// trivial ‖P‖₁ upper bound and a correspondingly wide gap.
    pub ascent_only: Vec<(u32, u32)>,
}

/// Runs a Bernoulli scaling sweep: for each n draws `samples_per_n`
/// polynomials, brackets each sup norm, and fits log(max ratio) against
/// log(n), the max taken over the samples at that n as a proxy for the
/// supremum over polynomials.
///
/// Per-sample budget failures (the grid would exceed its cap at that n)
/// retry in ascent-only mode and are reported in `ascent_only` instead of
/// aborting the sweep. The fitted ratio divides by the certified lower
/// bound, the only side of the bracket that stays sharp at every n.
///
/// Deterministic for a fixed config: every sample and search derives its
/// stream from (seed, n, sample index). A cancel flag, when supplied, is
/// honored between work items.
pub fn run_scaling_experiment(
    cfg: &ScalingConfig,
    budget: &Budget,
    cancel: Option<&AtomicBool>,
) -> Result<ScalingRun> {
    if cfg.m == 0 {
        return Err(Error::domain("scaling experiment requires m >= 1"));
    }
    check_r_in_theorem_range(cfg.m, cfg.r)?;
    if cfg.n_values.len() < 3 {
        return Err(Error::domain("scaling experiment needs at least 3 n values"));
    }
    if cfg.n_values.windows(2).any(|w| w[0] >= w[1]) || cfg.n_values[0] == 0 {
        return Err(Error::domain("n values must be strictly increasing and >= 1"));
    }
    if cfg.samples_per_n == 0 {
        return Err(Error::domain("scaling experiment needs at least 1 sample per n"));
    }

    let items: Vec<(u32, u32)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.samples_per_n).map(move |j| (n, j)))
        .collect();
    let outcomes = par_map(items, |(n, j)| -> Result<(ExperimentRecord, bool)> {
        if let Some(flag) = cancel {
            if flag.load(AtomicOrdering::Relaxed) {
                return Err(Error::Canceled);
            }
        }
        let sample_seed = derive_seed(cfg.seed, &[n as u64, j as u64]);
        let s = ksz::sample(cfg.m, n, sample_seed, cfg.field)?;
        let sup_budget = Budget {
            seed: derive_seed(sample_seed, &[SUP_STREAM]),
            ..budget.clone()
        };
        let (est, fell_back) = match supnorm(&s.polynomial, &sup_budget) {
            Ok(e) => (e, false),
            Err(Error::Budget { .. }) => (supnorm(&s.polynomial, &sup_budget.ascent_only())?, true),
            Err(e) => return Err(e),
        };
        if !(est.lower > 0.0) {
            return Err(Error::domain(format!(
                "sup-norm lower bound vanished at n={n}, sample {j}"
            )));
        }
        let coeff_norm_r = s.polynomial.coeff_norm(cfg.r);
        let record = ExperimentRecord {
            m: cfg.m,
            n,
            r: cfg.r,
            seed: sample_seed,
            source: Source::KszSample,
            coeff_norm_r,
            sup_lower: est.lower,
            sup_upper: est.upper,
            ratio: coeff_norm_r / est.lower,
            ratio_conservative: coeff_norm_r / est.upper,
        };
        Ok((record, fell_back))
    });

    let mut records = Vec::with_capacity(outcomes.len());
    let mut ascent_only = Vec::new();
    for (item, outcome) in outcomes.into_iter().enumerate() {
        let (record, fell_back) = outcome?;
        if fell_back {
            ascent_only.push((record.n, item as u32 % cfg.samples_per_n));
        }
        records.push(record);
    }

    let points: Vec<(f64, f64)> = cfg
        .n_values
        .iter()
        .map(|&n| {
            let stat = records
                .iter()
                .filter(|rec| rec.n == n)
                .map(|rec| rec.ratio)
                .fold(f64::NEG_INFINITY, f64::max);
            (n as f64, stat)
        })
        .collect();
    let line = fit_loglog(&points)?;
    let fit = ScalingFit {
        slope: line.slope,
        intercept: line.intercept,
        residual_rms: line.residual_rms,
        predicted_exponent: sharp_exponent(cfg.m, cfg.r)?,
        n_values: cfg.n_values.clone(),
        statistic: "max-ratio",
    };
    Ok(ScalingRun {
        records,
        fit,
        ascent_only,
    })
}

/// Fixed CSV header of the records format.
pub const RECORDS_CSV_HEADER: &str =
    "m,n,r,seed,source,coeff_norm_r,sup_lower,sup_upper,ratio,ratio_conservative";

/// Serializes records with 17 significant digits per float, enough for the
/// values to re-parse to the same bits.
pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RECORDS_CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&format!(
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            rec.m,
            rec.n,
            rec.r,
            rec.seed,
            rec.source,
            rec.coeff_norm_r,
            rec.sup_lower,
            rec.sup_upper,
            rec.ratio,
            rec.ratio_conservative,
        ));
    }
    out
}

/// Parses the records format back; the header must match exactly.
pub fn records_from_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == RECORDS_CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::parse(1, format!("unexpected header '{header}'")));
        }
        None => return Err(Error::parse(0, "empty records file")),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        // the r column may itself contain a '/'; commas never appear inside
        // fields, so a straight split must give exactly 10 of them
        if fields.len() != 10 {
            return Err(Error::parse(
                line_no,
                format!("expected 10 fields, found {}", fields.len()),
            ));
        }
        let parse_f64 = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("bad {what} '{s}'")))
        };
        records.push(ExperimentRecord {
            m: fields[0]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad m '{}'", fields[0])))?,
            n: fields[1]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad n '{}'", fields[1])))?,
            r: NormOrder::parse(fields[2])
                .map_err(|e| Error::parse(line_no, e.to_string()))?,
            seed: fields[3]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad seed '{}'", fields[3])))?,
            source: Source::parse(fields[4]).map_err(|e| Error::parse(line_no, e.to_string()))?,
            coeff_norm_r: parse_f64(fields[5], "coeff_norm_r")?,
            sup_lower: parse_f64(fields[6], "sup_lower")?,
            sup_upper: parse_f64(fields[7], "sup_upper")?,
            ratio: parse_f64(fields[8], "ratio")?,
            ratio_conservative: parse_f64(fields[9], "ratio_conservative")?,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn sharp_exponent_endpoints_are_exact() {
        for m in 1..=12u32 {
            let at_one = sharp_exponent(m, NormOrder::one()).unwrap();
            assert_eq!(at_one, (m as f64 - 1.0) / 2.0, "m={m}");
            let at_critical = sharp_exponent(m, NormOrder::critical(m)).unwrap();
            assert_eq!(at_critical, 0.0, "m={m}");
        }
    }

    #[test]
    fn sharp_exponent_interior_value() {
        // m=3, r=1.2: 3/1.2 - 2 = 0.5
        let r = NormOrder::parse("1.2").unwrap();
        assert_eq!(sharp_exponent(3, r).unwrap(), 0.5);
    }

    #[test]
    fn sharp_exponent_is_monotone_decreasing_in_r() {
        for m in 2..=6u32 {
            let mut last = f64::INFINITY;
            for k in 0..=8u64 {
                // r = 1 + (k/8)(critical - 1), exact rationals
                let crit = NormOrder::critical(m);
                let num = 8 * crit.den().unwrap() + k * (crit.num().unwrap() - crit.den().unwrap());
                let den = 8 * crit.den().unwrap();
                let r = NormOrder::finite(num, den).unwrap();
                let e = sharp_exponent(m, r).unwrap();
                assert!(e < last || (k == 0 && e <= last), "not decreasing at m={m}");
                last = e;
            }
            assert_eq!(last, 0.0);
        }
    }

    #[test]
    fn sharp_exponent_rejects_out_of_range_r() {
        assert!(matches!(
            sharp_exponent(2, NormOrder::finite(3, 2).unwrap()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            sharp_exponent(2, NormOrder::Infinity),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            sharp_exponent(0, NormOrder::one()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn hoelder_equality_for_constant_vectors() {
        let h = hoelder_interpolate(&[1.0, 1.0, 1.0], 1.0, 2.0).unwrap();
        assert_eq!(h.support, 3);
        assert!((h.lhs - 3.0).abs() < 1e-14);
        assert!((h.rhs - 3.0).abs() / 3.0 < 1e-12);
    }

    #[test]
    fn hoelder_strict_for_spiky_vectors() {
        let h = hoelder_interpolate(&[1.0, 0.0, 0.0], 1.0, 2.0).unwrap();
        assert_eq!(h.support, 1);
        assert!((h.lhs - 1.0).abs() < 1e-14);
        // support size 1 makes the bound tight again: rhs = 1
        assert!((h.rhs - 1.0).abs() < 1e-14);
        let h = hoelder_interpolate(&[2.0, 1.0, 1.0], 1.0, 2.0).unwrap();
        assert!(h.lhs < h.rhs * (1.0 - 1e-12));
    }

    #[test]
    fn hoelder_random_sweep_never_violates() {
        let mut rng = CounterRng::new(314);
        for _ in 0..500 {
            let len = 1 + (rng.next_u64() % 30) as usize;
            let x: Vec<f64> = (0..len)
                .map(|_| {
                    if rng.next_f64() < 0.3 {
                        0.0
                    } else {
                        rng.next_range(0.0, 5.0)
                    }
                })
                .collect();
            let r = rng.next_range(1.0, 4.0);
            let s = if rng.next_f64() < 0.1 {
                f64::INFINITY
            } else {
                r + rng.next_range(0.0, 3.0)
            };
            let h = hoelder_interpolate(&x, r, s).unwrap();
            assert!(
                h.lhs <= h.rhs * (1.0 + 1e-12),
                "violation: lhs {} rhs {}",
                h.lhs,
                h.rhs
            );
        }
    }

    #[test]
    fn hoelder_domain_errors() {
        assert!(matches!(
            hoelder_interpolate(&[1.0], 2.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            hoelder_interpolate(&[-1.0], 1.0, 2.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            hoelder_interpolate(&[1.0], 0.5, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn chain_bound_equality_for_flat_coefficients() {
        let p = HomogeneousPolynomial::from_dense(
            ScalarField::Real,
            2,
            2,
            vec![num_complex::Complex64::new(1.0, 0.0); 3],
        )
        .unwrap();
        let b = upper_bound_chain(&p, NormOrder::one()).unwrap();
        assert!((b.lhs - 3.0).abs() < 1e-14);
        assert!((b.rhs() - 3.0).abs() / 3.0 < 1e-12);
        assert!(b.holds());
    }

    #[test]
    fn chain_bound_equality_for_bernoulli_samples() {
        let s = ksz::sample(2, 4, 9, ScalarField::Complex).unwrap();
        let b = upper_bound_chain(&s.polynomial, NormOrder::one()).unwrap();
        assert!((b.lhs - 10.0).abs() < 1e-12);
        assert!((b.rhs() - 10.0).abs() / 10.0 < 1e-12);
        assert!(b.holds());
    }

    #[test]
    fn chain_bound_strict_for_uneven_coefficients() {
        let mut rng = CounterRng::new(77);
        for _ in 0..50 {
            let dense: Vec<num_complex::Complex64> = (0..10)
                .map(|_| num_complex::Complex64::new(rng.next_range(0.5, 3.0), 0.0))
                .collect();
            // force unevenness
            let mut dense = dense;
            dense[0] *= 4.0;
            let p = HomogeneousPolynomial::from_dense(ScalarField::Real, 2, 4, dense).unwrap();
            let b = upper_bound_chain(&p, NormOrder::one()).unwrap();
            assert!(b.holds());
            assert!(b.lhs < b.rhs() * (1.0 - 1e-12), "expected strict inequality");
        }
    }

    #[test]
    fn chain_bound_rejects_zero_polynomial() {
        let z = HomogeneousPolynomial::zero(ScalarField::Real, 2, 2).unwrap();
        assert!(matches!(
            upper_bound_chain(&z, NormOrder::one()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn theoretical_ratio_value_recomputed_independently() {
        // count(2,4) = 10, 4^{3/2} = 8: value is 10 / (8·sqrt(log 2))
        let v = ratio_lower_bound_theoretical(2, 4, NormOrder::one()).unwrap();
        let expected = 10.0 / (8.0 * 2f64.ln().sqrt());
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 1.50135).abs() < 1e-3);
        let v43 = ratio_lower_bound_theoretical(2, 4, NormOrder::critical(2)).unwrap();
        let expected43 = 10f64.powf(0.75) / (8.0 * 2f64.ln().sqrt());
        assert!((v43 - expected43).abs() < 1e-12);
    }

    #[test]
    fn theoretical_ratio_growth_tracks_sqrt_n() {
        let a = ratio_lower_bound_theoretical(2, 4, NormOrder::one()).unwrap();
        let b = ratio_lower_bound_theoretical(2, 8, NormOrder::one()).unwrap();
        let growth = b / a;
        let ideal = 2f64.sqrt();
        assert!((growth / ideal - 1.0).abs() < 0.25, "growth {growth}");
    }

    #[test]
    fn theoretical_ratio_domain_errors() {
        assert!(matches!(
            ratio_lower_bound_theoretical(1, 4, NormOrder::one()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            ratio_lower_bound_theoretical(2, 2, NormOrder::one()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn loglog_fit_recovers_power_laws() {
        let points: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0, 16.0]
            .iter()
            .map(|&n| (n, 3.0 * n.powf(1.5)))
            .collect();
        let fit = fit_loglog(&points).unwrap();
        assert!((fit.slope - 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn loglog_fit_rejects_degenerate_input() {
        assert!(fit_loglog(&[(1.0, 1.0)]).is_err());
        assert!(fit_loglog(&[(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(fit_loglog(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    fn small_config() -> ScalingConfig {
        ScalingConfig {
            m: 1,
            r: NormOrder::one(),
            n_values: vec![2, 4, 8],
            samples_per_n: 3,
            seed: 11,
            field: ScalarField::Real,
        }
    }

    #[test]
    fn linear_real_control_has_exactly_zero_slope() {
        let run = run_scaling_experiment(&small_config(), &Budget::with_seed(1), None).unwrap();
        // ±1 linear forms: ‖P‖₁ = n = ‖P‖_∞ exactly, every ratio is 1
        for rec in &run.records {
            assert_eq!(rec.ratio, 1.0);
            assert_eq!(rec.ratio_conservative, 1.0);
        }
        assert!(run.fit.slope.abs() <= 1e-15);
        assert_eq!(run.fit.predicted_exponent, 0.0);
        assert!(run.ascent_only.is_empty());
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = ScalingConfig {
            m: 2,
            r: NormOrder::critical(2),
            n_values: vec![2, 3, 4],
            samples_per_n: 4,
            seed: 5,
            field: ScalarField::Complex,
        };
        let budget = Budget {
            grid_resolution: 8,
            restarts: 8,
            ..Budget::with_seed(0)
        };
        let a = run_scaling_experiment(&cfg, &budget, None).unwrap();
        let b = run_scaling_experiment(&cfg, &budget, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn record_invariants_hold_per_row() {
        let cfg = ScalingConfig {
            m: 2,
            r: NormOrder::one(),
            n_values: vec![2, 3, 4],
            samples_per_n: 3,
            seed: 23,
            field: ScalarField::Complex,
        };
        let budget = Budget {
            grid_resolution: 8,
            restarts: 8,
            ..Budget::with_seed(0)
        };
        let run = run_scaling_experiment(&cfg, &budget, None).unwrap();
        for rec in &run.records {
            assert!(rec.ratio_conservative <= rec.ratio + 1e-12);
            assert!(rec.sup_lower <= rec.sup_upper);
            // the pure Hölder chain bounds the numerator
            let s = ksz::sample(rec.m, rec.n, rec.seed, ScalarField::Complex).unwrap();
            let chain = upper_bound_chain(&s.polynomial, rec.r).unwrap();
            assert!(chain.holds());
            assert!((chain.lhs - rec.coeff_norm_r).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_falls_back_to_ascent_only_on_oversized_grids() {
        let cfg = ScalingConfig {
            m: 2,
            r: NormOrder::one(),
            n_values: vec![2, 4, 8],
            samples_per_n: 2,
            seed: 3,
            field: ScalarField::Complex,
        };
        // default G=32 cannot grid n=8
        let run = run_scaling_experiment(&cfg, &Budget::with_seed(1), None).unwrap();
        assert!(!run.ascent_only.is_empty());
        assert!(run.ascent_only.iter().all(|&(n, _)| n == 8));
        // fallback rows carry the trivial upper bound
        for rec in run.records.iter().filter(|r| r.n == 8) {
            assert_eq!(rec.sup_upper, 36.0); // ‖P‖₁ = count(2,8)
        }
    }

    #[test]
    fn sweep_honors_cancel_flag() {
        let flag = AtomicBool::new(true);
        let err =
            run_scaling_experiment(&small_config(), &Budget::with_seed(1), Some(&flag)).unwrap_err();
        assert_eq!(err, Error::Canceled);
    }

    #[test]
    fn sweep_validates_inputs() {
        let mut cfg = small_config();
        cfg.n_values = vec![2, 4];
        assert!(matches!(
            run_scaling_experiment(&cfg, &Budget::default(), None),
            Err(Error::Domain(_))
        ));
        let mut cfg = small_config();
        cfg.n_values = vec![2, 4, 4];
        assert!(matches!(
            run_scaling_experiment(&cfg, &Budget::default(), None),
            Err(Error::Domain(_))
        ));
        let mut cfg = small_config();
        cfg.r = NormOrder::finite(2, 1).unwrap(); // above critical(1) = 1
        assert!(matches!(
            run_scaling_experiment(&cfg, &Budget::default(), None),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn csv_round_trip_preserves_bits() {
        let cfg = small_config();
        let run = run_scaling_experiment(&cfg, &Budget::with_seed(1), None).unwrap();
        let text = records_to_csv(&run.records);
        let back = records_from_csv(&text).unwrap();
        assert_eq!(run.records.len(), back.len());
        for (a, b) in run.records.iter().zip(back.iter()) {
            assert_eq!(a, b);
            assert_eq!(a.ratio.to_bits(), b.ratio.to_bits());
            assert_eq!(a.sup_lower.to_bits(), b.sup_lower.to_bits());
        }
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(matches!(records_from_csv(""), Err(Error::Parse { .. })));
        assert!(matches!(
            records_from_csv("wrong,header\n"),
            Err(Error::Parse { .. })
        ));
        let text = format!("{RECORDS_CSV_HEADER}\n1,2,1,0,ksz-sample,1.0\n");
        match records_from_csv(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
