//! Two-group gap inference.
//!
//! The no-difference hypothesis is probed three ways: a t-type statistic
//! on fitted scales, a pooled permutation bootstrap of empirical
//! discrepancy statistics (0.90-quantile difference and sd difference),
//! and a pointwise confidence band for the survivor-function difference.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_full, RatingSample};
use crate::special::inv_std_normal_cdf;

/// One pair of discrepancy statistics between two groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscrepancyPair {
    /// Difference of lower empirical 0.90-quantiles, in score points.
    pub q90_diff: f64,
    /// Difference of sample standard deviations (n−1 divisor), in score points.
    pub sd_diff: f64,
}

/// Null-distribution draws plus the observed pair and one-sided
/// exceedance proportions.
#[derive(Debug, Clone, Serialize)]
pub struct BootstrapSummary {
    pub draws: Vec<DiscrepancyPair>,
    pub observed: DiscrepancyPair,
    /// Proportion of draws with `q90_diff* >= q90_diff_obs`.
    pub exceed_q90: f64,
    /// Proportion of draws with `sd_diff* >= sd_diff_obs`.
    pub exceed_sd: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Pointwise confidence band for the survivor difference `S1(x) - S2(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct BandCurve {
    pub grid: Vec<f64>,
    /// Empirical survivor difference at each grid point.
    pub diff: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
    /// Fitted-model survivor difference, when both groups admit a fit.
    pub parametric: Option<Vec<f64>>,
}

/// The scale-gap t statistic `(est1 - est2) / sqrt(se1² + se2²)`.
pub fn scale_gap_t(est1: f64, se1: f64, est2: f64, se2: f64) -> Result<f64> {
    if !(se1.is_finite() && se1 > 0.0 && se2.is_finite() && se2 > 0.0) {
        return Err(Error::Domain(format!(
            "standard errors must be > 0, got {se1} and {se2}"
        )));
    }
    Ok((est1 - est2) / (se1 * se1 + se2 * se2).sqrt())
}

/// Lower empirical 0.90-quantile and sample standard deviation.
///
/// The quantile is the smallest order statistic whose ECDF reaches 0.90;
/// the standard deviation uses the n−1 divisor.
pub fn empirical_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::Domain(format!(
            "empirical statistics need at least 2 values, got {}",
            values.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    Ok((lower_quantile(&sorted, 0.90), sample_sd(values)))
}

/// Lower empirical quantile at level `p`: the smallest order statistic
/// whose ECDF reaches `p`.
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("quantile of an empty set".to_string()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("quantile level {p} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    Ok(lower_quantile(&sorted, p))
}

/// Smallest order statistic with ECDF >= p, on an ascending-sorted slice.
fn lower_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let nf = n as f64;
    // Candidate from the ceiling, then nudge with the exact ECDF comparison
    // so float rounding in p·n cannot shift the order statistic.
    let mut i = ((p * nf).ceil() as usize).clamp(1, n);
    while i > 1 && (i - 1) as f64 / nf >= p {
        i -= 1;
    }
    while i < n && (i as f64) / nf < p {
        i += 1;
    }
    sorted[i - 1]
}

fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Pooled permutation bootstrap of the discrepancy pair.
///
/// Each replicate splits the pooled multiset uniformly at random (without
/// replacement) into the original group sizes and records the statistics.
/// Replicate `i` draws from its own stream of a counter-based generator
/// keyed by `(seed, i)`, so results do not depend on execution order.
pub fn pooled_bootstrap(
    group1: &RatingSample,
    group2: &RatingSample,
    reps: usize,
    seed: u64,
) -> Result<BootstrapSummary> {
    if reps < 1 {
        return Err(Error::Contract("need at least one replicate".to_string()));
    }
    if group1.r0() != group2.r0() {
        return Err(Error::Contract(
            "groups must share a common threshold".to_string(),
        ));
    }
    let n1 = group1.len();
    let n2 = group2.len();
    if n1 < 2 || n2 < 2 {
        return Err(Error::Domain(
            "each group needs at least 2 observations".to_string(),
        ));
    }

    let (q90_1, sd_1) = empirical_stats(group1.ratings())?;
    let (q90_2, sd_2) = empirical_stats(group2.ratings())?;
    let observed = DiscrepancyPair {
        q90_diff: q90_1 - q90_2,
        sd_diff: sd_1 - sd_2,
    };

    let mut pool = Vec::with_capacity(n1 + n2);
    pool.extend_from_slice(group1.ratings());
    pool.extend_from_slice(group2.ratings());

    let mut draws = Vec::with_capacity(reps);
    let mut scratch = pool.clone();
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(rep as u64 + 1);
        scratch.copy_from_slice(&pool);
        scratch.shuffle(&mut rng);
        let (first, second) = scratch.split_at(n1);
        let (q1, s1) = empirical_stats(first)?;
        let (q2, s2) = empirical_stats(second)?;
        draws.push(DiscrepancyPair {
            q90_diff: q1 - q2,
            sd_diff: s1 - s2,
        });
    }

    let exceed_q90 =
        draws.iter().filter(|d| d.q90_diff >= observed.q90_diff).count() as f64 / reps as f64;
    let exceed_sd =
        draws.iter().filter(|d| d.sd_diff >= observed.sd_diff).count() as f64 / reps as f64;

    Ok(BootstrapSummary {
        draws,
        observed,
        exceed_q90,
        exceed_sd,
        reps,
        seed,
    })
}

/// Pointwise normal-approximation band for the survivor difference.
///
/// At each grid point the empirical difference gets the binomial-variance
/// half-width `z · sqrt(S1(1-S1)/n1 + S2(1-S2)/n2)`. The smooth fitted
/// difference is attached when both groups can be fitted.
pub fn survivor_diff_band(
    group1: &RatingSample,
    group2: &RatingSample,
    grid: &[f64],
    level: f64,
) -> Result<BandCurve> {
    if group1.is_empty() || group2.is_empty() {
        return Err(Error::Domain("groups must be nonempty".to_string()));
    }
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(Error::Domain(format!(
            "band level must lie in (0, 1), got {level}"
        )));
    }
    let r0 = group1.r0().min(group2.r0());
    if grid.iter().any(|&x| !x.is_finite() || x < r0) {
        return Err(Error::Domain(
            "grid points must be finite and at or above the threshold".to_string(),
        ));
    }

    let mut sorted1 = group1.ratings().to_vec();
    let mut sorted2 = group2.ratings().to_vec();
    sorted1.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    sorted2.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let n1 = sorted1.len() as f64;
    let n2 = sorted2.len() as f64;

    let survivor = |sorted: &[f64], n: f64, x: f64| -> f64 {
        let below_or_eq = sorted.partition_point(|&v| v <= x) as f64;
        1.0 - below_or_eq / n
    };

    let z = inv_std_normal_cdf((1.0 + level) / 2.0);
    let mut diff = Vec::with_capacity(grid.len());
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    for &x in grid {
        let s1 = survivor(&sorted1, n1, x);
        let s2 = survivor(&sorted2, n2, x);
        let d = s1 - s2;
        let half = z * (s1 * (1.0 - s1) / n1 + s2 * (1.0 - s2) / n2).sqrt();
        diff.push(d);
        lower.push(d - half);
        upper.push(d + half);
    }

    let parametric = match (fit_full(group1), fit_full(group2)) {
        (Ok(f1), Ok(f2)) => {
            let mut par = Vec::with_capacity(grid.len());
            let mut ok = true;
            for &x in grid {
                match (f1.model.survivor(x), f2.model.survivor(x)) {
                    (Ok(s1), Ok(s2)) => par.push(s1 - s2),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                Some(par)
            } else {
                None
            }
        }
        _ => None,
    };

    Ok(BandCurve {
        grid: grid.to_vec(),
        diff,
        lower,
        upper,
        level,
        parametric,
    })
}
