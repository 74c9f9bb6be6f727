//! Maximum-likelihood fitting and inference for the over-threshold law.
//!
//! Supports complete samples (profile likelihood in the scale, then a
//! one-dimensional search in the tail index), censored top-k lists
//! (direct two-dimensional search), delta-method standard errors from
//! the observed information, and a shared-tail joint model compared to
//! separate fits via AIC/BIC.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ThresholdModel;
use crate::optim::{brent_min, nelder_mead2};
use crate::special::log_gamma;

/// Primary search box for the tail index, bracketing the Gaussian (1/2)
/// and exponential (1) anchor cases with wide margin.
const A_BOX: (f64, f64) = (0.2, 3.0);
/// One-shot expansion used when the optimum lands on the primary box edge.
const A_BOX_WIDE: (f64, f64) = (0.05, 12.0);
/// Minimum observations for any fit; below this the observed information
/// is routinely singular.
const MIN_FIT_SIZE: usize = 10;
/// Relative step for centered-difference Hessians.
const HESSIAN_STEP: f64 = 1e-4;
/// Relative step for centered-difference gradients (delta method).
const GRADIENT_STEP: f64 = 1e-5;

/// A stratum label plus the full multiset of scores at or above `r0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingSample {
    stratum: String,
    r0: f64,
    ratings: Vec<f64>,
}

impl RatingSample {
    /// Validates that every rating is finite and at or above the threshold.
    pub fn new(stratum: impl Into<String>, r0: f64, ratings: Vec<f64>) -> Result<Self> {
        if !r0.is_finite() {
            return Err(Error::Domain(format!("threshold must be finite, got {r0}")));
        }
        for &x in &ratings {
            if !x.is_finite() || x < r0 {
                return Err(Error::Domain(format!(
                    "rating {x} below threshold {r0} (or not finite)"
                )));
            }
        }
        Ok(Self {
            stratum: stratum.into(),
            r0,
            ratings,
        })
    }

    pub fn stratum(&self) -> &str {
        &self.stratum
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn ratings(&self) -> &[f64] {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }
}

/// The k largest scores (nonincreasing) plus the known total count above `r0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopKSample {
    r0: f64,
    top: Vec<f64>,
    n_total: usize,
}

impl TopKSample {
    pub fn new(r0: f64, top: Vec<f64>, n_total: usize) -> Result<Self> {
        if top.len() > n_total {
            return Err(Error::Contract(format!(
                "top list of length {} exceeds the stated total {n_total}",
                top.len()
            )));
        }
        for w in top.windows(2) {
            if w[1] > w[0] {
                return Err(Error::Contract(
                    "top list must be nonincreasing".to_string(),
                ));
            }
        }
        for &x in &top {
            if !x.is_finite() || x < r0 {
                return Err(Error::Domain(format!(
                    "top entry {x} below threshold {r0} (or not finite)"
                )));
            }
        }
        Ok(Self { r0, top, n_total })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn top(&self) -> &[f64] {
        &self.top
    }

    pub fn k(&self) -> usize {
        self.top.len()
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }
}

/// How a [`FitResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Full,
    TopK,
    Shared,
}

/// Non-fatal conditions noticed during fitting.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FitWarning {
    /// The optimizer settled on the edge of the (already expanded)
    /// tail-index search box; the estimate is suspect.
    BoundaryFit { a: f64 },
}

/// A focus-parameter estimate with its delta-method standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FocusEstimate {
    pub estimate: f64,
    pub se: f64,
}

/// Point estimates, observed-information covariance and focus summaries.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: ThresholdModel,
    /// Covariance of `(a, theta)`, from the inverted observed information.
    pub cov: [[f64; 2]; 2],
    pub loglik: f64,
    pub method: FitMethod,
    /// Delta-method estimates for `mean`, `sd` and `median`.
    pub focus_estimates: BTreeMap<String, FocusEstimate>,
    pub warnings: Vec<FitWarning>,
}

impl FitResult {
    pub fn se_a(&self) -> f64 {
        self.cov[0][0].max(0.0).sqrt()
    }

    pub fn se_theta(&self) -> f64 {
        self.cov[1][1].max(0.0).sqrt()
    }
}

/// Joint fit with one shared tail index and per-group scales, with the
/// separate-fit totals carried along for model selection.
#[derive(Debug, Clone, Serialize)]
pub struct SharedFitResult {
    pub a_shared: f64,
    pub theta_by_group: BTreeMap<String, f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    /// Summed log-likelihood of the per-group two-parameter fits.
    pub separate_loglik: f64,
    pub separate_aic: f64,
    pub separate_bic: f64,
}

/// Full-sample log-likelihood: each observation contributes
/// `-ln Γ(a+1) - ((x - r0)/theta)^(1/a) - ln theta`.
pub fn loglik_full(m: &ThresholdModel, s: &RatingSample) -> Result<f64> {
    if m.r0() != s.r0 {
        return Err(Error::Contract(format!(
            "model threshold {} does not match sample threshold {}",
            m.r0(),
            s.r0
        )));
    }
    let n = s.ratings.len() as f64;
    let inv_a = 1.0 / m.a();
    let mut power_sum = 0.0;
    for &x in &s.ratings {
        power_sum += ((x - s.r0) / m.theta()).powf(inv_a);
    }
    Ok(-n * log_gamma(m.a() + 1.0)? - power_sum - n * m.theta().ln())
}

/// Exact maximizer of the scale for a fixed tail index:
/// `theta_hat(a) = [ (1/(n a)) Σ (x_i - r0)^(1/a) ]^a`.
pub fn profile_theta(a: f64, s: &RatingSample) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain(format!("tail index must be > 0, got {a}")));
    }
    if s.is_empty() {
        return Err(Error::Degenerate("empty sample".to_string()));
    }
    let n = s.ratings.len() as f64;
    let power_sum: f64 = s
        .ratings
        .iter()
        .map(|&x| (x - s.r0).powf(1.0 / a))
        .sum();
    if power_sum <= 0.0 {
        return Err(Error::Degenerate(
            "all ratings equal the threshold; the scale is unidentifiable".to_string(),
        ));
    }
    Ok((power_sum / (n * a)).powf(a))
}

/// Profile log-likelihood `ℓ(a, theta_hat(a))`. At the profiled scale the
/// power sum collapses to `n a`, so the value is
/// `-n ln Γ(a+1) - n a - n ln theta_hat(a)`.
fn profile_loglik(a: f64, s: &RatingSample) -> Result<f64> {
    let theta = profile_theta(a, s)?;
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Convergence(format!(
            "profiled scale degenerated at a={a}"
        )));
    }
    let n = s.ratings.len() as f64;
    Ok(-n * log_gamma(a + 1.0)? - n * a - n * theta.ln())
}

/// One-dimensional search for the tail index over a box, expanding once
/// with a boundary warning if the optimum sticks to an edge.
fn maximize_tail_index<F: FnMut(f64) -> f64>(
    mut neg_profile: F,
) -> (f64, Vec<FitWarning>) {
    let margin = |lo: f64, hi: f64| 1e-3 * (hi - lo);
    let (lo, hi) = A_BOX;
    let (mut a_hat, _) = brent_min(&mut neg_profile, lo, hi, 1e-9);
    let mut warnings = Vec::new();
    if a_hat < lo + margin(lo, hi) || a_hat > hi - margin(lo, hi) {
        let (wlo, whi) = A_BOX_WIDE;
        let (a_wide, _) = brent_min(&mut neg_profile, wlo, whi, 1e-9);
        a_hat = a_wide;
        if a_hat < wlo + margin(wlo, whi) || a_hat > whi - margin(wlo, whi) {
            warnings.push(FitWarning::BoundaryFit { a: a_hat });
        }
    }
    (a_hat, warnings)
}

/// Fit the two-parameter law to a complete sample by maximizing the
/// profile likelihood in the tail index.
pub fn fit_full(s: &RatingSample) -> Result<FitResult> {
    if s.len() < MIN_FIT_SIZE {
        return Err(Error::SampleTooSmall {
            min: MIN_FIT_SIZE,
            got: s.len(),
        });
    }
    if !s.ratings.iter().any(|&x| x > s.r0) {
        return Err(Error::Degenerate(
            "all ratings equal the threshold".to_string(),
        ));
    }

    let neg_profile = |a: f64| match profile_loglik(a, s) {
        Ok(ll) if ll.is_finite() => -ll,
        _ => f64::INFINITY,
    };
    let (a_hat, warnings) = maximize_tail_index(neg_profile);
    let theta_hat = profile_theta(a_hat, s)?;
    let model = ThresholdModel::new(s.r0, a_hat, theta_hat)?;

    let loglik_at = |a: f64, ln_theta: f64| loglik_params_full(a, ln_theta, s);
    let cov = covariance_from_information(loglik_at, a_hat, theta_hat)?;
    let loglik = loglik_full(&model, s)?;

    let mut fit = FitResult {
        model,
        cov,
        loglik,
        method: FitMethod::Full,
        focus_estimates: BTreeMap::new(),
        warnings,
    };
    attach_focus_estimates(&mut fit)?;
    Ok(fit)
}

/// Full log-likelihood as a function of `(a, ln theta)`, for numerical
/// differentiation. Returns `-inf` outside the parameter domain.
fn loglik_params_full(a: f64, ln_theta: f64, s: &RatingSample) -> f64 {
    if a <= 0.0 || !a.is_finite() || !ln_theta.is_finite() {
        return f64::NEG_INFINITY;
    }
    let n = s.ratings.len() as f64;
    let inv_a = 1.0 / a;
    let scale_factor = (-ln_theta * inv_a).exp();
    let mut power_sum = 0.0;
    for &x in &s.ratings {
        power_sum += (x - s.r0).powf(inv_a);
    }
    match log_gamma(a + 1.0) {
        Ok(lg) => -n * lg - scale_factor * power_sum - n * ln_theta,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Censored top-k log-likelihood:
/// `(n - k) ln F(x_(k)) + Σ_{i=1..k} ln f(x_(i))`, with `x_(k)` the
/// smallest listed value. Returns `-inf` when the censoring mass
/// vanishes (`x_(k) = r0` with unseen observations below it).
pub fn loglik_topk(m: &ThresholdModel, t: &TopKSample) -> Result<f64> {
    if m.r0() != t.r0 {
        return Err(Error::Contract(format!(
            "model threshold {} does not match top-k threshold {}",
            m.r0(),
            t.r0
        )));
    }
    if t.k() < 2 {
        return Err(Error::Contract(format!(
            "top-k likelihood needs k >= 2, got {}",
            t.k()
        )));
    }
    let k = t.k();
    let n = t.n_total;
    let mut ll = 0.0;
    for &x in &t.top {
        ll += m.log_density(x)?;
    }
    if n > k {
        let x_k = *t.top.last().expect("k >= 2");
        let f = m.cdf(x_k)?;
        if f <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        ll += (n - k) as f64 * f.ln();
    }
    Ok(ll)
}

/// Fit the law from a top-k list and the known participation volume,
/// by direct two-dimensional search over `(a, ln theta)`.
pub fn fit_topk(t: &TopKSample) -> Result<FitResult> {
    if t.k() < MIN_FIT_SIZE {
        return Err(Error::SampleTooSmall {
            min: MIN_FIT_SIZE,
            got: t.k(),
        });
    }
    let x_k = *t.top.last().expect("k >= 10");
    if t.top[0] <= t.r0 {
        return Err(Error::Degenerate(
            "all listed values equal the threshold".to_string(),
        ));
    }

    let objective = |p: [f64; 2]| -> f64 {
        let (a, ln_theta) = (p[0], p[1]);
        if !(A_BOX_WIDE.0..=A_BOX_WIDE.1).contains(&a) || !ln_theta.is_finite() {
            return f64::INFINITY;
        }
        let model = match ThresholdModel::new(t.r0, a, ln_theta.exp()) {
            Ok(m) => m,
            Err(_) => return f64::INFINITY,
        };
        match loglik_topk(&model, t) {
            Ok(ll) if ll.is_finite() => -ll,
            _ => f64::INFINITY,
        }
    };

    // Seed from the censoring equation F(x_k) ~ 1 - k/n: for each trial
    // tail index the implied scale is (x_k - r0) / (G_a^{-1}(1-k/n))^a,
    // falling back to the top spread when k = n.
    let mut best: Option<([f64; 2], f64)> = None;
    let tail_frac = (1.0 - t.k() as f64 / t.n_total as f64).clamp(0.0, 0.999_999);
    let spread = (t.top[0] - t.r0).max(1e-9);
    let mut trial_a = 0.25;
    while trial_a <= 2.6 {
        let theta_seed = seed_scale(trial_a, tail_frac, x_k, t.r0, spread);
        for mult in [0.5f64, 1.0, 2.0] {
            let p = [trial_a, (theta_seed * mult).ln()];
            let v = objective(p);
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some((p, v));
            }
        }
        trial_a += 0.235;
    }
    let (start, start_val) = best.expect("grid is nonempty");
    if !start_val.is_finite() {
        return Err(Error::Convergence(
            "no admissible starting point for the top-k fit".to_string(),
        ));
    }

    let (p1, _) = nelder_mead2(objective, start, [0.15, 0.3], 1e-12, 2000);
    let (p2, v2) = nelder_mead2(objective, p1, [0.02, 0.04], 1e-13, 2000);
    if !v2.is_finite() {
        return Err(Error::Convergence("top-k search diverged".to_string()));
    }
    let (a_hat, theta_hat) = (p2[0], p2[1].exp());

    let mut warnings = Vec::new();
    let margin = 1e-3 * (A_BOX_WIDE.1 - A_BOX_WIDE.0);
    if a_hat < A_BOX_WIDE.0 + margin || a_hat > A_BOX_WIDE.1 - margin {
        warnings.push(FitWarning::BoundaryFit { a: a_hat });
    }

    let model = ThresholdModel::new(t.r0, a_hat, theta_hat)?;
    let loglik_at = |a: f64, ln_theta: f64| -> f64 {
        let v = objective([a, ln_theta]);
        if v.is_finite() {
            -v
        } else {
            f64::NEG_INFINITY
        }
    };
    let cov = covariance_from_information(loglik_at, a_hat, theta_hat)?;
    let loglik = loglik_topk(&model, t)?;

    let mut fit = FitResult {
        model,
        cov,
        loglik,
        method: FitMethod::TopK,
        focus_estimates: BTreeMap::new(),
        warnings,
    };
    attach_focus_estimates(&mut fit)?;
    Ok(fit)
}

fn seed_scale(a: f64, tail_frac: f64, x_k: f64, r0: f64, fallback_spread: f64) -> f64 {
    if tail_frac > 0.0 && x_k > r0 {
        if let Ok(g) = crate::special::inv_reg_lower_gamma(a, tail_frac) {
            let denom = g.powf(a);
            if denom > 0.0 {
                return (x_k - r0) / denom;
            }
        }
    }
    fallback_spread / 2.0
}

/// First-order propagation of the parameter covariance to a scalar focus
/// `mu(a, theta)`: returns `(mu_hat, sqrt(c' Cov c))` with `c` the
/// centered finite-difference gradient at the optimum.
pub fn delta_method<F: Fn(f64, f64) -> f64>(fit: &FitResult, focus: F) -> Result<(f64, f64)> {
    let a = fit.model.a();
    let theta = fit.model.theta();
    let estimate = focus(a, theta);
    if !estimate.is_finite() {
        return Err(Error::Domain(
            "focus parameter is not finite at the fitted optimum".to_string(),
        ));
    }
    let ha = GRADIENT_STEP * (1.0 + a.abs());
    let ht = GRADIENT_STEP * (1.0 + theta.abs());
    let ga = (focus(a + ha, theta) - focus(a - ha, theta)) / (2.0 * ha);
    let gt = (focus(a, theta + ht) - focus(a, theta - ht)) / (2.0 * ht);
    if !ga.is_finite() || !gt.is_finite() {
        return Err(Error::Domain(
            "focus gradient is not finite at the fitted optimum".to_string(),
        ));
    }
    let var = ga * ga * fit.cov[0][0] + 2.0 * ga * gt * fit.cov[0][1] + gt * gt * fit.cov[1][1];
    Ok((estimate, var.max(0.0).sqrt()))
}

type FocusFn = Box<dyn Fn(f64, f64) -> f64>;

fn attach_focus_estimates(fit: &mut FitResult) -> Result<()> {
    let r0 = fit.model.r0();
    let entries: [(&str, FocusFn); 3] = [
        (
            "mean",
            Box::new(move |a, t| match ThresholdModel::new(r0, a, t) {
                Ok(m) => m.moments().mean,
                Err(_) => f64::NAN,
            }),
        ),
        (
            "sd",
            Box::new(move |a, t| match ThresholdModel::new(r0, a, t) {
                Ok(m) => m.moments().sd,
                Err(_) => f64::NAN,
            }),
        ),
        (
            "median",
            Box::new(move |a, t| match ThresholdModel::new(r0, a, t) {
                Ok(m) => m.moments().median,
                Err(_) => f64::NAN,
            }),
        ),
    ];
    for (name, focus) in entries {
        let (estimate, se) = delta_method(fit, focus)?;
        fit.focus_estimates
            .insert(name.to_string(), FocusEstimate { estimate, se });
    }
    Ok(())
}

/// Joint fit with a shared tail index across groups: per-group scales
/// profile out in closed form, leaving a one-dimensional search.
pub fn fit_shared_tail(groups: &[RatingSample]) -> Result<SharedFitResult> {
    if groups.len() < 2 {
        return Err(Error::Contract(format!(
            "shared-tail fit needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    let r0 = groups[0].r0;
    for g in groups {
        if g.r0 != r0 {
            return Err(Error::Contract(
                "all groups must share a common threshold".to_string(),
            ));
        }
        if g.len() < MIN_FIT_SIZE {
            return Err(Error::SampleTooSmall {
                min: MIN_FIT_SIZE,
                got: g.len(),
            });
        }
        if !g.ratings.iter().any(|&x| x > r0) {
            return Err(Error::Degenerate(format!(
                "group '{}' has all ratings at the threshold",
                g.stratum
            )));
        }
    }
    let mut labels: Vec<&str> = groups.iter().map(|g| g.stratum()).collect();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() != groups.len() {
        return Err(Error::Contract(
            "group stratum labels must be distinct".to_string(),
        ));
    }

    let neg_summed_profile = |a: f64| -> f64 {
        let mut total = 0.0;
        for g in groups {
            match profile_loglik(a, g) {
                Ok(ll) if ll.is_finite() => total += ll,
                _ => return f64::INFINITY,
            }
        }
        -total
    };
    let (a_shared, _warnings) = maximize_tail_index(neg_summed_profile);

    let mut theta_by_group = BTreeMap::new();
    let mut loglik = 0.0;
    let mut n_total = 0usize;
    for g in groups {
        let theta = profile_theta(a_shared, g)?;
        let model = ThresholdModel::new(r0, a_shared, theta)?;
        loglik += loglik_full(&model, g)?;
        theta_by_group.insert(g.stratum.clone(), theta);
        n_total += g.len();
    }

    let mut separate_loglik = 0.0;
    for g in groups {
        separate_loglik += fit_full(g)?.loglik;
    }

    let p_shared = (1 + groups.len()) as f64;
    let p_separate = (2 * groups.len()) as f64;
    let ln_n = (n_total as f64).ln();
    Ok(SharedFitResult {
        a_shared,
        theta_by_group,
        loglik,
        aic: 2.0 * p_shared - 2.0 * loglik,
        bic: p_shared * ln_n - 2.0 * loglik,
        separate_loglik,
        separate_aic: 2.0 * p_separate - 2.0 * separate_loglik,
        separate_bic: p_separate * ln_n - 2.0 * separate_loglik,
    })
}

/// Covariance of `(a, theta)` from the observed information: negative
/// numerical Hessian of the log-likelihood in `(a, ln theta)` at the
/// optimum, symmetrized, inverted, then mapped back to the `theta` scale.
fn covariance_from_information<F: Fn(f64, f64) -> f64>(
    loglik_at: F,
    a_hat: f64,
    theta_hat: f64,
) -> Result<[[f64; 2]; 2]> {
    let ln_theta = theta_hat.ln();
    let h = hessian2(&loglik_at, [a_hat, ln_theta]);
    // Symmetrize by averaging the two cross estimates.
    let off = 0.5 * (h[0][1] + h[1][0]);
    let j = [[-h[0][0], -off], [-off, -h[1][1]]];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det.is_finite() && det > 0.0 && j[0][0] > 0.0) {
        return Err(Error::SingularInformation(format!(
            "information matrix not positive definite (det = {det})"
        )));
    }
    let cov_t = [
        [j[1][1] / det, -j[0][1] / det],
        [-j[1][0] / det, j[0][0] / det],
    ];
    // Back to (a, theta): the map is (a, ln theta) -> (a, theta) with
    // Jacobian diag(1, theta).
    Ok([
        [cov_t[0][0], cov_t[0][1] * theta_hat],
        [cov_t[1][0] * theta_hat, cov_t[1][1] * theta_hat * theta_hat],
    ])
}

/// Centered-difference gradient with per-coordinate relative steps.
fn gradient2<F: Fn(f64, f64) -> f64>(f: &F, p: [f64; 2], rel_step: f64) -> [f64; 2] {
    let h0 = rel_step * (1.0 + p[0].abs());
    let h1 = rel_step * (1.0 + p[1].abs());
    [
        (f(p[0] + h0, p[1]) - f(p[0] - h0, p[1])) / (2.0 * h0),
        (f(p[0], p[1] + h1) - f(p[0], p[1] - h1)) / (2.0 * h1),
    ]
}

/// Hessian via centered differences of the gradient; the two off-diagonal
/// estimates are kept separate so callers can check symmetry.
fn hessian2<F: Fn(f64, f64) -> f64>(f: &F, p: [f64; 2]) -> [[f64; 2]; 2] {
    let h0 = HESSIAN_STEP * (1.0 + p[0].abs());
    let h1 = HESSIAN_STEP * (1.0 + p[1].abs());
    let g_a_plus = gradient2(f, [p[0] + h0, p[1]], GRADIENT_STEP);
    let g_a_minus = gradient2(f, [p[0] - h0, p[1]], GRADIENT_STEP);
    let g_t_plus = gradient2(f, [p[0], p[1] + h1], GRADIENT_STEP);
    let g_t_minus = gradient2(f, [p[0], p[1] - h1], GRADIENT_STEP);
    [
        [
            (g_a_plus[0] - g_a_minus[0]) / (2.0 * h0),
            (g_a_plus[1] - g_a_minus[1]) / (2.0 * h0),
        ],
        [
            (g_t_plus[0] - g_t_minus[0]) / (2.0 * h1),
            (g_t_plus[1] - g_t_minus[1]) / (2.0 * h1),
        ],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_from(a: f64, theta: f64, r0: f64, n: usize, seed: u64) -> RatingSample {
        let m = ThresholdModel::new(r0, a, theta).unwrap();
        RatingSample::new("synthetic", r0, m.sample(n, seed)).unwrap()
    }

    #[test]
    fn rating_sample_rejects_below_threshold() {
        assert!(RatingSample::new("x", 2100.0, vec![2099.0]).is_err());
        assert!(RatingSample::new("x", 2100.0, vec![2100.0, 2200.0]).is_ok());
    }

    #[test]
    fn topk_sample_invariants() {
        assert!(TopKSample::new(2100.0, vec![2500.0, 2600.0], 10).is_err()); // increasing
        assert!(TopKSample::new(2100.0, vec![2600.0, 2500.0], 1).is_err()); // k > n
        assert!(TopKSample::new(2100.0, vec![2600.0, 2050.0], 10).is_err()); // below r0
        let t = TopKSample::new(2100.0, vec![2600.0, 2600.0, 2500.0], 10).unwrap();
        assert_eq!(t.k(), 3);
    }

    #[test]
    fn loglik_full_single_point_at_threshold() {
        // One observation at r0 with a = 1, theta = 1: -ln Γ(2) = 0.
        let m = ThresholdModel::new(2100.0, 1.0, 1.0).unwrap();
        let s = RatingSample::new("x", 2100.0, vec![2100.0]).unwrap();
        assert!(loglik_full(&m, &s).unwrap().abs() < 1e-14);
    }

    #[test]
    fn loglik_full_all_at_threshold() {
        // Power terms vanish: -n ln Γ(a+1) - n ln theta.
        let m = ThresholdModel::new(2100.0, 0.7, 50.0).unwrap();
        let s = RatingSample::new("x", 2100.0, vec![2100.0; 7]).unwrap();
        let expected = -7.0 * log_gamma(1.7).unwrap() - 7.0 * 50.0f64.ln();
        assert!((loglik_full(&m, &s).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn loglik_full_threshold_mismatch() {
        let m = ThresholdModel::new(2000.0, 1.0, 1.0).unwrap();
        let s = RatingSample::new("x", 2100.0, vec![2200.0]).unwrap();
        assert!(matches!(loglik_full(&m, &s), Err(Error::Contract(_))));
    }

    #[test]
    fn profile_theta_exponential_case() {
        // a = 1: the MLE of the scale is the mean excess.
        let s = RatingSample::new("x", 2100.0, vec![2150.0, 2250.0, 2300.0]).unwrap();
        let theta = profile_theta(1.0, &s).unwrap();
        assert!((theta - (50.0 + 150.0 + 200.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn profile_theta_single_observation() {
        // theta_hat = (x - r0) / a^a.
        let s = RatingSample::new("x", 2100.0, vec![2300.0]).unwrap();
        for &a in &[0.5f64, 0.689, 1.0, 1.7] {
            let expected = 200.0 / a.powf(a);
            assert!(
                (profile_theta(a, &s).unwrap() - expected).abs() < 1e-9,
                "a = {a}"
            );
        }
    }

    #[test]
    fn profile_theta_degenerate() {
        let s = RatingSample::new("x", 2100.0, vec![2100.0; 5]).unwrap();
        assert!(matches!(profile_theta(0.7, &s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn loglik_topk_reduces_to_full_when_uncensored() {
        let s = sample_from(0.689, 209.28, 2100.0, 40, 5);
        let mut sorted = s.ratings().to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let t = TopKSample::new(2100.0, sorted, 40).unwrap();
        let m = ThresholdModel::new(2100.0, 0.7, 200.0).unwrap();
        let full = loglik_full(&m, &s).unwrap();
        let topk = loglik_topk(&m, &t).unwrap();
        assert!(
            ((full - topk) / full).abs() < 1e-12,
            "full {full} vs topk {topk}"
        );
    }

    #[test]
    fn loglik_topk_contract_cases() {
        let m = ThresholdModel::new(2100.0, 1.0, 100.0).unwrap();
        let t1 = TopKSample::new(2100.0, vec![2500.0], 10).unwrap();
        assert!(matches!(loglik_topk(&m, &t1), Err(Error::Contract(_))));

        // Smallest listed value at the threshold: censoring mass is zero.
        let t2 = TopKSample::new(2100.0, vec![2500.0, 2100.0], 10).unwrap();
        assert_eq!(loglik_topk(&m, &t2).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn fit_full_requires_minimum_size() {
        let s = RatingSample::new("x", 2100.0, vec![2200.0; 5]).unwrap();
        assert!(matches!(
            fit_full(&s),
            Err(Error::SampleTooSmall { min: 10, got: 5 })
        ));
    }

    #[test]
    fn fit_full_recovers_exponential() {
        let s = sample_from(1.0, 150.0, 2100.0, 4000, 99);
        let fit = fit_full(&s).unwrap();
        let se = fit.se_a();
        assert!(
            (fit.model.a() - 1.0).abs() < 3.0 * se,
            "a = {}, se = {se}",
            fit.model.a()
        );
        assert!(fit.warnings.is_empty());
    }

    #[test]
    fn hessian_is_symmetric_before_averaging() {
        let s = sample_from(0.689, 209.28, 2100.0, 2000, 31);
        let fit = fit_full(&s).unwrap();
        let f = |a: f64, ln_t: f64| loglik_params_full(a, ln_t, &s);
        let h = hessian2(&f, [fit.model.a(), fit.model.theta().ln()]);
        let scale = h[0][1].abs().max(h[1][0].abs());
        assert!(
            (h[0][1] - h[1][0]).abs() <= 1e-6 * scale,
            "off-diagonals {} vs {}",
            h[0][1],
            h[1][0]
        );
    }

    #[test]
    fn delta_method_identity_on_theta() {
        let s = sample_from(0.689, 209.28, 2100.0, 1500, 17);
        let fit = fit_full(&s).unwrap();
        let (est, se) = delta_method(&fit, |_, t| t).unwrap();
        assert_eq!(est, fit.model.theta());
        assert!(
            ((se - fit.se_theta()) / fit.se_theta()).abs() < 1e-9,
            "se {se} vs {}",
            fit.se_theta()
        );
    }

    #[test]
    fn delta_method_rejects_non_finite_focus() {
        let s = sample_from(0.689, 209.28, 2100.0, 500, 3);
        let fit = fit_full(&s).unwrap();
        assert!(delta_method(&fit, |_, _| f64::NAN).is_err());
    }

    #[test]
    fn shared_tail_identical_groups() {
        let m = ThresholdModel::new(2100.0, 0.7, 180.0).unwrap();
        let xs = m.sample(800, 4);
        let g1 = RatingSample::new("g1", 2100.0, xs.clone()).unwrap();
        let g2 = RatingSample::new("g2", 2100.0, xs).unwrap();
        let shared = fit_shared_tail(&[g1.clone(), g2]).unwrap();
        let single = fit_full(&g1).unwrap();
        assert!((shared.a_shared - single.model.a()).abs() < 1e-4);
        let thetas: Vec<f64> = shared.theta_by_group.values().copied().collect();
        assert!((thetas[0] - thetas[1]).abs() < 1e-9);
        // Identical groups: shared model loses nothing, so AIC favours it.
        assert!(shared.aic < shared.separate_aic);
    }

    #[test]
    fn shared_tail_contract_checks() {
        let g = RatingSample::new("g", 2100.0, vec![2200.0; 20]).unwrap();
        assert!(matches!(
            fit_shared_tail(std::slice::from_ref(&g)),
            Err(Error::Contract(_))
        ));
        let other = RatingSample::new("h", 2000.0, vec![2200.0; 20]).unwrap();
        assert!(matches!(
            fit_shared_tail(&[g.clone(), other]),
            Err(Error::Contract(_))
        ));
        let dup = RatingSample::new("g", 2100.0, vec![2250.0; 20]).unwrap();
        assert!(matches!(
            fit_shared_tail(&[g, dup]),
            Err(Error::Contract(_))
        ));
    }
}
