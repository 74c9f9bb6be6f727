//! Closed-form extreme-value approximations.
//!
//! Covers the Gaussian-strata expected maximum under equicorrelation,
//! the excess-ratio and break-even participation algebra, and the
//! stretched-exponential expected maximum with its Gumbel norming
//! constants. Participation sizes are real-valued throughout; rounding
//! is the caller's concern.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ThresholdModel;

/// Euler's constant, `γ_e`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// An equicorrelated Gaussian stratum: `N(xi, sigma²)` scores with
/// pairwise correlation `rho` among its `n` members.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GaussianStratum {
    pub xi: f64,
    pub sigma: f64,
    pub rho: f64,
    pub n: f64,
}

impl GaussianStratum {
    pub fn new(xi: f64, sigma: f64, rho: f64, n: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Domain(format!("sigma must be > 0, got {sigma}")));
        }
        if !rho.is_finite() || !(0.0..1.0).contains(&rho) {
            return Err(Error::Domain(format!(
                "equicorrelation must lie in [0, 1), got {rho}"
            )));
        }
        if !n.is_finite() || n < 2.0 {
            return Err(Error::Domain(format!("stratum size must be >= 2, got {n}")));
        }
        if !xi.is_finite() {
            return Err(Error::Domain(format!("location must be finite, got {xi}")));
        }
        Ok(Self { xi, sigma, rho, n })
    }
}

/// Gumbel norming constants on the standardized scale of the
/// over-threshold law (`r0 = 0`, `theta = 1`): `(M_n - b_n)/a_n`
/// converges to the Gumbel distribution `exp(-exp(-g))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GumbelNorming {
    /// Scale, `a (ln n)^(a-1)`.
    pub a_n: f64,
    /// Location, `(ln n)^a`.
    pub b_n: f64,
}

/// Leading-order expected maximum of an equicorrelated Gaussian stratum:
/// `xi + sqrt(1 - rho) · sigma · sqrt(2 ln n)`.
///
/// A known leading-order overestimate; useful for comparative algebra,
/// not as an unbiased predictor.
pub fn gaussian_max_mean(s: &GaussianStratum) -> f64 {
    s.xi + (1.0 - s.rho).sqrt() * s.sigma * (2.0 * s.n.ln()).sqrt()
}

/// Ratio of expected excesses over the common location, stratum B
/// against stratum A: `sigma_B sqrt(ln n_B) / (sigma_A sqrt(ln n_A))`.
pub fn excess_ratio(sigma_a: f64, n_a: f64, sigma_b: f64, n_b: f64) -> f64 {
    debug_assert!(sigma_a > 0.0 && sigma_b > 0.0 && n_a >= 2.0 && n_b >= 2.0);
    (sigma_b * n_b.ln().sqrt()) / (sigma_a * n_a.ln().sqrt())
}

/// Participation size at which stratum A's expected maximum catches up
/// with stratum B's: the `n_A` solving
/// `ln n_B / ln n_A = sigma_A² / sigma_B²`, i.e. `n_B^(sigma_B²/sigma_A²)`.
///
/// Returned as a real; round as needed.
pub fn breakeven_size(n_b: f64, sigma_a: f64, sigma_b: f64) -> f64 {
    debug_assert!(sigma_a > 0.0 && sigma_b > 0.0 && n_b >= 2.0);
    (n_b.ln() * (sigma_b * sigma_b) / (sigma_a * sigma_a)).exp()
}

/// Expected maximum of `n` scores from the over-threshold law.
///
/// Unrefined: `r0 + theta (ln n)^a`. Refined adds the Gumbel-mean
/// correction `theta · γ_e · a · (ln n)^(a-1)`.
pub fn expected_max(m: &ThresholdModel, n: f64, refined: bool) -> f64 {
    debug_assert!(n >= 2.0);
    let ln_n = n.ln();
    let lead = ln_n.powf(m.a());
    let value = if refined {
        lead + EULER_GAMMA * m.a() * ln_n.powf(m.a() - 1.0)
    } else {
        lead
    };
    m.r0() + m.theta() * value
}

/// Norming constants for the Gumbel limit of standardized maxima.
/// Requires `ln n > 1` (i.e. `n >= 3`) for the powers to behave.
pub fn gumbel_norming(a: f64, n: f64) -> GumbelNorming {
    debug_assert!(a > 0.0 && n >= 3.0);
    let ln_n = n.ln();
    GumbelNorming {
        a_n: a * ln_n.powf(a - 1.0),
        b_n: ln_n.powf(a),
    }
}

/// Gumbel distribution function `exp(-exp(-g))`.
pub fn gumbel_cdf(g: f64) -> f64 {
    (-(-g).exp()).exp()
}
