//! The two-parameter over-threshold law.
//!
//! Scores above a threshold `r0` are modelled with density
//!
//! ```text
//! f(x) = exp{ -((x - r0)/theta)^(1/a) } / (Γ(a+1) · theta),   x >= r0,
//! ```
//!
//! equivalently `X = r0 + theta · V^a` with `V ~ Gamma(a, 1)`. The tail
//! index `a` interpolates between Gaussian-like (`a = 1/2`) and
//! exponential (`a = 1`) behaviour; `theta` is a pure scale.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{inv_reg_lower_gamma, log_gamma, reg_lower_gamma};

/// Default threshold for chess-rating work.
pub const DEFAULT_THRESHOLD: f64 = 2100.0;

/// The over-threshold law `(r0, a, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdModel {
    r0: f64,
    a: f64,
    theta: f64,
}

/// Mean, spread and median of a [`ThresholdModel`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentSummary {
    /// E X, in score points.
    pub mean: f64,
    /// Standard deviation, in score points.
    pub sd: f64,
    /// Variance, in squared score points.
    pub variance: f64,
    /// 0.5-quantile, in score points.
    pub median: f64,
}

impl ThresholdModel {
    /// Build a model, validating `a > 0`, `theta > 0` and finite `r0`.
    pub fn new(r0: f64, a: f64, theta: f64) -> Result<Self> {
        if !r0.is_finite() {
            return Err(Error::Domain(format!("threshold must be finite, got {r0}")));
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Domain(format!("tail index must be > 0, got {a}")));
        }
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::Domain(format!("scale must be > 0, got {theta}")));
        }
        Ok(Self { r0, a, theta })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Density at `x >= r0`. Strictly decreasing on its domain.
    pub fn density(&self, x: f64) -> Result<f64> {
        let z = self.standardize(x)?;
        let log_f = -log_gamma(self.a + 1.0).expect("a + 1 > 0")
            - z.powf(1.0 / self.a)
            - self.theta.ln();
        Ok(log_f.exp())
    }

    /// Natural log of the density at `x >= r0`.
    pub fn log_density(&self, x: f64) -> Result<f64> {
        let z = self.standardize(x)?;
        Ok(-log_gamma(self.a + 1.0).expect("a + 1 > 0") - z.powf(1.0 / self.a) - self.theta.ln())
    }

    /// Distribution function `F(x) = G_a(((x - r0)/theta)^(1/a))` with
    /// `G_a` the Gamma(a,1) CDF.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let z = self.standardize(x)?;
        reg_lower_gamma(self.a, z.powf(1.0 / self.a))
    }

    /// Survivor function `1 - F(x)`.
    pub fn survivor(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.cdf(x)?)
    }

    /// Quantile function `r0 + theta · (G_a^{-1}(p))^a` for `0 <= p < 1`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let g = inv_reg_lower_gamma(self.a, p)?;
        Ok(self.r0 + self.theta * g.powf(self.a))
    }

    /// Closed-form mean and variance plus the median.
    ///
    /// `E X = r0 + theta Γ(2a)/Γ(a)` and
    /// `Var X = theta² [Γ(3a)/Γ(a) − (Γ(2a)/Γ(a))²]`.
    pub fn moments(&self) -> MomentSummary {
        let lg_a = log_gamma(self.a).expect("a > 0");
        let ratio2 = (log_gamma(2.0 * self.a).expect("2a > 0") - lg_a).exp();
        let ratio3 = (log_gamma(3.0 * self.a).expect("3a > 0") - lg_a).exp();
        let mean = self.r0 + self.theta * ratio2;
        let variance = self.theta * self.theta * (ratio3 - ratio2 * ratio2);
        MomentSummary {
            mean,
            sd: variance.sqrt(),
            variance,
            median: self.quantile(0.5).expect("p = 0.5 is in range"),
        }
    }

    /// Draw `n` independent scores via the gamma-power representation
    /// `X = r0 + theta · V^a`. Deterministic for a fixed `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    /// Like [`sample`](Self::sample) but drawing from a caller-owned stream.
    pub fn sample_with<R: rand::Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let gamma = Gamma::new(self.a, 1.0).expect("a > 0");
        (0..n)
            .map(|_| self.r0 + self.theta * gamma.sample(rng).powf(self.a))
            .collect()
    }

    fn standardize(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x < self.r0 {
            return Err(Error::Domain(format!(
                "the law has no mass below the threshold: x={x} < r0={}",
                self.r0
            )));
        }
        Ok((x - self.r0) / self.theta)
    }
}

/// Leading-order survivor approximation with its validity flag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SurvivorApprox {
    /// `(1/Γ(a)) · u^(1−1/a) · exp(−u^(1/a))`.
    pub value: f64,
    /// `false` when `u^(1/a) <= a`, i.e. outside the asymptotic regime;
    /// the value is still returned but should be treated as indicative.
    pub regime_ok: bool,
}

/// Large-`u` survivor approximation for the standardized law
/// (`r0 = 0`, `theta = 1`).
///
/// The exact survivor is `Q_a(u^(1/a))` (upper incomplete gamma); its
/// dominant term is the stretched exponential with polynomial correction
/// `u^(1−1/a)` and constant `1/Γ(a)`, obtained from the substitution
/// `s = t^(1/a)` in the tail integral.
pub fn survivor_asymptotic(a: f64, u: f64) -> Result<SurvivorApprox> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain(format!("tail index must be > 0, got {a}")));
    }
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::Domain(format!(
            "survivor asymptotics need u > 0, got {u}"
        )));
    }
    let log_val = -log_gamma(a)? + (1.0 - 1.0 / a) * u.ln() - u.powf(1.0 / a);
    Ok(SurvivorApprox {
        value: log_val.exp(),
        regime_ok: u.powf(1.0 / a) > a,
    })
}
