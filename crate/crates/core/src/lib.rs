//! Modelling of scores above a high threshold with a two-parameter
//! stretched-exponential law.
//!
//! The crate covers the full analysis pipeline for over-threshold score
//! data (chess ratings being the flagship application):
//!
//! * [`model`] — the two-parameter law itself: density, CDF, quantiles,
//!   moments, sampling and tail asymptotics;
//! * [`fit`] — maximum-likelihood estimation from complete samples and
//!   from censored top-k lists, observed-information covariances and
//!   delta-method standard errors;
//! * [`extremes`] — closed-form expected-maximum approximations and
//!   Gumbel norming constants;
//! * [`gap`] — two-group discrepancy testing via pooled permutation
//!   bootstrap and survivor-difference confidence bands;
//! * [`data`] — rating-list CSV ingestion, stratum filtering and
//!   empirical summaries;
//! * [`special`] — the gamma-family special functions everything else
//!   is built on.

pub mod data;
pub mod error;
pub mod extremes;
pub mod fit;
pub mod gap;
pub mod model;
pub mod optim;
pub mod special;

pub use data::{ParseReport, RatingList, RatingRecord, Sex, StratumFilter};
pub use error::{Error, Result};
pub use extremes::{GaussianStratum, GumbelNorming, EULER_GAMMA};
pub use fit::{
    FitMethod, FitResult, FitWarning, FocusEstimate, RatingSample, SharedFitResult, TopKSample,
};
pub use gap::{BandCurve, BootstrapSummary, DiscrepancyPair};
pub use model::{MomentSummary, SurvivorApprox, ThresholdModel, DEFAULT_THRESHOLD};
