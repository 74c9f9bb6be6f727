//! `crest predict-max`: expected top score of a stratum with n members,
//! from model parameters given directly or read from a `crest fit` JSON.

use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::Args;
use serde::Serialize;

use crest_core::extremes::{expected_max, gumbel_norming};
use crest_core::model::ThresholdModel;

use crate::meta::RunMeta;

#[derive(Debug, Args)]
pub struct PredictMaxArgs {
    /// Read a, theta and r0 from a `crest fit` JSON document
    #[arg(long, conflicts_with_all = ["a", "theta"])]
    pub fit_json: Option<PathBuf>,
    /// Tail index
    #[arg(long, required_unless_present = "fit_json")]
    pub a: Option<f64>,
    /// Scale, in score points
    #[arg(long, required_unless_present = "fit_json")]
    pub theta: Option<f64>,
    /// Threshold (ignored when --fit-json is given)
    #[arg(long, default_value_t = 2100.0, allow_hyphen_values = true)]
    pub r0: f64,
    /// Participation volume: number of scores above the threshold
    #[arg(long)]
    pub n: f64,
    /// Add the Gumbel-mean correction term
    #[arg(long, default_value_t = false)]
    pub refined: bool,
}

#[derive(Serialize)]
struct NormingJson {
    a_n: f64,
    b_n: f64,
    scale_points: f64,
    location_points: f64,
}

#[derive(Serialize)]
struct PredictJson {
    a: f64,
    theta: f64,
    r0: f64,
    n: f64,
    refined: bool,
    expected_max: f64,
    expected_max_unrefined: f64,
    expected_max_refined: f64,
    /// Standardized Gumbel norming constants; absent for n < 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    norming: Option<NormingJson>,
    units: String,
    meta: RunMeta,
}

pub fn run(args: PredictMaxArgs) -> Result<()> {
    if !args.n.is_finite() || args.n < 2.0 {
        return Err(anyhow!(crest_core::Error::Domain(format!(
            "participation volume must be >= 2, got {}",
            args.n
        ))));
    }
    let (a, theta, r0, input_bytes) = match &args.fit_json {
        Some(path) => {
            let bytes = std::fs::read(path)
                .with_context(|| format!("cannot read fit JSON '{}'", path.display()))?;
            let doc: serde_json::Value = serde_json::from_slice(&bytes)
                .with_context(|| format!("'{}' is not valid JSON", path.display()))?;
            let field = |name: &str| -> Result<f64> {
                doc.pointer(&format!("/estimates/{name}/value"))
                    .and_then(|v| v.as_f64())
                    .ok_or_else(|| anyhow!("fit JSON lacks estimates.{name}.value"))
            };
            let r0 = doc
                .get("r0")
                .and_then(|v| v.as_f64())
                .ok_or_else(|| anyhow!("fit JSON lacks r0"))?;
            (field("a")?, field("theta")?, r0, Some(bytes))
        }
        None => (
            args.a.expect("clap enforces presence"),
            args.theta.expect("clap enforces presence"),
            args.r0,
            None,
        ),
    };

    let model = ThresholdModel::new(r0, a, theta)?;
    let unrefined = expected_max(&model, args.n, false);
    let refined = expected_max(&model, args.n, true);
    let norming = if args.n >= 3.0 {
        let g = gumbel_norming(a, args.n);
        Some(NormingJson {
            a_n: g.a_n,
            b_n: g.b_n,
            scale_points: theta * g.a_n,
            location_points: r0 + theta * g.b_n,
        })
    } else {
        None
    };

    let doc = PredictJson {
        a,
        theta,
        r0,
        n: args.n,
        refined: args.refined,
        expected_max: if args.refined { refined } else { unrefined },
        expected_max_unrefined: unrefined,
        expected_max_refined: refined,
        norming,
        units: "score points".to_string(),
        meta: RunMeta::collect(None, input_bytes.as_deref()),
    };
    crate::support::print_stdout(&serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}
