//! `crest fit`: maximum-likelihood fit of one stratum, full-sample or
//! top-k censored.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use crest_core::data::{make_sample, to_topk, StratumFilter};
use crest_core::fit::{fit_full, fit_topk, FitResult};
use crest_core::Error as CoreError;

use crate::meta::RunMeta;
use crate::support::{load_rating_list, reject_boundary_fits, require_sample_size};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Rating-list CSV to read
    #[arg(long)]
    pub input: PathBuf,
    /// Threshold: only ratings at or above this enter the fit
    #[arg(long, default_value_t = 2100)]
    pub r0: i64,
    /// Stratum selector: all, sex=M, sex=W or fed=XXX
    #[arg(long, default_value = "all")]
    pub stratum: String,
    /// Fit from the k largest ratings only (censored likelihood)
    #[arg(long)]
    pub topk: Option<usize>,
}

#[derive(Serialize)]
struct EstimateJson {
    value: f64,
    se: f64,
}

#[derive(Serialize)]
struct FitJson {
    method: String,
    stratum: String,
    r0: i64,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    estimates: BTreeMap<String, EstimateJson>,
    loglik: f64,
    units: BTreeMap<String, String>,
    meta: RunMeta,
}

pub fn run(args: FitArgs) -> Result<()> {
    let (bytes, list) = load_rating_list(&args.input)?;
    let filter: StratumFilter = args.stratum.parse::<StratumFilter>()?;
    let sample = make_sample(&list, args.r0 as f64, &filter);
    require_sample_size(sample.len(), &filter.label())?;

    let (fit, k) = match args.topk {
        Some(k) => {
            let top = to_topk(&sample, k)?;
            (fit_topk(&top)?, Some(k))
        }
        None => (fit_full(&sample)?, None),
    };
    reject_boundary_fits(&fit, &filter.label())?;

    let doc = fit_to_json(&fit, &filter.label(), args.r0, sample.len(), k, &bytes)?;
    crate::support::print_stdout(&serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn fit_to_json(
    fit: &FitResult,
    stratum: &str,
    r0: i64,
    n: usize,
    k: Option<usize>,
    input_bytes: &[u8],
) -> Result<FitJson> {
    let mut estimates = BTreeMap::new();
    estimates.insert(
        "a".to_string(),
        EstimateJson {
            value: fit.model.a(),
            se: fit.se_a(),
        },
    );
    estimates.insert(
        "theta".to_string(),
        EstimateJson {
            value: fit.model.theta(),
            se: fit.se_theta(),
        },
    );
    for (spec_key, json_key) in [("mean", "mu"), ("sd", "sigma"), ("median", "median")] {
        let focus = fit
            .focus_estimates
            .get(spec_key)
            .ok_or_else(|| CoreError::Contract(format!("missing focus '{spec_key}'")))?;
        estimates.insert(
            json_key.to_string(),
            EstimateJson {
                value: focus.estimate,
                se: focus.se,
            },
        );
    }

    let mut units = BTreeMap::new();
    units.insert("a".to_string(), "dimensionless".to_string());
    for key in ["theta", "mu", "sigma", "median"] {
        units.insert(key.to_string(), "score points".to_string());
    }

    Ok(FitJson {
        method: match fit.method {
            crest_core::FitMethod::Full => "full",
            crest_core::FitMethod::TopK => "topk",
            crest_core::FitMethod::Shared => "shared",
        }
        .to_string(),
        stratum: stratum.to_string(),
        r0,
        n,
        k,
        estimates,
        loglik: fit.loglik,
        units,
        meta: RunMeta::collect(None, Some(input_bytes)),
    })
}
