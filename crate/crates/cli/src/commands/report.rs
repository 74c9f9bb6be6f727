//! `crest report`: plot-data tables for a two-strata rating file —
//! fitted and empirical densities, CDFs, quantile functions, the
//! survivor-difference band and the bootstrap scatter — plus run
//! metadata and optional SVG renderings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use crest_core::data::{make_sample, StratumFilter};
use crest_core::fit::{fit_full, FitResult, RatingSample};
use crest_core::gap::{empirical_quantile, pooled_bootstrap, survivor_diff_band};
use crest_core::model::ThresholdModel;

use crate::commands::gap::write_draws_csv;
use crate::meta::RunMeta;
use crate::render::{chart_svg, Series, SeriesKind};
use crate::support::{load_rating_list, reject_boundary_fits, require_sample_size};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Rating-list CSV with both strata
    #[arg(long)]
    pub input: PathBuf,
    /// Threshold: only ratings at or above this are analysed
    #[arg(long, default_value_t = 2100)]
    pub r0: i64,
    /// First stratum
    #[arg(long, default_value = "sex=M")]
    pub stratum_a: String,
    /// Second stratum
    #[arg(long, default_value = "sex=W")]
    pub stratum_b: String,
    /// Bootstrap replicates for the scatter table
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// RNG seed (required: runs must be reproducible)
    #[arg(long)]
    pub seed: u64,
    /// Output directory for the tables
    #[arg(long)]
    pub out: PathBuf,
    /// Confidence level of the survivor-difference band
    #[arg(long, default_value_t = 0.9)]
    pub band_level: f64,
    /// Also render each table as a standalone SVG
    #[arg(long, default_value_t = false)]
    pub svg: bool,
}

/// Number of grid points for the curve tables.
const GRID_POINTS: usize = 200;
/// 95% Kolmogorov-Smirnov band constant.
const KS_95: f64 = 1.36;

#[derive(Serialize)]
struct StratumMeta {
    label: String,
    n: usize,
    a: f64,
    a_se: f64,
    theta: f64,
    theta_se: f64,
    loglik: f64,
}

#[derive(Serialize)]
struct AdequacyMeta {
    /// Exact Kolmogorov distance between the fitted CDF and the ECDF.
    ks: f64,
    /// 95% KS band, 1.36/sqrt(n).
    ks_band_95: f64,
    within_band: bool,
}

#[derive(Serialize)]
struct GridMeta {
    points: usize,
    from: f64,
    to: f64,
}

#[derive(Serialize)]
struct ReportMetaDoc {
    strata: BTreeMap<String, StratumMeta>,
    pooled: BTreeMap<String, f64>,
    grid: GridMeta,
    band_level: f64,
    reps: usize,
    adequacy: BTreeMap<String, AdequacyMeta>,
    tables: Vec<String>,
    units: BTreeMap<String, String>,
    meta: RunMeta,
}

pub fn run(args: ReportArgs) -> Result<()> {
    let (bytes, list) = load_rating_list(&args.input)?;
    let filter_a: StratumFilter = args.stratum_a.parse()?;
    let filter_b: StratumFilter = args.stratum_b.parse()?;
    let r0 = args.r0 as f64;

    let group_a = make_sample(&list, r0, &filter_a);
    let group_b = make_sample(&list, r0, &filter_b);
    require_sample_size(group_a.len(), &filter_a.label())?;
    require_sample_size(group_b.len(), &filter_b.label())?;

    let fit_a = fit_full(&group_a)?;
    let fit_b = fit_full(&group_b)?;
    reject_boundary_fits(&fit_a, &filter_a.label())?;
    reject_boundary_fits(&fit_b, &filter_b.label())?;

    // Pooled fit fixes the common grid: r0 to its 0.999 quantile.
    let mut pooled_ratings = group_a.ratings().to_vec();
    pooled_ratings.extend_from_slice(group_b.ratings());
    let pooled_sample = RatingSample::new("pooled", r0, pooled_ratings)?;
    let pooled_fit = fit_full(&pooled_sample)?;
    let grid_hi = pooled_fit.model.quantile(0.999)?;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| r0 + (grid_hi - r0) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory '{}'", args.out.display()))?;

    write_density_table(&args.out, &grid, &fit_a.model, &fit_b.model)?;
    write_cdf_table(&args.out, &grid, &fit_a.model, &fit_b.model, &group_a, &group_b)?;
    write_log_density_table(&args.out, &grid, &fit_a.model, &fit_b.model)?;
    write_quantile_table(&args.out, &fit_a.model, &fit_b.model, &group_a, &group_b)?;

    let band = survivor_diff_band(&group_a, &group_b, &grid, args.band_level)?;
    write_band_table(&args.out, &grid, &band.diff, &band.lower, &band.upper)?;

    let boot = pooled_bootstrap(&group_a, &group_b, args.reps, args.seed)?;
    write_draws_csv(&boot, &args.out.join("bootstrap_scatter.csv"))?;

    if args.svg {
        render_all(&args.out, &grid, &fit_a, &fit_b, &group_a, &group_b, &band, &boot)?;
    }

    // Run metadata, including the model-adequacy monitor.
    let mut strata = BTreeMap::new();
    strata.insert("a".to_string(), stratum_meta(&filter_a.label(), &group_a, &fit_a));
    strata.insert("b".to_string(), stratum_meta(&filter_b.label(), &group_b, &fit_b));
    let mut pooled = BTreeMap::new();
    pooled.insert("a".to_string(), pooled_fit.model.a());
    pooled.insert("theta".to_string(), pooled_fit.model.theta());
    let mut adequacy = BTreeMap::new();
    adequacy.insert("a".to_string(), adequacy_meta(&fit_a.model, &group_a));
    adequacy.insert("b".to_string(), adequacy_meta(&fit_b.model, &group_b));
    let mut units = BTreeMap::new();
    units.insert("x".to_string(), "score points".to_string());
    units.insert("density".to_string(), "per score point".to_string());
    units.insert("quantiles".to_string(), "score points".to_string());
    units.insert("survivor diff".to_string(), "probability".to_string());

    let doc = ReportMetaDoc {
        strata,
        pooled,
        grid: GridMeta {
            points: GRID_POINTS,
            from: r0,
            to: grid_hi,
        },
        band_level: args.band_level,
        reps: args.reps,
        adequacy,
        tables: vec![
            "density.csv".into(),
            "cdf.csv".into(),
            "log_density.csv".into(),
            "quantiles.csv".into(),
            "survivor_band.csv".into(),
            "bootstrap_scatter.csv".into(),
        ],
        units,
        meta: RunMeta::collect(Some(args.seed), Some(&bytes)),
    };
    let meta_path = args.out.join("run_meta.json");
    fs::write(&meta_path, serde_json::to_string_pretty(&doc)?)
        .with_context(|| format!("cannot write '{}'", meta_path.display()))?;
    println!("report written to {}", args.out.display());
    Ok(())
}

fn stratum_meta(label: &str, group: &RatingSample, fit: &FitResult) -> StratumMeta {
    StratumMeta {
        label: label.to_string(),
        n: group.len(),
        a: fit.model.a(),
        a_se: fit.se_a(),
        theta: fit.model.theta(),
        theta_se: fit.se_theta(),
        loglik: fit.loglik,
    }
}

fn adequacy_meta(model: &ThresholdModel, group: &RatingSample) -> AdequacyMeta {
    let ks = ks_statistic(model, group);
    let band = KS_95 / (group.len() as f64).sqrt();
    AdequacyMeta {
        ks,
        ks_band_95: band,
        within_band: ks <= band,
    }
}

/// Exact Kolmogorov distance between a fitted CDF and the sample ECDF.
pub fn ks_statistic(model: &ThresholdModel, group: &RatingSample) -> f64 {
    let mut sorted = group.ratings().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite ratings"));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = model.cdf(x).expect("ratings are above threshold");
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

fn create(out: &Path, name: &str) -> Result<fs::File> {
    fs::File::create(out.join(name)).with_context(|| format!("cannot write '{name}'"))
}

fn write_density_table(out: &Path, grid: &[f64], a: &ThresholdModel, b: &ThresholdModel) -> Result<()> {
    let mut f = create(out, "density.csv")?;
    writeln!(f, "x [points],f_a [1/points],f_b [1/points]")?;
    for &x in grid {
        writeln!(f, "{},{},{}", x, a.density(x)?, b.density(x)?)?;
    }
    Ok(())
}

fn write_cdf_table(
    out: &Path,
    grid: &[f64],
    a: &ThresholdModel,
    b: &ThresholdModel,
    group_a: &RatingSample,
    group_b: &RatingSample,
) -> Result<()> {
    let mut f = create(out, "cdf.csv")?;
    writeln!(f, "x [points],F_a,F_b,F_emp_a,F_emp_b")?;
    for &x in grid {
        writeln!(
            f,
            "{},{},{},{},{}",
            x,
            a.cdf(x)?,
            b.cdf(x)?,
            crest_core::data::ecdf(group_a, x)?,
            crest_core::data::ecdf(group_b, x)?
        )?;
    }
    Ok(())
}

fn write_log_density_table(
    out: &Path,
    grid: &[f64],
    a: &ThresholdModel,
    b: &ThresholdModel,
) -> Result<()> {
    let mut f = create(out, "log_density.csv")?;
    writeln!(f, "x [points],log_f_a,log_f_b")?;
    for &x in grid {
        writeln!(f, "{},{},{}", x, a.log_density(x)?, b.log_density(x)?)?;
    }
    Ok(())
}

fn write_quantile_table(
    out: &Path,
    a: &ThresholdModel,
    b: &ThresholdModel,
    group_a: &RatingSample,
    group_b: &RatingSample,
) -> Result<()> {
    let mut f = create(out, "quantiles.csv")?;
    writeln!(f, "p,Q_a [points],Q_b [points],Q_emp_a [points],Q_emp_b [points]")?;
    for i in 1..GRID_POINTS {
        let p = i as f64 / GRID_POINTS as f64;
        writeln!(
            f,
            "{},{},{},{},{}",
            p,
            a.quantile(p)?,
            b.quantile(p)?,
            empirical_quantile(group_a.ratings(), p)?,
            empirical_quantile(group_b.ratings(), p)?
        )?;
    }
    Ok(())
}

fn write_band_table(
    out: &Path,
    grid: &[f64],
    diff: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Result<()> {
    let mut f = create(out, "survivor_band.csv")?;
    writeln!(f, "x [points],diff,lower,upper")?;
    for i in 0..grid.len() {
        writeln!(f, "{},{},{},{}", grid[i], diff[i], lower[i], upper[i])?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn render_all(
    out: &Path,
    grid: &[f64],
    fit_a: &FitResult,
    fit_b: &FitResult,
    group_a: &RatingSample,
    group_b: &RatingSample,
    band: &crest_core::BandCurve,
    boot: &crest_core::BootstrapSummary,
) -> Result<()> {
    let pair = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        grid.iter().map(|&x| (x, f(x))).collect()
    };
    let ma = fit_a.model;
    let mb = fit_b.model;

    let save = |name: &str, svg: String| -> Result<()> {
        fs::write(out.join(name), svg).with_context(|| format!("cannot write '{name}'"))
    };

    save(
        "density.svg",
        chart_svg(
            "Fitted densities",
            "score [points]",
            "density [1/points]",
            &[
                line("a (fitted)", "#000000", pair(&|x| ma.density(x).unwrap())),
                line("b (fitted)", "#d62728", pair(&|x| mb.density(x).unwrap())),
            ],
        ),
    )?;

    save(
        "cdf.svg",
        chart_svg(
            "Fitted and empirical CDFs",
            "score [points]",
            "F(x)",
            &[
                line("a (fitted)", "#000000", pair(&|x| ma.cdf(x).unwrap())),
                line("b (fitted)", "#d62728", pair(&|x| mb.cdf(x).unwrap())),
                line(
                    "a (empirical)",
                    "#1f77b4",
                    pair(&|x| crest_core::data::ecdf(group_a, x).unwrap()),
                ),
                line(
                    "b (empirical)",
                    "#ff7f0e",
                    pair(&|x| crest_core::data::ecdf(group_b, x).unwrap()),
                ),
            ],
        ),
    )?;

    save(
        "log_density.svg",
        chart_svg(
            "Fitted log-densities",
            "score [points]",
            "log f(x)",
            &[
                line("a (fitted)", "#000000", pair(&|x| ma.log_density(x).unwrap())),
                line("b (fitted)", "#d62728", pair(&|x| mb.log_density(x).unwrap())),
            ],
        ),
    )?;

    let ps: Vec<f64> = (1..GRID_POINTS).map(|i| i as f64 / GRID_POINTS as f64).collect();
    save(
        "quantiles.svg",
        chart_svg(
            "Quantile functions",
            "p",
            "Q(p) [points]",
            &[
                line(
                    "a (fitted)",
                    "#000000",
                    ps.iter().map(|&p| (p, ma.quantile(p).unwrap())).collect(),
                ),
                line(
                    "b (fitted)",
                    "#d62728",
                    ps.iter().map(|&p| (p, mb.quantile(p).unwrap())).collect(),
                ),
                line(
                    "a (empirical)",
                    "#1f77b4",
                    ps.iter()
                        .map(|&p| (p, empirical_quantile(group_a.ratings(), p).unwrap()))
                        .collect(),
                ),
                line(
                    "b (empirical)",
                    "#ff7f0e",
                    ps.iter()
                        .map(|&p| (p, empirical_quantile(group_b.ratings(), p).unwrap()))
                        .collect(),
                ),
            ],
        ),
    )?;

    let zip = |ys: &[f64]| -> Vec<(f64, f64)> {
        grid.iter().copied().zip(ys.iter().copied()).collect()
    };
    let mut band_series = vec![
        line("empirical diff", "#000000", zip(&band.diff)),
        line("lower", "#1f77b4", zip(&band.lower)),
        line("upper", "#1f77b4", zip(&band.upper)),
    ];
    if let Some(par) = &band.parametric {
        band_series.push(line("fitted diff", "#d62728", zip(par)));
    }
    save(
        "survivor_band.svg",
        chart_svg(
            "Survivor difference S_a - S_b with confidence band",
            "score [points]",
            "S_a(x) - S_b(x)",
            &band_series,
        ),
    )?;

    let mut scatter = Series {
        label: "null draws".to_string(),
        color: "#1f77b4",
        kind: SeriesKind::Scatter,
        points: boot
            .draws
            .iter()
            .map(|d| (d.q90_diff, d.sd_diff))
            .collect(),
    };
    scatter.points.push((boot.observed.q90_diff, boot.observed.sd_diff));
    let observed = Series {
        label: "observed".to_string(),
        color: "#d62728",
        kind: SeriesKind::Scatter,
        points: vec![(boot.observed.q90_diff, boot.observed.sd_diff)],
    };
    save(
        "bootstrap_scatter.svg",
        chart_svg(
            "Pooled bootstrap null draws",
            "q90 difference [points]",
            "sd difference [points]",
            &[scatter, observed],
        ),
    )?;

    Ok(())
}

fn line(label: &str, color: &'static str, points: Vec<(f64, f64)>) -> Series {
    Series {
        label: label.to_string(),
        color,
        kind: SeriesKind::Line,
        points,
    }
}
