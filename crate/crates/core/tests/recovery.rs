//! Parameter-recovery studies at the scales the rating analysis runs at:
//! standard-error ranges, censored-list recovery, confidence coverage and
//! shared-tail model selection.

mod common;

use crest_core::data::to_topk;
use crest_core::fit::{delta_method, fit_full, fit_shared_tail, fit_topk, loglik_full, RatingSample};
use crest_core::model::ThresholdModel;

fn synthetic(a: f64, theta: f64, n: usize, seed: u64) -> RatingSample {
    let m = ThresholdModel::new(2100.0, a, theta).unwrap();
    RatingSample::new("synthetic", 2100.0, m.sample(n, seed)).unwrap()
}

#[test]
fn full_fit_recovers_men_column() {
    let s = synthetic(0.689, 209.28, 14_671, 101);
    let fit = fit_full(&s).unwrap();
    assert!(fit.warnings.is_empty(), "warnings: {:?}", fit.warnings);
    assert!(
        (fit.model.a() - 0.689).abs() < 0.04,
        "a = {}",
        fit.model.a()
    );
    assert!(
        (fit.model.theta() - 209.28).abs() < 11.0,
        "theta = {}",
        fit.model.theta()
    );
    let se_a = fit.se_a();
    assert!(
        (0.009..=0.018).contains(&se_a),
        "se(a) = {se_a} outside the range bracketing the reported 0.013"
    );
}

#[test]
fn full_fit_recovers_women_column_se_scale() {
    let s = synthetic(0.612, 194.86, 753, 102);
    let fit = fit_full(&s).unwrap();
    let se_a = fit.se_a();
    assert!(
        (0.03..=0.08).contains(&se_a),
        "se(a) = {se_a} outside the range bracketing the reported 0.052"
    );
}

#[test]
fn full_fit_gradient_vanishes_at_optimum() {
    // Finite-difference gradient of the log-likelihood in (a, ln theta)
    // at the fitted point.
    let s = synthetic(0.689, 209.28, 14_671, 103);
    let fit = fit_full(&s).unwrap();
    let ll = |a: f64, ln_t: f64| {
        let m = ThresholdModel::new(2100.0, a, ln_t.exp()).unwrap();
        loglik_full(&m, &s).unwrap()
    };
    let (a, lt) = (fit.model.a(), fit.model.theta().ln());
    let ha = 1e-5 * (1.0 + a.abs());
    let ht = 1e-5 * (1.0 + lt.abs());
    let ga = (ll(a + ha, lt) - ll(a - ha, lt)) / (2.0 * ha);
    let gt = (ll(a, lt + ht) - ll(a, lt - ht)) / (2.0 * ht);
    let norm = (ga * ga + gt * gt).sqrt();
    assert!(norm <= 1e-4, "gradient norm {norm} (components {ga}, {gt})");
}

#[test]
fn delta_method_focus_se_ranges_match_reported_columns() {
    let men = fit_full(&synthetic(0.689, 209.28, 14_671, 104)).unwrap();
    let mean_se = men.focus_estimates["mean"].se;
    assert!(
        (0.7..=1.4).contains(&mean_se),
        "se(mean) = {mean_se} vs reported 0.99"
    );

    let women = fit_full(&synthetic(0.612, 194.86, 753, 105)).unwrap();
    let median_se = women.focus_estimates["median"].se;
    assert!(
        (2.5..=6.0).contains(&median_se),
        "se(median) = {median_se} vs reported 3.98"
    );
}

#[test]
fn delta_method_matches_focus_values() {
    let fit = fit_full(&synthetic(0.689, 209.28, 4000, 106)).unwrap();
    let mom = fit.model.moments();
    assert!((fit.focus_estimates["mean"].estimate - mom.mean).abs() < 1e-9);
    assert!((fit.focus_estimates["sd"].estimate - mom.sd).abs() < 1e-9);
    assert!((fit.focus_estimates["median"].estimate - mom.median).abs() < 1e-9);
    // A direct scale projection reproduces the covariance diagonal.
    let (_, se_theta) = delta_method(&fit, |_, t| t).unwrap();
    assert!(((se_theta - fit.se_theta()) / fit.se_theta()).abs() < 1e-9);
}

#[test]
fn confidence_coverage_at_nominal_level() {
    // 200 replications at n = 2000: the 95% interval for the tail index
    // should cover the truth 95% ± 4% of the time.
    let mut covered = 0usize;
    let reps = 200;
    for i in 0..reps {
        let s = synthetic(0.689, 209.28, 2000, 1000 + i as u64);
        let fit = fit_full(&s).unwrap();
        let half = 1.96 * fit.se_a();
        if (fit.model.a() - 0.689).abs() <= half {
            covered += 1;
        }
    }
    let coverage = covered as f64 / reps as f64;
    assert!(
        (0.91..=0.99).contains(&coverage),
        "coverage {coverage} over {reps} replications"
    );
}

#[test]
fn topk_fit_recovers_iceberg_from_top_100() {
    let s = synthetic(0.689, 209.28, 14_671, 107);
    let full = fit_full(&s).unwrap();
    let t = to_topk(&s, 100).unwrap();
    let topk = fit_topk(&t).unwrap();
    assert!(topk.warnings.is_empty(), "warnings: {:?}", topk.warnings);
    let se = topk.se_a();
    assert!(
        (topk.model.a() - 0.689).abs() < 4.0 * se,
        "a_topk = {} (se {se}) vs truth 0.689",
        topk.model.a()
    );
    assert!(
        (topk.model.a() - full.model.a()).abs() < 4.0 * se,
        "a_topk = {} vs a_full = {}",
        topk.model.a(),
        full.model.a()
    );
}

#[test]
fn topk_fit_equals_full_fit_when_uncensored() {
    let s = synthetic(0.689, 209.28, 500, 108);
    let full = fit_full(&s).unwrap();
    let t = to_topk(&s, 500).unwrap();
    let topk = fit_topk(&t).unwrap();
    assert!(
        ((topk.model.a() - full.model.a()) / full.model.a()).abs() < 1e-4,
        "a: {} vs {}",
        topk.model.a(),
        full.model.a()
    );
    assert!(
        ((topk.model.theta() - full.model.theta()) / full.model.theta()).abs() < 1e-4,
        "theta: {} vs {}",
        topk.model.theta(),
        full.model.theta()
    );
}

#[test]
fn topk_fit_covers_exponential_truth() {
    let s = synthetic(1.0, 150.0, 6000, 109);
    let t = to_topk(&s, 50).unwrap();
    let fit = fit_topk(&t).unwrap();
    let se = fit.se_a();
    assert!(
        (fit.model.a() - 1.0).abs() < 4.0 * se,
        "a = {} (se {se})",
        fit.model.a()
    );
}

#[test]
fn shared_tail_preferred_when_tail_is_common() {
    // Both groups share a = 0.65; the 3-parameter model should win the
    // AIC comparison in at least 80% of replications.
    let m1 = ThresholdModel::new(2100.0, 0.65, 200.0).unwrap();
    let m2 = ThresholdModel::new(2100.0, 0.65, 150.0).unwrap();
    let mut shared_wins = 0usize;
    let reps = 50usize;
    for i in 0..reps {
        let g1 = RatingSample::new("g1", 2100.0, m1.sample(2000, 5000 + i as u64)).unwrap();
        let g2 = RatingSample::new("g2", 2100.0, m2.sample(800, 6000 + i as u64)).unwrap();
        let res = fit_shared_tail(&[g1, g2]).unwrap();
        if res.aic < res.separate_aic {
            shared_wins += 1;
        }
    }
    assert!(
        shared_wins * 5 >= reps * 4,
        "shared model won only {shared_wins}/{reps} AIC comparisons"
    );
}

#[test]
fn shared_tail_rejected_under_misspecification() {
    let m1 = ThresholdModel::new(2100.0, 0.5, 200.0).unwrap();
    let m2 = ThresholdModel::new(2100.0, 1.0, 200.0).unwrap();
    let g1 = RatingSample::new("g1", 2100.0, m1.sample(5000, 11)).unwrap();
    let g2 = RatingSample::new("g2", 2100.0, m2.sample(5000, 12)).unwrap();
    let res = fit_shared_tail(&[g1, g2]).unwrap();
    assert!(
        res.separate_aic < res.aic,
        "separate AIC {} should beat shared AIC {}",
        res.separate_aic,
        res.aic
    );
    assert!(res.separate_bic < res.bic);
}

#[test]
fn aic_bic_definitions() {
    let m = ThresholdModel::new(2100.0, 0.7, 180.0).unwrap();
    let g1 = RatingSample::new("g1", 2100.0, m.sample(300, 21)).unwrap();
    let g2 = RatingSample::new("g2", 2100.0, m.sample(200, 22)).unwrap();
    let res = fit_shared_tail(&[g1, g2]).unwrap();
    let n_total = 500f64;
    assert!((res.aic - (2.0 * 3.0 - 2.0 * res.loglik)).abs() < 1e-9);
    assert!((res.bic - (3.0 * n_total.ln() - 2.0 * res.loglik)).abs() < 1e-9);
    assert!((res.separate_aic - (2.0 * 4.0 - 2.0 * res.separate_loglik)).abs() < 1e-9);
    assert!((res.separate_bic - (4.0 * n_total.ln() - 2.0 * res.separate_loglik)).abs() < 1e-9);
    // Shared model is a restriction: it cannot out-fit the separate fits.
    assert!(res.loglik <= res.separate_loglik + 1e-6);
}

#[test]
fn exponential_data_covered_by_full_fit() {
    let s = synthetic(1.0, 120.0, 14_671, 110);
    let fit = fit_full(&s).unwrap();
    assert!(
        (fit.model.a() - 1.0).abs() < 3.0 * fit.se_a(),
        "a = {} (se {})",
        fit.model.a(),
        fit.se_a()
    );
}
