//! Trend diagnostics on the full golden census: the window-count ratio
//! oscillates with the discrete window jumps, so convergence toward 1 is
//! asserted as a trend (negative drift of the absolute log-residual over
//! the largest decade of cutoffs), never as a pointwise tolerance.

mod common;

use common::*;
use orbitpair::asymptotics::local_limit_prediction;
use orbitpair::census::{enumerate_prime_orbits, CensusOptions};
use orbitpair::model::HomologyClass;
use orbitpair::thermo::ThermoSummary;

#[test]
fn window_ratio_drifts_toward_one() {
    let model = golden_model();
    let summary = ThermoSummary::compute(&model).unwrap();
    let table = enumerate_prime_orbits(&model, 22.0, &CensusOptions::default()).unwrap();
    let alpha = HomologyClass::new(vec![0]);
    let mut points = Vec::new();
    for t in 12..=22u32 {
        let t = t as f64;
        let measured = table.shifted_count(t, &alpha, &summary.phi0).unwrap() as f64;
        let predicted = local_limit_prediction(t, &alpha, &summary);
        let residual = (measured / predicted).ln().abs();
        points.push((t, residual));
    }
    // least-squares drift of |log ratio| over the largest decade
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(slope < 0.0, "log-residual drift {slope} is not toward 1");

    // and the later half sits closer to 1 on average than the earlier half
    let half = points.len() / 2;
    let early: f64 = points[..half].iter().map(|p| p.1).sum::<f64>() / half as f64;
    let late: f64 = points[points.len() - half..]
        .iter()
        .map(|p| p.1)
        .sum::<f64>()
        / half as f64;
    assert!(late < early, "mean |log ratio| rose from {early} to {late}");
}
