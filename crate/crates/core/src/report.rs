//! Measured-versus-predicted convergence reports.
//!
//! A report walks a grid of cutoff times and, at each time, compares the
//! census counts with their Gaussian predictions: pair counts by class
//! difference (two independent routes plus the pair-count law), window
//! counts by class offset (local-limit law), and box fractions of the
//! rescaled class distribution (central-limit law). Ratios are reported
//! rather than absolute errors because the main terms grow exponentially;
//! log-scale residuals accompany them.

use std::fmt::Write as _;

use crate::asymptotics::{
    gaussian_box_mass, local_limit_prediction, theorem1_prediction, BoxRegion,
};
use crate::census::OrbitTable;
use crate::error::Error;
use crate::model::HomologyClass;
use crate::thermo::ThermoSummary;
use crate::Result;

/// What a report row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    /// Ordered orbit pairs with a fixed class difference.
    Pair,
    /// Window count at a class offset.
    Class,
    /// Empirical box fraction of the rescaled class distribution.
    Clt,
}

impl ReportKind {
    fn as_str(self) -> &'static str {
        match self {
            ReportKind::Pair => "pair",
            ReportKind::Class => "class",
            ReportKind::Clt => "clt",
        }
    }
}

/// One comparison row.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub t: f64,
    pub kind: ReportKind,
    /// Which beta / alpha / box the row is about.
    pub label: String,
    /// Measured value (pair rows: the direct pair count).
    pub measured: f64,
    /// Second measured route where one exists (pair rows: the convolution).
    pub measured_alt: Option<f64>,
    /// The Gaussian-side prediction.
    pub predicted: f64,
    /// measured / predicted where the prediction is positive (0 when the
    /// measurement is 0); NaN on a zero prediction.
    pub ratio: f64,
    /// ln(measured) - ln(predicted), NaN when either side vanishes.
    pub log_residual: f64,
}

/// Metadata identifying what produced a report.
#[derive(Debug, Clone)]
pub struct ReportMeta {
    /// Content hash of the model, or None for ingested tables.
    pub model_hash: Option<u64>,
    /// Truncation radius used by Gaussian lattice sums.
    pub delta: f64,
    /// The thermodynamic constants the predictions used.
    pub summary: ThermoSummary,
}

/// Full convergence report over a time grid.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub t_grid: Vec<f64>,
    pub rows: Vec<ReportRow>,
    pub meta: ReportMeta,
}

fn make_row(
    t: f64,
    kind: ReportKind,
    label: String,
    measured: f64,
    measured_alt: Option<f64>,
    predicted: f64,
) -> ReportRow {
    let ratio = if predicted > 0.0 {
        measured / predicted
    } else {
        f64::NAN
    };
    let log_residual = if measured > 0.0 && predicted > 0.0 {
        measured.ln() - predicted.ln()
    } else {
        f64::NAN
    };
    ReportRow {
        t,
        kind,
        label,
        measured,
        measured_alt,
        predicted,
        ratio,
        log_residual,
    }
}

/// Build the full measured-versus-predicted report.
///
/// For every grid time and every `beta` in `beta_list`: the direct pair
/// count, the convolution pair count, the pair-law prediction and their
/// ratio. For every `alpha` in `alpha_list`: the window count, the
/// local-limit prediction and ratio. For every box in `boxes`: the empirical
/// fraction against the Gaussian box mass. Grid times must lie within the
/// table's enumerated range.
#[allow(clippy::too_many_arguments)]
pub fn convergence_report(
    table: &OrbitTable,
    summary: &ThermoSummary,
    beta_list: &[HomologyClass],
    alpha_list: &[HomologyClass],
    boxes: &[BoxRegion],
    t_grid: &[f64],
    delta: f64,
    model_hash: Option<u64>,
    seed: u64,
) -> Result<CensusReport> {
    if t_grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    for &t in t_grid {
        if !(t > 0.0 && t <= table.t_max()) {
            return Err(Error::Range(format!(
                "grid time {t} outside (0, T_max={}]",
                table.t_max()
            )));
        }
    }
    let mut rows = Vec::new();
    for &t in t_grid {
        for beta in beta_list {
            let direct = table.pair_count_direct(t, beta)? as f64;
            let conv = table.pair_count_convolution(t, beta, &summary.phi0)? as f64;
            let predicted = theorem1_prediction(t, summary);
            rows.push(make_row(
                t,
                ReportKind::Pair,
                format!("beta={beta}"),
                direct,
                Some(conv),
                predicted,
            ));
        }
        for alpha in alpha_list {
            let windowed = table.shifted_count(t, alpha, &summary.phi0)? as f64;
            let predicted = local_limit_prediction(t, alpha, summary);
            rows.push(make_row(
                t,
                ReportKind::Class,
                format!("alpha={alpha}"),
                windowed,
                None,
                predicted,
            ));
        }
        for region in boxes {
            let empirical = table.empirical_clt(t, &summary.phi0, region)?;
            let mass = gaussian_box_mass(region, &summary.h_matrix, seed)?;
            rows.push(make_row(
                t,
                ReportKind::Clt,
                format!("box={}", region.label()),
                empirical,
                None,
                mass,
            ));
        }
    }
    Ok(CensusReport {
        t_grid: t_grid.to_vec(),
        rows,
        meta: ReportMeta {
            model_hash,
            delta,
            summary: summary.clone(),
        },
    })
}

impl CensusReport {
    /// CSV rendering: `#`-prefixed metadata comments, then one row per
    /// comparison with header
    /// `T,kind,label,measured,measured_alt,predicted,ratio,log_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.meta.model_hash {
            Some(hash) => {
                let _ = writeln!(out, "# model_hash={hash:016x}");
            }
            None => {
                let _ = writeln!(out, "# model_hash=none (ingested table)");
            }
        }
        let _ = writeln!(out, "# delta={:.16e}", self.meta.delta);
        let _ = writeln!(out, "# thermo: {}", self.meta.summary.to_record());
        out.push_str("T,kind,label,measured,measured_alt,predicted,ratio,log_residual\n");
        for r in &self.rows {
            let alt = r
                .measured_alt
                .map(|v| format!("{v:.16e}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.16e},{},{},{:.16e},{},{:.16e},{:.16e},{:.16e}",
                r.t,
                r.kind.as_str(),
                r.label,
                r.measured,
                alt,
                r.predicted,
                r.ratio,
                r.log_residual
            );
        }
        out
    }

    /// Rows of one kind, in emission order.
    pub fn rows_of_kind(&self, kind: ReportKind) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{enumerate_prime_orbits, CensusOptions};
    use crate::model::{Edge, MarkovFlowModel};

    const PHI: f64 = 1.618033988749895;

    fn golden_model() -> MarkovFlowModel {
        MarkovFlowModel::new(
            1,
            vec!["v".into()],
            vec![
                Edge {
                    source: 0,
                    target: 0,
                    length: 1.0,
                    weight: HomologyClass::new(vec![1]),
                },
                Edge {
                    source: 0,
                    target: 0,
                    length: PHI,
                    weight: HomologyClass::new(vec![-1]),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn report_smoke_and_symmetry() {
        let model = golden_model();
        let table = enumerate_prime_orbits(&model, 10.0, &CensusOptions::default()).unwrap();
        let summary = ThermoSummary::compute(&model).unwrap();
        let betas = vec![
            HomologyClass::new(vec![0]),
            HomologyClass::new(vec![2]),
            HomologyClass::new(vec![-2]),
        ];
        let alphas = vec![HomologyClass::new(vec![0])];
        let boxes = vec![BoxRegion::cube(1, -1.0, 1.0)];
        let report = convergence_report(
            &table,
            &summary,
            &betas,
            &alphas,
            &boxes,
            &[6.0, 8.0, 10.0],
            2.5,
            Some(model.content_hash()),
            0,
        )
        .unwrap();
        // beta and -beta rows carry identical measurements and ratios
        let pair_rows: Vec<&ReportRow> = report.rows_of_kind(ReportKind::Pair).collect();
        for t_chunk in pair_rows.chunks(3) {
            assert_eq!(t_chunk[1].measured, t_chunk[2].measured);
            assert_eq!(t_chunk[1].ratio, t_chunk[2].ratio);
            // the prediction carries no beta dependence
            assert_eq!(t_chunk[0].predicted, t_chunk[1].predicted);
            // both measurement routes agree exactly
            for row in t_chunk {
                assert_eq!(Some(row.measured), row.measured_alt);
            }
        }
        // ratios are finite and nonnegative wherever predictions are positive
        for row in &report.rows {
            if row.predicted > 0.0 {
                assert!(row.ratio.is_finite() && row.ratio >= 0.0);
            }
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("# model_hash="));
        assert!(csv.contains("# thermo: 1 "));
        assert!(csv.contains("T,kind,label,measured"));
    }

    #[test]
    fn zero_measured_reports_zero_ratio() {
        let model = golden_model();
        let table = enumerate_prime_orbits(&model, 3.0, &CensusOptions::default()).unwrap();
        let summary = ThermoSummary::compute(&model).unwrap();
        // beta far outside the realized range: measured 0, prediction > 0
        let betas = vec![HomologyClass::new(vec![50])];
        let report =
            convergence_report(&table, &summary, &betas, &[], &[], &[3.0], 2.5, None, 0).unwrap();
        let row = &report.rows[0];
        assert_eq!(row.measured, 0.0);
        assert!(row.predicted > 0.0);
        assert_eq!(row.ratio, 0.0);
    }

    #[test]
    fn grid_outside_range_is_rejected() {
        let model = golden_model();
        let table = enumerate_prime_orbits(&model, 3.0, &CensusOptions::default()).unwrap();
        let summary = ThermoSummary::compute(&model).unwrap();
        let err =
            convergence_report(&table, &summary, &[], &[], &[], &[4.0], 2.5, None, 0).unwrap_err();
        assert!(matches!(err, Error::Range(_)));
    }
}
