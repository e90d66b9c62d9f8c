//! Gaussian-side quantities: the local-limit weight and prediction for
//! window counts, lattice Gaussian pair sums, ellipsoid tails, box masses,
//! and the pair-count prediction itself.
//!
//! Throughout, the norm on homology is the one induced by the entropy
//! Hessian H: `|x|^2 = <x, H x>`. The limiting Gaussian of the rescaled
//! class distribution has density
//! `(2 pi)^(-k/2) sigma^(-k) exp(-|x|^2 / 2)` with `sigma^(-2k) = det H`,
//! that is, a centred normal with covariance H^(-1).

use crate::error::Error;
use crate::model::HomologyClass;
use crate::numeric::{
    adaptive_simpson, chi_square_quantile, chi_square_tail, std_normal_quantile, HaltonSequence,
    SquareMatrix,
};
use crate::thermo::ThermoSummary;
use crate::Result;

/// Cap on lattice points enumerated by [`gaussian_pair_sum`].
const LATTICE_BUDGET: u64 = 100_000_000;

/// An axis-aligned box in R^k with closed (possibly infinite) bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxRegion {
    /// A box from per-axis closed bounds. Bounds may be infinite; a lower
    /// bound above its upper bound makes the box empty.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Domain(
                "box needs matching nonempty lower and upper bound vectors".into(),
            ));
        }
        if lower.iter().chain(upper.iter()).any(|x| x.is_nan()) {
            return Err(Error::Domain("box bounds must not be NaN".into()));
        }
        Ok(BoxRegion { lower, upper })
    }

    /// The cube [lo, hi]^k.
    pub fn cube(k: usize, lo: f64, hi: f64) -> Self {
        BoxRegion {
            lower: vec![lo; k],
            upper: vec![hi; k],
        }
    }

    /// All of R^k.
    pub fn everything(k: usize) -> Self {
        Self::cube(k, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn is_empty(&self) -> bool {
        self.lower
            .iter()
            .zip(self.upper.iter())
            .any(|(lo, hi)| lo > hi)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Compact text form `[lo,hi]x[lo,hi]...` used in report labels.
    pub fn label(&self) -> String {
        self.lower
            .iter()
            .zip(self.upper.iter())
            .map(|(lo, hi)| format!("[{lo},{hi}]"))
            .collect::<Vec<_>>()
            .join("x")
    }

    /// Parse the per-axis form `lo:hi,lo:hi,...` (inf/-inf accepted).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for part in text.split(',') {
            let (lo, hi) = part.split_once(':').ok_or_else(|| {
                Error::Domain(format!("box axis {part:?} is not of the form lo:hi"))
            })?;
            let parse = |s: &str| -> Result<f64> {
                match s.trim() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => other
                        .parse()
                        .map_err(|_| Error::Domain(format!("unparsable box bound {other:?}"))),
                }
            };
            lower.push(parse(lo)?);
            upper.push(parse(hi)?);
        }
        BoxRegion::new(lower, upper)
    }
}

/// The Gaussian lattice weight `e_T(alpha) = exp(-|alpha|^2 / 2T)` in the
/// H-norm. Always in (0, 1]; symmetric under negation.
pub fn gaussian_weight(t: f64, alpha: &HomologyClass, h_matrix: &SquareMatrix) -> f64 {
    assert!(t > 0.0, "time must be positive");
    let x = alpha.to_f64();
    (-h_matrix.quadratic_form(&x) / (2.0 * t)).exp()
}

/// Predicted window count at time `t` for window offset `alpha`:
/// `e^(hT)/(hT) * e_T(alpha) / ((2 pi)^(k/2) sigma^k T^(k/2))`.
pub fn local_limit_prediction(t: f64, alpha: &HomologyClass, summary: &ThermoSummary) -> f64 {
    assert!(t > 0.0, "time must be positive");
    let k = summary.k() as f64;
    let lead = (summary.h * t).exp() / (summary.h * t);
    let gauss = gaussian_weight(t, alpha, &summary.h_matrix)
        / ((2.0 * std::f64::consts::PI).powf(k / 2.0) * summary.sigma.powf(k) * t.powf(k / 2.0));
    lead * gauss
}

/// Sum of `e_T(alpha) e_T(alpha + beta)` over lattice points with
/// `|alpha| <= Delta sqrt(T)` in the H-norm. After division by `T^(k/2)`
/// this converges (T large, Delta large) to `pi^(k/2) sigma^k`.
pub fn gaussian_pair_sum(
    t: f64,
    beta: &HomologyClass,
    delta: f64,
    h_matrix: &SquareMatrix,
) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!(
            "Delta must be positive, got {delta}"
        )));
    }
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let k = h_matrix.dim();
    if beta.dim() != k {
        return Err(Error::Domain(format!(
            "beta has dimension {}, H is {k}x{k}",
            beta.dim()
        )));
    }
    let radius_sq = delta * delta * t;
    // bounding box of the ellipsoid <x, Hx> <= r^2: |x_i| <= r sqrt((H^-1)_ii)
    let inv = h_matrix.inverse()?;
    let mut half_widths = Vec::with_capacity(k);
    let mut points: u64 = 1;
    for i in 0..k {
        let w = (radius_sq * inv[(i, i)]).sqrt().floor() as i64 + 1;
        points = points.saturating_mul((2 * w + 1) as u64);
        half_widths.push(w);
    }
    if points > LATTICE_BUDGET {
        return Err(Error::Resource(format!(
            "lattice ball enumeration would visit {points} points (cap {LATTICE_BUDGET})"
        )));
    }
    let beta_f = beta.to_f64();
    let mut alpha = half_widths.iter().map(|w| -w).collect::<Vec<i64>>();
    let mut sum = 0.0;
    'outer: loop {
        let x: Vec<f64> = alpha.iter().map(|&a| a as f64).collect();
        let q = h_matrix.quadratic_form(&x);
        if q <= radius_sq {
            let shifted: Vec<f64> = x.iter().zip(beta_f.iter()).map(|(a, b)| a + b).collect();
            let q2 = h_matrix.quadratic_form(&shifted);
            sum += (-(q + q2) / (2.0 * t)).exp();
        }
        // odometer over the bounding box
        for i in (0..k).rev() {
            alpha[i] += 1;
            if alpha[i] <= half_widths[i] {
                continue 'outer;
            }
            alpha[i] = -half_widths[i];
        }
        break;
    }
    Ok(sum)
}

/// Mass outside the radius-`Delta` ellipsoid under the limiting Gaussian:
/// `(2 pi)^(-k/2) sigma^(-k) * integral over |x| > Delta of e^(-|x|^2/2)`.
/// In the H-norm this is exactly the chi-square upper tail with k degrees
/// of freedom at `Delta^2`, independent of H.
pub fn gaussian_tail(delta: f64, k: usize) -> Result<f64> {
    if delta < 0.0 {
        return Err(Error::Domain(format!(
            "Delta must be nonnegative, got {delta}"
        )));
    }
    Ok(chi_square_tail(k, delta * delta))
}

/// Smallest Delta whose Gaussian tail is below `epsilon`; used as the
/// default truncation radius (reported in census metadata).
pub fn default_delta(k: usize, epsilon: f64) -> f64 {
    chi_square_quantile(k, 1.0 - epsilon).sqrt()
}

/// The pair-count prediction `c_pair * e^(2hT) / T^(2 + k/2)`. Carries no
/// dependence on the class difference.
pub fn theorem1_prediction(t: f64, summary: &ThermoSummary) -> f64 {
    assert!(t > 0.0, "time must be positive");
    let k = summary.k() as f64;
    summary.c_pair * (2.0 * summary.h * t).exp() / t.powf(2.0 + k / 2.0)
}

/// Gaussian mass of an axis-aligned box under the centred normal with
/// covariance H^(-1).
///
/// Dimensions up to three integrate by nested adaptive Simpson quadrature to
/// about 1e-8; higher dimensions fall back to seeded quasi-Monte Carlo
/// (Halton points mapped through the normal quantile), good to about 1e-4.
pub fn gaussian_box_mass(region: &BoxRegion, h_matrix: &SquareMatrix, seed: u64) -> Result<f64> {
    let k = h_matrix.dim();
    if region.dim() != k {
        return Err(Error::Domain(format!(
            "box has dimension {}, H is {k}x{k}",
            region.dim()
        )));
    }
    if region.is_empty() {
        return Ok(0.0);
    }
    if k <= 3 {
        gaussian_box_mass_quadrature(region, h_matrix)
    } else {
        gaussian_box_mass_qmc(region, h_matrix, seed)
    }
}

fn gaussian_box_mass_quadrature(region: &BoxRegion, h_matrix: &SquareMatrix) -> Result<f64> {
    let k = h_matrix.dim();
    let det = h_matrix.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::Numeric(format!(
            "H determinant {det} is not positive"
        )));
    }
    let norm_const = det.sqrt() / (2.0 * std::f64::consts::PI).powf(k as f64 / 2.0);
    let inv = h_matrix.inverse()?;
    // clip infinite bounds at 10 marginal standard deviations
    let clip: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let std = inv[(i, i)].sqrt();
            let lo = region.lower()[i].max(-10.0 * std);
            let hi = region.upper()[i].min(10.0 * std);
            (lo, hi)
        })
        .collect();
    if clip.iter().any(|(lo, hi)| lo >= hi) {
        // box entirely in the far tail (or clipped away)
        return Ok(0.0);
    }
    let tol = 1e-9;
    fn nest(
        h_matrix: &SquareMatrix,
        clip: &[(f64, f64)],
        x: &mut Vec<f64>,
        level: usize,
        tol: f64,
    ) -> f64 {
        let (lo, hi) = clip[level];
        if level + 1 == clip.len() {
            adaptive_simpson(
                |v| {
                    x.push(v);
                    let q = h_matrix.quadratic_form(x);
                    x.pop();
                    (-0.5 * q).exp()
                },
                lo,
                hi,
                tol,
            )
        } else {
            adaptive_simpson(
                |v| {
                    x.push(v);
                    let inner = nest(h_matrix, clip, x, level + 1, tol / 4.0);
                    x.pop();
                    inner
                },
                lo,
                hi,
                tol,
            )
        }
    }
    let mut x = Vec::with_capacity(k);
    let integral = nest(h_matrix, &clip, &mut x, 0, tol);
    Ok((norm_const * integral).clamp(0.0, 1.0))
}

fn gaussian_box_mass_qmc(region: &BoxRegion, h_matrix: &SquareMatrix, seed: u64) -> Result<f64> {
    let k = h_matrix.dim();
    // samples of N(0, H^-1): x = L^(-T) y with H = L L^T and y standard normal
    let chol = h_matrix.cholesky()?;
    let mut halton = HaltonSequence::new(k, seed);
    let samples = 400_000usize;
    let mut inside = 0u64;
    for _ in 0..samples {
        let u = halton.next_point();
        let y: Vec<f64> = u.into_iter().map(std_normal_quantile).collect();
        let x = chol.solve_upper_from_lower_transpose(&y);
        if region.contains(&x) {
            inside += 1;
        }
    }
    Ok(inside as f64 / samples as f64)
}
