//! Thermodynamic quantities of a flow model: pressure, entropy, the winding
//! cycle of the measure of maximal entropy, the entropy Hessian, and the
//! constants entering the Gaussian predictions.
//!
//! Everything is driven by one object, the weighted vertex transfer matrix
//! `M(s, xi)` whose `(u, v)` entry sums `exp(<xi, weight> - s * length)` over
//! the edges from `u` to `v`. The shift pressure is the log of its Perron
//! eigenvalue; the flow pressure `p(xi)` is the unique `s` at which that log
//! vanishes; entropy, winding cycle and Hessians all come from derivatives of
//! `p`, computed analytically (gradient, via the stationary edge measure) or
//! by Richardson-extrapolated central differences (everything beyond).

use std::fmt::Write as _;

use crate::error::Error;
use crate::model::MarkovFlowModel;
use crate::numeric::SquareMatrix;
use crate::Result;

/// Relative tolerance for the Perron eigenvalue solve.
const EIGEN_TOL: f64 = 1e-13;
/// Iteration cap for the eigenvalue solve.
const EIGEN_MAX_ITER: usize = 100_000;
/// Residual bound enforced on the pressure root.
const PRESSURE_RESIDUAL: f64 = 1e-12;
/// Base step for finite differences of the pressure beyond its gradient.
const HESSIAN_STEP: f64 = 1e-4;

/// All thermodynamic constants of one model.
///
/// `h_matrix` is the negated entropy Hessian at the winding cycle, equal to
/// the inverse of `pressure_hessian` by convex duality; `sigma` normalizes
/// its determinant, `det(h_matrix) = sigma^(-2k)`. `c_phi0` is the local
/// counting constant at the winding cycle and `c_pair` the constant of the
/// pair-correlation law.
#[derive(Debug, Clone)]
pub struct ThermoSummary {
    pub h: f64,
    pub phi0: Vec<f64>,
    pub pressure_hessian: SquareMatrix,
    pub h_matrix: SquareMatrix,
    pub sigma: f64,
    pub c_phi0: f64,
    pub c_pair: f64,
}

/// Transfer matrix at shift parameter `s` and cohomology direction `xi`.
fn transfer_matrix(model: &MarkovFlowModel, s: f64, xi: &[f64]) -> SquareMatrix {
    let n = model.vertex_count();
    let mut m = SquareMatrix::zeros(n);
    for e in model.edges() {
        let dot: f64 = xi
            .iter()
            .zip(e.weight.coords())
            .map(|(x, &w)| x * w as f64)
            .sum();
        m[(e.source, e.target)] += (dot - s * e.length).exp();
    }
    m
}

/// Perron eigenvalue and positive right eigenvector of a nonnegative
/// irreducible matrix, by power iteration on the diagonally shifted matrix
/// with two-sided eigenvalue bounds from the iterate ratios.
fn leading_eigen(m: &SquareMatrix) -> Result<(f64, Vec<f64>)> {
    let n = m.dim();
    let shift = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)]).sum::<f64>())
        .fold(0.0f64, f64::max);
    if !shift.is_finite() {
        return Err(Error::Numeric("transfer matrix entries overflowed".into()));
    }
    if shift == 0.0 {
        return Err(Error::Numeric("transfer matrix underflowed to zero".into()));
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut low = 0.0;
    let mut high = f64::INFINITY;
    for iter in 0..EIGEN_MAX_ITER {
        let mut y = m.matvec(&x);
        for (yi, xi) in y.iter_mut().zip(x.iter()) {
            *yi += shift * xi;
        }
        let mut rmin = f64::INFINITY;
        let mut rmax = 0.0f64;
        for (yi, xi) in y.iter().zip(x.iter()) {
            if *xi <= 0.0 {
                return Err(Error::Numeric(
                    "power iteration lost positivity (reducible matrix?)".into(),
                ));
            }
            let r = yi / xi;
            rmin = rmin.min(r);
            rmax = rmax.max(r);
        }
        low = rmin - shift;
        high = rmax - shift;
        let total: f64 = y.iter().sum();
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            *xi = yi / total;
        }
        let scale = rmax.max(1e-300);
        if (rmax - rmin) <= EIGEN_TOL * scale {
            return Ok((0.5 * (low + high), x));
        }
        if iter == EIGEN_MAX_ITER - 1 {
            break;
        }
    }
    Err(Error::Numeric(format!(
        "eigenvalue iteration did not converge: bounds [{low}, {high}] after {EIGEN_MAX_ITER} \
         iterations"
    )))
}

/// Log of the Perron eigenvalue of the transfer matrix: the pressure of the
/// underlying shift at parameters (s, xi). Strictly decreasing in `s`.
pub fn shift_pressure(model: &MarkovFlowModel, s: f64, xi: &[f64]) -> Result<f64> {
    check_xi(model, xi)?;
    model.require_connected()?;
    let m = transfer_matrix(model, s, xi);
    // off-scale arguments saturate cleanly so root bracketing can probe wide
    let max_entry = m.data().iter().cloned().fold(0.0f64, f64::max);
    if !max_entry.is_finite() {
        return Ok(f64::INFINITY);
    }
    if max_entry == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let (lambda, _) = leading_eigen(&m)?;
    Ok(lambda.ln())
}

fn check_xi(model: &MarkovFlowModel, xi: &[f64]) -> Result<()> {
    if xi.len() != model.betti_number() {
        return Err(Error::Domain(format!(
            "direction has dimension {}, model has k={}",
            xi.len(),
            model.betti_number()
        )));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("direction has non-finite entries".into()));
    }
    Ok(())
}

/// Stationary edge occupation measure at parameters (s, xi): the normalized
/// products u(source) * entry * v(target) over edges, where u and v are the
/// left and right Perron eigenvectors. Returns (eigenvalue, per-edge mass).
fn edge_occupation(model: &MarkovFlowModel, s: f64, xi: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = transfer_matrix(model, s, xi);
    let (lambda, right) = leading_eigen(&m)?;
    let (_, left) = leading_eigen(&m.transpose())?;
    let mut mass: Vec<f64> = model
        .edges()
        .iter()
        .map(|e| {
            let dot: f64 = xi
                .iter()
                .zip(e.weight.coords())
                .map(|(x, &w)| x * w as f64)
                .sum();
            left[e.source] * (dot - s * e.length).exp() * right[e.target]
        })
        .collect();
    let total: f64 = mass.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numeric(
            "degenerate stationary measure (reducible transfer matrix?)".into(),
        ));
    }
    for q in &mut mass {
        *q /= total;
    }
    Ok((lambda, mass))
}

/// The flow pressure p(xi): the unique root in `s` of the shift pressure.
/// Bracketed bisection followed by a Newton polish with the analytic
/// derivative; the returned root satisfies |shift_pressure| <= 1e-12.
pub fn flow_pressure(model: &MarkovFlowModel, xi: &[f64]) -> Result<f64> {
    check_xi(model, xi)?;
    model.require_connected()?;
    let f = |s: f64| shift_pressure(model, s, xi);

    let mut lo = -1.0;
    let mut hi = 1.0;
    let mut expansions = 0;
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Numeric(
                "pressure root bracket failed expanding upward".into(),
            ));
        }
    }
    while f(lo)? < 0.0 {
        hi = lo;
        lo *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Numeric(
                "pressure root bracket failed expanding downward".into(),
            ));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-8 * (1.0 + mid.abs()) {
            break;
        }
    }

    let mut s = 0.5 * (lo + hi);
    for _ in 0..20 {
        let (lambda, mass) = edge_occupation(model, s, xi)?;
        let value = lambda.ln();
        if value.abs() <= 1e-15 {
            break;
        }
        let mean_length: f64 = model
            .edges()
            .iter()
            .zip(mass.iter())
            .map(|(e, q)| q * e.length)
            .sum();
        // d/ds log lambda = -mean edge length under the occupation measure
        s += value / mean_length;
    }
    let residual = f(s)?.abs();
    if residual > PRESSURE_RESIDUAL {
        return Err(Error::Numeric(format!(
            "pressure root polish stalled with residual {residual}"
        )));
    }
    Ok(s)
}

/// Analytic gradient of the flow pressure: the mean winding per unit time of
/// the stationary edge measure at (p(xi), xi).
pub fn pressure_gradient(model: &MarkovFlowModel, xi: &[f64]) -> Result<Vec<f64>> {
    let s = flow_pressure(model, xi)?;
    let (_, mass) = edge_occupation(model, s, xi)?;
    let k = model.betti_number();
    let mut mean_weight = vec![0.0; k];
    let mut mean_length = 0.0;
    for (e, q) in model.edges().iter().zip(mass.iter()) {
        mean_length += q * e.length;
        for (acc, &w) in mean_weight.iter_mut().zip(e.weight.coords()) {
            *acc += q * w as f64;
        }
    }
    Ok(mean_weight.iter().map(|w| w / mean_length).collect())
}

/// The winding cycle of the measure of maximal entropy: the gradient of the
/// pressure at xi = 0, computed analytically and cross-checked against
/// central finite differences of the pressure (step 1e-5, agreement 1e-6).
pub fn winding_cycle(model: &MarkovFlowModel) -> Result<Vec<f64>> {
    let k = model.betti_number();
    let analytic = pressure_gradient(model, &vec![0.0; k])?;
    let step = 1e-5;
    for i in 0..k {
        let mut plus = vec![0.0; k];
        plus[i] = step;
        let mut minus = vec![0.0; k];
        minus[i] = -step;
        let fd = (flow_pressure(model, &plus)? - flow_pressure(model, &minus)?) / (2.0 * step);
        if (fd - analytic[i]).abs() > 1e-6 {
            return Err(Error::Numeric(format!(
                "winding cycle cross-check failed in coordinate {i}: analytic {} vs finite \
                 difference {fd}",
                analytic[i]
            )));
        }
    }
    Ok(analytic)
}

/// Hessian of the flow pressure at the origin, by central second differences
/// (step 1e-4), Richardson-extrapolated once and symmetrized. Fails loudly
/// when a homology direction carries no variance.
pub fn pressure_hessian(model: &MarkovFlowModel) -> Result<SquareMatrix> {
    let k = model.betti_number();
    pressure_hessian_at(model, &vec![0.0; k])
}

/// Same second-difference scheme centred at an arbitrary direction.
fn pressure_hessian_at(model: &MarkovFlowModel, xi: &[f64]) -> Result<SquareMatrix> {
    let k = model.betti_number();
    let p = |v: &[f64]| flow_pressure(model, v);
    let center = p(xi)?;
    let second = |step: f64| -> Result<SquareMatrix> {
        let mut m = SquareMatrix::zeros(k);
        let offset = |signs: &[(usize, f64)]| -> Vec<f64> {
            let mut v = xi.to_vec();
            for &(idx, mult) in signs {
                v[idx] += mult * step;
            }
            v
        };
        for i in 0..k {
            let plus = p(&offset(&[(i, 1.0)]))?;
            let minus = p(&offset(&[(i, -1.0)]))?;
            m[(i, i)] = (plus - 2.0 * center + minus) / (step * step);
        }
        for i in 0..k {
            for j in i + 1..k {
                let pp = p(&offset(&[(i, 1.0), (j, 1.0)]))?;
                let pm = p(&offset(&[(i, 1.0), (j, -1.0)]))?;
                let mp = p(&offset(&[(i, -1.0), (j, 1.0)]))?;
                let mm = p(&offset(&[(i, -1.0), (j, -1.0)]))?;
                let v = (pp - pm - mp + mm) / (4.0 * step * step);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    };
    let coarse = second(HESSIAN_STEP)?;
    let fine = second(HESSIAN_STEP / 2.0)?;
    let mut out = SquareMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = (4.0 * fine[(i, j)] - coarse[(i, j)]) / 3.0;
        }
    }
    let out = out.symmetrize();
    let min_eig = out
        .symmetric_eigenvalues()
        .first()
        .copied()
        .unwrap_or(f64::NAN);
    if min_eig.is_nan() || min_eig <= 1e-10 {
        return Err(Error::Domain(format!(
            "homology direction carries no variance: smallest pressure-Hessian eigenvalue \
             {min_eig}"
        )));
    }
    Ok(out)
}

/// Invert the pressure gradient: find xi with grad p(xi) = rho, by damped
/// Newton iteration from the origin with a finite-difference Jacobian.
pub fn xi_of_rho(model: &MarkovFlowModel, rho: &[f64]) -> Result<Vec<f64>> {
    check_xi(model, rho)?;
    let k = model.betti_number();
    let mut xi = vec![0.0; k];
    let residual = |xi: &[f64]| -> Result<Vec<f64>> {
        let g = pressure_gradient(model, xi)?;
        Ok(g.iter().zip(rho).map(|(a, b)| a - b).collect())
    };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut r = residual(&xi)?;
    for _ in 0..60 {
        if norm(&r) <= 1e-10 {
            return Ok(xi);
        }
        // central-difference Jacobian of the gradient map
        let step = HESSIAN_STEP;
        let mut jac = SquareMatrix::zeros(k);
        for j in 0..k {
            let mut plus = xi.clone();
            plus[j] += step;
            let mut minus = xi.clone();
            minus[j] -= step;
            let gp = pressure_gradient(model, &plus)?;
            let gm = pressure_gradient(model, &minus)?;
            for i in 0..k {
                jac[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        // toward the boundary of the realized hull the pressure flattens and
        // its Hessian degenerates, so a singular Jacobian marks a target
        // outside the interior rather than a solver fault
        let direction = jac
            .inverse()
            .map_err(|_| {
                Error::Domain(
                    "target winding is outside the interior of the realized hull (conjugate \
                     Hessian degenerated)"
                        .into(),
                )
            })?
            .matvec(&r);
        // damped step: halve until the residual norm decreases
        let mut t = 1.0;
        loop {
            let candidate: Vec<f64> = xi
                .iter()
                .zip(direction.iter())
                .map(|(x, d)| x - t * d)
                .collect();
            if candidate.iter().any(|x| x.abs() > 1e3) {
                return Err(Error::Domain(
                    "target winding is outside the interior of the realized hull (conjugate \
                     direction diverged)"
                        .into(),
                ));
            }
            let cr = residual(&candidate)?;
            if norm(&cr) < norm(&r) {
                xi = candidate;
                r = cr;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return Err(Error::Numeric(
                    "conjugate-direction Newton stalled: damping exhausted".into(),
                ));
            }
        }
    }
    Err(Error::Numeric(
        "conjugate-direction Newton did not reach tolerance".into(),
    ))
}

/// The entropy function: largest entropy among invariant measures with mean
/// winding `rho`, evaluated through convex duality with the pressure.
pub fn entropy_function(model: &MarkovFlowModel, rho: &[f64]) -> Result<f64> {
    let xi = xi_of_rho(model, rho)?;
    let p = flow_pressure(model, &xi)?;
    let dot: f64 = xi.iter().zip(rho).map(|(a, b)| a * b).sum();
    Ok(p - dot)
}

/// The local counting constant C(rho): square root of the absolute
/// determinant of the entropy Hessian over (2 pi)^(k/2) times the entropy.
/// The entropy Hessian is negative definite, so its determinant enters
/// through the positive determinant of its negation.
pub fn local_constant(model: &MarkovFlowModel, rho: &[f64]) -> Result<f64> {
    let k = model.betti_number();
    let xi = xi_of_rho(model, rho)?;
    let entropy = {
        let p = flow_pressure(model, &xi)?;
        let dot: f64 = xi.iter().zip(rho).map(|(a, b)| a * b).sum();
        p - dot
    };
    // |det hess(entropy at rho)| = 1 / det(pressure hessian at xi) by duality
    let pressure_hess = pressure_hessian_at(model, &xi)?;
    let det = pressure_hess.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::Numeric(format!(
            "pressure Hessian determinant {det} is not positive"
        )));
    }
    Ok(det.powf(-0.5) / ((2.0 * std::f64::consts::PI).powf(k as f64 / 2.0) * entropy))
}

/// The pair-correlation constant, composed from the local constant:
/// C(phi0)^2 pi^(k/2) sigma^k.
pub fn pair_constant(summary: &ThermoSummary) -> f64 {
    let k = summary.k() as f64;
    summary.c_phi0 * summary.c_phi0 * std::f64::consts::PI.powf(k / 2.0) * summary.sigma.powf(k)
}

/// The same constant in closed form: 1 / (2^k pi^(k/2) sigma^k h^2).
pub fn pair_constant_closed_form(k: usize, h: f64, sigma: f64) -> f64 {
    1.0 / (2.0f64.powi(k as i32)
        * std::f64::consts::PI.powf(k as f64 / 2.0)
        * sigma.powi(k as i32)
        * h
        * h)
}

impl ThermoSummary {
    /// Betti number the summary was computed for.
    pub fn k(&self) -> usize {
        self.phi0.len()
    }

    /// Squared norm induced by the entropy Hessian: <x, H x>. This is the
    /// norm in every Gaussian formula downstream.
    pub fn class_norm_sq(&self, x: &[f64]) -> f64 {
        self.h_matrix.quadratic_form(x)
    }

    /// Compute every thermodynamic quantity of a model.
    pub fn compute(model: &MarkovFlowModel) -> Result<Self> {
        model.require_connected()?;
        let k = model.betti_number();
        let h = flow_pressure(model, &vec![0.0; k])?;
        if h.is_nan() || h <= 0.0 {
            return Err(Error::Numeric(format!(
                "model has non-positive entropy {h}; orbit growth is subexponential"
            )));
        }
        let phi0 = winding_cycle(model)?;
        let pressure_hessian = self::pressure_hessian(model)?;
        let h_matrix = pressure_hessian.inverse()?;
        let det = h_matrix.determinant();
        if det.is_nan() || det <= 0.0 {
            return Err(Error::Numeric(format!(
                "entropy Hessian determinant {det} is not positive"
            )));
        }
        let sigma = det.powf(-1.0 / (2.0 * k as f64));
        let c_phi0 =
            1.0 / ((2.0 * std::f64::consts::PI).powf(k as f64 / 2.0) * sigma.powi(k as i32) * h);
        // cross-check the closed form against the duality route through the
        // conjugate direction at phi0
        let dual = local_constant(model, &phi0)?;
        if (dual - c_phi0).abs() > 1e-6 * c_phi0 {
            return Err(Error::Numeric(format!(
                "local constant disagreement: closed form {c_phi0} vs duality route {dual}"
            )));
        }
        let mut summary = ThermoSummary {
            h,
            phi0,
            pressure_hessian,
            h_matrix,
            sigma,
            c_phi0,
            c_pair: 0.0,
        };
        let composed = pair_constant(&summary);
        let closed = pair_constant_closed_form(k, h, sigma);
        if (composed - closed).abs() > 1e-12 * closed {
            return Err(Error::Numeric(format!(
                "pair constant disagreement: composition {composed} vs closed form {closed}"
            )));
        }
        summary.c_pair = closed;
        Ok(summary)
    }

    /// Build a synthetic summary from bare constants (isotropic entropy
    /// Hessian sigma^(-2) I). Used to analyze ingested orbit tables and to
    /// plug in surface constants where h, k and the local constant are known.
    pub fn from_constants(k: usize, h: f64, sigma: f64, phi0: Vec<f64>) -> Result<Self> {
        if k == 0 || phi0.len() != k {
            return Err(Error::Domain(format!(
                "winding cycle must have dimension k={k}"
            )));
        }
        if !(h > 0.0 && h.is_finite() && sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "entropy and sigma must be positive and finite, got h={h}, sigma={sigma}"
            )));
        }
        let c_phi0 =
            1.0 / ((2.0 * std::f64::consts::PI).powf(k as f64 / 2.0) * sigma.powi(k as i32) * h);
        let mut summary = ThermoSummary {
            h,
            phi0,
            pressure_hessian: SquareMatrix::scaled_identity(k, sigma * sigma),
            h_matrix: SquareMatrix::scaled_identity(k, 1.0 / (sigma * sigma)),
            sigma,
            c_phi0,
            c_pair: 0.0,
        };
        summary.c_pair = pair_constant(&summary);
        Ok(summary)
    }

    /// Sigma implied by a known local constant via
    /// C(phi0) = ((2 pi)^(k/2) sigma^k h)^(-1).
    pub fn sigma_from_local_constant(k: usize, h: f64, c_phi0: f64) -> f64 {
        (1.0 / ((2.0 * std::f64::consts::PI).powf(k as f64 / 2.0) * c_phi0 * h))
            .powf(1.0 / k as f64)
    }

    /// Machine-readable single-line record. Field order:
    /// `k h sigma c_phi0 c_pair phi0[k] pressure_hessian[k*k] h_matrix[k*k]`,
    /// floats with 17 significant digits, matrices row-major.
    pub fn to_record(&self) -> String {
        let k = self.k();
        let mut out = String::new();
        let _ = write!(
            out,
            "{k} {:.16e} {:.16e} {:.16e} {:.16e}",
            self.h, self.sigma, self.c_phi0, self.c_pair
        );
        for v in &self.phi0 {
            let _ = write!(out, " {v:.16e}");
        }
        for m in [&self.pressure_hessian, &self.h_matrix] {
            for i in 0..k {
                for j in 0..k {
                    let _ = write!(out, " {:.16e}", m[(i, j)]);
                }
            }
        }
        out
    }

    /// Parse the record format written by [`Self::to_record`].
    pub fn from_record(text: &str) -> Result<Self> {
        let mut fields = text.split_whitespace();
        let k: usize = fields
            .next()
            .ok_or_else(|| Error::Ingest {
                line: 1,
                message: "empty summary record".into(),
            })?
            .parse()
            .map_err(|_| Error::Ingest {
                line: 1,
                message: "first field of a summary record must be the integer k".into(),
            })?;
        let rest: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Ingest {
                    line: 1,
                    message: format!("unparsable summary field {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        let expected = 4 + k + 2 * k * k;
        if rest.len() != expected {
            return Err(Error::Ingest {
                line: 1,
                message: format!(
                    "summary record for k={k} needs {expected} numeric fields, got {}",
                    rest.len()
                ),
            });
        }
        let (h, sigma, c_phi0, c_pair) = (rest[0], rest[1], rest[2], rest[3]);
        let phi0 = rest[4..4 + k].to_vec();
        let read_matrix = |offset: usize| {
            let mut m = SquareMatrix::zeros(k);
            for i in 0..k {
                for j in 0..k {
                    m[(i, j)] = rest[offset + i * k + j];
                }
            }
            m
        };
        let pressure_hessian = read_matrix(4 + k);
        let h_matrix = read_matrix(4 + k + k * k);
        if !(h > 0.0 && sigma > 0.0 && c_phi0 > 0.0 && c_pair > 0.0) {
            return Err(Error::Ingest {
                line: 1,
                message: "summary constants must be positive".into(),
            });
        }
        Ok(ThermoSummary {
            h,
            phi0,
            pressure_hessian,
            h_matrix,
            sigma,
            c_phi0,
            c_pair,
        })
    }

    /// Human-readable multi-line rendering.
    pub fn to_display(&self) -> String {
        let k = self.k();
        let mut out = String::new();
        let _ = writeln!(out, "entropy h         = {:.12}", self.h);
        let _ = writeln!(
            out,
            "winding cycle     = ({})",
            self.phi0
                .iter()
                .map(|v| format!("{v:.12}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        for (name, m) in [
            ("pressure Hessian", &self.pressure_hessian),
            ("entropy Hessian H", &self.h_matrix),
        ] {
            for i in 0..k {
                let row = (0..k)
                    .map(|j| format!("{:.12}", m[(i, j)]))
                    .collect::<Vec<_>>()
                    .join(", ");
                if i == 0 {
                    let _ = writeln!(out, "{name:<17} = [{row}]");
                } else {
                    let _ = writeln!(out, "{:<17}   [{row}]", "");
                }
            }
        }
        let _ = writeln!(out, "sigma             = {:.12}", self.sigma);
        let _ = writeln!(out, "C(phi0)           = {:.12}", self.c_phi0);
        let _ = writeln!(out, "pair constant     = {:.12}", self.c_pair);
        out
    }
}
