//! Thermodynamic solvers against scalar closed-form oracles and dual-side
//! finite differences.

mod common;

use common::*;
use orbitpair::thermo::{
    entropy_function, flow_pressure, local_constant, shift_pressure, winding_cycle, xi_of_rho,
    ThermoSummary,
};

#[test]
fn entropy_and_pressure_root_against_bisection_oracle() {
    let model = golden_model();
    let oracle = golden_entropy_oracle();
    let h = flow_pressure(&model, &[0.0]).unwrap();
    assert!((h - oracle).abs() <= 1e-12, "{h} vs {oracle}");
    assert!(shift_pressure(&model, h, &[0.0]).unwrap().abs() <= 1e-10);
}

#[test]
fn winding_cycle_against_stationary_oracle() {
    let model = golden_model();
    let phi0 = winding_cycle(&model).unwrap();
    assert!((phi0[0] - golden_winding_oracle()).abs() <= 1e-10);
}

#[test]
fn pressure_is_convex_with_supporting_line() {
    let model = golden_model();
    let p0 = flow_pressure(&model, &[0.0]).unwrap();
    let phi0 = winding_cycle(&model).unwrap();
    for xi in [-1.5, -0.6, -0.1, 0.2, 0.8, 1.7] {
        let p = flow_pressure(&model, &[xi]).unwrap();
        assert!(
            p >= p0 + phi0[0] * xi - 1e-10,
            "support line fails at xi={xi}"
        );
    }
}

#[test]
fn entropy_hessian_matches_dual_finite_differences() {
    // -hess(entropy) at the winding cycle, from second differences of the
    // entropy function itself, agrees with the inverse pressure Hessian
    let model = golden_model();
    let summary = ThermoSummary::compute(&model).unwrap();
    let rho0 = summary.phi0[0];
    let step = 2e-3;
    let f = |r: f64| entropy_function(&model, &[r]).unwrap();
    let second = |h: f64| (f(rho0 + h) - 2.0 * f(rho0) + f(rho0 - h)) / (h * h);
    let coarse = second(step);
    let fine = second(step / 2.0);
    let dual = -(4.0 * fine - coarse) / 3.0;
    let direct = summary.h_matrix[(0, 0)];
    assert!(
        (dual - direct).abs() <= 1e-4 * direct,
        "dual {dual} vs direct {direct}"
    );
}

#[test]
fn entropy_is_concave_on_sampled_segments() {
    let model = golden_model();
    let phi0 = winding_cycle(&model).unwrap()[0];
    let pts = [
        phi0 - 0.25,
        phi0 - 0.1,
        phi0 + 0.05,
        phi0 + 0.2,
        phi0 + 0.35,
    ];
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            let mid = 0.5 * (a + b);
            let lhs = entropy_function(&model, &[mid]).unwrap();
            let rhs = 0.5
                * (entropy_function(&model, &[a]).unwrap()
                    + entropy_function(&model, &[b]).unwrap());
            assert!(lhs >= rhs - 1e-10, "concavity fails on [{a}, {b}]");
        }
    }
}

#[test]
fn entropy_maximum_has_quadratic_gap() {
    let model = golden_model();
    let summary = ThermoSummary::compute(&model).unwrap();
    let phi0 = summary.phi0[0];
    let h = summary.h;
    let hess = summary.h_matrix[(0, 0)];
    for offset in [-0.08, -0.04, -0.02, 0.02, 0.04, 0.08] {
        let v = entropy_function(&model, &[phi0 + offset]).unwrap();
        assert!(v < h);
        let gap = h - v;
        let quadratic = 0.5 * hess * offset * offset;
        assert!(
            gap >= 0.5 * quadratic,
            "gap {gap} too small at offset {offset}"
        );
    }
}

#[test]
fn quadratic_expansion_has_cubic_remainder() {
    // |entropy(phi0 + rho) - (h - |rho|^2/2)| should scale like |rho|^3:
    // a log-log slope of 3 over a decade of offsets
    let model = golden_model();
    let summary = ThermoSummary::compute(&model).unwrap();
    let phi0 = summary.phi0[0];
    let h = summary.h;
    let hess = summary.h_matrix[(0, 0)];
    let mut points = Vec::new();
    for &norm in &[1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1] {
        // offset with H-norm equal to `norm`
        let rho = norm / hess.sqrt();
        let value = entropy_function(&model, &[phi0 + rho]).unwrap();
        let remainder = (value - (h - norm * norm / 2.0)).abs();
        points.push((norm.ln(), remainder.ln()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        (slope - 3.0).abs() <= 0.3,
        "cubic remainder slope {slope} out of band"
    );
}

#[test]
fn conjugate_direction_vanishes_at_winding_cycle() {
    let model = golden_model();
    let phi0 = winding_cycle(&model).unwrap();
    let xi = xi_of_rho(&model, &phi0).unwrap();
    assert!(xi[0].abs() <= 1e-8);
    let at_peak = entropy_function(&model, &phi0).unwrap();
    let h = flow_pressure(&model, &[0.0]).unwrap();
    assert!((at_peak - h).abs() <= 1e-10);
}

#[test]
fn local_constant_is_continuous_at_the_peak() {
    let model = golden_model();
    let summary = ThermoSummary::compute(&model).unwrap();
    let c0 = local_constant(&model, &summary.phi0).unwrap();
    assert!((c0 - summary.c_phi0).abs() <= 1e-6 * summary.c_phi0);
    let mut prev_diff = f64::INFINITY;
    for offset in [0.08, 0.04, 0.02, 0.01] {
        let c = local_constant(&model, &[summary.phi0[0] + offset]).unwrap();
        let diff = (c - c0).abs();
        assert!(
            diff < prev_diff,
            "differences should shrink with the offset"
        );
        prev_diff = diff;
        // O(offset) continuity with a generous constant
        assert!(
            diff <= 2.0 * offset,
            "offset {offset} gave difference {diff}"
        );
    }
}

#[test]
fn norm_consistency() {
    let model = golden_model();
    let summary = ThermoSummary::compute(&model).unwrap();
    assert_eq!(summary.class_norm_sq(&[0.0]), 0.0);
    for x in [-2.0, -0.5, 0.7, 3.0] {
        let q = summary.class_norm_sq(&[x]);
        assert!(q > 0.0);
        assert!((q - summary.h_matrix[(0, 0)] * x * x).abs() <= 1e-12 * q.max(1.0));
    }
}

#[test]
fn two_dimensional_model_summary_is_consistent() {
    // two vertices, four edges carrying independent windings in Z^2
    let mut rng = TestRng::new(99);
    let model = random_connected_model(&mut rng, 2, 2, 3);
    let summary = ThermoSummary::compute(&model).unwrap();
    // duality: H * pressure_hessian = I
    let prod = summary.h_matrix.matmul(&summary.pressure_hessian);
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((prod[(i, j)] - want).abs() <= 1e-6, "({i},{j})");
        }
    }
    // sigma^(-2k) = det H
    let det = summary.h_matrix.determinant();
    assert!((summary.sigma.powi(-4) - det).abs() <= 1e-6 * det.abs());
    // gradient cross-check is built into winding_cycle; verify it runs
    let phi0 = winding_cycle(&model).unwrap();
    assert_eq!(phi0.len(), 2);
}
