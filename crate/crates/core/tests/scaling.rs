//! Exponents, admissibility and the scaling drivers.

use std::f64::consts::PI;

use fhw_core::grid::{BoxGrid, GridFunction};
use fhw_core::scaling::{
    beta_identity_check, decay_fit, homogeneous_data, self_similarity_check, symmetry_check, validate_params,
    write_verdicts, Parity, SelfSimilarityConfig, SignedPermutation, Verdict,
};
use fhw_core::solver::{MildSolver, ModelParams, TimeGrid};
use fhw_core::FhwError;

#[test]
fn domain_errors() {
    assert!(matches!(validate_params(0, 1.5, 3.0, 3.0, 3.0, 0.0), Err(FhwError::Domain(_))));
    assert!(matches!(validate_params(2, 2.0, 3.0, 3.0, 3.0, 0.0), Err(FhwError::Domain(_))));
    assert!(matches!(validate_params(2, 1.5, 1.0, 3.0, 3.0, 0.0), Err(FhwError::Domain(_))));
    assert!(matches!(validate_params(2, 1.5, 3.0, 3.0, 3.0, 2.0), Err(FhwError::Domain(_))));
    assert!(matches!(validate_params(2, 1.5, 3.0, -1.0, 3.0, 0.0), Err(FhwError::Domain(_))));
}

#[test]
fn beta_integrals_finite_when_admissible() {
    let a = validate_params(2, 1.5, 3.0, 3.0, 3.2, 0.0).unwrap();
    assert!(a.admissible, "{:?}", a.failures());
    let b = beta_identity_check(&a.exponents, 1.5, 3.0).unwrap();
    assert!(b.pass);
    assert!(b.betas.unwrap().iter().all(|v| v.is_finite() && *v > 0.0));
    let heat = validate_params(2, 1.0, 3.0, 3.0, 3.0, 0.0).unwrap();
    let b = beta_identity_check(&heat.exponents, 1.0, 3.0).unwrap();
    assert!(b.pass && b.betas.is_none());
}

#[test]
fn reflection_is_an_involution() {
    let g = BoxGrid::new(vec![16, 16, 8], 1.0).unwrap();
    let u = GridFunction::from_fn(g, |x| x[0] + 2.0 * x[1] * x[1] - x[2]).unwrap();
    for m in [SignedPermutation::reflection(3, 0), SignedPermutation::reflection(3, 2), SignedPermutation::swap(3, 0, 1)] {
        let twice = m.compose(&m.compose(&u).unwrap()).unwrap();
        assert_eq!(twice.values(), u.values());
    }
    assert!(SignedPermutation::swap(3, 0, 2).compose(&u).is_err());
}

#[test]
fn odd_data_stays_odd() {
    let g = BoxGrid::cube(1, 64, 2.0).unwrap();
    let u0 = GridFunction::from_fn(g.clone(), |x| (PI * x[0] / 2.0).sin() + 0.3 * (PI * x[0]).sin()).unwrap();
    let solver = MildSolver::new(ModelParams::new(1.25, 3.0, -1).unwrap(), g, TimeGrid::new(1.0, 16).unwrap()).unwrap();
    let traj = solver.march(&u0, 2).unwrap();
    let m = SignedPermutation::reflection(1, 0);
    assert!(symmetry_check(&traj, &m, Parity::Odd).unwrap() <= 1e-12);
    assert!(symmetry_check(&traj, &m, Parity::Even).unwrap() >= 1.0);
}

#[test]
fn self_similarity_trivial_dilation() {
    let cfg = SelfSimilarityConfig {
        model: ModelParams::new(1.5, 3.0, 1).unwrap(),
        n: 1,
        size: 64,
        half_length: 8.0,
        horizon: 2.0,
        steps: 8,
        lambda: 1.0,
        amplitude: 0.1,
        mollifier: 0.5,
        corrector_iters: 2,
        from_node: 0,
    };
    assert_eq!(self_similarity_check(&cfg).unwrap().defect, 0.0);
    assert!(self_similarity_check(&SelfSimilarityConfig { lambda: 3.0, ..cfg }).is_err());
}

#[test]
fn homogeneous_data_profile() {
    let g = BoxGrid::cube(1, 32, 4.0).unwrap();
    let u = homogeneous_data(&g, 3.0, 2.0, 0.5).unwrap();
    let c = g.ravel(&[16]);
    assert!((u.values()[c] - 2.0 / 0.5).abs() < 1e-14);
    assert!((u.values()[0] - 2.0 / (16.0f64 + 0.25).sqrt()).abs() < 1e-14);
}

#[test]
fn decay_fit_recovers_power_law() {
    let s: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 3.0 * (i as f64).powf(-0.4))).collect();
    let f = decay_fit(&s, -0.4).unwrap();
    assert!(f.relative_error < 1e-12);
    assert!((f.intercept - 3.0f64.ln()).abs() < 1e-12);
}

#[test]
fn decay_fit_rejects_degenerate_samples() {
    let zero: Vec<(f64, f64)> = (1..=20).map(|i| (i as f64, 0.0)).collect();
    assert!(decay_fit(&zero, -0.4).is_err());
    assert!(decay_fit(&[(1.0, 1.0), (2.0, 0.5)], -1.0).is_err());
}

#[test]
fn verdict_csv_layout() {
    let v = [Verdict::at_most("defect", 0.01, 0.05), Verdict::at_most("gap", 2.0, 1.0)];
    let mut out = Vec::new();
    write_verdicts(&mut out, &v, "abc123").unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,config_hash,value,threshold,pass");
    assert!(lines[1].starts_with("defect,abc123,") && lines[1].ends_with(",true"));
    assert!(lines[2].ends_with(",false"));
}
