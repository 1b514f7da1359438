use std::f64::consts::PI;

use finsler::jets::default_fd_step;
use finsler::prelude::*;
use ndarray::Array2;

fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn constant_factor_gives_zero_residual() {
    let c = Factor::Constant { dim: 3, value: 1.0 };
    let metrics: Vec<Box<dyn FinslerMetric>> = vec![
        Box::new(make_euclidean(3).unwrap()),
        Box::new(make_riemannian(RoundSphere3)),
        Box::new(make_randers(vec![0.2, 0.1, 0.3]).unwrap()),
    ];
    for m in &metrics {
        for p in SamplePlan::new(10, 61).points(m) {
            let r = ee9_residual(m, &c, &p).unwrap();
            assert!(max_abs(&r) <= 1e-12);
            let d = conformal_diagnostics(m, &c, &p).unwrap();
            assert!(max_abs(&d.bmap) <= 1e-12);
            assert_eq!((d.grad_norm_sq, d.laplacian_h), (0.0, 0.0));
        }
    }
}

#[test]
fn residual_needs_three_dimensions() {
    let m = make_riemannian(RoundSphere2);
    let p = PointState::new(vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
    let u = Factor::Constant { dim: 2, value: 0.0 };
    assert!(matches!(
        ee9_residual(&m, &u, &p),
        Err(GeometryError::DimensionTooSmall { min: 3, got: 2 })
    ));
}

#[test]
fn linear_factor_on_euclidean_space() {
    let m = make_euclidean(3).unwrap();
    let u = Factor::Linear {
        coeffs: vec![1.0, 0.0, 0.0],
        offset: 0.0,
    };
    let p = PointState::new(vec![0.2, 0.1, -0.3], vec![0.3, 0.4, 1.0]).unwrap();
    let (grad, norm, lap) = laplacian_and_gradient(&m, &u, &p).unwrap();
    assert_eq!(grad.to_vec(), vec![1.0, 0.0, 0.0]);
    assert_eq!((norm, lap), (1.0, 0.0));
    assert!(max_abs(&horizontal_hessian(&m, &u, &p).unwrap()) == 0.0);
}

#[test]
fn cartan_term_vanishes_for_riemannian_metrics() {
    let u = Factor::Linear {
        coeffs: vec![0.3, -0.2, 0.5],
        offset: 0.1,
    };
    let m = make_riemannian(RoundSphere3);
    for p in SamplePlan::new(20, 67).points(&m) {
        let d = conformal_diagnostics(&m, &u, &p).unwrap();
        assert!(d.ee9_cartan_term.abs() <= 1e-10);
        // reduced expression evaluated directly
        let g = fundamental_tensor(&m, &p).unwrap().g;
        let du = [0.3, -0.2, 0.5];
        let reduced = Array2::from_shape_fn((3, 3), |(i, j)| {
            d.hess_u[[i, j]] - (d.laplacian_h - d.grad_norm_sq) / 3.0 * g[[i, j]] - du[i] * du[j]
        });
        assert!(max_abs(&(&reduced - d.ee9_residual.as_ref().unwrap())) <= 1e-10);
    }
}

/// `(|y| + b·y)^2` in plain floats.
fn randers_sq(b: &[f64], y: &[f64]) -> f64 {
    let a = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let f = a + b.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    f * f
}

/// `F² g^ir - 2 y^i y^r`, with `g` the closed-form Hessian of `½(α + β)²`:
/// `g_ij = l_i l_j + F (δ_ij/α - y_i y_j/α³)`, `l = y/α + b`.
fn bracket(b: &[f64], y: &[f64]) -> Array2<f64> {
    let n = y.len();
    let alpha = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let f = randers_sq(b, y).sqrt();
    let l: Vec<f64> = (0..n).map(|i| y[i] / alpha + b[i]).collect();
    let g = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        l[i] * l[j] + f * (delta / alpha - y[i] * y[j] / alpha.powi(3))
    });
    let gi = g.try_inverse().unwrap();
    Array2::from_shape_fn((n, n), |(i, r)| f * f * gi[(i, r)] - 2.0 * y[i] * y[r])
}

#[test]
fn bmap_matches_finite_differences_on_randers() {
    let b = vec![0.3, -0.2, 0.25];
    let m = make_randers(b.clone()).unwrap();
    let u = Factor::Linear {
        coeffs: vec![1.0, 0.0, 0.0],
        offset: 0.0,
    };
    for p in SamplePlan::new(10, 71).points(&m) {
        let bj = b_map(&m, &u, &p).unwrap();
        let y = p.y().to_vec();
        let f = randers_sq(&b, &y).sqrt();
        let h = default_fd_step(1);
        let mut expected = Array2::<f64>::zeros((3, 3));
        for j in 0..3 {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[j] += h;
            ym[j] -= h;
            let d = (bracket(&b, &yp) - bracket(&b, &ym)) / (2.0 * h);
            let mut yp2 = y.clone();
            let mut ym2 = y.clone();
            yp2[j] += h / 2.0;
            ym2[j] -= h / 2.0;
            let d2 = (bracket(&b, &yp2) - bracket(&b, &ym2)) / h;
            let rich = (d2 * 4.0 - d) / 3.0;
            for i in 0..3 {
                // ∇_r u = δ_r0
                expected[[i, j]] = rich[[i, 0]] / (2.0 * f);
            }
        }
        assert!(max_abs(&(&bj - &expected)) <= 1e-7, "{bj:?} vs {expected:?}");
    }
}

#[test]
fn cylinder_identity_on_round_sphere() {
    let rep = cylinder_check(make_riemannian(RoundSphere2), CosPlusConst { c: 2.0 }, PI, 50).unwrap();
    assert!(rep.errors.is_empty(), "{:?}", rep.errors);
    assert_eq!(rep.points.len() + rep.excluded, 50);
    assert!(rep.max_hessian_residual() <= 1e-6);
    for p in &rep.points {
        assert!((p.phi_ddot + p.point.x()[0].cos()).abs() <= 1e-12);
    }
}

#[test]
fn cylinder_residual_is_direction_independent() {
    let cyl = make_cylinder(make_riemannian(RoundSphere2), CosPlusConst { c: 2.0 }, PI).unwrap();
    let phi = ProfileFactor {
        profile: CosPlusConst { c: 2.0 },
        dim: 3,
    };
    let x = vec![1.0, 1.2, 0.4];
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    for _ in 0..10 {
        let y = unit_direction(3, &mut rng);
        let p = PointState::new(x.clone(), y).unwrap();
        let h = horizontal_hessian(&cyl, &phi, &p).unwrap();
        let g = fundamental_tensor(&cyl, &p).unwrap().g;
        let res = &h - &(g * (-x[0].cos()));
        assert!(max_abs(&res) <= 1e-6);
        let (_, _, lap) = laplacian_and_gradient(&cyl, &phi, &p).unwrap();
        assert!((lap - 3.0 * (-x[0].cos())).abs() <= 1e-6);
    }
}

#[test]
fn cylinder_hessian_vanishes_at_equator() {
    let cyl = make_cylinder(make_riemannian(RoundSphere2), CosPlusConst { c: 2.0 }, PI).unwrap();
    let phi = ProfileFactor {
        profile: CosPlusConst { c: 2.0 },
        dim: 3,
    };
    let p = PointState::new(vec![PI / 2.0, 1.0, 0.0], vec![0.3, -0.5, 0.8]).unwrap();
    assert!(max_abs(&horizontal_hessian(&cyl, &phi, &p).unwrap()) <= 1e-12);
}

#[test]
fn cylinder_hessian_matches_oracle() {
    // (0, π) × S² with warping -sin t is the round three-sphere chart
    let cyl = make_cylinder(make_riemannian(RoundSphere2), CosPlusConst { c: 2.0 }, PI).unwrap();
    let phi = ProfileFactor {
        profile: CosPlusConst { c: 2.0 },
        dim: 3,
    };
    for p in SamplePlan::new(10, 73).points(&make_riemannian(RoundSphere3)) {
        let h = horizontal_hessian(&cyl, &phi, &p).unwrap();
        let o = covariant_hessian_fd(&RoundSphere3, &phi, p.x()).unwrap();
        assert!(max_abs(&(&h - &o)) <= 1e-7);
    }
}

#[test]
fn flat_cylinder_with_linear_profile() {
    let rep = cylinder_check(
        make_euclidean(2).unwrap(),
        LinearProfile {
            slope: 1.5,
            intercept: 1.0,
        },
        1.0,
        20,
    )
    .unwrap();
    assert_eq!(rep.points.len(), 20);
    assert!(rep.max_hessian_residual() <= 1e-8);
}

#[test]
fn empty_cylinder_scan() {
    let rep = cylinder_check(make_riemannian(RoundSphere2), CosPlusConst { c: 2.0 }, PI, 0).unwrap();
    assert!(rep.points.is_empty() && rep.errors.is_empty() && rep.excluded == 0);
}

#[test]
fn degenerate_slope_is_excluded() {
    let plan = SamplePlan {
        domain: Some(Domain::new(vec![0.0, 0.5, -1.0], vec![1e-3, 2.5, 1.0])),
        ..SamplePlan::new(5, 1)
    };
    let rep = cylinder_check_with(make_riemannian(RoundSphere2), CosPlusConst { c: 2.0 }, PI, &plan).unwrap();
    assert_eq!(rep.excluded, 5);
    assert_eq!(rep.warnings.len(), 5);
}

#[test]
fn gap_for_identity_and_constant_deformations() {
    let m = make_riemannian(RoundSphere3);
    let zero = make_conformal(m.clone(), Factor::Constant { dim: 3, value: 0.0 }).unwrap();
    let one = make_conformal(m.clone(), Factor::Constant { dim: 3, value: 1.0 }).unwrap();
    for p in SamplePlan::new(5, 79).points(&m) {
        let g0 = eq122b_gap(&zero, &p).unwrap();
        assert!(max_abs(&g0.gap) <= 1e-12);
        let g1 = eq122b_gap(&one, &p).unwrap();
        // only Ẽ - E survives
        let diff = &g1.efree_deformed - &g1.efree_base;
        assert!(max_abs(&(&g1.gap - &diff)) <= 1e-12);
    }
}

#[test]
fn classical_law_holds_on_riemannian_base() {
    let field = RoundSphere3;
    let u = Factor::Linear {
        coeffs: vec![0.1, 0.0, 0.0],
        offset: 0.0,
    };
    let pair = make_conformal(make_riemannian(field), u.clone()).unwrap();
    for p in SamplePlan::new(5, 83).points(&pair.base) {
        let gap = eq122b_gap(&pair, &p).unwrap();
        assert!(max_abs(&gap.classical_gap) <= 1e-8);
        let oracle = classical_conformal_efree(&field, &u, p.x()).unwrap();
        assert!(max_abs(&(&oracle - &gap.efree_deformed)) <= 1e-6);
    }
}

#[test]
fn gap_is_direction_independent_on_riemannian_base() {
    let u = Factor::Linear {
        coeffs: vec![0.1, 0.2, -0.1],
        offset: 0.0,
    };
    let pair = make_conformal(make_riemannian(RoundSphere3), u).unwrap();
    let x = vec![1.0, 1.3, 0.2];
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let reference = eq122b_gap(&pair, &PointState::new(x.clone(), vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
    for _ in 0..10 {
        let p = PointState::new(x.clone(), unit_direction(3, &mut rng)).unwrap();
        let gap = eq122b_gap(&pair, &p).unwrap();
        assert!(max_abs(&(&gap.gap - &reference.gap)) <= 1e-6);
    }
}
