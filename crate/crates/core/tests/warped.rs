use finsler::prelude::*;

fn check<M1, M2, W>(m: &WarpedProductMetric<M1, M2, W>, samples: usize)
where
    M1: FinslerMetric,
    M2: FinslerMetric,
    W: ScalarField,
{
    for p in SamplePlan::new(samples, 59).points(m) {
        let d = m.diagnostics(&p).unwrap();
        assert!(d.block <= 1e-12, "{}: {d:?}", m.label());
        assert!(d.mixed_connection <= 1e-7, "{}: {d:?}", m.label());
        assert!(d.first_connection <= 1e-7, "{}: {d:?}", m.label());
        assert!(d.mixed_curvature <= 1e-8, "{}: {d:?}", m.label());
        assert!(d.first_curvature <= 1e-6, "{}: {d:?}", m.label());
    }
}

#[test]
fn warped_three_sphere_structure() {
    let (m, _) = make_s5_example(2.0).unwrap();
    check(&m, 30);
}

#[test]
fn sphere_times_line_structure() {
    let m = make_warped(
        make_riemannian(RoundSphere2),
        make_euclidean(1).unwrap(),
        Factor::ShiftedCos { dim: 2, coord: 0, a: 2.0 },
        16,
    )
    .unwrap();
    check(&m, 30);
}

#[test]
fn hyperbolic_times_sphere_structure() {
    let m = make_warped(
        make_riemannian(HyperbolicPlane),
        make_riemannian(RoundSphere2),
        Factor::Linear {
            coeffs: vec![0.5, 1.0],
            offset: 0.0,
        },
        16,
    )
    .unwrap();
    check(&m, 20);
}

#[test]
fn equatorial_slice_of_the_three_sphere() {
    let (m, _) = make_s5_example(2.0).unwrap();
    let theta = 1.1;
    let p = PointState::new(vec![std::f64::consts::FRAC_PI_2, theta, 0.3], vec![0.2, 0.5, -0.4]).unwrap();
    let g = fundamental_tensor(&m, &p).unwrap().g;
    let expected = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, theta.sin().powi(2)]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((g[[i, j]] - expected[i][j]).abs() <= 1e-14);
        }
    }
}
