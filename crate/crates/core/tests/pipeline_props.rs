use std::collections::BTreeMap;

use finsler::prelude::*;
use proptest::prelude::*;

fn worst_over<M: FinslerMetric + ?Sized>(m: &M, count: usize, seed: u64) -> BTreeMap<String, f64> {
    let mut worst = BTreeMap::new();
    for p in SamplePlan::new(count, seed).points(m) {
        let d = property_diagnostics(m, &p.with_order(3)).unwrap();
        for (k, v) in d {
            let e = worst.entry(k).or_insert(0.0f64);
            *e = e.max(v.abs());
        }
    }
    worst
}

fn is_riemannian(label: &str) -> bool {
    !label.contains("randers")
}

#[test]
fn homogeneity_and_euler_on_every_zoo_metric() {
    for m in catalog() {
        let w = worst_over(&m, 100, 1);
        assert!(w["homogeneity"] <= 1e-9, "{}: {:e}", m.label(), w["homogeneity"]);
        assert!(w["g_homogeneity"] <= 1e-8, "{}: {:e}", m.label(), w["g_homogeneity"]);
        assert!(w["euler"] <= 1e-8, "{}: {:e}", m.label(), w["euler"]);
        assert!(w["inverse"] <= 1e-10, "{}", m.label());
    }
}

#[test]
fn cartan_tensor_properties() {
    for m in catalog() {
        let w = worst_over(&m, 100, 2);
        assert!(w["cartan_symmetry"] <= 1e-9, "{}", m.label());
        assert!(w["cartan_contraction"] <= 1e-9, "{}", m.label());
        if is_riemannian(&m.label()) {
            let p = SamplePlan::new(1, 3).points(&m).remove(0);
            let a = cartan_tensor(&m, &p).unwrap();
            assert!(a.iter().all(|v| v.abs() <= 1e-10), "{}", m.label());
        }
    }
}

#[test]
fn randers_has_nonzero_cartan_tensor() {
    let m = make_randers(vec![0.3, -0.2]).unwrap();
    let p = PointState::new(vec![0.0, 0.0], vec![0.6, 0.8]).unwrap();
    let a = cartan_tensor(&m, &p).unwrap();
    assert!(a.iter().any(|v| v.abs() > 1e-3));
}

#[test]
fn connection_properties() {
    for m in catalog() {
        let w = worst_over(&m, 100, 4);
        assert_eq!(w["chern_symmetry"], 0.0, "{}", m.label());
        assert!(w["compatibility"] <= 1e-7, "{}: {:e}", m.label(), w["compatibility"]);
        assert!(w["n_gamma"] <= 1e-8, "{}: {:e}", m.label(), w["n_gamma"]);
        assert!(w["delta_f2"] <= 1e-9, "{}: {:e}", m.label(), w["delta_f2"]);
    }
}

#[test]
fn full_report_on_euclidean() {
    let m = make_euclidean(2).unwrap();
    let p = PointState::new(vec![0.1, 0.2], vec![3.0, 4.0]).unwrap();
    let r = full_report(&m, &p).unwrap();
    assert_eq!(r.f_val, 5.0);
    for (k, v) in &r.diagnostics {
        if k != "min_eigenvalue" {
            assert!(v.abs() <= 1e-12, "{k}: {v:e}");
        }
    }
    assert!(r.hh_curv.iter().all(|v| *v == 0.0));
    assert_eq!(r.scal, 0.0);
}

#[test]
fn full_report_on_randers_is_positive_definite() {
    let m = make_randers(vec![0.5, 0.4]).unwrap();
    for p in SamplePlan::new(20, 5).points(&m) {
        let r = full_report(&m, &p).unwrap();
        assert!(r.diagnostics["min_eigenvalue"] > 0.0);
    }
}

#[test]
fn curvature_is_antisymmetric_in_last_pair() {
    for m in catalog() {
        let p = SamplePlan::new(1, 6).points(&m).remove(0);
        let r = full_report(&m, &p).unwrap();
        assert!(r.diagnostics["curvature_antisymmetry"] <= 1e-14, "{}", m.label());
        assert!(r.diagnostics["efree_trace"] <= 1e-10, "{}", m.label());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn randers_homogeneity(
        b in prop::array::uniform2(-0.6..0.6f64),
        y in prop::array::uniform2(-3.0..3.0f64),
        c in 0.1..10.0f64,
    ) {
        prop_assume!(y[0].abs() + y[1].abs() > 1e-3);
        let m = make_randers(b.to_vec()).unwrap();
        let f = m.value_at(&[0.0, 0.0], &y);
        let fc = m.value_at(&[0.0, 0.0], &[c * y[0], c * y[1]]);
        prop_assert!((fc - c * f).abs() <= 1e-12 * c * f);
        let g = fundamental_tensor(&m, &PointState::new(vec![0.0, 0.0], y.to_vec()).unwrap().with_order(2)).unwrap();
        let gc = fundamental_tensor(&m, &PointState::new(vec![0.0, 0.0], vec![c * y[0], c * y[1]]).unwrap().with_order(2)).unwrap();
        for (a, b) in g.g.iter().zip(gc.g.iter()) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert!(g.min_eigenvalue > 0.0);
    }

    #[test]
    fn conformal_randers_connection(
        coeffs in prop::array::uniform3(-0.5..0.5f64),
        x in prop::array::uniform3(-1.0..1.0f64),
        y in prop::array::uniform3(-1.0..1.0f64),
    ) {
        prop_assume!(y.iter().map(|v| v * v).sum::<f64>() > 1e-2);
        let m = ConformalMetric::new(
            make_randers(vec![0.2, -0.3, 0.1]).unwrap(),
            Factor::Linear { coeffs: coeffs.to_vec(), offset: 0.0 },
        );
        let d = property_diagnostics(&m, &PointState::new(x.to_vec(), y.to_vec()).unwrap().with_order(3)).unwrap();
        prop_assert!(d["n_gamma"] <= 1e-8);
        prop_assert!(d["compatibility"] <= 1e-7);
        prop_assert!(d["cartan_contraction"] <= 1e-9);
    }
}
