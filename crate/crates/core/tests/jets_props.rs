use finsler::jets::{default_fd_step, extract_partial, fd_partial, jet_arith, jet_func, ArithOp, ElementaryFn};
use finsler::{Jet, MultiIndex, Real};
use proptest::prelude::*;

const NV: usize = 3;
const ORDER: usize = 4;

fn all_indices(nv: usize, max_degree: usize) -> Vec<MultiIndex> {
    Jet::constant(nv, max_degree, 0.0).indices().to_vec()
}

fn random_jet() -> impl Strategy<Value = Jet> {
    let len = finsler::jets::coefficient_count(NV, ORDER);
    prop::collection::vec(-2.0..2.0f64, len).prop_map(|c| Jet::from_coeffs(NV, ORDER, c).unwrap())
}

/// A smooth test function of three variables drawn from a small family,
/// written once for values and jets.
#[derive(Debug, Clone)]
struct TestFn {
    a: [f64; 3],
    b: [f64; 3],
    c: f64,
    kind: u8,
}

impl TestFn {
    fn eval<S: Real>(&self, x: &[S]) -> S {
        let lin = |w: &[f64; 3]| x[0].clone() * w[0] + x[1].clone() * w[1] + x[2].clone() * w[2];
        let u = lin(&self.a);
        let v = lin(&self.b);
        match self.kind % 5 {
            0 => u.exp() * v.sin(),
            1 => (u.clone() * u + 1.5).ln() + v.cos() * self.c,
            2 => (v.clone() * v + 0.5 + x[2].clone() * x[2].clone()).sqrt() * u,
            3 => (u.clone() * u + 1.0).powf(-0.5) + v.powi(3) * self.c,
            _ => (u / (v.clone() * v + 2.0)).sin() + x[0].clone() * x[1].clone() * x[2].clone(),
        }
    }
}

fn test_fn() -> impl Strategy<Value = TestFn> {
    (
        prop::array::uniform3(-1.0..1.0f64),
        prop::array::uniform3(-1.0..1.0f64),
        -1.0..1.0f64,
        0u8..5,
    )
        .prop_map(|(a, b, c, kind)| TestFn { a, b, c, kind })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn leibniz_rule(a in random_jet(), b in random_jet()) {
        let prod = &a * &b;
        for i in 0..NV {
            let idx = MultiIndex::unit(NV, i);
            let lhs = extract_partial(&prod, &idx).unwrap();
            let rhs = a.value() * extract_partial(&b, &idx).unwrap() + b.value() * extract_partial(&a, &idx).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn derivative_commutes_with_products(a in random_jet(), b in random_jet(), slot in 0..NV) {
        let lhs = (&a * &b).derivative(slot).unwrap();
        let rhs = &a.derivative(slot).unwrap() * &b.truncate(ORDER - 1) + &a.truncate(ORDER - 1) * &b.derivative(slot).unwrap();
        for (l, r) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((l - r).abs() <= 1e-11 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn composition_consistency(x in prop::array::uniform3(-1.0..1.0f64)) {
        let v: Vec<Jet> = (0..NV).map(|k| Jet::variable(NV, ORDER, x[k], k)).collect();
        // exp(x0 * x1 + x2) through the checked API and through operators
        let inner = jet_arith(&jet_arith(&v[0], &v[1], ArithOp::Mul).unwrap(), &v[2], ArithOp::Add).unwrap();
        let checked = jet_func(&inner, ElementaryFn::Exp).unwrap();
        let direct = (&v[0] * &v[1] + &v[2]).exp();
        for (l, r) in checked.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
        // sqrt(x0^2 + 2) / (1 + x1^2)
        let num = jet_func(&(&v[0] * &v[0]).add_scalar(2.0), ElementaryFn::Sqrt).unwrap();
        let den = (&v[1] * &v[1]).add_scalar(1.0);
        let checked = jet_arith(&num, &den, ArithOp::Div).unwrap();
        let direct = (&v[0] * &v[0] + 2.0).try_powf(0.5).unwrap() / ((&v[1] * &v[1]) + 1.0);
        for (l, r) in checked.coeffs().iter().zip(direct.coeffs()) {
            prop_assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn jet_partials_match_finite_differences(f in test_fn(), x in prop::array::uniform3(-0.7..0.7f64)) {
        let vars: Vec<Jet> = (0..NV).map(|k| Jet::variable(NV, ORDER, x[k], k)).collect();
        let jet = f.eval(&vars);
        prop_assume!(jet.is_finite());
        let scale = jet.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for idx in all_indices(NV, ORDER) {
            let exact = extract_partial(&jet, &idx).unwrap();
            let approx = fd_partial(|z| f.eval(z), &x, &idx, default_fd_step(idx.degree())).unwrap();
            let tol = 1e-6 * scale.max(exact.abs()) * idx.factorial().max(1.0);
            prop_assert!((exact - approx).abs() <= tol, "{idx}: jet {exact} fd {approx}");
        }
    }
}

#[test]
fn elementary_functions_match_finite_differences() {
    let x = [0.4, -0.3];
    type Pair = (&'static str, Box<dyn Fn(&Jet) -> Jet>, Box<dyn Fn(f64) -> f64>);
    let funcs: Vec<Pair> = vec![
        ("sqrt", Box::new(|j: &Jet| j.try_sqrt().unwrap()), Box::new(f64::sqrt)),
        ("exp", Box::new(|j: &Jet| j.exp()), Box::new(f64::exp)),
        ("ln", Box::new(|j: &Jet| j.try_ln().unwrap()), Box::new(f64::ln)),
        ("sin", Box::new(|j: &Jet| j.sin()), Box::new(f64::sin)),
        ("cos", Box::new(|j: &Jet| j.cos()), Box::new(f64::cos)),
        ("pow", Box::new(|j: &Jet| j.try_powf(-1.5).unwrap()), Box::new(|v: f64| v.powf(-1.5))),
        ("recip", Box::new(|j: &Jet| j.try_recip().unwrap()), Box::new(|v: f64| 1.0 / v)),
    ];
    for (name, fj, ff) in funcs {
        // argument 1.5 + x0 x1 + x0^2 keeps every function in its domain
        let arg = |a: f64, b: f64| 1.5 + a * b + a * a;
        let v0 = Jet::variable(2, ORDER, x[0], 0);
        let v1 = Jet::variable(2, ORDER, x[1], 1);
        let jet = fj(&(&v0 * &v1 + &v0 * &v0 + 1.5));
        let scale = jet.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for idx in all_indices(2, ORDER) {
            let exact = extract_partial(&jet, &idx).unwrap();
            let approx = fd_partial(|z| ff(arg(z[0], z[1])), &x, &idx, default_fd_step(idx.degree())).unwrap();
            assert!(
                (exact - approx).abs() <= 1e-6 * scale.max(exact.abs()) * idx.factorial(),
                "{name} {idx}: jet {exact} fd {approx}"
            );
        }
    }
}
