//! Finite-difference ground truth for Riemannian metric fields.
//!
//! Nothing here touches the jet engine: metric fields are evaluated on plain
//! `f64` coordinates and differentiated with Richardson-extrapolated central
//! differences, so agreement with the jet pipeline on a Riemannian metric is
//! independent evidence for both.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Array3, Array4};

use crate::error::{GeometryError, Result};
use crate::metric::{MetricField, ScalarField};

/// Step for differentiating the metric field.
pub const METRIC_STEP: f64 = 1e-4;
/// Step for differentiating Christoffel symbols, which are themselves
/// finite differences; a larger step keeps rounding below `1e-8`.
pub const CHRISTOFFEL_STEP: f64 = 1e-3;
/// Step for second derivatives of a scalar factor.
pub const FACTOR_STEP: f64 = 1e-3;

/// `(4 D(h/2) - D(h)) / 3` with central `D(h)`, componentwise.
fn richardson<F>(f: &F, x: &[f64], k: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let central = |h: f64| {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>()
    };
    let coarse = central(h);
    let fine = central(h / 2.0);
    fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect()
}

fn metric_matrix<G: MetricField + ?Sized>(field: &G, x: &[f64]) -> Array2<f64> {
    let g = field.metric(x);
    let n = g.len();
    Array2::from_shape_fn((n, n), |(i, j)| g[i][j])
}

fn invert(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    let inv = m.try_inverse().ok_or(GeometryError::Singular { pivot: 0.0 })?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| inv[(i, j)]))
}

/// `Γ̂^i_jk = ½ g^il (∂_k g_jl + ∂_j g_lk - ∂_l g_jk)` at `[[i, j, k]]`.
pub fn levi_civita_fd<G: MetricField + ?Sized>(field: &G, x: &[f64]) -> Result<Array3<f64>> {
    let n = field.dim();
    if x.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: x.len() });
    }
    let g = metric_matrix(field, x);
    let gi = invert(&g)?;
    let flat = |z: &[f64]| metric_matrix(field, z).iter().copied().collect::<Vec<f64>>();
    // dg[[j, l, k]] = ∂_k g_jl
    let mut dg = Array3::<f64>::zeros((n, n, n));
    for k in 0..n {
        let d = richardson(&flat, x, k, METRIC_STEP);
        for j in 0..n {
            for l in 0..n {
                dg[[j, l, k]] = d[j * n + l];
            }
        }
    }
    Ok(Array3::from_shape_fn((n, n, n), |(i, j, k)| {
        0.5 * (0..n)
            .map(|l| gi[[i, l]] * (dg[[j, l, k]] + dg[[l, k, j]] - dg[[j, k, l]]))
            .sum::<f64>()
    }))
}

/// Classical curvature data of a Riemannian field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannOracleReport {
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    pub christoffel: Array3<f64>,
    /// `R_j^i_kl` at `[[j, i, k, l]]`, same layout as the Finsler pipeline.
    pub riemann: Array4<f64>,
    /// `g_im R_j^m_kl` at `[[j, i, k, l]]`.
    pub riemann_lowered: Array4<f64>,
    pub ricci: Array2<f64>,
    pub scal: f64,
    /// Max residual of the first Bianchi identity.
    pub bianchi: f64,
    /// Covariant Hessian of the factor passed to [`riemann_ricci_fd_with`].
    pub cov_hessian: Option<Array2<f64>>,
}

/// Curvature from differentiated Christoffel symbols:
/// `R_j^i_kl = ∂_k Γ^i_jl - ∂_l Γ^i_jk + Γ^i_km Γ^m_jl - Γ^i_lm Γ^m_jk`.
pub fn riemann_ricci_fd<G: MetricField + ?Sized>(field: &G, x: &[f64]) -> Result<RiemannOracleReport> {
    let n = field.dim();
    let gamma = levi_civita_fd(field, x)?;
    let g = metric_matrix(field, x);
    let g_inv = invert(&g)?;
    let flat = |z: &[f64]| {
        levi_civita_fd(field, z)
            .map(|c| c.iter().copied().collect::<Vec<f64>>())
            .unwrap_or_else(|_| vec![f64::NAN; n * n * n])
    };
    // dgamma[[i, j, l, k]] = ∂_k Γ^i_jl
    let mut dgamma = Array4::<f64>::zeros((n, n, n, n));
    for k in 0..n {
        let d = richardson(&flat, x, k, CHRISTOFFEL_STEP);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    dgamma[[i, j, l, k]] = d[(i * n + j) * n + l];
                }
            }
        }
    }
    if dgamma.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite("oracle Christoffel derivatives"));
    }
    let riemann = Array4::from_shape_fn((n, n, n, n), |(j, i, k, l)| {
        dgamma[[i, j, l, k]] - dgamma[[i, j, k, l]]
            + (0..n)
                .map(|m| gamma[[i, k, m]] * gamma[[m, j, l]] - gamma[[i, l, m]] * gamma[[m, j, k]])
                .sum::<f64>()
    });
    let riemann_lowered = Array4::from_shape_fn((n, n, n, n), |(j, i, k, l)| {
        (0..n).map(|m| g[[i, m]] * riemann[[j, m, k, l]]).sum()
    });
    let ricci = Array2::from_shape_fn((n, n), |(j, l)| (0..n).map(|k| riemann[[j, k, k, l]]).sum());
    let scal = (&g_inv * &ricci).sum();
    let mut bianchi: f64 = 0.0;
    for ((j, i, k, l), v) in riemann.indexed_iter() {
        bianchi = bianchi.max((v + riemann[[k, i, l, j]] + riemann[[l, i, j, k]]).abs());
    }
    Ok(RiemannOracleReport {
        g,
        g_inv,
        christoffel: gamma,
        riemann,
        riemann_lowered,
        ricci,
        scal,
        bianchi,
        cov_hessian: None,
    })
}

/// [`riemann_ricci_fd`] plus the covariant Hessian of `u`.
pub fn riemann_ricci_fd_with<G, U>(field: &G, u: &U, x: &[f64]) -> Result<RiemannOracleReport>
where
    G: MetricField + ?Sized,
    U: ScalarField + ?Sized,
{
    let mut rep = riemann_ricci_fd(field, x)?;
    rep.cov_hessian = Some(covariant_hessian_fd(field, u, x)?);
    Ok(rep)
}

/// Gradient and Hessian of a scalar field by central differences.
fn factor_partials<U: ScalarField + ?Sized>(u: &U, x: &[f64]) -> (Array1<f64>, Array2<f64>) {
    let n = x.len();
    let val = |z: &[f64]| vec![u.eval(z)];
    let du: Array1<f64> = (0..n).map(|k| richardson(&val, x, k, FACTOR_STEP)[0]).collect();
    let grad = |z: &[f64]| (0..n).map(|k| richardson(&val, z, k, FACTOR_STEP)[0]).collect::<Vec<f64>>();
    let mut ddu = Array2::<f64>::zeros((n, n));
    for k in 0..n {
        let d = richardson(&grad, x, k, FACTOR_STEP);
        for i in 0..n {
            ddu[[i, k]] = d[i];
        }
    }
    // symmetrize the two difference orders
    let ddu = (&ddu + &ddu.t()) * 0.5;
    (du, ddu)
}

/// Covariant Hessian `∂_i∂_j u - Γ̂^k_ij ∂_k u`.
pub fn covariant_hessian_fd<G, U>(field: &G, u: &U, x: &[f64]) -> Result<Array2<f64>>
where
    G: MetricField + ?Sized,
    U: ScalarField + ?Sized,
{
    let gamma = levi_civita_fd(field, x)?;
    let n = x.len();
    let (du, ddu) = factor_partials(u, x);
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        ddu[[i, j]] - (0..n).map(|k| gamma[[k, i, j]] * du[k]).sum::<f64>()
    }))
}

/// Trace-free Ricci tensor of `e^{2u} g` predicted by the Riemannian
/// transformation law
/// `Ẽ = E - (n-2)(∇²u - du⊗du) + ((n-2)/n)(Δu - |du|²) g`.
pub fn classical_conformal_efree<G, U>(field: &G, u: &U, x: &[f64]) -> Result<Array2<f64>>
where
    G: MetricField + ?Sized,
    U: ScalarField + ?Sized,
{
    let rep = riemann_ricci_fd_with(field, u, x)?;
    let n = x.len();
    let nf = n as f64;
    let hess = rep.cov_hessian.clone().expect("requested above");
    let (du, _) = factor_partials(u, x);
    let lap = (&rep.g_inv * &hess).sum();
    let norm = rep.g_inv.dot(&du).dot(&du);
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        let e = rep.ricci[[i, j]] - rep.scal / nf * rep.g[[i, j]];
        e - (nf - 2.0) * (hess[[i, j]] - du[i] * du[j]) + (nf - 2.0) / nf * (lap - norm) * rep.g[[i, j]]
    }))
}

/// Max deviation from the four classical symmetries of a lowered curvature
/// tensor in the `[[j, i, k, l]]` layout.
pub fn lowered_symmetry_residual(r: &Array4<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for ((j, i, k, l), v) in r.indexed_iter() {
        worst = worst
            .max((v + r[[i, j, k, l]]).abs())
            .max((v + r[[j, i, l, k]]).abs())
            .max((v - r[[k, l, j, i]]).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::zoo::{EuclideanField, Factor, HyperbolicPlane, RoundSphere2, RoundSphere3};

    #[test]
    fn euclidean_is_flat() {
        let f = EuclideanField { dim: 3 };
        let r = riemann_ricci_fd(&f, &[0.1, -0.4, 0.7]).unwrap();
        assert!(r.christoffel.iter().all(|v| *v == 0.0));
        assert!(r.riemann_lowered.iter().all(|v| *v == 0.0));
        assert_eq!(r.scal, 0.0);
    }

    #[test]
    fn sphere_christoffel_symbol() {
        let c = levi_civita_fd(&RoundSphere2, &[PI / 3.0, 0.0]).unwrap();
        assert_abs_diff_eq!(c[[0, 1, 1]], -0.43301, epsilon = 1e-5);
        assert_abs_diff_eq!(c[[0, 1, 1]], -(PI / 3.0).sin() * (PI / 3.0).cos(), epsilon = 1e-8);
    }

    #[test]
    fn hyperbolic_christoffel_symbol() {
        let c = levi_civita_fd(&HyperbolicPlane, &[0.3, 1.0]).unwrap();
        assert_abs_diff_eq!(c[[0, 0, 1]], -1.0, epsilon = 1e-8);
    }

    #[test]
    fn sphere_scalar_curvatures() {
        let r2 = riemann_ricci_fd(&RoundSphere2, &[1.1, 0.2]).unwrap();
        assert_abs_diff_eq!(r2.scal, 2.0, epsilon = 1e-5);
        let r3 = riemann_ricci_fd(&RoundSphere3, &[1.0, 2.0, -0.5]).unwrap();
        assert_abs_diff_eq!(r3.scal, 6.0, epsilon = 1e-4);
        assert!(r3.bianchi <= 1e-5);
        assert!(lowered_symmetry_residual(&r3.riemann_lowered) <= 1e-6);
    }

    #[test]
    fn covariant_hessian_of_height_function() {
        // cos θ restricted to the unit sphere satisfies ∇²h = -h g
        let u = Factor::CosPlus { dim: 2, coord: 0, c: 0.0 };
        let x = [0.9, 0.3];
        let r = riemann_ricci_fd_with(&RoundSphere2, &u, &x).unwrap();
        let h = r.cov_hessian.unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(h[[i, j]], -x[0].cos() * r.g[[i, j]], epsilon = 1e-7);
            }
        }
    }

    struct Degenerate;

    impl MetricField for Degenerate {
        fn dim(&self) -> usize {
            2
        }
        fn label(&self) -> String {
            "degenerate".into()
        }
        fn metric<S: crate::jets::Real>(&self, x: &[S]) -> Vec<Vec<S>> {
            vec![vec![x[0].lift(1.0), x[0].lift(1.0)], vec![x[0].lift(1.0), x[0].lift(1.0)]]
        }
        fn domain(&self) -> crate::metric::Domain {
            crate::metric::Domain::cube(2, -1.0, 1.0)
        }
    }

    #[test]
    fn bad_inputs_are_reported() {
        assert!(matches!(
            levi_civita_fd(&EuclideanField { dim: 2 }, &[0.0]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        assert!(matches!(levi_civita_fd(&Degenerate, &[0.0, 0.0]), Err(GeometryError::Singular { .. })));
    }
}
