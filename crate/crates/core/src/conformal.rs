//! Calculus of conformal factors on the base manifold: horizontal Hessian,
//! gradient and Laplacian, the `B` map, the residual of the Einstein
//! preservation equation, the trace-free Ricci transformation gap and the
//! cylinder Hessian identity.
//!
//! Conventions: `hess[[i, j]] = ∇_j∇_i u = ∂_i∂_j u - Γ^k_ji ∂_k u` (the
//! factor does not depend on `y`, so `δu/δx = ∂u/∂x`), and the Laplacian is
//! the trace `Δu = g^ij ∇_i∇_j u`.

use ndarray::{Array1, Array2, Array3};

use crate::curvature::{max_abs, Geometry, RicciData};
use crate::error::{GeometryError, Result};
use crate::jets::Real;
use crate::metric::{FinslerMetric, PointState, SamplePlan, ScalarField};
use crate::zoo::{ConformalMetric, ConformalPair, Interval, Profile, ProfileFactor, ProfileSlope, WarpedProductMetric};

/// First and second partials of a factor `u(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorDerivatives {
    pub value: f64,
    pub du: Array1<f64>,
    pub ddu: Array2<f64>,
}

impl FactorDerivatives {
    pub fn at<U: ScalarField>(geo: &Geometry, u: &U) -> Result<Self> {
        let n = geo.dim();
        if u.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: u.dim(),
            });
        }
        let jet = u.eval(geo.x_jets());
        if !jet.is_finite() {
            return Err(GeometryError::NonFinite("conformal factor"));
        }
        let du = (0..n).map(|i| jet.first(i)).collect();
        let ddu = Array2::from_shape_fn((n, n), |(i, j)| jet.d(i).d(j).value());
        Ok(Self {
            value: jet.value(),
            du,
            ddu,
        })
    }
}

/// Everything the conformal module derives for one factor at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalDiagnostics {
    /// `∇_j∇_i u` at `[[i, j]]`
    pub hess_u: Array2<f64>,
    /// `∇^i u = g^ij ∂_j u`
    pub grad_u: Array1<f64>,
    pub grad_norm_sq: f64,
    pub laplacian_h: f64,
    /// `B^i_j` at `[[i, j]]`
    pub bmap: Array2<f64>,
    /// `None` when `n < 3`.
    pub ee9_residual: Option<Array2<f64>>,
    /// The Cartan-dependent scalar multiplying `g_ij` in the residual.
    pub ee9_cartan_term: f64,
}

fn hessian_from(geo: &Geometry, d: &FactorDerivatives) -> Result<Array2<f64>> {
    let n = geo.dim();
    let gamma = geo.chern()?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        d.ddu[[i, j]] - (0..n).map(|k| gamma[[k, j, i]] * d.du[k]).sum::<f64>()
    }))
}

/// `∇_j∇_i u` at `[[i, j]]`.
pub fn horizontal_hessian<M, U>(m: &M, u: &U, p: &PointState) -> Result<Array2<f64>>
where
    M: FinslerMetric + ?Sized,
    U: ScalarField,
{
    let geo = Geometry::at(m, p)?;
    let d = FactorDerivatives::at(&geo, u)?;
    hessian_from(&geo, &d)
}

/// `(∇^i u, g^ij ∂_i u ∂_j u, g^ij ∇_i∇_j u)`
pub fn laplacian_and_gradient<M, U>(m: &M, u: &U, p: &PointState) -> Result<(Array1<f64>, f64, f64)>
where
    M: FinslerMetric + ?Sized,
    U: ScalarField,
{
    let geo = Geometry::at(m, p)?;
    let d = FactorDerivatives::at(&geo, u)?;
    let h = hessian_from(&geo, &d)?;
    let (grad, norm) = raise(&geo, &d);
    Ok((grad, norm, trace(geo.g_inv(), &h)))
}

fn raise(geo: &Geometry, d: &FactorDerivatives) -> (Array1<f64>, f64) {
    let grad = geo.g_inv().dot(&d.du);
    let norm = grad.dot(&d.du);
    (grad, norm)
}

fn trace(g_inv: &Array2<f64>, h: &Array2<f64>) -> f64 {
    (g_inv * h).sum()
}

/// `T[[r, s, q]] = ∂(F² g^rs - 2 y^r y^s)/∂y^q`, using
/// `∂g^rs/∂y^q = -g^ra (∂g_ab/∂y^q) g^bs`.
pub fn fiber_derivative_tensor(geo: &Geometry) -> Result<Array3<f64>> {
    let n = geo.dim();
    let dg = geo.dg_dy()?;
    let gi = geo.g_inv();
    let f2 = geo.f2_jet();
    let f2v = f2.value();
    let y = geo.point().y();
    let mut t = Array3::<f64>::zeros((n, n, n));
    for q in 0..n {
        let df2 = f2.first(n + q);
        for r in 0..n {
            for s in 0..n {
                let mut dginv = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        dginv -= gi[[r, a]] * dg[[a, b, q]] * gi[[b, s]];
                    }
                }
                let dyy = if r == q { y[s] } else { 0.0 } + if s == q { y[r] } else { 0.0 };
                t[[r, s, q]] = df2 * gi[[r, s]] + f2v * dginv - 2.0 * dyy;
            }
        }
    }
    Ok(t)
}

fn bmap_from(geo: &Geometry, d: &FactorDerivatives, t: &Array3<f64>) -> Array2<f64> {
    let n = geo.dim();
    let inv_2f = 0.5 / geo.f_value();
    Array2::from_shape_fn((n, n), |(i, j)| inv_2f * (0..n).map(|r| d.du[r] * t[[i, r, j]]).sum::<f64>())
}

/// `B^i_j = (1/2F) (∇_r u) ∂(F² g^ir - 2 y^i y^r)/∂y^j` at `[[i, j]]`.
pub fn b_map<M, U>(m: &M, u: &U, p: &PointState) -> Result<Array2<f64>>
where
    M: FinslerMetric + ?Sized,
    U: ScalarField,
{
    let geo = Geometry::at(m, p)?;
    let d = FactorDerivatives::at(&geo, u)?;
    let t = fiber_derivative_tensor(&geo)?;
    Ok(bmap_from(&geo, &d, &t))
}

/// The Cartan term
/// `((n-1) / (2n(n-2)F)) (∇_r u ∇^q u) ∂(F²g^rs - 2y^r y^s)/∂y^q g^kl A_skl`.
fn ee9_cartan_term(geo: &Geometry, d: &FactorDerivatives, grad: &Array1<f64>, t: &Array3<f64>) -> Result<f64> {
    let n = geo.dim();
    let a = geo.cartan()?;
    let gi = geo.g_inv();
    let mean_cartan: Vec<f64> = (0..n)
        .map(|s| {
            (0..n)
                .flat_map(|k| (0..n).map(move |l| (k, l)))
                .map(|(k, l)| gi[[k, l]] * a[[s, k, l]])
                .sum()
        })
        .collect();
    let mut acc = 0.0;
    for r in 0..n {
        for q in 0..n {
            for s in 0..n {
                acc += d.du[r] * grad[q] * t[[r, s, q]] * mean_cartan[s];
            }
        }
    }
    let nf = n as f64;
    Ok((nf - 1.0) / (2.0 * nf * (nf - 2.0) * geo.f_value()) * acc)
}

/// Residual of the Einstein preservation equation:
///
/// `∇_j∇_i u - (1/n)(Δu - |∇u|²) g_ij - ∇_i u ∇_j u - C g_ij`
///
/// with `C` the Cartan term. Requires `n >= 3`.
pub fn ee9_residual<M, U>(m: &M, u: &U, p: &PointState) -> Result<Array2<f64>>
where
    M: FinslerMetric + ?Sized,
    U: ScalarField,
{
    if m.dim() < 3 {
        return Err(GeometryError::DimensionTooSmall { min: 3, got: m.dim() });
    }
    let diag = conformal_diagnostics(m, u, p)?;
    Ok(diag.ee9_residual.expect("n >= 3"))
}

/// All per-point conformal quantities in one pipeline run.
pub fn conformal_diagnostics<M, U>(m: &M, u: &U, p: &PointState) -> Result<ConformalDiagnostics>
where
    M: FinslerMetric + ?Sized,
    U: ScalarField,
{
    let geo = Geometry::at(m, p)?;
    diagnostics_from(&geo, u)
}

fn diagnostics_from<U: ScalarField>(geo: &Geometry, u: &U) -> Result<ConformalDiagnostics> {
    let n = geo.dim();
    let d = FactorDerivatives::at(geo, u)?;
    let hess = hessian_from(geo, &d)?;
    let (grad, norm) = raise(geo, &d);
    let lap = trace(geo.g_inv(), &hess);
    let t = fiber_derivative_tensor(geo)?;
    let bmap = bmap_from(geo, &d, &t);
    let (ee9, cartan_term) = if n >= 3 {
        let c = ee9_cartan_term(geo, &d, &grad, &t)?;
        let g = geo.g();
        let nf = n as f64;
        let res = Array2::from_shape_fn((n, n), |(i, j)| {
            hess[[i, j]] - (lap - norm) / nf * g[[i, j]] - d.du[i] * d.du[j] - c * g[[i, j]]
        });
        (Some(res), c)
    } else {
        (None, 0.0)
    };
    Ok(ConformalDiagnostics {
        hess_u: hess,
        grad_u: grad,
        grad_norm_sq: norm,
        laplacian_h: lap,
        bmap,
        ee9_residual: ee9,
        ee9_cartan_term: cartan_term,
    })
}

/// Trace-free Ricci tensors of a conformal pair and the measured gap of the
/// transformation law.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalGap {
    pub efree_base: Array2<f64>,
    pub efree_deformed: Array2<f64>,
    /// `Ẽ - [E - (n-2)(H_u - du∘du) - ((n-2)/n)(Δu + |∇u|²) g]`
    pub gap: Array2<f64>,
    /// `Ẽ - [E - (n-2)(H_u - du∘du) + ((n-2)/n)(Δu - |∇u|²) g]`, the
    /// Riemannian transformation law written in the same quantities.
    pub classical_gap: Array2<f64>,
}

pub fn eq122b_gap<M, U>(pair: &ConformalPair<M, U>, p: &PointState) -> Result<ConformalGap>
where
    M: FinslerMetric,
    U: ScalarField,
{
    let base = Geometry::at(&pair.base, p)?;
    let deformed_metric = pair.deformed();
    let deformed = Geometry::at(&deformed_metric, p)?;
    let n = base.dim();
    let nf = n as f64;
    let e = RicciData::from_curvature(&base.hh_curvature()?, base.g(), base.g_inv()).efree;
    let et = RicciData::from_curvature(&deformed.hh_curvature()?, deformed.g(), deformed.g_inv()).efree;
    let d = FactorDerivatives::at(&base, &pair.u)?;
    let hess = hessian_from(&base, &d)?;
    let (_, norm) = raise(&base, &d);
    let lap = trace(base.g_inv(), &hess);
    let g = base.g();
    let core = Array2::from_shape_fn((n, n), |(i, j)| {
        e[[i, j]] - (nf - 2.0) * (hess[[i, j]] - d.du[i] * d.du[j])
    });
    let gap = Array2::from_shape_fn((n, n), |(i, j)| {
        et[[i, j]] - (core[[i, j]] - (nf - 2.0) / nf * (lap + norm) * g[[i, j]])
    });
    let classical_gap = Array2::from_shape_fn((n, n), |(i, j)| {
        et[[i, j]] - (core[[i, j]] + (nf - 2.0) / nf * (lap - norm) * g[[i, j]])
    });
    Ok(ConformalGap {
        efree_base: e,
        efree_deformed: et,
        gap,
        classical_gap,
    })
}

/// `|φ'(t)|` below this excludes a sample from a cylinder scan.
pub const DEGENERATE_SLOPE: f64 = 1e-2;

/// The cylinder `((lo, hi) × M₂, sqrt(y_t² + φ'(t)² F₂²))`.
pub type Cylinder<M2, P> = WarpedProductMetric<Interval, M2, ProfileSlope<P>>;

pub fn make_cylinder<M2: FinslerMetric, P: Profile + Clone>(m2: M2, phi: P, eps: f64) -> Result<Cylinder<M2, P>> {
    if !(eps > 0.0) {
        return Err(GeometryError::InvalidParameter(format!("cylinder length must be positive, got {eps}")));
    }
    Ok(WarpedProductMetric::new_unchecked(
        Interval { lo: 0.0, hi: eps },
        m2,
        ProfileSlope(phi),
    ))
}

/// `ln φ(t)`, the factor taking the cylinder back to the base metric `φ F`.
#[derive(Debug, Clone)]
struct LogProfile<P> {
    profile: P,
    dim: usize,
}

impl<P: Profile> ScalarField for LogProfile<P> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<S: Real>(&self, x: &[S]) -> S {
        self.profile.value(&x[0]).ln()
    }
    fn label(&self) -> String {
        format!("ln({})", self.profile.label())
    }
}

/// One sampled point of a cylinder scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPoint {
    pub point: PointState,
    pub phi_ddot: f64,
    /// `max |∇_j∇_i φ - φ̈ g_ij|`
    pub hessian_residual: f64,
    /// Einstein residual of the cylinder metric `φ^{-1} F`.
    pub einstein_cylinder: f64,
    /// Einstein residual of the base metric `F = φ · F_cyl`.
    pub einstein_base: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CylinderReport {
    pub points: Vec<CylinderPoint>,
    pub excluded: usize,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl CylinderReport {
    pub fn max_hessian_residual(&self) -> f64 {
        max_abs(self.points.iter().map(|p| &p.hessian_residual))
    }
}

/// A cylinder together with the profile and the base metric `φ F_cyl`,
/// ready to be checked point by point.
#[derive(Debug, Clone)]
pub struct CylinderSetup<M2, P> {
    cyl: Cylinder<M2, P>,
    phi: P,
}

impl<M2: FinslerMetric, P: Profile + Clone> CylinderSetup<M2, P> {
    pub fn new(m2: M2, phi: P, eps: f64) -> Result<Self> {
        Ok(Self {
            cyl: make_cylinder(m2, phi.clone(), eps)?,
            phi,
        })
    }

    pub fn cylinder(&self) -> &Cylinder<M2, P> {
        &self.cyl
    }

    /// `None` when `|φ'(t)|` is below [`DEGENERATE_SLOPE`].
    pub fn check_point(&self, p: &PointState) -> Result<Option<CylinderPoint>> {
        let slope = self.phi.derivative(&p.x()[0]);
        if slope.abs() < DEGENERATE_SLOPE {
            return Ok(None);
        }
        let n = self.cyl.dim();
        let factor = ProfileFactor {
            profile: self.phi.clone(),
            dim: n,
        };
        let base = ConformalMetric::new(
            &self.cyl,
            LogProfile {
                profile: self.phi.clone(),
                dim: n,
            },
        );
        cylinder_point(&self.cyl, &base, &factor, p).map(Some)
    }
}

impl<M2: FinslerMetric, P: Profile + Clone> FinslerMetric for CylinderSetup<M2, P> {
    fn dim(&self) -> usize {
        self.cyl.dim()
    }
    fn label(&self) -> String {
        format!("cylinder[{}]", self.cyl.label())
    }
    fn evaluate_sq(&self, x: &[crate::jets::Jet], y: &[crate::jets::Jet]) -> crate::jets::Jet {
        self.cyl.evaluate_sq(x, y)
    }
    fn domain(&self) -> crate::metric::Domain {
        self.cyl.domain()
    }
}

/// Checks `∇∇φ = φ̈ g` on the cylinder over `m2` with profile `phi` at
/// `samples` seeded points.
pub fn cylinder_check<M2, P>(m2: M2, phi: P, eps: f64, samples: usize) -> Result<CylinderReport>
where
    M2: FinslerMetric,
    P: Profile + Clone,
{
    cylinder_check_with(m2, phi, eps, &SamplePlan::new(samples, 0))
}

pub fn cylinder_check_with<M2, P>(m2: M2, phi: P, eps: f64, plan: &SamplePlan) -> Result<CylinderReport>
where
    M2: FinslerMetric,
    P: Profile + Clone,
{
    let setup = CylinderSetup::new(m2, phi, eps)?;
    let mut report = CylinderReport::default();
    for p in plan.points(setup.cylinder()) {
        match setup.check_point(&p) {
            Ok(Some(cp)) => report.points.push(cp),
            Ok(None) => {
                report.excluded += 1;
                report.warnings.push(degenerate_warning(&p));
            }
            Err(e) => report.errors.push(format!("{p}: {e}")),
        }
    }
    Ok(report)
}

/// Message recorded for a sample dropped by [`DEGENERATE_SLOPE`].
pub fn degenerate_warning(p: &PointState) -> String {
    format!("excluded t = {}: degenerate warping φ'(t) below {DEGENERATE_SLOPE:e}", p.x()[0])
}

fn cylinder_point<C, B, U>(cyl: &C, base: &B, factor: &U, p: &PointState) -> Result<CylinderPoint>
where
    C: FinslerMetric,
    B: FinslerMetric,
    U: ScalarField,
{
    let geo = Geometry::at(cyl, p)?;
    let d = FactorDerivatives::at(&geo, factor)?;
    let hess = hessian_from(&geo, &d)?;
    let phi_ddot = d.ddu[[0, 0]];
    let resid = &hess - &(geo.g() * phi_ddot);
    let ein_cyl = RicciData::from_curvature(&geo.hh_curvature()?, geo.g(), geo.g_inv()).einstein_residual;
    let bgeo = Geometry::at(base, p)?;
    let ein_base = RicciData::from_curvature(&bgeo.hh_curvature()?, bgeo.g(), bgeo.g_inv()).einstein_residual;
    Ok(CylinderPoint {
        point: p.clone(),
        phi_ddot,
        hessian_residual: max_abs(resid.iter()),
        einstein_cylinder: ein_cyl,
        einstein_base: ein_base,
    })
}
