//! Concrete metrics: norms, Riemannian wrappers, Randers metrics, warped
//! products, conformal deformations and the warped three-sphere.

use std::f64::consts::PI;

use crate::curvature::{fundamental_tensor, lower_curvature, Geometry};
use crate::error::{GeometryError, Result};
use crate::jets::{Jet, Real};
use crate::metric::{Domain, FinslerMetric, MetricField, PointState, SamplePlan, ScalarField};

/// Margin kept from coordinate singularities of spherical charts.
pub const POLE_MARGIN: f64 = 0.2;

// ---------------------------------------------------------------------------
// Riemannian fields

/// Flat `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EuclideanField {
    pub dim: usize,
}

impl MetricField for EuclideanField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> String {
        format!("euclidean{}", self.dim)
    }
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| x[0].lift(if i == j { 1.0 } else { 0.0 })).collect())
            .collect()
    }
    fn domain(&self) -> Domain {
        Domain::cube(self.dim, -1.0, 1.0)
    }
}

/// Unit two-sphere in coordinates `(θ, φ)`: `dθ² + sin²θ dφ²`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundSphere2;

impl MetricField for RoundSphere2 {
    fn dim(&self) -> usize {
        2
    }
    fn label(&self) -> String {
        "sphere2".into()
    }
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>> {
        let z = x[0].lift(0.0);
        let s = x[0].sin();
        vec![vec![x[0].lift(1.0), z.clone()], vec![z, s.clone() * s]]
    }
    fn domain(&self) -> Domain {
        Domain::new(vec![POLE_MARGIN, -PI], vec![PI - POLE_MARGIN, PI])
    }
}

/// Unit three-sphere in hyperspherical coordinates `(t, θ, φ)`:
/// `dt² + sin²t (dθ² + sin²θ dφ²)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundSphere3;

impl MetricField for RoundSphere3 {
    fn dim(&self) -> usize {
        3
    }
    fn label(&self) -> String {
        "sphere3".into()
    }
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>> {
        let z = x[0].lift(0.0);
        let st = x[0].sin();
        let sth = x[1].sin();
        let a = st.clone() * st;
        let b = a.clone() * sth.clone() * sth;
        vec![
            vec![x[0].lift(1.0), z.clone(), z.clone()],
            vec![z.clone(), a, z.clone()],
            vec![z.clone(), z, b],
        ]
    }
    fn domain(&self) -> Domain {
        Domain::new(
            vec![POLE_MARGIN, POLE_MARGIN, -PI],
            vec![PI - POLE_MARGIN, PI - POLE_MARGIN, PI],
        )
    }
}

/// Upper half-plane `(dx₁² + dx₂²) / x₂²`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HyperbolicPlane;

impl MetricField for HyperbolicPlane {
    fn dim(&self) -> usize {
        2
    }
    fn label(&self) -> String {
        "hyperbolic2".into()
    }
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>> {
        let w = (x[1].clone() * x[1].clone()).powf(-1.0);
        let z = x[0].lift(0.0);
        vec![vec![w.clone(), z.clone()], vec![z, w]]
    }
    fn domain(&self) -> Domain {
        Domain::new(vec![-1.0, 0.5], vec![1.0, 2.0])
    }
}

/// The shipped Riemannian fields, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedField {
    Euclidean(usize),
    Sphere2,
    Sphere3,
    Hyperbolic2,
}

impl NamedField {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "sphere2" => Some(Self::Sphere2),
            "sphere3" => Some(Self::Sphere3),
            "hyperbolic2" | "hyperbolic" => Some(Self::Hyperbolic2),
            _ => name
                .strip_prefix("euclidean")
                .and_then(|d| d.parse().ok())
                .filter(|d| *d >= 1)
                .map(Self::Euclidean),
        }
    }
}

impl MetricField for NamedField {
    fn dim(&self) -> usize {
        match self {
            Self::Euclidean(n) => *n,
            Self::Sphere2 | Self::Hyperbolic2 => 2,
            Self::Sphere3 => 3,
        }
    }
    fn label(&self) -> String {
        match self {
            Self::Euclidean(n) => EuclideanField { dim: *n }.label(),
            Self::Sphere2 => RoundSphere2.label(),
            Self::Sphere3 => RoundSphere3.label(),
            Self::Hyperbolic2 => HyperbolicPlane.label(),
        }
    }
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>> {
        match self {
            Self::Euclidean(n) => EuclideanField { dim: *n }.metric(x),
            Self::Sphere2 => RoundSphere2.metric(x),
            Self::Sphere3 => RoundSphere3.metric(x),
            Self::Hyperbolic2 => HyperbolicPlane.metric(x),
        }
    }
    fn domain(&self) -> Domain {
        match self {
            Self::Euclidean(n) => EuclideanField { dim: *n }.domain(),
            Self::Sphere2 => RoundSphere2.domain(),
            Self::Sphere3 => RoundSphere3.domain(),
            Self::Hyperbolic2 => HyperbolicPlane.domain(),
        }
    }
}

// ---------------------------------------------------------------------------
// Finsler metrics

/// `F = |y|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

pub fn make_euclidean(n: usize) -> Result<Euclidean> {
    if n == 0 {
        return Err(GeometryError::InvalidParameter("dimension must be positive".into()));
    }
    Ok(Euclidean { dim: n })
}

impl FinslerMetric for Euclidean {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> String {
        format!("euclidean{}", self.dim)
    }
    fn evaluate_sq(&self, _x: &[Jet], y: &[Jet]) -> Jet {
        sum_squares(y)
    }
    fn domain(&self) -> Domain {
        Domain::cube(self.dim, -1.0, 1.0)
    }
}

fn sum_squares(y: &[Jet]) -> Jet {
    y.iter().skip(1).fold(&y[0] * &y[0], |acc, v| acc + v * v)
}

/// `F = sqrt(g_ij(x) y^i y^j)` for a Riemannian field.
#[derive(Debug, Clone, PartialEq)]
pub struct Riemannian<G> {
    field: G,
}

pub fn make_riemannian<G: MetricField>(field: G) -> Riemannian<G> {
    Riemannian { field }
}

impl<G: MetricField> Riemannian<G> {
    pub fn field(&self) -> &G {
        &self.field
    }
}

impl<G: MetricField> FinslerMetric for Riemannian<G> {
    fn dim(&self) -> usize {
        self.field.dim()
    }
    fn label(&self) -> String {
        self.field.label()
    }
    fn evaluate_sq(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let g = self.field.metric(x);
        let mut acc = y[0].lift(0.0);
        for (i, row) in g.iter().enumerate() {
            for (j, gij) in row.iter().enumerate() {
                acc = acc + gij * &y[i] * &y[j];
            }
        }
        acc
    }
    fn domain(&self) -> Domain {
        self.field.domain()
    }
}

/// `F = |y| + b·y` with a constant one-form `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Randers {
    b: Vec<f64>,
}

pub fn make_randers(b: Vec<f64>) -> Result<Randers> {
    let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b.is_empty() {
        return Err(GeometryError::InvalidParameter("Randers one-form must be non-empty".into()));
    }
    if !(norm < 1.0) {
        return Err(GeometryError::InvalidParameter(format!(
            "Randers requires ‖b‖<1 (got ‖b‖ = {norm})"
        )));
    }
    Ok(Randers { b })
}

impl Randers {
    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

impl FinslerMetric for Randers {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn label(&self) -> String {
        format!("randers{:?}", self.b)
    }
    fn evaluate(&self, _x: &[Jet], y: &[Jet]) -> Jet {
        let alpha = Real::sqrt(&sum_squares(y));
        y.iter().zip(&self.b).fold(alpha, |acc, (yi, bi)| acc + yi * *bi)
    }
    fn evaluate_sq(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let f = self.evaluate(x, y);
        &f * &f
    }
    fn domain(&self) -> Domain {
        Domain::cube(self.dim(), -1.0, 1.0)
    }
}

// ---------------------------------------------------------------------------
// Scalar functions

/// Scalar functions used as conformal factors and warping functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// `c`
    Constant { dim: usize, value: f64 },
    /// `offset + coeffs · x`
    Linear { coeffs: Vec<f64>, offset: f64 },
    /// `sin x_k`
    Sin { dim: usize, coord: usize },
    /// `cos x_k + c`
    CosPlus { dim: usize, coord: usize, c: f64 },
    /// `-ln(cos x_k + c)`
    NegLogCosPlus { dim: usize, coord: usize, c: f64 },
    /// `a + cos x_k`
    ShiftedCos { dim: usize, coord: usize, a: f64 },
}

impl ScalarField for Factor {
    fn dim(&self) -> usize {
        match self {
            Factor::Linear { coeffs, .. } => coeffs.len(),
            Factor::Constant { dim, .. }
            | Factor::Sin { dim, .. }
            | Factor::CosPlus { dim, .. }
            | Factor::NegLogCosPlus { dim, .. }
            | Factor::ShiftedCos { dim, .. } => *dim,
        }
    }

    fn eval<S: Real>(&self, x: &[S]) -> S {
        match self {
            Factor::Constant { value, .. } => x[0].lift(*value),
            Factor::Linear { coeffs, offset } => x
                .iter()
                .zip(coeffs)
                .fold(x[0].lift(*offset), |acc, (xi, ci)| acc + xi.clone() * *ci),
            Factor::Sin { coord, .. } => x[*coord].sin(),
            Factor::CosPlus { coord, c, .. } => x[*coord].cos() + *c,
            Factor::NegLogCosPlus { coord, c, .. } => -(x[*coord].cos() + *c).ln(),
            Factor::ShiftedCos { coord, a, .. } => x[*coord].cos() + *a,
        }
    }

    fn label(&self) -> String {
        match self {
            Factor::Constant { value, .. } => format!("const:{value}"),
            Factor::Linear { coeffs, offset } => format!("linear:{offset}+{coeffs:?}·x"),
            Factor::Sin { coord, .. } => format!("sin(x{coord})"),
            Factor::CosPlus { coord, c, .. } => format!("cos(x{coord})+{c}"),
            Factor::NegLogCosPlus { coord, c, .. } => format!("-ln(cos(x{coord})+{c})"),
            Factor::ShiftedCos { coord, a, .. } => format!("{a}+cos(x{coord})"),
        }
    }
}

/// Profile `φ(t)` of a cylinder, with its first derivative in closed form.
pub trait Profile: Send + Sync {
    fn value<S: Real>(&self, t: &S) -> S;
    fn derivative<S: Real>(&self, t: &S) -> S;
    fn label(&self) -> String;
}

/// `φ(t) = cos t + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosPlusConst {
    pub c: f64,
}

impl Profile for CosPlusConst {
    fn value<S: Real>(&self, t: &S) -> S {
        t.cos() + self.c
    }
    fn derivative<S: Real>(&self, t: &S) -> S {
        -t.sin()
    }
    fn label(&self) -> String {
        format!("cos+{}", self.c)
    }
}

/// `φ(t) = slope · t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearProfile {
    pub slope: f64,
    pub intercept: f64,
}

impl Profile for LinearProfile {
    fn value<S: Real>(&self, t: &S) -> S {
        t.clone() * self.slope + self.intercept
    }
    fn derivative<S: Real>(&self, t: &S) -> S {
        t.lift(self.slope)
    }
    fn label(&self) -> String {
        format!("linear:{}t+{}", self.slope, self.intercept)
    }
}

/// Shipped profiles, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedProfile {
    CosPlus(CosPlusConst),
    Linear(LinearProfile),
}

impl Profile for NamedProfile {
    fn value<S: Real>(&self, t: &S) -> S {
        match self {
            Self::CosPlus(p) => p.value(t),
            Self::Linear(p) => p.value(t),
        }
    }
    fn derivative<S: Real>(&self, t: &S) -> S {
        match self {
            Self::CosPlus(p) => p.derivative(t),
            Self::Linear(p) => p.derivative(t),
        }
    }
    fn label(&self) -> String {
        match self {
            Self::CosPlus(p) => p.label(),
            Self::Linear(p) => p.label(),
        }
    }
}

/// `φ'` of a profile, seen as a function on the one-dimensional factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSlope<P>(pub P);

impl<P: Profile> ScalarField for ProfileSlope<P> {
    fn dim(&self) -> usize {
        1
    }
    fn eval<S: Real>(&self, x: &[S]) -> S {
        self.0.derivative(&x[0])
    }
    fn label(&self) -> String {
        format!("d/dt[{}]", self.0.label())
    }
}

/// `φ(t)` of a profile as a function on `(0, ε) × M₂`: depends on the first
/// coordinate only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFactor<P> {
    pub profile: P,
    pub dim: usize,
}

impl<P: Profile> ScalarField for ProfileFactor<P> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval<S: Real>(&self, x: &[S]) -> S {
        self.profile.value(&x[0])
    }
    fn label(&self) -> String {
        self.profile.label()
    }
}

// ---------------------------------------------------------------------------
// Warped products

/// `F² = F₁²(x₁, y₁) + f(x₁)² F₂²(x₂, y₂)` on `M₁ × M₂`.
#[derive(Debug, Clone)]
pub struct WarpedProductMetric<M1, M2, W> {
    m1: M1,
    m2: M2,
    warp: W,
    domain: Option<Domain>,
}

impl<M1: FinslerMetric, M2: FinslerMetric, W: ScalarField> WarpedProductMetric<M1, M2, W> {
    /// Builds the product without checking the sign of the warping
    /// function; only `f²` enters the metric.
    pub fn new_unchecked(m1: M1, m2: M2, warp: W) -> Self {
        Self {
            m1,
            m2,
            warp,
            domain: None,
        }
    }

    /// Restricts the sampling box.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn first(&self) -> &M1 {
        &self.m1
    }

    pub fn second(&self) -> &M2 {
        &self.m2
    }

    pub fn warp(&self) -> &W {
        &self.warp
    }

    /// `n₁`: leading coordinates belong to the first factor.
    pub fn split(&self) -> usize {
        self.m1.dim()
    }

    pub fn warp_value(&self, x1: &[f64]) -> f64 {
        self.warp.eval(x1)
    }
}

/// Checks `f > 0` at `samples` sampled base points and builds the product.
pub fn make_warped<M1, M2, W>(m1: M1, m2: M2, warp: W, samples: usize) -> Result<WarpedProductMetric<M1, M2, W>>
where
    M1: FinslerMetric,
    M2: FinslerMetric,
    W: ScalarField,
{
    if warp.dim() != m1.dim() {
        return Err(GeometryError::InvalidParameter(format!(
            "warping function has dimension {}, first factor {}",
            warp.dim(),
            m1.dim()
        )));
    }
    let wp = WarpedProductMetric::new_unchecked(m1, m2, warp);
    for p in SamplePlan::new(samples, 0x5eed).points(&wp) {
        let f = wp.warp_value(&p.x()[..wp.split()]);
        if !(f > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "warping function must be positive, got {f} at x = {:?}",
                p.x()
            )));
        }
    }
    Ok(wp)
}

impl<M1: FinslerMetric, M2: FinslerMetric, W: ScalarField> FinslerMetric for WarpedProductMetric<M1, M2, W> {
    fn dim(&self) -> usize {
        self.m1.dim() + self.m2.dim()
    }
    fn label(&self) -> String {
        format!(
            "{}×[{}]{}",
            self.m1.label(),
            self.warp.label(),
            self.m2.label()
        )
    }
    fn evaluate_sq(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let k = self.split();
        let f1 = self.m1.evaluate_sq(&x[..k], &y[..k]);
        let f2 = self.m2.evaluate_sq(&x[k..], &y[k..]);
        let w = self.warp.eval(&x[..k]);
        f1 + &w * &w * f2
    }
    fn domain(&self) -> Domain {
        self.domain
            .clone()
            .unwrap_or_else(|| self.m1.domain().product(&self.m2.domain()))
    }
}

/// Residuals of the structure results for warped products at one point.
/// Indices `a, b, c` run over the first factor, `α, β` over the second.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedDiagnostics {
    /// `max |g - diag(g₁(x₁, y₁), f² g₂(x₂, y₂))|`
    pub block: f64,
    /// `max |Γ^α_aβ - (∂_a f / f) δ^α_β|`, together with `Γ^α_βa`.
    pub mixed_connection: f64,
    /// `max |Γ^a_bc - Γ₁^a_bc|`
    pub first_connection: f64,
    /// `max |R(∂_a, ∂_b, δ_α, δ_c)|`
    pub mixed_curvature: f64,
    /// `max |R_abcd - R₁_abcd|`, lowered curvature on first-factor slots.
    pub first_curvature: f64,
}

impl<M1: FinslerMetric, M2: FinslerMetric, W: ScalarField> WarpedProductMetric<M1, M2, W> {
    /// Compares the product's tensors with those of its factors at `p`.
    /// Needs jet order 4 and both `y₁` and `y₂` nonzero.
    pub fn diagnostics(&self, p: &PointState) -> Result<WarpedDiagnostics> {
        let k = self.split();
        let n = self.dim();
        let (x, y) = (p.x(), p.y());
        let p1 = PointState::new(x[..k].to_vec(), y[..k].to_vec())?.with_order(p.order());
        let p2 = PointState::new(x[k..].to_vec(), y[k..].to_vec())?.with_order(2);

        let geo = Geometry::at(self, p)?;
        let geo1 = Geometry::at(&self.m1, &p1)?;
        let g2 = fundamental_tensor(&self.m2, &p2)?.g;
        let fj = self.warp.eval(&geo.x_jets()[..k]);
        let f = fj.value();

        let g = geo.g();
        let mut block: f64 = 0.0;
        for ((i, j), v) in g.indexed_iter() {
            let expected = match (i < k, j < k) {
                (true, true) => geo1.g()[[i, j]],
                (false, false) => f * f * g2[[i - k, j - k]],
                _ => 0.0,
            };
            block = block.max((v - expected).abs());
        }

        let chern = geo.chern()?;
        let chern1 = geo1.chern()?;
        let mut mixed_connection: f64 = 0.0;
        for a in 0..k {
            let rate = fj.first(a) / f;
            for al in k..n {
                for be in k..n {
                    let expected = if al == be { rate } else { 0.0 };
                    mixed_connection = mixed_connection
                        .max((chern[[al, a, be]] - expected).abs())
                        .max((chern[[al, be, a]] - expected).abs());
                }
            }
        }
        let mut first_connection: f64 = 0.0;
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    first_connection = first_connection.max((chern[[a, b, c]] - chern1[[a, b, c]]).abs());
                }
            }
        }

        let r = lower_curvature(&geo.hh_curvature()?, g);
        let r1 = lower_curvature(&geo1.hh_curvature()?, geo1.g());
        let mut mixed_curvature: f64 = 0.0;
        let mut first_curvature: f64 = 0.0;
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for al in k..n {
                        mixed_curvature = mixed_curvature.max(r[[a, b, al, c]].abs());
                    }
                    for d in 0..k {
                        first_curvature = first_curvature.max((r[[a, b, c, d]] - r1[[a, b, c, d]]).abs());
                    }
                }
            }
        }
        Ok(WarpedDiagnostics {
            block,
            mixed_connection,
            first_connection,
            mixed_curvature,
            first_curvature,
        })
    }
}

/// The interval factor `(lo, hi)` with `F₁ = |y_t|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl FinslerMetric for Interval {
    fn dim(&self) -> usize {
        1
    }
    fn label(&self) -> String {
        format!("({},{})", self.lo, self.hi)
    }
    fn evaluate_sq(&self, _x: &[Jet], y: &[Jet]) -> Jet {
        &y[0] * &y[0]
    }
    fn domain(&self) -> Domain {
        Domain::new(vec![self.lo], vec![self.hi])
    }
}

/// The warped three-sphere `(0, π) ×_{sin t} S²`.
pub type SphereExample = WarpedProductMetric<Interval, Riemannian<RoundSphere2>, Factor>;

/// `(0, π) ×_{sin t} S²` with `F² = y_t² + sin²t F_{S²}²`, and the test
/// function `φ(t) = cos t + c`.
///
/// The sampling box keeps `t` and `θ` at least [`POLE_MARGIN`] away from
/// the coordinate singularities.
pub fn make_s5_example(c: f64) -> Result<(SphereExample, CosPlusConst)> {
    if !(c > 1.0) {
        return Err(GeometryError::InvalidParameter(format!("s5 example requires c > 1, got {c}")));
    }
    let m = make_warped(
        Interval {
            lo: POLE_MARGIN,
            hi: PI - POLE_MARGIN,
        },
        make_riemannian(RoundSphere2),
        Factor::Sin { dim: 1, coord: 0 },
        64,
    )?;
    Ok((m, CosPlusConst { c }))
}

// ---------------------------------------------------------------------------
// Conformal deformations

/// `F̃ = e^{u(x)} F`.
#[derive(Debug, Clone)]
pub struct ConformalMetric<M, U> {
    base: M,
    u: U,
}

impl<M, U> ConformalMetric<M, U> {
    pub fn new(base: M, u: U) -> Self {
        Self { base, u }
    }
}

impl<M: FinslerMetric, U: ScalarField> FinslerMetric for ConformalMetric<M, U> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn label(&self) -> String {
        format!("exp({})·{}", self.u.label(), self.base.label())
    }
    fn evaluate(&self, x: &[Jet], y: &[Jet]) -> Jet {
        self.u.eval(x).exp() * self.base.evaluate(x, y)
    }
    fn evaluate_sq(&self, x: &[Jet], y: &[Jet]) -> Jet {
        (self.u.eval(x) * 2.0).exp() * self.base.evaluate_sq(x, y)
    }
    fn domain(&self) -> Domain {
        self.base.domain()
    }
}

/// A base metric, a conformal factor `u` on the base manifold, and the
/// deformed metric `e^u F`.
#[derive(Debug, Clone)]
pub struct ConformalPair<M, U> {
    pub base: M,
    pub u: U,
}

impl<M: FinslerMetric, U: ScalarField> ConformalPair<M, U> {
    pub fn deformed(&self) -> ConformalMetric<&M, &U> {
        ConformalMetric {
            base: &self.base,
            u: &self.u,
        }
    }
}

pub fn make_conformal<M: FinslerMetric, U: ScalarField>(base: M, u: U) -> Result<ConformalPair<M, U>> {
    if u.dim() != base.dim() {
        return Err(GeometryError::InvalidParameter(format!(
            "conformal factor has dimension {}, metric {}",
            u.dim(),
            base.dim()
        )));
    }
    Ok(ConformalPair { base, u })
}

/// One instance of every metric family the crate ships, with fixed
/// parameters. Property suites iterate over this list.
pub fn catalog() -> Vec<Box<dyn FinslerMetric>> {
    let (s5, _) = make_s5_example(2.0).expect("valid parameter");
    vec![
        Box::new(make_euclidean(2).expect("n > 0")),
        Box::new(make_euclidean(3).expect("n > 0")),
        Box::new(make_riemannian(RoundSphere2)),
        Box::new(make_riemannian(RoundSphere3)),
        Box::new(make_riemannian(HyperbolicPlane)),
        Box::new(make_randers(vec![0.3, -0.2]).expect("small one-form")),
        Box::new(make_randers(vec![0.1, 0.4, -0.25]).expect("small one-form")),
        Box::new(s5),
        Box::new(
            make_warped(
                make_riemannian(RoundSphere2),
                make_euclidean(1).expect("n > 0"),
                Factor::ShiftedCos { dim: 2, coord: 0, a: 2.0 },
                16,
            )
            .expect("positive warp"),
        ),
        Box::new(ConformalMetric::new(
            make_randers(vec![0.2, 0.1, 0.0]).expect("small one-form"),
            Factor::Linear {
                coeffs: vec![0.3, -0.1, 0.2],
                offset: 0.0,
            },
        )),
    ]
}
