//! Metric abstractions: Finsler metrics on the slit tangent bundle, the
//! Riemannian fields and scalar functions they are built from, and the
//! sampling of points `(x, y)`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GeometryError, Result};
use crate::jets::{Jet, Real, DEFAULT_ORDER};

/// Axis-aligned box of base coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Concatenation, for product manifolds.
    pub fn product(&self, other: &Domain) -> Domain {
        Domain::new(
            self.lower.iter().chain(&other.lower).copied().collect(),
            self.upper.iter().chain(&other.upper).copied().collect(),
        )
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn sample_uniform(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect()
    }
}

/// A point `(x, y)` of the slit tangent bundle, with the jet order used to
/// expand metric quantities there.
#[derive(Debug, Clone, PartialEq)]
pub struct PointState {
    x: Vec<f64>,
    y: Vec<f64>,
    order: usize,
}

impl PointState {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(GeometryError::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        if !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(GeometryError::NonFinite("point coordinates"));
        }
        if y.iter().all(|v| *v == 0.0) {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self {
            x,
            y,
            order: DEFAULT_ORDER,
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Same base point, fiber coordinate scaled by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Ok(Self::new(self.x.clone(), self.y.iter().map(|v| c * v).collect())?.with_order(self.order))
    }

    /// The 2n coordinates `(x, y)` concatenated.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }
}

/// A Finsler metric `F(x, y)`, evaluated on jets seeded in the `2n`
/// variables `(x, y)`.
///
/// Implementations provide `F^2`; `F` defaults to its square root.
/// Evaluation must be pure: the pipeline calls it from many threads.
pub trait FinslerMetric: Send + Sync {
    fn dim(&self) -> usize;

    fn label(&self) -> String;

    /// `F^2(x, y)`.
    fn evaluate_sq(&self, x: &[Jet], y: &[Jet]) -> Jet;

    /// `F(x, y)`.
    fn evaluate(&self, x: &[Jet], y: &[Jet]) -> Jet {
        Real::sqrt(&self.evaluate_sq(x, y))
    }

    /// Chart box the sampler draws base points from.
    fn domain(&self) -> Domain;

    /// Draws a valid point: `x` uniform in [`FinslerMetric::domain`], `y`
    /// uniform on the unit sphere.
    fn sample(&self, rng: &mut dyn RngCore) -> PointState {
        let x = self.domain().sample_uniform(rng);
        let y = unit_direction(self.dim(), rng);
        PointState::new(x, y).expect("sampler produced an invalid point")
    }

    /// Plain value of `F` at `(x, y)`.
    fn value_at(&self, x: &[f64], y: &[f64]) -> f64 {
        let (xs, ys) = constant_jets(x, y);
        self.evaluate(&xs, &ys).value()
    }
}

/// Order-0 jets for pure value evaluation.
pub(crate) fn constant_jets(x: &[f64], y: &[f64]) -> (Vec<Jet>, Vec<Jet>) {
    let nv = x.len() + y.len();
    (
        x.iter().map(|&v| Jet::constant(nv, 0, v)).collect(),
        y.iter().map(|&v| Jet::constant(nv, 0, v)).collect(),
    )
}

macro_rules! forward_metric {
    ($ty:ty) => {
        impl<M: FinslerMetric + ?Sized> FinslerMetric for $ty {
            fn dim(&self) -> usize {
                (**self).dim()
            }
            fn label(&self) -> String {
                (**self).label()
            }
            fn evaluate_sq(&self, x: &[Jet], y: &[Jet]) -> Jet {
                (**self).evaluate_sq(x, y)
            }
            fn evaluate(&self, x: &[Jet], y: &[Jet]) -> Jet {
                (**self).evaluate(x, y)
            }
            fn domain(&self) -> Domain {
                (**self).domain()
            }
            fn sample(&self, rng: &mut dyn RngCore) -> PointState {
                (**self).sample(rng)
            }
        }
    };
}

forward_metric!(&M);
forward_metric!(Box<M>);
forward_metric!(Arc<M>);

/// A smooth function on a base manifold, written once for both plain
/// values and jets.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn eval<S: Real>(&self, x: &[S]) -> S;
    fn label(&self) -> String {
        String::from("u")
    }
}

impl<U: ScalarField + ?Sized> ScalarField for &U {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval<S: Real>(&self, x: &[S]) -> S {
        (**self).eval(x)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

impl<U: ScalarField + ?Sized> ScalarField for Arc<U> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval<S: Real>(&self, x: &[S]) -> S {
        (**self).eval(x)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// A Riemannian metric field `x -> g(x)`, symmetric positive definite.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;
    fn label(&self) -> String;
    /// `g_ij(x)` as a full `n x n` matrix.
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>>;
    fn domain(&self) -> Domain;
}

impl<G: MetricField + ?Sized> MetricField for &G {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn metric<S: Real>(&self, x: &[S]) -> Vec<Vec<S>> {
        (**self).metric(x)
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
}

/// Uniform direction on the unit sphere of `R^n`.
pub fn unit_direction(n: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Sampling plan for scans.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    /// Fiber vectors are drawn on the unit sphere and multiplied by this.
    pub y_scale: f64,
    /// Replaces the metric's own chart box when set.
    pub domain: Option<Domain>,
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> Self {
        Self {
            count,
            seed,
            y_scale: 1.0,
            domain: None,
        }
    }

    /// Deterministic list of points for `metric`.
    pub fn points<M: FinslerMetric + ?Sized>(&self, metric: &M) -> Vec<PointState> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let p = match &self.domain {
                    Some(d) => {
                        let x = d.sample_uniform(&mut rng);
                        let y = unit_direction(metric.dim(), &mut rng);
                        PointState::new(x, y).expect("valid sample")
                    }
                    None => metric.sample(&mut rng),
                };
                if self.y_scale == 1.0 {
                    p
                } else {
                    p.scaled(self.y_scale).expect("nonzero scale")
                }
            })
            .collect()
    }
}

impl fmt::Display for PointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={:?} y={:?}", self.x, self.y)
    }
}
