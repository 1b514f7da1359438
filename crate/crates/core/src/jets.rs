//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] stores every Taylor coefficient of a smooth function of
//! `num_vars` variables up to a fixed total degree (`order`), expanded at a
//! single point. Arithmetic and elementary functions act on the truncated
//! series, so evaluating a formula on seeded jets yields all of its mixed
//! partial derivatives at the expansion point with no truncation error.
//!
//! Coefficients are stored densely in graded-lexicographic order. Because
//! the ordering is graded, the coefficients of a jet of order `p - 1` are a
//! prefix of those of order `p`, so truncation is a slice operation and
//! differentiation maps one space onto the next smaller one.
//!
//! The module also provides [`fd_partial`], a finite-difference estimator of
//! mixed partials that shares no code with the series arithmetic and serves
//! as an oracle for it.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::JetError;

/// Default truncation order; enough for curvature of the Chern connection.
pub const DEFAULT_ORDER: usize = 4;

/// Exponent vector of a monomial `z_1^{a_1} ... z_m^{a_m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<usize>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        Self { exponents }
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::new(vec![0; num_vars])
    }

    /// `e_k`: first order in slot `k`.
    pub fn unit(num_vars: usize, k: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[k] = 1;
        Self::new(e)
    }

    /// Index from a list of variable slots, counting repeats: `[1, 1, 3]` is
    /// the multi-index of `d^3 / dz_1^2 dz_3`.
    pub fn from_slots(num_vars: usize, slots: &[usize]) -> Self {
        let mut e = vec![0; num_vars];
        for &s in slots {
            e[s] += 1;
        }
        Self::new(e)
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().sum()
    }

    /// `a_1! a_2! ... a_m!`
    pub fn factorial(&self) -> f64 {
        self.exponents
            .iter()
            .map(|&a| (1..=a).map(|k| k as f64).product::<f64>())
            .product()
    }
}

impl Ord for MultiIndex {
    /// Graded lexicographic: lower degree first, then larger leading
    /// exponents first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Number of monomials in `num_vars` variables of total degree `<= order`,
/// i.e. `C(num_vars + order, order)`.
pub fn coefficient_count(num_vars: usize, order: usize) -> usize {
    let mut c: u128 = 1;
    for k in 1..=order as u128 {
        c = c * (num_vars as u128 + k) / k;
    }
    c as usize
}

/// Shared index tables for one `(num_vars, order)` pair.
#[derive(Debug)]
struct JetSpace {
    num_vars: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<Vec<usize>, usize>,
    /// `(i, j, k)` with `indices[i] + indices[j] == indices[k]`.
    mul_table: Vec<(u32, u32, u32)>,
    /// `shift[v][i]`: position of `indices[i] + e_v`, for `deg(indices[i]) < order`.
    shift: Vec<Vec<usize>>,
}

impl JetSpace {
    fn build(num_vars: usize, order: usize) -> Self {
        let mut indices = Vec::with_capacity(coefficient_count(num_vars, order));
        for d in 0..=order {
            let mut buf = vec![0; num_vars];
            push_compositions(d, 0, &mut buf, &mut indices);
        }
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let lookup: HashMap<Vec<usize>, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, m)| (m.exponents.clone(), i))
            .collect();

        let mut mul_table = Vec::new();
        let mut sum = vec![0; num_vars];
        for (i, a) in indices.iter().enumerate() {
            let da = a.degree();
            for (j, b) in indices.iter().enumerate() {
                if da + b.degree() > order {
                    // graded order: every later b has degree >= this one
                    break;
                }
                for (s, (ea, eb)) in sum.iter_mut().zip(a.exponents.iter().zip(&b.exponents)) {
                    *s = ea + eb;
                }
                mul_table.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let below = if order == 0 {
            0
        } else {
            coefficient_count(num_vars, order - 1)
        };
        let shift = (0..num_vars)
            .map(|v| {
                indices[..below]
                    .iter()
                    .map(|m| {
                        let mut e = m.exponents.clone();
                        e[v] += 1;
                        lookup[&e]
                    })
                    .collect()
            })
            .collect();

        Self {
            num_vars,
            order,
            indices,
            lookup,
            mul_table,
            shift,
        }
    }

    fn get(num_vars: usize, order: usize) -> Arc<JetSpace> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<JetSpace>>>;
        static SPACES: OnceLock<Cache> = OnceLock::new();
        let spaces = SPACES.get_or_init(Default::default);
        let mut guard = spaces.lock().unwrap_or_else(|p| p.into_inner());
        guard
            .entry((num_vars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(num_vars, order)))
            .clone()
    }

    fn len(&self) -> usize {
        self.indices.len()
    }
}

fn push_compositions(remaining: usize, slot: usize, buf: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    let n = buf.len();
    if slot + 1 == n {
        buf[slot] = remaining;
        out.push(MultiIndex::new(buf.clone()));
        buf[slot] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        buf[slot] = a;
        push_compositions(remaining - a, slot + 1, buf, out);
    }
    buf[slot] = 0;
}

/// Truncated Taylor series in `num_vars` variables.
///
/// Coefficients are Taylor coefficients: the mixed partial divided by the
/// multi-index factorial. Use [`Jet::partial`] to read derivatives.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (m, c) in self.space.indices.iter().zip(&self.coeffs) {
            if *c != 0.0 {
                map.entry(&format_args!("{m}"), c);
            }
        }
        map.finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars() == other.num_vars() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn constant(num_vars: usize, order: usize, value: f64) -> Self {
        let space = JetSpace::get(num_vars, order);
        let mut coeffs = vec![0.0; space.len()];
        coeffs[0] = value;
        Self { space, coeffs }
    }

    /// The coordinate function `z_slot` expanded at `value`.
    ///
    /// # Panics
    ///
    /// If `slot >= num_vars`.
    pub fn variable(num_vars: usize, order: usize, value: f64, slot: usize) -> Self {
        assert!(slot < num_vars, "slot {slot} out of range for {num_vars} variables");
        let mut jet = Self::constant(num_vars, order, value);
        if order >= 1 {
            jet.coeffs[1 + slot] = 1.0;
        }
        jet
    }

    /// Builds a jet from coefficients in graded-lexicographic order.
    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Self, JetError> {
        let space = JetSpace::get(num_vars, order);
        if coeffs.len() != space.len() {
            return Err(JetError::IndexLength {
                expected: space.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    /// A constant with the same shape as `self`.
    pub fn lift(&self, value: f64) -> Self {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        coeffs[0] = value;
        Self {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.space.num_vars
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Multi-indices matching [`Jet::coeffs`] position by position.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.space.indices
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn position(&self, idx: &MultiIndex) -> Result<usize, JetError> {
        if idx.len() != self.num_vars() {
            return Err(JetError::IndexLength {
                expected: self.num_vars(),
                got: idx.len(),
            });
        }
        if idx.degree() > self.order() {
            return Err(JetError::DegreeExceedsOrder {
                degree: idx.degree(),
                order: self.order(),
            });
        }
        Ok(self.space.lookup[idx.exponents()])
    }

    /// Raw Taylor coefficient of `idx`.
    pub fn coeff(&self, idx: &MultiIndex) -> Result<f64, JetError> {
        Ok(self.coeffs[self.position(idx)?])
    }

    /// The mixed partial derivative selected by `idx`.
    pub fn partial(&self, idx: &MultiIndex) -> Result<f64, JetError> {
        Ok(self.coeff(idx)? * idx.factorial())
    }

    /// First partial in variable `slot` (degree-1 coefficient).
    pub fn first(&self, slot: usize) -> f64 {
        debug_assert!(self.order() >= 1);
        self.coeffs[1 + slot]
    }

    /// Drops every coefficient above `order`.
    ///
    /// # Panics
    ///
    /// If `order` exceeds the current order.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise jet order by truncation");
        if order == self.order() {
            return self.clone();
        }
        let space = JetSpace::get(self.num_vars(), order);
        let coeffs = self.coeffs[..space.len()].to_vec();
        Self { space, coeffs }
    }

    /// Partial derivative with respect to variable `slot`, as a jet of one
    /// lower order.
    pub fn derivative(&self, slot: usize) -> Result<Self, JetError> {
        if self.order() == 0 {
            return Err(JetError::ExhaustedOrder);
        }
        if slot >= self.num_vars() {
            return Err(JetError::IndexLength {
                expected: self.num_vars(),
                got: slot + 1,
            });
        }
        let space = JetSpace::get(self.num_vars(), self.order() - 1);
        let shift = &self.space.shift[slot];
        let coeffs = space
            .indices
            .iter()
            .enumerate()
            .map(|(t, m)| (m.exponents[slot] + 1) as f64 * self.coeffs[shift[t]])
            .collect();
        Ok(Self { space, coeffs })
    }

    /// [`Jet::derivative`] without the error path, for internal hot loops.
    pub(crate) fn d(&self, slot: usize) -> Self {
        self.derivative(slot).expect("jet derivative")
    }

    fn check_shape(&self, other: &Self) -> Result<(), JetError> {
        if Arc::ptr_eq(&self.space, &other.space)
            || (self.num_vars() == other.num_vars() && self.order() == other.order())
        {
            Ok(())
        } else {
            Err(JetError::ShapeMismatch {
                lhs_vars: self.num_vars(),
                lhs_order: self.order(),
                rhs_vars: other.num_vars(),
                rhs_order: other.order(),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.check_shape(other)?;
        Ok(self.mul_unchecked(&other.try_recip()?))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|&a| f(a)).collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len()];
        let (a, b) = (&self.coeffs, &other.coeffs);
        for &(i, j, k) in &self.space.mul_table {
            out[k as usize] += a[i as usize] * b[j as usize];
        }
        Self {
            space: self.space.clone(),
            coeffs: out,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|a| a * s)
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Evaluates `sum_k taylor[k] * h^k` where `h` is the nilpotent part of
    /// `self` (everything but the value). `taylor[k]` must be
    /// `f^(k)(value) / k!` for the composite `f(self)`.
    fn compose(&self, taylor: &[f64]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let p = self.order().min(taylor.len() - 1);
        let mut acc = self.lift(taylor[p]);
        for k in (0..p).rev() {
            acc = acc.mul_unchecked(&h);
            acc.coeffs[0] += taylor[k];
        }
        acc
    }

    pub fn try_recip(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(self.recip_unchecked())
    }

    /// `1/(a + h) = (1/a) sum_k (-h/a)^k`
    fn recip_unchecked(&self) -> Self {
        let a = self.value();
        let taylor: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / a.powi(k as i32 + 1))
            .collect();
        self.compose(&taylor)
    }

    fn powf_unchecked(&self, r: f64) -> Self {
        let a = self.value();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        // binomial series: C(r, k) a^{r-k}
        let mut binom = 1.0;
        for k in 0..=self.order() {
            taylor.push(binom * a.powf(r - k as f64));
            binom *= (r - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&taylor)
    }

    fn exp_unchecked(&self) -> Self {
        let ea = self.value().exp();
        let mut taylor = Vec::with_capacity(self.order() + 1);
        let mut fact = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                fact *= k as f64;
            }
            taylor.push(ea / fact);
        }
        self.compose(&taylor)
    }

    fn ln_unchecked(&self) -> Self {
        let a = self.value();
        let mut taylor = vec![a.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            taylor.push(sign / (k as f64 * a.powi(k as i32)));
        }
        self.compose(&taylor)
    }

    fn sin_cos_taylor(a: f64, order: usize, cosine: bool) -> Vec<f64> {
        let (s, c) = a.sin_cos();
        // derivatives cycle: sin, cos, -sin, -cos
        let cycle = if cosine { [c, -s, -c, s] } else { [s, c, -s, -c] };
        let mut fact = 1.0;
        (0..=order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                cycle[k % 4] / fact
            })
            .collect()
    }

    pub fn try_sqrt(&self) -> Result<Self, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain { func: "sqrt", value: a });
        }
        Ok(self.powf_unchecked(0.5))
    }

    pub fn try_ln(&self) -> Result<Self, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain { func: "log", value: a });
        }
        Ok(self.ln_unchecked())
    }

    /// Real power `self^r`; the value must be positive unless `r` is a
    /// non-negative integer.
    pub fn try_powf(&self, r: f64) -> Result<Self, JetError> {
        let a = self.value();
        let integral = r >= 0.0 && r.fract() == 0.0;
        if integral {
            return Ok(self.powi(r as u32));
        }
        if !(a > 0.0) {
            return Err(JetError::Domain { func: "pow", value: a });
        }
        Ok(self.powf_unchecked(r))
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = self.lift(1.0);
        for _ in 0..k {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    pub fn exp(&self) -> Self {
        self.exp_unchecked()
    }

    pub fn sin(&self) -> Self {
        self.compose(&Self::sin_cos_taylor(self.value(), self.order(), false))
    }

    pub fn cos(&self) -> Self {
        self.compose(&Self::sin_cos_taylor(self.value(), self.order(), true))
    }
}

/// Binary jet operation selector for [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn jet_arith(a: &Jet, b: &Jet, op: ArithOp) -> Result<Jet, JetError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

/// Elementary function selector for [`jet_func`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementaryFn {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Pow(f64),
}

pub fn jet_func(a: &Jet, f: ElementaryFn) -> Result<Jet, JetError> {
    match f {
        ElementaryFn::Sqrt => a.try_sqrt(),
        ElementaryFn::Exp => Ok(a.exp()),
        ElementaryFn::Log => a.try_ln(),
        ElementaryFn::Sin => Ok(a.sin()),
        ElementaryFn::Cos => Ok(a.cos()),
        ElementaryFn::Pow(r) => a.try_powf(r),
    }
}

/// Mixed partial `idx` of `a`.
pub fn extract_partial(a: &Jet, idx: &MultiIndex) -> Result<f64, JetError> {
    a.partial(idx)
}

/// Seeds `2n` independent variables `(x_1..x_n, y_1..y_n)` at the given
/// point.
pub fn seed_variables(x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>, JetError> {
    if x.is_empty() || x.len() != y.len() {
        return Err(JetError::BadSeed { x: x.len(), y: y.len() });
    }
    if order < 1 {
        return Err(JetError::OrderTooLow { min: 1, got: order });
    }
    let nv = x.len() + y.len();
    Ok(x.iter()
        .chain(y)
        .enumerate()
        .map(|(k, &v)| Jet::variable(nv, order, v, k))
        .collect())
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            /// # Panics
            ///
            /// On a shape mismatch; use the `try_` form to handle it.
            fn $method(self, rhs: &Jet) -> Jet {
                if let Err(e) = self.check_shape(rhs) {
                    panic!("{e}");
                }
                self.$checked(rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

impl Jet {
    fn add_raw(&self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
    fn sub_raw(&self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
    fn mul_raw(&self, rhs: &Jet) -> Jet {
        self.mul_unchecked(rhs)
    }
    /// Division by a zero-valued jet yields non-finite coefficients rather
    /// than an error.
    fn div_raw(&self, rhs: &Jet) -> Jet {
        self.mul_unchecked(&rhs.recip_unchecked())
    }
}

jet_binop!(Add, add, add_raw);
jet_binop!(Sub, sub, sub_raw);
jet_binop!(Mul, mul, mul_raw);
jet_binop!(Div, div, div_raw);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|a| -a)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|a| -a)
    }
}

macro_rules! jet_scalar_op {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                $body(&self, rhs)
            }
        }
        impl $trait<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                $body(self, rhs)
            }
        }
    };
}

jet_scalar_op!(Add, add, |a: &Jet, s| a.add_scalar(s));
jet_scalar_op!(Sub, sub, |a: &Jet, s: f64| a.add_scalar(-s));
jet_scalar_op!(Mul, mul, |a: &Jet, s| a.scale(s));
jet_scalar_op!(Div, div, |a: &Jet, s: f64| a.scale(1.0 / s));

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.scale(self)
    }
}

/// Scalar abstraction shared by plain `f64` and [`Jet`], so that metric
/// fields and factor functions can be written once and evaluated either
/// numerically (by the finite-difference oracle) or as jets.
///
/// Jet methods here never fail: out-of-domain arguments produce non-finite
/// coefficients, which the geometry pipeline detects.
pub trait Real:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn value(&self) -> f64;
    /// Constant of the same shape as `self`.
    fn lift(&self, c: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powf(&self, r: f64) -> Self;
    fn powi(&self, k: u32) -> Self;
}

impl Real for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn powf(&self, r: f64) -> Self {
        f64::powf(*self, r)
    }
    fn powi(&self, k: u32) -> Self {
        f64::powi(*self, k as i32)
    }
}

impl Real for Jet {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn lift(&self, c: f64) -> Self {
        Jet::lift(self, c)
    }
    fn sqrt(&self) -> Self {
        self.powf_unchecked(0.5)
    }
    fn exp(&self) -> Self {
        self.exp_unchecked()
    }
    fn ln(&self) -> Self {
        self.ln_unchecked()
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn powf(&self, r: f64) -> Self {
        if r >= 0.0 && r.fract() == 0.0 && r <= u32::MAX as f64 {
            Jet::powi(self, r as u32)
        } else {
            self.powf_unchecked(r)
        }
    }
    fn powi(&self, k: u32) -> Self {
        Jet::powi(self, k)
    }
}

/// Central finite-difference estimate of the mixed partial `idx` of `f` at
/// `point`, with one level of Richardson extrapolation.
///
/// Each differentiated direction uses the central stencil
/// `sum_j (-1)^j C(m, j) f(z + (m/2 - j) h e_k) / h^m`, whose error expands in
/// even powers of `h`; combining steps `h` and `h/2` as `(4 D(h/2) - D(h)) / 3`
/// cancels the `h^2` term, leaving `O(h^4)` truncation. Rounding error grows
/// like `eps / h^deg`, so larger derivatives want larger steps; see
/// [`default_fd_step`].
pub fn fd_partial<F>(f: F, point: &[f64], idx: &MultiIndex, h: f64) -> Result<f64, JetError>
where
    F: Fn(&[f64]) -> f64,
{
    if idx.len() != point.len() {
        return Err(JetError::IndexLength {
            expected: point.len(),
            got: idx.len(),
        });
    }
    if idx.degree() > 4 {
        return Err(JetError::DegreeExceedsOrder {
            degree: idx.degree(),
            order: 4,
        });
    }
    if !(h > 0.0) {
        return Err(JetError::BadStep(h));
    }
    let coarse = stencil_estimate(&f, point, idx, h)?;
    let fine = stencil_estimate(&f, point, idx, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Step that roughly balances truncation against rounding for a derivative
/// of the given total degree on `O(1)` data.
pub fn default_fd_step(degree: usize) -> f64 {
    match degree {
        0 | 1 => 1e-3,
        2 => 2e-3,
        3 => 1e-2,
        _ => 2e-2,
    }
}

fn stencil_estimate<F>(f: &F, point: &[f64], idx: &MultiIndex, h: f64) -> Result<f64, JetError>
where
    F: Fn(&[f64]) -> f64,
{
    // per-axis (offset multiple, weight) lists
    let axes: Vec<(usize, Vec<(f64, f64)>)> = idx
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(k, &m)| {
            let mut binom = 1.0;
            let taps = (0..=m)
                .map(|j| {
                    let w = if j % 2 == 0 { binom } else { -binom };
                    binom = binom * (m - j) as f64 / (j + 1) as f64;
                    (m as f64 / 2.0 - j as f64, w)
                })
                .collect();
            (k, taps)
        })
        .collect();

    let mut total = 0.0;
    let mut counters = vec![0usize; axes.len()];
    let mut z = point.to_vec();
    loop {
        let mut w = 1.0;
        z.copy_from_slice(point);
        for (a, (k, taps)) in axes.iter().enumerate() {
            let (off, wt) = taps[counters[a]];
            z[*k] += off * h;
            w *= wt;
        }
        let v = f(&z);
        if !v.is_finite() {
            let offset = z.iter().zip(point).map(|(a, b)| a - b).collect();
            return Err(JetError::NonFiniteEvaluation { offset });
        }
        total += w * v;

        // odometer over the tensor-product stencil
        let mut a = 0;
        loop {
            if a == axes.len() {
                return Ok(total / h.powi(idx.degree() as i32));
            }
            counters[a] += 1;
            if counters[a] < axes[a].1.len() {
                break;
            }
            counters[a] = 0;
            a += 1;
        }
    }
}
