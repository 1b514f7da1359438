//! The Chern curvature pipeline.
//!
//! From `F^2` expanded as a jet at `(x, y)`:
//!
//! * fundamental tensor `g_ij = 1/2 d^2 F^2 / dy^i dy^j` and its inverse,
//! * Cartan tensor `A_ijk = (F/2) dg_ij/dy^k`,
//! * geodesic spray `G^i = 1/4 g^il (y^k d^2F^2/dy^l dx^k - dF^2/dx^l)` and
//!   nonlinear connection `N^i_j = dG^i/dy^j`,
//! * Chern coefficients
//!   `Gamma^i_jk = 1/2 g^il (δg_jl/δx^k + δg_lk/δx^j - δg_jk/δx^l)`
//!   with `δ/δx^k = d/dx^k - N^j_k d/dy^j`,
//! * hh-curvature
//!   `R_j^i_kl = δΓ^i_jl/δx^k - δΓ^i_jk/δx^l + Γ^i_km Γ^m_jl - Γ^i_lm Γ^m_jk`,
//! * horizontal Ricci `Ric_jl = R_j^k_kl`, scalar `g^jl Ric_jl` and the
//!   trace-free part `E = Ric - (Scal/n) g`.
//!
//! Every stage is carried as a jet of decreasing order: each derivative
//! consumes one order, so the curvature needs jets of order at least 4.
//! The nonlinear connection comes from the spray rather than from
//! `N^i_j = Γ^i_jk y^k` (which would be circular); that relation is checked
//! afterwards as a diagnostic.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, Array3, Array4};

use crate::error::{GeometryError, JetError, Result};
use crate::jets::{seed_variables, Jet};
use crate::metric::{FinslerMetric, PointState};

/// Scale `c` values used by the homogeneity diagnostics.
pub const HOMOGENEITY_SCALES: [f64; 3] = [0.5, 2.0, 7.0];

/// Jets of every pipeline stage at one point.
///
/// Later stages are present only when the jet order allows them: the
/// connection needs order 3 and the curvature order 4.
#[derive(Debug, Clone)]
pub struct Geometry {
    n: usize,
    order: usize,
    point: PointState,
    xs: Vec<Jet>,
    ys: Vec<Jet>,
    f_val: f64,
    f2: Jet,
    g: Array2<Jet>,
    g_inv: Array2<Jet>,
    g_val: Array2<f64>,
    g_inv_val: Array2<f64>,
    min_eigenvalue: f64,
    connection: Option<Connection>,
}

#[derive(Debug, Clone)]
struct Connection {
    spray: Vec<Jet>,
    /// `nconn[[i, j]] = N^i_j`
    nconn: Array2<Jet>,
    /// `delta_g[[i, j, k]] = δg_ij/δx^k`
    delta_g: Array3<Jet>,
    /// `chern[[i, j, k]] = Γ^i_jk`
    chern: Array3<Jet>,
}

impl Geometry {
    /// Runs the pipeline as far as the point's jet order allows.
    pub fn at<M: FinslerMetric + ?Sized>(metric: &M, p: &PointState) -> Result<Self> {
        let n = metric.dim();
        if p.dim() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: p.dim(),
            });
        }
        let order = p.order();
        if order < 2 {
            return Err(JetError::OrderTooLow { min: 2, got: order }.into());
        }
        let mut seeds = seed_variables(p.x(), p.y(), order)?;
        let ys = seeds.split_off(n);
        let xs = seeds;

        let f2 = metric.evaluate_sq(&xs, &ys);
        if !f2.is_finite() || !(f2.value() > 0.0) {
            return Err(GeometryError::NonPositiveMetric(f2.value()));
        }
        let f_val = f2.value().sqrt();

        let g = Array2::from_shape_fn((n, n), |(i, j)| f2.d(n + i).d(n + j).scale(0.5));
        let g_val = g.map(Jet::value);
        let min_eigenvalue = min_symmetric_eigenvalue(&g_val);
        if !(min_eigenvalue > 0.0) {
            return Err(GeometryError::NotPositiveDefinite { min_eigenvalue });
        }
        let g_inv = invert_jet_matrix(&g)?;
        let g_inv_val = g_inv.map(Jet::value);

        let mut geo = Self {
            n,
            order,
            point: p.clone(),
            xs,
            ys,
            f_val,
            f2,
            g,
            g_inv,
            g_val,
            g_inv_val,
            min_eigenvalue,
            connection: None,
        };
        if order >= 3 {
            geo.connection = Some(geo.build_connection());
        }
        Ok(geo)
    }

    fn build_connection(&self) -> Connection {
        let n = self.n;
        let q = self.order - 2;
        let ginv_q = &self.g_inv;
        let yq: Vec<Jet> = self.ys.iter().map(|y| y.truncate(q)).collect();

        let spray: Vec<Jet> = {
            // h_l = y^k d^2F^2/dy^l dx^k - dF^2/dx^l
            let h: Vec<Jet> = (0..n)
                .map(|l| {
                    let dy = self.f2.d(n + l);
                    let mut acc = -self.f2.d(l).truncate(q);
                    for (k, yk) in yq.iter().enumerate() {
                        acc = acc + yk * dy.d(k);
                    }
                    acc
                })
                .collect();
            (0..n)
                .map(|i| {
                    let mut acc = self.f2.lift(0.0).truncate(q);
                    for (l, hl) in h.iter().enumerate() {
                        acc = acc + &ginv_q[[i, l]] * hl;
                    }
                    acc.scale(0.25)
                })
                .collect()
        };
        let nconn = Array2::from_shape_fn((n, n), |(i, j)| spray[i].d(n + j));

        let delta = |t: &Jet, k: usize| delta_with(&nconn, n, t, k);
        let mut delta_g = Array3::from_elem((n, n, n), nconn[[0, 0]].lift(0.0));
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let d = delta(&self.g[[i, j]], k);
                    delta_g[[j, i, k]] = d.clone();
                    delta_g[[i, j, k]] = d;
                }
            }
        }

        let r = self.order - 3;
        let ginv_r = self.g_inv.map(|j| j.truncate(r));
        let mut chern = Array3::from_elem((n, n, n), nconn[[0, 0]].lift(0.0));
        for i in 0..n {
            for j in 0..n {
                for k in j..n {
                    let mut acc = nconn[[0, 0]].lift(0.0);
                    for l in 0..n {
                        let bracket = &delta_g[[j, l, k]] + &delta_g[[l, k, j]] - &delta_g[[j, k, l]];
                        acc = acc + &ginv_r[[i, l]] * bracket;
                    }
                    let acc = acc.scale(0.5);
                    chern[[i, k, j]] = acc.clone();
                    chern[[i, j, k]] = acc;
                }
            }
        }
        Connection {
            spray,
            nconn,
            delta_g,
            chern,
        }
    }

    fn connection(&self) -> Result<&Connection> {
        self.connection
            .as_ref()
            .ok_or_else(|| JetError::OrderTooLow { min: 3, got: self.order }.into())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &PointState {
        &self.point
    }

    /// Seeded base-coordinate jets, for evaluating fields alongside the metric.
    pub fn x_jets(&self) -> &[Jet] {
        &self.xs
    }

    pub fn y_jets(&self) -> &[Jet] {
        &self.ys
    }

    pub fn f_value(&self) -> f64 {
        self.f_val
    }

    /// `F^2` as a full-order jet.
    pub fn f2_jet(&self) -> &Jet {
        &self.f2
    }

    pub fn g(&self) -> &Array2<f64> {
        &self.g_val
    }

    pub fn g_inv(&self) -> &Array2<f64> {
        &self.g_inv_val
    }

    pub fn g_jets(&self) -> &Array2<Jet> {
        &self.g
    }

    pub fn g_inv_jets(&self) -> &Array2<Jet> {
        &self.g_inv
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `A_ijk = (F/2) dg_ij/dy^k`.
    pub fn cartan(&self) -> Result<Array3<f64>> {
        if self.order < 3 {
            return Err(JetError::OrderTooLow { min: 3, got: self.order }.into());
        }
        let n = self.n;
        let half_f = 0.5 * self.f_val;
        Ok(Array3::from_shape_fn((n, n, n), |(i, j, k)| {
            half_f * self.g[[i, j]].first(n + k)
        }))
    }

    /// `dg_ij/dy^k` (without the `F/2` factor).
    pub fn dg_dy(&self) -> Result<Array3<f64>> {
        if self.order < 3 {
            return Err(JetError::OrderTooLow { min: 3, got: self.order }.into());
        }
        let n = self.n;
        Ok(Array3::from_shape_fn((n, n, n), |(i, j, k)| self.g[[i, j]].first(n + k)))
    }

    pub fn spray(&self) -> Result<Array1<f64>> {
        Ok(self.connection()?.spray.iter().map(Jet::value).collect())
    }

    /// `N^i_j` at `[[i, j]]`.
    pub fn nconn(&self) -> Result<Array2<f64>> {
        Ok(self.connection()?.nconn.map(Jet::value))
    }

    /// `Γ^i_jk` at `[[i, j, k]]`.
    pub fn chern(&self) -> Result<Array3<f64>> {
        Ok(self.connection()?.chern.map(Jet::value))
    }

    pub fn chern_jets(&self) -> Result<&Array3<Jet>> {
        Ok(&self.connection()?.chern)
    }

    /// `δg_ij/δx^k` at `[[i, j, k]]`.
    pub fn delta_g(&self) -> Result<Array3<f64>> {
        Ok(self.connection()?.delta_g.map(Jet::value))
    }

    /// `δT/δx^k` of a jet field `T` seeded like this geometry.
    pub fn delta(&self, target: &Jet, k: usize) -> Result<Jet> {
        let c = self.connection()?;
        if k >= self.n {
            return Err(GeometryError::IndexOutOfRange { index: k, dim: self.n });
        }
        if target.num_vars() != 2 * self.n {
            return Err(JetError::ShapeMismatch {
                lhs_vars: 2 * self.n,
                lhs_order: self.order,
                rhs_vars: target.num_vars(),
                rhs_order: target.order(),
            }
            .into());
        }
        if target.order() == 0 {
            return Err(JetError::ExhaustedOrder.into());
        }
        Ok(delta_with(&c.nconn, self.n, target, k))
    }

    /// `R_j^i_kl` at `[[j, i, k, l]]`.
    pub fn hh_curvature(&self) -> Result<Array4<f64>> {
        if self.order < 4 {
            return Err(JetError::OrderTooLow { min: 4, got: self.order }.into());
        }
        let c = self.connection()?;
        let n = self.n;
        let gamma = c.chern.map(Jet::value);
        // dgamma[[i, j, l, k]] = δΓ^i_jl/δx^k
        let mut dgamma = Array4::<f64>::zeros((n, n, n, n));
        for i in 0..n {
            for j in 0..n {
                for l in j..n {
                    for k in 0..n {
                        let v = delta_with(&c.nconn, n, &c.chern[[i, j, l]], k).value();
                        dgamma[[i, j, l, k]] = v;
                        dgamma[[i, l, j, k]] = v;
                    }
                }
            }
        }
        let mut r = Array4::<f64>::zeros((n, n, n, n));
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    for l in (k + 1)..n {
                        let mut v = dgamma[[i, j, l, k]] - dgamma[[i, j, k, l]];
                        for m in 0..n {
                            v += gamma[[i, k, m]] * gamma[[m, j, l]] - gamma[[i, l, m]] * gamma[[m, j, k]];
                        }
                        r[[j, i, k, l]] = v;
                        r[[j, i, l, k]] = -v;
                    }
                }
            }
        }
        Ok(r)
    }
}

fn delta_with(nconn: &Array2<Jet>, n: usize, t: &Jet, k: usize) -> Jet {
    let q = (t.order() - 1).min(nconn[[0, 0]].order());
    let mut acc = t.d(k).truncate(q);
    for j in 0..n {
        acc = acc - nconn[[j, k]].truncate(q) * t.d(n + j).truncate(q);
    }
    acc
}

fn min_symmetric_eigenvalue(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Gauss-Jordan inversion over jets with partial pivoting on values.
pub fn invert_jet_matrix(a: &Array2<Jet>) -> Result<Array2<Jet>> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = Array2::from_shape_fn((n, n), |(i, j)| a[[0, 0]].lift(if i == j { 1.0 } else { 0.0 }));
    let scale = a.iter().map(|j| j.value().abs()).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r1, &r2| m[[r1, col]].value().abs().total_cmp(&m[[r2, col]].value().abs()))
            .expect("non-empty range");
        let pv = m[[piv, col]].value();
        if !(pv.abs() > 1e-14 * scale) {
            return Err(GeometryError::Singular { pivot: pv });
        }
        if piv != col {
            for j in 0..n {
                m.swap([piv, j], [col, j]);
                inv.swap([piv, j], [col, j]);
            }
        }
        let r = m[[col, col]].try_recip()?;
        for j in 0..n {
            m[[col, j]] = &m[[col, j]] * &r;
            inv[[col, j]] = &inv[[col, j]] * &r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[[row, col]].clone();
            for j in 0..n {
                m[[row, j]] = &m[[row, j]] - &factor * &m[[col, j]];
                inv[[row, j]] = &inv[[row, j]] - &factor * &inv[[col, j]];
            }
        }
    }
    Ok(inv)
}

/// Fundamental tensor with its inverse and smallest eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalTensor {
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    pub min_eigenvalue: f64,
}

pub fn fundamental_tensor<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<FundamentalTensor> {
    let geo = Geometry::at(m, p)?;
    Ok(FundamentalTensor {
        g: geo.g_val,
        g_inv: geo.g_inv_val,
        min_eigenvalue: geo.min_eigenvalue,
    })
}

pub fn cartan_tensor<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<Array3<f64>> {
    Geometry::at(m, p)?.cartan()
}

/// Spray `G^i` and nonlinear connection `N^i_j`.
pub fn spray_and_nonlinear_connection<M: FinslerMetric + ?Sized>(
    m: &M,
    p: &PointState,
) -> Result<(Array1<f64>, Array2<f64>)> {
    let geo = Geometry::at(m, p)?;
    Ok((geo.spray()?, geo.nconn()?))
}

/// `δT/δx^i` at `p` for a field `T(x, y)` given as a function of the
/// seeded coordinate jets.
pub fn delta_derivative<M, T>(m: &M, p: &PointState, target: T, i: usize) -> Result<f64>
where
    M: FinslerMetric + ?Sized,
    T: Fn(&[Jet], &[Jet]) -> Jet,
{
    let geo = Geometry::at(m, p)?;
    let t = target(geo.x_jets(), geo.y_jets());
    Ok(geo.delta(&t, i)?.value())
}

pub fn chern_coefficients<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<Array3<f64>> {
    Geometry::at(m, p)?.chern()
}

pub fn hh_curvature<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<Array4<f64>> {
    Geometry::at(m, p)?.hh_curvature()
}

/// Horizontal Ricci tensor, scalar curvature, trace-free part and the
/// relative Einstein residual.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciData {
    pub ricci: Array2<f64>,
    pub scal: f64,
    pub efree: Array2<f64>,
    pub einstein_residual: f64,
}

impl RicciData {
    /// Traces `R_j^k_kl` and builds `E = Ric - (Scal/n) g`.
    pub fn from_curvature(r: &Array4<f64>, g: &Array2<f64>, g_inv: &Array2<f64>) -> Self {
        let n = g.nrows();
        let ricci = Array2::from_shape_fn((n, n), |(j, l)| (0..n).map(|k| r[[j, k, k, l]]).sum());
        let scal: f64 = (0..n)
            .flat_map(|j| (0..n).map(move |l| (j, l)))
            .map(|(j, l)| g_inv[[j, l]] * ricci[[j, l]])
            .sum();
        let efree = &ricci - &(g * (scal / n as f64));
        let einstein_residual = max_abs(efree.iter()) / max_abs(ricci.iter()).max(1.0);
        Self {
            ricci,
            scal,
            efree,
            einstein_residual,
        }
    }
}

pub fn ricci_scalar_einstein<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<RicciData> {
    let geo = Geometry::at(m, p)?;
    let r = geo.hh_curvature()?;
    Ok(RicciData::from_curvature(&r, geo.g(), geo.g_inv()))
}

pub(crate) fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Everything the pipeline derives at one point.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub point: PointState,
    pub f_val: f64,
    pub g: Array2<f64>,
    pub g_inv: Array2<f64>,
    pub cartan: Array3<f64>,
    pub spray: Array1<f64>,
    pub nconn: Array2<f64>,
    pub chern: Array3<f64>,
    /// `R_j^i_kl` at `[[j, i, k, l]]`.
    pub hh_curv: Array4<f64>,
    pub ricci: Array2<f64>,
    pub scal: f64,
    pub efree: Array2<f64>,
    pub einstein_residual: f64,
    /// Named residuals; see [`full_report`].
    pub diagnostics: BTreeMap<String, f64>,
}

impl CurvatureReport {
    /// `R_jikl = g_im R_j^m_kl`, i.e. `R(∂_j, ∂_i, δ_k, δ_l)`.
    pub fn lowered_curvature(&self) -> Array4<f64> {
        lower_curvature(&self.hh_curv, &self.g)
    }
}

pub fn lower_curvature(r: &Array4<f64>, g: &Array2<f64>) -> Array4<f64> {
    let n = g.nrows();
    Array4::from_shape_fn((n, n, n, n), |(j, i, k, l)| (0..n).map(|m| g[[i, m]] * r[[j, m, k, l]]).sum())
}

/// Runs the whole pipeline and fills in diagnostics:
///
/// * `homogeneity`: max over `c` of `|F(x,cy) - cF(x,y)| / F(x,y)`
/// * `g_homogeneity`: max over `c` of `|g(x,cy) - g(x,y)|`
/// * `euler`: `|g_ij y^i y^j - F^2| / F^2`
/// * `g_symmetry`, `inverse` (`|g^-1 g - I|`), `min_eigenvalue`
/// * `cartan_symmetry`, `cartan_contraction` (`|A_ijk y^k|`)
/// * `chern_symmetry`, `compatibility` (`|δ_k g_ij - g_mj Γ^m_ik - g_im Γ^m_jk|`)
/// * `n_gamma` (`|N^i_j - Γ^i_jk y^k|`), `delta_f2` (`|δF^2/δx^i| / max(1, F^2)`)
/// * `curvature_antisymmetry`, `efree_trace`, `einstein_residual`
///
/// All norms are max-abs over entries.
pub fn full_report<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<CurvatureReport> {
    let geo = Geometry::at(m, p)?;
    let mut diag = diagnostics_from(m, &geo)?;
    let hh_curv = geo.hh_curvature()?;
    let g = geo.g().clone();
    let g_inv = geo.g_inv().clone();
    let ricci = RicciData::from_curvature(&hh_curv, &g, &g_inv);

    let mut anti: f64 = 0.0;
    for ((j, i, k, l), v) in hh_curv.indexed_iter() {
        anti = anti.max((v + hh_curv[[j, i, l, k]]).abs());
    }
    diag.insert("curvature_antisymmetry".into(), anti);
    let trace: f64 = (g_inv.clone() * &ricci.efree).sum();
    diag.insert("efree_trace".into(), trace.abs() / ricci.scal.abs().max(1.0));
    diag.insert("einstein_residual".into(), ricci.einstein_residual);

    Ok(CurvatureReport {
        point: p.clone(),
        f_val: geo.f_val,
        g,
        g_inv,
        cartan: geo.cartan()?,
        spray: geo.spray()?,
        nconn: geo.nconn()?,
        chern: geo.chern()?,
        hh_curv,
        ricci: ricci.ricci,
        scal: ricci.scal,
        efree: ricci.efree,
        einstein_residual: ricci.einstein_residual,
        diagnostics: diag,
    })
}

/// The residuals of [`full_report`] that do not involve curvature. Needs
/// jet order 3 only, so it is much cheaper.
pub fn property_diagnostics<M: FinslerMetric + ?Sized>(m: &M, p: &PointState) -> Result<BTreeMap<String, f64>> {
    let geo = Geometry::at(m, p)?;
    diagnostics_from(m, &geo)
}

fn diagnostics_from<M: FinslerMetric + ?Sized>(m: &M, geo: &Geometry) -> Result<BTreeMap<String, f64>> {
    let p = geo.point();
    let n = geo.n;
    let cartan = geo.cartan()?;
    let nconn = geo.nconn()?;
    let chern = geo.chern()?;
    let delta_g = geo.delta_g()?;
    let g = geo.g();
    let g_inv = geo.g_inv();
    let y = p.y();
    let f = geo.f_val;
    let f2 = f * f;

    let mut diag = BTreeMap::new();
    let mut hom: f64 = 0.0;
    let mut g_hom: f64 = 0.0;
    for c in HOMOGENEITY_SCALES {
        let fc = m.value_at(p.x(), &p.y().iter().map(|v| c * v).collect::<Vec<_>>());
        hom = hom.max((fc - c * f).abs() / f);
        let scaled = p.scaled(c)?.with_order(2);
        let gc = fundamental_tensor(m, &scaled)?;
        g_hom = g_hom.max(max_abs((&gc.g - g).iter()));
    }
    diag.insert("homogeneity".into(), hom);
    diag.insert("g_homogeneity".into(), g_hom);

    let quad: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| g[[i, j]] * y[i] * y[j])
        .sum();
    diag.insert("euler".into(), (quad - f2).abs() / f2);
    diag.insert("g_symmetry".into(), max_abs((g - &g.t()).iter()));
    let ident = g_inv.dot(g) - Array2::<f64>::eye(n);
    diag.insert("inverse".into(), max_abs(ident.iter()));
    diag.insert("min_eigenvalue".into(), geo.min_eigenvalue);

    let mut sym: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                let a = cartan[[i, j, k]];
                for v in [cartan[[i, k, j]], cartan[[j, i, k]], cartan[[j, k, i]], cartan[[k, i, j]], cartan[[k, j, i]]] {
                    sym = sym.max((a - v).abs());
                }
                s += a * y[k];
            }
            contraction = contraction.max(s.abs());
        }
    }
    diag.insert("cartan_symmetry".into(), sym);
    diag.insert("cartan_contraction".into(), contraction);

    let mut chern_sym: f64 = 0.0;
    let mut compat: f64 = 0.0;
    let mut n_gamma: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut contracted = 0.0;
            for k in 0..n {
                chern_sym = chern_sym.max((chern[[i, j, k]] - chern[[i, k, j]]).abs());
                contracted += chern[[i, j, k]] * y[k];
                let mut rhs = 0.0;
                for m_ in 0..n {
                    rhs += g[[m_, j]] * chern[[m_, i, k]] + g[[i, m_]] * chern[[m_, j, k]];
                }
                compat = compat.max((delta_g[[i, j, k]] - rhs).abs());
            }
            n_gamma = n_gamma.max((nconn[[i, j]] - contracted).abs());
        }
    }
    diag.insert("chern_symmetry".into(), chern_sym);
    diag.insert("compatibility".into(), compat);
    diag.insert("n_gamma".into(), n_gamma);

    let mut df2: f64 = 0.0;
    for i in 0..n {
        df2 = df2.max(geo.delta(&geo.f2, i)?.value().abs());
    }
    diag.insert("delta_f2".into(), df2 / f2.max(1.0));

    Ok(diag)
}
