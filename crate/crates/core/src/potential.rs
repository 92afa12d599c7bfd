//! Symplectic potentials on toric cones and on resolved moment polyhedra,
//! evaluated in double precision, with the checks their structure implies.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::exactlin::{to_f64, vec_to_f64};
use crate::fan::{moment_cone, Fan, FanError};
use crate::kclass::SupportFunction;
use crate::resolve::RefinedFan;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("point is not in the interior of the moment cone")]
    OutsideCone,
    #[error("point is not in the interior of the resolved polyhedron")]
    OutsideDomain,
    #[error("Reeb vector is not in the interior of the dual cone")]
    ReebOutside,
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Newton inversion of the gradient map did not converge")]
    InversionFailed,
    #[error(transparent)]
    Fan(#[from] FanError),
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A strictly convex function on an open convex domain with analytic
/// first and second derivatives.
pub trait Potential {
    fn dim(&self) -> usize;
    fn value(&self, y: &[f64]) -> Result<f64, PotentialError>;
    fn gradient(&self, y: &[f64]) -> Result<Vec<f64>, PotentialError>;
    fn hessian(&self, y: &[f64]) -> Result<DMatrix<f64>, PotentialError>;
}

/// The cone `{y : <u_k, y> >= 0}` together with a Reeb vector `xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePotentialData {
    normals: Vec<Vec<f64>>,
    xi: Vec<f64>,
    moment_rays: Vec<Vec<f64>>,
}

struct Levels {
    facets: Vec<f64>,
    reeb: f64,
    total: f64,
}

impl ConePotentialData {
    /// `normals` are the inward facet normals of the cone, `moment_rays` its
    /// generators; `xi` must pair positively with every generator.
    pub fn new(
        normals: Vec<Vec<f64>>,
        xi: Vec<f64>,
        moment_rays: Vec<Vec<f64>>,
    ) -> Result<Self, PotentialError> {
        let n = xi.len();
        for v in normals.iter().chain(&moment_rays) {
            if v.len() != n {
                return Err(PotentialError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        if moment_rays.iter().any(|v| dotf(&xi, v) <= 0.0) {
            return Err(PotentialError::ReebOutside);
        }
        Ok(Self {
            normals,
            xi,
            moment_rays,
        })
    }

    /// Data for the moment cone of a single-cone fan.
    pub fn from_fan(f: &Fan, xi: Vec<f64>) -> Result<Self, PotentialError> {
        let normals = f.rays().iter().map(|u| vec_to_f64(u)).collect();
        let moment = moment_cone(f)?;
        let rays = moment.generators().iter().map(|v| vec_to_f64(v)).collect();
        Self::new(normals, xi, rays)
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn moment_rays(&self) -> &[Vec<f64>] {
        &self.moment_rays
    }

    /// `sum_k w_k v_k` over the moment-cone generators.
    pub fn interior_point(&self, weights: &[f64]) -> Vec<f64> {
        combine(&self.moment_rays, weights, self.xi.len())
    }

    fn sum_normals(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.xi.len()];
        for u in &self.normals {
            for (si, ui) in s.iter_mut().zip(u) {
                *si += ui;
            }
        }
        s
    }

    fn levels(&self, y: &[f64]) -> Result<Levels, PotentialError> {
        if y.len() != self.xi.len() {
            return Err(PotentialError::DimensionMismatch {
                expected: self.xi.len(),
                found: y.len(),
            });
        }
        let facets: Vec<f64> = self.normals.iter().map(|u| dotf(u, y)).collect();
        let reeb = dotf(&self.xi, y);
        if facets.iter().any(|&l| l <= 0.0 || !l.is_finite()) || reeb <= 0.0 {
            return Err(PotentialError::OutsideCone);
        }
        let total = facets.iter().sum();
        Ok(Levels {
            facets,
            reeb,
            total,
        })
    }

    /// `l_xi(y) = <xi, y>`.
    pub fn reeb_level(&self, y: &[f64]) -> f64 {
        dotf(&self.xi, y)
    }
}

fn combine(rays: &[Vec<f64>], weights: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for (v, w) in rays.iter().zip(weights) {
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi += w * vi;
        }
    }
    y
}

fn xlogx(x: f64) -> f64 {
    x * libm::log(x)
}

impl Potential for ConePotentialData {
    fn dim(&self) -> usize {
        self.xi.len()
    }

    fn value(&self, y: &[f64]) -> Result<f64, PotentialError> {
        canonical_potential(self, y)
    }

    fn gradient(&self, y: &[f64]) -> Result<Vec<f64>, PotentialError> {
        canonical_gradient(self, y)
    }

    fn hessian(&self, y: &[f64]) -> Result<DMatrix<f64>, PotentialError> {
        canonical_hessian(self, y)
    }
}

/// `1/2 sum_k l_k log l_k + 1/2 l_xi log l_xi - 1/2 l_inf log l_inf`.
pub fn canonical_potential(d: &ConePotentialData, y: &[f64]) -> Result<f64, PotentialError> {
    let l = d.levels(y)?;
    let base: f64 = l.facets.iter().map(|&x| xlogx(x)).sum();
    Ok(0.5 * (base + xlogx(l.reeb) - xlogx(l.total)))
}

pub fn canonical_gradient(d: &ConePotentialData, y: &[f64]) -> Result<Vec<f64>, PotentialError> {
    let l = d.levels(y)?;
    let n = y.len();
    let mut g = vec![0.0; n];
    for (u, &lk) in d.normals.iter().zip(&l.facets) {
        let c = 0.5 * (libm::log(lk) + 1.0);
        for i in 0..n {
            g[i] += c * u[i];
        }
    }
    let cx = 0.5 * (libm::log(l.reeb) + 1.0);
    let ci = 0.5 * (libm::log(l.total) + 1.0);
    let sum = d.sum_normals();
    for i in 0..n {
        g[i] += cx * d.xi[i] - ci * sum[i];
    }
    Ok(g)
}

pub fn canonical_hessian(d: &ConePotentialData, y: &[f64]) -> Result<DMatrix<f64>, PotentialError> {
    let l = d.levels(y)?;
    let n = y.len();
    let sum = d.sum_normals();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let facets: f64 = d
            .normals
            .iter()
            .zip(&l.facets)
            .map(|(u, lk)| u[i] * u[j] / lk)
            .sum();
        0.5 * (facets + d.xi[i] * d.xi[j] / l.reeb - sum[i] * sum[j] / l.total)
    }))
}

/// `max_i |2 sum_j G_ij y_j - xi_i|`.
pub fn reeb_identity_residual(d: &ConePotentialData, y: &[f64]) -> Result<f64, PotentialError> {
    let h = canonical_hessian(d, y)?;
    let yv = DVector::from_column_slice(y);
    let r = h * yv * 2.0;
    Ok(r.iter()
        .zip(&d.xi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetStructureReport {
    /// `(t, |det G(ty) - t^-n det G(y)| / |t^-n det G(y)|)`.
    pub homogeneity: Vec<(f64, f64)>,
    /// Facet being approached.
    pub facet: usize,
    /// `det G(y_t) * prod_k l_k(y_t)` along the approach.
    pub products: Vec<f64>,
    /// Relative change between the last two products.
    pub drift: f64,
}

impl DetStructureReport {
    pub fn homogeneity_error(&self) -> f64 {
        self.homogeneity.iter().map(|h| h.1).fold(0.0, f64::max)
    }

    /// Products stay positive and settle to a finite limit.
    pub fn bounded_positive(&self, drift_tol: f64) -> bool {
        self.products.iter().all(|p| p.is_finite() && *p > 0.0) && self.drift < drift_tol
    }
}

/// Checks degree `-n` homogeneity of `det G` at `y` and follows
/// `y_t = y + t (y_f - y)` for `t = 1 - 10^-k`, `k = 1..=steps`, where `y_f`
/// is the barycenter of the moment-cone generators on `facet`.
pub fn det_structure_check(
    d: &ConePotentialData,
    y: &[f64],
    facet: usize,
    steps: u32,
) -> Result<DetStructureReport, PotentialError> {
    let n = y.len();
    let det = |p: &[f64]| canonical_hessian(d, p).map(|h| h.determinant());
    let base = det(y)?;
    let mut homogeneity = Vec::new();
    for t in [2.0, 10.0] {
        let ty: Vec<f64> = y.iter().map(|x| x * t).collect();
        let expected = base * libm::pow(t, -(n as f64));
        homogeneity.push((t, (det(&ty)? - expected).abs() / expected.abs()));
    }

    let on_facet: Vec<&Vec<f64>> = d
        .moment_rays
        .iter()
        .filter(|v| dotf(&d.normals[facet], v).abs() < 1e-12)
        .collect();
    let mut target = vec![0.0; n];
    for v in &on_facet {
        for (ti, vi) in target.iter_mut().zip(v.iter()) {
            *ti += vi / on_facet.len() as f64;
        }
    }
    let mut products = Vec::new();
    for k in 1..=steps {
        let t = 1.0 - libm::pow(10.0, -(k as f64));
        let p: Vec<f64> = y
            .iter()
            .zip(&target)
            .map(|(a, b)| a + t * (b - a))
            .collect();
        let l = d.levels(&p)?;
        products.push(det(&p)? * l.facets.iter().product::<f64>());
    }
    let drift = match products.as_slice() {
        [.., a, b] => ((b - a) / b).abs(),
        _ => 0.0,
    };
    Ok(DetStructureReport {
        homogeneity,
        facet,
        products,
        drift,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LegendreReport {
    /// `F = <x, y> - G(y)` at `x = grad G(y)`.
    pub transform: f64,
    pub reeb_level: f64,
    /// `|F - l_xi| / l_xi`.
    pub identity_residual: f64,
    /// `|F - l_xi / 2| / (l_xi / 2)`.
    pub half_identity_residual: f64,
    /// Relative Frobenius distance between the finite-difference Hessian of
    /// `F` in `x` and the inverse Hessian of `G`.
    pub duality_residual: f64,
}

pub fn legendre_check(d: &ConePotentialData, y: &[f64]) -> Result<LegendreReport, PotentialError> {
    let x = canonical_gradient(d, y)?;
    let transform = dotf(&x, y) - canonical_potential(d, y)?;
    let reeb_level = d.reeb_level(y);
    Ok(LegendreReport {
        transform,
        reeb_level,
        identity_residual: (transform - reeb_level).abs() / reeb_level,
        half_identity_residual: (transform - 0.5 * reeb_level).abs() / (0.5 * reeb_level),
        duality_residual: hessian_duality_residual(d, y)?,
    })
}

/// Solves `grad P(y) = x` by damped Newton iteration from `start`.
pub fn invert_gradient<P: Potential>(
    p: &P,
    x: &[f64],
    start: &[f64],
) -> Result<Vec<f64>, PotentialError> {
    let mut y = start.to_vec();
    let target = DVector::from_column_slice(x);
    for _ in 0..100 {
        let r = DVector::from_vec(p.gradient(&y)?) - &target;
        let scale = target.norm().max(1.0);
        if r.norm() <= 1e-15 * scale {
            return Ok(y);
        }
        let step = p
            .hessian(&y)?
            .cholesky()
            .ok_or(PotentialError::InversionFailed)?
            .solve(&r);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            if let Ok(g) = p.gradient(&trial) {
                let rt = DVector::from_vec(g) - &target;
                if rt.norm() < r.norm() || t < 1e-12 {
                    y = trial;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                // Residual is at rounding level and cannot decrease further.
                return Ok(y);
            }
        }
    }
    Err(PotentialError::InversionFailed)
}

/// Step used for the finite-difference Hessian of the Legendre transform.
pub const LEGENDRE_FD_STEP: f64 = 1e-3;

/// Compares the central second differences of `F(x) = <x, y(x)> - P(y(x))`
/// against the inverse of the analytic Hessian of `P` at `y`.
pub fn hessian_duality_residual<P: Potential>(p: &P, y: &[f64]) -> Result<f64, PotentialError> {
    let x0 = p.gradient(y)?;
    let legendre = |x: &[f64]| -> Result<f64, PotentialError> {
        let yx = invert_gradient(p, x, y)?;
        Ok(dotf(x, &yx) - p.value(&yx)?)
    };
    let fd = finite_difference_hessian(legendre, &x0, LEGENDRE_FD_STEP)?;
    let inv = p
        .hessian(y)?
        .try_inverse()
        .ok_or(PotentialError::InversionFailed)?;
    Ok((fd - &inv).norm() / inv.norm())
}

/// Central second differences of `f` at `x` with step `h`.
pub fn finite_difference_hessian<F>(f: F, x: &[f64], h: f64) -> Result<DMatrix<f64>, PotentialError>
where
    F: Fn(&[f64]) -> Result<f64, PotentialError>,
{
    let n = x.len();
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut p = x.to_vec();
        p[di] += si * h;
        p[dj] += sj * h;
        f(&p)
    };
    let f0 = f(x)?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let (fp, fm) = (at(i, 1.0, i, 0.0)?, at(i, -1.0, i, 0.0)?);
        m[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (at(i, 1.0, j, 1.0)? - at(i, 1.0, j, -1.0)? - at(i, -1.0, j, 1.0)?
                + at(i, -1.0, j, -1.0)?)
                / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Rays `u_j` of a refined fan with heights `lambda_j`, describing the
/// polyhedron `{y : <u_j, y> >= lambda_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedPotentialData {
    rays: Vec<Vec<f64>>,
    heights: Vec<f64>,
}

impl ResolvedPotentialData {
    pub fn new(rays: Vec<Vec<f64>>, heights: Vec<f64>) -> Result<Self, PotentialError> {
        if rays.len() != heights.len() {
            return Err(PotentialError::DimensionMismatch {
                expected: rays.len(),
                found: heights.len(),
            });
        }
        Ok(Self { rays, heights })
    }

    pub fn from_support(f: &RefinedFan, h: &SupportFunction) -> Self {
        Self {
            rays: f.fan().rays().iter().map(|u| vec_to_f64(u)).collect(),
            heights: h.heights().iter().map(to_f64).collect(),
        }
    }

    pub fn rays(&self) -> &[Vec<f64>] {
        &self.rays
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    fn levels(&self, y: &[f64]) -> Result<Vec<f64>, PotentialError> {
        let l: Vec<f64> = self
            .rays
            .iter()
            .zip(&self.heights)
            .map(|(u, lam)| dotf(u, y) - lam)
            .collect();
        if l.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
            return Err(PotentialError::OutsideDomain);
        }
        Ok(l)
    }

    /// `sum_k w_k v_k` scaled up until every level is at least `margin`.
    pub fn interior_point(
        &self,
        moment_rays: &[Vec<f64>],
        weights: &[f64],
        margin: f64,
    ) -> Vec<f64> {
        let n = self.rays.first().map_or(0, Vec::len);
        let w = combine(moment_rays, weights, n);
        let s = self
            .rays
            .iter()
            .zip(&self.heights)
            .map(|(u, lam)| (lam + margin) / dotf(u, &w))
            .fold(1.0, f64::max);
        w.iter().map(|x| x * s).collect()
    }
}

/// `sum_j lambda_j log l_j(y) + l_inf(y)` with `l_inf = sum_j <u_j, y>`.
pub fn guillemin_potential(r: &ResolvedPotentialData, y: &[f64]) -> Result<f64, PotentialError> {
    let l = r.levels(y)?;
    let logs: f64 = r
        .heights
        .iter()
        .zip(&l)
        .filter(|(lam, _)| **lam != 0.0)
        .map(|(lam, lj)| lam * libm::log(*lj))
        .sum();
    let total: f64 = r.rays.iter().map(|u| dotf(u, y)).sum();
    Ok(logs + total)
}

/// `1/2 sum_j l_j log l_j` on the resolved polyhedron.
#[derive(Clone, Copy, Debug)]
pub struct ResolvedSymplecticPotential<'a>(pub &'a ResolvedPotentialData);

impl Potential for ResolvedSymplecticPotential<'_> {
    fn dim(&self) -> usize {
        self.0.rays.first().map_or(0, Vec::len)
    }

    fn value(&self, y: &[f64]) -> Result<f64, PotentialError> {
        Ok(0.5 * self.0.levels(y)?.into_iter().map(xlogx).sum::<f64>())
    }

    fn gradient(&self, y: &[f64]) -> Result<Vec<f64>, PotentialError> {
        let l = self.0.levels(y)?;
        let mut g = vec![0.0; y.len()];
        for (u, lj) in self.0.rays.iter().zip(l) {
            let c = 0.5 * (libm::log(lj) + 1.0);
            for (gi, ui) in g.iter_mut().zip(u) {
                *gi += c * ui;
            }
        }
        Ok(g)
    }

    fn hessian(&self, y: &[f64]) -> Result<DMatrix<f64>, PotentialError> {
        let l = self.0.levels(y)?;
        let n = y.len();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            0.5 * self
                .0
                .rays
                .iter()
                .zip(&l)
                .map(|(u, lj)| u[i] * u[j] / lj)
                .sum::<f64>()
        }))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedMetricReport {
    pub positive_definite: bool,
    pub min_eigenvalue: f64,
    pub duality_residual: f64,
}

pub fn resolved_metric_check(
    r: &ResolvedPotentialData,
    y: &[f64],
) -> Result<ResolvedMetricReport, PotentialError> {
    let p = ResolvedSymplecticPotential(r);
    let h = p.hessian(y)?;
    let positive_definite = h.clone().cholesky().is_some();
    let min_eigenvalue = h.symmetric_eigenvalues().min();
    Ok(ResolvedMetricReport {
        positive_definite,
        min_eigenvalue,
        duality_residual: hessian_duality_residual(&p, y)?,
    })
}

/// Whether the Hessian admits a Cholesky factorization.
pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    m.clone().cholesky().is_some()
}

/// Largest entrywise deviation of `G(ty)` from `G(y) / t`, relative to the
/// largest entry of `G(y)`.
pub fn hessian_homogeneity_error(
    d: &ConePotentialData,
    y: &[f64],
    t: f64,
) -> Result<f64, PotentialError> {
    let h = canonical_hessian(d, y)?;
    let ty: Vec<f64> = y.iter().map(|x| x * t).collect();
    let ht = canonical_hessian(d, &ty)?;
    Ok((ht - &h / t).amax() / h.amax())
}
