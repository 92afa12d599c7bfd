//! Volume minimization over Reeb vectors on the plane `<gamma, xi> = -n`.
//!
//! The volume of `{y in C : <xi, y> <= 1/2}` is summed over a simplicial
//! decomposition of the moment cone `C`; for a simplicial cone spanned by
//! `v_1..v_n` it equals `|det v| / (n! prod_k 2 <xi, v_k>)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};

use crate::exactlin::{
    dot, int_to_f64, integer_kernel, rank, rat_from_int, to_f64, vec_to_f64, IntMatrix, IntVec,
};
use crate::fan::{gorenstein_vector, moment_cone, Fan, FanError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ReebError {
    #[error("Reeb vector is not in the interior of the dual cone")]
    OutsideReebCone,
    #[error("apex index {0} is out of range")]
    BadApex(usize),
    #[error(
        "no convergence after {iterations} iterations (projected gradient norm {gradient_norm:e})"
    )]
    DidNotConverge {
        iterations: usize,
        gradient_norm: f64,
        xi: Vec<f64>,
    },
    #[error("restarts disagree by {spread:e}")]
    RestartsDisagree { spread: f64 },
    #[error(transparent)]
    Fan(#[from] FanError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReebProblem {
    dim: usize,
    fan_rays: Vec<Vec<f64>>,
    moment_rays: Vec<Vec<f64>>,
    simplices: Vec<Vec<usize>>,
    /// `|det|` of each simplex, computed exactly.
    weights: Vec<f64>,
    gamma: Vec<f64>,
    plane_basis: Vec<Vec<f64>>,
}

/// Simplices of a pulling triangulation of the cone over `rays`, coning
/// from the smallest index in each face.
fn pull(rays: &[IntVec], normals: &[IntVec], face: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if dim == 1 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut facets = BTreeSet::new();
    for u in normals {
        let sub: Vec<usize> = face
            .iter()
            .copied()
            .filter(|&r| dot(u, &rays[r]).is_zero())
            .collect();
        if sub.len() == face.len() || sub.contains(&apex) {
            continue;
        }
        let vs: Vec<IntVec> = sub.iter().map(|&r| rays[r].clone()).collect();
        if rank(&vs) == dim - 1 {
            facets.insert(sub);
        }
    }
    let mut out = Vec::new();
    for f in facets {
        for mut s in pull(rays, normals, &f, dim - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

impl ReebProblem {
    /// The problem for a single-cone Gorenstein fan, triangulating the
    /// moment cone from its first generator.
    pub fn new(f: &Fan) -> Result<Self, ReebError> {
        Self::with_apex(f, 0)
    }

    /// As [`ReebProblem::new`], pulling from moment-cone generator `apex`.
    pub fn with_apex(f: &Fan, apex: usize) -> Result<Self, ReebError> {
        let n = f.dim();
        let g = gorenstein_vector(f)?;
        let moment = moment_cone(f)?;
        let mut rays = moment.generators().to_vec();
        if apex >= rays.len() {
            return Err(ReebError::BadApex(apex));
        }
        // Put the apex first so the pulling order starts there.
        let order: Vec<usize> = core::iter::once(apex)
            .chain((0..rays.len()).filter(|&i| i != apex))
            .collect();
        rays = order.iter().map(|&i| rays[i].clone()).collect();
        let face: Vec<usize> = (0..rays.len()).collect();
        let local = pull(&rays, f.rays(), &face, n);
        let simplices: Vec<Vec<usize>> = local
            .iter()
            .map(|s| s.iter().map(|&i| order[i]).collect())
            .collect();
        let weights = local
            .iter()
            .map(|s| {
                let m: Vec<IntVec> = s.iter().map(|&i| rays[i].clone()).collect();
                int_to_f64(&IntMatrix::from_rows(&m).determinant().abs())
            })
            .collect();
        let scaled: IntVec = g
            .gamma
            .iter()
            .map(|x| (x * rat_from_int(&g.index)).to_integer())
            .collect();
        let plane_basis = integer_kernel(&IntMatrix::from_rows(&[scaled]))
            .iter()
            .map(|b| vec_to_f64(b))
            .collect();
        Ok(Self {
            dim: n,
            fan_rays: f.rays().iter().map(|u| vec_to_f64(u)).collect(),
            moment_rays: moment.generators().iter().map(|v| vec_to_f64(v)).collect(),
            simplices,
            weights,
            gamma: g.gamma.iter().map(to_f64).collect(),
            plane_basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn moment_rays(&self) -> &[Vec<f64>] {
        &self.moment_rays
    }

    /// Simplices as indices into [`ReebProblem::moment_rays`].
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// `(n / d) sum_j u_j`, which pairs to `-n` with `gamma` and lies in the
    /// interior of the dual cone.
    pub fn initial_point(&self) -> Vec<f64> {
        let d = self.fan_rays.len() as f64;
        let mut xi = vec![0.0; self.dim];
        for u in &self.fan_rays {
            for (x, ui) in xi.iter_mut().zip(u) {
                *x += ui * self.dim as f64 / d;
            }
        }
        xi
    }

    /// `min_k <xi, v_k>` over the moment-cone generators.
    pub fn margin(&self, xi: &[f64]) -> f64 {
        self.moment_rays
            .iter()
            .map(|v| dotf(xi, v))
            .fold(f64::INFINITY, f64::min)
    }

    fn pairings(&self, xi: &[f64]) -> Result<Vec<f64>, ReebError> {
        let p: Vec<f64> = self.moment_rays.iter().map(|v| dotf(xi, v)).collect();
        if p.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
            return Err(ReebError::OutsideReebCone);
        }
        Ok(p)
    }

    /// Per-simplex volumes at `xi`.
    fn simplex_volumes(&self, p: &[f64]) -> impl Iterator<Item = (&Vec<usize>, f64)> + '_ {
        let fact: f64 = (1..=self.dim).map(|k| k as f64).product();
        let p = p.to_vec();
        self.simplices.iter().zip(&self.weights).map(move |(s, w)| {
            (
                s,
                w / (fact * s.iter().map(|&k| 2.0 * p[k]).product::<f64>()),
            )
        })
    }
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn volume(p: &ReebProblem, xi: &[f64]) -> Result<f64, ReebError> {
    let pr = p.pairings(xi)?;
    Ok(p.simplex_volumes(&pr).map(|(_, v)| v).sum())
}

pub fn volume_gradient(p: &ReebProblem, xi: &[f64]) -> Result<Vec<f64>, ReebError> {
    let pr = p.pairings(xi)?;
    let mut g = vec![0.0; p.dim];
    for (s, vol) in p.simplex_volumes(&pr) {
        for &k in s {
            for (gi, vi) in g.iter_mut().zip(&p.moment_rays[k]) {
                *gi -= vol * vi / pr[k];
            }
        }
    }
    Ok(g)
}

pub fn volume_hessian(p: &ReebProblem, xi: &[f64]) -> Result<DMatrix<f64>, ReebError> {
    let pr = p.pairings(xi)?;
    let n = p.dim;
    let mut h = DMatrix::zeros(n, n);
    for (s, vol) in p.simplex_volumes(&pr) {
        let mut sum = DVector::zeros(n);
        let mut outer = DMatrix::zeros(n, n);
        for &k in s {
            let a = DVector::from_iterator(n, p.moment_rays[k].iter().map(|x| x / pr[k]));
            outer += &a * a.transpose();
            sum += a;
        }
        h += (&sum * sum.transpose() + outer) * vol;
    }
    Ok(h)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReebSolution {
    pub xi: Vec<f64>,
    pub volume: f64,
    /// Norm of the gradient projected onto the constraint plane.
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of the projected Hessian.
    pub hessian_min_eigenvalue: f64,
    /// `min_k <xi, v_k>`.
    pub margin: f64,
    /// `|<gamma, xi> + n|`.
    pub constraint_residual: f64,
}

pub const GRADIENT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
pub const RESTARTS: usize = 5;
pub const RESTART_AGREEMENT: f64 = 1e-9;

/// Projected Newton iteration from `start`, which must lie on the plane.
pub fn minimize_from(p: &ReebProblem, start: &[f64]) -> Result<ReebSolution, ReebError> {
    let n = p.dim;
    let k = p.plane_basis.len();
    let t = DMatrix::from_fn(n, k, |i, j| p.plane_basis[j][i]);
    let mut xi = DVector::from_column_slice(start);
    let mut value = volume(p, xi.as_slice())?;
    let project = |xi: &DVector<f64>| -> Result<(DVector<f64>, DMatrix<f64>), ReebError> {
        let g = DVector::from_vec(volume_gradient(p, xi.as_slice())?);
        let h = volume_hessian(p, xi.as_slice())?;
        Ok((t.transpose() * g, t.transpose() * h * &t))
    };
    for iteration in 0..=MAX_ITERATIONS {
        let (g, h) = project(&xi)?;
        if g.norm() < GRADIENT_TOLERANCE {
            let eig = if k == 0 {
                f64::INFINITY
            } else {
                h.symmetric_eigenvalues().min()
            };
            return Ok(ReebSolution {
                constraint_residual: (dotf(&p.gamma, xi.as_slice()) + n as f64).abs(),
                margin: p.margin(xi.as_slice()),
                xi: xi.as_slice().to_vec(),
                volume: value,
                gradient_norm: g.norm(),
                iterations: iteration,
                hessian_min_eigenvalue: eig,
            });
        }
        if iteration == MAX_ITERATIONS {
            return Err(ReebError::DidNotConverge {
                iterations: iteration,
                gradient_norm: g.norm(),
                xi: xi.as_slice().to_vec(),
            });
        }
        let step = match h.clone().cholesky() {
            Some(c) => -c.solve(&g),
            None => -g.clone(),
        };
        let slope = g.dot(&step);
        let dir = &t * &step;
        let mut alpha = 1.0;
        loop {
            let trial = &xi + &dir * alpha;
            if let Ok(v) = volume(p, trial.as_slice()) {
                if v <= value + 1e-4 * alpha * slope + 1e-15 * value.abs() {
                    xi = trial;
                    value = v;
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < 1e-20 {
                // No descent left at working precision; the gradient test
                // above decides on the next pass.
                break;
            }
        }
    }
    unreachable!()
}

/// Minimizes the volume from the standard initial point and from
/// [`RESTARTS`] perturbations of it, requiring all runs to agree.
pub fn minimize_volume(p: &ReebProblem) -> Result<ReebSolution, ReebError> {
    let xi0 = p.initial_point();
    let best = minimize_from(p, &xi0)?;
    let k = p.plane_basis.len();
    if k == 0 {
        return Ok(best);
    }
    let mut spread: f64 = 0.0;
    for r in 0..RESTARTS {
        let coeffs: Vec<f64> = (0..k)
            .map(|i| [1.0, -0.5, 0.75, -1.0, 0.25][(r + 2 * i) % 5])
            .collect();
        let mut dir = vec![0.0; p.dim];
        for (c, b) in coeffs.iter().zip(&p.plane_basis) {
            for (d, bi) in dir.iter_mut().zip(b) {
                *d += c * bi;
            }
        }
        let norm = libm::sqrt(dotf(&dir, &dir));
        let mut scale = 0.5 * p.margin(&xi0) / norm;
        let start = loop {
            let s: Vec<f64> = xi0.iter().zip(&dir).map(|(x, d)| x + scale * d).collect();
            if p.margin(&s) > 0.0 {
                break s;
            }
            scale *= 0.5;
        };
        let other = minimize_from(p, &start)?;
        let diff = best
            .xi
            .iter()
            .zip(&other.xi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        spread = spread.max(diff);
    }
    if spread > RESTART_AGREEMENT {
        return Err(ReebError::RestartsDisagree { spread });
    }
    Ok(best)
}
