//! The numerical property suite behind `toric verify`.
//!
//! Interior points are random convex combinations of the moment-cone
//! generators with weights in [0.05, 1), drawn from a fixed-seed generator so
//! that repeated runs print identical reports.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_core::fan::Fan;
use toric_core::kclass::find_compact_support;
use toric_core::potential::{
    canonical_hessian, canonical_potential, finite_difference_hessian, legendre_check,
    reeb_identity_residual, resolved_metric_check, ConePotentialData, ResolvedPotentialData,
};
use toric_core::reeb::{volume, volume_gradient, ReebProblem, ReebSolution};

use crate::commands::resolve_cone;
use crate::error::CliError;
use crate::format::Check;

pub const SEED: u64 = 0x7e1c;
pub const SAMPLES: usize = 100;
const RESOLVED_SAMPLES: usize = 10;

fn weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(0.05..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scaled(y: &[f64], t: f64) -> Vec<f64> {
    y.iter().map(|x| x * t).collect()
}

/// Distance from `y` to the nearest facet of the cone.
fn facet_distance(d: &ConePotentialData, y: &[f64]) -> f64 {
    d.normals()
        .iter()
        .map(|u| dot(u, y) / norm(u))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn see(&mut self, x: f64) {
        // NaN must not hide behind max.
        if x.is_nan() || x > self.0 {
            self.0 = if x.is_nan() { f64::INFINITY } else { x };
        }
    }
}

/// Runs every check on the cone `fan` with Reeb solution `s`.
pub fn run(fan: &Fan, s: &ReebSolution) -> Result<BTreeMap<String, Check>, CliError> {
    let mut checks = BTreeMap::new();
    let mut add = |name: &str, c: Check| {
        checks.insert(name.to_string(), c);
    };
    let n = fan.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    add("reeb_constraint", Check::below(s.constraint_residual, 1e-9));
    add("reeb_stationary", Check::below(s.gradient_norm, 1e-8));

    let d = ConePotentialData::from_fan(fan, s.xi.clone())?;
    let k = d.moment_rays().len();
    let (mut identity, mut fd, mut degree, mut det_degree) =
        (Worst(0.0), Worst(0.0), Worst(0.0), Worst(0.0));
    let (mut legendre, mut half_legendre, mut duality) = (Worst(0.0), Worst(0.0), Worst(0.0));
    let mut min_eigenvalue = f64::INFINITY;
    for _ in 0..SAMPLES {
        let y = d.interior_point(&weights(&mut rng, k));
        identity.see(reeb_identity_residual(&d, &y)?);

        let h = canonical_hessian(&d, &y)?;
        min_eigenvalue = min_eigenvalue.min(h.clone().symmetric_eigenvalues().min());
        let step = 3e-4 * facet_distance(&d, &y);
        let numeric = finite_difference_hessian(|p| canonical_potential(&d, p), &y, step)?;
        fd.see((&numeric - &h).norm() / h.norm());

        for t in [2.0, 10.0] {
            let ht = canonical_hessian(&d, &scaled(&y, t))?;
            degree.see((&ht * t - &h).norm() / h.norm());
            let expected = h.determinant() * t.powi(-(n as i32));
            det_degree.see(((ht.determinant() - expected) / expected).abs());
        }

        let l = legendre_check(&d, &y)?;
        legendre.see(l.identity_residual);
        half_legendre.see(l.half_identity_residual);
        duality.see(l.duality_residual);
    }
    add("potential_reeb_identity", Check::below(identity.0, 1e-9));
    add("potential_hessian_fd", Check::below(fd.0, 1e-5));
    add("potential_hessian_degree", Check::below(degree.0, 1e-10));
    add("potential_det_degree", Check::below(det_degree.0, 1e-10));
    add(
        "potential_positive_definite",
        Check::above(min_eigenvalue, 0.0),
    );
    add("legendre_identity", Check::below(legendre.0, 1e-9));
    add(
        "legendre_half_identity",
        Check::below(half_legendre.0, 1e-9),
    );
    add("legendre_hessian_duality", Check::below(duality.0, 1e-4));

    let p = ReebProblem::new(fan)?;
    let v = volume(&p, &s.xi)?;
    let g = volume_gradient(&p, &s.xi)?;
    let h = 1e-5 * s.xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut err = 0.0;
    for i in 0..n {
        let (mut a, mut b) = (s.xi.clone(), s.xi.clone());
        a[i] += h;
        b[i] -= h;
        let numeric = (volume(&p, &a)? - volume(&p, &b)?) / (2.0 * h);
        err += (numeric - g[i]).powi(2);
    }
    add(
        "volume_gradient_fd",
        Check::below(err.sqrt() / norm(&g), 1e-6),
    );
    let euler = (dot(&g, &s.xi) + n as f64 * v) / (n as f64 * v);
    add("volume_euler", Check::below(euler.abs(), 1e-10));

    // Resolved metrics, when the cone has a compact strictly convex support.
    let support = resolve_cone(fan, &[])
        .ok()
        .and_then(|r| find_compact_support(&r.refined).ok().map(|h| (r, h)));
    if let Some((r, h)) = support {
        let data = ResolvedPotentialData::from_support(&r.refined, &h.function);
        let mut min_eigenvalue = f64::INFINITY;
        let mut duality = Worst(0.0);
        for _ in 0..RESOLVED_SAMPLES {
            let y = data.interior_point(d.moment_rays(), &weights(&mut rng, k), 0.1);
            let report = resolved_metric_check(&data, &y)?;
            min_eigenvalue = min_eigenvalue.min(report.min_eigenvalue);
            duality.see(report.duality_residual);
        }
        add(
            "resolved_positive_definite",
            Check::above(min_eigenvalue, 0.0),
        );
        add("resolved_hessian_duality", Check::below(duality.0, 1e-4));
    }
    Ok(checks)
}
