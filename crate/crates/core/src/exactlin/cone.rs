use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::{combinations, cross_product, dot, primitive, rank, Int, IntVec};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConeError {
    #[error("cone contains a line")]
    NotStronglyConvex,
    #[error("generators span a proper subspace")]
    NotFullDimensional,
    #[error("generator {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
}

/// Inward facet normals of the cone spanned by `generators` in `Z^dim`,
/// i.e. the primitive generators of the dual cone, sorted lexicographically.
///
/// Every `(dim - 1)`-subset of generators is tried as a facet candidate:
/// its normal (the vector of signed maximal minors) is kept when it has a
/// constant sign on all generators. Quadratic in the number of
/// `(dim - 1)`-subsets, which is fine for the few dozen rays we see.
pub fn dual_cone(generators: &[IntVec], dim: usize) -> Result<Vec<IntVec>, ConeError> {
    for (index, g) in generators.iter().enumerate() {
        if g.len() != dim {
            return Err(ConeError::DimensionMismatch {
                index,
                found: g.len(),
                expected: dim,
            });
        }
    }
    let gens: Vec<&IntVec> = generators
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .collect();
    if dim == 0 || rank(&gens.iter().map(|g| (*g).clone()).collect::<Vec<_>>()) < dim {
        return Err(ConeError::NotFullDimensional);
    }

    let mut normals = BTreeSet::new();
    for subset in combinations(gens.len(), dim - 1) {
        let rows: Vec<IntVec> = subset.iter().map(|&i| gens[i].clone()).collect();
        let normal = cross_product(&rows, dim);
        if normal.iter().all(Zero::is_zero) {
            continue;
        }
        let mut positive = false;
        let mut negative = false;
        for g in &gens {
            let s = dot(&normal, g);
            positive |= s.is_positive();
            negative |= s.is_negative();
        }
        let oriented: IntVec = match (positive, negative) {
            (true, false) => normal,
            (false, true) => normal.iter().map(|x| -x).collect(),
            _ => continue,
        };
        normals.insert(primitive(&oriented));
    }

    let normals: Vec<IntVec> = normals.into_iter().collect();
    if rank(&normals) < dim {
        return Err(ConeError::NotStronglyConvex);
    }
    Ok(normals)
}

/// Membership in the cone `{x : <m, x> >= 0 for all m in facets}`.
pub fn cone_contains(facets: &[IntVec], x: &[Int]) -> bool {
    facets.iter().all(|m| !dot(m, x).is_negative())
}
