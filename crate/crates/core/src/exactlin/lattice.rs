use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{dot, dual_cone, ConeError, Int, IntVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointKind {
    Interior,
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticePoint {
    pub coords: IntVec,
    pub kind: PointKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("no vertices given")]
    Empty,
    #[error("vertices do not span a full-dimensional polytope")]
    NotFullDimensional,
    #[error("vertex {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
}

/// Facet inequalities `<a, x> + b >= 0` of the convex hull of `vertices`,
/// returned as `(a, b)` with `(a, b)` primitive.
pub fn polytope_facets(vertices: &[IntVec]) -> Result<Vec<(IntVec, Int)>, PolytopeError> {
    let dim = vertices.first().ok_or(PolytopeError::Empty)?.len();
    let mut homogenized = Vec::with_capacity(vertices.len());
    for (index, v) in vertices.iter().enumerate() {
        if v.len() != dim {
            return Err(PolytopeError::DimensionMismatch {
                index,
                found: v.len(),
                expected: dim,
            });
        }
        let mut h = v.clone();
        h.push(Int::one());
        homogenized.push(h);
    }
    // The cone over a bounded polytope at height one is always pointed, so
    // the only failure left is a degenerate vertex set.
    let normals = dual_cone(&homogenized, dim + 1).map_err(|e| match e {
        ConeError::DimensionMismatch {
            index,
            found,
            expected,
        } => PolytopeError::DimensionMismatch {
            index,
            found,
            expected,
        },
        _ => PolytopeError::NotFullDimensional,
    })?;
    Ok(normals
        .into_iter()
        .map(|mut n| {
            let b = n.pop().expect("homogenized normal");
            (n, b)
        })
        .collect())
}

/// Every lattice point of the convex hull of `vertices`, in lexicographic
/// order, each tagged interior or boundary.
///
/// Scans the bounding box of the vertices and tests each candidate against
/// the exact facet inequalities.
pub fn lattice_points_in_polytope(vertices: &[IntVec]) -> Result<Vec<LatticePoint>, PolytopeError> {
    let facets = polytope_facets(vertices)?;
    let dim = vertices[0].len();
    let lo: IntVec = (0..dim)
        .map(|i| {
            vertices
                .iter()
                .map(|v| &v[i])
                .min()
                .cloned()
                .expect("nonempty")
        })
        .collect();
    let hi: IntVec = (0..dim)
        .map(|i| {
            vertices
                .iter()
                .map(|v| &v[i])
                .max()
                .cloned()
                .expect("nonempty")
        })
        .collect();

    let mut out = Vec::new();
    let mut x = lo.clone();
    loop {
        let mut tight = false;
        let mut inside = true;
        for (a, b) in &facets {
            let s = dot(a, &x) + b;
            if s.is_negative() {
                inside = false;
                break;
            }
            tight |= s.is_zero();
        }
        if inside {
            out.push(LatticePoint {
                coords: x.clone(),
                kind: if tight {
                    PointKind::Boundary
                } else {
                    PointKind::Interior
                },
            });
        }
        // Odometer, last coordinate fastest, so output is lexicographic.
        let mut i = dim;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if x[i] < hi[i] {
                x[i] += 1;
                x[i + 1..dim].clone_from_slice(&lo[i + 1..dim]);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ivec;
    use alloc::vec;

    fn census(points: &[LatticePoint]) -> (usize, usize) {
        let interior = points
            .iter()
            .filter(|p| p.kind == PointKind::Interior)
            .count();
        (points.len(), interior)
    }

    #[test]
    fn unit_square() {
        let v = vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[0, 1])];
        let pts = lattice_points_in_polytope(&v).unwrap();
        assert_eq!(census(&pts), (4, 0));
        assert_eq!(pts[0].coords, ivec(&[0, 0]));
        assert_eq!(pts[3].coords, ivec(&[1, 1]));
    }

    #[test]
    fn reflexive_triangle() {
        let v = vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])];
        let pts = lattice_points_in_polytope(&v).unwrap();
        assert_eq!(census(&pts), (4, 1));
        let interior: Vec<_> = pts
            .iter()
            .filter(|p| p.kind == PointKind::Interior)
            .collect();
        assert_eq!(interior[0].coords, ivec(&[0, 0]));
    }

    #[test]
    fn ypq_5_3_quadrilateral() {
        let v = vec![ivec(&[0, 0]), ivec(&[1, 0]), ivec(&[5, 5]), ivec(&[1, 2])];
        let pts = lattice_points_in_polytope(&v).unwrap();
        assert_eq!(census(&pts), (8, 4));
    }

    #[test]
    fn segment_in_one_dimension() {
        let v = vec![ivec(&[-1]), ivec(&[1])];
        let pts = lattice_points_in_polytope(&v).unwrap();
        assert_eq!(census(&pts), (3, 1));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(lattice_points_in_polytope(&[]), Err(PolytopeError::Empty));
        let collinear = vec![ivec(&[0, 0]), ivec(&[1, 1]), ivec(&[2, 2])];
        assert_eq!(
            lattice_points_in_polytope(&collinear),
            Err(PolytopeError::NotFullDimensional)
        );
        let ragged = vec![ivec(&[0, 0]), ivec(&[1])];
        assert!(matches!(
            lattice_points_in_polytope(&ragged),
            Err(PolytopeError::DimensionMismatch { index: 1, .. })
        ));
    }
}
