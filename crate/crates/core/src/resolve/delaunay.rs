//! Planar Delaunay triangulation of a lattice point set with exact
//! predicates.
//!
//! Degenerate (cocircular) configurations are resolved by lifting point `i`
//! (in lexicographic rank) to `|p|^2 - eps^(i + 1)` for an infinitesimal
//! `eps`, which makes the lifted point set generic. The result is the unique
//! regular triangulation for that lifting, so it does not depend on the
//! insertion order or the flip order.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::exactlin::{Int, IntMatrix, IntVec};

pub(crate) type Tri = [usize; 3];

pub(crate) fn orient(p: &IntVec, q: &IntVec, r: &IntVec) -> Int {
    (&q[0] - &p[0]) * (&r[1] - &p[1]) - (&q[1] - &p[1]) * (&r[0] - &p[0])
}

/// Triangulates `points` (lexicographically sorted, distinct) whose convex
/// hull has the vertices `hull` in counterclockwise order.
pub(crate) fn delaunay(points: &[IntVec], hull: &[usize]) -> Vec<Tri> {
    let mut tris: Vec<Tri> = (1..hull.len() - 1)
        .map(|k| [hull[0], hull[k], hull[k + 1]])
        .collect();
    for p in 0..points.len() {
        if !hull.contains(&p) {
            insert(points, &mut tris, p);
        }
    }
    while let Some((i, j, e)) = find_illegal_edge(points, &tris) {
        let (a, b, c) = (tris[i][e], tris[i][(e + 1) % 3], tris[i][(e + 2) % 3]);
        let d = third(&tris[j], b, a);
        tris[i] = [a, d, c];
        tris[j] = [d, b, c];
    }
    tris
}

fn insert(points: &[IntVec], tris: &mut Vec<Tri>, p: usize) {
    let x = &points[p];
    for i in 0..tris.len() {
        let [a, b, c] = tris[i];
        let o = [
            orient(&points[a], &points[b], x),
            orient(&points[b], &points[c], x),
            orient(&points[c], &points[a], x),
        ];
        if o.iter().any(Signed::is_negative) {
            continue;
        }
        match o.iter().position(Zero::is_zero) {
            None => {
                tris[i] = [a, b, p];
                tris.push([b, c, p]);
                tris.push([c, a, p]);
            }
            Some(e) => {
                // On the edge opposite tris[i][(e + 2) % 3].
                let t = tris[i];
                let (u, v, w) = (t[e], t[(e + 1) % 3], t[(e + 2) % 3]);
                tris[i] = [u, p, w];
                tris.push([p, v, w]);
                if let Some(j) = find_edge(tris, v, u) {
                    let z = third(&tris[j], v, u);
                    tris[j] = [v, p, z];
                    tris.push([p, u, z]);
                }
            }
        }
        return;
    }
    unreachable!("point outside the hull");
}

/// Index of the triangle containing the directed edge `a -> b`.
pub(crate) fn find_edge(tris: &[Tri], a: usize, b: usize) -> Option<usize> {
    tris.iter()
        .position(|t| (0..3).any(|e| t[e] == a && t[(e + 1) % 3] == b))
}

/// The vertex of `t` other than `a` and `b`.
pub(crate) fn third(t: &Tri, a: usize, b: usize) -> usize {
    *t.iter()
        .find(|&&v| v != a && v != b)
        .expect("triangle has three vertices")
}

fn find_illegal_edge(points: &[IntVec], tris: &[Tri]) -> Option<(usize, usize, usize)> {
    for (i, t) in tris.iter().enumerate() {
        for e in 0..3 {
            let (a, b, c) = (t[e], t[(e + 1) % 3], t[(e + 2) % 3]);
            let Some(j) = find_edge(tris, b, a) else {
                continue;
            };
            let d = third(&tris[j], b, a);
            if in_circle(points, [a, b, c, d]) {
                return Some((i, j, e));
            }
        }
    }
    None
}

/// Whether `d` lies strictly inside the (perturbed) circumcircle of the
/// counterclockwise triangle `a b c`.
pub(crate) fn in_circle(points: &[IntVec], q: [usize; 4]) -> bool {
    let lifted = |heights: &dyn Fn(usize) -> Int| -> Int {
        let rows: Vec<IntVec> = q
            .iter()
            .map(|&i| {
                let p = &points[i];
                alloc::vec![p[0].clone(), p[1].clone(), heights(i), Int::from(1)]
            })
            .collect();
        IntMatrix::from_rows(&rows).determinant()
    };
    let m = lifted(&|i| &points[i][0] * &points[i][0] + &points[i][1] * &points[i][1]);
    if !m.is_zero() {
        return m.is_positive();
    }
    let mut order = q;
    order.sort_unstable();
    for p in order {
        let cofactor = lifted(&|i| Int::from(i64::from(i == p)));
        if !cofactor.is_zero() {
            return cofactor.is_negative();
        }
    }
    unreachable!("degenerate triangle");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ivec;

    #[test]
    fn cocircular_square_takes_the_lex_smallest_diagonal() {
        let pts = alloc::vec![ivec(&[0, 0]), ivec(&[0, 1]), ivec(&[1, 0]), ivec(&[1, 1])];
        // Start from the other diagonal.
        let tris = delaunay(&pts, &[2, 3, 1, 0]);
        assert_eq!(tris.len(), 2);
        for t in &tris {
            assert!(t.contains(&0) && t.contains(&3));
        }
    }

    #[test]
    fn perturbation_is_consistent_under_relabelling_of_the_triangle() {
        let pts = alloc::vec![ivec(&[0, 0]), ivec(&[0, 1]), ivec(&[1, 0]), ivec(&[1, 1])];
        // Triangle (0, 2, 3) and apex 1, rotated: the answer cannot change.
        let a = in_circle(&pts, [0, 2, 3, 1]);
        let b = in_circle(&pts, [2, 3, 0, 1]);
        let c = in_circle(&pts, [3, 0, 2, 1]);
        assert_eq!(a, b);
        assert_eq!(b, c);
        assert!(!a);
        assert!(in_circle(&pts, [2, 3, 1, 0]));
    }
}
