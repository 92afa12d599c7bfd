//! Piecewise-linear support functions on refined fans and the compact
//! Kähler classes they define.
//!
//! Conventions: `h` is linear on each maximal cone, `h(x) = <l_sigma, x>` on
//! `sigma`, and convex means `<l_sigma, x> >= h(x)` everywhere. Strict
//! convexity is decided wall by wall: for adjacent cones `sigma`, `sigma'`
//! with `v'` the ray of `sigma'` off the wall, `<l_sigma, v'> - h(v') > 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exactlin::{
    coordinates_in_basis, dot_rat_int, lp_solve, rat_from_int, solve_integer_system, to_f64, Int,
    IntVec, LinearProgram, LinearSolution, LpOutcome, Rational, Relation,
};
use crate::resolve::{RefinedFan, Wall};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KclassError {
    #[error("expected {expected} heights, got {found}")]
    HeightCount { expected: usize, found: usize },
    #[error("no piecewise-linear function has these heights")]
    Inconsistent,
    #[error("support function does not vanish on the boundary rays")]
    NotCompact,
    #[error("no compact strictly convex support function exists")]
    NoneExists,
}

/// Heights `lambda_j = h(u_j)` per ray and the linear piece of each maximal
/// cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportFunction {
    heights: Vec<Rational>,
    covectors: Vec<Vec<Rational>>,
}

impl SupportFunction {
    pub fn heights(&self) -> &[Rational] {
        &self.heights
    }

    /// `l_sigma` for each maximal cone, in cone order.
    pub fn covectors(&self) -> &[Vec<Rational>] {
        &self.covectors
    }

    pub fn scaled(&self, t: &Rational) -> SupportFunction {
        let scale = |v: &[Rational]| v.iter().map(|x| x * t).collect();
        SupportFunction {
            heights: scale(&self.heights),
            covectors: self.covectors.iter().map(|l| scale(l)).collect(),
        }
    }
}

pub fn support_from_heights(
    f: &RefinedFan,
    heights: Vec<Rational>,
) -> Result<SupportFunction, KclassError> {
    let fan = f.fan();
    if heights.len() != fan.rays().len() {
        return Err(KclassError::HeightCount {
            expected: fan.rays().len(),
            found: heights.len(),
        });
    }
    let mut covectors = Vec::with_capacity(fan.cones().len());
    for cone in fan.cones() {
        let rows: Vec<Vec<Rational>> = cone
            .iter()
            .map(|&r| fan.rays()[r].iter().map(rat_from_int).collect())
            .collect();
        let rhs: Vec<Rational> = cone.iter().map(|&r| heights[r].clone()).collect();
        match crate::exactlin::solve_linear_system(&rows, &rhs) {
            LinearSolution::Unique(l) => covectors.push(l),
            _ => return Err(KclassError::Inconsistent),
        }
    }
    let h = SupportFunction { heights, covectors };
    for (c, cone) in fan.cones().iter().enumerate() {
        for &r in cone {
            if dot_rat_int(&h.covectors[c], &fan.rays()[r]) != h.heights[r] {
                return Err(KclassError::Inconsistent);
            }
        }
    }
    Ok(h)
}

/// `<l_sigma, v'> - h(v')` and `<l_sigma', v> - h(v)` for a wall.
fn bends(h: &SupportFunction, f: &RefinedFan, w: &Wall) -> [Rational; 2] {
    let rays = f.fan().rays();
    let (a, b) = w.cones;
    let (va, vb) = w.opposite;
    [
        dot_rat_int(&h.covectors[a], &rays[vb]) - &h.heights[vb],
        dot_rat_int(&h.covectors[b], &rays[va]) - &h.heights[va],
    ]
}

/// The smaller of the two bends at each wall, in wall order.
pub fn wall_margins(h: &SupportFunction, f: &RefinedFan) -> Vec<Rational> {
    f.walls()
        .iter()
        .map(|w| {
            let [x, y] = bends(h, f, w);
            x.min(y)
        })
        .collect()
}

pub fn is_convex(h: &SupportFunction, f: &RefinedFan) -> bool {
    wall_margins(h, f).iter().all(|m| !m.is_negative())
}

pub fn is_strictly_convex(h: &SupportFunction, f: &RefinedFan) -> bool {
    wall_margins(h, f).iter().all(Signed::is_positive)
}

/// Vanishes on every ray on the boundary of the original cone.
pub fn is_compact(h: &SupportFunction, f: &RefinedFan) -> bool {
    (0..h.heights.len()).all(|r| !f.is_boundary_ray(r) || h.heights[r].is_zero())
}

/// `h(x)` for `x` in the support of the fan.
pub fn evaluate(h: &SupportFunction, f: &RefinedFan, x: &[Rational]) -> Option<Rational> {
    let den = x
        .iter()
        .fold(Int::one(), |l, r| num_integer::lcm(l, r.denom().clone()));
    let xi: IntVec = x
        .iter()
        .map(|r| (r * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let fan = f.fan();
    for (c, cone) in fan.cones().iter().enumerate() {
        let basis: Vec<IntVec> = cone.iter().map(|&r| fan.rays()[r].clone()).collect();
        if let Some(coords) = coordinates_in_basis(&basis, &xi) {
            if coords.iter().all(|t| !t.is_negative()) {
                return Some(dot_rat_int(&h.covectors[c], &xi) / Rational::from_integer(den));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactSupport {
    pub function: SupportFunction,
    /// Smallest wall bend; positive.
    pub margin: Rational,
}

/// Maximizes the smallest wall bend over compact support functions with
/// interior heights in `[0, 1]`.
pub fn find_compact_support(f: &RefinedFan) -> Result<CompactSupport, KclassError> {
    let fan = f.fan();
    let interior = f.interior_rays();
    let k = interior.len();
    let var = |r: usize| interior.iter().position(|&i| i == r);

    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    let mut lp = LinearProgram::maximize(objective);
    for i in 0..k {
        lp.set_bounds(i, Some(Rational::zero()), Some(Rational::one()));
    }
    lp.set_bounds(k, None, Some(Rational::one()));

    for w in f.walls() {
        let (a, b) = w.cones;
        let (va, vb) = w.opposite;
        for (cone, off) in [(a, vb), (b, va)] {
            // <l_sigma, v'> = sum_i c_i lambda(r_i) for v' = sum_i c_i r_i.
            let gens: Vec<IntVec> = fan.cones()[cone]
                .iter()
                .map(|&r| fan.rays()[r].clone())
                .collect();
            let coeffs = transposed_solve(&gens, &fan.rays()[off]);
            let mut row = vec![Rational::zero(); k + 1];
            for (&r, c) in fan.cones()[cone].iter().zip(coeffs) {
                if let Some(i) = var(r) {
                    row[i] += c;
                }
            }
            if let Some(i) = var(off) {
                row[i] -= Rational::one();
            }
            row[k] = -Rational::one();
            lp.add_constraint(row, Relation::Ge, Rational::zero());
        }
    }

    let LpOutcome::Optimal { point, value } = lp_solve(&lp) else {
        unreachable!("the program is feasible at zero and bounded by s <= 1");
    };
    if !value.is_positive() {
        return Err(KclassError::NoneExists);
    }
    let mut heights = vec![Rational::zero(); fan.rays().len()];
    for (i, &r) in interior.iter().enumerate() {
        heights[r] = point[i].clone();
    }
    let function = support_from_heights(f, heights)?;
    let margin = wall_margins(&function, f)
        .into_iter()
        .min()
        .unwrap_or_else(Rational::one);
    Ok(CompactSupport { function, margin })
}

/// Coordinates `c` with `v = sum_i c_i g_i`.
fn transposed_solve(gens: &[IntVec], v: &[Int]) -> Vec<Rational> {
    let n = v.len();
    let rows: Vec<IntVec> = (0..n)
        .map(|i| gens.iter().map(|g| g[i].clone()).collect())
        .collect();
    match solve_integer_system(&rows, v) {
        LinearSolution::Unique(c) => c,
        _ => unreachable!("maximal cones of a refined fan are unimodular"),
    }
}

/// Coefficients of `[omega] = -2 pi sum_j lambda_j c_j` over the interior
/// rays, as `(ray, coefficient)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerClass {
    pub coefficients: Vec<(usize, f64)>,
}

pub fn kahler_class(h: &SupportFunction, f: &RefinedFan) -> Result<KahlerClass, KclassError> {
    if !is_compact(h, f) {
        return Err(KclassError::NotCompact);
    }
    let coefficients = f
        .interior_rays()
        .into_iter()
        .map(|r| (r, -2.0 * core::f64::consts::PI * to_f64(&h.heights[r])))
        .collect();
    Ok(KahlerClass { coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat;
    use crate::fan::{gorenstein_vector, slice_polytope, Fan};
    use crate::resolve::{
        canonical_bundle_fan, conifold, cp2_two_points, projective_plane, refine_fan,
        triangulate_basic,
    };

    fn resolve(f: &Fan) -> RefinedFan {
        let g = gorenstein_vector(f).unwrap();
        let p = slice_polytope(f, &g).unwrap();
        refine_fan(f, &p, &triangulate_basic(&p).unwrap()).unwrap()
    }

    fn kcp2() -> RefinedFan {
        canonical_bundle_fan(&projective_plane()).unwrap().1
    }

    fn heights(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn zero_heights_are_flat() {
        let f = resolve(&conifold());
        let h = support_from_heights(&f, heights(&[0, 0, 0, 0])).unwrap();
        assert!(h.covectors().iter().flatten().all(Zero::is_zero));
        assert!(is_compact(&h, &f));
        assert!(is_convex(&h, &f));
        assert!(!is_strictly_convex(&h, &f));
    }

    #[test]
    fn apex_height_decides_convexity() {
        let f = kcp2();
        let h = support_from_heights(&f, heights(&[0, 0, 0, 1])).unwrap();
        for (l, cone) in h.covectors().iter().zip(f.fan().cones()) {
            assert_eq!(cone[2], 3);
            assert_eq!(dot_rat_int(l, &f.fan().rays()[3]), rat(1, 1));
        }
        assert_eq!(wall_margins(&h, &f), vec![rat(3, 1); 3]);
        assert!(is_strictly_convex(&h, &f));
        assert!(is_compact(&h, &f));

        let g = support_from_heights(&f, heights(&[0, 0, 0, -1])).unwrap();
        assert!(!is_strictly_convex(&g, &f));
        let nc = support_from_heights(&f, heights(&[1, 0, 0, 1])).unwrap();
        assert!(!is_compact(&nc, &f));
        assert_eq!(
            support_from_heights(&f, heights(&[0, 0])),
            Err(KclassError::HeightCount {
                expected: 4,
                found: 2
            })
        );
    }

    #[test]
    fn lp_certificates() {
        assert_eq!(
            find_compact_support(&resolve(&conifold())),
            Err(KclassError::NoneExists)
        );

        let f = kcp2();
        let c = find_compact_support(&f).unwrap();
        assert_eq!(c.function.heights()[3], rat(1, 3));
        assert_eq!(c.margin, rat(1, 1));
        assert!(is_strictly_convex(&c.function, &f) && is_compact(&c.function, &f));

        let f = resolve(&cp2_two_points());
        let c = find_compact_support(&f).unwrap();
        assert!(c.margin.is_positive());
        assert!(is_strictly_convex(&c.function, &f));
    }

    #[test]
    fn scaling_scales_margins() {
        let f = kcp2();
        let h = support_from_heights(&f, heights(&[0, 0, 0, 1])).unwrap();
        let t = rat(2, 7);
        let margins: Vec<Rational> = wall_margins(&h, &f).iter().map(|m| m * &t).collect();
        assert_eq!(wall_margins(&h.scaled(&t), &f), margins);
    }

    #[test]
    fn evaluation_and_class() {
        let f = kcp2();
        let h = support_from_heights(&f, heights(&[0, 0, 0, 1])).unwrap();
        assert_eq!(
            evaluate(&h, &f, &[rat(0, 1), rat(0, 1), rat(5, 2)]),
            Some(rat(5, 2))
        );
        assert_eq!(
            evaluate(&h, &f, &[rat(1, 1), rat(0, 1), rat(1, 1)]),
            Some(rat(0, 1))
        );
        assert_eq!(evaluate(&h, &f, &[rat(0, 1), rat(0, 1), rat(-1, 1)]), None);
        let k = kahler_class(&h, &f).unwrap();
        assert_eq!(k.coefficients.len(), 1);
        assert!((k.coefficients[0].1 + 2.0 * core::f64::consts::PI).abs() < 1e-15);
        let nc = support_from_heights(&f, heights(&[1, 0, 0, 1])).unwrap();
        assert_eq!(kahler_class(&nc, &f), Err(KclassError::NotCompact));
    }
}
