use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Signed};

use crate::exactlin::{dot, ivec, solve_integer_system, Int, IntMatrix, IntVec, LinearSolution};
use crate::fan::{is_nonsingular, validate_fan, Fan};

use super::{RefinedFan, ResolveError};

fn single(dim: usize, rays: &[&[i64]]) -> Fan {
    Fan::single_cone(dim, rays.iter().map(|r| ivec(r)).collect()).expect("well-formed rays")
}

/// The positive orthant of `Z^n`.
pub fn affine_space(n: usize) -> Fan {
    let rays = (0..n)
        .map(|i| (0..n).map(|j| Int::from(i64::from(i == j))).collect())
        .collect();
    Fan::single_cone(n, rays).expect("well-formed rays")
}

/// The cone over the unit square.
pub fn conifold() -> Fan {
    single(3, &[&[0, 0, 1], &[1, 0, 1], &[1, 1, 1], &[0, 1, 1]])
}

/// The cone over the pentagon of the anticanonical bundle of the plane
/// blown up in two points.
pub fn cp2_two_points() -> Fan {
    single(
        3,
        &[&[0, 0, 1], &[0, 1, 1], &[1, 2, 1], &[2, 1, 1], &[1, 0, 1]],
    )
}

pub fn projective_line() -> Fan {
    Fan::new(1, vec![ivec(&[1]), ivec(&[-1])], vec![vec![0], vec![1]]).expect("well-formed")
}

pub fn projective_plane() -> Fan {
    Fan::new(
        2,
        vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, -1])],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
    )
    .expect("well-formed")
}

/// The plane blown up in two points, as a complete fan with five rays.
pub fn del_pezzo_2() -> Fan {
    Fan::new(
        2,
        vec![
            ivec(&[1, 0]),
            ivec(&[0, 1]),
            ivec(&[-1, 0]),
            ivec(&[-1, -1]),
            ivec(&[0, -1]),
        ],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4], vec![4, 0]],
    )
    .expect("well-formed")
}

fn check_ypq(p: i64, q: i64) -> Result<(), ResolveError> {
    if p > q && q > 0 && p.gcd(&q) == 1 {
        Ok(())
    } else {
        Err(ResolveError::InvalidParameters { p, q })
    }
}

/// The four-ray cone of `Y^{p,q}`.
pub fn ypq_fan(p: i64, q: i64) -> Result<Fan, ResolveError> {
    check_ypq(p, q)?;
    Ok(single(
        3,
        &[&[0, 0, 1], &[1, 0, 1], &[p, p, 1], &[p - q - 1, p - q, 1]],
    ))
}

/// The witness `r` with `4p^2 - 3q^2 = r^2`, if there is one.
pub fn ypq_is_quasiregular(p: i64, q: i64) -> Result<Option<Int>, ResolveError> {
    check_ypq(p, q)?;
    let (p, q) = (Int::from(p), Int::from(q));
    let d = Int::from(4) * &p * &p - Int::from(3) * &q * &q;
    let r = d.sqrt();
    Ok((&r * &r == d).then_some(r))
}

/// The cone over the rays `(u_i, 1)` of a complete nonsingular Fano fan,
/// together with its crepant resolution by the cones `sigma + e_n`.
pub fn canonical_bundle_fan(fano: &Fan) -> Result<(Fan, RefinedFan), ResolveError> {
    let m = fano.dim();
    if !validate_fan(fano).is_valid() {
        return Err(ResolveError::NotFano("not a fan"));
    }
    for c in 0..fano.cones().len() {
        if fano.cones()[c].len() != m || !is_nonsingular(&fano.cone(c)) {
            return Err(ResolveError::NotFano("maximal cones must be unimodular"));
        }
    }

    let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for cone in fano.cones() {
        for k in 0..m {
            let mut wall: Vec<usize> = cone.iter().copied().filter(|&r| r != cone[k]).collect();
            wall.sort_unstable();
            walls.entry(wall).or_default().push(cone[k]);
        }
    }
    for (wall, off) in &walls {
        let side = |x: usize| {
            let mut rows: Vec<IntVec> = wall.iter().map(|&r| fano.rays()[r].clone()).collect();
            rows.push(fano.rays()[x].clone());
            IntMatrix::from_rows(&rows).determinant().signum()
        };
        if off.len() != 2 || side(off[0]) == side(off[1]) {
            return Err(ResolveError::NotFano("not complete"));
        }
    }

    for cone in fano.cones() {
        let gens: Vec<IntVec> = cone.iter().map(|&r| fano.rays()[r].clone()).collect();
        let LinearSolution::Unique(mc) = solve_integer_system(&gens, &vec![Int::one(); m]) else {
            return Err(ResolveError::NotFano("maximal cones must be unimodular"));
        };
        // Unimodular, so the covector is integral.
        let mc: IntVec = mc.iter().map(|x| x.to_integer()).collect();
        let ok = (0..fano.rays().len())
            .filter(|r| !cone.contains(r))
            .all(|r| dot(&mc, &fano.rays()[r]) < Int::one());
        if !ok {
            return Err(ResolveError::NotFano("anticanonical divisor is not ample"));
        }
    }

    let lifted: Vec<IntVec> = fano
        .rays()
        .iter()
        .map(|u| {
            let mut v = u.clone();
            v.push(Int::one());
            v
        })
        .collect();
    let cone_fan = Fan::single_cone(m + 1, lifted.clone())?;
    let apex = lifted.len();
    let mut rays = lifted;
    let mut e = vec![Int::from(0); m + 1];
    e[m] = Int::one();
    rays.push(e);
    let cones = fano
        .cones()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.push(apex);
            c
        })
        .collect();
    let refined = RefinedFan::new(cone_fan.clone(), Fan::new(m + 1, rays, cones)?)?;
    Ok((cone_fan, refined))
}
