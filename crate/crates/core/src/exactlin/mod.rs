//! Exact integer and rational linear algebra, plus the small polyhedral
//! toolkit everything else is built on.
//!
//! All arithmetic is arbitrary precision. Nothing in this module touches
//! floating point.

mod cone;
mod lattice;
mod lp;
mod matrix;

pub use cone::{cone_contains, dual_cone, ConeError};
pub use lattice::{
    lattice_points_in_polytope, polytope_facets, LatticePoint, PointKind, PolytopeError,
};
pub use lp::{solve as lp_solve, Constraint, LinearProgram, LpOutcome, LpStatus, Relation};
pub(crate) use matrix::{coordinates_in_basis, solve_integer_system};
pub use matrix::{
    hermite_normal_form, integer_kernel, rank, smith_normal_form, solve_linear_system, IntMatrix,
    LinearSolution,
};

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision integer.
pub type Int = BigInt;
/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;
/// Integer vector in a lattice.
pub type IntVec = Vec<Int>;

/// Builds an integer vector from machine integers.
pub fn ivec(entries: &[i64]) -> IntVec {
    entries.iter().map(|&x| Int::from(x)).collect()
}

/// Rational `num/den`; panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Int::from(num), Int::from(den))
}

pub fn rat_from_int(x: &Int) -> Rational {
    Rational::from_integer(x.clone())
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[Rational], b: &[Int]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * rat_from_int(y))
}

/// Greatest common divisor of all entries (zero for the zero vector).
pub fn content(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}

/// Divides out the content. The zero vector is returned unchanged.
pub fn primitive(v: &[Int]) -> IntVec {
    let g = content(v);
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub fn is_primitive(v: &[Int]) -> bool {
    content(v).is_one()
}

/// Least common multiple of the denominators.
pub fn common_denominator(v: &[Rational]) -> Int {
    v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn int_to_f64(x: &Int) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn vec_to_f64(v: &[Int]) -> Vec<f64> {
    v.iter().map(int_to_f64).collect()
}

/// Orientation determinant of `points[1..] - points[0]` (square case).
pub fn orientation(points: &[IntVec]) -> Int {
    let dim = points.len().saturating_sub(1);
    let mut m = IntMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = &points[i + 1][j] - &points[0][j];
        }
    }
    m.determinant()
}

/// Generalized cross product: the vector of signed maximal minors of the
/// `(n-1) x n` matrix whose rows are `vectors`. It is orthogonal to every
/// row and vanishes exactly when the rows are dependent.
pub fn cross_product(vectors: &[IntVec], n: usize) -> IntVec {
    debug_assert_eq!(vectors.len() + 1, n);
    (0..n)
        .map(|skip| {
            let mut minor = IntMatrix::zeros(n - 1, n - 1);
            for (r, v) in vectors.iter().enumerate() {
                let mut c = 0;
                for (j, x) in v.iter().enumerate() {
                    if j != skip {
                        minor[(r, c)] = x.clone();
                        c += 1;
                    }
                }
            }
            let d = minor.determinant();
            if skip % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Sign of an integer as -1, 0, 1.
pub fn sign(x: &Int) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn format_rational(x: &Rational) -> alloc::string::String {
    use alloc::string::ToString;
    if x.is_integer() {
        x.numer().to_string()
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().ok()?;
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
