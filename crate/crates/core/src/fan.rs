//! Fans, cones, the Gorenstein covector, the slice polytope and the
//! Delzant exact sequence.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::exactlin::{
    common_denominator, coordinates_in_basis, dot, dual_cone, integer_kernel, is_primitive,
    lattice_points_in_polytope, lp_solve, orientation, rank, rat, rat_from_int, smith_normal_form,
    solve_integer_system, ConeError, Int, IntMatrix, IntVec, LatticePoint, LinearProgram,
    LinearSolution, LpStatus, PointKind, PolytopeError, Rational, Relation,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("ray {index} has length {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("cone {cone} refers to ray {ray}, but there are only {rays} rays")]
    RayIndexOutOfRange {
        cone: usize,
        ray: usize,
        rays: usize,
    },
    #[error("no covector pairs to -1 with every ray")]
    NotGorenstein,
    #[error("rays span a proper subspace")]
    NotFullDimensional,
    #[error("Gorenstein index is {0}, the slice needs an integral covector")]
    NonIntegralGamma(Int),
    #[error("vectors are not a basis of the slice lattice")]
    InvalidBasis,
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// A rational polyhedral cone given by its generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    dim: usize,
    generators: Vec<IntVec>,
}

impl Cone {
    pub fn new(dim: usize, generators: Vec<IntVec>) -> Self {
        Self { dim, generators }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[IntVec] {
        &self.generators
    }

    /// Generators as the rows of a matrix.
    pub fn generator_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(&self.generators)
    }

    /// No line through the origin lies in the cone. Decided by finding a
    /// covector that is at least one on every generator.
    pub fn is_strongly_convex(&self) -> bool {
        if self.generators.iter().any(|g| g.iter().all(Zero::is_zero)) {
            return false;
        }
        let mut lp = LinearProgram::maximize(vec![Rational::zero(); self.dim]);
        for g in &self.generators {
            lp.add_constraint(
                g.iter().map(rat_from_int).collect(),
                Relation::Ge,
                Rational::one(),
            );
        }
        lp_solve(&lp).status() == LpStatus::Optimal
    }

    /// Indices of generators lying in the cone spanned by the others.
    pub fn redundant_generators(&self) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| {
                let others: Vec<&IntVec> = self
                    .generators
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, g)| g)
                    .collect();
                in_cone_of(&others, &self.generators[i])
            })
            .collect()
    }
}

fn in_cone_of(gens: &[&IntVec], v: &[Int]) -> bool {
    let mut lp = LinearProgram::maximize(vec![Rational::zero(); gens.len()]);
    for (k, x) in v.iter().enumerate() {
        lp.add_constraint(
            gens.iter().map(|g| rat_from_int(&g[k])).collect(),
            Relation::Eq,
            rat_from_int(x),
        );
    }
    for i in 0..gens.len() {
        lp.set_bounds(i, Some(Rational::zero()), None);
    }
    lp_solve(&lp).status() == LpStatus::Optimal
}

/// A fan stored by its rays and maximal cones (as ray-index lists).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVec>,
    cones: Vec<Vec<usize>>,
    shared: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Fan {
    pub fn new(dim: usize, rays: Vec<IntVec>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        for (index, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::DimensionMismatch {
                    index,
                    found: r.len(),
                    expected: dim,
                });
            }
        }
        for (c, cone) in cones.iter().enumerate() {
            if let Some(&ray) = cone.iter().find(|&&r| r >= rays.len()) {
                return Err(FanError::RayIndexOutOfRange {
                    cone: c,
                    ray,
                    rays: rays.len(),
                });
            }
        }
        let mut shared = BTreeMap::new();
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let common: Vec<usize> = cones[i]
                    .iter()
                    .copied()
                    .filter(|r| cones[j].contains(r))
                    .collect();
                if !common.is_empty() {
                    shared.insert((i, j), common);
                }
            }
        }
        Ok(Self {
            dim,
            rays,
            cones,
            shared,
        })
    }

    /// The fan of a single cone and its faces.
    pub fn single_cone(dim: usize, rays: Vec<IntVec>) -> Result<Self, FanError> {
        let all = (0..rays.len()).collect();
        Self::new(dim, rays, vec![all])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> Cone {
        Cone::new(
            self.dim,
            self.cones[i]
                .iter()
                .map(|&r| self.rays[r].clone())
                .collect(),
        )
    }

    /// Ray indices shared by pairs of maximal cones `(i, j)`, `i < j`.
    /// Pairs meeting only at the origin are omitted.
    pub fn shared_faces(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.shared
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroRay {
        ray: usize,
    },
    NotPrimitive {
        ray: usize,
    },
    DuplicateRay {
        first: usize,
        second: usize,
    },
    NotStronglyConvex {
        cone: usize,
    },
    RedundantGenerator {
        cone: usize,
        ray: usize,
    },
    /// Two maximal cones overlap in something that is not a common face.
    BadIntersection {
        cones: (usize, usize),
    },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            Violation::NotPrimitive { ray } => write!(f, "ray {ray} is not primitive"),
            Violation::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            Violation::NotStronglyConvex { cone } => {
                write!(f, "cone {cone} is not strongly convex")
            }
            Violation::RedundantGenerator { cone, ray } => {
                write!(f, "ray {ray} is redundant in cone {cone}")
            }
            Violation::BadIntersection { cones: (i, j) } => {
                write!(f, "cones {i} and {j} do not meet in a common face")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<Violation>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_fan(f: &Fan) -> FanReport {
    let mut violations = Vec::new();
    for (i, r) in f.rays.iter().enumerate() {
        if r.iter().all(Zero::is_zero) {
            violations.push(Violation::ZeroRay { ray: i });
        } else if !is_primitive(r) {
            violations.push(Violation::NotPrimitive { ray: i });
        }
        if let Some(j) = f.rays[..i].iter().position(|s| s == r) {
            violations.push(Violation::DuplicateRay {
                first: j,
                second: i,
            });
        }
    }
    for (c, rays) in f.cones.iter().enumerate() {
        let cone = f.cone(c);
        if !cone.is_strongly_convex() {
            violations.push(Violation::NotStronglyConvex { cone: c });
            continue;
        }
        for k in cone.redundant_generators() {
            violations.push(Violation::RedundantGenerator {
                cone: c,
                ray: rays[k],
            });
        }
    }
    for i in 0..f.cones.len() {
        for j in i + 1..f.cones.len() {
            if !meet_in_common_face(f, i, j) {
                violations.push(Violation::BadIntersection { cones: (i, j) });
            }
        }
    }
    FanReport { violations }
}

/// Looks for a separating covector vanishing on the common rays, positive on
/// the rest of cone `i` and negative on the rest of cone `j`.
fn meet_in_common_face(f: &Fan, i: usize, j: usize) -> bool {
    let (a, b) = (&f.cones[i], &f.cones[j]);
    let mut lp = LinearProgram::maximize(vec![Rational::zero(); f.dim]);
    let row = |r: usize| -> Vec<Rational> { f.rays[r].iter().map(rat_from_int).collect() };
    for &r in a {
        if b.contains(&r) {
            lp.add_constraint(row(r), Relation::Eq, Rational::zero());
        } else {
            lp.add_constraint(row(r), Relation::Ge, Rational::one());
        }
    }
    for &r in b.iter().filter(|r| !a.contains(r)) {
        lp.add_constraint(row(r), Relation::Le, -Rational::one());
    }
    lp_solve(&lp).status() == LpStatus::Optimal
}

/// Generators extend to a basis of the lattice, i.e. every invariant factor
/// of the generator matrix is one.
pub fn is_nonsingular(c: &Cone) -> bool {
    if c.generators.is_empty() {
        return true;
    }
    if c.generators.len() > c.dim {
        return false;
    }
    smith_normal_form(&c.generator_matrix())
        .iter()
        .all(One::is_one)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GorensteinData {
    pub gamma: Vec<Rational>,
    /// Smallest positive integer making `index * gamma` integral.
    pub index: Int,
}

impl GorensteinData {
    /// `gamma` itself, when it is integral.
    pub fn integral(&self) -> Option<IntVec> {
        self.index
            .is_one()
            .then(|| self.gamma.iter().map(|x| x.to_integer()).collect())
    }

    pub fn pairing(&self, v: &[Int]) -> Rational {
        crate::exactlin::dot_rat_int(&self.gamma, v)
    }
}

/// The covector pairing to `-1` with every ray of `f`.
pub fn gorenstein_vector(f: &Fan) -> Result<GorensteinData, FanError> {
    let rhs = vec![-Int::one(); f.rays.len()];
    match solve_integer_system(&f.rays, &rhs) {
        LinearSolution::Unique(gamma) => {
            let index = common_denominator(&gamma);
            Ok(GorensteinData { gamma, index })
        }
        LinearSolution::Inconsistent => Err(FanError::NotGorenstein),
        LinearSolution::Underdetermined => Err(FanError::NotFullDimensional),
    }
}

/// The lattice polytope cut out of the cone by `<gamma, x> = -1`, in
/// coordinates of a lattice basis of that hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePolytope {
    dim: usize,
    gamma: GorensteinData,
    origin: IntVec,
    basis: Vec<IntVec>,
    vertices: Vec<IntVec>,
    points: Vec<LatticePoint>,
}

impl SlicePolytope {
    /// Ambient dimension `n`; the slice itself has dimension `n - 1`.
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn slice_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn gamma(&self) -> &GorensteinData {
        &self.gamma
    }

    /// The lattice point of the slice used as coordinate origin.
    pub fn origin(&self) -> &[Int] {
        &self.origin
    }

    /// Lattice basis of `ker gamma` used for slice coordinates.
    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    /// Slice coordinates of the fan's rays, in ray order.
    pub fn vertices(&self) -> &[IntVec] {
        &self.vertices
    }

    /// All lattice points, lexicographic in slice coordinates.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn boundary_points(&self) -> impl Iterator<Item = &IntVec> {
        self.points
            .iter()
            .filter(|p| p.kind == PointKind::Boundary)
            .map(|p| &p.coords)
    }

    pub fn interior_points(&self) -> impl Iterator<Item = &IntVec> {
        self.points
            .iter()
            .filter(|p| p.kind == PointKind::Interior)
            .map(|p| &p.coords)
    }

    pub fn interior_count(&self) -> usize {
        self.interior_points().count()
    }

    pub fn lift(&self, coords: &[Int]) -> IntVec {
        let mut x = self.origin.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    }

    /// Slice coordinates of a lattice point on the hyperplane, if it is one.
    pub fn coords(&self, x: &[Int]) -> Option<IntVec> {
        if self.gamma.pairing(x) != rat(-1, 1) {
            return None;
        }
        let diff: IntVec = x.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
        if self.basis.is_empty() {
            return diff.iter().all(Zero::is_zero).then(Vec::new);
        }
        let c = coordinates_in_basis(&self.basis, &diff)?;
        c.iter()
            .all(|r| r.is_integer())
            .then(|| c.iter().map(|r| r.to_integer()).collect())
    }

    /// Vertex indices in counterclockwise boundary order, starting from the
    /// lexicographically smallest vertex. Only meaningful for 2D slices.
    pub fn vertex_cycle(&self) -> Option<Vec<usize>> {
        if self.slice_dim() != 2 {
            return None;
        }
        let start =
            (0..self.vertices.len()).min_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]))?;
        let p = &self.vertices[start];
        let mut rest: Vec<usize> = (0..self.vertices.len()).filter(|&i| i != start).collect();
        rest.sort_by(|&a, &b| {
            let o = orientation(&[
                p.clone(),
                self.vertices[a].clone(),
                self.vertices[b].clone(),
            ]);
            match o.sign() {
                num_bigint::Sign::Plus => Ordering::Less,
                num_bigint::Sign::Minus => Ordering::Greater,
                num_bigint::Sign::NoSign => self.vertices[a].cmp(&self.vertices[b]),
            }
        });
        let mut cycle = vec![start];
        cycle.extend(rest);
        Some(cycle)
    }

    /// Euclidean area in slice coordinates (2D slices only).
    pub fn area(&self) -> Option<Rational> {
        let cycle = self.vertex_cycle()?;
        let mut twice = Int::zero();
        for (k, &i) in cycle.iter().enumerate() {
            let j = cycle[(k + 1) % cycle.len()];
            let (a, b) = (&self.vertices[i], &self.vertices[j]);
            twice += &a[0] * &b[1] - &a[1] * &b[0];
        }
        Some(Rational::new(twice.abs(), Int::from(2)))
    }
}

/// Slice polytope in the canonical (Hermite-reduced) basis of `ker gamma`,
/// with the first ray as origin.
pub fn slice_polytope(f: &Fan, g: &GorensteinData) -> Result<SlicePolytope, FanError> {
    let gamma = g
        .integral()
        .ok_or_else(|| FanError::NonIntegralGamma(g.index.clone()))?;
    let basis = integer_kernel(&IntMatrix::from_rows(&[gamma]));
    slice_polytope_with_basis(f, g, basis)
}

/// Slice polytope in a caller-chosen lattice basis of `ker gamma`.
pub fn slice_polytope_with_basis(
    f: &Fan,
    g: &GorensteinData,
    basis: Vec<IntVec>,
) -> Result<SlicePolytope, FanError> {
    let gamma = g
        .integral()
        .ok_or_else(|| FanError::NonIntegralGamma(g.index.clone()))?;
    if f.rays.is_empty() {
        return Err(FanError::NotFullDimensional);
    }
    let canonical = integer_kernel(&IntMatrix::from_rows(core::slice::from_ref(&gamma)));
    if !same_lattice(&basis, &canonical) || basis.iter().any(|b| !dot(&gamma, b).is_zero()) {
        return Err(FanError::InvalidBasis);
    }
    let mut slice = SlicePolytope {
        dim: f.dim,
        gamma: g.clone(),
        origin: f.rays[0].clone(),
        basis,
        vertices: Vec::new(),
        points: Vec::new(),
    };
    slice.vertices = f
        .rays
        .iter()
        .map(|r| slice.coords(r).ok_or(FanError::NotGorenstein))
        .collect::<Result<_, _>>()?;
    slice.points = lattice_points_in_polytope(&slice.vertices)?;
    Ok(slice)
}

fn same_lattice(a: &[IntVec], b: &[IntVec]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let ha = crate::exactlin::hermite_normal_form(&IntMatrix::from_rows(a)).0;
    let hb = crate::exactlin::hermite_normal_form(&IntMatrix::from_rows(b)).0;
    ha == hb && rank(a) == a.len()
}

/// The cone `{y : <u_j, y> >= 0}` cut out by the rays, given by its
/// primitive generators.
pub fn moment_cone(f: &Fan) -> Result<Cone, FanError> {
    Ok(Cone::new(f.dim, dual_cone(&f.rays, f.dim)?))
}

/// `a` sends the standard basis of `Z^N` to the rays; the columns of `b`
/// form a lattice basis of its kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantData {
    pub a: IntMatrix,
    pub b: IntMatrix,
}

pub fn delzant_matrices(f: &Fan) -> DelzantData {
    let a = IntMatrix::from_columns(&f.rays);
    let kernel = integer_kernel(&a);
    let b = if kernel.is_empty() {
        IntMatrix::zeros(f.rays.len(), 0)
    } else {
        IntMatrix::from_columns(&kernel)
    };
    debug_assert!(kernel.is_empty() || a.mul(&b).is_zero());
    DelzantData { a, b }
}
