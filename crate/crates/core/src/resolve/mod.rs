//! Crepant resolutions of three-dimensional Gorenstein cones as basic
//! lattice triangulations of the slice polygon, and the fan refinements they
//! induce.

mod delaunay;
mod examples;

pub use examples::{
    affine_space, canonical_bundle_fan, conifold, cp2_two_points, del_pezzo_2, projective_line,
    projective_plane, ypq_fan, ypq_is_quasiregular,
};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::exactlin::{dot, dual_cone, Int, IntVec, Rational};
use crate::fan::{gorenstein_vector, is_nonsingular, Fan, FanError, GorensteinData, SlicePolytope};
use delaunay::{find_edge, orient, third, Tri};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("triangulations are only built for 2-dimensional slices, got {0}")]
    DimensionUnsupported(usize),
    #[error("simplex {0} is not unimodular")]
    NotBasic(usize),
    #[error("edge {0:?} is not an interior edge")]
    NotAWall((usize, usize)),
    #[error("the two triangles at edge {0:?} do not form a strictly convex quadrilateral")]
    NotFlippable((usize, usize)),
    #[error("Y^{{p,q}} needs p > q > 0 with gcd 1, got p = {p}, q = {q}")]
    InvalidParameters { p: i64, q: i64 },
    #[error("ray {0} is not on the Gorenstein hyperplane")]
    NotCrepant(usize),
    #[error("ray {0} lies outside the original cone")]
    NotARefinement(usize),
    #[error("the refined cones do not cover the original cone")]
    DoesNotCover,
    #[error("not a complete nonsingular Fano fan: {0}")]
    NotFano(&'static str),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// A triangulation of a lattice polygon. Triangles are counterclockwise,
/// start at their smallest vertex index, and are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triangulation {
    points: Vec<IntVec>,
    simplices: Vec<Tri>,
}

impl Triangulation {
    /// Builds a triangulation from explicit triangles, checking orientation
    /// and unimodularity.
    pub fn new(points: Vec<IntVec>, simplices: Vec<Tri>) -> Result<Self, ResolveError> {
        let mut t = Self { points, simplices };
        for s in t.simplices.iter_mut() {
            if orient(&t.points[s[0]], &t.points[s[1]], &t.points[s[2]]).is_negative() {
                s.swap(1, 2);
            }
        }
        t.normalize();
        t.check_basic()?;
        Ok(t)
    }

    pub fn points(&self) -> &[IntVec] {
        &self.points
    }

    pub fn simplices(&self) -> &[Tri] {
        &self.simplices
    }

    /// Every undirected edge with the triangles containing it.
    pub fn edges(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, t) in self.simplices.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        map
    }

    /// Edges shared by two triangles, sorted.
    pub fn interior_edges(&self) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .filter(|(_, ts)| ts.len() == 2)
            .map(|(e, _)| e)
            .collect()
    }

    /// Twice the total area.
    pub fn doubled_area(&self) -> Int {
        self.simplices
            .iter()
            .map(|s| orient(&self.points[s[0]], &self.points[s[1]], &self.points[s[2]]))
            .sum()
    }

    fn normalize(&mut self) {
        for s in self.simplices.iter_mut() {
            let k = (0..3).min_by_key(|&k| s[k]).expect("three vertices");
            s.rotate_left(k);
        }
        self.simplices.sort_unstable();
    }

    fn check_basic(&self) -> Result<(), ResolveError> {
        for (i, s) in self.simplices.iter().enumerate() {
            if !orient(&self.points[s[0]], &self.points[s[1]], &self.points[s[2]]).is_one() {
                return Err(ResolveError::NotBasic(i));
            }
        }
        Ok(())
    }

    /// Replaces the diagonal `edge` of the quadrilateral formed by its two
    /// triangles with the other diagonal.
    pub fn flop(&self, edge: (usize, usize)) -> Result<Triangulation, ResolveError> {
        let (a, b) = edge;
        let (Some(i), Some(j)) = (
            find_edge(&self.simplices, a, b),
            find_edge(&self.simplices, b, a),
        ) else {
            return Err(ResolveError::NotAWall(edge));
        };
        let c = third(&self.simplices[i], a, b);
        let d = third(&self.simplices[j], b, a);
        let p = &self.points;
        if !orient(&p[d], &p[b], &p[c]).is_positive() || !orient(&p[c], &p[a], &p[d]).is_positive()
        {
            return Err(ResolveError::NotFlippable(edge));
        }
        let mut simplices = self.simplices.clone();
        simplices[i] = [a, d, c];
        simplices[j] = [d, b, c];
        Triangulation::new(self.points.clone(), simplices)
    }
}

/// The canonical basic triangulation of a 2-dimensional slice polygon: the
/// Delaunay triangulation of all its lattice points.
pub fn triangulate_basic(p: &SlicePolytope) -> Result<Triangulation, ResolveError> {
    if p.slice_dim() != 2 {
        return Err(ResolveError::DimensionUnsupported(p.slice_dim()));
    }
    let points: Vec<IntVec> = p.points().iter().map(|q| q.coords.clone()).collect();
    let hull: Vec<usize> = p
        .vertex_cycle()
        .expect("2-dimensional slice")
        .into_iter()
        .map(|v| {
            points
                .binary_search(&p.vertices()[v])
                .expect("vertices are lattice points")
        })
        .collect();
    let simplices = delaunay::delaunay(&points, &hull);
    let t = Triangulation::new(points, simplices)?;
    let area = p.area().expect("2-dimensional slice");
    if Rational::from_integer(t.doubled_area()) != area * Int::from(2) {
        return Err(ResolveError::DoesNotCover);
    }
    Ok(t)
}

/// A wall between two maximal cones of a simplicial fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wall {
    pub cones: (usize, usize),
    /// Rays spanning the wall.
    pub shared: Vec<usize>,
    /// The ray of each cone off the wall.
    pub opposite: (usize, usize),
}

/// A crepant nonsingular refinement of a Gorenstein cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedFan {
    fan: Fan,
    original: Fan,
    gamma: GorensteinData,
    boundary: Vec<bool>,
    walls: Vec<Wall>,
}

impl RefinedFan {
    /// Checks that `fan` is a crepant nonsingular subdivision of `original`
    /// and records which rays lie on its boundary.
    pub fn new(original: Fan, fan: Fan) -> Result<Self, ResolveError> {
        let gamma = gorenstein_vector(&original)?;
        let facets = dual_cone(original.rays(), original.dim()).map_err(FanError::from)?;
        let minus_one = -Rational::one();
        for (i, r) in fan.rays().iter().enumerate() {
            if gamma.pairing(r) != minus_one {
                return Err(ResolveError::NotCrepant(i));
            }
            if facets.iter().any(|m| dot(m, r).is_negative()) {
                return Err(ResolveError::NotARefinement(i));
            }
        }
        for c in 0..fan.cones().len() {
            if fan.cones()[c].len() != fan.dim() || !is_nonsingular(&fan.cone(c)) {
                return Err(ResolveError::NotBasic(c));
            }
        }
        let boundary = fan
            .rays()
            .iter()
            .map(|r| facets.iter().any(|m| dot(m, r).is_zero()))
            .collect();
        let walls = fan
            .shared_faces()
            .iter()
            .filter(|(_, shared)| shared.len() + 1 == fan.dim())
            .map(|(&(i, j), shared)| {
                let off = |c: usize| {
                    *fan.cones()[c]
                        .iter()
                        .find(|r| !shared.contains(r))
                        .expect("simplicial cone")
                };
                Wall {
                    cones: (i, j),
                    shared: shared.clone(),
                    opposite: (off(i), off(j)),
                }
            })
            .collect();
        Ok(Self {
            fan,
            original,
            gamma,
            boundary,
            walls,
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn original(&self) -> &Fan {
        &self.original
    }

    pub fn gamma(&self) -> &GorensteinData {
        &self.gamma
    }

    pub fn is_boundary_ray(&self, ray: usize) -> bool {
        self.boundary[ray]
    }

    pub fn interior_rays(&self) -> Vec<usize> {
        (0..self.boundary.len())
            .filter(|&r| !self.boundary[r])
            .collect()
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }
}

/// The fan over the lifted triangles of `t`.
pub fn refine_fan(
    f: &Fan,
    p: &SlicePolytope,
    t: &Triangulation,
) -> Result<RefinedFan, ResolveError> {
    let rays: Vec<IntVec> = t.points().iter().map(|x| p.lift(x)).collect();
    let cones = t.simplices().iter().map(|s| s.to_vec()).collect();
    RefinedFan::new(f.clone(), Fan::new(f.dim(), rays, cones)?)
}

/// The subdivision of a cone over a lattice segment at every lattice point,
/// its unique crepant resolution.
pub fn refine_segment(f: &Fan, p: &SlicePolytope) -> Result<RefinedFan, ResolveError> {
    if p.slice_dim() != 1 {
        return Err(ResolveError::DimensionUnsupported(p.slice_dim()));
    }
    let rays: Vec<IntVec> = p.points().iter().map(|x| p.lift(&x.coords)).collect();
    let cones = (1..rays.len()).map(|i| alloc::vec![i - 1, i]).collect();
    RefinedFan::new(f.clone(), Fan::new(f.dim(), rays, cones)?)
}
