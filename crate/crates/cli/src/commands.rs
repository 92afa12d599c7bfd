//! One function per subcommand, from a parsed fan file to result blocks.

use toric_core::fan::{
    gorenstein_vector, is_nonsingular, moment_cone, slice_polytope, validate_fan, Fan,
    SlicePolytope,
};
use toric_core::kclass::{find_compact_support, kahler_class};
use toric_core::reeb::{minimize_volume, ReebProblem, ReebSolution};
use toric_core::resolve::{
    affine_space, canonical_bundle_fan, conifold, cp2_two_points, projective_line,
    projective_plane, refine_fan, refine_segment, triangulate_basic, ypq_fan, RefinedFan,
    Triangulation,
};

use crate::error::CliError;
use crate::format::{
    json_rationals, json_vec, json_vecs, AnalysisBlock, FanFile, GorensteinBlock, JsonInt,
    JsonRational, KahlerTerm, ReebBlock, ResultFile, SliceBlock, SupportBlock, TriangulationBlock,
};
use crate::{svg, verify};

/// The fan of a file that must describe a single full cone.
pub fn load_cone(file: &FanFile) -> Result<Fan, CliError> {
    let fan = file.to_fan()?;
    let report = validate_fan(&fan);
    if !report.is_valid() {
        let v: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::InvalidFan(v.join("; ")));
    }
    let mut all: Vec<usize> = fan.cones().first().cloned().unwrap_or_default();
    all.sort_unstable();
    if fan.cones().len() != 1 || all != (0..fan.rays().len()).collect::<Vec<_>>() {
        return Err(CliError::InvalidFan(
            "expected a single cone containing every ray".into(),
        ));
    }
    Ok(fan)
}

fn base(file: &FanFile) -> ResultFile {
    ResultFile {
        name: file.name.clone(),
        ..ResultFile::default()
    }
}

fn gorenstein_block(f: &Fan) -> Result<GorensteinBlock, CliError> {
    let g = gorenstein_vector(f)?;
    Ok(GorensteinBlock {
        gamma: json_rationals(&g.gamma),
        index: JsonInt(g.index),
    })
}

fn slice_block(p: &SlicePolytope) -> SliceBlock {
    SliceBlock {
        dim: p.slice_dim(),
        origin: json_vec(p.origin()),
        basis: json_vecs(p.basis()),
        vertices: json_vecs(p.vertices()),
        boundary: p.boundary_points().map(|x| json_vec(x)).collect(),
        interior: p.interior_points().map(|x| json_vec(x)).collect(),
        area: p.area().map(JsonRational),
    }
}

/// Validity, nonsingularity and, for a single cone, Gorenstein data, moment
/// cone and slice polytope.
pub fn analyze(file: &FanFile) -> Result<ResultFile, CliError> {
    let fan = file.to_fan()?;
    let report = validate_fan(&fan);
    if !report.is_valid() {
        let v: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::InvalidFan(v.join("; ")));
    }
    let nonsingular = (0..fan.cones().len())
        .map(|c| is_nonsingular(&fan.cone(c)))
        .collect();
    let single = load_cone(file).is_ok();
    let mut out = base(file);
    out.analysis = Some(AnalysisBlock {
        valid: true,
        violations: Vec::new(),
        nonsingular,
        moment_cone: if single {
            Some(json_vecs(moment_cone(&fan)?.generators()))
        } else {
            None
        },
    });
    // Non-Gorenstein fans are still valid; they just have no slice.
    if let Ok(g) = gorenstein_vector(&fan) {
        out.gorenstein = Some(GorensteinBlock {
            gamma: json_rationals(&g.gamma),
            index: JsonInt(g.index.clone()),
        });
        if single && g.integral().is_some() {
            out.slice = Some(slice_block(&slice_polytope(&fan, &g)?));
        }
    }
    Ok(out)
}

/// A crepant resolution of a single Gorenstein cone.
pub struct Resolution {
    pub slice: SlicePolytope,
    /// Present for 2-dimensional slices.
    pub triangulation: Option<Triangulation>,
    pub flops: Vec<(usize, usize)>,
    pub refined: RefinedFan,
}

/// Resolves a cone with a 1- or 2-dimensional slice. `flops` index into
/// the interior edges of the current triangulation, in sorted order.
pub fn resolve_cone(fan: &Fan, flops: &[usize]) -> Result<Resolution, CliError> {
    let g = gorenstein_vector(fan)?;
    let slice = slice_polytope(fan, &g)?;
    match slice.slice_dim() {
        1 if flops.is_empty() => {
            let refined = refine_segment(fan, &slice)?;
            Ok(Resolution {
                slice,
                triangulation: None,
                flops: Vec::new(),
                refined,
            })
        }
        1 => Err(CliError::Usage("a segment has no edges to flop".into())),
        2 => {
            let mut t = triangulate_basic(&slice)?;
            let mut done = Vec::new();
            for &i in flops {
                let edges = t.interior_edges();
                let e = *edges.get(i).ok_or_else(|| {
                    CliError::Usage(format!(
                        "flop index {i} is out of range: the triangulation has {} interior edges",
                        edges.len()
                    ))
                })?;
                t = t.flop(e)?;
                done.push(e);
            }
            let refined = refine_fan(fan, &slice, &t)?;
            Ok(Resolution {
                slice,
                triangulation: Some(t),
                flops: done,
                refined,
            })
        }
        d => Err(CliError::Unsupported(format!(
            "crepant resolutions are built for slices of dimension 1 or 2, got {d}"
        ))),
    }
}

fn require_triangulated(fan: &Fan) -> Result<(), CliError> {
    if fan.dim() != 3 {
        return Err(CliError::Unsupported(format!(
            "pictures need a 3-dimensional cone, got dimension {}",
            fan.dim()
        )));
    }
    Ok(())
}

fn triangulation_block(r: &Resolution) -> TriangulationBlock {
    let fan = r.refined.fan();
    let (points, simplices) = match &r.triangulation {
        Some(t) => (
            json_vecs(t.points()),
            t.simplices().iter().map(|s| s.to_vec()).collect(),
        ),
        // Segment: consecutive lattice points.
        None => (
            r.slice
                .points()
                .iter()
                .map(|x| json_vec(&x.coords))
                .collect(),
            (1..r.slice.points().len())
                .map(|i| vec![i - 1, i])
                .collect(),
        ),
    };
    TriangulationBlock {
        points,
        simplices,
        flops: r.flops.iter().map(|&(a, b)| [a, b]).collect(),
        rays: json_vecs(fan.rays()),
        cones: fan.cones().to_vec(),
        note: (r.slice.interior_count() == 0).then(|| "no interior points".to_string()),
    }
}

pub fn resolve(file: &FanFile, flops: &[usize]) -> Result<ResultFile, CliError> {
    let fan = load_cone(file)?;
    let r = resolve_cone(&fan, flops)?;
    let mut out = base(file);
    out.gorenstein = Some(gorenstein_block(&fan)?);
    out.slice = Some(slice_block(&r.slice));
    out.triangulation = Some(triangulation_block(&r));
    Ok(out)
}

pub fn support(file: &FanFile, flops: &[usize]) -> Result<ResultFile, CliError> {
    let fan = load_cone(file)?;
    let r = resolve_cone(&fan, flops)?;
    let h = match find_compact_support(&r.refined) {
        Ok(h) => h,
        Err(e) if r.slice.interior_count() == 0 => {
            return Err(CliError::NoSupport(format!(
                "{e}: the slice polytope has no interior lattice points, so the resolution \
                 has no compact exceptional divisor"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let class = kahler_class(&h.function, &r.refined)?;
    let mut out = base(file);
    out.triangulation = Some(triangulation_block(&r));
    out.support = Some(SupportBlock {
        heights: json_rationals(h.function.heights()),
        margin: JsonRational(h.margin),
        kahler_class: class
            .coefficients
            .into_iter()
            .map(|(ray, coefficient)| KahlerTerm { ray, coefficient })
            .collect(),
    });
    Ok(out)
}

pub fn reeb_block(s: &ReebSolution) -> ReebBlock {
    ReebBlock {
        xi: s.xi.clone(),
        volume: s.volume,
        gradient_norm: s.gradient_norm,
        iterations: s.iterations,
        hessian_min_eigenvalue: s
            .hessian_min_eigenvalue
            .is_finite()
            .then_some(s.hessian_min_eigenvalue),
        margin: s.margin,
        constraint_residual: s.constraint_residual,
    }
}

pub fn solve_reeb(fan: &Fan) -> Result<ReebSolution, CliError> {
    Ok(minimize_volume(&ReebProblem::new(fan)?)?)
}

pub fn reeb(file: &FanFile) -> Result<ResultFile, CliError> {
    let fan = load_cone(file)?;
    let s = solve_reeb(&fan)?;
    let mut out = base(file);
    out.reeb = Some(reeb_block(&s));
    Ok(out)
}

/// Runs the numerical property suite. The result carries every check; the
/// caller decides the exit status from them.
pub fn verify(file: &FanFile) -> Result<ResultFile, CliError> {
    let fan = load_cone(file)?;
    let s = solve_reeb(&fan)?;
    let mut out = base(file);
    out.checks = verify::run(&fan, &s)?;
    out.reeb = Some(reeb_block(&s));
    Ok(out)
}

pub fn render(file: &FanFile, flops: &[usize]) -> Result<String, CliError> {
    let fan = load_cone(file)?;
    require_triangulated(&fan)?;
    let r = resolve_cone(&fan, flops)?;
    let t = r.triangulation.as_ref().expect("2-dimensional slice");
    Ok(svg::render(&r.slice, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    Ypq { p: i64, q: i64 },
    CanonicalCp2,
    CanonicalCp2TwoPoints,
    CanonicalCp1,
    Conifold,
    AffineSpace { n: usize },
}

pub fn example(e: Example) -> Result<FanFile, CliError> {
    let (fan, name, provenance) = match e {
        Example::Ypq { p, q } => (
            ypq_fan(p, q)?,
            format!("ypq_{p}_{q}"),
            format!("example ypq --p {p} --q {q}"),
        ),
        Example::CanonicalCp2 => (
            canonical_bundle_fan(&projective_plane())?.0,
            "canonical_cp2".into(),
            "example canonical-cp2".into(),
        ),
        Example::CanonicalCp2TwoPoints => (
            cp2_two_points(),
            "cp2_two_points".into(),
            "example canonical-cp2-two-points".into(),
        ),
        Example::CanonicalCp1 => (
            canonical_bundle_fan(&projective_line())?.0,
            "canonical_cp1".into(),
            "example canonical-cp1".into(),
        ),
        Example::Conifold => (conifold(), "conifold".into(), "example conifold".into()),
        Example::AffineSpace { n } => {
            if n == 0 {
                return Err(CliError::Usage("affine space needs n >= 1".into()));
            }
            (
                affine_space(n),
                format!("affine_space_{n}"),
                format!("example affine-space --n {n}"),
            )
        }
    };
    let mut file = FanFile::from_fan(&fan, Some(name));
    file.provenance = Some(provenance);
    Ok(file)
}
