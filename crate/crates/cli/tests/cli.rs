use std::path::PathBuf;
use std::process::{Command, Output};

use num_bigint::BigInt;
use proptest::prelude::*;
use toric_cli::commands::{self, Example};
use toric_cli::format::{Check, FanFile, JsonInt, JsonRational, ResultFile};
use toric_core::exactlin::Rational;

fn fan_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fans")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn toric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, ResultFile) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = toric(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (
        out.status.code().unwrap(),
        ResultFile::parse(&text).unwrap(),
    )
}

fn ints(v: &[Vec<JsonInt>]) -> Vec<Vec<i64>> {
    v.iter()
        .map(|r| r.iter().map(|x| i64::try_from(&x.0).unwrap()).collect())
        .collect()
}

#[test]
fn bundled_files_match_the_constructors() {
    let cases = [
        ("ypq_2_1", Example::Ypq { p: 2, q: 1 }),
        ("ypq_5_3", Example::Ypq { p: 5, q: 3 }),
        ("cp2_two_points", Example::CanonicalCp2TwoPoints),
        ("canonical_cp2", Example::CanonicalCp2),
        ("canonical_cp1", Example::CanonicalCp1),
        ("conifold", Example::Conifold),
        ("affine_space_3", Example::AffineSpace { n: 3 }),
    ];
    for (name, e) in cases {
        let bundled = std::fs::read_to_string(fan_path(name)).unwrap();
        assert_eq!(bundled, commands::example(e).unwrap().to_json(), "{name}");
    }
    let ypq = commands::example(Example::Ypq { p: 2, q: 1 }).unwrap();
    assert_eq!(
        ints(&ypq.rays),
        [[0, 0, 1], [1, 0, 1], [2, 2, 1], [0, 1, 1]]
    );
}

#[test]
fn large_integers_are_strings() {
    let big: BigInt = "123456789012345678901234567890".parse().unwrap();
    let file = FanFile {
        dim: 2,
        rays: vec![vec![JsonInt(big.clone()), JsonInt(1.into())]],
        cones: vec![vec![0]],
        name: None,
        provenance: None,
    };
    let text = file.to_json();
    assert!(text.contains("\"123456789012345678901234567890\""));
    assert_eq!(FanFile::parse(&text).unwrap(), file);
    // 2^53 as a bare number would already have lost precision elsewhere.
    assert!(FanFile::parse(r#"{"dim":1,"rays":[[9007199254740992]],"cones":[[0]]}"#).is_err());
    assert!(FanFile::parse(r#"{"dim":1,"rays":[["9007199254740992"]],"cones":[[0]]}"#).is_ok());
}

fn rational() -> impl Strategy<Value = Rational> {
    (any::<i64>(), 1..i64::MAX).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

proptest! {
    #[test]
    fn fan_files_round_trip(
        rays in prop::collection::vec(prop::collection::vec(any::<i64>(), 3), 1..6),
        name in proptest::option::of("[a-z_0-9]{1,12}"),
    ) {
        let file = FanFile {
            dim: 3,
            cones: vec![(0..rays.len()).collect()],
            rays: rays.iter().map(|r| r.iter().map(|&x| JsonInt(x.into())).collect()).collect(),
            name,
            provenance: None,
        };
        prop_assert_eq!(FanFile::parse(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn result_files_round_trip(
        gamma in prop::collection::vec(rational(), 3),
        value in any::<f64>().prop_filter("finite", |x| x.is_finite()),
    ) {
        let mut r = ResultFile {
            name: Some("x".into()),
            gorenstein: Some(toric_cli::format::GorensteinBlock {
                gamma: gamma.into_iter().map(JsonRational).collect(),
                index: JsonInt(1.into()),
            }),
            ..ResultFile::default()
        };
        r.checks.insert("c".into(), Check::below(value, 1e-9));
        prop_assert_eq!(ResultFile::parse(&r.to_json()).unwrap(), r);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let g = garbage.to_string_lossy();
    assert_eq!(toric(&["analyze", &g]).status.code(), Some(2));
    assert_eq!(
        toric(&["analyze", "/nonexistent.json"]).status.code(),
        Some(2)
    );
    assert_eq!(toric(&["example", "dodecahedron"]).status.code(), Some(2));
    assert_eq!(
        toric(&["example", "ypq", "--p", "2", "--q", "2"])
            .status
            .code(),
        Some(2)
    );

    let invalid = dir.path().join("invalid.json");
    std::fs::write(
        &invalid,
        r#"{"dim":2,"rays":[[1,0],[-1,0]],"cones":[[0,1]]}"#,
    )
    .unwrap();
    let out = toric(&["--json", "analyze", &invalid.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(err["code"], 3);
    assert!(err["error"]
        .as_str()
        .unwrap()
        .contains("not strongly convex"));

    let out = toric(&["support", &fan_path("conifold")]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no interior lattice points"));

    assert_eq!(
        toric(&["render", &fan_path("canonical_cp1")]).status.code(),
        Some(4)
    );
    let four = dir.path().join("four.json");
    std::fs::write(
        &four,
        commands::example(Example::AffineSpace { n: 4 })
            .unwrap()
            .to_json(),
    )
    .unwrap();
    assert_eq!(
        toric(&["resolve", &four.to_string_lossy()]).status.code(),
        Some(4)
    );
}

#[test]
fn analyze_reports_gorenstein_data_and_slices() {
    let (code, r) = json(&["analyze", &fan_path("ypq_5_3")]);
    assert_eq!(code, 0);
    assert_eq!(r.slice.unwrap().interior.len(), 4);

    let (_, r) = json(&["analyze", &fan_path("cp2_two_points")]);
    let g = r.gorenstein.unwrap();
    let gamma: Vec<Rational> = g.gamma.into_iter().map(|x| x.0).collect();
    assert_eq!(gamma, [0, 0, -1].map(|x| Rational::from_integer(x.into())));
    assert_eq!(r.slice.unwrap().interior.len(), 1);
    assert_eq!(r.analysis.unwrap().nonsingular, [false]);

    let (_, r) = json(&["analyze", &fan_path("conifold")]);
    assert!(r.slice.unwrap().interior.is_empty());
}

#[test]
fn resolve_and_flop() {
    let (_, r) = json(&["resolve", &fan_path("ypq_5_3")]);
    assert_eq!(r.triangulation.unwrap().simplices.len(), 10);

    let (_, r) = json(&["resolve", &fan_path("conifold")]);
    let t = r.triangulation.unwrap();
    assert_eq!(t.simplices.len(), 2);
    assert_eq!(t.note.as_deref(), Some("no interior points"));
    let diagonal = |t: &toric_cli::format::TriangulationBlock| {
        let (a, b) = (&t.simplices[0], &t.simplices[1]);
        let mut shared: Vec<Vec<i64>> = a
            .iter()
            .filter(|i| b.contains(i))
            .map(|&i| ints(&t.points[i..=i])[0].clone())
            .collect();
        shared.sort();
        shared
    };
    let before = diagonal(&t);
    let (_, r) = json(&["resolve", "--flop", "0", &fan_path("conifold")]);
    let after = diagonal(&r.triangulation.unwrap());
    assert_ne!(before, after);
    let mut all = [before, after].concat();
    all.sort();
    assert_eq!(all, [[0, 0], [0, 1], [1, 0], [1, 1]]);

    let (code, _) = json(&[
        "resolve",
        "--flop",
        "0",
        "--flop",
        "0",
        &fan_path("conifold"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        toric(&["resolve", "--flop", "1", &fan_path("conifold")])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn support_on_a_segment() {
    let (code, r) = json(&["support", &fan_path("canonical_cp1")]);
    assert_eq!(code, 0);
    let s = r.support.unwrap();
    assert_eq!(s.kahler_class.len(), 1);
    assert!(s.kahler_class[0].coefficient < 0.0);
}

#[test]
fn reeb_of_cp2_blown_up_at_two_points() {
    let (code, r) = json(&["reeb", &fan_path("cp2_two_points")]);
    assert_eq!(code, 0);
    let xi = r.reeb.unwrap().xi;
    assert!((xi[0] - 2.66881649).abs() < 1e-6, "{xi:?}");
    assert!((xi[1] - 2.66881649).abs() < 1e-6);
}

#[test]
fn verify_fails_only_on_the_full_legendre_level() {
    // Every check passes except the literal F = l_xi, which is off by the
    // factor 1/2 of the real Legendre transform.
    let (code, r) = json(&["verify", &fan_path("ypq_2_1")]);
    assert_eq!(code, 7);
    let failing: Vec<&str> = r
        .checks
        .iter()
        .filter(|(_, c)| !c.pass)
        .map(|(k, _)| k.as_str())
        .collect();
    assert_eq!(failing, ["legendre_identity"]);
    assert!(r.checks["legendre_half_identity"].pass);
    assert!(r.checks.contains_key("resolved_positive_definite"));
}

#[test]
fn pipeline_runs_on_every_bundled_fan() {
    for name in [
        "affine_space_3",
        "canonical_cp1",
        "canonical_cp2",
        "conifold",
        "cp2_two_points",
        "ypq_2_1",
        "ypq_5_3",
    ] {
        let path = fan_path(name);
        for cmd in ["analyze", "resolve", "reeb"] {
            assert_eq!(toric(&[cmd, &path]).status.code(), Some(0), "{cmd} {name}");
        }
        let expected = if name == "conifold" { 5 } else { 0 };
        assert_eq!(
            toric(&["support", &path]).status.code(),
            Some(expected),
            "{name}"
        );
    }
}

#[test]
fn rendering_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cp2.svg");
    let o = out.to_string_lossy();
    assert_eq!(
        toric(&["render", &fan_path("cp2_two_points"), "--out", &o])
            .status
            .code(),
        Some(0)
    );
    let first = std::fs::read_to_string(&out).unwrap();
    toric(&["render", &fan_path("cp2_two_points"), "--out", &o]);
    assert_eq!(first, std::fs::read_to_string(&out).unwrap());

    // Pentagon, five triangles through (1,1): 5 boundary + 5 spokes.
    assert_eq!(first.matches("<line ").count(), 10);
    assert_eq!(first.matches(r##"fill="#d1495b""##).count(), 1);
    let polygon = first.lines().find(|l| l.starts_with("<polygon")).unwrap();
    assert_eq!(polygon.matches(',').count(), 5);
    assert!(first.contains(r#"width="120" height="120""#));

    let svg = String::from_utf8(toric(&["render", &fan_path("ypq_5_3")]).stdout).unwrap();
    let polygon = svg.lines().find(|l| l.starts_with("<polygon")).unwrap();
    assert_eq!(polygon.matches(',').count(), 4);
}

#[test]
fn analyze_without_an_integral_slice() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        // gamma = (-1, -1, 1/2): index 2.
        (
            r#"{"dim":3,"rays":[[1,0,0],[0,1,0],[1,1,2]],"cones":[[0,1,2]]}"#,
            true,
        ),
        // Four rays off any common level: no gamma at all.
        (
            r#"{"dim":3,"rays":[[1,0,1],[0,1,1],[-1,0,1],[0,-1,2]],"cones":[[0,1,2,3]]}"#,
            false,
        ),
    ];
    for (i, (text, gorenstein)) in cases.into_iter().enumerate() {
        let path = dir.path().join(format!("{i}.json"));
        std::fs::write(&path, text).unwrap();
        let p = path.to_string_lossy();
        let (code, r) = json(&["analyze", &p]);
        assert_eq!(code, 0);
        assert!(r.slice.is_none());
        assert_eq!(r.gorenstein.is_some(), gorenstein);
        assert_eq!(toric(&["resolve", &p]).status.code(), Some(3));
    }
}
