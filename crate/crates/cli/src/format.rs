//! JSON fan and result files.
//!
//! Integers are JSON numbers when their magnitude is below 2^53 and decimal
//! strings otherwise; rationals are always `"p/q"` strings (or `"p"`).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use toric_core::exactlin::{format_rational, parse_rational, Int, IntVec, Rational};
use toric_core::fan::Fan;

use crate::error::CliError;

const EXACT_LIMIT: i64 = 1 << 53;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonInt(pub Int);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) if x.abs() < EXACT_LIMIT => s.serialize_i64(x),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct IntVisitor;

        impl Visitor<'_> for IntVisitor {
            type Value = JsonInt;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                if v.abs() >= EXACT_LIMIT {
                    return Err(E::custom(
                        "integers of magnitude 2^53 or more must be strings",
                    ));
                }
                Ok(JsonInt(BigInt::from(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                let v = i64::try_from(v).map_err(|_| E::custom("integer too large"))?;
                self.visit_i64(v)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                v.trim()
                    .parse()
                    .map(JsonInt)
                    .map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }

        d.deserialize_any(IntVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonRational(pub Rational);

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(JsonRational)
            .ok_or_else(|| de::Error::custom(format!("not a rational: {s:?}")))
    }
}

pub fn json_vec(v: &[Int]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

pub fn json_vecs(v: &[IntVec]) -> Vec<Vec<JsonInt>> {
    v.iter().map(|x| json_vec(x)).collect()
}

pub fn json_rationals(v: &[Rational]) -> Vec<JsonRational> {
    v.iter().cloned().map(JsonRational).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub dim: usize,
    pub rays: Vec<Vec<JsonInt>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl FanFile {
    pub fn from_fan(f: &Fan, name: Option<String>) -> Self {
        Self {
            dim: f.dim(),
            rays: json_vecs(f.rays()),
            cones: f.cones().to_vec(),
            name,
            provenance: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Builds the fan, checking shapes and indices. Geometric validity is
    /// left to the caller.
    pub fn to_fan(&self) -> Result<Fan, CliError> {
        let rays = self
            .rays
            .iter()
            .map(|r| r.iter().map(|x| x.0.clone()).collect())
            .collect();
        Ok(Fan::new(self.dim, rays, self.cones.clone())?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gorenstein: Option<GorensteinBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangulation: Option<TriangulationBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reeb: Option<ReebBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisBlock {
    pub valid: bool,
    pub violations: Vec<String>,
    /// Per maximal cone.
    pub nonsingular: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_cone: Option<Vec<Vec<JsonInt>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GorensteinBlock {
    pub gamma: Vec<JsonRational>,
    pub index: JsonInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceBlock {
    pub dim: usize,
    /// Lift of the slice origin.
    pub origin: Vec<JsonInt>,
    /// Lattice basis of the Gorenstein hyperplane.
    pub basis: Vec<Vec<JsonInt>>,
    /// Images of the rays, in ray order.
    pub vertices: Vec<Vec<JsonInt>>,
    pub boundary: Vec<Vec<JsonInt>>,
    pub interior: Vec<Vec<JsonInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<JsonRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationBlock {
    /// Slice coordinates; `simplices` index into this list.
    pub points: Vec<Vec<JsonInt>>,
    pub simplices: Vec<Vec<usize>>,
    /// Edges flopped, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flops: Vec<[usize; 2]>,
    /// The refined fan: `rays[i]` lifts `points[i]`.
    pub rays: Vec<Vec<JsonInt>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportBlock {
    /// `h(u_j)` per ray of the refined fan.
    pub heights: Vec<JsonRational>,
    pub margin: JsonRational,
    pub kahler_class: Vec<KahlerTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KahlerTerm {
    pub ray: usize,
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReebBlock {
    pub xi: Vec<f64>,
    pub volume: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian_min_eigenvalue: Option<f64>,
    pub margin: f64,
    pub constraint_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `value < tolerance`.
    Below,
    /// Passes when `value > tolerance`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
}

impl Check {
    pub fn below(value: f64, tolerance: f64) -> Self {
        Self {
            pass: value < tolerance,
            value,
            tolerance,
            bound: Bound::Below,
        }
    }

    pub fn above(value: f64, tolerance: f64) -> Self {
        Self {
            pass: value > tolerance,
            value,
            tolerance,
            bound: Bound::Above,
        }
    }
}

impl ResultFile {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("finite values serialize");
        s.push('\n');
        s
    }

    /// Plain-text summary for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        let pts = |v: &[Vec<JsonInt>]| {
            v.iter()
                .map(|p| {
                    let c: Vec<String> = p.iter().map(|x| x.0.to_string()).collect();
                    format!("({})", c.join(","))
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        if let Some(n) = &self.name {
            line(format!("fan: {n}"));
        }
        if let Some(a) = &self.analysis {
            line(format!("valid: {}", a.valid));
            for v in &a.violations {
                line(format!("  violation: {v}"));
            }
            let ns: Vec<&str> = a
                .nonsingular
                .iter()
                .map(|&b| if b { "yes" } else { "no" })
                .collect();
            line(format!("nonsingular cones: {}", ns.join(" ")));
            if let Some(m) = &a.moment_cone {
                line(format!("moment cone: {}", pts(m)));
            }
        }
        if let Some(g) = &self.gorenstein {
            let gamma: Vec<String> = g.gamma.iter().map(|x| format_rational(&x.0)).collect();
            line(format!(
                "gamma: ({})  index: {}",
                gamma.join(","),
                g.index.0
            ));
        }
        if let Some(s) = &self.slice {
            line(format!("slice vertices: {}", pts(&s.vertices)));
            line(format!(
                "lattice points: {} boundary, {} interior",
                s.boundary.len(),
                s.interior.len()
            ));
            if let Some(a) = &s.area {
                line(format!("area: {}", format_rational(&a.0)));
            }
        }
        if let Some(t) = &self.triangulation {
            line(format!("simplices: {}", t.simplices.len()));
            for s in &t.simplices {
                let c: Vec<Vec<JsonInt>> = s.iter().map(|&i| t.points[i].clone()).collect();
                line(format!("  {}", pts(&c)));
            }
            for e in &t.flops {
                line(format!("flopped edge: {} {}", e[0], e[1]));
            }
            if let Some(n) = &t.note {
                line(format!("note: {n}"));
            }
        }
        if let Some(s) = &self.support {
            let h: Vec<String> = s.heights.iter().map(|x| format_rational(&x.0)).collect();
            line(format!("heights: {}", h.join(" ")));
            line(format!("margin: {}", format_rational(&s.margin.0)));
            for k in &s.kahler_class {
                line(format!(
                    "  kahler class, ray {}: {:.12}",
                    k.ray, k.coefficient
                ));
            }
        }
        if let Some(r) = &self.reeb {
            let xi: Vec<String> = r.xi.iter().map(|x| format!("{x:.12}")).collect();
            line(format!("reeb vector: ({})", xi.join(", ")));
            line(format!("volume: {:.15e}", r.volume));
            line(format!(
                "iterations: {}  gradient norm: {:.3e}",
                r.iterations, r.gradient_norm
            ));
        }
        for (name, c) in &self.checks {
            let op = match c.bound {
                Bound::Below => "<",
                Bound::Above => ">",
            };
            line(format!(
                "{} {name}: {:.3e} (required {op} {:.0e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.value,
                c.tolerance
            ));
        }
        out
    }
}
