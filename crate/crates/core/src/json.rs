//! JSON encodings of shapes, elements, measures and reports.
//!
//! An element is `{"blocks": [B_1, …, B_k]}` with each `B_j` a row-major list
//! of rows of `[re, im]` pairs; a shape is `{"blocks": [n_1, …, n_k]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{is_projection, AlgebraShape, CMat, Element};
use crate::counterexamples::{BlochVector, NonlinearityCertificate};
use crate::error::{Error, Result};
use crate::extension::{ExtensionResult, LinearityAudit, NormBound};
use crate::measures::{AdditivityReport, OddFunction, Representation, ScalarMeasure, Table, TableOracle};

#[derive(Serialize, Deserialize)]
struct ShapeRepr {
    blocks: Vec<usize>,
}

impl Serialize for AlgebraShape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ShapeRepr { blocks: self.blocks().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraShape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ShapeRepr::deserialize(d)?;
        AlgebraShape::new(repr.blocks).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks = self
            .blocks()
            .iter()
            .map(|b| {
                (0..b.nrows())
                    .map(|r| (0..b.ncols()).map(|c| [b[(r, c)].re, b[(r, c)].im]).collect())
                    .collect()
            })
            .collect();
        ElementRepr { blocks }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::deserialize(d)?;
        let mut blocks = Vec::with_capacity(repr.blocks.len());
        for (j, rows) in repr.blocks.iter().enumerate() {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(D::Error::custom(format!("block {j} is not square")));
            }
            blocks.push(CMat::from_fn(n, n, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])));
        }
        Element::from_blocks(blocks).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum OddSpec {
    PolyNz { coeffs: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FallbackSpec {
    TracePower {
        exponent: u32,
        #[serde(default = "unit_scale")]
        scale: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct EntrySpec {
    p: Element,
    value: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum MeasureSpec {
    TraceForm {
        shape: AlgebraShape,
        rho: Element,
    },
    Frame2 {
        c: f64,
        odd: OddSpec,
    },
    Table {
        shape: AlgebraShape,
        #[serde(default)]
        entries: Vec<EntrySpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fallback: Option<FallbackSpec>,
    },
}

impl MeasureSpec {
    fn into_measure(self) -> Result<ScalarMeasure> {
        match self {
            MeasureSpec::TraceForm { shape, rho } => {
                shape.ensure_same(rho.shape())?;
                Ok(ScalarMeasure::trace_form(rho))
            }
            MeasureSpec::Frame2 { c, odd: OddSpec::PolyNz { coeffs } } => {
                ScalarMeasure::frame2(c, OddFunction::poly_nz(coeffs)?)
            }
            MeasureSpec::Table { shape, entries, fallback } => {
                let oracle = fallback.map(|f| match f {
                    FallbackSpec::TracePower { exponent, scale } => TableOracle::TracePower { exponent, scale },
                });
                let mut table = Table::new(oracle);
                for (i, e) in entries.into_iter().enumerate() {
                    shape.ensure_same(e.p.shape())?;
                    if !is_projection(&e.p, 1e-9)? {
                        return Err(Error::MalformedElement(format!("table entry {i} is not a projection")));
                    }
                    table.insert(e.p, Complex64::new(e.value[0], e.value[1]));
                }
                ScalarMeasure::table(shape, table)
            }
        }
    }

    fn from_measure(mu: &ScalarMeasure) -> Result<Self> {
        Ok(match mu.representation() {
            Representation::TraceForm { rho } => MeasureSpec::TraceForm { shape: mu.shape().clone(), rho: rho.clone() },
            Representation::Frame2 { c, odd: OddFunction::PolyNz { coeffs } } => MeasureSpec::Frame2 {
                c: *c,
                odd: OddSpec::PolyNz { coeffs: coeffs.clone() },
            },
            Representation::Table(table) => {
                let fallback = match table.oracle() {
                    None => None,
                    Some(TableOracle::TracePower { exponent, scale }) => {
                        Some(FallbackSpec::TracePower { exponent: *exponent, scale: *scale })
                    }
                    Some(TableOracle::Custom(_)) => {
                        return Err(Error::Unsupported("custom table oracles cannot be serialized".into()))
                    }
                };
                MeasureSpec::Table {
                    shape: mu.shape().clone(),
                    entries: table
                        .entries()
                        .iter()
                        .map(|(p, v)| EntrySpec { p: p.clone(), value: [v.re, v.im] })
                        .collect(),
                    fallback,
                }
            }
        })
    }
}

pub fn measure_from_str(s: &str) -> Result<ScalarMeasure> {
    let spec: MeasureSpec = serde_json::from_str(s)?;
    spec.into_measure()
}

pub fn measure_to_value(mu: &ScalarMeasure) -> Result<Value> {
    Ok(serde_json::to_value(MeasureSpec::from_measure(mu)?)?)
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn bloch(n: &BlochVector) -> Value {
    json!(n.components())
}

pub fn extension_result_to_value(r: &ExtensionResult) -> Value {
    json!({
        "status": r.status,
        "rho": r.rho,
        "residual": r.residual,
        "verified_on": r.verified_on,
    })
}

pub fn additivity_report_to_value(r: &AdditivityReport) -> Value {
    json!({
        "trials": r.trials,
        "max_violation": r.max_violation,
        "bound_estimate": r.bound_estimate,
        "skipped": r.skipped,
        "worst_pair": r.worst_pair.as_ref().map(|(p, q)| json!([p.element(), q.element()])),
    })
}

pub fn linearity_audit_to_value(a: &LinearityAudit) -> Value {
    json!({
        "trials": a.trials,
        "max_commuting_defect": a.max_commuting_defect,
        "max_general_defect": a.max_general_defect,
        "worst_pair": a.worst_pair.as_ref().map(|(x, y)| json!([x, y])),
    })
}

pub fn norm_bound_to_value(b: &NormBound) -> Value {
    json!({ "trace_norm": b.trace_norm, "sup": b.sup, "four_sup": b.four_sup })
}

pub fn certificate_to_value(c: &NonlinearityCertificate) -> Value {
    json!({
        "grid_size": c.grid_size,
        "residual": c.residual,
        "best_fit": c.best_fit,
        "witness": bloch(&c.witness),
    })
}

pub fn complex_to_value(z: Complex64) -> Value {
    complex(z)
}
