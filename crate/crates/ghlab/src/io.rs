//! JSON and CSV encodings of spaces, gluings, functions and measures.
//!
//! Space: `{"points": [...], "dist": [[...]], "basepoint": 0}` with optional
//! `"strictness": "metric" | "pseudometric"`. Entries are numbers or `"p/q"`
//! strings. Gluing: `{"host": space, "embedX": [...], "embedY": [...]}` with
//! optional `"basepointX"`, `"basepointY"` (indices into `X` and `Y`).

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gluing::GluedSpace;
use crate::kantorovich::Measure;
use crate::metric_core::{validate_metric_labeled, PointSet, PointedSpace, Strictness};
use crate::scalar::{Ext, Scalar};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S> {
    let text = match v {
        // the literal digits, so that 0.1 is read as 1/10 by the rational backend
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(parse_err(format!("expected a number, got {other}"))),
    };
    S::parse(&text).ok_or_else(|| parse_err(format!("not a number: {text:?}")))
}

pub fn scalars_from_json<S: Scalar>(v: &Value) -> Result<Vec<S>> {
    v.as_array().ok_or_else(|| parse_err("expected an array"))?.iter().map(scalar_from_json).collect()
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(format!("missing field {key:?}")))
}

fn index(v: &Value) -> Result<usize> {
    v.as_u64().map(|i| i as usize).ok_or_else(|| parse_err(format!("expected an index, got {v}")))
}

fn indices(v: &Value) -> Result<Vec<usize>> {
    v.as_array().ok_or_else(|| parse_err("expected an index array"))?.iter().map(index).collect()
}

fn strictness(obj: &Map<String, Value>, default: Strictness) -> Result<Strictness> {
    match obj.get("strictness").and_then(Value::as_str) {
        None => Ok(default),
        Some("metric") => Ok(Strictness::Metric),
        Some("pseudometric") => Ok(Strictness::Pseudometric),
        Some(s) => Err(parse_err(format!("unknown strictness {s:?}"))),
    }
}

fn space_with_default<S: Scalar>(v: &Value, default: Strictness) -> Result<PointedSpace<S>> {
    let obj = v.as_object().ok_or_else(|| parse_err("space must be an object"))?;
    let rows = field(obj, "dist")?.as_array().ok_or_else(|| parse_err("dist must be an array of rows"))?;
    let matrix = rows.iter().map(scalars_from_json).collect::<Result<Vec<Vec<S>>>>()?;
    let labels: Vec<String> = match obj.get("points") {
        Some(p) => p
            .as_array()
            .ok_or_else(|| parse_err("points must be an array"))?
            .iter()
            .map(|l| match l {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect(),
        None => (0..matrix.len()).map(|i| i.to_string()).collect(),
    };
    if labels.len() != matrix.len() {
        return Err(parse_err(format!("{} labels for {} rows", labels.len(), matrix.len())));
    }
    let space = validate_metric_labeled(labels, matrix, strictness(obj, default)?)?;
    let base = obj.get("basepoint").map(index).transpose()?.unwrap_or(0);
    PointedSpace::new(space, base)
}

pub fn space_from_json<S: Scalar>(v: &Value) -> Result<PointedSpace<S>> {
    space_with_default(v, Strictness::Metric)
}

pub fn space_from_str<S: Scalar>(text: &str) -> Result<PointedSpace<S>> {
    space_from_json(&serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?)
}

/// Square matrix with a header row of labels.
pub fn space_from_csv<S: Scalar>(text: &str, basepoint: usize, strict: Strictness) -> Result<PointedSpace<S>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let labels: Vec<String> = rd.headers().map_err(|e| parse_err(e.to_string()))?.iter().map(str::to_string).collect();
    let mut matrix = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let row = rec.iter().map(|c| S::parse(c).ok_or_else(|| parse_err(format!("not a number: {c:?}")))).collect::<Result<Vec<S>>>()?;
        matrix.push(row);
    }
    if labels.len() != matrix.len() {
        return Err(Error::NotSquare);
    }
    PointedSpace::new(validate_metric_labeled(labels, matrix, strict)?, basepoint)
}

pub fn space_to_json<S: Scalar>(p: &PointedSpace<S>) -> Value {
    json!({
        "points": p.space.labels(),
        "dist": matrix_to_json(&p.space.matrix()),
        "basepoint": p.basepoint,
        "strictness": match p.space.strictness() {
            Strictness::Metric => "metric",
            Strictness::Pseudometric => "pseudometric",
        },
    })
}

pub fn matrix_to_json<S: Scalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| scalars_to_json(r)).collect())
}

pub fn scalars_to_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(S::to_json).collect())
}

pub fn ext_to_json<S: Scalar>(v: &Ext<S>) -> Value {
    v.to_json()
}

pub fn set_to_json(s: &PointSet) -> Value {
    json!(s.indices())
}

/// Reads a gluing; `X` and `Y` are the host restricted to the two index
/// arrays, and the whole gluing is validated.
pub fn glued_from_json<S: Scalar>(v: &Value) -> Result<GluedSpace<S>> {
    let obj = v.as_object().ok_or_else(|| parse_err("gluing must be an object"))?;
    let host = space_with_default::<S>(field(obj, "host")?, Strictness::Pseudometric)?.space;
    let ex = indices(field(obj, "embedX")?)?;
    let ey = indices(field(obj, "embedY")?)?;
    let bx = obj.get("basepointX").map(index).transpose()?.unwrap_or(0);
    let by = obj.get("basepointY").map(index).transpose()?.unwrap_or(0);
    GluedSpace::from_host(host, ex, ey, bx, by)
}

pub fn glued_from_str<S: Scalar>(text: &str) -> Result<GluedSpace<S>> {
    glued_from_json(&serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?)
}

pub fn glued_to_json<S: Scalar>(g: &GluedSpace<S>) -> Value {
    json!({
        "host": space_to_json(&PointedSpace { space: g.host.clone(), basepoint: g.x0() }),
        "embedX": g.embed_x,
        "embedY": g.embed_y,
        "basepointX": g.x.basepoint,
        "basepointY": g.y.basepoint,
    })
}

/// A function as a JSON array aligned with the space's point order.
pub fn function_from_json<S: Scalar>(v: &Value, n: usize) -> Result<Vec<S>> {
    let f = scalars_from_json(v)?;
    if f.len() != n {
        return Err(parse_err(format!("function has {} values for {n} points", f.len())));
    }
    Ok(f)
}

pub fn measure_from_json<S: Scalar>(v: &Value, n: usize) -> Result<Measure<S>> {
    Measure::new(function_from_json(v, n)?)
}
