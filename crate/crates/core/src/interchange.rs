//! JSON interchange: `{"head": "3", "terms": [[1, "2"], [-1, "5"]]}` for
//! explicit prefixes, `{"family": name, "params": {...}}` for generated specs.
//! Every integer is written as a decimal string.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::cf::{CfSpec, PartialQuotient, Sign};
use crate::convergents::{Convergent, Enclosure};
use crate::error::{CfError, Result};
use crate::families::{family_generator, parse_rational};
use crate::transforms::{AlignmentPoint, Relation, TransformResult};

/// Serde adapter writing a rational as `"p/q"` (or `"p"` when integral).
pub mod rational_string {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::families::parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational `{s}`")))
    }
}

/// Nearest `f64`, computed from the leading bits so huge operands do not overflow.
pub fn ratio_to_f64(v: &BigRational) -> f64 {
    if let Some(f) = v.to_f64() {
        if f.is_finite() {
            return f;
        }
    }
    let n = v.numer();
    let d = v.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(n.clone(), d << (shift as usize))
    } else {
        BigRational::new(n << ((-shift) as usize), d.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

fn parse_int(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| CfError::Parse(format!("{what}: `{s}` is not an integer"))),
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| CfError::Parse(format!("{what}: {n} is not an integer"))),
        other => Err(CfError::Parse(format!("{what}: expected integer, got {other}"))),
    }
}

fn parse_sign(v: &Value, what: &str) -> Result<Sign> {
    let s = match v {
        Value::String(s) => match s.trim() {
            "+" | "+1" | "1" => Some(Sign::Plus),
            "-" | "-1" => Some(Sign::Minus),
            _ => None,
        },
        Value::Number(n) => n.as_i64().and_then(Sign::from_i64),
        _ => None,
    };
    s.ok_or_else(|| CfError::Parse(format!("{what}: partial numerator must be +1 or -1, got {v}")))
}

/// Parses `[[a, b], ...]` with `a` in `{1, -1}`.
pub fn parse_terms(v: &Value) -> Result<Vec<PartialQuotient>> {
    let arr = v
        .as_array()
        .ok_or_else(|| CfError::Parse("terms must be an array of [a, b] pairs".into()))?;
    arr.iter()
        .enumerate()
        .map(|(i, t)| {
            let what = format!("term {}", i + 1);
            match t.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok(PartialQuotient::new(parse_sign(a, &what)?, parse_int(b, &what)?)),
                _ => Err(CfError::Parse(format!("{what}: expected [a, b]"))),
            }
        })
        .collect()
}

pub fn terms_to_json(terms: &[PartialQuotient]) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|t| json!([t.a.to_i64(), t.b.to_string()]))
            .collect(),
    )
}

/// Reads a spec document.
pub fn spec_from_json(v: &Value) -> Result<CfSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| CfError::Parse("spec must be a JSON object".into()))?;
    if let Some(family) = obj.get("family") {
        let name = family
            .as_str()
            .ok_or_else(|| CfError::Parse("family must be a string".into()))?;
        let params = match obj.get("params") {
            None | Some(Value::Null) => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(CfError::Parse("params must be an object".into())),
        };
        return family_generator(name, &params);
    }
    let head = parse_int(
        obj.get("head").ok_or_else(|| CfError::Parse("missing `head`".into()))?,
        "head",
    )?;
    let terms = match obj.get("terms") {
        Some(t) => parse_terms(t)?,
        None => Vec::new(),
    };
    let terminates = match obj.get("terminates") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(CfError::Parse("terminates must be a boolean".into())),
    };
    Ok(if terminates {
        CfSpec::finite(head, terms)
    } else {
        CfSpec::prefix(head, terms)
    })
}

pub fn spec_from_str(s: &str) -> Result<CfSpec> {
    let v: Value = serde_json::from_str(s).map_err(|e| CfError::Parse(e.to_string()))?;
    spec_from_json(&v)
}

/// Writes `spec` with its first `depth` terms (all available terms when `None`).
pub fn spec_to_json(spec: &CfSpec, depth: Option<usize>) -> Result<Value> {
    let n = match (depth, spec.available()) {
        (Some(d), Some(a)) => d.min(a),
        (Some(d), None) => d,
        (None, Some(a)) => a,
        (None, None) => {
            return Err(CfError::Precondition(
                "an unbounded spec needs an explicit depth to serialize".into(),
            ))
        }
    };
    let terms = spec.terms_to(n)?;
    let mut obj = Map::new();
    obj.insert("head".into(), Value::String(spec.head().to_string()));
    obj.insert("terms".into(), terms_to_json(&terms));
    if spec.terminates() && Some(n) == spec.available() {
        obj.insert("terminates".into(), Value::Bool(true));
    }
    if let Some(p) = spec.provenance() {
        obj.insert(
            "provenance".into(),
            json!({ "family": p.family, "params": Value::Object(p.params.clone()) }),
        );
    }
    Ok(Value::Object(obj))
}

fn opt_int(v: &Option<BigInt>) -> Value {
    match v {
        Some(x) => Value::String(x.to_string()),
        None => Value::Null,
    }
}

pub fn alignment_to_json(points: &[AlignmentPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| {
                let mut o = Map::new();
                o.insert("source".into(), json!(p.source));
                o.insert("target".into(), json!(p.target));
                if p.source_last.is_some() {
                    o.insert("source_last".into(), opt_int(&p.source_last));
                }
                if p.target_last.is_some() {
                    o.insert("target_last".into(), opt_int(&p.target_last));
                }
                Value::Object(o)
            })
            .collect(),
    )
}

/// Accepts `[source, target]` pairs or objects with optional `*_last` overrides.
pub fn alignment_from_json(v: &Value) -> Result<Vec<AlignmentPoint>> {
    let arr = v
        .as_array()
        .ok_or_else(|| CfError::Parse("alignment must be an array".into()))?;
    let index = |v: Option<&Value>, what: &str| -> Result<usize> {
        v.and_then(Value::as_u64)
            .and_then(|x| x.to_usize())
            .ok_or_else(|| CfError::Parse(format!("alignment: bad {what}")))
    };
    arr.iter()
        .map(|p| match p {
            Value::Array(pair) if pair.len() == 2 => Ok(AlignmentPoint::plain(
                index(pair.first(), "source")?,
                index(pair.get(1), "target")?,
            )),
            Value::Object(o) => {
                let last = |key: &str| -> Result<Option<BigInt>> {
                    match o.get(key) {
                        None | Some(Value::Null) => Ok(None),
                        Some(v) => parse_int(v, key).map(Some),
                    }
                };
                Ok(AlignmentPoint {
                    source: index(o.get("source"), "source")?,
                    target: index(o.get("target"), "target")?,
                    source_last: last("source_last")?,
                    target_last: last("target_last")?,
                })
            }
            _ => Err(CfError::Parse("alignment entries must be pairs or objects".into())),
        })
        .collect()
}

pub fn transform_to_json(result: &TransformResult) -> Result<Value> {
    let mut v = spec_to_json(&result.output, None)?;
    let obj = v.as_object_mut().expect("spec_to_json returns an object");
    obj.insert("alignment".into(), alignment_to_json(&result.alignment));
    obj.insert("relation".into(), Value::String(result.relation.name().into()));
    obj.insert("source_depth".into(), json!(result.source_depth));
    obj.insert("withheld".into(), json!(result.withheld));
    Ok(v)
}

pub fn relation_from_json(v: Option<&Value>) -> Result<Relation> {
    match v {
        None | Some(Value::Null) => Ok(Relation::Identity),
        Some(Value::String(s)) => {
            Relation::parse(s).ok_or_else(|| CfError::Parse(format!("unknown relation `{s}`")))
        }
        Some(other) => Err(CfError::Parse(format!("relation must be a string, got {other}"))),
    }
}

pub fn convergent_to_json(c: &Convergent) -> Value {
    json!({
        "n": c.n,
        "p": c.p.to_string(),
        "q": c.q.to_string(),
        "det": c.det,
    })
}

/// `floor(v * 10^digits)` as a decimal string, rounded toward `-inf` or `+inf`.
pub fn decimal(v: &BigRational, digits: u32, round_up: bool) -> String {
    let scale = BigInt::from(10).pow(digits);
    let scaled = v * BigRational::from_integer(scale);
    let n = if round_up { scaled.ceil() } else { scaled.floor() }.to_integer();
    crate::quadratic::format_scaled(&n, digits)
}

pub fn enclosure_to_json(e: &Enclosure, digits: u32) -> Value {
    let width = e.width();
    json!({
        "depth": e.depth,
        "lo": e.lo.to_string(),
        "hi": e.hi.to_string(),
        "lo_decimal": decimal(&e.lo, digits, false),
        "hi_decimal": decimal(&e.hi, digits, true),
        "width": width.to_string(),
        "width_f64": ratio_to_f64(&width),
        "point": width.is_zero(),
    })
}

/// Parses a rational given as `"p/q"`, a decimal or an integer.
pub fn rational_from_str(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| CfError::Parse(format!("`{s}` is not a rational")))
}
