//! JSON encoding of module representations. Integers are JSON numbers when
//! they fit in 64 bits and decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::rep::ModuleRep;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct RawRep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    l: usize,
    d: usize,
    e: usize,
    tensor: Value,
}

pub fn int_from_json(v: &Value, location: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Invalid(format!("{location}: {n} is not an integer")))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Invalid(format!("{location}: {s:?} is not a decimal integer"))),
        other => Err(Error::Invalid(format!("{location}: expected integer, found {other}"))),
    }
}

pub fn int_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(i) => Value::from(i),
        None => Value::String(n.to_string()),
    }
}

fn array<'a>(v: &'a Value, location: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Invalid(format!("{location}: expected array")))
}

/// Validate raw tensor data against the declared shape.
pub fn rep_from_value(v: &Value) -> Result<ModuleRep> {
    let raw: RawRep = serde_json::from_value(v.clone())?;
    let mut nested = Vec::new();
    for (k, slice) in array(&raw.tensor, "tensor")?.iter().enumerate() {
        let mut rows = Vec::new();
        for (i, row) in array(slice, &format!("tensor[{k}]"))?.iter().enumerate() {
            let loc = format!("tensor[{k}][{i}]");
            let ints = array(row, &loc)?
                .iter()
                .enumerate()
                .map(|(j, x)| int_from_json(x, &format!("{loc}[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            rows.push(ints);
        }
        nested.push(rows);
    }
    let rep = ModuleRep::from_nested(raw.l, raw.d, raw.e, nested)?;
    Ok(match raw.name {
        Some(n) => rep.named(n),
        None => rep,
    })
}

pub fn rep_from_json(s: &str) -> Result<ModuleRep> {
    rep_from_value(&serde_json::from_str(s)?)
}

pub fn rep_to_value(rep: &ModuleRep) -> Value {
    let tensor = rep
        .nested()
        .iter()
        .map(|s| {
            Value::Array(
                s.iter()
                    .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
                    .collect(),
            )
        })
        .collect();
    serde_json::to_value(RawRep {
        name: rep.name().map(str::to_owned),
        l: rep.l(),
        d: rep.d(),
        e: rep.e(),
        tensor: Value::Array(tensor),
    })
    .expect("plain data serializes")
}

pub fn rep_to_json(rep: &ModuleRep) -> String {
    serde_json::to_string_pretty(&rep_to_value(rep)).expect("plain data serializes")
}
