//! JSON certificate documents.
//!
//! ```text
//! {"ampleforge-cert": 1, "root": NODE}
//! NODE := {"node": "base"|"assume"|"glue"|"cremona"|"scale"|"sum",
//!          "claim": {"kind": "nef"|"ample", "vector": "<d;m,...>"},
//!          ...node fields, "children": [NODE, ...]}
//! ```
//!
//! Rationals are strings `"p"` or `"p/q"`. Decoding walks the `Value` tree by
//! hand so every error names the JSON location that caused it.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{Certificate, Claim};
use crate::base::{BaseWitness, Family, FamilyParams};
use crate::cremona::{CremonaOp, CremonaWord};
use crate::lattice::{parse_rational, parse_vector, PositivityKind, Rational};

pub const FORMAT_HEADER: &str = "ampleforge-cert";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema error at {location}: {message}")]
pub struct SchemaError {
    pub location: String,
    pub message: String,
}

fn schema<T>(location: &str, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError {
        location: location.to_string(),
        message: message.into(),
    })
}

pub fn encode(c: &Certificate) -> String {
    let doc = json!({ FORMAT_HEADER: FORMAT_VERSION, "root": node_to_value(c) });
    serde_json::to_string_pretty(&doc).expect("JSON values always serialize")
}

fn claim_value(claim: &Claim) -> Value {
    json!({ "kind": claim.kind.as_str(), "vector": claim.vector.to_string() })
}

fn word_value(word: &CremonaWord) -> Value {
    Value::Array(
        word.ops()
            .iter()
            .map(|op| match op {
                CremonaOp::Reflect(i, j, k) => json!({ "op": "reflect", "i": i, "j": j, "k": k }),
                CremonaOp::Permute(map) => json!({ "op": "permute", "map": map }),
                CremonaOp::SortDescending => json!({ "op": "sort" }),
            })
            .collect(),
    )
}

fn witness_value(w: &BaseWitness) -> Value {
    json!({
        "family": w.family.as_str(),
        "scale": w.scale.to_string(),
        "permutation": w.permutation,
        "params": {
            "d": w.params.degree.to_string(),
            "m1": w.params.m1.to_string(),
            "m2": w.params.m2.to_string(),
            "r": w.params.ones,
            "zeros": w.params.zeros,
        },
        "remark": w.remark_based,
    })
}

fn node_to_value(c: &Certificate) -> Value {
    let mut obj = Map::new();
    let tag = match c {
        Certificate::Base { witness, .. } => {
            obj.insert("witness".into(), witness_value(witness));
            "base"
        }
        Certificate::Assume { label, .. } => {
            obj.insert("label".into(), json!(label));
            "assume"
        }
        Certificate::Glue { site, .. } => {
            obj.insert("site".into(), json!(site));
            "glue"
        }
        Certificate::Cremona { claim, word, .. } => {
            // Sorts are stored as the permutation they realize on the claim.
            let resolved = crate::cremona::apply_word_resolved(word, &claim.vector)
                .map(|(_, w)| w)
                .unwrap_or_else(|_| word.clone());
            obj.insert("word".into(), word_value(&resolved));
            "cremona"
        }
        Certificate::Scale { factor, .. } => {
            obj.insert("factor".into(), json!(factor.to_string()));
            "scale"
        }
        Certificate::Sum { .. } => "sum",
    };
    obj.insert("node".into(), json!(tag));
    obj.insert("claim".into(), claim_value(c.claim()));
    let children: Vec<Value> = c.children().into_iter().map(node_to_value).collect();
    if !children.is_empty() {
        obj.insert("children".into(), Value::Array(children));
    }
    Value::Object(obj)
}

pub fn decode(text: &str) -> Result<Certificate, SchemaError> {
    let doc: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return schema(
                &format!("line {} column {}", e.line(), e.column()),
                format!("malformed JSON: {e}"),
            )
        }
    };
    let obj = as_object(&doc, "$")?;
    match obj.get(FORMAT_HEADER) {
        None => return schema("$", format!("missing `{FORMAT_HEADER}` header")),
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => return schema(&format!("$.{FORMAT_HEADER}"), format!("unsupported version {v}")),
    }
    node_from_value(field(obj, "$", "root")?, "$.root")
}

fn as_object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>, SchemaError> {
    v.as_object().map_or_else(|| schema(at, "expected an object"), Ok)
}

fn field<'a>(obj: &'a Map<String, Value>, at: &str, name: &str) -> Result<&'a Value, SchemaError> {
    obj.get(name)
        .map_or_else(|| schema(at, format!("missing field `{name}`")), Ok)
}

fn str_field<'a>(obj: &'a Map<String, Value>, at: &str, name: &str) -> Result<&'a str, SchemaError> {
    field(obj, at, name)?
        .as_str()
        .map_or_else(|| schema(&format!("{at}.{name}"), "expected a string"), Ok)
}

fn index_value(v: &Value, at: &str) -> Result<usize, SchemaError> {
    match v.as_u64() {
        Some(n) => usize::try_from(n).or_else(|_| schema(at, "index too large")),
        None => schema(at, "expected a non-negative integer"),
    }
}

fn index_field(obj: &Map<String, Value>, at: &str, name: &str) -> Result<usize, SchemaError> {
    index_value(field(obj, at, name)?, &format!("{at}.{name}"))
}

fn index_array(v: &Value, at: &str) -> Result<Vec<usize>, SchemaError> {
    let items = v.as_array().map_or_else(|| schema(at, "expected an array"), Ok)?;
    items
        .iter()
        .enumerate()
        .map(|(t, x)| index_value(x, &format!("{at}[{t}]")))
        .collect()
}

fn rational_field(obj: &Map<String, Value>, at: &str, name: &str) -> Result<Rational, SchemaError> {
    let s = str_field(obj, at, name)?;
    parse_rational(s).or_else(|e| schema(&format!("{at}.{name}"), e.to_string()))
}

fn i128_field(obj: &Map<String, Value>, at: &str, name: &str) -> Result<i128, SchemaError> {
    let s = str_field(obj, at, name)?;
    s.parse()
        .or_else(|_| schema(&format!("{at}.{name}"), format!("expected an integer, got `{s}`")))
}

fn claim_from_value(v: &Value, at: &str) -> Result<Claim, SchemaError> {
    let obj = as_object(v, at)?;
    let kind_text = str_field(obj, at, "kind")?;
    let kind: PositivityKind = kind_text
        .parse()
        .or_else(|_| schema(&format!("{at}.kind"), format!("unknown kind `{kind_text}`")))?;
    let vector = parse_vector(str_field(obj, at, "vector")?)
        .or_else(|e| schema(&format!("{at}.vector"), e.to_string()))?;
    Ok(Claim { vector, kind })
}

fn word_from_value(v: &Value, at: &str) -> Result<CremonaWord, SchemaError> {
    let items = v.as_array().map_or_else(|| schema(at, "expected an array"), Ok)?;
    let mut word = CremonaWord::new();
    for (t, item) in items.iter().enumerate() {
        let here = format!("{at}[{t}]");
        let obj = as_object(item, &here)?;
        let op = match str_field(obj, &here, "op")? {
            "reflect" => CremonaOp::Reflect(
                index_field(obj, &here, "i")?,
                index_field(obj, &here, "j")?,
                index_field(obj, &here, "k")?,
            ),
            "permute" => CremonaOp::Permute(index_array(field(obj, &here, "map")?, &format!("{here}.map"))?),
            "sort" => CremonaOp::SortDescending,
            other => return schema(&format!("{here}.op"), format!("unknown op `{other}`")),
        };
        word.push(op);
    }
    Ok(word)
}

fn witness_from_value(v: &Value, at: &str) -> Result<BaseWitness, SchemaError> {
    let obj = as_object(v, at)?;
    let family_text = str_field(obj, at, "family")?;
    let family = Family::parse(family_text).map_or_else(
        || schema(&format!("{at}.family"), format!("unknown family `{family_text}`")),
        Ok,
    )?;
    let scale = rational_field(obj, at, "scale")?;
    let permutation = index_array(field(obj, at, "permutation")?, &format!("{at}.permutation"))?;
    let p_at = format!("{at}.params");
    let p = as_object(field(obj, at, "params")?, &p_at)?;
    let params = FamilyParams {
        degree: i128_field(p, &p_at, "d")?,
        m1: i128_field(p, &p_at, "m1")?,
        m2: i128_field(p, &p_at, "m2")?,
        ones: index_field(p, &p_at, "r")?,
        zeros: index_field(p, &p_at, "zeros")?,
    };
    let remark_based = field(obj, at, "remark")?
        .as_bool()
        .map_or_else(|| schema(&format!("{at}.remark"), "expected a boolean"), Ok)?;
    Ok(BaseWitness {
        family,
        scale,
        permutation,
        params,
        remark_based,
    })
}

fn children<'a>(obj: &'a Map<String, Value>, at: &str, expected: usize) -> Result<&'a [Value], SchemaError> {
    let items = field(obj, at, "children")?
        .as_array()
        .map_or_else(|| schema(&format!("{at}.children"), "expected an array"), Ok)?;
    if items.len() != expected {
        return schema(
            &format!("{at}.children"),
            format!("expected {expected} children, found {}", items.len()),
        );
    }
    Ok(items)
}

fn child(items: &[Value], at: &str, t: usize) -> Result<Box<Certificate>, SchemaError> {
    node_from_value(&items[t], &format!("{at}.children[{t}]")).map(Box::new)
}

fn node_from_value(v: &Value, at: &str) -> Result<Certificate, SchemaError> {
    let obj = as_object(v, at)?;
    let tag = str_field(obj, at, "node")?;
    let claim = claim_from_value(field(obj, at, "claim")?, &format!("{at}.claim"))?;
    let node = match tag {
        "base" => Certificate::Base {
            claim,
            witness: witness_from_value(field(obj, at, "witness")?, &format!("{at}.witness"))?,
        },
        "assume" => Certificate::Assume {
            claim,
            label: str_field(obj, at, "label")?.to_string(),
        },
        "glue" => {
            let items = children(obj, at, 2)?;
            Certificate::Glue {
                claim,
                site: index_field(obj, at, "site")?,
                outer: child(items, at, 0)?,
                inner: child(items, at, 1)?,
            }
        }
        "cremona" => {
            let items = children(obj, at, 1)?;
            Certificate::Cremona {
                claim,
                word: word_from_value(field(obj, at, "word")?, &format!("{at}.word"))?,
                child: child(items, at, 0)?,
            }
        }
        "scale" => {
            let items = children(obj, at, 1)?;
            Certificate::Scale {
                claim,
                factor: rational_field(obj, at, "factor")?,
                child: child(items, at, 0)?,
            }
        }
        "sum" => {
            let items = children(obj, at, 2)?;
            Certificate::Sum {
                claim,
                left: child(items, at, 0)?,
                right: child(items, at, 1)?,
            }
        }
        other => return schema(&format!("{at}.node"), format!("unknown node tag `{other}`")),
    };
    Ok(node)
}
