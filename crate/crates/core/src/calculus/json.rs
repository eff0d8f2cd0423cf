//! Derivation trees as JSON.
//!
//! ```text
//! { "rule": "skip" | "assign" | "conseq" | "comp" | "cond" | "while" | "conj" | "disj",
//!   "pre": "<assertion>", "prog": "<statement>", "post": "<assertion>",
//!   "left":  { "hypothesis": "<assertion>", "conclusion": "<assertion>" },   (conseq only, optional)
//!   "right": { "hypothesis": "<assertion>", "conclusion": "<assertion>" },   (conseq only, optional)
//!   "premises": [ <derivation>, ... ] }
//! ```
//!
//! Assertions and statements use the concrete syntax of `.ahl` files and are
//! parsed against the sort environment of the accompanying program. Missing
//! consequence obligations default to `premise pre -> pre` and
//! `post -> premise post`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::derivation::{Derivation, Rule};
use super::triple::{Flavor, Triple};
use crate::assertions::Obligation;
use crate::syntax::{parse_assertion, parse_stmt, ParseError, SortEnv};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationJsonError {
    #[error("at {path}: {message}")]
    Shape { path: String, message: String },
    #[error("at {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

impl Derivation {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("rule".into(), json!(self.rule.name()));
        if self.conclusion.flavor != Flavor::Access {
            m.insert("flavor".into(), json!(self.conclusion.flavor.name()));
        }
        m.insert("pre".into(), json!(self.pre().to_string()));
        m.insert("prog".into(), json!(self.prog().to_string()));
        m.insert("post".into(), json!(self.post().to_string()));
        if let Rule::Conseq { left, right, .. } = &self.rule {
            let ob = |o: &Obligation| {
                json!({
                    "hypothesis": o.hypothesis.to_string(),
                    "conclusion": o.conclusion.to_string(),
                    "origin": o.origin,
                })
            };
            m.insert("left".into(), ob(left));
            m.insert("right".into(), ob(right));
        }
        m.insert(
            "premises".into(),
            Value::Array(self.rule.premises().iter().map(|d| d.to_json()).collect()),
        );
        Value::Object(m)
    }

    pub fn from_json(v: &Value, env: &SortEnv) -> Result<Derivation, DerivationJsonError> {
        read(v, env, "root")
    }
}

fn shape(path: &str, message: impl Into<String>) -> DerivationJsonError {
    DerivationJsonError::Shape {
        path: path.to_string(),
        message: message.into(),
    }
}

fn text<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, DerivationJsonError> {
    m.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| shape(path, format!("missing string field `{key}`")))
}

fn read(v: &Value, env: &SortEnv, path: &str) -> Result<Derivation, DerivationJsonError> {
    let m = v.as_object().ok_or_else(|| shape(path, "expected an object"))?;
    let parse_a = |key: &str, src: &str| {
        parse_assertion(src, env).map_err(|source| DerivationJsonError::Parse {
            path: format!("{path}.{key}"),
            source,
        })
    };
    let flavor = match m.get("flavor") {
        None => Flavor::Access,
        Some(f) => f
            .as_str()
            .ok_or_else(|| shape(path, "`flavor` must be a string"))?
            .parse()
            .map_err(|e: String| shape(path, e))?,
    };
    let pre = parse_a("pre", text(m, "pre", path)?)?;
    let post = parse_a("post", text(m, "post", path)?)?;
    let prog = parse_stmt(text(m, "prog", path)?, env).map_err(|source| DerivationJsonError::Parse {
        path: format!("{path}.prog"),
        source,
    })?;
    let premises = match m.get("premises") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, p)| read(p, env, &format!("{path}.{i}")))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(shape(path, "`premises` must be an array")),
    };
    let rule_name = text(m, "rule", path)?;
    let arity = match rule_name {
        "skip" | "assign" => 0,
        "conseq" | "while" => 1,
        "comp" | "cond" | "conj" | "disj" => 2,
        other => return Err(shape(path, format!("unknown rule `{other}`"))),
    };
    if premises.len() != arity {
        return Err(shape(
            path,
            format!("rule `{rule_name}` takes {arity} premises, found {}", premises.len()),
        ));
    }
    let mut it = premises.into_iter().map(Box::new);
    let mut next = || it.next().expect("arity checked");
    let rule = match rule_name {
        "skip" => Rule::Skip,
        "assign" => Rule::Assign,
        "conseq" => {
            let sub = next();
            let obligation = |key: &str, hyp: &crate::syntax::Assertion, concl: &crate::syntax::Assertion| {
                let origin = format!("conseq.{key}");
                match m.get(key) {
                    None => Ok(Obligation::new(hyp.clone(), concl.clone(), origin)),
                    Some(Value::Object(o)) => {
                        let here = format!("{path}.{key}");
                        let h = parse_a(key, text(o, "hypothesis", &here)?)?;
                        let c = parse_a(key, text(o, "conclusion", &here)?)?;
                        let origin = o.get("origin").and_then(Value::as_str).map_or(origin, str::to_string);
                        Ok(Obligation::new(h, c, origin))
                    }
                    Some(_) => Err(shape(path, format!("`{key}` must be an object"))),
                }
            };
            let left = obligation("left", sub.pre(), &pre)?;
            let right = obligation("right", &post, sub.post())?;
            Rule::Conseq { left, sub, right }
        }
        "while" => Rule::While(next()),
        "comp" => Rule::Comp(next(), next()),
        "cond" => Rule::Cond(next(), next()),
        "conj" => Rule::Conj(next(), next()),
        _ => Rule::Disj(next(), next()),
    };
    Ok(Derivation::new(
        Triple {
            flavor,
            pre,
            prog,
            post,
        },
        rule,
    ))
}
