//! Plain-text rendering of a JSON report. Every field of the report appears;
//! arrays of records with the same keys become aligned tables.

use serde_json::Value;

pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    block(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => format!(
            "{{{}}}",
            m.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect::<Vec<_>>().join(", ")
        ),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Values short enough to print on one line.
fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(is_scalar),
        Value::Object(m) => m.values().all(|x| is_scalar(x) || matches!(x, Value::Array(a) if a.iter().all(is_scalar))),
        _ => true,
    }
}

fn table(items: &[Value]) -> Option<Vec<Vec<String>>> {
    let first = items.first()?.as_object()?;
    let keys: Vec<&String> = first.keys().collect();
    let mut rows = vec![keys.iter().map(|k| k.to_string()).collect::<Vec<_>>()];
    for it in items {
        let m = it.as_object()?;
        if m.len() != keys.len() || !is_flat(it) {
            return None;
        }
        rows.push(keys.iter().map(|k| m.get(*k).map(scalar)).collect::<Option<Vec<_>>>()?);
    }
    Some(rows)
}

fn block(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_flat(x) && !matches!(x, Value::Object(o) if !o.is_empty()) || matches!(x, Value::Array(a) if a.is_empty()) {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    block(x, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            if let Some(rows) = table(items) {
                let widths: Vec<usize> = (0..rows[0].len())
                    .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
                    .collect();
                for r in rows {
                    let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    out.push_str(&format!("{pad}{}\n", cells.join("  ").trim_end()));
                }
                return;
            }
            for it in items {
                if is_flat(it) {
                    out.push_str(&format!("{pad}- {}\n", scalar(it)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    block(it, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn records_become_tables() {
        let v = json!({ "verdict": "ok", "states": [{ "x": 0, "b": true }, { "x": 10, "b": false }] });
        assert_eq!(pretty(&v), "verdict: ok\nstates:\n  x   b\n  0   true\n  10  false\n");
    }

    #[test]
    fn nested_objects_indent() {
        let v = json!({ "a": { "b": 1, "c": [1, 2] }, "e": [] });
        assert_eq!(pretty(&v), "a:\n  b: 1\n  c: [1, 2]\ne: []\n");
    }
}
