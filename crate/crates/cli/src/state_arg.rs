use ahl_core::semantics::Value;

/// Splits `a=1,L=[1,2],b=true` into bindings. Commas inside brackets belong
/// to list literals.
pub fn parse_state(src: &str) -> Result<Vec<(String, Value)>, String> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in src.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&src[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&src[start..]);
    parts
        .into_iter()
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (name, value) = p.split_once('=').ok_or_else(|| format!("expected name=value, got `{p}`"))?;
            Ok((name.trim().to_string(), parse_value(value.trim())?))
        })
        .collect()
}

fn parse_int(s: &str) -> Result<i64, String> {
    s.trim().parse().map_err(|_| format!("not an integer: `{s}`"))
}

pub fn parse_value(s: &str) -> Result<Value, String> {
    match s {
        "true" => Ok(Value::Bool(true)),
        "false" => Ok(Value::Bool(false)),
        _ => match s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            Some(inner) if inner.trim().is_empty() => Ok(Value::List(vec![])),
            Some(inner) => Ok(Value::list(inner.split(',').map(parse_int).collect::<Result<Vec<_>, _>>()?)),
            None => parse_int(s).map(Value::int),
        },
    }
}
