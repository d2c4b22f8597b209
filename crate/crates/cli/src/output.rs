use serde_json::{json, Value};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Shortest round-trip form, switching to exponent notation outside
/// `[1e-4, 1e7)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e7).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// `"p/1"` becomes `"p"`; other strings pass through.
pub fn plain_rational(s: &str) -> &str {
    match s.strip_suffix("/1") {
        Some(p) if p.parse::<i64>().is_ok() => p,
        _ => s,
    }
}

pub fn csv_row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

pub fn versions() -> Value {
    json!({
        "sqsum": sqsum::VERSION,
        "sqsum-cli": env!("CARGO_PKG_VERSION"),
    })
}

/// The top-level JSON document: `{command, params, <body_key>, versions}`.
pub fn document(command: &str, params: Value, body_key: &str, body: Value) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), command.into());
    doc.insert("params".into(), params);
    doc.insert(body_key.into(), body);
    doc.insert("versions".into(), versions());
    let mut text =
        serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
    text.push('\n');
    text
}

pub fn ok_word(ok: bool) -> &'static str {
    if ok {
        "OK"
    } else {
        "FAIL"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.375, 1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            let s = sig17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(sig17(0.375), "3.7500000000000000e-1");
    }

    #[test]
    fn text_numbers() {
        assert_eq!(num(0.375), "0.375");
        assert_eq!(num(-2.5e-8), "-2.5e-8");
        assert_eq!(num(0.0), "0");
        assert_eq!(plain_rational("-3/1"), "-3");
        assert_eq!(plain_rational("3/4"), "3/4");
    }
}
