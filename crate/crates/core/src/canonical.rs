//! Canonical JSON text: sorted keys, `", "` / `": "` separators and every
//! float written with 17 significant digits, so equal values always print
//! to equal bytes.

use serde::Serialize;
use serde_json::Value;

/// Canonical text of any serialisable value.
pub fn to_string<T: Serialize + ?Sized>(v: &T) -> String {
    let value = serde_json::to_value(v).expect("value is representable as JSON");
    let mut out = String::new();
    write_value(&value, &mut out);
    out
}

/// 17 significant digits in exponent form; non-finite values become `null`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap()));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn layout() {
        assert_eq!(to_string(&json!({"member": false})), r#"{"member": false}"#);
        assert_eq!(to_string(&json!({"b": [1, 2.5], "a": null})), r#"{"a": null, "b": [1, 2.5000000000000000e0]}"#);
    }

    #[test]
    fn floats_roundtrip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_f64(f64::NAN), "null");
    }

    #[test]
    fn output_reparses() {
        let v = json!({"x": [0.1, -3.0], "s": "a\"b"});
        let back: Value = serde_json::from_str(&to_string(&v)).unwrap();
        assert_eq!(back, v);
    }
}
