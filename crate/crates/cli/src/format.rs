//! Fixed numeric formatting shared by CSV, JSON and data files.

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Scientific notation with 12 significant digits. Non-finite values abort the write.
pub fn sci(x: f64) -> CliResult<String> {
    if !x.is_finite() {
        return Err(CliError::numeric("serialization", format!("refusing to write non-finite value {x}")));
    }
    let text = format!("{x:.11e}");
    // explicit exponent sign, matching how serde_json prints the same number
    Ok(match text.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => text,
    })
}

/// A JSON number that keeps the [`sci`] text.
pub fn num(x: f64) -> CliResult<Value> {
    let text = sci(x)?;
    Ok(serde_json::from_str(&text).expect("formatted float is a JSON number"))
}

pub fn opt_num(x: Option<f64>) -> CliResult<Value> {
    x.map_or(Ok(Value::Null), num)
}

pub fn nums(xs: &[f64]) -> CliResult<Value> {
    xs.iter().map(|&x| num(x)).collect::<CliResult<Vec<_>>>().map(Value::Array)
}

pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

/// CSV text from a header and rows of already formatted cells.
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Two-column `key,value` CSV of every scalar leaf, keys joined with dots.
pub fn csv_key_values(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    csv_table(&["key", "value"], &rows)
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<Vec<String>>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        Value::Null => out.push(vec![prefix.to_string(), String::new()]),
        Value::String(s) => out.push(vec![prefix.to_string(), s.clone()]),
        other => out.push(vec![prefix.to_string(), other.to_string()]),
    }
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sci(22.46910843).unwrap(), "2.24691084300e+1");
        assert_eq!(sci(-0.5).unwrap(), "-5.00000000000e-1");
        assert_eq!(sci(0.0).unwrap(), "0.00000000000e+0");
        assert_eq!(num(1e-3).unwrap().to_string(), "1.00000000000e-3");
    }

    #[test]
    fn non_finite_values_are_refused() {
        for x in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(matches!(sci(x), Err(CliError::Numeric { .. })));
        }
    }

    #[test]
    fn key_value_flattening() {
        let v = object(vec![
            ("a", num(1.0).unwrap()),
            ("b", object(vec![("c", Value::Bool(true)), ("d", Value::Null)])),
            ("e", nums(&[2.0, 3.0]).unwrap()),
            ("f", Value::String("x, y".into())),
        ]);
        assert_eq!(
            csv_key_values(&v),
            "key,value\na,1.00000000000e+0\nb.c,true\nb.d,\ne.0,2.00000000000e+0\ne.1,3.00000000000e+0\nf,\"x, y\"\n"
        );
    }
}
