//! Record formatting. Floats are written with 17 significant digits in both
//! JSON and CSV; non-finite values become `null` in JSON and `inf` / `-inf` /
//! `nan` in CSV.

use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// `x` in scientific notation with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&format_f64(x)).expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn ints(xs: &[u64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::from(x)).collect())
}

/// One output record with a fixed key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn set(&mut self, key: &'static str, value: impl Into<Value>) -> &mut Self {
        let value = value.into();
        match self.fields.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key, value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|(k, _)| *k)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.fields {
            map.insert((*k).to_string(), v.clone());
        }
        Value::Object(map)
    }
}

/// Flattens a JSON value into one CSV field. Arrays are `;`-separated and
/// nested objects are written as compact JSON.
pub fn csv_field(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_field).collect::<Vec<_>>().join(";"),
        Value::Object(_) => value.to_string(),
    }
}

/// Writes `records` as CSV with a header built from `columns`.
pub fn write_csv<W: Write>(out: W, columns: &[&str], records: &[Record]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for r in records {
        w.write_record(
            columns
                .iter()
                .map(|c| r.get(c).map(csv_field).unwrap_or_default()),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(-2.5e-300), "-2.5000000000000000e-300");
        assert_eq!(format_f64(f64::NEG_INFINITY), "-inf");
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, 5e-324] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_numbers_keep_their_text() {
        let v = num(0.1);
        assert_eq!(serde_json::to_string(&v).unwrap(), "1.0000000000000001e-1");
        assert_eq!(num(f64::INFINITY), Value::Null);
    }

    #[test]
    fn record_preserves_order_and_overwrites() {
        let mut r = Record::new();
        r.set("b", 1).set("a", "x").set("b", 2);
        assert_eq!(r.keys().collect::<Vec<_>>(), vec!["b", "a"]);
        assert_eq!(
            serde_json::to_string(&r.to_json()).unwrap(),
            r#"{"b":2,"a":"x"}"#
        );
    }

    #[test]
    fn csv_flattening() {
        let mut r = Record::new();
        r.set("v", nums(&[0.5, 0.25]))
            .set("s", "hi")
            .set("none", Value::Null);
        let mut buf = Vec::new();
        write_csv(&mut buf, &["s", "v", "none", "missing"], &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "s,v,none,missing\nhi,5.0000000000000000e-1;2.5000000000000000e-1,,\n"
        );
    }
}
