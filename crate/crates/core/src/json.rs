//! The matrix interchange format and JSON helpers for reports.
//!
//! A matrix document is `{"rows": n, "cols": m, "entries": [[...], ...]}`
//! with an optional `"basis_labels"` array. Entries must be JSON integers of
//! any size; floats, exponents and strings are rejected.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::error::Category;
use serde_json::{Number, Value};

use crate::matrix::IntegerMatrix;

/// Version stamped into every report as `"schema_version"`.
pub const SCHEMA_VERSION: u32 = 1;

/// Malformed input, located by byte offset into the source text.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("malformed input at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixDocument {
    pub matrix: IntegerMatrix,
    pub basis_labels: Option<Vec<String>>,
}

/// An integer read from a JSON number token without going through floats.
struct ExactInt(BigInt);

impl<'de> Deserialize<'de> for ExactInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = Number::deserialize(d)?;
        let text = n.as_str();
        let digits = text.strip_prefix('-').unwrap_or(text);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(de::Error::custom(format!("expected an exact integer, found {text}")));
        }
        BigInt::from_str(text).map(ExactInt).map_err(de::Error::custom)
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<ExactInt>>,
    #[serde(default)]
    basis_labels: Option<Vec<String>>,
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn parse_matrix(text: &str) -> Result<MatrixDocument, ParseError> {
    let raw: RawMatrix = serde_json::from_str(text).map_err(|e| {
        let mut offset = byte_offset(text, e.line(), e.column());
        if e.classify() == Category::Data {
            // Data errors are located just past the value; step back to its start.
            let bytes = text.as_bytes();
            offset = offset.min(bytes.len());
            while offset > 0 && matches!(bytes[offset - 1], b'0'..=b'9' | b'.' | b'e' | b'E' | b'+' | b'-') {
                offset -= 1;
            }
        }
        ParseError { offset, message: e.to_string() }
    })?;
    let shape_error = |message: String| ParseError { offset: text.find("\"entries\"").unwrap_or(0), message };
    if raw.entries.len() != raw.rows {
        return Err(shape_error(format!("\"rows\" is {} but entries has {} rows", raw.rows, raw.entries.len())));
    }
    if let Some((i, r)) = raw.entries.iter().enumerate().find(|(_, r)| r.len() != raw.cols) {
        return Err(shape_error(format!("\"cols\" is {} but row {i} has {} entries", raw.cols, r.len())));
    }
    if let Some(labels) = &raw.basis_labels {
        if labels.len() != raw.cols {
            return Err(ParseError {
                offset: text.find("\"basis_labels\"").unwrap_or(0),
                message: format!("{} basis labels for {} columns", labels.len(), raw.cols),
            });
        }
    }
    let entries = raw.entries.into_iter().flatten().map(|x| x.0).collect();
    let matrix = IntegerMatrix::new(raw.rows, raw.cols, entries).expect("shape checked above");
    Ok(MatrixDocument { matrix, basis_labels: raw.basis_labels })
}

pub fn number(x: &BigInt) -> Number {
    Number::from_str(&x.to_string()).expect("decimal integers are JSON numbers")
}

pub fn matrix_value(m: &IntegerMatrix, basis_labels: Option<&[String]>) -> Value {
    let entries: Vec<Value> = m
        .to_nested()
        .iter()
        .map(|r| Value::Array(r.iter().map(|x| Value::Number(number(x))).collect()))
        .collect();
    let mut obj = serde_json::Map::new();
    obj.insert("rows".into(), m.rows().into());
    obj.insert("cols".into(), m.cols().into());
    obj.insert("entries".into(), Value::Array(entries));
    if let Some(labels) = basis_labels {
        obj.insert("basis_labels".into(), labels.into());
    }
    Value::Object(obj)
}

/// Serializes `report` as a JSON object carrying `"schema_version"`.
pub fn report_value<T: Serialize>(report: &T) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
    }
    v
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// `serialize_with` helpers that write `BigInt`s as plain JSON integers.
pub mod big {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        number(x).serialize(s)
    }

    pub fn vec<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&number(x))?;
        }
        seq.end()
    }

    pub fn vec2<S: Serializer>(xss: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        struct Row<'a>(&'a [BigInt]);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                vec(self.0, s)
            }
        }
        let mut seq = s.serialize_seq(Some(xss.len()))?;
        for xs in xss {
            seq.serialize_element(&Row(xs))?;
        }
        seq.end()
    }
}

impl fmt::Display for MatrixDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_pretty(&matrix_value(&self.matrix, self.basis_labels.as_deref())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = r#"{"rows": 2, "cols": 2, "entries": [[0, 1], [1, 0]]}"#;
        let doc = parse_matrix(text).unwrap();
        assert_eq!(doc.matrix, IntegerMatrix::from_rows(&[[0, 1], [1, 0]]));
        let again = parse_matrix(&doc.to_string()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn huge_integers_survive() {
        let big = "123456789012345678901234567890123456789";
        let text = format!(r#"{{"rows": 1, "cols": 1, "entries": [[-{big}]]}}"#);
        let doc = parse_matrix(&text).unwrap();
        assert_eq!(doc.matrix[(0, 0)].to_string(), format!("-{big}"));
        assert!(doc.to_string().contains(big));
    }

    #[test]
    fn floats_are_rejected_with_offset() {
        let text = r#"{"rows": 1, "cols": 2, "entries": [[1, 2.0]]}"#;
        let err = parse_matrix(text).unwrap_err();
        assert!(err.message.contains("exact integer"), "{err}");
        assert_eq!(err.offset, text.find("2.0").unwrap());
        assert!(parse_matrix(r#"{"rows": 1, "cols": 1, "entries": [[1e3]]}"#).is_err());
        assert!(parse_matrix(r#"{"rows": 1, "cols": 1, "entries": [["1"]]}"#).is_err());
    }

    #[test]
    fn shape_mismatch_points_at_entries() {
        let text = "{\"rows\": 2,\n \"cols\": 1, \"entries\": [[1]]}";
        let err = parse_matrix(text).unwrap_err();
        assert_eq!(err.offset, text.find("\"entries\"").unwrap());
        let err = parse_matrix(r#"{"rows": 1, "cols": 2, "entries": [[1]]}"#).unwrap_err();
        assert!(err.message.contains("row 0"));
    }

    #[test]
    fn syntax_error_offset_spans_lines() {
        let text = "{\"rows\": 1,\n\"cols\": 1,\n\"entries\": [[1,]]}";
        let err = parse_matrix(text).unwrap_err();
        let comma = text.find(",]").unwrap();
        assert!(err.offset > text.find('\n').unwrap() && err.offset <= comma + 2, "{err}");
    }

    #[test]
    fn labels_are_checked_and_kept() {
        let text = r#"{"rows": 1, "cols": 2, "entries": [[1, 2]], "basis_labels": ["a", "b"]}"#;
        let doc = parse_matrix(text).unwrap();
        assert_eq!(doc.basis_labels.as_deref(), Some(&["a".to_string(), "b".to_string()][..]));
        let bad = r#"{"rows": 1, "cols": 2, "entries": [[1, 2]], "basis_labels": ["a"]}"#;
        assert!(parse_matrix(bad).is_err());
    }

    #[test]
    fn reports_carry_schema_version() {
        #[derive(Serialize)]
        struct R {
            #[serde(serialize_with = "big::serialize")]
            x: BigInt,
            #[serde(serialize_with = "big::vec2")]
            m: Vec<Vec<BigInt>>,
        }
        let v = report_value(&R { x: BigInt::from(-7), m: vec![vec![BigInt::from(2)]] });
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(serde_json::to_string(&v["x"]).unwrap(), "-7");
        assert_eq!(serde_json::to_string(&v["m"]).unwrap(), "[[2]]");
    }
}
