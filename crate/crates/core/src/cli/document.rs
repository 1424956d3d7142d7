//! Matrix documents and the exact-float JSON writer.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::linalg::RealMatrix;

/// `{"n": 4, "rows": [[...], ...], "label": "..."}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixDocument {
    pub fn new(matrix: &RealMatrix, label: Option<String>) -> Self {
        Self {
            n: matrix.dim(),
            rows: matrix.rows(),
            label,
        }
    }

    /// Parses and validates; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, String> {
        let doc: MatrixDocument = serde_json::from_str(text)
            .map_err(|e| format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e)))?;
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("n must be at least 1".into());
        }
        if self.rows.len() != self.n {
            return Err(format!("expected {} rows, found {}", self.n, self.rows.len()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.n {
                return Err(format!("row {} has {} entries, expected {}", i + 1, row.len(), self.n));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(format!("entry ({}, {}) is not finite", i + 1, j + 1));
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> RealMatrix {
        RealMatrix::from_rows(&self.rows).expect("validated document")
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_identical() {
        let doc = MatrixDocument {
            n: 2,
            rows: vec![vec![0.1, -1.0 / 3.0], vec![f64::MIN_POSITIVE, -0.0]],
            label: Some("awkward".into()),
        };
        let back = MatrixDocument::parse(&doc.to_json()).unwrap();
        for (r, s) in doc.rows.iter().zip(&back.rows) {
            for (x, y) in r.iter().zip(s) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(back.label, doc.label);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = MatrixDocument::parse("{\n  \"n\": 2,\n  \"rows\": [[1, 2], [3 4]]\n}").unwrap_err();
        assert!(err.starts_with("line 3, column"), "{err}");
        assert!(!err.contains(" at line "), "{err}");
    }

    #[test]
    fn shape_is_checked() {
        assert!(MatrixDocument::parse(r#"{"n": 2, "rows": [[1, 2], [3]]}"#)
            .unwrap_err()
            .contains("row 2"));
        assert!(MatrixDocument::parse(r#"{"n": 3, "rows": [[1]]}"#).is_err());
        assert!(MatrixDocument::parse(r#"{"n": 1, "rows": [[1e999]]}"#).is_err());
        assert!(MatrixDocument::parse(r#"{"n": 1, "rows": [[1]], "extra": 0}"#).is_err());
    }
}
