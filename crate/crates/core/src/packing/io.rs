//! Canonical JSON file format for packings.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{CylinderSpec, Packing, LENGTH_TOL};
use crate::error::{Error, Result};
use crate::geometry::Segment;

pub const PACKING_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingFile {
    pub version: u32,
    pub capped: bool,
    pub t: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mixed: bool,
    #[serde(rename = "R_inner", default, skip_serializing_if = "Option::is_none")]
    pub inner_radius: Option<f64>,
    pub cylinders: Vec<Segment>,
}

impl From<&Packing> for PackingFile {
    fn from(p: &Packing) -> Self {
        PackingFile {
            version: PACKING_FORMAT_VERSION,
            capped: p.capped,
            t: p.t,
            radius: p.radius,
            mixed: p.mixed,
            inner_radius: p.inner_radius,
            cylinders: p.cylinders.iter().map(|c| c.axis).collect(),
        }
    }
}

impl TryFrom<PackingFile> for Packing {
    type Error = Error;

    fn try_from(f: PackingFile) -> Result<Packing> {
        if f.version != PACKING_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", f.version)));
        }
        if !(f.radius > 0.0 && f.radius.is_finite()) {
            return Err(Error::Format(format!("bad container radius {}", f.radius)));
        }
        if !(f.t >= 0.0 && f.t.is_finite()) {
            return Err(Error::Format(format!("bad cylinder length {}", f.t)));
        }
        for (i, s) in f.cylinders.iter().enumerate() {
            if !(s.p0.is_finite() && s.p1.is_finite()) {
                return Err(Error::Format(format!("cylinder {i} has non-finite coordinates")));
            }
            if !f.mixed && (s.length() - f.t).abs() > LENGTH_TOL * f.t.max(1.0) {
                return Err(Error::Format(format!(
                    "cylinder {i} has length {} but t = {} (set \"mixed\": true for mixed lengths)",
                    s.length(),
                    f.t
                )));
            }
        }
        Ok(Packing {
            cylinders: f
                .cylinders
                .into_iter()
                .map(|a| CylinderSpec::new(a, f.capped))
                .collect(),
            capped: f.capped,
            t: f.t,
            radius: f.radius,
            mixed: f.mixed,
            inner_radius: f.inner_radius,
        })
    }
}

pub fn read_packing<R: Read>(reader: R) -> Result<Packing> {
    let file: PackingFile =
        serde_json::from_reader(reader).map_err(|e| Error::Format(e.to_string()))?;
    Packing::try_from(file)
}

pub fn write_packing<W: Write>(p: &Packing, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &PackingFile::from(p))
        .map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_canonical_document() {
        let doc = r#"{ "version": 1, "capped": true, "t": 2.0, "R": 10.0,
            "cylinders": [ { "p0": [0,0,-1], "p1": [0,0,1] },
                           { "p0": [2,0,-1], "p1": [2,0,1] } ] }"#;
        let p = read_packing(doc.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.capped && !p.mixed);
        let mut out = Vec::new();
        write_packing(&p, &mut out).unwrap();
        assert_eq!(read_packing(out.as_slice()).unwrap(), p);
    }

    #[test]
    fn rejects_mixed_lengths_unless_flagged() {
        let doc = r#"{ "version": 1, "capped": true, "t": 2.0, "R": 10.0,
            "cylinders": [ { "p0": [0,0,-1], "p1": [0,0,1] },
                           { "p0": [3,0,-1], "p1": [3,0,2] } ] }"#;
        assert!(matches!(read_packing(doc.as_bytes()), Err(Error::Format(_))));
        let doc = doc.replace("\"t\": 2.0,", "\"t\": 2.5, \"mixed\": true,");
        let p = read_packing(doc.as_bytes()).unwrap();
        assert!(p.mixed);
    }

    #[test]
    fn rejects_bad_documents() {
        for doc in [
            "not json",
            r#"{ "version": 2, "capped": true, "t": 1, "R": 3, "cylinders": [] }"#,
            r#"{ "version": 1, "capped": true, "t": 1, "R": -3, "cylinders": [] }"#,
            r#"{ "version": 1, "capped": true, "t": 1, "R": 3 }"#,
            r#"{ "version": 1, "capped": true, "t": 1, "R": 3, "cylinders": [], "extra": 0 }"#,
        ] {
            assert!(matches!(read_packing(doc.as_bytes()), Err(Error::Format(_))), "{doc}");
        }
    }
}
