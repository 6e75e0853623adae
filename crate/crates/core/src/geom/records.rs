//! Line-delimited record format for sampled Lagrangians.
//!
//! The first line is a [`Header`]; each following line is one
//! [`SampleRecord`]. Version 1 fields:
//!
//! * `c`: component id
//! * `s`: parameter value along the component
//! * `x`: the 2n real coordinates `[x_1..x_n, y_1..y_n]`
//! * `theta`, `f`: optional angle and potential channels
//! * `ch`: optional named extra channels (omitted when empty)

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub const SCHEMA: &str = "lmcf.sampled-lagrangian";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub version: u32,
    pub n: usize,
    pub components: usize,
    #[serde(default)]
    pub channels: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl Header {
    pub fn new(n: usize, components: usize) -> Self {
        Self {
            schema: SCHEMA.into(),
            version: VERSION,
            n,
            components,
            channels: Vec::new(),
            meta: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub c: usize,
    pub s: f64,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ch: BTreeMap<String, f64>,
}

pub fn write_records<W: Write>(mut w: W, header: &Header, records: &[SampleRecord]) -> Result<()> {
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for r in records {
        if r.x.len() != 2 * header.n {
            return Err(LabError::Parameter(format!(
                "record has {} coordinates, header says n = {}",
                r.x.len(),
                header.n
            )));
        }
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(r: R) -> Result<(Header, Vec<SampleRecord>)> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| LabError::Empty("record stream has no header".into()))??;
    let header: Header = serde_json::from_str(&first)?;
    if header.schema != SCHEMA || header.version != VERSION {
        return Err(LabError::Unsupported(format!(
            "schema {} version {}",
            header.schema, header.version
        )));
    }
    let mut out = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SampleRecord = serde_json::from_str(&line)?;
        if rec.x.len() != 2 * header.n {
            return Err(LabError::Parameter("coordinate count mismatch".into()));
        }
        out.push(rec);
    }
    Ok((header, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut h = Header::new(1, 1);
        h.channels = vec!["theta".into()];
        let recs = vec![
            SampleRecord { c: 0, s: 0.0, x: vec![1.0, 2.0], theta: Some(0.5), f: None, ch: BTreeMap::new() },
            SampleRecord { c: 0, s: 1.0, x: vec![1.5, 2.5], theta: None, f: Some(-1.0), ch: BTreeMap::from([("psi1".into(), 0.25)]) },
        ];
        let mut buf = Vec::new();
        write_records(&mut buf, &h, &recs).unwrap();
        let (h2, r2) = read_records(&buf[..]).unwrap();
        assert_eq!(h, h2);
        assert_eq!(recs, r2);
    }
}
