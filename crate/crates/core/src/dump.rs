//! Binary field dumps with a JSON sidecar header.
//!
//! A dump named `base` is two files: `base.json` holding [`FieldHeader`] and
//! `base.bin` holding every component back to back as little-endian `f64`,
//! `n³` values each in grid order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fieldcalc::{Grid, ScalarField, VectorField};
use crate::{Error, Result};

pub const MAX_COMPONENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldHeader {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub components: Vec<String>,
    pub t: f64,
}

impl FieldHeader {
    pub fn new(grid: &Grid, components: Vec<String>, t: f64) -> Self {
        Self {
            n: grid.n(),
            length: grid.length(),
            components,
            t,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length)
    }

    /// Checks everything the header alone determines.
    pub fn validate(&self) -> Result<Grid> {
        let grid = self.grid()?;
        if !self.t.is_finite() {
            return Err(Error::Dump(format!("non-finite time stamp {}", self.t)));
        }
        if self.components.is_empty() || self.components.len() > MAX_COMPONENTS {
            return Err(Error::Dump(format!(
                "expected 1 to {MAX_COMPONENTS} components, got {}",
                self.components.len()
            )));
        }
        for (i, name) in self.components.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Dump("empty component name".into()));
            }
            if self.components[..i].contains(name) {
                return Err(Error::Dump(format!("duplicate component {name:?}")));
            }
        }
        Ok(grid)
    }

    pub fn payload_len(&self) -> usize {
        self.components.len() * self.n.pow(3) * 8
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("header serializes");
        s.push('\n');
        s
    }
}

pub fn parse_header(src: &str) -> Result<FieldHeader> {
    let header: FieldHeader = serde_json::from_str(src).map_err(|e| Error::Dump(e.to_string()))?;
    header.validate()?;
    Ok(header)
}

/// Splits a payload into one scalar field per declared component.
pub fn decode(header: &FieldHeader, bytes: &[u8]) -> Result<Vec<ScalarField>> {
    let grid = header.validate()?;
    if bytes.len() != header.payload_len() {
        return Err(Error::Dump(format!(
            "payload has {} bytes, header declares {}",
            bytes.len(),
            header.payload_len()
        )));
    }
    bytes
        .chunks_exact(grid.len() * 8)
        .zip(&header.components)
        .map(|(chunk, name)| {
            let values: Vec<f64> = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect();
            ScalarField::new(grid, values)
                .map_err(|_| Error::Dump(format!("non-finite value in component {name:?}")))
        })
        .collect()
}

pub fn encode(fields: &[&ScalarField]) -> Vec<u8> {
    fields
        .iter()
        .flat_map(|f| f.values().iter().flat_map(|v| v.to_le_bytes()))
        .collect()
}

fn vector_components(name: &str) -> Vec<String> {
    ["x", "y", "z"]
        .iter()
        .map(|a| format!("{name}.{a}"))
        .collect()
}

fn paths(base: &Path) -> (PathBuf, PathBuf) {
    (base.with_extension("json"), base.with_extension("bin"))
}

fn write(base: &Path, header: &FieldHeader, fields: &[&ScalarField]) -> Result<()> {
    let (json, bin) = paths(base);
    if let Some(dir) = base.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(json, header.to_json())?;
    fs::write(bin, encode(fields))?;
    Ok(())
}

pub fn write_scalar(base: &Path, name: &str, field: &ScalarField, t: f64) -> Result<()> {
    let header = FieldHeader::new(field.grid(), vec![name.to_string()], t);
    write(base, &header, &[field])
}

pub fn write_vector(base: &Path, name: &str, field: &VectorField, t: f64) -> Result<()> {
    let header = FieldHeader::new(field.grid(), vector_components(name), t);
    let [x, y, z] = field.components();
    write(base, &header, &[x, y, z])
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    match fs::read(path) {
        Ok(bytes) => Ok(bytes),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => Err(e.into()),
    }
}

/// Reads a dump and returns its header and components.
pub fn read(base: &Path) -> Result<(FieldHeader, Vec<ScalarField>)> {
    let (json, bin) = paths(base);
    let located = |path: &Path| {
        let path = path.display().to_string();
        move |e: Error| match e {
            Error::Dump(msg) => Error::Dump(format!("{path}: {msg}")),
            other => other,
        }
    };
    let text = String::from_utf8(read_file(&json)?)
        .map_err(|e| Error::Dump(format!("{}: {e}", json.display())))?;
    let header = parse_header(&text).map_err(located(&json))?;
    let fields = decode(&header, &read_file(&bin)?).map_err(located(&bin))?;
    Ok((header, fields))
}

pub fn read_scalar(base: &Path) -> Result<(FieldHeader, ScalarField)> {
    let (header, mut fields) = read(base)?;
    if fields.len() != 1 {
        return Err(Error::Dump(format!(
            "{}: expected 1 component, found {}",
            base.display(),
            fields.len()
        )));
    }
    Ok((header, fields.pop().expect("one component")))
}

pub fn read_vector(base: &Path) -> Result<(FieldHeader, VectorField)> {
    let (header, fields) = read(base)?;
    let Ok([x, y, z]) = <[ScalarField; 3]>::try_from(fields) else {
        return Err(Error::Dump(format!(
            "{}: expected 3 components",
            base.display()
        )));
    };
    Ok((header, VectorField::new(x, y, z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn header(n: usize, components: &[&str]) -> FieldHeader {
        FieldHeader {
            n,
            length: 1.0,
            components: components.iter().map(|s| s.to_string()).collect(),
            t: 0.0,
        }
    }

    #[test]
    fn layout_is_little_endian_x_fastest() {
        let grid = Grid::new(8, 1.0).unwrap();
        let f = ScalarField::from_fn(grid, |x, y, z| x + 10.0 * y + 100.0 * z);
        let bytes = encode(&[&f]);
        assert_eq!(bytes.len(), 512 * 8);
        let at = |idx: usize| f64::from_le_bytes(bytes[idx * 8..idx * 8 + 8].try_into().unwrap());
        assert_eq!(at(1), 0.125);
        assert_eq!(at(8), 1.25);
        assert_eq!(at(64), 12.5);
    }

    #[test]
    fn header_parsing() {
        let h =
            parse_header(r#"{"n": 16, "L": 6.5, "components": ["u.x", "u.y", "u.z"], "t": 0.25}"#)
                .unwrap();
        assert_eq!(h.payload_len(), 3 * 4096 * 8);
        assert_eq!(parse_header(&h.to_json()).unwrap(), h);
        for bad in [
            r#"{"n": 12, "L": 1, "components": ["a"], "t": 0}"#,
            r#"{"n": 16, "L": -1, "components": ["a"], "t": 0}"#,
            r#"{"n": 16, "L": 1, "components": [], "t": 0}"#,
            r#"{"n": 16, "L": 1, "components": ["a", "a"], "t": 0}"#,
            r#"{"n": 16, "L": 1, "components": ["a"], "t": 0, "extra": 1}"#,
            r#"{"n": 16, "L": 1, "components": ["a"]}"#,
            "not json",
        ] {
            assert!(parse_header(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn decode_rejects_bad_payloads() {
        let h = header(8, &["a"]);
        assert!(matches!(decode(&h, &[0; 100]), Err(Error::Dump(_))));
        let mut bytes = vec![0u8; 512 * 8];
        bytes[80..88].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(decode(&h, &bytes), Err(Error::Dump(_))));
        assert_eq!(decode(&h, &vec![0u8; 512 * 8]).unwrap()[0].max_abs(), 0.0);
    }

    #[test]
    fn files_round_trip_and_report_missing_parts() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::periodic(8).unwrap();
        let v = VectorField::from_fn(grid, |x, y, z| [x.sin(), y.cos(), (x + z).sin()]);
        let base = dir.path().join("sub/u");
        write_vector(&base, "u", &v, 0.5).unwrap();
        let (h, back) = read_vector(&base).unwrap();
        assert_eq!((h.t, back), (0.5, v.clone()));
        assert_eq!(h.components, ["u.x", "u.y", "u.z"]);
        assert!(read_scalar(&base).is_err());

        let s = v.magnitude();
        write_scalar(&dir.path().join("m"), "m", &s, 0.0).unwrap();
        assert_eq!(read_scalar(&dir.path().join("m")).unwrap().1, s);

        fs::remove_file(base.with_extension("bin")).unwrap();
        match read(&base) {
            Err(Error::MissingFile(p)) => assert_eq!(p, base.with_extension("bin")),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(values in prop::collection::vec(-1e300f64..1e300, 512 * 2)) {
            let grid = Grid::new(8, 1.0).unwrap();
            let a = ScalarField::new(grid, values[..512].to_vec()).unwrap();
            let b = ScalarField::new(grid, values[512..].to_vec()).unwrap();
            let h = header(8, &["a", "b"]);
            let back = decode(&h, &encode(&[&a, &b])).unwrap();
            prop_assert_eq!(back, vec![a, b]);
        }
    }
}
