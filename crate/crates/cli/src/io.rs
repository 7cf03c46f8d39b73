//! Instance file schema and canonical JSON formatting.
//!
//! Instances are JSON documents with a `kind` discriminator and a `payload`
//! record; complex numbers are `{re, im}` objects, never strings. Canonical
//! output sorts object keys and prints every float with 17 significant
//! digits, so serialization round-trips byte-stably.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use specband_core::inverse::SpectralData;
use specband_core::matrix::{PeriodicMatrixGeneral, PeriodicMatrixHat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexField {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexField {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexField> for Complex64 {
    fn from(z: ComplexField) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralPayload {
    pub a_n: ComplexField,
    pub b: Vec<ComplexField>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HatPayload {
    pub a_n: ComplexField,
    pub b: Vec<f64>,
    pub b_n: ComplexField,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataPayload {
    pub beta: ComplexField,
    pub lambda: Vec<ComplexField>,
    pub mu: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "kebab-case")]
pub enum InstanceKind {
    MatrixGeneral(GeneralPayload),
    MatrixHat(HatPayload),
    SpectralData(DataPayload),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub instance: InstanceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl InstanceFile {
    pub fn kind_name(&self) -> &'static str {
        match self.instance {
            InstanceKind::MatrixGeneral(_) => "matrix-general",
            InstanceKind::MatrixHat(_) => "matrix-hat",
            InstanceKind::SpectralData(_) => "spectral-data",
        }
    }
}

/// Parses and structurally validates an instance document.
pub fn parse_instance(text: &str) -> Result<InstanceFile, String> {
    serde_json::from_str(text).map_err(|e| format!("instance parse error: {e}"))
}

/// The embedded general matrix for either matrix kind.
pub fn instance_matrix(file: &InstanceFile) -> Result<PeriodicMatrixGeneral, String> {
    match &file.instance {
        InstanceKind::MatrixGeneral(p) => PeriodicMatrixGeneral::new(
            p.c.clone(),
            p.b.iter().map(|&z| z.into()).collect(),
            p.a_n.into(),
        )
        .map_err(|e| e.to_string()),
        InstanceKind::MatrixHat(p) => {
            let hat = PeriodicMatrixHat::new(p.c.clone(), p.b.clone(), p.b_n.into(), p.a_n.into())
                .map_err(|e| e.to_string())?;
            Ok(hat.embed())
        }
        InstanceKind::SpectralData(_) => {
            Err("expected a matrix instance, got spectral-data".into())
        }
    }
}

/// The spectral data carried by a spectral-data instance.
pub fn instance_data(file: &InstanceFile) -> Result<SpectralData, String> {
    match &file.instance {
        InstanceKind::SpectralData(p) => SpectralData::new(
            p.lambda.iter().map(|&z| z.into()).collect(),
            p.mu.clone(),
            p.beta.into(),
        )
        .map_err(|e| e.to_string()),
        _ => Err(format!(
            "expected a spectral-data instance, got {}",
            file.kind_name()
        )),
    }
}

/// Canonical rendering of an instance document.
#[cfg_attr(not(test), allow(dead_code))]
pub fn serialize_instance(file: &InstanceFile) -> String {
    let value = serde_json::to_value(file).expect("instances are serializable");
    to_canonical_json(&value)
}

/// Renders a JSON value canonically: sorted keys (the map type is ordered),
/// floats with 17 significant digits, no insignificant whitespace.
pub fn to_canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().expect("JSON numbers are i64, u64, or f64");
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings are serializable"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("keys are serializable"));
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

/// Lowercase hex SHA-256 digest of the raw input.
pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in out {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_instance_round_trips_byte_stably() {
        let text = r#"{
            "kind": "matrix-hat",
            "payload": {
                "c": [0.0, 0.0],
                "b": [1.0, 1.0],
                "b_n": {"re": 0.0, "im": 1.0},
                "a_n": {"re": 0.0, "im": 0.0}
            }
        }"#;
        let parsed = parse_instance(text).unwrap();
        let canonical = serialize_instance(&parsed);
        let reparsed = parse_instance(&canonical).unwrap();
        assert_eq!(canonical, serialize_instance(&reparsed));
        assert!(canonical.contains("\"kind\":\"matrix-hat\""));
        let m = instance_matrix(&parsed).unwrap();
        assert_eq!(m.n(), 3);
    }

    #[test]
    fn zero_coupling_reports_field_path() {
        let text = r#"{
            "kind": "matrix-general",
            "payload": {
                "c": [0.0, 0.0],
                "b": [{"re": 1.0, "im": 0.0}, {"re": 0.0, "im": 0.0}, {"re": 1.0, "im": 0.0}],
                "a_n": {"re": 0.0, "im": 0.0}
            }
        }"#;
        let parsed = parse_instance(text).unwrap();
        let err = instance_matrix(&parsed).unwrap_err();
        assert!(err.contains("b[2]"), "{err}");
    }

    #[test]
    fn unsorted_nodes_report_invalid_data() {
        let text = r#"{
            "kind": "spectral-data",
            "payload": {
                "lambda": [{"re": -1.7320508075688772, "im": 0.0},
                           {"re": 0.0, "im": 0.0},
                           {"re": 1.7320508075688772, "im": 0.0}],
                "mu": [1.0, -1.0],
                "beta": {"re": 0.0, "im": 1.0}
            }
        }"#;
        let parsed = parse_instance(text).unwrap();
        let err = instance_data(&parsed).unwrap_err();
        assert!(err.contains("mu not strictly increasing"), "{err}");
    }

    #[test]
    fn canonical_floats_use_full_precision() {
        let v = serde_json::json!({"x": 0.1, "n": 3});
        let s = to_canonical_json(&v);
        assert_eq!(s, "{\"n\":3,\"x\":1.0000000000000001e-1}");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
