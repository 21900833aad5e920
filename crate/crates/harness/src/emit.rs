//! Trace and report documents and their JSON and CSV encodings.
//!
//! JSON numbers carry 17 significant digits so every double survives a
//! write/read cycle exactly. Non-finite values become `null`, which is why
//! every field that can hold one is an `Option`.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub meta: Meta,
    pub steps: Vec<StepDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    /// The resolved configuration.
    pub config: RunConfig,
    pub dim: usize,
    pub x0: Vec<f64>,
    /// Update steps actually taken; below `config.steps` when a method
    /// stops early.
    pub steps_taken: usize,
    pub constants: ConstantsDoc,
    pub certificates: Vec<CertificateDoc>,
    /// Aggregate verdict; `None` when not certifying.
    pub pass: Option<bool>,
    pub restart: Option<RestartDoc>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantsDoc {
    pub x_star: Option<Vec<f64>>,
    pub f_star: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub d: Option<f64>,
    pub d_estimated: bool,
    pub g: Option<f64>,
    pub g_estimated: bool,
    pub coupling: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartDoc {
    pub epsilon: f64,
    pub epoch_length: usize,
    pub epochs: usize,
    pub steps_to_target: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub theorem: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub at: usize,
    pub run_pass: bool,
    pub vacuous: bool,
    pub not_certifiable: Option<String>,
    pub step_violations: Option<usize>,
    pub steps_pass: Option<bool>,
    pub telescoping_residual: Option<f64>,
    pub telescoping_ok: Option<bool>,
    pub consistent: bool,
    pub pass: bool,
    pub flags: Vec<String>,
}

/// One record `t` of a run: the state, its function value, and the round
/// played from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub t: usize,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
    pub f: Option<f64>,
    pub gap: Option<f64>,
    pub grad_norm: Option<f64>,
    pub dual_grad_norm: Option<f64>,
    pub step_size: Option<f64>,
    pub potentials: Vec<PotentialDoc>,
}

/// `Φ_t` under one theorem's potential, and whether the step leaving `t`
/// met its bound (`None` at the final record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialDoc {
    pub theorem: String,
    pub phi: Option<f64>,
    pub ok: Option<bool>,
}

/// The report alone, as written for an empty or standalone report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub certificates: Vec<CertificateDoc>,
}

pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

struct Digits17;

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
}

/// Canonical JSON: compact, fields in declaration order, one trailing
/// newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).expect("documents contain only serializable data");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn trace_from_json(text: &str) -> serde_json::Result<TraceDoc> {
    serde_json::from_str(text)
}

fn num(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

fn flag(v: Option<bool>) -> String {
    v.map_or(String::new(), |v| v.to_string())
}

/// One row per update step `t = 1..=T`: the state the step produced, with
/// the step size, gradient norms and verdict of the round that led to it.
pub fn to_csv(doc: &TraceDoc) -> Result<String, csv::Error> {
    let dim = doc.meta.dim;
    let has_y = doc.steps.iter().any(|s| s.y.is_some());
    let has_z = doc.steps.iter().any(|s| s.z.is_some());
    let theorems: Vec<&str> = doc
        .steps
        .first()
        .map(|s| s.potentials.iter().map(|p| p.theorem.as_str()).collect())
        .unwrap_or_default();

    let mut header = vec!["t".to_string()];
    for (name, on) in [("x", true), ("y", has_y), ("z", has_z)] {
        if on {
            header.extend((0..dim).map(|i| format!("{name}{i}")));
        }
    }
    header.extend(["f", "gap", "grad_norm", "dual_grad_norm", "step_size"].map(String::from));
    for th in &theorems {
        header.push(format!("phi:{th}"));
        header.push(format!("ok:{th}"));
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for pair in doc.steps.windows(2) {
        let (prev, s) = (&pair[0], &pair[1]);
        let mut row = vec![s.t.to_string()];
        row.extend(s.x.iter().map(|v| v.to_string()));
        for (on, v) in [(has_y, &s.y), (has_z, &s.z)] {
            if on {
                match v {
                    Some(v) => row.extend(v.iter().map(|c| c.to_string())),
                    None => row.extend((0..dim).map(|_| String::new())),
                }
            }
        }
        row.extend([num(s.f), num(s.gap), num(prev.grad_norm), num(prev.dual_grad_norm), num(prev.step_size)]);
        for (p, q) in s.potentials.iter().zip(&prev.potentials) {
            row.push(num(p.phi));
            row.push(flag(q.ok));
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

/// Writes `doc` to `path` in `format`.
pub fn write_trace(doc: &TraceDoc, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => to_json(doc),
        Format::Csv => to_csv(doc).map_err(|source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        })?,
    };
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_trace(path: &Path) -> Result<TraceDoc> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    trace_from_json(&text).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_a_valid_document() {
        let text = to_json(&ReportDoc::default());
        assert_eq!(text, "{\"certificates\":[]}\n");
        let back: ReportDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ReportDoc::default());
    }

    #[test]
    fn numbers_carry_seventeen_digits() {
        let text = to_json(&vec![0.1, 1.0 / 3.0, -0.0, 5e-324, f64::MAX]);
        assert_eq!(
            text.trim(),
            "[1.0000000000000001e-1,3.3333333333333331e-1,-0.0000000000000000e0,4.9406564584124654e-324,1.7976931348623157e308]"
        );
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back[1].to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(back[2].to_bits(), (-0.0f64).to_bits());
        assert_eq!(back[3], 5e-324);
    }

    #[test]
    fn non_finite_values_become_null() {
        assert_eq!(to_json(&vec![f64::NAN]).trim(), "[null]");
        assert_eq!(finite(f64::INFINITY), None);
    }
}
