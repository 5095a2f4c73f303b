//! File formats: samples CSV, model JSON, per-iteration report CSV and
//! pointwise error CSVs. All writes go through a temporary file in the target
//! directory followed by a rename.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transfer::{eval_first_order, eval_second_order, pointwise_error_with_fallback};
use crate::types::{FirstOrderModel, FitReport, FrequencySampleSet, SecondOrderModel};

pub const SAMPLES_HEADER: &str = "xi_re,xi_im,h_re,h_im";
pub const REPORT_HEADER: &str = "iter,max_den_weight,ls_residual,max_rel_err,max_pole_move";
pub const ERRORS_HEADER: &str = "xi_im,rel_err";
pub const EVAL_HEADER: &str = "omega,h_re,h_im,h_abs";

/// 17 significant digits, enough for an exact round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {line}: '{field}': {e}")))
}

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn samples_to_csv(samples: &FrequencySampleSet) -> String {
    let mut out = String::with_capacity(100 * samples.len());
    out.push_str(SAMPLES_HEADER);
    out.push('\n');
    for (p, v) in samples.points().iter().zip(samples.values()) {
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(p.re), fmt_f64(p.im), fmt_f64(v.re), fmt_f64(v.im));
    }
    out
}

pub fn samples_from_csv(text: &str) -> Result<FrequencySampleSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    let header: Vec<&str> = header.iter().map(str::trim).collect();
    if header.join(",") != SAMPLES_HEADER {
        return Err(Error::Parse(format!("expected header '{SAMPLES_HEADER}', got '{}'", header.join(","))));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let line = i + 2;
        if rec.len() != 4 {
            return Err(Error::Parse(format!("line {line}: expected 4 fields, got {}", rec.len())));
        }
        points.push(Complex64::new(parse_f64(&rec[0], line)?, parse_f64(&rec[1], line)?));
        values.push(Complex64::new(parse_f64(&rec[2], line)?, parse_f64(&rec[3], line)?));
    }
    FrequencySampleSet::new(points, values)
}

pub fn save_samples(path: &Path, samples: &FrequencySampleSet) -> Result<()> {
    write_atomic(path, samples_to_csv(samples).as_bytes())
}

pub fn load_samples(path: &Path) -> Result<FrequencySampleSet> {
    samples_from_csv(&read_to_string(path)?)
}

/// A learned or stored model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    SecondOrder(SecondOrderModel),
    FirstOrder(FirstOrderModel),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum ModelFile {
    #[serde(rename = "second_order_modal")]
    SecondOrder {
        omega: Vec<f64>,
        psi: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    },
    #[serde(rename = "first_order")]
    FirstOrder {
        lambda_re: Vec<f64>,
        lambda_im: Vec<f64>,
        phi_re: Vec<f64>,
        phi_im: Vec<f64>,
    },
}

impl Model {
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        match self {
            Model::SecondOrder(m) => eval_second_order(m, s),
            Model::FirstOrder(m) => eval_first_order(m, s),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = match self {
            Model::SecondOrder(m) => ModelFile::SecondOrder {
                omega: m.omega().to_vec(),
                psi: m.psi().to_vec(),
                b: m.b().to_vec(),
                c: m.c().to_vec(),
            },
            Model::FirstOrder(m) => ModelFile::FirstOrder {
                lambda_re: m.poles().iter().map(|p| p.re).collect(),
                lambda_im: m.poles().iter().map(|p| p.im).collect(),
                phi_re: m.residues().iter().map(|p| p.re).collect(),
                phi_im: m.residues().iter().map(|p| p.im).collect(),
            },
        };
        serde_json::to_string(&file).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        match file {
            ModelFile::SecondOrder { omega, psi, b, c } => {
                Ok(Model::SecondOrder(SecondOrderModel::with_output(omega, psi, b, c)?))
            }
            ModelFile::FirstOrder {
                lambda_re,
                lambda_im,
                phi_re,
                phi_im,
            } => {
                let n = lambda_re.len();
                if lambda_im.len() != n || phi_re.len() != n || phi_im.len() != n {
                    return Err(Error::Parse("first-order model arrays differ in length".into()));
                }
                let poles = lambda_re.iter().zip(&lambda_im).map(|(&r, &i)| Complex64::new(r, i)).collect();
                let residues = phi_re.iter().zip(&phi_im).map(|(&r, &i)| Complex64::new(r, i)).collect();
                Ok(Model::FirstOrder(FirstOrderModel::new(poles, residues)?))
            }
        }
    }
}

pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    let mut text = model.to_json()?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn load_model(path: &Path) -> Result<Model> {
    Model::from_json(&read_to_string(path)?)
}

/// Per-iteration rows followed by `#`-prefixed status lines.
pub fn report_to_csv(report: &FitReport) -> String {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in &report.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration,
            fmt_f64(r.max_den_weight),
            fmt_f64(r.ls_residual),
            fmt_f64(r.max_rel_err),
            fmt_f64(r.max_pole_move)
        );
    }
    let _ = writeln!(out, "# converged={}", report.converged);
    let _ = writeln!(out, "# weights_converged={}", report.weights_converged);
    let _ = writeln!(out, "# termination={}", report.termination.as_str());
    let _ = writeln!(out, "# rank_deficient_solves={}", report.rank_deficient_solves);
    let _ = writeln!(out, "# clipped_weights={}", report.clipped_weights);
    let _ = writeln!(out, "# absolute_error_fallback={}", report.absolute_error_fallback);
    out
}

pub fn errors_to_csv(samples: &FrequencySampleSet, errors: &[f64]) -> String {
    let mut out = String::new();
    out.push_str(ERRORS_HEADER);
    out.push('\n');
    for (p, e) in samples.points().iter().zip(errors) {
        let _ = writeln!(out, "{},{}", fmt_f64(p.im), fmt_f64(*e));
    }
    out
}

/// Pointwise relative errors of several models against one data set.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub xi_im: Vec<f64>,
    pub names: Vec<String>,
    /// One column per model.
    pub columns: Vec<Vec<f64>>,
}

impl ErrorTable {
    pub fn new(xi_im: Vec<f64>) -> Self {
        Self {
            xi_im,
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push_model(&mut self, name: &str, model: &Model, samples: &FrequencySampleSet) -> Result<()> {
        let (errors, _) = pointwise_error_with_fallback(|s| model.eval(s), samples)?;
        self.push_column(name, errors)
    }

    pub fn push_column(&mut self, name: &str, errors: Vec<f64>) -> Result<()> {
        if errors.len() != self.xi_im.len() {
            return Err(Error::Dimension(format!(
                "column '{name}' has {} rows, grid has {}",
                errors.len(),
                self.xi_im.len()
            )));
        }
        self.names.push(name.to_string());
        self.columns.push(errors);
        Ok(())
    }

    /// Adds the `rel_err` column of an errors CSV whose grid must match.
    pub fn push_errors_csv(&mut self, name: &str, text: &str) -> Result<()> {
        let (xi, errors) = errors_from_csv(text)?;
        if xi.len() != self.xi_im.len() || xi.iter().zip(&self.xi_im).any(|(a, b)| a != b) {
            return Err(Error::Dimension(format!("grid of '{name}' does not match the samples")));
        }
        self.push_column(name, errors)
    }

    pub fn max(&self, col: usize) -> f64 {
        self.columns[col].iter().copied().fold(0.0, f64::max)
    }

    pub fn mean(&self, col: usize) -> f64 {
        let c = &self.columns[col];
        c.iter().sum::<f64>() / c.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("xi_im");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, x) in self.xi_im.iter().enumerate() {
            out.push_str(&fmt_f64(*x));
            for c in &self.columns {
                out.push(',');
                out.push_str(&fmt_f64(c[i]));
            }
            out.push('\n');
        }
        for (label, f) in [("max", Self::max as fn(&Self, usize) -> f64), ("mean", Self::mean)] {
            out.push_str("# ");
            out.push_str(label);
            for j in 0..self.columns.len() {
                out.push(',');
                out.push_str(&fmt_f64(f(self, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Reads an errors CSV (`xi_im,rel_err`) and returns both columns.
pub fn errors_from_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != ERRORS_HEADER {
        return Err(Error::Parse(format!("expected header '{ERRORS_HEADER}'")));
    }
    let mut xi = Vec::new();
    let mut err = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected 2 fields", i + 2)));
        }
        xi.push(parse_f64(&rec[0], i + 2)?);
        err.push(parse_f64(&rec[1], i + 2)?);
    }
    Ok((xi, err))
}
