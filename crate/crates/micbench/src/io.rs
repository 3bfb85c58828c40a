//! JSON and CSV file formats.
//!
//! Operators are `{"d": int, "re": [[...]], "im": [[...]]}` with row-major
//! rows; POVM and MIC files are arrays of operators; a process file is
//! `{"mic": [...], "post_states": [...]}`; a fiducial registry is an array of
//! `{"d": int, "re": [...], "im": [...]}`.

use std::fs;
use std::path::Path;

use micbench_core::operator::{min_eigenvalue, DensityOperator, HermitianOperator, Mic, Povm};
use micbench_core::process::{proportional_process, ReferenceProcess};
use micbench_core::sic::Fiducial;
use micbench_core::tol;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::fmt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl OperatorJson {
    /// Entries rounded to 12 significant digits.
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let d = op.dim();
        let rows = |flat: Vec<f64>| -> Vec<Vec<f64>> {
            flat.chunks(d)
                .map(|r| r.iter().map(|&x| fmt::round(x)).collect())
                .collect()
        };
        Self {
            d,
            re: rows(op.re_parts()),
            im: rows(op.im_parts()),
        }
    }

    pub fn to_operator(&self) -> std::result::Result<HermitianOperator, String> {
        let d = self.d;
        if d == 0 {
            return Err("dimension must be positive".into());
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != d {
                return Err(format!("{name} has {} rows, expected {d}", part.len()));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, r)| r.len() != d) {
                return Err(format!(
                    "{name} row {i} has {} entries, expected {d}",
                    row.len()
                ));
            }
        }
        let re: Vec<f64> = self.re.concat();
        let im: Vec<f64> = self.im.concat();
        HermitianOperator::from_parts(&re, &im, d).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessJson {
    pub mic: Vec<OperatorJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_states: Option<Vec<OperatorJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiducialJson {
    pub d: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl FiducialJson {
    pub fn from_fiducial(psi: &Fiducial) -> Self {
        let a = psi.amplitudes();
        Self {
            d: a.len(),
            re: a.iter().map(|z| fmt::round(z.re)).collect(),
            im: a.iter().map(|z| fmt::round(z.im)).collect(),
        }
    }

    /// Renormalizes, so entries rounded on output still load.
    pub fn to_fiducial(&self) -> std::result::Result<Fiducial, String> {
        if self.re.len() != self.d || self.im.len() != self.d {
            return Err(format!(
                "expected {} amplitudes, found re {} and im {}",
                self.d,
                self.re.len(),
                self.im.len()
            ));
        }
        let norm = self
            .re
            .iter()
            .chain(&self.im)
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(format!("amplitudes have norm {norm}"));
        }
        let re: Vec<f64> = self.re.iter().map(|x| x / norm).collect();
        let im: Vec<f64> = self.im.iter().map(|x| x / norm).collect();
        Fiducial::from_parts(&re, &im).map_err(|e| e.to_string())
    }
}

fn format_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| format_error(path, e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

fn operators(path: &Path, what: &str, items: &[OperatorJson]) -> Result<Vec<HermitianOperator>> {
    items
        .iter()
        .enumerate()
        .map(|(i, o)| {
            o.to_operator()
                .map_err(|m| format_error(path, format!("{what} {i}: {m}")))
        })
        .collect()
}

fn density(path: &Path, what: &str, op: HermitianOperator) -> Result<DensityOperator> {
    DensityOperator::new(op)
        .map_err(|e| CliError::numerical(format!("{}: {what}: ", path.display()), e))
}

fn povm_from(path: &Path, effects: Vec<HermitianOperator>) -> Result<Povm> {
    if effects.is_empty() {
        return Err(format_error(path, "no effects"));
    }
    let d = effects[0].dim();
    for (i, e) in effects.iter().enumerate() {
        if e.dim() != d {
            return Err(format_error(
                path,
                format!("effect {i} has dimension {}, expected {d}", e.dim()),
            ));
        }
        let min = min_eigenvalue(e);
        if min < -tol::PSD {
            let err = micbench_core::Error::NotPositive {
                min_eigenvalue: min,
            };
            return Err(CliError::numerical(
                format!("{}: effect {i}: ", path.display()),
                err,
            ));
        }
    }
    Povm::new(effects).map_err(|e| CliError::numerical(format!("{}: ", path.display()), e))
}

fn mic_from(path: &Path, items: &[OperatorJson]) -> Result<Mic> {
    let povm = povm_from(path, operators(path, "effect", items)?)?;
    Mic::new(povm).map_err(|e| CliError::numerical(format!("{}: ", path.display()), e))
}

pub fn read_state(path: &Path) -> Result<DensityOperator> {
    let json: OperatorJson = read_json(path)?;
    let op = json.to_operator().map_err(|m| format_error(path, m))?;
    density(path, "state", op)
}

pub fn read_povm(path: &Path) -> Result<Povm> {
    let items: Vec<OperatorJson> = read_json(path)?;
    povm_from(path, operators(path, "effect", &items)?)
}

pub fn read_mic(path: &Path) -> Result<Mic> {
    let items: Vec<OperatorJson> = read_json(path)?;
    mic_from(path, &items)
}

/// Loads a process file. With `proportional`, post-measurement states are
/// `H_i / tr H_i` and any listed states are ignored.
pub fn read_process(path: &Path, proportional: bool) -> Result<ReferenceProcess> {
    let json: ProcessJson = read_json(path)?;
    let mic = mic_from(path, &json.mic)?;
    if proportional {
        return proportional_process(&mic)
            .map_err(|e| CliError::numerical(format!("{}: ", path.display()), e));
    }
    let items = json.post_states.ok_or_else(|| {
        format_error(
            path,
            "missing post_states (use --proportional to derive them)",
        )
    })?;
    let states = operators(path, "post state", &items)?
        .into_iter()
        .enumerate()
        .map(|(i, op)| density(path, &format!("post state {i}"), op))
        .collect::<Result<Vec<_>>>()?;
    ReferenceProcess::new(mic, states)
        .map_err(|e| CliError::numerical(format!("{}: ", path.display()), e))
}

pub fn read_fiducials(path: &Path) -> Result<Vec<Fiducial>> {
    let items: Vec<FiducialJson> = read_json(path)?;
    items
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.to_fiducial()
                .map_err(|m| format_error(path, format!("entry {i}: {m}")))
        })
        .collect()
}

pub fn operators_json<T: AsRef<HermitianOperator>>(ops: &[T]) -> String {
    to_json(
        &ops.iter()
            .map(|o| OperatorJson::from_operator(o.as_ref()))
            .collect::<Vec<_>>(),
    )
}

/// Reads a real vector from CSV: every numeric field in file order, so a
/// single row and a single column are both accepted. Lines starting with `#`
/// are comments; a non-numeric first row is taken as a header.
pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = record
            .iter()
            .filter(|f| !f.is_empty())
            .map(str::parse::<f64>)
            .collect();
        match parsed {
            Ok(v) => values.extend(v),
            Err(_) if line == 0 && values.is_empty() => continue,
            Err(e) => return Err(format_error(path, format!("record {}: {e}", line + 1))),
        }
    }
    if values.is_empty() {
        return Err(format_error(path, "no numeric entries"));
    }
    if let Some(i) = values.iter().position(|x| !x.is_finite()) {
        return Err(format_error(path, format!("entry {i} is not finite")));
    }
    Ok(values)
}
