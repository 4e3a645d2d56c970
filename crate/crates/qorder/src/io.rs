//! JSON file formats: state sets, transformation specs, and synthesized
//! circuits.
//!
//! All files carry a top-level `"schema": 1` field. Complex numbers are
//! two-element `[re, im]` arrays; matrices are row-major arrays of rows.
//! Parsers accept untrusted input: every structural invariant is
//! re-validated after deserialization, and size caps keep hostile files
//! from turning into allocation or CPU bombs.
//!
//! Ingest normalization policy: states with norm error ≤ 1e-9 load as-is;
//! error in (1e-9, 1e-6] renormalizes with a warning (hand-written fixtures
//! have short decimals); anything worse is rejected.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error as DomainError;
use crate::feasibility::PartialIsometrySpec;
use crate::linalg::{Complex, StateVector, UnitaryMatrix, EPS_NORM};
use crate::ordering::{OrderedStateSet, Valuation};
use crate::synthesis::{ComparatorCircuit, SorterCircuit, SorterStage};

pub const SCHEMA_VERSION: u32 = 1;

/// Loose ingest tolerance: states beyond this norm error are rejected.
pub const INGEST_NORM_TOL: f64 = 1e-6;

// Size caps for untrusted input.
const MAX_STATE_DIM: usize = 1 << 16;
const MAX_SET_STATES: usize = 1024;
const MAX_SPEC_PAIRS: usize = 4096;
const MAX_MATRIX_DIM: usize = 1024;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read file: {0}")]
    Io(#[from] std::io::Error),
    /// Syntax errors; the display form carries line and column.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    /// Structurally valid JSON that violates the file schema.
    #[error("invalid file: {0}")]
    Invalid(String),
    /// Valid-looking data that fails a domain invariant.
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Serialize, Deserialize)]
struct StateEntry {
    label: String,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateSetDoc {
    schema: u32,
    dim: usize,
    states: Vec<StateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    valuation: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PairEntry {
    input: Vec<[f64; 2]>,
    output: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransformSpecDoc {
    schema: u32,
    dim: usize,
    pairs: Vec<PairEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
enum CircuitDoc {
    #[serde(rename = "comparator")]
    Comparator {
        schema: u32,
        dim: usize,
        alphabet: Vec<Vec<[f64; 2]>>,
        unitary: Vec<Vec<[f64; 2]>>,
    },
    #[serde(rename = "sorter")]
    Sorter {
        schema: u32,
        dim: usize,
        alphabet: Vec<Vec<[f64; 2]>>,
        n_registers: usize,
        stages: Vec<StageDoc>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct StageDoc {
    position: usize,
    unitary: Vec<Vec<[f64; 2]>>,
}

/// A state set as loaded from disk: the domain set plus display labels, the
/// optional valuation, and any renormalization warnings.
#[derive(Debug, Clone)]
pub struct LoadedStateSet {
    pub set: OrderedStateSet,
    pub labels: Vec<String>,
    pub valuation: Option<Valuation>,
    pub warnings: Vec<String>,
}

/// A transformation spec as loaded from disk.
#[derive(Debug, Clone)]
pub struct LoadedTransformSpec {
    pub spec: PartialIsometrySpec,
    pub warnings: Vec<String>,
}

/// A synthesized circuit as loaded from disk.
#[derive(Debug, Clone)]
pub enum LoadedCircuit {
    Comparator(ComparatorCircuit),
    Sorter(SorterCircuit),
}

fn check_schema(schema: u32) -> Result<(), IoError> {
    if schema != SCHEMA_VERSION {
        return Err(IoError::Invalid(format!(
            "unsupported schema version {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

fn to_complex(raw: &[[f64; 2]]) -> Vec<Complex> {
    raw.iter().map(|p| Complex::new(p[0], p[1])).collect()
}

/// Normalize per the ingest policy; `what` names the vector in diagnostics.
fn ingest_state(raw: &[[f64; 2]], dim: usize, what: &str, warnings: &mut Vec<String>)
    -> Result<StateVector, IoError>
{
    if raw.len() != dim {
        return Err(IoError::Invalid(format!(
            "{what}: {} amplitudes, expected {dim}",
            raw.len()
        )));
    }
    let mut amps = to_complex(raw);
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(IoError::Invalid(format!("{what}: non-finite amplitude")));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let err = (norm - 1.0).abs();
    if err > INGEST_NORM_TOL {
        return Err(IoError::Invalid(format!(
            "{what}: norm {norm:.9} is off by {err:.3e}, beyond the ingest tolerance {INGEST_NORM_TOL:e}"
        )));
    }
    if err > EPS_NORM {
        let scale = Complex::new(1.0 / norm, 0.0);
        for a in &mut amps {
            *a *= scale;
        }
        warnings.push(format!(
            "{what}: renormalized (norm error {err:.3e} within ingest tolerance)"
        ));
    }
    Ok(StateVector::new(amps)?)
}

pub fn parse_state_set(text: &str) -> Result<LoadedStateSet, IoError> {
    let doc: StateSetDoc = serde_json::from_str(text)?;
    check_schema(doc.schema)?;
    if doc.dim == 0 || doc.dim > MAX_STATE_DIM {
        return Err(IoError::Invalid(format!(
            "dim {} outside 1..={MAX_STATE_DIM}",
            doc.dim
        )));
    }
    if doc.states.is_empty() {
        return Err(IoError::Invalid("no states in file".into()));
    }
    if doc.states.len() > MAX_SET_STATES {
        return Err(IoError::Invalid(format!(
            "{} states exceeds the cap of {MAX_SET_STATES}",
            doc.states.len()
        )));
    }
    let mut warnings = Vec::new();
    let mut members = Vec::with_capacity(doc.states.len());
    let mut labels = Vec::with_capacity(doc.states.len());
    for (k, entry) in doc.states.iter().enumerate() {
        if labels.contains(&entry.label) {
            return Err(IoError::Invalid(format!(
                "duplicate state label '{}'",
                entry.label
            )));
        }
        let what = format!("state {} ('{}')", k + 1, entry.label);
        members.push(ingest_state(&entry.amplitudes, doc.dim, &what, &mut warnings)?);
        labels.push(entry.label.clone());
    }
    let set = OrderedStateSet::new(members)?;
    let valuation = match doc.valuation {
        None => None,
        Some(values) => {
            if values.len() != doc.dim {
                return Err(IoError::Invalid(format!(
                    "valuation has {} entries, expected {}",
                    values.len(),
                    doc.dim
                )));
            }
            Some(Valuation::new(values)?)
        }
    };
    Ok(LoadedStateSet {
        set,
        labels,
        valuation,
        warnings,
    })
}

pub fn load_state_set(path: &Path) -> Result<LoadedStateSet, IoError> {
    parse_state_set(&std::fs::read_to_string(path)?)
}

pub fn parse_transform_spec(text: &str) -> Result<LoadedTransformSpec, IoError> {
    let doc: TransformSpecDoc = serde_json::from_str(text)?;
    check_schema(doc.schema)?;
    if doc.dim == 0 || doc.dim > MAX_STATE_DIM {
        return Err(IoError::Invalid(format!(
            "dim {} outside 1..={MAX_STATE_DIM}",
            doc.dim
        )));
    }
    if doc.pairs.is_empty() {
        return Err(IoError::Invalid("no pairs in file".into()));
    }
    if doc.pairs.len() > MAX_SPEC_PAIRS {
        return Err(IoError::Invalid(format!(
            "{} pairs exceeds the cap of {MAX_SPEC_PAIRS}",
            doc.pairs.len()
        )));
    }
    let mut warnings = Vec::new();
    let mut pairs = Vec::with_capacity(doc.pairs.len());
    for (k, entry) in doc.pairs.iter().enumerate() {
        let input = ingest_state(
            &entry.input,
            doc.dim,
            &format!("pair {} input", k + 1),
            &mut warnings,
        )?;
        let output = ingest_state(
            &entry.output,
            doc.dim,
            &format!("pair {} output", k + 1),
            &mut warnings,
        )?;
        pairs.push((input, output));
    }
    Ok(LoadedTransformSpec {
        spec: PartialIsometrySpec::new(pairs)?,
        warnings,
    })
}

pub fn load_transform_spec(path: &Path) -> Result<LoadedTransformSpec, IoError> {
    parse_transform_spec(&std::fs::read_to_string(path)?)
}

fn matrix_to_rows(m: &DMatrix<Complex>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

fn rows_to_unitary(rows: &[Vec<[f64; 2]>], what: &str) -> Result<UnitaryMatrix, IoError> {
    let n = rows.len();
    if n == 0 || n > MAX_MATRIX_DIM {
        return Err(IoError::Invalid(format!(
            "{what}: matrix dim {n} outside 1..={MAX_MATRIX_DIM}"
        )));
    }
    let mut m = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(IoError::Invalid(format!(
                "{what}: row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (c, p) in row.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(IoError::Invalid(format!(
                    "{what}: non-finite entry at ({r},{c})"
                )));
            }
            m[(r, c)] = Complex::new(p[0], p[1]);
        }
    }
    Ok(UnitaryMatrix::new(m)?)
}

fn ingest_alphabet(
    raw: &[Vec<[f64; 2]>],
    dim: usize,
    warnings: &mut Vec<String>,
) -> Result<OrderedStateSet, IoError> {
    if dim == 0 || dim > MAX_STATE_DIM {
        return Err(IoError::Invalid(format!(
            "dim {dim} outside 1..={MAX_STATE_DIM}"
        )));
    }
    if raw.is_empty() {
        return Err(IoError::Invalid("empty alphabet".into()));
    }
    if raw.len() > MAX_SET_STATES {
        return Err(IoError::Invalid(format!(
            "{} alphabet states exceeds the cap of {MAX_SET_STATES}",
            raw.len()
        )));
    }
    let mut members = Vec::with_capacity(raw.len());
    for (k, amps) in raw.iter().enumerate() {
        members.push(ingest_state(
            amps,
            dim,
            &format!("alphabet state {}", k + 1),
            warnings,
        )?);
    }
    Ok(OrderedStateSet::new(members)?)
}

pub fn parse_circuit(text: &str) -> Result<LoadedCircuit, IoError> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    let mut warnings = Vec::new();
    match doc {
        CircuitDoc::Comparator {
            schema,
            dim,
            alphabet,
            unitary,
        } => {
            check_schema(schema)?;
            let set = ingest_alphabet(&alphabet, dim, &mut warnings)?;
            let u = rows_to_unitary(&unitary, "comparator unitary")?;
            Ok(LoadedCircuit::Comparator(ComparatorCircuit::from_parts(
                set, u,
            )?))
        }
        CircuitDoc::Sorter {
            schema,
            dim,
            alphabet,
            n_registers,
            stages,
        } => {
            check_schema(schema)?;
            let set = ingest_alphabet(&alphabet, dim, &mut warnings)?;
            let mut parsed = Vec::with_capacity(stages.len());
            for (s, stage) in stages.iter().enumerate() {
                parsed.push(SorterStage {
                    position: stage.position,
                    unitary: rows_to_unitary(&stage.unitary, &format!("stage {} unitary", s + 1))?,
                });
            }
            Ok(LoadedCircuit::Sorter(SorterCircuit::from_parts(
                set,
                n_registers,
                parsed,
            )?))
        }
    }
}

pub fn load_circuit(path: &Path) -> Result<LoadedCircuit, IoError> {
    parse_circuit(&std::fs::read_to_string(path)?)
}

fn alphabet_rows(set: &OrderedStateSet) -> Vec<Vec<[f64; 2]>> {
    set.members()
        .iter()
        .map(|s| s.amplitudes().iter().map(|a| [a.re, a.im]).collect())
        .collect()
}

/// Serialize a comparator circuit; output is byte-deterministic for a given
/// circuit, so synthesize → simulate round-trips reproduce results exactly.
pub fn comparator_to_json(circuit: &ComparatorCircuit) -> String {
    let doc = CircuitDoc::Comparator {
        schema: SCHEMA_VERSION,
        dim: circuit.set().dim(),
        alphabet: alphabet_rows(circuit.set()),
        unitary: matrix_to_rows(circuit.unitary().matrix()),
    };
    serde_json::to_string_pretty(&doc).expect("circuit serialization cannot fail")
}

/// Serialize a sorter circuit; byte-deterministic like [`comparator_to_json`].
pub fn sorter_to_json(circuit: &SorterCircuit) -> String {
    let doc = CircuitDoc::Sorter {
        schema: SCHEMA_VERSION,
        dim: circuit.set().dim(),
        alphabet: alphabet_rows(circuit.set()),
        n_registers: circuit.n_registers(),
        stages: circuit
            .stages()
            .iter()
            .map(|s| StageDoc {
                position: s.position,
                unitary: matrix_to_rows(s.unitary.matrix()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("circuit serialization cannot fail")
}

/// Serialize a state set with labels and optional valuation.
pub fn state_set_to_json(
    set: &OrderedStateSet,
    labels: &[String],
    valuation: Option<&Valuation>,
) -> String {
    let states = set
        .members()
        .iter()
        .zip(labels)
        .map(|(s, label)| StateEntry {
            label: label.clone(),
            amplitudes: s.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        })
        .collect();
    let doc = StateSetDoc {
        schema: SCHEMA_VERSION,
        dim: set.dim(),
        states,
        valuation: valuation.map(|v| v.basis_values().to_vec()),
    };
    serde_json::to_string_pretty(&doc).expect("state set serialization cannot fail")
}
