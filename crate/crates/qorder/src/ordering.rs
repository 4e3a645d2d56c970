//! Indexed state sets with a total order, and the valuation map from states
//! to nonnegative reals.
//!
//! The order is strictly by index: member i precedes member j iff i < j.
//! The valuation exists to justify that such an order makes sense (basis
//! labels carry values, superpositions get the expectation), but it is never
//! consulted for ordering decisions — distinct states may share a valuation.

use std::cmp::Ordering;

use crate::error::Error;
use crate::linalg::{GramMatrix, StateVector, EPS_NORM, EPS_PSD};
use crate::Result;

/// An ordered list of states sharing one dimension. Indices are 1-based
/// throughout (k = 1…N), matching the convention used in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedStateSet {
    members: Vec<StateVector>,
    dim: usize,
}

impl OrderedStateSet {
    pub fn new(members: Vec<StateVector>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        let dim = members[0].dim();
        for (k, m) in members.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimMismatch(format!(
                    "state {} has dim {}, set dim is {dim}",
                    k + 1,
                    m.dim()
                )));
            }
        }
        Ok(Self { members, dim })
    }

    /// Number of states N.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor rejects empty sets
    }

    /// Shared Hilbert-space dimension D.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn members(&self) -> &[StateVector] {
        &self.members
    }

    /// State with 1-based index `k`.
    pub fn state(&self, k: usize) -> Result<&StateVector> {
        if k == 0 || k > self.members.len() {
            return Err(Error::BadIndex(format!(
                "index {k} out of range 1..={}",
                self.members.len()
            )));
        }
        Ok(&self.members[k - 1])
    }

    /// Gram matrix of the members (infallible: the set is nonempty and
    /// dimension-consistent by construction).
    pub fn gram(&self) -> GramMatrix {
        GramMatrix::from_states(&self.members).expect("set invariants guarantee a gram matrix")
    }
}

/// Map from canonical basis states to nonnegative values; superpositions get
/// the expectation value.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    basis_values: Vec<f64>,
}

impl Valuation {
    pub fn new(basis_values: Vec<f64>) -> Result<Self> {
        if basis_values.is_empty() {
            return Err(Error::EmptySet);
        }
        for (b, v) in basis_values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::BadSpec(format!(
                    "valuation of basis state {b} is {v}, expected a finite nonnegative real"
                )));
            }
        }
        Ok(Self { basis_values })
    }

    /// The default assignment v_b = b (the binary value of the basis label).
    pub fn canonical(dim: usize) -> Self {
        Self {
            basis_values: (0..dim).map(|b| b as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.basis_values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn basis_values(&self) -> &[f64] {
        &self.basis_values
    }
}

/// Expectation value Σ_b v_b·|amplitude_b|² of a state under a valuation.
pub fn valuation(state: &StateVector, val: &Valuation) -> Result<f64> {
    if val.len() != state.dim() {
        return Err(Error::DimMismatch(format!(
            "valuation over {} basis states applied to a dim-{} state",
            val.len(),
            state.dim()
        )));
    }
    Ok(state
        .amplitudes()
        .iter()
        .zip(val.basis_values())
        .map(|(a, v)| v * a.norm_sqr())
        .sum())
}

/// Classical order oracle: compares members purely by index.
pub fn compare_by_index(set: &OrderedStateSet, i: usize, j: usize) -> Result<Ordering> {
    set.state(i)?;
    set.state(j)?;
    Ok(i.cmp(&j))
}

/// How a state set sits in its Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetClass {
    /// All off-diagonal Gram entries have modulus ≤ 1e-9.
    MutuallyOrthogonal,
    /// Not orthogonal, but the smallest Gram eigenvalue exceeds 1e-9.
    LinearlyIndependent,
    LinearlyDependent,
}

impl SetClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SetClass::MutuallyOrthogonal => "mutually-orthogonal",
            SetClass::LinearlyIndependent => "linearly-independent",
            SetClass::LinearlyDependent => "linearly-dependent",
        }
    }
}

/// Classify a set by its Gram matrix. The set is nonempty by construction,
/// so this cannot fail.
pub fn classify_set(set: &OrderedStateSet) -> SetClass {
    let gram = set.gram();
    if gram.max_off_diagonal() <= EPS_NORM {
        return SetClass::MutuallyOrthogonal;
    }
    if gram.min_eigenvalue() > EPS_PSD {
        SetClass::LinearlyIndependent
    } else {
        SetClass::LinearlyDependent
    }
}
