//! Complex linear algebra with exact, deterministic semantics: inner
//! products, tensor products, Gram matrices, unitarity tests, and completion
//! of partial isometries to unitaries.
//!
//! All tolerances are fixed here so that every layer above agrees on what
//! "normalized", "orthogonal", and "unitary" mean numerically.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::Result;

pub type Complex = num_complex::Complex64;

/// Norm tolerance for state vectors.
pub const EPS_NORM: f64 = 1e-9;
/// Max-entry tolerance for ‖U†U − I‖.
pub const EPS_UNITARY: f64 = 1e-9;
/// Hermiticity tolerance for Gram matrices.
pub const EPS_HERMITIAN: f64 = 1e-12;
/// Eigenvalue floor for the positive-semidefinite test.
pub const EPS_PSD: f64 = 1e-9;
/// Gram–Schmidt candidates with residual norm below this are discarded
/// during unitary completion.
pub const COMPLETION_DROP: f64 = 1e-6;

/// A normalized pure state: a unit complex vector over a `dim`-dimensional
/// Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex>,
}

impl StateVector {
    /// Build a state from amplitudes, enforcing unit norm within [`EPS_NORM`].
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimMismatch("state vector needs dim >= 1".into()));
        }
        let amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > EPS_NORM {
            return Err(Error::NotNormalized(format!(
                "norm is {norm:.12}, expected 1 within {EPS_NORM:e}"
            )));
        }
        Ok(Self { amps })
    }

    /// Canonical basis state |index⟩ in a `dim`-dimensional space.
    ///
    /// Panics if `index >= dim`; callers validate user-supplied indices.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = DVector::from_element(dim, Complex::new(0.0, 0.0));
        amps[index] = Complex::new(1.0, 0.0);
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        self.amps.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Complex> {
        &self.amps
    }

    /// Wrap a vector already known to be normalized (e.g. the image of a
    /// state under a unitary). Debug builds still check.
    pub(crate) fn from_dvector_unchecked(amps: DVector<Complex>) -> Self {
        debug_assert!((amps.norm() - 1.0).abs() <= 1e-6);
        Self { amps }
    }
}

/// ⟨a|b⟩ = Σ conj(a_k)·b_k.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(format!(
            "inner product between dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.amps.dotc(&b.amps))
}

/// Tensor product |a⟩⊗|b⟩ with the `a` index outermost (row-major).
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let amps = a.amps.kronecker(&b.amps);
    StateVector {
        amps: DVector::from_column_slice(amps.as_slice()),
    }
}

/// Matrix of pairwise overlaps ⟨ψ_i|ψ_j⟩ of a state list.
///
/// Hermitian with unit diagonal and positive semidefinite by construction;
/// [`GramMatrix::check_invariants`] re-verifies numerically.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<Complex>,
}

impl GramMatrix {
    pub fn from_states(states: &[StateVector]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptySet);
        }
        let dim = states[0].dim();
        for s in states {
            if s.dim() != dim {
                return Err(Error::DimMismatch(format!(
                    "gram matrix over mixed dims {} and {}",
                    dim,
                    s.dim()
                )));
            }
        }
        let n = states.len();
        let mut entries = DMatrix::from_element(n, n, Complex::new(0.0, 0.0));
        for i in 0..n {
            for j in i..n {
                let g = states[i].amps.dotc(&states[j].amps);
                entries[(i, j)] = g;
                entries[(j, i)] = g.conj();
            }
        }
        Ok(Self { entries })
    }

    /// Number of states the matrix was built from.
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Overlap ⟨ψ_i|ψ_j⟩ by 0-based position.
    pub fn entry(&self, i: usize, j: usize) -> Complex {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<Complex> {
        &self.entries
    }

    /// Smallest eigenvalue; real since the matrix is Hermitian.
    pub fn min_eigenvalue(&self) -> f64 {
        let eig = self.entries.clone().symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest off-diagonal overlap modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.size();
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    max = max.max(self.entries[(i, j)].norm());
                }
            }
        }
        max
    }

    /// Verify Hermiticity (1e-12), unit diagonal (1e-9), and positive
    /// semidefiniteness (eigenvalues ≥ −1e-9).
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                let d = (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm();
                if d > EPS_HERMITIAN {
                    return Err(Error::BadSpec(format!(
                        "gram matrix not Hermitian at ({i},{j}): deviation {d:e}"
                    )));
                }
            }
            let diag = (self.entries[(i, i)] - Complex::new(1.0, 0.0)).norm();
            if diag > EPS_NORM {
                return Err(Error::BadSpec(format!(
                    "gram diagonal at {i} deviates from 1 by {diag:e}"
                )));
            }
        }
        let min = self.min_eigenvalue();
        if min < -EPS_PSD {
            return Err(Error::BadSpec(format!(
                "gram matrix not PSD: min eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

/// Gram matrix of a state list; errors on an empty list or mixed dims.
pub fn gram_matrix(states: &[StateVector]) -> Result<GramMatrix> {
    GramMatrix::from_states(states)
}

/// True iff ‖M†M − I‖_max ≤ tol. `M` must be square.
pub fn is_unitary(m: &DMatrix<Complex>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let gram = m.ad_mul(m);
    let n = m.nrows();
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
            max = max.max((gram[(i, j)] - target).norm());
        }
    }
    max <= tol
}

/// A square matrix validated to satisfy ‖U†U − I‖_max ≤ 1e-9 at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: DMatrix<Complex>,
}

impl UnitaryMatrix {
    pub fn new(m: DMatrix<Complex>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotIsometry(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if !is_unitary(&m, EPS_UNITARY) {
            return Err(Error::NotIsometry(format!(
                "matrix of dim {} fails the unitarity test at {EPS_UNITARY:e}",
                m.nrows()
            )));
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex> {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    /// `self · rhs`. The product of unitaries stays unitary; no re-check.
    pub fn compose(&self, rhs: &UnitaryMatrix) -> Self {
        Self { m: &self.m * &rhs.m }
    }

    /// Column `j` as a state vector (unitary columns are normalized).
    pub fn column(&self, j: usize) -> StateVector {
        StateVector::from_dvector_unchecked(self.m.column(j).into_owned())
    }
}

fn check_orthonormal(columns: &[StateVector]) -> Result<()> {
    for (i, a) in columns.iter().enumerate() {
        for (j, b) in columns.iter().enumerate().skip(i) {
            let g = a.as_dvector().dotc(b.as_dvector());
            let target = if i == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
            if (g - target).norm() > EPS_UNITARY {
                return Err(Error::NotIsometry(format!(
                    "columns {i} and {j} have overlap {g} (not orthonormal)"
                )));
            }
        }
    }
    Ok(())
}

/// Complete `columns` (pairwise orthonormal, at most `dim` of them) to a
/// full unitary whose first k columns are the inputs.
///
/// The remaining columns are produced deterministically: canonical basis
/// vectors e₀, e₁, … are appended in index order, Gram–Schmidt
/// orthogonalized against everything accepted so far, and discarded when
/// the residual norm falls below [`COMPLETION_DROP`]. Identical inputs give
/// byte-identical outputs across runs.
pub fn complete_to_unitary(columns: &[StateVector], dim: usize) -> Result<UnitaryMatrix> {
    if columns.len() > dim {
        return Err(Error::NotIsometry(format!(
            "{} columns cannot be orthonormal in dim {dim}",
            columns.len()
        )));
    }
    for c in columns {
        if c.dim() != dim {
            return Err(Error::DimMismatch(format!(
                "column of dim {} in completion to dim {dim}",
                c.dim()
            )));
        }
    }
    check_orthonormal(columns)?;

    let mut basis: Vec<DVector<Complex>> =
        columns.iter().map(|c| c.as_dvector().clone()).collect();
    for b in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut r = DVector::from_element(dim, Complex::new(0.0, 0.0));
        r[b] = Complex::new(1.0, 0.0);
        // Two orthogonalization passes keep the result orthonormal to
        // machine precision without changing which candidates survive.
        for _ in 0..2 {
            for q in &basis {
                let coeff = q.dotc(&r);
                r -= q * coeff;
            }
        }
        let norm = r.norm();
        if norm >= COMPLETION_DROP {
            basis.push(r / Complex::new(norm, 0.0));
        }
    }
    if basis.len() != dim {
        // Cannot happen for orthonormal inputs: the candidates span the space.
        return Err(Error::NotIsometry(format!(
            "completion produced {} of {dim} columns",
            basis.len()
        )));
    }
    let m = DMatrix::from_columns(&basis.iter().map(|v| v.column(0)).collect::<Vec<_>>());
    UnitaryMatrix::new(m)
}

/// Deterministic unitary extension of the partial isometry that maps each
/// `pairs[k].0` to `pairs[k].1`.
///
/// Both sides must be pairwise orthonormal. Built as V_out · V_in† where
/// V_in and V_out are [`complete_to_unitary`] of the input and output
/// columns, so U·in_k = V_out·e_k = out_k.
pub fn extend_partial_isometry(
    pairs: &[(StateVector, StateVector)],
    dim: usize,
) -> Result<UnitaryMatrix> {
    let inputs: Vec<StateVector> = pairs.iter().map(|(a, _)| a.clone()).collect();
    let outputs: Vec<StateVector> = pairs.iter().map(|(_, b)| b.clone()).collect();
    let v_in = complete_to_unitary(&inputs, dim)?;
    let v_out = complete_to_unitary(&outputs, dim)?;
    Ok(v_out.compose(&v_in.adjoint()))
}
