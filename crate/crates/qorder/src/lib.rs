//! Deciding, certifying, and demonstrating which transformations of finite
//! sets of pure quantum states a unitary machine can realize.
//!
//! The library is organized in layers:
//!
//! - [`linalg`] — complex state vectors, Gram matrices, unitarity tests, and
//!   deterministic completion of partial isometries to full unitaries.
//! - [`ordering`] — indexed state sets with a total order and the valuation
//!   map from states to nonnegative reals.
//! - [`feasibility`] — Gram-preservation tests deciding whether a requested
//!   transformation extends to a unitary, with violation certificates; the
//!   comparator and sorter specializations live here.
//! - [`synthesis`] — explicit comparator, compare-swap, and sorting-network
//!   unitaries for mutually orthogonal alphabets.
//! - [`simulator`] — dense state-vector simulation, register decoding, and
//!   flag readout.
//! - [`io`] — JSON file formats for state sets, transformation specs, and
//!   synthesized circuits.

pub mod cli;
pub mod error;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod ordering;
pub mod simulator;
pub mod synthesis;

pub use error::Error;
pub use feasibility::{
    comparator_feasible, sorter_feasible, unitary_extension_feasible, FeasibilityReport,
    PartialIsometrySpec, Verdict, Violation,
};
pub use linalg::{
    complete_to_unitary, gram_matrix, inner_product, is_unitary, tensor, Complex, GramMatrix,
    StateVector, UnitaryMatrix,
};
pub use ordering::{classify_set, compare_by_index, valuation, OrderedStateSet, SetClass, Valuation};
pub use simulator::{
    apply, apply_embedded, decode_register, flag_distribution, run_compare, run_sort,
    CompositeState, SortOutcome,
};
pub use synthesis::{build_comparator, build_compare_swap, build_sorter, ComparatorCircuit, SorterCircuit};

/// Default tolerance for feasibility verdicts; CLI-overridable.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type Result<T> = std::result::Result<T, Error>;
