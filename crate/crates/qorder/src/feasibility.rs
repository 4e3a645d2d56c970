//! Decides whether a requested transformation of states extends to a
//! unitary, by testing Gram-matrix preservation, and emits certificates for
//! the violations it finds.
//!
//! A unitary preserves every pairwise overlap, so a transformation defined
//! on selected states extends to one exactly when input and output overlaps
//! agree pair by pair. The comparator and sorter checks are specializations:
//! a comparator forces every distinct pair of the set to be orthogonal, and
//! a sorter must satisfy an overlap product inequality on every ordered
//! triple.

use crate::error::Error;
use crate::linalg::{inner_product, Complex, StateVector};
use crate::ordering::{classify_set, OrderedStateSet, SetClass};
use crate::Result;

/// A transformation defined only on selected input states: the pairs
/// (input, output) that a machine is asked to realize.
///
/// Inputs and outputs share one dimension (pad the smaller side with an
/// ancilla factor before building the spec) and every vector is normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometrySpec {
    pairs: Vec<(StateVector, StateVector)>,
    dim: usize,
}

impl PartialIsometrySpec {
    pub fn new(pairs: Vec<(StateVector, StateVector)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::BadSpec("spec has no pairs".into()));
        }
        let in_dim = pairs[0].0.dim();
        let out_dim = pairs[0].1.dim();
        if in_dim != out_dim {
            return Err(Error::BadSpec(format!(
                "input dim {in_dim} != output dim {out_dim}; pad the smaller side with an ancilla"
            )));
        }
        for (k, (input, output)) in pairs.iter().enumerate() {
            if input.dim() != in_dim || output.dim() != out_dim {
                return Err(Error::BadSpec(format!(
                    "pair {} has dims ({}, {}), expected ({in_dim}, {out_dim})",
                    k + 1,
                    input.dim(),
                    output.dim()
                )));
            }
        }
        // StateVector enforces normalization; nothing further to check.
        Ok(Self { pairs, dim: in_dim })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn in_dim(&self) -> usize {
        self.dim
    }

    pub fn out_dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(StateVector, StateVector)] {
        &self.pairs
    }
}

/// Outcome of a feasibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// A unitary realizing the transformation exists.
    Feasible,
    /// No unitary can realize it; see the violation certificates.
    Infeasible,
    /// Every necessary condition tested holds, but feasibility is not
    /// thereby proven. Only the sorter check returns this.
    NecessaryTestsPassed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::NecessaryTestsPassed => "necessary-tests-passed",
        }
    }
}

/// One violated constraint: the pair (or triple, when `q` is set) of
/// 1-based state indices, the two quantities unitarity requires to agree,
/// and the residual |lhs − rhs|.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    /// Third index of an ordered triple; set only by the sorter check.
    pub q: Option<usize>,
    pub lhs: Complex,
    pub rhs: Complex,
    pub residual: f64,
}

/// Verdict plus certificates. `verdict == Infeasible` exactly when
/// `violations` is nonempty, exactly when `max_residual > tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl FeasibilityReport {
    fn from_violations(
        mut violations: Vec<Violation>,
        max_residual: f64,
        tolerance: f64,
        none_verdict: Verdict,
    ) -> Self {
        violations.sort_by_key(|v| (v.i, v.j, v.q));
        let verdict = if violations.is_empty() {
            none_verdict
        } else {
            Verdict::Infeasible
        };
        Self {
            verdict,
            violations,
            max_residual,
            tolerance,
        }
    }
}

/// Does the transformation described by `spec` extend to a unitary?
///
/// For every pair of rows: lhs = ⟨input_i|input_j⟩, rhs = ⟨output_i|output_j⟩.
/// Feasible iff max |lhs − rhs| ≤ tol. A witness unitary exists exactly when
/// this holds, since unitaries preserve overlaps and any overlap-preserving
/// map of the listed states extends to one.
pub fn unitary_extension_feasible(spec: &PartialIsometrySpec, tol: f64) -> FeasibilityReport {
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;
    let n = spec.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (in_i, out_i) = &spec.pairs()[i];
            let (in_j, out_j) = &spec.pairs()[j];
            let lhs = inner_product(in_i, in_j).expect("spec dims are uniform");
            let rhs = inner_product(out_i, out_j).expect("spec dims are uniform");
            let residual = (lhs - rhs).norm();
            max_residual = max_residual.max(residual);
            if residual > tol {
                violations.push(Violation {
                    i: i + 1,
                    j: j + 1,
                    q: None,
                    lhs,
                    rhs,
                    residual,
                });
            }
        }
    }
    FeasibilityReport::from_violations(violations, max_residual, tol, Verdict::Feasible)
}

/// Can the members of `set` be pairwise compared by a unitary machine?
///
/// Unitarity of the comparator forces ⟨ψ_j|ψ_i⟩⟨ψ_i|ψ_j⟩ = 0 for every
/// distinct pair, i.e. |⟨ψ_i|ψ_j⟩|² = 0. Feasible iff every squared overlap
/// is ≤ tol; each non-orthogonal pair is certified with lhs = |⟨ψ_i|ψ_j⟩|²,
/// rhs = 0. Duplicate states count as violations with residual 1.
pub fn comparator_feasible(set: &OrderedStateSet, tol: f64) -> Result<FeasibilityReport> {
    if set.len() < 2 {
        return Err(Error::TooFewStates(format!(
            "comparator feasibility needs N >= 2, got {}",
            set.len()
        )));
    }
    let gram = set.gram();
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let overlap = gram.entry(i, j);
            let residual = overlap.norm_sqr();
            max_residual = max_residual.max(residual);
            if residual > tol {
                violations.push(Violation {
                    i: i + 1,
                    j: j + 1,
                    q: None,
                    lhs: Complex::new(residual, 0.0),
                    rhs: Complex::new(0.0, 0.0),
                    residual,
                });
            }
        }
    }
    Ok(FeasibilityReport::from_violations(
        violations,
        max_residual,
        tol,
        Verdict::Feasible,
    ))
}

/// Can the members of `set` be sorted by a unitary machine?
///
/// For every ordered triple i < j < q, unitarity of the sorting
/// transformation requires ⟨ψ_q|ψ_i⟩ = ⟨ψ_j|ψ_i⟩⟨ψ_q|ψ_j⟩⟨anc″|anc′⟩ for
/// some pair of normalized ancilla states, hence the necessary condition
/// |⟨ψ_q|ψ_i⟩| ≤ |⟨ψ_j|ψ_i⟩|·|⟨ψ_q|ψ_j⟩| + tol. Violating triples are
/// certified with the two moduli as lhs and rhs. A mutually orthogonal set
/// is Feasible outright; otherwise, passing every triple yields
/// `NecessaryTestsPassed` — the condition is necessary, not sufficient.
pub fn sorter_feasible(set: &OrderedStateSet, tol: f64) -> Result<FeasibilityReport> {
    if set.len() < 3 {
        return Err(Error::TooFewStates(format!(
            "sorter feasibility needs N >= 3, got {}",
            set.len()
        )));
    }
    let gram = set.gram();
    let n = set.len();
    let mut violations = Vec::new();
    let mut max_residual = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for q in (j + 1)..n {
                let lhs = gram.entry(q, i).norm();
                let rhs = gram.entry(j, i).norm() * gram.entry(q, j).norm();
                if lhs > rhs + tol {
                    let residual = lhs - rhs;
                    max_residual = max_residual.max(residual);
                    violations.push(Violation {
                        i: i + 1,
                        j: j + 1,
                        q: Some(q + 1),
                        lhs: Complex::new(lhs, 0.0),
                        rhs: Complex::new(rhs, 0.0),
                        residual,
                    });
                }
            }
        }
    }
    let none_verdict = if classify_set(set) == SetClass::MutuallyOrthogonal {
        Verdict::Feasible
    } else {
        Verdict::NecessaryTestsPassed
    };
    Ok(FeasibilityReport::from_violations(
        violations,
        max_residual,
        tol,
        none_verdict,
    ))
}

/// The no-cloning demonstration spec {|0⟩|0⟩ → |0⟩|0⟩, |+⟩|0⟩ → |+⟩|+⟩}.
///
/// Cloning two non-orthogonal states is not Gram-preserving: the input
/// overlap is 1/√2 while the output overlap is 1/2.
pub fn cloning_demo_spec() -> PartialIsometrySpec {
    let zero = StateVector::basis(2, 0);
    let plus = StateVector::new(vec![
        Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ])
    .expect("|+> is normalized");
    let pairs = vec![
        (
            crate::linalg::tensor(&zero, &zero),
            crate::linalg::tensor(&zero, &zero),
        ),
        (
            crate::linalg::tensor(&plus, &zero),
            crate::linalg::tensor(&plus, &plus),
        ),
    ];
    PartialIsometrySpec::new(pairs).expect("demo spec is well-formed")
}

/// Check that a report's certificates recompute: residual = |lhs − rhs|.
/// Used by tests and the CLI self-checks.
pub fn verify_report_consistency(report: &FeasibilityReport) -> bool {
    let recompute_ok = report
        .violations
        .iter()
        .all(|v| ((v.lhs - v.rhs).norm() - v.residual).abs() <= 1e-12);
    let verdict_ok = match report.verdict {
        Verdict::Infeasible => !report.violations.is_empty() && report.max_residual > report.tolerance,
        _ => report.violations.is_empty(),
    };
    recompute_ok && verdict_ok
}
