//! Dense state-vector simulation over composite (multi-factor) spaces.
//!
//! States are flat amplitude vectors in row-major factor order: factor 0 is
//! outermost (largest stride), the last factor has stride 1. Gates embed
//! into the composite space by index arithmetic — gather the local block,
//! multiply, scatter — never by materializing Kronecker products with
//! identity, so memory stays bounded by the state vector itself.
//!
//! Index conventions: factor positions are 0-based array positions into
//! `factor_dims`; alphabet/state indices are 1-based like everywhere else.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::linalg::{Complex, StateVector, UnitaryMatrix};
use crate::ordering::{classify_set, OrderedStateSet, SetClass};
use crate::synthesis::{ComparatorCircuit, SorterCircuit};
use crate::Result;

/// A register decodes to an alphabet state only when its reduced overlap
/// probability exceeds this; loose against accumulation error, tight
/// against any wrong-state overlap (which is 0 for orthogonal alphabets).
pub const DECODE_THRESHOLD: f64 = 1.0 - 1e-6;

/// Amplitudes at or below this magnitude are numerical dark matter: gate
/// application and sort readout treat all-dark blocks as zero. Rounding
/// spill from synthesized gates sits near 1e-16 while the smallest
/// meaningful amplitude in a normalized desk-scale state is orders of
/// magnitude above 1e-13, so the pruned probability mass stays below
/// dim·1e-26 — invisible at every contract tolerance.
const NEGLIGIBLE_AMP: f64 = 1e-13;

#[inline]
fn amp_negligible(a: Complex) -> bool {
    a.re.abs() <= NEGLIGIBLE_AMP && a.im.abs() <= NEGLIGIBLE_AMP
}

/// A state over a product space, tagged with its factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    vector: StateVector,
    factor_dims: Vec<usize>,
}

impl CompositeState {
    /// Tag an existing vector with factor dimensions; their product must
    /// equal the vector dimension.
    pub fn new(vector: StateVector, factor_dims: Vec<usize>) -> Result<Self> {
        let product: usize = factor_dims.iter().product();
        if factor_dims.is_empty() || product != vector.dim() {
            return Err(Error::DimMismatch(format!(
                "factor dims {factor_dims:?} multiply to {product}, vector dim is {}",
                vector.dim()
            )));
        }
        Ok(Self {
            vector,
            factor_dims,
        })
    }

    /// Product state of the given factors, in order.
    pub fn product(factors: &[&StateVector]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut amps: Vec<Complex> = factors[0].amplitudes().to_vec();
        for f in &factors[1..] {
            let mut next = Vec::with_capacity(amps.len() * f.dim());
            for a in &amps {
                for b in f.amplitudes() {
                    next.push(a * b);
                }
            }
            amps = next;
        }
        Ok(Self {
            vector: StateVector::from_dvector_unchecked(DVector::from_vec(amps)),
            factor_dims: factors.iter().map(|f| f.dim()).collect(),
        })
    }

    pub fn vector(&self) -> &StateVector {
        &self.vector
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    /// Stride of factor `f`: the product of all dimensions after it.
    pub fn stride(&self, f: usize) -> usize {
        self.factor_dims[f + 1..].iter().product()
    }
}

/// Apply a unitary on the full composite space: returns U·s.
pub fn apply(u: &UnitaryMatrix, s: &CompositeState) -> Result<CompositeState> {
    if u.dim() != s.dim() {
        return Err(Error::DimMismatch(format!(
            "unitary dim {} applied to state dim {}",
            u.dim(),
            s.dim()
        )));
    }
    let v = DVector::from_column_slice(s.vector.amplitudes());
    let out = u.matrix() * v;
    Ok(CompositeState {
        vector: StateVector::from_dvector_unchecked(out),
        factor_dims: s.factor_dims.clone(),
    })
}

/// Apply a gate to selected factors of a composite state.
///
/// `factors` lists 0-based factor positions in the gate's local tensor
/// order (first entry outermost); the gate dimension must equal the product
/// of those factor dimensions.
pub fn apply_embedded(
    u: &UnitaryMatrix,
    s: &CompositeState,
    factors: &[usize],
) -> Result<CompositeState> {
    let mut amps = s.vector.amplitudes().to_vec();
    apply_embedded_in_place(u.matrix(), &mut amps, &s.factor_dims, factors)?;
    Ok(CompositeState {
        vector: StateVector::from_dvector_unchecked(DVector::from_vec(amps)),
        factor_dims: s.factor_dims.clone(),
    })
}

/// y = M·x for a column-major square matrix slice, skipping zero inputs.
fn matvec_col_major(m: &[Complex], n: usize, x: &[Complex], y: &mut [Complex]) {
    y.fill(Complex::new(0.0, 0.0));
    for c in 0..n {
        let xc = x[c];
        if xc.re == 0.0 && xc.im == 0.0 {
            continue;
        }
        let col = &m[c * n..(c + 1) * n];
        for r in 0..n {
            y[r] += col[r] * xc;
        }
    }
}

pub(crate) fn apply_embedded_in_place(
    u: &DMatrix<Complex>,
    amps: &mut [Complex],
    factor_dims: &[usize],
    factors: &[usize],
) -> Result<()> {
    let n_factors = factor_dims.len();
    for &f in factors {
        if f >= n_factors {
            return Err(Error::BadFactor(format!(
                "factor {f} out of range for {n_factors} factors"
            )));
        }
    }
    let mut seen = vec![false; n_factors];
    for &f in factors {
        if seen[f] {
            return Err(Error::BadFactor(format!("factor {f} listed twice")));
        }
        seen[f] = true;
    }
    let local_dims: Vec<usize> = factors.iter().map(|&f| factor_dims[f]).collect();
    let local_size: usize = local_dims.iter().product();
    if u.nrows() != local_size {
        return Err(Error::DimMismatch(format!(
            "gate dim {} != product of embedded factor dims {local_size}",
            u.nrows()
        )));
    }

    let stride_of = |f: usize| -> usize { factor_dims[f + 1..].iter().product() };

    // Offset of each local basis index inside a block, in the global array.
    let mut local_offsets = vec![0usize; local_size];
    for (l, off) in local_offsets.iter_mut().enumerate() {
        let mut rem = l;
        let mut acc = 0usize;
        for k in (0..factors.len()).rev() {
            acc += (rem % local_dims[k]) * stride_of(factors[k]);
            rem /= local_dims[k];
        }
        *off = acc;
    }

    let rest: Vec<usize> = (0..n_factors).filter(|f| !seen[*f]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&f| factor_dims[f]).collect();
    let rest_strides: Vec<usize> = rest.iter().map(|&f| stride_of(f)).collect();
    let rest_size: usize = rest_dims.iter().product();

    let gate = u.as_slice(); // column-major
    let mut x = vec![Complex::new(0.0, 0.0); local_size];
    let mut y = vec![Complex::new(0.0, 0.0); local_size];
    let mut coords = vec![0usize; rest.len()];
    let mut base = 0usize;
    for _ in 0..rest_size {
        // Gather the block; all-dark blocks are left untouched (the gate
        // acts block-diagonally, so their image stays in the same block).
        let mut live = false;
        for (l, &off) in local_offsets.iter().enumerate() {
            let a = amps[base + off];
            x[l] = a;
            live |= !amp_negligible(a);
        }
        if live {
            matvec_col_major(gate, local_size, &x, &mut y);
            for (l, &off) in local_offsets.iter().enumerate() {
                amps[base + off] = y[l];
            }
        }
        // Odometer over the rest coordinates, last factor fastest, so the
        // sweep stays memory-sequential.
        let mut k = rest.len();
        while k > 0 {
            k -= 1;
            coords[k] += 1;
            base += rest_strides[k];
            if coords[k] < rest_dims[k] {
                break;
            }
            base -= rest_strides[k] * rest_dims[k];
            coords[k] = 0;
        }
    }
    Ok(())
}

/// Probability of each basis outcome of one factor: squared norms of the
/// corresponding amplitude slices. Sums to 1 within 1e-9 for a normalized
/// state.
pub fn flag_distribution(s: &CompositeState, factor_index: usize) -> Result<Vec<f64>> {
    factor_distribution(s.vector.amplitudes(), &s.factor_dims, factor_index)
}

pub(crate) fn factor_distribution(
    amps: &[Complex],
    factor_dims: &[usize],
    factor_index: usize,
) -> Result<Vec<f64>> {
    if factor_index >= factor_dims.len() {
        return Err(Error::BadFactor(format!(
            "factor {factor_index} out of range for {} factors",
            factor_dims.len()
        )));
    }
    let d = factor_dims[factor_index];
    let stride: usize = factor_dims[factor_index + 1..].iter().product();
    let outer = amps.len() / (d * stride);
    let mut p = vec![0.0f64; d];
    let mut idx = 0usize;
    for _ in 0..outer {
        for pv in p.iter_mut() {
            let mut acc = 0.0f64;
            for _ in 0..stride {
                acc += amps[idx].norm_sqr();
                idx += 1;
            }
            *pv += acc;
        }
    }
    Ok(p)
}

/// Project one factor onto each alphabet state and return the 1-based index
/// whose reduced overlap probability exceeds [`DECODE_THRESHOLD`], or
/// `None` when no state dominates.
pub fn decode_register(
    s: &CompositeState,
    factor_index: usize,
    set: &OrderedStateSet,
) -> Result<Option<usize>> {
    if classify_set(set) != SetClass::MutuallyOrthogonal {
        return Err(Error::NotOrthogonal(
            "decoding requires a mutually orthogonal alphabet".into(),
        ));
    }
    let probs = register_overlap_probs(s.vector.amplitudes(), &s.factor_dims, factor_index, set)?;
    Ok(probs
        .iter()
        .position(|&p| p > DECODE_THRESHOLD)
        .map(|k| k + 1))
}

/// Reduced overlap probability of factor `factor_index` with each alphabet
/// state: p_k = Σ_rest |⟨ψ_k ⊗ rest | s⟩|².
fn register_overlap_probs(
    amps: &[Complex],
    factor_dims: &[usize],
    factor_index: usize,
    set: &OrderedStateSet,
) -> Result<Vec<f64>> {
    if factor_index >= factor_dims.len() {
        return Err(Error::BadFactor(format!(
            "factor {factor_index} out of range for {} factors",
            factor_dims.len()
        )));
    }
    let d = factor_dims[factor_index];
    if d != set.dim() {
        return Err(Error::DimMismatch(format!(
            "factor dim {d} != alphabet dim {}",
            set.dim()
        )));
    }
    let stride: usize = factor_dims[factor_index + 1..].iter().product();
    let outer = amps.len() / (d * stride);
    let n = set.len();
    let mut probs = vec![0.0f64; n];
    let mut block = vec![Complex::new(0.0, 0.0); d];
    for o in 0..outer {
        let base_o = o * d * stride;
        for lo in 0..stride {
            let mut nonzero = false;
            for (v, b) in block.iter_mut().enumerate() {
                let a = amps[base_o + v * stride + lo];
                *b = a;
                nonzero |= a.re != 0.0 || a.im != 0.0;
            }
            if !nonzero {
                continue;
            }
            for (k, p) in probs.iter_mut().enumerate() {
                let psi = set.members()[k].amplitudes();
                let mut c = Complex::new(0.0, 0.0);
                for v in 0..d {
                    c += psi[v].conj() * block[v];
                }
                *p += c.norm_sqr();
            }
        }
    }
    Ok(probs)
}

/// Result of simulating a sorting network on a tuple of alphabet indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SortOutcome {
    /// Decoded register contents after the network, left to right.
    pub output_indices: Vec<usize>,
    /// One readout bit per stage, in stage order.
    pub flags: Vec<u8>,
    /// Norm of the final state vector (drift diagnostic; 1 up to rounding).
    pub final_norm: f64,
}

/// Result of simulating a comparator on an ordered pair of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    /// Flag readout: 1 iff the pair was in non-descending index order.
    pub flag: u8,
    /// Full flag distribution (deterministic on alphabet inputs).
    pub distribution: Vec<f64>,
}

fn read_deterministic_bit(dist: &[f64]) -> Result<u8> {
    if dist[1] > DECODE_THRESHOLD {
        Ok(1)
    } else if dist[0] > DECODE_THRESHOLD {
        Ok(0)
    } else {
        Err(Error::DecodeFailed(format!(
            "flag distribution {dist:?} is not deterministic"
        )))
    }
}

/// Simulate the comparator on |ψ_i⟩, |ψ_j⟩ and read out the flag.
pub fn run_compare(circuit: &ComparatorCircuit, i: usize, j: usize) -> Result<CompareOutcome> {
    let set = circuit.set();
    let flag = StateVector::basis(crate::synthesis::FLAG_DIM, 0);
    let input = CompositeState::product(&[&flag, set.state(i)?, set.state(j)?])?;
    let output = apply(circuit.unitary(), &input)?;
    let dist = flag_distribution(&output, 0)?;
    let bit = read_deterministic_bit(&dist)?;
    Ok(CompareOutcome {
        flag: bit,
        distribution: dist,
    })
}

/// Extend the state by one fresh flag qubit in |0⟩ as the new last factor
/// and apply `gate` to (flag, register a, register b) in one pass.
///
/// The flag becomes the stride-1 factor, so a pre-existing amplitude at
/// index i lands at 2i and the flag-1 half starts as exact zeros; blocks
/// whose gathered half is zero stay zero without being written.
fn append_flag_and_apply(
    gate: &DMatrix<Complex>,
    amps: &mut Vec<Complex>,
    dims: &mut Vec<usize>,
    reg_a: usize,
    reg_b: usize,
) -> Result<()> {
    let da = dims[reg_a];
    let db = dims[reg_b];
    let half = da * db;
    if gate.nrows() != 2 * half {
        return Err(Error::DimMismatch(format!(
            "gate dim {} != 2·{da}·{db}",
            gate.nrows()
        )));
    }
    dims.push(2);
    let n_factors = dims.len();
    let stride_of = |f: usize| -> usize { dims[f + 1..].iter().product() };
    let stride_a = stride_of(reg_a);
    let stride_b = stride_of(reg_b);

    // Gate-local order (flag, a, b) with the flag outermost: the first
    // `half` locals are the flag-0 block that gathers from the old vector.
    let mut old_offsets = vec![0usize; half];
    let mut new_offsets = vec![0usize; 2 * half];
    for va in 0..da {
        for vb in 0..db {
            let l = va * db + vb;
            old_offsets[l] = (va * stride_a + vb * stride_b) / 2;
            new_offsets[l] = va * stride_a + vb * stride_b;
            new_offsets[half + l] = va * stride_a + vb * stride_b + 1;
        }
    }

    let rest: Vec<usize> = (0..n_factors)
        .filter(|&f| f != reg_a && f != reg_b && f != n_factors - 1)
        .collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&f| dims[f]).collect();
    let rest_strides: Vec<usize> = rest.iter().map(|&f| stride_of(f)).collect();
    let rest_size: usize = rest_dims.iter().product();

    let mut next = vec![Complex::new(0.0, 0.0); amps.len() * 2];
    let gate_slice = gate.as_slice();
    let local_size = 2 * half;
    let mut x = vec![Complex::new(0.0, 0.0); local_size];
    let mut y = vec![Complex::new(0.0, 0.0); local_size];
    let mut coords = vec![0usize; rest.len()];
    let mut base = 0usize;
    for _ in 0..rest_size {
        let mut nonzero = false;
        for l in 0..half {
            let a = amps[base / 2 + old_offsets[l]];
            x[l] = a;
            nonzero |= a.re != 0.0 || a.im != 0.0;
        }
        if nonzero {
            matvec_col_major(gate_slice, local_size, &x, &mut y);
            for (l, &off) in new_offsets.iter().enumerate() {
                next[base + off] = y[l];
            }
        }
        let mut k = rest.len();
        while k > 0 {
            k -= 1;
            coords[k] += 1;
            base += rest_strides[k];
            if coords[k] < rest_dims[k] {
                break;
            }
            base -= rest_strides[k] * rest_dims[k];
            coords[k] = 0;
        }
    }
    *amps = next;
    Ok(())
}

/// One nonzero-amplitude pass shared by the sort readout: flag
/// distributions and coherent register overlaps computed from the sparse
/// support (exact — zero amplitudes contribute nothing to either).
struct SparseReadout {
    nonzeros: Vec<(usize, Complex)>,
    norm_sqr: f64,
}

impl SparseReadout {
    fn collect(amps: &[Complex]) -> Self {
        let mut nonzeros = Vec::new();
        let mut norm_sqr = 0.0f64;
        for (i, a) in amps.iter().enumerate() {
            if a.re != 0.0 || a.im != 0.0 {
                nonzeros.push((i, *a));
                norm_sqr += a.norm_sqr();
            }
        }
        Self { nonzeros, norm_sqr }
    }

    fn factor_distribution(&self, dims: &[usize], f: usize) -> Vec<f64> {
        let d = dims[f];
        let stride: usize = dims[f + 1..].iter().product();
        let mut p = vec![0.0f64; d];
        for &(idx, a) in &self.nonzeros {
            p[(idx / stride) % d] += a.norm_sqr();
        }
        p
    }

    fn register_overlap_probs(
        &self,
        dims: &[usize],
        f: usize,
        set: &OrderedStateSet,
    ) -> Vec<f64> {
        let d = dims[f];
        let stride: usize = dims[f + 1..].iter().product();
        // Group support by the index with the register coordinate removed,
        // then sum each group's projections coherently.
        let mut triples: Vec<(usize, usize, Complex)> = self
            .nonzeros
            .iter()
            .map(|&(idx, a)| {
                let v = (idx / stride) % d;
                (idx - v * stride, v, a)
            })
            .collect();
        triples.sort_unstable_by_key(|t| t.0);
        let n = set.len();
        let mut probs = vec![0.0f64; n];
        let mut c = vec![Complex::new(0.0, 0.0); n];
        let mut run_start = 0;
        while run_start < triples.len() {
            let key = triples[run_start].0;
            let mut run_end = run_start;
            while run_end < triples.len() && triples[run_end].0 == key {
                run_end += 1;
            }
            for z in c.iter_mut() {
                *z = Complex::new(0.0, 0.0);
            }
            for &(_, v, a) in &triples[run_start..run_end] {
                for (k, z) in c.iter_mut().enumerate() {
                    *z += set.members()[k].amplitudes()[v].conj() * a;
                }
            }
            for (k, p) in probs.iter_mut().enumerate() {
                *p += c[k].norm_sqr();
            }
            run_start = run_end;
        }
        probs
    }
}

/// Prepare ⊗_p |ψ_{input_p}⟩ ⊗ flags|0…0⟩, run every stage, decode every
/// register and flag.
///
/// Flag ancillas are allocated lazily — each stage's fresh |0⟩ qubit is
/// appended right before the stage fires, which is equivalent to preparing
/// all of them upfront and keeps early stages on small vectors. The final
/// factor layout is registers first, then flags in stage order.
///
/// The output indices are the sorted multiset of the inputs; a decode
/// failure signals a synthesis or circuit-file bug.
pub fn run_sort(circuit: &SorterCircuit, input_indices: &[usize]) -> Result<SortOutcome> {
    let set = circuit.set();
    let n = circuit.n_registers();
    if input_indices.len() != n {
        return Err(Error::BadIndex(format!(
            "expected {n} input indices, got {}",
            input_indices.len()
        )));
    }
    for &k in input_indices {
        set.state(k)?; // range check
    }
    let d = set.dim();
    let n_stages = circuit.stages().len();

    let mut amps: Vec<Complex> = set.state(input_indices[0])?.amplitudes().to_vec();
    for &k in &input_indices[1..] {
        let psi = set.state(k)?.amplitudes();
        let mut next = Vec::with_capacity(amps.len() * d);
        for a in &amps {
            for b in psi {
                next.push(a * b);
            }
        }
        amps = next;
    }
    let mut dims: Vec<usize> = vec![d; n];

    for stage in circuit.stages() {
        let p = stage.position; // 1-based left register
        append_flag_and_apply(stage.unitary.matrix(), &mut amps, &mut dims, p - 1, p)?;
    }
    debug_assert_eq!(dims.len(), n + n_stages);

    let readout = SparseReadout::collect(&amps);
    let mut output_indices = Vec::with_capacity(n);
    for reg in 0..n {
        let probs = readout.register_overlap_probs(&dims, reg, set);
        match probs.iter().position(|&p| p > DECODE_THRESHOLD) {
            Some(k) => output_indices.push(k + 1),
            None => {
                return Err(Error::DecodeFailed(format!(
                    "register {} overlap probabilities {probs:?} name no alphabet state",
                    reg + 1
                )))
            }
        }
    }

    let mut flags = Vec::with_capacity(n_stages);
    for s in 0..n_stages {
        let dist = readout.factor_distribution(&dims, n + s);
        flags.push(read_deterministic_bit(&dist)?);
    }

    Ok(SortOutcome {
        output_indices,
        flags,
        final_norm: readout.norm_sqr.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner_product, tensor};
    use crate::synthesis::{build_comparator, build_sorter};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn plus() -> StateVector {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![c(a, 0.0), c(a, 0.0)]).unwrap()
    }

    fn qubit_pair() -> OrderedStateSet {
        OrderedStateSet::new(vec![StateVector::basis(2, 0), StateVector::basis(2, 1)]).unwrap()
    }

    #[test]
    fn identity_apply_is_noop() {
        let s = CompositeState::product(&[&plus(), &StateVector::basis(2, 0)]).unwrap();
        let id = UnitaryMatrix::identity(4);
        let out = apply(&id, &s).unwrap();
        assert_eq!(out.vector().amplitudes(), s.vector().amplitudes());
    }

    #[test]
    fn apply_then_inverse_restores_input() {
        let set = qubit_pair();
        let circuit = build_comparator(&set).unwrap();
        let s = CompositeState::product(&[
            &StateVector::basis(2, 0),
            &plus(),
            &StateVector::basis(2, 1),
        ])
        .unwrap();
        let forward = apply(circuit.unitary(), &s).unwrap();
        let back = apply(&circuit.unitary().adjoint(), &forward).unwrap();
        for (a, b) in back.vector().amplitudes().iter().zip(s.vector().amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn apply_dim_mismatch() {
        let s = CompositeState::product(&[&plus()]).unwrap();
        let id = UnitaryMatrix::identity(4);
        assert_eq!(apply(&id, &s).unwrap_err().code(), "dim-mismatch");
    }

    #[test]
    fn flag_distribution_of_basis_and_superposition() {
        let one = StateVector::basis(2, 1);
        let s = CompositeState::product(&[&one, &plus()]).unwrap();
        let p0 = flag_distribution(&s, 0).unwrap();
        assert_eq!(p0[0], 0.0);
        assert!((p0[1] - 1.0).abs() < 1e-12);
        let p = flag_distribution(&s, 1).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flag_distribution_bad_factor() {
        let s = CompositeState::product(&[&plus()]).unwrap();
        assert_eq!(flag_distribution(&s, 1).unwrap_err().code(), "bad-factor");
    }

    #[test]
    fn embedded_apply_matches_explicit_matrix() {
        // Oracle: build the full embedded matrix entrywise from the gate and
        // a Kronecker delta on the untouched factor, then compare images.
        let set = qubit_pair();
        let gate = crate::synthesis::build_compare_swap(&set).unwrap();
        let dims = [2usize, 2, 2, 2]; // flag ⊗ spectator ⊗ reg ⊗ reg
        let factors = [0usize, 2, 3];
        let total: usize = dims.iter().product();

        let coords = |g: usize| -> [usize; 4] {
            [g >> 3 & 1, g >> 2 & 1, g >> 1 & 1, g & 1]
        };
        let local = |cs: [usize; 4]| -> usize { cs[0] << 2 | cs[2] << 1 | cs[3] };

        let mut full = DMatrix::from_element(total, total, c(0.0, 0.0));
        for g1 in 0..total {
            for g2 in 0..total {
                let c1 = coords(g1);
                let c2 = coords(g2);
                if c1[1] == c2[1] {
                    full[(g1, g2)] = gate.matrix()[(local(c1), local(c2))];
                }
            }
        }
        let full = UnitaryMatrix::new(full).unwrap();

        let s = CompositeState::product(&[
            &StateVector::basis(2, 0),
            &plus(),
            &StateVector::basis(2, 1),
            &StateVector::basis(2, 0),
        ])
        .unwrap();
        let via_embed = apply_embedded(&gate, &s, &factors).unwrap();
        let via_full = apply(&full, &s).unwrap();
        for (a, b) in via_embed
            .vector()
            .amplitudes()
            .iter()
            .zip(via_full.vector().amplitudes())
        {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn decode_register_pure_and_mixed() {
        let set = qubit_pair();
        let one = StateVector::basis(2, 1);
        let s = CompositeState::product(&[&plus(), &one]).unwrap();
        assert_eq!(decode_register(&s, 1, &set).unwrap(), Some(2));
        // The first factor is a superposition of both alphabet states.
        assert_eq!(decode_register(&s, 0, &set).unwrap(), None);
    }

    #[test]
    fn decode_register_rejects_non_orthogonal_alphabet() {
        let bad = OrderedStateSet::new(vec![StateVector::basis(2, 0), plus()]).unwrap();
        let s = CompositeState::product(&[&plus(), &plus()]).unwrap();
        assert_eq!(
            decode_register(&s, 0, &bad).unwrap_err().code(),
            "not-orthogonal"
        );
    }

    #[test]
    fn run_compare_flag_matches_order() {
        let set = qubit_pair();
        let circuit = build_comparator(&set).unwrap();
        assert_eq!(run_compare(&circuit, 1, 2).unwrap().flag, 1);
        assert_eq!(run_compare(&circuit, 2, 1).unwrap().flag, 0);
        assert_eq!(run_compare(&circuit, 1, 1).unwrap().flag, 1);
        let dist = run_compare(&circuit, 1, 2).unwrap().distribution;
        assert!((dist[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn run_sort_reverse_triple() {
        let set = OrderedStateSet::new(vec![
            StateVector::basis(3, 0),
            StateVector::basis(3, 1),
            StateVector::basis(3, 2),
        ])
        .unwrap();
        let circuit = build_sorter(&set, 3).unwrap();
        let out = run_sort(&circuit, &[3, 2, 1]).unwrap();
        assert_eq!(out.output_indices, vec![1, 2, 3]);
        assert!((out.final_norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn run_sort_sorted_input_raises_all_flags() {
        let set = OrderedStateSet::new(vec![
            StateVector::basis(3, 0),
            StateVector::basis(3, 1),
            StateVector::basis(3, 2),
        ])
        .unwrap();
        let circuit = build_sorter(&set, 3).unwrap();
        let out = run_sort(&circuit, &[1, 2, 3]).unwrap();
        assert_eq!(out.output_indices, vec![1, 2, 3]);
        assert_eq!(out.flags, vec![1, 1, 1]);
    }

    #[test]
    fn run_sort_handles_duplicates() {
        let set = qubit_pair();
        let circuit = build_sorter(&set, 3).unwrap();
        let out = run_sort(&circuit, &[2, 2, 1]).unwrap();
        assert_eq!(out.output_indices, vec![1, 2, 2]);
    }

    #[test]
    fn run_sort_rejects_bad_indices() {
        let set = qubit_pair();
        let circuit = build_sorter(&set, 2).unwrap();
        assert_eq!(run_sort(&circuit, &[1, 3]).unwrap_err().code(), "bad-index");
        assert_eq!(run_sort(&circuit, &[1]).unwrap_err().code(), "bad-index");
    }

    #[test]
    fn composite_product_norm_and_overlap() {
        let a = plus();
        let b = StateVector::basis(2, 1);
        let s = CompositeState::product(&[&a, &b]).unwrap();
        let direct = tensor(&a, &b);
        assert_eq!(s.vector().amplitudes(), direct.amplitudes());
        let ip = inner_product(s.vector(), &direct).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-12);
    }
}
