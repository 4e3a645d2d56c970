//! Shared helpers for integration tests: seeded randomness and independent
//! oracles. Everything here deliberately avoids the library's own
//! completion/feasibility code paths so the tests stay two-sided.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qorder::linalg::{Complex, StateVector};
use qorder::ordering::OrderedStateSet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Random normalized state with complex Gaussian-ish amplitudes.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
    loop {
        let amps: Vec<Complex> = (0..dim)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return StateVector::new(amps.into_iter().map(|a| a / norm).collect()).unwrap();
        }
    }
}

/// Construct-by-rotation oracle: a product of random complex Givens
/// rotations and a random diagonal phase. Exactly unitary up to rounding,
/// with no Gram–Schmidt involved.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex> {
    let mut m = DMatrix::<Complex>::identity(dim, dim);
    for k in 0..dim {
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = c(phase.cos(), phase.sin());
        for r in 0..dim {
            m[(r, k)] *= z;
        }
    }
    let rotations = 10.max(2 * dim * dim);
    for _ in 0..rotations {
        if dim < 2 {
            break;
        }
        let p = rng.gen_range(0..dim);
        let mut q = rng.gen_range(0..dim);
        while q == p {
            q = rng.gen_range(0..dim);
        }
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let (s, co) = theta.sin_cos();
        let e = c(phi.cos(), phi.sin());
        // Rows p and q of m <- G·m with G the Givens block [[c, -e*s], [conj(e)*s, c]].
        for col in 0..dim {
            let a = m[(p, col)];
            let b = m[(q, col)];
            m[(p, col)] = a * co - b * e * s;
            m[(q, col)] = a * e.conj() * s + b * co;
        }
    }
    m
}

/// First n columns of a random unitary, as states.
pub fn random_orthonormal_set(dim: usize, n: usize, rng: &mut ChaCha8Rng) -> OrderedStateSet {
    assert!(n <= dim);
    let u = random_unitary(dim, rng);
    let members = (0..n)
        .map(|k| StateVector::new(u.column(k).iter().copied().collect()).unwrap())
        .collect();
    OrderedStateSet::new(members).unwrap()
}

/// A pair with overlap modulus exactly `target` (up to rounding), built from
/// a random state and a random orthogonal completion of it.
pub fn pair_with_overlap(dim: usize, target: f64, rng: &mut ChaCha8Rng) -> (StateVector, StateVector) {
    assert!(dim >= 2);
    let a = random_state(dim, rng);
    let av = DVector::from_column_slice(a.amplitudes());
    // Random direction orthogonal to a.
    let perp = loop {
        let r = random_state(dim, rng);
        let rv = DVector::from_column_slice(r.amplitudes());
        let proj = av.dotc(&rv);
        let rem = &rv - &av * proj;
        let norm = rem.norm();
        if norm > 1e-6 {
            break rem / c(norm, 0.0);
        }
    };
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let z = c(phase.cos(), phase.sin());
    let bv = &av * (z * c(target, 0.0)) + &perp * c((1.0 - target * target).sqrt(), 0.0);
    let b = StateVector::new(bv.iter().copied().collect()).unwrap();
    (a, b)
}

/// Apply a raw unitary to a state.
pub fn rotate_state(u: &DMatrix<Complex>, s: &StateVector) -> StateVector {
    let v = u * DVector::from_column_slice(s.amplitudes());
    let norm = v.norm();
    StateVector::new(v.iter().map(|a| a / norm).collect()).unwrap()
}

/// Orthogonal-Procrustes oracle: the smallest achievable Σ‖W·in_k − out_k‖²
/// over unitaries W.
///
/// With M = Σ out_k·in_k† and singular values σ_i, the optimal W = U·V†
/// attains Re tr(W†M) = Σσ_i, so the minimum is 2·n_pairs − 2·Σσ_i since
/// all states are normalized. The σ_i come from the Hermitian eigenvalues
/// of M†M, which stays accurate for the rank-deficient M small pair counts
/// produce.
pub fn procrustes_residual(pairs: &[(StateVector, StateVector)]) -> f64 {
    let dim = pairs[0].0.dim();
    let mut m = DMatrix::<Complex>::zeros(dim, dim);
    for (input, output) in pairs {
        let iv = DVector::from_column_slice(input.amplitudes());
        let ov = DVector::from_column_slice(output.amplitudes());
        m += ov * iv.adjoint();
    }
    let gram = m.adjoint() * &m;
    let eig = gram.symmetric_eigen();
    let nuclear: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum();
    (2.0 * pairs.len() as f64 - 2.0 * nuclear).max(0.0)
}

/// Max-entry deviation of M†M from the identity, without the library's
/// `is_unitary`.
pub fn unitarity_defect(m: &DMatrix<Complex>) -> f64 {
    let g = m.adjoint() * m;
    let n = m.nrows();
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let t = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
            max = max.max((g[(i, j)] - t).norm());
        }
    }
    max
}
