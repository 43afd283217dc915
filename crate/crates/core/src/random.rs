//! Random instance generators for tests and the verification suite.

use faer::c64;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure, Result};
use crate::linalg::{self, c, CMat};
use crate::model::{DiagonalDissipator, Hamiltonian, JumpOperator, JumpOperatorSet, Lindbladian};
use crate::pauli::{Pauli, PauliString};
use crate::superop::SuperOperator;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    c(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform subset of `{0, ..., n-1}` of the given size, sorted.
pub fn random_support<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Vec<usize> {
    let mut s = index::sample(rng, n, size).into_vec();
    s.sort_unstable();
    s
}

/// All non-identity strings supported inside `support`.
pub fn paulis_on(n: usize, support: &[usize]) -> Result<Vec<PauliString>> {
    let mut out = Vec::new();
    for code in 1..1usize << (2 * support.len()) {
        let mut letters = vec![Pauli::I; n];
        for (slot, &q) in support.iter().enumerate() {
            letters[q] = match (code >> (2 * slot)) & 3 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
        }
        out.push(PauliString::from_letters(&letters)?);
    }
    Ok(out)
}

/// Non-identity string of weight between 1 and `max_weight`.
pub fn random_local_pauli<R: Rng + ?Sized>(n: usize, max_weight: usize, rng: &mut R) -> Result<PauliString> {
    ensure!(max_weight >= 1, Domain, "weight bound must be at least 1");
    let w = rng.random_range(1..=max_weight.min(n));
    let support = random_support(n, w, rng);
    let mut letters = vec![Pauli::I; n];
    for q in support {
        letters[q] = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
    }
    PauliString::from_letters(&letters)
}

/// Up to `num_jumps` jumps with supports of size at most `k_max`, keeping
/// every qubit in at most `degree_max` supports. Each jump gets an
/// independent standard complex Gaussian coefficient on every string inside
/// its support and is rescaled to unit operator norm.
pub fn random_jump_set<R: Rng + ?Sized>(
    n: usize,
    k_max: usize,
    degree_max: usize,
    num_jumps: usize,
    rng: &mut R,
) -> Result<JumpOperatorSet> {
    ensure!(k_max >= 1 && degree_max >= 1, Domain, "locality and degree bounds must be at least 1");
    let mut counts = vec![0usize; n];
    let mut jumps = Vec::new();
    for _ in 0..num_jumps {
        let mut chosen = None;
        for _ in 0..64 {
            let size = rng.random_range(1..=k_max.min(n));
            let support = random_support(n, size, rng);
            if support.iter().all(|&q| counts[q] < degree_max) {
                chosen = Some(support);
                break;
            }
        }
        let Some(support) = chosen else { break };
        for &q in &support {
            counts[q] += 1;
        }
        let terms: Vec<(PauliString, c64)> = paulis_on(n, &support)?
            .into_iter()
            .map(|p| (p, complex_gaussian(rng)))
            .collect();
        let raw = JumpOperator::new(n, Some(support.clone()), terms.iter().copied())?;
        let norm = linalg::op_norm(&raw.matrix()?)?;
        let scaled = terms.into_iter().map(|(p, g)| (p, g / norm));
        jumps.push(JumpOperator::new(n, Some(support), scaled)?);
    }
    JumpOperatorSet::new(n, jumps)
}

/// `num_terms` local terms with standard normal coefficients.
pub fn random_hamiltonian<R: Rng + ?Sized>(n: usize, k_max: usize, num_terms: usize, rng: &mut R) -> Result<Hamiltonian> {
    let terms = (0..num_terms)
        .map(|_| Ok((random_local_pauli(n, k_max, rng)?, normal(rng))))
        .collect::<Result<Vec<_>>>()?;
    Hamiltonian::new(n, terms)
}

/// Hamiltonian with up to three terms plus one to three jumps.
pub fn random_lindbladian<R: Rng + ?Sized>(n: usize, k_max: usize, degree_max: usize, rng: &mut R) -> Result<Lindbladian> {
    let h_terms = rng.random_range(0..=3);
    let h = random_hamiltonian(n, k_max, h_terms, rng)?;
    let jumps = rng.random_range(1..=3);
    let js = random_jump_set(n, k_max, degree_max, jumps, rng)?;
    Lindbladian::new(h, js)
}

/// Rates uniform in `(0, 1]` on `num_terms` random strings of weight at
/// most `max_weight`.
pub fn random_diagonal_dissipator<R: Rng + ?Sized>(
    n: usize,
    max_weight: usize,
    num_terms: usize,
    rng: &mut R,
) -> Result<DiagonalDissipator> {
    let entries = (0..num_terms)
        .map(|_| Ok((random_local_pauli(n, max_weight, rng)?, 1.0 - rng.random::<f64>())))
        .collect::<Result<Vec<_>>>()?;
    DiagonalDissipator::new(n, entries)
}

/// Real transfer matrix with standard normal entries.
pub fn random_hp_superoperator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SuperOperator> {
    let size = 1usize << (2 * n);
    let mat = CMat::from_fn(size, size, |_, _| c(normal(rng), 0.0));
    SuperOperator::from_matrix(n, mat)
}

/// `V J V^{-1}` with a Jordan block of size two or three and the rest of the
/// spectrum in the closed left half-plane.
pub fn random_defective_generator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SuperOperator> {
    let size = 1usize << (2 * n);
    let block = rng.random_range(2..=3usize).min(size);
    let mut j = linalg::zeros(size);
    let shared = c(-rng.random_range(0.0..2.0), rng.random_range(-1.0..1.0));
    for i in 0..size {
        j[(i, i)] = if i < block {
            shared
        } else {
            c(-rng.random_range(0.0..2.0), rng.random_range(-1.0..1.0))
        };
        if i + 1 < block {
            j[(i, i + 1)] = c(1.0, 0.0);
        }
    }
    // Identity plus a small perturbation keeps V comfortably invertible.
    let v = CMat::from_fn(size, size, |r, s| {
        let diag = if r == s { 1.0 } else { 0.0 };
        c(diag, 0.0) + complex_gaussian(rng) * (0.3 / (size as f64).sqrt())
    });
    let vinv = linalg::inverse(&v)?;
    SuperOperator::from_matrix(n, &(&v * &j) * &vinv)
}
