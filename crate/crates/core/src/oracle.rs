//! Brute-force checks of the inequalities behind the detector, run over
//! random instances.
//!
//! Every check draws its instances from per-instance seeds derived from one
//! master seed. A failure records the instance seed, and [`replay`] re-runs
//! that single instance.

use std::fmt;

use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::linalg::{self, c, CMat};
use crate::model::{self, DiagonalDissipator, JumpOperatorSet, Lindbladian};
use crate::par;
use crate::pauli::enumerate_all;
use crate::random;
use crate::superop::{self, SuperOperator};
use crate::twirl;

/// One violated comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub instances: usize,
    pub comparisons: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
    pub passed: bool,
    /// Smallest `rhs - lhs` over all comparisons.
    pub min_margin: Option<f64>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let margin = self.min_margin.map_or("n/a".to_string(), |m| format!("{m:.3e}"));
        write!(
            f,
            "{:<18} {} instances={} comparisons={} skipped={} failures={} min_margin={}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.instances,
            self.comparisons,
            self.skipped,
            self.failures.len(),
            margin
        )
    }
}

/// `lhs <= rhs` up to `tol`.
#[derive(Clone, Debug)]
struct Comparison {
    lhs: f64,
    rhs: f64,
    tol: f64,
    detail: String,
}

impl Comparison {
    fn le(lhs: f64, rhs: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self { lhs, rhs, tol, detail: detail.into() }
    }
}

enum Outcome {
    Skipped,
    Compared(Vec<Comparison>),
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of instance `i` of a check run from `seed`.
pub fn instance_seed(seed: u64, i: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ i.wrapping_mul(GOLDEN))
}

fn collect(name: &str, seeds: &[u64], outcomes: Vec<Result<Outcome>>) -> CheckResult {
    let mut result = CheckResult {
        name: name.to_string(),
        instances: seeds.len(),
        comparisons: 0,
        skipped: 0,
        failures: Vec::new(),
        passed: true,
        min_margin: None,
    };
    for (&seed, outcome) in seeds.iter().zip(outcomes) {
        match outcome {
            Ok(Outcome::Skipped) => result.skipped += 1,
            Ok(Outcome::Compared(cmps)) => {
                for cmp in cmps {
                    result.comparisons += 1;
                    let margin = cmp.rhs - cmp.lhs;
                    result.min_margin = Some(result.min_margin.map_or(margin, |m: f64| m.min(margin)));
                    if margin.is_nan() || margin < -cmp.tol {
                        result.failures.push(Failure { seed, lhs: cmp.lhs, rhs: cmp.rhs, margin, detail: cmp.detail });
                    }
                }
            }
            Err(e) => result.failures.push(Failure {
                seed,
                lhs: f64::NAN,
                rhs: f64::NAN,
                margin: f64::NAN,
                detail: format!("instance raised an error: {e}"),
            }),
        }
    }
    result.passed = result.failures.is_empty();
    result
}

fn run_trials<F>(name: &str, trials: usize, seed: u64, instance: F) -> CheckResult
where
    F: Fn(u64) -> Result<Outcome> + Sync + Send,
{
    let seeds: Vec<u64> = (0..trials as u64).map(|i| instance_seed(seed, i)).collect();
    let outcomes = par::map_range(0..trials, |i| instance(seeds[i]));
    collect(name, &seeds, outcomes)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Jordan trace identity.

const JORDAN_TIMES: [f64; 3] = [0.1, 1.0, 5.0];

fn jordan_instance(seed: u64, n_max: usize) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=n_max);
    let (generator, kind) = if rng.random_bool(1.0 / 3.0) {
        (random::random_defective_generator(n, &mut rng)?, "defective")
    } else {
        let l = random::random_lindbladian(n, n.min(2), 2, &mut rng)?;
        (SuperOperator::from_lindbladian(&l)?, "lindbladian")
    };
    Ok(Outcome::Compared(jordan_comparisons(&generator, kind)?))
}

fn jordan_comparisons(generator: &SuperOperator, kind: &str) -> Result<Vec<Comparison>> {
    let eigs = generator.eigenvalues()?;
    let d2 = generator.size() as f64;
    let mut out = Vec::new();
    for t in JORDAN_TIMES {
        let lhs = generator.exp(t)?.trace();
        let rhs: c64 = eigs.iter().map(|z| (*z * t).exp()).sum();
        out.push(Comparison::le(
            (lhs - rhs).norm(),
            0.0,
            1e-8 * d2,
            format!("{kind} generator, n={}, t={t}", generator.num_qubits()),
        ));
    }
    Ok(out)
}

/// `Tr exp(tS) = sum_a exp(t eta_a)` over the spectrum, on random generators
/// that include non-diagonalizable ones.
pub fn check_jordan_trace(trials: usize, n_max: usize, seed: u64) -> Result<CheckResult> {
    ensure!((1..=3).contains(&n_max), Domain, "n_max must be between 1 and 3, got {n_max}");
    Ok(run_trials("jordan_trace", trials, seed, |s| jordan_instance(s, n_max)))
}

// Decay primitive.

/// Decay fraction `Lambda(S, epsilon)` and the empirical frequency of
/// `I(t) <= 1 - 2 Lambda / 3` over `samples` draws of `t ~ U[0, 2/epsilon]`.
pub fn decay_frequency<R: Rng + ?Sized>(
    generator: &SuperOperator,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    ensure!(epsilon > 0.0 && epsilon.is_finite(), Domain, "epsilon must be positive, got {epsilon}");
    ensure!(samples >= 1, Domain, "at least one sample is needed");
    let lambda = generator.lambda_fraction(epsilon)?;
    let threshold = 1.0 - 2.0 * lambda / 3.0;
    let mut hits = 0usize;
    for _ in 0..samples {
        let t = rng.random_range(0.0..=2.0 / epsilon);
        if generator.exp(t)?.identity_fraction()? <= threshold {
            hits += 1;
        }
    }
    Ok((lambda, hits as f64 / samples as f64))
}

fn decay_comparison(generator: &SuperOperator, epsilon: f64, samples: usize, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let (lambda, freq) = decay_frequency(generator, epsilon, samples, &mut rng)?;
    if lambda == 0.0 {
        return Ok(Outcome::Skipped);
    }
    let floor = 0.4 - 3.0 * (0.24 / samples as f64).sqrt();
    Ok(Outcome::Compared(vec![Comparison::le(
        floor,
        freq,
        0.0,
        format!("epsilon={epsilon}, Lambda={lambda}, samples={samples}"),
    )]))
}

/// Single-instance frequency check for a given model. Skipped when no mode
/// decays at rate `epsilon`.
pub fn check_decay_primitive(l: &Lindbladian, epsilon: f64, t_samples: usize, seed: u64) -> Result<CheckResult> {
    let generator = SuperOperator::from_lindbladian(l)?;
    let outcome = decay_comparison(&generator, epsilon, t_samples, seed);
    Ok(collect("decay_primitive", &[seed], vec![outcome]))
}

const DECAY_SAMPLES: usize = 400;

fn decay_instance(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=2);
    let l = random::random_lindbladian(n, n, 2, &mut rng)?;
    let generator = SuperOperator::from_lindbladian(&l)?;
    let rates: Vec<f64> = generator
        .eigenvalues()?
        .iter()
        .map(|z| -z.re)
        .filter(|r| *r > 1e-9)
        .collect();
    if rates.is_empty() {
        return Ok(Outcome::Skipped);
    }
    let epsilon = rates[rng.random_range(0..rates.len())];
    decay_comparison(&generator, epsilon, DECAY_SAMPLES, rng.random())
}

/// [`check_decay_primitive`] on random models, with `epsilon` set to one of
/// the model's own decay rates.
pub fn check_decay_suite(trials: usize, seed: u64) -> CheckResult {
    run_trials("decay_primitive", trials, seed, decay_instance)
}

// Pauli-diagonal decay bound.

const DIAG_RADII: [f64; 3] = [0.25, 0.5, 0.75];

fn diag_bound_comparisons(d: &DiagonalDissipator) -> Vec<Comparison> {
    let norm = model::diagonal_frobenius(d);
    if norm == 0.0 {
        return Vec::new();
    }
    let k = d.max_weight();
    let rates: Vec<c64> = enumerate_all(d.num_qubits())
        .expect("dissipator size already validated")
        .iter()
        .map(|q| c(model::diagonal_eigenvalue_unchecked(d, q), 0.0))
        .collect();
    DIAG_RADII
        .iter()
        .map(|&r| {
            let lambda = superop::lambda_fraction_of(&rates, r * norm);
            let bound = (1.0 - r * r).powi(2) / 9f64.powi(k as i32);
            Comparison::le(bound, lambda, 1e-12, format!("n={}, k={k}, r={r}", d.num_qubits()))
        })
        .collect()
}

fn diag_bound_instance(seed: u64, n_max: usize, k_max: usize) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=n_max);
    let terms = rng.random_range(1..=6);
    let d = random::random_diagonal_dissipator(n, k_max.min(n), terms, &mut rng)?;
    let cmps = diag_bound_comparisons(&d);
    Ok(if cmps.is_empty() { Outcome::Skipped } else { Outcome::Compared(cmps) })
}

/// `Lambda(D, r ||D||_F) >= (1 - r^2)^2 9^-k` by enumeration of all `4^n`
/// modes, `k` being the largest weight present.
pub fn check_pauli_diag_bound(trials: usize, n_max: usize, k_max: usize, seed: u64) -> Result<CheckResult> {
    ensure!((1..=3).contains(&n_max), Domain, "n_max must be between 1 and 3, got {n_max}");
    ensure!(k_max >= 1, Domain, "k_max must be at least 1");
    Ok(run_trials("pauli_diag_bound", trials, seed, |s| diag_bound_instance(s, n_max, k_max)))
}

/// The bound for one dissipator, outside the random driver.
pub fn check_pauli_diag_bound_on(d: &DiagonalDissipator) -> CheckResult {
    let cmps = diag_bound_comparisons(d);
    let outcome = if cmps.is_empty() { Outcome::Skipped } else { Outcome::Compared(cmps) };
    collect("pauli_diag_bound", &[0], vec![Ok(outcome)])
}

// Twirl structure.

fn max_diff(a: &SuperOperator, b: &SuperOperator) -> f64 {
    linalg::max_abs_diff(a.matrix(), b.matrix())
}

fn twirl_structure_instance(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=2);
    let l = random::random_lindbladian(n, n, 2, &mut rng)?;
    let averaged = twirl::twirl_average(&SuperOperator::from_lindbladian(&l)?)?;
    let diagonal = SuperOperator::from_diagonal(&model::twirled_generator(&l))?;
    Ok(Outcome::Compared(vec![Comparison::le(
        max_diff(&averaged, &diagonal),
        0.0,
        1e-10,
        format!("n={n}, jumps={}", l.dissipator().len()),
    )]))
}

/// The brute-force twirl of a random generator equals the diagonal
/// dissipator built from `alpha_P = sum_a |gamma_{a,P}|^2`.
pub fn check_twirl_structure(trials: usize, seed: u64) -> CheckResult {
    run_trials("twirl_structure", trials, seed, twirl_structure_instance)
}

fn twirl_projection_instance(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=2);
    let s = random::random_hp_superoperator(n, &mut rng)?;
    let diff = max_diff(&twirl::twirl_exact(&s), &twirl::twirl_average(&s)?);
    Ok(Outcome::Compared(vec![Comparison::le(diff, 0.0, 1e-10, format!("n={n}"))]))
}

/// Diagonal projection against the explicit average over conjugations, on
/// random Hermiticity-preserving superoperators.
pub fn check_twirl_projection(trials: usize, seed: u64) -> CheckResult {
    run_trials("twirl_projection", trials, seed, twirl_projection_instance)
}

// Alpha matrix structure.

fn sparsity_bound(k: usize, degree: usize) -> f64 {
    (4.0 * degree as f64).powi(k as i32)
}

fn alpha_comparisons(js: &JumpOperatorSet) -> Result<Vec<Comparison>> {
    let (k, degree) = model::derive_locality_degree(js);
    let alpha = model::alpha_matrix(js);
    let (_, dense) = alpha.dense();
    let scale = linalg::max_abs(&dense);
    let min_eig = linalg::hermitian_eigenvalues(&dense)?.first().copied().unwrap_or(0.0);
    let s = sparsity_bound(k, degree);
    let frob = alpha.frobenius_sq();
    let diag = alpha.diagonal_sq();
    let tag = format!("n={}, k={k}, degree={degree}", js.num_qubits());
    Ok(vec![
        Comparison::le(-min_eig, 0.0, superop::structural_tol(scale), format!("alpha positivity, {tag}")),
        Comparison::le(alpha.max_row_sparsity() as f64, s, 0.0, format!("alpha row sparsity, {tag}")),
        Comparison::le(frob, (s + 1.0) * diag, 1e-10 * frob.max(1.0), format!("alpha mass on diagonal, {tag}")),
    ])
}

/// Gram matrix of `size` random vectors in `C^dim`, each with one to three
/// non-zero coordinates, together with the exact structural sparsity.
fn sparse_gram<R: Rng + ?Sized>(size: usize, dim: usize, rng: &mut R) -> (CMat, usize) {
    let vectors: Vec<Vec<(usize, c64)>> = (0..size)
        .map(|_| {
            let nnz = rng.random_range(1..=3);
            random::random_support(dim, nnz, rng)
                .into_iter()
                .map(|i| (i, random::complex_gaussian(rng)))
                .collect()
        })
        .collect();
    let mut gram = linalg::zeros(size);
    let mut sparsity = 0;
    for i in 0..size {
        let mut row = 0;
        for j in 0..size {
            let mut overlap = false;
            let mut v = c(0.0, 0.0);
            for (a, va) in &vectors[i] {
                for (b, vb) in &vectors[j] {
                    if a == b {
                        overlap = true;
                        v += va.conj() * vb;
                    }
                }
            }
            gram[(i, j)] = v;
            if overlap && i != j {
                row += 1;
            }
        }
        sparsity = sparsity.max(row);
    }
    (gram, sparsity)
}

fn gram_comparison(gram: &CMat, sparsity: usize) -> Comparison {
    let size = gram.nrows();
    let frob = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .map(|(i, j)| gram[(i, j)].norm_sqr())
        .sum::<f64>();
    let diag = (0..size).map(|i| gram[(i, i)].norm_sqr()).sum::<f64>();
    Comparison::le(
        frob,
        (sparsity as f64 + 1.0) * diag,
        1e-10 * frob.max(1.0),
        format!("synthetic {size}x{size} Gram matrix, S={sparsity}"),
    )
}

fn alpha_instance(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=4);
    let k_max = rng.random_range(1..=n.min(2));
    let degree_max = rng.random_range(1..=2);
    let jumps = rng.random_range(1..=4);
    let js = random::random_jump_set(n, k_max, degree_max, jumps, &mut rng)?;
    let mut cmps = alpha_comparisons(&js)?;
    let size = rng.random_range(4..=16);
    let (gram, sparsity) = sparse_gram(size, 12, &mut rng);
    cmps.push(gram_comparison(&gram, sparsity));
    Ok(Outcome::Compared(cmps))
}

/// Positivity, row sparsity and diagonal dominance in Frobenius mass of the
/// coefficient matrix `alpha`, plus the abstract sparse inequality on
/// synthetic Gram matrices.
pub fn check_alpha_structure(trials: usize, seed: u64) -> CheckResult {
    run_trials("alpha_structure", trials, seed, alpha_instance)
}

/// The same comparisons for a single jump set.
pub fn check_alpha_structure_on(js: &JumpOperatorSet) -> Result<CheckResult> {
    let outcome = alpha_comparisons(js).map(Outcome::Compared);
    Ok(collect("alpha_structure", &[0], vec![outcome]))
}

// Norm comparison.

fn norm_comparisons(js: &JumpOperatorSet) -> Result<Vec<Comparison>> {
    let (k, degree) = model::derive_locality_degree(js);
    let dissipator = SuperOperator::from_lindbladian(&Lindbladian::dissipative(js.clone())?)?;
    let twirled = twirl::twirl_exact(&dissipator);
    let d_norm = dissipator.frobenius_normalized();
    let t_norm = twirled.frobenius_normalized();
    let diag = model::alpha_matrix(js).diagonal_sq();
    let factor = 2.0 * (sparsity_bound(k, degree) + 1.0);
    let tag = format!("n={}, k={k}, degree={degree}, jumps={}", js.num_qubits(), js.len());
    Ok(vec![
        Comparison::le(d_norm, factor * t_norm, 1e-9, format!("dissipator vs twirl Frobenius, {tag}")),
        Comparison::le(diag, t_norm * t_norm, 1e-9, format!("diagonal alpha mass vs twirl Frobenius, {tag}")),
    ])
}

fn norm_instance(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=3);
    let jumps = rng.random_range(1..=3);
    let js = random::random_jump_set(n, n.min(2), 2, jumps, &mut rng)?;
    Ok(Outcome::Compared(norm_comparisons(&js)?))
}

/// `||D||_F <= 2((4 Delta)^k + 1) ||T(D)||_F` and
/// `sum_{P != I} |alpha_PP|^2 <= ||T(D)||_F^2` with dense norms.
pub fn check_norm_comparison(trials: usize, seed: u64) -> CheckResult {
    run_trials("norm_comparison", trials, seed, norm_instance)
}

/// The same comparisons for a single jump set.
pub fn check_norm_comparison_on(js: &JumpOperatorSet) -> Result<CheckResult> {
    let outcome = norm_comparisons(js).map(Outcome::Compared);
    Ok(collect("norm_comparison", &[0], vec![outcome]))
}

// Trotter bounds.

pub const TROTTER_TIMES: [f64; 3] = [0.01, 0.1, 0.5];
pub const TROTTER_STEPS: [u64; 3] = [1, 4, 16];

fn trotter_comparisons(l: &Lindbladian) -> Result<Vec<Comparison>> {
    let generator = SuperOperator::from_lindbladian(l)?;
    let twirled_generator = twirl::twirled_generator_matrix(l)?;
    let mut out = Vec::new();
    for t in TROTTER_TIMES {
        let exact = twirled_generator.exp(t)?;
        let i_exact = exact.identity_fraction()?;
        for m in TROTTER_STEPS {
            let tau = t / m as f64;
            let trotter = twirl::trotterized_twirled_of(&generator, tau, m)?;
            let bound = twirl::trotter_error_bound_of(&generator, tau, m)?;
            let lower = trotter.sub(&exact)?.diamond_bounds()?.lower;
            let gap = (trotter.identity_fraction()? - i_exact).abs();
            let tag = format!("n={}, t={t}, m={m}", l.num_qubits());
            out.push(Comparison::le(lower, bound, 1e-12, format!("Trotter distance, {tag}")));
            out.push(Comparison::le(gap, 0.5 * bound, 1e-12, format!("identity fraction gap, {tag}")));
            out.push(Comparison::le(gap, 0.5 * lower, 1e-12, format!("identity fraction gap vs Choi distance, {tag}")));
        }
    }
    Ok(out)
}

fn trotter_instance(seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let n = rng.random_range(1..=2);
    let l = random::random_lindbladian(n, n, 2, &mut rng)?;
    Ok(Outcome::Compared(trotter_comparisons(&l)?))
}

/// Distance between the Trotterized twirled channel and the exact twirled
/// evolution against [`twirl::trotter_error_bound`], and the identity
/// fraction gap against half of it.
pub fn check_trotter_bounds(trials: usize, seed: u64) -> CheckResult {
    run_trials("trotter_bounds", trials, seed, trotter_instance)
}

/// The same comparisons for a single model.
pub fn check_trotter_bounds_on(l: &Lindbladian) -> Result<CheckResult> {
    ensure!(l.num_qubits() <= 2, Capacity, "Trotter checks run on at most 2 qubits");
    let outcome = trotter_comparisons(l).map(Outcome::Compared);
    Ok(collect("trotter_bounds", &[0], vec![outcome]))
}

// Suite driver.

pub const CHECK_NAMES: [&str; 8] = [
    "jordan_trace",
    "decay_primitive",
    "pauli_diag_bound",
    "twirl_structure",
    "twirl_projection",
    "alpha_structure",
    "norm_comparison",
    "trotter_bounds",
];

fn run_named(name: &str, trials: usize, seed: u64) -> Result<CheckResult> {
    match name {
        "jordan_trace" => check_jordan_trace(trials, 3, seed),
        "decay_primitive" => Ok(check_decay_suite(trials, seed)),
        "pauli_diag_bound" => check_pauli_diag_bound(trials, 3, 2, seed),
        "twirl_structure" => Ok(check_twirl_structure(trials, seed)),
        "twirl_projection" => Ok(check_twirl_projection(trials, seed)),
        "alpha_structure" => Ok(check_alpha_structure(trials, seed)),
        "norm_comparison" => Ok(check_norm_comparison(trials, seed)),
        "trotter_bounds" => Ok(check_trotter_bounds(trials, seed)),
        other => Err(Error::Domain(format!(
            "unknown check {other:?}; expected one of {} or all",
            CHECK_NAMES.join(", ")
        ))),
    }
}

/// Runs one named check, or every check for `"all"`. Each check derives its
/// instances from `seed` mixed with its position in [`CHECK_NAMES`].
pub fn run_suite(suite: &str, trials: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let names: Vec<&str> = if suite == "all" { CHECK_NAMES.to_vec() } else { vec![suite] };
    names
        .into_iter()
        .map(|name| {
            let position = CHECK_NAMES.iter().position(|n| *n == name).unwrap_or(0) as u64;
            run_named(name, trials, splitmix64(seed ^ position))
        })
        .collect()
}

/// Re-runs one instance of a named check from its recorded seed.
pub fn replay(name: &str, instance_seed: u64) -> Result<CheckResult> {
    let outcome = match name {
        "jordan_trace" => jordan_instance(instance_seed, 3),
        "decay_primitive" => decay_instance(instance_seed),
        "pauli_diag_bound" => diag_bound_instance(instance_seed, 3, 2),
        "twirl_structure" => twirl_structure_instance(instance_seed),
        "twirl_projection" => twirl_projection_instance(instance_seed),
        "alpha_structure" => alpha_instance(instance_seed),
        "norm_comparison" => norm_instance(instance_seed),
        "trotter_bounds" => trotter_instance(instance_seed),
        other => return Err(Error::Domain(format!("unknown check {other:?}"))),
    };
    Ok(collect(name, &[instance_seed], vec![outcome]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Hamiltonian, JumpOperator};
    use crate::pauli::PauliString;
    use approx::assert_relative_eq;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn dephasing(rate: f64) -> Lindbladian {
        DiagonalDissipator::new(1, [(p("Z"), rate)]).unwrap().to_lindbladian().unwrap()
    }

    #[test]
    fn test_jordan_trace_dephasing() {
        let g = SuperOperator::from_lindbladian(&dephasing(1.0)).unwrap();
        let tr = g.exp(1.0).unwrap().trace();
        assert_relative_eq!(tr.re, 2.0 + 2.0 * (-2.0f64).exp(), epsilon = 1e-12);
        let cmps = jordan_comparisons(&g, "dephasing").unwrap();
        assert!(cmps.iter().all(|c| c.lhs < 1e-12));
    }

    #[test]
    fn test_jordan_trace_zero_generator() {
        let g = SuperOperator::zero(2).unwrap();
        assert_relative_eq!(g.exp(5.0).unwrap().trace().re, 16.0);
        assert!(jordan_comparisons(&g, "zero").unwrap().iter().all(|c| c.lhs == 0.0));
    }

    #[test]
    fn test_decay_primitive_dephasing() {
        let g = SuperOperator::from_lindbladian(&dephasing(1.0)).unwrap();
        let mut rng = rng_for(11);
        let (lambda, freq) = decay_frequency(&g, 1.0, 4000, &mut rng).unwrap();
        assert_eq!(lambda, 0.5);
        let expected = 1.0 - 3f64.ln() / 4.0;
        let sigma = (expected * (1.0 - expected) / 4000.0).sqrt();
        assert!((freq - expected).abs() < 4.0 * sigma, "{freq} vs {expected}");
    }

    #[test]
    fn test_decay_primitive_skips_hamiltonians() {
        let h = Hamiltonian::new(1, [(p("Z"), 1.0)]).unwrap();
        let l = Lindbladian::hamiltonian_only(h).unwrap();
        let r = check_decay_primitive(&l, 1.0, 10, 1).unwrap();
        assert_eq!(r.skipped, 1);
        assert!(r.passed);
    }

    #[test]
    fn test_diag_bound_single_z() {
        let d = DiagonalDissipator::new(1, [(p("Z"), 1.0)]).unwrap();
        let cmps = diag_bound_comparisons(&d);
        assert_eq!(cmps.len(), 3);
        // r = 0.5: threshold 0.5 sqrt(2), X and Y decay at rate 2.
        assert_eq!(cmps[1].rhs, 0.5);
        assert_relative_eq!(cmps[1].lhs, 0.5625 / 9.0);
        assert!(check_pauli_diag_bound_on(&DiagonalDissipator::empty(2).unwrap()).skipped == 1);
    }

    #[test]
    fn test_alpha_structure_x_plus_iy() {
        let j = JumpOperator::new(1, None, [(p("X"), c(1.0, 0.0)), (p("Y"), c(0.0, 1.0))]).unwrap();
        let js = JumpOperatorSet::new(1, vec![j]).unwrap();
        let alpha = model::alpha_matrix(&js);
        assert_relative_eq!(alpha.frobenius_sq(), 4.0);
        assert_relative_eq!(alpha.diagonal_sq(), 2.0);
        let r = check_alpha_structure_on(&js).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn test_sparse_gram_sparsity_is_structural() {
        let mut rng = rng_for(5);
        for _ in 0..20 {
            let (g, s) = sparse_gram(8, 12, &mut rng);
            assert!(s < 8);
            let cmp = gram_comparison(&g, s);
            assert!(cmp.lhs <= cmp.rhs + cmp.tol);
        }
    }

    #[test]
    fn test_norm_comparison_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let j = JumpOperator::new(1, None, [(p("X"), c(h, 0.0)), (p("Z"), c(h, 0.0))]).unwrap();
        let js = JumpOperatorSet::new(1, vec![j]).unwrap();
        assert!(check_norm_comparison_on(&js).unwrap().passed);
        let z = JumpOperator::new(1, None, [(p("Z"), c(1.0, 0.0))]).unwrap();
        let r = check_norm_comparison_on(&JumpOperatorSet::new(1, vec![z]).unwrap()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn test_trotter_exact_for_diagonal_models() {
        let l = DiagonalDissipator::new(2, [(p("XZ"), 0.4), (p("IY"), 0.7)])
            .unwrap()
            .to_lindbladian()
            .unwrap();
        let cmps = trotter_comparisons(&l).unwrap();
        for cmp in cmps.iter().filter(|c| c.detail.starts_with("Trotter distance")) {
            assert!(cmp.lhs < 1e-12, "{cmp:?}");
        }
    }

    #[test]
    fn test_failures_are_recorded_with_seeds() {
        let seeds = [3, 4];
        let outcomes = vec![
            Ok(Outcome::Compared(vec![Comparison::le(1.0, 0.5, 0.0, "broken")])),
            Ok(Outcome::Compared(vec![Comparison::le(0.5, 1.0, 0.0, "fine")])),
        ];
        let r = collect("demo", &seeds, outcomes);
        assert!(!r.passed);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].seed, 3);
        assert_eq!(r.failures[0].margin, -0.5);
        assert_eq!(r.min_margin, Some(-0.5));
    }

    #[test]
    fn test_suite_small_run_passes_and_replays() {
        let results = run_suite("all", 6, 7).unwrap();
        assert_eq!(results.len(), CHECK_NAMES.len());
        for r in &results {
            assert!(r.passed, "{r}\n{:?}", r.failures);
        }
        let again = run_suite("norm_comparison", 6, 7).unwrap();
        assert_eq!(again[0], results[6]);
        let one = replay("twirl_structure", instance_seed(splitmix64(7 ^ 3), 0)).unwrap();
        assert_eq!(one.comparisons, 1);
        assert!(run_suite("nope", 1, 1).is_err());
    }
}
