//! Pauli twirling and Trotterized twirled evolution.
//!
//! Conjugating by a Pauli `P` multiplies transfer-matrix entry `(Q, R)` by
//! `chi(P, Q) chi(P, R)`, so the uniform average over all `P` keeps exactly
//! the diagonal.

use faer::c64;

use crate::error::{ensure, Result};
use crate::linalg::c;
use crate::model::{self, Lindbladian};
use crate::pauli::enumerate_all;
use crate::superop::SuperOperator;

/// Largest qubit count accepted by [`twirl_average`].
pub const AVERAGE_MAX_QUBITS: usize = 3;

/// Projection onto the transfer-matrix diagonal.
pub fn twirl_exact(s: &SuperOperator) -> SuperOperator {
    SuperOperator::from_diagonal_entries(s.num_qubits(), &s.diagonal())
        .expect("diagonal of a valid superoperator")
}

/// Explicit average of `U_P o S o U_P` over all `4^n` Pauli conjugations,
/// each built from dense Pauli matrices.
pub fn twirl_average(s: &SuperOperator) -> Result<SuperOperator> {
    let n = s.num_qubits();
    ensure!(
        n <= AVERAGE_MAX_QUBITS,
        Capacity,
        "explicit twirl average is limited to {AVERAGE_MAX_QUBITS} qubits, got {n}"
    );
    let paulis = enumerate_all(n)?;
    let mut acc = SuperOperator::zero(n)?;
    for p in &paulis {
        let pm = p.matrix()?;
        let conj = SuperOperator::from_map(n, |x| &(&pm * x) * &pm)?;
        acc = acc.add(&conj.compose(&s.compose(&conj)?)?)?;
    }
    Ok(acc.scale(c(1.0 / paulis.len() as f64, 0.0)))
}

fn check_step(tau: f64) -> Result<()> {
    ensure!(
        tau >= 0.0 && tau.is_finite(),
        Domain,
        "step length must be finite and non-negative, got {tau}"
    );
    Ok(())
}

/// `T(exp(tau L))`.
pub fn twirled_step(l: &Lindbladian, tau: f64) -> Result<SuperOperator> {
    check_step(tau)?;
    twirled_step_of(&SuperOperator::from_lindbladian(l)?, tau)
}

/// [`twirled_step`] for an already realized generator.
pub fn twirled_step_of(generator: &SuperOperator, tau: f64) -> Result<SuperOperator> {
    check_step(tau)?;
    Ok(twirl_exact(&generator.exp(tau)?))
}

/// `T(exp(tau L))^m`.
pub fn trotterized_twirled(l: &Lindbladian, tau: f64, m: u64) -> Result<SuperOperator> {
    trotterized_twirled_of(&SuperOperator::from_lindbladian(l)?, tau, m)
}

/// [`trotterized_twirled`] for an already realized generator.
pub fn trotterized_twirled_of(generator: &SuperOperator, tau: f64, m: u64) -> Result<SuperOperator> {
    ensure!(m >= 1, Domain, "the number of Trotter steps must be at least 1");
    let step = twirled_step_of(generator, tau)?;
    // The twirled step is diagonal, so its power is entrywise.
    let diag: Vec<c64> = step.diagonal().into_iter().map(|v| powu(v, m)).collect();
    SuperOperator::from_diagonal_entries(step.num_qubits(), &diag)
}

pub(crate) fn powu(mut base: c64, mut k: u64) -> c64 {
    let mut acc = c(1.0, 0.0);
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// `m (tau^2/2 ||T(L^2) - T(L)^2|| + tau^3/3 ||L||^3)` with every diamond
/// norm replaced by the Choi upper bound.
pub fn trotter_error_bound(l: &Lindbladian, tau: f64, m: u64) -> Result<f64> {
    trotter_error_bound_of(&SuperOperator::from_lindbladian(l)?, tau, m)
}

/// [`trotter_error_bound`] for an already realized generator.
pub fn trotter_error_bound_of(generator: &SuperOperator, tau: f64, m: u64) -> Result<f64> {
    check_step(tau)?;
    ensure!(m >= 1, Domain, "the number of Trotter steps must be at least 1");
    if tau == 0.0 {
        return Ok(0.0);
    }
    let squared = twirl_exact(&generator.compose(generator)?);
    let t = twirl_exact(generator);
    let defect = squared.sub(&t.compose(&t)?)?;
    let defect_ub = defect.diamond_bounds()?.upper;
    let l_ub = generator.diamond_bounds()?.upper;
    Ok(m as f64 * (tau * tau / 2.0 * defect_ub + tau.powi(3) / 3.0 * l_ub.powi(3)))
}

/// Diagonal generator of the twirled dynamics, realized densely.
pub fn twirled_generator_matrix(l: &Lindbladian) -> Result<SuperOperator> {
    l.check_capacity()?;
    SuperOperator::from_diagonal(&model::twirled_generator(l))
}
