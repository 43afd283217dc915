//! Lindblad generators in the Pauli-coefficient representation.
//!
//! `L(X) = -i[H, X] + sum_a (L_a X L_a^dag - 1/2 {L_a^dag L_a, X})` with
//! `H = sum_h c_h h` and `L_a = sum_P gamma_{a,P} P`.

use std::collections::{BTreeMap, BTreeSet};

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::linalg::{self, CMat};
use crate::pauli::{PauliString, MAX_DENSE_QUBITS};

/// Largest qubit count realized densely unless a model raises its limit.
pub const DEFAULT_CAPACITY: usize = 4;

fn check_len(n: usize, p: &PauliString, what: &str) -> Result<()> {
    ensure!(
        p.num_qubits() == n,
        Dimension,
        "{what} {p} has {} qubits, expected {n}",
        p.num_qubits()
    );
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<(PauliString, f64)>,
}

impl Hamiltonian {
    /// Merges duplicate strings and drops the identity term and exact zeros.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        PauliString::identity(n)?;
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (p, c) in terms {
            check_len(n, &p, "Hamiltonian term")?;
            ensure!(c.is_finite(), Validation, "Hamiltonian coefficient of {p} is not finite");
            if !p.is_identity() {
                *merged.entry(p).or_default() += c;
            }
        }
        let terms = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();
        Ok(Self { n, terms })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn matrix(&self) -> Result<CMat> {
        let dim = 1usize << self.n;
        let mut h = linalg::zeros(dim);
        for (p, c) in &self.terms {
            for col in 0..dim {
                let (row, v) = p.column_entry(col);
                h[(row, col)] += v * *c;
            }
        }
        Ok(h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperator {
    n: usize,
    support: Vec<usize>,
    coefficients: BTreeMap<PauliString, c64>,
}

impl JumpOperator {
    /// When `support` is `None` it is taken as the union of the term
    /// supports. Identity terms are rejected.
    pub fn new(
        n: usize,
        support: Option<Vec<usize>>,
        terms: impl IntoIterator<Item = (PauliString, c64)>,
    ) -> Result<Self> {
        PauliString::identity(n)?;
        let mut coefficients: BTreeMap<PauliString, c64> = BTreeMap::new();
        for (p, g) in terms {
            check_len(n, &p, "jump term")?;
            ensure!(
                !p.is_identity(),
                Validation,
                "jump operators must be traceless; the identity term is not allowed"
            );
            ensure!(g.re.is_finite() && g.im.is_finite(), Validation, "coefficient of {p} is not finite");
            *coefficients.entry(p).or_default() += g;
        }
        coefficients.retain(|_, g| *g != c64::new(0.0, 0.0));

        let union: BTreeSet<usize> = coefficients.keys().flat_map(|p| p.support()).collect();
        let support: BTreeSet<usize> = match support {
            Some(s) => s.into_iter().collect(),
            None => union.clone(),
        };
        if let Some(&q) = support.iter().find(|&&q| q >= n) {
            return Err(crate::Error::Validation(format!(
                "support index {q} out of range for {n} qubits"
            )));
        }
        if let Some(p) = coefficients.keys().find(|p| !p.support().iter().all(|q| support.contains(q))) {
            return Err(crate::Error::Validation(format!(
                "term {p} acts outside the declared support {:?}",
                support.iter().collect::<Vec<_>>()
            )));
        }
        Ok(Self {
            n,
            support: support.into_iter().collect(),
            coefficients,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Sorted qubit indices.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coefficients(&self) -> &BTreeMap<PauliString, c64> {
        &self.coefficients
    }

    pub fn coefficient(&self, p: &PauliString) -> c64 {
        self.coefficients.get(p).copied().unwrap_or_default()
    }

    pub fn matrix(&self) -> Result<CMat> {
        let dim = 1usize << self.n;
        let mut m = linalg::zeros(dim);
        for (p, g) in &self.coefficients {
            for col in 0..dim {
                let (row, v) = p.column_entry(col);
                m[(row, col)] += v * g;
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperatorSet {
    n: usize,
    jumps: Vec<JumpOperator>,
}

impl JumpOperatorSet {
    pub fn new(n: usize, jumps: Vec<JumpOperator>) -> Result<Self> {
        PauliString::identity(n)?;
        for j in &jumps {
            ensure!(
                j.num_qubits() == n,
                Dimension,
                "jump on {} qubits in a {n}-qubit set",
                j.num_qubits()
            );
        }
        Ok(Self { n, jumps })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }
}

/// `(k, degree)`: the largest declared support and the largest number of
/// supports sharing one qubit. `(0, 0)` for an empty set.
pub fn derive_locality_degree(js: &JumpOperatorSet) -> (usize, usize) {
    let k = js.jumps.iter().map(|j| j.support.len()).max().unwrap_or(0);
    let mut counts = vec![0usize; js.n];
    for j in &js.jumps {
        for &q in &j.support {
            counts[q] += 1;
        }
    }
    (k, counts.into_iter().max().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lindbladian {
    n: usize,
    hamiltonian: Hamiltonian,
    dissipator: JumpOperatorSet,
    capacity: usize,
}

impl Lindbladian {
    pub fn new(hamiltonian: Hamiltonian, dissipator: JumpOperatorSet) -> Result<Self> {
        let n = hamiltonian.num_qubits();
        ensure!(
            dissipator.num_qubits() == n,
            Dimension,
            "Hamiltonian on {n} qubits, dissipator on {}",
            dissipator.num_qubits()
        );
        Ok(Self {
            n,
            hamiltonian,
            dissipator,
            capacity: DEFAULT_CAPACITY,
        })
    }

    pub fn hamiltonian_only(h: Hamiltonian) -> Result<Self> {
        let n = h.num_qubits();
        Self::new(h, JumpOperatorSet::empty(n)?)
    }

    pub fn dissipative(js: JumpOperatorSet) -> Result<Self> {
        let n = js.num_qubits();
        Self::new(Hamiltonian::zero(n)?, js)
    }

    /// Raises or lowers the dense-realization limit, up to
    /// [`MAX_DENSE_QUBITS`].
    pub fn with_capacity(mut self, limit: usize) -> Result<Self> {
        ensure!(
            (1..=MAX_DENSE_QUBITS).contains(&limit),
            Capacity,
            "capacity override {limit} outside 1..={MAX_DENSE_QUBITS}"
        );
        self.capacity = limit;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn dissipator(&self) -> &JumpOperatorSet {
        &self.dissipator
    }

    pub fn check_capacity(&self) -> Result<()> {
        ensure!(
            self.n <= self.capacity,
            Capacity,
            "{} qubits exceeds the capacity limit of {} (raise it with a capacity override, at most {MAX_DENSE_QUBITS})",
            self.n,
            self.capacity
        );
        Ok(())
    }

    pub fn locality_degree(&self) -> (usize, usize) {
        derive_locality_degree(&self.dissipator)
    }
}

/// `D(X) = sum_P alpha_P (P X P - X)` with `alpha_P >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalDissipator {
    n: usize,
    alphas: BTreeMap<PauliString, f64>,
}

impl DiagonalDissipator {
    pub fn new(n: usize, alphas: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        PauliString::identity(n)?;
        let mut map: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (p, a) in alphas {
            check_len(n, &p, "dissipator term")?;
            ensure!(!p.is_identity(), Validation, "the identity rate is not part of a dissipator");
            ensure!(a.is_finite() && a >= 0.0, Domain, "rate for {p} must be finite and non-negative, got {a}");
            *map.entry(p).or_default() += a;
        }
        map.retain(|_, a| *a > 0.0);
        Ok(Self { n, alphas: map })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, [])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn alphas(&self) -> &BTreeMap<PauliString, f64> {
        &self.alphas
    }

    pub fn alpha(&self, p: &PauliString) -> f64 {
        self.alphas.get(p).copied().unwrap_or(0.0)
    }

    /// `Gamma = sum_P alpha_P`.
    pub fn total_rate(&self) -> f64 {
        self.alphas.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Largest weight among the strings with a rate.
    pub fn max_weight(&self) -> usize {
        self.alphas.keys().map(PauliString::weight).max().unwrap_or(0)
    }

    /// As a jump set with one jump `sqrt(alpha_P) P` per entry.
    pub fn to_lindbladian(&self) -> Result<Lindbladian> {
        let jumps = self
            .alphas
            .iter()
            .map(|(p, a)| JumpOperator::new(self.n, None, [(*p, c64::new(a.sqrt(), 0.0))]))
            .collect::<Result<Vec<_>>>()?;
        Lindbladian::dissipative(JumpOperatorSet::new(self.n, jumps)?)
    }
}

/// `alpha_{P,Q} = sum_a gamma_{a,P} conj(gamma_{a,Q})`, stored for the pairs
/// that occur together in some jump.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaMatrix {
    n: usize,
    entries: BTreeMap<(PauliString, PauliString), c64>,
}

impl AlphaMatrix {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<(PauliString, PauliString), c64> {
        &self.entries
    }

    pub fn get(&self, p: &PauliString, q: &PauliString) -> c64 {
        self.entries.get(&(*p, *q)).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Strings appearing in some stored pair, sorted.
    pub fn index_set(&self) -> Vec<PauliString> {
        let set: BTreeSet<PauliString> = self.entries.keys().flat_map(|(p, q)| [*p, *q]).collect();
        set.into_iter().collect()
    }

    /// Dense matrix over [`index_set`](Self::index_set).
    pub fn dense(&self) -> (Vec<PauliString>, CMat) {
        let index = self.index_set();
        let pos: BTreeMap<PauliString, usize> = index.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut m = linalg::zeros(index.len());
        for ((p, q), v) in &self.entries {
            m[(pos[p], pos[q])] = *v;
        }
        (index, m)
    }

    /// Largest number of stored entries in one row.
    pub fn max_row_sparsity(&self) -> usize {
        let mut counts: BTreeMap<PauliString, usize> = BTreeMap::new();
        for (p, _) in self.entries.keys() {
            *counts.entry(*p).or_default() += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }

    /// `sum_{P,Q} |alpha_{P,Q}|^2`.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum()
    }

    /// `sum_P |alpha_{P,P}|^2`.
    pub fn diagonal_sq(&self) -> f64 {
        self.entries
            .iter()
            .filter(|((p, q), _)| p == q)
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }
}

pub fn alpha_matrix(js: &JumpOperatorSet) -> AlphaMatrix {
    let mut entries: BTreeMap<(PauliString, PauliString), c64> = BTreeMap::new();
    for j in &js.jumps {
        for (p, gp) in &j.coefficients {
            for (q, gq) in &j.coefficients {
                *entries.entry((*p, *q)).or_default() += gp * gq.conj();
            }
        }
    }
    AlphaMatrix { n: js.n, entries }
}

/// Generator of the Pauli-twirled dynamics: `alpha_P = sum_a |gamma_{a,P}|^2`.
/// The Hamiltonian does not contribute.
pub fn twirled_generator(l: &Lindbladian) -> DiagonalDissipator {
    let mut alphas: BTreeMap<PauliString, f64> = BTreeMap::new();
    for j in &l.dissipator.jumps {
        for (p, g) in &j.coefficients {
            *alphas.entry(*p).or_default() += g.norm_sqr();
        }
    }
    alphas.retain(|_, a| *a > 0.0);
    DiagonalDissipator { n: l.n, alphas }
}

/// `sum_P alpha_P (chi(P, Q) - 1)`, the eigenvalue of `D` on the mode `Q`.
pub fn diagonal_eigenvalue(d: &DiagonalDissipator, q: &PauliString) -> Result<f64> {
    check_len(d.n, q, "mode")?;
    Ok(diagonal_eigenvalue_unchecked(d, q))
}

pub(crate) fn diagonal_eigenvalue_unchecked(d: &DiagonalDissipator, q: &PauliString) -> f64 {
    d.alphas
        .iter()
        .filter(|(p, _)| p.anticommutes(q))
        .map(|(_, a)| -2.0 * a)
        .sum()
}

/// Normalized Frobenius norm of `D`: `sqrt(Gamma^2 + sum_P alpha_P^2)`.
pub fn diagonal_frobenius(d: &DiagonalDissipator) -> f64 {
    let gamma = d.total_rate();
    let sq: f64 = d.alphas.values().map(|a| a * a).sum();
    (gamma * gamma + sq).sqrt()
}

/// `2 ||H||_op + 2 sum_a ||L_a||_op^2`, an upper bound on the diamond norm of
/// the generator.
pub fn diamond_upper_bound(l: &Lindbladian) -> Result<f64> {
    l.check_capacity()?;
    let mut bound = 0.0;
    if !l.hamiltonian.is_zero() {
        bound += 2.0 * linalg::op_norm(&l.hamiltonian.matrix()?)?;
    }
    for j in &l.dissipator.jumps {
        let norm = linalg::op_norm(&j.matrix()?)?;
        bound += 2.0 * norm * norm;
    }
    Ok(bound)
}

/// Pauli 2-norm guaranteed by a Pauli p-norm promise `epsilon` on a
/// dissipator with at most `s` non-zero coefficients. Pass
/// `f64::INFINITY` for the max-norm.
pub fn pnorm_promise_to_2norm(epsilon: f64, p: f64, s: f64) -> Result<f64> {
    ensure!(epsilon > 0.0, Domain, "epsilon must be positive, got {epsilon}");
    ensure!(p >= 1.0, Domain, "p must be at least 1, got {p}");
    ensure!(s >= 1.0, Domain, "sparsity must be at least 1, got {s}");
    if p >= 2.0 {
        Ok(epsilon)
    } else {
        Ok(epsilon * s.powf(0.5 - 1.0 / p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn jump(n: usize, support: &[usize], terms: &[(&str, f64, f64)]) -> JumpOperator {
        JumpOperator::new(
            n,
            Some(support.to_vec()),
            terms.iter().map(|(s, re, im)| (p(s), c64::new(*re, *im))),
        )
        .unwrap()
    }

    #[test]
    fn test_locality_degree() {
        let one = JumpOperatorSet::new(1, vec![jump(1, &[0], &[("Z", 1.0, 0.0)])]).unwrap();
        assert_eq!(derive_locality_degree(&one), (1, 1));
        let two = JumpOperatorSet::new(
            3,
            vec![
                jump(3, &[0, 1], &[("XXI", 1.0, 0.0)]),
                jump(3, &[1, 2], &[("IZZ", 1.0, 0.0)]),
            ],
        )
        .unwrap();
        assert_eq!(derive_locality_degree(&two), (2, 2));
        assert_eq!(derive_locality_degree(&JumpOperatorSet::empty(2).unwrap()), (0, 0));
    }

    #[test]
    fn test_declared_support_counts_toward_degree() {
        let js = JumpOperatorSet::new(
            2,
            vec![jump(2, &[0, 1], &[("XI", 1.0, 0.0)]), jump(2, &[1], &[("IZ", 1.0, 0.0)])],
        )
        .unwrap();
        assert_eq!(derive_locality_degree(&js), (2, 2));
    }

    #[test]
    fn test_jump_validation() {
        assert!(matches!(
            JumpOperator::new(1, None, [(p("I"), c64::new(1.0, 0.0))]),
            Err(crate::Error::Validation(_))
        ));
        assert!(JumpOperator::new(2, Some(vec![0]), [(p("IX"), c64::new(1.0, 0.0))]).is_err());
        assert!(JumpOperator::new(2, Some(vec![2]), [(p("XI"), c64::new(1.0, 0.0))]).is_err());
        let derived = JumpOperator::new(3, None, [(p("XIZ"), c64::new(1.0, 0.0))]).unwrap();
        assert_eq!(derived.support(), &[0, 2]);
    }

    #[test]
    fn test_hamiltonian_merges_and_drops_identity() {
        let h = Hamiltonian::new(1, [(p("Z"), 1.0), (p("I"), 5.0), (p("Z"), 0.5), (p("X"), 0.0)]).unwrap();
        assert_eq!(h.terms(), &[(p("Z"), 1.5)]);
    }

    #[test]
    fn test_alpha_single_x() {
        let js = JumpOperatorSet::new(1, vec![jump(1, &[0], &[("X", 1.0, 0.0)])]).unwrap();
        let a = alpha_matrix(&js);
        assert_eq!(a.len(), 1);
        assert_eq!(a.get(&p("X"), &p("X")), c64::new(1.0, 0.0));
    }

    #[test]
    fn test_alpha_x_plus_iy() {
        let js = JumpOperatorSet::new(1, vec![jump(1, &[0], &[("X", 1.0, 0.0), ("Y", 0.0, 1.0)])]).unwrap();
        let a = alpha_matrix(&js);
        assert_eq!(a.get(&p("X"), &p("X")), c64::new(1.0, 0.0));
        assert_eq!(a.get(&p("Y"), &p("Y")), c64::new(1.0, 0.0));
        assert_eq!(a.get(&p("X"), &p("Y")), c64::new(0.0, -1.0));
        assert_eq!(a.get(&p("Y"), &p("X")), c64::new(0.0, 1.0));
        let (_, dense) = a.dense();
        let ev = linalg::hermitian_eigenvalues(&dense).unwrap();
        assert_relative_eq!(ev[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 2.0, epsilon = 1e-12);
        assert_relative_eq!(a.frobenius_sq(), 4.0);
        assert_relative_eq!(a.diagonal_sq(), 2.0);

        let l = Lindbladian::dissipative(js).unwrap();
        let d = twirled_generator(&l);
        assert_eq!(d.alpha(&p("X")), 1.0);
        assert_eq!(d.alpha(&p("Y")), 1.0);
        assert_eq!(d.alpha(&p("Z")), 0.0);
    }

    #[test]
    fn test_twirled_generator_ignores_hamiltonian() {
        let h = Hamiltonian::new(2, [(p("ZZ"), 1.3), (p("XI"), -0.2)]).unwrap();
        let l = Lindbladian::hamiltonian_only(h).unwrap();
        assert!(twirled_generator(&l).is_empty());

        let g: f64 = 0.7;
        let js = JumpOperatorSet::new(1, vec![jump(1, &[0], &[("Z", g.sqrt(), 0.0)])]).unwrap();
        let d = twirled_generator(&Lindbladian::dissipative(js).unwrap());
        assert_relative_eq!(d.alpha(&p("Z")), g, epsilon = 1e-15);
    }

    #[test]
    fn test_diagonal_eigenvalue() {
        let d = DiagonalDissipator::new(1, [(p("Z"), 1.0)]).unwrap();
        assert_eq!(diagonal_eigenvalue(&d, &p("Z")).unwrap(), 0.0);
        assert_eq!(diagonal_eigenvalue(&d, &p("X")).unwrap(), -2.0);
        assert_eq!(diagonal_eigenvalue(&d, &p("I")).unwrap(), 0.0);
        let g = 0.3;
        let dep = DiagonalDissipator::new(1, [(p("X"), g), (p("Y"), g), (p("Z"), g)]).unwrap();
        assert_relative_eq!(diagonal_eigenvalue(&dep, &p("X")).unwrap(), -4.0 * g);
        assert!(diagonal_eigenvalue(&dep, &p("XX")).is_err());
    }

    #[test]
    fn test_diagonal_frobenius() {
        assert_eq!(diagonal_frobenius(&DiagonalDissipator::empty(1).unwrap()), 0.0);
        let d = DiagonalDissipator::new(1, [(p("Z"), 1.0)]).unwrap();
        assert_relative_eq!(diagonal_frobenius(&d), 2f64.sqrt());
        let g = 0.4;
        let dep = DiagonalDissipator::new(1, [(p("X"), g), (p("Y"), g), (p("Z"), g)]).unwrap();
        assert_relative_eq!(diagonal_frobenius(&dep), g * 12f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn test_diagonal_dissipator_rejects_negative_rates() {
        assert!(DiagonalDissipator::new(1, [(p("Z"), -0.1)]).is_err());
        assert!(DiagonalDissipator::new(1, [(p("I"), 0.1)]).is_err());
    }

    #[test]
    fn test_diamond_upper_bound() {
        let zero = Lindbladian::dissipative(JumpOperatorSet::empty(1).unwrap()).unwrap();
        assert_eq!(diamond_upper_bound(&zero).unwrap(), 0.0);
        let w = 1.7;
        let h = Lindbladian::hamiltonian_only(Hamiltonian::new(1, [(p("Z"), w)]).unwrap()).unwrap();
        assert_relative_eq!(diamond_upper_bound(&h).unwrap(), 2.0 * w, epsilon = 1e-12);
        let g: f64 = 0.3;
        let js = JumpOperatorSet::new(1, vec![jump(1, &[0], &[("Z", g.sqrt(), 0.0)])]).unwrap();
        let d = Lindbladian::dissipative(js).unwrap();
        assert_relative_eq!(diamond_upper_bound(&d).unwrap(), 2.0 * g, epsilon = 1e-12);
    }

    #[test]
    fn test_capacity() {
        let l = Lindbladian::hamiltonian_only(Hamiltonian::zero(5).unwrap()).unwrap();
        assert!(matches!(l.check_capacity(), Err(crate::Error::Capacity(_))));
        let l = l.with_capacity(6).unwrap();
        assert!(l.check_capacity().is_ok());
        assert!(l.with_capacity(7).is_err());
    }

    #[test]
    fn test_pnorm_conversion() {
        assert_eq!(pnorm_promise_to_2norm(0.1, 2.0, 17.0).unwrap(), 0.1);
        assert_eq!(pnorm_promise_to_2norm(0.1, f64::INFINITY, 4.0).unwrap(), 0.1);
        assert_relative_eq!(pnorm_promise_to_2norm(0.1, 1.0, 4.0).unwrap(), 0.05, epsilon = 1e-15);
        assert!(pnorm_promise_to_2norm(0.1, 0.5, 4.0).is_err());
        let mut last = f64::INFINITY;
        for s in 1..20 {
            let v = pnorm_promise_to_2norm(0.1, 1.5, s as f64).unwrap();
            assert!(v <= last);
            last = v;
        }
    }
}
