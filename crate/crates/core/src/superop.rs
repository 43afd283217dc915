//! Dense superoperators in the normalized Pauli basis `{P / sqrt(d)}`.
//!
//! Entry `(i, j)` of the matrix is the Pauli transfer coefficient
//! `Tr(P_i S(P_j)) / d`, with rows and columns in canonical Pauli order.
//! Composition is matrix multiplication: `compose(a, b)` applies `b` first.

use faer::c64;

use crate::error::{ensure, Result};
use crate::linalg::{self, c, CMat};
use crate::model::{self, DiagonalDissipator, Lindbladian};
use crate::pauli::{enumerate_all, PauliString, MAX_DENSE_QUBITS};

/// Absolute tolerance for structural checks (realness, trace preservation,
/// positivity), scaled by the largest matrix entry when that exceeds one.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Relative tolerance for agreement between independent methods.
pub const CROSS_METHOD_TOL: f64 = 1e-9;

pub(crate) fn structural_tol(scale: f64) -> f64 {
    STRUCTURAL_TOL * scale.max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    n: usize,
    mat: CMat,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DiamondBounds {
    pub lower: f64,
    pub upper: f64,
}

fn check_n(n: usize) -> Result<()> {
    ensure!(n >= 1, Domain, "superoperators need at least one qubit");
    ensure!(
        n <= MAX_DENSE_QUBITS,
        Capacity,
        "{n} qubits exceeds the dense limit of {MAX_DENSE_QUBITS}"
    );
    Ok(())
}

/// `Tr(P X)` using the single non-zero entry per column of `P`.
fn pauli_trace(p: &PauliString, x: &CMat) -> c64 {
    let dim = x.nrows();
    (0..dim)
        .map(|col| {
            let (row, v) = p.column_entry(col);
            v * x[(col, row)]
        })
        .sum()
}

impl SuperOperator {
    /// Wraps a `4^n x 4^n` transfer matrix.
    pub fn from_matrix(n: usize, mat: CMat) -> Result<Self> {
        check_n(n)?;
        let size = 1usize << (2 * n);
        ensure!(
            mat.nrows() == size && mat.ncols() == size,
            Dimension,
            "expected a {size}x{size} matrix for {n} qubits, got {}x{}",
            mat.nrows(),
            mat.ncols()
        );
        Ok(Self { n, mat })
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, mat: linalg::identity(1 << (2 * n)) })
    }

    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n, mat: linalg::zeros(1 << (2 * n)) })
    }

    /// Diagonal map with the given transfer-matrix diagonal.
    pub fn from_diagonal_entries(n: usize, diag: &[c64]) -> Result<Self> {
        check_n(n)?;
        let size = 1usize << (2 * n);
        ensure!(diag.len() == size, Dimension, "expected {size} diagonal entries, got {}", diag.len());
        let mut mat = linalg::zeros(size);
        for (i, v) in diag.iter().enumerate() {
            mat[(i, i)] = *v;
        }
        Ok(Self { n, mat })
    }

    /// Transfer matrix of an arbitrary linear map given by its action on
    /// dense `2^n x 2^n` operators.
    pub fn from_map(n: usize, f: impl Fn(&CMat) -> CMat) -> Result<Self> {
        check_n(n)?;
        let basis = enumerate_all(n)?;
        let d = (1usize << n) as f64;
        let mut mat = linalg::zeros(basis.len());
        for (j, pj) in basis.iter().enumerate() {
            let image = f(&pj.matrix()?);
            ensure!(
                image.nrows() == 1 << n && image.ncols() == 1 << n,
                Dimension,
                "map returned a {}x{} matrix",
                image.nrows(),
                image.ncols()
            );
            for (i, pi) in basis.iter().enumerate() {
                mat[(i, j)] = pauli_trace(pi, &image) / d;
            }
        }
        Ok(Self { n, mat })
    }

    /// The channel `X -> U X U^dag`.
    pub fn unitary_channel(u: &CMat) -> Result<Self> {
        let dim = u.nrows();
        ensure!(dim.is_power_of_two() && dim == u.ncols(), Dimension, "unitary must be square with power-of-two size");
        let n = dim.trailing_zeros() as usize;
        let ud = linalg::adjoint(u);
        Self::from_map(n, |x| &(u * x) * &ud)
    }

    /// The channel `X -> P X P`, diagonal with entries `chi(P, Q)`.
    pub fn pauli_conjugation(p: &PauliString) -> Result<Self> {
        let n = p.num_qubits();
        let diag: Vec<c64> = enumerate_all(n)?.iter().map(|q| c(p.sign(q), 0.0)).collect();
        Self::from_diagonal_entries(n, &diag)
    }

    /// Realizes `-i[H, X] + sum_a (L_a X L_a^dag - 1/2 {L_a^dag L_a, X})`
    /// through Pauli products.
    pub fn from_lindbladian(l: &Lindbladian) -> Result<Self> {
        l.check_capacity()?;
        let n = l.num_qubits();
        let basis = enumerate_all(n)?;
        let mut mat = linalg::zeros(basis.len());

        for (h, coeff) in l.hamiltonian().terms() {
            for (j, pj) in basis.iter().enumerate() {
                if h.anticommutes(pj) {
                    // h P_j - P_j h = 2 h P_j when they anticommute.
                    let (phase, r) = h.mul_unchecked(pj);
                    mat[(r.index(), j)] += c(0.0, -2.0 * coeff) * phase.to_complex();
                }
            }
        }

        let alpha = model::alpha_matrix(l.dissipator());
        for ((p, q), g) in alpha.entries() {
            let (ph_qp, qp) = q.mul_unchecked(p);
            let half = *g * ph_qp.to_complex() * 0.5;
            for (j, pj) in basis.iter().enumerate() {
                let (ph1, r1) = p.mul_unchecked(pj);
                let (ph2, r2) = r1.mul_unchecked(q);
                mat[(r2.index(), j)] += *g * (ph1 * ph2).to_complex();
                let (ph3, r3) = qp.mul_unchecked(pj);
                mat[(r3.index(), j)] -= half * ph3.to_complex();
                let (ph4, r4) = pj.mul_unchecked(&qp);
                mat[(r4.index(), j)] -= half * ph4.to_complex();
            }
        }
        Ok(Self { n, mat })
    }

    /// Diagonal generator with entry `diagonal_eigenvalue(D, Q)` at `Q`.
    pub fn from_diagonal(d: &DiagonalDissipator) -> Result<Self> {
        let n = d.num_qubits();
        check_n(n)?;
        let diag: Vec<c64> = enumerate_all(n)?
            .iter()
            .map(|q| c(model::diagonal_eigenvalue_unchecked(d, q), 0.0))
            .collect();
        Self::from_diagonal_entries(n, &diag)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Hilbert-space dimension `d = 2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Matrix size `d^2`.
    pub fn size(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<c64> {
        (0..self.size()).map(|i| self.mat[(i, i)]).collect()
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        ensure!(
            self.n == other.n,
            Dimension,
            "superoperators on {} and {} qubits",
            self.n,
            other.n
        );
        Ok(())
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        Ok(Self { n: self.n, mat: &self.mat * &other.mat })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        Ok(Self { n: self.n, mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        Ok(Self { n: self.n, mat: &self.mat - &other.mat })
    }

    pub fn scale(&self, s: c64) -> Self {
        Self { n: self.n, mat: linalg::scale(&self.mat, s) }
    }

    /// Hilbert-Schmidt adjoint.
    pub fn adjoint(&self) -> Self {
        Self { n: self.n, mat: linalg::adjoint(&self.mat) }
    }

    /// `u^dag o self o u`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.adjoint().compose(&self.compose(u)?)
    }

    /// Coefficients of `X` in the normalized Pauli basis.
    pub fn to_pauli_vector(n: usize, x: &CMat) -> Result<Vec<c64>> {
        check_n(n)?;
        ensure!(
            x.nrows() == 1 << n && x.ncols() == 1 << n,
            Dimension,
            "operator is {}x{}, expected {}x{}",
            x.nrows(),
            x.ncols(),
            1 << n,
            1 << n
        );
        let sqrt_d = ((1usize << n) as f64).sqrt();
        Ok(enumerate_all(n)?.iter().map(|p| pauli_trace(p, x) / sqrt_d).collect())
    }

    pub fn from_pauli_vector(n: usize, v: &[c64]) -> Result<CMat> {
        check_n(n)?;
        let basis = enumerate_all(n)?;
        ensure!(v.len() == basis.len(), Dimension, "expected {} coefficients", basis.len());
        let dim = 1usize << n;
        let sqrt_d = (dim as f64).sqrt();
        let mut x = linalg::zeros(dim);
        for (p, coeff) in basis.iter().zip(v) {
            for col in 0..dim {
                let (row, val) = p.column_entry(col);
                x[(row, col)] += val * coeff / sqrt_d;
            }
        }
        Ok(x)
    }

    /// Applies the map to a dense operator.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        let v = Self::to_pauli_vector(self.n, x)?;
        let out: Vec<c64> = (0..self.size())
            .map(|i| (0..self.size()).map(|j| self.mat[(i, j)] * v[j]).sum())
            .collect();
        Self::from_pauli_vector(self.n, &out)
    }

    pub fn trace(&self) -> c64 {
        linalg::trace(&self.mat)
    }

    /// `Tr(S) / d^2`, the Bell identity-outcome probability of a channel.
    pub fn identity_fraction(&self) -> Result<f64> {
        let v = self.trace() / self.size() as f64;
        ensure!(
            v.im.abs() <= STRUCTURAL_TOL,
            Consistency,
            "identity fraction has imaginary part {:e}; the map is not Hermiticity-preserving",
            v.im
        );
        Ok(v.re)
    }

    /// `sqrt(sum |entries|^2 / d^2)`.
    pub fn frobenius_normalized(&self) -> f64 {
        linalg::frobenius(&self.mat) / self.dim() as f64
    }

    /// Entrywise `l_p` norm of the transfer matrix divided by `d^{2/p}`, so
    /// that `p = 2` is the normalized Frobenius norm. `p = f64::INFINITY`
    /// gives the largest entry.
    pub fn pauli_p_norm(&self, p: f64) -> Result<f64> {
        ensure!(p >= 1.0, Domain, "p must be at least 1, got {p}");
        if p.is_infinite() {
            return Ok(linalg::max_abs(&self.mat));
        }
        let mut sum = 0.0;
        for j in 0..self.size() {
            for i in 0..self.size() {
                sum += self.mat[(i, j)].norm().powf(p);
            }
        }
        Ok((sum / self.size() as f64).powf(1.0 / p))
    }

    /// `exp(t S)` by scaling and squaring.
    pub fn exp(&self, t: f64) -> Result<Self> {
        ensure!(
            t >= 0.0 && t.is_finite(),
            Domain,
            "evolution time must be finite and non-negative (the evolution is not invertible in general), got {t}"
        );
        Ok(Self { n: self.n, mat: linalg::expm(&linalg::scale(&self.mat, c(t, 0.0)))? })
    }

    /// `exp(t S)` through an eigendecomposition; fails on ill-conditioned
    /// eigenbases.
    pub fn exp_eigen(&self, t: f64) -> Result<Self> {
        ensure!(t >= 0.0 && t.is_finite(), Domain, "evolution time must be finite and non-negative, got {t}");
        Ok(Self { n: self.n, mat: linalg::expm_eigen(&linalg::scale(&self.mat, c(t, 0.0)))? })
    }

    /// All `d^2` eigenvalues with algebraic multiplicity.
    pub fn eigenvalues(&self) -> Result<Vec<c64>> {
        linalg::eigenvalues(&self.mat)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Fraction of eigenmodes with decay rate `-Re(eta) >= epsilon`.
    pub fn lambda_fraction(&self, epsilon: f64) -> Result<f64> {
        ensure!(epsilon > 0.0, Domain, "epsilon must be positive, got {epsilon}");
        Ok(lambda_fraction_of(&self.eigenvalues()?, epsilon))
    }

    /// Transfer matrix is real within tolerance.
    pub fn is_hermiticity_preserving(&self) -> bool {
        let scale = linalg::max_abs(&self.mat);
        let mut worst = 0.0f64;
        for j in 0..self.size() {
            for i in 0..self.size() {
                worst = worst.max(self.mat[(i, j)].im.abs());
            }
        }
        worst <= STRUCTURAL_TOL * scale
    }

    /// First transfer-matrix row equals `(1, 0, ..., 0)` within `tol`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        (0..self.size()).all(|j| {
            let target = if j == 0 { 1.0 } else { 0.0 };
            (self.mat[(0, j)] - c(target, 0.0)).norm() <= tol
        })
    }

    /// Fails with a consistency error unless the map is a channel within
    /// tolerance.
    pub fn check_cptp(&self) -> Result<()> {
        ensure!(
            self.is_hermiticity_preserving(),
            Consistency,
            "map is not Hermiticity-preserving"
        );
        ensure!(
            self.is_trace_preserving(CROSS_METHOD_TOL),
            Consistency,
            "map is not trace-preserving"
        );
        let choi = self.choi();
        let min = choi.min_eigenvalue()?;
        ensure!(
            min >= -structural_tol(linalg::max_abs(&choi.mat)),
            Consistency,
            "map is not completely positive (Choi eigenvalue {min:e})"
        );
        Ok(())
    }

    /// Natural representation: `vec(S(X)) = N vec(X)` with row-major `vec`.
    pub fn natural(&self) -> CMat {
        let dim = self.dim();
        let size = self.size();
        let sqrt_d = (dim as f64).sqrt();
        let basis = enumerate_all(self.n).expect("size checked at construction");
        let mut b = linalg::zeros(size);
        for (j, p) in basis.iter().enumerate() {
            for col in 0..dim {
                let (row, v) = p.column_entry(col);
                b[(row * dim + col, j)] = v / sqrt_d;
            }
        }
        let bd = linalg::adjoint(&b);
        &(&b * &self.mat) * &bd
    }

    /// `(S (x) I)(|Phi><Phi|)` with `|Phi>` normalized.
    pub fn choi(&self) -> ChoiMatrix {
        let dim = self.dim();
        let nat = self.natural();
        let d = dim as f64;
        let mat = CMat::from_fn(self.size(), self.size(), |r, s| {
            let (a, i) = (r / dim, r % dim);
            let (b, j) = (s / dim, s % dim);
            nat[(a * dim + b, i * dim + j)] / d
        });
        ChoiMatrix { n: self.n, mat }
    }

    /// `(||J||_1 / d, ||J||_1)` with `J` the unnormalized Choi matrix.
    pub fn diamond_bounds(&self) -> Result<DiamondBounds> {
        let lower = linalg::trace_norm(&self.choi().mat)?;
        Ok(DiamondBounds { lower, upper: lower * self.dim() as f64 })
    }

    /// `Tr(rho^2)` of the Choi state.
    pub fn purity(&self) -> f64 {
        self.choi().purity()
    }
}

pub(crate) fn lambda_fraction_of(eigenvalues: &[c64], epsilon: f64) -> f64 {
    // Rates that tie with epsilon up to round-off count as decaying.
    let threshold = epsilon * (1.0 - CROSS_METHOD_TOL);
    let count = eigenvalues.iter().filter(|z| -z.re >= threshold).count();
    count as f64 / eigenvalues.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    n: usize,
    mat: CMat,
}

impl ChoiMatrix {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Rows and columns indexed by `a * d + i` for output `a`, reference `i`.
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn trace(&self) -> c64 {
        linalg::trace(&self.mat)
    }

    pub fn is_hermitian(&self) -> bool {
        let tol = structural_tol(linalg::max_abs(&self.mat));
        linalg::max_abs_diff(&self.mat, &linalg::adjoint(&self.mat)) <= tol
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let herm = CMat::from_fn(self.mat.nrows(), self.mat.ncols(), |i, j| {
            (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5
        });
        Ok(linalg::hermitian_eigenvalues(&herm)?[0])
    }

    pub fn purity(&self) -> f64 {
        let size = self.mat.nrows();
        let mut s = c(0.0, 0.0);
        for i in 0..size {
            for j in 0..size {
                s += self.mat[(i, j)] * self.mat[(j, i)];
            }
        }
        s.re
    }

    pub fn trace_norm(&self) -> Result<f64> {
        linalg::trace_norm(&self.mat)
    }

    /// `<Phi_P| rho |Phi_P>` with `|Phi_P> = (P (x) I)|Phi>`.
    pub fn bell_overlap(&self, p: &PauliString) -> Result<f64> {
        ensure!(p.num_qubits() == self.n, Dimension, "Pauli on {} qubits, Choi on {}", p.num_qubits(), self.n);
        let dim = 1usize << self.n;
        let sqrt_d = (dim as f64).sqrt();
        let mut v = vec![c(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let (row, val) = p.column_entry(col);
            v[row * dim + col] = val / sqrt_d;
        }
        let mut s = c(0.0, 0.0);
        for (r, vr) in v.iter().enumerate() {
            if *vr == c(0.0, 0.0) {
                continue;
            }
            for (t, vt) in v.iter().enumerate() {
                s += vr.conj() * self.mat[(r, t)] * vt;
            }
        }
        Ok(s.re)
    }
}
