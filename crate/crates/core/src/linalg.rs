//! Dense complex matrix helpers on top of `faer`.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, Side};

use crate::error::{ensure, Error, Result};

pub type CMat = Mat<c64>;

/// Eigenvector matrices with a 2-norm condition number at or above this are
/// rejected by [`expm_eigen`].
pub const EIGEN_COND_LIMIT: f64 = 1e8;

pub fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}

pub fn scale(a: &CMat, s: c64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// `sum_k w_k * M_k`, all operands square of equal size.
pub fn lincomb(terms: &[(f64, &CMat)]) -> CMat {
    let n = terms[0].1.nrows();
    let mut out = zeros(n);
    for &(w, m) in terms {
        if w == 0.0 {
            continue;
        }
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] += m[(i, j)] * w;
            }
        }
    }
    out
}

pub fn add_identity(a: &mut CMat, w: f64) {
    for i in 0..a.nrows() {
        a[(i, i)] += w;
    }
}

pub fn trace(a: &CMat) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

pub fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn frobenius(a: &CMat) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

/// Maximum absolute column sum.
pub fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values()
        .map_err(|e| Error::Numeric(format!("singular value decomposition failed: {e:?}")))
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Sum of singular values.
pub fn trace_norm(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is
/// read.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numeric(format!("Hermitian eigen-solve failed: {e:?}")))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<c64>> {
    let ev = a
        .eigenvalues()
        .map_err(|e| Error::Numeric(format!("eigen-solve failed: {e:?}")))?;
    ensure!(
        ev.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        Numeric,
        "eigen-solve returned non-finite values"
    );
    Ok(ev)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let inv = a.partial_piv_lu().solve(identity(n));
    ensure!(
        inv.col_iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite())),
        Numeric,
        "matrix is singular to working precision"
    );
    Ok(inv)
}

/// `a^k` by repeated squaring.
pub fn pow(a: &CMat, mut k: u64) -> CMat {
    let mut result = identity(a.nrows());
    let mut base = a.clone();
    let mut first = true;
    while k > 0 {
        if k & 1 == 1 {
            result = if first { base.clone() } else { &result * &base };
            first = false;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant (Higham 2005).
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    ensure!(n == a.ncols(), Dimension, "expm needs a square matrix, got {}x{}", n, a.ncols());
    if n == 0 {
        return Ok(zeros(0));
    }
    let norm = one_norm(a);
    ensure!(norm.is_finite(), Numeric, "expm input has non-finite entries");

    for (degree, theta) in THETA {
        if norm <= theta {
            return pade_low(a, degree);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = scale(a, c(0.5f64.powi(s as i32), 0.0));
    let mut r = pade_13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_low(a: &CMat, degree: usize) -> Result<CMat> {
    let b: &[f64] = match degree {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let a2 = a * a;
    let mut powers = vec![identity(a.nrows()), a2.clone()];
    while powers.len() <= degree / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    // U = A * sum b_{2k+1} A^{2k}, V = sum b_{2k} A^{2k}
    let odd: Vec<(f64, &CMat)> = powers.iter().enumerate().map(|(k, p)| (b[2 * k + 1], p)).collect();
    let even: Vec<(f64, &CMat)> = powers.iter().enumerate().map(|(k, p)| (b[2 * k], p)).collect();
    let u = a * lincomb(&odd);
    let v = lincomb(&even);
    pade_solve(&u, &v)
}

fn pade_13(a: &CMat) -> Result<CMat> {
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let mut inner_u = lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)]);
    add_identity(&mut inner_u, b[1]);
    let u = a * (&a6 * lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]) + inner_u);
    let mut inner_v = lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)]);
    add_identity(&mut inner_v, b[0]);
    let v = &a6 * lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]) + inner_v;
    pade_solve(&u, &v)
}

/// Solves `(V - U) R = (V + U)`.
fn pade_solve(u: &CMat, v: &CMat) -> Result<CMat> {
    let p = v + u;
    let q = v - u;
    let r = q.partial_piv_lu().solve(p);
    ensure!(
        r.col_iter().all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite())),
        Numeric,
        "Padé denominator is singular"
    );
    Ok(r)
}

/// Matrix exponential through an eigendecomposition. Fails when the
/// eigenvector matrix is ill-conditioned (defective or nearly defective
/// input).
pub fn expm_eigen(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    ensure!(n == a.ncols(), Dimension, "expm needs a square matrix, got {}x{}", n, a.ncols());
    let evd = a
        .eigen()
        .map_err(|e| Error::Numeric(format!("eigen-solve failed: {e:?}")))?;
    let vecs = evd.U().to_owned();
    let vals = evd.S().column_vector().to_owned();
    let sv = singular_values(&vecs)?;
    let cond = sv[0] / sv[n - 1];
    ensure!(
        cond.is_finite() && cond < EIGEN_COND_LIMIT,
        Numeric,
        "eigenvector matrix condition number {cond:.3e} is at or above {EIGEN_COND_LIMIT:.0e}"
    );
    let inv = inverse(&vecs)?;
    let scaled = CMat::from_fn(n, n, |i, j| vecs[(i, j)] * vals[j].exp());
    Ok(&scaled * &inv)
}
