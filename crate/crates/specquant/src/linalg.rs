//! Small complex linear-algebra helpers shared by the solver and the
//! MMSE baseline: Hermitian eigendecompositions, PSD projection, and
//! Cholesky solves with a jitter ladder.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Force exact Hermitian symmetry, `(A + A^H) / 2`.
pub fn hermitianize(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(n, n);
    for p in 0..n {
        out[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
        for q in (p + 1)..n {
            let v = (a[(p, q)] + a[(q, p)].conj()) * 0.5;
            out[(p, q)] = v;
            out[(q, p)] = v.conj();
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix. Returns `(eigenvalues, Q)`
/// with `A = Q diag(w) Q^H`; eigenvalues ascending.
pub fn hermitian_eig(a: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let sym = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sym.eigenvalues[i].partial_cmp(&sym.eigenvalues[j]).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut q = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        q.set_column(dst, &sym.eigenvectors.column(src));
    }
    (w, q)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &DMatrix<Complex64>) -> f64 {
    let sym = a.clone().symmetric_eigen();
    sym.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Projection onto the positive semidefinite cone: clip negative
/// eigenvalues of the Hermitian part to zero.
pub fn project_psd(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (w, q) = hermitian_eig(&hermitianize(a));
    let n = a.nrows();
    // Q diag(max(w,0)) Q^H, skipping the zeroed columns.
    let mut scaled = DMatrix::zeros(n, n);
    let mut any = false;
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            any = true;
            scaled.set_column(i, &(q.column(i) * Complex64::new(wi, 0.0)));
        }
    }
    if !any {
        return DMatrix::zeros(n, n);
    }
    &scaled * q.adjoint()
}

/// Cholesky factor of `A + jitter*I`, escalating the jitter by 10 on
/// failure. Returns the factor and the jitter that succeeded.
pub fn cholesky_with_jitter(
    a: &DMatrix<Complex64>,
    schedule: &[f64],
) -> Option<(nalgebra::Cholesky<Complex64, nalgebra::Dyn>, f64)> {
    let n = a.nrows();
    for &jitter in schedule {
        let mut m = a.clone();
        for i in 0..n {
            m[(i, i)] += Complex64::new(jitter, 0.0);
        }
        if let Some(chol) = m.cholesky() {
            return Some((chol, jitter));
        }
    }
    None
}

/// Solve `A x = b` for Hermitian PSD `A` via an eigenvalue-thresholded
/// pseudo-inverse (threshold relative to the largest eigenvalue). Used
/// where `A` may be singular, e.g. noiseless rank-deficient covariances.
pub fn pinv_solve(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    rel_threshold: f64,
) -> DVector<Complex64> {
    let (w, q) = hermitian_eig(&hermitianize(a));
    let wmax = w.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = rel_threshold * wmax.max(f64::MIN_POSITIVE);
    let proj = q.adjoint() * b;
    let mut scaled = proj;
    for (i, &wi) in w.iter().enumerate() {
        scaled[i] = if wi > cutoff {
            scaled[i] / Complex64::new(wi, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    &q * scaled
}
