//! Thin wrappers over the BLAS/LAPACK routines used on the hot paths, plus a
//! few small dense helpers on top of nalgebra.

use std::os::raw::{c_char, c_int};

use cblas_sys::{
    cblas_zgemm, cblas_zherk, CblasColMajor, CblasConjTrans, CblasNoTrans, CblasUpper,
    CBLAS_TRANSPOSE,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

extern "C" {
    fn openblas_set_num_threads(n: c_int);
}

/// Pins the BLAS backend to `n` threads.
pub fn set_blas_threads(n: usize) {
    unsafe { openblas_set_num_threads(n.max(1) as c_int) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    N,
    /// Conjugate transpose.
    H,
}

impl Op {
    fn cblas(self) -> CBLAS_TRANSPOSE {
        match self {
            Op::N => CblasNoTrans,
            Op::H => CblasConjTrans,
        }
    }
}

fn dims(m: &CMat, op: Op) -> (usize, usize) {
    match op {
        Op::N => (m.nrows(), m.ncols()),
        Op::H => (m.ncols(), m.nrows()),
    }
}

/// `c <- alpha op(a) op(b) + beta c`.
pub fn gemm_into(alpha: C64, a: &CMat, oa: Op, b: &CMat, ob: Op, beta: C64, c: &mut CMat) {
    let (m, k) = dims(a, oa);
    let (k2, n) = dims(b, ob);
    assert_eq!(k, k2, "gemm inner dimension mismatch");
    assert_eq!((c.nrows(), c.ncols()), (m, n), "gemm output shape mismatch");
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        *c *= beta;
        return;
    }
    let alpha = [alpha.re, alpha.im];
    let beta = [beta.re, beta.im];
    unsafe {
        cblas_zgemm(
            CblasColMajor,
            oa.cblas(),
            ob.cblas(),
            m as c_int,
            n as c_int,
            k as c_int,
            alpha.as_ptr() as *const _,
            a.as_ptr() as *const _,
            a.nrows().max(1) as c_int,
            b.as_ptr() as *const _,
            b.nrows().max(1) as c_int,
            beta.as_ptr() as *const _,
            c.as_mut_ptr() as *mut _,
            c.nrows().max(1) as c_int,
        );
    }
}

/// `op(a) op(b)`.
pub fn gemm(a: &CMat, oa: Op, b: &CMat, ob: Op) -> CMat {
    let (m, _) = dims(a, oa);
    let (_, n) = dims(b, ob);
    let mut c = CMat::zeros(m, n);
    gemm_into(ONE, a, oa, b, ob, ZERO, &mut c);
    c
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    gemm(a, Op::N, b, Op::N)
}

/// `a^H a`, full Hermitian result.
pub fn gram_cols(a: &CMat) -> CMat {
    let n = a.ncols();
    let k = a.nrows();
    let mut c = CMat::zeros(n, n);
    if n == 0 {
        return c;
    }
    if k > 0 {
        unsafe {
            cblas_zherk(
                CblasColMajor,
                CblasUpper,
                CblasConjTrans,
                n as c_int,
                k as c_int,
                1.0,
                a.as_ptr() as *const _,
                k.max(1) as c_int,
                0.0,
                c.as_mut_ptr() as *mut _,
                n as c_int,
            );
        }
    }
    fill_lower_from_upper(&mut c);
    c
}

/// `a a^H`, full Hermitian result.
pub fn gram_rows(a: &CMat) -> CMat {
    let n = a.nrows();
    let k = a.ncols();
    let mut c = CMat::zeros(n, n);
    if n == 0 {
        return c;
    }
    if k > 0 {
        unsafe {
            cblas_zherk(
                CblasColMajor,
                CblasUpper,
                CblasNoTrans,
                n as c_int,
                k as c_int,
                1.0,
                a.as_ptr() as *const _,
                n as c_int,
                0.0,
                c.as_mut_ptr() as *mut _,
                n as c_int,
            );
        }
    }
    fill_lower_from_upper(&mut c);
    c
}

fn fill_lower_from_upper(c: &mut CMat) {
    let n = c.nrows();
    for j in 0..n {
        for i in j + 1..n {
            c[(i, j)] = c[(j, i)].conj();
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascending.
/// Only the upper triangle is read.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let mut a = m.clone();
    let w = heevd(&mut a, true)?;
    Ok((w, a))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &CMat) -> Result<Vec<f64>> {
    let mut a = m.clone();
    heevd(&mut a, false)
}

fn heevd(a: &mut CMat, vectors: bool) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::invalid("eigh needs a square matrix"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("eigh", "non-finite matrix entry"));
    }
    let jobz = if vectors { b'V' } else { b'N' } as c_char;
    let uplo = b'U' as c_char;
    let nn = n as c_int;
    let mut w = vec![0.0f64; n];
    let mut info: c_int = 0;
    let mut wq = [0.0f64; 2];
    let mut rwq = 0.0f64;
    let mut iwq: c_int = 0;
    let query: c_int = -1;
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr() as *mut _,
            &nn,
            w.as_mut_ptr(),
            wq.as_mut_ptr() as *mut _,
            &query,
            &mut rwq,
            &query,
            &mut iwq,
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::numerical("eigh", format!("workspace query failed, info={info}")));
    }
    let lwork = (wq[0] as usize).max(1);
    let lrwork = (rwq as usize).max(1);
    let liwork = (iwq as usize).max(1);
    let mut work = vec![ZERO; lwork];
    let mut rwork = vec![0.0f64; lrwork];
    let mut iwork = vec![0 as c_int; liwork];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &nn,
            a.as_mut_ptr() as *mut _,
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr() as *mut _,
            &(lwork as c_int),
            rwork.as_mut_ptr(),
            &(lrwork as c_int),
            iwork.as_mut_ptr(),
            &(liwork as c_int),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::numerical("eigh", format!("zheevd failed, info={info}")));
    }
    Ok(w)
}

/// Largest eigenvalue and a unit eigenvector of a real symmetric matrix.
pub fn sym_max_eig(m: &RMat) -> (f64, DVector<f64>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v > best {
            best = v;
            idx = i;
        }
    }
    (best, eig.eigenvectors.column(idx).into_owned())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().sum()
}

/// `Tr[a b]` without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut s = ZERO;
    for j in 0..n {
        for k in 0..n {
            s += a[(j, k)] * b[(k, j)];
        }
    }
    s
}

/// `Σ conj(a_k) b_k`.
pub fn dotc(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for k in 0..4 {
            let x = a[4 * c + k];
            let y = b[4 * c + k];
            re[k] += x.re * y.re + x.im * y.im;
            im[k] += x.re * y.im - x.im * y.re;
        }
    }
    let mut s = C64::new(re.iter().sum(), im.iter().sum());
    for k in 4 * chunks..a.len() {
        s += a[k].conj() * b[k];
    }
    s
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn symmetrize(m: &mut RMat) {
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, k: usize, seed: u64) -> CMat {
        CMat::from_fn(n, k, |i, j| {
            let t = (seed as f64 + 1.0) * (i as f64 * 1.3 + j as f64 * 0.7 + 0.1);
            C64::new(t.sin(), (1.7 * t).cos())
        })
    }

    #[test]
    fn gemm_matches_nalgebra() {
        let a = sample(5, 3, 1);
        let b = sample(5, 4, 2);
        let c = gemm(&a, Op::H, &b, Op::N);
        assert!(max_abs_diff(&c, &(a.adjoint() * &b)) < 1e-12);
        let d = gemm(&b, Op::N, &sample(4, 2, 3), Op::N);
        assert!(max_abs_diff(&d, &(&b * sample(4, 2, 3))) < 1e-12);
    }

    #[test]
    fn herk_matches() {
        let a = sample(6, 3, 4);
        assert!(max_abs_diff(&gram_cols(&a), &(a.adjoint() * &a)) < 1e-12);
        assert!(max_abs_diff(&gram_rows(&a), &(&a * a.adjoint())) < 1e-12);
    }

    #[test]
    fn eigh_reconstructs() {
        let a = sample(7, 7, 5);
        let h = hermitian_part(&a);
        let (w, v) = eigh(&h).unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let d = CMat::from_diagonal(&DVector::from_iterator(7, w.iter().map(|&x| C64::new(x, 0.0))));
        let r = &v * d * v.adjoint();
        assert!(max_abs_diff(&r, &h) < 1e-12);
        let w2 = eigvalsh(&h).unwrap();
        for (x, y) in w.iter().zip(&w2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
