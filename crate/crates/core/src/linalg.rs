//! Dense helpers over `DMatrix<Complex64>` and real coordinate matrices.

use nalgebra::{ComplexField, DMatrix, DVector, Dyn, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::tolerance;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

/// Matrix unit `E_ij` (zero-based).
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = c(1.0);
    m
}

pub fn real_diag(values: &[f64]) -> CMat {
    let n = values.len();
    let mut m = zeros(n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v);
    }
    m
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn hs_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Re tr(A† B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

/// `Re tr(A B)`, the pairing used for density representatives.
pub fn re_trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let p = a[(i, k)] * b[(k, i)];
            acc += p.re;
        }
    }
    acc
}

/// Complex `tr(A B)`.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = c(0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `‖A − A†‖_F / max(1, ‖A‖_F)`.
pub fn hermitian_deviation(a: &CMat) -> f64 {
    hs_norm(&(a - a.adjoint())) / hs_norm(a).max(1.0)
}

pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    svd(a.clone()).singular_values.max()
}

/// Scalars the decompositions accept: `f64` and `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + faer::traits::ComplexField {}

impl Scalar for f64 {}
impl Scalar for C64 {}

fn to_faer<T: Scalar>(m: &DMatrix<T>) -> faer::Mat<T> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].clone())
}

fn from_faer<T: Scalar>(m: faer::MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].clone())
}

/// Thin SVD with singular values in descending order.
///
/// nalgebra's own SVD can return factorizations that are off by far more
/// than round-off (reconstruction errors up to 1e-2 on small complex and
/// rank-deficient inputs), so the factorization is computed with faer.
pub fn svd<T: Scalar>(m: DMatrix<T>) -> SVD<T, Dyn, Dyn> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return SVD {
            u: Some(DMatrix::zeros(r, 0)),
            v_t: Some(DMatrix::zeros(0, c)),
            singular_values: DVector::zeros(0),
        };
    }
    match to_faer(&m).thin_svd() {
        Ok(f) => {
            let s = f.S().column_vector();
            SVD {
                u: Some(from_faer(f.U())),
                v_t: Some(from_faer(f.V()).adjoint()),
                singular_values: DVector::from_fn(k, |i, _| s[i].clone().real()),
            }
        }
        Err(_) => SVD::new(m, true, true),
    }
}

/// Hermitian eigen-decomposition, eigenvalues ascending.
fn hermitian_eigen<T: Scalar>(m: DMatrix<T>) -> SymmetricEigen<T, Dyn> {
    match to_faer(&m).self_adjoint_eigen(faer::Side::Lower) {
        Ok(f) => {
            let s = f.S().column_vector();
            SymmetricEigen {
                eigenvectors: from_faer(f.U()),
                eigenvalues: DVector::from_fn(m.nrows(), |i, _| s[i].clone().real()),
            }
        }
        Err(_) => SymmetricEigen::new(m),
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_eigen(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Same as [`eigh`] for a real symmetric matrix.
pub fn eigh_real(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = hermitian_eigen(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    eigh(a).0.first().copied().unwrap_or(0.0)
}

/// `V f(Λ) V†` for Hermitian `a`.
pub fn hermitian_fn(a: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (vals, vecs) = eigh(a);
    let n = vals.len();
    let mut d = CMat::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        d[(i, i)] = f(*v);
    }
    &vecs * d * vecs.adjoint()
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_clip(a: &CMat) -> CMat {
    let out = hermitian_fn(a, |x| c(x.max(0.0)));
    hermitian_part(&out)
}

/// `exp(i·s·a)` for Hermitian `a`.
pub fn expi_hermitian(a: &CMat, s: f64) -> CMat {
    hermitian_fn(a, |x| C64::from_polar(1.0, s * x))
}

/// Orthogonal projector onto the span of eigenvectors whose eigenvalue passes `keep`.
pub fn spectral_projector(a: &CMat, keep: impl Fn(f64) -> bool) -> CMat {
    let out = hermitian_fn(a, |x| if keep(x) { c(1.0) } else { c(0.0) });
    hermitian_part(&out)
}

/// Absolute rank cutoff for a matrix whose largest singular value is `sigma_max`.
pub fn rank_cutoff(sigma_max: f64) -> f64 {
    (tolerance::RANK * sigma_max).max(tolerance::RANK_FLOOR)
}

/// Orthonormal basis (as columns) of the null space of a real matrix.
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // The SVD is thin; pad with zero rows so that V is square.
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(padded);
    let v_t = svd.v_t.expect("requested V");
    let sigma = &svd.singular_values;
    let cutoff = rank_cutoff(sigma.max());
    let null: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= cutoff).collect();
    let mut out = DMatrix::zeros(cols, null.len());
    for (k, &i) in null.iter().enumerate() {
        out.set_column(k, &v_t.row(i).transpose());
    }
    out
}

/// Orthonormal basis (as columns) of the column space of a real matrix.
pub fn range(m: &DMatrix<f64>) -> DMatrix<f64> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = svd(m.clone());
    let u = svd.u.expect("requested U");
    let sigma = &svd.singular_values;
    let cutoff = rank_cutoff(sigma.max());
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cutoff).collect();
    let mut out = DMatrix::zeros(rows, keep.len());
    for (k, &i) in keep.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Numerical rank of a real matrix.
pub fn rank(m: &DMatrix<f64>) -> usize {
    range(m).ncols()
}

/// Orthonormal basis (as columns) of the null space of a complex matrix, in `C^cols`.
pub fn complex_null_space(m: &CMat) -> CMat {
    let cols = m.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(cols, cols);
    }
    let padded = if m.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(padded);
    let v_t = svd.v_t.expect("requested V");
    let sigma = &svd.singular_values;
    let cutoff = rank_cutoff(sigma.max());
    let null: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= cutoff).collect();
    let mut out = CMat::zeros(cols, null.len());
    for (k, &i) in null.iter().enumerate() {
        out.set_column(k, &v_t.row(i).adjoint());
    }
    out
}

/// Rank of a set of complex vectors (columns), over the complex field.
pub fn complex_rank(m: &CMat) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sigma = svd(m.clone()).singular_values;
    let cutoff = rank_cutoff(sigma.max());
    sigma.iter().filter(|&&s| s > cutoff).count()
}

pub fn dvec(values: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(values)
}
