//! Real-linear subspaces of `n × n` complex matrices.
//!
//! Every subspace keeps an orthonormal basis under `⟨A, B⟩ = Re tr(A† B)`
//! together with the same basis as columns of a real coordinate matrix, so
//! projections and null spaces reduce to real dense linear algebra.
//! Coordinates list the real parts column-major, then the imaginary parts.
//!
//! Complex-linear subspaces are real subspaces closed under multiplication
//! by `i`; their complex dimension is half the real one.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, hs_norm, CMat, C64, I};
use crate::tolerance;

/// Basis coordinates below this magnitude are set to zero.
const SNAP: f64 = 1e-15;

/// Matrix side length plus the derived real dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmbientSpace {
    pub n: usize,
}

impl AmbientSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAmbient);
        }
        Ok(AmbientSpace { n })
    }

    /// Real dimension of all `n × n` complex matrices.
    pub fn field_dim(&self) -> usize {
        2 * self.n * self.n
    }

    /// Real dimension of the Hermitian matrices.
    pub fn herm_dim(&self) -> usize {
        self.n * self.n
    }

    pub fn check(&self, m: &CMat) -> Result<()> {
        if m.nrows() != self.n || m.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                n: self.n,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        Ok(())
    }

    pub fn coords(&self, m: &CMat) -> DVector<f64> {
        let nn = self.n * self.n;
        let mut v = DVector::zeros(2 * nn);
        for (k, z) in m.iter().enumerate() {
            v[k] = z.re;
            v[nn + k] = z.im;
        }
        v
    }

    pub fn from_coords(&self, v: &[f64]) -> CMat {
        let nn = self.n * self.n;
        CMat::from_iterator(self.n, self.n, (0..nn).map(|k| C64::new(v[k], v[nn + k])))
    }
}

#[derive(Clone, Debug)]
pub struct MatrixSubspace {
    ambient: AmbientSpace,
    basis: Vec<CMat>,
    hermitian: bool,
    /// Orthonormal columns: coordinates of `basis`.
    q: DMatrix<f64>,
}

impl MatrixSubspace {
    pub fn zero(ambient: AmbientSpace) -> Self {
        MatrixSubspace {
            ambient,
            basis: Vec::new(),
            hermitian: true,
            q: DMatrix::zeros(ambient.field_dim(), 0),
        }
    }

    /// Real span of `generators`. With `hermitian` set every generator must be
    /// Hermitian and the basis is Hermitian as well.
    pub fn span(ambient: AmbientSpace, generators: &[CMat], hermitian: bool) -> Result<Self> {
        for (index, g) in generators.iter().enumerate() {
            ambient.check(g)?;
            if hermitian {
                let deviation = linalg::hermitian_deviation(g);
                if deviation > tolerance::scaled(tolerance::HERMITIAN) {
                    return Err(Error::NotHermitian { index, deviation });
                }
            }
        }
        let mut m = DMatrix::zeros(ambient.field_dim(), generators.len());
        for (j, g) in generators.iter().enumerate() {
            m.set_column(j, &ambient.coords(g));
        }
        Ok(Self::from_columns(ambient, &linalg::range(&m), hermitian))
    }

    /// Like [`span`](Self::span), without validating the flag. Used for
    /// generators that are Hermitian up to accumulated round-off.
    pub(crate) fn span_unchecked(ambient: AmbientSpace, generators: &[CMat], hermitian: bool) -> Self {
        let mut m = DMatrix::zeros(ambient.field_dim(), generators.len());
        for (j, g) in generators.iter().enumerate() {
            let g = if hermitian { linalg::hermitian_part(g) } else { g.clone() };
            m.set_column(j, &ambient.coords(&g));
        }
        Self::from_columns(ambient, &linalg::range(&m), hermitian)
    }

    /// Builds a subspace from orthonormal coordinate columns.
    fn from_columns(ambient: AmbientSpace, cols: &DMatrix<f64>, hermitian: bool) -> Self {
        // Flush round-off so that structurally zero entries are exactly zero.
        let cols = cols.map(|x| if x.abs() < SNAP { 0.0 } else { x });
        let mut basis: Vec<CMat> = (0..cols.ncols())
            .map(|j| ambient.from_coords(cols.column(j).as_slice()))
            .collect();
        let q = if hermitian {
            for b in basis.iter_mut() {
                *b = linalg::hermitian_part(b);
            }
            let mut q = DMatrix::zeros(ambient.field_dim(), basis.len());
            for (j, b) in basis.iter().enumerate() {
                q.set_column(j, &ambient.coords(b));
            }
            q
        } else {
            cols
        };
        MatrixSubspace {
            ambient,
            basis,
            hermitian,
            q,
        }
    }

    /// All Hermitian `n × n` matrices.
    pub fn hermitian_matrices(ambient: AmbientSpace) -> Self {
        let n = ambient.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut gens = Vec::with_capacity(n * n);
        for i in 0..n {
            gens.push(linalg::unit(n, i, i));
            for j in (i + 1)..n {
                let mut re = linalg::zeros(n);
                re[(i, j)] = linalg::c(s);
                re[(j, i)] = linalg::c(s);
                gens.push(re);
                let mut im = linalg::zeros(n);
                im[(i, j)] = C64::new(0.0, -s);
                im[(j, i)] = C64::new(0.0, s);
                gens.push(im);
            }
        }
        Self::orthonormal_unchecked(ambient, gens, true)
    }

    /// All complex `n × n` matrices.
    pub fn all_matrices(ambient: AmbientSpace) -> Self {
        let n = ambient.n;
        let mut gens = Vec::with_capacity(2 * n * n);
        for i in 0..n {
            for j in 0..n {
                gens.push(linalg::unit(n, i, j));
                gens.push(linalg::unit(n, i, j).map(|z| z * I));
            }
        }
        Self::orthonormal_unchecked(ambient, gens, false)
    }

    fn orthonormal_unchecked(ambient: AmbientSpace, basis: Vec<CMat>, hermitian: bool) -> Self {
        let mut q = DMatrix::zeros(ambient.field_dim(), basis.len());
        for (j, b) in basis.iter().enumerate() {
            q.set_column(j, &ambient.coords(b));
        }
        MatrixSubspace {
            ambient,
            basis,
            hermitian,
            q,
        }
    }

    pub fn ambient(&self) -> AmbientSpace {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.ambient.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Coordinate matrix with orthonormal columns.
    pub fn coordinate_basis(&self) -> &DMatrix<f64> {
        &self.q
    }

    fn check_same(&self, other: &MatrixSubspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient.n,
                right: other.ambient.n,
            });
        }
        Ok(())
    }

    /// Coefficients of the orthogonal projection of `v` in this basis.
    pub fn coefficients(&self, v: &CMat) -> DVector<f64> {
        self.q.transpose() * self.ambient.coords(v)
    }

    pub fn combine(&self, coeffs: &[f64]) -> CMat {
        let mut out = linalg::zeros(self.n());
        for (b, t) in self.basis.iter().zip(coeffs) {
            out += b.scale(*t);
        }
        out
    }

    pub fn project(&self, v: &CMat) -> CMat {
        let coeffs = self.coefficients(v);
        self.combine(coeffs.as_slice())
    }

    /// Hilbert–Schmidt distance from `v` to the subspace.
    pub fn residual(&self, v: &CMat) -> f64 {
        let x = self.ambient.coords(v);
        let p = &self.q * (self.q.transpose() * &x);
        (x - p).norm()
    }

    /// Membership test with relative tolerance; returns the residual as well.
    pub fn member(&self, v: &CMat) -> Result<(bool, f64)> {
        self.ambient.check(v)?;
        let r = self.residual(v);
        let tol = tolerance::scaled(tolerance::MEMBER) * hs_norm(v).max(1.0);
        Ok((r <= tol, r))
    }

    pub fn contains_matrix(&self, v: &CMat) -> bool {
        self.member(v).map(|(ok, _)| ok).unwrap_or(false)
    }

    /// First basis element of `other` that is not a member, with its residual.
    pub fn first_outside(&self, other: &MatrixSubspace) -> Option<(usize, f64)> {
        other
            .basis
            .iter()
            .enumerate()
            .map(|(i, b)| (i, self.residual(b)))
            .find(|(_, r)| *r > tolerance::scaled(tolerance::MEMBER))
    }

    pub fn contains(&self, other: &MatrixSubspace) -> bool {
        self.ambient == other.ambient && self.first_outside(other).is_none()
    }

    /// Errors with [`Error::NotContained`] unless `other ⊆ self`.
    pub fn require_contains(&self, other: &MatrixSubspace, what: &'static str) -> Result<()> {
        self.check_same(other)?;
        match self.first_outside(other) {
            None => Ok(()),
            Some((index, residual)) => Err(Error::NotContained {
                what,
                index,
                residual,
            }),
        }
    }

    /// Subspace equality (containment both ways).
    pub fn same_as(&self, other: &MatrixSubspace) -> bool {
        self.dim() == other.dim() && self.contains(other) && other.contains(self)
    }

    pub fn intersect(&self, other: &MatrixSubspace) -> Result<MatrixSubspace> {
        self.check_same(other)?;
        let hermitian = self.hermitian || other.hermitian;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ambient));
        }
        let (da, db) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(self.ambient.field_dim(), da + db);
        m.view_mut((0, 0), (m.nrows(), da)).copy_from(&self.q);
        m.view_mut((0, da), (m.nrows(), db)).copy_from(&(-&other.q));
        let ns = linalg::null_space(&m);
        if ns.ncols() == 0 {
            return Ok(Self::zero(self.ambient));
        }
        // Average the two equal representatives to halve the error.
        let xa = &self.q * ns.rows(0, da);
        let xb = &other.q * ns.rows(da, db);
        let joint = (xa + xb) * 0.5;
        Ok(Self::from_columns(self.ambient, &linalg::range(&joint), hermitian))
    }

    pub fn sum(&self, other: &MatrixSubspace) -> Result<MatrixSubspace> {
        self.check_same(other)?;
        let hermitian = self.hermitian && other.hermitian;
        let (da, db) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(self.ambient.field_dim(), da + db);
        m.view_mut((0, 0), (m.nrows(), da)).copy_from(&self.q);
        m.view_mut((0, da), (m.nrows(), db)).copy_from(&other.q);
        Ok(Self::from_columns(self.ambient, &linalg::range(&m), hermitian))
    }

    /// `K^⊥ ∩ self` for `K ⊆ self`.
    pub fn complement_of(&self, k: &MatrixSubspace) -> Result<MatrixSubspace> {
        self.require_contains(k, "complement")?;
        let x = &self.q - &k.q * (k.q.transpose() * &self.q);
        Ok(Self::from_columns(self.ambient, &linalg::range(&x), self.hermitian))
    }

    /// Splits `v ∈ self` as `representative + kernel_part` with `kernel_part ∈ k`
    /// and `representative ⊥ k`.
    pub fn coset_decompose(&self, k: &MatrixSubspace, v: &CMat) -> Result<(CMat, CMat)> {
        self.require_contains(k, "coset kernel")?;
        let (ok, residual) = self.member(v)?;
        if !ok {
            return Err(Error::NotMember {
                what: "coset_decompose",
                residual,
            });
        }
        let kernel_part = k.project(v);
        let representative = v - &kernel_part;
        Ok((representative, kernel_part))
    }

    /// True when `i·b` lies in the subspace for every basis element.
    pub fn is_complex(&self) -> bool {
        self.basis.iter().all(|b| self.residual(&b.map(|z| z * I)) <= tolerance::scaled(tolerance::MEMBER))
    }

    /// True when `b†` lies in the subspace for every basis element.
    pub fn is_star_closed(&self) -> bool {
        self.basis
            .iter()
            .all(|b| self.residual(&b.adjoint()) <= tolerance::scaled(tolerance::MEMBER))
    }

    /// Complex dimension of a complex-linear subspace.
    pub fn complex_dim(&self) -> usize {
        self.dim() / 2
    }

    /// Complex span `self + i·self`.
    pub fn complexify(&self) -> MatrixSubspace {
        let mut gens = self.basis.clone();
        gens.extend(self.basis.iter().map(|b| b.map(|z| z * I)));
        Self::span_unchecked(self.ambient, &gens, false)
    }

    /// Hermitian elements of the subspace.
    pub fn hermitian_part(&self) -> MatrixSubspace {
        if self.hermitian {
            return self.clone();
        }
        let herm = Self::hermitian_matrices(self.ambient);
        let mut out = self.intersect(&herm).expect("same ambient");
        out.hermitian = true;
        out
    }

    /// For a complex, `*`-closed subspace the Hermitian part is also a
    /// complex orthonormal basis, under `⟨A, B⟩ = tr(A† B)`.
    pub fn complex_basis(&self) -> Vec<CMat> {
        self.hermitian_part().basis
    }

    /// Elements `a` of `self` with `f(a) = 0`, for a real-linear `f` given as a
    /// coordinate vector.
    pub fn kernel_of(&self, f: impl Fn(&CMat) -> Vec<f64>) -> MatrixSubspace {
        if self.is_zero() {
            return self.clone();
        }
        let images: Vec<Vec<f64>> = self.basis.iter().map(&f).collect();
        let rows = images.first().map(|v| v.len()).unwrap_or(0);
        let mut m = DMatrix::zeros(rows, self.dim());
        for (j, img) in images.iter().enumerate() {
            for (i, x) in img.iter().enumerate() {
                m[(i, j)] = *x;
            }
        }
        let ns = linalg::null_space(&m);
        let cols = &self.q * ns;
        Self::from_columns(self.ambient, &cols, self.hermitian)
    }

    /// Same ambient and subspace equal to the full Hermitian space.
    pub fn is_all_hermitian(&self) -> bool {
        self.hermitian && self.dim() == self.ambient.herm_dim()
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.q.transpose() * &self.q;
        let d = g - DMatrix::identity(self.dim(), self.dim());
        d.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}
