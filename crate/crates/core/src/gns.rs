//! GNS representations of states on finite-dimensional C*-algebras.
//!
//! A state on a C*-algebra `A` is carried by a [`StateFunctional`] on its
//! self-adjoint part and extended complex-linearly: `ω(X) = tr(ρ X)`. The
//! Hilbert space is `A / J_ω` with `⟨[X], [Y]⟩ = ω(X†Y)`; it is finite
//! dimensional, so no completion is taken. Cosets are expressed in an
//! orthonormal basis read off the eigenvectors of the Gram form.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ljb_core::{self, random_element, CStarAlgebra};
use crate::linalg::{self, hs_norm, trace_product, CMat, C64};
use crate::matspace::MatrixSubspace;
use crate::reduction::ReductionResult;
use crate::states::{self, first_nonvanishing, StateFunctional};
use crate::tolerance;

const COMMUTANT_SEED: u64 = 0x6e73_636f_6d6d;
const VERIFY_SEED: u64 = 0x6e73_7665_7269;

/// Orthonormal coset basis of `span(basis) / null(ω(X†Y))`.
struct CosetBasis {
    reps: Vec<CMat>,
    null: Vec<CMat>,
    eigenvalues: Vec<f64>,
}

fn omega_c(rho: &CMat, x: &CMat) -> C64 {
    trace_product(rho, x)
}

/// `⟨Y, Z⟩ = ω(Y† Z)` given `Zρ`, as the Frobenius pairing of `Y` with `Zρ`.
fn pair(y: &CMat, z_rho: &CMat) -> C64 {
    y.iter().zip(z_rho.iter()).map(|(a, b)| a.conj() * b).sum()
}

fn coset_basis(basis: &[CMat], rho: &CMat) -> CosetBasis {
    let d = basis.len();
    let mut g = CMat::zeros(d, d);
    for k in 0..d {
        for l in k..d {
            let v = omega_c(rho, &(basis[k].adjoint() * &basis[l]));
            g[(k, l)] = v;
            g[(l, k)] = v.conj();
        }
    }
    let (vals, vecs) = linalg::eigh(&g);
    let mut order: Vec<usize> = (0..d).collect();
    order.reverse();
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tolerance::scaled(tolerance::GELFAND) * top;
    let mut reps = Vec::new();
    let mut null = Vec::new();
    let mut eigenvalues = Vec::with_capacity(d);
    for &j in &order {
        let mu = vals[j];
        eigenvalues.push(mu);
        let mut v: Vec<C64> = vecs.column(j).iter().copied().collect();
        fix_phase(&mut v);
        let x = combine(basis, &v);
        if mu > cutoff && top > 0.0 {
            reps.push(x.unscale(mu.sqrt()));
        } else {
            null.push(x);
        }
    }
    CosetBasis { reps, null, eigenvalues }
}

/// Rotates `v` so its first largest-modulus entry is real and positive.
fn fix_phase(v: &mut [C64]) {
    let top = v.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    if top == 0.0 {
        return;
    }
    if let Some(p) = v.iter().find(|z| z.norm() >= top * (1.0 - 1e-9)) {
        let phase = p.conj() / p.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn combine(basis: &[CMat], coeffs: &[C64]) -> CMat {
    let n = basis.first().map(|b| b.nrows()).unwrap_or(0);
    let mut out = CMat::zeros(n, n);
    for (b, k) in basis.iter().zip(coeffs) {
        out += b * *k;
    }
    out
}

/// Matrix of left multiplication by `a` in the coset basis `reps`.
fn left_mult(reps: &[CMat], rho: &CMat, a: &CMat) -> CMat {
    let d = reps.len();
    let mut m = CMat::zeros(d, d);
    for j in 0..d {
        let z_rho = a * &reps[j] * rho;
        for i in 0..d {
            m[(i, j)] = pair(&reps[i], &z_rho);
        }
    }
    m
}

fn coset_coords(reps: &[CMat], rho: &CMat, x: &CMat) -> DVector<C64> {
    let x_rho = x * rho;
    DVector::from_iterator(reps.len(), reps.iter().map(|y| pair(y, &x_rho)))
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

fn check_state_on(a: &CStarAlgebra, omega: &StateFunctional) -> Result<()> {
    if !omega.algebra().carrier().same_as(&a.self_adjoint_part()) {
        return Err(Error::AlgebraMismatch);
    }
    states::require_state(omega, "gns")
}

/// `{X ∈ A : ω(X†X) = 0}`, as a complex-linear subspace.
pub fn gelfand_ideal(a: &CStarAlgebra, omega: &StateFunctional) -> Result<MatrixSubspace> {
    check_state_on(a, omega)?;
    let cb = coset_basis(&a.complex_basis(), omega.rho());
    let ideal = complex_span(a, &cb.null);
    verify_left_ideal(a, &ideal)?;
    Ok(ideal)
}

fn complex_span(a: &CStarAlgebra, gens: &[CMat]) -> MatrixSubspace {
    let amb = a.carrier().ambient();
    let all: Vec<CMat> = gens
        .iter()
        .flat_map(|x| [x.clone(), x.map(|z| z * linalg::I)])
        .collect();
    MatrixSubspace::span_unchecked(amb, &all, false)
}

fn verify_left_ideal(a: &CStarAlgebra, ideal: &MatrixSubspace) -> Result<()> {
    let tol = tolerance::scaled(tolerance::MEMBER);
    for b in a.complex_basis() {
        for (k, x) in ideal.basis().iter().enumerate() {
            let p = &b * x;
            let r = ideal.residual(&p);
            if r > tol * hs_norm(&p).max(1.0) {
                return Err(Error::TheoremViolation {
                    theorem: "Gelfand ideal is a left ideal",
                    detail: format!("basis element {k}: residual {r:.3e}"),
                });
            }
        }
    }
    Ok(())
}

/// The GNS triple of a state on a C*-algebra.
#[derive(Clone, Debug)]
pub struct GnsRep {
    algebra: CStarAlgebra,
    state: StateFunctional,
    basis: Vec<CMat>,
    gelfand_ideal: MatrixSubspace,
    coset_reps: Vec<CMat>,
    rep_matrices: Vec<CMat>,
    cyclic_vector: DVector<C64>,
    gram_eigenvalues: Vec<f64>,
}

pub fn gns(a: &CStarAlgebra, omega: &StateFunctional) -> Result<GnsRep> {
    check_state_on(a, omega)?;
    let unit = a
        .unit()
        .cloned()
        .ok_or_else(|| Error::Precondition("algebra has no unit".into()))?;
    let basis = a.complex_basis();
    let rho = omega.rho();
    let cb = coset_basis(&basis, rho);
    let gelfand_ideal = complex_span(a, &cb.null);
    verify_left_ideal(a, &gelfand_ideal)?;
    let rep_matrices = basis.iter().map(|b| left_mult(&cb.reps, rho, b)).collect();
    let cyclic_vector = coset_coords(&cb.reps, rho, &unit);
    let rep = GnsRep {
        algebra: a.clone(),
        state: omega.clone(),
        basis,
        gelfand_ideal,
        coset_reps: cb.reps,
        rep_matrices,
        cyclic_vector,
        gram_eigenvalues: cb.eigenvalues,
    };
    let v = rep.verify();
    if !v.passed {
        return Err(Error::TheoremViolation {
            theorem: "GNS representation invariants",
            detail: format!("{v:?}"),
        });
    }
    Ok(rep)
}

/// Residuals of the representation invariants.
#[derive(Clone, Debug, Serialize)]
pub struct GnsVerification {
    pub homomorphism: f64,
    pub star: f64,
    pub unit: f64,
    pub state_recovery: f64,
    pub cyclic_rank: usize,
    pub dimension_identity: bool,
    pub worst: f64,
    pub passed: bool,
}

impl GnsRep {
    pub fn algebra(&self) -> &CStarAlgebra {
        &self.algebra
    }

    pub fn state(&self) -> &StateFunctional {
        &self.state
    }

    pub fn hilbert_dim(&self) -> usize {
        self.coset_reps.len()
    }

    /// Hermitian orthonormal basis of the algebra indexing `rep_matrices`.
    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn gelfand_ideal(&self) -> &MatrixSubspace {
        &self.gelfand_ideal
    }

    /// Representatives `Yⱼ` of the orthonormal coset basis.
    pub fn coset_reps(&self) -> &[CMat] {
        &self.coset_reps
    }

    pub fn rep_matrices(&self) -> &[CMat] {
        &self.rep_matrices
    }

    /// Coordinates of `[𝟙]`.
    pub fn cyclic_vector(&self) -> &DVector<C64> {
        &self.cyclic_vector
    }

    /// Eigenvalues of the Gram form, descending.
    pub fn gram_eigenvalues(&self) -> &[f64] {
        &self.gram_eigenvalues
    }

    /// `π(x)` for any member `x` of the algebra.
    pub fn represent(&self, x: &CMat) -> CMat {
        left_mult(&self.coset_reps, self.state.rho(), x)
    }

    /// Coordinates of the coset `[x]`.
    pub fn vector(&self, x: &CMat) -> DVector<C64> {
        coset_coords(&self.coset_reps, self.state.rho(), x)
    }

    pub fn omega(&self, x: &CMat) -> C64 {
        omega_c(self.state.rho(), x)
    }

    pub fn verify(&self) -> GnsVerification {
        let d = self.hilbert_dim();
        let rho = self.state.rho();
        let mut homomorphism = 0.0_f64;
        let pairs: Vec<(CMat, CMat)> = if self.basis.len() <= 9 {
            self.basis
                .iter()
                .flat_map(|x| self.basis.iter().map(move |y| (x.clone(), y.clone())))
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
            let carrier = self.algebra.carrier();
            (0..24)
                .map(|_| (random_element(carrier, &mut rng), random_element(carrier, &mut rng)))
                .collect()
        };
        for (x, y) in &pairs {
            let lhs = self.represent(&(x * y));
            let rhs = self.represent(x) * self.represent(y);
            homomorphism = homomorphism.max(max_abs(&(lhs - rhs)));
        }
        let mut star = 0.0_f64;
        let mut state_recovery = 0.0_f64;
        let omega = &self.cyclic_vector;
        let mut images = CMat::zeros(d, self.basis.len());
        for (k, (b, p)) in self.basis.iter().zip(&self.rep_matrices).enumerate() {
            star = star.max(max_abs(&(p - p.adjoint())));
            let pv = p * omega;
            let recovered = omega.dotc(&pv);
            state_recovery = state_recovery.max((recovered - omega_c(rho, b)).norm());
            images.set_column(k, &pv);
        }
        let unit = match self.algebra.unit() {
            Some(u) => max_abs(&(self.represent(u) - CMat::identity(d, d))),
            None => f64::INFINITY,
        };
        let cyclic_rank = linalg::complex_rank(&images);
        let dimension_identity = d + self.gelfand_ideal.complex_dim() == self.algebra.complex_dim();
        let worst = homomorphism.max(star).max(unit).max(state_recovery);
        let passed = worst <= tolerance::scaled(tolerance::AXIOM) && cyclic_rank == d && dimension_identity;
        GnsVerification {
            homomorphism,
            star,
            unit,
            state_recovery,
            cyclic_rank,
            dimension_identity,
            worst,
            passed,
        }
    }
}

/// Complex dimension of `{M : M π(A) = π(A) M for all A}`.
///
/// `M` is first restricted to be block diagonal in the eigenbasis of a random
/// self-adjoint element of `π(A)`; the remaining equations come from two more
/// random elements and the result is checked against every basis element.
pub fn commutant_dim(rep: &GnsRep) -> usize {
    let d = rep.hilbert_dim();
    if d <= 1 {
        return d;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(COMMUTANT_SEED);
    let random_rep = |rng: &mut ChaCha8Rng| {
        let mut r = CMat::zeros(d, d);
        for p in &rep.rep_matrices {
            let g: f64 = StandardNormal.sample(rng);
            r += p.scale(g);
        }
        r
    };
    let r0 = random_rep(&mut rng);
    let (vals, u) = linalg::eigh(&r0);
    let spread = (vals[d - 1] - vals[0]).abs().max(1.0);
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=d {
        if i == d || vals[i] - vals[i - 1] > tolerance::CLUSTER * spread {
            blocks.push((start, i));
            start = i;
        }
    }
    let rotate = |p: &CMat| u.adjoint() * p * &u;
    let all: Vec<CMat> = rep.rep_matrices.iter().map(rotate).collect();
    let sampled: Vec<CMat> = (0..2).map(|_| rotate(&random_rep(&mut rng))).collect();
    let sol = block_commutant(&blocks, &sampled, d);
    if commutes_with_all(&sol, &all) {
        sol.len()
    } else {
        block_commutant(&blocks, &all, d).len()
    }
}

fn block_commutant(blocks: &[(usize, usize)], gens: &[CMat], d: usize) -> Vec<CMat> {
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for &(s, e) in blocks {
        for r in s..e {
            for t in s..e {
                slots.push((r, t));
            }
        }
    }
    let m = slots.len();
    let mut eq = CMat::zeros(gens.len() * d * d, m);
    for (g_idx, g) in gens.iter().enumerate() {
        let base = g_idx * d * d;
        for (col, &(r, t)) in slots.iter().enumerate() {
            // (M G − G M)_{r s} gains G_{t s} from M_{r t}; (·)_{q t} loses G_{q r}.
            for s in 0..d {
                eq[(base + r * d + s, col)] += g[(t, s)];
            }
            for q in 0..d {
                eq[(base + q * d + t, col)] -= g[(q, r)];
            }
        }
    }
    let ns = linalg::complex_null_space(&eq);
    (0..ns.ncols())
        .map(|k| {
            let mut mm = CMat::zeros(d, d);
            for (row, &(r, t)) in slots.iter().enumerate() {
                mm[(r, t)] = ns[(row, k)];
            }
            mm
        })
        .collect()
}

fn commutes_with_all(sol: &[CMat], gens: &[CMat]) -> bool {
    let tol = tolerance::scaled(tolerance::AXIOM);
    sol.iter().all(|m| {
        gens.iter()
            .all(|g| max_abs(&(m * g - g * m)) <= tol * (1.0 + max_abs(g)))
    })
}

pub fn is_irreducible(rep: &GnsRep) -> bool {
    commutant_dim(rep) == 1
}

pub fn is_pure(a: &CStarAlgebra, omega: &StateFunctional) -> Result<bool> {
    Ok(is_irreducible(&gns(a, omega)?))
}

/// Comparison of the reduced GNS space with `(N_J + J)^ℂ` modulo the Gelfand
/// ideal of an extension.
#[derive(Clone, Debug, Serialize)]
pub struct GnsEquivalenceCertificate {
    pub reduced_dim: usize,
    pub carrier_dim: usize,
    pub generator_match: f64,
    pub gram_residual: f64,
    pub unitarity_residual: f64,
    pub intertwining_residual: f64,
    pub passed: bool,
}

/// Builds the GNS space of `omega_tilde` on the reduced C*-algebra and the
/// space `(N_J + J)^ℂ / ((N_J + J)^ℂ ∩ J_ω)`, and matches them on the cosets
/// of the reduced basis.
pub fn reduced_gns_equivalence(
    f: &CStarAlgebra,
    r: &ReductionResult,
    omega: &StateFunctional,
    omega_tilde: &StateFunctional,
) -> Result<GnsEquivalenceCertificate> {
    check_state_on(f, omega)?;
    if !omega_tilde.algebra().carrier().same_as(r.quotient.carrier()) {
        return Err(Error::AlgebraMismatch);
    }
    if r.quotient.dim() == 0 {
        return Err(Error::Precondition("reduced algebra is zero".into()));
    }
    if let Some((index, value)) = first_nonvanishing(omega, &r.reducing_ideal)? {
        return Err(Error::Precondition(format!(
            "omega does not vanish on the reducing ideal: element {index} gives {value:.3e}"
        )));
    }
    let tol = tolerance::scaled(tolerance::STATE);
    for (k, q) in r.quotient.basis().iter().enumerate() {
        let diff = (omega.eval(q) - omega_tilde.eval(q)).abs();
        if diff > tol {
            return Err(Error::Precondition(format!(
                "omega does not induce omega_tilde: basis element {k} differs by {diff:.3e}"
            )));
        }
    }
    let rho = omega.rho();
    for (k, x) in r.reducing_ideal.basis().iter().enumerate() {
        let v = omega_c(rho, &(x.adjoint() * x)).re;
        if v.abs() > tol * hs_norm(x).powi(2).max(1.0) {
            return Err(Error::Precondition(format!(
                "Gelfand ideal does not contain the reducing ideal: element {k} has ω(x†x) = {v:.3e}"
            )));
        }
    }

    let reduced_alg = ljb_core::complexify(&r.quotient)?;
    let reduced = gns(&reduced_alg, omega_tilde)?;
    let w = r.normalizer.carrier().sum(&r.source)?.complexify();
    let carrier = coset_basis(&w.complex_basis(), rho);

    let gens = r.quotient.basis();
    let m = gens.len();
    let d = reduced.hilbert_dim();
    let d2 = carrier.reps.len();
    let mut cm = CMat::zeros(d, m);
    let mut cm2 = CMat::zeros(d2, m);
    for (k, q) in gens.iter().enumerate() {
        cm.set_column(k, &reduced.vector(q));
        cm2.set_column(k, &coset_coords(&carrier.reps, rho, q));
    }
    let gram_residual = max_abs(&(cm.adjoint() * &cm - cm2.adjoint() * &cm2));
    let mut cert = GnsEquivalenceCertificate {
        reduced_dim: d,
        carrier_dim: d2,
        generator_match: f64::INFINITY,
        gram_residual,
        unitarity_residual: f64::INFINITY,
        intertwining_residual: f64::INFINITY,
        passed: false,
    };
    if d != d2 {
        return Ok(cert);
    }
    let factor = linalg::svd(cm.clone());
    let cutoff = linalg::rank_cutoff(factor.singular_values.max());
    let pinv = factor
        .pseudo_inverse(cutoff)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let u = &cm2 * pinv;
    let eye = CMat::identity(d, d);
    cert.generator_match = max_abs(&(&u * &cm - &cm2));
    cert.unitarity_residual = max_abs(&(u.adjoint() * &u - &eye)).max(max_abs(&(&u * u.adjoint() - &eye)));
    let mut inter = 0.0_f64;
    for q in gens {
        let lhs = &u * reduced.represent(q);
        let rhs = left_mult(&carrier.reps, rho, q) * &u;
        inter = inter.max(max_abs(&(lhs - rhs)));
    }
    cert.intertwining_residual = inter;
    let bound = tolerance::scaled(tolerance::AXIOM);
    cert.passed = cert.generator_match <= bound
        && cert.gram_residual <= bound
        && cert.unitarity_residual <= bound
        && cert.intertwining_residual <= bound;
    Ok(cert)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityVerdict {
    PurePossible,
    PureImpossible,
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub verdict: PurityVerdict,
    /// Complex dimension of `N_J^ℂ + J^ℂ + J_ω + J_ω*`.
    pub s_dim: usize,
    pub f_dim: usize,
}

/// Compares `S = N_J^ℂ + J^ℂ + J_ω + J_ω*` with `F`; a strict subspace means
/// `omega` cannot be pure. For a pure state `J_ω + J_ω*` is the kernel of
/// `omega` and `N_J^ℂ` contains the unit, so `S = F`. Without `J_ω*` the
/// implication fails: the vector state `E22` on `M2` with `N_J^ℂ` the
/// diagonals and `J = span{E11}` gives a three-dimensional sum.
pub fn purity_obstruction(
    f: &CStarAlgebra,
    n: &MatrixSubspace,
    j: &MatrixSubspace,
    omega: &StateFunctional,
) -> Result<PurityReport> {
    let jw = gelfand_ideal(f, omega)?;
    let adj: Vec<CMat> = jw.basis().iter().map(|x| x.adjoint()).collect();
    let jw_star = MatrixSubspace::span(jw.ambient(), &adj, false)?;
    let s = n.complexify().sum(&j.complexify())?.sum(&jw)?.sum(&jw_star)?;
    let s_dim = s.complex_dim();
    let f_dim = f.complex_dim();
    let verdict = if s_dim < f_dim {
        PurityVerdict::PureImpossible
    } else {
        PurityVerdict::PurePossible
    };
    Ok(PurityReport { verdict, s_dim, f_dim })
}

/// Pure states on `F` extending the state `omega_tilde` of the reduced
/// algebra, built as vector states from the eigenvectors of the lifted density
/// on `N_J`. Candidates that fail to extend or are not pure are dropped.
pub fn pure_extensions(
    f: &CStarAlgebra,
    r: &ReductionResult,
    omega_tilde: &StateFunctional,
) -> Result<Vec<StateFunctional>> {
    let lifted = states::lift_reduced_state(omega_tilde, r)?;
    let f_sa = ljb_core::LjbAlgebra::new(f.self_adjoint_part(), *r.normalizer.params())?;
    let (vals, vecs) = linalg::eigh(lifted.rho());
    let top = vals.last().copied().unwrap_or(0.0);
    let tol = tolerance::scaled(tolerance::STATE);
    let mut out = Vec::new();
    for (k, mu) in vals.iter().enumerate() {
        if *mu <= tolerance::scaled(tolerance::PSD) * top.max(1.0) {
            continue;
        }
        let psi = vecs.column(k);
        let rho = psi * psi.adjoint();
        let candidate = StateFunctional::from_density(&f_sa, &rho)?;
        if !states::is_state(&candidate).is_state {
            continue;
        }
        let extends = r
            .normalizer
            .basis()
            .iter()
            .zip(lifted.values())
            .all(|(b, v)| (candidate.eval(b) - v).abs() <= tol);
        if extends && is_pure(f, &candidate)? {
            out.push(candidate);
        }
    }
    Ok(out)
}
