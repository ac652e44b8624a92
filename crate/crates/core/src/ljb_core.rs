//! Lie–Jordan structure on real subspaces of Hermitian matrices.
//!
//! With parameters `(λ, κ)` satisfying `κλ² = 1/4`:
//!
//! * `a ∘ b = (ab + ba)/2`
//! * `[a, b] = iλ(ab − ba)`
//! * `a · b = a ∘ b − i√κ [a, b]`, which is `ab` for `λ > 0` and `ba` for `λ < 0`.
//!
//! [`LjbAlgebra`] checks closure exhaustively on basis pairs at construction.
//! The randomized verifiers sample carrier elements and report worst relative
//! residuals instead of failing.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Product, Result, Witness};
use crate::linalg::{self, hs_norm, op_norm, CMat, I};
use crate::matspace::{AmbientSpace, MatrixSubspace};
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LjbParams {
    lambda: f64,
    kappa: f64,
}

impl LjbParams {
    pub fn new(lambda: f64, kappa: f64) -> Result<Self> {
        let err = |reason| Error::InvalidParams {
            lambda,
            kappa,
            reason,
        };
        if !lambda.is_finite() || !kappa.is_finite() {
            return Err(err("parameters must be finite"));
        }
        if kappa <= 0.0 {
            return Err(err("kappa must be positive"));
        }
        if (kappa * lambda * lambda - 0.25).abs() > 1e-12 {
            return Err(err("kappa * lambda^2 must equal 1/4"));
        }
        Ok(LjbParams { lambda, kappa })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl Default for LjbParams {
    fn default() -> Self {
        LjbParams {
            lambda: 0.5,
            kappa: 1.0,
        }
    }
}

pub(crate) fn jordan(a: &CMat, b: &CMat) -> CMat {
    (a * b + b * a).scale(0.5)
}

pub(crate) fn bracket(a: &CMat, b: &CMat, p: &LjbParams) -> CMat {
    (a * b - b * a).map(|z| z * I * p.lambda)
}

pub(crate) fn assoc(a: &CMat, b: &CMat, p: &LjbParams) -> CMat {
    let s = p.kappa.sqrt();
    jordan(a, b) - bracket(a, b, p).map(|z| z * I * s)
}

fn check_pair(a: &CMat, b: &CMat, hermitian: bool) -> Result<()> {
    let n = a.nrows();
    let amb = AmbientSpace::new(n)?;
    amb.check(a)?;
    amb.check(b)?;
    if hermitian {
        for (index, m) in [a, b].into_iter().enumerate() {
            let deviation = linalg::hermitian_deviation(m);
            if deviation > tolerance::scaled(tolerance::HERMITIAN) {
                return Err(Error::NotHermitian { index, deviation });
            }
        }
    }
    Ok(())
}

/// `(ab + ba)/2` for Hermitian `a`, `b`.
pub fn jordan_product(a: &CMat, b: &CMat) -> Result<CMat> {
    check_pair(a, b, true)?;
    Ok(jordan(a, b))
}

/// `iλ(ab − ba)` for Hermitian `a`, `b`.
pub fn lie_bracket(a: &CMat, b: &CMat, params: &LjbParams) -> Result<CMat> {
    check_pair(a, b, true)?;
    Ok(bracket(a, b, params))
}

/// `a ∘ b − i√κ [a, b]`, extended complex-bilinearly, so inputs may be any
/// complex matrices.
pub fn associative_product(a: &CMat, b: &CMat, params: &LjbParams) -> Result<CMat> {
    check_pair(a, b, false)?;
    let p = LjbParams::new(params.lambda, params.kappa)?;
    Ok(assoc(a, b, &p))
}

/// Gaussian element of `space`, normalized to unit Hilbert–Schmidt norm.
pub(crate) fn random_element(space: &MatrixSubspace, rng: &mut ChaCha8Rng) -> CMat {
    if space.is_zero() {
        return linalg::zeros(space.n());
    }
    let coeffs: Vec<f64> = (0..space.dim()).map(|_| StandardNormal.sample(rng)).collect();
    let m = space.combine(&coeffs);
    let norm = hs_norm(&m);
    if norm > 0.0 {
        m.unscale(norm)
    } else {
        m
    }
}

/// First basis pair whose product leaves `target`, by relative residual.
pub(crate) fn closure_witness(
    left: &[CMat],
    right: &[CMat],
    target: &MatrixSubspace,
    kinds: &[Product],
    params: &LjbParams,
    symmetric: bool,
) -> Option<Witness> {
    for (i, a) in left.iter().enumerate() {
        let start = if symmetric { i } else { 0 };
        for (j, b) in right.iter().enumerate().skip(start) {
            for &kind in kinds {
                let m = match kind {
                    Product::Jordan => jordan(a, b),
                    Product::Lie => bracket(a, b, params),
                    Product::Left => a * b,
                    Product::Right => b * a,
                    Product::Adjoint => a.adjoint(),
                };
                let residual = target.residual(&m);
                if residual > tolerance::scaled(tolerance::MEMBER) * hs_norm(&m).max(1.0) {
                    return Some(Witness {
                        left: i,
                        right: j,
                        product: kind,
                        residual,
                    });
                }
            }
        }
    }
    None
}

/// Worst relative closure residual over all basis pairs.
fn closure_residual(space: &MatrixSubspace, kind: Product, params: &LjbParams) -> f64 {
    let b = space.basis();
    let mut worst = 0.0_f64;
    for i in 0..b.len() {
        for j in i..b.len() {
            let m = match kind {
                Product::Jordan => jordan(&b[i], &b[j]),
                _ => bracket(&b[i], &b[j], params),
            };
            worst = worst.max(space.residual(&m) / hs_norm(&m).max(1.0));
        }
    }
    worst
}

/// Solves `Σ xᵢ op(bᵢ, bⱼ) = bⱼ` for all `j` in the least-squares sense and
/// returns the solution if it satisfies the system.
pub(crate) fn solve_unit(space: &MatrixSubspace, op: impl Fn(&CMat, &CMat) -> Vec<CMat>) -> Option<CMat> {
    let amb = space.ambient();
    let d = space.dim();
    if d == 0 {
        return Some(linalg::zeros(amb.n));
    }
    let eye = linalg::identity(amb.n);
    if space.contains_matrix(&eye) {
        return Some(eye);
    }
    let basis = space.basis();
    let fd = amb.field_dim();
    let copies = op(&basis[0], &basis[0]).len();
    let rows = d * fd * copies;
    let mut m = DMatrix::zeros(rows, d);
    let mut rhs = nalgebra::DVector::zeros(rows);
    for (j, bj) in basis.iter().enumerate() {
        let target = amb.coords(bj);
        for c in 0..copies {
            let off = (j * copies + c) * fd;
            rhs.rows_mut(off, fd).copy_from(&target);
        }
        for (i, bi) in basis.iter().enumerate() {
            for (c, img) in op(bi, bj).iter().enumerate() {
                let off = (j * copies + c) * fd;
                m.view_mut((off, i), (fd, 1)).copy_from(&amb.coords(img));
            }
        }
    }
    let svd = linalg::svd(m.clone());
    let cutoff = linalg::rank_cutoff(svd.singular_values.max());
    let x = svd.solve(&rhs, cutoff).ok()?;
    let e = space.combine(x.as_slice());
    let residual = (&m * &x - &rhs).norm();
    if residual <= tolerance::scaled(tolerance::MEMBER) * (d as f64).sqrt().max(1.0) * 10.0 {
        Some(e)
    } else {
        None
    }
}

/// A Lie–Jordan algebra realized on a Hermitian matrix subspace.
#[derive(Clone, Debug)]
pub struct LjbAlgebra {
    carrier: MatrixSubspace,
    params: LjbParams,
    unit: Option<CMat>,
}

impl LjbAlgebra {
    /// Validates closure under both products on every basis pair.
    pub fn new(carrier: MatrixSubspace, params: LjbParams) -> Result<Self> {
        if !carrier.is_hermitian() {
            let (index, deviation) = carrier
                .basis()
                .iter()
                .enumerate()
                .map(|(i, b)| (i, linalg::hermitian_deviation(b)))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            return Err(Error::NotHermitian { index, deviation });
        }
        let b = carrier.basis();
        if let Some(witness) = closure_witness(b, b, &carrier, &[Product::Jordan, Product::Lie], &params, true) {
            return Err(Error::NotClosed { witness });
        }
        Ok(Self::from_closed(carrier, params))
    }

    /// Skips the closure check; for carriers closed by construction.
    pub(crate) fn from_closed(carrier: MatrixSubspace, params: LjbParams) -> Self {
        let unit = solve_unit(&carrier, |a, b| vec![jordan(a, b)]);
        LjbAlgebra {
            carrier,
            params,
            unit,
        }
    }

    /// All Hermitian `n × n` matrices.
    pub fn full(n: usize, params: LjbParams) -> Result<Self> {
        let amb = AmbientSpace::new(n)?;
        Ok(Self::from_closed(MatrixSubspace::hermitian_matrices(amb), params))
    }

    /// Real diagonal `n × n` matrices.
    pub fn diagonal(n: usize, params: LjbParams) -> Result<Self> {
        let amb = AmbientSpace::new(n)?;
        let gens: Vec<CMat> = (0..n).map(|i| linalg::unit(n, i, i)).collect();
        Ok(Self::from_closed(MatrixSubspace::span(amb, &gens, true)?, params))
    }

    pub fn carrier(&self) -> &MatrixSubspace {
        &self.carrier
    }

    pub fn params(&self) -> &LjbParams {
        &self.params
    }

    /// The Jordan unit of the carrier. For carriers not containing `I` this
    /// is a projection, e.g. the unit of a corner.
    pub fn unit(&self) -> Option<&CMat> {
        self.unit.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn n(&self) -> usize {
        self.carrier.n()
    }

    pub fn basis(&self) -> &[CMat] {
        self.carrier.basis()
    }

    pub fn jordan(&self, a: &CMat, b: &CMat) -> CMat {
        jordan(a, b)
    }

    pub fn bracket(&self, a: &CMat, b: &CMat) -> CMat {
        bracket(a, b, &self.params)
    }

    pub fn contains(&self, v: &CMat) -> bool {
        self.carrier.contains_matrix(v)
    }

    /// Checks membership and returns an error carrying the residual otherwise.
    pub fn require_member(&self, v: &CMat, what: &'static str) -> Result<()> {
        let (ok, residual) = self.carrier.member(v)?;
        if ok {
            Ok(())
        } else {
            Err(Error::NotMember { what, residual })
        }
    }

    /// Positive-cone membership: the element is PSD.
    pub fn is_positive(&self, a: &CMat) -> bool {
        linalg::min_eigenvalue(a) >= -tolerance::scaled(tolerance::PSD) * op_norm(a).max(1.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub closure_jordan: f64,
    pub closure_lie: f64,
    pub unit: f64,
    pub commutativity: f64,
    pub antisymmetry: f64,
    pub jordan_identity: f64,
    pub jacobi: f64,
    pub leibniz: f64,
    pub associator: f64,
    pub norm_submultiplicative: f64,
    pub norm_square: f64,
    pub norm_monotone: f64,
    pub worst: f64,
    pub passed: bool,
}

/// Randomized check of the Lie–Jordan identities and norm conditions, plus
/// exhaustive closure on basis pairs. Residuals are relative to the size of
/// the terms involved.
pub fn verify_ljb_axioms(l: &LjbAlgebra, trials: usize, seed: u64) -> AxiomReport {
    let p = l.params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let closure_jordan = closure_residual(&l.carrier, Product::Jordan, &p);
    let closure_lie = closure_residual(&l.carrier, Product::Lie, &p);
    let unit = match &l.unit {
        Some(e) => l
            .basis()
            .iter()
            .map(|b| hs_norm(&(jordan(e, b) - b)))
            .fold(0.0, f64::max),
        None => 0.0,
    };
    let mut r = AxiomReport {
        trials,
        closure_jordan,
        closure_lie,
        unit,
        commutativity: 0.0,
        antisymmetry: 0.0,
        jordan_identity: 0.0,
        jacobi: 0.0,
        leibniz: 0.0,
        associator: 0.0,
        norm_submultiplicative: 0.0,
        norm_square: 0.0,
        norm_monotone: 0.0,
        worst: 0.0,
        passed: false,
    };
    let k = p.kappa;
    for _ in 0..trials {
        let a = random_element(&l.carrier, &mut rng);
        let b = random_element(&l.carrier, &mut rng);
        let c = random_element(&l.carrier, &mut rng);
        let br = |x: &CMat, y: &CMat| bracket(x, y, &p);
        // Elements have unit HS norm, so absolute residuals of products of
        // bounded degree are already on the relative scale.
        r.commutativity = r.commutativity.max(hs_norm(&(jordan(&a, &b) - jordan(&b, &a))));
        r.antisymmetry = r.antisymmetry.max(hs_norm(&(br(&a, &b) + br(&b, &a))));
        let a2 = jordan(&a, &a);
        let ji = jordan(&jordan(&a2, &b), &a) - jordan(&a2, &jordan(&b, &a));
        r.jordan_identity = r.jordan_identity.max(hs_norm(&ji));
        let jac = br(&a, &br(&b, &c)) + br(&b, &br(&c, &a)) + br(&c, &br(&a, &b));
        r.jacobi = r.jacobi.max(hs_norm(&jac));
        let leib = br(&a, &jordan(&b, &c)) - jordan(&br(&a, &b), &c) - jordan(&b, &br(&a, &c));
        r.leibniz = r.leibniz.max(hs_norm(&leib));
        let asc = jordan(&jordan(&a, &b), &c) - jordan(&a, &jordan(&b, &c)) - br(&b, &br(&c, &a)).scale(k);
        r.associator = r.associator.max(hs_norm(&asc));

        let (na, nb) = (op_norm(&a), op_norm(&b));
        let sub = op_norm(&jordan(&a, &b)) - na * nb;
        r.norm_submultiplicative = r.norm_submultiplicative.max(sub.max(0.0) / (na * nb).max(1e-300));
        let sq = (op_norm(&a2) - na * na).abs();
        r.norm_square = r.norm_square.max(sq / (na * na).max(1e-300));
        let b2 = jordan(&b, &b);
        let s = op_norm(&a2);
        let mono = s - op_norm(&(&a2 + &b2));
        r.norm_monotone = r.norm_monotone.max(mono.max(0.0) / s.max(1e-300));
    }
    r.worst = [
        r.closure_jordan,
        r.closure_lie,
        r.unit,
        r.commutativity,
        r.antisymmetry,
        r.jordan_identity,
        r.jacobi,
        r.leibniz,
        r.associator,
        r.norm_submultiplicative,
        r.norm_square,
        r.norm_monotone,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    r.passed = r.worst <= tolerance::scaled(tolerance::AXIOM);
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicalReport {
    pub trials: usize,
    /// `κ[ψ_a, ψ_b] + [δ_a, δ_b]` applied to a third element.
    pub commutator_relation: f64,
    /// `ψ_a a`.
    pub self_annihilation: f64,
    /// `ψ_a b + ψ_b a`.
    pub skew: f64,
    /// `ψ_𝟙` on random elements, when a unit exists.
    pub unit_derivation: f64,
    pub worst: f64,
    pub passed: bool,
}

/// Checks that `a ↦ ψ_a = [a, ·]` pairs with `δ_a = a ∘ ·` as a dynamical
/// correspondence on random elements.
pub fn verify_dynamical_correspondence(l: &LjbAlgebra, trials: usize, seed: u64) -> DynamicalReport {
    let p = l.params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = |x: &CMat, y: &CMat| bracket(x, y, &p);
    let mut r = DynamicalReport {
        trials,
        commutator_relation: 0.0,
        self_annihilation: 0.0,
        skew: 0.0,
        unit_derivation: 0.0,
        worst: 0.0,
        passed: false,
    };
    for _ in 0..trials {
        let a = random_element(&l.carrier, &mut rng);
        let b = random_element(&l.carrier, &mut rng);
        let c = random_element(&l.carrier, &mut rng);
        let lie = psi(&a, &psi(&b, &c)) - psi(&b, &psi(&a, &c));
        let jor = jordan(&a, &jordan(&b, &c)) - jordan(&b, &jordan(&a, &c));
        r.commutator_relation = r.commutator_relation.max(hs_norm(&(lie.scale(p.kappa) + jor)));
        r.self_annihilation = r.self_annihilation.max(hs_norm(&psi(&a, &a)));
        r.skew = r.skew.max(hs_norm(&(psi(&a, &b) + psi(&b, &a))));
        if let Some(e) = &l.unit {
            r.unit_derivation = r.unit_derivation.max(hs_norm(&psi(e, &c)));
        }
    }
    r.worst = r
        .commutator_relation
        .max(r.self_annihilation)
        .max(r.skew)
        .max(r.unit_derivation);
    r.passed = r.worst <= tolerance::scaled(tolerance::AXIOM);
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismReport {
    pub t_values: Vec<f64>,
    /// `Φ_t(b ∘ c) − Φ_t(b) ∘ Φ_t(c)` over basis pairs.
    pub homomorphism: f64,
    /// Distance of `Φ_t(b)` from the carrier.
    pub invariance: f64,
    /// Most negative eigenvalue of `Φ_t(b²)`, relative, clipped at zero.
    pub positivity: f64,
    /// Closed form against the truncated series `Σ tᵏ ψ_aᵏ(b)/k!`, when the
    /// series is well conditioned.
    pub series: Option<f64>,
    pub worst: f64,
    pub passed: bool,
}

/// `Φ_t(b) = exp(itλa) b exp(−itλa)`, the flow of `b ↦ [a, b]`.
pub fn flow(a: &CMat, b: &CMat, t: f64, params: &LjbParams) -> CMat {
    let u = linalg::expi_hermitian(a, t * params.lambda);
    &u * b * u.adjoint()
}

pub fn verify_jordan_automorphism(l: &LjbAlgebra, a: &CMat, t_values: &[f64]) -> Result<AutomorphismReport> {
    l.require_member(a, "automorphism generator")?;
    let p = l.params;
    let basis = l.basis();
    let mut r = AutomorphismReport {
        t_values: t_values.to_vec(),
        homomorphism: 0.0,
        invariance: 0.0,
        positivity: 0.0,
        series: None,
        worst: 0.0,
        passed: false,
    };
    for &t in t_values {
        let u = linalg::expi_hermitian(a, t * p.lambda);
        let phi = |x: &CMat| &u * x * u.adjoint();
        let images: Vec<CMat> = basis.iter().map(&phi).collect();
        for (i, bi) in basis.iter().enumerate() {
            r.invariance = r.invariance.max(l.carrier.residual(&images[i]));
            let sq = phi(&jordan(bi, bi));
            let scale = op_norm(&sq).max(1e-300);
            r.positivity = r.positivity.max((-linalg::min_eigenvalue(&sq) / scale).max(0.0));
            for j in i..basis.len() {
                let lhs = phi(&jordan(bi, &basis[j]));
                let rhs = jordan(&images[i], &images[j]);
                r.homomorphism = r.homomorphism.max(hs_norm(&(lhs - rhs)));
            }
        }
        if let Some(b) = basis.first() {
            let growth = (2.0 * p.lambda.abs() * op_norm(a) * t.abs()).max(0.0);
            if growth <= 8.0 {
                let mut term = b.clone();
                let mut total = b.clone();
                for k in 1..80 {
                    term = bracket(a, &term, &p).scale(t / k as f64);
                    total += &term;
                    if hs_norm(&term) < 1e-18 {
                        break;
                    }
                }
                let d = hs_norm(&(total - phi(b)));
                r.series = Some(r.series.unwrap_or(0.0).max(d));
            }
        }
    }
    r.worst = r
        .homomorphism
        .max(r.invariance)
        .max(r.positivity)
        .max(r.series.unwrap_or(0.0));
    r.passed = r.worst <= tolerance::scaled(tolerance::AXIOM);
    Ok(r)
}

/// A complex `*`-closed matrix subspace closed under the matrix product.
#[derive(Clone, Debug)]
pub struct CStarAlgebra {
    carrier: MatrixSubspace,
    unit: Option<CMat>,
}

impl CStarAlgebra {
    pub fn new(carrier: MatrixSubspace) -> Result<Self> {
        let b = carrier.basis();
        let i_closed = b.iter().enumerate().find_map(|(k, x)| {
            let r = carrier.residual(&x.map(|z| z * I));
            (r > tolerance::scaled(tolerance::MEMBER)).then_some(Witness {
                left: k,
                right: k,
                product: Product::Left,
                residual: r,
            })
        });
        if let Some(witness) = i_closed {
            return Err(Error::NotClosed { witness });
        }
        let p = LjbParams::default();
        if let Some(witness) = closure_witness(b, b, &carrier, &[Product::Adjoint], &p, true) {
            return Err(Error::NotClosed { witness });
        }
        if let Some(witness) = closure_witness(b, b, &carrier, &[Product::Left], &p, false) {
            return Err(Error::NotClosed { witness });
        }
        Ok(Self::from_closed(carrier))
    }

    pub(crate) fn from_closed(carrier: MatrixSubspace) -> Self {
        let herm = carrier.hermitian_part();
        let unit = solve_unit(&herm, |a, b| vec![a * b, b * a]);
        CStarAlgebra { carrier, unit }
    }

    /// All complex `n × n` matrices.
    pub fn full(n: usize) -> Result<Self> {
        let amb = AmbientSpace::new(n)?;
        Ok(Self::from_closed(MatrixSubspace::all_matrices(amb)))
    }

    /// The `*`-algebra generated by `generators` (closed under products until
    /// the dimension stops growing). Includes `I` when `unital` is set.
    pub fn generated_by(amb: AmbientSpace, generators: &[CMat], unital: bool) -> Result<Self> {
        let mut gens: Vec<CMat> = generators.to_vec();
        gens.extend(generators.iter().map(|g| g.adjoint()));
        if unital {
            gens.push(linalg::identity(amb.n));
        }
        for g in &gens {
            amb.check(g)?;
        }
        let mut space = MatrixSubspace::span_unchecked(amb, &gens, false).complexify();
        loop {
            let b = space.basis().to_vec();
            let mut more = b.clone();
            for x in &b {
                for y in &b {
                    more.push(x * y);
                }
                more.push(x.adjoint());
            }
            let next = MatrixSubspace::span_unchecked(amb, &more, false);
            if next.dim() == space.dim() {
                break;
            }
            space = next;
        }
        Self::new(space)
    }

    pub fn carrier(&self) -> &MatrixSubspace {
        &self.carrier
    }

    pub fn unit(&self) -> Option<&CMat> {
        self.unit.as_ref()
    }

    pub fn n(&self) -> usize {
        self.carrier.n()
    }

    pub fn complex_dim(&self) -> usize {
        self.carrier.complex_dim()
    }

    pub fn contains(&self, v: &CMat) -> bool {
        self.carrier.contains_matrix(v)
    }

    pub fn self_adjoint_part(&self) -> MatrixSubspace {
        self.carrier.hermitian_part()
    }

    /// Hermitian orthonormal basis that is also a complex orthonormal basis.
    pub fn complex_basis(&self) -> Vec<CMat> {
        self.carrier.complex_basis()
    }

    /// Worst `|‖A†A‖ − ‖A‖²| / ‖A‖²` over random members.
    pub fn c_star_residual(&self, trials: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..trials {
            let a = random_element(&self.carrier, &mut rng);
            let na = op_norm(&a);
            if na == 0.0 {
                continue;
            }
            worst = worst.max((op_norm(&(a.adjoint() * &a)) - na * na).abs() / (na * na));
        }
        worst
    }
}

/// `L ⊕ iL` with the matrix product; fails if `L` is not closed.
pub fn complexify(l: &LjbAlgebra) -> Result<CStarAlgebra> {
    let b = l.basis();
    if let Some(witness) = closure_witness(b, b, &l.carrier, &[Product::Jordan, Product::Lie], &l.params, true) {
        return Err(Error::NotClosed { witness });
    }
    Ok(CStarAlgebra::from_closed(l.carrier.complexify()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_diag, unit};
    use crate::testutil::pauli;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        hs_norm(&(a - b)) <= tol
    }

    #[test]
    fn params_validation() {
        assert!(LjbParams::new(0.5, 1.0).is_ok());
        assert!(LjbParams::new(-0.5, 1.0).is_ok());
        assert!(LjbParams::new(1.0, 0.25).is_ok());
        assert!(LjbParams::new(1.0, 1.0).is_err());
        assert!(LjbParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn pauli_products() {
        let [i, x, y, z] = pauli();
        let p = LjbParams::default();
        assert!(close(&jordan_product(&i, &x).unwrap(), &x, 0.0));
        assert!(close(&jordan_product(&x, &y).unwrap(), &linalg::zeros(2), 0.0));
        assert!(close(&lie_bracket(&x, &y, &p).unwrap(), &(-&z), 1e-15));
        assert!(close(&lie_bracket(&i, &z, &p).unwrap(), &linalg::zeros(2), 0.0));
        let xy = associative_product(&x, &y, &p).unwrap();
        assert!(close(&xy, &z.map(|w| w * I), 1e-15));
        assert!(close(&associative_product(&x, &i, &p).unwrap(), &x, 1e-15));
    }

    #[test]
    fn products_reject_non_hermitian() {
        let e12 = unit(2, 0, 1);
        assert!(matches!(
            jordan_product(&e12, &e12),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            jordan_product(&linalg::identity(2), &linalg::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn negative_lambda_gives_opposite_product() {
        let [_, x, y, _] = pauli();
        let p = LjbParams::new(-1.0, 0.25).unwrap();
        let yx = &y * &x;
        assert!(close(&associative_product(&x, &y, &p).unwrap(), &yx, 1e-15));
    }

    #[test]
    fn full_two_by_two_passes_axioms() {
        let l = LjbAlgebra::full(2, LjbParams::default()).unwrap();
        let r = verify_ljb_axioms(&l, 50, 7);
        assert!(r.passed, "{r:?}");
        assert!(r.worst <= 1e-12, "{r:?}");
        assert!(close(l.unit().unwrap(), &linalg::identity(2), 1e-15));
    }

    #[test]
    fn diagonal_has_vanishing_brackets() {
        let l = LjbAlgebra::diagonal(3, LjbParams::default()).unwrap();
        let r = verify_ljb_axioms(&l, 30, 1);
        assert!(r.passed);
        assert_eq!(r.closure_lie, 0.0);
        assert_eq!(r.jacobi, 0.0);
    }

    #[test]
    fn span_of_x_and_z_is_not_closed() {
        let [_, x, _, z] = pauli();
        let amb = AmbientSpace::new(2).unwrap();
        let s = MatrixSubspace::span(amb, &[x, z], true).unwrap();
        match LjbAlgebra::new(s.clone(), LjbParams::default()) {
            Err(Error::NotClosed { witness }) => assert!(witness.residual > 0.5),
            other => panic!("expected closure failure, got {other:?}"),
        }
        let r = verify_ljb_axioms(&LjbAlgebra::from_closed(s, LjbParams::default()), 5, 0);
        assert!(!r.passed);
        assert!(r.closure_jordan > 0.5);
    }

    #[test]
    fn dynamical_correspondence_on_full_three() {
        let l = LjbAlgebra::full(3, LjbParams::default()).unwrap();
        let r = verify_dynamical_correspondence(&l, 40, 3);
        assert!(r.passed, "{r:?}");
        let d = LjbAlgebra::diagonal(3, LjbParams::default()).unwrap();
        let r = verify_dynamical_correspondence(&d, 10, 3);
        // psi vanishes identically; the Jordan side cancels up to rounding.
        assert_eq!(r.skew, 0.0);
        assert_eq!(r.self_annihilation, 0.0);
        assert!(r.commutator_relation < 1e-15);
    }

    #[test]
    fn rotation_by_pi_flips_sigma_x() {
        let [_, x, _, z] = pauli();
        let p = LjbParams::default();
        let out = flow(&z, &x, std::f64::consts::PI, &p);
        assert!(close(&out, &(-&x), 1e-12));
        assert!(close(&flow(&z, &x, 0.0, &p), &x, 1e-15));
    }

    #[test]
    fn automorphism_report() {
        let l = LjbAlgebra::full(2, LjbParams::default()).unwrap();
        let [i, _, _, z] = pauli();
        let r = verify_jordan_automorphism(&l, &z, &[0.0, 0.3, 1.0, 3.0]).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.series.is_some());
        let r = verify_jordan_automorphism(&l, &i, &[2.0]).unwrap();
        assert!(r.passed);
        let d = LjbAlgebra::diagonal(2, LjbParams::default()).unwrap();
        let [_, x, _, _] = pauli();
        assert!(matches!(
            verify_jordan_automorphism(&d, &x, &[1.0]),
            Err(Error::NotMember { .. })
        ));
    }

    #[test]
    fn complexification_examples() {
        let p = LjbParams::default();
        let full = complexify(&LjbAlgebra::full(2, p).unwrap()).unwrap();
        assert_eq!(full.complex_dim(), 4);
        let diag = complexify(&LjbAlgebra::diagonal(2, p).unwrap()).unwrap();
        assert_eq!(diag.complex_dim(), 2);
        assert!(diag.contains(&real_diag(&[1.0, 0.0]).map(|w| w * I)));
        let [i, x, _, _] = pauli();
        let amb = AmbientSpace::new(2).unwrap();
        let l = LjbAlgebra::new(MatrixSubspace::span(amb, &[i, x.clone()], true).unwrap(), p).unwrap();
        let cl = complexify(&l).unwrap();
        assert_eq!(cl.complex_dim(), 2);
        assert!(cl.self_adjoint_part().same_as(l.carrier()));
        assert!(CStarAlgebra::new(cl.carrier().clone()).is_ok());
        assert!(cl.contains(&(&x * c(2.0) + linalg::identity(2).map(|w| w * I))));
    }

    #[test]
    fn corner_unit_is_a_projection() {
        let amb = AmbientSpace::new(2).unwrap();
        let s = MatrixSubspace::span(amb, &[unit(2, 1, 1)], true).unwrap();
        let l = LjbAlgebra::new(s, LjbParams::default()).unwrap();
        assert!(close(l.unit().unwrap(), &unit(2, 1, 1), 1e-12));
    }

    #[test]
    fn generated_star_algebra() {
        let amb = AmbientSpace::new(3).unwrap();
        let a = CStarAlgebra::generated_by(amb, &[unit(3, 0, 1)], true).unwrap();
        // M_2 on the first two coordinates plus the scalar corner.
        assert_eq!(a.complex_dim(), 5);
        assert!(a.c_star_residual(20, 1) < 1e-10);
    }
}
