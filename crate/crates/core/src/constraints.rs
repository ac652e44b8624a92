//! T-reduction of a constrained system `(F, C)`.
//!
//! `D = [F C] ∩ [C F]`, observables `O = D_W`, cross-checked against the
//! multiplier algebra `M(D)`, and the reduced algebra `O / D`. The second half
//! of the module certifies that the same quotient comes out of the
//! Lie–Jordan reduction of `F_sa` by the non-unital subalgebra `D_sa`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Product, Result, Witness};
use crate::ljb_core::{self, closure_witness, jordan, CStarAlgebra, LjbAlgebra, LjbParams};
use crate::linalg::{self, hs_norm, CMat};
use crate::matspace::MatrixSubspace;
use crate::reduction::{self, ReductionResult};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct ConstrainedSystem {
    field: CStarAlgebra,
    constraints: Vec<CMat>,
}

impl ConstrainedSystem {
    pub fn new(field: CStarAlgebra, constraints: Vec<CMat>) -> Result<Self> {
        let amb = field.carrier().ambient();
        if !field.contains(&linalg::identity(amb.n)) {
            return Err(Error::Precondition("field algebra must contain the identity".into()));
        }
        for (index, c) in constraints.iter().enumerate() {
            amb.check(c)?;
            let deviation = linalg::hermitian_deviation(c);
            if deviation > tolerance::scaled(tolerance::HERMITIAN) {
                return Err(Error::NotHermitian { index, deviation });
            }
            let (ok, residual) = field.carrier().member(c)?;
            if !ok {
                return Err(Error::NotContained {
                    what: "constraint outside the field algebra",
                    index,
                    residual,
                });
            }
        }
        Ok(ConstrainedSystem { field, constraints })
    }

    pub fn field(&self) -> &CStarAlgebra {
        &self.field
    }

    pub fn constraints(&self) -> &[CMat] {
        &self.constraints
    }

    pub fn n(&self) -> usize {
        self.field.n()
    }
}

/// `[F C] ∩ [C F]`, verified to be a C*-subalgebra.
pub fn constrained_ideal(sys: &ConstrainedSystem) -> Result<MatrixSubspace> {
    let amb = sys.field.carrier().ambient();
    let fb = sys.field.carrier().basis();
    let mut left = Vec::with_capacity(fb.len() * sys.constraints.len());
    let mut right = Vec::with_capacity(left.capacity());
    for c in &sys.constraints {
        for f in fb {
            left.push(f * c);
            right.push(c * f);
        }
    }
    let fc = MatrixSubspace::span_unchecked(amb, &left, false);
    let cf = MatrixSubspace::span_unchecked(amb, &right, false);
    let d = fc.intersect(&cf)?;
    let p = LjbParams::default();
    let b = d.basis();
    if let Some(w) = closure_witness(b, b, &d, &[Product::Left, Product::Adjoint], &p, false) {
        return Err(Error::TheoremViolation {
            theorem: "constrained ideal is a C*-subalgebra",
            detail: w.to_string(),
        });
    }
    Ok(d)
}

/// Projection onto the joint kernel of the squared constraints.
pub fn dirac_support(sys: &ConstrainedSystem) -> CMat {
    let n = sys.n();
    let mut h = linalg::zeros(n);
    for c in &sys.constraints {
        h += c * c;
    }
    let top = linalg::eigh(&h).0.last().copied().unwrap_or(0.0);
    let cut = linalg::rank_cutoff(top);
    linalg::spectral_projector(&h, |v| v <= cut)
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalityProbe {
    /// Real dimension of `{A ∈ F : pAp = 0}`, the joint kernel of Dirac states.
    pub annihilated_dim: usize,
    /// Real dimension of `{A ∈ F : Ap = pA = 0}`, the largest `*`-subalgebra inside it.
    pub largest_subalgebra_dim: usize,
    pub constrained_ideal_dim: usize,
    /// The largest subalgebra is closed and coincides with `D`.
    pub matches: bool,
    /// Elements of the annihilated space outside `D`, each with the larger
    /// residual of `A†A` and `AA†` leaving that space.
    pub escape_residuals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct DiracReport {
    /// `p`: a state is Dirac iff its density satisfies `ρ = pρp`.
    pub support: CMat,
    /// Complex dimension of `pFp`, the algebra Dirac states live on.
    pub corner_dim: usize,
    /// The unique Dirac state when `pFp` is one-dimensional.
    pub unique_state: Option<CMat>,
    /// Worst `|ω(d)|` over sampled Dirac states and the basis of `D`.
    pub annihilation: f64,
    pub samples: usize,
    pub maximality: MaximalityProbe,
}

impl DiracReport {
    pub fn has_states(&self) -> bool {
        self.corner_dim > 0
    }
}

/// Dirac states of the system, with a numerical check that `D` is the largest
/// `*`-subalgebra they all annihilate.
pub fn dirac_states(sys: &ConstrainedSystem, samples: usize, seed: u64) -> Result<DiracReport> {
    let amb = sys.field.carrier().ambient();
    let p = dirac_support(sys);
    let fb = sys.field.carrier().basis();
    let corner_gens: Vec<CMat> = fb.iter().map(|f| &p * f * &p).collect();
    let corner = MatrixSubspace::span_unchecked(amb, &corner_gens, false);
    let corner_dim = corner.complex_dim();
    let unique_state = (corner_dim == 1).then(|| {
        let tr = linalg::trace(&p).re;
        p.unscale(tr)
    });

    let d = constrained_ideal(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut annihilation = 0.0_f64;
    let mut taken = 0;
    if corner_dim > 0 {
        let herm = corner.hermitian_part();
        for _ in 0..samples {
            let x = ljb_core::random_element(&MatrixSubspace::all_matrices(amb), &mut rng);
            let rho = herm.project(&(&p * x.adjoint() * &x * &p));
            let tr = linalg::trace(&rho).re;
            if tr <= 0.0 {
                continue;
            }
            let rho = rho.unscale(tr);
            for b in d.basis() {
                annihilation = annihilation.max(linalg::trace_product(&rho, b).norm());
            }
            taken += 1;
        }
    }

    let annihilated = sys.field.carrier().kernel_of(|a| {
        let m = &p * a * &p;
        amb.coords(&m).as_slice().to_vec()
    });
    let largest = sys.field.carrier().kernel_of(|a| {
        let mut v = amb.coords(&(a * &p)).as_slice().to_vec();
        v.extend_from_slice(amb.coords(&(&p * a)).as_slice());
        v
    });
    let b = largest.basis();
    let pr = LjbParams::default();
    let closed = closure_witness(b, b, &largest, &[Product::Left, Product::Adjoint], &pr, false).is_none();
    let escapes = annihilated.complement_of(&largest).map(|c| c.basis().to_vec()).unwrap_or_default();
    let escape_residuals = escapes
        .iter()
        .map(|a| {
            let l = annihilated.residual(&(a.adjoint() * a));
            l.max(annihilated.residual(&(a * a.adjoint())))
        })
        .collect();
    Ok(DiracReport {
        support: p,
        corner_dim,
        unique_state,
        annihilation,
        samples: taken,
        maximality: MaximalityProbe {
            annihilated_dim: annihilated.dim(),
            largest_subalgebra_dim: largest.dim(),
            constrained_ideal_dim: d.dim(),
            matches: closed && largest.same_as(&d),
            escape_residuals,
        },
    })
}

/// `{f ∈ F : [f, H] ∈ Ω for all H ∈ Ω}`.
pub fn weak_commutant(f: &CStarAlgebra, omega: &MatrixSubspace) -> Result<CStarAlgebra> {
    f.carrier().require_contains(omega, "weak_commutant")?;
    let amb = omega.ambient();
    let q = omega.coordinate_basis().clone();
    let carrier = f.carrier().kernel_of(|a| {
        let mut out = Vec::with_capacity(omega.dim() * amb.field_dim());
        for h in omega.basis() {
            let x = amb.coords(&(a * h - h * a));
            let r = &x - &q * (q.transpose() * &x);
            out.extend_from_slice(r.as_slice());
        }
        out
    });
    CStarAlgebra::new(carrier)
}

/// `{f ∈ F : fH ∈ Ω and Hf ∈ Ω for all H ∈ Ω}` for a `*`-subalgebra `Ω`.
pub fn multiplier_algebra(f: &CStarAlgebra, omega: &MatrixSubspace) -> Result<CStarAlgebra> {
    f.carrier().require_contains(omega, "multiplier_algebra")?;
    let b = omega.basis();
    let p = LjbParams::default();
    if let Some(witness) = closure_witness(b, b, omega, &[Product::Left, Product::Adjoint], &p, false) {
        return Err(Error::NotASubalgebra { witness });
    }
    if !omega.is_complex() {
        let witness = Witness {
            left: 0,
            right: 0,
            product: Product::Left,
            residual: omega
                .basis()
                .iter()
                .map(|x| omega.residual(&x.map(|z| z * linalg::I)))
                .fold(0.0, f64::max),
        };
        return Err(Error::NotASubalgebra { witness });
    }
    let amb = omega.ambient();
    let q = omega.coordinate_basis().clone();
    let carrier = f.carrier().kernel_of(|a| {
        let mut out = Vec::with_capacity(2 * omega.dim() * amb.field_dim());
        for h in omega.basis() {
            for m in [a * h, h * a] {
                let x = amb.coords(&m);
                let r = &x - &q * (q.transpose() * &x);
                out.extend_from_slice(r.as_slice());
            }
        }
        out
    });
    CStarAlgebra::new(carrier)
}

/// A C*-algebra modulo a two-sided ideal, realized on the orthogonal
/// complement of the ideal.
#[derive(Clone, Debug)]
pub struct CStarQuotient {
    pub algebra: CStarAlgebra,
    pub ideal: MatrixSubspace,
    pub quotient: CStarAlgebra,
    support: CMat,
}

impl CStarQuotient {
    fn new(algebra: CStarAlgebra, ideal: MatrixSubspace, theorem: &'static str) -> Result<Self> {
        let herm = algebra.complex_basis();
        let p = LjbParams::default();
        if let Some(w) = closure_witness(&herm, ideal.basis(), &ideal, &[Product::Left, Product::Right], &p, false) {
            return Err(Error::TheoremViolation {
                theorem,
                detail: w.to_string(),
            });
        }
        let support = reduction::support_projection(&ideal, &algebra)?;
        let complement = algebra.carrier().complement_of(&ideal)?;
        let quotient = CStarAlgebra::new(complement).map_err(|e| Error::TheoremViolation {
            theorem: "quotient is a C*-algebra",
            detail: e.to_string(),
        })?;
        let out = CStarQuotient {
            algebra,
            ideal,
            quotient,
            support,
        };
        if let Some(u) = out.algebra.unit() {
            let qu = out.project(u)?;
            let unital = out.quotient.complex_basis().iter().all(|b| {
                hs_norm(&(&qu * b - b)) <= tolerance::scaled(tolerance::AXIOM)
                    && hs_norm(&(b * &qu - b)) <= tolerance::scaled(tolerance::AXIOM)
            });
            if !unital {
                return Err(Error::TheoremViolation {
                    theorem: "quotient is unital",
                    detail: "image of the unit does not act as identity".into(),
                });
            }
        }
        Ok(out)
    }

    /// Canonical representative of the coset of `a`.
    pub fn project(&self, a: &CMat) -> Result<CMat> {
        let (rep, _) = self.algebra.carrier().coset_decompose(&self.ideal, a)?;
        Ok(rep)
    }

    /// Product of cosets, re-projected onto canonical representatives.
    pub fn product(&self, x: &CMat, y: &CMat) -> Result<CMat> {
        self.project(&(x * y))
    }

    pub fn quotient_norm(&self, a: &CMat) -> Result<f64> {
        let (ok, residual) = self.algebra.carrier().member(a)?;
        if !ok {
            return Err(Error::NotMember {
                what: "quotient_norm",
                residual,
            });
        }
        let c = linalg::identity(a.nrows()) - &self.support;
        Ok(linalg::op_norm(&(&c * a * &c)))
    }

    pub fn support(&self) -> &CMat {
        &self.support
    }

    /// Worst associativity defect of the re-projected product on basis triples.
    pub fn associativity_residual(&self) -> f64 {
        let b = self.quotient.complex_basis();
        let mut worst = 0.0_f64;
        for x in &b {
            for y in &b {
                for z in &b {
                    let l = self.product(&self.product(x, y).unwrap_or_else(|_| x * y), z);
                    let r = self.product(x, &self.product(y, z).unwrap_or_else(|_| y * z));
                    if let (Ok(l), Ok(r)) = (l, r) {
                        worst = worst.max(hs_norm(&(l - r)));
                    }
                }
            }
        }
        worst
    }
}

#[derive(Clone, Debug)]
pub struct TReductionResult {
    pub d: MatrixSubspace,
    pub observables: CStarAlgebra,
    pub multiplier: CStarAlgebra,
    pub reduced: CStarQuotient,
    pub dirac_support: CMat,
}

impl TReductionResult {
    pub fn quotient(&self) -> &CStarAlgebra {
        &self.reduced.quotient
    }
}

pub fn t_reduce(sys: &ConstrainedSystem) -> Result<TReductionResult> {
    let d = constrained_ideal(sys)?;
    let observables = weak_commutant(&sys.field, &d)?;
    let multiplier = multiplier_algebra(&sys.field, &d)?;
    if !observables.carrier().same_as(multiplier.carrier()) {
        return Err(Error::TheoremViolation {
            theorem: "weak commutant equals multiplier algebra",
            detail: format!(
                "dimensions {} and {}",
                observables.carrier().dim(),
                multiplier.carrier().dim()
            ),
        });
    }
    if !observables.contains(&linalg::identity(sys.n())) {
        return Err(Error::TheoremViolation {
            theorem: "observable algebra is unital",
            detail: "identity not contained".into(),
        });
    }
    let reduced = CStarQuotient::new(observables.clone(), d.clone(), "constrained ideal is a two-sided ideal of the observables")?;
    Ok(TReductionResult {
        d,
        observables,
        multiplier,
        reduced,
        dirac_support: dirac_support(sys),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Clause {
    pub status: ClauseStatus,
    pub residual: f64,
    pub detail: String,
}

impl Clause {
    fn from(ok: bool, residual: f64, detail: String) -> Self {
        Clause {
            status: if ok { ClauseStatus::Pass } else { ClauseStatus::Fail },
            residual,
            detail,
        }
    }

    fn skipped(detail: &str) -> Self {
        Clause {
            status: ClauseStatus::Skipped,
            residual: 0.0,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != ClauseStatus::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceCertificate {
    /// Hermitian part of the observables equals the normalizer of `D_sa`.
    pub normalizer_matches: Clause,
    /// `D_sa` is a Lie–Jordan ideal of the normalizer iff `D` is a two-sided
    /// ideal of the observables.
    pub ideal_iff: Clause,
    /// The two quotients are isomorphic and isometric under representative matching.
    pub quotients_match: Clause,
    pub ljb_quotient_dim: usize,
    pub t_quotient_hermitian_dim: usize,
    pub product_residual: f64,
    pub bracket_residual: f64,
    pub norm_residual: f64,
}

impl EquivalenceCertificate {
    pub fn passed(&self) -> bool {
        self.normalizer_matches.passed() && self.ideal_iff.passed() && self.quotients_match.passed()
    }
}

/// Compares the T-reduction of `sys` with the Lie–Jordan reduction of `F_sa`
/// by the subalgebra `D_sa`.
pub fn verify_equivalence(sys: &ConstrainedSystem, params: LjbParams, seed: u64) -> Result<EquivalenceCertificate> {
    let t = t_reduce(sys)?;
    let l = LjbAlgebra::new(sys.field.self_adjoint_part(), params)?;
    let j = t.d.hermitian_part();
    let n = reduction::normalizer(&l, &j)?;
    let o_sa = t.observables.self_adjoint_part();

    let normalizer_matches = {
        let ok = o_sa.same_as(n.carrier());
        let r = o_sa
            .basis()
            .iter()
            .map(|b| n.carrier().residual(b))
            .chain(n.basis().iter().map(|b| o_sa.residual(b)))
            .fold(0.0, f64::max);
        Clause::from(ok, r, format!("dims {} and {}", o_sa.dim(), n.dim()))
    };

    let ideal_iff = {
        let lj = closure_witness(n.basis(), j.basis(), &j, &[Product::Jordan, Product::Lie], &params, false);
        let pr = LjbParams::default();
        let ob = t.observables.complex_basis();
        let assoc = closure_witness(&ob, t.d.basis(), &t.d, &[Product::Left, Product::Right], &pr, false);
        let (a, b) = (lj.is_none(), assoc.is_none());
        let r = lj.map(|w| w.residual).unwrap_or(0.0).max(assoc.map(|w| w.residual).unwrap_or(0.0));
        Clause::from(a == b, r, format!("lie-jordan ideal {a}, bilateral ideal {b}"))
    };

    let mut cert = EquivalenceCertificate {
        normalizer_matches,
        ideal_iff,
        quotients_match: Clause::skipped("constrained ideal is the whole field algebra"),
        ljb_quotient_dim: 0,
        t_quotient_hermitian_dim: t.quotient().self_adjoint_part().dim(),
        product_residual: 0.0,
        bracket_residual: 0.0,
        norm_residual: 0.0,
    };
    if t.d.same_as(sys.field.carrier()) {
        return Ok(cert);
    }
    let r = reduction::reduce_by_subalgebra(&l, &j)?;
    cert.ljb_quotient_dim = r.quotient.dim();
    let (prod, brk, norm, bijective) = match_quotients(&r, &t.reduced, &params, seed)?;
    cert.product_residual = prod;
    cert.bracket_residual = brk;
    cert.norm_residual = norm;
    let tol = tolerance::scaled(tolerance::AXIOM);
    let ok = cert.ljb_quotient_dim == cert.t_quotient_hermitian_dim && bijective && prod <= tol && brk <= tol && norm <= tol;
    cert.quotients_match = Clause::from(
        ok,
        prod.max(brk).max(norm),
        format!(
            "dims {} and {}, bijective {bijective}",
            cert.ljb_quotient_dim, cert.t_quotient_hermitian_dim
        ),
    );
    Ok(cert)
}

/// Maps canonical representatives of the Lie–Jordan quotient to canonical
/// representatives of the C*-quotient and measures how far the map is from a
/// Jordan and Lie isomorphism and an isometry.
fn match_quotients(
    r: &ReductionResult,
    t: &CStarQuotient,
    params: &LjbParams,
    seed: u64,
) -> Result<(f64, f64, f64, bool)> {
    let qb = r.quotient.basis();
    let phi = |x: &CMat| t.project(x);
    let images: Vec<CMat> = qb.iter().map(phi).collect::<Result<_>>()?;
    let herm_t = t.quotient.self_adjoint_part();
    let amb = herm_t.ambient();
    let img_span = MatrixSubspace::span_unchecked(amb, &images, true);
    let bijective = img_span.dim() == qb.len() && img_span.same_as(&herm_t);
    let mut prod = 0.0_f64;
    let mut brk = 0.0_f64;
    for i in 0..qb.len() {
        for k in i..qb.len() {
            let lj = r.project(&jordan(&qb[i], &qb[k]))?;
            let tj = t.project(&jordan(&images[i], &images[k]))?;
            prod = prod.max(hs_norm(&(phi(&lj)? - tj)));
            let lb = r.project(&ljb_core::bracket(&qb[i], &qb[k], params))?;
            let tb = t.project(&ljb_core::bracket(&images[i], &images[k], params))?;
            brk = brk.max(hs_norm(&(phi(&lb)? - tb)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut norm = 0.0_f64;
    let mut probes: Vec<CMat> = qb.to_vec();
    for _ in 0..10 {
        probes.push(ljb_core::random_element(r.normalizer.carrier(), &mut rng));
    }
    for a in &probes {
        let ln = r.quotient_norm(a)?;
        let tn = t.quotient_norm(a)?;
        norm = norm.max((ln - tn).abs() / ln.max(1.0));
    }
    Ok((prod, brk, norm, bijective))
}

/// The C*-reduction obtained from a Jordan ideal: `O = N_J^ℂ`, `D = J^ℂ`,
/// quotient `O / (D ∩ O)`.
#[derive(Clone, Debug)]
pub struct ComplexifiedReduction {
    pub ljb: ReductionResult,
    pub reduced: CStarQuotient,
}

pub fn complexified_ideal_reduction(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<ComplexifiedReduction> {
    let ljb = reduction::reduce_by_ideal(l, j)?;
    let o = CStarAlgebra::new(ljb.normalizer.carrier().complexify())?;
    let d = j.complexify();
    let meet = d.intersect(o.carrier())?;
    let reduced = CStarQuotient::new(o, meet, "ideal meet observables is a two-sided ideal")?;
    let herm = reduced.quotient.self_adjoint_part();
    if !herm.same_as(ljb.quotient.carrier()) {
        return Err(Error::TheoremViolation {
            theorem: "complexified reduction restricts to the Lie-Jordan quotient",
            detail: format!("dims {} and {}", herm.dim(), ljb.quotient.dim()),
        });
    }
    Ok(ComplexifiedReduction { ljb, reduced })
}
