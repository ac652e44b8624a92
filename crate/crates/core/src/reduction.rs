//! Reduction of a Lie–Jordan algebra by a Jordan ideal or by a non-unital
//! Lie–Jordan subalgebra.
//!
//! Both procedures pass through the normalizer `N_J = {a ∈ L : [a, J] ⊆ J}`
//! and a Lie–Jordan ideal `K` of it (`N_J ∩ J`, respectively the span of
//! `N_J ∘ J`). The quotient `N_J / K` is realized on the orthogonal
//! complement of `K` inside `N_J`: in finite dimensions `K = eN_J` for a
//! central projection `e`, so the complement is the corner `(1 − e)N_J`,
//! itself closed under both products. Coset representatives are orthogonal
//! projections and the quotient norm is `‖(1 − e) a (1 − e)‖`.

use serde::Serialize;

use crate::error::{Error, Product, Result, Witness};
use crate::ljb_core::{self, closure_witness, jordan, CStarAlgebra, LjbAlgebra};
use crate::linalg::{self, hs_norm, CMat};
use crate::matspace::MatrixSubspace;
use crate::tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    ByIdeal,
    BySubalgebra,
}

/// Outcome of a closure test over basis pairs.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureCheck {
    pub holds: bool,
    /// Worst residual relative to the size of the product.
    pub worst_residual: f64,
    pub witness: Option<Witness>,
}

impl ClosureCheck {
    fn run(left: &[CMat], right: &[CMat], target: &MatrixSubspace, kinds: &[Product], l: &LjbAlgebra) -> Self {
        let p = l.params();
        let mut worst = 0.0_f64;
        for a in left {
            for b in right {
                for &kind in kinds {
                    let m = match kind {
                        Product::Jordan => jordan(a, b),
                        Product::Lie => l.bracket(a, b),
                        Product::Left => a * b,
                        Product::Right => b * a,
                        Product::Adjoint => a.adjoint(),
                    };
                    worst = worst.max(target.residual(&m) / hs_norm(&m).max(1.0));
                }
            }
        }
        let witness = closure_witness(left, right, target, kinds, p, false);
        ClosureCheck {
            holds: witness.is_none(),
            worst_residual: worst,
            witness,
        }
    }
}

#[derive(Clone, Debug)]
pub struct UnitalCheck {
    /// A Jordan unit of `J` itself, when `J ≠ 0` has one.
    pub own_unit: Option<CMat>,
    /// Whether `J` contains the unit of the ambient algebra.
    pub contains_algebra_unit: bool,
}

impl UnitalCheck {
    pub fn is_unital(&self) -> bool {
        self.own_unit.is_some()
    }
}

/// Lie–Jordan ideal inside a normalizer together with the quotient.
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub mode: ReductionMode,
    /// The subspace `J` the reduction started from.
    pub source: MatrixSubspace,
    pub normalizer: LjbAlgebra,
    pub reducing_ideal: MatrixSubspace,
    /// `N_J / K` on canonical representatives.
    pub quotient: LjbAlgebra,
    /// Closure of `K` under products with `N_J`.
    pub ideal_check: ClosureCheck,
    support: CMat,
}

impl ReductionResult {
    /// Canonical representative of the coset of `a ∈ N_J`.
    pub fn project(&self, a: &CMat) -> Result<CMat> {
        let (rep, _) = self
            .normalizer
            .carrier()
            .coset_decompose(&self.reducing_ideal, a)?;
        Ok(rep)
    }

    /// `inf_k ‖a + k‖` over the reducing ideal, computed as `‖(1 − e) a (1 − e)‖`.
    pub fn quotient_norm(&self, a: &CMat) -> Result<f64> {
        self.normalizer.require_member(a, "quotient_norm")?;
        let c = linalg::identity(a.nrows()) - &self.support;
        Ok(linalg::op_norm(&(&c * a * &c)))
    }

    /// Unit of the complexified reducing ideal.
    pub fn support(&self) -> &CMat {
        &self.support
    }

    /// Exact sequence dimension count `dim N_J = dim K + dim quotient`.
    pub fn dimensions_consistent(&self) -> bool {
        self.normalizer.dim() == self.reducing_ideal.dim() + self.quotient.dim()
    }
}

/// `{a ∈ L : [a, J] ⊆ J}`.
pub fn normalizer(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<LjbAlgebra> {
    l.carrier().require_contains(j, "normalizer")?;
    let amb = l.carrier().ambient();
    let p = *l.params();
    let jq = j.coordinate_basis().clone();
    let carrier = l.carrier().kernel_of(|a| {
        let mut out = Vec::with_capacity(j.dim() * amb.field_dim());
        for b in j.basis() {
            let x = amb.coords(&ljb_core::bracket(a, b, &p));
            let r = &x - &jq * (jq.transpose() * &x);
            out.extend_from_slice(r.as_slice());
        }
        out
    });
    let n = LjbAlgebra::new(carrier, p).map_err(|e| Error::TheoremViolation {
        theorem: "normalizer is a Lie-Jordan subalgebra",
        detail: e.to_string(),
    })?;
    if let Some(u) = l.unit() {
        if !n.contains(u) {
            return Err(Error::TheoremViolation {
                theorem: "normalizer is unital",
                detail: format!("unit residual {:.3e}", n.carrier().residual(u)),
            });
        }
    }
    Ok(n)
}

/// `L ∘ J ⊆ J`, checked on every basis pair.
pub fn is_jordan_ideal(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<ClosureCheck> {
    l.carrier().require_contains(j, "is_jordan_ideal")?;
    Ok(ClosureCheck::run(l.basis(), j.basis(), j, &[Product::Jordan], l))
}

/// Closure of `J` under both products.
pub fn is_lj_subalgebra(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<ClosureCheck> {
    l.carrier().require_contains(j, "is_lj_subalgebra")?;
    Ok(ClosureCheck::run(j.basis(), j.basis(), j, &[Product::Jordan, Product::Lie], l))
}

pub fn is_unital_subalgebra(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<UnitalCheck> {
    l.carrier().require_contains(j, "is_unital_subalgebra")?;
    let own_unit = if j.is_zero() {
        None
    } else {
        ljb_core::solve_unit(j, |a, b| vec![jordan(a, b)]).filter(|e| {
            j.basis()
                .iter()
                .all(|b| hs_norm(&(jordan(e, b) - b)) <= tolerance::scaled(tolerance::MEMBER) * 10.0)
        })
    };
    let contains_algebra_unit = !j.is_zero() && l.unit().is_some_and(|u| j.contains_matrix(u));
    Ok(UnitalCheck {
        own_unit,
        contains_algebra_unit,
    })
}

fn require_ideal_of(n: &LjbAlgebra, k: &MatrixSubspace, theorem: &'static str) -> Result<ClosureCheck> {
    let check = ClosureCheck::run(n.basis(), k.basis(), k, &[Product::Jordan, Product::Lie], n);
    if let Some(w) = check.witness {
        return Err(Error::TheoremViolation {
            theorem,
            detail: w.to_string(),
        });
    }
    Ok(check)
}

fn build(
    mode: ReductionMode,
    source: &MatrixSubspace,
    normalizer: LjbAlgebra,
    reducing_ideal: MatrixSubspace,
    ideal_check: ClosureCheck,
) -> Result<ReductionResult> {
    let n_c = CStarAlgebra::new(normalizer.carrier().complexify()).map_err(|e| Error::TheoremViolation {
        theorem: "complexified normalizer is a C*-algebra",
        detail: e.to_string(),
    })?;
    let support = support_projection(&reducing_ideal.complexify(), &n_c).map_err(|e| match e {
        Error::NotAnIdeal { witness } => Error::TheoremViolation {
            theorem: "reducing ideal is an associative ideal after complexification",
            detail: witness.to_string(),
        },
        other => other,
    })?;
    let complement = normalizer.carrier().complement_of(&reducing_ideal)?;
    let quotient = LjbAlgebra::new(complement, *normalizer.params()).map_err(|e| Error::TheoremViolation {
        theorem: "quotient carries a Lie-Jordan structure",
        detail: e.to_string(),
    })?;
    Ok(ReductionResult {
        mode,
        source: source.clone(),
        normalizer,
        reducing_ideal,
        quotient,
        ideal_check,
        support,
    })
}

/// `N_J / (N_J ∩ J)` for a Jordan ideal `J`.
pub fn reduce_by_ideal(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<ReductionResult> {
    let check = is_jordan_ideal(l, j)?;
    if let Some(witness) = check.witness {
        return Err(Error::NotAnIdeal { witness });
    }
    let n = normalizer(l, j)?;
    let k = n.carrier().intersect(j)?;
    let ideal_check = require_ideal_of(&n, &k, "normalizer meet ideal is a Lie-Jordan ideal of the normalizer")?;
    build(ReductionMode::ByIdeal, j, n, k, ideal_check)
}

/// `N_J / (N_J ∘ J)` for a Lie–Jordan subalgebra `J` not containing the unit.
pub fn reduce_by_subalgebra(l: &LjbAlgebra, j: &MatrixSubspace) -> Result<ReductionResult> {
    let check = is_lj_subalgebra(l, j)?;
    if let Some(witness) = check.witness {
        return Err(Error::NotASubalgebra { witness });
    }
    if is_unital_subalgebra(l, j)?.contains_algebra_unit {
        return Err(Error::UnitalSubalgebra);
    }
    let n = normalizer(l, j)?;
    let mut products = Vec::with_capacity(n.dim() * j.dim());
    for a in n.basis() {
        for c in j.basis() {
            products.push(jordan(a, c));
        }
    }
    let k = MatrixSubspace::span_unchecked(j.ambient(), &products, true);
    if let Some((index, residual)) = k.first_outside(j) {
        return Err(Error::TheoremViolation {
            theorem: "subalgebra lies in its Jordan product with the normalizer",
            detail: format!("basis element {index} residual {residual:.3e}"),
        });
    }
    let ideal_check = require_ideal_of(&n, &k, "normalizer times subalgebra is a Lie-Jordan ideal of the normalizer")?;
    build(ReductionMode::BySubalgebra, j, n, k, ideal_check)
}

/// Unit of a two-sided ideal `d` of `alg`: the range projection of `Σ d†d`.
pub fn support_projection(d: &MatrixSubspace, alg: &CStarAlgebra) -> Result<CMat> {
    let n = alg.n();
    alg.carrier().require_contains(d, "support_projection")?;
    let herm = alg.complex_basis();
    let p = ljb_core::LjbParams::default();
    if let Some(witness) = closure_witness(&herm, d.basis(), d, &[Product::Left, Product::Right], &p, false) {
        return Err(Error::NotAnIdeal { witness });
    }
    if d.is_zero() {
        return Ok(linalg::zeros(n));
    }
    let mut h = linalg::zeros(n);
    for x in d.basis() {
        h += x.adjoint() * x;
    }
    let top = linalg::eigh(&h).0.last().copied().unwrap_or(0.0);
    let cut = linalg::rank_cutoff(top);
    let e = linalg::spectral_projector(&h, |v| v > cut);
    let tol = tolerance::scaled(tolerance::MEMBER) * 10.0;
    let violation = |what: &str, r: f64| Error::TheoremViolation {
        theorem: "ideal has a central support projection",
        detail: format!("{what} residual {r:.3e}"),
    };
    let r = d.residual(&e);
    if r > tol * (n as f64) {
        return Err(violation("support membership", r));
    }
    for x in d.basis() {
        let r = hs_norm(&(&e * x - x)).max(hs_norm(&(x * &e - x)));
        if r > tol {
            return Err(violation("unit action", r));
        }
    }
    for a in &herm {
        let r = hs_norm(&(&e * a - a * &e));
        if r > tol {
            return Err(violation("centrality", r));
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ljb_core::{verify_ljb_axioms, LjbParams};
    use crate::linalg::{real_diag, unit};
    use crate::matspace::AmbientSpace;
    use crate::testutil::pauli;

    fn span(n: usize, gens: &[CMat]) -> MatrixSubspace {
        MatrixSubspace::span(AmbientSpace::new(n).unwrap(), gens, true).unwrap()
    }

    fn full(n: usize) -> LjbAlgebra {
        LjbAlgebra::full(n, LjbParams::default()).unwrap()
    }

    fn diag(n: usize) -> LjbAlgebra {
        LjbAlgebra::diagonal(n, LjbParams::default()).unwrap()
    }

    #[test]
    fn normalizer_examples() {
        let l = full(2);
        let zero = MatrixSubspace::zero(AmbientSpace::new(2).unwrap());
        assert!(normalizer(&l, &zero).unwrap().carrier().same_as(l.carrier()));
        assert!(normalizer(&l, l.carrier()).unwrap().carrier().same_as(l.carrier()));
        let n = normalizer(&l, &span(2, &[unit(2, 0, 0)])).unwrap();
        assert_eq!(n.dim(), 2);
        assert!(n.carrier().same_as(diag(2).carrier()));
    }

    #[test]
    fn normalizer_requires_containment() {
        let l = diag(2);
        let [_, x, _, _] = pauli();
        assert!(matches!(normalizer(&l, &span(2, &[x])), Err(Error::NotContained { .. })));
    }

    #[test]
    fn jordan_ideal_examples() {
        let l = full(2);
        assert!(is_jordan_ideal(&l, l.carrier()).unwrap().holds);
        let zero = MatrixSubspace::zero(AmbientSpace::new(2).unwrap());
        assert!(is_jordan_ideal(&l, &zero).unwrap().holds);
        let c = is_jordan_ideal(&l, &span(2, &[unit(2, 0, 0)])).unwrap();
        assert!(!c.holds);
        assert!(c.witness.is_some());
        assert!(c.worst_residual > 0.1);
    }

    #[test]
    fn subalgebra_examples() {
        let l = full(2);
        let j = span(2, &[unit(2, 0, 0)]);
        assert!(is_lj_subalgebra(&l, &j).unwrap().holds);
        let u = is_unital_subalgebra(&l, &j).unwrap();
        assert!(u.is_unital());
        assert!(!u.contains_algebra_unit);
        let [_, x, _, _] = pauli();
        assert!(!is_lj_subalgebra(&l, &span(2, &[x])).unwrap().holds);
        let zero = MatrixSubspace::zero(AmbientSpace::new(2).unwrap());
        assert!(is_lj_subalgebra(&l, &zero).unwrap().holds);
        assert!(!is_unital_subalgebra(&l, &zero).unwrap().is_unital());
    }

    #[test]
    fn trivial_ideal_reductions() {
        let l = full(2);
        let zero = MatrixSubspace::zero(AmbientSpace::new(2).unwrap());
        let r = reduce_by_ideal(&l, &zero).unwrap();
        assert!(r.quotient.carrier().same_as(l.carrier()));
        let r = reduce_by_ideal(&l, l.carrier()).unwrap();
        assert_eq!(r.quotient.dim(), 0);
        assert_eq!(r.reducing_ideal.dim(), 4);
    }

    #[test]
    fn three_point_quotient() {
        let l = diag(3);
        let j = span(3, &[unit(3, 0, 0)]);
        let r = reduce_by_ideal(&l, &j).unwrap();
        assert_eq!(r.normalizer.dim(), 3);
        assert_eq!(r.quotient.dim(), 2);
        assert!(r.dimensions_consistent());
        assert!(verify_ljb_axioms(&r.quotient, 10, 0).passed);
        assert!(hs_norm(&(r.support() - unit(3, 0, 0))) < 1e-12);
        let rep = r.project(&real_diag(&[7.0, 1.0, 2.0])).unwrap();
        assert!(hs_norm(&(rep - real_diag(&[0.0, 1.0, 2.0]))) < 1e-12);
    }

    #[test]
    fn quotient_norm_on_diagonal() {
        let r = reduce_by_ideal(&diag(2), &span(2, &[unit(2, 0, 0)])).unwrap();
        assert!((r.quotient_norm(&real_diag(&[3.0, 5.0])).unwrap() - 5.0).abs() < 1e-12);
        assert!(r.quotient_norm(&unit(2, 0, 0)).unwrap() < 1e-12);
        let [_, x, _, _] = pauli();
        assert!(matches!(r.quotient_norm(&x), Err(Error::NotMember { .. })));
        let zero = MatrixSubspace::zero(AmbientSpace::new(2).unwrap());
        let r0 = reduce_by_ideal(&diag(2), &zero).unwrap();
        assert!((r0.quotient_norm(&real_diag(&[3.0, -5.0])).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn non_ideal_is_rejected_with_witness() {
        match reduce_by_ideal(&full(2), &span(2, &[unit(2, 0, 0)])) {
            Err(Error::NotAnIdeal { witness }) => assert!(witness.residual > 0.1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn subalgebra_reduction_of_corner() {
        // J = span{E11} in Hermitian 2x2: its own unit is E11, not I.
        let r = reduce_by_subalgebra(&full(2), &span(2, &[unit(2, 0, 0)])).unwrap();
        assert_eq!(r.normalizer.dim(), 2);
        assert_eq!(r.reducing_ideal.dim(), 1);
        assert_eq!(r.quotient.dim(), 1);
        assert!(r.quotient.contains(&unit(2, 1, 1)));
    }

    #[test]
    fn subalgebra_rejections() {
        let l = diag(2);
        let j = span(2, &[linalg::identity(2)]);
        assert!(matches!(reduce_by_subalgebra(&l, &j), Err(Error::UnitalSubalgebra)));
        let [_, x, _, _] = pauli();
        assert!(matches!(
            reduce_by_subalgebra(&full(2), &span(2, &[x])),
            Err(Error::NotASubalgebra { .. })
        ));
        let zero = MatrixSubspace::zero(AmbientSpace::new(2).unwrap());
        let r = reduce_by_subalgebra(&l, &zero).unwrap();
        assert!(r.reducing_ideal.is_zero());
        assert!(r.quotient.carrier().same_as(l.carrier()));
    }

    #[test]
    fn support_projection_examples() {
        let amb = AmbientSpace::new(2).unwrap();
        let diag_c = CStarAlgebra::new(diag(2).carrier().complexify()).unwrap();
        let d = span(2, &[unit(2, 0, 0)]).complexify();
        let e = support_projection(&d, &diag_c).unwrap();
        assert!(hs_norm(&(e - unit(2, 0, 0))) < 1e-12);
        let e = support_projection(diag_c.carrier(), &diag_c).unwrap();
        assert!(hs_norm(&(e - linalg::identity(2))) < 1e-12);
        assert!(hs_norm(&support_projection(&MatrixSubspace::zero(amb), &diag_c).unwrap()) == 0.0);
        let full_c = CStarAlgebra::full(2).unwrap();
        assert!(matches!(support_projection(&d, &full_c), Err(Error::NotAnIdeal { .. })));
    }
}
