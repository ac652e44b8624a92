//! States on Lie–Jordan algebras.
//!
//! A functional is stored through its density representative `ρ` inside the
//! span of the carrier, so `ω(a) = Re tr(ρ a) = ⟨ρ, a⟩`. Positivity is the
//! Jordan Gram matrix `ω(bᵢ ∘ bⱼ)` being positive semidefinite.
//!
//! Extension from a subalgebra is a feasibility problem: a positive
//! semidefinite `ρ` with prescribed pairings against the subalgebra. It is
//! solved with Dykstra's alternating projections between that affine set and
//! the cone, then projected back to the carrier.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ljb_core::{self, jordan, LjbAlgebra};
use crate::linalg::{self, hs_inner, hs_norm, CMat, C64};
use crate::matspace::MatrixSubspace;
use crate::reduction::ReductionResult;
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct StateFunctional {
    algebra: LjbAlgebra,
    rho: CMat,
    values: Vec<f64>,
}

impl StateFunctional {
    /// The functional `a ↦ Re tr(ρ a)` restricted to `algebra`.
    pub fn from_density(algebra: &LjbAlgebra, rho: &CMat) -> Result<Self> {
        let amb = algebra.carrier().ambient();
        amb.check(rho)?;
        let deviation = linalg::hermitian_deviation(rho);
        if deviation > tolerance::scaled(tolerance::MEMBER) {
            return Err(Error::NotHermitian { index: 0, deviation });
        }
        let canonical = algebra.carrier().project(rho);
        let values = algebra.basis().iter().map(|b| hs_inner(&canonical, b)).collect();
        Ok(StateFunctional {
            algebra: algebra.clone(),
            rho: canonical,
            values,
        })
    }

    /// The functional with the given values on the algebra basis.
    pub fn from_values(algebra: &LjbAlgebra, values: &[f64]) -> Result<Self> {
        if values.len() != algebra.dim() {
            return Err(Error::Precondition(format!(
                "expected {} values, got {}",
                algebra.dim(),
                values.len()
            )));
        }
        let rho = algebra.carrier().combine(values);
        Ok(StateFunctional {
            algebra: algebra.clone(),
            rho,
            values: values.to_vec(),
        })
    }

    pub fn algebra(&self) -> &LjbAlgebra {
        &self.algebra
    }

    /// Canonical density, in the span of the carrier.
    pub fn rho(&self) -> &CMat {
        &self.rho
    }

    /// Values on the algebra basis.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, a: &CMat) -> f64 {
        hs_inner(&self.rho, a)
    }

    /// Jordan Gram matrix `ω(bᵢ ∘ bⱼ)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let b = self.algebra.basis();
        let d = b.len();
        let mut g = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = self.eval(&jordan(&b[i], &b[j]));
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StateReport {
    pub normalization: f64,
    pub min_gram_eigenvalue: f64,
    pub has_unit: bool,
    pub is_state: bool,
}

pub fn is_state(omega: &StateFunctional) -> StateReport {
    let (has_unit, normalization) = match omega.algebra.unit() {
        Some(u) => (true, omega.eval(u)),
        None => (false, f64::NAN),
    };
    let min_gram_eigenvalue = linalg::eigh_real(&omega.gram()).0.first().copied().unwrap_or(0.0);
    let is_state = has_unit
        && (normalization - 1.0).abs() <= tolerance::scaled(tolerance::STATE)
        && min_gram_eigenvalue >= -tolerance::scaled(tolerance::PSD);
    StateReport {
        normalization,
        min_gram_eigenvalue,
        has_unit,
        is_state,
    }
}

pub(crate) fn require_state(omega: &StateFunctional, what: &str) -> Result<()> {
    let r = is_state(omega);
    if r.is_state {
        Ok(())
    } else {
        Err(Error::NotAState {
            reason: format!(
                "{what}: normalization {:.3e}, minimum Gram eigenvalue {:.3e}",
                r.normalization, r.min_gram_eigenvalue
            ),
        })
    }
}

/// First basis element of `s` on which `omega` does not vanish.
pub fn first_nonvanishing(omega: &StateFunctional, s: &MatrixSubspace) -> Result<Option<(usize, f64)>> {
    omega.algebra.carrier().require_contains(s, "vanishes_on")?;
    Ok(s
        .basis()
        .iter()
        .map(|b| omega.eval(b))
        .enumerate()
        .find(|(_, v)| v.abs() > tolerance::scaled(tolerance::STATE)))
}

pub fn vanishes_on(omega: &StateFunctional, s: &MatrixSubspace) -> Result<bool> {
    Ok(first_nonvanishing(omega, s)?.is_none())
}

/// Restriction of `omega` to a subalgebra.
pub fn restrict(omega: &StateFunctional, sub: &LjbAlgebra) -> Result<StateFunctional> {
    omega.algebra.carrier().require_contains(sub.carrier(), "restrict")?;
    StateFunctional::from_density(sub, &omega.rho)
}

/// The state induced on the quotient by a state vanishing on the reducing ideal.
pub fn reduce_state(omega: &StateFunctional, r: &ReductionResult) -> Result<StateFunctional> {
    let on_n = restrict(omega, &r.normalizer)?;
    require_state(&on_n, "restriction to the normalizer")?;
    if let Some((index, value)) = first_nonvanishing(&on_n, &r.reducing_ideal)? {
        return Err(Error::NotVanishing { index, value });
    }
    // The quotient carrier is the set of canonical representatives, so the
    // induced functional is the restriction to it.
    let reduced = StateFunctional::from_density(&r.quotient, &omega.rho)?;
    if r.quotient.dim() > 0 {
        let rep = is_state(&reduced);
        if !rep.is_state {
            return Err(Error::TheoremViolation {
                theorem: "induced functional is a state on the quotient",
                detail: format!(
                    "normalization {:.3e}, minimum Gram eigenvalue {:.3e}",
                    rep.normalization, rep.min_gram_eigenvalue
                ),
            });
        }
    }
    Ok(reduced)
}

/// The state on `N_J` corresponding to a state on the quotient:
/// `a ↦ ω̃([a])`.
pub fn lift_reduced_state(omega_tilde: &StateFunctional, r: &ReductionResult) -> Result<StateFunctional> {
    if !omega_tilde.algebra.carrier().same_as(r.quotient.carrier()) {
        return Err(Error::AlgebraMismatch);
    }
    let values: Vec<f64> = r
        .normalizer
        .basis()
        .iter()
        .map(|a| r.project(a).map(|rep| omega_tilde.eval(&rep)))
        .collect::<Result<_>>()?;
    StateFunctional::from_values(&r.normalizer, &values)
}

#[derive(Clone, Debug, Serialize)]
pub struct DykstraOutcome {
    pub iterations: usize,
    pub affine_residual: f64,
    pub psd_violation: f64,
}

/// Dykstra's projections between `{ρ Hermitian : ⟨ρ, bᵢ⟩ = tᵢ}` (with `bᵢ`
/// orthonormal) and the positive semidefinite cone, started at `init`.
pub fn dykstra_psd_affine(
    constraints: &[CMat],
    targets: &[f64],
    init: &CMat,
    tol: f64,
    cap: usize,
) -> (CMat, DykstraOutcome) {
    let affine = |x: &CMat| {
        let mut y = x.clone();
        for (b, t) in constraints.iter().zip(targets) {
            y -= b.scale(hs_inner(x, b) - t);
        }
        linalg::hermitian_part(&y)
    };
    let residual = |x: &CMat| {
        constraints
            .iter()
            .zip(targets)
            .map(|(b, t)| (hs_inner(x, b) - t).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let n = init.nrows();
    let mut x = init.clone();
    let mut p = linalg::zeros(n);
    let mut q = linalg::zeros(n);
    let mut out = DykstraOutcome {
        iterations: 0,
        affine_residual: residual(&x),
        psd_violation: (-linalg::min_eigenvalue(&x)).max(0.0),
    };
    for it in 1..=cap {
        let y = affine(&(&x + &p));
        p = &x + &p - &y;
        let z = &y + &q;
        x = linalg::psd_clip(&z);
        q = z - &x;
        out.iterations = it;
        out.affine_residual = residual(&x);
        out.psd_violation = (-linalg::min_eigenvalue(&y)).max(0.0);
        if out.affine_residual <= tol && (out.psd_violation <= tol || hs_norm(&(&x - &y)) <= tol) {
            break;
        }
    }
    (x, out)
}

#[derive(Clone, Debug)]
pub struct Extension {
    pub state: StateFunctional,
    pub solver: DykstraOutcome,
}

/// Extends a state on a unital subalgebra `omega_prime.algebra() ⊆ l` to a
/// state on `l`.
pub fn extend_state(omega_prime: &StateFunctional, l: &LjbAlgebra) -> Result<Extension> {
    let n_alg = &omega_prime.algebra;
    l.carrier().require_contains(n_alg.carrier(), "extend_state")?;
    let unit = l
        .unit()
        .ok_or_else(|| Error::Precondition("algebra has no unit".into()))?;
    if !n_alg.contains(unit) {
        return Err(Error::Precondition("subalgebra must contain the unit".into()));
    }
    require_state(omega_prime, "functional to extend")?;

    let tol = tolerance::scaled(tolerance::DYKSTRA);
    let init = linalg::zeros(l.n());
    let (x, solver) = dykstra_psd_affine(n_alg.basis(), omega_prime.values(), &init, tol, tolerance::DYKSTRA_CAP);
    let state = StateFunctional::from_density(l, &x)?;
    let mismatch = n_alg
        .basis()
        .iter()
        .zip(omega_prime.values())
        .map(|(b, v)| (state.eval(b) - v).abs())
        .fold(0.0, f64::max);
    let report = is_state(&state);
    if solver.affine_residual > tol || mismatch > tolerance::scaled(tolerance::AXIOM) || !report.is_state {
        return Err(Error::NonConvergence {
            iterations: solver.iterations,
            affine_residual: solver.affine_residual.max(mismatch),
            psd_violation: solver.psd_violation.max(-report.min_gram_eigenvalue),
        });
    }
    Ok(Extension { state, solver })
}

fn same_algebra(a: &LjbAlgebra, b: &LjbAlgebra) -> bool {
    a.params() == b.params() && a.carrier().same_as(b.carrier())
}

/// Agreement of two states on `n`.
pub fn nj0_equivalent(omega1: &StateFunctional, omega2: &StateFunctional, n: &MatrixSubspace) -> Result<bool> {
    Ok(nj0_distance(omega1, omega2, n)? <= tolerance::scaled(tolerance::STATE))
}

pub fn nj0_distance(omega1: &StateFunctional, omega2: &StateFunctional, n: &MatrixSubspace) -> Result<f64> {
    if !same_algebra(&omega1.algebra, &omega2.algebra) {
        return Err(Error::AlgebraMismatch);
    }
    omega1.algebra.carrier().require_contains(n, "nj0_equivalent")?;
    Ok(n.basis()
        .iter()
        .map(|b| (omega1.eval(b) - omega2.eval(b)).abs())
        .fold(0.0, f64::max))
}

/// States agreeing with `base` on a fixed subspace.
#[derive(Clone, Debug)]
pub struct StateClass {
    pub base: StateFunctional,
    pub equivalence_subspace: MatrixSubspace,
}

impl StateClass {
    pub fn contains(&self, omega: &StateFunctional) -> Result<bool> {
        nj0_equivalent(&self.base, omega, &self.equivalence_subspace)
    }
}

/// Random state: the projection of a Gaussian `X†X`, compressed to the unit
/// of the algebra and normalized.
pub fn random_state(algebra: &LjbAlgebra, rng: &mut ChaCha8Rng) -> Result<StateFunctional> {
    random_state_within(algebra, None, rng)
}

/// As [`random_state`], with the density additionally compressed by `c`
/// (a projection commuting with the algebra).
pub fn random_state_within(algebra: &LjbAlgebra, c: Option<&CMat>, rng: &mut ChaCha8Rng) -> Result<StateFunctional> {
    let unit = algebra
        .unit()
        .cloned()
        .ok_or_else(|| Error::Precondition("algebra has no unit".into()))?;
    let amb = algebra.carrier().ambient();
    let x = ljb_core::random_element(&MatrixSubspace::all_matrices(amb), rng);
    let cut = match c {
        Some(c) => &unit * c,
        None => unit.clone(),
    };
    let rho0 = cut.adjoint() * x.adjoint() * &x * &cut;
    let rho0 = linalg::hermitian_part(&rho0);
    let norm = hs_inner(&rho0, &unit);
    if norm <= 0.0 {
        return Err(Error::Precondition("compression leaves no room for a state".into()));
    }
    StateFunctional::from_density(algebra, &rho0.unscale(norm))
}

/// Worst `−ω(A†A) / ‖A‖²` over random `A` in the complexification, clipped at
/// zero. Zero means the complex-linear extension is positive.
pub fn complex_positivity_defect(omega: &StateFunctional, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = omega.algebra.carrier().complexify();
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let a = ljb_core::random_element(&space, &mut rng);
        let v: C64 = linalg::trace_product(&omega.rho, &(a.adjoint() * &a));
        worst = worst.max((-v.re).max(0.0));
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceCertificate {
    pub samples: usize,
    /// Reduced state → lift → extend → reduce, worst value difference.
    pub reduced_round_trip: f64,
    /// State vanishing on the ideal → reduce → lift → extend, worst
    /// disagreement on the normalizer.
    pub class_round_trip: f64,
    pub max_iterations: usize,
    pub passed: bool,
}

/// Round trips between states on the quotient and classes of states on `l`
/// that vanish on the reducing ideal.
pub fn verify_state_correspondence(
    l: &LjbAlgebra,
    r: &ReductionResult,
    samples: usize,
    seed: u64,
) -> Result<CorrespondenceCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cert = CorrespondenceCertificate {
        samples,
        reduced_round_trip: 0.0,
        class_round_trip: 0.0,
        max_iterations: 0,
        passed: true,
    };
    if r.quotient.dim() == 0 {
        // No states on the zero algebra; nothing to correspond.
        return Ok(cert);
    }
    let away = linalg::identity(l.n()) - r.support();
    for _ in 0..samples {
        let wt = random_state(&r.quotient, &mut rng)?;
        let lifted = lift_reduced_state(&wt, r)?;
        let ext = extend_state(&lifted, l)?;
        cert.max_iterations = cert.max_iterations.max(ext.solver.iterations);
        let back = reduce_state(&ext.state, r)?;
        let d = wt
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        cert.reduced_round_trip = cert.reduced_round_trip.max(d);

        let omega = random_state_within(l, Some(&away), &mut rng)?;
        let red = reduce_state(&omega, r)?;
        let lifted = lift_reduced_state(&red, r)?;
        let ext = extend_state(&lifted, l)?;
        cert.max_iterations = cert.max_iterations.max(ext.solver.iterations);
        let d = nj0_distance(&omega, &ext.state, r.normalizer.carrier())?;
        cert.class_round_trip = cert.class_round_trip.max(d);
    }
    let tol = tolerance::scaled(tolerance::ROUND_TRIP);
    cert.passed = cert.reduced_round_trip <= tol && cert.class_round_trip <= tol;
    Ok(cert)
}
