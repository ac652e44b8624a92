//! Randomized certification suites. Instance `i` of a suite run with seed `s`
//! is generated from its own seed, so results do not depend on `count`.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constraints::{t_reduce, verify_equivalence, ConstrainedSystem};
use crate::error::{Error, Result};
use crate::genrand::{self, GenSpec, Profile};
use crate::gns;
use crate::ljb_core::{verify_dynamical_correspondence, verify_ljb_axioms, LjbAlgebra, LjbParams};
use crate::linalg;
use crate::reduction::{reduce_by_ideal, reduce_by_subalgebra, ReductionResult};
use crate::states;

const AXIOM_TRIALS: usize = 20;
const STATE_SAMPLES: usize = 10;
const ATTEMPTS: u64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Suite {
    #[value(name = "axioms")]
    Axioms,
    #[value(name = "thm6.2")]
    Thm62,
    #[value(name = "equivalence")]
    Equivalence,
    #[value(name = "states")]
    States,
    #[value(name = "gns")]
    Gns,
    #[value(name = "thm8.1")]
    Thm81,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Thm62 => "thm6.2",
            Suite::Equivalence => "equivalence",
            Suite::States => "states",
            Suite::Gns => "gns",
            Suite::Thm81 => "thm8.1",
        }
    }

    pub fn default_max_n(self) -> usize {
        match self {
            Suite::Axioms => 5,
            Suite::Thm62 | Suite::Equivalence | Suite::Thm81 => 6,
            Suite::States | Suite::Gns => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: &'static str,
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub worst_residual: f64,
    pub failures: Vec<String>,
}

impl SuiteSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.count
    }

    pub fn line(&self) -> String {
        format!(
            "{}: {}/{} passed, worst residual {:.3e}",
            self.suite, self.passed, self.count, self.worst_residual
        )
    }
}

pub fn certify(suite: Suite, seed: u64, count: usize, max_n: Option<usize>) -> SuiteSummary {
    let max_n = max_n.unwrap_or(suite.default_max_n()).max(1);
    let mut summary = SuiteSummary {
        suite: suite.name(),
        seed,
        count,
        passed: 0,
        worst_residual: 0.0,
        failures: Vec::new(),
    };
    for i in 0..count {
        let s = instance_seed(seed, i);
        let outcome = match suite {
            Suite::Axioms => axioms_instance(s, i, max_n),
            Suite::Thm62 => thm62_instance(s, max_n),
            Suite::Equivalence => equivalence_instance(s, max_n),
            Suite::States => states_instance(s, i, max_n),
            Suite::Gns => gns_instance(s, max_n),
            Suite::Thm81 => thm81_instance(s, max_n),
        };
        match outcome {
            Ok((true, r)) => {
                summary.passed += 1;
                summary.worst_residual = summary.worst_residual.max(r);
            }
            Ok((false, r)) => {
                summary.worst_residual = summary.worst_residual.max(r);
                summary.failures.push(format!("instance {i}: residual {r:.3e}"));
            }
            Err(e) => summary.failures.push(format!("instance {i}: {e}")),
        }
    }
    summary
}

pub fn instance_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

/// Generator spec for instance `i`, cycling through full matrices, block
/// diagonal, commutative and random subalgebra profiles.
pub fn algebra_spec(seed: u64, i: usize, max_n: usize) -> Result<GenSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_n);
    let profile = match i % 4 {
        0 => return GenSpec::new(seed, 1 + (i / 4) % max_n, Profile::FullMatrix),
        1 => Profile::BlockDiagonal(random_blocks(n, &mut rng)),
        2 => Profile::Commutative(rng.random_range(1..=n)),
        _ => Profile::RandomUnitalSubalgebra(rng.random_range(1..=n * n)),
    };
    GenSpec::new(seed, n, profile)
}

fn random_blocks(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.random_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    sizes
}

/// A random constrained system over a full, block diagonal or random
/// subalgebra field, with at most three constraints.
pub fn constrained_instance(seed: u64, max_n: usize) -> Result<ConstrainedSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_n);
    let profile = match rng.random_range(0..3) {
        0 => Profile::FullMatrix,
        1 => Profile::BlockDiagonal(random_blocks(n, &mut rng)),
        _ => Profile::RandomUnitalSubalgebra(rng.random_range(1..=n * n)),
    };
    let spec = GenSpec::new(seed, n, profile)?;
    let count = rng.random_range(1..=3);
    let round = rng.random_bool(0.5);
    genrand::gen_constrained_system(&spec, count, round)
}

/// The Lie–Jordan reduction of `F_sa` by `D_sa` for a constrained system.
pub fn subalgebra_reduction(sys: &ConstrainedSystem) -> Result<(LjbAlgebra, ReductionResult)> {
    let t = t_reduce(sys)?;
    let l = LjbAlgebra::new(sys.field().self_adjoint_part(), LjbParams::default())?;
    let r = reduce_by_subalgebra(&l, &t.d.hermitian_part())?;
    Ok((l, r))
}

/// Instance `i` of the reduction family: ideal reductions by block summands
/// for even `i`, constraint-derived subalgebra reductions for odd `i`. Draws
/// fresh sub-seeds until the subalgebra is non-unital and the quotient is
/// nonzero.
pub fn reduction_instance(seed: u64, i: usize, max_n: usize) -> Result<(LjbAlgebra, ReductionResult)> {
    for attempt in 0..ATTEMPTS {
        let s = instance_seed(seed, attempt as usize);
        let (l, r) = if i.is_multiple_of(2) {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let n = rng.random_range(1..=max_n);
            let profile = if rng.random_bool(0.5) {
                Profile::BlockDiagonal(random_blocks(n, &mut rng))
            } else {
                Profile::Commutative(rng.random_range(1..=n))
            };
            let spec = GenSpec::new(s, n, profile)?;
            let l = genrand::gen_algebra(&spec)?;
            let j = genrand::gen_jordan_ideal(&spec, &l)?;
            let r = reduce_by_ideal(&l, &j)?;
            (l, r)
        } else {
            match subalgebra_reduction(&constrained_instance(s, max_n)?) {
                Err(Error::UnitalSubalgebra) => continue,
                other => other?,
            }
        };
        if r.quotient.dim() > 0 {
            return Ok((l, r));
        }
    }
    Err(Error::Precondition("no instance with a nonzero quotient".into()))
}

type Outcome = Result<(bool, f64)>;

fn axioms_instance(seed: u64, i: usize, max_n: usize) -> Outcome {
    let l = genrand::gen_algebra(&algebra_spec(seed, i, max_n)?)?;
    let ax = verify_ljb_axioms(&l, AXIOM_TRIALS, seed);
    let dy = verify_dynamical_correspondence(&l, AXIOM_TRIALS, seed);
    Ok((ax.passed && dy.passed, ax.worst.max(dy.worst)))
}

fn thm62_instance(seed: u64, max_n: usize) -> Outcome {
    let sys = constrained_instance(seed, max_n)?;
    let t = t_reduce(&sys)?;
    let o = t.observables.carrier();
    let m = t.multiplier.carrier();
    let r1 = o.basis().iter().map(|b| m.residual(b)).fold(0.0, f64::max);
    let r2 = m.basis().iter().map(|b| o.residual(b)).fold(0.0, f64::max);
    Ok((o.dim() == m.dim() && o.same_as(m), r1.max(r2)))
}

fn equivalence_instance(seed: u64, max_n: usize) -> Outcome {
    let sys = constrained_instance(seed, max_n)?;
    let cert = verify_equivalence(&sys, LjbParams::default(), seed)?;
    let r = cert.product_residual.max(cert.bracket_residual).max(cert.norm_residual);
    Ok((cert.passed(), r))
}

fn states_instance(seed: u64, i: usize, max_n: usize) -> Outcome {
    let (l, r) = reduction_instance(seed, i, max_n)?;
    let cert = states::verify_state_correspondence(&l, &r, STATE_SAMPLES, seed)?;
    Ok((cert.passed, cert.reduced_round_trip.max(cert.class_round_trip)))
}

fn gns_instance(seed: u64, max_n: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i = rng.random_range(0..4);
    let spec = algebra_spec(seed, i, max_n)?;
    let f = genrand::gen_cstar(&spec)?;
    let l = LjbAlgebra::new(f.self_adjoint_part(), LjbParams::default())?;
    let omega = genrand::gen_state(&spec, &l)?;
    let v = gns::gns(&f, &omega)?.verify();
    Ok((v.passed, v.worst))
}

/// A pipeline instance for the reduced GNS comparison: constrained system,
/// subalgebra reduction with a nonzero quotient, and a state supported away
/// from the reducing ideal.
pub fn thm81_data(seed: u64, max_n: usize) -> Result<(crate::ljb_core::CStarAlgebra, ReductionResult, states::StateFunctional)> {
    for attempt in 0..ATTEMPTS {
        let s = instance_seed(seed, attempt as usize);
        let sys = constrained_instance(s, max_n)?;
        let (l, r) = match subalgebra_reduction(&sys) {
            Err(Error::UnitalSubalgebra) => continue,
            other => other?,
        };
        if r.quotient.dim() == 0 {
            continue;
        }
        let away = linalg::identity(l.n()) - r.support();
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let omega = states::random_state_within(&l, Some(&away), &mut rng)?;
        return Ok((sys.field().clone(), r, omega));
    }
    Err(Error::Precondition("no instance with a nonzero quotient".into()))
}

fn thm81_instance(seed: u64, max_n: usize) -> Outcome {
    let (f, r, omega) = thm81_data(seed, max_n)?;
    let tilde = states::reduce_state(&omega, &r)?;
    let c = gns::reduced_gns_equivalence(&f, &r, &omega, &tilde)?;
    let worst = c
        .generator_match
        .max(c.gram_residual)
        .max(c.unitarity_residual)
        .max(c.intertwining_residual);
    Ok((c.passed, worst))
}
