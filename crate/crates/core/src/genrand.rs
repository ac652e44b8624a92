//! Seeded random instances: algebras, ideals, constraints and states.
//!
//! Every draw uses a ChaCha8 stream keyed by the spec seed and a fixed
//! purpose id, so the same spec always yields the same objects.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constraints::ConstrainedSystem;
use crate::error::{Error, Result};
use crate::ljb_core::{random_element, CStarAlgebra, LjbAlgebra, LjbParams};
use crate::linalg::{self, c, CMat, C64};
use crate::matspace::{AmbientSpace, MatrixSubspace};
use crate::states::{self, StateFunctional};
use crate::tolerance;

const STREAM_ALGEBRA: u64 = 1;
const STREAM_CONSTRAINTS: u64 = 2;
const STREAM_STATE: u64 = 3;
const STREAM_IDEAL: u64 = 4;
const STREAM_CENTER: u64 = 5;
const STREAM_SUPPORT: u64 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    FullMatrix,
    BlockDiagonal(Vec<usize>),
    Commutative(usize),
    RandomUnitalSubalgebra(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    pub profile: Profile,
}

impl GenSpec {
    pub fn new(seed: u64, n: usize, profile: Profile) -> Result<Self> {
        let spec = GenSpec { seed, n, profile };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyAmbient);
        }
        let bad = |msg: String| Err(Error::Precondition(msg));
        match &self.profile {
            Profile::FullMatrix => Ok(()),
            Profile::BlockDiagonal(sizes) => {
                if sizes.contains(&0) || sizes.iter().sum::<usize>() != self.n {
                    return bad(format!("block sizes {sizes:?} must be positive and sum to {}", self.n));
                }
                Ok(())
            }
            Profile::Commutative(points) => {
                if *points == 0 || *points > self.n {
                    return bad(format!("commutative profile needs 1..={} points, got {points}", self.n));
                }
                Ok(())
            }
            Profile::RandomUnitalSubalgebra(target) => {
                if *target == 0 || *target > self.n * self.n {
                    return bad(format!("target dimension {target} outside 1..={}", self.n * self.n));
                }
                Ok(())
            }
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Gaussian complex matrix.
fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    gaussian(n, rng).qr().q()
}

/// Every way to write `n = Σ kᵢ mᵢ` with nondecreasing `(kᵢ, mᵢ)` pairs.
fn multiplicity_patterns(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(rest: usize, min: (usize, usize), cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in 1..=rest {
            for m in 1..=rest / k {
                if (k, m) < min {
                    continue;
                }
                cur.push((k, m));
                go(rest - k * m, (k, m), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, (0, 0), &mut Vec::new(), &mut out);
    out
}

/// Generators of `U (⊕ M_{kᵢ} ⊗ I_{mᵢ}) U†`: matrix units of each block,
/// repeated along the multiplicity and conjugated by `u`.
fn block_generators(pattern: &[(usize, usize)], u: &CMat) -> Vec<CMat> {
    let n = u.nrows();
    let mut gens = Vec::new();
    let mut offset = 0;
    for &(k, m) in pattern {
        for i in 0..k {
            for j in 0..k {
                let mut e = linalg::zeros(n);
                for copy in 0..m {
                    let base = offset + copy * k;
                    e[(base + i, base + j)] = c(1.0);
                }
                gens.push(u * e * u.adjoint());
            }
        }
        offset += k * m;
    }
    gens
}

fn hermitian_basis_of(amb: AmbientSpace, gens: &[CMat]) -> MatrixSubspace {
    let herm: Vec<CMat> = gens
        .iter()
        .flat_map(|g| {
            let s = linalg::hermitian_part(g);
            let a = (g - g.adjoint()).map(|z| z * C64::new(0.0, -0.5));
            [s, a]
        })
        .collect();
    MatrixSubspace::span_unchecked(amb, &herm, true)
}

/// The C*-algebra described by `spec`.
pub fn gen_cstar(spec: &GenSpec) -> Result<CStarAlgebra> {
    spec.validate()?;
    let n = spec.n;
    let amb = AmbientSpace::new(n)?;
    match &spec.profile {
        Profile::FullMatrix => CStarAlgebra::full(n),
        Profile::BlockDiagonal(sizes) => {
            let pattern: Vec<(usize, usize)> = sizes.iter().map(|&k| (k, 1)).collect();
            let gens = block_generators(&pattern, &linalg::identity(n));
            CStarAlgebra::new(MatrixSubspace::span_unchecked(amb, &gens, false).complexify())
        }
        Profile::Commutative(points) => {
            let gens = commutative_generators(n, *points);
            CStarAlgebra::new(MatrixSubspace::span_unchecked(amb, &gens, false).complexify())
        }
        Profile::RandomUnitalSubalgebra(target) => {
            let mut rng = spec.rng(STREAM_ALGEBRA);
            let patterns = multiplicity_patterns(n);
            let dim = |p: &Vec<(usize, usize)>| p.iter().map(|(k, _)| k * k).sum::<usize>();
            let best = patterns
                .iter()
                .map(dim)
                .filter(|&d| d <= *target)
                .max()
                .unwrap_or(1);
            let choices: Vec<&Vec<(usize, usize)>> = patterns.iter().filter(|p| dim(p) == best).collect();
            let pattern = choices[rng.random_range(0..choices.len())];
            let u = random_unitary(n, &mut rng);
            let blocks = block_generators(pattern, &u);
            // Two random Hermitian members generate the algebra almost surely.
            let space = hermitian_basis_of(amb, &blocks);
            let g1 = random_element(&space, &mut rng);
            let g2 = random_element(&space, &mut rng);
            let alg = CStarAlgebra::generated_by(amb, &[g1, g2], true)?;
            if alg.complex_dim() != best {
                return Err(Error::TheoremViolation {
                    theorem: "random generators produce the block algebra",
                    detail: format!("expected dimension {best}, got {}", alg.complex_dim()),
                });
            }
            Ok(alg)
        }
    }
}

/// Indicator matrices of `points` consecutive groups covering `0..n`.
fn commutative_generators(n: usize, points: usize) -> Vec<CMat> {
    let base = n / points;
    let extra = n % points;
    let mut out = Vec::with_capacity(points);
    let mut start = 0;
    for p in 0..points {
        let len = base + usize::from(p < extra);
        let mut d = vec![0.0; n];
        d[start..start + len].iter_mut().for_each(|x| *x = 1.0);
        out.push(linalg::real_diag(&d));
        start += len;
    }
    out
}

/// Hermitian part of [`gen_cstar`] with the given parameters.
pub fn gen_algebra_with(spec: &GenSpec, params: LjbParams) -> Result<LjbAlgebra> {
    let alg = gen_cstar(spec)?;
    LjbAlgebra::new(alg.self_adjoint_part(), params)
}

pub fn gen_algebra(spec: &GenSpec) -> Result<LjbAlgebra> {
    gen_algebra_with(spec, LjbParams::default())
}

/// `count` random Hermitian members of `f`; with `round`, each is replaced by
/// the spectral projection onto its positive eigenvalues.
pub fn gen_constraints(spec: &GenSpec, f: &CStarAlgebra, count: usize, round: bool) -> Vec<CMat> {
    let mut rng = spec.rng(STREAM_CONSTRAINTS);
    let herm = f.self_adjoint_part();
    (0..count)
        .map(|_| {
            let h = random_element(&herm, &mut rng);
            if round {
                round_to_projection(&h)
            } else {
                h
            }
        })
        .collect()
}

fn round_to_projection(h: &CMat) -> CMat {
    linalg::spectral_projector(h, |x| x > 0.0)
}

/// A constrained system whose constraints share a proper common kernel: a
/// random projection `q` of `f` is drawn and each constraint is compressed by
/// `1 − q`.
pub fn gen_constrained_system(spec: &GenSpec, count: usize, round: bool) -> Result<ConstrainedSystem> {
    let f = gen_cstar(spec)?;
    let q = random_proper_projection(spec, &f);
    let keep = linalg::identity(spec.n) - &q;
    let raw = gen_constraints(spec, &f, count, false);
    let constraints = raw
        .iter()
        .map(|h| {
            let compressed = linalg::hermitian_part(&(&keep * h * &keep));
            if round {
                linalg::spectral_projector(&compressed, |x| x > tolerance::RANK)
            } else {
                compressed
            }
        })
        .collect();
    ConstrainedSystem::new(f, constraints)
}

/// Spectral projection of a random Hermitian member onto the eigenvalues
/// below a randomly chosen gap. Zero when the algebra is `ℂ·𝟙`.
fn random_proper_projection(spec: &GenSpec, f: &CStarAlgebra) -> CMat {
    let mut rng = spec.rng(STREAM_SUPPORT);
    let h = random_element(&f.self_adjoint_part(), &mut rng);
    let (vals, _) = linalg::eigh(&h);
    let spread = (vals[vals.len() - 1] - vals[0]).abs().max(1.0);
    let gaps: Vec<f64> = vals
        .windows(2)
        .filter(|w| w[1] - w[0] > tolerance::CLUSTER * spread)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    if gaps.is_empty() {
        return linalg::zeros(spec.n);
    }
    let t = gaps[rng.random_range(0..gaps.len())];
    linalg::spectral_projector(&h, |x| x < t)
}

/// Random state on `algebra`: the normalized compression of `X†X`.
pub fn gen_state(spec: &GenSpec, algebra: &LjbAlgebra) -> Result<StateFunctional> {
    gen_states(spec, algebra, 1).map(|mut v| v.remove(0))
}

/// `count` independent random states from one stream.
pub fn gen_states(spec: &GenSpec, algebra: &LjbAlgebra, count: usize) -> Result<Vec<StateFunctional>> {
    let mut rng = spec.rng(STREAM_STATE);
    (0..count).map(|_| states::random_state(algebra, &mut rng)).collect()
}

/// Minimal central projections, from the spectral decomposition of a random
/// central self-adjoint element.
pub fn minimal_central_projections(spec: &GenSpec, f: &CStarAlgebra) -> Vec<CMat> {
    let basis = f.complex_basis();
    let amb = f.carrier().ambient();
    let center = f.self_adjoint_part().kernel_of(|a| {
        basis
            .iter()
            .flat_map(|b| amb.coords(&(a * b - b * a)).iter().copied().collect::<Vec<_>>())
            .collect()
    });
    let mut rng = spec.rng(STREAM_CENTER);
    let z = random_element(&center, &mut rng);
    let (vals, vecs) = linalg::eigh(&z);
    let spread = (vals[vals.len() - 1] - vals[0]).abs().max(1.0);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > tolerance::CLUSTER * spread {
            let cols = vecs.columns(start, i - start);
            let p = cols * cols.adjoint();
            out.push(linalg::hermitian_part(&p));
            start = i;
        }
    }
    out
}

/// A Jordan ideal `z·L` for `z` a sum of a random nonempty proper subset of the
/// minimal central projections. For a factor the ideal is `{0}` or `L`.
pub fn gen_jordan_ideal(spec: &GenSpec, l: &LjbAlgebra) -> Result<MatrixSubspace> {
    let f = crate::ljb_core::complexify(l)?;
    let mins = minimal_central_projections(spec, &f);
    let mut rng = spec.rng(STREAM_IDEAL);
    let amb = l.carrier().ambient();
    let chosen: Vec<&CMat> = if mins.len() == 1 {
        if rng.random_bool(0.5) {
            return Ok(MatrixSubspace::zero(amb));
        }
        vec![&mins[0]]
    } else {
        let mut mask: Vec<bool> = (0..mins.len()).map(|_| rng.random_bool(0.5)).collect();
        if mask.iter().all(|&b| b) {
            let k = rng.random_range(0..mask.len());
            mask[k] = false;
        }
        if mask.iter().all(|&b| !b) {
            let k = rng.random_range(0..mask.len());
            mask[k] = true;
        }
        mins.iter().zip(mask).filter(|(_, m)| *m).map(|(p, _)| p).collect()
    };
    let z = chosen.into_iter().fold(linalg::zeros(amb.n), |acc, p| acc + p);
    let gens: Vec<CMat> = l.basis().iter().map(|b| linalg::hermitian_part(&(&z * b))).collect();
    MatrixSubspace::span(amb, &gens, true)
}
