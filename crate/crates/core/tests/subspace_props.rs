mod common;

use ljb::linalg::{hs_norm, CMat, C64};
use ljb::{AmbientSpace, MatrixSubspace};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use common::{rng, span_rank};

fn gaussian_matrix(n: usize, hermitian: bool, r: &mut ChaCha8Rng) -> CMat {
    let mut m = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(r);
        let im: f64 = StandardNormal.sample(r);
        C64::new(re, im)
    });
    if hermitian {
        m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    }
    m
}

/// A random subspace of dimension at most `k`, sometimes rank deficient: a
/// generator may repeat a combination of earlier ones.
fn random_subspace(n: usize, k: usize, hermitian: bool, r: &mut ChaCha8Rng) -> MatrixSubspace {
    let mut gens: Vec<CMat> = Vec::new();
    for i in 0..k {
        let g: f64 = StandardNormal.sample(r);
        if i >= 2 && g > 0.8 {
            let x = &gens[0] * C64::new(g, 0.0) + &gens[1];
            gens.push(x);
        } else {
            gens.push(gaussian_matrix(n, hermitian, r));
        }
    }
    MatrixSubspace::span(AmbientSpace::new(n).unwrap(), &gens, hermitian).unwrap()
}

fn gram_defect(s: &MatrixSubspace) -> f64 {
    let b = s.basis();
    let mut worst = 0.0_f64;
    for (i, x) in b.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let g = ljb::linalg::hs_inner(x, y);
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - want).abs());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn grassmann_identity(seed in any::<u64>(), n in 1usize..=4, ka in 0usize..8, kb in 0usize..8, herm in any::<bool>()) {
        let mut r = rng(seed);
        let a = random_subspace(n, ka, herm, &mut r);
        let b = random_subspace(n, kb, herm, &mut r);
        let meet = a.intersect(&b).unwrap();
        let join = a.sum(&b).unwrap();
        prop_assert_eq!(a.dim() + b.dim(), meet.dim() + join.dim());
        // The sum dimension agrees with plain elimination on the generators.
        let both: Vec<CMat> = a.basis().iter().chain(b.basis()).cloned().collect();
        prop_assert_eq!(join.dim(), span_rank(&both));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constructed_bases_are_orthonormal(seed in any::<u64>(), n in 1usize..=4, ka in 0usize..8, kb in 0usize..8) {
        let mut r = rng(seed);
        let a = random_subspace(n, ka, false, &mut r);
        let b = random_subspace(n, kb, false, &mut r);
        for s in [&a, &b, &a.intersect(&b).unwrap(), &a.sum(&b).unwrap(), &a.complexify(), &a.hermitian_part()] {
            prop_assert!(gram_defect(s) <= 1e-12, "defect {}", gram_defect(s));
        }
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), n in 1usize..=4, k in 0usize..10) {
        let mut r = rng(seed);
        let s = random_subspace(n, k, false, &mut r);
        let v = gaussian_matrix(n, false, &mut r);
        let p = s.project(&v);
        prop_assert!(hs_norm(&(s.project(&p) - &p)) <= 1e-12);
        prop_assert!(s.residual(&p) <= 1e-12);
    }

    #[test]
    fn coset_decomposition_reconstructs(seed in any::<u64>(), n in 1usize..=4, k in 1usize..10, kk in 0usize..4) {
        let mut r = rng(seed);
        let s = random_subspace(n, k, false, &mut r);
        // A subspace of `s` spanned by combinations of its basis.
        let gens: Vec<CMat> = (0..kk.min(s.dim()))
            .map(|_| common::random_in(&s, &mut r))
            .collect();
        let inner = MatrixSubspace::span(s.ambient(), &gens, false).unwrap();
        let v = common::random_in(&s, &mut r);
        let (rep, ker) = s.coset_decompose(&inner, &v).unwrap();
        prop_assert!(hs_norm(&(&v - (&rep + &ker))) <= 1e-10);
        prop_assert!(inner.residual(&ker) <= 1e-10);
        for b in inner.basis() {
            prop_assert!(ljb::linalg::hs_inner(&rep, b).abs() <= 1e-10);
        }
    }
}
