mod common;

use ljb::cli::certify::algebra_spec;
use ljb::genrand::{self, GenSpec, Profile};
use ljb::linalg::{hs_norm, op_norm, CMat, C64, I};
use ljb::ljb_core::{
    associative_product, complexify, jordan_product, lie_bracket, verify_jordan_automorphism, verify_ljb_axioms,
    LjbAlgebra, LjbParams,
};
use ljb::states::is_state;
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};

use common::{random_in, rng};

fn params_on_curve(lambda: f64, negative: bool) -> LjbParams {
    let l = if negative { -lambda } else { lambda };
    LjbParams::new(l, 0.25 / (l * l)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn associator_identity(seed in any::<u64>(), n in 1usize..=5, lambda in 0.1f64..2.0, neg in any::<bool>()) {
        let p = params_on_curve(lambda, neg);
        let l = LjbAlgebra::full(n, p).unwrap();
        let mut r = rng(seed);
        let a = random_in(l.carrier(), &mut r);
        let b = random_in(l.carrier(), &mut r);
        let c = random_in(l.carrier(), &mut r);
        let lhs = l.jordan(&l.jordan(&a, &b), &c) - l.jordan(&a, &l.jordan(&b, &c));
        let rhs = l.bracket(&b, &l.bracket(&c, &a)) * C64::new(p.kappa(), 0.0);
        let bound = 1e-9 * (1.0 + op_norm(&a) * op_norm(&b) * op_norm(&c));
        prop_assert!(op_norm(&(lhs - rhs)) <= bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn products_are_symmetric_and_antisymmetric(seed in any::<u64>(), n in 1usize..=5, lambda in 0.1f64..2.0) {
        let p = params_on_curve(lambda, false);
        let l = LjbAlgebra::full(n, p).unwrap();
        let mut r = rng(seed);
        let a = random_in(l.carrier(), &mut r);
        let b = random_in(l.carrier(), &mut r);
        prop_assert_eq!(jordan_product(&a, &b).unwrap(), jordan_product(&b, &a).unwrap());
        prop_assert_eq!(lie_bracket(&a, &b, &p).unwrap(), -lie_bracket(&b, &a, &p).unwrap());
    }

    #[test]
    fn products_recovered_from_associative_product(seed in any::<u64>(), n in 1usize..=4, lambda in 0.1f64..2.0, neg in any::<bool>()) {
        let p = params_on_curve(lambda, neg);
        let l = LjbAlgebra::full(n, p).unwrap();
        let mut r = rng(seed);
        let a = random_in(l.carrier(), &mut r);
        let b = random_in(l.carrier(), &mut r);
        let ab = associative_product(&a, &b, &p).unwrap();
        let ba = associative_product(&b, &a, &p).unwrap();
        let jordan = (&ab + &ba) * C64::new(0.5, 0.0);
        let bracket = (&ab - &ba) * (I / (2.0 * p.kappa().sqrt()));
        let scale = 1.0 + hs_norm(&a) * hs_norm(&b);
        prop_assert!(hs_norm(&(jordan - l.jordan(&a, &b))) <= 1e-12 * scale);
        prop_assert!(hs_norm(&(bracket - l.bracket(&a, &b))) <= 1e-12 * scale);
    }

    #[test]
    fn complexify_round_trips(seed in any::<u64>(), i in 0usize..4) {
        let spec = algebra_spec(seed, i, 4).unwrap();
        let l = genrand::gen_algebra(&spec).unwrap();
        let f = complexify(&l).unwrap();
        let back = f.self_adjoint_part();
        prop_assert!(back.contains(l.carrier()) && l.carrier().contains(&back));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flows_are_jordan_automorphisms(seed in any::<u64>(), i in 0usize..4) {
        let spec = algebra_spec(seed, i, 4).unwrap();
        let l = genrand::gen_algebra(&spec).unwrap();
        let mut r = rng(seed);
        for _ in 0..50 {
            let a = random_in(l.carrier(), &mut r);
            let t: f64 = StandardNormal.sample(&mut r);
            let rep = verify_jordan_automorphism(&l, &a, &[t]).unwrap();
            prop_assert!(rep.passed, "{:?}", rep);
        }
    }

    #[test]
    fn generated_objects_are_valid(seed in any::<u64>(), i in 0usize..4) {
        let spec = algebra_spec(seed, i, 5).unwrap();
        let l = genrand::gen_algebra(&spec).unwrap();
        prop_assert!(verify_ljb_axioms(&l, 10, seed).passed);
        for omega in genrand::gen_states(&spec, &l, 5).unwrap() {
            prop_assert!(is_state(&omega).is_state);
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), i in 0usize..4) {
        let spec = algebra_spec(seed, i, 5).unwrap();
        let a = genrand::gen_algebra(&spec).unwrap();
        let b = genrand::gen_algebra(&spec.clone()).unwrap();
        prop_assert_eq!(a.basis(), b.basis());
        let sa = genrand::gen_state(&spec, &a).unwrap();
        let sb = genrand::gen_state(&spec, &b).unwrap();
        prop_assert_eq!(sa.rho(), sb.rho());
    }
}

#[test]
fn random_unital_subalgebra_hits_target_block_dimension() {
    // Unital block patterns in M3 have dimensions 1, 2, 3, 5 and 9; C + M2 is
    // the largest one not above 7.
    let spec = GenSpec::new(5, 3, Profile::RandomUnitalSubalgebra(7)).unwrap();
    let f = genrand::gen_cstar(&spec).unwrap();
    assert_eq!(f.complex_dim(), 5);
    let id: CMat = ljb::linalg::identity(3);
    assert!(f.contains(&id));
}
