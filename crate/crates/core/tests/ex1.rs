mod common;

use ljb::constraints::{dirac_states, t_reduce, ConstrainedSystem};
use ljb::linalg::{self, hs_norm};
use ljb::ljb_core::{CStarAlgebra, LjbAlgebra, LjbParams};
use ljb::reduction::reduce_by_subalgebra;

use common::{ex1_oracle, Ex1Oracle};

#[test]
fn oracle_counts() {
    assert_eq!(
        ex1_oracle(),
        Ex1Oracle {
            d_dim: 1,
            o_dim: 2,
            quotient_dim: 1,
            dirac_states: 1,
            reduced_ljb_dim: 1,
        }
    );
}

#[test]
fn library_matches_oracle() {
    let oracle = ex1_oracle();
    let f = CStarAlgebra::full(2).unwrap();
    let sys = ConstrainedSystem::new(f.clone(), vec![linalg::unit(2, 0, 0)]).unwrap();
    let t = t_reduce(&sys).unwrap();
    assert_eq!(t.d.complex_dim(), oracle.d_dim);
    assert_eq!(t.observables.complex_dim(), oracle.o_dim);
    assert_eq!(t.quotient().complex_dim(), oracle.quotient_dim);

    let dirac = dirac_states(&sys, 20, 0).unwrap();
    assert_eq!(dirac.corner_dim, oracle.dirac_states);
    let rho = dirac.unique_state.expect("one Dirac state");
    assert!(hs_norm(&(rho - linalg::unit(2, 1, 1))) < 1e-12);

    let l = LjbAlgebra::new(f.self_adjoint_part(), LjbParams::default()).unwrap();
    let r = reduce_by_subalgebra(&l, &t.d.hermitian_part()).unwrap();
    assert_eq!(r.quotient.dim(), oracle.reduced_ljb_dim);
}

#[test]
fn fixture_file_describes_the_example() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/ex1.json")).unwrap();
    let spec = ljb::cli::ProblemSpec::parse(&text).unwrap();
    assert_eq!(spec.n, 2);
    assert_eq!(spec.constraints.len(), 1);
}
