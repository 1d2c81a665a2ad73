use qudit_epp::algebra::Dimension;
use qudit_epp::oracle::{map_equivalence, run_suite, OracleVariant};

#[test]
fn coefficient_maps_match_density_matrix_simulation() {
    for d in [2, 3] {
        for variant in OracleVariant::ALL {
            let e = map_equivalence(Dimension::new(d).unwrap(), variant, 20, 7).unwrap();
            assert!(e.state < 1e-10 && e.probability < 1e-10, "d={d} {}: {e:?}", variant.name());
        }
    }
}

#[test]
fn two_pair_maps_hold_at_d5() {
    for variant in [OracleVariant::P1, OracleVariant::P2] {
        let e = map_equivalence(Dimension::new(5).unwrap(), variant, 3, 11).unwrap();
        assert!(e.state < 1e-10 && e.probability < 1e-10, "{e:?}");
    }
}

#[test]
fn suite_passes_and_is_reproducible() {
    let a = run_suite(&[Dimension::new(2).unwrap()], 5, 42).unwrap();
    let b = run_suite(&[Dimension::new(2).unwrap()], 5, 42).unwrap();
    assert!(a.passed());
    assert_eq!(a.max_deviation(), b.max_deviation());
}
