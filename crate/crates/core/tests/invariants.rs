use mogdm::checks;

fn assert_clean(c: &checks::CheckOutcome) {
    assert!(
        c.passed(),
        "{}: {} of {} violated, first: {:?}",
        c.name,
        c.violations,
        c.samples,
        c.example
    );
}

#[test]
fn v_identities_on_ten_thousand_points() {
    let c = checks::v_conditions(10_000, 7);
    assert!(c.samples >= 10_000);
    assert!(c.worst < 1e-12);
    assert_clean(&c);
}

#[test]
fn kernel_properties_on_ten_thousand_points() {
    let c = checks::kernel_properties(10_000, 7);
    assert!(c.samples >= 10_000);
    assert_clean(&c);
}

#[test]
fn mu_c_prime_shrinks() {
    assert_clean(&checks::mu_c_prime_vanishes());
}

#[test]
fn gdf_gradients_match_central_differences() {
    let c = checks::gdf_gradients(400, 7).unwrap();
    assert!(c.samples >= 200);
    assert_clean(&c);
}

#[test]
fn registered_jacobians_match_central_differences() {
    for c in checks::problem_jacobians(200, 7) {
        assert_clean(&c);
    }
}

#[test]
fn descent_invariants_on_the_convex_pair() {
    for seed in [1, 2] {
        let t = checks::descent_invariants(500, seed).unwrap();
        for c in [
            &t.basin_exclusion,
            &t.radial_descent,
            &t.no_stationary_point,
        ] {
            assert_eq!(c.samples, 500);
            assert_clean(c);
        }
    }
}
