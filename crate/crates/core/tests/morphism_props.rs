mod common;

use proptest::prelude::*;
use ramify::graph::Divisor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn riemann_hurwitz_holds(seed in any::<u64>()) {
        let m = common::random_proper(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        prop_assert!(m.rh_divisor_identity().verdict.is_ok());
        prop_assert!(m.rh_degree_identity().is_ok());
    }

    #[test]
    fn delta_divisor_has_degree_zero(seed in any::<u64>()) {
        let m = common::random_proper(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        prop_assert_eq!(m.delta_divisor().degree(), 0);
    }

    #[test]
    fn pullback_scales_degree(seed in any::<u64>(), coeffs in prop::collection::vec(-5i64..5, 4)) {
        let m = common::random_proper(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let d = Divisor::from_coeffs(coeffs[..m.target().vertex_count()].to_vec());
        prop_assert_eq!(m.phi().pullback(&d).degree(), m.degree() as i64 * d.degree());
    }

    #[test]
    fn contractions_preserve_invariants(seed in any::<u64>()) {
        let mut m = common::random_decorated(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let genus = m.source().genus().unwrap();
        let mut unbalanced: Vec<String> =
            m.unbalanced_vertices().into_iter().map(|v| m.source().vertex_name(v).to_string()).collect();
        unbalanced.sort();
        while let Some(mv) = m.available_moves().first().copied() {
            m = m.contract(mv).unwrap();
            prop_assert_eq!(m.source().genus().unwrap(), genus);
            let mut now: Vec<String> =
                m.unbalanced_vertices().into_iter().map(|v| m.source().vertex_name(v).to_string()).collect();
            now.sort();
            prop_assert_eq!(&now, &unbalanced);
            prop_assert!(m.rh_divisor_identity().verdict.is_ok());
            prop_assert!(m.rh_degree_identity().is_ok());
        }
        prop_assert!(m.is_stable());
    }
}

#[test]
fn decorated_samples_admit_contractions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let contractible = (0..500)
        .filter(|_| !common::random_decorated(&mut rng, 12).is_stable())
        .count();
    assert!(
        contractible > 250,
        "only {contractible} of 500 samples admit a contraction"
    );
}
