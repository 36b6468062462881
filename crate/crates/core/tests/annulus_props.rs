mod common;

use proptest::prelude::*;
use ramify::annulus::{check_restriction, different_profile, normalize};
use ramify::{Rational, SettingQ};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn settings() -> Vec<SettingQ> {
    vec![
        SettingQ::equichar_zero(),
        SettingQ::equichar_p(2).unwrap(),
        SettingQ::equichar_p(3).unwrap(),
        SettingQ::mixed(2, Rational::new(-1, 1)).unwrap(),
        SettingQ::mixed(3, Rational::new(-2, 3)).unwrap(),
    ]
}

proptest! {
    #[test]
    fn profile_matches_brute_force(seed in any::<u64>(), which in 0usize..5) {
        let s = &settings()[which];
        let h = common::random_series(&mut ChaCha8Rng::seed_from_u64(seed), s);
        let Ok(h) = normalize(&h) else { return Ok(()) };
        let f = different_profile(&h, s, Rational::new(-4, 1), Some(Rational::new(4, 1))).unwrap();
        for x in common::grid() {
            prop_assert_eq!(f.eval(&x).unwrap(), common::brute_log_delta(&h, s, &x));
        }
    }

    #[test]
    fn branch_triples_satisfy_restriction(seed in any::<u64>(), which in 0usize..5) {
        let s = &settings()[which];
        let h = common::random_series(&mut ChaCha8Rng::seed_from_u64(seed), s);
        let Ok(h) = normalize(&h) else { return Ok(()) };
        let f = different_profile(&h, s, Rational::new(-4, 1), Some(Rational::new(4, 1))).unwrap();
        let mut points = common::grid();
        points.extend(f.interior_breakpoints().iter().cloned());
        for x in points {
            for (m, slope, d) in common::branch_triples(&h, &f, &x) {
                let v = check_restriction(m, slope, &d, s);
                prop_assert!(v.is_ok(), "x = {}, m = {}, s = {}, δ = {}: {:?}", x, m, slope, d, v);
            }
        }
    }
}
