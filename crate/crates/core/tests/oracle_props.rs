use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torsion_core::oracles::{parseval_check, pi_ratio, qbinomial, random_psi, random_subset, small_groups};

proptest! {
    #[test]
    fn parseval_holds(seed in any::<u64>(), which in 0usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &small_groups()[which];
        let psi = random_psi(g, &mut rng).unwrap();
        let gamma = random_subset(g, &mut rng).unwrap();
        let r = parseval_check(&psi, &gamma).unwrap();
        prop_assert!(r.equal);
        prop_assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn qbinomial_is_symmetric(n in 0usize..12, k in 0usize..12, q in 2usize..6) {
        prop_assume!(k <= n);
        prop_assert_eq!(qbinomial(n, k, q).unwrap(), qbinomial(n, n - k, q).unwrap());
    }
}

#[test]
fn random_parseval_on_cube() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = torsion_core::FiniteAbelianGroup::power(2, 3).unwrap();
    for _ in 0..50 {
        let psi = random_psi(&g, &mut rng).unwrap();
        let gamma = random_subset(&g, &mut rng).unwrap();
        assert!(parseval_check(&psi, &gamma).unwrap().equal);
    }
}

#[test]
fn pi_ratio_decreases_to_inverse_pi() {
    let ratios: Vec<f64> = (1..=30).map(|n| pi_ratio(n).unwrap().ratio).collect();
    assert!(ratios.windows(2).all(|w| w[0] > w[1]));
    assert!(ratios.iter().all(|&r| r > 1.0 / PI));
    assert!((pi_ratio(100).unwrap().ratio - 1.0 / PI).abs() <= 1e-4);
}
