use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torsion_core::autocorr::enumerate_classes;
use torsion_core::hull::{classify_vertices, Classification, PointCloud};
use torsion_core::lp::lp_convex_membership;
use torsion_core::{FiniteAbelianGroup, SubsetGamma};

fn cloud(orders: &[usize]) -> PointCloud {
    PointCloud::from_classes(&enumerate_classes(&FiniteAbelianGroup::new(orders.to_vec()).unwrap()).unwrap())
}

fn extreme_labels(c: &PointCloud) -> BTreeSet<Vec<usize>> {
    let report = classify_vertices(c).unwrap();
    report.extreme_indices().into_iter().map(|i| c.labels()[i].clone()).collect()
}

#[test]
fn certificates_are_sound() {
    for orders in [vec![2, 2], vec![2, 2, 2], vec![4], vec![6], vec![2, 4], vec![8]] {
        let c = cloud(&orders);
        let report = classify_vertices(&c).unwrap();
        report.verify(&c).unwrap();
        for (i, cl) in report.classifications.iter().enumerate() {
            let target = &c.points()[i];
            match cl {
                Classification::NonExtreme(w) => {
                    assert!(w.weights.iter().all(|&(j, _)| j != i));
                    w.verify(target, c.points()).unwrap();
                }
                Classification::Extreme(f) => {
                    for (j, p) in c.points().iter().enumerate() {
                        if j != i {
                            assert!(f.eval(p) <= num_traits::Zero::zero());
                        }
                    }
                    assert!(f.eval(target) > num_traits::Zero::zero());
                }
            }
        }
    }
}

#[test]
fn subgroups_are_always_extreme() {
    for orders in [vec![2, 2, 2], vec![4], vec![2, 4], vec![8], vec![3, 3]] {
        let g = FiniteAbelianGroup::new(orders.clone()).unwrap();
        let c = cloud(&orders);
        let extreme = extreme_labels(&c);
        for m in g.enumerate_subgroups().unwrap() {
            assert!(extreme.contains(&SubsetGamma::from_subgroup(&g, &m).indices()));
        }
    }
}

#[test]
fn matches_plain_lp_on_shuffled_candidates() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for orders in [vec![2, 2], vec![2, 2, 2]] {
        let c = cloud(&orders);
        let mut brute = BTreeSet::new();
        for i in 0..c.len() {
            let mut others: Vec<Vec<_>> = (0..c.len()).filter(|&j| j != i).map(|j| c.points()[j].clone()).collect();
            others.shuffle(&mut rng);
            if !lp_convex_membership(&c.points()[i], &others).unwrap().is_inside() {
                brute.insert(c.labels()[i].clone());
            }
        }
        assert_eq!(extreme_labels(&c), brute);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn permutation_invariant(seed in any::<u64>()) {
        let c = cloud(&[2, 2, 2]);
        let expected = extreme_labels(&c);
        let mut order: Vec<usize> = (0..c.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = PointCloud::new(
            c.dimension(),
            order.iter().map(|&i| c.points()[i].clone()).collect(),
            order.iter().map(|&i| c.labels()[i].clone()).collect(),
        )
        .unwrap();
        prop_assert_eq!(extreme_labels(&shuffled), expected);
    }
}
