use num_traits::{One, Zero};

use torsion_core::autocorr::SPECTRUM_TOLERANCE;
use torsion_core::oracles::small_groups;
use torsion_core::rational::{self, Rational};
use torsion_core::{FiniteAbelianGroup, SubsetGamma};

fn subsets(g: &FiniteAbelianGroup) -> impl Iterator<Item = SubsetGamma> + '_ {
    let n = g.cardinality();
    (1u32..1 << n).map(move |mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        SubsetGamma::from_indices(g, &idx).unwrap()
    })
}

#[test]
fn vectors_are_normalized_symmetric_and_translation_invariant() {
    for g in small_groups() {
        for gamma in subsets(&g) {
            let v = gamma.autocorr_vector();
            assert!(v.entry(g.identity()).is_one());
            for k in g.elements() {
                assert_eq!(v.entry(k), v.entry(g.neg(k)));
                assert!(rational::in_unit_interval(v.entry(k)));
            }
            for m in g.elements() {
                assert_eq!(gamma.translate(m).autocorr_vector(), v);
            }
        }
    }
}

#[test]
fn spectrum_sums_to_cardinality() {
    for g in small_groups() {
        let n = g.cardinality();
        for gamma in subsets(&g) {
            let s = gamma.g_spectrum();
            match s.total().exact() {
                Some(t) => assert_eq!(*t, rational::int(n as i64)),
                None => assert!((s.total().to_f64() - n as f64).abs() <= SPECTRUM_TOLERANCE),
            }
            assert!(s.cross_check_error() <= SPECTRUM_TOLERANCE);
        }
    }
}

#[test]
fn counting_agrees_with_spectral_sum() {
    for g in small_groups() {
        let subgroups = g.enumerate_subgroups().unwrap();
        for gamma in subsets(&g) {
            let s = gamma.g_spectrum();
            for m in &subgroups {
                let counted = gamma.integral_over_perp(m).unwrap();
                let spectral = s.integral_over(&g.orthogonal_complement(m));
                match spectral.exact() {
                    Some(x) => assert_eq!(*x, counted),
                    None => assert!((spectral.to_f64() - rational::to_f64(&counted)).abs() <= SPECTRUM_TOLERANCE),
                }
            }
        }
    }
}

#[test]
fn zero_one_vectors_are_exactly_cosets() {
    for orders in [vec![2, 2, 2], vec![6]] {
        let g = FiniteAbelianGroup::new(orders).unwrap();
        for gamma in subsets(&g) {
            let canonical = gamma.canonicalize();
            assert_eq!(
                gamma.autocorr_vector().is_zero_one(),
                g.is_subgroup(canonical.elements()),
                "{:?}",
                gamma.indices()
            );
            assert_eq!(gamma.coset_of().is_some(), gamma.autocorr_vector().is_zero_one());
        }
    }
}

#[test]
fn folner_identity() {
    for g in small_groups() {
        for gamma in subsets(&g) {
            let v = gamma.autocorr_vector();
            for k in g.elements() {
                assert_eq!(gamma.folner_defect(k).unwrap() + v.entry(k), Rational::one());
            }
        }
        for m in g.enumerate_subgroups().unwrap() {
            let f = SubsetGamma::from_subgroup(&g, &m);
            for &k in m.elements() {
                assert!(f.folner_defect(k).unwrap().is_zero());
            }
        }
    }
}
