use dak_core::gen;
use dak_core::maps::{enumerate_distribution, prefix_masses, sample_order, stochastically_dominates, verify_order_preserving, MapKind};
use dak_core::pdm::{pdm_expected_stats, PathInstance};
use dak_core::rational::Rational;
use dak_core::verify::suites::random_instances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn maps_preserve_critical_order() {
    let insts = random_instances(100, 7, 99, 11).unwrap();
    for (k, inst) in insts.iter().enumerate() {
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        for kind in [MapKind::BreadthFirst, MapKind::GeneralizedBreadthFirst, MapKind::weighted()] {
            let dist = enumerate_distribution(&kind, &inst.network, &prof).unwrap();
            let total: Rational = dist.support().iter().map(|(_, p)| p).sum();
            assert_eq!(total, Rational::one(), "instance {k}");
            let c = verify_order_preserving(&dist, &inst.network, &prof);
            assert!(c.preserving, "instance {k} {kind:?}: {:?}", c.violations);
        }
    }
}

#[test]
fn full_invitation_dominates_withholding() {
    let insts = random_instances(40, 5, 5, 12).unwrap();
    for inst in &insts {
        let net = &inst.network;
        let prof = inst.values.truthful_profile(net).unwrap();
        let universe: Vec<usize> = net.nodes().collect();
        for kind in [MapKind::BreadthFirst, MapKind::GeneralizedBreadthFirst] {
            let full = enumerate_distribution(&kind, net, &prof).unwrap();
            for i in net.nodes() {
                let r = net.out_neighbors(i).to_vec();
                for mask in 0u32..(1 << r.len()) {
                    let kept: Vec<usize> = r.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &v)| v).collect();
                    let report = dak_core::graph::Report {
                        bid: Rational::zero(),
                        invited: kept,
                    };
                    let dev = prof.with_report(net, i, Some(report)).unwrap();
                    let d = enumerate_distribution(&kind, net, &dev).unwrap();
                    assert!(stochastically_dominates(&full, &d, i, &universe).unwrap());
                }
            }
        }
    }
}

/// Multinomial frequencies of sampled orderings against the enumeration, 4σ.
#[test]
fn sampled_orderings_match_enumeration() {
    let insts = random_instances(12, 6, 3, 13).unwrap();
    let draws = 100_000u32;
    for (k, inst) in insts.iter().enumerate() {
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        for kind in [MapKind::BreadthFirst, MapKind::GeneralizedBreadthFirst] {
            let dist = enumerate_distribution(&kind, &inst.network, &prof).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let mut counts = std::collections::BTreeMap::new();
            for _ in 0..draws {
                *counts.entry(sample_order(&kind, &inst.network, &prof, &mut rng).unwrap()).or_insert(0u32) += 1;
            }
            for order in counts.keys() {
                assert!(dist.probability(order).is_positive(), "sampled an impossible ordering");
            }
            for (order, p) in dist.support() {
                let p = p.to_f64();
                let f = *counts.get(order).unwrap_or(&0) as f64 / draws as f64;
                let sd = (p * (1.0 - p) / draws as f64).sqrt();
                assert!((f - p).abs() <= 4.0 * sd + 1e-12, "instance {k} {kind:?} {order:?}: {f} vs {p}");
            }
        }
    }
}

#[test]
fn prefix_masses_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = gen::gnp_connected(5, 0.4, 10, &mut rng).unwrap();
    let prof = inst.values.truthful_profile(&inst.network).unwrap();
    let dist = enumerate_distribution(&MapKind::GeneralizedBreadthFirst, &inst.network, &prof).unwrap();
    for i in inst.network.nodes() {
        let total: Rational = prefix_masses(&dist, i).values().sum();
        assert_eq!(total, Rational::one());
    }
}

fn values_strategy() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i128..=20).prop_map(|k| Rational::new(k, 20)), 1..7)
}

proptest! {
    /// Head: v_1 + (v* - v_1)^2 / 2. Later buyer: (v_i - prior max)^2 / 2 when she beats it.
    #[test]
    fn pdm_closed_forms(values in values_strategy()) {
        let inst = PathInstance::truthful(values.clone()).unwrap();
        let st = pdm_expected_stats(&inst).unwrap();
        let top = values.iter().max().unwrap().clone();
        let half = Rational::new(1, 2);
        prop_assert_eq!(&st.utilities[0], &(&values[0] + (&top - &values[0]).square() * &half));
        let mut prior = values[0].clone();
        for i in 1..values.len() {
            let expect = if values[i] > prior { (&values[i] - &prior).square() * &half } else { Rational::zero() };
            prop_assert_eq!(&st.utilities[i], &expect);
            if values[i] > prior {
                prior = values[i].clone();
            }
        }
        prop_assert!(st.welfare >= top.square() * &half);
        prop_assert!(st.revenue.is_zero());
        let total: Rational = st.win_probabilities.iter().sum();
        prop_assert_eq!(total, Rational::one());
    }
}
