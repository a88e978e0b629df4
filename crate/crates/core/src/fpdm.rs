//! f-PDM: order the network with a map, run PDM on the ordering, and charge
//! the first buyer a surcharge.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::graph::{
    components_without_seller, participant_mask, participation_closure, removed_without, GraphError, NodeId, ReportProfile, SocialNetwork,
    TrueProfile,
};
use crate::lottery::{realize, Branch, ExpectedOutcome, LotteryPath, PathAssignment, PathLottery, PaymentRule, RealizedOutcome};
use crate::maps::{enumerate_distribution_capped, exact_cap, sample_order, MapKind};
use crate::rational::Rational;

/// Which buyers' bids set the head's surcharge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SurchargeVariant {
    /// Buyers that still participate without the head.
    #[default]
    Standard,
    /// Buyers outside the head's component once the seller is removed.
    CollusionProof,
}

pub fn surcharge_base(
    net: &SocialNetwork,
    profile: &ReportProfile,
    head: NodeId,
    variant: SurchargeVariant,
) -> std::result::Result<Vec<NodeId>, GraphError> {
    match variant {
        SurchargeVariant::Standard => removed_without(net, profile, head),
        SurchargeVariant::CollusionProof => components_without_seller(net, profile, head),
    }
}

/// Half the square of the best bid in the head's surcharge base.
pub fn head_surcharge(
    net: &SocialNetwork,
    profile: &ReportProfile,
    head: NodeId,
    variant: SurchargeVariant,
) -> std::result::Result<Rational, GraphError> {
    let base = surcharge_base(net, profile, head, variant)?;
    Ok(LotteryPath {
        order: vec![head],
        surcharge_base: base,
    }
    .surcharge(profile))
}

pub fn fpdm_lottery(
    net: &SocialNetwork,
    profile: &ReportProfile,
    kind: &MapKind,
    variant: SurchargeVariant,
) -> Result<PathLottery> {
    fpdm_lottery_capped(net, profile, kind, variant, exact_cap())
}

pub fn fpdm_lottery_capped(
    net: &SocialNetwork,
    profile: &ReportProfile,
    kind: &MapKind,
    variant: SurchargeVariant,
    cap: usize,
) -> Result<PathLottery> {
    if participation_closure(net, profile).is_empty() {
        return Ok(PathLottery::new(net.len(), []));
    }
    let dist = enumerate_distribution_capped(kind, net, profile, cap)?;
    let mut bases: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut branches = Vec::with_capacity(dist.len());
    for (order, p) in dist.support() {
        let head = order[0];
        if !bases.contains_key(&head) {
            bases.insert(head, surcharge_base(net, profile, head, variant)?);
        }
        branches.push(Branch {
            probability: p.clone(),
            paths: vec![LotteryPath {
                order: order.clone(),
                surcharge_base: bases[&head].clone(),
            }],
        });
    }
    Ok(PathLottery::new(net.len(), branches))
}

pub fn fpdm_expected(
    net: &SocialNetwork,
    profile: &ReportProfile,
    truth: &TrueProfile,
    kind: &MapKind,
    variant: SurchargeVariant,
) -> Result<ExpectedOutcome> {
    Ok(fpdm_lottery(net, profile, kind, variant)?.evaluate(profile, truth))
}

/// Draws the ordering for one run and fixes the head surcharge.
pub fn fpdm_assign<R: Rng + ?Sized>(
    net: &SocialNetwork,
    profile: &ReportProfile,
    kind: &MapKind,
    variant: SurchargeVariant,
    rng: &mut R,
) -> Result<PathAssignment> {
    if participation_closure(net, profile).is_empty() {
        return Ok(PathAssignment::from_paths(&[], profile));
    }
    let order = sample_order(kind, net, profile, rng)?;
    let base = surcharge_base(net, profile, order[0], variant)?;
    Ok(PathAssignment::from_paths(
        &[LotteryPath {
            order,
            surcharge_base: base,
        }],
        profile,
    ))
}

pub fn fpdm_sample<R: Rng + ?Sized>(
    net: &SocialNetwork,
    profile: &ReportProfile,
    truth: &TrueProfile,
    kind: &MapKind,
    variant: SurchargeVariant,
    rng: &mut R,
) -> Result<RealizedOutcome> {
    let asg = fpdm_assign(net, profile, kind, variant, rng)?;
    Ok(realize(&asg, profile, truth, PaymentRule::Standard, rng))
}

/// Probability that the head is not diffusion-critical for the top bidder.
/// On that event the surcharge is exactly half the squared top bid.
pub fn noncritical_head_probability(net: &SocialNetwork, profile: &ReportProfile, lottery: &PathLottery) -> Rational {
    let mask = participant_mask(net, profile);
    let top = (0..net.len())
        .filter(|&v| mask[v])
        .max_by(|&a, &b| profile.bid(a).cmp(&profile.bid(b)).then(b.cmp(&a)));
    let Some(top) = top else {
        return Rational::zero();
    };
    lottery
        .branches()
        .iter()
        .filter(|b| b.paths[0].surcharge_base.contains(&top))
        .map(|b| &b.probability)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::q;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn truthful(inst: &fixtures::Instance) -> ReportProfile {
        inst.values.truthful_profile(&inst.network).unwrap()
    }

    #[test]
    fn triangle_breadth_first() {
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let out = fpdm_expected(
            &inst.network,
            &prof,
            &inst.values,
            &MapKind::BreadthFirst,
            SurchargeVariant::Standard,
        )
        .unwrap();
        let cases: Vec<_> = out.breakdown.iter().map(|b| (b.paths[0].clone(), b.welfare.clone(), b.revenue.clone())).collect();
        assert_eq!(
            cases,
            vec![
                (vec![0, 1, 2], q("0.66"), q("0")),
                (vec![1, 0, 2], q("0.63"), q("0.405")),
            ]
        );
        assert_eq!(out.welfare, q("0.645"));
        assert_eq!(out.revenue, q("0.2025"));
    }

    #[test]
    fn triangle_generalized_cases() {
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let out = fpdm_expected(
            &inst.network,
            &prof,
            &inst.values,
            &MapKind::GeneralizedBreadthFirst,
            SurchargeVariant::Standard,
        )
        .unwrap();
        let w: Vec<_> = out.breakdown.iter().map(|b| (b.welfare.clone(), b.revenue.clone())).collect();
        assert_eq!(
            w,
            vec![(q("0.66"), q("0")), (q("0.66"), q("0")), (q("0.63"), q("0.405"))]
        );
    }

    #[test]
    fn triangle_surcharges() {
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let s = |h| head_surcharge(&inst.network, &prof, h, SurchargeVariant::Standard).unwrap();
        assert_eq!(s(1), q("0.405"));
        assert_eq!(s(0), q("0"));
        let path = fixtures::path_example();
        let prof = truthful(&path);
        assert_eq!(head_surcharge(&path.network, &prof, 0, SurchargeVariant::Standard).unwrap(), q("0"));
    }

    #[test]
    fn inefficiency_path() {
        let inst = fixtures::inefficiency();
        let prof = truthful(&inst);
        let out = fpdm_expected(&inst.network, &prof, &inst.values, &MapKind::BreadthFirst, SurchargeVariant::Standard)
            .unwrap();
        assert_eq!(out.win_probabilities, vec![q("0"), q("1")]);
        assert_eq!(out.expected_payments, vec![q("-0.5"), q("0.5")]);
        assert_eq!(out.utilities, vec![q("0.5"), q("0.5")]);
        assert_eq!(out.welfare, q("1"));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let r = fpdm_sample(&inst.network, &prof, &inst.values, &MapKind::BreadthFirst, SurchargeVariant::Standard, &mut rng)
                .unwrap();
            assert_eq!(r.winners, vec![1]);
            assert_eq!(r.payments, vec![q("-0.5"), q("0.5")]);
            assert!(r.revenue.is_zero());
        }
    }

    #[test]
    fn cartel_example_collusion_proof_head_pays_nothing() {
        let inst = fixtures::cartel_example();
        let prof = truthful(&inst);
        for head in [0, 1] {
            assert_eq!(
                head_surcharge(&inst.network, &prof, head, SurchargeVariant::CollusionProof).unwrap(),
                Rational::zero()
            );
        }
        let out = fpdm_expected(
            &inst.network,
            &prof,
            &inst.values,
            &MapKind::BreadthFirst,
            SurchargeVariant::CollusionProof,
        )
        .unwrap();
        assert!(out.revenue.is_zero());
    }

    #[test]
    fn singleton_pays_nothing() {
        let net = SocialNetwork::new(1, [], [0]).unwrap();
        let truth = TrueProfile::new(vec![q("0.4")]).unwrap();
        let prof = truth.truthful_profile(&net).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = fpdm_sample(&net, &prof, &truth, &MapKind::BreadthFirst, SurchargeVariant::Standard, &mut rng).unwrap();
        assert_eq!(r.winners, vec![0]);
        assert_eq!(r.payments, vec![q("0")]);
    }

    #[test]
    fn monte_carlo_welfare_tracks_exact() {
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let kind = MapKind::BreadthFirst;
        let exact = fpdm_expected(&inst.network, &prof, &inst.values, &kind, SurchargeVariant::Standard).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let runs = 200_000;
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..runs {
            let r = fpdm_sample(&inst.network, &prof, &inst.values, &kind, SurchargeVariant::Standard, &mut rng).unwrap();
            let w = r.welfare.to_f64();
            s += w;
            s2 += w * w;
            assert_eq!(r.payments.iter().sum::<Rational>(), r.revenue);
        }
        let mean = s / runs as f64;
        let sd = ((s2 / runs as f64 - mean * mean).max(0.0) / runs as f64).sqrt();
        assert!((mean - exact.welfare.to_f64()).abs() <= 3.0 * sd, "{mean} vs {}", exact.welfare);
    }

    #[test]
    fn noncritical_head_event() {
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let lot = fpdm_lottery(&inst.network, &prof, &MapKind::BreadthFirst, SurchargeVariant::Standard).unwrap();
        // top bidder c depends on a; only the b-first ordering has a surcharge on c's bid
        assert_eq!(noncritical_head_probability(&inst.network, &prof, &lot), Rational::half());
    }
}
