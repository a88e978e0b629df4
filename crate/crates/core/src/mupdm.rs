//! Multi-unit mechanisms. The first `k` buyers of a breadth-first ordering
//! head `k` paths, later buyers are appended to paths, and PDM runs on each
//! path independently.
//!
//! MUPDM appends every later buyer to a uniformly random path. SP-MUPDM keeps
//! a buyer on her immediate dominator's path in the layered graph and only
//! randomizes buyers the seller dominates directly.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{
    critical_descendants, dominator_tree, layered_subgraph, participant_mask, Dominator, DominatorTree, Layered, NodeId,
    ReportProfile, SocialNetwork, TrueProfile,
};
use crate::lottery::{realize, Branch, LotteryPath, MultiOutcome, PathAssignment, PathLottery, PaymentRule, RealizedOutcome};
use crate::maps::{enumerate_distribution_capped, exact_cap, sample_order, MapKind};
use crate::rational::Rational;

/// Upper bound on enumerated (ordering, path choice) branches.
pub const BRANCH_CAP: u128 = 2_000_000;

/// `min(m, participating seller neighbors)`.
pub fn head_count(net: &SocialNetwork, profile: &ReportProfile, m: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::NoItems);
    }
    let mask = participant_mask(net, profile);
    let rs = net.seller_neighbors().iter().filter(|&&v| mask[v]).count();
    Ok(m.min(rs))
}

/// How a later buyer picks her path.
enum Rule<'a> {
    Uniform,
    Dominator(&'a DominatorTree),
}

impl Rule<'_> {
    /// `Some(path index)` when forced, `None` when uniform.
    fn forced(&self, v: NodeId, owner: &[Option<usize>]) -> Option<usize> {
        match self {
            Rule::Uniform => None,
            Rule::Dominator(dom) => match dom.idom(v) {
                Some(Dominator::Node(d)) => owner[d],
                _ => None,
            },
        }
    }
}

/// Head surcharge bases, once the paths are known.
enum Base<'a> {
    /// `P_i` minus the head's critical descendants in the reported graph.
    Critical(&'a [Vec<NodeId>]),
    /// `P_i` minus nodes the head reaches in the layered graph.
    Reach(&'a Layered),
}

impl Base<'_> {
    fn build(&self, paths: Vec<Vec<NodeId>>) -> Vec<LotteryPath> {
        paths
            .into_iter()
            .map(|order| {
                let head = order[0];
                let surcharge_base = match self {
                    Base::Critical(crit) => order.iter().copied().filter(|v| !crit[head].contains(v)).collect(),
                    Base::Reach(layered) => {
                        let r = layered.reachable_from(head);
                        order.iter().copied().filter(|&v| !r[v]).collect()
                    }
                };
                LotteryPath { order, surcharge_base }
            })
            .collect()
    }
}

fn critical_table(net: &SocialNetwork, profile: &ReportProfile) -> Result<Vec<Vec<NodeId>>> {
    let mask = participant_mask(net, profile);
    net.nodes()
        .map(|v| {
            if mask[v] {
                Ok(critical_descendants(net, profile, v)?)
            } else {
                Ok(Vec::new())
            }
        })
        .collect()
}

/// Splits an ordering into paths given a choice for each uniformly placed buyer.
fn split(order: &[NodeId], k: usize, rule: &Rule, n: usize, choices: &mut impl FnMut() -> usize) -> Vec<Vec<NodeId>> {
    let k = k.min(order.len());
    let mut paths: Vec<Vec<NodeId>> = order[..k].iter().map(|&h| vec![h]).collect();
    let mut owner = vec![None; n];
    for (i, &h) in order[..k].iter().enumerate() {
        owner[h] = Some(i);
    }
    for &v in &order[k..] {
        let i = rule.forced(v, &owner).unwrap_or_else(&mut *choices);
        owner[v] = Some(i);
        paths[i].push(v);
    }
    paths
}

fn lottery(net: &SocialNetwork, profile: &ReportProfile, m: usize, rule: Rule, base: Base, cap: usize) -> Result<PathLottery> {
    let k = head_count(net, profile, m)?;
    if k == 0 {
        return Ok(PathLottery::new(net.len(), []));
    }
    let dist = enumerate_distribution_capped(&MapKind::BreadthFirst, net, profile, cap)?;
    let n = net.len();
    let mut branches = Vec::new();
    let mut total: u128 = 0;
    for (order, p) in dist.support() {
        let k = k.min(order.len());
        // buyers whose path is a free uniform choice
        let mut owner = vec![None; n];
        for (i, &h) in order[..k].iter().enumerate() {
            owner[h] = Some(i);
        }
        let mut free = 0u32;
        for &v in &order[k..] {
            match rule.forced(v, &owner) {
                Some(i) => owner[v] = Some(i),
                None => {
                    free += 1;
                    owner[v] = Some(0);
                }
            }
        }
        let combos = (k as u128).checked_pow(free).unwrap_or(u128::MAX);
        total = total.saturating_add(combos);
        if total > BRANCH_CAP {
            return Err(Error::CapExceeded {
                what: "ordering and path-choice branches",
                count: total,
                cap: BRANCH_CAP,
            });
        }
        let q = p / Rational::from(combos as usize);
        for idx in 0..combos {
            // decode idx in base k, first free buyer most significant
            let mut digits = Vec::with_capacity(free as usize);
            let mut x = idx;
            for _ in 0..free {
                digits.push((x % k as u128) as usize);
                x /= k as u128;
            }
            digits.reverse();
            let mut it = digits.into_iter();
            let paths = split(order, k, &rule, n, &mut || it.next().expect("one digit per free buyer"));
            branches.push(Branch {
                probability: q.clone(),
                paths: base.build(paths),
            });
        }
    }
    Ok(PathLottery::new(n, branches))
}

pub fn mupdm_lottery(net: &SocialNetwork, profile: &ReportProfile, m: usize) -> Result<PathLottery> {
    let crit = critical_table(net, profile)?;
    lottery(net, profile, m, Rule::Uniform, Base::Critical(&crit), exact_cap())
}

pub fn spmupdm_lottery(net: &SocialNetwork, profile: &ReportProfile, m: usize) -> Result<PathLottery> {
    let layered = layered_subgraph(net, profile);
    let dom = dominator_tree(&layered, net.seller_neighbors())?;
    lottery(net, profile, m, Rule::Dominator(&dom), Base::Reach(&layered), exact_cap())
}

pub fn mupdm_expected(net: &SocialNetwork, profile: &ReportProfile, truth: &TrueProfile, m: usize) -> Result<MultiOutcome> {
    Ok(mupdm_lottery(net, profile, m)?.evaluate(profile, truth))
}

pub fn spmupdm_expected(net: &SocialNetwork, profile: &ReportProfile, truth: &TrueProfile, m: usize) -> Result<MultiOutcome> {
    Ok(spmupdm_lottery(net, profile, m)?.evaluate(profile, truth))
}

/// One draw of the MUPDM paths: the ordering first, then one path choice
/// per later buyer in ordering position.
pub fn mupdm_assign<R: Rng + ?Sized>(net: &SocialNetwork, profile: &ReportProfile, m: usize, rng: &mut R) -> Result<PathAssignment> {
    let k = head_count(net, profile, m)?;
    if k == 0 {
        return Ok(PathAssignment::from_paths(&[], profile));
    }
    let order = sample_order(&MapKind::BreadthFirst, net, profile, rng)?;
    let crit = critical_table(net, profile)?;
    let k = k.min(order.len());
    let paths = split(&order, k, &Rule::Uniform, net.len(), &mut || rng.gen_range(0..k));
    Ok(PathAssignment::from_paths(&Base::Critical(&crit).build(paths), profile))
}

/// One draw of the SP-MUPDM map.
pub fn spmupdm_map<R: Rng + ?Sized>(net: &SocialNetwork, profile: &ReportProfile, m: usize, rng: &mut R) -> Result<PathAssignment> {
    let k = head_count(net, profile, m)?;
    if k == 0 {
        return Ok(PathAssignment::from_paths(&[], profile));
    }
    let layered = layered_subgraph(net, profile);
    let dom = dominator_tree(&layered, net.seller_neighbors())?;
    let order = sample_order(&MapKind::BreadthFirst, net, profile, rng)?;
    let k = k.min(order.len());
    let paths = split(&order, k, &Rule::Dominator(&dom), net.len(), &mut || rng.gen_range(0..k));
    Ok(PathAssignment::from_paths(&Base::Reach(&layered).build(paths), profile))
}

/// Runs PDM on every path of an assignment.
pub fn multi_run<R: Rng + ?Sized>(
    assignment: &PathAssignment,
    profile: &ReportProfile,
    truth: &TrueProfile,
    rng: &mut R,
) -> RealizedOutcome {
    realize(assignment, profile, truth, PaymentRule::Standard, rng)
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

    const A: NodeId = 0;
    const B: NodeId = 1;
    const C: NodeId = 2;

    /// Case values worked out by hand, independent of the engine: PDM on
    /// (a, c) is 0.4·0.3 + 0.6·0.9 = 0.66 and b alone adds 0; a alone adds
    /// 0.3 and (b, c) adds 0.9·0.9 = 0.81, with b charged 0.9²/2.
    #[test]
    fn two_items_cases_and_aggregate() {
        let inst = fixtures::two_items();
        let prof = truthful(&inst);
        let out = mupdm_expected(&inst.network, &prof, &inst.values, 2).unwrap();
        let mut cases: Vec<_> = out
            .breakdown
            .iter()
            .map(|b| {
                let mut paths = b.paths.clone();
                paths.sort();
                (paths, b.probability.clone(), b.welfare.clone(), b.revenue.clone())
            })
            .collect();
        cases.sort();
        assert_eq!(
            cases,
            vec![
                (vec![vec![A], vec![B, C]], q("0.5"), q("1.11"), q("0.405")),
                (vec![vec![A, C], vec![B]], q("0.5"), q("0.66"), q("0")),
            ]
        );
        let hand_w = (q("0.66") + q("1.11")) * Rational::half();
        let hand_r = q("0.405") * Rational::half();
        assert_eq!(out.welfare, hand_w);
        assert_eq!(out.revenue, hand_r);
        assert_eq!(out.welfare, q("0.885"));
        assert_eq!(out.revenue, q("0.2025"));
    }

    #[test]
    fn two_items_heads_are_fixed() {
        let inst = fixtures::two_items();
        let prof = truthful(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut with_a = 0;
        for _ in 0..2000 {
            let asg = mupdm_assign(&inst.network, &prof, 2, &mut rng).unwrap();
            let mut heads = asg.heads();
            heads.sort();
            assert_eq!(heads, vec![A, B]);
            if asg.paths.iter().any(|p| p == &vec![A, C]) {
                with_a += 1;
            }
        }
        assert!((900..1100).contains(&with_a), "{with_a}");
    }

    #[test]
    fn single_seller_neighbor_gives_one_path() {
        let inst = fixtures::path_example();
        let prof = truthful(&inst);
        assert_eq!(head_count(&inst.network, &prof, 3).unwrap(), 1);
        let lot = mupdm_lottery(&inst.network, &prof, 3).unwrap();
        assert_eq!(lot.branches().len(), 1);
        assert_eq!(lot.branches()[0].paths[0].order, vec![0, 1, 2, 3]);
        assert_eq!(head_count(&inst.network, &prof, 0), Err(Error::NoItems));
    }

    #[test]
    fn two_items_sybil_is_deterministic() {
        let inst = fixtures::two_items_sybil();
        let prof = truthful(&inst);
        let out = spmupdm_expected(&inst.network, &prof, &inst.values, 2).unwrap();
        assert_eq!(out.breakdown.len(), 1);
        let mut paths = out.breakdown[0].paths.clone();
        paths.sort();
        assert_eq!(paths, vec![vec![0, 2, 3], vec![1, 4]]);
        assert_eq!(out.breakdown[0].surcharges, vec![q("0"), q("0")]);
        assert_eq!(out.welfare, q("0.41"));
        assert!(out.revenue.is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut p = spmupdm_map(&inst.network, &prof, 2, &mut rng).unwrap().paths;
            p.sort();
            assert_eq!(p, vec![vec![0, 2, 3], vec![1, 4]]);
        }
    }

    #[test]
    fn diamond_dominated_by_seller_splits_evenly() {
        let net = SocialNetwork::new(3, [(0, 2), (1, 2)], [0, 1]).unwrap();
        let truth = TrueProfile::new(vec![q("0.2"), q("0.4"), q("0.6")]).unwrap();
        let prof = truth.truthful_profile(&net).unwrap();
        let lot = spmupdm_lottery(&net, &prof, 2).unwrap();
        let mut with_c: Vec<(NodeId, Rational)> = lot
            .branches()
            .iter()
            .map(|b| (b.paths.iter().find(|p| p.order.contains(&2)).unwrap().head(), b.probability.clone()))
            .collect();
        with_c.sort();
        assert_eq!(with_c, vec![(0, Rational::half()), (1, Rational::half())]);
    }

    #[test]
    fn triangle_spmupdm_keeps_c_with_a() {
        // Oracle by hand: dom(c) = a, so both orderings give paths (a, c), (b).
        // Base of head a is {a, c} minus a's reach = empty; base of b is {b} minus b = empty.
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let out = spmupdm_expected(&inst.network, &prof, &inst.values, 2).unwrap();
        assert_eq!(out.breakdown.len(), 1);
        assert_eq!(out.welfare, q("0.66"));
        assert!(out.revenue.is_zero());
    }

    #[test]
    fn few_participants_are_singleton_heads() {
        let inst = fixtures::triangle();
        let prof = truthful(&inst);
        let net = &inst.network;
        let cut = prof.with_report(net, A, Some(crate::graph::Report { bid: q("0.3"), invited: vec![] })).unwrap();
        for lot in [mupdm_lottery(net, &cut, 5).unwrap(), spmupdm_lottery(net, &cut, 5).unwrap()] {
            assert_eq!(lot.branches().len(), 1);
            let out = lot.evaluate(&cut, &inst.values);
            assert_eq!(out.win_probabilities, vec![q("1"), q("1"), q("0")]);
            assert!(out.revenue.is_zero());
        }
    }

    #[test]
    fn monte_carlo_matches_exact_on_two_items_sybil() {
        let inst = fixtures::two_items_sybil();
        let prof = truthful(&inst);
        let exact = spmupdm_expected(&inst.network, &prof, &inst.values, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let runs = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..runs {
            let asg = spmupdm_map(&inst.network, &prof, 2, &mut rng).unwrap();
            let r = multi_run(&asg, &prof, &inst.values, &mut rng);
            assert!(r.winners.len() <= 2);
            let w = r.welfare.to_f64();
            s += w;
            s2 += w * w;
        }
        let mean = s / runs as f64;
        let sd = ((s2 / runs as f64 - mean * mean) / runs as f64).sqrt();
        assert!((mean - exact.welfare.to_f64()).abs() <= 3.0 * sd);
    }
}
