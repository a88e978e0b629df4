//! Reference mechanisms that are expected to fail some property checks.
//! Neither is a faithful implementation of anything beyond the behavior the
//! tests need.

use crate::error::Result;
use crate::fpdm::{fpdm_lottery, SurchargeVariant};
use crate::graph::{
    critical_descendants, participant_mask, participation_closure, removed_without, NodeId, ReportProfile,
    SocialNetwork, TrueProfile,
};
use crate::lottery::ExpectedOutcome;
use crate::maps::MapKind;
use crate::pdm::allocation_and_prices;
use crate::rational::Rational;

/// Runs breadth-first f-PDM `m` times in a row. Each round's winner leaves
/// the auction (she reports nothing in later rounds), so she cannot win twice.
/// This is not incentive compatible.
pub fn repeated_fpdm_expected(
    net: &SocialNetwork,
    profile: &ReportProfile,
    truth: &TrueProfile,
    m: usize,
) -> Result<ExpectedOutcome> {
    let mut out = ExpectedOutcome::zeros(net.len());
    rounds(net, profile, m, &Rational::one(), &mut out)?;
    for v in net.nodes() {
        out.welfare += &out.win_probabilities[v] * truth.value(v);
        out.utilities[v] = &out.win_probabilities[v] * truth.value(v) - &out.expected_payments[v];
    }
    out.revenue = out.expected_payments.iter().sum();
    Ok(out)
}

fn rounds(net: &SocialNetwork, profile: &ReportProfile, left: usize, weight: &Rational, out: &mut ExpectedOutcome) -> Result<()> {
    if left == 0 || participation_closure(net, profile).is_empty() {
        return Ok(());
    }
    let lottery = fpdm_lottery(net, profile, &MapKind::BreadthFirst, SurchargeVariant::Standard)?;
    for branch in lottery.branches() {
        let p = weight * &branch.probability;
        let path = &branch.paths[0];
        let head = path.head();
        let surcharge = path.surcharge(profile);
        out.expected_payments[head] += &p * &surcharge;
        out.gross_in += &p * &surcharge;
        let bids: Vec<Rational> = path.order.iter().map(|&v| profile.bid(v)).collect();
        for (k, (pi, price)) in allocation_and_prices(&bids).into_iter().enumerate() {
            if !pi.is_positive() {
                continue;
            }
            let w = path.order[k];
            let pw = &p * &pi;
            out.win_probabilities[w] += &pw;
            if k > 0 {
                out.expected_payments[w] += &pw * &price;
                out.expected_payments[head] -= &pw * &price;
                out.gross_in += &pw * &price;
                out.gross_out += &pw * &price;
            }
            let next = profile.with_report(net, w, None)?;
            rounds(net, &next, left - 1, &pw, out)?;
        }
    }
    Ok(())
}

/// Deterministic stand-in for the information diffusion mechanism, limited to
/// what its critical-path rule does on small examples: the item goes to the
/// first critical ancestor of the top bidder who would be the top bidder once
/// the next ancestor is removed; that winner pays the best bid without her and
/// every earlier ancestor is rewarded with the price increase she caused.
/// Non-normative.
pub fn idm_stub_expected(net: &SocialNetwork, profile: &ReportProfile, truth: &TrueProfile) -> Result<ExpectedOutcome> {
    let n = net.len();
    let mut out = ExpectedOutcome::zeros(n);
    let mask = participant_mask(net, profile);
    // highest bid, smallest id on ties
    let Some(top) = net
        .nodes()
        .filter(|&v| mask[v])
        .max_by(|&a, &b| profile.bid(a).cmp(&profile.bid(b)).then(b.cmp(&a)))
    else {
        return Ok(out);
    };
    let best_without = |v: NodeId| -> Result<Rational> {
        Ok(removed_without(net, profile, v)?.iter().map(|&u| profile.bid(u)).max().unwrap_or_default())
    };
    // critical ancestors of the top bidder, nearest the seller first
    let mut chain: Vec<(usize, NodeId)> = Vec::new();
    for v in net.nodes().filter(|&v| mask[v]) {
        let desc = critical_descendants(net, profile, v)?;
        if desc.contains(&top) {
            chain.push((desc.len(), v));
        }
    }
    chain.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let chain: Vec<NodeId> = chain.into_iter().map(|(_, v)| v).collect();
    let mut winner = top;
    for w in chain.windows(2) {
        if profile.bid(w[0]) == best_without(w[1])? {
            winner = w[0];
            break;
        }
    }
    out.win_probabilities[winner] = Rational::one();
    let price = best_without(winner)?;
    out.expected_payments[winner] = price.clone();
    out.gross_in = price;
    for w in chain.windows(2) {
        if w[0] == winner {
            break;
        }
        let reward = best_without(w[1])? - best_without(w[0])?;
        out.gross_out += &reward;
        out.expected_payments[w[0]] = -reward;
    }
    out.welfare = truth.value(winner).clone();
    for v in 0..n {
        out.utilities[v] = &out.win_probabilities[v] * truth.value(v) - &out.expected_payments[v];
    }
    out.revenue = out.expected_payments.iter().sum();
    Ok(out)
}
