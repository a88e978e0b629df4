//! Does a buyer's view of the ordering survive withholding and Sybils?

use crate::error::Result;
use crate::graph::{participant_mask, NodeId, Report, ReportProfile, SocialNetwork};
use crate::maps::{prefix_masses_direct, MapKind};
use crate::rational::Rational;

use super::sybil_wirings;

/// `q_A` for one prefix set changed between the truthful and the deviated network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapWitness {
    pub attacker: NodeId,
    /// The network with the attacker's Sybils appended.
    pub network: SocialNetwork,
    pub profile: ReportProfile,
    pub prefix: Vec<NodeId>,
    pub before: Rational,
    pub after: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MapCheck {
    pub variants: u64,
    pub witness: Option<MapWitness>,
}

/// For every participant, compares `q_A` under truthful reports with every
/// withholding of her invitations and every wiring of up to `max_sybils`
/// Sybils below her. Stops at the first violation.
pub fn map_sybil_invariance(kind: &MapKind, net: &SocialNetwork, max_sybils: usize) -> Result<MapCheck> {
    let zero = vec![Rational::zero(); net.len()];
    let truthful = ReportProfile::truthful(net, &zero)?;
    let mask = participant_mask(net, &truthful);
    let n = net.len();
    let mut check = MapCheck::default();
    for i in net.nodes().filter(|&v| mask[v]) {
        let base = prefix_masses_direct(kind, net, &truthful, i)?;
        let r = net.out_neighbors(i).to_vec();
        for s in 0..=max_sybils {
            let sybils: Vec<NodeId> = (n..n + s).collect();
            let (aug, wirings) = if s == 0 {
                let w: Vec<_> = (0u32..(1 << r.len()))
                    .map(|m| {
                        let inv = r.iter().enumerate().filter(|(k, _)| m & (1 << k) != 0).map(|(_, &v)| v).collect();
                        (inv, Vec::new())
                    })
                    .collect();
                (net.clone(), w)
            } else {
                let pool: Vec<NodeId> = r.iter().chain(&sybils).copied().collect();
                let mut edges = Vec::new();
                for &x in &sybils {
                    edges.push((i, x));
                    edges.extend(pool.iter().filter(|&&y| y != x).map(|&y| (x, y)));
                }
                let labels = (1..=s).map(|k| format!("{}'{}", net.label(i), k));
                (net.extended(labels, edges)?, sybil_wirings(&r, &sybils))
            };
            for (mine, theirs) in wirings {
                check.variants += 1;
                let mut reports: Vec<Option<Report>> = truthful.reports().to_vec();
                reports[i] = Some(Report {
                    bid: Rational::zero(),
                    invited: mine,
                });
                reports.extend(theirs.into_iter().map(|invited| {
                    Some(Report {
                        bid: Rational::zero(),
                        invited,
                    })
                }));
                let profile = ReportProfile::new(&aug, reports)?;
                let after = prefix_masses_direct(kind, &aug, &profile, i)?;
                if after != base {
                    let prefix = base
                        .keys()
                        .chain(after.keys())
                        .find(|a| base.get(*a) != after.get(*a))
                        .cloned()
                        .unwrap_or_default();
                    check.witness = Some(MapWitness {
                        attacker: i,
                        before: base.get(&prefix).cloned().unwrap_or_default(),
                        after: after.get(&prefix).cloned().unwrap_or_default(),
                        network: aug,
                        profile,
                        prefix,
                    });
                    return Ok(check);
                }
            }
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn bf_and_gbf_hold_on_triangle_and_two_items_sybil() {
        for inst in [fixtures::triangle(), fixtures::two_items_sybil()] {
            for kind in [MapKind::BreadthFirst, MapKind::GeneralizedBreadthFirst] {
                let c = map_sybil_invariance(&kind, &inst.network, 1).unwrap();
                assert!(c.witness.is_none(), "{kind:?}");
                assert!(c.variants > 0);
            }
        }
    }

    #[test]
    fn weighted_gbf_breaks() {
        let c = map_sybil_invariance(&MapKind::weighted(), &fixtures::triangle().network, 0).unwrap();
        let w = c.witness.expect("witness");
        assert_ne!(w.before, w.after);
    }
}
