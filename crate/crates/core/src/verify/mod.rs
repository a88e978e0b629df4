//! Brute-force property checks. Every verdict is computed with exact
//! arithmetic, and every failure carries a witness that can be replayed.

pub mod bounds;
pub mod fast;
pub mod maps_check;
pub mod suites;

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{participant_mask, GraphError, NodeId, Report, ReportProfile, SocialNetwork, TrueProfile};
use crate::lottery::ExpectedOutcome;
use crate::maps::exact_cap;
use crate::mechanism::MechanismUnderTest;
use crate::rational::Rational;
use fast::{common_denominator, scaled, FastLottery};

pub use bounds::{efficiency_check, revenue_check, EfficiencyCheck, RevenueCheck, WelfareEstimate};
pub use maps_check::{map_sybil_invariance, MapWitness};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicAudit {
    pub feasible: bool,
    pub feasibility_issues: Vec<String>,
    /// Buyers present in the profile whose expected utility is negative.
    pub ir_failures: Vec<NodeId>,
    pub wbb: bool,
}

impl BasicAudit {
    pub fn ir(&self) -> bool {
        self.ir_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.feasible && self.ir() && self.wbb
    }
}

/// Feasibility, IR and WBB of one outcome. `items` bounds total allocation.
pub fn audit_basic(outcome: &ExpectedOutcome, profile: &ReportProfile, items: usize) -> BasicAudit {
    let mut issues = Vec::new();
    for (v, p) in outcome.win_probabilities.iter().enumerate() {
        if !p.in_unit_interval() {
            issues.push(format!("node {v} has win probability {p}"));
        }
        if profile.is_absent(v) && (!p.is_zero() || !outcome.expected_payments[v].is_zero()) {
            issues.push(format!("absent node {v} is allocated or charged"));
        }
    }
    let total = outcome.total_allocation();
    if total > Rational::from(items) {
        issues.push(format!("total allocation {total} exceeds {items}"));
    }
    let ir_failures = (0..outcome.utilities.len())
        .filter(|&v| !profile.is_absent(v) && outcome.utilities[v].is_negative())
        .collect();
    BasicAudit {
        feasible: issues.is_empty(),
        feasibility_issues: issues,
        ir_failures,
        wbb: !outcome.revenue.is_negative(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// A report profile on some network, and the group whose utility counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Play {
    pub network: SocialNetwork,
    pub truth: TrueProfile,
    pub profile: ReportProfile,
    pub group: Vec<NodeId>,
}

impl Play {
    pub fn utility(&self, mech: &dyn MechanismUnderTest) -> Result<Rational> {
        Ok(mech
            .evaluate(&self.network, &self.profile, &self.truth)?
            .group_utility(&self.group))
    }
}

/// A profitable deviation: the group does better under `deviated` than under `truthful`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub truthful: Play,
    pub deviated: Play,
    pub gain: Rational,
}

impl Witness {
    /// Recomputes the gain from scratch.
    pub fn replay(&self, mech: &dyn MechanismUnderTest) -> Result<Rational> {
        Ok(self.deviated.utility(mech)? - self.truthful.utility(mech)?)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Invitation structures (and Sybil wirings) examined.
    pub structures: u64,
    /// Full report profiles evaluated.
    pub profiles: u64,
    /// Structures the mechanism cannot run on (PDM off a path).
    pub skipped: u64,
}

impl SearchStats {
    fn add(&mut self, o: &SearchStats) {
        self.structures += o.structures;
        self.profiles += o.profiles;
        self.skipped += o.skipped;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    pub mechanism: String,
    pub property: &'static str,
    pub verdict: Verdict,
    /// Largest gain over all searched deviations; zero when truthful is best.
    pub best_gain: Rational,
    pub witness: Option<Witness>,
    pub stats: SearchStats,
}

impl DeviationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn from_parts(mech: &dyn MechanismUnderTest, property: &'static str, parts: Vec<(Option<Witness>, SearchStats)>) -> Self {
        let mut stats = SearchStats::default();
        let mut best: Option<Witness> = None;
        // first strict improvement wins, so ties go to the earliest candidate
        for (w, s) in parts {
            stats.add(&s);
            if let Some(w) = w {
                if best.as_ref().map_or(true, |b| w.gain > b.gain) {
                    best = Some(w);
                }
            }
        }
        DeviationReport {
            mechanism: mech.label(),
            property,
            verdict: if best.is_some() { Verdict::Fail } else { Verdict::Pass },
            best_gain: best.as_ref().map(|w| w.gain.clone()).unwrap_or_default(),
            witness: best,
            stats,
        }
    }
}

/// `{0, step, 2 step, ...} ∪ {1}` plus extra points, sorted and deduplicated.
pub fn bid_grid<'a>(step: &Rational, extra: impl IntoIterator<Item = &'a Rational>) -> Vec<Rational> {
    let mut set = BTreeSet::new();
    if step.is_positive() {
        let mut x = Rational::zero();
        while x <= Rational::one() {
            set.insert(x.clone());
            x += step;
        }
    }
    set.insert(Rational::one());
    for e in extra {
        if e.in_unit_interval() {
            set.insert(e.clone());
        }
    }
    set.into_iter().collect()
}

fn check_size(net: &SocialNetwork) -> Result<()> {
    let cap = exact_cap();
    if net.len() > cap {
        return Err(Error::CapExceeded {
            what: "buyers",
            count: net.len() as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// A fixed invitation structure whose movers' bids are swept.
struct Structure {
    net: SocialNetwork,
    truth: TrueProfile,
    /// Reports with placeholder bids for the movers.
    profile: ReportProfile,
    movers: Vec<NodeId>,
    group: Vec<NodeId>,
}

/// Best bid vector for the movers, `None` when the mechanism cannot run on
/// this structure. Candidates are scanned in lexicographic order and only a
/// strictly better utility replaces the incumbent.
fn best_bids(
    mech: &dyn MechanismUnderTest,
    s: &Structure,
    candidates: &[Vec<Rational>],
    stats: &mut SearchStats,
) -> Result<Option<(Rational, Vec<Rational>)>> {
    stats.structures += 1;
    let n = s.net.len();
    let mut group_mask = vec![false; n];
    for &g in &s.group {
        group_mask[g] = true;
    }
    let lottery = match mech.lottery(&s.net, &s.profile) {
        None => None,
        Some(Ok(l)) => Some(l),
        Some(Err(Error::Graph(GraphError::NotAPath))) => {
            stats.skipped += 1;
            return Ok(None);
        }
        Some(Err(e)) => return Err(e),
    };
    let base_bids = s.profile.bids();
    let fast = lottery.as_ref().and_then(FastLottery::compile);
    let denom = common_denominator(
        candidates
            .iter()
            .flatten()
            .chain(base_bids.iter())
            .chain(s.truth.values().iter()),
    );
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    let mut idx = vec![0usize; s.movers.len()];
    let mut ibids: Vec<i64> = Vec::new();
    let mut ivalues: Vec<i64> = Vec::new();
    if let Some(d) = denom {
        ibids = base_bids.iter().map(|b| scaled(b, d)).collect();
        ivalues = s.truth.values().iter().map(|v| scaled(v, d)).collect();
    }
    loop {
        let bids: Vec<Rational> = idx.iter().zip(candidates).map(|(&k, c)| c[k].clone()).collect();
        stats.profiles += 1;
        let u = match (&fast, denom) {
            (Some(f), Some(d)) => {
                for (m, b) in s.movers.iter().zip(&bids) {
                    ibids[*m] = scaled(b, d);
                }
                f.group_utility(&ibids, &ivalues, d, &group_mask)
            }
            _ => {
                let mut all = base_bids.clone();
                for (m, b) in s.movers.iter().zip(&bids) {
                    all[*m] = b.clone();
                }
                let prof = s.profile.with_bids(&all);
                match &lottery {
                    Some(l) => l.evaluate(&prof, &s.truth).group_utility(&s.group),
                    None => mech.evaluate(&s.net, &prof, &s.truth)?.group_utility(&s.group),
                }
            }
        };
        if best.as_ref().map_or(true, |(b, _)| u > *b) {
            best = Some((u, bids));
        }
        // odometer, last mover fastest
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < candidates[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn subsets(items: &[NodeId]) -> impl Iterator<Item = Vec<NodeId>> + '_ {
    (0u32..(1 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Evaluates `best_bids` and turns a strict gain into a witness.
fn witness_for(
    mech: &dyn MechanismUnderTest,
    s: &Structure,
    candidates: &[Vec<Rational>],
    truthful: &Play,
    baseline: &Rational,
    stats: &mut SearchStats,
) -> Result<Option<Witness>> {
    let Some((u, bids)) = best_bids(mech, s, candidates, stats)? else {
        return Ok(None);
    };
    if u <= *baseline {
        return Ok(None);
    }
    let mut all = s.profile.bids();
    for (m, b) in s.movers.iter().zip(&bids) {
        all[*m] = b.clone();
    }
    Ok(Some(Witness {
        truthful: truthful.clone(),
        deviated: Play {
            network: s.net.clone(),
            truth: s.truth.clone(),
            profile: s.profile.with_bids(&all),
            group: s.group.clone(),
        },
        gain: u - baseline,
    }))
}

fn keep_better(best: &mut Option<Witness>, w: Option<Witness>) {
    if let Some(w) = w {
        if best.as_ref().map_or(true, |b| w.gain > b.gain) {
            *best = Some(w);
        }
    }
}

/// Every buyer tries every grid bid (plus her value and the other bids) with
/// every subset of her neighbors, while everybody else is truthful.
pub fn ic_oracle(
    net: &SocialNetwork,
    truth: &TrueProfile,
    mech: &dyn MechanismUnderTest,
    grid_step: &Rational,
) -> Result<DeviationReport> {
    check_size(net)?;
    let truthful = truth.truthful_profile(net)?;
    let mask = participant_mask(net, &truthful);
    let honest = mech.evaluate(net, &truthful, truth)?;
    let buyers: Vec<NodeId> = net.nodes().filter(|&v| mask[v]).collect();
    let parts = buyers
        .par_iter()
        .map(|&i| -> Result<(Option<Witness>, SearchStats)> {
            let mut stats = SearchStats::default();
            let mut best = None;
            let baseline = honest.utilities[i].clone();
            let play = Play {
                network: net.clone(),
                truth: truth.clone(),
                profile: truthful.clone(),
                group: vec![i],
            };
            let cands = vec![bid_grid(grid_step, truthful.bids().iter().chain([truth.value(i)]))];
            for invited in subsets(net.out_neighbors(i)) {
                let profile = truthful.with_report(
                    net,
                    i,
                    Some(Report {
                        bid: truth.value(i).clone(),
                        invited,
                    }),
                )?;
                let s = Structure {
                    net: net.clone(),
                    truth: truth.clone(),
                    profile,
                    movers: vec![i],
                    group: vec![i],
                };
                keep_better(&mut best, witness_for(mech, &s, &cands, &play, &baseline, &mut stats)?);
            }
            Ok((best, stats))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeviationReport::from_parts(mech, "IC", parts))
}

/// Sybil wirings for an attacker with true neighbors `r` and Sybil ids
/// `sybils`: the attacker invites a subset of `r ∪ S`, each Sybil a subset of
/// `(r ∪ S) \ {itself}`. Wirings leaving a Sybil unreachable are dropped, and
/// for two Sybils only one of each relabeled pair is kept.
pub fn sybil_wirings(r: &[NodeId], sybils: &[NodeId]) -> Vec<(Vec<NodeId>, Vec<Vec<NodeId>>)> {
    let s = sybils.len();
    let pool: Vec<NodeId> = r.iter().chain(sybils).copied().collect();
    let w = pool.len();
    let sy_bit = |j: usize| r.len() + j;
    let mut out = Vec::new();
    let total_bits = w * (s + 1);
    if total_bits > 24 {
        return out;
    }
    for code in 0u64..(1u64 << total_bits) {
        let masks: Vec<u64> = (0..=s).map(|k| (code >> (k * w)) & ((1 << w) - 1)).collect();
        // no self loops
        if (1..=s).any(|j| masks[j] & (1 << sy_bit(j - 1)) != 0) {
            continue;
        }
        // every Sybil reachable from the attacker
        let mut reached = 0u64;
        let mut frontier = masks[0];
        while frontier & !reached != 0 {
            reached |= frontier;
            let mut next = 0;
            for j in 0..s {
                if reached & (1 << sy_bit(j)) != 0 {
                    next |= masks[j + 1];
                }
            }
            frontier = next;
        }
        if (0..s).any(|j| reached & (1 << sy_bit(j)) == 0) {
            continue;
        }
        if s == 2 {
            let swap = |m: u64| {
                let (a, b) = (1 << sy_bit(0), 1 << sy_bit(1));
                (m & !(a | b)) | if m & a != 0 { b } else { 0 } | if m & b != 0 { a } else { 0 }
            };
            let other = (swap(masks[0]), swap(masks[2]), swap(masks[1]));
            if (masks[0], masks[1], masks[2]) > other {
                continue;
            }
        }
        let decode = |m: u64| -> Vec<NodeId> { (0..w).filter(|k| m & (1 << k) != 0).map(|k| pool[k]).collect() };
        out.push((decode(masks[0]), masks[1..].iter().map(|&m| decode(m)).collect()));
    }
    out
}

/// Each buyer spawns up to `max_sybils` identities with her valuation, wired
/// only through herself, and sweeps the identities' bids and invitations.
/// The cluster's total utility is compared with her truthful utility.
pub fn sybil_oracle(
    net: &SocialNetwork,
    truth: &TrueProfile,
    mech: &dyn MechanismUnderTest,
    max_sybils: usize,
    grid_step: &Rational,
) -> Result<DeviationReport> {
    let opts = SybilOptions {
        max_sybils,
        grid_step: grid_step.clone(),
        sybil_step: grid_step.clone(),
        attackers: None,
    };
    sybil_oracle_with(net, truth, mech, &opts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SybilOptions {
    pub max_sybils: usize,
    /// Grid for the attacker's own bid.
    pub grid_step: Rational,
    /// Grid for the Sybils' bids, often coarser.
    pub sybil_step: Rational,
    /// Restrict the search to these attackers; all participants otherwise.
    pub attackers: Option<Vec<NodeId>>,
}

pub fn sybil_oracle_with(
    net: &SocialNetwork,
    truth: &TrueProfile,
    mech: &dyn MechanismUnderTest,
    opts: &SybilOptions,
) -> Result<DeviationReport> {
    check_size(net)?;
    let (max_sybils, grid_step, sybil_step) = (opts.max_sybils, &opts.grid_step, &opts.sybil_step);
    let truthful = truth.truthful_profile(net)?;
    let mask = participant_mask(net, &truthful);
    let honest = mech.evaluate(net, &truthful, truth)?;
    let n = net.len();
    let attackers: Vec<NodeId> = net
        .nodes()
        .filter(|&v| mask[v] && opts.attackers.as_ref().map_or(true, |a| a.contains(&v)))
        .collect();
    let parts = attackers
        .par_iter()
        .map(|&i| -> Result<(Option<Witness>, SearchStats)> {
            let mut stats = SearchStats::default();
            let mut best = None;
            let baseline = honest.utilities[i].clone();
            let play = Play {
                network: net.clone(),
                truth: truth.clone(),
                profile: truthful.clone(),
                group: vec![i],
            };
            let r = net.out_neighbors(i).to_vec();
            let own = bid_grid(grid_step, truthful.bids().iter().chain([truth.value(i)]));
            let fake = bid_grid(sybil_step, [truth.value(i)]);
            for s in 1..=max_sybils {
                let sybils: Vec<NodeId> = (n..n + s).collect();
                let labels: Vec<String> = (1..=s).map(|k| format!("{}'{}", net.label(i), k)).collect();
                let mut edges = Vec::new();
                let pool: Vec<NodeId> = r.iter().chain(&sybils).copied().collect();
                for &x in &sybils {
                    edges.push((i, x));
                    edges.extend(pool.iter().filter(|&&y| y != x).map(|&y| (x, y)));
                }
                let aug = net.extended(labels, edges)?;
                if aug.len() > exact_cap() {
                    continue;
                }
                let mut values = truth.values().to_vec();
                values.extend(std::iter::repeat(truth.value(i).clone()).take(s));
                let aug_truth = TrueProfile::new(values)?;
                let mut group = vec![i];
                group.extend(&sybils);
                let mut cands = vec![own.clone()];
                cands.extend(std::iter::repeat(fake.clone()).take(s));
                for (mine, theirs) in sybil_wirings(&r, &sybils) {
                    let mut reports: Vec<Option<Report>> = truthful.reports().to_vec();
                    reports[i] = Some(Report {
                        bid: truth.value(i).clone(),
                        invited: mine,
                    });
                    for inv in theirs {
                        reports.push(Some(Report {
                            bid: truth.value(i).clone(),
                            invited: inv,
                        }));
                    }
                    let st = Structure {
                        net: aug.clone(),
                        truth: aug_truth.clone(),
                        profile: ReportProfile::new(&aug, reports)?,
                        movers: group.clone(),
                        group: group.clone(),
                    };
                    keep_better(&mut best, witness_for(mech, &st, &cands, &play, &baseline, &mut stats)?);
                }
            }
            Ok((best, stats))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeviationReport::from_parts(mech, "SP", parts))
}

/// Where the cartel's common valuation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommonValue {
    /// Sweep the bid grid.
    #[default]
    Grid,
    /// Use the members' actual valuations; cartels with unequal values are skipped.
    Actual,
    GridAndActual,
}

/// Weakly connected node sets of size `1..=max`, sorted.
pub fn connected_subsets(net: &SocialNetwork, max: usize) -> Vec<Vec<NodeId>> {
    let n = net.len();
    let mut out = Vec::new();
    if n > 20 {
        return out;
    }
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > max {
            continue;
        }
        let members: Vec<NodeId> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        let mut seen = 1u32 << members[0];
        let mut stack = vec![members[0]];
        while let Some(u) = stack.pop() {
            for &w in &members {
                if seen & (1 << w) == 0 && (net.has_edge(u, w) || net.has_edge(w, u)) {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        if seen == mask {
            out.push(members);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Every connected cartel of at most `max_cartel` buyers, with a common
/// valuation, tries every joint deviation: each member bids on the grid,
/// invites any subset of her neighbors and fellow members, or stays away.
pub fn collusion_oracle(
    net: &SocialNetwork,
    truth: &TrueProfile,
    mech: &dyn MechanismUnderTest,
    max_cartel: usize,
    grid_step: &Rational,
    common: CommonValue,
) -> Result<DeviationReport> {
    check_size(net)?;
    let truthful = truth.truthful_profile(net)?;
    let mask = participant_mask(net, &truthful);
    let cartels: Vec<Vec<NodeId>> = connected_subsets(net, max_cartel)
        .into_iter()
        .filter(|c| c.iter().all(|&v| mask[v]))
        .collect();
    let parts = cartels
        .par_iter()
        .map(|cartel| cartel_search(net, truth, &truthful, mech, cartel, grid_step, common))
        .collect::<Result<Vec<_>>>()?;
    Ok(DeviationReport::from_parts(mech, "CP", parts))
}

fn cartel_search(
    net: &SocialNetwork,
    truth: &TrueProfile,
    truthful: &ReportProfile,
    mech: &dyn MechanismUnderTest,
    cartel: &[NodeId],
    grid_step: &Rational,
    common: CommonValue,
) -> Result<(Option<Witness>, SearchStats)> {
    let mut stats = SearchStats::default();
    let mut best = None;
    let mut values_to_try: BTreeSet<Rational> = BTreeSet::new();
    if matches!(common, CommonValue::Grid | CommonValue::GridAndActual) {
        values_to_try.extend(bid_grid(grid_step, []));
    }
    if matches!(common, CommonValue::Actual | CommonValue::GridAndActual) {
        let v0 = truth.value(cartel[0]);
        if cartel.iter().all(|&v| truth.value(v) == v0) {
            values_to_try.insert(v0.clone());
        }
    }
    if values_to_try.is_empty() {
        return Ok((None, stats));
    }
    // members may invite one another
    let side: Vec<(NodeId, NodeId)> = cartel
        .iter()
        .flat_map(|&u| cartel.iter().filter(move |&&w| w != u).map(move |&w| (u, w)))
        .filter(|&(u, w)| !net.has_edge(u, w))
        .collect();
    let aug = net.extended(Vec::new(), side)?;
    let plays: Vec<(Rational, TrueProfile, Play, Rational)> = values_to_try
        .into_iter()
        .map(|vc| -> Result<_> {
            let mut values = truth.values().to_vec();
            for &u in cartel {
                values[u] = vc.clone();
            }
            let t = TrueProfile::new(values)?;
            let mut bids = truthful.bids();
            for &u in cartel {
                bids[u] = vc.clone();
            }
            let profile = ReportProfile::new(&aug, truthful.with_bids(&bids).reports().to_vec())?;
            let play = Play {
                network: aug.clone(),
                truth: t.clone(),
                profile,
                group: cartel.to_vec(),
            };
            let base = play.utility(mech)?;
            Ok((vc, t, play, base))
        })
        .collect::<Result<_>>()?;
    // per member: None = absent, Some(invited)
    let options: Vec<Vec<Option<Vec<NodeId>>>> = cartel
        .iter()
        .map(|&u| std::iter::once(None).chain(subsets(aug.out_neighbors(u)).map(Some)).collect())
        .collect();
    let mut idx = vec![0usize; cartel.len()];
    loop {
        let mut reports: Vec<Option<Report>> = truthful.reports().to_vec();
        for (k, &u) in cartel.iter().enumerate() {
            reports[u] = options[k][idx[k]].clone().map(|invited| Report {
                bid: Rational::zero(),
                invited,
            });
        }
        let profile = ReportProfile::new(&aug, reports)?;
        let part = participant_mask(&aug, &profile);
        // a present member nobody reaches behaves exactly like an absent one
        let redundant = cartel.iter().any(|&u| !profile.is_absent(u) && !part[u]);
        if !redundant {
            let movers: Vec<NodeId> = cartel.iter().copied().filter(|&u| !profile.is_absent(u)).collect();
            for (vc, t, play, base) in &plays {
                let grid = bid_grid(grid_step, [vc]);
                let cands = vec![grid; movers.len()];
                let s = Structure {
                    net: aug.clone(),
                    truth: t.clone(),
                    profile: profile.clone(),
                    movers: movers.clone(),
                    group: cartel.to_vec(),
                };
                keep_better(&mut best, witness_for(mech, &s, &cands, play, base, &mut stats)?);
            }
        }
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok((best, stats));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mechanism::Mechanism;
    use crate::rational::q;

    #[test]
    fn audit_flags_constructed_negatives() {
        let inst = fixtures::triangle();
        let prof = inst.values.truthful_profile(&inst.network).unwrap();
        let out = Mechanism::from_name("fpdm-bf", 1).unwrap().evaluate(&inst.network, &prof, &inst.values).unwrap();
        assert!(audit_basic(&out, &prof, 1).passed());

        let mut bad = out.clone();
        bad.win_probabilities = vec![q("0.4"), q("0.4"), q("0.4")];
        assert!(!audit_basic(&bad, &prof, 1).feasible);

        let mut bad = out;
        bad.utilities[1] = q("-0.1");
        assert_eq!(audit_basic(&bad, &prof, 1).ir_failures, vec![1]);
    }

    #[test]
    fn grid_contains_extras() {
        let g = bid_grid(&q("1/4"), [&q("0.3"), &q("2")]);
        assert_eq!(g, vec![q("0"), q("0.25"), q("0.3"), q("0.5"), q("0.75"), q("1")]);
    }

    #[test]
    fn sybil_wirings_are_reachable_and_canonical() {
        // no real neighbors, one Sybil: the attacker must invite it
        assert_eq!(sybil_wirings(&[], &[5]), vec![(vec![5], vec![vec![]])]);
        let two = sybil_wirings(&[], &[5, 6]);
        // {5,6} invited with (none, none), (6, none) ~ (none, 5), (6, 5); or a chain 5 -> 6
        assert!(two.iter().all(|(a, _)| !a.is_empty()));
        assert_eq!(two.len(), 5);
    }

    #[test]
    fn connected_cartels_of_cartel_example() {
        let inst = fixtures::cartel_example();
        let c = connected_subsets(&inst.network, 3);
        assert_eq!(
            c,
            vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
    }
}
